//! Does a map send the source germ into the quadric? Two independent checks:
//! substitution along the graph and the complexified identity.

use hyperquad::quadric::{complexified_identity, maps_into_quadric, Grading, HypersurfaceGerm, PolyMap};
use hyperquad::polyring::build::{w, xi, z};
use hyperquad::{VarSpace, GR};

fn main() -> hyperquad::Result<()> {
    let h = HypersurfaceGerm::quadric(3, 1)?;
    let e = PolyMap::embedding(3, 4, 1)?;
    let r = maps_into_quadric(&h, &e, 8)?;
    println!("embedding H_1^3 -> H_1^4: residual zero {}", r.is_zero());

    let mut bad = PolyMap::identity(3, 1)?;
    bad.g = bad.g.scale(&GR::from_int(2));
    let r = maps_into_quadric(&h, &bad, 6)?;
    let c = complexified_identity(&bad, 6)?;
    println!("g = 2w: first failing weight {:?} (complexified {:?})", r.first_nonzero(), c.lower_weight());
    for (k, part) in &r.by_degree {
        println!("  weight {k}: {part}");
    }

    // Im w = |z|² + |z|⁴ maps into H_0^3 under (z, z², w).
    let rsp = VarSpace::real(1);
    let zx = &z(&rsp, 0) * &xi(&rsp, 0);
    let curved = HypersurfaceGerm::new(2, 0, &zx * &zx, Grading::Total)?;
    let sp = VarSpace::segre(1);
    let f = PolyMap::new(2, 3, 0, vec![z(&sp, 0), &z(&sp, 0) * &z(&sp, 0)], w(&sp))?;
    let r = maps_into_quadric(&curved, &f, 8)?;
    println!("(z, z^2, w) on the curved germ: residual zero {} ({} grading)", r.is_zero(), r.grading.as_str());
    Ok(())
}
