//! Weighted truncated polynomials: z, ξ weigh 1 and w, η weigh 2.

use hyperquad::polyring::build::{w, xi, z};
use hyperquad::{FormalPoly, VarSpace, GR};

fn main() -> hyperquad::Result<()> {
    let sp = VarSpace::segre(2);
    let p = &(&z(&sp, 0) * &xi(&sp, 0)) + &(&w(&sp) * &z(&sp, 1));
    println!("p = {p}");
    for (k, part) in p.weighted_components() {
        println!("  weight {k}: {part}");
    }

    // A product keeps only the weights its truncated factors determine.
    let q = (&FormalPoly::one(sp) + &z(&sp, 0)).truncate(3);
    let pq = p.try_mul(&q)?;
    println!("p * (1 + z1 + O(4)) known to weight {:?}", pq.trunc());

    // 1/(1 - w) to weight 6.
    let d = &FormalPoly::one(sp) - &w(&sp);
    println!("1/(1 - w) = {}", d.inverse_series(6)?);

    // Substitute w -> w + 2i z1 ξ1.
    let mut images: Vec<FormalPoly> = (0..sp.nvars()).map(|v| FormalPoly::var(sp, v)).collect();
    images[sp.w()] = &w(&sp) + &(&z(&sp, 0) * &xi(&sp, 0)).scale(&GR::from_ratios(0, 1, 2, 1));
    println!("p(w -> w + 2i z1 xi1) = {}", p.substitute(&images, &sp, 4)?);
    println!("conj(p) = {}", p.conj_poly()?);
    Ok(())
}
