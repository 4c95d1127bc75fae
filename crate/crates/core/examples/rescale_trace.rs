//! Norms of F♯_{p_j} along basepoints p_j -> 0 on H_1^3.

use hyperquad::exactnum::{format_rational, rat};
use hyperquad::quadric::{HypersurfaceGerm, PolyMap, QuadricAutomorphism};
use hyperquad::rescale::{default_threshold, run_rescale_experiment, BasepointSpec, NormTrace};
use hyperquad::GR;

fn report(label: &str, t: &NormTrace) {
    println!("{label}: norms constant {}, all checks {}", t.norms_constant(), t.all_passed());
    for p in &t.points {
        let norms: Vec<String> = p.norms.values().map(format_rational).collect();
        let l2 = p.lambda_sq.as_ref().map_or("-".into(), format_rational);
        println!("  p{}: lambda^2 = {l2}, norms [{}]", p.point_index, norms.join(", "));
    }
}

fn main() -> hyperquad::Result<()> {
    let m = HypersurfaceGerm::quadric(3, 1)?;
    let spec = BasepointSpec::dyadic_curve(vec![GR::from_int(0), GR::from_ratios(1, 2, 1, 2)], rat(1, 3), 4);
    let th = default_threshold();

    let id = PolyMap::identity(3, 1)?.to_rational()?;
    report("identity", &run_rescale_experiment(&id, &m, &spec, 6, &th)?);

    let e = PolyMap::embedding(3, 4, 1)?.to_rational()?;
    report("embedding", &run_rescale_experiment(&e, &m, &spec, 6, &th)?);

    // Precomposing with an automorphism: normalization absorbs it.
    let b = QuadricAutomorphism {
        a: vec![GR::from_ratios(1, 2, 0, 1), GR::from_ratios(0, 1, 1, 3)],
        r: rat(1, 4),
        ..QuadricAutomorphism::identity(3, 1)
    };
    let eb = e.compose(&b.to_rational()?)?;
    let t = run_rescale_experiment(&eb, &m, &spec, 6, &th)?;
    report("embedding o B", &t);
    println!("codimension in regime: {}", t.codimension_in_regime);
    Ok(())
}
