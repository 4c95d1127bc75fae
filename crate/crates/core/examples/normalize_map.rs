//! Normalizing A∘E∘B, with A and B quadric automorphisms and E the linear
//! embedding, recovers E. A map with irrational λ also normalizes exactly.

use hyperquad::exactnum::{format_rational, rat};
use hyperquad::hermitian::cayley_isometry;
use hyperquad::linalg::Matrix;
use hyperquad::polyring::build::{w, z};
use hyperquad::quadric::{gauss_codazzi_residual, normalize_bh, HypersurfaceGerm, PolyMap, QuadricAutomorphism};
use hyperquad::{Signature, VarSpace, GR};

fn automorphism(n: usize, ell: usize, t: i64) -> hyperquad::Result<QuadricAutomorphism> {
    let sig = Signature::new(n - 1, ell)?;
    let mut m = Matrix::zeros(n - 1, n - 1);
    for i in 0..n - 1 {
        m[(i, i)] = GR::from_ratios(0, 1, t, 3);
        m[(i, (i + 1) % (n - 1))] += &GR::from_ratios(1, 2, 0, 1);
    }
    let u = cayley_isometry(&sig, &m).expect("Cayley transform defined");
    Ok(QuadricAutomorphism {
        n,
        ell,
        lambda: rat(t + 1, 2),
        u,
        a: (0..n - 1).map(|k| GR::from_ratios(1, 2 + k as i64, -t, 3)).collect(),
        r: rat(t, 5),
    })
}

fn main() -> hyperquad::Result<()> {
    let (n, big, ell) = (3, 4, 1);
    let a = automorphism(big, ell, 1)?.to_rational()?;
    let b = automorphism(n, ell, 2)?.to_rational()?;
    let e = PolyMap::embedding(n, big, ell)?.to_rational()?;
    let f = a.compose(&e.compose(&b)?)?.series(8)?;
    println!("F = A o E o B to weight 8 has {} terms in g", f.g.len());

    let m = HypersurfaceGerm::quadric(n, ell)?;
    let nz = normalize_bh(&f, &m, 8)?;
    println!("lambda^2 = {}, r0 = {}", format_rational(&nz.data.lambda_sq), format_rational(&nz.data.r0));
    println!("F# =\n{}", nz.f_sharp);
    println!("F# == E: {}", nz.f_sharp == PolyMap::embedding(n, big, ell)?.truncate(8));
    println!("Gauss-Codazzi residual zero: {}", gauss_codazzi_residual(&nz.f_sharp, &m, &nz.m_sharp)?.is_zero());

    // (z, z, 2w): λ² = 2 is not a square, but the complement row (1/2, -1/2)
    // has ⟨r, r⟩ = 1/2, so every scale of T is 1.
    let sp = VarSpace::segre(1);
    let g = PolyMap::new(2, 3, 0, vec![z(&sp, 0), z(&sp, 0)], w(&sp).scale(&GR::from_int(2)))?;
    let nz = normalize_bh(&g, &HypersurfaceGerm::quadric(2, 0)?, 6)?;
    println!("(z, z, 2w) normalizes to\n{}", nz.f_sharp);
    println!("T scales: {:?}", nz.t.scale_sq.iter().map(format_rational).collect::<Vec<_>>());
    Ok(())
}
