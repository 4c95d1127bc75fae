//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperquad::exactnum::{int, rat, Rational};
use hyperquad::family_reduce::{paired_sum, reduce_family, PolyFamily};
use hyperquad::hermitian::{
    cayley_isometry, divide_by_norm_sq, divide_with_remainder, huang_kernel_check, pairing_poly,
};
use hyperquad::linalg::Matrix;
use hyperquad::polyring::monomials_of_degree;
use hyperquad::quadric::{
    check_normal_form, complexified_identity, gauss_codazzi_residual, maps_into_quadric, normalize_bh,
    quadric_translation, translation_to, HypersurfaceGerm, PolyMap, QuadricAutomorphism, RationalMap,
};
use hyperquad::rescale::{assemble_a_tensors, default_threshold, is_forced_zero, run_rescale_experiment, BasepointSpec};
use hyperquad::{FormalPoly, Monomial, Signature, VarSpace, GR};

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

fn small_gr(rng: &mut ChaCha8Rng) -> GR {
    let im = if rng.gen_bool(0.5) { small_rational(rng) } else { Rational::zero() };
    GR::new(small_rational(rng), im)
}

fn nonzero_gr(rng: &mut ChaCha8Rng) -> GR {
    loop {
        let c = small_gr(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random homogeneous polynomial of degree `d` in the variables `vars`.
fn homogeneous(rng: &mut ChaCha8Rng, sp: VarSpace, vars: &[usize], d: u32, density: f64) -> FormalPoly {
    let mut terms = Vec::new();
    for e in monomials_of_degree(vars.len(), d) {
        if rng.gen_bool(density) {
            let mut exps = vec![0; sp.nvars()];
            for (v, x) in vars.iter().zip(e) {
                exps[*v] = x;
            }
            terms.push((exps, small_gr(rng)));
        }
    }
    FormalPoly::from_terms(sp, terms, None)
}

/// Random polynomial in `z` and `ξ` of bidegree at most `(dz, dx)`.
fn bihermitian_poly(rng: &mut ChaCha8Rng, sp: VarSpace, dz: u32, dx: u32, density: f64) -> FormalPoly {
    let zs: Vec<usize> = (0..sp.n_z).map(|i| sp.z(i)).collect();
    let xs: Vec<usize> = (0..sp.n_xi).map(|i| sp.xi(i)).collect();
    let mut acc = FormalPoly::zero(sp);
    for a in 0..=dz {
        for b in 0..=dx {
            let hz = homogeneous(rng, sp, &zs, a, density);
            let one = FormalPoly::one(sp);
            let hx = if b == 0 { one } else { homogeneous(rng, sp, &xs, b, 1.0) };
            acc = &acc + &(&hz * &hx);
        }
    }
    acc
}

struct Outcome {
    name: &'static str,
    passed: usize,
    total: usize,
    note: String,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.passed == self.total && self.total > 0
    }
}

/// Independent recheck of every certified inequality of a reduction.
fn reduction_holds(phi: &PolyFamily, psi: &PolyFamily) -> bool {
    let Ok(r) = reduce_family(phi, psi) else { return false };
    let s = r.phi_tilde.len();
    let one = Rational::one();
    let four = int(4);
    let before = paired_sum(phi, psi).unwrap();
    let sum = paired_sum(&r.phi_tilde, &r.psi_tilde).unwrap();
    if before != sum {
        return false;
    }
    if r.phi_tilde.members().iter().any(|m| m.coeff_norm_sq() != one) {
        return false;
    }
    let d = r.phi_tilde.coeff_matrix();
    for (j, &p) in r.pivot_columns.iter().enumerate() {
        // |D_j^j|² ≥ 1/4^{s-j} with 1-based j.
        let bound = num_traits::pow(four.clone(), s - (j + 1)).recip();
        if d[(j, p)].sq_modulus() < bound {
            return false;
        }
    }
    let psi_n = r.psi_tilde.norm_sq();
    let lhs = sum.coeff_norm_sq();
    let lower = if s == 0 { Rational::zero() } else { num_traits::pow(four, s - 1).recip() * &psi_n };
    let upper = int((s * s) as i64) * &psi_n;
    lower <= lhs && lhs <= upper
}

fn criterion_reduction(rng: &mut ChaCha8Rng) -> Outcome {
    let total = 500;
    let mut passed = 0;
    for _ in 0..total {
        let n = rng.gen_range(2..=4);
        let s = rng.gen_range(1..=5);
        let deg = rng.gen_range(0..=4);
        let pdeg = rng.gen_range(0..=2);
        let sp = VarSpace::bihermitian(n);
        let zs: Vec<usize> = (0..n).map(|i| sp.z(i)).collect();
        let xs: Vec<usize> = (0..n).map(|i| sp.xi(i)).collect();
        let phi: Vec<FormalPoly> = (0..s).map(|_| homogeneous(rng, sp, &zs, deg, 0.6)).collect();
        let psi: Vec<FormalPoly> = (0..s).map(|_| homogeneous(rng, sp, &xs, pdeg, 0.7)).collect();
        let phi = PolyFamily::with_degree(phi, zs, deg).unwrap();
        let psi = PolyFamily::with_degree(psi, xs, pdeg).unwrap();
        if reduction_holds(&phi, &psi) {
            passed += 1;
        }
    }
    Outcome { name: "reduction bound", passed, total, note: "families".into() }
}

fn criterion_huang(rng: &mut ChaCha8Rng) -> Outcome {
    let total = 200;
    let mut passed = 0;
    let mut kernels = 0;
    for t in 0..total {
        let n = rng.gen_range(3..=4);
        let ell = rng.gen_range(0..=n / 2);
        let sig = Signature::new(n, ell).unwrap();
        let sp = VarSpace::bihermitian(n);
        let zs: Vec<usize> = (0..n).map(|i| sp.z(i)).collect();
        let mut phi: Vec<FormalPoly> = (0..n - 1)
            .map(|_| {
                let d = rng.gen_range(1..=3);
                (1..=d).fold(FormalPoly::zero(sp), |acc, k| &acc + &homogeneous(rng, sp, &zs, k, 0.4))
            })
            .collect();
        // Every fourth family is dependent so that the kernel is nontrivial.
        if t % 4 == 0 {
            phi[1] = phi[0].scale(&nonzero_gr(rng));
        }
        let r = huang_kernel_check(&sig, &phi, 3).unwrap();
        kernels += r.kernel_dim;
        let p = pairing_poly(&sig, &sp).unwrap();
        let sums_vanish = r.basis.iter().all(|psi| {
            let sum = phi.iter().zip(psi).fold(FormalPoly::zero(sp), |acc, (f, g)| &acc + &(f * g));
            let div = divide_with_remainder(&sig, &sum, 1).unwrap();
            div.remainder.is_zero() && (&div.quotient * &p) == sum && div.quotient.is_zero()
        });
        if r.holds() && sums_vanish {
            passed += 1;
        }
    }
    Outcome { name: "Huang kernel", passed, total, note: format!("families, {kernels} kernel vectors checked") }
}

fn criterion_division(rng: &mut ChaCha8Rng) -> Outcome {
    let mut passed = 0;
    for _ in 0..500 {
        let dim = rng.gen_range(1..=4);
        let sig = Signature::new(dim, rng.gen_range(0..=dim)).unwrap();
        let sp = VarSpace::bihermitian(dim);
        let y = bihermitian_poly(rng, sp, 2, 2, 0.4);
        let x = &y * &pairing_poly(&sig, &sp).unwrap();
        if divide_by_norm_sq(&sig, &x).unwrap() == Some(y) {
            passed += 1;
        }
    }
    for _ in 0..500 {
        let dim = rng.gen_range(1..=4);
        let sig = Signature::new(dim, rng.gen_range(0..=dim)).unwrap();
        let sp = VarSpace::bihermitian(dim);
        let m = rng.gen_range(1..=3);
        let x = bihermitian_poly(rng, sp, 3, 3, 0.3);
        let d = divide_with_remainder(&sig, &x, m).unwrap();
        let pm = pairing_poly(&sig, &sp).unwrap().pow_trunc(m, None);
        // Canonical remainder: no term divisible by (z_1 ξ_1)^m.
        let mut lead = vec![0; sp.nvars()];
        lead[sp.z(0)] = m;
        lead[sp.xi(0)] = m;
        let lead = Monomial::new(&sp, lead);
        let canonical = d.remainder.terms().all(|(mo, _)| mo.div(&lead).is_none());
        if &d.remainder + &(&d.quotient * &pm) == x && canonical {
            passed += 1;
        }
    }
    Outcome { name: "division round-trips", passed, total: 1000, note: "quotients and reconstructions".into() }
}

fn random_isometry(rng: &mut ChaCha8Rng, sig: &Signature) -> Matrix {
    loop {
        let mut m = Matrix::zeros(sig.dim, sig.dim);
        for i in 0..sig.dim {
            for j in 0..sig.dim {
                if rng.gen_bool(0.5) {
                    m[(i, j)] = small_gr(rng);
                }
            }
        }
        if let Some(u) = cayley_isometry(sig, &m) {
            return u;
        }
    }
}

fn random_automorphism(rng: &mut ChaCha8Rng, n: usize, ell: usize) -> RationalMap {
    let sig = Signature::new(n - 1, ell).unwrap();
    QuadricAutomorphism {
        n,
        ell,
        lambda: rat(rng.gen_range(1..=3), rng.gen_range(1..=3)),
        u: random_isometry(rng, &sig),
        a: (0..n - 1).map(|_| small_gr(rng)).collect(),
        r: small_rational(rng),
    }
    .to_rational()
    .unwrap()
}

fn random_quadric_point(rng: &mut ChaCha8Rng, sig: &Signature) -> (Vec<GR>, GR) {
    let z: Vec<GR> = (0..sig.dim).map(|_| small_gr(rng)).collect();
    let w = GR::new(small_rational(rng), sig.norm_sq(&z));
    (z, w)
}

struct NormalizationRun {
    normal_form: bool,
    gauss_codazzi: bool,
    tensors_zero: bool,
    automorphisms: bool,
}

fn normalization_instance(rng: &mut ChaCha8Rng) -> NormalizationRun {
    let n = rng.gen_range(3..=4);
    let big = n + rng.gen_range(0..=1);
    let ell = rng.gen_range(0..=1);
    let a = random_automorphism(rng, big, ell);
    let b = random_automorphism(rng, n, ell);
    let e = PolyMap::embedding(n, big, ell).unwrap().to_rational().unwrap();
    let f = a.compose(&e.compose(&b).unwrap()).unwrap();
    let m = HypersurfaceGerm::quadric(n, ell).unwrap();

    let nz6 = normalize_bh(&f.series(6).unwrap(), &m, 6);
    let (normal_form, gauss_codazzi, t_ok) = match &nz6 {
        Ok(nz) => {
            let nf = check_normal_form(&nz.f_sharp).is_ok();
            let gc = gauss_codazzi_residual(&nz.f_sharp, &m, &nz.m_sharp).map(|r| r.is_zero()).unwrap_or(false);
            let t = maps_into_quadric(&nz.m_sharp, &nz.t.series(6).unwrap(), 6).unwrap().is_zero();
            (nf, gc, t)
        }
        Err(_) => (false, false, false),
    };

    let tensors_zero = match normalize_bh(&f.series(8).unwrap(), &m, 8) {
        Ok(nz) => assemble_a_tensors(&nz.f_sharp, 8)
            .map(|a| a.iter().all(|(idx, p)| !is_forced_zero(*idx) || p.is_zero()))
            .unwrap_or(false),
        Err(_) => false,
    };

    let tsig = Signature::new(big - 1, ell).unwrap();
    let (z0, w0) = random_quadric_point(rng, &tsig);
    let target = HypersurfaceGerm::quadric(big, ell).unwrap();
    let tau = maps_into_quadric(&target, &quadric_translation(&tsig, &z0, &w0).unwrap(), 6).unwrap().is_zero();
    NormalizationRun { normal_form, gauss_codazzi, tensors_zero, automorphisms: t_ok && tau }
}

/// Random maps `A∘E∘B`, half of them perturbed by one random monomial.
fn criterion_cross_validation(rng: &mut ChaCha8Rng) -> Outcome {
    let total = 100;
    let mut passed = 0;
    let mut failing = 0;
    for t in 0..total {
        let n = rng.gen_range(2..=3);
        let big = n + rng.gen_range(0..=1);
        let ell = rng.gen_range(0..=(n - 1) / 2);
        let a = random_automorphism(rng, big, ell);
        let e = PolyMap::embedding(n, big, ell).unwrap().to_rational().unwrap();
        let mut f = a.compose(&e).unwrap().series(6).unwrap();
        if t % 2 == 1 {
            let sp = f.space();
            let k = rng.gen_range(0..f.z_components.len() + 1);
            let mut exps = vec![0; sp.nvars()];
            exps[sp.z(rng.gen_range(0..n - 1))] = rng.gen_range(1..=2);
            exps[sp.w()] = rng.gen_range(0..=1);
            let bump = FormalPoly::from_terms(sp, [(exps, nonzero_gr(rng))], None);
            if k == f.z_components.len() {
                f.g = &f.g + &bump;
            } else {
                f.z_components[k] = &f.z_components[k] + &bump;
            }
        }
        let m = HypersurfaceGerm::quadric(n, ell).unwrap();
        let r = maps_into_quadric(&m, &f, 6).unwrap();
        let c = complexified_identity(&f, 6).unwrap();
        if r.first_nonzero().is_some() {
            failing += 1;
        }
        let c_first = c.weighted_components().into_iter().find(|(_, p)| !p.is_zero()).map(|(d, _)| d);
        if r.is_zero() == c.is_zero() && r.first_nonzero() == c_first {
            passed += 1;
        }
    }
    Outcome { name: "cross-validation", passed, total, note: format!("maps, {failing} non-mapping") }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut outcomes = Vec::new();
    let mut run = |o: Outcome, start: Instant| {
        println!(
            "criterion {}: {} {} ({}/{} {}) [{:.1}s]",
            outcomes.len() + 1,
            o.name,
            if o.ok() { "PASS" } else { "FAIL" },
            o.passed,
            o.total,
            o.note,
            start.elapsed().as_secs_f64()
        );
        outcomes.push(o.ok());
    };

    let t = Instant::now();
    run(criterion_reduction(&mut rng), t);
    let t = Instant::now();
    run(criterion_huang(&mut rng), t);
    let t = Instant::now();
    run(criterion_division(&mut rng), t);

    let t = Instant::now();
    let runs: Vec<NormalizationRun> = (0..100).map(|_| normalization_instance(&mut rng)).collect();
    let count = |p: fn(&NormalizationRun) -> bool| runs.iter().filter(|r| p(r)).count();
    let nf = count(|r| r.normal_form && r.gauss_codazzi);
    run(Outcome { name: "normalization of A o E o B", passed: nf, total: 100, note: "instances at order 6".into() }, t);
    let t = Instant::now();
    let tz = count(|r| r.tensors_zero);
    run(Outcome { name: "A-tensor zero slots", passed: tz, total: 100, note: "normalized maps through order 8".into() }, t);

    let t = Instant::now();
    run(criterion_cross_validation(&mut rng), t);

    let t = Instant::now();
    let (rescale, contract7) = criterion_rescale();
    run(rescale, t);

    let t = Instant::now();
    let auto = count(|r| r.automorphisms);
    run(
        Outcome {
            name: "automorphism contract",
            passed: auto + contract7.0,
            total: 100 + contract7.1,
            note: "T and translations with zero residual".into(),
        },
        t,
    );

    let failed = outcomes.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

/// Identity and embedding on `H_1^3`, 8 basepoints `t_j = 2^{-j}`, order 8.
/// Also returns `(passed, total)` for the automorphisms met along the way.
fn criterion_rescale() -> (Outcome, (usize, usize)) {
    let m = HypersurfaceGerm::quadric(3, 1).unwrap();
    let sig = m.sig;
    let spec = BasepointSpec::dyadic_curve(vec![GR::from_ratios(1, 2, 0, 1), GR::from_ratios(1, 1, -1, 2)], rat(1, 3), 8);
    let mut passed = 0;
    let mut auto = (0, 0);
    for f in [PolyMap::identity(3, 1).unwrap(), PolyMap::embedding(3, 4, 1).unwrap()] {
        let tr = run_rescale_experiment(&f.to_rational().unwrap(), &m, &spec, 8, &default_threshold()).unwrap();
        let lambda_one = tr.points.iter().all(|p| p.lambda_sq == Some(int(1)));
        if tr.points.len() == 8 && tr.norms_constant() && lambda_one && tr.all_passed() {
            passed += 1;
        }
        for p in &tr.points {
            auto.1 += 1;
            if p.checks.get("normalizing_automorphism") == Some(&true) && p.checks.get("target_translation") == Some(&true) {
                auto.0 += 1;
            }
        }
    }
    for p in spec.points(&m).unwrap() {
        auto.1 += 1;
        let tp = translation_to(&sig, &p.z, &p.w).unwrap();
        let tq = quadric_translation(&sig, &p.z, &p.w).unwrap();
        if maps_into_quadric(&m, &tp, 8).unwrap().is_zero() && maps_into_quadric(&m, &tq, 8).unwrap().is_zero() {
            auto.0 += 1;
        }
    }
    (Outcome { name: "rescale trace", passed, total: 2, note: "maps over 8 basepoints".into() }, auto)
}
