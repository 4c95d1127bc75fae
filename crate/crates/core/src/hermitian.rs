//! Signature-ℓ Hermitian pairing `⟨z,ξ⟩_ℓ = -Σ_{j≤ℓ} z_jξ_j + Σ_{j>ℓ} z_jξ_j`
//! and exact division by it and its powers.
//!
//! The second slot is always pre-conjugated into the `ξ` block, so every
//! pairing here is bilinear.

use num_traits::One;

use crate::error::{Error, Result};
use crate::exactnum::{Rational, GR};
use crate::linalg::Matrix;
use crate::polyring::{monomials_of_degree, FormalPoly, Monomial, VarSpace};

/// Dimension and number of negative directions of the pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub dim: usize,
    pub ell: usize,
}

impl Signature {
    pub fn new(dim: usize, ell: usize) -> Result<Self> {
        if dim == 0 || ell > dim {
            return Err(Error::InvalidSignature(format!("dim {dim}, ell {ell}")));
        }
        Ok(Self { dim, ell })
    }

    /// `-1` for the first `ℓ` coordinates, `+1` otherwise (0-based `j`).
    pub fn delta(&self, j: usize) -> i64 {
        if j < self.ell {
            -1
        } else {
            1
        }
    }

    pub fn delta_gr(&self, j: usize) -> GR {
        GR::from_int(self.delta(j))
    }

    /// `0 < ℓ` and `2ℓ ≤ dim`: the form is indefinite with at most as many
    /// negative as positive directions.
    pub fn in_standard_regime(&self) -> bool {
        self.ell > 0 && 2 * self.ell <= self.dim
    }

    /// `2ℓ = dim`; only then is the swap of negative and positive blocks
    /// available.
    pub fn is_maximal(&self) -> bool {
        2 * self.ell == self.dim
    }

    /// The diagonal matrix `J = diag(δ_1, ..., δ_dim)`.
    pub fn gram(&self) -> Matrix {
        Matrix::diag(&(0..self.dim).map(|j| self.delta_gr(j)).collect::<Vec<_>>())
    }

    /// `⟨a, b̄⟩_ℓ` for scalar vectors (conjugates the second slot).
    pub fn hermitian(&self, a: &[GR], b: &[GR]) -> GR {
        (0..self.dim).map(|j| &(&a[j] * &b[j].conj()) * &self.delta_gr(j)).sum()
    }

    pub fn norm_sq(&self, a: &[GR]) -> Rational {
        self.hermitian(a, a).re
    }
}

/// `⟨z,ξ⟩_ℓ` as a polynomial in `space`, using its first `dim` z and ξ variables.
pub fn pairing_poly(sig: &Signature, space: &VarSpace) -> Result<FormalPoly> {
    if space.n_z < sig.dim || space.n_xi < sig.dim {
        return Err(Error::SpaceMismatch(format!("{space:?} lacks {} paired coordinates", sig.dim)));
    }
    let mut p = FormalPoly::zero(*space);
    for j in 0..sig.dim {
        let mut exps = vec![0; space.nvars()];
        exps[space.z(j)] = 1;
        exps[space.xi(j)] = 1;
        p = &p + &FormalPoly::monomial(*space, Monomial::new(space, exps), sig.delta_gr(j));
    }
    Ok(p)
}

/// `-Σ_{j≤ℓ} a_j b_j + Σ_{j>ℓ} a_j b_j`.
pub fn pair(sig: &Signature, a: &[FormalPoly], b: &[FormalPoly]) -> Result<FormalPoly> {
    for v in [a, b] {
        if v.len() != sig.dim {
            return Err(Error::LengthMismatch { expected: sig.dim, got: v.len() });
        }
    }
    let mut acc = FormalPoly::zero(*a[0].space());
    for j in 0..sig.dim {
        let t = a[j].try_mul(&b[j])?;
        acc = if sig.delta(j) < 0 { acc.try_sub(&t)? } else { acc.try_add(&t)? };
    }
    Ok(acc)
}

/// `X = H + B·⟨z,ξ⟩_ℓ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Division {
    pub quotient: FormalPoly,
    pub remainder: FormalPoly,
}

/// Splits `x` as `H + B·⟨z,ξ⟩_ℓ^m` with the canonical remainder `H`: no
/// monomial of `H` is divisible by the leading monomial of `⟨z,ξ⟩_ℓ^m`.
///
/// Per `(z,ξ)` bidegree this is the residual after eliminating the pivot
/// monomials of the image of multiplication by `⟨z,ξ⟩_ℓ^m` in reduced row
/// echelon form, with columns in decreasing monomial order.
pub fn divide_with_remainder(sig: &Signature, x: &FormalPoly, m: u32) -> Result<Division> {
    if m == 0 {
        return Err(Error::InvalidInput("power m must be at least 1".into()));
    }
    let p = pairing_poly(sig, x.space())?.pow_trunc(m, None);
    let (quotient, remainder) = x.div_rem(&p)?;
    Ok(Division { quotient, remainder })
}

/// The quotient `Y` with `X = Y·|z|²_ℓ`, if `X` is divisible.
pub fn divide_by_norm_sq(sig: &Signature, x: &FormalPoly) -> Result<Option<FormalPoly>> {
    let d = divide_with_remainder(sig, x, 1)?;
    Ok(d.remainder.is_zero().then_some(d.quotient))
}

/// Outcome of the exact kernel computation for `Σ φ_j ψ_j = B·⟨z,ξ⟩_ℓ`.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub kernel_dim: usize,
    /// One `ψ` family per kernel basis vector.
    pub basis: Vec<Vec<FormalPoly>>,
    /// Indices into `basis` whose `Σ φ_j ψ_j` is nonzero.
    pub violations: Vec<usize>,
}

impl KernelReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Computes every `ψ` of degree `≤ cap` in `ξ` for which `Σ φ_j(z) ψ_j(ξ)`
/// is divisible by `⟨z,ξ⟩_ℓ`, and checks that each such sum vanishes.
///
/// `phi` has `dim - 1` members in the `z` block of
/// `VarSpace::bihermitian(dim)`.
pub fn huang_kernel_check(sig: &Signature, phi: &[FormalPoly], cap: i64) -> Result<KernelReport> {
    let n = sig.dim;
    if cap < 0 {
        return Err(Error::InvalidInput(format!("degree cap {cap} is negative")));
    }
    if phi.len() + 1 != n {
        return Err(Error::LengthMismatch { expected: n - 1, got: phi.len() });
    }
    let space = VarSpace::bihermitian(n);
    for f in phi {
        if *f.space() != space {
            return Err(Error::SpaceMismatch(format!("{:?}, expected {space:?}", f.space())));
        }
        if let Some(t) = f.trunc() {
            return Err(Error::NotExact(t));
        }
        if (0..n).any(|j| f.uses_var(space.xi(j))) {
            return Err(Error::InvalidInput("phi must not depend on xi".into()));
        }
    }
    let p = pairing_poly(sig, &space)?;
    let mut report = KernelReport { kernel_dim: 0, basis: Vec::new(), violations: Vec::new() };

    for b in 0..=cap as u32 {
        let xi_monos: Vec<FormalPoly> = monomials_of_degree(n, b)
            .into_iter()
            .map(|e| {
                let mut exps = vec![0; space.nvars()];
                exps[space.xi(0)..space.xi(0) + n].copy_from_slice(&e);
                FormalPoly::monomial(space, Monomial::new(&space, exps), GR::one())
            })
            .collect();
        let mut columns: Vec<FormalPoly> = Vec::new();
        for f in phi {
            for mono in &xi_monos {
                columns.push(f.try_mul(mono)?.div_rem(&p)?.1);
            }
        }
        let mut rows: Vec<&Monomial> = columns.iter().flat_map(|c| c.terms().map(|(m, _)| m)).collect();
        rows.sort();
        rows.dedup();
        let mut mat = Matrix::zeros(rows.len(), columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (m, v) in c.terms() {
                let i = rows.binary_search(&m).unwrap();
                mat[(i, j)] = v.clone();
            }
        }
        for v in mat.nullspace() {
            let k = xi_monos.len();
            let psi: Vec<FormalPoly> = (0..phi.len())
                .map(|j| {
                    xi_monos
                        .iter()
                        .zip(&v[j * k..(j + 1) * k])
                        .fold(FormalPoly::zero(space), |acc, (m, c)| &acc + &m.scale(c))
                })
                .collect();
            let sum = phi.iter().zip(&psi).fold(FormalPoly::zero(space), |acc, (f, g)| &acc + &(f * g));
            if !sum.is_zero() {
                report.violations.push(report.basis.len());
            }
            report.basis.push(psi);
        }
    }
    report.kernel_dim = report.basis.len();
    Ok(report)
}

/// Squared coefficient norms of the pieces of
/// `Σ_{r=1}^m (Σ_j φ_{jr} ψ_{jr}) ⟨z,ξ⟩_ℓ^r = H + B ⟨z,ξ⟩_ℓ^{m+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub h_norm_sq: Rational,
    pub b_norm_sq: Rational,
    /// `‖Σ_j φ_{jr} ψ_{jr}‖²` for `r = 1..=m`.
    pub level_norm_sq: Vec<Rational>,
}

/// Assembles the multi-level sum from `phi[r-1]`, `psi[r-1]` (level `r`) and
/// divides by `⟨z,ξ⟩_ℓ^{m+1}` where `m` is the number of levels.
pub fn bounded_decomposition_report(
    sig: &Signature,
    phi: &[Vec<FormalPoly>],
    psi: &[Vec<FormalPoly>],
) -> Result<DecompositionReport> {
    if phi.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if phi.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: phi.len(), got: psi.len() });
    }
    let space = VarSpace::bihermitian(sig.dim);
    let p = pairing_poly(sig, &space)?;
    let mut x = FormalPoly::zero(space);
    let mut power = FormalPoly::one(space);
    let mut level_norm_sq = Vec::new();
    for (fs, gs) in phi.iter().zip(psi) {
        if fs.len() + 1 != sig.dim {
            return Err(Error::LengthMismatch { expected: sig.dim - 1, got: fs.len() });
        }
        if gs.len() != fs.len() {
            return Err(Error::LengthMismatch { expected: fs.len(), got: gs.len() });
        }
        let mut level = FormalPoly::zero(space);
        for (f, g) in fs.iter().zip(gs) {
            level = level.try_add(&f.try_mul(g)?)?;
        }
        power = &power * &p;
        level_norm_sq.push(level.coeff_norm_sq());
        x = &x + &(&level * &power);
    }
    let d = divide_with_remainder(sig, &x, phi.len() as u32 + 1)?;
    Ok(DecompositionReport {
        h_norm_sq: d.remainder.coeff_norm_sq(),
        b_norm_sq: d.quotient.coeff_norm_sq(),
        level_norm_sq,
    })
}

/// Whether `U J U* = J`.
pub fn is_isometry(sig: &Signature, u: &Matrix) -> bool {
    let j = sig.gram();
    &(u * &j) * &u.adjoint() == j
}

/// Cayley transform `U = (I + K)(I - K)^{-1}` with `K = J(M - M*)`; `U`
/// preserves the form whenever `I - K` is invertible.
pub fn cayley_isometry(sig: &Signature, m: &Matrix) -> Option<Matrix> {
    let n = sig.dim;
    let id = Matrix::identity(n);
    let k = &sig.gram() * &m.sub(&m.adjoint());
    let inv = id.sub(&k).inverse().ok()?;
    Some(&id.add(&k) * &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use num_traits::Zero;
    use crate::polyring::build::{xi, z};
    use proptest::prelude::*;

    fn sp(n: usize) -> VarSpace {
        VarSpace::bihermitian(n)
    }

    /// Brute-force canonical remainder: eliminate pivot monomials of the
    /// image of multiplication by `P^m`, bidegree by bidegree.
    fn rref_remainder(sig: &Signature, x: &FormalPoly, m: u32) -> FormalPoly {
        let space = *x.space();
        let n = sig.dim;
        let pm = pairing_poly(sig, &space).unwrap().pow_trunc(m, None);
        let mut out = FormalPoly::zero(space);
        let max_deg = x.terms().map(|(mo, _)| mo.total_degree()).max().unwrap_or(0);
        for a in 0..=max_deg {
            for b in 0..=max_deg {
                let block = x.zxi_component(a, b);
                if block.is_zero() {
                    continue;
                }
                let mut cols: Vec<Monomial> = Vec::new();
                for ez in monomials_of_degree(n, a) {
                    for ex in monomials_of_degree(n, b) {
                        let mut e = ez.clone();
                        e.extend(ex);
                        cols.push(Monomial::new(&space, e));
                    }
                }
                cols.sort();
                cols.reverse();
                let mut rows: Vec<Vec<GR>> = Vec::new();
                if a >= m && b >= m {
                    for ez in monomials_of_degree(n, a - m) {
                        for ex in monomials_of_degree(n, b - m) {
                            let mut e = ez.clone();
                            e.extend(ex);
                            let img = &FormalPoly::monomial(space, Monomial::new(&space, e), GR::one()) * &pm;
                            rows.push(cols.iter().map(|c| img.coeff(c)).collect());
                        }
                    }
                }
                let mut resid: Vec<GR> = cols.iter().map(|c| block.coeff(c)).collect();
                if !rows.is_empty() {
                    let r = Matrix::from_rows(rows).unwrap().rref();
                    for (i, &pc) in r.pivots.iter().enumerate() {
                        let f = resid[pc].clone();
                        if f.is_zero() {
                            continue;
                        }
                        for (j, rv) in resid.iter_mut().enumerate() {
                            *rv -= &(&f * &r.matrix[(i, j)]);
                        }
                    }
                }
                for (c, v) in cols.iter().zip(resid) {
                    out = &out + &FormalPoly::monomial(space, c.clone(), v);
                }
            }
        }
        out
    }

    #[test]
    fn pair_examples() {
        let s = sp(2);
        let sig = Signature::new(2, 1).unwrap();
        let a = vec![z(&s, 0), z(&s, 1)];
        let b = vec![xi(&s, 0), xi(&s, 1)];
        assert_eq!(pair(&sig, &a, &b).unwrap(), &(&z(&s, 1) * &xi(&s, 1)) - &(&z(&s, 0) * &xi(&s, 0)));
        let sig0 = Signature::new(2, 0).unwrap();
        assert_eq!(pair(&sig0, &a, &b).unwrap(), &(&z(&s, 1) * &xi(&s, 1)) + &(&z(&s, 0) * &xi(&s, 0)));
        let ones = vec![FormalPoly::one(s), FormalPoly::one(s)];
        assert!(pair(&sig, &ones, &ones).unwrap().is_zero());
        assert!(matches!(pair(&sig, &a[..1], &b), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn norm_sq_division_examples() {
        let sig = Signature::new(3, 1).unwrap();
        let s = sp(3);
        let p = pairing_poly(&sig, &s).unwrap();
        assert_eq!(divide_by_norm_sq(&sig, &p).unwrap(), Some(FormalPoly::one(s)));
        let y = &z(&s, 0) * &xi(&s, 1);
        assert_eq!(divide_by_norm_sq(&sig, &(&y * &p)).unwrap(), Some(y));
        // z1 ξ1 is not a multiple of z1ξ1 + z2ξ2: a quotient would be a
        // constant c with c = 1 (z1ξ1) and c = 0 (z2ξ2).
        let sig0 = Signature::new(2, 0).unwrap();
        let s2 = sp(2);
        assert_eq!(divide_by_norm_sq(&sig0, &(&z(&s2, 0) * &xi(&s2, 0))).unwrap(), None);
    }

    #[test]
    fn remainder_examples() {
        let sig = Signature::new(2, 0).unwrap();
        let s = sp(2);
        let p = pairing_poly(&sig, &s).unwrap();
        let d = divide_with_remainder(&sig, &p, 1).unwrap();
        assert_eq!((d.quotient, d.remainder.is_zero()), (FormalPoly::one(s), true));

        // z1 ξ2 at bidegree (1,1): the image of P is spanned by P itself and
        // no multiple c·P equals z1ξ2, so it stays in the remainder.
        let x = &z(&s, 0) * &xi(&s, 1);
        let d = divide_with_remainder(&sig, &x, 1).unwrap();
        assert!(d.quotient.is_zero());
        assert_eq!(d.remainder, x);
        assert_eq!(rref_remainder(&sig, &x, 1), x);

        let zx = &z(&s, 0) * &xi(&s, 0);
        let x = &(&zx * &p) + &(&z(&s, 1) * &xi(&s, 0));
        let d = divide_with_remainder(&sig, &x, 1).unwrap();
        assert_eq!(d.quotient, zx);
        assert_eq!(d.remainder, &z(&s, 1) * &xi(&s, 0));
        assert_eq!(rref_remainder(&sig, &x, 1), d.remainder);
        assert!(divide_with_remainder(&sig, &x, 0).is_err());
    }

    #[test]
    fn huang_examples() {
        let sig = Signature::new(3, 1).unwrap();
        let s = sp(3);
        let r = huang_kernel_check(&sig, &[z(&s, 0), z(&s, 1)], 1).unwrap();
        assert!(r.holds());
        // z1ψ1 + z2ψ2 never contains z3ξ3, so it is a multiple of P only when zero.
        assert_eq!(r.kernel_dim, 0);

        let zero = vec![FormalPoly::zero(s), FormalPoly::zero(s)];
        let r = huang_kernel_check(&sig, &zero, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.kernel_dim, 2 * (1 + 3));

        let sq = vec![&z(&s, 0) * &z(&s, 0), &z(&s, 1) * &z(&s, 1)];
        let r = huang_kernel_check(&sig, &sq, 2).unwrap();
        assert!(r.holds());
        assert!(huang_kernel_check(&sig, &sq, -1).is_err());
    }

    #[test]
    fn huang_brute_force_matrix() {
        // Independent oracle for φ = (z1², z2²), n = 3: enumerate the full
        // linear system (ψ, B) ↦ Σφψ - B·P with B as explicit unknowns.
        let sig = Signature::new(3, 1).unwrap();
        let s = sp(3);
        let p = pairing_poly(&sig, &s).unwrap();
        let phi = vec![&z(&s, 0) * &z(&s, 0), &z(&s, 1) * &z(&s, 1)];
        for b in 0..=2u32 {
            let mut unknown_images: Vec<FormalPoly> = Vec::new();
            for f in &phi {
                for e in monomials_of_degree(3, b) {
                    let mut ex = vec![0; 6];
                    ex[3..].copy_from_slice(&e);
                    unknown_images.push(f * &FormalPoly::monomial(s, Monomial::new(&s, ex), GR::one()));
                }
            }
            let n_psi = unknown_images.len();
            if b >= 1 {
                for ez in monomials_of_degree(3, 1) {
                    for ex in monomials_of_degree(3, b - 1) {
                        let mut e = ez.clone();
                        e.extend(ex);
                        unknown_images.push(-&(&FormalPoly::monomial(s, Monomial::new(&s, e), GR::one()) * &p));
                    }
                }
            }
            let mut rows: Vec<Monomial> = unknown_images.iter().flat_map(|c| c.terms().map(|(m, _)| m.clone())).collect();
            rows.sort();
            rows.dedup();
            let mut mat = Matrix::zeros(rows.len(), unknown_images.len());
            for (j, c) in unknown_images.iter().enumerate() {
                for (m, v) in c.terms() {
                    mat[(rows.binary_search(m).unwrap(), j)] = v.clone();
                }
            }
            for v in mat.nullspace() {
                assert!(v[..n_psi].iter().all(Zero::is_zero), "nonzero psi in kernel at b = {b}");
                assert!(v[n_psi..].iter().all(Zero::is_zero));
            }
        }
        assert_eq!(huang_kernel_check(&sig, &phi, 2).unwrap().kernel_dim, 0);
    }

    #[test]
    fn decomposition_examples() {
        let sig = Signature::new(3, 0).unwrap();
        let s = sp(3);
        let zero = vec![vec![FormalPoly::zero(s), FormalPoly::zero(s)]];
        let r = bounded_decomposition_report(&sig, &zero, &zero).unwrap();
        assert_eq!(r.h_norm_sq, int(0));
        assert_eq!(r.b_norm_sq, int(0));

        let phi = vec![vec![z(&s, 0), z(&s, 1)]];
        let psi = vec![vec![xi(&s, 0), xi(&s, 1)]];
        let r = bounded_decomposition_report(&sig, &phi, &psi).unwrap();
        // (P - z3ξ3)·P mod P²: remainder -z3ξ3·P, all coefficients of modulus 1.
        assert_eq!(r.h_norm_sq, int(1));
        assert_eq!(r.level_norm_sq, vec![int(1)]);

        let phi2 = vec![vec![z(&s, 0).scale(&GR::from_int(2)), z(&s, 1).scale(&GR::from_int(2))]];
        let half = GR::from_ratios(1, 2, 0, 1);
        let psi2 = vec![vec![xi(&s, 0).scale(&half), xi(&s, 1).scale(&half)]];
        assert_eq!(bounded_decomposition_report(&sig, &phi2, &psi2).unwrap(), r);
    }

    #[test]
    fn cayley_gives_isometries() {
        let sig = Signature::new(3, 1).unwrap();
        let mut m = Matrix::zeros(3, 3);
        m[(0, 1)] = GR::from_ratios(1, 2, 1, 3);
        m[(2, 0)] = GR::from_ratios(-2, 1, 0, 1);
        m[(1, 1)] = GR::from_ratios(0, 1, 1, 1);
        let u = cayley_isometry(&sig, &m).unwrap();
        assert!(is_isometry(&sig, &u));
    }

    fn small_gr() -> impl Strategy<Value = GR> {
        (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GR::from_ratios(a, b, c, d))
    }

    fn random_poly(n: usize, coeffs: Vec<GR>, max_deg: u32) -> FormalPoly {
        let s = sp(n);
        let mut monos = Vec::new();
        for a in 0..=max_deg {
            for b in 0..=max_deg.saturating_sub(a) {
                for ez in monomials_of_degree(n, a) {
                    for ex in monomials_of_degree(n, b) {
                        let mut e = ez.clone();
                        e.extend(ex);
                        monos.push(e);
                    }
                }
            }
        }
        let terms = coeffs.into_iter().enumerate().map(|(k, c)| (monos[(k * 7919) % monos.len()].clone(), c));
        FormalPoly::from_terms(s, terms, None)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn division_round_trip(n in 2usize..=3, ell in 0usize..=1, coeffs in prop::collection::vec(small_gr(), 1..6), m in 1u32..=2) {
            let sig = Signature::new(n, ell).unwrap();
            let y = random_poly(n, coeffs.clone(), 3);
            let p = pairing_poly(&sig, y.space()).unwrap();
            prop_assert_eq!(divide_by_norm_sq(&sig, &(&y * &p)).unwrap(), Some(y.clone()));
            let x = &y + &random_poly(n, coeffs.into_iter().rev().collect(), 3);
            let d = divide_with_remainder(&sig, &x, m).unwrap();
            let pm = p.pow_trunc(m, None);
            prop_assert_eq!(&d.remainder + &(&d.quotient * &pm), x.clone());
            prop_assert_eq!(d.remainder, rref_remainder(&sig, &x, m));
        }

        #[test]
        fn pairing_is_invariant_under_isometries(entries in prop::collection::vec(small_gr(), 9)) {
            let sig = Signature::new(3, 1).unwrap();
            let m = Matrix::from_rows(entries.chunks(3).map(|c| c.to_vec()).collect()).unwrap();
            if let Some(u) = cayley_isometry(&sig, &m) {
                let s = sp(3);
                let a: Vec<FormalPoly> = (0..3).map(|j| z(&s, j)).collect();
                let b: Vec<FormalPoly> = (0..3).map(|j| xi(&s, j)).collect();
                let au: Vec<FormalPoly> = (0..3).map(|k| (0..3).fold(FormalPoly::zero(s), |acc, i| &acc + &a[i].scale(&u[(i, k)]))).collect();
                let bu: Vec<FormalPoly> = (0..3).map(|k| (0..3).fold(FormalPoly::zero(s), |acc, i| &acc + &b[i].scale(&u[(i, k)].conj()))).collect();
                prop_assert_eq!(pair(&sig, &au, &bu).unwrap(), pair(&sig, &a, &b).unwrap());
            }
        }
    }
}
