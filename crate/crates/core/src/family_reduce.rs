//! Re-adjusting paired families `(φ, ψ)` of homogeneous polynomials so that
//! `Σ φ_j ψ_j` is unchanged, every `φ_j` has unit coefficient norm, and the
//! coefficient matrix of `φ` is diagonal on a set of pivot columns.
//!
//! The diagonal then certifies
//! `4^{-(s-1)} ‖ψ‖² ≤ ‖Σ φ_j ψ_j‖² ≤ s² ‖ψ‖²`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{Rational, GR};
use crate::linalg::Matrix;
use crate::polyring::{monomials_of_degree, FormalPoly, Monomial, VarSpace};

/// Ordered homogeneous polynomials of one degree in a block of variables,
/// with their coefficient rows in the monomial basis of that degree.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFamily {
    space: VarSpace,
    vars: Vec<usize>,
    degree: u32,
    members: Vec<FormalPoly>,
    basis: Vec<Monomial>,
    coeffs: Matrix,
}

fn basis_for(space: &VarSpace, vars: &[usize], degree: u32) -> Vec<Monomial> {
    monomials_of_degree(vars.len(), degree)
        .into_iter()
        .map(|e| {
            let mut exps = vec![0; space.nvars()];
            for (v, x) in vars.iter().zip(e) {
                exps[*v] = x;
            }
            Monomial::new(space, exps)
        })
        .collect()
}

impl PolyFamily {
    /// Infers the degree from the first nonzero member (0 if all vanish).
    pub fn new(members: Vec<FormalPoly>, vars: Vec<usize>) -> Result<Self> {
        let degree = members
            .iter()
            .find_map(|m| m.terms().next().map(|(mo, _)| vars.iter().map(|&v| mo.exp(v)).sum()))
            .unwrap_or(0);
        Self::with_degree(members, vars, degree)
    }

    pub fn with_degree(members: Vec<FormalPoly>, vars: Vec<usize>, degree: u32) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        let space = *first.space();
        let basis = basis_for(&space, &vars, degree);
        let mut coeffs = Matrix::zeros(members.len(), basis.len());
        for (i, m) in members.iter().enumerate() {
            if *m.space() != space {
                return Err(Error::SpaceMismatch(format!("member {i} lives in {:?}", m.space())));
            }
            if let Some(t) = m.trunc() {
                return Err(Error::NotExact(t));
            }
            for (mo, c) in m.terms() {
                let col = basis.binary_search_by(|b| mo.cmp(b)).map_err(|_| Error::DegreeMismatch { index: i, degree })?;
                coeffs[(i, col)] = c.clone();
            }
        }
        Ok(Self { space, vars, degree, members, basis, coeffs })
    }

    /// Family in the `z` block of the members' space.
    pub fn in_z(members: Vec<FormalPoly>) -> Result<Self> {
        let sp = *members.first().ok_or(Error::EmptyFamily)?.space();
        Self::new(members, (0..sp.n_z).map(|i| sp.z(i)).collect())
    }

    /// Family in the `ξ` block of the members' space.
    pub fn in_xi(members: Vec<FormalPoly>) -> Result<Self> {
        let sp = *members.first().ok_or(Error::EmptyFamily)?.space();
        Self::new(members, (0..sp.n_xi).map(|i| sp.xi(i)).collect())
    }

    fn from_rows(space: VarSpace, vars: Vec<usize>, degree: u32, basis: Vec<Monomial>, rows: &[Vec<GR>]) -> Self {
        let members = rows
            .iter()
            .map(|r| {
                FormalPoly::from_terms(space, basis.iter().zip(r).map(|(b, c)| (b.exps().to_vec(), c.clone())), None)
            })
            .collect();
        let coeffs = if rows.is_empty() {
            Matrix::zeros(0, basis.len())
        } else {
            Matrix::from_rows(rows.to_vec()).expect("rows share the basis length")
        };
        Self { space, vars, degree, members, basis, coeffs }
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn members(&self) -> &[FormalPoly] {
        &self.members
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn coeff_matrix(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max_j ‖member_j‖²`.
    pub fn norm_sq(&self) -> Rational {
        self.members.iter().map(FormalPoly::coeff_norm_sq).max().unwrap_or_else(Rational::zero)
    }
}

/// `Σ_j φ_j ψ_j`.
pub fn paired_sum(phi: &PolyFamily, psi: &PolyFamily) -> Result<FormalPoly> {
    if phi.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: phi.len(), got: psi.len() });
    }
    let mut acc = FormalPoly::zero(phi.space);
    for (f, g) in phi.members.iter().zip(&psi.members) {
        acc = acc.try_add(&f.try_mul(g)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub phi_tilde: PolyFamily,
    pub psi_tilde: PolyFamily,
    /// Basis column of the pivot of each surviving row.
    pub pivot_columns: Vec<usize>,
    /// Input indices of the surviving rows, in output order.
    pub kept: Vec<usize>,
    /// Input indices removed as linearly dependent (or zero).
    pub dropped: Vec<usize>,
    /// `4^{-(s'-1)}` with `s'` the number of surviving rows.
    pub certified_lower: Rational,
}

impl ReductionResult {
    /// Pivot columns first, then the remaining columns in basis order.
    pub fn column_permutation(&self) -> Vec<usize> {
        let d = self.phi_tilde.basis.len();
        let mut perm = self.pivot_columns.clone();
        perm.extend((0..d).filter(|c| !self.pivot_columns.contains(c)));
        perm
    }

    pub fn surviving(&self) -> usize {
        self.kept.len()
    }
}

pub fn certified_lower_bound(s: usize) -> Rational {
    let e = s.saturating_sub(1) as u32;
    Rational::new(1.into(), num_bigint::BigInt::from(4u32).pow(e))
}

/// First column of maximal modulus.
fn max_column(row: &[GR]) -> Option<usize> {
    let mut best: Option<(usize, Rational)> = None;
    for (j, c) in row.iter().enumerate() {
        let m = c.sq_modulus();
        if m.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| m > *b) {
            best = Some((j, m));
        }
    }
    best.map(|(j, _)| j)
}

fn normalize(row: &mut [GR], psi: &mut FormalPoly) {
    if let Some(p) = max_column(row) {
        let c = row[p].clone();
        let inv = c.inv().unwrap();
        for x in row.iter_mut() {
            *x = &*x * &inv;
        }
        *psi = psi.scale(&c);
    }
}

pub fn reduce_family(phi: &PolyFamily, psi: &PolyFamily) -> Result<ReductionResult> {
    if phi.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if phi.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: phi.len(), got: psi.len() });
    }
    if phi.space != psi.space {
        return Err(Error::SpaceMismatch("phi and psi families live in different spaces".into()));
    }

    // Rank reduction: fold each dependent row into the rows kept so far.
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    let mut rows: Vec<Vec<GR>> = Vec::new();
    let mut psis: Vec<FormalPoly> = Vec::new();
    for j in 0..phi.len() {
        let row = phi.coeffs.row(j).to_vec();
        let combo = if rows.is_empty() {
            row.iter().all(Zero::is_zero).then(Vec::new)
        } else {
            Matrix::from_rows(rows.clone())?.transpose().solve(&row)
        };
        match combo {
            Some(c) => {
                for (k, ck) in c.iter().enumerate() {
                    psis[k] = &psis[k] + &psi.members[j].scale(ck);
                }
                dropped.push(j);
            }
            None => {
                kept.push(j);
                rows.push(row);
                psis.push(psi.members[j].clone());
            }
        }
    }

    let s = rows.len();
    for (row, p) in rows.iter_mut().zip(psis.iter_mut()) {
        normalize(row, p);
    }
    let mut pivot_columns = Vec::with_capacity(s);
    for t in 0..s {
        let pc = max_column(&rows[t]).expect("independent rows are nonzero");
        debug_assert!(rows[t][pc].is_one());
        pivot_columns.push(pc);
        let pivot_row = rows[t].clone();
        for j in 0..s {
            if j == t || rows[j][pc].is_zero() {
                continue;
            }
            let d = rows[j][pc].clone();
            for (x, y) in rows[j].iter_mut().zip(&pivot_row) {
                *x -= &(&d * y);
            }
            psis[t] = &psis[t] + &psis[j].scale(&d);
        }
        for j in 0..s {
            if j != t {
                let (row, p) = (&mut rows[j], &mut psis[j]);
                normalize(row, p);
            }
        }
    }

    let phi_tilde = PolyFamily::from_rows(phi.space, phi.vars.clone(), phi.degree, phi.basis.clone(), &rows);
    let psi_rows: Vec<Vec<GR>> = psis.iter().map(|p| psi.basis.iter().map(|b| p.coeff(b)).collect()).collect();
    let psi_tilde = PolyFamily::from_rows(psi.space, psi.vars.clone(), psi.degree, psi.basis.clone(), &psi_rows);
    Ok(ReductionResult { phi_tilde, psi_tilde, pivot_columns, kept, dropped, certified_lower: certified_lower_bound(s) })
}

/// Individual outcomes of [`verify_reduction`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub identity: bool,
    pub unit_norms: bool,
    pub pivot_structure: bool,
    pub diagonal_bounds: bool,
    pub certificate: bool,
    pub lower_bound: bool,
    pub upper_bound: bool,
}

impl VerificationReport {
    pub fn all(&self) -> bool {
        self.identity
            && self.unit_norms
            && self.pivot_structure
            && self.diagonal_bounds
            && self.certificate
            && self.lower_bound
            && self.upper_bound
    }
}

/// Rechecks a reduction against its input by direct polynomial arithmetic.
pub fn verify_reduction_report(r: &ReductionResult, phi: &PolyFamily, psi: &PolyFamily) -> VerificationReport {
    let s = r.phi_tilde.len();
    let before = paired_sum(phi, psi).ok();
    let after = paired_sum(&r.phi_tilde, &r.psi_tilde).ok();
    let identity = before.is_some() && before == after;

    let one = Rational::one();
    let unit_norms = r.phi_tilde.members.iter().all(|m| m.coeff_norm_sq() == one);

    let d = &r.phi_tilde.coeffs;
    let pivot_structure = r.pivot_columns.len() == s
        && r.pivot_columns.iter().enumerate().all(|(j, &pc)| {
            pc < d.cols() && !d[(j, pc)].is_zero() && (0..s).all(|i| i == j || d[(i, pc)].is_zero())
        })
        && (s == 0 || d[(s - 1, r.pivot_columns[s - 1])].is_one());

    let diagonal_bounds = pivot_structure
        && r.pivot_columns.iter().enumerate().all(|(j, &pc)| {
            let m = d[(j, pc)].sq_modulus();
            m <= one && m >= certified_lower_bound(s - j)
        });

    let certificate = r.certified_lower == certified_lower_bound(s);
    let (lower_bound, upper_bound) = match &after {
        Some(sum) => {
            let lhs = sum.coeff_norm_sq();
            let psi_n = r.psi_tilde.norm_sq();
            let s2 = Rational::from_integer((s * s).into());
            (lhs >= &r.certified_lower * &psi_n, lhs <= s2 * psi_n)
        }
        None => (false, false),
    };
    VerificationReport { identity, unit_norms, pivot_structure, diagonal_bounds, certificate, lower_bound, upper_bound }
}

pub fn verify_reduction(r: &ReductionResult, phi: &PolyFamily, psi: &PolyFamily) -> bool {
    verify_reduction_report(r, phi, psi).all()
}
