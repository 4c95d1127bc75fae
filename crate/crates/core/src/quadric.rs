//! Hyperquadrics `H_ℓ^N = {Im w = |z|²_ℓ}`, hypersurface germs written as
//! graphs over them, maps between the two, the isotropy automorphisms of the
//! quadric, and the normalization of CR transversal maps.
//!
//! Map components live in `VarSpace::segre(n - 1)` and use only `z`, `w`;
//! the `ξ`, `η` block is there for conjugates. A component may carry a
//! positive rational `scale_sq`: its actual value is `sqrt(scale_sq)` times
//! the stored polynomial. This keeps irrational factors such as `1/λ` exact.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rational_sqrt, Rational, GR};
use crate::hermitian::{is_isometry, pairing_poly, Signature};
use crate::linalg::Matrix;
use crate::polyring::{FormalPoly, Monomial, VarKind, VarSpace};

/// How the truncation order of an input germ is to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    Weighted,
    Total,
}

impl Grading {
    pub fn as_str(&self) -> &'static str {
        match self {
            Grading::Weighted => "weighted",
            Grading::Total => "total",
        }
    }
}

impl std::str::FromStr for Grading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Grading::Weighted),
            "total" => Ok(Grading::Total),
            _ => Err(Error::Parse(format!("unknown grading {s:?}"))),
        }
    }
}

fn gi() -> GR {
    GR::i()
}

fn rat_gr(r: &Rational) -> GR {
    GR::from_rational(r.clone())
}

/// Moves a polynomial into `VarSpace::bihermitian(dim)`, setting `w`, `η`
/// and coordinates of index `≥ dim` to zero.
pub fn to_bihermitian(p: &FormalPoly, dim: usize) -> Result<FormalPoly> {
    p.rename_vars(VarSpace::bihermitian(dim), |k| match k {
        VarKind::Z(i) if i < dim => Some(VarKind::Z(i)),
        VarKind::Xi(i) if i < dim => Some(VarKind::Xi(i)),
        _ => None,
    })
}

/// `Im w = |z|²_ℓ + ρ(z, z̄, u)` near 0 in `C^n`.
///
/// `rho` lives in `VarSpace::real(n - 1)` (`ξ` standing for `z̄`, the weight-2
/// slot for `u = Re w`), is real, and has no terms of total degree `≤ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceGerm {
    pub n: usize,
    pub sig: Signature,
    pub rho: FormalPoly,
    pub grading: Grading,
}

impl HypersurfaceGerm {
    pub fn quadric(n: usize, ell: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be at least 2")));
        }
        Self::new(n, ell, FormalPoly::zero(VarSpace::real(n - 1)), Grading::Weighted)
    }

    pub fn new(n: usize, ell: usize, rho: FormalPoly, grading: Grading) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be at least 2")));
        }
        let sig = Signature::new(n - 1, ell)?;
        let space = VarSpace::real(n - 1);
        if *rho.space() != space {
            return Err(Error::SpaceMismatch(format!("graph tail in {:?}, expected {space:?}", rho.space())));
        }
        if !rho.conj_real()?.same_terms(&rho) {
            return Err(Error::InvalidInput("graph tail is not real".into()));
        }
        if rho.terms().any(|(m, _)| m.total_degree() <= 2) {
            return Err(Error::InvalidInput("graph tail has terms of degree <= 2".into()));
        }
        Ok(Self { n, sig, rho, grading })
    }

    pub fn space(&self) -> VarSpace {
        VarSpace::real(self.n - 1)
    }

    pub fn is_quadric(&self) -> bool {
        self.rho.is_zero() && self.rho.is_exact()
    }

    pub fn order(&self) -> Option<u32> {
        self.rho.trunc()
    }

    /// `u + i(|z|²_ℓ + ρ)`: the value of `w` along the graph.
    pub fn graph_w(&self) -> Result<FormalPoly> {
        let sp = self.space();
        let p = pairing_poly(&self.sig, &sp)?;
        Ok(&FormalPoly::var(sp, sp.w()) + &(&p + &self.rho).scale(&gi()))
    }

    /// Curvature polynomial `S = -4 ρ^{(2,2)}` (no `u` dependence), in
    /// `VarSpace::bihermitian(n - 1)`.
    pub fn cmw(&self) -> Result<FormalPoly> {
        if let Some(t) = self.rho.trunc() {
            if t < 4 {
                return Err(Error::TruncationTooLow { requested: 4, available: t as i64 });
            }
        }
        let sp = self.space();
        let block = self.rho.filter(
            |m| m.z_degree(&sp) == 2 && m.xi_degree(&sp) == 2 && m.w_exp(&sp) == 0,
            None,
        );
        to_bihermitian(&block.scale(&GR::from_int(-4)), self.n - 1)
    }
}

/// `value = sqrt(s) · stored`: rewrites `p(z)` with `z_k = sqrt(s_k) c_k` as
/// `sqrt(r) · p'(c)` and returns `(p', r)`. With `fixed` the reference factor
/// is forced to 1.
fn rescale_poly(p: &FormalPoly, scales: &[Rational], fixed: bool) -> Result<(FormalPoly, Rational)> {
    let one = Rational::one();
    if scales.iter().all(|s| *s == one) {
        return Ok((p.clone(), one));
    }
    let sp = *p.space();
    let mut reference: Option<Rational> = fixed.then(|| one.clone());
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut factor = one.clone();
        for (k, s) in scales.iter().enumerate() {
            let e = m.exp(sp.z(k));
            if e > 0 {
                factor *= num_traits::pow(s.clone(), e as usize);
            }
        }
        let r = reference.get_or_insert_with(|| factor.clone());
        let root = rational_sqrt(&(&factor / &*r))
            .ok_or_else(|| Error::IrrationalScale(format!("monomial factor {factor} against {r}")))?;
        terms.push((m.exps().to_vec(), c.scale(&root)));
    }
    Ok((FormalPoly::from_terms(sp, terms, p.trunc()), reference.unwrap_or(one)))
}

struct PowerCache {
    bases: Vec<FormalPoly>,
    pows: Vec<Vec<FormalPoly>>,
    order: Option<u32>,
}

impl PowerCache {
    fn new(bases: Vec<FormalPoly>, order: Option<u32>) -> Self {
        let pows = bases.iter().map(|b| vec![FormalPoly::one(*b.space())]).collect();
        Self { bases, pows, order }
    }

    fn get(&mut self, i: usize, e: u32) -> &FormalPoly {
        while self.pows[i].len() <= e as usize {
            let last = self.pows[i].last().unwrap();
            let next = match self.order {
                Some(o) => last.mul_trunc(&self.bases[i], o),
                None => last * &self.bases[i],
            };
            self.pows[i].push(next);
        }
        &self.pows[i][e as usize]
    }
}

/// Germ of a holomorphic map `F = (f, φ, g)` from `C^n` to `C^N`, source
/// coordinates `(z, w) ∈ C^{n-1} × C`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub n: usize,
    pub target_n: usize,
    pub ell: usize,
    /// `f_1..f_{n-1}, φ_1..φ_{N-n}`.
    pub z_components: Vec<FormalPoly>,
    pub g: FormalPoly,
    pub scale_sq: Vec<Rational>,
}

fn check_map_shape(n: usize, target_n: usize, ell: usize, comps: &[FormalPoly], g: &FormalPoly) -> Result<()> {
    if n < 2 || target_n < n {
        return Err(Error::InvalidInput(format!("dimensions n = {n}, N = {target_n}")));
    }
    if ell > n - 1 {
        return Err(Error::InvalidSignature(format!("ell = {ell} exceeds n - 1 = {}", n - 1)));
    }
    if comps.len() != target_n - 1 {
        return Err(Error::LengthMismatch { expected: target_n - 1, got: comps.len() });
    }
    let sp = VarSpace::segre(n - 1);
    for c in comps.iter().chain(std::iter::once(g)) {
        if *c.space() != sp {
            return Err(Error::SpaceMismatch(format!("component in {:?}, expected {sp:?}", c.space())));
        }
        if (0..n - 1).any(|i| c.uses_var(sp.xi(i))) || c.uses_var(sp.eta()) {
            return Err(Error::InvalidInput("map components must be holomorphic in (z, w)".into()));
        }
    }
    Ok(())
}

impl PolyMap {
    pub fn new(n: usize, target_n: usize, ell: usize, z_components: Vec<FormalPoly>, g: FormalPoly) -> Result<Self> {
        check_map_shape(n, target_n, ell, &z_components, &g)?;
        let scale_sq = vec![Rational::one(); z_components.len()];
        Ok(Self { n, target_n, ell, z_components, g, scale_sq })
    }

    pub fn with_scales(mut self, scale_sq: Vec<Rational>) -> Result<Self> {
        if scale_sq.len() != self.z_components.len() {
            return Err(Error::LengthMismatch { expected: self.z_components.len(), got: scale_sq.len() });
        }
        if scale_sq.iter().any(|s| !s.is_positive()) {
            return Err(Error::InvalidInput("scales must be positive".into()));
        }
        self.scale_sq = scale_sq;
        Ok(self)
    }

    /// `(z, w) ↦ (z, w)` on `C^n`.
    pub fn identity(n: usize, ell: usize) -> Result<Self> {
        Self::embedding(n, n, ell)
    }

    /// `(z, w) ↦ (z, 0, w)` from `C^n` into `C^N`.
    pub fn embedding(n: usize, target_n: usize, ell: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be at least 2")));
        }
        let sp = VarSpace::segre(n - 1);
        let comps = (0..target_n.saturating_sub(1))
            .map(|k| if k < n - 1 { FormalPoly::var(sp, sp.z(k)) } else { FormalPoly::zero(sp) })
            .collect();
        Self::new(n, target_n, ell, comps, FormalPoly::var(sp, sp.w()))
    }

    pub fn space(&self) -> VarSpace {
        VarSpace::segre(self.n - 1)
    }

    pub fn source_sig(&self) -> Signature {
        Signature { dim: self.n - 1, ell: self.ell }
    }

    pub fn target_sig(&self) -> Signature {
        Signature { dim: self.target_n - 1, ell: self.ell }
    }

    pub fn f(&self) -> &[FormalPoly] {
        &self.z_components[..self.n - 1]
    }

    pub fn phi(&self) -> &[FormalPoly] {
        &self.z_components[self.n - 1..]
    }

    pub fn components(&self) -> impl Iterator<Item = &FormalPoly> {
        self.z_components.iter().chain(std::iter::once(&self.g))
    }

    /// Smallest truncation order over all components (`None` if exact).
    pub fn order(&self) -> Option<u32> {
        self.components().filter_map(FormalPoly::trunc).min()
    }

    pub fn is_exact(&self) -> bool {
        self.order().is_none()
    }

    pub fn truncate(&self, t: u32) -> PolyMap {
        PolyMap {
            z_components: self.z_components.iter().map(|c| c.truncate(t)).collect(),
            g: self.g.truncate(t),
            ..self.clone()
        }
    }

    /// Folds every scale that is a perfect rational square into the
    /// coefficients.
    pub fn canonicalize_scales(mut self) -> PolyMap {
        for (c, s) in self.z_components.iter_mut().zip(self.scale_sq.iter_mut()) {
            if c.is_zero() {
                *s = Rational::one();
            } else if let Some(r) = rational_sqrt(s) {
                *c = c.scale_rational(&r);
                *s = Rational::one();
            }
        }
        self
    }

    /// `|z̃|²_ℓ` of the target coordinates, in the map's own space, with the
    /// conjugate in the `ξ`, `η` block.
    pub fn target_norm_sq(&self, order: Option<u32>) -> Result<FormalPoly> {
        let sig = self.target_sig();
        let mut acc = FormalPoly::zero(self.space());
        for (k, c) in self.z_components.iter().enumerate() {
            let cc = c.conj_poly()?;
            let prod = match order {
                Some(o) => c.mul_trunc(&cc, o),
                None => c * &cc,
            };
            let coef = GR::from_rational(self.scale_sq[k].clone() * Rational::from_integer(sig.delta(k).into()));
            acc = &acc + &prod.scale(&coef);
        }
        Ok(acc)
    }

    /// Value at `(z, w)`; the map must be exact with rational actual
    /// coefficients.
    pub fn eval(&self, z: &[GR], w: &GR) -> Result<(Vec<GR>, GR)> {
        let m = self.clone().canonicalize_scales();
        if m.scale_sq.iter().any(|s| !s.is_one()) {
            return Err(Error::IrrationalScale("cannot evaluate with irrational scales".into()));
        }
        let pt = point_values(&m.space(), z, w)?;
        let zs = m.z_components.iter().map(|c| c.eval(&pt)).collect::<Result<Vec<_>>>()?;
        Ok((zs, m.g.eval(&pt)?))
    }

    pub fn to_rational(&self) -> Result<RationalMap> {
        let d = FormalPoly::one(self.space());
        RationalMap::new(self.n, self.target_n, self.ell, self.z_components.clone(), self.g.clone(), d)?
            .with_scales(self.scale_sq.clone())
    }
}

fn point_values(sp: &VarSpace, z: &[GR], w: &GR) -> Result<Vec<GR>> {
    if z.len() != sp.n_z {
        return Err(Error::LengthMismatch { expected: sp.n_z, got: z.len() });
    }
    let mut v = vec![GR::zero(); sp.nvars()];
    v[..sp.n_z].clone_from_slice(z);
    v[sp.w()] = w.clone();
    Ok(v)
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.z_components.iter().enumerate() {
            let name = if k < self.n - 1 { format!("f{}", k + 1) } else { format!("phi{}", k + 2 - self.n) };
            if self.scale_sq[k].is_one() {
                writeln!(f, "{name} = {c}")?;
            } else {
                writeln!(f, "{name} = sqrt({}) * ({c})", self.scale_sq[k])?;
            }
        }
        writeln!(f, "g = {}", self.g)
    }
}

/// `F = (N_1, ..., N_{N-1}, G) / q` with exact polynomial numerators and a
/// common denominator, `q(0) ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    pub n: usize,
    pub target_n: usize,
    pub ell: usize,
    pub numerators: Vec<FormalPoly>,
    pub g: FormalPoly,
    pub denominator: FormalPoly,
    pub scale_sq: Vec<Rational>,
}

impl RationalMap {
    pub fn new(
        n: usize,
        target_n: usize,
        ell: usize,
        numerators: Vec<FormalPoly>,
        g: FormalPoly,
        denominator: FormalPoly,
    ) -> Result<Self> {
        check_map_shape(n, target_n, ell, &numerators, &g)?;
        check_map_shape(n, n, ell, &vec![FormalPoly::zero(VarSpace::segre(n - 1)); n - 1], &denominator)?;
        for p in numerators.iter().chain([&g, &denominator]) {
            if let Some(t) = p.trunc() {
                return Err(Error::NotExact(t));
            }
        }
        if denominator.coeff(&Monomial::one(denominator.space())).is_zero() {
            return Err(Error::NotInvertible);
        }
        let scale_sq = vec![Rational::one(); numerators.len()];
        Ok(Self { n, target_n, ell, numerators, g, denominator, scale_sq })
    }

    pub fn with_scales(mut self, scale_sq: Vec<Rational>) -> Result<Self> {
        if scale_sq.len() != self.numerators.len() {
            return Err(Error::LengthMismatch { expected: self.numerators.len(), got: scale_sq.len() });
        }
        if scale_sq.iter().any(|s| !s.is_positive()) {
            return Err(Error::InvalidInput("scales must be positive".into()));
        }
        self.scale_sq = scale_sq;
        Ok(self)
    }

    pub fn space(&self) -> VarSpace {
        VarSpace::segre(self.n - 1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator == FormalPoly::one(self.space())
    }

    /// Power-series expansion up to weighted order `order`.
    pub fn series(&self, order: u32) -> Result<PolyMap> {
        let inv = self.denominator.inverse_series(order)?;
        let comps = self.numerators.iter().map(|p| p.mul_trunc(&inv, order)).collect();
        PolyMap::new(self.n, self.target_n, self.ell, comps, self.g.mul_trunc(&inv, order))?
            .with_scales(self.scale_sq.clone())
    }

    /// The exact polynomial map, if the denominator is 1.
    pub fn to_poly(&self) -> Result<PolyMap> {
        if !self.is_polynomial() {
            return Err(Error::InvalidInput("map has a nontrivial denominator".into()));
        }
        PolyMap::new(self.n, self.target_n, self.ell, self.numerators.clone(), self.g.clone())?
            .with_scales(self.scale_sq.clone())
    }

    fn check_inner(&self, inner_target: usize, inner_ell: usize) -> Result<()> {
        if self.n != inner_target || self.ell != inner_ell {
            return Err(Error::InvalidInput(format!(
                "cannot compose: outer source C^{} (ell {}), inner target C^{inner_target} (ell {inner_ell})",
                self.n, self.ell
            )));
        }
        Ok(())
    }

    /// `self ∘ inner` as a series to weighted order `order`.
    pub fn apply(&self, inner: &PolyMap, order: u32) -> Result<PolyMap> {
        self.check_inner(inner.target_n, inner.ell)?;
        let tsp = inner.space();
        let osp = self.space();
        let mut images = vec![FormalPoly::zero(tsp); osp.nvars()];
        for (k, c) in inner.z_components.iter().enumerate() {
            images[osp.z(k)] = c.clone();
        }
        images[osp.w()] = inner.g.clone();

        let (q, _) = rescale_poly(&self.denominator, &inner.scale_sq, true)?;
        let inv = q.substitute(&images, &tsp, order)?.inverse_series(order)?;
        let mut comps = Vec::with_capacity(self.numerators.len());
        let mut scales = Vec::with_capacity(self.numerators.len());
        for (k, p) in self.numerators.iter().enumerate() {
            let (p2, r) = rescale_poly(p, &inner.scale_sq, false)?;
            comps.push(p2.substitute(&images, &tsp, order)?.mul_trunc(&inv, order));
            scales.push(&self.scale_sq[k] * &r);
        }
        let (g2, _) = rescale_poly(&self.g, &inner.scale_sq, true)?;
        let g = g2.substitute(&images, &tsp, order)?.mul_trunc(&inv, order);
        Ok(PolyMap::new(inner.n, self.target_n, self.ell, comps, g)?.with_scales(scales)?.canonicalize_scales())
    }

    /// Exact composition `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        self.check_inner(inner.target_n, inner.ell)?;
        let osp = self.space();
        let isp = inner.space();
        let deg_of = |p: &FormalPoly| p.terms().map(|(m, _)| m.total_degree()).max().unwrap_or(0);
        let deg = self.numerators.iter().chain([&self.g, &self.denominator]).map(deg_of).max().unwrap_or(0);

        let mut bases: Vec<FormalPoly> = inner.numerators.clone();
        bases.push(inner.g.clone());
        bases.push(inner.denominator.clone());
        let q_idx = bases.len() - 1;
        let mut cache = PowerCache::new(bases, None);

        let mut hom = |p: &FormalPoly, fixed: bool| -> Result<(FormalPoly, Rational)> {
            let (p2, r) = rescale_poly(p, &inner.scale_sq, fixed)?;
            let mut acc = FormalPoly::zero(isp);
            for (m, c) in p2.terms() {
                let mut prod = FormalPoly::constant(isp, c.clone());
                for k in 0..osp.n_z {
                    let e = m.exp(osp.z(k));
                    if e > 0 {
                        prod = &prod * cache.get(k, e);
                    }
                }
                let ew = m.exp(osp.w());
                if ew > 0 {
                    prod = &prod * cache.get(osp.n_z, ew);
                }
                let rest = deg - m.total_degree();
                if rest > 0 {
                    prod = &prod * cache.get(q_idx, rest);
                }
                acc = &acc + &prod;
            }
            Ok((acc, r))
        };

        let mut numerators = Vec::new();
        let mut scales = Vec::new();
        for (k, p) in self.numerators.iter().enumerate() {
            let (h, r) = hom(p, false)?;
            numerators.push(h);
            scales.push(&self.scale_sq[k] * &r);
        }
        let (g, _) = hom(&self.g, true)?;
        let (den, _) = hom(&self.denominator, true)?;
        RationalMap::new(inner.n, self.target_n, self.ell, numerators, g, den)?.with_scales(scales)
    }

    pub fn eval(&self, z: &[GR], w: &GR) -> Result<(Vec<GR>, GR)> {
        let sp = self.space();
        let pt = point_values(&sp, z, w)?;
        let q = self.denominator.eval(&pt)?;
        let qi = q.inv().ok_or(Error::NotInvertible)?;
        let mut zs = Vec::new();
        for (k, p) in self.numerators.iter().enumerate() {
            let v = p.eval(&pt)?;
            let s = &self.scale_sq[k];
            if !s.is_one() && !v.is_zero() {
                let r = rational_sqrt(s).ok_or_else(|| Error::IrrationalScale(format!("scale {s}")))?;
                zs.push(&v.scale(&r) * &qi);
            } else {
                zs.push(&v * &qi);
            }
        }
        Ok((zs, &self.g.eval(&pt)? * &qi))
    }
}

/// Quadric automorphism fixing 0 with parameters `(λ, U, a, r)`:
/// `z* = λ (z + a w) U / q`, `w* = λ² w / q`,
/// `q = 1 - 2i⟨z, ā⟩_ℓ + (r - i|a|²_ℓ) w`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadricAutomorphism {
    pub n: usize,
    pub ell: usize,
    pub lambda: Rational,
    pub u: Matrix,
    pub a: Vec<GR>,
    pub r: Rational,
}

impl QuadricAutomorphism {
    pub fn identity(n: usize, ell: usize) -> Self {
        Self { n, ell, lambda: Rational::one(), u: Matrix::identity(n - 1), a: vec![GR::zero(); n - 1], r: Rational::zero() }
    }

    pub fn to_rational(&self) -> Result<RationalMap> {
        let dim = self.n - 1;
        let sig = Signature::new(dim, self.ell)?;
        if !self.lambda.is_positive() {
            return Err(Error::InvalidInput("lambda must be positive".into()));
        }
        if self.a.len() != dim || self.u.rows() != dim || self.u.cols() != dim {
            return Err(Error::LengthMismatch { expected: dim, got: self.a.len() });
        }
        if !is_isometry(&sig, &self.u) {
            return Err(Error::NotIsometric("U does not preserve the form".into()));
        }
        let sp = VarSpace::segre(dim);
        let w = FormalPoly::var(sp, sp.w());
        let x: Vec<FormalPoly> = (0..dim).map(|m| &FormalPoly::var(sp, sp.z(m)) + &w.scale(&self.a[m])).collect();
        let lam = rat_gr(&self.lambda);
        let numerators = (0..dim)
            .map(|k| (0..dim).fold(FormalPoly::zero(sp), |acc, m| &acc + &x[m].scale(&(&lam * &self.u[(m, k)]))))
            .collect();
        let g = w.scale(&rat_gr(&(&self.lambda * &self.lambda)));
        let mut q = FormalPoly::one(sp);
        for m in 0..dim {
            let c = &(&gi() * &GR::from_int(-2 * sig.delta(m))) * &self.a[m].conj();
            q = &q + &FormalPoly::var(sp, sp.z(m)).scale(&c);
        }
        let a_norm = sig.norm_sq(&self.a);
        q = &q + &w.scale(&GR::new(self.r.clone(), -a_norm));
        RationalMap::new(self.n, self.n, self.ell, numerators, g, q)
    }
}

/// Translation of `H_ℓ^n` sending `(z0, w0)` to 0:
/// `(z, w) ↦ (z - z0, w - w̄0 - 2i⟨z, z̄0⟩_ℓ)`.
pub fn quadric_translation(sig: &Signature, z0: &[GR], w0: &GR) -> Result<PolyMap> {
    check_on_quadric(sig, z0, w0)?;
    translation_map(sig, z0, &-&w0.conj(), -2)
}

/// Inverse of [`quadric_translation`]: sends 0 to `(z0, w0)`,
/// `(z, w) ↦ (z + z0, w + w0 + 2i⟨z, z̄0⟩_ℓ)`.
pub fn translation_to(sig: &Signature, z0: &[GR], w0: &GR) -> Result<PolyMap> {
    check_on_quadric(sig, z0, w0)?;
    let neg: Vec<GR> = z0.iter().map(|c| -c).collect();
    translation_map(sig, &neg, w0, 2)
}

fn translation_map(sig: &Signature, shift: &[GR], w_shift: &GR, pair_coeff: i64) -> Result<PolyMap> {
    let dim = sig.dim;
    let sp = VarSpace::segre(dim);
    let comps = (0..dim).map(|k| &FormalPoly::var(sp, sp.z(k)) - &FormalPoly::constant(sp, shift[k].clone())).collect();
    // ⟨z, z̄0⟩ uses the original point; for the inverse map `shift = -z0`.
    let sign = if pair_coeff < 0 { GR::one() } else { -GR::one() };
    let mut g = &FormalPoly::var(sp, sp.w()) + &FormalPoly::constant(sp, w_shift.clone());
    for (k, s) in shift.iter().enumerate() {
        let z0k = s * &sign;
        let c = &(&gi() * &GR::from_int(pair_coeff * sig.delta(k))) * &z0k.conj();
        g = &g + &FormalPoly::var(sp, sp.z(k)).scale(&c);
    }
    PolyMap::new(dim + 1, dim + 1, sig.ell, comps, g)
}

fn check_on_quadric(sig: &Signature, z0: &[GR], w0: &GR) -> Result<()> {
    if z0.len() != sig.dim {
        return Err(Error::LengthMismatch { expected: sig.dim, got: z0.len() });
    }
    if w0.im != sig.norm_sq(z0) {
        return Err(Error::NotOnQuadric(format!("Im w0 = {} but |z0|^2 = {}", w0.im, sig.norm_sq(z0))));
    }
    Ok(())
}

/// `(z', z'', w) ↦ (z'', z', -w)` exchanging the negative and positive
/// blocks; defined when `2ℓ = n - 1`.
pub fn signature_swap(sig: &Signature) -> Result<PolyMap> {
    if !sig.is_maximal() {
        return Err(Error::InvalidSignature(format!("swap needs 2 ell = dim, got dim {}, ell {}", sig.dim, sig.ell)));
    }
    let dim = sig.dim;
    let h = sig.ell;
    let sp = VarSpace::segre(dim);
    let comps = (0..dim).map(|k| FormalPoly::var(sp, sp.z((k + h) % dim))).collect();
    PolyMap::new(dim + 1, dim + 1, sig.ell, comps, -&FormalPoly::var(sp, sp.w()))
}

/// First- and second-order data of a transversal map:
/// `z̃ = λ z U + a w + ...`, `g = σ λ² w + ...`, `r0 = ½ Re g_ww(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearData {
    pub n: usize,
    pub sig: Signature,
    pub sigma: i8,
    pub lambda_sq: Rational,
    /// `λU`, `(n-1) × (N-1)`.
    pub lambda_u: Matrix,
    pub a: Vec<GR>,
    pub r0: Rational,
    /// Unnormalized complement rows; row `i` of `Ũ` is
    /// `complement[i] / sqrt(complement_norm_sq[i])`.
    pub complement: Vec<Vec<GR>>,
    pub complement_norm_sq: Vec<Rational>,
}

impl LinearData {
    pub fn needs_swap(&self) -> bool {
        self.sigma < 0
    }

    /// `λ` when it is rational.
    pub fn lambda(&self) -> Option<Rational> {
        rational_sqrt(&self.lambda_sq)
    }

    /// Checks `⟨XŨ, Y Ũ̄⟩_ℓ = ⟨X, Y⟩_ℓ`, i.e. the rows of `Ũ` are
    /// orthonormal for the form with signs `δ`.
    pub fn extension_is_isometric(&self) -> bool {
        let n1 = self.n - 1;
        if self.complement.len() + n1 != self.sig.dim {
            return false;
        }
        let rows: Vec<Vec<GR>> = (0..n1).map(|i| self.lambda_u.row(i).to_vec()).chain(self.complement.iter().cloned()).collect();
        let norms: Vec<Rational> = (0..n1)
            .map(|_| self.lambda_sq.clone())
            .chain(self.complement_norm_sq.iter().cloned())
            .collect();
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let h = self.sig.hermitian(&rows[i], &rows[j]);
                let expect = if i == j { rat_gr(&(&norms[i] * Rational::from_integer(self.sig.delta(i).into()))) } else { GR::zero() };
                if h != expect {
                    return false;
                }
            }
        }
        true
    }

    /// The automorphism `T` of `H_ℓ^N` that normalizes the map.
    pub fn automorphism(&self) -> Result<RationalMap> {
        if self.needs_swap() {
            return Err(Error::NeedsSignatureSwap);
        }
        let dim = self.sig.dim;
        let n1 = self.n - 1;
        let sp = VarSpace::segre(dim);
        let w = FormalPoly::var(sp, sp.w());
        let inv_l2 = rat_gr(&self.lambda_sq.recip());
        let x: Vec<FormalPoly> =
            (0..dim).map(|k| &FormalPoly::var(sp, sp.z(k)) - &w.scale(&(&inv_l2 * &self.a[k]))).collect();
        let pull = |row: &[GR]| -> FormalPoly {
            (0..dim).fold(FormalPoly::zero(sp), |acc, k| {
                &acc + &x[k].scale(&(&row[k].conj() * &self.sig.delta_gr(k)))
            })
        };
        let mut numerators = Vec::with_capacity(dim);
        let mut scales = Vec::with_capacity(dim);
        for m in 0..n1 {
            numerators.push(pull(self.lambda_u.row(m)).scale(&(&inv_l2 * &self.sig.delta_gr(m))));
            scales.push(Rational::one());
        }
        for (i, r) in self.complement.iter().enumerate() {
            numerators.push(pull(r).scale(&self.sig.delta_gr(n1 + i)));
            scales.push((&self.lambda_sq * &self.complement_norm_sq[i]).recip());
        }
        let g = w.scale(&inv_l2);
        let mut q = FormalPoly::one(sp);
        for k in 0..dim {
            let c = &(&(&gi() * &GR::from_int(2 * self.sig.delta(k))) * &inv_l2) * &self.a[k].conj();
            q = &q + &FormalPoly::var(sp, sp.z(k)).scale(&c);
        }
        let inv_l4 = &inv_l2 * &inv_l2;
        let a_norm = self.sig.norm_sq(&self.a);
        q = &q + &w.scale(&(&inv_l4 * &GR::new(self.r0.clone(), -a_norm)));
        RationalMap::new(dim + 1, dim + 1, self.sig.ell, numerators, g, q)?.with_scales(scales)
    }
}

fn actual_coeff(c: &FormalPoly, s: &Rational, m: &Monomial) -> Result<GR> {
    let v = c.coeff(m);
    if v.is_zero() || s.is_one() {
        return Ok(v);
    }
    let r = rational_sqrt(s).ok_or_else(|| Error::IrrationalScale(format!("linear coefficient with scale {s}")))?;
    Ok(v.scale(&r))
}

/// Reads `(σ, λ², λU, a, r0)` off the low-order terms of `F` and completes
/// `U` to `Ũ` by Gram-Schmidt against the standard basis.
pub fn extract_linear_data(f: &PolyMap) -> Result<LinearData> {
    let sp = f.space();
    let n1 = f.n - 1;
    let sig = f.target_sig();
    let dim = sig.dim;
    for c in &f.z_components {
        if let Some(t) = c.trunc() {
            if t < 2 {
                return Err(Error::TruncationTooLow { requested: 2, available: t as i64 });
            }
        }
    }
    if let Some(t) = f.g.trunc() {
        if t < 4 {
            return Err(Error::TruncationTooLow { requested: 4, available: t as i64 });
        }
    }
    let one = Monomial::one(&sp);
    if f.components().any(|c| !c.coeff(&one).is_zero()) {
        return Err(Error::InvalidInput("map does not fix the origin".into()));
    }
    let wm = Monomial::var(&sp, sp.w(), 1);
    let cw = f.g.coeff(&wm);
    if cw.is_zero() || !cw.is_real() {
        return Err(Error::NotTransversal(format!("w-coefficient of g is {cw}")));
    }
    let sigma: i8 = if cw.re.is_positive() { 1 } else { -1 };
    let lambda_sq = cw.re.abs();

    let mut lambda_u = Matrix::zeros(n1, dim);
    let mut a = Vec::with_capacity(dim);
    for (k, c) in f.z_components.iter().enumerate() {
        let s = &f.scale_sq[k];
        for m in 0..n1 {
            lambda_u[(m, k)] = actual_coeff(c, s, &Monomial::var(&sp, sp.z(m), 1))?;
        }
        a.push(actual_coeff(c, s, &wm)?);
    }
    let r0 = f.g.coeff(&Monomial::var(&sp, sp.w(), 2)).re;

    let src = f.source_sig();
    let lhs = &(&lambda_u * &sig.gram()) * &lambda_u.adjoint();
    let rhs = src.gram().scale(&GR::from_rational(&lambda_sq * Rational::from_integer(sigma.into())));
    if lhs != rhs {
        return Err(Error::NotIsometric("λU J (λU)* differs from σλ² J".into()));
    }

    let mut data = LinearData {
        n: f.n,
        sig,
        sigma,
        lambda_sq,
        lambda_u,
        a,
        r0,
        complement: Vec::new(),
        complement_norm_sq: Vec::new(),
    };
    if sigma > 0 {
        complete_basis(&mut data)?;
    }
    Ok(data)
}

fn complete_basis(d: &mut LinearData) -> Result<()> {
    let n1 = d.n - 1;
    let dim = d.sig.dim;
    let mut rows: Vec<(Vec<GR>, GR)> =
        (0..n1).map(|m| (d.lambda_u.row(m).to_vec(), GR::from_rational(&d.lambda_sq * Rational::from_integer(d.sig.delta(m).into())))).collect();
    for j in 0..dim {
        if d.complement.len() + n1 == dim {
            break;
        }
        let mut v = vec![GR::zero(); dim];
        v[j] = GR::one();
        for (b, hb) in &rows {
            let coef = &d.sig.hermitian(&v, b) / hb;
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= &(&coef * bk);
            }
        }
        let h = d.sig.hermitian(&v, &v);
        if v.iter().all(Zero::is_zero) || h.is_zero() {
            continue;
        }
        if !h.re.is_positive() {
            return Err(Error::NotIsometric("complement of U is not positive".into()));
        }
        d.complement_norm_sq.push(h.re.clone());
        d.complement.push(v.clone());
        rows.push((v, h));
    }
    if d.complement.len() + n1 != dim {
        return Err(Error::NotIsometric("could not complete U to a basis".into()));
    }
    Ok(())
}

/// Residual of the mapping equation by weighted degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub order: u32,
    pub grading: Grading,
    /// Nonzero weighted components of `-Im g + |f̃|²_ℓ` along the graph.
    pub by_degree: BTreeMap<u32, FormalPoly>,
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        self.by_degree.is_empty()
    }

    pub fn first_nonzero(&self) -> Option<u32> {
        self.by_degree.keys().next().copied()
    }
}

/// Substitutes `w = u + i(|z|²_ℓ + ρ)` into `-Im g + |f|²_ℓ + |φ|²` and
/// returns the weighted components up to `order`.
pub fn maps_into_quadric(m: &HypersurfaceGerm, f: &PolyMap, order: u32) -> Result<ResidualReport> {
    if m.n != f.n || m.sig.ell != f.ell {
        return Err(Error::InvalidInput(format!(
            "germ in C^{} (ell {}) does not match map source C^{} (ell {})",
            m.n, m.sig.ell, f.n, f.ell
        )));
    }
    let rsp = m.space();
    let sp = f.space();
    let mut images = vec![FormalPoly::zero(rsp); sp.nvars()];
    for k in 0..f.n - 1 {
        images[sp.z(k)] = FormalPoly::var(rsp, rsp.z(k));
    }
    images[sp.w()] = m.graph_w()?;

    let g = f.g.substitute(&images, &rsp, order)?;
    let im_g = (&g - &g.conj_real()?).scale(&GR::from_ratios(0, 1, -1, 2));
    let mut res = -&im_g;
    let tsig = f.target_sig();
    for (k, c) in f.z_components.iter().enumerate() {
        let ck = c.substitute(&images, &rsp, order)?;
        let prod = ck.mul_trunc(&ck.conj_real()?, order);
        let coef = GR::from_rational(&f.scale_sq[k] * Rational::from_integer(tsig.delta(k).into()));
        res = &res + &prod.scale(&coef);
    }
    Ok(ResidualReport { order, grading: m.grading, by_degree: res.weighted_components() })
}

/// `g - ḡ(ξ,η) - 2i⟨f̃, f̃̄(ξ,η)⟩_ℓ` with `η = w - 2i⟨z,ξ⟩_ℓ`, to weighted
/// order `order`. For a quadric source it vanishes iff the map sends
/// `H_ℓ^n` into `H_ℓ^N` to that order.
pub fn complexified_identity(f: &PolyMap, order: u32) -> Result<FormalPoly> {
    let sp = f.space();
    let trunc = |p: &FormalPoly| p.truncate(order);
    let g = trunc(&f.g);
    let mut e = &g - &g.conj_poly()?;
    let norm = f.z_components.iter().map(trunc).collect::<Vec<_>>();
    let fm = PolyMap { z_components: norm, g: g.clone(), ..f.clone() };
    e = &e - &fm.target_norm_sq(Some(order))?.scale(&GR::from_ratios(0, 1, 2, 1));
    let p = pairing_poly(&f.source_sig(), &sp)?;
    let mut images: Vec<FormalPoly> = (0..sp.nvars()).map(|v| FormalPoly::var(sp, v)).collect();
    images[sp.eta()] = &FormalPoly::var(sp, sp.w()) - &p.scale(&GR::from_ratios(0, 1, 2, 1));
    e.substitute(&images, &sp, order)
}

/// `L_j h = ∂h/∂z_j + 2iδ_j ξ_j ∂h/∂w` (`j` is 0-based).
pub fn apply_tangent_field(h: &FormalPoly, j: usize, sig: &Signature) -> Result<FormalPoly> {
    if j >= sig.dim {
        return Err(Error::IndexOutOfRange { index: j, limit: sig.dim });
    }
    let sp = *h.space();
    if sp.n_z <= j || sp.n_xi <= j || !sp.has_w {
        return Err(Error::SpaceMismatch(format!("{sp:?} lacks z, xi or w")));
    }
    let xi = FormalPoly::var(sp, sp.xi(j)).scale(&(&gi() * &GR::from_int(2 * sig.delta(j))));
    Ok(&h.derivative(sp.z(j)) + &(&xi * &h.derivative(sp.w())))
}

/// Pieces of a normalized map: `a^{(1,0)}` and `φ^{(2,0)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormParts {
    /// `a^{(1,0)}_k(z)`, `k < n - 1`, linear in `z`.
    pub a10: Vec<FormalPoly>,
    pub phi20: Vec<FormalPoly>,
    pub phi_scale_sq: Vec<Rational>,
}

/// Checks `f = z + (i/2)a^{(1,0)}(z)w + o_wt(3)`,
/// `φ = φ^{(2,0)} + o_wt(2)`, `g = w + o_wt(4)`.
pub fn check_normal_form(f: &PolyMap) -> Result<()> {
    let fail = |msg: String| Err(Error::NotNormalForm(msg));
    let sp = f.space();
    let n1 = f.n - 1;
    let need = |c: &FormalPoly, t: u32, name: &str| -> Result<()> {
        match c.trunc() {
            Some(x) if x < t => Err(Error::NotNormalForm(format!("{name} known only to weight {x}"))),
            _ => Ok(()),
        }
    };
    for (k, c) in f.f().iter().enumerate() {
        need(c, 3, "f")?;
        if !f.scale_sq[k].is_one() && !c.is_zero() {
            return fail(format!("f{} has irrational scale {}", k + 1, f.scale_sq[k]));
        }
        if c.weighted_component(1)? != FormalPoly::var(sp, sp.z(k)) {
            return fail(format!("f{} linear part is not z{}", k + 1, k + 1));
        }
        if !c.weighted_component(2)?.is_zero() {
            return fail(format!("f{} has weight-2 terms", k + 1));
        }
        let w3 = c.weighted_component(3)?;
        if w3 != c.bidegree_component(1, 1) {
            return fail(format!("f{} has weight-3 terms outside z·w", k + 1));
        }
    }
    for (j, c) in f.phi().iter().enumerate() {
        need(c, 2, "phi")?;
        if !c.weighted_component(1)?.is_zero() {
            return fail(format!("phi{} has linear terms", j + 1));
        }
        if c.weighted_component(2)? != c.bidegree_component(2, 0) {
            return fail(format!("phi{} has a w term", j + 1));
        }
    }
    need(&f.g, 4, "g")?;
    if !f.g.weighted_component(1)?.is_zero()
        || f.g.weighted_component(2)? != FormalPoly::var(sp, sp.w())
        || !f.g.weighted_component(3)?.is_zero()
        || !f.g.weighted_component(4)?.is_zero()
    {
        return fail("g is not w + o_wt(4)".into());
    }
    let _ = n1;
    Ok(())
}

pub fn normal_form_parts(f: &PolyMap) -> Result<NormalFormParts> {
    check_normal_form(f)?;
    let sp = f.space();
    let c = GR::from_ratios(0, 1, -2, 1);
    let a10 = f.f().iter().map(|p| p.bidegree_component(1, 1).derivative(sp.w()).scale(&c)).collect();
    let phi20 = f.phi().iter().map(|p| p.bidegree_component(2, 0)).collect();
    Ok(NormalFormParts { a10, phi20, phi_scale_sq: f.scale_sq[f.n - 1..].to_vec() })
}

/// Output of [`normalize_bh`].
#[derive(Clone, Debug)]
pub struct Normalization {
    pub f_sharp: PolyMap,
    pub t: RationalMap,
    pub m_sharp: HypersurfaceGerm,
    pub data: LinearData,
}

/// Composes `F` with the automorphism `T` built from its linear data and
/// checks that the result is in normal form.
pub fn normalize_bh(f: &PolyMap, m: &HypersurfaceGerm, order: u32) -> Result<Normalization> {
    if order < 4 {
        return Err(Error::InvalidInput(format!("normalization needs order >= 4, got {order}")));
    }
    if m.n != f.n || m.sig.ell != f.ell {
        return Err(Error::InvalidInput("germ and map sources differ".into()));
    }
    let data = extract_linear_data(f)?;
    if data.needs_swap() {
        return Err(Error::NeedsSignatureSwap);
    }
    let t = data.automorphism()?;
    let f_sharp = t.apply(f, order)?;
    check_normal_form(&f_sharp)?;
    let m_sharp = HypersurfaceGerm::quadric(f.target_n, f.ell)?;
    Ok(Normalization { f_sharp, t, m_sharp, data })
}

/// `⟨a^{(1,0)}(z), z̄⟩_ℓ|z|²_ℓ - |φ^{(2,0)}|² - ¼(S(z) - S̃♯(z, 0))` in
/// `VarSpace::bihermitian(n - 1)`.
pub fn gauss_codazzi_residual(f_sharp: &PolyMap, m: &HypersurfaceGerm, m_sharp: &HypersurfaceGerm) -> Result<FormalPoly> {
    let parts = normal_form_parts(f_sharp)?;
    let n1 = f_sharp.n - 1;
    let bh = VarSpace::bihermitian(n1);
    let sig = f_sharp.source_sig();
    let p = pairing_poly(&sig, &bh)?;
    let mut lhs = FormalPoly::zero(bh);
    for (k, a) in parts.a10.iter().enumerate() {
        let ak = to_bihermitian(a, n1)?;
        lhs = &lhs + &(&ak * &FormalPoly::var(bh, bh.xi(k))).scale(&sig.delta_gr(k));
    }
    lhs = &lhs * &p;
    let mut phi_sq = FormalPoly::zero(bh);
    for (j, ph) in parts.phi20.iter().enumerate() {
        let prod = &to_bihermitian(ph, n1)? * &to_bihermitian(&ph.conj_poly()?, n1)?;
        phi_sq = &phi_sq + &prod.scale_rational(&parts.phi_scale_sq[j]);
    }
    let s = m.cmw()?;
    let s_sharp = to_bihermitian(&m_sharp.cmw()?, n1)?;
    let curv = (&s - &s_sharp).scale(&GR::from_ratios(1, 4, 0, 1));
    Ok(&(&lhs - &phi_sq) - &curv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::hermitian::cayley_isometry;
    use crate::polyring::build;

    fn q(n: usize, ell: usize) -> HypersurfaceGerm {
        HypersurfaceGerm::quadric(n, ell).unwrap()
    }

    fn gr(a: i64, b: i64, c: i64, d: i64) -> GR {
        GR::from_ratios(a, b, c, d)
    }

    fn sample_automorphism(n: usize, ell: usize, seed: i64) -> QuadricAutomorphism {
        let dim = n - 1;
        let sig = Signature::new(dim, ell).unwrap();
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = gr((seed + i as i64 * 3 + j as i64) % 5 - 2, 3, (seed * 7 + j as i64) % 3 - 1, 2);
            }
        }
        let u = cayley_isometry(&sig, &m).expect("invertible Cayley denominator");
        QuadricAutomorphism {
            n,
            ell,
            lambda: rat(seed % 3 + 1, 2),
            u,
            a: (0..dim).map(|k| gr(seed % 4 - 1, 2, k as i64 + 1, 3)).collect(),
            r: rat(seed % 5 - 2, 3),
        }
    }

    #[test]
    fn identity_and_embedding_map_into_quadric() {
        for (n, big, ell) in [(2, 2, 0), (3, 3, 1), (3, 5, 1), (4, 5, 1)] {
            let f = PolyMap::embedding(n, big, ell).unwrap();
            assert!(maps_into_quadric(&q(n, ell), &f, 8).unwrap().is_zero());
            assert!(complexified_identity(&f, 8).unwrap().is_zero());
        }
    }

    #[test]
    fn doubled_g_fails_at_weight_two() {
        // -Im(2(u + i z ξ)) + z ξ = -z ξ.
        let mut f = PolyMap::identity(2, 0).unwrap();
        f.g = f.g.scale(&GR::from_int(2));
        let r = maps_into_quadric(&q(2, 0), &f, 6).unwrap();
        assert_eq!(r.first_nonzero(), Some(2));
        let sp = VarSpace::real(1);
        assert_eq!(r.by_degree[&2], -&(&build::z(&sp, 0) * &build::xi(&sp, 0)));
        assert_eq!(complexified_identity(&f, 6).unwrap().lower_weight(), Some(2));
    }

    #[test]
    fn complexified_example() {
        // g = w + w²: w² - (w - 2i z ξ)² = 4i z ξ w + 4 z² ξ².
        let mut f = PolyMap::identity(2, 0).unwrap();
        let sp = f.space();
        f.g = &f.g + &(&build::w(&sp) * &build::w(&sp));
        let e = complexified_identity(&f, 6).unwrap();
        let zx = &build::z(&sp, 0) * &build::xi(&sp, 0);
        let expect = &(&zx * &build::w(&sp)).scale(&gr(0, 1, 4, 1)) + &(&zx * &zx).scale(&GR::from_int(4));
        assert!(e.same_terms(&expect));
        assert!(complexified_identity(&f, 1).unwrap().is_zero());
        assert_eq!(maps_into_quadric(&q(2, 0), &f, 6).unwrap().first_nonzero(), Some(4));
    }

    #[test]
    fn tangent_field_examples() {
        let sig = Signature::new(2, 1).unwrap();
        let sp = VarSpace::segre(2);
        for j in 0..2 {
            let lw = apply_tangent_field(&build::w(&sp), j, &sig).unwrap();
            assert_eq!(lw, build::xi(&sp, j).scale(&gr(0, 1, 2 * sig.delta(j), 1)));
            let p = pairing_poly(&sig, &sp).unwrap();
            let h = &(&build::w(&sp) - &build::eta(&sp)) - &p.scale(&gr(0, 1, 2, 1));
            assert!(apply_tangent_field(&h, j, &sig).unwrap().is_zero());
        }
        let z1 = build::z(&sp, 0);
        assert_eq!(apply_tangent_field(&(&z1 * &z1), 0, &sig).unwrap(), z1.scale(&GR::from_int(2)));
        assert!(matches!(apply_tangent_field(&z1, 2, &sig), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn translation_examples() {
        let sig = Signature::new(1, 0).unwrap();
        let t = quadric_translation(&sig, &[GR::one()], &GR::i()).unwrap();
        let (z, w) = t.eval(&[GR::one()], &GR::i()).unwrap();
        assert!(z[0].is_zero() && w.is_zero());
        assert!(maps_into_quadric(&q(2, 0), &t, 6).unwrap().is_zero());
        assert!(quadric_translation(&sig, &[GR::one()], &GR::from_int(1)).is_err());
        let id = quadric_translation(&sig, &[GR::zero()], &GR::zero()).unwrap();
        assert_eq!(id, PolyMap::identity(2, 0).unwrap());

        // τ_p then τ_{τ_p(q)} sends q to 0.
        let sig = Signature::new(2, 1).unwrap();
        let p = ([gr(1, 2, 0, 1), gr(0, 1, 1, 1)], GR::new(int(3), rat(3, 4)));
        let qz = [gr(1, 1, 1, 1), gr(1, 3, 0, 1)];
        let qw = GR::new(int(-2), sig.norm_sq(&qz));
        let tp = quadric_translation(&sig, &p.0, &p.1).unwrap();
        let (z1, w1) = tp.eval(&qz, &qw).unwrap();
        let tq = quadric_translation(&sig, &z1, &w1).unwrap();
        let composed = tq.to_rational().unwrap().compose(&tp.to_rational().unwrap()).unwrap();
        let (z2, w2) = composed.eval(&qz, &qw).unwrap();
        assert!(z2.iter().all(Zero::is_zero) && w2.is_zero());
        let back = translation_to(&sig, &p.0, &p.1).unwrap();
        let round = tp.to_rational().unwrap().compose(&back.to_rational().unwrap()).unwrap();
        assert_eq!(round.to_poly().unwrap(), PolyMap::identity(3, 1).unwrap());
        assert!(maps_into_quadric(&q(3, 1), &back, 6).unwrap().is_zero());
    }

    #[test]
    fn swap_examples() {
        let sig = Signature::new(2, 1).unwrap();
        let s = signature_swap(&sig).unwrap();
        let sp = s.space();
        assert_eq!(s.z_components, vec![build::z(&sp, 1), build::z(&sp, 0)]);
        assert_eq!(s.g, -&build::w(&sp));
        let ss = s.to_rational().unwrap().compose(&s.to_rational().unwrap()).unwrap();
        assert_eq!(ss.to_poly().unwrap(), PolyMap::identity(3, 1).unwrap());
        assert!(maps_into_quadric(&q(3, 1), &s, 6).unwrap().is_zero());
        assert!(signature_swap(&Signature::new(3, 1).unwrap()).is_err());
    }

    #[test]
    fn automorphisms_preserve_the_quadric() {
        for (n, ell, seed) in [(2, 0, 1), (3, 1, 2), (3, 0, 4), (4, 1, 5)] {
            let a = sample_automorphism(n, ell, seed).to_rational().unwrap();
            let s = a.series(8).unwrap();
            assert!(maps_into_quadric(&q(n, ell), &s, 8).unwrap().is_zero());
        }
    }

    #[test]
    fn linear_data_examples() {
        let d = extract_linear_data(&PolyMap::identity(3, 1).unwrap()).unwrap();
        assert_eq!((d.sigma, d.lambda_sq.clone(), d.r0.clone()), (1, int(1), int(0)));
        assert_eq!(d.lambda_u, Matrix::identity(2));
        assert!(d.a.iter().all(Zero::is_zero));

        let mut f = PolyMap::identity(3, 1).unwrap();
        f.z_components = f.z_components.iter().map(|c| c.scale(&GR::from_int(2))).collect();
        f.g = f.g.scale(&GR::from_int(4));
        let d = extract_linear_data(&f).unwrap();
        assert_eq!(d.lambda(), Some(int(2)));
        assert_eq!(d.lambda_u, Matrix::identity(2).scale(&GR::from_int(2)));

        let s = signature_swap(&Signature::new(2, 1).unwrap()).unwrap();
        let d = extract_linear_data(&s).unwrap();
        assert!(d.needs_swap());
        assert!(matches!(normalize_bh(&s, &q(3, 1), 6), Err(Error::NeedsSignatureSwap)));

        let mut flat = PolyMap::identity(2, 0).unwrap();
        flat.g = FormalPoly::zero(flat.space());
        assert!(matches!(extract_linear_data(&flat), Err(Error::NotTransversal(_))));
    }

    #[test]
    fn normalizing_a_normal_map_is_trivial() {
        let f = PolyMap::embedding(3, 4, 1).unwrap();
        let nz = normalize_bh(&f, &q(3, 1), 6).unwrap();
        assert_eq!(nz.f_sharp, f.truncate(6));
        let id = nz.t.series(6).unwrap();
        assert_eq!(id, PolyMap::identity(4, 1).unwrap().truncate(6));
    }

    #[test]
    fn automorphism_images_normalize_back() {
        for (n, big, ell, seed) in [(3, 3, 1, 1), (3, 4, 1, 2), (4, 5, 1, 3), (4, 4, 0, 7)] {
            let a = sample_automorphism(big, ell, seed).to_rational().unwrap();
            let b = sample_automorphism(n, ell, seed + 1).to_rational().unwrap();
            let e = PolyMap::embedding(n, big, ell).unwrap().to_rational().unwrap();
            let f = a.compose(&e.compose(&b).unwrap()).unwrap().series(8).unwrap();
            assert!(maps_into_quadric(&q(n, ell), &f, 8).unwrap().is_zero());
            let nz = normalize_bh(&f, &q(n, ell), 8).unwrap();
            assert_eq!(nz.f_sharp, PolyMap::embedding(n, big, ell).unwrap().truncate(8));
            assert!(maps_into_quadric(&q(big, ell), &nz.t.series(8).unwrap(), 8).unwrap().is_zero());
            assert!(nz.data.extension_is_isometric());
            let gc = gauss_codazzi_residual(&nz.f_sharp, &q(n, ell), &nz.m_sharp).unwrap();
            assert!(gc.is_zero());
        }
    }

    #[test]
    fn irrational_lambda_normalizes() {
        // (z, z, 2w) from H_0^2 to H_0^3: λ² = 2.
        let sp = VarSpace::segre(1);
        let z = build::z(&sp, 0);
        let f = PolyMap::new(2, 3, 0, vec![z.clone(), z.clone()], build::w(&sp).scale(&GR::from_int(2))).unwrap();
        assert!(maps_into_quadric(&q(2, 0), &f, 6).unwrap().is_zero());
        let nz = normalize_bh(&f, &q(2, 0), 6).unwrap();
        assert_eq!(nz.data.lambda(), None);
        assert_eq!(nz.f_sharp, PolyMap::embedding(2, 3, 0).unwrap().truncate(6));
        assert!(maps_into_quadric(&q(3, 0), &nz.t.series(6).unwrap(), 6).unwrap().is_zero());
    }

    #[test]
    fn gauss_codazzi_on_a_curved_germ() {
        // Im w = |z|² + |z1|⁴ and F = (z1, z1², w): |φ|² = |z1|⁴ = -¼S.
        let rsp = VarSpace::real(1);
        let zx = &build::z(&rsp, 0) * &build::xi(&rsp, 0);
        let m = HypersurfaceGerm::new(2, 0, &zx * &zx, Grading::Weighted).unwrap();
        let sp = VarSpace::segre(1);
        let z = build::z(&sp, 0);
        let f = PolyMap::new(2, 3, 0, vec![z.clone(), &z * &z], build::w(&sp)).unwrap();
        assert!(maps_into_quadric(&m, &f, 8).unwrap().is_zero());
        let nz = normalize_bh(&f, &m, 6).unwrap();
        let gc = gauss_codazzi_residual(&nz.f_sharp, &m, &nz.m_sharp).unwrap();
        assert!(gc.is_zero());

        let mut bent = nz.f_sharp.clone();
        bent.z_components[1] = bent.z_components[1].scale(&GR::from_int(2));
        let gc = gauss_codazzi_residual(&bent, &m, &nz.m_sharp).unwrap();
        let bh = VarSpace::bihermitian(1);
        let b = &build::z(&bh, 0) * &build::xi(&bh, 0);
        assert_eq!(gc, (&b * &b).scale(&GR::from_int(-3)));
    }

    #[test]
    fn germ_validation() {
        let rsp = VarSpace::real(1);
        let z = build::z(&rsp, 0);
        assert!(HypersurfaceGerm::new(2, 0, &(&z * &z) * &z, Grading::Total).is_err());
        assert!(HypersurfaceGerm::new(2, 0, z.clone(), Grading::Total).is_err());
    }
}
