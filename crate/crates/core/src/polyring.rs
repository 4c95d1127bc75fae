//! Sparse multivariate polynomials over [`GaussianRational`] with the
//! weighted grading used for CR maps: `z` and `ξ` variables carry weight 1,
//! `w` and `η` carry weight 2.
//!
//! A [`FormalPoly`] is either an exact polynomial or a series germ known only
//! up to a weighted order (`trunc`). Every operation computes the order to
//! which its result is still determined, so truncated and exact data can be
//! mixed freely.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{GaussianRational as GR, Rational};

/// Layout of the variables `(z_1..z_{n_z}, w, ξ_1..ξ_{n_xi}, η)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSpace {
    pub n_z: usize,
    pub has_w: bool,
    pub n_xi: usize,
    pub has_eta: bool,
}

/// Role of a variable index inside a [`VarSpace`]. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Z(usize),
    W,
    Xi(usize),
    Eta,
}

impl VarSpace {
    pub const fn new(n_z: usize, has_w: bool, n_xi: usize, has_eta: bool) -> Self {
        Self { n_z, has_w, n_xi, has_eta }
    }

    /// `(z, w, ξ, η)` with `n_z` holomorphic coordinates and their mirrors.
    pub const fn segre(n_z: usize) -> Self {
        Self::new(n_z, true, n_z, true)
    }

    /// `(z, u, ξ = z̄)`: real parametrization of a graph `Im w = ...`.
    pub const fn real(n_z: usize) -> Self {
        Self::new(n_z, true, n_z, false)
    }

    /// `(z, ξ)` only.
    pub const fn bihermitian(n: usize) -> Self {
        Self::new(n, false, n, false)
    }

    pub fn nvars(&self) -> usize {
        self.n_z + self.has_w as usize + self.n_xi + self.has_eta as usize
    }

    pub fn z(&self, i: usize) -> usize {
        assert!(i < self.n_z, "z index {i} out of range");
        i
    }

    pub fn w(&self) -> usize {
        assert!(self.has_w, "space has no w variable");
        self.n_z
    }

    pub fn xi(&self, i: usize) -> usize {
        assert!(i < self.n_xi, "xi index {i} out of range");
        self.n_z + self.has_w as usize + i
    }

    pub fn eta(&self) -> usize {
        assert!(self.has_eta, "space has no eta variable");
        self.n_z + self.has_w as usize + self.n_xi
    }

    pub fn kind(&self, v: usize) -> VarKind {
        let w0 = self.n_z;
        let x0 = w0 + self.has_w as usize;
        let e0 = x0 + self.n_xi;
        if v < w0 {
            VarKind::Z(v)
        } else if v < x0 {
            VarKind::W
        } else if v < e0 {
            VarKind::Xi(v - x0)
        } else {
            assert!(v < self.nvars(), "variable index {v} out of range");
            VarKind::Eta
        }
    }

    pub fn index_of(&self, kind: VarKind) -> Option<usize> {
        match kind {
            VarKind::Z(i) if i < self.n_z => Some(self.z(i)),
            VarKind::W if self.has_w => Some(self.w()),
            VarKind::Xi(i) if i < self.n_xi => Some(self.xi(i)),
            VarKind::Eta if self.has_eta => Some(self.eta()),
            _ => None,
        }
    }

    pub fn weight(&self, v: usize) -> u32 {
        match self.kind(v) {
            VarKind::Z(_) | VarKind::Xi(_) => 1,
            VarKind::W | VarKind::Eta => 2,
        }
    }

    pub fn is_mirrored(&self) -> bool {
        self.n_z == self.n_xi && self.has_w == self.has_eta
    }

    fn w_name(&self) -> &'static str {
        if self.has_w && !self.has_eta && self.n_xi > 0 {
            "u"
        } else {
            "w"
        }
    }

    pub fn var_name(&self, v: usize) -> String {
        match self.kind(v) {
            VarKind::Z(i) => format!("z{}", i + 1),
            VarKind::W => self.w_name().to_string(),
            VarKind::Xi(i) => format!("xi{}", i + 1),
            VarKind::Eta => "eta".to_string(),
        }
    }

    /// Inverse of [`VarSpace::var_name`]; `u` and `w` both name the weight-2 slot.
    pub fn parse_var(&self, name: &str) -> Option<usize> {
        let kind = match name {
            "w" | "u" => VarKind::W,
            "eta" => VarKind::Eta,
            _ => {
                let (prefix, idx) = name
                    .strip_prefix("xi")
                    .map(|r| ("xi", r))
                    .or_else(|| name.strip_prefix('z').map(|r| ("z", r)))?;
                let k: usize = idx.parse().ok()?;
                if k == 0 {
                    return None;
                }
                if prefix == "xi" {
                    VarKind::Xi(k - 1)
                } else {
                    VarKind::Z(k - 1)
                }
            }
        };
        self.index_of(kind)
    }
}

/// Exponent vector together with its weighted degree.
///
/// Ordering is graded by weighted degree, then lexicographic on the exponent
/// vector (`z_1` first). This is a monomial order, so truncation is a prefix
/// operation and leading monomials behave under multiplication.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    wdeg: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(space: &VarSpace, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), space.nvars(), "exponent vector length");
        let wdeg = exps.iter().enumerate().map(|(v, e)| e * space.weight(v)).sum();
        Self { wdeg, exps }
    }

    pub fn one(space: &VarSpace) -> Self {
        Self { wdeg: 0, exps: vec![0; space.nvars()] }
    }

    pub fn var(space: &VarSpace, v: usize, e: u32) -> Self {
        let mut exps = vec![0; space.nvars()];
        exps[v] = e;
        Self::new(space, exps)
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, v: usize) -> u32 {
        self.exps[v]
    }

    pub fn wdeg(&self) -> u32 {
        self.wdeg
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            wdeg: self.wdeg + o.wdeg,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if self.exps.iter().zip(&o.exps).any(|(a, b)| a < b) {
            return None;
        }
        Some(Monomial {
            wdeg: self.wdeg - o.wdeg,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn z_degree(&self, space: &VarSpace) -> u32 {
        self.exps[..space.n_z].iter().sum()
    }

    pub fn w_exp(&self, space: &VarSpace) -> u32 {
        if space.has_w {
            self.exps[space.w()]
        } else {
            0
        }
    }

    pub fn xi_degree(&self, space: &VarSpace) -> u32 {
        if space.n_xi == 0 {
            return 0;
        }
        self.exps[space.xi(0)..space.xi(0) + space.n_xi].iter().sum()
    }

    pub fn eta_exp(&self, space: &VarSpace) -> u32 {
        if space.has_eta {
            self.exps[space.eta()]
        } else {
            0
        }
    }
}

/// Multivariate polynomial, exact or truncated at a weighted order.
///
/// `trunc == None` means exact. `trunc == Some(t)` means every term of
/// weighted degree `≤ t` is known and nothing is known above `t`; no stored
/// term exceeds `t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalPoly {
    space: VarSpace,
    terms: BTreeMap<Monomial, GR>,
    trunc: Option<u32>,
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, GR>, m: Monomial, c: &GR) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

type BigTerms<'a> = Vec<(&'a Monomial, (BigInt, BigInt))>;

/// Terms up to weight `trunc` as Gaussian integers over a common denominator.
fn integral_terms(p: &FormalPoly, trunc: Option<u32>) -> (BigInt, BigTerms<'_>) {
    let kept = p.terms.iter().take_while(|(m, _)| trunc.is_none_or(|t| m.wdeg <= t));
    let mut den = BigInt::one();
    for (_, c) in kept.clone() {
        den = den.lcm(c.re.denom()).lcm(c.im.denom());
    }
    let scaled = kept
        .map(|(m, c)| {
            let r = c.re.numer() * (&den / c.re.denom());
            let i = c.im.numer() * (&den / c.im.denom());
            (m, (r, i))
        })
        .collect();
    (den, scaled)
}

type SmallTerms<'a> = Vec<(&'a Monomial, i128, i128)>;

/// `integral_terms` in `i128`, or `None` on overflow.
fn small_integral_terms(p: &FormalPoly, trunc: Option<u32>) -> Option<(i128, SmallTerms<'_>)> {
    let kept = p.terms.iter().take_while(|(m, _)| trunc.is_none_or(|t| m.wdeg <= t));
    let mut den: i128 = 1;
    for (_, c) in kept.clone() {
        for d in [c.re.denom(), c.im.denom()] {
            let d = d.to_i128()?;
            den = den.checked_mul(d / den.gcd(&d))?;
        }
    }
    let scaled = kept
        .map(|(m, c)| {
            let part = |r: &Rational| -> Option<i128> { r.numer().to_i128()?.checked_mul(den / r.denom().to_i128()?) };
            Some((m, part(&c.re)?, part(&c.im)?))
        })
        .collect::<Option<_>>()?;
    Some((den, scaled))
}

/// Product with `i128` accumulation; `None` on overflow.
fn mul_small(a: &FormalPoly, b: &FormalPoly, trunc: Option<u32>) -> Option<BTreeMap<Monomial, GR>> {
    let (da, ia) = small_integral_terms(a, trunc)?;
    let (db, ib) = small_integral_terms(b, trunc)?;
    let den = da.checked_mul(db)?;
    let mut acc: BTreeMap<Monomial, (i128, i128)> = BTreeMap::new();
    for (ma, ar, ai) in &ia {
        for (mb, br, bi) in &ib {
            if trunc.is_some_and(|t| ma.wdeg + mb.wdeg > t) {
                break;
            }
            let e = acc.entry(ma.mul(mb)).or_insert((0, 0));
            let re = ar.checked_mul(*br)?.checked_sub(ai.checked_mul(*bi)?)?;
            let im = ar.checked_mul(*bi)?.checked_add(ai.checked_mul(*br)?)?;
            e.0 = e.0.checked_add(re)?;
            e.1 = e.1.checked_add(im)?;
        }
    }
    Some(ratios_over(acc, den))
}

/// Images of monomials under a substitution, each built from a cached
/// parent times one variable image.
struct MonomialImages<'a> {
    images: &'a [FormalPoly],
    order: Option<u32>,
    memo: BTreeMap<Vec<u32>, FormalPoly>,
}

impl<'a> MonomialImages<'a> {
    fn new(images: &'a [FormalPoly], target: VarSpace, order: Option<u32>) -> Self {
        let mut memo = BTreeMap::new();
        memo.insert(vec![0; images.len()], FormalPoly::one(target));
        Self { images, order, memo }
    }

    fn get(&mut self, exps: &[u32]) -> &FormalPoly {
        if !self.memo.contains_key(exps) {
            let v = exps.iter().rposition(|&e| e > 0).unwrap();
            let mut parent = exps.to_vec();
            parent[v] -= 1;
            let (images, order) = (self.images, self.order);
            let img = self.get(&parent).mul_bounded(&images[v], order);
            self.memo.insert(exps.to_vec(), img);
        }
        &self.memo[exps]
    }

    /// `Σ c · image(exps)` over images already in the memo.
    fn combine(&self, used: &[(&Vec<u32>, &GR)]) -> BTreeMap<Monomial, GR> {
        if let Some(terms) = self.combine_small(used) {
            return terms;
        }
        let mut terms = BTreeMap::new();
        for (e, c) in used {
            for (pm, pc) in &self.memo[*e].terms {
                add_term(&mut terms, pm.clone(), &(pc * c));
            }
        }
        terms
    }

    fn combine_small(&self, used: &[(&Vec<u32>, &GR)]) -> Option<BTreeMap<Monomial, GR>> {
        let mut parts = Vec::with_capacity(used.len());
        let mut den: i128 = 1;
        for (e, c) in used {
            let (dc, cr, ci) = small_gr(c)?;
            let (di, terms) = small_integral_terms(&self.memo[*e], None)?;
            let d = dc.checked_mul(di)?;
            den = den.checked_mul(d / den.gcd(&d))?;
            parts.push((d, cr, ci, terms));
        }
        let mut acc: BTreeMap<Monomial, (i128, i128)> = BTreeMap::new();
        for (d, cr, ci, terms) in parts {
            let f = den / d;
            let (cr, ci) = (cr.checked_mul(f)?, ci.checked_mul(f)?);
            for (m, ar, ai) in terms {
                let e = acc.entry(m.clone()).or_insert((0, 0));
                e.0 = e.0.checked_add(ar.checked_mul(cr)?.checked_sub(ai.checked_mul(ci)?)?)?;
                e.1 = e.1.checked_add(ar.checked_mul(ci)?.checked_add(ai.checked_mul(cr)?)?)?;
            }
        }
        Some(ratios_over(acc, den))
    }
}

/// `c = (re + i·im) / den` in `i128`.
fn small_gr(c: &GR) -> Option<(i128, i128, i128)> {
    let (dr, di) = (c.re.denom().to_i128()?, c.im.denom().to_i128()?);
    let den = dr.checked_mul(di / dr.gcd(&di))?;
    let re = c.re.numer().to_i128()?.checked_mul(den / dr)?;
    let im = c.im.numer().to_i128()?.checked_mul(den / di)?;
    Some((den, re, im))
}

/// Nonzero entries of `acc`, each divided by `den`.
fn ratios_over(acc: BTreeMap<Monomial, (i128, i128)>, den: i128) -> BTreeMap<Monomial, GR> {
    let ratio = |x: i128| {
        let g = x.gcd(&den);
        Rational::new_raw(BigInt::from(x / g), BigInt::from(den / g))
    };
    acc.into_iter()
        .filter(|(_, (r, i))| *r != 0 || *i != 0)
        .map(|(m, (r, i))| (m, GR::new(ratio(r), ratio(i))))
        .collect()
}

impl FormalPoly {
    pub fn zero(space: VarSpace) -> Self {
        Self { space, terms: BTreeMap::new(), trunc: None }
    }

    /// The germ `o_wt(t)`: zero up to weighted order `t`, unknown above.
    pub fn unknown_above(space: VarSpace, t: u32) -> Self {
        Self { space, terms: BTreeMap::new(), trunc: Some(t) }
    }

    pub fn constant(space: VarSpace, c: GR) -> Self {
        let mut p = Self::zero(space);
        add_term(&mut p.terms, Monomial::one(&space), &c);
        p
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, GR::one())
    }

    pub fn var(space: VarSpace, v: usize) -> Self {
        Self::monomial(space, Monomial::var(&space, v, 1), GR::one())
    }

    pub fn monomial(space: VarSpace, m: Monomial, c: GR) -> Self {
        let mut p = Self::zero(space);
        add_term(&mut p.terms, m, &c);
        p
    }

    /// Builds a polynomial from exponent vectors, summing repeated monomials
    /// and dropping terms above `trunc`.
    pub fn from_terms<I>(space: VarSpace, terms: I, trunc: Option<u32>) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, GR)>,
    {
        let mut out = BTreeMap::new();
        for (exps, c) in terms {
            let m = Monomial::new(&space, exps);
            if trunc.is_some_and(|t| m.wdeg > t) {
                continue;
            }
            add_term(&mut out, m, &c);
        }
        Self { space, terms: out, trunc }
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GR)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GR {
        self.terms.get(m).cloned().unwrap_or_else(GR::zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> GR {
        self.coeff(&Monomial::new(&self.space, exps.to_vec()))
    }

    /// Largest term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &GR)> {
        self.terms.last_key_value()
    }

    pub fn max_wdeg(&self) -> Option<u32> {
        self.terms.last_key_value().map(|(m, _)| m.wdeg)
    }

    /// Same terms, ignoring truncation bookkeeping.
    pub fn same_terms(&self, other: &FormalPoly) -> bool {
        self.space == other.space && self.terms == other.terms
    }

    /// Lower bound on the weight of everything this germ may contain,
    /// known or unknown. `None` for the exact zero polynomial.
    pub fn lower_weight(&self) -> Option<u32> {
        match (self.terms.first_key_value(), self.trunc) {
            (Some((m, _)), _) => Some(m.wdeg),
            (None, Some(t)) => Some(t + 1),
            (None, None) => None,
        }
    }

    /// Drops everything above weighted order `t`.
    pub fn truncate(&self, t: u32) -> FormalPoly {
        let trunc = min_trunc(self.trunc, Some(t));
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.wdeg <= t)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        FormalPoly { space: self.space, terms, trunc }
    }

    /// Forgets truncation. Only meaningful when the caller knows the tail vanishes.
    pub fn assume_exact(mut self) -> FormalPoly {
        self.trunc = None;
        self
    }

    fn check_space(&self, o: &FormalPoly) -> Result<()> {
        if self.space != o.space {
            return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", self.space, o.space)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &FormalPoly) -> Result<FormalPoly> {
        self.check_space(o)?;
        let trunc = min_trunc(self.trunc, o.trunc);
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter().chain(o.terms.iter()) {
            if trunc.is_some_and(|t| m.wdeg > t) {
                continue;
            }
            add_term(&mut terms, m.clone(), c);
        }
        Ok(FormalPoly { space: self.space, terms, trunc })
    }

    pub fn try_sub(&self, o: &FormalPoly) -> Result<FormalPoly> {
        self.try_add(&-o)
    }

    /// Weighted order to which `self * o` is determined.
    fn product_trunc(&self, o: &FormalPoly) -> Option<u32> {
        let mut t = None;
        if let (Some(ta), Some(vb)) = (self.trunc, o.lower_weight()) {
            t = min_trunc(t, Some(ta + vb));
        }
        if let (Some(tb), Some(va)) = (o.trunc, self.lower_weight()) {
            t = min_trunc(t, Some(tb + va));
        }
        t
    }

    pub fn try_mul(&self, o: &FormalPoly) -> Result<FormalPoly> {
        self.check_space(o)?;
        Ok(self.mul_bounded(o, None))
    }

    /// Product with every term above weighted order `order` discarded.
    pub fn mul_trunc(&self, o: &FormalPoly, order: u32) -> FormalPoly {
        self.check_space(o).expect("mul_trunc");
        self.mul_bounded(o, Some(order))
    }

    fn mul_bounded(&self, o: &FormalPoly, order: Option<u32>) -> FormalPoly {
        let trunc = min_trunc(self.product_trunc(o), order);
        // Products are accumulated in Z[i] over the common denominator.
        if let Some(terms) = mul_small(self, o, trunc) {
            return FormalPoly { space: self.space, terms, trunc };
        }
        let (da, ia) = integral_terms(self, trunc);
        let (db, ib) = integral_terms(o, trunc);
        let mut acc: BTreeMap<Monomial, (BigInt, BigInt)> = BTreeMap::new();
        for (ma, (ar, ai)) in &ia {
            for (mb, (br, bi)) in &ib {
                if trunc.is_some_and(|t| ma.wdeg + mb.wdeg > t) {
                    break;
                }
                let e = acc.entry(ma.mul(mb)).or_insert_with(|| (BigInt::zero(), BigInt::zero()));
                if !ai.is_zero() || !bi.is_zero() {
                    e.0 += ar * br - ai * bi;
                    e.1 += ar * bi + ai * br;
                } else {
                    e.0 += ar * br;
                }
            }
        }
        let den = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, (r, i))| !r.is_zero() || !i.is_zero())
            .map(|(m, (r, i))| (m, GR::new(Rational::new(r, den.clone()), Rational::new(i, den.clone()))))
            .collect();
        FormalPoly { space: self.space, terms, trunc }
    }

    pub fn scale(&self, c: &GR) -> FormalPoly {
        if c.is_zero() {
            return FormalPoly { space: self.space, terms: BTreeMap::new(), trunc: self.trunc };
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        FormalPoly { space: self.space, terms, trunc: self.trunc }
    }

    pub fn scale_rational(&self, r: &Rational) -> FormalPoly {
        self.scale(&GR::from_rational(r.clone()))
    }

    pub fn pow_trunc(&self, e: u32, order: Option<u32>) -> FormalPoly {
        let mut acc = FormalPoly::one(self.space);
        for _ in 0..e {
            acc = acc.mul_bounded(self, order);
        }
        acc
    }

    /// Terms of weighted degree exactly `k`; exact when `k` is within the
    /// truncation order.
    pub fn weighted_component(&self, k: u32) -> Result<FormalPoly> {
        if let Some(t) = self.trunc {
            if k > t {
                return Err(Error::TruncationTooLow { requested: k, available: t as i64 });
            }
        }
        Ok(self.filter(|m| m.wdeg == k, None))
    }

    /// All nonzero weighted components up to the truncation order.
    pub fn weighted_components(&self) -> BTreeMap<u32, FormalPoly> {
        let mut out: BTreeMap<u32, FormalPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let entry = out.entry(m.wdeg).or_insert_with(|| FormalPoly::zero(self.space));
            entry.terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// Terms of degree `mu` in the `z` block and `nu` in `w`, with no `ξ`, `η`
    /// dependence. Negative degrees give zero.
    pub fn bidegree_component(&self, mu: i64, nu: i64) -> FormalPoly {
        if mu < 0 || nu < 0 {
            return FormalPoly::zero(self.space);
        }
        let (mu, nu) = (mu as u32, nu as u32);
        let sp = self.space;
        let block_trunc = match self.trunc {
            Some(t) if mu + 2 * nu > t => Some(t),
            _ => None,
        };
        self.filter(
            |m| {
                m.z_degree(&sp) == mu
                    && m.w_exp(&sp) == nu
                    && m.xi_degree(&sp) == 0
                    && m.eta_exp(&sp) == 0
            },
            block_trunc,
        )
    }

    /// Terms of degree `alpha` in `z` and `beta` in `ξ` (any `w`, `η`).
    pub fn zxi_component(&self, alpha: u32, beta: u32) -> FormalPoly {
        let sp = self.space;
        self.filter(|m| m.z_degree(&sp) == alpha && m.xi_degree(&sp) == beta, self.trunc)
    }

    pub fn filter<F: Fn(&Monomial) -> bool>(&self, keep: F, trunc: Option<u32>) -> FormalPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        FormalPoly { space: self.space, terms, trunc }
    }

    /// `max |c|²` over coefficients; the square of the coefficient norm.
    pub fn coeff_norm_sq(&self) -> Rational {
        self.terms.values().map(|c| c.sq_modulus()).max().unwrap_or_else(Rational::zero)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exps[v] > 0)
    }

    /// Substitutes `images[v]` for each variable `v` and keeps weighted order
    /// `≤ order`.
    ///
    /// Fails with [`Error::TruncationTooLow`] if the truncated inputs do not
    /// determine the composite up to `order`. Give an exact zero image for
    /// variables that do not occur.
    pub fn substitute(&self, images: &[FormalPoly], target: &VarSpace, order: u32) -> Result<FormalPoly> {
        self.check_images(images, target)?;
        let lows: Vec<Option<u32>> = images.iter().map(FormalPoly::lower_weight).collect();
        let mut reliable: i64 = order as i64;

        if let Some(t) = self.trunc {
            // Unknown monomials have weight >= t+1; their images have weight
            // >= ratio * (t+1) with ratio = min low_v / weight_v.
            let ratio2 = lows
                .iter()
                .enumerate()
                .filter_map(|(v, lw)| lw.map(|lw| 2 * lw / self.space.weight(v)))
                .min();
            if let Some(r2) = ratio2 {
                let bound = (r2 as i64 * (t as i64 + 1) + 1) / 2;
                reliable = reliable.min(bound - 1);
            }
        }

        let mut cache = MonomialImages::new(images, *target, Some(order));
        let mut out = FormalPoly::zero(*target);
        let mut used = Vec::new();
        let mut trunc_acc: Option<u32> = Some(order);
        for (m, c) in &self.terms {
            let mut lb: u64 = 0;
            let mut vanishes = false;
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match lows[v] {
                    Some(lw) => lb += lw as u64 * e as u64,
                    None => vanishes = true,
                }
            }
            if vanishes || lb > order as u64 {
                continue;
            }
            trunc_acc = min_trunc(trunc_acc, cache.get(&m.exps).trunc);
            used.push((&m.exps, c));
        }
        let terms = cache.combine(&used);
        if let Some(t) = trunc_acc {
            reliable = reliable.min(t as i64);
        }
        if reliable < order as i64 {
            return Err(Error::TruncationTooLow { requested: order, available: reliable });
        }
        out.terms = terms;
        out.trunc = Some(order);
        Ok(out)
    }

    /// Exact composition; every input must be exact.
    pub fn substitute_exact(&self, images: &[FormalPoly], target: &VarSpace) -> Result<FormalPoly> {
        self.check_images(images, target)?;
        if let Some(t) = self.trunc {
            return Err(Error::NotExact(t));
        }
        if let Some(t) = images.iter().find_map(|im| im.trunc) {
            return Err(Error::NotExact(t));
        }
        let mut cache = MonomialImages::new(images, *target, None);
        let used: Vec<_> = self.terms.iter().map(|(m, c)| (&m.exps, c)).collect();
        for (e, _) in &used {
            cache.get(e);
        }
        Ok(FormalPoly { space: *target, terms: cache.combine(&used), trunc: None })
    }

    fn check_images(&self, images: &[FormalPoly], target: &VarSpace) -> Result<()> {
        if images.len() != self.space.nvars() {
            return Err(Error::LengthMismatch { expected: self.space.nvars(), got: images.len() });
        }
        if let Some(bad) = images.iter().find(|im| im.space != *target) {
            return Err(Error::SpaceMismatch(format!("image in {:?}, expected {:?}", bad.space, target)));
        }
        Ok(())
    }

    /// Conjugates coefficients and swaps `z ↔ ξ`, `w ↔ η`.
    pub fn conj_poly(&self) -> Result<FormalPoly> {
        if !self.space.is_mirrored() {
            return Err(Error::NotMirrored(format!("{:?}", self.space)));
        }
        let sp = self.space;
        let perm: Vec<usize> = (0..sp.nvars())
            .map(|v| match sp.kind(v) {
                VarKind::Z(i) => sp.xi(i),
                VarKind::Xi(i) => sp.z(i),
                VarKind::W => sp.eta(),
                VarKind::Eta => sp.w(),
            })
            .collect();
        Ok(self.permute_conj(&perm))
    }

    /// Conjugation on the real parametrization space `(z, u, z̄)`: swaps
    /// `z ↔ ξ`, keeps the real variable `u` in the `w` slot.
    pub fn conj_real(&self) -> Result<FormalPoly> {
        let sp = self.space;
        if sp.n_z != sp.n_xi || sp.has_eta {
            return Err(Error::NotMirrored(format!("{sp:?} is not a real parametrization space")));
        }
        let perm: Vec<usize> = (0..sp.nvars())
            .map(|v| match sp.kind(v) {
                VarKind::Z(i) => sp.xi(i),
                VarKind::Xi(i) => sp.z(i),
                VarKind::W => sp.w(),
                VarKind::Eta => unreachable!(),
            })
            .collect();
        Ok(self.permute_conj(&perm))
    }

    fn permute_conj(&self, perm: &[usize]) -> FormalPoly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0; m.exps.len()];
            for (v, &e) in m.exps.iter().enumerate() {
                exps[perm[v]] = e;
            }
            terms.insert(Monomial { wdeg: m.wdeg, exps }, c.conj());
        }
        FormalPoly { space: self.space, terms, trunc: self.trunc }
    }

    /// `∂/∂v`. The result is determined one weight lower than the input.
    pub fn derivative(&self, v: usize) -> FormalPoly {
        let wt = self.space.weight(v);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[v] -= 1;
            let c = c.scale(&Rational::from_integer(e.into()));
            add_term(&mut terms, Monomial { wdeg: m.wdeg - wt, exps }, &c);
        }
        let trunc = self.trunc.map(|t| t.saturating_sub(wt));
        FormalPoly { space: self.space, terms, trunc }
    }

    /// Sets variable `v` to the constant `value`. The grading is lost, so the
    /// input must be exact.
    pub fn specialize(&self, v: usize, value: &GR) -> Result<FormalPoly> {
        if let Some(t) = self.trunc {
            return Err(Error::NotExact(t));
        }
        let wt = self.space.weight(v);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[v];
            let mut exps = m.exps.clone();
            exps[v] = 0;
            let c = c * &value.pow(e);
            add_term(&mut terms, Monomial { wdeg: m.wdeg - e * wt, exps }, &c);
        }
        Ok(FormalPoly { space: self.space, terms, trunc: None })
    }

    /// Moves the polynomial into `target`, renaming variables by `rename`.
    /// Terms containing a variable mapped to `None` are dropped (that
    /// variable is set to zero). Weights must be preserved by the renaming.
    pub fn rename_vars<F: Fn(VarKind) -> Option<VarKind>>(&self, target: VarSpace, rename: F) -> Result<FormalPoly> {
        let map: Vec<Option<usize>> = (0..self.space.nvars())
            .map(|v| rename(self.space.kind(v)).and_then(|k| target.index_of(k)))
            .collect();
        for (v, t) in map.iter().enumerate() {
            if let Some(t) = t {
                if target.weight(*t) != self.space.weight(v) {
                    return Err(Error::SpaceMismatch("renaming changes weights".into()));
                }
            }
        }
        let mut terms = BTreeMap::new();
        'outer: for (m, c) in &self.terms {
            let mut exps = vec![0; target.nvars()];
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[v] {
                    Some(t) => exps[t] += e,
                    None => continue 'outer,
                }
            }
            add_term(&mut terms, Monomial::new(&target, exps), c);
        }
        Ok(FormalPoly { space: target, terms, trunc: self.trunc })
    }

    /// `1/self` as a series up to weighted order `order`. The result is
    /// determined only as far as `self` is.
    pub fn inverse_series(&self, order: u32) -> Result<FormalPoly> {
        let c0 = self.coeff(&Monomial::one(&self.space));
        let inv0 = c0.inv().ok_or(Error::NotInvertible)?;
        let trunc = min_trunc(self.trunc, Some(order)).unwrap();
        let comps = self.weighted_components();
        let mut parts: Vec<FormalPoly> = vec![FormalPoly::constant(self.space, inv0.clone())];
        let neg_inv0 = -&inv0;
        for k in 1..=trunc {
            let mut acc = FormalPoly::zero(self.space);
            for (&j, qj) in comps.range(1..=k) {
                let prev = &parts[(k - j) as usize];
                if prev.is_zero() {
                    continue;
                }
                acc = &acc + &qj.mul_bounded(prev, None);
            }
            parts.push(acc.scale(&neg_inv0));
        }
        let mut terms = BTreeMap::new();
        for p in parts {
            terms.extend(p.terms);
        }
        Ok(FormalPoly { space: self.space, terms, trunc: Some(trunc) })
    }

    /// Value at a point; `values[v]` is substituted for variable `v`.
    pub fn eval(&self, values: &[GR]) -> Result<GR> {
        if let Some(t) = self.trunc {
            return Err(Error::NotExact(t));
        }
        if values.len() != self.space.nvars() {
            return Err(Error::LengthMismatch { expected: self.space.nvars(), got: values.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| m.exps.iter().zip(values).fold(c.clone(), |acc, (&e, x)| if e == 0 { acc } else { &acc * &x.pow(e) }))
            .sum())
    }

    /// Division by a single polynomial in the monomial order: returns
    /// `(q, r)` with `self = q * divisor + r` and no term of `r` divisible
    /// by the leading monomial of `divisor`.
    pub fn div_rem(&self, divisor: &FormalPoly) -> Result<(FormalPoly, FormalPoly)> {
        self.check_space(divisor)?;
        if let Some(t) = self.trunc.or(divisor.trunc) {
            return Err(Error::NotExact(t));
        }
        let (lm, lc) = divisor.leading_term().ok_or(Error::NotInvertible)?;
        let lc_inv = lc.inv().ok_or(Error::NotInvertible)?;
        let tail: Vec<(&Monomial, &GR)> = divisor.terms.iter().rev().skip(1).collect();
        let mut p = self.terms.clone();
        let mut q = BTreeMap::new();
        let mut r = BTreeMap::new();
        while let Some((m, c)) = p.pop_last() {
            match m.div(lm) {
                Some(qm) => {
                    let t = &c * &lc_inv;
                    for (dm, dc) in &tail {
                        let d = -(&t * dc);
                        add_term(&mut p, qm.mul(dm), &d);
                    }
                    add_term(&mut q, qm, &t);
                }
                None => {
                    r.insert(m, c);
                }
            }
        }
        Ok((
            FormalPoly { space: self.space, terms: q, trunc: None },
            FormalPoly { space: self.space, terms: r, trunc: None },
        ))
    }

    /// Total degree in the variables `vars`, if every term agrees.
    pub fn homogeneous_degree_in(&self, vars: &[usize]) -> Option<Option<u32>> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d: u32 = vars.iter().map(|&v| m.exps[v]).sum();
            match deg {
                None => deg = Some(d),
                Some(x) if x != d => return None,
                _ => {}
            }
        }
        Some(deg)
    }
}

impl Add for &FormalPoly {
    type Output = FormalPoly;
    fn add(self, o: &FormalPoly) -> FormalPoly {
        self.try_add(o).expect("add")
    }
}

impl Sub for &FormalPoly {
    type Output = FormalPoly;
    fn sub(self, o: &FormalPoly) -> FormalPoly {
        self.try_sub(o).expect("sub")
    }
}

impl Mul for &FormalPoly {
    type Output = FormalPoly;
    fn mul(self, o: &FormalPoly) -> FormalPoly {
        self.try_mul(o).expect("mul")
    }
}

impl Neg for &FormalPoly {
    type Output = FormalPoly;
    fn neg(self) -> FormalPoly {
        self.scale(&-GR::one())
    }
}

impl Add for FormalPoly {
    type Output = FormalPoly;
    fn add(self, o: FormalPoly) -> FormalPoly {
        &self + &o
    }
}

impl Sub for FormalPoly {
    type Output = FormalPoly;
    fn sub(self, o: FormalPoly) -> FormalPoly {
        &self - &o
    }
}

impl Mul for FormalPoly {
    type Output = FormalPoly;
    fn mul(self, o: FormalPoly) -> FormalPoly {
        &self * &o
    }
}

impl fmt::Display for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for (v, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.space.var_name(v)),
                    _ => factors.push(format!("{}^{}", self.space.var_name(v), e)),
                }
            }
            let coeff = if c.is_real() { c.to_string() } else { format!("({c})") };
            let body = match (factors.is_empty(), c.is_one()) {
                (true, _) => coeff,
                (false, true) => factors.join("*"),
                (false, false) if c == &-GR::one() => format!("-{}", factors.join("*")),
                (false, false) => format!("{coeff}*{}", factors.join("*")),
            };
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " + o_wt({t})")?;
        }
        Ok(())
    }
}

/// Exponent vectors of all monomials of total degree `d` in `n` variables,
/// in decreasing lexicographic order (`x_1^d` first).
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Shorthand constructors for tests and examples.
pub mod build {
    use super::*;

    pub fn z(sp: &VarSpace, i: usize) -> FormalPoly {
        FormalPoly::var(*sp, sp.z(i))
    }

    pub fn w(sp: &VarSpace) -> FormalPoly {
        FormalPoly::var(*sp, sp.w())
    }

    pub fn xi(sp: &VarSpace, i: usize) -> FormalPoly {
        FormalPoly::var(*sp, sp.xi(i))
    }

    pub fn eta(sp: &VarSpace) -> FormalPoly {
        FormalPoly::var(*sp, sp.eta())
    }

    pub fn c(sp: &VarSpace, value: GR) -> FormalPoly {
        FormalPoly::constant(*sp, value)
    }
}
