//! Normalizing a map at a sequence of basepoints `p_j → 0` and tracking the
//! coefficient norms of the normalized maps `F♯_{p_j}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational, GR};
use crate::polyring::{FormalPoly, VarSpace};
use crate::quadric::{
    gauss_codazzi_residual, maps_into_quadric, normalize_bh, quadric_translation, to_bihermitian,
    translation_to, HypersurfaceGerm, Normalization, PolyMap, RationalMap,
};

/// Default threshold on squared norms above which a degree is flagged.
pub fn default_threshold() -> Rational {
    int(1_000_000)
}

/// A point on the source germ, with optional renormalization data.
///
/// For a curved source `sigma` sends `(germ, 0)` to `(M, p)`; both are
/// required away from the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Basepoint {
    pub z: Vec<GR>,
    pub w: GR,
    pub sigma: Option<RationalMap>,
    pub germ: Option<HypersurfaceGerm>,
}

impl Basepoint {
    pub fn new(z: Vec<GR>, w: GR) -> Self {
        Self { z, w, sigma: None, germ: None }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![GR::zero(); dim], GR::zero())
    }

    pub fn is_origin(&self) -> bool {
        self.w.is_zero() && self.z.iter().all(Zero::is_zero)
    }

    /// Checks `Im w = |z|²_ℓ + ρ(z, z̄, Re w)` exactly.
    pub fn check_on(&self, m: &HypersurfaceGerm) -> Result<()> {
        if self.z.len() != m.sig.dim {
            return Err(Error::LengthMismatch { expected: m.sig.dim, got: self.z.len() });
        }
        let mut rhs = GR::from_rational(m.sig.norm_sq(&self.z));
        if !m.rho.is_zero() || !m.rho.is_exact() {
            let sp = m.space();
            let mut vals = vec![GR::zero(); sp.nvars()];
            for (k, c) in self.z.iter().enumerate() {
                vals[sp.z(k)] = c.clone();
                vals[sp.xi(k)] = c.conj();
            }
            vals[sp.w()] = GR::from_rational(self.w.re.clone());
            if self.is_origin() {
                return Ok(());
            }
            rhs += &m.rho.eval(&vals)?;
        }
        if rhs != GR::from_rational(self.w.im.clone()) {
            return Err(Error::NotOnQuadric(format!("basepoint ({:?}, {}) is not on the source", self.z, self.w)));
        }
        Ok(())
    }
}

/// Basepoints given explicitly or along the quadric curve
/// `t ↦ (t v, c t + i t² |v|²_ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum BasepointSpec {
    Points(Vec<Basepoint>),
    QuadricCurve { direction: Vec<GR>, speed: Rational, params: Vec<Rational> },
}

impl BasepointSpec {
    /// `t_j = 2^{-j}`, `j = 1..=count`.
    pub fn dyadic_curve(direction: Vec<GR>, speed: Rational, count: u32) -> Self {
        let params = (1..=count).map(|j| Rational::new(1.into(), num_traits::pow(2.into(), j as usize))).collect();
        BasepointSpec::QuadricCurve { direction, speed, params }
    }

    pub fn points(&self, m: &HypersurfaceGerm) -> Result<Vec<Basepoint>> {
        let pts = match self {
            BasepointSpec::Points(p) => p.clone(),
            BasepointSpec::QuadricCurve { direction, speed, params } => {
                if !m.is_quadric() {
                    return Err(Error::InvalidInput("quadric curves need a quadric source".into()));
                }
                let nsq = m.sig.norm_sq(direction);
                params
                    .iter()
                    .map(|t| {
                        let z = direction.iter().map(|c| c.scale(t)).collect();
                        Basepoint::new(z, GR::new(speed * t, &nsq * t * t))
                    })
                    .collect()
            }
        };
        for p in &pts {
            p.check_on(m)?;
        }
        Ok(pts)
    }
}

/// `F♯_p = T_p ∘ τ_{F(p)} ∘ F ∘ σ_p`, normalized at weighted order `order`.
pub fn basepoint_normal_form(f: &RationalMap, m: &HypersurfaceGerm, p: &Basepoint, order: u32) -> Result<Normalization> {
    p.check_on(m)?;
    let sigma_p = recentering(m, p)?;
    let germ = p.germ.clone().unwrap_or_else(|| m.clone());
    let (z1, w1) = f.eval(&p.z, &p.w)?;
    let tsig = crate::hermitian::Signature::new(f.target_n - 1, f.ell)?;
    let tau = quadric_translation(&tsig, &z1, &w1)?.to_rational()?;
    let g = tau.compose(&f.compose(&sigma_p)?)?;
    normalize_bh(&g.series(order)?, &germ, order)
}

fn recentering(m: &HypersurfaceGerm, p: &Basepoint) -> Result<RationalMap> {
    if let Some(s) = &p.sigma {
        if !m.is_quadric() && p.germ.is_none() {
            return Err(Error::InvalidInput("a supplied renormalization needs the recentered germ".into()));
        }
        return Ok(s.clone());
    }
    if m.is_quadric() {
        return translation_to(&m.sig, &p.z, &p.w)?.to_rational();
    }
    if p.is_origin() {
        return PolyMap::identity(m.n, m.sig.ell)?.to_rational();
    }
    Err(Error::InvalidInput("curved source: renormalization at the basepoint must be supplied".into()))
}

/// `(μ, γ, ν, δ)`.
pub type TensorIndex = (u32, u32, u32, u32);

/// Slots forced to vanish by `φ(0) = ∂φ/∂z(0) = ∂φ/∂w(0) = 0`: any index
/// with `(μ, ν)` or `(γ, δ)` in `{(0,0), (1,0), (0,1)}`.
pub fn is_forced_zero(idx: TensorIndex) -> bool {
    let small = |a: u32, b: u32| a + 2 * b <= 2 && !(a == 2 && b == 0);
    small(idx.0, idx.2) || small(idx.1, idx.3)
}

/// `(A)_{μγνδ}(z, ξ) = Σ_j s_j φ_j^{(μ,ν)}(z, 1) φ̄_j^{(γ,δ)}(ξ, 1)` for all
/// `μ + γ + 2(ν + δ) ≤ order`, in `VarSpace::bihermitian(n - 1)`.
pub fn assemble_a_tensors(f_sharp: &PolyMap, order: u32) -> Result<BTreeMap<TensorIndex, FormalPoly>> {
    let n1 = f_sharp.n - 1;
    let sp = f_sharp.space();
    let bh = VarSpace::bihermitian(n1);
    for c in f_sharp.phi() {
        if let Some(t) = c.trunc() {
            if t < order {
                return Err(Error::TruncationTooLow { requested: order, available: t as i64 });
            }
        }
    }
    let one = GR::one();
    let mut holo: BTreeMap<(u32, u32), Vec<FormalPoly>> = BTreeMap::new();
    let mut anti: BTreeMap<(u32, u32), Vec<FormalPoly>> = BTreeMap::new();
    for nu in 0..=order / 2 {
        for mu in 0..=order - 2 * nu {
            let mut h = Vec::new();
            let mut a = Vec::new();
            for c in f_sharp.phi() {
                let block = c.bidegree_component(mu as i64, nu as i64).specialize(sp.w(), &one)?;
                a.push(to_bihermitian(&block.conj_poly()?, n1)?);
                h.push(to_bihermitian(&block, n1)?);
            }
            holo.insert((mu, nu), h);
            anti.insert((mu, nu), a);
        }
    }
    let scales = &f_sharp.scale_sq[n1..];
    let mut out = BTreeMap::new();
    for (&(mu, nu), h) in &holo {
        for (&(gamma, delta), a) in &anti {
            if mu + gamma + 2 * (nu + delta) > order {
                continue;
            }
            let mut acc = FormalPoly::zero(bh);
            for j in 0..h.len() {
                if h[j].is_zero() || a[j].is_zero() {
                    continue;
                }
                acc = &acc + &(&h[j] * &a[j]).scale_rational(&scales[j]);
            }
            out.insert((mu, gamma, nu, delta), acc);
        }
    }
    Ok(out)
}

/// `‖F^{(k)}‖²` for `k = 1..=order`: the largest squared coefficient modulus
/// over all components of weight `k`.
pub fn weighted_norms(f: &PolyMap, order: u32) -> Result<BTreeMap<u32, Rational>> {
    let mut out = BTreeMap::new();
    for k in 1..=order {
        let mut best = Rational::zero();
        for (c, s) in f.z_components.iter().zip(&f.scale_sq).chain(std::iter::once((&f.g, &Rational::one()))) {
            let v = c.weighted_component(k)?.coeff_norm_sq() * s;
            if v > best {
                best = v;
            }
        }
        out.insert(k, best);
    }
    Ok(out)
}

/// One basepoint of a [`NormTrace`].
#[derive(Clone, Debug, PartialEq)]
pub struct PointTrace {
    pub point_index: usize,
    pub lambda_sq: Option<Rational>,
    pub norms: BTreeMap<u32, Rational>,
    pub a_tensors: BTreeMap<TensorIndex, Rational>,
    /// Degrees whose squared norm exceeds the threshold.
    pub flags: Vec<u32>,
    /// `F♯_p` maps into the quadric, the Gauss-Codazzi residual vanishes, the
    /// forced-zero tensor slots vanish, and `T_p`, `τ_{F(p)}` preserve the
    /// quadric.
    pub checks: BTreeMap<String, bool>,
    pub error: Option<String>,
}

impl PointTrace {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.values().all(|&b| b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormTrace {
    pub order: u32,
    pub threshold: Rational,
    /// `N - n < n - 1`.
    pub codimension_in_regime: bool,
    /// `0 < ℓ ≤ (n - 1)/2`.
    pub signature_in_regime: bool,
    pub points: Vec<PointTrace>,
}

impl NormTrace {
    pub fn flagged_degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.points.iter().flat_map(|p| p.flags.iter().copied()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn all_passed(&self) -> bool {
        self.points.iter().all(PointTrace::passed) && self.flagged_degrees().is_empty()
    }

    /// Whether `‖F♯_{p_j}^{(k)}‖²` is the same for every successful basepoint.
    pub fn norms_constant(&self) -> bool {
        let ok: Vec<_> = self.points.iter().filter(|p| p.error.is_none()).collect();
        ok.windows(2).all(|w| w[0].norms == w[1].norms)
    }
}

fn trace_point(f: &RationalMap, m: &HypersurfaceGerm, index: usize, p: &Basepoint, order: u32, threshold: &Rational) -> PointTrace {
    let mut t = PointTrace {
        point_index: index,
        lambda_sq: None,
        norms: BTreeMap::new(),
        a_tensors: BTreeMap::new(),
        flags: Vec::new(),
        checks: BTreeMap::new(),
        error: None,
    };
    if let Err(e) = fill_point(&mut t, f, m, p, order, threshold) {
        t.error = Some(e.to_string());
    }
    t
}

fn fill_point(
    t: &mut PointTrace,
    f: &RationalMap,
    m: &HypersurfaceGerm,
    p: &Basepoint,
    order: u32,
    threshold: &Rational,
) -> Result<()> {
    let nz = basepoint_normal_form(f, m, p, order)?;
    t.lambda_sq = Some(nz.data.lambda_sq.clone());
    t.norms = weighted_norms(&nz.f_sharp, order)?;
    t.flags = t.norms.iter().filter(|(_, v)| *v > threshold).map(|(k, _)| *k).collect();
    let tensors = assemble_a_tensors(&nz.f_sharp, order)?;
    let forced_zero = tensors.iter().all(|(idx, a)| !is_forced_zero(*idx) || a.is_zero());
    t.a_tensors = tensors.into_iter().map(|(idx, a)| (idx, a.coeff_norm_sq())).collect();

    let germ = p.germ.clone().unwrap_or_else(|| m.clone());
    let maps = maps_into_quadric(&germ, &nz.f_sharp, order)?.is_zero();
    let gc = gauss_codazzi_residual(&nz.f_sharp, &germ, &nz.m_sharp)?.is_zero();
    let target = &nz.m_sharp;
    let t_ok = maps_into_quadric(target, &nz.t.series(order)?, order)?.is_zero();
    let (z1, w1) = f.eval(&p.z, &p.w)?;
    let tau = quadric_translation(&target.sig, &z1, &w1)?;
    let tau_ok = maps_into_quadric(target, &tau, order)?.is_zero();
    t.checks.insert("maps_into_quadric".into(), maps);
    t.checks.insert("gauss_codazzi".into(), gc);
    t.checks.insert("a_tensor_zero_slots".into(), forced_zero);
    t.checks.insert("normalizing_automorphism".into(), t_ok);
    t.checks.insert("target_translation".into(), tau_ok);
    Ok(())
}

/// Normalizes `F` at every basepoint of `spec` and records norms, `λ²` and
/// tensor norms. Basepoints are processed in parallel; failures are kept in
/// the trace.
pub fn run_rescale_experiment(
    f: &RationalMap,
    m: &HypersurfaceGerm,
    spec: &BasepointSpec,
    order: u32,
    threshold: &Rational,
) -> Result<NormTrace> {
    if m.n != f.n || m.sig.ell != f.ell {
        return Err(Error::InvalidInput("germ and map sources differ".into()));
    }
    let pts = spec.points(m)?;
    let points = pts
        .par_iter()
        .enumerate()
        .map(|(j, p)| trace_point(f, m, j, p, order, threshold))
        .collect();
    Ok(NormTrace {
        order,
        threshold: threshold.clone(),
        codimension_in_regime: f.target_n - f.n < f.n - 1,
        signature_in_regime: m.sig.in_standard_regime(),
        points,
    })
}
