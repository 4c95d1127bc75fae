//! JSON interchange for polynomials, maps, germs, families, basepoints and
//! reports. Scalars are strings `"p/q"` or `"p/q+r/s i"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational, GR};
use crate::family_reduce::{verify_reduction_report, PolyFamily, ReductionResult};
use crate::hermitian::{KernelReport, Signature};
use crate::polyring::{FormalPoly, VarSpace};
use crate::quadric::{Grading, HypersurfaceGerm, Normalization, PolyMap, RationalMap, ResidualReport};
use crate::rescale::{Basepoint, BasepointSpec, NormTrace};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: BTreeMap<String, u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0/1".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
    #[serde(default = "inf_value")]
    pub trunc: Value,
}

fn inf_value() -> Value {
    Value::String("inf".into())
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_trunc(v: &Value) -> Result<Option<u32>> {
    match v {
        Value::String(s) if s == "inf" => Ok(None),
        Value::Null => Ok(None),
        Value::Number(n) => n
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("bad truncation order {n}"))),
        other => Err(Error::Parse(format!("bad truncation order {other}"))),
    }
}

fn trunc_value(t: Option<u32>) -> Value {
    t.map_or_else(inf_value, Value::from)
}

pub fn poly_to_json(p: &FormalPoly) -> PolyJson {
    let sp = p.space();
    let terms = p
        .terms()
        .map(|(m, c)| TermJson {
            exps: m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (sp.var_name(v), e))
                .collect(),
            re: format_rational(&c.re),
            im: format_rational(&c.im),
        })
        .collect();
    PolyJson { terms, trunc: trunc_value(p.trunc()) }
}

pub fn poly_from_json(j: &PolyJson, space: VarSpace) -> Result<FormalPoly> {
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        let mut exps = vec![0u32; space.nvars()];
        for (name, &e) in &t.exps {
            let v = space
                .parse_var(name)
                .ok_or_else(|| Error::Parse(format!("unknown variable {name:?} in {space:?}")))?;
            exps[v] += e;
        }
        terms.push((exps, GR::new(parse_rational(&t.re)?, parse_rational(&t.im)?)));
    }
    Ok(FormalPoly::from_terms(space, terms, parse_trunc(&j.trunc)?))
}

pub fn poly_value(p: &FormalPoly) -> Value {
    serde_json::to_value(poly_to_json(p)).expect("polynomial json")
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn gr_value(c: &GR) -> Value {
    Value::String(c.to_canonical_string())
}

fn parse_gr(s: &str) -> Result<GR> {
    s.parse()
}

fn min_order(t: Option<u32>, p: FormalPoly) -> FormalPoly {
    match t {
        Some(t) => p.truncate(t),
        None => p,
    }
}

/// Map file: `{"n", "N", "ell", "order"?, "components": [...], "g",
/// "denominator"?, "scale_sq"?}` with polynomials in `z1.., w`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub target_n: usize,
    pub ell: usize,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub grading: Option<String>,
    pub components: Vec<PolyJson>,
    pub g: PolyJson,
    #[serde(default)]
    pub denominator: Option<PolyJson>,
    #[serde(default)]
    pub scale_sq: Option<Vec<String>>,
}

/// A map read from disk: a polynomial (possibly truncated) map or an exact
/// rational one.
#[derive(Clone, Debug)]
pub enum LoadedMap {
    Poly(PolyMap),
    Rational(RationalMap),
}

impl LoadedMap {
    pub fn n(&self) -> usize {
        match self {
            LoadedMap::Poly(p) => p.n,
            LoadedMap::Rational(r) => r.n,
        }
    }

    pub fn ell(&self) -> usize {
        match self {
            LoadedMap::Poly(p) => p.ell,
            LoadedMap::Rational(r) => r.ell,
        }
    }

    /// Series to weighted order `order`.
    pub fn series(&self, order: u32) -> Result<PolyMap> {
        match self {
            LoadedMap::Poly(p) => {
                if let Some(t) = p.order() {
                    if t < order {
                        return Err(Error::TruncationTooLow { requested: order, available: t as i64 });
                    }
                }
                Ok(p.truncate(order))
            }
            LoadedMap::Rational(r) => r.series(order),
        }
    }

    pub fn exact(&self) -> Result<RationalMap> {
        match self {
            LoadedMap::Poly(p) => p.to_rational(),
            LoadedMap::Rational(r) => Ok(r.clone()),
        }
    }
}

pub fn map_from_json(j: &MapJson) -> Result<LoadedMap> {
    if j.n < 2 {
        return Err(Error::InvalidInput(format!("dimension n = {} must be at least 2", j.n)));
    }
    let sp = VarSpace::segre(j.n - 1);
    let comps = j.components.iter().map(|c| poly_from_json(c, sp).map(|p| min_order(j.order, p))).collect::<Result<Vec<_>>>()?;
    let g = min_order(j.order, poly_from_json(&j.g, sp)?);
    let scales = match &j.scale_sq {
        Some(s) => s.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?,
        None => vec![Rational::from_integer(1.into()); comps.len()],
    };
    match &j.denominator {
        Some(d) => {
            let d = poly_from_json(d, sp)?;
            Ok(LoadedMap::Rational(RationalMap::new(j.n, j.target_n, j.ell, comps, g, d)?.with_scales(scales)?))
        }
        None => Ok(LoadedMap::Poly(PolyMap::new(j.n, j.target_n, j.ell, comps, g)?.with_scales(scales)?)),
    }
}

pub fn map_to_json(f: &PolyMap) -> MapJson {
    MapJson {
        n: f.n,
        target_n: f.target_n,
        ell: f.ell,
        order: f.order(),
        grading: Some(Grading::Weighted.as_str().into()),
        components: f.z_components.iter().map(poly_to_json).collect(),
        g: poly_to_json(&f.g),
        denominator: None,
        scale_sq: Some(f.scale_sq.iter().map(format_rational).collect()),
    }
}

pub fn rational_map_to_json(f: &RationalMap) -> MapJson {
    MapJson {
        n: f.n,
        target_n: f.target_n,
        ell: f.ell,
        order: None,
        grading: None,
        components: f.numerators.iter().map(poly_to_json).collect(),
        g: poly_to_json(&f.g),
        denominator: Some(poly_to_json(&f.denominator)),
        scale_sq: Some(f.scale_sq.iter().map(format_rational).collect()),
    }
}

/// Germ file: `{"n", "ell", "order"?, "grading"?, "rho"?}` with `rho` in
/// `z1.., u, xi1..`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermJson {
    pub n: usize,
    pub ell: usize,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub grading: Option<String>,
    #[serde(default)]
    pub rho: Option<PolyJson>,
}

pub fn germ_from_json(j: &GermJson) -> Result<HypersurfaceGerm> {
    if j.n < 2 {
        return Err(Error::InvalidInput(format!("dimension n = {} must be at least 2", j.n)));
    }
    let sp = VarSpace::real(j.n - 1);
    let rho = match &j.rho {
        Some(r) => poly_from_json(r, sp)?,
        None => FormalPoly::zero(sp),
    };
    let grading = j.grading.as_deref().map_or(Ok(Grading::Weighted), str::parse)?;
    HypersurfaceGerm::new(j.n, j.ell, min_order(j.order, rho), grading)
}

pub fn germ_to_json(m: &HypersurfaceGerm) -> GermJson {
    GermJson {
        n: m.n,
        ell: m.sig.ell,
        order: m.order(),
        grading: Some(m.grading.as_str().into()),
        rho: Some(poly_to_json(&m.rho)),
    }
}

/// `{"dim", "phi": [...], "psi": [...]}` in `VarSpace::bihermitian(dim)`;
/// `phi` in `z`, `psi` in `xi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub phi: Vec<PolyJson>,
    pub psi: Vec<PolyJson>,
}

pub fn families_from_json(j: &FamilyJson) -> Result<(PolyFamily, PolyFamily)> {
    let sp = VarSpace::bihermitian(j.dim);
    let phi = j.phi.iter().map(|p| poly_from_json(p, sp)).collect::<Result<Vec<_>>>()?;
    let psi = j.psi.iter().map(|p| poly_from_json(p, sp)).collect::<Result<Vec<_>>>()?;
    Ok((PolyFamily::in_z(phi)?, PolyFamily::in_xi(psi)?))
}

/// `{"dim", "ell", "cap", "phi": [...]}`, `dim - 1` members in `z1..`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HuangJson {
    pub dim: usize,
    pub ell: usize,
    pub cap: i64,
    pub phi: Vec<PolyJson>,
}

pub fn huang_from_json(j: &HuangJson) -> Result<(Signature, Vec<FormalPoly>, i64)> {
    let sig = Signature::new(j.dim, j.ell)?;
    let sp = VarSpace::bihermitian(j.dim);
    let phi = j.phi.iter().map(|p| poly_from_json(p, sp)).collect::<Result<Vec<_>>>()?;
    Ok((sig, phi, j.cap))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub z: Vec<String>,
    pub w: String,
    #[serde(default)]
    pub sigma: Option<MapJson>,
    #[serde(default)]
    pub germ: Option<GermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub direction: Vec<String>,
    #[serde(default = "zero_string")]
    pub speed: String,
    /// Explicit parameters, or `dyadic: k` for `t_j = 2^{-j}`, `j = 1..=k`.
    #[serde(default)]
    pub params: Option<Vec<String>>,
    #[serde(default)]
    pub dyadic: Option<u32>,
}

/// `{"points": [...]}` or `{"curve": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointsJson {
    #[serde(default)]
    pub points: Option<Vec<PointJson>>,
    #[serde(default)]
    pub curve: Option<CurveJson>,
}

pub fn points_from_json(j: &PointsJson) -> Result<BasepointSpec> {
    match (&j.points, &j.curve) {
        (Some(pts), None) => {
            let mut out = Vec::with_capacity(pts.len());
            for p in pts {
                let mut b = Basepoint::new(p.z.iter().map(|s| parse_gr(s)).collect::<Result<_>>()?, parse_gr(&p.w)?);
                if let Some(s) = &p.sigma {
                    b.sigma = Some(map_from_json(s)?.exact()?);
                }
                if let Some(g) = &p.germ {
                    b.germ = Some(germ_from_json(g)?);
                }
                out.push(b);
            }
            Ok(BasepointSpec::Points(out))
        }
        (None, Some(c)) => {
            let direction = c.direction.iter().map(|s| parse_gr(s)).collect::<Result<Vec<_>>>()?;
            let speed = parse_rational(&c.speed)?;
            match (&c.params, c.dyadic) {
                (Some(ps), None) => Ok(BasepointSpec::QuadricCurve {
                    direction,
                    speed,
                    params: ps.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                }),
                (None, Some(k)) => Ok(BasepointSpec::dyadic_curve(direction, speed, k)),
                _ => Err(Error::Parse("curve needs exactly one of params, dyadic".into())),
            }
        }
        _ => Err(Error::Parse("points file needs exactly one of points, curve".into())),
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn residual_report_json(r: &ResidualReport) -> Value {
    let by_degree: serde_json::Map<String, Value> =
        r.by_degree.iter().map(|(k, p)| (k.to_string(), poly_value(p))).collect();
    json!({
        "order": r.order,
        "grading": r.grading.as_str(),
        "maps_into_quadric": r.is_zero(),
        "first_nonzero_degree": r.first_nonzero(),
        "residual": by_degree,
    })
}

pub fn kernel_report_json(r: &KernelReport) -> Value {
    let basis: Vec<Value> = r.basis.iter().map(|psi| Value::Array(psi.iter().map(poly_value).collect())).collect();
    json!({
        "kernel_dim": r.kernel_dim,
        "basis": basis,
        "violations": r.violations,
        "holds": r.holds(),
    })
}

pub fn reduction_json(r: &ReductionResult, phi: &PolyFamily, psi: &PolyFamily) -> Value {
    let v = verify_reduction_report(r, phi, psi);
    json!({
        "phi_tilde": r.phi_tilde.members().iter().map(poly_value).collect::<Vec<_>>(),
        "psi_tilde": r.psi_tilde.members().iter().map(poly_value).collect::<Vec<_>>(),
        "pivot_columns": r.pivot_columns,
        "kept": r.kept,
        "dropped": r.dropped,
        "certified_lower": rational_value(&r.certified_lower),
        "psi_tilde_norm_sq": rational_value(&r.psi_tilde.norm_sq()),
        "checks": {
            "identity": v.identity,
            "unit_norms": v.unit_norms,
            "pivot_structure": v.pivot_structure,
            "diagonal_bounds": v.diagonal_bounds,
            "certificate": v.certificate,
            "lower_bound": v.lower_bound,
            "upper_bound": v.upper_bound,
        },
        "verified": v.all(),
    })
}

pub fn normalization_json(nz: &Normalization) -> Value {
    let d = &nz.data;
    json!({
        "f_sharp": map_to_json(&nz.f_sharp),
        "t": rational_map_to_json(&nz.t),
        "m_sharp": germ_to_json(&nz.m_sharp),
        "linear_data": {
            "sigma": d.sigma,
            "lambda_sq": rational_value(&d.lambda_sq),
            "a": d.a.iter().map(gr_value).collect::<Vec<_>>(),
            "r0": rational_value(&d.r0),
            "lambda_u": (0..d.lambda_u.rows()).map(|i| d.lambda_u.row(i).iter().map(gr_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
    })
}

pub fn norm_trace_json(t: &NormTrace) -> Value {
    let points: Vec<Value> = t
        .points
        .iter()
        .map(|p| {
            let norms: serde_json::Map<String, Value> = p.norms.iter().map(|(k, v)| (k.to_string(), rational_value(v))).collect();
            let tensors: serde_json::Map<String, Value> = p
                .a_tensors
                .iter()
                .map(|((m, g, n, d), v)| (format!("{m},{g},{n},{d}"), rational_value(v)))
                .collect();
            json!({
                "point_index": p.point_index,
                "lambda_sq": p.lambda_sq.as_ref().map(rational_value),
                "norms": norms,
                "a_tensors": tensors,
                "flags": p.flags,
                "checks": p.checks,
                "error": p.error,
            })
        })
        .collect();
    json!({
        "order": t.order,
        "threshold": rational_value(&t.threshold),
        "codimension_in_regime": t.codimension_in_regime,
        "signature_in_regime": t.signature_in_regime,
        "norms_constant": t.norms_constant(),
        "flagged_degrees": t.flagged_degrees(),
        "points": points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::build;

    #[test]
    fn poly_text_form() {
        let sp = VarSpace::segre(2);
        let p = &build::z(&sp, 0).scale(&GR::from_ratios(1, 2, -3, 4)) + &build::w(&sp);
        let j = serde_json::to_string(&poly_to_json(&p.truncate(5))).unwrap();
        assert!(j.contains("\"z1\":1") && j.contains("\"-3/4\"") && j.contains("\"trunc\":5"));
        let back = poly_from_json(&read_json(&j).unwrap(), sp).unwrap();
        assert_eq!(back, p.truncate(5));
        let exact: PolyJson = read_json(r#"{"terms":[{"exps":{"w":1},"re":"2"}]}"#).unwrap();
        assert_eq!(poly_from_json(&exact, sp).unwrap().trunc(), None);
        let bad: PolyJson = read_json(r#"{"terms":[{"exps":{"q":1},"re":"2"}]}"#).unwrap();
        assert!(poly_from_json(&bad, sp).is_err());
    }

    #[test]
    fn real_space_uses_u() {
        let sp = VarSpace::real(1);
        let j = serde_json::to_string(&poly_to_json(&build::w(&sp))).unwrap();
        assert!(j.contains("\"u\":1"));
    }

    #[test]
    fn map_file_header() {
        let f = PolyMap::embedding(3, 4, 1).unwrap().truncate(6);
        let j = serde_json::to_value(map_to_json(&f)).unwrap();
        assert_eq!((j["n"].as_u64(), j["N"].as_u64(), j["order"].as_u64()), (Some(3), Some(4), Some(6)));
        let back = map_from_json(&serde_json::from_value(j).unwrap()).unwrap();
        assert!(matches!(back, LoadedMap::Poly(ref p) if *p == f));
    }

    #[test]
    fn curve_points() {
        let j: PointsJson = read_json(r#"{"curve":{"direction":["0","1"],"speed":"1","dyadic":3}}"#).unwrap();
        let m = HypersurfaceGerm::quadric(3, 1).unwrap();
        let pts = points_from_json(&j).unwrap().points(&m).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].w, GR::from_ratios(1, 2, 1, 4));
    }
}
