//! Towers of cyclic steps over F_r(t), place counts `Phi_q`, finite-level
//! invariant estimates, the fundamental inequalities and truncated zeta
//! products.
//!
//! Every genus-0 level is re-parametrized as a rational function field
//! F_r(x_i), with `t` recorded as a rational function of `x_i`. Fibers over
//! base places are then factorizations over F_r. A step of positive genus
//! can only be the top of a tower.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extensions::{for_each_place, ExtensionSpec, Step, StepKind};
use crate::ffpoly::{factor_poly, FiniteField, Poly, RatFn};
use crate::places::{field, Place, PlaceSet};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// One place of a level above a base place.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiberPlace {
    /// Degree over F_r.
    pub degree: u32,
    /// Ramification index over the base place.
    pub e: u32,
    /// The place itself, written in the level parameter, for rational levels.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub place: Option<Place>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<ExtensionSpec>,
    /// Degree over F_r(t).
    pub degree: u64,
    pub genus: u64,
    /// `t` as a function of this level's parameter, when the level is rational.
    #[serde(skip)]
    pub param: Option<RatFn>,
    /// The previous level's parameter as a function of this one.
    #[serde(skip)]
    pub local_param: Option<RatFn>,
    #[serde(default)]
    pub parameter: Option<String>,
    /// Fibers above the tracked base places.
    pub fibers: BTreeMap<Place, Vec<FiberPlace>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TowerRecord")]
pub struct Tower {
    pub r: u32,
    pub tracked: PlaceSet,
    pub levels: Vec<Level>,
}

#[derive(Deserialize)]
struct TowerRecord {
    r: u32,
    #[serde(default)]
    tracked: PlaceSet,
    levels: Vec<LevelRecord>,
}

#[derive(Deserialize)]
struct LevelRecord {
    #[serde(default)]
    spec: Option<ExtensionSpec>,
}

impl TryFrom<TowerRecord> for Tower {
    type Error = Error;

    fn try_from(rec: TowerRecord) -> Result<Tower> {
        let specs: Vec<ExtensionSpec> = rec.levels.into_iter().filter_map(|l| l.spec).collect();
        Tower::from_specs(rec.r, rec.tracked, &specs)
    }
}

/// `x` as a rational function of a new parameter `w` when the step over
/// F_r(x) has genus 0 and its ramification sits at degree-1 places.
fn reparametrize(step: &Step, f: &FiniteField) -> Result<Option<RatFn>> {
    if step.genus() != 0 {
        return Ok(None);
    }
    let w = RatFn::poly(Poly::x());
    let x = RatFn::poly(Poly::x());
    match step.spec().kind {
        StepKind::Kummer { ell } => {
            let ram = step.ramified();
            if ram.len() != 2 || ram.iter().any(|(p, _)| p.degree() != 1) {
                return Ok(None);
            }
            let ell_i = ell as i64;
            let c1 = f.neg(ram[0].0.poly().expect("finite place sorts first").coeff(0));
            // mu has a simple zero at the first place and a simple pole at the second
            let (mu, second) = (x.sub(&RatFn::constant(c1), f), &ram[1].0);
            let mu = match second.poly() {
                Some(p2) => mu.div(&RatFn::poly(p2.clone()), f)?,
                None => mu,
            };
            let v1 = step.divisor().iter().find(|(p, _)| *p == ram[0].0).unwrap().1;
            let i = v1.rem_euclid(ell_i);
            let h = step.generator().mul(&mu.pow(-i, f)?, f);
            // h = c * g^l with c constant
            let mut g = RatFn::constant(1);
            for (p, e) in factor_poly(h.num(), f)?.factors {
                g = g.mul(&RatFn::poly(p).pow(e as i64 / ell_i, f)?, f);
            }
            for (p, e) in factor_poly(h.den(), f)?.factors {
                g = g.mul(&RatFn::poly(p).pow(-(e as i64) / ell_i, f)?, f);
            }
            let c = h.div(&g.pow(ell_i, f)?, f)?;
            if !c.is_constant() {
                return invalid("reparametrization failed: unit part is not constant");
            }
            let c = c.num().lc();
            let j = (1..ell_i).find(|j| (i * j) % ell_i == 1).unwrap();
            // mu = c^{-j} w^l
            let cj = f.inv(f.pow(c, j as u64)).unwrap();
            let mu_w = w.pow(ell_i, f)?.mul(&RatFn::constant(cj), f);
            let x_of_w = match second.poly() {
                Some(p2) => {
                    let c2 = f.neg(p2.coeff(0));
                    let num = mu_w.mul(&RatFn::constant(c2), f).sub(&RatFn::constant(c1), f);
                    num.div(&mu_w.sub(&RatFn::constant(1), f), f)?
                }
                None => mu_w.add(&RatFn::constant(c1), f),
            };
            Ok(Some(x_of_w))
        }
        StepKind::ArtinSchreier => {
            // normalized u = b/(x-c) + e or b*x + e
            let u = step.generator();
            let (pole, _) = &step.divisor()[0];
            let p = f.characteristic() as i64;
            let z = w.pow(p, f)?.sub(&w, f);
            match pole.poly() {
                Some(q) => {
                    let c = f.neg(q.coeff(0));
                    let xc = RatFn::poly(q.clone());
                    let b_part = u.mul(&xc, f);
                    // b = (u (x - c)) at x = c
                    let b = b_part.num().eval(c, f);
                    let b = f.div(b, b_part.den().eval(c, f));
                    let e = u.sub(&RatFn::constant(b).div(&xc, f)?, f);
                    if !e.is_constant() {
                        return invalid("reparametrization failed: normalized generator has extra poles");
                    }
                    let e = RatFn::constant(e.num().coeff(0));
                    let x_of_w = RatFn::constant(c).add(&RatFn::constant(b).div(&z.sub(&e, f), f)?, f);
                    Ok(Some(x_of_w))
                }
                None => {
                    let b = u.num().coeff(1);
                    let e = RatFn::constant(u.num().coeff(0));
                    Ok(Some(z.sub(&e, f).mul(&RatFn::constant(f.inv(b).unwrap()), f)))
                }
            }
        }
    }
}

/// Places of F_r(x) above the base place `p` under `t = phi(x)`.
pub fn rational_fiber(phi: &RatFn, p: &Place, r: u32, f: &FiniteField) -> Result<Vec<FiberPlace>> {
    let (a, b) = (phi.num(), phi.den());
    let mut out = Vec::new();
    let mut push = |poly: Poly, e: u32| {
        out.push(FiberPlace { degree: poly.deg() as u32, e, place: Some(Place::Finite { r, poly }) });
    };
    let v_inf_above;
    match p {
        Place::Finite { poly, .. } => {
            let d = poly.deg();
            // homogenization H = sum p_i a^i b^{d-i}
            let mut h = Poly::zero();
            for (i, &c) in poly.coeffs().iter().enumerate() {
                let term = a.pow(i as u64, f).mul(&b.pow((d - i) as u64, f), f).scale(c, f);
                h = h.add(&term, f);
            }
            for (q, e) in factor_poly(&h, f)?.factors {
                push(q, e);
            }
            v_inf_above = (d * b.deg()) as i64 - h.deg() as i64;
        }
        Place::Infinite { .. } => {
            if !b.is_constant() {
                for (q, e) in factor_poly(b, f)?.factors {
                    push(q, e);
                }
            }
            v_inf_above = a.deg() as i64 - b.deg() as i64;
        }
        Place::Prime(_) => return invalid("rational prime in a function-field tower"),
    }
    if v_inf_above > 0 {
        out.push(FiberPlace { degree: 1, e: v_inf_above as u32, place: Some(Place::Infinite { r }) });
    }
    out.sort();
    Ok(out)
}

impl Tower {
    /// The base F_r(t), tracking fibers over `tracked`.
    pub fn new(r: u32, tracked: PlaceSet) -> Result<Tower> {
        field(r)?;
        for p in tracked.places() {
            if p.base() != crate::places::Base::Function(r) {
                return Err(Error::MixedBases);
            }
        }
        let fibers = tracked
            .places()
            .iter()
            .map(|p| (p.clone(), vec![FiberPlace { degree: p.degree(), e: 1, place: Some(p.clone()) }]))
            .collect();
        Ok(Tower {
            r,
            tracked,
            levels: vec![Level {
                spec: None,
                degree: 1,
                genus: 0,
                param: Some(RatFn::poly(Poly::x())),
                local_param: None,
                parameter: Some("t".into()),
                fibers,
            }],
        })
    }

    pub fn from_specs(r: u32, tracked: PlaceSet, specs: &[ExtensionSpec]) -> Result<Tower> {
        let mut t = Tower::new(r, tracked)?;
        for s in specs {
            t = tower_extend(&t, s)?;
        }
        Ok(t)
    }

    pub fn top(&self) -> &Level {
        self.levels.last().unwrap()
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn specs(&self) -> Vec<ExtensionSpec> {
        self.levels.iter().filter_map(|l| l.spec.clone()).collect()
    }

    /// Places of level `i` above the base place `p`.
    pub fn fiber(&self, i: usize, p: &Place) -> Result<Vec<FiberPlace>> {
        let f = field(self.r)?;
        let lvl = self.levels.get(i).ok_or_else(|| Error::Invalid(format!("no level {i}")))?;
        if let Some(phi) = &lvl.param {
            return rational_fiber(phi, p, self.r, &f);
        }
        // top level of positive genus over a rational level
        let below = self.fiber(i - 1, p)?;
        let step = Step::new(lvl.spec.as_ref().unwrap())?;
        let mut out = Vec::new();
        for fp in below {
            let q = fp.place.as_ref().expect("rational level carries places");
            let dt = step.decompose(q)?;
            for _ in 0..dt.g {
                out.push(FiberPlace { degree: fp.degree * dt.f, e: fp.e * dt.e, place: None });
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Adjoin one step at the top of the tower.
pub fn tower_extend(tower: &Tower, spec: &ExtensionSpec) -> Result<Tower> {
    let top_index = tower.height();
    if spec.base_level != top_index {
        return invalid(format!("step sits on level {}, tower top is {top_index}", spec.base_level));
    }
    if spec.r != tower.r {
        return Err(Error::MixedBases);
    }
    let phi = tower
        .top()
        .param
        .clone()
        .ok_or_else(|| Error::Unsupported("extension above a level of positive genus".into()))?;
    let f = field(tower.r)?;
    let step = Step::new(spec)?;
    let genus = step.genus();
    let local_param = reparametrize(&step, &f)?;
    let param = match &local_param {
        Some(x_of_w) => Some(phi.compose(x_of_w, &f)?),
        None => None,
    };
    let mut out = tower.clone();
    out.levels.push(Level {
        spec: Some(spec.clone()),
        degree: tower.top().degree * step.degree() as u64,
        genus,
        parameter: param.as_ref().map(|p| format!("t = {}", p.fmt(&f, "x"))),
        param,
        local_param,
        fibers: BTreeMap::new(),
    });
    let i = out.height();
    let mut fibers = BTreeMap::new();
    for p in out.tracked.places() {
        fibers.insert(p.clone(), out.fiber(i, p)?);
    }
    out.levels[i].fibers = fibers;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceNormCount {
    pub place: Place,
    pub q: u64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiCounts {
    pub level: usize,
    /// Base places of degree up to `d_max` were visited; `phi_q` is complete
    /// for `q = r^m`, `m <= d_max`.
    pub d_max: u32,
    pub phi_q: BTreeMap<u64, u64>,
    pub phi_pq: Vec<PlaceNormCount>,
}

pub fn phi_counts(tower: &Tower, level: usize, d_max: u32) -> Result<PhiCounts> {
    if level > tower.height() {
        return invalid(format!("no level {level}"));
    }
    let r = tower.r as u64;
    let mut phi_q = BTreeMap::new();
    let mut phi_pq = Vec::new();
    for d in 1..=d_max {
        for_each_place(tower.r, d, |p| {
            let mut per_q: BTreeMap<u64, u64> = BTreeMap::new();
            for fp in tower.fiber(level, p)? {
                let q = r.checked_pow(fp.degree).ok_or_else(|| Error::Cap("norm overflows u64".into()))?;
                *per_q.entry(q).or_default() += 1;
                if fp.degree <= d_max {
                    *phi_q.entry(q).or_default() += 1;
                }
            }
            for (q, count) in per_q {
                phi_pq.push(PlaceNormCount { place: p.clone(), q, count });
            }
            Ok(())
        })?;
    }
    Ok(PhiCounts { level, d_max, phi_q, phi_pq })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldCase {
    #[serde(rename = "CF")]
    Cf,
    #[serde(rename = "CN")]
    Cn,
    #[serde(rename = "CN-GRH")]
    CnGrh,
}

impl std::str::FromStr for FieldCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CF" | "cf" => Ok(FieldCase::Cf),
            "CN" | "cn" => Ok(FieldCase::Cn),
            "CN-GRH" | "cn-grh" => Ok(FieldCase::CnGrh),
            _ => Err(Error::Parse(format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceNormPhi {
    pub place: Place,
    pub q: u64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiVector {
    pub case: FieldCase,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    pub phi_q: BTreeMap<u64, f64>,
    #[serde(default)]
    pub phi_pq: Vec<PlaceNormPhi>,
    #[serde(default)]
    pub phi_r: f64,
    #[serde(default)]
    pub phi_c: f64,
    #[serde(default)]
    pub phi_inf: f64,
}

impl PhiVector {
    pub fn function_field(r: u32, phi_q: BTreeMap<u64, f64>) -> Self {
        PhiVector { case: FieldCase::Cf, r: Some(r), phi_q, phi_pq: Vec::new(), phi_r: 0.0, phi_c: 0.0, phi_inf: 0.0 }
    }

    pub fn number_field(case: FieldCase, phi_q: BTreeMap<u64, f64>, phi_r: f64, phi_c: f64) -> Self {
        PhiVector { case, r: None, phi_q, phi_pq: Vec::new(), phi_r, phi_c, phi_inf: 0.0 }
    }
}

/// Finite-level estimates at the top of a tower, normalized by `g` and, when
/// positive, by `g* = g - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiEstimates {
    pub label: String,
    pub level: usize,
    pub degree: u64,
    pub genus: u64,
    pub by_genus: PhiVector,
    pub by_gstar: Option<PhiVector>,
}

fn scaled(counts: &PhiCounts, r: u32, n: u64, g: f64) -> PhiVector {
    let mut v = PhiVector::function_field(r, counts.phi_q.iter().map(|(&q, &c)| (q, c as f64 / g)).collect());
    v.phi_pq = counts
        .phi_pq
        .iter()
        .map(|x| PlaceNormPhi { place: x.place.clone(), q: x.q, phi: x.count as f64 / g })
        .collect();
    v.phi_inf = n as f64 / g;
    v
}

pub fn phi_estimates(tower: &Tower, d_max: u32) -> Result<PhiEstimates> {
    let top = tower.top();
    if top.genus == 0 {
        return Err(Error::RatioUndefined);
    }
    let counts = phi_counts(tower, tower.height(), d_max)?;
    let g = top.genus as f64;
    Ok(PhiEstimates {
        label: "finite-level".into(),
        level: tower.height(),
        degree: top.degree,
        genus: top.genus,
        by_genus: scaled(&counts, tower.r, top.degree, g),
        by_gstar: (top.genus > 1).then(|| scaled(&counts, tower.r, top.degree, g - 1.0)),
    })
}

/// `log sqrt(8 pi) + pi/4 + gamma/2`
pub fn grh_real_constant() -> f64 {
    0.5 * (8.0 * PI).ln() + PI / 4.0 + EULER_GAMMA / 2.0
}

/// `log 8 pi + gamma`
pub fn grh_complex_constant() -> f64 {
    (8.0 * PI).ln() + EULER_GAMMA
}

/// `log 2 sqrt(pi) + gamma/2`
pub fn real_constant() -> f64 {
    (2.0 * PI.sqrt()).ln() + EULER_GAMMA / 2.0
}

/// `log 2 pi + gamma`
pub fn complex_constant() -> f64 {
    (2.0 * PI).ln() + EULER_GAMMA
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub phi: f64,
    pub weight: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub case: FieldCase,
    pub lhs: f64,
    pub defect: f64,
    pub terms: Vec<Term>,
}

impl DefectReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label,phi,weight,contribution\n");
        for t in &self.terms {
            s.push_str(&format!("{},{},{},{}\n", t.label, t.phi, t.weight, t.contribution));
        }
        s
    }
}

fn log_base_r(q: u64, r: u32) -> Option<u32> {
    let mut m = 0;
    let mut x = 1u64;
    while x < q {
        x = x.checked_mul(r as u64)?;
        m += 1;
    }
    (x == q && m > 0).then_some(m)
}

/// Left side of the fundamental inequality and the defect `1 - lhs`.
pub fn fundamental_and_defect(phi: &PhiVector) -> Result<DefectReport> {
    let mut all = phi.phi_q.values().copied().chain([phi.phi_r, phi.phi_c, phi.phi_inf]);
    if all.any(|v| !(v >= 0.0) || !v.is_finite()) {
        return invalid("invariants must be finite and nonnegative");
    }
    let mut terms = Vec::new();
    for (&q, &v) in &phi.phi_q {
        if v == 0.0 {
            continue;
        }
        let qf = q as f64;
        let weight = match phi.case {
            FieldCase::Cf => {
                let r = phi.r.ok_or_else(|| Error::Missing("r".into()))?;
                let m = log_base_r(q, r).ok_or_else(|| Error::Invalid(format!("{q} is not a power of {r}")))?;
                m as f64 / ((r as f64).powf(m as f64 / 2.0) - 1.0)
            }
            FieldCase::CnGrh => qf.ln() / (qf.sqrt() - 1.0),
            FieldCase::Cn => qf.ln() / (qf - 1.0),
        };
        if q < 2 {
            return invalid("norms start at 2");
        }
        terms.push(Term { label: q.to_string(), phi: v, weight, contribution: v * weight });
    }
    match phi.case {
        FieldCase::Cf => {
            if phi.phi_r != 0.0 || phi.phi_c != 0.0 {
                return invalid("function fields have no archimedean places");
            }
        }
        FieldCase::CnGrh | FieldCase::Cn => {
            let (wr, wc) = if phi.case == FieldCase::CnGrh {
                (grh_real_constant(), grh_complex_constant())
            } else {
                (real_constant(), complex_constant())
            };
            terms.push(Term { label: "R".into(), phi: phi.phi_r, weight: wr, contribution: phi.phi_r * wr });
            terms.push(Term { label: "C".into(), phi: phi.phi_c, weight: wc, contribution: phi.phi_c * wc });
        }
    }
    let lhs: f64 = terms.iter().map(|t| t.contribution).sum();
    Ok(DefectReport { case: phi.case, lhs, defect: 1.0 - lhs, terms })
}

/// `prod_{q <= q_cut} (1 - q^{-s})^{-phi_q}`.
pub fn zeta_partial(phi: &PhiVector, s: f64, q_cut: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::OutsideConvergence);
    }
    let log: f64 = phi
        .phi_q
        .iter()
        .filter(|(&q, _)| q <= q_cut)
        .map(|(&q, &v)| -v * (1.0 - (q as f64).powf(-s)).ln())
        .sum();
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> ExtensionSpec {
        s.parse().unwrap()
    }

    fn tracked(r: u32, s: &str) -> PlaceSet {
        let _ = r;
        s.parse().unwrap()
    }

    #[test]
    fn one_kummer_level() {
        let t = Tower::new(7, tracked(7, "t-1@GF(7);t-3@GF(7);t@GF(7)")).unwrap();
        let t = tower_extend(&t, &spec("kummer,3,t,GF(7)")).unwrap();
        assert_eq!((t.top().degree, t.top().genus), (3, 0));
        assert!(t.top().param.is_some());
        let c = phi_counts(&t, 1, 1).unwrap();
        let get = |p: &str, q: u64| {
            let p: Place = p.parse().unwrap();
            c.phi_pq.iter().find(|x| x.place == p && x.q == q).map(|x| x.count).unwrap_or(0)
        };
        assert_eq!(get("t-1@GF(7)", 7), 3);
        assert_eq!(get("t-3@GF(7)", 343), 1);
        assert_eq!(get("t@GF(7)", 7), 1);
        // 2 split places give 6, plus the two ramified ones
        assert_eq!(c.phi_q[&7], 8);
    }

    #[test]
    fn base_counts_match_places() {
        let t = Tower::new(5, PlaceSet::empty()).unwrap();
        let c = phi_counts(&t, 0, 3).unwrap();
        for d in 1..=3u32 {
            let n = crate::places::count_places_degree(5, d).unwrap() as u64;
            assert_eq!(c.phi_q[&5u64.pow(d)], n);
        }
    }

    #[test]
    fn as_levels() {
        let base = Tower::new(3, PlaceSet::empty()).unwrap();
        let t = tower_extend(&base, &spec("as,t^2,GF(3)")).unwrap();
        assert_eq!((t.top().degree, t.top().genus), (3, 1));
        assert!(t.top().param.is_none());
        assert!(matches!(tower_extend(&t, &spec("as,t,GF(3)").at_level(1)), Err(Error::Unsupported(_))));
        let t = tower_extend(&base, &spec("as,t,GF(3)")).unwrap();
        assert_eq!(t.top().genus, 0);
        let t2 = tower_extend(&t, &spec("kummer,2,t,GF(3)").at_level(1)).unwrap();
        assert_eq!(t2.top().degree, 6);
    }

    #[test]
    fn estimates() {
        let t = Tower::from_specs(7, PlaceSet::empty(), &[spec("kummer,3,t(t-1)(t-3),GF(7)")]).unwrap();
        let e = phi_estimates(&t, 1).unwrap();
        assert_eq!(e.genus, 1);
        assert_eq!(e.by_genus.phi_q[&7], 6.0 + 3.0);
        assert!(e.by_gstar.is_none());
        let t0 = Tower::from_specs(7, PlaceSet::empty(), &[spec("kummer,3,t,GF(7)")]).unwrap();
        assert_eq!(phi_estimates(&t0, 1).unwrap_err(), Error::RatioUndefined);
    }

    #[test]
    fn defect_examples() {
        let v = PhiVector::function_field(4, [(4, 1.0)].into());
        let d = fundamental_and_defect(&v).unwrap();
        assert!((d.lhs - 1.0).abs() < 1e-12 && d.defect.abs() < 1e-12);
        let v = PhiVector::function_field(4, BTreeMap::new());
        assert_eq!(fundamental_and_defect(&v).unwrap().defect, 1.0);
        let v = PhiVector::number_field(FieldCase::CnGrh, BTreeMap::new(), 0.1, 0.0);
        assert!((fundamental_and_defect(&v).unwrap().defect - 0.7314).abs() < 1e-4);
        assert!((grh_real_constant() - 2.6861).abs() < 1e-4);
    }

    #[test]
    fn zeta_examples() {
        let v = PhiVector::function_field(4, [(4, 1.0)].into());
        assert!((zeta_partial(&v, 2.0, 100).unwrap() - 16.0 / 15.0).abs() < 1e-12);
        assert_eq!(zeta_partial(&v, 1.0, 100), Err(Error::OutsideConvergence));
        let z = PhiVector::function_field(4, BTreeMap::new());
        assert_eq!(zeta_partial(&z, 3.0, 100).unwrap(), 1.0);
    }

    #[test]
    fn tower_json_round_trip() {
        let t = Tower::from_specs(7, tracked(7, "t-1@GF(7)"), &[spec("kummer,3,t,GF(7)")]).unwrap();
        let j = serde_json::to_string(&t).unwrap();
        let back: Tower = serde_json::from_str(&j).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), j);
    }
}
