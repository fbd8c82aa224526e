//! Cyclic steps of prime degree over a rational function field F_r(x):
//! Kummer `y^l = f` with `l | r-1` and Artin–Schreier `y^p - y = u`.
//!
//! Local behaviour is read off residues. For a Kummer step the residue of
//! `f * pi^{-v}` is an `l`-th power in F_{r^d} iff its norm to F_r is one,
//! which is a resultant. For Artin–Schreier the residue of `u` lies in
//! `x^p - x` of the residue field iff its absolute trace vanishes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::expr::parse_ratfn;
use crate::ffpoly::{factor_poly, residue_norm, residue_trace, Elem, FiniteField, Poly, RatFn};
use crate::places::{enumerate_places, field, irreducible_codes, parse_gf, Place};

/// Normalization passes allowed for an Artin–Schreier generator.
pub const AS_NORMALIZATION_DEPTH: usize = 10;

/// Largest degree accepted by [`decomposition_census`].
pub const CENSUS_MAX_DEGREE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Kummer { ell: u32 },
    ArtinSchreier,
}

/// One cyclic step. `generator` is a rational function of the parameter of
/// the level it sits on (level 0 is F_r(t)).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecRecord", into = "SpecRecord")]
pub struct ExtensionSpec {
    pub kind: StepKind,
    pub r: u32,
    pub generator: RatFn,
    pub base_level: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpecRecord {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    ell: Option<u32>,
    generator: String,
    #[serde(default)]
    base_level: usize,
    field: String,
}

impl TryFrom<SpecRecord> for ExtensionSpec {
    type Error = Error;

    fn try_from(rec: SpecRecord) -> Result<Self> {
        let r = parse_gf(&rec.field)?;
        let kind = match rec.kind.as_str() {
            "kummer" => StepKind::Kummer { ell: rec.ell.ok_or_else(|| Error::Missing("ell".into()))? },
            "artin-schreier" | "as" => StepKind::ArtinSchreier,
            other => return invalid(format!("unknown step kind `{other}`")),
        };
        let f = field(r)?;
        let generator = parse_ratfn(&rec.generator, &f, 't')?;
        Ok(ExtensionSpec { kind, r, generator, base_level: rec.base_level })
    }
}

impl From<ExtensionSpec> for SpecRecord {
    fn from(s: ExtensionSpec) -> SpecRecord {
        let f = field(s.r).expect("spec field is valid");
        let (kind, ell) = match s.kind {
            StepKind::Kummer { ell } => ("kummer", Some(ell)),
            StepKind::ArtinSchreier => ("artin-schreier", None),
        };
        SpecRecord {
            kind: kind.into(),
            ell,
            generator: s.generator.fmt(&f, "t"),
            base_level: s.base_level,
            field: format!("GF({})", s.r),
        }
    }
}

impl ExtensionSpec {
    pub fn kummer(r: u32, ell: u32, generator: &str) -> Result<Self> {
        let f = field(r)?;
        Ok(ExtensionSpec { kind: StepKind::Kummer { ell }, r, generator: parse_ratfn(generator, &f, 't')?, base_level: 0 })
    }

    pub fn artin_schreier(r: u32, generator: &str) -> Result<Self> {
        let f = field(r)?;
        Ok(ExtensionSpec { kind: StepKind::ArtinSchreier, r, generator: parse_ratfn(generator, &f, 't')?, base_level: 0 })
    }

    pub fn at_level(mut self, level: usize) -> Self {
        self.base_level = level;
        self
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            StepKind::Kummer { ell } => ell,
            StepKind::ArtinSchreier => field(self.r).map(|f| f.characteristic()).unwrap_or(0),
        }
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = field(self.r).map_err(|_| fmt::Error)?;
        match self.kind {
            StepKind::Kummer { ell } => write!(out, "kummer,{ell},{},GF({})", self.generator.fmt(&f, "t"), self.r),
            StepKind::ArtinSchreier => write!(out, "as,{},GF({})", self.generator.fmt(&f, "t"), self.r),
        }
    }
}

impl FromStr for ExtensionSpec {
    type Err = Error;

    /// `kummer,l,f,GF(r)` or `as,u,GF(r)`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        match parts.as_slice() {
            ["kummer", ell, g, gf] => {
                let ell = ell.parse().map_err(|_| Error::Parse(format!("bad exponent `{ell}`")))?;
                ExtensionSpec::kummer(parse_gf(gf)?, ell, g)
            }
            ["as" | "artin-schreier", g, gf] => ExtensionSpec::artin_schreier(parse_gf(gf)?, g),
            _ => Err(Error::Parse(format!("bad extension spec `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Behaviour {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecompositionType {
    pub e: u32,
    pub f: u32,
    pub g: u32,
}

impl DecompositionType {
    pub fn behaviour(&self) -> Behaviour {
        if self.e > 1 {
            Behaviour::Ramified
        } else if self.f > 1 {
            Behaviour::Inert
        } else {
            Behaviour::Split
        }
    }

    fn of(b: Behaviour, n: u32) -> Self {
        match b {
            Behaviour::Split => DecompositionType { e: 1, f: 1, g: n },
            Behaviour::Inert => DecompositionType { e: 1, f: n, g: 1 },
            Behaviour::Ramified => DecompositionType { e: n, f: 1, g: 1 },
        }
    }
}

/// A validated step with its generator factored (Kummer) or normalized
/// (Artin–Schreier).
#[derive(Clone, Debug)]
pub struct Step {
    spec: ExtensionSpec,
    f: Arc<FiniteField>,
    gen: RatFn,
    // places where the generator has a zero or pole, with valuation
    divisor: Vec<(Place, i64)>,
}

fn divisor_of(g: &RatFn, r: u32, f: &FiniteField) -> Result<Vec<(Place, i64)>> {
    let mut out = Vec::new();
    for (p, e) in factor_poly(g.num(), f)?.factors {
        out.push((Place::Finite { r, poly: p }, e as i64));
    }
    if !g.den().is_one() {
        for (p, e) in factor_poly(g.den(), f)?.factors {
            out.push((Place::Finite { r, poly: p }, -(e as i64)));
        }
    }
    let vi = g.v_inf();
    if vi != 0 {
        out.push((Place::Infinite { r }, vi));
    }
    out.sort();
    Ok(out)
}

/// Repeatedly subtract `w^p - w` to clear poles of order divisible by `p`.
/// Returns the normalized function and the accumulated `w`.
pub fn normalize_as(u: &RatFn, f: &FiniteField) -> Result<(RatFn, RatFn)> {
    normalize_as_with_depth(u, f, AS_NORMALIZATION_DEPTH)
}

pub fn normalize_as_with_depth(u: &RatFn, f: &FiniteField, depth: usize) -> Result<(RatFn, RatFn)> {
    let p = f.characteristic() as usize;
    let mut u = u.clone();
    let mut w_total = RatFn::constant(0);
    for _ in 0..=depth {
        let mut w = None;
        let m_inf = -u.v_inf();
        if m_inf > 0 && m_inf as usize % p == 0 {
            let c = f.pth_root(u.num().lc());
            w = Some(RatFn::poly(Poly::monomial(c, m_inf as usize / p)));
        } else if !u.den().is_one() {
            for (pl, m) in factor_poly(u.den(), f)?.factors {
                if m as usize % p != 0 {
                    continue;
                }
                // leading Laurent coefficient of u at pl, then its p-th root
                let rest = u.den().quo(&pl.pow(m as u64, f), f);
                let a = u.num().mul_mod(&rest.inv_mod(&pl, f).unwrap(), &pl, f);
                let mut b = a;
                for _ in 1..(f.degree() as usize * pl.deg()) {
                    b = b.pow_mod(p as u128, &pl, f);
                }
                let den = pl.pow((m as usize / p) as u64, f);
                w = Some(RatFn::new(b, den, f)?);
                break;
            }
        }
        match w {
            None => return Ok((u, w_total)),
            Some(w) => {
                u = u.sub(&w.wp(f), f);
                w_total = w_total.add(&w, f);
            }
        }
    }
    Err(Error::Unnormalized)
}

impl Step {
    pub fn new(spec: &ExtensionSpec) -> Result<Step> {
        let f = field(spec.r)?;
        let r = spec.r;
        if spec.generator.is_zero() {
            return Err(Error::ZeroInput);
        }
        if spec.generator.is_constant() {
            return Err(Error::ConstantField);
        }
        match spec.kind {
            StepKind::Kummer { ell } => {
                if !arith::is_prime(ell as u64) {
                    return invalid(format!("{ell} is not prime"));
                }
                if (r - 1) % ell != 0 {
                    return Err(Error::Unsupported(format!(
                        "Kummer step of degree {ell} needs {ell} | r-1 = {}",
                        r - 1
                    )));
                }
                let divisor = divisor_of(&spec.generator, r, &f)?;
                if divisor.iter().all(|(_, v)| v % ell as i64 == 0) {
                    // f = c * h^l: trivial or a constant field extension
                    return if f.is_power_residue(spec.generator.num().lc(), ell as u64)? {
                        invalid(format!("generator is an {ell}-th power"))
                    } else {
                        Err(Error::ConstantField)
                    };
                }
                Ok(Step { spec: spec.clone(), f, gen: spec.generator.clone(), divisor })
            }
            StepKind::ArtinSchreier => {
                let (u, _) = normalize_as(&spec.generator, &f)?;
                if u.is_constant() {
                    return if f.absolute_trace(u.num().lc()) == 0 {
                        invalid("generator lies in x^p - x of the field")
                    } else {
                        Err(Error::ConstantField)
                    };
                }
                let divisor = divisor_of(&u, r, &f)?.into_iter().filter(|(_, v)| *v < 0).collect();
                Ok(Step { spec: spec.clone(), f, gen: u, divisor })
            }
        }
    }

    pub fn spec(&self) -> &ExtensionSpec {
        &self.spec
    }

    pub fn field(&self) -> &FiniteField {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree()
    }

    /// Generator after normalization (Artin–Schreier) or as given (Kummer).
    pub fn generator(&self) -> &RatFn {
        &self.gen
    }

    /// Places with nonzero valuation (Kummer) or poles (Artin–Schreier).
    pub fn divisor(&self) -> &[(Place, i64)] {
        &self.divisor
    }

    fn valuation(&self, pl: &Place) -> i64 {
        self.divisor.iter().find(|(q, _)| q == pl).map(|(_, v)| *v).unwrap_or(0)
    }

    fn check_place(&self, pl: &Place) -> Result<()> {
        match pl {
            Place::Finite { r, .. } | Place::Infinite { r } if *r == self.spec.r => Ok(()),
            _ => invalid(format!("{pl} is not a place of GF({})(t)", self.spec.r)),
        }
    }

    /// Ramified places, with the ramification exponent of the local
    /// different contribution (`(e-1)` tame, `m+1` Artin–Schreier pole order).
    pub fn ramified(&self) -> Vec<(Place, i64)> {
        match self.spec.kind {
            StepKind::Kummer { ell } => {
                self.divisor.iter().filter(|(_, v)| v % ell as i64 != 0).map(|(p, _)| (p.clone(), 1)).collect()
            }
            StepKind::ArtinSchreier => self.divisor.iter().map(|(p, v)| (p.clone(), -v)).collect(),
        }
    }

    // residue of the unit part at an unramified place, reduced to F_r
    // (norm for Kummer, trace for Artin–Schreier)
    fn reduced_residue(&self, pl: &Place) -> Elem {
        let f = &*self.f;
        match (self.spec.kind, pl) {
            (StepKind::Kummer { .. }, Place::Infinite { .. }) => self.gen.num().lc(),
            (StepKind::Kummer { .. }, Place::Finite { poly, .. }) => {
                let (_, n) = self.gen.num().split_off(poly, f);
                let (_, d) = self.gen.den().split_off(poly, f);
                f.div(residue_norm(poly, &n, f), residue_norm(poly, &d, f))
            }
            (StepKind::ArtinSchreier, Place::Infinite { .. }) => {
                if self.gen.v_inf() == 0 {
                    self.gen.num().lc()
                } else {
                    0
                }
            }
            (StepKind::ArtinSchreier, Place::Finite { poly, .. }) => {
                let c = self.gen.num().mul_mod(&self.gen.den().inv_mod(poly, f).unwrap(), poly, f);
                residue_trace(poly, &c, f)
            }
            (_, Place::Prime(_)) => unreachable!(),
        }
    }

    pub fn decompose(&self, pl: &Place) -> Result<DecompositionType> {
        self.check_place(pl)?;
        let n = self.degree();
        let f = &*self.f;
        let b = match self.spec.kind {
            StepKind::Kummer { ell } => {
                if self.valuation(pl) % ell as i64 != 0 {
                    Behaviour::Ramified
                } else if f.is_power_residue(self.reduced_residue(pl), ell as u64)? {
                    Behaviour::Split
                } else {
                    Behaviour::Inert
                }
            }
            StepKind::ArtinSchreier => {
                if self.valuation(pl) < 0 {
                    Behaviour::Ramified
                } else if f.absolute_trace(self.reduced_residue(pl)) == 0 {
                    Behaviour::Split
                } else {
                    Behaviour::Inert
                }
            }
        };
        Ok(DecompositionType::of(b, n))
    }

    /// Frobenius at an unramified place as an element of Z/n: the exponent of
    /// the power-residue symbol against `primitive^{(r-1)/l}` (Kummer) or the
    /// absolute trace of the residue (Artin–Schreier). `None` when ramified.
    pub fn frobenius_class(&self, pl: &Place) -> Result<Option<u32>> {
        if self.decompose(pl)?.e > 1 {
            return Ok(None);
        }
        let f = &*self.f;
        Ok(Some(match self.spec.kind {
            StepKind::Kummer { ell } => {
                let n = (self.spec.r - 1) / ell;
                let sym = f.pow(self.reduced_residue(pl), n as u64);
                let zeta = f.pow(f.primitive(), n as u64);
                (0..ell).find(|&k| f.pow(zeta, k as u64) == sym).expect("symbol is a root of unity")
            }
            StepKind::ArtinSchreier => f.absolute_trace(self.reduced_residue(pl)),
        }))
    }

    /// Exact genus when the base level is rational.
    pub fn genus(&self) -> u64 {
        let n = self.degree() as i64;
        let g = match self.spec.kind {
            StepKind::Kummer { .. } => {
                // 2g' - 2 = -2n + sum (n-1) deg p
                let ram: i64 = self.ramified().iter().map(|(p, _)| p.degree() as i64).sum();
                (-2 * n + (n - 1) * ram + 2) / 2
            }
            StepKind::ArtinSchreier => {
                let s: i64 = self.divisor.iter().map(|(p, v)| (1 - v) * p.degree() as i64).sum();
                (n - 1) * (s - 2) / 2
            }
        };
        g as u64
    }
}

pub fn decompose_place(spec: &ExtensionSpec, pl: &Place) -> Result<DecompositionType> {
    Step::new(spec)?.decompose(pl)
}

/// Genus of the step over a rational base, by Riemann–Hurwitz.
pub fn exact_genus(spec: &ExtensionSpec) -> Result<u64> {
    Ok(Step::new(spec)?.genus())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub split: u64,
    pub inert: u64,
    pub ramified: u64,
}

impl CensusRow {
    pub fn total(&self) -> u64 {
        self.split + self.inert + self.ramified
    }

    fn bump(&mut self, b: Behaviour) {
        match b {
            Behaviour::Split => self.split += 1,
            Behaviour::Inert => self.inert += 1,
            Behaviour::Ramified => self.ramified += 1,
        }
    }
}

/// Visit every place of degree `d` of the base of `step`.
pub fn for_each_place(r: u32, d: u32, mut visit: impl FnMut(&Place) -> Result<()>) -> Result<()> {
    for c in irreducible_codes(r, d)? {
        visit(&Place::Finite { r, poly: Poly::from_code(c as u128, d as usize, r) })?;
    }
    if d == 1 {
        visit(&Place::Infinite { r })?;
    }
    Ok(())
}

/// Split/inert/ramified counts of base places of each degree `1..=d_max`.
pub fn decomposition_census(spec: &ExtensionSpec, d_max: u32) -> Result<BTreeMap<u32, CensusRow>> {
    if d_max > CENSUS_MAX_DEGREE {
        return Err(Error::Cap(format!("census degree {d_max} above {CENSUS_MAX_DEGREE}")));
    }
    let step = Step::new(spec)?;
    let mut out = BTreeMap::new();
    for d in 1..=d_max {
        out.insert(d, census_row(&step, d)?);
    }
    Ok(out)
}

/// Census of the base places of degree exactly `d`.
pub fn census_row(step: &Step, d: u32) -> Result<CensusRow> {
    if d > CENSUS_MAX_DEGREE {
        return Err(Error::Cap(format!("census degree {d} above {CENSUS_MAX_DEGREE}")));
    }
    let mut row = CensusRow::default();
    for_each_place(step.spec().r, d, |pl| {
        row.bump(step.decompose(pl)?.behaviour());
        Ok(())
    })?;
    Ok(row)
}

/// Places of degree `d` of F_r(t), with ∞.
pub fn base_places(r: u32, d: u32) -> Result<Vec<Place>> {
    enumerate_places(r, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(s: &str) -> Place {
        s.parse().unwrap()
    }

    #[test]
    fn kummer_examples() {
        let s = ExtensionSpec::kummer(7, 3, "t").unwrap();
        assert_eq!(decompose_place(&s, &pl("t-1@GF(7)")).unwrap().behaviour(), Behaviour::Split);
        assert_eq!(decompose_place(&s, &pl("t@GF(7)")).unwrap().behaviour(), Behaviour::Ramified);
        assert_eq!(decompose_place(&s, &pl("t-3@GF(7)")).unwrap().behaviour(), Behaviour::Inert);
        assert_eq!(decompose_place(&s, &pl("inf@GF(7)")).unwrap().behaviour(), Behaviour::Ramified);
        assert_eq!(exact_genus(&s).unwrap(), 0);
        let s = ExtensionSpec::kummer(7, 3, "t(t-1)(t-3)").unwrap();
        assert_eq!(exact_genus(&s).unwrap(), 1);
        assert_eq!(decompose_place(&s, &pl("inf@GF(7)")).unwrap().behaviour(), Behaviour::Split);
    }

    #[test]
    fn as_examples() {
        let s = ExtensionSpec::artin_schreier(3, "t").unwrap();
        assert_eq!(decompose_place(&s, &pl("t@GF(3)")).unwrap().behaviour(), Behaviour::Split);
        assert_eq!(decompose_place(&s, &pl("t-1@GF(3)")).unwrap().behaviour(), Behaviour::Inert);
        assert_eq!(decompose_place(&s, &pl("inf@GF(3)")).unwrap().behaviour(), Behaviour::Ramified);
        assert_eq!(exact_genus(&s).unwrap(), 0);
        let s = ExtensionSpec::artin_schreier(3, "t^2").unwrap();
        assert_eq!(exact_genus(&s).unwrap(), 1);
    }

    #[test]
    fn census_examples() {
        let s = ExtensionSpec::kummer(7, 3, "t").unwrap();
        let c = decomposition_census(&s, 1).unwrap();
        assert_eq!(c[&1], CensusRow { split: 2, inert: 4, ramified: 2 });
        let s = ExtensionSpec::artin_schreier(3, "t").unwrap();
        let c = decomposition_census(&s, 1).unwrap();
        assert_eq!(c[&1], CensusRow { split: 1, inert: 2, ramified: 1 });
        assert!(decomposition_census(&s, CENSUS_MAX_DEGREE + 1).is_err());
    }

    #[test]
    fn normalization() {
        let f = field(3).unwrap();
        // t^9 + t^3 + 1/(t^3): every pole order divisible by 3
        let u = parse_ratfn("t^9+t^3+1/t^3", &f, 't').unwrap();
        let (v, w) = normalize_as(&u, &f).unwrap();
        assert_eq!(u.sub(&v, &f), w.wp(&f));
        let s = ExtensionSpec { kind: StepKind::ArtinSchreier, r: 3, generator: u, base_level: 0 };
        let st = Step::new(&s).unwrap();
        let orders: Vec<i64> = st.divisor().iter().map(|(_, v)| -v).collect();
        assert!(orders.iter().all(|m| m % 3 != 0));
        // t^27 needs three passes
        let deep = parse_ratfn("t^27", &f, 't').unwrap();
        assert_eq!(normalize_as_with_depth(&deep, &f, 2).unwrap_err(), Error::Unnormalized);
        assert_eq!(normalize_as_with_depth(&deep, &f, 3).unwrap().0, RatFn::poly(Poly::x()));
    }

    #[test]
    fn rejections() {
        assert_eq!(Step::new(&ExtensionSpec::kummer(7, 3, "3").unwrap()).unwrap_err(), Error::ConstantField);
        assert_eq!(Step::new(&ExtensionSpec::kummer(7, 3, "3t^3").unwrap()).unwrap_err(), Error::ConstantField);
        assert!(Step::new(&ExtensionSpec::kummer(7, 3, "t^3").unwrap()).is_err());
        assert!(matches!(Step::new(&ExtensionSpec::kummer(7, 5, "t").unwrap()), Err(Error::Unsupported(_))));
        assert_eq!(Step::new(&ExtensionSpec::artin_schreier(3, "1").unwrap()).unwrap_err(), Error::ConstantField);
        // t^3 - t + 1 normalizes to the constant 1, trace 1
        assert_eq!(Step::new(&ExtensionSpec::artin_schreier(3, "t^3-t+1").unwrap()).unwrap_err(), Error::ConstantField);
    }

    #[test]
    fn spec_round_trips() {
        let s: ExtensionSpec = "kummer,3,t(t-1),GF(7)".parse().unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: ExtensionSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        let s: ExtensionSpec = "as,t^2,GF(3)".parse().unwrap();
        assert_eq!(s.to_string().parse::<ExtensionSpec>().unwrap(), s);
    }
}
