//! Verified witness searches over F_r(t): Artin–Schreier and Kummer
//! generators with prescribed local behaviour, Kummer groups `V_S^T` and
//! annihilating sets, and towers with prescribed norms above finitely many
//! places.
//!
//! Every search runs in a fixed order, stops at the caps in [`SearchCaps`]
//! and re-checks its witness with [`Step::decompose`] before returning it.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::extensions::{Behaviour, DecompositionType, ExtensionSpec, Step, StepKind};
use crate::ffpoly::{residue_norm, residue_trace, Elem, FiniteField, Poly, RatFn};
use crate::places::{enumerate_places, field, Base, Place, PlaceSet};
use crate::towers::{rational_fiber, tower_extend, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchCaps {
    /// Largest Kummer generator degree tried.
    pub generator_degree: u32,
    /// Largest place degree tried for auxiliary and annihilating places.
    pub place_degree: u32,
    /// Candidates examined before giving up.
    pub candidates: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { generator_degree: 8, place_degree: 8, candidates: 2_000_000 }
    }
}

/// Local conditions: `split` places must split completely, `inert` places
/// must be inert. `allowed_ramification = None` lets the search pick the
/// ramified places itself.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalPlan {
    #[serde(default)]
    pub split: PlaceSet,
    #[serde(default)]
    pub inert: PlaceSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_ramification: Option<PlaceSet>,
}

impl LocalPlan {
    pub fn new(split: PlaceSet, inert: PlaceSet) -> LocalPlan {
        LocalPlan { split, inert, allowed_ramification: None }
    }

    pub fn validate(&self, r: u32) -> Result<()> {
        if !self.split.is_disjoint(&self.inert) {
            return invalid("split and inert places overlap");
        }
        let sets = [Some(&self.split), Some(&self.inert), self.allowed_ramification.as_ref()];
        for s in sets.into_iter().flatten() {
            if s.places().iter().any(|p| p.base() != Base::Function(r)) {
                return Err(Error::MixedBases);
            }
        }
        Ok(())
    }

    fn expectations(&self) -> Vec<(Place, Behaviour)> {
        let s = self.split.places().iter().map(|p| (p.clone(), Behaviour::Split));
        let i = self.inert.places().iter().map(|p| (p.clone(), Behaviour::Inert));
        s.chain(i).collect()
    }

    fn contains(&self, p: &Place) -> bool {
        self.split.contains(p) || self.inert.contains(p)
    }
}

/// One line of a verification transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub place: Place,
    pub expected: Behaviour,
    pub observed: DecompositionType,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub spec: ExtensionSpec,
    pub generator: String,
    /// Ramified places of the step.
    pub ramified: Vec<Place>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pole_order: Option<u32>,
    pub candidates: u64,
    pub transcript: Vec<Check>,
}

fn verify(step: &Step, expect: &[(Place, Behaviour)]) -> Result<Vec<Check>> {
    expect
        .iter()
        .map(|(p, b)| {
            let observed = step.decompose(p)?;
            Ok(Check { place: p.clone(), expected: *b, observed, ok: observed.behaviour() == *b })
        })
        .collect()
}

fn witness(step: &Step, candidates: u64, pole_order: Option<u32>, transcript: Vec<Check>) -> Witness {
    Witness {
        spec: step.spec().clone(),
        generator: step.spec().generator.fmt(step.field(), "t"),
        ramified: step.ramified().into_iter().map(|(p, _)| p).collect(),
        pole_order,
        candidates,
        transcript,
    }
}

fn rpow(r: u32, d: u32) -> u128 {
    (r as u128).pow(d)
}

// the polynomial of degree `d` with leading coefficient `lc` whose lower
// coefficients, read top-down, are the base-r digits of `code`
fn poly_at(code: u128, d: usize, lc: Elem, r: u32) -> Poly {
    let mut c = Poly::from_code(code, d, r).coeffs().to_vec();
    c[d] = lc;
    Poly::new(c)
}

/// Nonzero polynomials of degree `d`, in polynomial order.
fn polys_of_degree(d: usize, r: u32) -> impl Iterator<Item = Poly> {
    let n = rpow(r, d as u32);
    (1..r).flat_map(move |lc| (0..n).map(move |code| poly_at(code, d, lc, r)))
}

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::SearchExhausted)
        } else {
            Ok(())
        }
    }
}

/// Artin–Schreier generator `u` with `y^p - y = u` split at `plan.split`,
/// inert at `plan.inert`, and a single pole of order prime to `p` at an
/// auxiliary place.
///
/// Auxiliary places are tried with `inf` first, then finite places by
/// degree up to `4 log_r(8 + |T u I|)` (at least 1). Pole orders run up to
/// `max(1, |T| + |I|)`; numerators in polynomial order.
pub fn find_as_generator(plan: &LocalPlan, r: u32, caps: &SearchCaps) -> Result<Witness> {
    plan.validate(r)?;
    let f = field(r)?;
    let p = f.characteristic();
    let expect = plan.expectations();
    if expect.iter().any(|(q, _)| q.is_infinite()) {
        return invalid("plan places must be finite");
    }
    let n_plan = expect.len() as u32;
    let budget = n_plan.max(1);
    let window = ((4.0 * (8.0 + n_plan as f64).ln() / (r as f64).ln()).floor() as u32).clamp(1, caps.place_degree);

    let mut aux: Vec<Place> = vec![Place::Infinite { r }];
    let mut search = Budget { used: 0, cap: caps.candidates };
    let mut d = 0;
    loop {
        // lazily extend the auxiliary list one degree at a time
        let mut next = Vec::new();
        for q in aux.drain(..) {
            let allowed = plan.allowed_ramification.as_ref().map_or(true, |a| a.contains(&q));
            if allowed && !plan.contains(&q) {
                next.push(q);
            }
        }
        for q in &next {
            for m in (1..=budget).filter(|m| m % p != 0) {
                if let Some(w) = as_at(q, m, &expect, &f, r, &mut search)? {
                    return Ok(w);
                }
            }
        }
        d += 1;
        if d > window {
            return Err(Error::SearchExhausted);
        }
        aux = enumerate_places(r, d)?.into_iter().filter(|q| !q.is_infinite()).collect();
    }
}

fn as_at(
    q: &Place,
    m: u32,
    expect: &[(Place, Behaviour)],
    f: &FiniteField,
    r: u32,
    search: &mut Budget,
) -> Result<Option<Witness>> {
    let moduli: Vec<(&Poly, bool)> = expect.iter().map(|(p, b)| (p.poly().unwrap(), *b == Behaviour::Split)).collect();
    let (den, max_deg) = match q.poly() {
        None => (Poly::one(), m as usize),
        Some(qp) => (qp.pow(m as u64, f), m as usize * qp.deg()),
    };
    let inv: Vec<Poly> = moduli.iter().map(|(pm, _)| den.inv_mod(pm, f).unwrap()).collect();
    let degrees: Vec<usize> = match q.poly() {
        None => vec![m as usize],
        Some(_) => (0..=max_deg).collect(),
    };
    for d in degrees {
        for a in polys_of_degree(d, r) {
            if let Some(qp) = q.poly() {
                if qp.divides(&a, f) {
                    continue;
                }
            }
            search.tick()?;
            let good = moduli.iter().zip(&inv).all(|((pm, split), iv)| {
                let res = a.mul_mod(iv, pm, f);
                (f.absolute_trace(residue_trace(pm, &res, f)) == 0) == *split
            });
            if !good {
                continue;
            }
            let u = RatFn::new(a, den.clone(), f)?;
            let spec = ExtensionSpec { kind: StepKind::ArtinSchreier, r, generator: u, base_level: 0 };
            let step = match Step::new(&spec) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let mut exp = expect.to_vec();
            exp.push((q.clone(), Behaviour::Ramified));
            let transcript = verify(&step, &exp)?;
            if transcript.iter().all(|c| c.ok) && step.ramified().len() == 1 {
                return Ok(Some(witness(&step, search.used, Some(m), transcript)));
            }
        }
    }
    Ok(None)
}

// Is `g` an l-th power residue at `pl`? `None` when l does not divide v_pl(g).
fn kummer_symbol(g: &RatFn, pl: &Place, ell: u32, f: &FiniteField) -> Result<Option<bool>> {
    let (v, res) = match pl {
        Place::Infinite { .. } => (g.v_inf(), f.div(g.num().lc(), g.den().lc())),
        Place::Finite { poly, .. } => {
            let (vn, n) = g.num().split_off(poly, f);
            let (vd, d) = g.den().split_off(poly, f);
            (vn as i64 - vd as i64, f.div(residue_norm(poly, &n, f), residue_norm(poly, &d, f)))
        }
        Place::Prime(_) => return invalid("rational prime in a function-field plan"),
    };
    if v % ell as i64 != 0 {
        return Ok(None);
    }
    Ok(Some(f.is_power_residue(res, ell as u64)?))
}

fn check_ell(ell: u32, r: u32) -> Result<()> {
    if !arith::is_prime(ell as u64) {
        return invalid(format!("{ell} is not prime"));
    }
    if (r - 1) % ell != 0 {
        return Err(Error::Unsupported(format!(
            "Kummer steps of degree {ell} over GF({r}) need {ell} | r-1; other primes need roots of unity"
        )));
    }
    Ok(())
}

// First candidate meeting `expect` by the residue test and then by
// decomposition. Ramification must avoid the plan and stay in `allowed`.
fn kummer_search(
    candidates: impl Iterator<Item = RatFn>,
    expect: &[(Place, Behaviour)],
    allowed: Option<&PlaceSet>,
    ell: u32,
    r: u32,
    base_level: usize,
    search: &mut Budget,
) -> Result<Option<Witness>> {
    let f = field(r)?;
    'cand: for g in candidates {
        search.tick()?;
        for (p, b) in expect {
            let want = *b == Behaviour::Split;
            if kummer_symbol(&g, p, ell, &f)? != Some(want) {
                continue 'cand;
            }
        }
        let spec = ExtensionSpec { kind: StepKind::Kummer { ell }, r, generator: g, base_level };
        let step = match Step::new(&spec) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if let Some(a) = allowed {
            if step.ramified().iter().any(|(p, _)| !a.contains(p)) {
                continue;
            }
        }
        let transcript = verify(&step, expect)?;
        if transcript.iter().all(|c| c.ok) {
            return Ok(Some(witness(&step, search.used, None, transcript)));
        }
    }
    Ok(None)
}

fn general_candidates(r: u32, max_deg: u32) -> impl Iterator<Item = RatFn> {
    (1..=max_deg as usize).flat_map(move |d| polys_of_degree(d, r)).map(RatFn::poly)
}

/// Kummer generator `f` (a polynomial) for `y^l = f` split at `plan.split`
/// and inert at `plan.inert`. Candidates are nonconstant polynomials in
/// polynomial order up to `caps.generator_degree`; ramification lands on the
/// roots of `f` and possibly `inf`.
pub fn find_kummer_generator(plan: &LocalPlan, ell: u32, r: u32, caps: &SearchCaps) -> Result<Witness> {
    plan.validate(r)?;
    check_ell(ell, r)?;
    let mut search = Budget { used: 0, cap: caps.candidates };
    let expect = plan.expectations();
    let cands = general_candidates(r, caps.generator_degree);
    kummer_search(cands, &expect, plan.allowed_ramification.as_ref(), ell, r, 0, &mut search)?
        .ok_or(Error::SearchExhausted)
}

// Generators of genus-0 Kummer steps whose ramification sits at two
// rational places: c(x-a) and c(x-a)/(x-b), c over F_r^x / l-th powers.
fn genus_zero_candidates(ell: u32, f: &FiniteField) -> Vec<RatFn> {
    let r = f.order();
    let g = f.primitive();
    let reps: Vec<Elem> = (0..ell).map(|k| f.pow(g, k as u64)).collect();
    let mut out = Vec::new();
    for b in std::iter::once(None).chain((0..r).map(Some)) {
        for &c in &reps {
            for a in (0..r).filter(|&a| Some(a) != b) {
                let num = RatFn::poly(Poly::linear(a, f).scale(c, f));
                out.push(match b {
                    None => num,
                    Some(b) => num.div(&RatFn::poly(Poly::linear(b, f)), f).unwrap(),
                });
            }
        }
    }
    out
}

/// A basis of the Kummer group `V_S^T` of F_r(t) modulo l-th powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VGroup {
    pub ell: u32,
    pub dim: usize,
    pub basis: Vec<String>,
    /// Coordinates of each basis element: exponent of the primitive
    /// constant, then of each finite place of `T`.
    pub vectors: Vec<Vec<u32>>,
    pub coordinates: Vec<String>,
}

// RREF over F_l; returns the kernel basis.
fn kernel_mod(rows: &[Vec<u64>], ncols: usize, ell: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % ell).collect()).collect();
    let inv = |a: u64| arith_pow(a, ell - 2, ell);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(row, pr);
        let s = inv(m[row][col]);
        for x in m[row].iter_mut() {
            *x = *x * s % ell;
        }
        for i in 0..m.len() {
            if i != row && m[i][col] != 0 {
                let c = m[i][col];
                for j in 0..ncols {
                    m[i][j] = (m[i][j] + (ell - c) * m[row][j]) % ell;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; ncols];
        v[free] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = (ell - m[i][free]) % ell;
        }
        out.push(v);
    }
    out
}

fn arith_pow(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    acc
}

/// `V_S^T`: elements that are l-th powers at every place of `S` and units
/// times l-th powers outside `T`, modulo l-th powers. Needs `T` nonempty and
/// `l | r - 1`.
pub fn v_group_basis(s: &PlaceSet, t: &PlaceSet, ell: u32, r: u32) -> Result<VGroup> {
    if t.is_empty() {
        return Err(Error::Preconditions);
    }
    check_ell(ell, r)?;
    let f = field(r)?;
    for p in s.places().iter().chain(t.places()) {
        if p.base() != Base::Function(r) {
            return Err(Error::MixedBases);
        }
    }
    let l = ell as u64;
    let tfin: Vec<&Poly> = t.places().iter().filter_map(|p| p.poly()).collect();
    let ncols = 1 + tfin.len();
    let inf = Place::Infinite { r };
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let deg_row = || std::iter::once(0).chain(tfin.iter().map(|p| p.deg() as u64)).collect::<Vec<_>>();
    if !t.contains(&inf) {
        rows.push(deg_row());
    }
    let dlog = |x: Elem| -> u64 { f.log(x).expect("nonzero residue") as u64 };
    for q in s.places() {
        match q.poly() {
            None => {
                if t.contains(&inf) {
                    rows.push(deg_row());
                }
                let mut row = vec![0; ncols];
                row[0] = 1;
                rows.push(row);
            }
            Some(qp) => {
                let mut val = vec![0; ncols];
                let mut res = vec![0; ncols];
                res[0] = qp.deg() as u64;
                for (j, p) in tfin.iter().enumerate() {
                    if *p == qp {
                        val[j + 1] = 1;
                    } else {
                        res[j + 1] = dlog(residue_norm(qp, p, &f));
                    }
                }
                if val.iter().any(|&x| x != 0) {
                    rows.push(val);
                }
                rows.push(res);
            }
        }
    }
    let ker = kernel_mod(&rows, ncols, l);
    let g = f.primitive();
    let mut coordinates = vec![f.fmt_elem(g)];
    coordinates.extend(tfin.iter().map(|p| f.fmt_poly(p, "t")));
    let basis = ker
        .iter()
        .map(|v| {
            let mut e = RatFn::constant(f.pow(g, v[0]));
            for (p, &k) in tfin.iter().zip(&v[1..]) {
                e = e.mul(&RatFn::poly(p.pow(k, &f)), &f);
            }
            e.fmt(&f, "t")
        })
        .collect();
    Ok(VGroup {
        ell,
        dim: ker.len(),
        basis,
        vectors: ker.iter().map(|v| v.iter().map(|&x| x as u32).collect()).collect(),
        coordinates,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QAnnihilators {
    #[serde(rename = "Q")]
    pub q: PlaceSet,
    /// Dimension of `V_empty^P`.
    pub dim_v: usize,
    /// `dim V^P_{Q - {q}}` for each `q`, all zero.
    pub removal_checks: Vec<(Place, usize)>,
}

fn v_dim(s: &[Place], t: &PlaceSet, ell: u32, r: u32) -> Result<usize> {
    Ok(v_group_basis(&PlaceSet::new(s.to_vec())?, t, ell, r)?.dim)
}

/// Finite places `Q` outside `P` with `Nq = 1 mod l` such that
/// `V^P_{Q - {q}} = 0` for every `q` in `Q`.
///
/// Two disjoint killing sets are chosen greedily from places ordered by
/// degree, then lexicographically; their union is pruned from the back
/// while the removal property survives.
#[allow(non_snake_case)]
pub fn find_Q_annihilators(p: &PlaceSet, ell: u32, r: u32, caps: &SearchCaps) -> Result<QAnnihilators> {
    let dim_v = v_dim(&[], p, ell, r)?;
    if dim_v == 0 {
        return Ok(QAnnihilators { q: PlaceSet::empty(), dim_v, removal_checks: Vec::new() });
    }
    let mut chosen: Vec<Place> = Vec::new();
    let mut half: Vec<Place> = Vec::new();
    let mut halves = 0;
    'outer: for d in 1..=caps.place_degree {
        if (rpow(r, d) - 1) % ell as u128 != 0 {
            continue;
        }
        // two passes over each degree: the second half may reuse places
        // the first half skipped
        let places: Vec<Place> =
            enumerate_places(r, d)?.into_iter().filter(|q| !q.is_infinite() && !p.contains(q)).collect();
        let mut pass = 0;
        while pass < 2 {
            let mut cur = v_dim(&half, p, ell, r)?;
            for q in &places {
                if chosen.contains(q) || half.contains(q) {
                    continue;
                }
                let mut trial = half.clone();
                trial.push(q.clone());
                let dim = v_dim(&trial, p, ell, r)?;
                if dim < cur {
                    half = trial;
                    cur = dim;
                }
                if cur == 0 {
                    chosen.append(&mut half);
                    halves += 1;
                    if halves == 2 {
                        break 'outer;
                    }
                    cur = v_dim(&[], p, ell, r)?;
                }
            }
            pass += 1;
        }
    }
    if halves < 2 {
        return Err(Error::SearchExhausted);
    }
    let removal_ok = |set: &[Place]| -> Result<bool> {
        for i in 0..set.len() {
            let rest: Vec<Place> = set.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            if v_dim(&rest, p, ell, r)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut i = chosen.len();
    while i > 0 {
        i -= 1;
        let mut trial = chosen.clone();
        trial.remove(i);
        if removal_ok(&trial)? {
            chosen = trial;
        }
    }
    let q = PlaceSet::new(chosen)?;
    let mut removal_checks = Vec::new();
    for x in q.places() {
        let rest: Vec<Place> = q.places().iter().filter(|y| *y != x).cloned().collect();
        removal_checks.push((x.clone(), v_dim(&rest, p, ell, r)?));
    }
    Ok(QAnnihilators { q, dim_v, removal_checks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceGroup {
    pub place: Place,
    pub n: u32,
    pub degrees: Vec<u32>,
}

/// Prescribed fiber shapes: above `place`, `n` groups of places with
/// residue degrees `degrees`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerPlan {
    pub r: u32,
    #[serde(rename = "P", default)]
    pub p: Vec<Place>,
    #[serde(default)]
    pub groups: Vec<PlaceGroup>,
}

impl TowerPlan {
    /// `lcm(n_i)`.
    pub fn n2(&self) -> u64 {
        self.groups.iter().fold(1, |a, g| arith::lcm(a, g.n as u64))
    }

    /// `lcm(d_ij)`.
    pub fn n1(&self) -> u64 {
        self.groups.iter().flat_map(|g| &g.degrees).fold(1, |a, &d| arith::lcm(a, d as u64))
    }

    pub fn n(&self) -> u64 {
        self.n1() * self.n2()
    }

    pub fn validate(&self) -> Result<()> {
        field(self.r)?;
        let mut seen = Vec::new();
        for g in &self.groups {
            if g.place.base() != Base::Function(self.r) {
                return Err(Error::MixedBases);
            }
            if seen.contains(&g.place) {
                return invalid(format!("{} appears twice", g.place));
            }
            seen.push(g.place.clone());
            if g.n == 0 || g.degrees.len() != g.n as usize {
                return invalid(format!("{}: n = {} but {} degrees", g.place, g.n, g.degrees.len()));
            }
            let mut d = g.degrees.clone();
            d.sort();
            d.dedup();
            if d.len() != g.degrees.len() || d[0] == 0 {
                return invalid(format!("{}: degrees must be distinct and positive", g.place));
            }
        }
        if !self.p.is_empty() {
            let mut a = self.p.clone();
            a.sort();
            seen.sort();
            if a != seen {
                return invalid("P does not match the group places");
            }
        }
        let n = self.n();
        if arith::gcd(n, self.r as u64) != 1 {
            return invalid(format!("N = {n} is not prime to r = {}", self.r));
        }
        for (ell, _) in arith::factorize(n) {
            if (self.r as u64 - 1) % ell != 0 {
                return Err(Error::Unsupported(format!(
                    "prime {ell} of N needs {ell} | r-1 over GF({})",
                    self.r
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Split,
    Inert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub stage: Stage,
    pub ell: u32,
    /// `p^t` handled by an inertia step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prime_power: Option<u64>,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub place: Place,
    pub n: u32,
    pub degree: u32,
    /// `N(place)^degree`.
    pub norm: u64,
    pub count: u64,
    #[serde(rename = "n_L")]
    pub n_l: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerConstruction {
    pub plan: TowerPlan,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<Place>,
    pub steps: Vec<StepRecord>,
    pub checks: Vec<FiberCheck>,
    pub tower: Tower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Label {
    Free(usize),
    Group(usize, usize),
    Aux,
}

// lexicographically first place of prime degree s not dividing N, outside P
fn auxiliary_place(plan: &TowerPlan, n: u64) -> Result<Place> {
    let s = (2..).find(|&s| arith::is_prime(s) && n % s != 0).unwrap();
    enumerate_places(plan.r, s as u32)?
        .into_iter()
        .find(|q| !plan.groups.iter().any(|g| g.place == *q))
        .ok_or(Error::SearchExhausted)
}

/// Tower over F_r(t) in which, for each group `(place, n, degrees)` and each
/// `d` in `degrees`, exactly `n_L / (n d)` places above `place` have norm
/// `N(place)^d`.
///
/// Split steps for the primes of `lcm(n_i)` come first; the places above
/// each `place` are then cut, in order, into `n` contiguous blocks, and one
/// step per prime power `p^t | lcm(d)` makes the blocks with `p^t | d` inert.
/// An auxiliary place of prime degree prime to `N` stays split throughout.
/// All steps but the last are genus-0 Kummer steps, so every intermediate
/// level stays rational.
pub fn build_norm_prescribed_tower(plan: &TowerPlan, caps: &SearchCaps) -> Result<TowerConstruction> {
    plan.validate()?;
    let r = plan.r;
    let f = field(r)?;
    let n = plan.n();
    let places: Vec<Place> = plan.groups.iter().map(|g| g.place.clone()).collect();
    if n == 1 {
        let tower = Tower::new(r, PlaceSet::new(places)?)?;
        let checks = fiber_checks(plan, &tower)?;
        return Ok(TowerConstruction { plan: plan.clone(), n, auxiliary: None, steps: Vec::new(), checks, tower });
    }
    let aux = auxiliary_place(plan, n)?;
    let mut tracked = places.clone();
    tracked.push(aux.clone());
    let mut tower = Tower::new(r, PlaceSet::new(tracked)?)?;

    let mut stages: Vec<(Stage, u32, Option<(u64, u32)>)> = Vec::new();
    for (ell, v) in arith::factorize(plan.n2()) {
        stages.extend((0..v).map(|_| (Stage::Split, ell as u32, None)));
    }
    for (ell, v) in arith::factorize(plan.n1()) {
        stages.extend((1..=v).map(|t| (Stage::Inert, ell as u32, Some((ell, t)))));
    }

    let mut live: Vec<(Label, Place)> = places.iter().enumerate().map(|(i, p)| (Label::Free(i), p.clone())).collect();
    live.push((Label::Aux, aux.clone()));
    let mut search = Budget { used: 0, cap: caps.candidates };
    let mut steps = Vec::new();
    for (k, &(stage, ell, pp)) in stages.iter().enumerate() {
        if stage == Stage::Inert && live.iter().any(|(l, _)| matches!(l, Label::Free(_))) {
            live = partition(plan, live);
        }
        let expect: Vec<(Place, Behaviour)> = live
            .iter()
            .map(|(l, q)| {
                let inert = match (l, pp) {
                    (Label::Group(i, j), Some((p, t))) => plan.groups[*i].degrees[*j] as u64 % p.pow(t) == 0,
                    _ => false,
                };
                (q.clone(), if inert { Behaviour::Inert } else { Behaviour::Split })
            })
            .collect();
        let last = k + 1 == stages.len();
        let found = if last {
            kummer_search(general_candidates(r, caps.generator_degree), &expect, None, ell, r, k, &mut search)?
        } else {
            kummer_search(genus_zero_candidates(ell, &f).into_iter(), &expect, None, ell, r, k, &mut search)?
        };
        let w = found.ok_or(Error::SearchExhausted)?;
        tower = tower_extend(&tower, &w.spec)?;
        steps.push(StepRecord { stage, ell, prime_power: pp.map(|(p, t)| p.pow(t)), witness: w });
        if !last {
            let psi = tower.top().local_param.clone().ok_or_else(|| {
                Error::Unsupported("intermediate step is not rational".into())
            })?;
            let mut next = Vec::new();
            for (l, q) in &live {
                for fp in rational_fiber(&psi, q, r, &f)? {
                    next.push((*l, fp.place.expect("rational fibers carry places")));
                }
            }
            live = next;
        }
    }
    let checks = fiber_checks(plan, &tower)?;
    if let Some(c) = checks.iter().find(|c| !c.ok) {
        return invalid(format!(
            "fiber check failed above {}: {} places of norm {}, expected {}",
            c.place,
            c.count,
            c.norm,
            c.n_l / (c.n as u64 * c.degree as u64)
        ));
    }
    Ok(TowerConstruction { plan: plan.clone(), n, auxiliary: Some(aux), steps, checks, tower })
}

// cut the places above each planned place into its n contiguous blocks
fn partition(plan: &TowerPlan, live: Vec<(Label, Place)>) -> Vec<(Label, Place)> {
    let mut out: Vec<(Label, Place)> = live.iter().filter(|(l, _)| *l == Label::Aux).cloned().collect();
    for (i, g) in plan.groups.iter().enumerate() {
        let mut mine: Vec<Place> =
            live.iter().filter(|(l, _)| *l == Label::Free(i)).map(|(_, q)| q.clone()).collect();
        mine.sort();
        let block = mine.len() / g.n as usize;
        for (k, q) in mine.into_iter().enumerate() {
            out.push((Label::Group(i, k / block), q));
        }
    }
    out
}

/// Recount, from the top level's fibers, the places of each prescribed norm.
pub fn fiber_checks(plan: &TowerPlan, tower: &Tower) -> Result<Vec<FiberCheck>> {
    let top = tower.top();
    let n_l = top.degree;
    let mut out = Vec::new();
    for g in &plan.groups {
        let fiber = top.fibers.get(&g.place).ok_or_else(|| Error::Missing(format!("fiber above {}", g.place)))?;
        let base = g.place.norm_exact().ok_or_else(|| Error::Cap("norm overflow".into()))?;
        for &d in &g.degrees {
            let norm = base
                .checked_pow(d)
                .and_then(|x| u64::try_from(x).ok())
                .ok_or_else(|| Error::Cap(format!("norm of {}^{d} overflows", g.place)))?;
            let count = fiber.iter().filter(|fp| fp.e == 1 && fp.degree == g.place.degree() * d).count() as u64;
            out.push(FiberCheck {
                place: g.place.clone(),
                n: g.n,
                degree: d,
                norm,
                count,
                n_l,
                ok: count * g.n as u64 * d as u64 == n_l,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> PlaceSet {
        s.parse().unwrap()
    }

    fn caps() -> SearchCaps {
        SearchCaps::default()
    }

    #[test]
    fn as_generator_examples() {
        let w = find_as_generator(&LocalPlan::new(set("t@GF(3)"), set("t-1@GF(3)")), 3, &caps()).unwrap();
        assert_eq!(w.generator, "t");
        assert_eq!(w.ramified, vec![Place::Infinite { r: 3 }]);
        assert!(w.transcript.iter().all(|c| c.ok));
        assert_eq!(w.transcript.len(), 3);

        let w = find_as_generator(&LocalPlan::default(), 3, &caps()).unwrap();
        assert_eq!(w.generator, "t");

        let plan = LocalPlan::new(set("t@GF(3);t-1@GF(3)"), set("t-2@GF(3)"));
        let w = find_as_generator(&plan, 3, &caps()).unwrap();
        assert_eq!(w.generator, "t^2+2t");
        assert!(w.pole_order.unwrap() <= 3);
    }

    #[test]
    fn as_generator_rejects_infinite_plan() {
        let plan = LocalPlan::new(set("inf@GF(3)"), PlaceSet::empty());
        assert!(find_as_generator(&plan, 3, &caps()).is_err());
        let plan = LocalPlan::new(set("t@GF(3)"), set("t@GF(3)"));
        assert!(find_as_generator(&plan, 3, &caps()).is_err());
    }

    #[test]
    fn as_generator_with_tiny_cap() {
        let plan = LocalPlan::new(set("t@GF(5);t+1@GF(5);t+2@GF(5)"), set("t+3@GF(5)"));
        let tiny = SearchCaps { candidates: 3, ..caps() };
        assert_eq!(find_as_generator(&plan, 5, &tiny), Err(Error::SearchExhausted));
        assert!(find_as_generator(&plan, 5, &caps()).is_ok());
    }

    #[test]
    fn kummer_generator_examples() {
        let plan = LocalPlan::new(set("t-1@GF(7)"), set("t-3@GF(7)"));
        assert_eq!(find_kummer_generator(&plan, 3, 7, &caps()).unwrap().generator, "t");
        let plan = LocalPlan::new(PlaceSet::empty(), set("t-1@GF(7)"));
        assert_eq!(find_kummer_generator(&plan, 2, 7, &caps()).unwrap().generator, "t+2");
        assert_eq!(find_kummer_generator(&LocalPlan::default(), 3, 7, &caps()).unwrap().generator, "t");
        assert!(matches!(find_kummer_generator(&LocalPlan::default(), 5, 7, &caps()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kummer_generator_at_infinity() {
        let plan = LocalPlan::new(set("inf@GF(7)"), set("t@GF(7)"));
        let w = find_kummer_generator(&plan, 3, 7, &caps()).unwrap();
        assert!(w.transcript.iter().all(|c| c.ok));
        assert_eq!(w.spec.generator.num().deg() % 3, 0);
    }

    #[test]
    fn v_group_examples() {
        let v = v_group_basis(&PlaceSet::empty(), &set("t@GF(7)"), 3, 7).unwrap();
        assert_eq!((v.dim, v.basis.clone()), (1, vec!["3".to_string()]));
        let v = v_group_basis(&PlaceSet::empty(), &set("t@GF(7);inf@GF(7)"), 3, 7).unwrap();
        assert_eq!(v.basis, vec!["3".to_string(), "t".to_string()]);
        let v = v_group_basis(&set("t+1@GF(7)"), &set("t@GF(7);inf@GF(7)"), 3, 7).unwrap();
        assert_eq!(v.dim, 1);
        assert_eq!(v_group_basis(&PlaceSet::empty(), &PlaceSet::empty(), 3, 7), Err(Error::Preconditions));
    }

    #[test]
    fn v_group_class_group_term() {
        // a single cubic place: its class has order 3 in Pic / <T>
        let q = enumerate_places(7, 3).unwrap().remove(0);
        let v = v_group_basis(&PlaceSet::empty(), &PlaceSet::new(vec![q]).unwrap(), 3, 7).unwrap();
        assert_eq!(v.dim, 2);
    }

    #[test]
    fn kernel_is_annihilated() {
        let rows = vec![vec![1, 2, 0], vec![0, 1, 1]];
        for v in kernel_mod(&rows, 3, 3) {
            for r in &rows {
                assert_eq!(r.iter().zip(&v).map(|(a, b)| a * b).sum::<u64>() % 3, 0);
            }
        }
    }

    #[test]
    fn q_annihilators() {
        let p = set("t@GF(7);inf@GF(7)");
        let q = find_Q_annihilators(&p, 3, 7, &caps()).unwrap();
        assert_eq!(q.q, set("t+1@GF(7);t+2@GF(7);t+3@GF(7)"));
        assert!(q.removal_checks.iter().all(|(_, d)| *d == 0));
        assert!(q.q.len() <= 2 * q.dim_v);
        let q = find_Q_annihilators(&set("t@GF(7)"), 3, 7, &caps()).unwrap();
        assert_eq!(q.dim_v, 1);
        assert!(q.removal_checks.iter().all(|(_, d)| *d == 0));
    }

    fn plan(r: u32, groups: &[(&str, &[u32])]) -> TowerPlan {
        TowerPlan {
            r,
            p: Vec::new(),
            groups: groups
                .iter()
                .map(|(p, d)| PlaceGroup { place: p.parse().unwrap(), n: d.len() as u32, degrees: d.to_vec() })
                .collect(),
        }
    }

    #[test]
    fn tower_base_cases() {
        let t = build_norm_prescribed_tower(&plan(7, &[]), &caps()).unwrap();
        assert_eq!(t.tower.height(), 0);
        let t = build_norm_prescribed_tower(&plan(7, &[("t-1@GF(7)", &[1])]), &caps()).unwrap();
        assert_eq!(t.tower.height(), 0);
        assert!(t.checks[0].ok);
    }

    #[test]
    fn tower_inert_quadratic() {
        let t = build_norm_prescribed_tower(&plan(7, &[("t-1@GF(7)", &[2])]), &caps()).unwrap();
        assert_eq!(t.tower.top().degree, 2);
        let c = &t.checks[0];
        assert_eq!((c.norm, c.count), (49, 1));
        assert_eq!(t.auxiliary.as_ref().unwrap().degree(), 3);
    }

    #[test]
    fn tower_mixed_plan() {
        let p = plan(7, &[("t-1@GF(7)", &[1, 3]), ("t@GF(7)", &[2])]);
        let t = build_norm_prescribed_tower(&p, &caps()).unwrap();
        assert_eq!(t.n, 12);
        assert_eq!(t.tower.top().degree, 12);
        assert!(t.checks.iter().all(|c| c.ok));
    }

    #[test]
    fn tower_plan_validation() {
        assert!(plan(7, &[("t@GF(7)", &[7])]).validate().is_err());
        assert!(matches!(plan(7, &[("t@GF(7)", &[5])]).validate(), Err(Error::Unsupported(_))));
        let mut p = plan(7, &[("t@GF(7)", &[1, 2])]);
        p.groups[0].degrees = vec![2, 2];
        assert!(p.validate().is_err());
    }

    #[test]
    fn deterministic() {
        let p = plan(7, &[("t-1@GF(7)", &[1, 2])]);
        let a = serde_json::to_string(&build_norm_prescribed_tower(&p, &caps()).unwrap()).unwrap();
        let b = serde_json::to_string(&build_norm_prescribed_tower(&p, &caps()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
