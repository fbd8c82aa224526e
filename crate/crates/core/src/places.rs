//! Places of F_r(t) and rational primes, with counting and set statistics.
//!
//! Function-field logarithms are taken in base `r` (so the log-norm of a
//! place is its degree); number-field logarithms are natural.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::expr::parse_poly;
use crate::ffpoly::{is_irreducible, FiniteField, Poly, MAX_ORDER};

/// Largest `r^d` for which places of degree `d` are enumerated.
pub const ENUM_CAP: u128 = 1 << 26;

/// Shared field of order `r`, built once per order.
pub fn field(r: u32) -> Result<Arc<FiniteField>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<FiniteField>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&r) {
        return Ok(f.clone());
    }
    let f = Arc::new(FiniteField::new(r)?);
    cache.lock().unwrap().insert(r, f.clone());
    Ok(f)
}

fn check_r(r: u32) -> Result<()> {
    if arith::prime_power(r as u64).is_none() {
        return invalid(format!("{r} is not a prime power"));
    }
    if r > MAX_ORDER {
        return Err(Error::Cap(format!("r = {r} above {MAX_ORDER}")));
    }
    Ok(())
}

/// The field a place lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    /// F_r(t)
    Function(u32),
    /// Q
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    /// Monic irreducible polynomial over F_r.
    Finite { r: u32, poly: Poly },
    Infinite { r: u32 },
    Prime(u64),
}

impl Place {
    pub fn finite(r: u32, poly: Poly) -> Result<Place> {
        check_r(r)?;
        let f = field(r)?;
        if !poly.is_monic() || poly.deg() == 0 || !is_irreducible(&poly, &f) {
            return invalid(format!("{} is not monic irreducible over GF({r})", f.fmt_poly(&poly, "t")));
        }
        Ok(Place::Finite { r, poly })
    }

    pub fn infinite(r: u32) -> Result<Place> {
        check_r(r)?;
        Ok(Place::Infinite { r })
    }

    pub fn prime(p: u64) -> Result<Place> {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(Place::Prime(p))
    }

    /// `t - c` over F_r.
    pub fn linear(r: u32, c: u32) -> Result<Place> {
        let f = field(r)?;
        Place::finite(r, Poly::linear(c, &f))
    }

    pub fn base(&self) -> Base {
        match self {
            Place::Finite { r, .. } | Place::Infinite { r } => Base::Function(*r),
            Place::Prime(_) => Base::Rational,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite { poly, .. } => poly.deg() as u32,
            _ => 1,
        }
    }

    /// `N p` as a float (`r^deg` or `p`).
    pub fn norm(&self) -> f64 {
        match self {
            Place::Finite { r, .. } | Place::Infinite { r } => (*r as f64).powi(self.degree() as i32),
            Place::Prime(p) => *p as f64,
        }
    }

    pub fn norm_exact(&self) -> Option<u128> {
        match self {
            Place::Finite { r, .. } | Place::Infinite { r } => arith::checked_pow(*r as u64, self.degree()),
            Place::Prime(p) => Some(*p as u128),
        }
    }

    /// `log N p`: the degree in the function-field case, `ln p` otherwise.
    pub fn log_norm(&self) -> f64 {
        match self {
            Place::Prime(p) => (*p as f64).ln(),
            _ => self.degree() as f64,
        }
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite { poly, .. } => Some(poly),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite { .. })
    }
}

impl fmt::Display for Place {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite { r, poly } => {
                let f = field(*r).map_err(|_| fmt::Error)?;
                write!(out, "{}@GF({r})", f.fmt_poly(poly, "t"))
            }
            Place::Infinite { r } => write!(out, "inf@GF({r})"),
            Place::Prime(p) => write!(out, "{p}"),
        }
    }
}

/// Reads `GF(r)`.
pub fn parse_gf(s: &str) -> Result<u32> {
    let s = s.trim();
    let inner = s
        .strip_prefix("GF(")
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected GF(r), got `{s}`")))?;
    let r: u32 = inner.trim().parse().map_err(|_| Error::Parse(format!("bad field order `{inner}`")))?;
    check_r(r)?;
    Ok(r)
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Place> {
        let s = s.trim();
        if let Some((lhs, rhs)) = s.rsplit_once('@') {
            let r = parse_gf(rhs)?;
            let lhs = lhs.trim();
            if lhs == "inf" || lhs == "∞" {
                return Place::infinite(r);
            }
            let f = field(r)?;
            return Place::finite(r, parse_poly(lhs, &f, 't')?);
        }
        let p: u64 = s.parse().map_err(|_| Error::Parse(format!("bad place `{s}`")))?;
        Place::prime(p)
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Place, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A duplicate-free, sorted set of places over one base.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Place>", into = "Vec<Place>")]
pub struct PlaceSet {
    places: Vec<Place>,
}

impl TryFrom<Vec<Place>> for PlaceSet {
    type Error = Error;

    fn try_from(v: Vec<Place>) -> Result<PlaceSet> {
        PlaceSet::new(v)
    }
}

impl From<PlaceSet> for Vec<Place> {
    fn from(s: PlaceSet) -> Vec<Place> {
        s.places
    }
}

impl PlaceSet {
    pub fn new(mut places: Vec<Place>) -> Result<PlaceSet> {
        if let Some(first) = places.first() {
            let b = first.base();
            if places.iter().any(|p| p.base() != b) {
                return Err(Error::MixedBases);
            }
        }
        places.sort();
        places.dedup();
        Ok(PlaceSet { places })
    }

    pub fn empty() -> PlaceSet {
        PlaceSet::default()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn contains(&self, p: &Place) -> bool {
        self.places.binary_search(p).is_ok()
    }

    pub fn base(&self) -> Option<Base> {
        self.places.first().map(Place::base)
    }

    pub fn union(&self, o: &PlaceSet) -> Result<PlaceSet> {
        PlaceSet::new(self.places.iter().chain(o.places.iter()).cloned().collect())
    }

    pub fn minus(&self, p: &Place) -> PlaceSet {
        PlaceSet { places: self.places.iter().filter(|x| *x != p).cloned().collect() }
    }

    pub fn is_disjoint(&self, o: &PlaceSet) -> bool {
        self.places.iter().all(|p| !o.contains(p))
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.places.iter().enumerate() {
            if i > 0 {
                out.write_str(";")?;
            }
            write!(out, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PlaceSet {
    type Err = Error;

    /// Places separated by `;`; lists of rational primes may also use `,`.
    fn from_str(s: &str) -> Result<PlaceSet> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PlaceSet::empty());
        }
        let parts: Vec<&str> = s.split(';').collect();
        let parts: Vec<&str> = if parts.len() == 1 && !s.contains('@') { s.split(',').collect() } else { parts };
        PlaceSet::new(parts.iter().map(|x| x.parse()).collect::<Result<Vec<Place>>>()?)
    }
}

/// `log x` for `x >= 1`, else 0, in the given base.
pub fn log_plus(x: f64, base: f64) -> f64 {
    if x >= 1.0 {
        x.ln() / base.ln()
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceStats {
    pub pi: f64,
    pub pi_plus: f64,
    pub a_s: u64,
    pub cardinality: usize,
    /// `"r"` for function fields over F_r, `"e"` otherwise.
    pub log_base: String,
}

/// `pi(S)`, `pi'(S) = log+ pi(S)`, the gcd of degrees `a_S` and `|S|`.
pub fn place_set_stats(places: &[Place]) -> Result<PlaceStats> {
    let set = PlaceSet::new(places.to_vec())?;
    let pi: f64 = set.places.iter().map(Place::log_norm).sum();
    let (base, label) = match set.base() {
        Some(Base::Function(r)) => (r as f64, format!("{r}")),
        _ => (std::f64::consts::E, "e".to_string()),
    };
    let a_s = match set.base() {
        Some(Base::Function(_)) => set.places.iter().fold(0u64, |g, p| arith::gcd(g, p.degree() as u64)),
        _ => 1,
    };
    Ok(PlaceStats {
        pi,
        pi_plus: log_plus(pi, base),
        a_s: a_s.max(1),
        cardinality: set.len(),
        log_base: label,
    })
}

/// Number of places of F_r(t) of degree `d`, by Möbius inversion.
pub fn count_places_degree(r: u32, d: u32) -> Result<u128> {
    check_r(r)?;
    if d == 0 {
        return invalid("degree must be positive");
    }
    let mut acc: i128 = 0;
    for e in arith::divisors(d as u64) {
        let term = arith::checked_pow(r as u64, d / e as u32)
            .ok_or_else(|| Error::Cap(format!("{r}^{d} overflows")))? as i128;
        acc += arith::mobius(e) as i128 * term;
    }
    let mut n = (acc / d as i128) as u128;
    if d == 1 {
        n += 1;
    }
    Ok(n)
}

/// `r^d/d - 2(2g+1) r^{d/2}`, the lower estimate for the count of degree-d
/// places coming from the Weil bound.
pub fn weil_floor(r: u32, g: u64, d: u32) -> f64 {
    let r = r as f64;
    r.powi(d as i32) / d as f64 - 2.0 * (2.0 * g as f64 + 1.0) * r.powf(d as f64 / 2.0)
}

struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    #[inline]
    fn set(&mut self, i: u64) {
        self.0[(i >> 6) as usize] |= 1 << (i & 63);
    }
    #[inline]
    fn get(&self, i: u64) -> bool {
        self.0[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }
}

/// Codes (see [`Poly::from_code`]) of the monic irreducible polynomials of
/// degree `d` over F_r, ascending. Reducible polynomials are sieved out as
/// products of an irreducible of degree `e <= d/2` with a monic cofactor.
pub fn irreducible_codes(r: u32, d: u32) -> Result<Vec<u64>> {
    check_r(r)?;
    if d == 0 {
        return invalid("degree must be positive");
    }
    let total = arith::checked_pow(r as u64, d).filter(|&n| n <= ENUM_CAP).ok_or_else(|| {
        Error::Cap(format!("enumeration of degree-{d} places over GF({r}) exceeds {ENUM_CAP} polynomials"))
    })? as u64;
    if d == 1 {
        return Ok((0..r as u64).collect());
    }
    let f = field(r)?;
    let (p, k) = (f.characteristic(), f.degree() as usize);
    let mut sieve = BitSet::new(total as usize);
    let pow_r: Vec<i64> = (0..=d).map(|i| (r as i64).pow(i)).collect();
    let q = r as usize;
    let add: Vec<u32> = (0..q * q).map(|i| f.add((i / q) as u32, (i % q) as u32)).collect();
    for e in 1..=d / 2 {
        let m = (d - e) as usize;
        // basis elements a^b of F_r over F_p, as field indices
        let basis: Vec<u32> = (0..k).map(|b| p.pow(b as u32)).collect();
        for gc in irreducible_codes(r, e)? {
            let g = Poly::from_code(gc as u128, e as usize, r);
            let shifted: Vec<Vec<u32>> = basis.iter().map(|&b| g.scale(b, &f).coeffs().to_vec()).collect();
            // product g * x^m to start
            let mut prod = vec![0u32; d as usize + 1];
            for (i, &c) in g.coeffs().iter().enumerate() {
                prod[m + i] = c;
            }
            let mut code: i64 = (0..d as usize).map(|i| prod[i] as i64 * pow_r[i]).sum();
            let ndig = m * k;
            let mut digit = vec![0u32; ndig];
            sieve.set(code as u64);
            'odometer: loop {
                let mut pos = 0;
                loop {
                    if pos == ndig {
                        break 'odometer;
                    }
                    let (j, b) = (pos / k, pos % k);
                    for (i, &c) in shifted[b].iter().enumerate() {
                        let slot = j + i;
                        let old = prod[slot];
                        let new = add[old as usize * q + c as usize];
                        prod[slot] = new;
                        code += (new as i64 - old as i64) * pow_r[slot];
                    }
                    digit[pos] += 1;
                    if digit[pos] == p {
                        digit[pos] = 0;
                        pos += 1;
                    } else {
                        break;
                    }
                }
                sieve.set(code as u64);
            }
        }
    }
    Ok((0..total).filter(|&c| !sieve.get(c)).collect())
}

/// All places of degree `d` of F_r(t), finite ones in lexicographic order,
/// then `inf` when `d = 1`.
pub fn enumerate_places(r: u32, d: u32) -> Result<Vec<Place>> {
    let codes = irreducible_codes(r, d)?;
    let mut out: Vec<Place> = codes
        .into_iter()
        .map(|c| Place::Finite { r, poly: Poly::from_code(c as u128, d as usize, r) })
        .collect();
    if d == 1 {
        out.push(Place::Infinite { r });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let e = enumerate_places(2, 1).unwrap();
        let names: Vec<String> = e.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["t@GF(2)", "t+1@GF(2)", "inf@GF(2)"]);
        let e = enumerate_places(2, 2).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].to_string(), "t^2+t+1@GF(2)");
        assert_eq!(enumerate_places(7, 1).unwrap().len(), 8);
        assert!(enumerate_places(6, 1).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(count_places_degree(2, 4).unwrap(), 3);
        assert_eq!(count_places_degree(2, 1).unwrap(), 3);
        assert_eq!(count_places_degree(3, 2).unwrap(), 3);
        assert!(count_places_degree(10, 2).is_err());
        assert_eq!(enumerate_places(2, 4).unwrap().len(), 3);
    }

    #[test]
    fn weil_values() {
        assert!((weil_floor(2, 0, 5) - (-4.914)).abs() < 1e-3);
        assert!((weil_floor(2, 0, 10) - 38.4).abs() < 1e-9);
        assert!(weil_floor(2, 1_000_000, 1) < -1e6);
    }

    #[test]
    fn stats() {
        let s: Vec<Place> = vec!["t@GF(2)".parse().unwrap(), "t^2+t+1@GF(2)".parse().unwrap()];
        let st = place_set_stats(&s).unwrap();
        assert_eq!(st.pi, 3.0);
        assert!((st.pi_plus - 3f64.log2()).abs() < 1e-12);
        assert_eq!(st.a_s, 1);
        let st = place_set_stats(&[Place::Prime(2), Place::Prime(3)]).unwrap();
        assert!((st.pi - 6f64.ln()).abs() < 1e-12);
        assert_eq!(st.a_s, 1);
        let st = place_set_stats(&[]).unwrap();
        assert_eq!((st.pi, st.pi_plus, st.a_s, st.cardinality), (0.0, 0.0, 1, 0));
        assert_eq!(place_set_stats(&[Place::Prime(2), Place::Infinite { r: 3 }]), Err(Error::MixedBases));
    }

    #[test]
    fn parse_and_print() {
        for s in ["t^2+t+1@GF(2)", "inf@GF(7)", "13", "t+6@GF(7)", "t^2+t+(a)@GF(4)"] {
            let p: Place = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("t^2+1@GF(5)".parse::<Place>().is_err());
        assert!("12".parse::<Place>().is_err());
        let s: PlaceSet = "t@GF(7); t-1@GF(7)".parse().unwrap();
        assert_eq!(s.len(), 2);
        let s: PlaceSet = "5,7".parse().unwrap();
        assert_eq!(s.len(), 2);
    }
}
