//! Small finite fields F_{p^k} and univariate polynomials over them.
//!
//! An element is a `u32` index whose base-`p` digits are its coordinates in
//! the power basis of a root `a` of the defining modulus. The prime subfield
//! is therefore `0..p`.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{invalid, Error, Result};

pub type Elem = u32;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

fn raw_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

// remainder of `a` modulo `m` over F_p, `m` monic
fn raw_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    raw_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (c * mi) % p) % p;
        }
        raw_trim(&mut r);
    }
    r
}

fn raw_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    raw_rem(&prod, m, p)
}

fn digits(mut n: u32, p: u32, k: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(k as usize);
    for _ in 0..k {
        v.push(n % p);
        n /= p;
    }
    raw_trim(&mut v);
    v
}

fn undigits(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn raw_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    // trial division by every monic polynomial of degree <= k/2
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g: Vec<u32> = (0..d).map(|i| ((code / (p as u64).pow(i as u32)) % p as u64) as u32).collect();
            g.push(1);
            if raw_rem(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// The field of order `q`, built on the lexicographically first monic
    /// irreducible polynomial of the right degree.
    pub fn new(q: u32) -> Result<Self> {
        let (p, k) = match arith::prime_power(q as u64) {
            Some((p, k)) => (p as u32, k),
            None => return invalid(format!("{q} is not a prime power")),
        };
        if q > MAX_ORDER {
            return Err(Error::Cap(format!("field order {q} above {MAX_ORDER}")));
        }
        let count = p.pow(k);
        for code in 0..count {
            let mut m = vec![0u32; k as usize];
            let mut c = code;
            for slot in m.iter_mut() {
                *slot = c % p;
                c /= p;
            }
            m.push(1);
            if raw_irreducible(&m, p) {
                return Self::build(p, m);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    /// F_p[a]/(modulus); `modulus` is ascending and monic over F_p.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if !arith::is_prime(p as u64) {
            return invalid(format!("{p} is not prime"));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return invalid("modulus must be monic of positive degree over F_p");
        }
        let k = modulus.len() as u32 - 1;
        match (p as u64).checked_pow(k) {
            Some(q) if q <= MAX_ORDER as u64 => {}
            _ => return Err(Error::Cap(format!("field order {p}^{k} above {MAX_ORDER}"))),
        }
        if !raw_irreducible(modulus, p) {
            return invalid("modulus is reducible");
        }
        Self::build(p, modulus.to_vec())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let k = modulus.len() as u32 - 1;
        let q = p.pow(k);
        let n = q - 1;
        let primes: Vec<u64> = arith::factorize(n as u64).into_iter().map(|(l, _)| l).collect();
        let pow_raw = |g: &[u32], mut e: u64| {
            let mut acc = vec![1u32];
            let mut b = g.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    acc = raw_mulmod(&acc, &b, &modulus, p);
                }
                b = raw_mulmod(&b, &b, &modulus, p);
                e >>= 1;
            }
            acc
        };
        let mut gen = None;
        for cand in 1..q {
            let g = digits(cand, p, k);
            if primes.iter().all(|&l| pow_raw(&g, n as u64 / l) != vec![1u32]) {
                gen = Some(g);
                break;
            }
        }
        let g = gen.expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * n as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        for i in 0..n as usize {
            let idx = undigits(&cur, p);
            exp[i] = idx;
            exp[i + n as usize] = idx;
            log[idx as usize] = i as u32;
            cur = raw_mulmod(&cur, &g, &modulus, p);
        }
        Ok(FiniteField { p, k, q, modulus, exp, log })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.q
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut m, mut r) = (a, b, 1, 0);
        while a > 0 || b > 0 {
            r += ((a % self.p + b % self.p) % self.p) * m;
            a /= self.p;
            b /= self.p;
            m *= self.p;
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let (mut a, mut m, mut r) = (a, 1, 0);
        while a > 0 {
            r += ((self.p - a % self.p) % self.p) * m;
            a /= self.p;
            m *= self.p;
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.k == 1 {
            return a * b % self.p;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// `a / b`; panics when `b` is zero.
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b).expect("division by zero"))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % n)) % n) as usize]
    }

    /// Discrete logarithm to the fixed primitive element.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    pub fn primitive(&self) -> Elem {
        self.exp[1]
    }

    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    /// Unique `b` with `b^p = a`.
    pub fn pth_root(&self, a: Elem) -> Elem {
        self.pow(a, (self.p as u64).pow(self.k - 1))
    }

    /// Trace down to the prime field: `a + a^p + ... + a^{p^{k-1}}`.
    pub fn absolute_trace(&self, a: Elem) -> Elem {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.k {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        acc
    }

    /// Whether `a` is an `ell`-th power, via `a^((q-1)/gcd(ell,q-1)) = 1`.
    pub fn is_power_residue(&self, a: Elem, ell: u64) -> Result<bool> {
        if a == 0 {
            return Err(Error::ZeroInput);
        }
        if ell == 0 {
            return invalid("exponent must be positive");
        }
        let n = (self.q - 1) as u64;
        let g = arith::gcd(ell, n);
        Ok(self.pow(a, n / g) == 1)
    }

    /// Text form of an element: prime-field elements as integers, others as
    /// polynomials in the generator `a`.
    pub fn fmt_elem(&self, x: Elem) -> String {
        if x < self.p {
            return x.to_string();
        }
        let d = digits(x, self.p, self.k);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        parts.join("+")
    }

    /// The element `a` (root of the modulus); equals 1 only for prime fields.
    pub fn generator_a(&self) -> Elem {
        if self.k == 1 {
            1
        } else {
            self.p
        }
    }

    pub fn fmt_poly(&self, f: &Poly, var: &str) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, &c) in f.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = if c == 1 && i > 0 {
                String::new()
            } else if c < self.p {
                c.to_string()
            } else if i == 0 {
                format!("({})", self.fmt_elem(c))
            } else {
                format!("({})*", self.fmt_elem(c))
            };
            if !out.is_empty() {
                out.push('+');
            }
            out.push_str(&coef);
            out.push_str(&mono);
        }
        out
    }
}

/// Univariate polynomial, coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<Elem>,
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn new(mut c: Vec<Elem>) -> Self {
        raw_trim(&mut c);
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![1] }
    }

    pub fn x() -> Self {
        Poly { c: vec![0, 1] }
    }

    pub fn constant(a: Elem) -> Self {
        Poly::new(vec![a])
    }

    pub fn monomial(a: Elem, n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = a;
        Poly::new(c)
    }

    /// `x - a` over `f`.
    pub fn linear(a: Elem, f: &FiniteField) -> Self {
        Poly::new(vec![f.neg(a), 1])
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial sent to 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lc(&self) -> Elem {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`q` digits of `code`.
    pub fn from_code(code: u128, deg: usize, q: u32) -> Self {
        let mut c = Vec::with_capacity(deg + 1);
        let mut n = code;
        for _ in 0..deg {
            c.push((n % q as u128) as Elem);
            n /= q as u128;
        }
        c.push(1);
        Poly { c }
    }

    /// Lower coefficients read as base-`q` digits (inverse of `from_code`).
    pub fn code(&self, q: u32) -> u128 {
        let d = self.deg();
        self.c[..d].iter().rev().fold(0u128, |acc, &x| acc * q as u128 + x as u128)
    }

    pub fn add(&self, o: &Poly, f: &FiniteField) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &FiniteField) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FiniteField) -> Poly {
        Poly::new(self.c.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, a: Elem, f: &FiniteField) -> Poly {
        Poly::new(self.c.iter().map(|&x| f.mul(a, x)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, mut e: u64, f: &FiniteField) -> Poly {
        let mut acc = Poly::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b, f);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, f);
            }
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly, f: &FiniteField) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let inv = f.inv(d.lc()).unwrap();
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        let mut q = vec![0; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(r[i + dd], inv);
            q[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, b));
            }
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly, f: &FiniteField) -> Poly {
        self.divrem(d, f).1
    }

    pub fn quo(&self, d: &Poly, f: &FiniteField) -> Poly {
        self.divrem(d, f).0
    }

    pub fn divides(&self, g: &Poly, f: &FiniteField) -> bool {
        g.rem(self, f).is_zero()
    }

    /// Leading coefficient and the monic associate.
    pub fn monic_parts(&self, f: &FiniteField) -> (Elem, Poly) {
        if self.is_zero() {
            return (0, Poly::zero());
        }
        let lc = self.lc();
        (lc, self.scale(f.inv(lc).unwrap(), f))
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        self.monic_parts(f).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly, f: &FiniteField) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `(g, s, t)` with `g` monic and `s*self + t*o = g`.
    pub fn ext_gcd(&self, o: &Poly, f: &FiniteField) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, f);
            r0 = r1;
            r1 = r;
            let s = s0.sub(&q.mul(&s1, f), f);
            s0 = s1;
            s1 = s;
            let t = t0.sub(&q.mul(&t1, f), f);
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.lc()).unwrap();
        (r0.scale(inv, f), s0.scale(inv, f), t0.scale(inv, f))
    }

    /// Inverse modulo `m`, if `self` is a unit there.
    pub fn inv_mod(&self, m: &Poly, f: &FiniteField) -> Option<Poly> {
        let (g, s, _) = self.rem(m, f).ext_gcd(m, f);
        if g.is_one() {
            Some(s.rem(m, f))
        } else {
            None
        }
    }

    pub fn eval(&self, x: Elem, f: &FiniteField) -> Elem {
        self.c.iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, x), a))
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| f.mul(f.from_int(i as i64), a))
                .collect(),
        )
    }

    pub fn mul_mod(&self, o: &Poly, m: &Poly, f: &FiniteField) -> Poly {
        self.mul(o, f).rem(m, f)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly, f: &FiniteField) -> Poly {
        let mut acc = Poly::one().rem(m, f);
        let mut b = self.rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&b, m, f);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_mod(&b, m, f);
            }
        }
        acc
    }

    /// `self(g)`.
    pub fn compose(&self, g: &Poly, f: &FiniteField) -> Poly {
        let mut acc = Poly::zero();
        for &a in self.c.iter().rev() {
            acc = acc.mul(g, f).add(&Poly::constant(a), f);
        }
        acc
    }

    /// Reciprocal `x^n * self(1/x)` for `n >= deg`.
    pub fn reversed(&self, n: usize) -> Poly {
        let mut c = vec![0; n + 1];
        for (i, &a) in self.c.iter().enumerate() {
            c[n - i] = a;
        }
        Poly::new(c)
    }

    /// Multiplicity of the factor `p` in `self` (nonzero), and the cofactor.
    pub fn split_off(&self, p: &Poly, f: &FiniteField) -> (u32, Poly) {
        let mut v = 0;
        let mut g = self.clone();
        loop {
            let (q, r) = g.divrem(p, f);
            if !r.is_zero() {
                return (v, g);
            }
            g = q;
            v += 1;
        }
    }

    // g with g(x)^p = self, given self' = 0
    fn pth_root(&self, f: &FiniteField) -> Poly {
        let p = f.characteristic() as usize;
        Poly::new(self.c.iter().step_by(p).map(|&a| f.pth_root(a)).collect())
    }
}

/// `self^{q^n}` reduced modulo `m`, by repeated q-th powering.
fn frob_pow(a: &Poly, n: u32, m: &Poly, f: &FiniteField) -> Poly {
    let mut x = a.rem(m, f);
    for _ in 0..n {
        x = x.pow_mod(f.order() as u128, m, f);
    }
    x
}

/// Product `prod g(theta)` over the roots `theta` of the monic polynomial `m`,
/// i.e. the norm of the residue of `g` from F[x]/(m) down to F.
pub fn residue_norm(m: &Poly, g: &Poly, f: &FiniteField) -> Elem {
    resultant(m, g, f)
}

/// Resultant `Res(a, b)`; for monic `a` this is `prod b(theta)` over roots of `a`.
pub fn resultant(a: &Poly, b: &Poly, f: &FiniteField) -> Elem {
    if a.is_zero() || b.is_zero() {
        return 0;
    }
    let (n, m) = (a.deg(), b.deg());
    if n == 0 {
        return f.pow(a.lc(), m as u64);
    }
    if m == 0 {
        return f.pow(b.lc(), n as u64);
    }
    let r = a.rem(b, f);
    if r.is_zero() {
        return 0;
    }
    let mut s = f.mul(f.pow(b.lc(), (n - r.deg()) as u64), resultant(b, &r, f));
    if (n * m) % 2 == 1 {
        s = f.neg(s);
    }
    s
}

/// Sum `g(theta)` over the roots of the monic polynomial `m`: the trace of the
/// residue of `g` from F[x]/(m) down to F.
pub fn residue_trace(m: &Poly, g: &Poly, f: &FiniteField) -> Elem {
    let d = m.deg();
    let g = g.rem(m, f);
    // Newton power sums s_0..s_{d-1} of the roots
    let a = |i: usize| m.coeff(i);
    let mut s = vec![0; d.max(1)];
    s[0] = f.from_int(d as i64);
    for kk in 1..d {
        let mut acc = f.mul(f.from_int(kk as i64), a(d - kk));
        for i in 1..kk {
            acc = f.add(acc, f.mul(a(d - i), s[kk - i]));
        }
        s[kk] = f.neg(acc);
    }
    (0..d).fold(0, |acc, i| f.add(acc, f.mul(g.coeff(i), s[i])))
}

/// Rabin's irreducibility test.
pub fn is_irreducible(g: &Poly, f: &FiniteField) -> bool {
    let n = match g.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n as u32,
    };
    let x = Poly::x();
    if frob_pow(&x, n, g, f) != x.rem(g, f) {
        return false;
    }
    for (s, _) in arith::factorize(n as u64) {
        let h = frob_pow(&x, n / s as u32, g, f).sub(&x, f);
        if !h.gcd(g, f).is_one() {
            return false;
        }
    }
    true
}

/// A factorization `unit * prod g_i^{e_i}`, factors monic irreducible in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, f: &FiniteField) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (g, e)| acc.mul(&g.pow(*e as u64, f), f))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub const DEFAULT_SEED: u64 = 0x7476_6669_656c_6473;

pub fn factor_poly(g: &Poly, f: &FiniteField) -> Result<Factorization> {
    factor_poly_seeded(g, f, DEFAULT_SEED)
}

/// Square-free, distinct-degree, then Cantor–Zassenhaus equal-degree
/// splitting driven by a ChaCha stream seeded with `seed`.
pub fn factor_poly_seeded(g: &Poly, f: &FiniteField, seed: u64) -> Result<Factorization> {
    if g.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (unit, m) = g.monic_parts(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree(&m, f) {
        for (d, block) in distinct_degree(&part, f) {
            for irr in equal_degree(&block, d, f, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort();
    Ok(Factorization { unit, factors })
}

fn squarefree(g: &Poly, f: &FiniteField) -> Vec<(Poly, u32)> {
    let p = f.characteristic();
    let mut out = Vec::new();
    if g.deg() == 0 {
        return out;
    }
    let dg = g.derivative(f);
    if dg.is_zero() {
        for (h, e) in squarefree(&g.pth_root(f), f) {
            out.push((h, e * p));
        }
        return out;
    }
    let mut c = g.gcd(&dg, f);
    let mut w = g.quo(&c, f);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, f);
        let z = w.quo(&y, f);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.quo(&w, f);
    }
    if !c.is_one() {
        for (h, e) in squarefree(&c.pth_root(f), f) {
            out.push((h, e * p));
        }
    }
    out
}

fn distinct_degree(g: &Poly, f: &FiniteField) -> Vec<(u32, Poly)> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    let x = Poly::x();
    let mut h = x.rem(&rest, f);
    let mut d = 1u32;
    while rest.deg() >= 2 * d as usize {
        h = h.pow_mod(f.order() as u128, &rest, f);
        let block = rest.gcd(&h.sub(&x, f), f);
        if !block.is_one() {
            rest = rest.quo(&block, f);
            h = h.rem(&rest, f);
            out.push((d, block));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        out.push((rest.deg() as u32, rest));
    }
    out
}

fn equal_degree(g: &Poly, d: u32, f: &FiniteField, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = g.deg();
    if n == d as usize {
        return vec![g.clone()];
    }
    let p = f.characteristic();
    loop {
        let a = Poly::new((0..n).map(|_| rng.gen_range(0..f.order())).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace from F_{q^d} to F_2
            let mut acc = Poly::zero();
            let mut t = a.rem(g, f);
            for _ in 0..f.degree() * d {
                acc = acc.add(&t, f);
                t = t.mul_mod(&t, g, f);
            }
            acc
        } else {
            // a^{(q^d-1)/2} = N(a)^{(q-1)/2} with N(a) = prod_{i<d} a^{q^i}
            let mut norm = Poly::one();
            let mut t = a.rem(g, f);
            for _ in 0..d {
                norm = norm.mul_mod(&t, g, f);
                t = t.pow_mod(f.order() as u128, g, f);
            }
            norm.pow_mod(((f.order() - 1) / 2) as u128, g, f).sub(&Poly::one(), f)
        };
        let h = g.gcd(&b, f);
        if h.deg() > 0 && h.deg() < n {
            let mut out = equal_degree(&h, d, f, rng);
            out.extend(equal_degree(&g.quo(&h, f), d, f, rng));
            return out;
        }
    }
}

/// A rational function `num/den` in lowest terms with `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly, f: &FiniteField) -> Result<Self> {
        if den.is_zero() {
            return invalid("zero denominator");
        }
        if num.is_zero() {
            return Ok(RatFn { num, den: Poly::one() });
        }
        let g = num.gcd(&den, f);
        let (num, den) = (num.quo(&g, f), den.quo(&g, f));
        let inv = f.inv(den.lc()).unwrap();
        Ok(RatFn { num: num.scale(inv, f), den: den.scale(inv, f) })
    }

    pub fn poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn constant(a: Elem) -> Self {
        RatFn::poly(Poly::constant(a))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, o: &RatFn, f: &FiniteField) -> RatFn {
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RatFn::new(n, self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn sub(&self, o: &RatFn, f: &FiniteField) -> RatFn {
        self.add(&o.neg(f), f)
    }

    pub fn neg(&self, f: &FiniteField) -> RatFn {
        RatFn { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFn, f: &FiniteField) -> RatFn {
        RatFn::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).unwrap()
    }

    pub fn inv(&self, f: &FiniteField) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        RatFn::new(self.den.clone(), self.num.clone(), f)
    }

    pub fn div(&self, o: &RatFn, f: &FiniteField) -> Result<RatFn> {
        Ok(self.mul(&o.inv(f)?, f))
    }

    pub fn pow(&self, e: i64, f: &FiniteField) -> Result<RatFn> {
        let base = if e < 0 { self.inv(f)? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatFn { num: base.num.pow(e, f), den: base.den.pow(e, f) })
    }

    /// `x^p - x` applied to the function.
    pub fn wp(&self, f: &FiniteField) -> RatFn {
        let p = f.characteristic() as i64;
        self.pow(p, f).unwrap().sub(self, f)
    }

    /// Substitute `t -> g` (both over the same field).
    pub fn compose(&self, g: &RatFn, f: &FiniteField) -> Result<RatFn> {
        let ev = |p: &Poly| -> RatFn {
            let mut acc = RatFn::constant(0);
            for &a in p.coeffs().iter().rev() {
                acc = acc.mul(g, f).add(&RatFn::constant(a), f);
            }
            acc
        };
        ev(&self.num).div(&ev(&self.den), f)
    }

    /// Valuation at the infinite place: `deg den - deg num`.
    pub fn v_inf(&self) -> i64 {
        self.den.deg() as i64 - self.num.deg() as i64
    }

    pub fn fmt(&self, f: &FiniteField, var: &str) -> String {
        let n = f.fmt_poly(&self.num, var);
        if self.den.is_one() {
            return n;
        }
        format!("({})/({})", n, f.fmt_poly(&self.den, var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::new(c.to_vec())
    }

    #[test]
    fn moduli_are_lex_first() {
        assert_eq!(FiniteField::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert!(FiniteField::new(6).is_err());
        assert!(FiniteField::new(1).is_err());
    }

    #[test]
    fn field_axioms_small() {
        for q in [2, 3, 4, 8, 9, 25, 27] {
            let f = FiniteField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
            assert_eq!(f.pow(f.primitive(), (q - 1) as u64), 1);
        }
    }

    #[test]
    fn residue_examples() {
        let f = FiniteField::new(7).unwrap();
        assert!(!f.is_power_residue(2, 3).unwrap());
        assert!(f.is_power_residue(6, 3).unwrap());
        assert!(f.is_power_residue(1, 5).unwrap());
        assert_eq!(f.is_power_residue(0, 3), Err(Error::ZeroInput));
    }

    #[test]
    fn trace_examples() {
        let f3 = FiniteField::new(3).unwrap();
        assert_eq!(f3.absolute_trace(2), 2);
        assert_eq!(f3.absolute_trace(0), 0);
        let f9 = FiniteField::new(9).unwrap();
        assert_eq!(f9.absolute_trace(1), 2);
    }

    #[test]
    fn factor_examples() {
        let f = FiniteField::new(7).unwrap();
        let fac = factor_poly(&p(&[6, 0, 0, 1]), &f).unwrap();
        assert_eq!(fac.unit, 1);
        assert_eq!(
            fac.factors,
            vec![(p(&[3, 1]), 1), (p(&[5, 1]), 1), (p(&[6, 1]), 1)]
        );
        let fac = factor_poly(&p(&[4, 0, 0, 1]), &f).unwrap();
        assert!(fac.is_irreducible());
        assert_eq!(factor_poly(&Poly::zero(), &f), Err(Error::ZeroInput));
        let fac = factor_poly(&Poly::x(), &f).unwrap();
        assert_eq!(fac.factors, vec![(Poly::x(), 1)]);
    }

    #[test]
    fn factor_inseparable_parts() {
        let f = FiniteField::new(3).unwrap();
        // (t^3 - t - 1)^3 * (t+1)^2
        let a = p(&[2, 2, 0, 1]);
        let g = a.pow(3, &f).mul(&p(&[1, 1]).pow(2, &f), &f).scale(2, &f);
        let fac = factor_poly(&g, &f).unwrap();
        assert_eq!(fac.unit, 2);
        assert_eq!(fac.factors, vec![(p(&[1, 1]), 2), (a, 3)]);
        assert_eq!(fac.expand(&f), g);
    }

    #[test]
    fn norms_and_traces_match_enumeration() {
        // residue field F_7[t]/(t^2+1) is a field; compare with element loops
        let f = FiniteField::new(7).unwrap();
        let m = p(&[1, 0, 1]);
        let big = FiniteField::with_modulus(7, &[1, 0, 1]).unwrap();
        for code in 0..49u32 {
            let g = p(&[code % 7, code / 7]);
            let x = code;
            let norm = big.pow(x, 8);
            assert_eq!(residue_norm(&m, &g, &f), norm);
            let tr = big.add(x, big.pow(x, 7));
            assert_eq!(residue_trace(&m, &g, &f), tr);
        }
    }

    #[test]
    fn rabin_agrees_with_factoring() {
        let f = FiniteField::new(4).unwrap();
        for code in 0..256u128 {
            let g = Poly::from_code(code, 4, 4);
            assert_eq!(is_irreducible(&g, &f), factor_poly(&g, &f).unwrap().is_irreducible());
        }
    }

    #[test]
    fn codes_round_trip() {
        let g = Poly::from_code(23, 3, 5);
        assert_eq!(g.code(5), 23);
        assert_eq!(g.deg(), 3);
    }

    #[test]
    fn formatting() {
        let f = FiniteField::new(7).unwrap();
        assert_eq!(f.fmt_poly(&p(&[1, 1, 1]), "t"), "t^2+t+1");
        assert_eq!(f.fmt_poly(&p(&[4, 6]), "t"), "6t+4");
        let f4 = FiniteField::new(4).unwrap();
        assert_eq!(f4.fmt_elem(3), "a+1");
        assert_eq!(f4.fmt_poly(&p(&[2, 1]), "t"), "t+(a)");
    }

    #[test]
    fn ratfn_normalizes() {
        let f = FiniteField::new(5).unwrap();
        let r = RatFn::new(p(&[4, 0, 1]), p(&[2, 2]), &f).unwrap(); // (t^2-1)/(2t+2)
        assert_eq!(r.num(), &p(&[2, 3]));
        assert_eq!(r.den(), &Poly::one());
    }
}
