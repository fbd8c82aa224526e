//! Brute-force oracles shared by the integration tests. Everything here works
//! over a prime field F_p and builds residue fields directly from the place
//! polynomial, so it shares no code with the norm and trace shortcuts used by
//! the library.

#![allow(dead_code)]

use tv_core::extensions::{DecompositionType, StepKind};
use tv_core::ffpoly::{Elem, FiniteField, Poly, RatFn};
use tv_core::{factor_poly, ExtensionSpec, Place};

/// Residue field at a place and the residue of a unit there.
pub struct Local {
    pub k: FiniteField,
    /// `v_P(u)`.
    pub v: i64,
    /// Residue of `u / pi^v` for the uniformizer `P` (or `1/t` at infinity).
    pub unit: Elem,
}

fn elem_of(c: &Poly, p: u32) -> Elem {
    c.coeffs().iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn strip(g: &Poly, q: &Poly, f: &FiniteField) -> (i64, Poly) {
    let mut g = g.clone();
    let mut v = 0;
    while q.divides(&g, f) {
        g = g.quo(q, f);
        v += 1;
    }
    (v, g)
}

/// Residue data of `u` at `place`, over the prime field `f`.
pub fn local(u: &RatFn, place: &Place, f: &FiniteField) -> Local {
    let p = f.characteristic();
    assert_eq!(f.degree(), 1, "oracle works over prime fields");
    match place {
        Place::Finite { poly, .. } => {
            let k = FiniteField::with_modulus(p, poly.coeffs()).unwrap();
            let (a, n) = strip(u.num(), poly, f);
            let (b, d) = strip(u.den(), poly, f);
            let n = elem_of(&n.rem(poly, f), p);
            let d = elem_of(&d.rem(poly, f), p);
            Local { unit: k.div(n, d), v: a - b, k }
        }
        Place::Infinite { .. } => {
            let k = FiniteField::with_modulus(p, &[0, 1]).unwrap();
            let v = u.den().deg() as i64 - u.num().deg() as i64;
            Local { unit: k.div(u.num().lc(), u.den().lc()), v, k }
        }
        Place::Prime(_) => unreachable!(),
    }
}

/// Splitting shape of a separable polynomial over `k`, by full factorization.
pub fn shape(g: &Poly, k: &FiniteField) -> DecompositionType {
    let fac = factor_poly(g, k).unwrap();
    assert!(fac.factors.iter().all(|(_, e)| *e == 1), "not separable");
    let f = fac.factors[0].0.deg() as u32;
    assert!(fac.factors.iter().all(|(q, _)| q.deg() as u32 == f), "unequal residue degrees");
    DecompositionType { e: 1, f, g: fac.factors.len() as u32 }
}

/// Roots of `g` in `k`, by trying every element.
pub fn roots(g: &Poly, k: &FiniteField) -> u32 {
    k.elements().filter(|&y| g.eval(y, k) == 0).count() as u32
}

/// `Y^l - a` over `k`.
pub fn kummer_poly(ell: u32, a: Elem, k: &FiniteField) -> Poly {
    let mut c = vec![0; ell as usize + 1];
    c[0] = k.neg(a);
    c[ell as usize] = 1;
    Poly::new(c)
}

/// `Y^p - Y - a` over `k`.
pub fn as_poly(a: Elem, k: &FiniteField) -> Poly {
    let p = k.characteristic() as usize;
    let mut c = vec![0; p + 1];
    c[0] = k.neg(a);
    c[1] = k.neg(1);
    c[p] = 1;
    Poly::new(c)
}

/// Decomposition of `place` in the extension, from the residue field alone.
/// `None` when the oracle does not cover the place (an Artin–Schreier pole
/// of order divisible by `p`).
pub fn decomposition(spec: &ExtensionSpec, place: &Place, f: &FiniteField) -> Option<DecompositionType> {
    let loc = local(&spec.generator, place, f);
    let (n, poly) = match spec.kind {
        StepKind::Kummer { ell } => {
            if loc.v % ell as i64 != 0 {
                return Some(DecompositionType { e: ell, f: 1, g: 1 });
            }
            (ell, kummer_poly(ell, loc.unit, &loc.k))
        }
        StepKind::ArtinSchreier => {
            let p = f.characteristic();
            if loc.v < 0 {
                if loc.v % p as i64 != 0 {
                    return Some(DecompositionType { e: p, f: 1, g: 1 });
                }
                return None;
            }
            // a zero of u leaves residue 0
            let a = if loc.v > 0 { 0 } else { loc.unit };
            (p, as_poly(a, &loc.k))
        }
    };
    let s = shape(&poly, &loc.k);
    let r = roots(&poly, &loc.k);
    assert_eq!(r, if s.f == 1 { n } else { 0 }, "root count disagrees with factorization");
    assert_eq!(s.f * s.g, n);
    Some(s)
}
