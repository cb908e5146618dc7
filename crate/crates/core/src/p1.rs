//! The projective line over an exact field: points in canonical form, Möbius
//! transformations, cross-ratios with their degenerate-value rules, and exact
//! limits of rational functions.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{parse_rat, parse_ratfunc, ratfunc_to_text, Field, Poly, Rat, RatFunc};

/// A point of P¹ in canonical form: either a finite field element `(a : 1)`
/// or the point at infinity `(1 : 0)`.
#[derive(Clone, PartialEq)]
pub enum P1<K: Field> {
    Finite(K),
    Inf,
}

impl<K: Field> P1<K> {
    pub fn zero() -> Self {
        P1::Finite(K::zero())
    }

    pub fn one() -> Self {
        P1::Finite(K::one())
    }

    pub fn inf() -> Self {
        P1::Inf
    }

    pub fn from_i64(v: i64) -> Self {
        P1::Finite(K::from_i64(v))
    }

    /// Collapses a homogeneous pair `(a : b)` to the canonical form. Errors
    /// if both coordinates vanish.
    pub fn from_homogeneous(a: &K, b: &K) -> Result<Self> {
        if b.is_zero() {
            if a.is_zero() {
                Err(Error::InvalidInput("(0 : 0) is not a point".into()))
            } else {
                Ok(P1::Inf)
            }
        } else {
            Ok(P1::Finite(a.div(b)))
        }
    }

    /// The canonical homogeneous pair.
    pub fn homogeneous(&self) -> (K, K) {
        match self {
            P1::Finite(a) => (a.clone(), K::one()),
            P1::Inf => (K::one(), K::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, P1::Finite(a) if a.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, P1::Finite(a) if a.is_one())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, P1::Inf)
    }

    /// Special values are 0, 1 and ∞; they encode coincidences of points.
    pub fn is_special(&self) -> bool {
        self.is_zero() || self.is_one() || self.is_inf()
    }

    pub fn as_finite(&self) -> Option<&K> {
        match self {
            P1::Finite(a) => Some(a),
            P1::Inf => None,
        }
    }

    /// `a_p b_q - a_q b_p` on canonical homogeneous coordinates; vanishes
    /// exactly when the points coincide.
    pub fn det(p: &Self, q: &Self) -> K {
        match (p, q) {
            (P1::Finite(a), P1::Finite(c)) => a.sub(c),
            (P1::Finite(_), P1::Inf) => K::one().neg(),
            (P1::Inf, P1::Finite(_)) => K::one(),
            (P1::Inf, P1::Inf) => K::zero(),
        }
    }

    /// Checked multiplication in P¹; `None` on the indeterminate form 0·∞.
    pub fn mul(&self, rhs: &Self) -> Option<Self> {
        match (self, rhs) {
            (P1::Inf, q) | (q, P1::Inf) => {
                if q.is_zero() {
                    None
                } else {
                    Some(P1::Inf)
                }
            }
            (P1::Finite(a), P1::Finite(b)) => Some(P1::Finite(a.mul(b))),
        }
    }

    /// Checked division in P¹; `None` on 0/0 and ∞/∞.
    pub fn div(&self, rhs: &Self) -> Option<Self> {
        match (self, rhs) {
            (P1::Inf, P1::Inf) => None,
            (P1::Inf, _) => Some(P1::Inf),
            (P1::Finite(a), P1::Inf) => {
                let _ = a;
                Some(P1::zero())
            }
            (P1::Finite(a), P1::Finite(b)) => {
                if b.is_zero() {
                    if a.is_zero() {
                        None
                    } else {
                        Some(P1::Inf)
                    }
                } else {
                    Some(P1::Finite(a.div(b)))
                }
            }
        }
    }

    /// `1 - x`, total on P¹.
    pub fn one_minus(&self) -> Self {
        match self {
            P1::Finite(a) => P1::Finite(K::one().sub(a)),
            P1::Inf => P1::Inf,
        }
    }

    /// Multiplicative inverse, total on P¹ (0 ↦ ∞, ∞ ↦ 0).
    pub fn recip(&self) -> Self {
        match self {
            P1::Inf => P1::zero(),
            P1::Finite(a) if a.is_zero() => P1::Inf,
            P1::Finite(a) => P1::Finite(a.inv()),
        }
    }
}

impl<K: Field> fmt::Debug for P1<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<K: Field> fmt::Display for P1<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1::Finite(a) => write!(f, "{a}"),
            P1::Inf => write!(f, "inf"),
        }
    }
}

/// Text form of a point over the rationals: `p/q` or `inf`.
pub fn p1_rat_to_text(p: &P1<Rat>) -> String {
    p.to_string()
}

pub fn parse_p1_rat(s: &str) -> Result<P1<Rat>> {
    let s = s.trim();
    if s == "inf" {
        Ok(P1::Inf)
    } else {
        Ok(P1::Finite(parse_rat(s)?))
    }
}

/// Text form of a point over the rational-function field.
pub fn p1_ratfunc_to_text(p: &P1<RatFunc<Rat>>) -> String {
    match p {
        P1::Finite(f) => ratfunc_to_text(f),
        P1::Inf => "inf".into(),
    }
}

pub fn parse_p1_ratfunc(s: &str) -> Result<P1<RatFunc<Rat>>> {
    let s = s.trim();
    if s == "inf" {
        Ok(P1::Inf)
    } else {
        Ok(P1::Finite(parse_ratfunc(s)?))
    }
}

/// An element of PGL₂ as a 2×2 matrix with nonzero determinant, acting on
/// P¹ by the homogeneous linear action.
#[derive(Clone, PartialEq, Debug)]
pub struct Moebius<K: Field> {
    // row-major [[a, b], [c, d]]: z -> (a z + b) / (c z + d)
    m: [K; 4],
}

impl<K: Field> Moebius<K> {
    pub fn new(a: K, b: K, c: K, d: K) -> Result<Self> {
        let det = a.mul(&d).sub(&b.mul(&c));
        if det.is_zero() {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        Ok(Moebius { m: [a, b, c, d] })
    }

    pub fn identity() -> Self {
        Moebius {
            m: [K::one(), K::zero(), K::zero(), K::one()],
        }
    }

    pub fn apply(&self, p: &P1<K>) -> P1<K> {
        let (x, y) = p.homogeneous();
        let a = self.m[0].mul(&x).add(&self.m[1].mul(&y));
        let b = self.m[2].mul(&x).add(&self.m[3].mul(&y));
        P1::from_homogeneous(&a, &b).expect("nonsingular matrix maps points to points")
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Moebius {
            m: [
                a.mul(e).add(&b.mul(g)),
                a.mul(f).add(&b.mul(h)),
                c.mul(e).add(&d.mul(g)),
                c.mul(f).add(&d.mul(h)),
            ],
        }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = &self.m;
        Moebius {
            m: [d.clone(), b.neg(), c.neg(), a.clone()],
        }
    }

    /// The unique transformation sending three pairwise distinct points to
    /// (0, 1, ∞).
    pub fn from_triple(p1: &P1<K>, p2: &P1<K>, p3: &P1<K>) -> Result<Self> {
        if p1 == p2 || p1 == p3 || p2 == p3 {
            return Err(Error::CoincidentPoints);
        }
        let (a1, b1) = p1.homogeneous();
        let (a3, b3) = p3.homogeneous();
        let lam = P1::det(p2, p3);
        let mu = P1::det(p1, p2).neg();
        let m = Moebius {
            m: [
                lam.mul(&b1),
                lam.mul(&a1).neg(),
                mu.mul(&b3),
                mu.mul(&a3).neg(),
            ],
        };
        debug_assert!(m.apply(p1).is_zero() && m.apply(p2).is_one() && m.apply(p3).is_inf());
        Ok(m)
    }

    /// The unique transformation sending one distinct triple to another.
    pub fn mapping(from: (&P1<K>, &P1<K>, &P1<K>), to: (&P1<K>, &P1<K>, &P1<K>)) -> Result<Self> {
        let f = Self::from_triple(from.0, from.1, from.2)?;
        let g = Self::from_triple(to.0, to.1, to.2)?;
        Ok(g.inverse().compose(&f))
    }
}

/// The value of a cross-ratio: a point of P¹, or undefined when at least
/// three of the four input points coincide.
#[derive(Clone, PartialEq, Debug)]
pub enum CrossRatioValue<K: Field> {
    Value(P1<K>),
    Undefined,
}

impl<K: Field> CrossRatioValue<K> {
    pub fn value(&self) -> Option<&P1<K>> {
        match self {
            CrossRatioValue::Value(v) => Some(v),
            CrossRatioValue::Undefined => None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, CrossRatioValue::Undefined)
    }
}

impl<K: Field> fmt::Display for CrossRatioValue<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossRatioValue::Value(v) => write!(f, "{v}"),
            CrossRatioValue::Undefined => write!(f, "undefined"),
        }
    }
}

/// The cross-ratio of four points, as the ratio of determinant products
/// `(a_i b_k - a_k b_i)(a_j b_l - a_l b_j) : (a_i b_l - a_l b_i)(a_j b_k - a_k b_j)`.
/// Both products vanish exactly when three of the points coincide, which is
/// the undefined case.
pub fn cross_ratio_points<K: Field>(
    pi: &P1<K>,
    pj: &P1<K>,
    pk: &P1<K>,
    pl: &P1<K>,
) -> CrossRatioValue<K> {
    let num = P1::det(pi, pk).mul(&P1::det(pj, pl));
    let den = P1::det(pi, pl).mul(&P1::det(pj, pk));
    match P1::from_homogeneous(&num, &den) {
        Ok(v) => CrossRatioValue::Value(v),
        Err(_) => CrossRatioValue::Undefined,
    }
}

/// The limit of a rational function at a point of P¹ (including ∞), by
/// comparing orders of vanishing of numerator and denominator. Always exists
/// in P¹; the zero function has limit 0.
pub fn limit<K: Field>(f: &RatFunc<K>, t0: &P1<K>) -> P1<K> {
    if f.is_zero() {
        return P1::zero();
    }
    match t0 {
        P1::Finite(c) => {
            let on = f.num().order_at(c);
            let od = f.den().order_at(c);
            if on > od {
                return P1::zero();
            }
            if on < od {
                return P1::Inf;
            }
            let lin = Poly::from_coeffs(vec![c.neg(), K::one()]);
            let mut num = f.num().clone();
            let mut den = f.den().clone();
            for _ in 0..on {
                num = num.div_rem(&lin).0;
                den = den.div_rem(&lin).0;
            }
            P1::Finite(num.eval(c).div(&den.eval(c)))
        }
        P1::Inf => {
            // substitute t -> 1/t and take the limit at 0
            let dn = f.num().degree().unwrap();
            let dd = f.den().degree().unwrap();
            let mut num = f.num().reversed();
            let mut den = f.den().reversed();
            if dd > dn {
                num = num.mul(&monomial::<K>(dd - dn));
            } else {
                den = den.mul(&monomial::<K>(dn - dd));
            }
            limit(&RatFunc::new(num, den), &P1::zero())
        }
    }
}

fn monomial<K: Field>(deg: usize) -> Poly<K> {
    let mut c = vec![K::zero(); deg + 1];
    c[deg] = K::one();
    Poly::from_coeffs(c)
}
