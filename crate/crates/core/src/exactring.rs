//! Exact arithmetic in cyclotomic integer rings `Z[ζ_N]`.
//!
//! Elements are stored as integer coefficient vectors in the power basis
//! `1, ζ, …, ζ^{φ(N)-1}`, always reduced modulo the cyclotomic polynomial
//! `Φ_N`. Because the reduced remainder is unique, equality is plain
//! coefficient comparison.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficients of `Φ_N`, lowest degree first.
pub fn cyclotomic_polynomial(level: u64) -> Result<Vec<i64>> {
    if level == 0 {
        return Err(Error::InvalidLevel(0));
    }
    // x^N - 1
    let mut num = vec![0i64; level as usize + 1];
    num[0] = -1;
    num[level as usize] = 1;
    for d in 1..level {
        if level.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d)?;
            num = exact_div_monic(&num, &phi_d);
        }
    }
    Ok(num)
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = rem.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "non-exact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// The ring `Z[ζ_N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicRing {
    level: u64,
    modulus: Vec<i64>,
}

impl CyclotomicRing {
    pub fn new(level: u64) -> Result<Arc<Self>> {
        let modulus = cyclotomic_polynomial(level)?;
        Ok(Arc::new(CyclotomicRing { level, modulus }))
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `Φ_N`, lowest degree first; monic of degree `φ(N)`.
    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    /// `φ(N)`, the rank of the ring as a free abelian group.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, mut poly: Vec<i64>) -> Vec<i64> {
        let deg = self.degree();
        for i in (deg..poly.len()).rev() {
            let c = poly[i];
            if c != 0 {
                for (j, &mj) in self.modulus.iter().enumerate() {
                    poly[i - deg + j] -= c * mj;
                }
            }
        }
        poly.resize(deg, 0);
        poly
    }
}

/// An element of `Z[ζ_N]` in reduced canonical form.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<CyclotomicRing>,
    coeffs: Vec<i64>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.level == other.ring.level && self.coeffs == other.coeffs
    }
}

impl Eq for RingElement {}

impl std::hash::Hash for RingElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.level.hash(state);
        self.coeffs.hash(state);
    }
}

impl RingElement {
    /// Builds an element from an arbitrary-length coefficient vector in
    /// powers of ζ, reducing modulo `Φ_N`.
    pub fn from_coeffs(ring: &Arc<CyclotomicRing>, coeffs: Vec<i64>) -> Self {
        let mut poly = coeffs;
        if poly.len() < ring.degree() {
            poly.resize(ring.degree(), 0);
        }
        let coeffs = ring.reduce(poly);
        RingElement {
            ring: Arc::clone(ring),
            coeffs,
        }
    }

    pub fn from_int(ring: &Arc<CyclotomicRing>, value: i64) -> Self {
        let mut coeffs = vec![0; ring.degree()];
        coeffs[0] = value;
        RingElement {
            ring: Arc::clone(ring),
            coeffs,
        }
    }

    pub fn zero(ring: &Arc<CyclotomicRing>) -> Self {
        Self::from_int(ring, 0)
    }

    pub fn one(ring: &Arc<CyclotomicRing>) -> Self {
        Self::from_int(ring, 1)
    }

    /// `ζ_N^k`, with `k` taken modulo `N`.
    pub fn root_of_unity(ring: &Arc<CyclotomicRing>, k: i64) -> Self {
        let n = ring.level as i64;
        let k = k.rem_euclid(n) as usize;
        let mut poly = vec![0i64; k.max(ring.degree()) + 1];
        poly[k] = 1;
        Self::from_coeffs(ring, poly)
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    pub fn level(&self) -> u64 {
        self.ring.level
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The value as an integer, if the element lies in `Z`.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ring.level != other.ring.level {
            return Err(Error::LevelMismatch {
                left: self.ring.level,
                right: other.ring.level,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RingElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RingElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let deg = self.ring.degree();
        let mut prod = vec![0i64; 2 * deg];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        Ok(RingElement {
            ring: Arc::clone(&self.ring),
            coeffs: self.ring.reduce(prod),
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: i64) -> Self {
        RingElement {
            ring: Arc::clone(&self.ring),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Smallest `l ≥ 1` with `self^l = 1`, or `None` when the element is not
    /// a root of unity. The search stops at `2N`.
    pub fn multiplicative_order(&self) -> Option<u64> {
        let bound = 2 * self.ring.level;
        let mut acc = self.clone();
        for l in 1..=bound {
            if acc.is_one() {
                return Some(l);
            }
            acc = &acc * self;
        }
        None
    }

    /// Inverse of a root of unity, computed as `u^{ord-1}`.
    pub fn inverse_root_of_unity(&self) -> Option<Self> {
        self.multiplicative_order().map(|l| self.pow(l - 1))
    }

    /// The exponent `k` in `[0, N)` with `self = ζ_N^k`, if any.
    pub fn root_exponent(&self) -> Option<u64> {
        let zeta = Self::root_of_unity(&self.ring, 1);
        let mut acc = Self::one(&self.ring);
        for k in 0..self.ring.level {
            if acc == *self {
                return Some(k);
            }
            acc = &acc * &zeta;
        }
        None
    }

    /// Image under `ζ_N ↦ ζ_M^{M/N}`.
    pub fn lift(&self, target: &Arc<CyclotomicRing>) -> Result<Self> {
        let n = self.ring.level;
        let m = target.level;
        if !m.is_multiple_of(n) {
            return Err(Error::LiftNotDivisible { from: n, to: m });
        }
        let step = (m / n) as usize;
        let mut poly = vec![0i64; (self.coeffs.len().max(1) - 1) * step + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            poly[k * step] += c;
        }
        Ok(Self::from_coeffs(target, poly))
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => format!("z{}", self.ring.level),
                _ => format!("z{}^{}", self.ring.level, k),
            };
            let term = match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (-1, false) => format!("-{mono}"),
                _ => format!("{c}*{mono}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        write!(f, "{out}")
    }
}

// Operator impls panic on mismatched levels; use the `checked_*` methods
// when the levels are not known to agree.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&RingElement> for &RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &RingElement) -> RingElement {
                self.$checked(rhs).expect("ring level mismatch")
            }
        }
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                self.$checked(&rhs).expect("ring level mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.scale(-1)
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.scale(-1)
    }
}

#[derive(Serialize, Deserialize)]
struct RingElementRepr {
    level: u64,
    coeffs: Vec<i64>,
}

impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RingElementRepr {
            level: self.ring.level,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RingElementRepr::deserialize(d)?;
        let ring = CyclotomicRing::new(repr.level).map_err(serde::de::Error::custom)?;
        Ok(RingElement::from_coeffs(&ring, repr.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(n: u64) -> Arc<CyclotomicRing> {
        CyclotomicRing::new(n).unwrap()
    }

    #[test]
    fn cyclotomic_small_levels() {
        assert_eq!(cyclotomic_polynomial(1).unwrap(), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2).unwrap(), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(12).unwrap(), vec![1, 0, -1, 0, 1]);
        assert!(cyclotomic_polynomial(0).is_err());
    }

    #[test]
    fn cyclotomic_degree_and_divisibility() {
        for n in 1..=40u64 {
            let phi = cyclotomic_polynomial(n).unwrap();
            assert_eq!(phi.len() as u64 - 1, totient(n), "degree of Phi_{n}");
            assert_eq!(*phi.last().unwrap(), 1);
            // x^n - 1 reduces to zero modulo Phi_n
            let r = ring(n);
            let mut xn = vec![0i64; n as usize + 1];
            xn[0] = -1;
            xn[n as usize] = 1;
            assert!(RingElement::from_coeffs(&r, xn).is_zero());
        }
    }

    #[test]
    fn small_products() {
        let r4 = ring(4);
        let i = RingElement::root_of_unity(&r4, 1);
        assert_eq!(&i * &i, RingElement::from_int(&r4, -1));
        let one = RingElement::one(&r4);
        assert_eq!((&one + &i) * (&one - &i), RingElement::from_int(&r4, 2));
        let r3 = ring(3);
        let w = RingElement::root_of_unity(&r3, 1);
        assert!((RingElement::one(&r3) + w.clone() + &w * &w).is_zero());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(
            RingElement::root_of_unity(&ring(4), 2),
            RingElement::from_int(&ring(4), -1)
        );
        for n in 1..20 {
            assert!(RingElement::root_of_unity(&ring(n), 0).is_one());
        }
        assert_eq!(
            RingElement::root_of_unity(&ring(8), 4),
            RingElement::from_int(&ring(8), -1)
        );
    }

    #[test]
    fn orders() {
        let r8 = ring(8);
        assert_eq!(RingElement::one(&r8).multiplicative_order(), Some(1));
        assert_eq!(
            RingElement::from_int(&r8, -1).multiplicative_order(),
            Some(2)
        );
        assert_eq!(
            RingElement::root_of_unity(&r8, 1).multiplicative_order(),
            Some(8)
        );
        assert_eq!(RingElement::from_int(&r8, 2).multiplicative_order(), None);
        // -1 in an odd level ring has order 2, beyond N itself
        assert_eq!(
            RingElement::from_int(&ring(3), -1).multiplicative_order(),
            Some(2)
        );
    }

    #[test]
    fn order_of_powers_matches_formula() {
        for n in 1..=24u64 {
            let r = ring(n);
            for k in 0..n {
                let u = RingElement::root_of_unity(&r, k as i64);
                assert_eq!(u.multiplicative_order(), Some(n / gcd(n, k)), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn lifting() {
        let z2 = RingElement::root_of_unity(&ring(2), 1);
        let lifted = z2.lift(&ring(4)).unwrap();
        assert_eq!(lifted, RingElement::root_of_unity(&ring(4), 2));
        assert_eq!(lifted, RingElement::from_int(&ring(4), -1));
        assert!(RingElement::one(&ring(5)).lift(&ring(15)).unwrap().is_one());
        let z3 = RingElement::root_of_unity(&ring(3), 1)
            .lift(&ring(12))
            .unwrap();
        assert_eq!(z3, RingElement::root_of_unity(&ring(12), 4));
        assert!(z3.pow(3).is_one());
        assert!(z3.lift(&ring(18)).is_err());
    }

    #[test]
    fn mismatched_levels_error() {
        let a = RingElement::one(&ring(3));
        let b = RingElement::one(&ring(4));
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn root_exponent_roundtrip() {
        let r = ring(12);
        for k in 0..12 {
            assert_eq!(
                RingElement::root_of_unity(&r, k).root_exponent(),
                Some(k as u64)
            );
        }
        // -1 is not in mu_3 even though it is a unit of Z[zeta_3]
        assert_eq!(RingElement::from_int(&ring(3), -1).root_exponent(), None);
    }

    #[test]
    fn serde_shape() {
        let r = ring(4);
        let x = RingElement::from_coeffs(&r, vec![1, 1]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"level":4,"coeffs":[1,1]}"#);
        let back: RingElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    fn element(level: u64) -> impl Strategy<Value = RingElement> {
        let deg = totient(level) as usize;
        proptest::collection::vec(-5i64..=5, deg)
            .prop_map(move |c| RingElement::from_coeffs(&ring(level), c))
    }

    fn level_and_three() -> impl Strategy<Value = (RingElement, RingElement, RingElement)> {
        (1u64..=30).prop_flat_map(|n| (element(n), element(n), element(n)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in level_and_three()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn roots_multiply(n in 1u64..=36, k in -50i64..50, j in -50i64..50) {
            let r = ring(n);
            prop_assert_eq!(
                &RingElement::root_of_unity(&r, k) * &RingElement::root_of_unity(&r, j),
                RingElement::root_of_unity(&r, k + j)
            );
        }

        #[test]
        fn lift_is_homomorphism(n in 1u64..=12, m in 1u64..=4, ca in proptest::collection::vec(-4i64..=4, 12), cb in proptest::collection::vec(-4i64..=4, 12)) {
            let src = ring(n);
            let dst = ring(n * m);
            let a = RingElement::from_coeffs(&src, ca);
            let b = RingElement::from_coeffs(&src, cb);
            prop_assert_eq!((&a * &b).lift(&dst).unwrap(), &a.lift(&dst).unwrap() * &b.lift(&dst).unwrap());
            prop_assert_eq!((&a + &b).lift(&dst).unwrap(), &a.lift(&dst).unwrap() + &b.lift(&dst).unwrap());
        }
    }
}
