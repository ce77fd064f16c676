use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

use super::field::{Backend, FieldConfig};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// An element of O / t^k, stored as its k lowest digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    field: FieldConfig,
    digits: ResDigits,
}

type ResDigits = SmallVec<[u32; 8]>;

/// The finite ring O / t^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueRing {
    pub field: FieldConfig,
    pub k: u32,
}

impl ResidueRing {
    pub fn new(field: FieldConfig, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("residue ring O/t^0 is trivial; need k >= 1".into()));
        }
        if field.precision < k && !field.is_exact() {
            return Err(Error::Precision(format!(
                "O/p^{k} needs absolute precision at least {k}, have {}",
                field.precision
            )));
        }
        Ok(ResidueRing { field, k })
    }

    /// Number of elements, p^k.
    pub fn size(&self) -> u128 {
        (self.field.p as u128).pow(self.k)
    }

    /// The element whose digits are the base-p expansion of `index`.
    pub fn element(&self, mut index: u64) -> ResidueElement {
        let p = self.field.p as u64;
        let mut digits = ResDigits::with_capacity(self.k as usize);
        for _ in 0..self.k {
            digits.push((index % p) as u32);
            index /= p;
        }
        ResidueElement { field: self.field, digits }
    }

    pub fn index(&self, r: &ResidueElement) -> u64 {
        let p = self.field.p as u64;
        r.digits.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueElement> + '_ {
        (0..self.size() as u64).map(move |i| self.element(i))
    }

    pub fn zero(&self) -> ResidueElement {
        ResidueElement { field: self.field, digits: smallvec::smallvec![0; self.k as usize] }
    }

    pub fn one(&self) -> ResidueElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> ResidueElement {
        reduce(&Scalar::from_int(self.field, n), self.k).expect("integers are integral")
    }

    /// The class of t^e (zero when e >= k).
    pub fn pi_pow(&self, e: u32) -> ResidueElement {
        let mut r = self.zero();
        if e < self.k {
            r.digits[e as usize] = 1;
        }
        r
    }

    pub fn from_digits(&self, digits: &[u32]) -> ResidueElement {
        let p = self.field.p;
        let mut r = self.zero();
        for (slot, &d) in r.digits.iter_mut().zip(digits) {
            *slot = d % p;
        }
        r
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ResidueElement {
        let p = self.field.p;
        ResidueElement {
            field: self.field,
            digits: (0..self.k).map(|_| rng.gen_range(0..p)).collect(),
        }
    }
}

/// Reduction O -> O/t^k.
pub fn reduce(x: &Scalar, k: u32) -> Result<ResidueElement> {
    Ok(ResidueElement { field: *x.field(), digits: x.residue_digits(k)?.into_iter().collect() })
}

impl ResidueElement {
    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn modulus_exponent(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn ring(&self) -> ResidueRing {
        ResidueRing { field: self.field, k: self.modulus_exponent() }
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.digits[0] != 0
    }

    /// Valuation in O/t^k; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.digits.iter().position(|&d| d != 0).map(|v| v as u32)
    }

    /// The canonical polynomial lift.
    pub fn lift(&self) -> Scalar {
        Scalar::from_digits(self.field, 0, &self.digits)
    }

    fn check_compatible(&self, other: &ResidueElement) {
        assert_eq!(self.field, other.field, "mixing residues of different fields");
        assert_eq!(self.digits.len(), other.digits.len(), "mixing residue rings");
    }

    /// Digit vectors are reduced with carries in Q_p and digitwise in F_p[[t]];
    /// both agree with reduce(lift(x) op lift(y)).
    fn finish(&self, mut raw: SmallVec<[u64; 8]>) -> ResidueElement {
        let p = self.field.p as u64;
        let digits = match self.field.backend {
            Backend::EqualChar => raw.iter().map(|&d| (d % p) as u32).collect(),
            Backend::MixedChar => {
                let mut carry = 0u64;
                for d in raw.iter_mut() {
                    let s = *d + carry;
                    *d = s % p;
                    carry = s / p;
                }
                raw.iter().map(|&d| d as u32).collect()
            }
        };
        ResidueElement { field: self.field, digits }
    }

    pub fn add(&self, other: &ResidueElement) -> ResidueElement {
        self.check_compatible(other);
        self.finish(self.digits.iter().zip(&other.digits).map(|(&a, &b)| a as u64 + b as u64).collect())
    }

    pub fn neg(&self) -> ResidueElement {
        let p = self.field.p as u64;
        match self.field.backend {
            Backend::EqualChar => self.finish(self.digits.iter().map(|&d| p - d as u64).collect()),
            Backend::MixedChar => {
                // p^k - x: complement every digit to p-1, then add one.
                let mut raw: SmallVec<[u64; 8]> = self.digits.iter().map(|&d| p - 1 - d as u64).collect();
                raw[0] += 1;
                self.finish(raw)
            }
        }
    }

    pub fn sub(&self, other: &ResidueElement) -> ResidueElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ResidueElement) -> ResidueElement {
        self.check_compatible(other);
        let k = self.digits.len();
        let mut raw: SmallVec<[u64; 8]> = smallvec::smallvec![0; k];
        for (a, &da) in self.digits.iter().enumerate() {
            if da == 0 {
                continue;
            }
            for (b, &db) in other.digits[..k - a].iter().enumerate() {
                raw[a + b] += da as u64 * db as u64;
            }
        }
        self.finish(raw)
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<ResidueElement> {
        if !self.is_unit() {
            return Err(Error::Domain(format!("{self} is not a unit of O/t^{}", self.digits.len())));
        }
        let ring = self.ring();
        let p = self.field.p as u64;
        let d0 = self.digits[0] as u64;
        let mut inv0 = 1u64;
        for _ in 0..p - 2 {
            inv0 = inv0 * d0 % p;
        }
        let c0 = ring.from_int(inv0 as i64);
        // Each step q <- q + c0 (1 - y q) gains one correct digit.
        let mut q = c0.clone();
        let one = ring.one();
        for _ in 1..self.digits.len() {
            let err = one.sub(&self.mul(&q));
            if err.is_zero() {
                break;
            }
            q = q.add(&c0.mul(&err));
        }
        debug_assert_eq!(self.mul(&q), one);
        Ok(q)
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = Scalar::from_digits(self.field, 0, &self.digits);
        let body = crate::localfield::scalar_terms_text(&s);
        write!(f, "{body} mod t^{}", self.digits.len())
    }
}

/// A right inverse of reduction O -> O/t^k.
pub trait Section: Sync {
    fn lift(&self, r: &ResidueElement) -> Scalar;
}

/// Digits as polynomial coefficients of degree < k.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalSection;

impl Section for CanonicalSection {
    fn lift(&self, r: &ResidueElement) -> Scalar {
        r.lift()
    }
}

/// Canonical lift plus pseudo-random higher digits determined by the seed
/// and the residue class, so the map stays a function.
#[derive(Debug, Clone, Copy)]
pub struct RandomSection {
    pub seed: u64,
    pub extra_digits: u32,
}

impl Section for RandomSection {
    fn lift(&self, r: &ResidueElement) -> Scalar {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for &d in r.digits() {
            h = (h ^ d as u64).wrapping_mul(0x100_0000_01b3);
        }
        h ^= r.modulus_exponent() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let k = r.modulus_exponent() as usize;
        let p = r.field().p;
        let mut digits: Vec<u32> = r.digits().to_vec();
        digits.extend((0..self.extra_digits).map(|_| rng.gen_range(0..p)));
        let x = Scalar::from_digits(*r.field(), 0, &digits);
        debug_assert_eq!(x.residue_digits(k as u32).unwrap(), r.digits());
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_lift_example() {
        let f = FieldConfig::equal_char(3).unwrap();
        let ring = ResidueRing::new(f, 3).unwrap();
        assert!(CanonicalSection.lift(&ring.zero()).is_zero());
        let r = ring.from_digits(&[1, 2, 0]);
        assert_eq!(CanonicalSection.lift(&r), Scalar::parse(f, "1 + 2*t").unwrap());
    }

    #[test]
    fn reduce_after_section_is_identity() {
        let f = FieldConfig::equal_char(3).unwrap();
        let ring = ResidueRing::new(f, 2).unwrap();
        let rs = RandomSection { seed: 7, extra_digits: 3 };
        for a in ring.elements() {
            assert_eq!(reduce(&CanonicalSection.lift(&a), 2).unwrap(), a);
            assert_eq!(reduce(&rs.lift(&a), 2).unwrap(), a);
            for b in ring.elements() {
                let s = reduce(&(&a.lift() + &b.lift()), 2).unwrap();
                assert_eq!(s, a.add(&b));
            }
        }
    }

    #[test]
    fn digit_arithmetic_matches_lifted_arithmetic() {
        for f in [
            FieldConfig::equal_char(3).unwrap(),
            FieldConfig::mixed_char(3, 6).unwrap(),
            FieldConfig::mixed_char(2, 6).unwrap(),
        ] {
            let ring = ResidueRing::new(f, 3).unwrap();
            for x in ring.elements() {
                assert_eq!(x.neg(), reduce(&-&x.lift(), 3).unwrap());
                for y in ring.elements() {
                    assert_eq!(x.add(&y), reduce(&(&x.lift() + &y.lift()), 3).unwrap());
                    assert_eq!(x.sub(&y), reduce(&(&x.lift() - &y.lift()), 3).unwrap());
                    assert_eq!(x.mul(&y), reduce(&(&x.lift() * &y.lift()), 3).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverses() {
        for f in [FieldConfig::equal_char(5).unwrap(), FieldConfig::mixed_char(5, 8).unwrap()] {
            let ring = ResidueRing::new(f, 3).unwrap();
            for a in ring.elements().filter(|a| a.is_unit()) {
                assert_eq!(a.mul(&a.inverse().unwrap()), ring.one());
            }
            assert!(ring.pi_pow(1).inverse().is_err());
        }
    }

    #[test]
    fn mixed_char_ring_is_integers_mod_power() {
        let f = FieldConfig::mixed_char(2, 10).unwrap();
        let ring = ResidueRing::new(f, 4).unwrap();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let x = ring.element(a);
                let y = ring.element(b);
                assert_eq!(ring.index(&x.mul(&y)), a * b % 16);
                assert_eq!(ring.index(&x.add(&y)), (a + b) % 16);
            }
        }
        assert!(ResidueRing::new(FieldConfig::mixed_char(2, 3).unwrap(), 4).is_err());
    }
}
