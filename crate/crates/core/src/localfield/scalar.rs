use smallvec::SmallVec;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Backend, FieldConfig};
use crate::error::{Error, Result};

pub type Digit = u16;
pub(crate) type Digits = SmallVec<[Digit; 8]>;

const EXACT: i32 = i32::MAX;

/// An element of the local field.
///
/// The value is `sum_k digits[k] * t^(val + k)`. In the equal-characteristic
/// backend the digits are Laurent coefficients and the value is exact. In the
/// mixed-characteristic backend `t = p`, the digits are base-p digits and the
/// value is only known modulo `p^prec`. The representation is canonical:
/// `digits` is either empty or starts and ends with a nonzero digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: FieldConfig,
    val: i32,
    digits: Digits,
    prec: i32,
}

/// Binary operations exposed through [`Scalar::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    DivByUnit,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

impl Scalar {
    fn base_prec(field: &FieldConfig) -> i32 {
        match field.backend {
            Backend::EqualChar => EXACT,
            Backend::MixedChar => field.precision as i32,
        }
    }

    /// Builds a canonical element from raw digits starting at exponent `val`.
    fn normalized(field: FieldConfig, mut val: i32, digits: &[Digit], prec: i32) -> Scalar {
        let mut start = 0;
        while start < digits.len() && digits[start] == 0 {
            start += 1;
        }
        let mut end = digits.len();
        if prec != EXACT {
            let keep = (prec as i64 - val as i64).max(0) as usize;
            end = end.min(keep);
        }
        while end > start && digits[end - 1] == 0 {
            end -= 1;
        }
        if start >= end {
            return Scalar { field, val: 0, digits: Digits::new(), prec };
        }
        val += start as i32;
        Scalar { field, val, digits: Digits::from_slice(&digits[start..end]), prec }
    }

    pub fn zero(field: FieldConfig) -> Scalar {
        Scalar { field, val: 0, digits: Digits::new(), prec: Self::base_prec(&field) }
    }

    pub fn one(field: FieldConfig) -> Scalar {
        Self::monomial(field, 1, 0)
    }

    /// `c * t^e` with `c` reduced into `[0, p)`.
    pub fn monomial(field: FieldConfig, c: i64, e: i32) -> Scalar {
        Self::from_int(field, c).shift(e)
    }

    /// `t^e`.
    pub fn pi_pow(field: FieldConfig, e: i32) -> Scalar {
        Self::monomial(field, 1, e)
    }

    /// The image of an integer. In the equal-characteristic backend this is
    /// its residue mod p; in Q_p it is expanded in base p.
    pub fn from_int(field: FieldConfig, n: i64) -> Scalar {
        let p = field.p as i64;
        let prec = Self::base_prec(&field);
        match field.backend {
            Backend::EqualChar => {
                let d = n.rem_euclid(p) as Digit;
                Self::normalized(field, 0, &[d], prec)
            }
            Backend::MixedChar => {
                let mut m = n.unsigned_abs();
                let mut digits = Digits::new();
                while m > 0 {
                    digits.push((m % p as u64) as Digit);
                    m /= p as u64;
                }
                let x = Self::normalized(field, 0, &digits, prec);
                if n < 0 {
                    -&x
                } else {
                    x
                }
            }
        }
    }

    /// Element with the given digits starting at exponent `val`; digits are
    /// reduced mod p.
    pub fn from_digits(field: FieldConfig, val: i32, digits: &[u32]) -> Scalar {
        let p = field.p;
        let ds: Digits = digits.iter().map(|&d| (d % p) as Digit).collect();
        Self::normalized(field, val, &ds, Self::base_prec(&field))
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// True when the value is known to be exactly zero.
    pub fn is_exact_zero(&self) -> bool {
        self.digits.is_empty() && self.prec == EXACT
    }

    /// Valuation of the leading digit; `None` for zero (or for a p-adic
    /// value with no known nonzero digit).
    pub fn valuation(&self) -> Option<i32> {
        if self.digits.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// A certified lower bound for the valuation.
    pub fn lower_valuation(&self) -> i32 {
        if self.digits.is_empty() {
            self.prec
        } else {
            self.val
        }
    }

    /// Absolute precision; `None` for exact values.
    pub fn precision(&self) -> Option<i32> {
        if self.prec == EXACT {
            None
        } else {
            Some(self.prec)
        }
    }

    /// Coefficient of `t^e` (zero outside the stored window).
    pub fn digit(&self, e: i32) -> u32 {
        let k = e as i64 - self.val as i64;
        if k < 0 || k >= self.digits.len() as i64 {
            0
        } else {
            self.digits[k as usize] as u32
        }
    }

    /// Exponent just past the last nonzero digit (equal to `val` for zero).
    pub fn end_exponent(&self) -> i32 {
        self.val + self.digits.len() as i32
    }

    /// Iterator over `(exponent, digit)` for nonzero digits.
    pub fn terms(&self) -> impl Iterator<Item = (i32, u32)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(move |(k, &d)| (self.val + k as i32, d as u32))
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: i32) -> Scalar {
        let mut out = self.clone();
        if !out.digits.is_empty() {
            out.val += e;
        }
        if out.prec != EXACT {
            out.prec += e;
        }
        out
    }

    /// Equality to the common working precision: the difference has no
    /// known nonzero digit. For the exact backend this is plain equality.
    pub fn agrees_with(&self, other: &Scalar) -> bool {
        (self - other).is_zero()
    }

    /// Unit part test: valuation exactly zero.
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// True when the element lies in O.
    pub fn is_integral(&self) -> bool {
        self.lower_valuation() >= 0
    }

    /// Width of the stored coefficient window.
    pub fn support_width(&self) -> usize {
        self.digits.len()
    }

    fn check_same_field(&self, other: &Scalar) {
        assert_eq!(self.field, other.field, "mixing elements of different fields");
    }

    fn add_impl(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other);
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let p = self.field.p;
        let prec = self.prec.min(other.prec);
        match self.field.backend {
            Backend::EqualChar => {
                let lo = self.val.min(other.val);
                let hi = self.end_exponent().max(other.end_exponent());
                let mut buf: Digits = smallvec::smallvec![0; (hi - lo) as usize];
                for (k, &d) in self.digits.iter().enumerate() {
                    buf[(self.val - lo) as usize + k] = d;
                }
                for (k, &d) in other.digits.iter().enumerate() {
                    let slot = &mut buf[(other.val - lo) as usize + k];
                    *slot = ((*slot as u32 + d as u32) % p) as Digit;
                }
                Self::normalized(self.field, lo, &buf, EXACT)
            }
            Backend::MixedChar => {
                let lo = self.lower_valuation().min(other.lower_valuation());
                if lo >= prec {
                    return Scalar { field: self.field, val: 0, digits: Digits::new(), prec };
                }
                let n = (prec - lo) as usize;
                let mut buf: Digits = smallvec::smallvec![0; n];
                let mut carry = 0u32;
                for (k, slot) in buf.iter_mut().enumerate() {
                    let e = lo + k as i32;
                    let s = self.digit(e) + other.digit(e) + carry;
                    *slot = (s % p) as Digit;
                    carry = s / p;
                }
                Self::normalized(self.field, lo, &buf, prec)
            }
        }
    }

    fn neg_impl(&self) -> Scalar {
        if self.digits.is_empty() {
            return self.clone();
        }
        let p = self.field.p;
        match self.field.backend {
            Backend::EqualChar => {
                let buf: Digits =
                    self.digits.iter().map(|&d| ((p - d as u32) % p) as Digit).collect();
                Self::normalized(self.field, self.val, &buf, EXACT)
            }
            Backend::MixedChar => {
                let n = (self.prec - self.val) as usize;
                let mut buf: Digits = smallvec::smallvec![0; n];
                for (k, slot) in buf.iter_mut().enumerate() {
                    let d = self.digits.get(k).copied().unwrap_or(0) as u32;
                    *slot = if k == 0 { (p - d) as Digit } else { (p - 1 - d) as Digit };
                }
                Self::normalized(self.field, self.val, &buf, self.prec)
            }
        }
    }

    fn mul_impl(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other);
        let p = self.field.p as u64;
        match self.field.backend {
            Backend::EqualChar => {
                if self.digits.is_empty() || other.digits.is_empty() {
                    return Scalar::zero(self.field);
                }
                if other.digits.len() == 1 && other.digits[0] == 1 {
                    return self.shift(other.val);
                }
                if self.digits.len() == 1 && self.digits[0] == 1 {
                    return other.shift(self.val);
                }
                let n = self.digits.len() + other.digits.len() - 1;
                let mut acc: SmallVec<[u64; 16]> = smallvec::smallvec![0; n];
                for (a, &da) in self.digits.iter().enumerate() {
                    if da == 0 {
                        continue;
                    }
                    for (b, &db) in other.digits.iter().enumerate() {
                        acc[a + b] += da as u64 * db as u64;
                    }
                }
                let buf: Digits = acc.iter().map(|&c| (c % p) as Digit).collect();
                Self::normalized(self.field, self.val + other.val, &buf, EXACT)
            }
            Backend::MixedChar => {
                let la = self.lower_valuation() as i64;
                let lb = other.lower_valuation() as i64;
                let prec = (la + other.prec as i64).min(lb + self.prec as i64);
                let prec = prec.clamp(i32::MIN as i64 / 2, i32::MAX as i64 / 2) as i32;
                if self.digits.is_empty() || other.digits.is_empty() {
                    return Scalar { field: self.field, val: 0, digits: Digits::new(), prec };
                }
                let val = self.val + other.val;
                if val >= prec {
                    return Scalar { field: self.field, val: 0, digits: Digits::new(), prec };
                }
                let n = (prec - val) as usize;
                let mut acc: SmallVec<[u64; 16]> = smallvec::smallvec![0; n];
                for (a, &da) in self.digits.iter().enumerate() {
                    if a >= n {
                        break;
                    }
                    for (b, &db) in other.digits.iter().enumerate() {
                        if a + b >= n {
                            break;
                        }
                        acc[a + b] += da as u64 * db as u64;
                    }
                }
                let mut buf: Digits = smallvec::smallvec![0; n];
                let mut carry = 0u64;
                for k in 0..n {
                    let s = acc[k] + carry;
                    buf[k] = (s % p) as Digit;
                    carry = s / p;
                }
                Self::normalized(self.field, val, &buf, prec)
            }
        }
    }

    /// Division by an element of valuation zero.
    pub fn div_by_unit(&self, y: &Scalar) -> Result<Scalar> {
        self.check_same_field(y);
        if !y.is_unit() {
            return Err(Error::Domain(format!("division by the non-unit {y}")));
        }
        let p = self.field.p as u64;
        let inv0 = inv_mod(y.digits[0] as u64, p);
        match self.field.backend {
            Backend::EqualChar => {
                if self.digits.is_empty() {
                    return Ok(self.clone());
                }
                // Exact long division of polynomials in t with nonzero constant term.
                let dy = y.digits.len() - 1;
                let dx = self.digits.len() - 1;
                if dx < dy {
                    return Err(Error::Domain(format!(
                        "{self} / {y} is not a finite Laurent polynomial"
                    )));
                }
                let mut rem: Vec<u64> = self.digits.iter().map(|&d| d as u64).collect();
                let mut quo: Digits = smallvec::smallvec![0; dx - dy + 1];
                for k in 0..=dx - dy {
                    let c = rem[k] % p * inv0 % p;
                    quo[k] = c as Digit;
                    if c != 0 {
                        for (b, &db) in y.digits.iter().enumerate() {
                            rem[k + b] = (rem[k + b] + p * p - c * db as u64 % p) % p;
                        }
                    }
                }
                if rem.iter().any(|&r| r % p != 0) {
                    return Err(Error::Domain(format!(
                        "{self} / {y} is not a finite Laurent polynomial"
                    )));
                }
                Ok(Self::normalized(self.field, self.val, &quo, EXACT))
            }
            Backend::MixedChar => {
                let prec = self.prec.min(self.lower_valuation().saturating_add(y.prec));
                if self.digits.is_empty() || self.val >= prec {
                    return Ok(Scalar { field: self.field, val: 0, digits: Digits::new(), prec });
                }
                let n = (prec - self.val) as usize;
                let mut rem: Vec<i64> = (0..n).map(|k| self.digit(self.val + k as i32) as i64).collect();
                let yd: Vec<i64> = (0..n).map(|k| y.digit(k as i32) as i64).collect();
                let pi = p as i64;
                let mut quo: Digits = smallvec::smallvec![0; n];
                for k in 0..n {
                    let r = rem[k].rem_euclid(pi);
                    let c = (r as u64 * inv0 % p) as i64;
                    quo[k] = c as Digit;
                    if c != 0 {
                        for b in 0..n - k {
                            rem[k + b] -= c * yd[b];
                        }
                    }
                    // Carry the (exactly divisible) remainder digit upward.
                    let r = rem[k];
                    debug_assert_eq!(r.rem_euclid(pi), 0);
                    if k + 1 < n {
                        rem[k + 1] += r.div_euclid(pi);
                    }
                }
                Ok(Self::normalized(self.field, self.val, &quo, prec))
            }
        }
    }

    /// Checked arithmetic with the error contract of the public API.
    pub fn arith(&self, y: &Scalar, op: ArithOp) -> Result<Scalar> {
        if self.field != y.field {
            return Err(Error::Domain("operands belong to different fields".into()));
        }
        let r = match op {
            ArithOp::Add => self + y,
            ArithOp::Sub => self - y,
            ArithOp::Mul => self * y,
            ArithOp::DivByUnit => self.div_by_unit(y)?,
        };
        match self.field.backend {
            Backend::EqualChar => {
                if r.support_width() > self.field.precision as usize {
                    return Err(Error::Precision(format!(
                        "support width {} exceeds guard {}",
                        r.support_width(),
                        self.field.precision
                    )));
                }
            }
            Backend::MixedChar => {
                if r.prec < 1 {
                    return Err(Error::Precision(format!(
                        "result only known modulo p^{}",
                        r.prec
                    )));
                }
            }
        }
        Ok(r)
    }

    /// Keeps the terms of exponent at most zero: the polynomial part in 1/t.
    pub fn integral_part(&self) -> Result<Scalar> {
        if self.field.backend != Backend::EqualChar {
            return Err(Error::UnsupportedBackend {
                backend: self.field.backend.to_string(),
                what: "integral part".into(),
            });
        }
        if self.digits.is_empty() || self.val > 0 {
            return Ok(Scalar::zero(self.field));
        }
        let end = ((1 - self.val) as usize).min(self.digits.len());
        Ok(Self::normalized(self.field, self.val, &self.digits[..end], EXACT))
    }

    /// True when every term has exponent at most zero (the element lies in F_p[1/t]).
    pub fn is_polynomial_in_inverse(&self) -> bool {
        self.field.backend == Backend::EqualChar && (self.digits.is_empty() || self.end_exponent() <= 1)
    }

    /// Keeps the coefficients of t^0 .. t^d of an integral element.
    pub fn truncate_poly(&self, d: u32) -> Result<Scalar> {
        if self.lower_valuation() < 0 {
            return Err(Error::Domain(format!("truncation of the non-integral element {self}")));
        }
        let d = d as i32;
        if self.prec != EXACT && self.prec <= d {
            return Err(Error::Precision(format!(
                "coefficient of t^{d} unknown at precision {}",
                self.prec
            )));
        }
        if self.digits.is_empty() || self.val > d {
            return Ok(Scalar::zero(self.field));
        }
        let end = ((d + 1 - self.val) as usize).min(self.digits.len());
        Ok(Self::normalized(self.field, self.val, &self.digits[..end], Self::base_prec(&self.field)))
    }

    /// Reduction of coefficients modulo t^k for an integral element, returned
    /// as the digit vector of length k.
    pub fn residue_digits(&self, k: u32) -> Result<Vec<u32>> {
        if self.lower_valuation() < 0 {
            return Err(Error::Domain(format!("cannot reduce the non-integral element {self}")));
        }
        if self.prec != EXACT && self.prec < k as i32 {
            return Err(Error::Precision(format!(
                "residue mod t^{k} needs precision {k}, have {}",
                self.prec
            )));
        }
        Ok((0..k as i32).map(|e| self.digit(e)).collect())
    }

    /// Parses the text format produced by `Display`.
    pub fn parse(field: FieldConfig, s: &str) -> Result<Scalar> {
        parse_scalar(field, s)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_impl(&rhs.neg_impl())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_impl(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.add_impl(&rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.mul_impl(&rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_impl()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (e, d) in self.terms() {
            let mono = match e {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{e}"),
            };
            parts.push(match (d, mono.is_empty()) {
                (_, true) => d.to_string(),
                (1, false) => mono,
                (_, false) => format!("{d}*{mono}"),
            });
        }
        if self.prec != EXACT {
            parts.push(format!("O(t^{})", self.prec));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

fn parse_scalar(field: FieldConfig, s: &str) -> Result<Scalar> {
    let err = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty input"));
    }
    // Split into signed terms; a '-' directly after '^' belongs to an exponent.
    let bytes: Vec<char> = compact.chars().collect();
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for (idx, &c) in bytes.iter().enumerate() {
        let after_caret = idx > 0 && bytes[idx - 1] == '^';
        if (c == '+' || c == '-') && !after_caret {
            if !cur.is_empty() {
                terms.push((negative, std::mem::take(&mut cur)));
                negative = false;
            }
            if c == '-' {
                negative = !negative;
            }
        } else {
            cur.push(c);
        }
    }
    if cur.is_empty() {
        return Err(err("trailing sign"));
    }
    terms.push((negative, cur));

    let parse_exp = |t: &str| -> Result<i32> {
        if t == "t" {
            Ok(1)
        } else if let Some(e) = t.strip_prefix("t^") {
            e.parse::<i32>().map_err(|_| err("bad exponent"))
        } else {
            Err(err("bad monomial"))
        }
    };

    let mut acc = Scalar::zero(field);
    let mut precision: Option<i32> = None;
    for (neg, term) in terms {
        if let Some(inner) = term.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            if neg {
                return Err(err("negative O-term"));
            }
            if field.backend != Backend::MixedChar {
                return Err(err("O-term for an exact backend"));
            }
            precision = Some(parse_exp(inner)?);
            continue;
        }
        let (coef, exp) = if let Some((c, m)) = term.split_once('*') {
            (c.parse::<i64>().map_err(|_| err("bad coefficient"))?, parse_exp(m)?)
        } else if term.starts_with('t') {
            (1, parse_exp(&term)?)
        } else {
            (term.parse::<i64>().map_err(|_| err("bad coefficient"))?, 0)
        };
        let coef = if neg { -coef } else { coef };
        acc = &acc + &Scalar::monomial(field, coef, exp);
    }
    if let Some(n) = precision {
        let digits: Digits = acc.digits.clone();
        acc = Scalar::normalized(field, acc.val, &digits, n);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldConfig {
        FieldConfig::equal_char(3).unwrap()
    }

    fn q2() -> FieldConfig {
        FieldConfig::mixed_char(2, 16).unwrap()
    }

    #[test]
    fn monomial_product() {
        let t = Scalar::pi_pow(f3(), 1);
        let t2 = &t * &t;
        assert_eq!(t2.valuation(), Some(2));
        assert_eq!(t2, Scalar::pi_pow(f3(), 2));
    }

    #[test]
    fn cancellation() {
        let f = f3();
        let x = &Scalar::one(f) + &Scalar::pi_pow(f, 1);
        let y = Scalar::from_int(f, -1);
        assert_eq!(&x + &y, Scalar::pi_pow(f, 1));
    }

    #[test]
    fn two_adic_carry() {
        let f = q2();
        let two = &Scalar::one(f) + &Scalar::one(f);
        assert_eq!(two.valuation(), Some(1));
        assert_eq!(two, Scalar::from_int(f, 2));
        assert_eq!(two.precision(), Some(16));
    }

    #[test]
    fn two_adic_negation_and_products() {
        let f = q2();
        for a in -40i64..40 {
            for b in -40i64..40 {
                let x = Scalar::from_int(f, a);
                let y = Scalar::from_int(f, b);
                assert!((&x + &y).agrees_with(&Scalar::from_int(f, a + b)));
                assert!((&x - &y).agrees_with(&Scalar::from_int(f, a - b)));
                assert!((&x * &y).agrees_with(&Scalar::from_int(f, a * b)));
            }
        }
    }

    #[test]
    fn padic_division() {
        let f = FieldConfig::mixed_char(3, 12).unwrap();
        let x = Scalar::from_int(f, 10);
        let y = Scalar::from_int(f, 7);
        let q = x.div_by_unit(&y).unwrap();
        assert!((&q * &y).agrees_with(&x));
        assert!(x.div_by_unit(&Scalar::from_int(f, 3)).is_err());
    }

    #[test]
    fn laurent_division() {
        let f = f3();
        let y = Scalar::from_digits(f, 0, &[1, 1]);
        let x = &y * &Scalar::from_digits(f, -2, &[2, 0, 1]);
        assert_eq!(x.div_by_unit(&y).unwrap(), Scalar::from_digits(f, -2, &[2, 0, 1]));
        assert!(Scalar::one(f).div_by_unit(&y).is_err());
        assert_eq!(Scalar::one(f).div_by_unit(&Scalar::from_int(f, 2)).unwrap(), Scalar::from_int(f, 2));
    }

    #[test]
    fn integral_part_examples() {
        let f = f3();
        let x = Scalar::parse(f, "t^-2 + 1 + t").unwrap();
        assert_eq!(x.integral_part().unwrap().to_string(), "t^-2 + 1");
        assert!(Scalar::pi_pow(f, 3).integral_part().unwrap().is_zero());
        let y = Scalar::parse(f, "t^-1 + t^-3 + t^5").unwrap();
        assert_eq!(y.integral_part().unwrap(), Scalar::parse(f, "t^-3 + t^-1").unwrap());
        assert!(Scalar::one(q2()).integral_part().is_err());
    }

    #[test]
    fn truncation_examples() {
        let f = f3();
        let x = Scalar::from_digits(f, 0, &[1, 1, 1, 1]);
        assert_eq!(x.truncate_poly(2).unwrap(), Scalar::from_digits(f, 0, &[1, 1, 1]));
        assert!(Scalar::pi_pow(f, 1).truncate_poly(0).unwrap().is_zero());
        assert!(Scalar::pi_pow(f, -1).truncate_poly(3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = f3();
        let x = Scalar::parse(f, "2*t^-3 + 1 + t^2").unwrap();
        assert_eq!(x.to_string(), "2*t^-3 + 1 + t^2");
        assert_eq!(Scalar::parse(f, "-t^-3 - 2 + 4*t^2").unwrap(), x);
        assert_eq!(Scalar::parse(f, "0").unwrap(), Scalar::zero(f));
        let y = Scalar::parse(q2(), "1 + t^3 + O(t^10)").unwrap();
        assert_eq!(y.to_string(), "1 + t^3 + O(t^10)");
        assert_eq!(Scalar::parse(q2(), &y.to_string()).unwrap(), y);
        assert!(Scalar::parse(f, "t^").is_err());
        assert!(Scalar::parse(f, "1 +").is_err());
    }

    #[test]
    fn padic_precision_never_overstated() {
        let f = FieldConfig::mixed_char(3, 10).unwrap();
        let x = Scalar::pi_pow(f, -4);
        let y = &x * &Scalar::one(f);
        assert_eq!(y.precision(), Some(6));
        let z = &x * &x;
        assert_eq!(z.precision(), Some(2));
        assert!(z.arith(&x, ArithOp::Mul).is_err());
    }
}
