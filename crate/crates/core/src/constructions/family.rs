use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{Backend, FieldConfig, ResidueElement, ResidueRing, Scalar, Section};
use crate::symplectic::{CartanPair, Mat4};

/// Which explicit family of matrices is being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// (i,j) -> (i,j+1) when 2 is not zero in F.
    Move1CharNeq2,
    /// (i,j) -> (i,j+2) in characteristic 2.
    Move1Char2,
    /// (i,j) -> (i+1,j-1).
    Move2,
    /// (i,j) -> (i,j+1) with all entries in F_p[1/t].
    LatticeMove1,
}

/// Correction applied to the Move2 matrix alpha when i+j is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OddCorrection {
    /// Left multiplication by I + t^-1 E_{3,0} (zero-based indices).
    LowerCorner,
    /// Left multiplication by I + t^-1 E_{1,2}, the unipotent that removes the
    /// truncation in the middle block. It only separates the fibers when j >= 4.
    MiddleBlock,
}

/// A two-parameter-block family alpha(a, b), beta(x, y) together with the
/// cosets expected on the two fibers y = sum a_r x_r + b + t^k and
/// y = sum a_r x_r + b + t^(k-1), parameters ranging over O/t^modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveFamily {
    pub kind: MoveKind,
    pub field: FieldConfig,
    pub base: CartanPair,
    /// Fiber scale.
    pub k: u32,
    /// Number of x-parameters (and of a-parameters).
    pub n: usize,
    /// Parameters live in O/t^modulus.
    pub modulus: u32,
    /// Offset exponent on the first fiber; the offset is zero when it is >= modulus.
    pub on_offset_exponent: u32,
    /// Offset exponent on the second fiber.
    pub off_offset_exponent: u32,
    pub target_on: CartanPair,
    pub target_off: CartanPair,
    pub lattice_required: bool,
    /// False for Move2 families with j < 3, which are built for exploration only.
    pub within_hypotheses: bool,
    /// Integer m entering the matrix formulas.
    pub m: i32,
    pub odd_correction: Option<OddCorrection>,
}

fn floor_half(n: u32) -> i32 {
    (n / 2) as i32
}

fn check_chamber(i: u32, j: u32) -> Result<CartanPair> {
    CartanPair::new(i, j)
}

/// The (i,j) -> (i,j+1) family for fields where 2 != 0.
pub fn build_move1_charneq2(field: FieldConfig, i: u32, j: u32) -> Result<MoveFamily> {
    let v0 = field.v0().ok_or_else(|| {
        Error::WrongCharacteristic("this family divides by 2; use the characteristic-2 family".into())
    })?;
    let base = check_chamber(i, j)?;
    if i < 1 || i < j + v0 + 1 {
        return Err(Error::Domain(format!("need i >= 1 and i - j >= {} at {base}", v0 + 1)));
    }
    let m = floor_half(i + j);
    let k = 2 * m - 2 * j as i32 - v0 as i32;
    if k < 2 {
        return Err(Error::Domain(format!("fiber scale k = {k} < 2 at {base}")));
    }
    let k = k as u32;
    Ok(MoveFamily {
        kind: MoveKind::Move1CharNeq2,
        field,
        base,
        k,
        n: 1,
        modulus: k,
        on_offset_exponent: k,
        off_offset_exponent: k - 1,
        target_on: base,
        target_off: CartanPair::new(i, j + 1)?,
        lattice_required: false,
        within_hypotheses: true,
        m,
        odd_correction: None,
    })
}

/// The (i,j) -> (i,j+2) family in characteristic 2.
pub fn build_move1_char2(field: FieldConfig, i: u32, j: u32) -> Result<MoveFamily> {
    if !(field.backend == Backend::EqualChar && field.p == 2) {
        return Err(Error::WrongCharacteristic(format!("characteristic-2 family over {field}")));
    }
    let base = check_chamber(i, j)?;
    if i < j + 2 {
        return Err(Error::Domain(format!("need i >= j + 2 at {base}")));
    }
    let m = floor_half(i + j);
    let k = m - j as i32 - 1;
    if k < 1 {
        return Err(Error::Domain(format!("fiber scale k = {k} < 1 at {base}")));
    }
    let k = k as u32;
    Ok(MoveFamily {
        kind: MoveKind::Move1Char2,
        field,
        base,
        k,
        n: 1,
        modulus: k,
        on_offset_exponent: k,
        off_offset_exponent: k - 1,
        target_on: base,
        target_off: CartanPair::new(i, j + 2)?,
        lattice_required: false,
        within_hypotheses: true,
        m,
        odd_correction: None,
    })
}

/// The (i,j) -> (i+1,j-1) family with the default odd-parity correction.
pub fn build_move2(field: FieldConfig, i: u32, j: u32) -> Result<MoveFamily> {
    build_move2_with(field, i, j, OddCorrection::LowerCorner)
}

/// The (i,j) -> (i+1,j-1) family. Parameters live in O/t^(m+1) with
/// m = floor((i+j)/2) - 1 and the fibers are separated at scale k = j - 2.
pub fn build_move2_with(field: FieldConfig, i: u32, j: u32, correction: OddCorrection) -> Result<MoveFamily> {
    let base = check_chamber(i, j)?;
    if j < 1 {
        return Err(Error::Domain(format!("Move2 needs j >= 1 at {base}")));
    }
    if i + j < 2 {
        return Err(Error::Domain(format!("Move2 needs i + j >= 2 at {base}")));
    }
    let m = floor_half(i + j) - 1;
    let modulus = (m + 1) as u32;
    let k = j.saturating_sub(2).max(1).min(modulus);
    let odd = (i + j) % 2 == 1;
    Ok(MoveFamily {
        kind: MoveKind::Move2,
        field,
        base,
        k,
        n: 2,
        modulus,
        on_offset_exponent: k,
        off_offset_exponent: k - 1,
        target_on: base,
        target_off: CartanPair::new(i + 1, j - 1)?,
        lattice_required: false,
        within_hypotheses: j >= 3,
        m,
        odd_correction: odd.then_some(correction),
    })
}

/// The (i,j) -> (i,j+1) family whose matrices lie in Sp4(F_p[1/t]).
pub fn build_lattice_move1(field: FieldConfig, i: u32, j: u32) -> Result<MoveFamily> {
    if field.backend != Backend::EqualChar {
        return Err(Error::UnsupportedBackend {
            backend: field.backend.to_string(),
            what: "integral parts".into(),
        });
    }
    if field.p == 2 {
        return Err(Error::WrongCharacteristic("the lattice family divides by 2 and 4".into()));
    }
    let base = check_chamber(i, j)?;
    if i <= j {
        return Err(Error::Domain(format!("lattice family needs i > j at {base}")));
    }
    let k = i - j;
    Ok(MoveFamily {
        kind: MoveKind::LatticeMove1,
        field,
        base,
        k,
        n: 1,
        modulus: i + 1,
        on_offset_exponent: k,
        off_offset_exponent: k - 1,
        target_on: base,
        target_off: CartanPair::new(i, j + 1)?,
        lattice_required: true,
        within_hypotheses: true,
        m: i as i32,
        odd_correction: None,
    })
}

impl MoveFamily {
    pub fn ring(&self) -> ResidueRing {
        ResidueRing { field: self.field, k: self.modulus }
    }

    /// Number of parameter tuples (a_1..a_n, b, x_1..x_n); y is determined by the fiber.
    pub fn tuple_count(&self) -> u128 {
        self.ring().size().saturating_pow(2 * self.n as u32 + 1)
    }

    /// Whether the stated lower bound k >= (i-j-2)/2 of the characteristic-2
    /// move holds for the achieved k.
    pub fn k_meets_stated_bound(&self) -> Option<bool> {
        match self.kind {
            MoveKind::Move1Char2 => {
                let (i, j) = (self.base.i as i64, self.base.j as i64);
                Some(2 * self.k as i64 >= i - j - 2)
            }
            _ => None,
        }
    }

    /// Negative-control variant: the second fiber uses the given offset
    /// exponent while the expected cosets stay unchanged.
    pub fn with_off_offset(mut self, exponent: u32) -> MoveFamily {
        self.off_offset_exponent = exponent;
        self
    }

    /// The offset t^e as a residue (zero when e >= modulus).
    pub fn offset(&self, e: u32) -> ResidueElement {
        self.ring().pi_pow(e)
    }

    /// y = sum a_r x_r + b + offset.
    pub fn fiber_y(&self, a: &[ResidueElement], b: &ResidueElement, x: &[ResidueElement], offset: &ResidueElement) -> ResidueElement {
        let mut y = b.add(offset);
        for (ar, xr) in a.iter().zip(x) {
            y = y.add(&ar.mul(xr));
        }
        y
    }

    fn pw(&self, e: i32) -> Scalar {
        Scalar::pi_pow(self.field, e)
    }

    fn ip(&self, x: &Scalar) -> Scalar {
        x.integral_part().expect("lattice families use the exact backend")
    }

    /// The matrix alpha(a, b).
    pub fn alpha(&self, a: &[ResidueElement], b: &ResidueElement, sec: &dyn Section) -> Mat4 {
        let f = self.field;
        let (i, j, m) = (self.base.i as i32, self.base.j as i32, self.m);
        let zero = || Scalar::zero(f);
        let one = || Scalar::one(f);
        match self.kind {
            MoveKind::Move1CharNeq2 => {
                let sa = sec.lift(&a[0]);
                let sb = sec.lift(&b.clone());
                let two = Scalar::from_int(f, 2);
                let corner = &(&sa * &sa) - &(&two * &sb);
                let l = Mat4 {
                    entries: [
                        [one(), zero(), zero(), zero()],
                        [zero(), one(), zero(), zero()],
                        [sa.clone(), one(), one(), zero()],
                        [corner, sa, zero(), one()],
                    ],
                };
                let d = Mat4::diag([self.pw(m), self.pw(i - m + j), self.pw(-i + m - j), self.pw(-m)]);
                d.mul(&l)
            }
            MoveKind::Move1Char2 => {
                let sa = sec.lift(&a[0]);
                let sb = sec.lift(b);
                let u = &one() + &(&self.pw(1) * &sa);
                let e = -i + m - j;
                Mat4 {
                    entries: [
                        [self.pw(m), zero(), zero(), zero()],
                        [zero(), self.pw(i - m + j), zero(), zero()],
                        [&self.pw(e + 1) * &sb, &self.pw(e) * &(&u * &u), self.pw(e), zero()],
                        [zero(), &self.pw(-m + 1) * &sb, zero(), self.pw(-m)],
                    ],
                }
            }
            MoveKind::Move2 => {
                let c: Vec<Scalar> = a
                    .iter()
                    .map(|ar| &self.pw(-m - 1) * &(&one() + &(&self.pw(1) * &sec.lift(ar))))
                    .collect();
                let w = -&(&self.pw(-2 * m) * &sec.lift(b));
                let alpha1 = heisenberg(f, [-&c[0], c[1].clone()], [c[1].clone(), c[0].clone()], w);
                match self.odd_correction {
                    None => alpha1,
                    Some(OddCorrection::LowerCorner) => {
                        let mut e = Mat4::identity(f);
                        e.set(3, 0, self.pw(-1));
                        e.mul(&alpha1)
                    }
                    Some(OddCorrection::MiddleBlock) => {
                        let mut e = Mat4::identity(f);
                        e.set(1, 2, self.pw(-1));
                        e.mul(&alpha1)
                    }
                }
            }
            MoveKind::LatticeMove1 => {
                let pi_i = self.pw(-i);
                let ea = self.ip(&(&pi_i * &sec.lift(&a[0])));
                let corner = self.ip(&(&pi_i * &sec.lift(&a[0].mul(&a[0]).sub(b))));
                Mat4 {
                    entries: [
                        [one(), zero(), ea.clone(), corner],
                        [zero(), one(), pi_i, ea],
                        [zero(), zero(), one(), zero()],
                        [zero(), zero(), zero(), one()],
                    ],
                }
            }
        }
    }

    /// The matrix beta(x, y).
    pub fn beta(&self, x: &[ResidueElement], y: &ResidueElement, sec: &dyn Section) -> Mat4 {
        let f = self.field;
        let (j, m) = (self.base.j as i32, self.m);
        let zero = || Scalar::zero(f);
        let one = || Scalar::one(f);
        match self.kind {
            MoveKind::Move1CharNeq2 => {
                let sx = sec.lift(&x[0]);
                let sy = sec.lift(y);
                let two = Scalar::from_int(f, 2);
                let corner = &(&sx * &sx) + &(&two * &sy);
                let l = Mat4 {
                    entries: [
                        [one(), zero(), zero(), zero()],
                        [zero(), one(), zero(), zero()],
                        [sx.clone(), zero(), one(), zero()],
                        [corner, sx, zero(), one()],
                    ],
                };
                let d = Mat4::diag([self.pw(-m + j), self.pw(-m + j), self.pw(m - j), self.pw(m - j)]);
                l.mul(&d)
            }
            MoveKind::Move1Char2 => {
                let sx = sec.lift(&x[0]);
                let sy = sec.lift(y);
                let s = &self.pw(-m + j);
                let mix = s * &(&sx + &(&self.pw(1) * &sy));
                Mat4 {
                    entries: [
                        [s.clone(), zero(), zero(), zero()],
                        [zero(), s.clone(), zero(), zero()],
                        [mix.clone(), zero(), self.pw(m - j), zero()],
                        [s * &(&sx * &sx), mix, zero(), self.pw(m - j)],
                    ],
                }
            }
            MoveKind::Move2 => {
                let s1 = &self.pw(-m) * &sec.lift(&x[0]);
                let s2 = &self.pw(-m) * &sec.lift(&x[1]);
                let w = &(&self.pw(-2 * m - 1) * &(&sec.lift(&x[0]) + &sec.lift(&x[1])))
                    + &(&self.pw(-2 * m) * &sec.lift(y));
                heisenberg(f, [s2.clone(), s1.clone()], [s1, -&s2], w)
            }
            MoveKind::LatticeMove1 => {
                let i = self.base.i as i32;
                let pi_i = self.pw(-i);
                let ring = self.ring();
                let half = ring.from_int(2).inverse().expect("p is odd");
                let quarter = half.mul(&half);
                let xh = self.ip(&(&pi_i * &sec.lift(&x[0].mul(&half))));
                let corner = self.ip(&(&pi_i * &sec.lift(&x[0].mul(&x[0]).mul(&quarter).add(y))));
                Mat4 {
                    entries: [
                        [one(), zero(), xh.clone(), corner],
                        [zero(), one(), zero(), xh],
                        [zero(), zero(), one(), zero()],
                        [zero(), zero(), zero(), one()],
                    ],
                }
            }
        }
    }
}

/// The unipotent [[1,u1,u2,w],[0,1,0,s1],[0,0,1,s2],[0,0,0,1]]; it is
/// symplectic exactly when s1 = u2 and s2 = -u1.
pub fn heisenberg(field: FieldConfig, u: [Scalar; 2], s: [Scalar; 2], w: Scalar) -> Mat4 {
    let zero = || Scalar::zero(field);
    let one = || Scalar::one(field);
    let [u1, u2] = u;
    let [s1, s2] = s;
    Mat4 {
        entries: [
            [one(), u1, u2, w],
            [zero(), one(), zero(), s1],
            [zero(), zero(), one(), s2],
            [zero(), zero(), zero(), one()],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::CanonicalSection;

    #[test]
    fn fiber_scales() {
        let f3 = FieldConfig::equal_char(3).unwrap();
        assert_eq!(build_move1_charneq2(f3, 4, 1).unwrap().k, 2);
        assert!(build_move1_charneq2(f3, 2, 1).is_err());
        let f2 = FieldConfig::equal_char(2).unwrap();
        assert_eq!(build_move1_char2(f2, 6, 1).unwrap().k, 1);
        assert!(matches!(build_move1_charneq2(f2, 6, 1), Err(Error::WrongCharacteristic(_))));
        assert!(matches!(build_move1_char2(f3, 6, 1), Err(Error::WrongCharacteristic(_))));
        assert!(matches!(build_lattice_move1(f2, 3, 1), Err(Error::WrongCharacteristic(_))));
        let fam = build_move2(f3, 4, 3).unwrap();
        assert_eq!((fam.m, fam.modulus, fam.k), (2, 3, 1));
        assert!(build_move2(f3, 2, 3).is_err());
        assert!(!build_move2(f3, 3, 2).unwrap().within_hypotheses);
    }

    #[test]
    fn char2_stated_bound() {
        let f2 = FieldConfig::equal_char(2).unwrap();
        assert_eq!(build_move1_char2(f2, 8, 2).unwrap().k_meets_stated_bound(), Some(true));
        assert_eq!(build_move1_char2(f2, 9, 2).unwrap().k_meets_stated_bound(), Some(false));
    }

    #[test]
    fn all_alphas_symplectic_small() {
        let f3 = FieldConfig::equal_char(3).unwrap();
        let fam = build_move1_charneq2(f3, 4, 1).unwrap();
        let ring = fam.ring();
        for a in ring.elements() {
            for b in ring.elements() {
                assert!(fam.alpha(&[a.clone()], &b, &CanonicalSection).is_symplectic());
            }
        }
    }
}
