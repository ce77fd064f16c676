use rand::Rng;
use std::fmt;

use crate::error::{Error, Result};
use crate::localfield::{FieldConfig, Scalar};

/// A 4x4 matrix over the local field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat4 {
    pub entries: [[Scalar; 4]; 4],
}

/// Index pairs (r1 < r2) labelling the basis of the exterior square.
pub const WEDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Sign of row r of the form J: J maps e_{3-r} to +e_r for r < 2, -e_r otherwise.
#[inline]
fn j_sign(r: usize) -> i64 {
    if r < 2 {
        1
    } else {
        -1
    }
}

impl Mat4 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Scalar) -> Mat4 {
        Mat4 {
            entries: [
                [f(0, 0), f(0, 1), f(0, 2), f(0, 3)],
                [f(1, 0), f(1, 1), f(1, 2), f(1, 3)],
                [f(2, 0), f(2, 1), f(2, 2), f(2, 3)],
                [f(3, 0), f(3, 1), f(3, 2), f(3, 3)],
            ],
        }
    }

    pub fn zero(field: FieldConfig) -> Mat4 {
        Self::from_fn(|_, _| Scalar::zero(field))
    }

    pub fn identity(field: FieldConfig) -> Mat4 {
        Self::from_fn(|r, c| if r == c { Scalar::one(field) } else { Scalar::zero(field) })
    }

    pub fn diag(d: [Scalar; 4]) -> Mat4 {
        let field = *d[0].field();
        let mut m = Self::zero(field);
        for (k, x) in d.into_iter().enumerate() {
            m.entries[k][k] = x;
        }
        m
    }

    /// Matrices with integer entries given row by row.
    pub fn from_ints(field: FieldConfig, rows: [[i64; 4]; 4]) -> Mat4 {
        Self::from_fn(|r, c| Scalar::from_int(field, rows[r][c]))
    }

    /// The alternating form with J[0][3] = J[1][2] = 1 and J[2][1] = J[3][0] = -1.
    pub fn j_form(field: FieldConfig) -> Mat4 {
        Self::from_fn(|r, c| {
            if r + c == 3 {
                Scalar::from_int(field, j_sign(r))
            } else {
                Scalar::zero(field)
            }
        })
    }

    /// D(i,j) = diag(t^-i, t^-j, t^j, t^i).
    pub fn cartan_diag(field: FieldConfig, i: i32, j: i32) -> Mat4 {
        Self::diag([
            Scalar::pi_pow(field, -i),
            Scalar::pi_pow(field, -j),
            Scalar::pi_pow(field, j),
            Scalar::pi_pow(field, i),
        ])
    }

    pub fn field(&self) -> FieldConfig {
        *self.entries[0][0].field()
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        self.entries[r][c] = x;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Scalar> {
        self.entries.iter().flat_map(|row| row.iter())
    }

    pub fn transpose(&self) -> Mat4 {
        Self::from_fn(|r, c| self.entries[c][r].clone())
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let field = self.field();
        Self::from_fn(|r, c| {
            let mut acc = Scalar::zero(field);
            for k in 0..4 {
                let a = &self.entries[r][k];
                let b = &other.entries[k][c];
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                let prod = a * b;
                acc = if acc.is_exact_zero() { prod } else { &acc + &prod };
            }
            acc
        })
    }

    /// Entrywise agreement to working precision.
    pub fn agrees_with(&self, other: &Mat4) -> bool {
        self.iter().zip(other.iter()).all(|(a, b)| a.agrees_with(b))
    }

    pub fn add(&self, other: &Mat4) -> Mat4 {
        Self::from_fn(|r, c| &self.entries[r][c] + &other.entries[r][c])
    }

    pub fn scale(&self, s: &Scalar) -> Mat4 {
        Self::from_fn(|r, c| &self.entries[r][c] * s)
    }

    /// (g^t J g)[a][b], computed without forming J explicitly.
    fn form_entry(&self, a: usize, b: usize) -> Scalar {
        let g = &self.entries;
        let mut acc = Scalar::zero(self.field());
        for r in 0..4 {
            let x = &g[r][a];
            let y = &g[3 - r][b];
            if x.is_exact_zero() || y.is_exact_zero() {
                continue;
            }
            let prod = x * y;
            acc = match (acc.is_exact_zero(), j_sign(r) > 0) {
                (true, true) => prod,
                (true, false) => -prod,
                (false, true) => &acc + &prod,
                (false, false) => &acc - &prod,
            };
        }
        acc
    }

    /// Exact test of g^t J g = J.
    pub fn is_symplectic(&self) -> bool {
        let field = self.field();
        let one = Scalar::one(field);
        let minus_one = Scalar::from_int(field, -1);
        for a in 0..4 {
            for b in a..4 {
                let e = self.form_entry(a, b);
                let ok = if a + b == 3 {
                    e.agrees_with(if a < 2 { &one } else { &minus_one })
                } else {
                    e.is_zero()
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// The inverse g^-1 = J^-1 g^t J of a symplectic matrix (not checked).
    pub fn symplectic_inverse_unchecked(&self) -> Mat4 {
        // inv[r][c] = -sign(r) * sign(3-c) * g[3-c][3-r]
        Self::from_fn(|r, c| {
            let x = &self.entries[3 - c][3 - r];
            if j_sign(r) * j_sign(3 - c) > 0 {
                -x
            } else {
                x.clone()
            }
        })
    }

    /// 2x2 minor on rows (r1, r2) and columns (c1, c2).
    pub fn minor(&self, (r1, r2): (usize, usize), (c1, c2): (usize, usize)) -> Scalar {
        let g = &self.entries;
        &(&g[r1][c1] * &g[r2][c2]) - &(&g[r1][c2] * &g[r2][c1])
    }

    /// The exterior square: the 6x6 matrix of 2x2 minors indexed by [`WEDGE_PAIRS`].
    pub fn wedge_square(&self) -> Vec<Vec<Scalar>> {
        WEDGE_PAIRS
            .iter()
            .map(|&rows| WEDGE_PAIRS.iter().map(|&cols| self.minor(rows, cols)).collect())
            .collect()
    }

    /// True when every entry lies in F_p[1/t].
    pub fn in_lattice(&self) -> bool {
        self.iter().all(|x| x.is_polynomial_in_inverse())
    }

    /// True when every entry lies in O.
    pub fn is_integral(&self) -> bool {
        self.iter().all(|x| x.is_integral())
    }

    /// Entries rendered in the scalar text format.
    pub fn to_strings(&self) -> [[String; 4]; 4] {
        let e = &self.entries;
        std::array::from_fn(|r| std::array::from_fn(|c| e[r][c].to_string()))
    }

    pub fn from_strings(field: FieldConfig, rows: &[[String; 4]; 4]) -> Result<Mat4> {
        let mut m = Mat4::zero(field);
        for r in 0..4 {
            for c in 0..4 {
                m.entries[r][c] = Scalar::parse(field, &rows[r][c])?;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.entries.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
            if r < 3 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// A matrix certified to satisfy g^t J g = J.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement(Mat4);

impl GroupElement {
    pub fn new(m: Mat4) -> Result<GroupElement> {
        if m.is_symplectic() {
            Ok(GroupElement(m))
        } else {
            Err(Error::Domain(format!("matrix is not symplectic:\n{m}")))
        }
    }

    pub fn identity(field: FieldConfig) -> GroupElement {
        GroupElement(Mat4::identity(field))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement(self.0.mul(&other.0))
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement(self.0.symplectic_inverse_unchecked())
    }
}

/// Inverse of an arbitrary matrix that must be symplectic.
pub fn inv(m: &Mat4) -> Result<Mat4> {
    if !m.is_symplectic() {
        return Err(Error::Domain("inverse requested for a non-symplectic matrix".into()));
    }
    Ok(m.symplectic_inverse_unchecked())
}

/// Elementary root directions: each X satisfies X^2 = 0 and X^t J + J X = 0,
/// so I + cX is symplectic for every scalar c.
pub fn root_directions() -> Vec<Vec<(usize, usize, i64)>> {
    vec![
        vec![(0, 3, 1)],
        vec![(1, 2, 1)],
        vec![(2, 1, 1)],
        vec![(3, 0, 1)],
        vec![(0, 1, 1), (2, 3, -1)],
        vec![(0, 2, 1), (1, 3, 1)],
        vec![(1, 0, 1), (3, 2, -1)],
        vec![(2, 0, 1), (3, 1, 1)],
    ]
}

/// I + c X for the given root direction.
pub fn root_element(field: FieldConfig, dir: &[(usize, usize, i64)], c: &Scalar) -> Mat4 {
    let mut m = Mat4::identity(field);
    for &(r, col, s) in dir {
        m.entries[r][col] = if s > 0 { c.clone() } else { -c };
    }
    m
}

/// A seeded random element of Sp4(O): a word of length `word_len` in root
/// elements with integral coefficients of `digits` digits, interleaved with
/// the Weyl element J and constant diagonal units.
pub fn random_k_element<R: Rng + ?Sized>(
    field: FieldConfig,
    rng: &mut R,
    word_len: usize,
    digits: u32,
) -> Mat4 {
    let dirs = root_directions();
    let mut g = Mat4::identity(field);
    let p = field.p;
    for _ in 0..word_len {
        let factor = match rng.gen_range(0..10) {
            0 => Mat4::j_form(field),
            1 if p > 2 => {
                let u1 = Scalar::from_int(field, rng.gen_range(1..p) as i64);
                let u2 = Scalar::from_int(field, rng.gen_range(1..p) as i64);
                let one = Scalar::one(field);
                let i1 = one.div_by_unit(&u1).expect("unit");
                let i2 = one.div_by_unit(&u2).expect("unit");
                Mat4::diag([u1, u2, i2, i1])
            }
            _ => {
                let ds: Vec<u32> = (0..digits).map(|_| rng.gen_range(0..p)).collect();
                let c = Scalar::from_digits(field, 0, &ds);
                let dir = &dirs[rng.gen_range(0..dirs.len())];
                root_element(field, dir, &c)
            }
        };
        g = g.mul(&factor);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> FieldConfig {
        FieldConfig::equal_char(3).unwrap()
    }

    #[test]
    fn basic_symplectic_elements() {
        let f = f3();
        assert!(Mat4::identity(f).is_symplectic());
        assert!(Mat4::j_form(f).is_symplectic());
        assert!(Mat4::cartan_diag(f, 5, 2).is_symplectic());
        assert!(!Mat4::diag([
            Scalar::pi_pow(f, 1),
            Scalar::one(f),
            Scalar::one(f),
            Scalar::one(f)
        ])
        .is_symplectic());
    }

    #[test]
    fn root_elements_are_symplectic() {
        for f in [f3(), FieldConfig::equal_char(2).unwrap(), FieldConfig::mixed_char(2, 20).unwrap()] {
            let c = Scalar::parse(f, "1 + t^-2").unwrap();
            for dir in root_directions() {
                assert!(root_element(f, &dir, &c).is_symplectic());
            }
        }
    }

    #[test]
    fn diagonal_products_and_inverses() {
        let f = f3();
        let a = Mat4::cartan_diag(f, 3, 1);
        let b = Mat4::cartan_diag(f, 2, 2);
        assert_eq!(a.mul(&b), Mat4::cartan_diag(f, 5, 3));
        assert_eq!(inv(&a).unwrap(), Mat4::cartan_diag(f, -3, -1));
        assert!(inv(&Mat4::zero(f)).is_err());
    }

    #[test]
    fn inverse_of_random_elements() {
        let f = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = random_k_element(f, &mut rng, 8, 3).mul(&Mat4::cartan_diag(f, 4, 1));
            assert!(g.is_symplectic());
            let h = inv(&g).unwrap();
            assert_eq!(h.mul(&g), Mat4::identity(f));
            assert_eq!(g.mul(&h), Mat4::identity(f));
        }
    }

    #[test]
    fn wedge_of_identity_and_diagonal() {
        let f = f3();
        let w = Mat4::identity(f).wedge_square();
        for (r, row) in w.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                assert_eq!(x.clone(), if r == c { Scalar::one(f) } else { Scalar::zero(f) });
            }
        }
        let w = Mat4::cartan_diag(f, 5, 2).wedge_square();
        let mut vals: Vec<i32> = (0..6).map(|k| w[k][k].valuation().unwrap()).collect();
        vals.sort();
        assert_eq!(vals, vec![-7, -3, 0, 0, 3, 7]);
    }

    #[test]
    fn matrix_text_round_trip() {
        let f = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_k_element(f, &mut rng, 6, 2).mul(&Mat4::cartan_diag(f, 2, 1));
        assert_eq!(Mat4::from_strings(f, &g.to_strings()).unwrap(), g);
    }
}
