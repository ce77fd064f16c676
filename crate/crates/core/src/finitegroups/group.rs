use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::localfield::{FieldConfig, Scalar};
use crate::symplectic::Mat4;

/// Group elements are encoded as integers in `0..order`.
pub type Code = u64;

/// Multiplication on encoded elements.
pub trait GroupLaw: Sync {
    fn order(&self) -> u64;
    fn identity(&self) -> Code;
    fn mul(&self, a: Code, b: Code) -> Code;
    fn inv(&self, a: Code) -> Code;
    fn is_abelian(&self) -> bool;
}

/// How coordinates of an elementary abelian group are realised as matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Realization {
    /// No matrix model.
    Abstract,
    /// Coordinates (a_0..a_n, b_0..b_n, eps) of the unipotent with upper-right
    /// block [[t^-i a, t^-i b], [t^-i eps, t^-i a]].
    H1 { field: FieldConfig, i: u32, n: u32 },
    /// Coordinates (X_1..X_i, Y_i, Z_0..Z_i) of the unipotent with upper-right
    /// block [[X, Z], [Y, X]], polynomials in 1/t.
    H1Wide { field: FieldConfig, i: u32 },
}

/// (Z/p)^dim, with code sum_r c_r p^r.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryAbelian {
    pub p: u32,
    pub dim: u32,
    pub realization: Realization,
}

impl ElementaryAbelian {
    pub fn new(p: u32, dim: u32) -> Self {
        ElementaryAbelian { p, dim, realization: Realization::Abstract }
    }

    pub fn coords(&self, mut a: Code) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.dim)
            .map(|_| {
                let d = (a % p) as u32;
                a /= p;
                d
            })
            .collect()
    }

    pub fn encode(&self, coords: &[u32]) -> Code {
        let p = self.p as u64;
        coords.iter().rev().fold(0, |acc, &d| acc * p + (d % self.p) as u64)
    }

    /// Matrix of an element, when a realization is attached.
    pub fn matrix(&self, a: Code) -> Option<Mat4> {
        let c = self.coords(a);
        match self.realization {
            Realization::Abstract => None,
            Realization::H1 { field, i, n } => {
                let n = n as usize;
                let poly = |ds: &[u32]| Scalar::from_digits(field, -(i as i32), ds);
                let a = poly(&c[..=n]);
                let b = poly(&c[n + 1..2 * n + 2]);
                let eps = poly(&c[2 * n + 2..2 * n + 3]);
                Some(siegel_unipotent(field, a.clone(), b, eps, a))
            }
            Realization::H1Wide { field, i } => {
                let i = i as usize;
                // X = sum_{r=1..i} X_r t^-r, Y = Y_i t^-i, Z = sum_{r=0..i} Z_r t^-r
                let inv_poly = |ds: &[u32], lowest: usize| {
                    let mut acc = Scalar::zero(field);
                    for (k, &d) in ds.iter().enumerate() {
                        acc = &acc + &Scalar::monomial(field, d as i64, -((lowest + k) as i32));
                    }
                    acc
                };
                let x = inv_poly(&c[..i], 1);
                let y = Scalar::monomial(field, c[i] as i64, -(i as i32));
                let z = inv_poly(&c[i + 1..2 * i + 2], 0);
                Some(siegel_unipotent(field, x.clone(), z, y, x))
            }
        }
    }
}

/// [[1,0,x,z],[0,1,y,w],[0,0,1,0],[0,0,0,1]]; symplectic iff w = x.
pub fn siegel_unipotent(field: FieldConfig, x: Scalar, z: Scalar, y: Scalar, w: Scalar) -> Mat4 {
    let zero = || Scalar::zero(field);
    let one = || Scalar::one(field);
    Mat4 {
        entries: [
            [one(), zero(), x, z],
            [zero(), one(), y, w],
            [zero(), zero(), one(), zero()],
            [zero(), zero(), zero(), one()],
        ],
    }
}

impl GroupLaw for ElementaryAbelian {
    fn order(&self) -> u64 {
        (self.p as u64).pow(self.dim)
    }
    fn identity(&self) -> Code {
        0
    }
    fn mul(&self, a: Code, b: Code) -> Code {
        let p = self.p as u64;
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.dim {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }
    fn inv(&self, a: Code) -> Code {
        let p = self.p as u64;
        let mut a = a;
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.dim {
            out += ((p - a % p) % p) * scale;
            a /= p;
            scale *= p;
        }
        out
    }
    fn is_abelian(&self) -> bool {
        true
    }
}

/// Polynomials in s = 1/t over F_p stored as coefficient vectors (index = degree).
pub type Poly = Vec<u32>;

/// The group of matrices [[1,A,B,C],[0,1,0,B],[0,0,1,-A],[0,0,0,1]] with
/// A, B of degree <= m and C of degree <= c_degree in s = 1/t. The law is
/// (A,B,C)(A',B',C') = (A+A', B+B', C+C'+AB'-BA').
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeisenbergGroup {
    pub field: FieldConfig,
    pub m: u32,
    pub c_degree: u32,
}

/// Coordinates of a Heisenberg element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeisenbergCoords {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
}

impl HeisenbergGroup {
    pub fn new(field: FieldConfig, m: u32, c_degree: u32) -> Result<Self> {
        if c_degree < 2 * m {
            return Err(Error::Domain(format!(
                "C must allow degree 2m = {} to contain commutators, got {c_degree}",
                2 * m
            )));
        }
        Ok(HeisenbergGroup { field, m, c_degree })
    }

    pub fn p(&self) -> u32 {
        self.field.p
    }

    pub fn ab_len(&self) -> usize {
        self.m as usize + 1
    }

    pub fn c_len(&self) -> usize {
        self.c_degree as usize + 1
    }

    pub fn decode(&self, mut code: Code) -> HeisenbergCoords {
        let p = self.p() as u64;
        let mut take = |len: usize| -> Poly {
            (0..len)
                .map(|_| {
                    let d = (code % p) as u32;
                    code /= p;
                    d
                })
                .collect()
        };
        let a = take(self.ab_len());
        let b = take(self.ab_len());
        let c = take(self.c_len());
        HeisenbergCoords { a, b, c }
    }

    pub fn encode(&self, x: &HeisenbergCoords) -> Code {
        let p = self.p() as u64;
        let mut out = 0u64;
        for d in x.a.iter().chain(&x.b).chain(&x.c).rev() {
            out = out * p + (*d % self.p()) as u64;
        }
        out
    }

    /// Product of polynomials, added with the given sign into `acc`.
    pub fn add_product(&self, acc: &mut [u32], f: &[u32], g: &[u32], negate: bool) {
        let p = self.p() as u64;
        for (r, &fr) in f.iter().enumerate() {
            if fr == 0 {
                continue;
            }
            for (s, &gs) in g.iter().enumerate() {
                let prod = fr as u64 * gs as u64 % p;
                let term = if negate { (p - prod) % p } else { prod };
                acc[r + s] = ((acc[r + s] as u64 + term) % p) as u32;
            }
        }
    }

    pub fn mul_coords(&self, x: &HeisenbergCoords, y: &HeisenbergCoords) -> HeisenbergCoords {
        let p = self.p();
        let add = |u: &Poly, v: &Poly| -> Poly { u.iter().zip(v).map(|(a, b)| (a + b) % p).collect() };
        let mut c = add(&x.c, &y.c);
        self.add_product(&mut c, &x.a, &y.b, false);
        self.add_product(&mut c, &x.b, &y.a, true);
        HeisenbergCoords { a: add(&x.a, &y.a), b: add(&x.b, &y.b), c }
    }

    pub fn matrix_of(&self, x: &HeisenbergCoords) -> Mat4 {
        let f = self.field;
        let poly = |ds: &Poly| {
            let mut acc = Scalar::zero(f);
            for (r, &d) in ds.iter().enumerate() {
                acc = &acc + &Scalar::monomial(f, d as i64, -(r as i32));
            }
            acc
        };
        let a = poly(&x.a);
        let b = poly(&x.b);
        let c = poly(&x.c);
        let zero = || Scalar::zero(f);
        let one = || Scalar::one(f);
        Mat4 {
            entries: [
                [one(), a.clone(), b.clone(), c],
                [zero(), one(), zero(), b],
                [zero(), zero(), one(), -&a],
                [zero(), zero(), zero(), one()],
            ],
        }
    }

    pub fn matrix(&self, code: Code) -> Mat4 {
        self.matrix_of(&self.decode(code))
    }

    /// Inverse of the matrix model: reads coordinates off a matrix, or `None`
    /// when the matrix is not in the group.
    pub fn coords_of_matrix(&self, g: &Mat4) -> Option<HeisenbergCoords> {
        let f = self.field;
        let read = |x: &Scalar, len: usize| -> Option<Poly> {
            if !x.is_polynomial_in_inverse() {
                return None;
            }
            if !x.is_zero() && -(x.valuation()?) as usize >= len {
                return None;
            }
            Some((0..len).map(|r| x.digit(-(r as i32))).collect())
        };
        let a = read(g.get(0, 1), self.ab_len())?;
        let b = read(g.get(0, 2), self.ab_len())?;
        let c = read(g.get(0, 3), self.c_len())?;
        let x = HeisenbergCoords { a, b, c };
        if self.matrix_of(&x) == *g && *g.get(0, 0) == Scalar::one(f) {
            Some(x)
        } else {
            None
        }
    }
}

impl GroupLaw for HeisenbergGroup {
    fn order(&self) -> u64 {
        (self.p() as u64).pow(2 * self.ab_len() as u32 + self.c_len() as u32)
    }
    fn identity(&self) -> Code {
        0
    }
    fn mul(&self, a: Code, b: Code) -> Code {
        let x = self.decode(a);
        let y = self.decode(b);
        self.encode(&self.mul_coords(&x, &y))
    }
    fn inv(&self, a: Code) -> Code {
        // (A,B,C)^-1 = (-A,-B,-C) because AB - BA = 0.
        let p = self.p();
        let x = self.decode(a);
        let neg = |u: &Poly| -> Poly { u.iter().map(|&d| (p - d) % p).collect() };
        self.encode(&HeisenbergCoords { a: neg(&x.a), b: neg(&x.b), c: neg(&x.c) })
    }
    fn is_abelian(&self) -> bool {
        false
    }
}

/// A finite matrix group enumerated by breadth-first closure.
#[derive(Clone)]
pub struct EnumeratedGroup {
    elements: Vec<Mat4>,
    index: HashMap<Mat4, Code>,
    table: Option<Vec<u32>>,
    inverses: Vec<Code>,
    abelian: bool,
}

impl fmt::Debug for EnumeratedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnumeratedGroup")
            .field("order", &self.elements.len())
            .field("abelian", &self.abelian)
            .finish()
    }
}

/// Groups up to this order get a full multiplication table.
const TABLE_LIMIT: usize = 2048;

impl EnumeratedGroup {
    /// Closure of the generators under multiplication (inverses follow by finiteness).
    pub fn closure(generators: &[Mat4], budget: u64) -> Result<EnumeratedGroup> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Domain("closure of an empty generating set".into()))?;
        let field = first.field();
        let id = Mat4::identity(field);
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Mat4, Code> = HashMap::new();
        index.insert(id, 0);
        let mut queue: VecDeque<Code> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = elements[x as usize].mul(g);
                if !index.contains_key(&y) {
                    if elements.len() as u64 >= budget {
                        return Err(Error::Budget {
                            needed: elements.len() as u128 + 1,
                            budget: budget as u128,
                            hint: "closure is larger than the cardinality budget".into(),
                        });
                    }
                    let code = elements.len() as Code;
                    index.insert(y.clone(), code);
                    elements.push(y);
                    queue.push_back(code);
                }
            }
        }
        let n = elements.len();
        let inverses: Vec<Code> = elements
            .iter()
            .map(|g| {
                let inv = g.symplectic_inverse_unchecked();
                index.get(&inv).copied().ok_or_else(|| Error::Internal("inverse missing from closure".into()))
            })
            .collect::<Result<_>>()?;
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = index[&elements[a].mul(&elements[b])] as u32;
                }
            }
            t
        });
        let abelian = generators
            .iter()
            .all(|g| generators.iter().all(|h| g.mul(h) == h.mul(g)));
        Ok(EnumeratedGroup { elements, index, table, inverses, abelian })
    }

    pub fn element(&self, a: Code) -> &Mat4 {
        &self.elements[a as usize]
    }

    pub fn code_of(&self, g: &Mat4) -> Option<Code> {
        self.index.get(g).copied()
    }
}

impl GroupLaw for EnumeratedGroup {
    fn order(&self) -> u64 {
        self.elements.len() as u64
    }
    fn identity(&self) -> Code {
        0
    }
    fn mul(&self, a: Code, b: Code) -> Code {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize] as Code,
            None => self.index[&self.elements[a as usize].mul(&self.elements[b as usize])],
        }
    }
    fn inv(&self, a: Code) -> Code {
        self.inverses[a as usize]
    }
    fn is_abelian(&self) -> bool {
        self.abelian
    }
}

/// A finite group in one of the supported models.
#[derive(Debug, Clone)]
pub enum FiniteGroup {
    Abelian(ElementaryAbelian),
    Heisenberg(HeisenbergGroup),
    Enumerated(EnumeratedGroup),
}

impl FiniteGroup {
    fn law(&self) -> &dyn GroupLaw {
        match self {
            FiniteGroup::Abelian(g) => g,
            FiniteGroup::Heisenberg(g) => g,
            FiniteGroup::Enumerated(g) => g,
        }
    }

    /// Matrix realisation of an element, when one is attached.
    pub fn matrix(&self, a: Code) -> Option<Mat4> {
        match self {
            FiniteGroup::Abelian(g) => g.matrix(a),
            FiniteGroup::Heisenberg(g) => Some(g.matrix(a)),
            FiniteGroup::Enumerated(g) => Some(g.element(a).clone()),
        }
    }
}

impl GroupLaw for FiniteGroup {
    fn order(&self) -> u64 {
        self.law().order()
    }
    fn identity(&self) -> Code {
        self.law().identity()
    }
    fn mul(&self, a: Code, b: Code) -> Code {
        self.law().mul(a, b)
    }
    fn inv(&self, a: Code) -> Code {
        self.law().inv(a)
    }
    fn is_abelian(&self) -> bool {
        self.law().is_abelian()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_law_matches_matrices() {
        let f = FieldConfig::equal_char(3).unwrap();
        let h = HeisenbergGroup::new(f, 1, 2).unwrap();
        let n = h.order();
        assert_eq!(n, 3u64.pow(7));
        for a in (0..n).step_by(37) {
            let ma = h.matrix(a);
            assert!(ma.is_symplectic());
            assert_eq!(h.coords_of_matrix(&ma), Some(h.decode(a)));
            for b in (0..n).step_by(53) {
                assert_eq!(h.matrix(h.mul(a, b)), ma.mul(&h.matrix(b)));
            }
            assert_eq!(h.mul(a, h.inv(a)), 0);
        }
    }

    #[test]
    fn heisenberg_commutator_witness() {
        let f = FieldConfig::equal_char(3).unwrap();
        let h = HeisenbergGroup::new(f, 1, 2).unwrap();
        let x = h.encode(&HeisenbergCoords { a: vec![1, 0], b: vec![0, 0], c: vec![0, 0, 0] });
        let y = h.encode(&HeisenbergCoords { a: vec![0, 0], b: vec![1, 0], c: vec![0, 0, 0] });
        let comm = h.mul(h.mul(x, y), h.mul(h.inv(x), h.inv(y)));
        let m = h.matrix(comm);
        assert!(!m.get(0, 3).is_zero());
        assert_eq!(m.get(0, 1).clone(), Scalar::zero(f));
    }

    #[test]
    fn closure_of_heisenberg_generators() {
        let f = FieldConfig::equal_char(3).unwrap();
        let h = HeisenbergGroup::new(f, 0, 0).unwrap();
        let gens: Vec<Mat4> = [1u64, 3].iter().map(|&c| h.matrix(c)).collect();
        let e = EnumeratedGroup::closure(&gens, 1000).unwrap();
        assert_eq!(e.order(), 27);
        assert!(!e.is_abelian());
        for a in 0..27 {
            for b in 0..27 {
                let ab = e.mul(a, b);
                assert_eq!(*e.element(ab), e.element(a).mul(e.element(b)));
            }
        }
        assert!(EnumeratedGroup::closure(&gens, 10).is_err());
    }

    #[test]
    fn abelian_codes() {
        let g = ElementaryAbelian::new(5, 3);
        for a in 0..125 {
            assert_eq!(g.encode(&g.coords(a)), a);
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
        assert_eq!(g.mul(g.encode(&[4, 1, 0]), g.encode(&[3, 4, 2])), g.encode(&[2, 0, 2]));
    }
}
