use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

use super::group::{Code, GroupLaw};

/// A finitely supported function on a finite group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraElement {
    coeffs: BTreeMap<Code, Complex64>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    /// The point mass e_g.
    pub fn point(g: Code) -> Self {
        let mut f = AlgebraElement::zero();
        f.add_at(g, Complex64::new(1.0, 0.0));
        f
    }

    /// Normalised characteristic function of a multiset of points.
    pub fn average<I: IntoIterator<Item = Code>>(points: I) -> Self {
        let mut f = AlgebraElement::zero();
        let mut n = 0usize;
        for g in points {
            f.add_at(g, Complex64::new(1.0, 0.0));
            n += 1;
        }
        if n > 0 {
            f = f.scale(Complex64::new(1.0 / n as f64, 0.0));
        }
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (Code, Complex64)>>(pairs: I) -> Self {
        let mut f = AlgebraElement::zero();
        for (g, c) in pairs {
            f.add_at(g, c);
        }
        f
    }

    pub fn add_at(&mut self, g: Code, c: Complex64) {
        let slot = self.coeffs.entry(g).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&g);
        }
    }

    pub fn get(&self, g: Code) -> Complex64 {
        self.coeffs.get(&g).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Code, Complex64)> + '_ {
        self.coeffs.iter().map(|(&g, &c)| (g, c))
    }

    pub fn support(&self) -> impl Iterator<Item = Code> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        AlgebraElement::from_pairs(self.iter().map(|(g, v)| (g, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.iter() {
            out.add_at(g, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// |sum f(g)|.
    pub fn total(&self) -> Complex64 {
        self.coeffs.values().sum()
    }

    /// (sum |f(g)|^2)^(1/2).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// f*(g) = conj f(g^-1).
    pub fn adjoint<G: GroupLaw + ?Sized>(&self, group: &G) -> Self {
        AlgebraElement::from_pairs(self.iter().map(|(g, c)| (group.inv(g), c.conj())))
    }

    /// (f * h)(x) = sum_{gk = x} f(g) h(k).
    pub fn convolve<G: GroupLaw + ?Sized>(&self, other: &Self, group: &G) -> Self {
        let mut out = AlgebraElement::zero();
        for (g, a) in self.iter() {
            for (k, b) in other.iter() {
                out.add_at(group.mul(g, k), a * b);
            }
        }
        out
    }

    pub fn is_self_adjoint<G: GroupLaw + ?Sized>(&self, group: &G, tol: f64) -> bool {
        let adj = self.adjoint(group);
        self.sub(&adj).iter().all(|(_, c)| c.norm() <= tol)
    }

    /// Random coefficients with real and imaginary parts uniform in [-1, 1]
    /// on `support` distinct random points (or all of the group if smaller).
    pub fn random<G: GroupLaw + ?Sized, R: Rng>(group: &G, support: usize, rng: &mut R) -> Self {
        let n = group.order();
        let mut f = AlgebraElement::zero();
        if support as u64 >= n {
            for g in 0..n {
                f.add_at(g, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            return f;
        }
        while f.support_len() < support {
            let g = rng.gen_range(0..n);
            if f.get(g) == Complex64::new(0.0, 0.0) {
                f.add_at(g, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        f
    }
}
