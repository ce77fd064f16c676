use serde::{Deserialize, Serialize};
use std::fmt;

use super::matrix::{Mat4, WEDGE_PAIRS};
use crate::error::{Error, Result};
use crate::localfield::{Backend, Scalar};

/// A point of the Weyl chamber i >= j >= 0, labelling the double coset K D(i,j) K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CartanPair {
    pub i: u32,
    pub j: u32,
}

impl CartanPair {
    pub fn new(i: u32, j: u32) -> Result<CartanPair> {
        if i < j {
            return Err(Error::Domain(format!("({i},{j}) is outside the chamber i >= j >= 0")));
        }
        Ok(CartanPair { i, j })
    }

    /// Signed constructor; `None` outside the chamber.
    pub fn checked(i: i64, j: i64) -> Option<CartanPair> {
        if j >= 0 && i >= j && i <= u32::MAX as i64 {
            Some(CartanPair { i: i as u32, j: j as u32 })
        } else {
            None
        }
    }
}

impl fmt::Display for CartanPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Minimum of certified valuations over a list of values, failing when an
/// inexact zero could hide a smaller valuation.
fn certified_min(values: impl Iterator<Item = Scalar>) -> Result<Option<i32>> {
    let mut known: Option<i32> = None;
    let mut unknown_floor: Option<i32> = None;
    for x in values {
        match x.valuation() {
            Some(v) => known = Some(known.map_or(v, |k| k.min(v))),
            None => {
                if !x.is_exact_zero() {
                    let fl = x.lower_valuation();
                    unknown_floor = Some(unknown_floor.map_or(fl, |u| u.min(fl)));
                }
            }
        }
    }
    if let (Some(k), Some(u)) = (known, unknown_floor) {
        if u < k {
            return Err(Error::Precision(format!(
                "an entry is only known modulo p^{u} but the leading valuation is {k}"
            )));
        }
    }
    if known.is_none() && unknown_floor.is_some() {
        return Err(Error::Precision("all entries are indistinguishable from zero".into()));
    }
    Ok(known)
}

#[inline]
fn val_or_inf(x: &Scalar) -> i64 {
    x.valuation().map_or(i64::MAX / 4, |v| v as i64)
}

/// Minimum valuation over all 2x2 minors, exact backend. A minor whose two
/// products have different valuations needs no arithmetic.
fn min_minor_valuation_exact(g: &Mat4) -> Option<i32> {
    let e = &g.entries;
    let mut best = i64::MAX / 4;
    for &(r1, r2) in WEDGE_PAIRS.iter() {
        for &(c1, c2) in WEDGE_PAIRS.iter() {
            let va = val_or_inf(&e[r1][c1]) + val_or_inf(&e[r2][c2]);
            let vb = val_or_inf(&e[r1][c2]) + val_or_inf(&e[r2][c1]);
            let lo = va.min(vb);
            if lo >= best {
                continue;
            }
            if va != vb {
                best = lo;
            } else {
                let m = g.minor((r1, r2), (c1, c2));
                if let Some(v) = m.valuation() {
                    best = best.min(v as i64);
                }
            }
        }
    }
    if best >= i64::MAX / 8 {
        None
    } else {
        Some(best as i32)
    }
}

/// The Cartan invariants of a symplectic matrix: q^i is the largest entry
/// norm of g and q^(i+j) the largest entry norm of its exterior square.
pub fn cartan(g: &Mat4) -> Result<CartanPair> {
    let field = g.field();
    let (vmin, wmin) = match field.backend {
        Backend::EqualChar => {
            let vmin = g.iter().filter_map(|x| x.valuation()).min();
            (vmin, min_minor_valuation_exact(g))
        }
        Backend::MixedChar => {
            let vmin = certified_min(g.iter().cloned())?;
            let minors = WEDGE_PAIRS
                .iter()
                .flat_map(|&r| WEDGE_PAIRS.iter().map(move |&c| (r, c)))
                .map(|(r, c)| g.minor(r, c));
            (vmin, certified_min(minors)?)
        }
    };
    let (Some(vmin), Some(wmin)) = (vmin, wmin) else {
        return Err(Error::Internal("zero matrix has no Cartan invariants".into()));
    };
    let i = -(vmin as i64);
    let j = -(wmin as i64) - i;
    CartanPair::checked(i, j).ok_or_else(|| {
        Error::Internal(format!(
            "invariants (i, i+j) = ({i}, {}) lie outside the chamber; input is not symplectic",
            i + j
        ))
    })
}

/// The length l(g) = log_q of the largest entry norm, i.e. the first Cartan invariant.
pub fn length(g: &Mat4) -> Result<u32> {
    Ok(cartan(g)?.i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldConfig;
    use crate::symplectic::random_k_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_representatives() {
        let f = FieldConfig::equal_char(3).unwrap();
        assert_eq!(cartan(&Mat4::identity(f)).unwrap(), CartanPair { i: 0, j: 0 });
        assert_eq!(cartan(&Mat4::cartan_diag(f, 5, 2)).unwrap(), CartanPair { i: 5, j: 2 });
        assert_eq!(length(&Mat4::cartan_diag(f, 5, 2)).unwrap(), 5);
    }

    #[test]
    fn corrupted_input_is_rejected() {
        let f = FieldConfig::equal_char(3).unwrap();
        // t^-3 times the all-ones matrix plus t*I has minors smaller than its entries.
        let u = Scalar::pi_pow(f, -3);
        let m = Mat4::from_fn(|r, c| if r == c { &u + &Scalar::pi_pow(f, 1) } else { u.clone() });
        assert!(matches!(cartan(&m), Err(Error::Internal(_))));
        assert!(matches!(cartan(&Mat4::zero(f)), Err(Error::Internal(_))));
    }

    #[test]
    fn padic_invariance() {
        let f = FieldConfig::mixed_char(2, 40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (i, j) in [(3, 1), (4, 4), (6, 0)] {
            let d = Mat4::cartan_diag(f, i, j);
            for _ in 0..10 {
                let k1 = random_k_element(f, &mut rng, 6, 3);
                let k2 = random_k_element(f, &mut rng, 6, 3);
                let g = k1.mul(&d).mul(&k2);
                assert_eq!(cartan(&g).unwrap(), CartanPair { i: i as u32, j: j as u32 });
            }
        }
    }

    #[test]
    fn padic_precision_loss_is_reported() {
        let f = FieldConfig::mixed_char(3, 4).unwrap();
        let mut g = Mat4::cartan_diag(f, 1, 0);
        g.set(0, 1, Scalar::parse(f, "O(t^-5)").unwrap());
        assert!(matches!(cartan(&g), Err(Error::Precision(_))));
    }
}
