use std::collections::BTreeMap;

use super::algebra::AlgebraElement;
use super::group::{ElementaryAbelian, GroupLaw, Realization};
use crate::error::{Error, Result};
use crate::localfield::{Backend, FieldConfig};
use crate::symplectic::{cartan, CartanPair};

/// An abelian group together with the two averaged point masses whose
/// difference is estimated.
#[derive(Debug, Clone)]
pub struct H1Pair {
    pub field: FieldConfig,
    pub i: u32,
    pub j: u32,
    pub group: ElementaryAbelian,
    /// Function attached to (i, j).
    pub h: AlgebraElement,
    /// Function attached to (i, j+1), in the same group algebra.
    pub h_next: AlgebraElement,
    /// Number of point masses averaged in each function.
    pub points: u64,
}

impl H1Pair {
    pub fn difference(&self) -> AlgebraElement {
        self.h.sub(&self.h_next)
    }

    /// Cartan classes of the supports of `h` and `h_next`, with counts.
    pub fn support_classes(&self) -> Result<[BTreeMap<CartanPair, u64>; 2]> {
        let classify = |f: &AlgebraElement| -> Result<BTreeMap<CartanPair, u64>> {
            let mut out = BTreeMap::new();
            for g in f.support() {
                let m = self
                    .group
                    .matrix(g)
                    .ok_or_else(|| Error::Internal("group has no matrix realisation".into()))?;
                *out.entry(cartan(&m)?).or_insert(0) += 1;
            }
            Ok(out)
        };
        Ok([classify(&self.h)?, classify(&self.h_next)?])
    }
}

fn require_odd_equal_char(field: FieldConfig) -> Result<()> {
    if field.backend != Backend::EqualChar {
        return Err(Error::UnsupportedBackend {
            backend: field.backend.to_string(),
            what: "finite subgroups of the lattice Sp4(F_q[1/t])".into(),
        });
    }
    if field.p == 2 {
        return Err(Error::WrongCharacteristic("the Gauss-sum estimate needs q odd".into()));
    }
    Ok(())
}

/// Truncated square of a polynomial with `len` coefficients, keeping degrees < len.
fn truncated_square(a: &[u32], p: u32) -> Vec<u32> {
    let len = a.len();
    let mut out = vec![0u32; len];
    for r in 0..len {
        for s in 0..len - r {
            out[r + s] = ((out[r + s] as u64 + a[r] as u64 * a[s] as u64) % p as u64) as u32;
        }
    }
    out
}

/// The printed pair: h_{i,j} = E_a e_{alpha(a, t(a^2) + t^(i-j), 1)} and h_{i,j+1}
/// with offset exponent i-j-1, both inside H_{1,i,j} of order p^(2(i-j)+3).
pub fn build_h1_pair(field: FieldConfig, i: u32, j: u32) -> Result<H1Pair> {
    let n = i.checked_sub(j).ok_or_else(|| Error::Domain(format!("need i >= j, got ({i},{j})")))?;
    build_h1_pair_with_offsets(field, i, j, Some(n), n.checked_sub(1))
}

/// Same construction with explicit offset exponents in the b-slot (`None` drops
/// the offset). Used for negative controls.
pub fn build_h1_pair_with_offsets(
    field: FieldConfig,
    i: u32,
    j: u32,
    offset: Option<u32>,
    offset_next: Option<u32>,
) -> Result<H1Pair> {
    require_odd_equal_char(field)?;
    let n = i.checked_sub(j).ok_or_else(|| Error::Domain(format!("need i >= j, got ({i},{j})")))?;
    for e in [offset, offset_next].into_iter().flatten() {
        if e > n {
            return Err(Error::Domain(format!("offset exponent {e} exceeds i-j = {n}")));
        }
    }
    let p = field.p;
    let len = n as usize + 1;
    let group = ElementaryAbelian { p, dim: 2 * n + 3, realization: Realization::H1 { field, i, n } };
    let a_space = ElementaryAbelian::new(p, n + 1);
    let point = |a: &[u32], sq: &[u32], off: Option<u32>| {
        let mut coords = Vec::with_capacity(2 * len + 1);
        coords.extend_from_slice(a);
        let mut b = sq.to_vec();
        if let Some(e) = off {
            b[e as usize] = (b[e as usize] + 1) % p;
        }
        coords.extend_from_slice(&b);
        coords.push(1);
        group.encode(&coords)
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    for code in 0..a_space.order() {
        let a = a_space.coords(code);
        let sq = truncated_square(&a, p);
        first.push(point(&a, &sq, offset));
        second.push(point(&a, &sq, offset_next));
    }
    let points = a_space.order();
    Ok(H1Pair {
        field,
        i,
        j,
        group,
        h: AlgebraElement::average(first),
        h_next: AlgebraElement::average(second),
        points,
    })
}

/// Alternative abelian pair: h'_{i,j} = E_{a,c} e of the unipotent with
/// X = [t^-i a], Y = t^-i, Z = [t^-i a^2 + t^-j (1 + t c)] for a, c in O/t^i,
/// and h'_{i,j+1} with t^-(j+1) in place of t^-j. Needs j < i.
pub fn build_h1_wide_pair(field: FieldConfig, i: u32, j: u32) -> Result<H1Pair> {
    require_odd_equal_char(field)?;
    if j >= i {
        return Err(Error::Domain(format!("the alternative pair needs j < i, got ({i},{j})")));
    }
    let p = field.p;
    let iu = i as usize;
    let group = ElementaryAbelian { p, dim: 2 * i + 2, realization: Realization::H1Wide { field, i } };
    let params = ElementaryAbelian::new(p, i);
    let point = |a: &[u32], c: &[u32], jj: usize| {
        // coordinates: X_1..X_i, Y_i, Z_0..Z_i (index = power of 1/t)
        let mut x = vec![0u32; iu];
        for (r, &ar) in a.iter().enumerate() {
            x[iu - r - 1] = ar;
        }
        let mut z = vec![0u32; iu + 1];
        let mut sq = vec![0u32; 2 * iu];
        for r in 0..iu {
            for s in 0..iu {
                sq[r + s] = ((sq[r + s] as u64 + a[r] as u64 * a[s] as u64) % p as u64) as u32;
            }
        }
        for (r, &v) in sq.iter().enumerate().take(iu + 1) {
            z[iu - r] = (z[iu - r] + v) % p;
        }
        z[jj] = (z[jj] + 1) % p;
        for (r, &cr) in c.iter().enumerate() {
            if r + 1 <= jj {
                z[jj - 1 - r] = (z[jj - 1 - r] + cr) % p;
            }
        }
        let mut coords = x;
        coords.push(1);
        coords.extend(z);
        group.encode(&coords)
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    for ac in 0..params.order() {
        let a = params.coords(ac);
        for cc in 0..params.order() {
            let c = params.coords(cc);
            first.push(point(&a, &c, j as usize));
            second.push(point(&a, &c, j as usize + 1));
        }
    }
    let points = params.order() * params.order();
    Ok(H1Pair {
        field,
        i,
        j,
        group,
        h: AlgebraElement::average(first),
        h_next: AlgebraElement::average(second),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldConfig {
        FieldConfig::equal_char(3).unwrap()
    }

    #[test]
    fn order_and_law() {
        let pair = build_h1_pair(f3(), 2, 2).unwrap();
        assert_eq!(pair.group.order(), 27);
        let pair = build_h1_pair(f3(), 3, 2).unwrap();
        let g = &pair.group;
        assert_eq!(g.order(), 3u64.pow(5));
        for a in 0..g.order() {
            let ma = g.matrix(a).unwrap();
            assert!(ma.is_symplectic());
            for b in 0..g.order() {
                assert_eq!(g.matrix(g.mul(a, b)).unwrap(), ma.mul(&g.matrix(b).unwrap()));
            }
        }
    }

    #[test]
    fn supports_classify_to_named_cosets() {
        let pair = build_h1_pair(f3(), 3, 1).unwrap();
        assert_eq!(pair.points, 27);
        let [c0, c1] = pair.support_classes().unwrap();
        assert_eq!(c0.into_iter().collect::<Vec<_>>(), vec![(CartanPair { i: 3, j: 1 }, 27)]);
        assert_eq!(c1.into_iter().collect::<Vec<_>>(), vec![(CartanPair { i: 3, j: 2 }, 27)]);
    }

    #[test]
    fn wide_supports() {
        let pair = build_h1_wide_pair(f3(), 3, 1).unwrap();
        let [c0, c1] = pair.support_classes().unwrap();
        assert_eq!(c0.keys().copied().collect::<Vec<_>>(), vec![CartanPair { i: 3, j: 1 }]);
        assert_eq!(c1.keys().copied().collect::<Vec<_>>(), vec![CartanPair { i: 3, j: 2 }]);
    }

    #[test]
    fn rejects_char_two() {
        let f2 = FieldConfig::equal_char(2).unwrap();
        assert!(matches!(build_h1_pair(f2, 3, 1), Err(Error::WrongCharacteristic(_))));
    }
}
