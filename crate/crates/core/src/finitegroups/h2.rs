use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::algebra::AlgebraElement;
use super::group::{EnumeratedGroup, FiniteGroup, GroupLaw, HeisenbergCoords, HeisenbergGroup};
use crate::error::{Error, Result};
use crate::localfield::{Backend, FieldConfig};
use crate::symplectic::{cartan, CartanPair};

/// Groups up to this order are re-enumerated by breadth-first closure of
/// their matrix generators.
pub const CLOSURE_ENUMERATION_LIMIT: u64 = 10_000;
/// Default cardinality budget for building a Heisenberg pair.
pub const DEFAULT_H2_BUDGET: u64 = 20_000_000;

/// How the group order was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderCertificate {
    /// BFS closure of matrix generators reproduced every coordinate element.
    Enumerated,
    /// Closure follows from the group law on coordinates.
    Structural,
}

#[derive(Debug, Clone)]
pub struct H2Pair {
    pub field: FieldConfig,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub group: HeisenbergGroup,
    /// h_{i,j}.
    pub h: AlgebraElement,
    /// h_{i+1,j-1}, in the same group algebra.
    pub h_next: AlgebraElement,
    pub certificate: OrderCertificate,
}

impl H2Pair {
    pub fn difference(&self) -> AlgebraElement {
        self.h.sub(&self.h_next)
    }

    pub fn measured_order(&self) -> u64 {
        self.group.order()
    }

    /// The count stated for this group, p^(2(i+j)+2).
    pub fn stated_order_exponent(&self) -> u32 {
        2 * (self.i + self.j) + 2
    }

    pub fn measured_order_exponent(&self) -> u32 {
        2 * self.group.ab_len() as u32 + self.group.c_len() as u32
    }

    pub fn support_classes(&self) -> Result<[BTreeMap<CartanPair, u64>; 2]> {
        let classify = |f: &AlgebraElement| -> Result<BTreeMap<CartanPair, u64>> {
            let mut out = BTreeMap::new();
            for g in f.support() {
                *out.entry(cartan(&self.group.matrix(g))?).or_insert(0) += 1;
            }
            Ok(out)
        };
        Ok([classify(&self.h)?, classify(&self.h_next)?])
    }
}

/// How b enters [t^-m b/2] when b is only given modulo t^r with r <= m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BLift {
    /// Average over every lift of b to O/t^(m+1), so the entry is well defined.
    #[default]
    Averaged,
    /// Use the canonical lift with digits above t^(r-1) set to zero.
    Canonical,
}

/// Points of E_{a,b,c in O/t^r} e_{beta(1 + t a, b/2, t^(2m-r)(1 + t c))} with
/// beta(a,b,c) having entries [t^-m a], [t^-m b], [t^-2m c]. Distinct points
/// have equal multiplicity, so averaging over them gives the same function.
fn h2_points(group: &HeisenbergGroup, r: u32, lift: BLift) -> Result<Vec<u64>> {
    let p = group.p();
    let m = group.m as usize;
    let r = r as usize;
    if r > group.c_degree as usize {
        return Err(Error::Internal(format!("degree {r} exceeds the C range of the group")));
    }
    // A_m = 1, A_{m-1-s} = a_s for s < min(m, r)
    let a_free = m.min(r);
    // B_{m-s} = b_s / 2 for s <= m (and s < r for the canonical lift)
    let b_free = match lift {
        BLift::Averaged => m + 1,
        BLift::Canonical => (m + 1).min(r),
    };
    // C_r = 1, C_{r-1-s} = c_s for s < r
    let c_free = r;
    let inv2 = (p + 1) / 2;
    let total = a_free + b_free + c_free;
    let count = (p as u64).pow(total as u32);
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0u32; total];
    for code in 0..count {
        let mut rest = code;
        for d in digits.iter_mut() {
            *d = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        let mut x = HeisenbergCoords {
            a: vec![0; group.ab_len()],
            b: vec![0; group.ab_len()],
            c: vec![0; group.c_len()],
        };
        x.a[m] = 1;
        for s in 0..a_free {
            x.a[m - 1 - s] = digits[s];
        }
        for s in 0..b_free {
            x.b[m - s] = digits[a_free + s] * inv2 % p;
        }
        x.c[r] = 1;
        for s in 0..c_free {
            x.c[r - 1 - s] = digits[a_free + b_free + s];
        }
        out.push(group.encode(&x));
    }
    Ok(out)
}

/// Builds h_{i,j} and h_{i+1,j-1} in the Heisenberg group with m = floor((i+j)/2).
/// The C-coordinate allows degree max(2m, i+1), which is 2m except when i+j is
/// odd and j = 1; in that case h_{i+1,j-1} needs one more degree.
pub fn build_h2_pair(field: FieldConfig, i: u32, j: u32, budget: u64) -> Result<H2Pair> {
    build_h2_pair_with(field, i, j, budget, BLift::default())
}

pub fn build_h2_pair_with(field: FieldConfig, i: u32, j: u32, budget: u64, lift: BLift) -> Result<H2Pair> {
    if field.backend != Backend::EqualChar {
        return Err(Error::UnsupportedBackend {
            backend: field.backend.to_string(),
            what: "finite subgroups of the lattice Sp4(F_q[1/t])".into(),
        });
    }
    if field.p == 2 {
        return Err(Error::WrongCharacteristic("b/2 needs q odd".into()));
    }
    if j == 0 || j > i {
        return Err(Error::Domain(format!("need i >= j >= 1, got ({i},{j})")));
    }
    let m = (i + j) / 2;
    let group = HeisenbergGroup::new(field, m, (2 * m).max(i + 1))?;
    let order = group.order_checked()?;
    if order > budget {
        return Err(Error::Budget {
            needed: order as u128,
            budget: budget as u128,
            hint: format!("Heisenberg group for ({i},{j}) has order {order}"),
        });
    }
    let certificate = if order <= CLOSURE_ENUMERATION_LIMIT {
        let closure = EnumeratedGroup::closure(&group.unit_generators(), budget)?;
        if closure.order() != order {
            return Err(Error::Internal(format!(
                "closure has {} elements, coordinates give {order}",
                closure.order()
            )));
        }
        OrderCertificate::Enumerated
    } else {
        OrderCertificate::Structural
    };
    let h = AlgebraElement::average(h2_points(&group, i, lift)?);
    let h_next = AlgebraElement::average(h2_points(&group, i + 1, lift)?);
    Ok(H2Pair { field, i, j, m, group, h, h_next, certificate })
}

impl HeisenbergGroup {
    /// Order p^(2(m+1) + c_degree + 1), or a budget error on overflow.
    pub fn order_checked(&self) -> Result<u64> {
        let e = 2 * self.ab_len() as u32 + self.c_len() as u32;
        (self.p() as u64).checked_pow(e).ok_or(Error::Budget {
            needed: u128::MAX,
            budget: u64::MAX as u128,
            hint: format!("p^{e} overflows"),
        })
    }

    /// Matrices with a single unit coordinate.
    pub fn unit_generators(&self) -> Vec<crate::symplectic::Mat4> {
        let dims = [self.ab_len(), self.ab_len(), self.c_len()];
        let mut out = Vec::new();
        for (slot, &len) in dims.iter().enumerate() {
            for r in 0..len {
                let mut x = HeisenbergCoords {
                    a: vec![0; self.ab_len()],
                    b: vec![0; self.ab_len()],
                    c: vec![0; self.c_len()],
                };
                match slot {
                    0 => x.a[r] = 1,
                    1 => x.b[r] = 1,
                    _ => x.c[r] = 1,
                }
                out.push(self.matrix_of(&x));
            }
        }
        out
    }

    pub fn as_finite_group(&self) -> FiniteGroup {
        FiniteGroup::Heisenberg(self.clone())
    }
}
