//! Sp4 over a local field: matrix algebra, exterior square and the Cartan
//! double-coset classifier.

mod cartan;
mod matrix;

pub use cartan::{cartan, length, CartanPair};
pub use matrix::{inv, random_k_element, root_directions, root_element, GroupElement, Mat4, WEDGE_PAIRS};

/// True when g^t J g = J.
pub fn is_symplectic(g: &Mat4) -> bool {
    g.is_symplectic()
}
