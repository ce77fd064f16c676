//! Local fields F_p((t)) and Q_p, their integers, residue rings and sections.

mod field;
mod residue;
mod scalar;

pub use field::{is_prime, Backend, FieldConfig, DEFAULT_SUPPORT_GUARD, MAX_PRIME};
pub use residue::{reduce, CanonicalSection, RandomSection, ResidueElement, ResidueRing, Section};
pub use scalar::{ArithOp, Digit, Scalar};

/// Rendering without the precision suffix.
pub(crate) fn scalar_terms_text(x: &Scalar) -> String {
    let s = x.to_string();
    match s.rfind(" + O(") {
        Some(pos) => s[..pos].to_string(),
        None if s.starts_with("O(") => "0".to_string(),
        None => s,
    }
}
