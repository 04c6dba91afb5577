//! Truncated exact arithmetic in the base field K = K₀(π).
//!
//! * [`fq`] — the residue field 𝔽_q;
//! * [`field`] — field construction, validation, and 𝒪_{K₀} arithmetic;
//! * [`elt`] — elements of 𝒪_K with tracked precision;
//! * [`zeta`] — ζ_p and Eisenstein root search.

pub mod elt;
pub mod field;
pub mod fq;
pub mod zeta;

pub use elt::PadicElement;
pub use field::{Field, FieldSpec};
pub use fq::{Fq, FqElt};

/// Shared fixture fields used by unit, integration, and property tests.
#[doc(hidden)]
pub mod testutil {
    use super::{Field, FieldSpec};

    /// ℚ₉(ζ₃): p = 3, f = 2 (residue poly ω² + 2ω + 2), Eisenstein x² + 3x + 3,
    /// so π = ζ₃ − 1 and e = 2, pm = 3.
    pub fn std_field() -> Field {
        std_field_with_precision(None)
    }

    pub fn std_field_with_precision(precision: Option<i64>) -> Field {
        Field::new(&FieldSpec {
            p: 3,
            residue_poly: vec![2, 2, 1],
            eisenstein_poly: vec![vec![3], vec![3], vec![1]],
            precision,
        })
        .unwrap()
    }

    /// ℚ₉(ζ₉): p = 3, f = 2, Eisenstein polynomial of ζ₉ − 1 (from Φ₉(1+x)),
    /// so e = 6, pm = 9.
    pub fn zeta9_field() -> Field {
        zeta9_field_with_precision(Some(17))
    }

    pub fn zeta9_field_with_precision(precision: Option<i64>) -> Field {
        Field::new(&FieldSpec {
            p: 3,
            residue_poly: vec![2, 2, 1],
            eisenstein_poly: vec![
                vec![3],
                vec![9],
                vec![18],
                vec![21],
                vec![15],
                vec![6],
                vec![1],
            ],
            precision,
        })
        .unwrap()
    }
}
