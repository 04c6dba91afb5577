//! Ramification invariants of totally ramified (ℤ/pℤ)²-extensions of p-adic fields.
//!
//! Given a base field K (an unramified extension K₀ = ℚ_q of ℚ_p, extended by an
//! Eisenstein polynomial) containing a primitive p-th root of unity, and a pair of
//! Kummer generators 1+ρ₁, 1+ρ₂ cutting out a totally ramified extension L/K with
//! Galois group (ℤ/pℤ)² and a single ramification break b, this crate computes
//!
//! * the ordinary break b and the index of inseparability i₁ of L/K,
//! * the refined ramification break b₊ of L/K,
//!
//! by two independent routes that are cross-checked against one another:
//!
//! 1. a class-field-theoretic pipeline working entirely inside K — truncated
//!    exact p-adic arithmetic ([`padic`]), Artin–Hasse exponentials and their
//!    inverses ([`artin_hasse`]), truncated Laurent series ([`laurent`]), and the
//!    Vostokov pairing ([`vostokov`]) — assembled in [`invariants`];
//! 2. a brute-force oracle that constructs the Kummer tower L = K(y₁, y₂) with
//!    yᵢᵖ = 1+ρᵢ and reads the invariants off uniformizer expansions and Galois
//!    action directly ([`tower`]).
//!
//! All arithmetic is exact modulo an explicitly tracked precision ideal; no
//! floating point is involved anywhere, and precision shortfalls surface as
//! [`Error::Precision`] rather than as wrong answers.

pub mod artin_hasse;
pub mod error;
pub mod invariants;
pub mod laurent;
pub mod padic;
pub mod parse;
pub mod report;
pub mod span;
pub mod tower;
pub mod vostokov;

pub use error::{Error, Result};
pub use invariants::{
    bstar_from_t, i1_from_k, ExtensionSpec, InvariantReport, SpecPolicy, TheoremVerdict,
};
pub use padic::{Field, FieldSpec, PadicElement};
pub use tower::{
    oracle_precision_floor, run_oracle, transport_spec, EisensteinRing, RingElt, Tower,
    TowerElement, TowerOracle,
};
