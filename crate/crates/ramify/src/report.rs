//! Serializable report types emitted by the CLI (one JSON object per line).
//!
//! Every object carries `schema` (currently 1) and a `kind` tag so streams
//! can be consumed without look-ahead: a `header`, then one `report` per
//! extension examined (sorted by canonical key for reproducible byte-level
//! output), then a `summary`.

use serde::{Deserialize, Serialize};

use crate::padic::{Field, FieldSpec};

/// Schema version stamped into every emitted object.
pub const SCHEMA_VERSION: u32 = 1;

/// Stream header: what was computed, over which field, with which knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema: u32,
    pub kind: String,
    /// The subcommand that produced the stream.
    pub mode: String,
    pub field: FieldDescription,
    /// RNG seed for sampled enumeration (`None` for exhaustive runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of sampled extensions per break, if sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Whether the brute-force tower oracle was run alongside the pipeline.
    pub oracle: bool,
}

/// Description of the base field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldDescription {
    pub p: u64,
    pub f: usize,
    pub e: i64,
    pub residue_poly: Vec<i64>,
    pub eisenstein_poly: Vec<Vec<i64>>,
    pub precision: i64,
    /// pm = pe/(p−1), the level of p-th-power structure.
    pub pm: i64,
}

impl FieldDescription {
    pub fn new(field: &Field) -> Self {
        let spec: &FieldSpec = field.spec();
        FieldDescription {
            p: field.p,
            f: field.f,
            e: field.e,
            residue_poly: spec.residue_poly.clone(),
            eisenstein_poly: spec.eisenstein_poly.clone(),
            precision: field.n_prec,
            pm: field.pm_level().unwrap_or(-1),
        }
    }
}

/// Invariants of one extension computed by the class-field-theory pipeline,
/// optionally cross-checked by the tower oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecReport {
    pub schema: u32,
    pub kind: String,
    /// Kummer generator data as canonical digit strings (1+ρ₁, 1+ρ₂ are the
    /// generators; these strings encode ρ₁ and ρ₂).
    pub rho1_digits: String,
    pub rho2_digits: String,
    /// The ramification break of L/K.
    pub b: i64,
    /// j₀ = pm − b = v(ρ_i).
    pub j0: i64,
    /// The residue θ = (ρ₂/ρ₁)‾ as 𝔽_p-coordinates over the ω-power basis.
    pub theta: Vec<u64>,
    /// Smallest k ≥ 0 with Λ_p(H ∩ U^{k+1}) a ℤ_{p²}-module (when μ_{p²−1} ⊄ K
    /// the fallback k = b applies; a note is attached when small levels were
    /// skipped and k is only an upper bound — i₁ is unaffected in that case).
    pub k: i64,
    /// Index of inseparability i₁ from the k-formula.
    pub i1: i64,
    /// Membership invariant t (largest s ≤ pm with (1+ρ₁)^{[θ]} ∈ R₀·U^s).
    pub t: i64,
    /// Module invariant t′ = pm − s′ from the ℤ_{p²}-module scan.
    pub t_prime: i64,
    /// Refined break b₊ computed from t.
    pub b_star: i64,
    /// Whether the extension is degenerate (i₁ = p²b − pb), in which case the
    /// closed-form relation between b₊ and i₁ is not asserted.
    pub degenerate: bool,
    /// Oracle values, when the Kummer-tower oracle was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    /// "holds" | "not-applicable" | "FAILED" | "error".
    pub verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Invariants read directly off the Kummer tower L = K(y₁, y₂).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OracleReport {
    /// Ramification breaks of the p²−1 non-trivial σ ∈ Gal(L/K) (all equal).
    pub b: i64,
    /// Indices of inseparability i₀ ≥ i₁ ≥ i₂ = 0 from the Heiermann digits
    /// of the norm of the uniformizer.
    pub i0: i64,
    pub i1: i64,
    pub i2: i64,
    /// i₁ recomputed from the minimal polynomial of π_L (independent route).
    pub i1_minpoly: i64,
    /// Refined break from the truncated-operator orbit of π_L.
    pub b_star: i64,
}

/// Closing summary of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: u32,
    pub kind: String,
    pub total: usize,
    pub verified: usize,
    pub degenerate: usize,
    pub violated: usize,
    pub errors: usize,
    /// Per-break tallies.
    pub cells: Vec<CellSummary>,
    /// Per-(b, k, i₁, b₊) tallies, sorted lexicographically.
    pub joint: Vec<JointCell>,
    /// Observational annotations (e.g. the status of the degenerate table).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Tallies for one ramification break b.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub b: i64,
    pub count: usize,
    /// Distinct i₁ values observed for this break.
    pub i1_values: Vec<i64>,
    /// Distinct b₊ values observed for this break.
    pub b_star_values: Vec<i64>,
}

/// Count of specs sharing one (b, k, i₁, b₊) combination.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JointCell {
    pub b: i64,
    pub k: i64,
    pub i1: i64,
    pub b_star: i64,
    pub count: usize,
}

impl RunHeader {
    pub fn new(mode: &str, field: &Field, seed: Option<u64>, samples: Option<usize>, oracle: bool) -> Self {
        RunHeader {
            schema: SCHEMA_VERSION,
            kind: "header".into(),
            mode: mode.into(),
            field: FieldDescription::new(field),
            seed,
            samples,
            oracle,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::std_field;

    #[test]
    fn header_serializes_with_schema_and_kind() {
        let k = std_field();
        let h = RunHeader::new("verify", &k, Some(7), Some(100), true);
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"schema\":1"));
        assert!(json.contains("\"kind\":\"header\""));
        assert!(json.contains("\"seed\":7"));
        let back: RunHeader = serde_json::from_str(&json).unwrap();
        assert_eq!(back.field.e, 2);
        assert_eq!(back.field.pm, 3);
    }

    #[test]
    fn optional_fields_are_omitted() {
        let k = std_field();
        let h = RunHeader::new("invariants", &k, None, None, false);
        let json = serde_json::to_string(&h).unwrap();
        assert!(!json.contains("seed"));
        assert!(!json.contains("samples"));
    }
}
