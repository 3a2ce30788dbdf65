//! # tribox
//!
//! Construction and analysis of three-party correlation experiments with two
//! dichotomic measurements per side.
//!
//! The crate builds conditional-probability boxes `P(abc|xyz)` from quantum
//! states and measurements (Born rule), provides the Svetlichny and Mermin
//! one-parameter correlation families in closed form, evaluates the standard
//! Bell, steering, and biseparability inequalities for the fully
//! device-independent, one-sided (1SDI), and two-sided (2SDI) scenarios, and
//! verifies explicit convex decompositions of both families into local hidden
//! state / hidden variable models.
//!
//! ## Layout
//!
//! - [`linalg`] — minimal dense complex matrices (dims ≤ 8), Kronecker
//!   products, partial traces, Hermitian minimum eigenvalue.
//! - [`states`] — density matrices, ±1-outcome qubit observables, the noisy
//!   GHZ state and the named measurement settings.
//! - [`boxes`] — tripartite/bipartite probability boxes, the analytic
//!   correlation families, correlators, no-signaling checks, local reversible
//!   operations.
//! - [`assemblages`] — conditional-state assemblages for the 1SDI and 2SDI
//!   scenarios and box reconstruction from them.
//! - [`inequalities`] — inequality values, scenario bounds, classification.
//! - [`models`] — explicit steering LHS-LHV decompositions and their
//!   verification against the families.
//! - [`sampling`] — seeded random states and boxes for bound checks.
//! - [`scan`](mod@scan) — parameter sweeps, bisection thresholds, analysis
//!   reports.
//!
//! ## Quick example
//!
//! ```
//! use tribox::{svetlichny_family, svetlichny_value};
//!
//! let b = svetlichny_family(0.8).unwrap();
//! let s = svetlichny_value(&b);
//! assert!((s - 4.0 * 2f64.sqrt() * 0.8).abs() < 1e-12);
//! assert!(s > 4.0); // beyond the hybrid-nonlocal bound: genuinely nonlocal
//! ```

use thiserror::Error;

pub mod linalg;
pub mod states;
pub mod boxes;
pub mod assemblages;
pub mod inequalities;
pub mod models;
pub mod sampling;
pub mod scan;

pub use boxes::{
    bb84_family, born_bipartite, born_tripartite, check_no_signaling, chsh_family, lro_apply,
    lro_equivalent, mermin_family, svetlichny_family, BipartiteBox, NoSignalingReport,
    PartyRelabeling, Relabeling, TripartiteBox,
};
pub use assemblages::{
    box_from_assemblage_1sdi, box_from_assemblage_2sdi, make_assemblage_1sdi,
    make_assemblage_2sdi, Assemblage1Sdi, Assemblage2Sdi,
};
pub use inequalities::{
    bounds, chsh_max_value, chsh_prime_value, chsh_value, classify, classify_with_tol,
    mermin_value, steering_two_setting_value, svetlichny_chsh_identity_check, svetlichny_value,
    InequalityReport, Scenario,
};
pub use linalg::{hermitian_min_eigenvalue, partial_trace, tensor, CMatrix, Complex, Ket};
pub use models::{
    mermin_steering_model, reconstruct, reduced_family_witnesses, state_table_deviation,
    svetlichny_steering_model, DeterministicStrategy, ModelTerm, SteeringLhsLhvModel,
};
pub use scan::{
    analyze_box, analyze_family, analyze_state, bisect_crossing, scan, verify_model,
    AnalysisReport, GridPoint, RegionReport, ThresholdCrossing, VerifyReport,
};
pub use states::{
    ghz_ket, ghz_witness_value, mermin_settings, noisy_ghz, projector, psi_lambda,
    settings_by_name, singlet, svetlichny_settings, DensityMatrix, DichotomicObservable,
    MeasurementSettings,
};

/// Which one-parameter correlation family is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Svetlichny,
    Mermin,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Svetlichny => "svetlichny",
            Family::Mermin => "mermin",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svetlichny" => Ok(Family::Svetlichny),
            "mermin" => Ok(Family::Mermin),
            other => Err(Error::UnknownName {
                kind: "family",
                name: other.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Numerical tolerances used across the crate.
///
/// All arithmetic here is short chains of small dense operations, so the
/// tolerances can sit close to machine precision.
pub mod tol {
    /// Constructor validation (unit trace, hermiticity, normalization).
    pub const CONSTRUCT: f64 = 1e-12;
    /// Eigenvalue / positivity assertions.
    pub const POSITIVITY: f64 = 1e-10;
    /// Box normalization and no-signaling checks.
    pub const BOX: f64 = 1e-10;
    /// Margin above a bound that counts as a violation.
    pub const VIOLATION: f64 = 1e-10;
    /// Direct Born route vs assemblage route agreement.
    pub const TWO_PATH: f64 = 1e-12;
    /// Convex-model reconstruction vs analytic family.
    pub const RECONSTRUCTION: f64 = 1e-12;
    /// Born tables from generating states vs tabulated entries.
    pub const STATE_TABLE: f64 = 1e-10;
    /// End-to-end reconstructions through several operations.
    pub const END_TO_END: f64 = 1e-9;
    /// Reported precision of bisected parameter thresholds.
    pub const BISECTION: f64 = 1e-9;
    /// Slack accepted on closed parameter ranges, so that computed
    /// endpoints like sqrt(2)*FRAC_1_SQRT_2 (= 1 + 2 ulp) stay legal.
    pub const RANGE_SLACK: f64 = 1e-9;
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("not a dichotomic observable: {0}")]
    InvalidObservable(String),
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },
    #[error("model out of stated range: v = {0} not in (0, 1/sqrt(2)]")]
    ModelRange(f64),
    #[error("unknown {kind} name: {name:?}")]
    UnknownName { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by out-of-range or unknown user input
    /// (CLI maps these to usage errors, exit code 2).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. } | Error::ModelRange(_) | Error::UnknownName { .. }
        )
    }
}

// Book chapters double as doctests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(getting_started, "../../../book/src/getting-started.md");
    chapter!(boxes, "../../../book/src/boxes.md");
    chapter!(states, "../../../book/src/states.md");
    chapter!(inequalities, "../../../book/src/inequalities.md");
    chapter!(assemblages, "../../../book/src/assemblages.md");
    chapter!(models, "../../../book/src/models.md");
    chapter!(scans, "../../../book/src/scans.md");
    chapter!(cli, "../../../book/src/cli.md");
    chapter!(readme, "../../../README.md");
}
