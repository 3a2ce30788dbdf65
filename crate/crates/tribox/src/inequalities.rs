//! Inequality values, scenario bounds, and box classification.
//!
//! Two tripartite operators drive everything:
//!
//! - Mermin: `M = <A0B0C1> + <A0B1C0> + <A1B0C0> - <A1B1C1>`
//! - Svetlichny: `S = Σ_{xyz} (-1)^{xy⊕yz⊕xz} <A_xB_yC_z>`, i.e. the Mermin
//!   block minus its complementary block.
//!
//! Each operator is compared against one bound per trust scenario: the fully
//! device-independent Bell bounds, the 1SDI bounds (Alice and Bob trusted
//! qubits), the 2SDI bounds (only Alice trusted), and the biseparability
//! bounds for three-qubit systems.

use crate::boxes::{BipartiteBox, TripartiteBox};
use crate::tol;
use serde::{Deserialize, Serialize};

/// Bound constants, one per (operator, scenario) pair.
pub mod bounds {
    use std::f64::consts::SQRT_2;

    /// Svetlichny operator vs hybrid nonlocal-local models (fully DI).
    pub const SVETLICHNY_HYBRID: f64 = 4.0;
    /// Mermin operator vs fully local models (fully DI).
    pub const MERMIN_LHV: f64 = 2.0;
    /// Svetlichny operator when Alice and Bob are trusted qubits (1SDI).
    pub const SVETLICHNY_1SDI: f64 = 2.0;
    /// Mermin operator when Alice and Bob are trusted qubits (1SDI).
    pub const MERMIN_1SDI: f64 = SQRT_2;
    /// Svetlichny operator when only Alice is a trusted qubit (2SDI).
    pub const SVETLICHNY_2SDI: f64 = 2.0 * SQRT_2;
    /// Mermin operator when only Alice is a trusted qubit (2SDI).
    pub const MERMIN_2SDI: f64 = 2.0;
    /// Svetlichny operator on biseparable three-qubit states.
    pub const SVETLICHNY_BISEPARABLE: f64 = 2.0 * SQRT_2;
    /// Mermin operator on biseparable three-qubit states.
    pub const MERMIN_BISEPARABLE: f64 = 2.0;
    /// Mermin operator bound certifying genuine entanglement fully DI.
    pub const MERMIN_DI_GENUINE: f64 = 2.0 * SQRT_2;
    /// Largest quantum value of the Svetlichny operator.
    pub const SVETLICHNY_QUANTUM_MAX: f64 = 4.0 * SQRT_2;
    /// Largest quantum (and algebraic) value of the Mermin operator.
    pub const MERMIN_QUANTUM_MAX: f64 = 4.0;
    /// CHSH local bound and its quantum maximum.
    pub const CHSH_LHV: f64 = 2.0;
    pub const CHSH_QUANTUM_MAX: f64 = 2.0 * SQRT_2;
    /// Two-setting steering functional `|<A0B0> + <A1B1>|` vs hidden-state
    /// models on the trusted side.
    pub const TWO_SETTING_STEERING_LHS: f64 = SQRT_2;
}

/// Trust scenario a bound belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "fully-DI")]
    FullyDi,
    #[serde(rename = "1SDI")]
    OneSdi,
    #[serde(rename = "2SDI")]
    TwoSdi,
    #[serde(rename = "biseparable")]
    Biseparable,
    #[serde(rename = "quantum-max")]
    QuantumMax,
}

/// One evaluated inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub scenario: Scenario,
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
    pub margin: f64,
}

impl InequalityReport {
    fn new(name: &str, scenario: Scenario, value: f64, bound: f64, tolerance: f64) -> Self {
        let margin = value - bound;
        InequalityReport {
            name: name.to_string(),
            scenario,
            value,
            bound,
            violated: margin > tolerance,
            margin,
        }
    }
}

/// `M = <A0B0C1> + <A0B1C0> + <A1B0C0> - <A1B1C1>`.
pub fn mermin_value(b: &TripartiteBox) -> f64 {
    b.correlator(0, 0, 1) + b.correlator(0, 1, 0) + b.correlator(1, 0, 0) - b.correlator(1, 1, 1)
}

/// The complementary Mermin block `<A0B1C1> + <A1B0C1> + <A1B1C0> - <A0B0C0>`.
pub fn mermin_prime_value(b: &TripartiteBox) -> f64 {
    b.correlator(0, 1, 1) + b.correlator(1, 0, 1) + b.correlator(1, 1, 0) - b.correlator(0, 0, 0)
}

/// `S = Σ_{xyz} (-1)^{xy⊕yz⊕xz} <A_xB_yC_z>`, the Mermin block minus its
/// complement.
pub fn svetlichny_value(b: &TripartiteBox) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let sign = if ((x & y) ^ (y & z) ^ (x & z)) == 0 {
                    1.0
                } else {
                    -1.0
                };
                s += sign * b.correlator(x, y, z);
            }
        }
    }
    s
}

/// Canonical CHSH: `<A0B0> + <A0B1> + <A1B0> - <A1B1>`.
pub fn chsh_value(b: &BipartiteBox) -> f64 {
    b.correlator(0, 0) + b.correlator(0, 1) + b.correlator(1, 0) - b.correlator(1, 1)
}

/// The equivalent `-<A0B0> + <A0B1> + <A1B0> + <A1B1>`.
pub fn chsh_prime_value(b: &BipartiteBox) -> f64 {
    -b.correlator(0, 0) + b.correlator(0, 1) + b.correlator(1, 0) + b.correlator(1, 1)
}

/// Largest value over the eight CHSH sign variants (all output
/// relabelings of the canonical form).
pub fn chsh_max_value(b: &BipartiteBox) -> f64 {
    let c = [
        b.correlator(0, 0),
        b.correlator(0, 1),
        b.correlator(1, 0),
        b.correlator(1, 1),
    ];
    let mut best = f64::NEG_INFINITY;
    // Sign patterns with an odd number of minus signs, and their negations.
    for mask in 0..16u32 {
        if (mask.count_ones() % 2) != 1 {
            continue;
        }
        let mut v = 0.0;
        for (k, ck) in c.iter().enumerate() {
            let sign = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            v += sign * ck;
        }
        best = best.max(v.abs());
    }
    best
}

/// `|<A0B0> + <A1B1>|`, a two-setting steering functional with hidden-state
/// bound √2 for a trusted qubit measuring two mutually unbiased settings.
pub fn steering_two_setting_value(b: &BipartiteBox) -> f64 {
    (b.correlator(0, 0) + b.correlator(1, 1)).abs()
}

/// The Svetlichny operator contracted CHSH-wise:
/// S = CHSH_AB·C0 − CHSH′_AB·C1, exactly, for every box.
///
/// Returns the absolute discrepancy between `svetlichny_value` and the
/// contracted form; anything above ~1e-14 indicates an indexing bug.
pub fn svetlichny_chsh_identity_check(b: &TripartiteBox) -> f64 {
    let chsh_with_c0 =
        b.correlator(0, 0, 0) + b.correlator(0, 1, 0) + b.correlator(1, 0, 0)
            - b.correlator(1, 1, 0);
    let chsh_prime_with_c1 =
        -b.correlator(0, 0, 1) + b.correlator(0, 1, 1) + b.correlator(1, 0, 1)
            + b.correlator(1, 1, 1);
    (svetlichny_value(b) - (chsh_with_c0 - chsh_prime_with_c1)).abs()
}

/// One report per (operator, scenario bound) pair — nine in total. Reports
/// are emitted even for combinations that are uninformative for a given box;
/// completeness over cleverness.
pub fn classify(b: &TripartiteBox) -> Vec<InequalityReport> {
    classify_with_tol(b, tol::VIOLATION)
}

pub fn classify_with_tol(b: &TripartiteBox, tolerance: f64) -> Vec<InequalityReport> {
    let s = svetlichny_value(b);
    let m = mermin_value(b);
    vec![
        InequalityReport::new(
            "svetlichny",
            Scenario::FullyDi,
            s,
            bounds::SVETLICHNY_HYBRID,
            tolerance,
        ),
        InequalityReport::new("mermin", Scenario::FullyDi, m, bounds::MERMIN_LHV, tolerance),
        InequalityReport::new(
            "mermin-di-genuine",
            Scenario::FullyDi,
            m,
            bounds::MERMIN_DI_GENUINE,
            tolerance,
        ),
        InequalityReport::new(
            "svetlichny-1sdi-steering",
            Scenario::OneSdi,
            s,
            bounds::SVETLICHNY_1SDI,
            tolerance,
        ),
        InequalityReport::new(
            "mermin-1sdi-steering",
            Scenario::OneSdi,
            m,
            bounds::MERMIN_1SDI,
            tolerance,
        ),
        InequalityReport::new(
            "svetlichny-2sdi-steering",
            Scenario::TwoSdi,
            s,
            bounds::SVETLICHNY_2SDI,
            tolerance,
        ),
        InequalityReport::new(
            "mermin-2sdi-steering",
            Scenario::TwoSdi,
            m,
            bounds::MERMIN_2SDI,
            tolerance,
        ),
        InequalityReport::new(
            "svetlichny-biseparability",
            Scenario::Biseparable,
            s,
            bounds::SVETLICHNY_BISEPARABLE,
            tolerance,
        ),
        InequalityReport::new(
            "mermin-biseparability",
            Scenario::Biseparable,
            m,
            bounds::MERMIN_BISEPARABLE,
            tolerance,
        ),
    ]
}
