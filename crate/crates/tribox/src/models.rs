//! Explicit steering LHS-LHV decompositions of the two correlation families.
//!
//! For 0 < v ≤ 1/√2 both families split into four equally weighted terms,
//! each a bipartite quantum table for Alice+Bob times a deterministic
//! response c = α·z ⊕ β for Charlie. The bipartite tables are stored from
//! their closed-form entry patterns ((1 ± √2 v)/4 resp. (1 ± v)/4, and 1/4),
//! so grid checks against the analytic families are exact; each table also
//! carries the two-qubit state that reproduces it under the family's fixed
//! Alice/Bob observables.

use crate::boxes::{
    bb84_family, born_bipartite, chsh_family, lro_equivalent, BipartiteBox, Relabeling,
    TripartiteBox,
};
use crate::linalg::Ket;
use crate::states::{mermin_settings, psi_lambda, svetlichny_settings, DensityMatrix};
use crate::{tol, Error, Family, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// Deterministic single-party response c = α·z ⊕ β.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alpha: u8,
    pub beta: u8,
}

impl DeterministicStrategy {
    pub fn outcome(&self, z: usize) -> usize {
        ((self.alpha as usize) & z) ^ self.beta as usize
    }

    /// Point-mass outcome distribution for a setting.
    pub fn distribution(&self, z: usize) -> [f64; 2] {
        let mut d = [0.0; 2];
        d[self.outcome(z)] = 1.0;
        d
    }
}

/// One convex term: weight × bipartite table × deterministic Charlie.
#[derive(Debug, Clone)]
pub struct ModelTerm {
    pub weight: f64,
    pub table: BipartiteBox,
    pub generating_state: Option<Ket>,
    pub charlie: DeterministicStrategy,
}

/// A steering LHS-LHV decomposition: Σ_λ r_λ P_λ(ab|xy) P_λ(c|z).
#[derive(Debug, Clone)]
pub struct SteeringLhsLhvModel {
    pub terms: Vec<ModelTerm>,
}

impl SteeringLhsLhvModel {
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidModel("no terms".into()));
        }
        let mut total = 0.0;
        for (i, t) in self.terms.iter().enumerate() {
            if t.weight < 0.0 || t.weight.is_nan() {
                return Err(Error::InvalidModel(format!(
                    "term {i} has invalid weight {}",
                    t.weight
                )));
            }
            total += t.weight;
            t.table
                .validate(tol::BOX)
                .map_err(|e| Error::InvalidModel(format!("term {i}: {e}")))?;
        }
        if (total - 1.0).abs() > tol::CONSTRUCT {
            return Err(Error::InvalidModel(format!("weights sum to {total}")));
        }
        Ok(())
    }
}

fn check_model_range(v: f64) -> Result<()> {
    if !(v > 0.0 && v <= FRAC_1_SQRT_2 + tol::RANGE_SLACK) {
        return Err(Error::ModelRange(v));
    }
    Ok(())
}

/// Per-λ strategies shared by both families: λ ↦ (α, β) in binary order.
fn strategy(lambda: usize) -> DeterministicStrategy {
    DeterministicStrategy {
        alpha: (lambda >> 1) as u8,
        beta: (lambda & 1) as u8,
    }
}

/// Sign carried by the (1 ± √2 v)/4 rows of the Svetlichny tables:
/// zero marks a uniform row.
fn svetlichny_row_sign(lambda: usize, x: usize, y: usize) -> f64 {
    match (lambda, x, y) {
        (0, 0, 0) | (1, 1, 1) => 1.0,
        (0, 1, 1) | (1, 0, 0) => -1.0,
        (2, 0, 1) | (2, 1, 0) => 1.0,
        (3, 0, 1) | (3, 1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Sign of the (1 ± v)/4 entries of the Mermin tables; every row carries one.
fn mermin_row_sign(lambda: usize, x: usize, y: usize) -> f64 {
    let plus = match lambda {
        0 => (x & y) == 0,       // rows 00,01,10 plus; 11 minus
        1 => (x & y) == 1,       // complement of λ=0
        2 => !(x == 0 && y == 0), // row 00 minus, others plus
        _ => x == 0 && y == 0,   // row 00 plus, others minus
    };
    if plus {
        1.0
    } else {
        -1.0
    }
}

fn family_table(family: Family, lambda: usize, v: f64) -> BipartiteBox {
    match family {
        Family::Svetlichny => BipartiteBox::from_fn(|x, y, a, b| {
            let sign = svetlichny_row_sign(lambda, x, y);
            let parity = if (a ^ b) == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * parity * SQRT_2 * v) / 4.0
        }),
        Family::Mermin => BipartiteBox::from_fn(|x, y, a, b| {
            let sign = mermin_row_sign(lambda, x, y);
            let parity = if (a ^ b) == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * parity * v) / 4.0
        }),
    }
}

fn steering_model(family: Family, v: f64) -> Result<SteeringLhsLhvModel> {
    check_model_range(v)?;
    let terms = (0..4)
        .map(|lambda| {
            Ok(ModelTerm {
                weight: 0.25,
                table: family_table(family, lambda, v),
                generating_state: Some(psi_lambda(family, lambda, v)?),
                charlie: strategy(lambda),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = SteeringLhsLhvModel { terms };
    model.validate()?;
    Ok(model)
}

/// Four-term decomposition of the Svetlichny family, valid on (0, 1/√2].
pub fn svetlichny_steering_model(v: f64) -> Result<SteeringLhsLhvModel> {
    steering_model(Family::Svetlichny, v)
}

/// Four-term decomposition of the Mermin family, valid on (0, 1/√2].
pub fn mermin_steering_model(v: f64) -> Result<SteeringLhsLhvModel> {
    steering_model(Family::Mermin, v)
}

/// Assemble the tripartite box Σ_λ r_λ P_λ(ab|xy) P_λ(c|z).
pub fn reconstruct(model: &SteeringLhsLhvModel) -> TripartiteBox {
    TripartiteBox::from_fn(|x, y, z, a, b, c| {
        model
            .terms
            .iter()
            .map(|t| t.weight * t.table.prob(x, y, a, b) * t.charlie.distribution(z)[c])
            .sum()
    })
}

/// The fixed Alice/Bob observables that generate each family's tables.
fn family_ab_settings(
    family: Family,
) -> (
    [crate::states::DichotomicObservable; 2],
    [crate::states::DichotomicObservable; 2],
) {
    match family {
        Family::Svetlichny => {
            let s = svetlichny_settings();
            (s.alice, s.bob)
        }
        Family::Mermin => {
            let s = mermin_settings();
            (s.alice, s.bob)
        }
    }
}

/// Max deviation between each tabulated bipartite distribution and the Born
/// table of its generating two-qubit state, over the four λ.
pub fn state_table_deviation(family: Family, v: f64) -> Result<f64> {
    check_model_range(v)?;
    let (alice, bob) = family_ab_settings(family);
    let mut worst = 0.0f64;
    for lambda in 0..4 {
        let ket = psi_lambda(family, lambda, v)?;
        let rho = DensityMatrix::from_pure(&ket, vec![2, 2])?;
        let born = born_bipartite(&rho, &alice, &bob)?;
        worst = worst.max(born.max_abs_diff(&family_table(family, lambda, v)));
    }
    Ok(worst)
}

/// For each λ, search for a local reversible operation carrying the table
/// onto the matching reference family at W = √2·v (BB84 for the Svetlichny
/// tables, CHSH for the Mermin tables).
pub fn reduced_family_witnesses(family: Family, v: f64) -> Result<Vec<Option<Relabeling>>> {
    check_model_range(v)?;
    let w = (SQRT_2 * v).min(1.0);
    let reference = match family {
        Family::Svetlichny => bb84_family(w)?,
        Family::Mermin => chsh_family(w)?,
    };
    Ok((0..4)
        .map(|lambda| {
            lro_equivalent(
                &family_table(family, lambda, v),
                &reference,
                tol::STATE_TABLE,
            )
        })
        .collect())
}
