//! Quantum states and dichotomic measurements.
//!
//! Everything downstream measures two ±1-outcome observables per party.
//! Outcomes are encoded as bits with eigenvalue (-1)^a, so outcome 0 is the
//! +1 eigenspace; this matches parity expressions like `a ⊕ b ⊕ c`.

use crate::linalg::{c, partial_trace, r, CMatrix, Complex, Ket};
use crate::{hermitian_min_eigenvalue, tol, Error, Family, Result};
use std::f64::consts::FRAC_1_SQRT_2;

pub fn pauli_x() -> CMatrix {
    CMatrix::new(2, 2, vec![r(0.0), r(1.0), r(1.0), r(0.0)]).unwrap()
}

pub fn pauli_y() -> CMatrix {
    CMatrix::new(2, 2, vec![r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::new(2, 2, vec![r(1.0), r(0.0), r(0.0), r(-1.0)]).unwrap()
}

/// Positive unit-trace Hermitian matrix with a fixed subsystem split.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates hermiticity and unit trace to 1e-12 and positivity to
    /// -1e-10 on the smallest eigenvalue.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != total {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{} but dims {:?} give {}",
                matrix.rows(),
                matrix.cols(),
                dims,
                total
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol::CONSTRUCT {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity deviation {dev:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::CONSTRUCT || tr.im.abs() > tol::CONSTRUCT {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = hermitian_min_eigenvalue(&matrix)?;
        if min < -tol::POSITIVITY {
            return Err(Error::InvalidDensityMatrix(format!(
                "min eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix, dims })
    }

    pub fn from_pure(ket: &Ket, dims: Vec<usize>) -> Result<Self> {
        Self::new(ket.outer(), dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Reduced state after tracing out the listed subsystems.
    pub fn trace_out(&self, traced: &[usize]) -> Result<DensityMatrix> {
        let reduced = partial_trace(&self.matrix, &self.dims, traced)?;
        let kept: Vec<usize> = (0..self.dims.len())
            .filter(|k| !traced.contains(k))
            .map(|k| self.dims[k])
            .collect();
        DensityMatrix::new(reduced, kept)
    }
}

/// Hermitian qubit observable squaring to the identity (eigenvalues ±1).
#[derive(Debug, Clone)]
pub struct DichotomicObservable {
    matrix: CMatrix,
    label: String,
}

impl DichotomicObservable {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Error::InvalidObservable(format!(
                "must be 2x2, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol::CONSTRUCT {
            return Err(Error::InvalidObservable(format!(
                "hermiticity deviation {dev:.3e}"
            )));
        }
        let sq = matrix.mul(&matrix);
        let unital = sq.max_abs_diff(&CMatrix::identity(2));
        if unital > tol::CONSTRUCT {
            return Err(Error::InvalidObservable(format!(
                "square deviates from identity by {unital:.3e}"
            )));
        }
        Ok(DichotomicObservable {
            matrix,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Projector onto the outcome-`a` eigenspace: (I + (-1)^a O)/2.
pub fn projector(obs: &DichotomicObservable, outcome: usize) -> CMatrix {
    debug_assert!(outcome < 2);
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    CMatrix::identity(2)
        .add(&obs.matrix().scale(r(sign)))
        .scale(r(0.5))
}

/// Two dichotomic observables per party, indexed by the setting bit.
#[derive(Debug, Clone)]
pub struct MeasurementSettings {
    pub alice: [DichotomicObservable; 2],
    pub bob: [DichotomicObservable; 2],
    pub charlie: [DichotomicObservable; 2],
}

impl MeasurementSettings {
    pub fn party(&self, party: usize) -> &[DichotomicObservable; 2] {
        match party {
            0 => &self.alice,
            1 => &self.bob,
            _ => &self.charlie,
        }
    }
}

fn obs(m: CMatrix, label: &str) -> DichotomicObservable {
    DichotomicObservable::new(m, label).expect("built-in observable is valid")
}

/// Settings that maximize the Svetlichny operator on the GHZ state:
/// A0=σx, A1=σy, B0=(σx−σy)/√2, B1=(σx+σy)/√2, C0=σx, C1=σy.
pub fn svetlichny_settings() -> MeasurementSettings {
    let sx = pauli_x();
    let sy = pauli_y();
    MeasurementSettings {
        alice: [obs(sx.clone(), "sx"), obs(sy.clone(), "sy")],
        bob: [
            obs(sx.sub(&sy).scale(r(FRAC_1_SQRT_2)), "(sx-sy)/sqrt2"),
            obs(sx.add(&sy).scale(r(FRAC_1_SQRT_2)), "(sx+sy)/sqrt2"),
        ],
        charlie: [obs(sx, "sx"), obs(sy, "sy")],
    }
}

/// GHZ-paradox settings: A0=σx, A1=σy, B0=σx, B1=σy, C0=−σy, C1=σx.
///
/// Charlie's pair is the x/y mutually unbiased pair with the input labels
/// chosen so that the deterministic parity constraints sit at the settings
/// with x ⊕ y ⊕ 1 = z; measuring the noisy GHZ state with these settings
/// reproduces the Mermin correlation family entry by entry.
pub fn mermin_settings() -> MeasurementSettings {
    let sx = pauli_x();
    let sy = pauli_y();
    MeasurementSettings {
        alice: [obs(sx.clone(), "sx"), obs(sy.clone(), "sy")],
        bob: [obs(sx.clone(), "sx"), obs(sy.clone(), "sy")],
        charlie: [obs(sy.scale(r(-1.0)), "-sy"), obs(sx, "sx")],
    }
}

/// Named settings for the CLI surface.
pub fn settings_by_name(name: &str) -> Result<MeasurementSettings> {
    match name {
        "svetlichny-optimal" => Ok(svetlichny_settings()),
        "ghz-paradox" => Ok(mermin_settings()),
        other => Err(Error::UnknownName {
            kind: "settings",
            name: other.to_string(),
        }),
    }
}

/// (|000> + |111>)/√2.
pub fn ghz_ket() -> Ket {
    let mut amps = vec![Complex::ZERO; 8];
    amps[0] = r(FRAC_1_SQRT_2);
    amps[7] = r(FRAC_1_SQRT_2);
    Ket::normalized(amps).unwrap()
}

/// (|01> − |10>)/√2.
pub fn singlet() -> Ket {
    Ket::normalized(vec![
        Complex::ZERO,
        r(FRAC_1_SQRT_2),
        r(-FRAC_1_SQRT_2),
        Complex::ZERO,
    ])
    .unwrap()
}

/// `V |GHZ><GHZ| + (1-V) I/8` on dims `[2,2,2]`.
pub fn noisy_ghz(v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0 + tol::RANGE_SLACK).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "[0, 1]",
        });
    }
    let m = ghz_ket()
        .outer()
        .scale(r(v))
        .add(&CMatrix::identity(8).scale(r((1.0 - v) / 8.0)));
    DensityMatrix::new(m, vec![2, 2, 2])
}

/// Projector witness value Tr[(I/2 − |GHZ><GHZ|) ρ].
///
/// Negative values certify genuine tripartite entanglement. On the noisy
/// GHZ state this equals 3/8 − 7V/8, with root V = 3/7.
pub fn ghz_witness_value(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "witness needs dims [2,2,2], got {:?}",
            rho.dims()
        )));
    }
    let w = CMatrix::identity(8).scale(r(0.5)).sub(&ghz_ket().outer());
    Ok(w.trace_product_re(rho.matrix()))
}

/// Two-qubit generating states for the convex decompositions:
/// cosθ|00> ± ((1∓i) sinθ/√2)|11> with sin 2θ = √2·v, θ ∈ (0, π/4].
///
/// The four phase patterns depend on the family; `lambda` indexes them the
/// way the corresponding bipartite tables are ordered.
pub fn psi_lambda(family: Family, lambda: usize, v: f64) -> Result<Ket> {
    if lambda > 3 {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda as f64,
            range: "{0,1,2,3}",
        });
    }
    if !(v > 0.0 && v <= FRAC_1_SQRT_2 + tol::RANGE_SLACK) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "(0, 1/sqrt(2)]",
        });
    }
    let theta = 0.5 * (std::f64::consts::SQRT_2 * v).min(1.0).asin();
    let (ct, st) = (theta.cos(), theta.sin());
    // (sign, phase): coefficient of |11> is sign * (1 + phase*i) * st / sqrt2.
    let (sign, phase) = match (family, lambda) {
        (Family::Svetlichny, 0) => (1.0, -1.0),
        (Family::Svetlichny, 1) => (-1.0, -1.0),
        (Family::Svetlichny, 2) => (1.0, 1.0),
        (Family::Svetlichny, _) => (-1.0, 1.0),
        (Family::Mermin, 0) => (1.0, 1.0),
        (Family::Mermin, 1) => (-1.0, 1.0),
        (Family::Mermin, 2) => (-1.0, -1.0),
        (Family::Mermin, _) => (1.0, -1.0),
    };
    let coeff = c(sign, sign * phase) * r(st * FRAC_1_SQRT_2);
    Ket::normalized(vec![r(ct), Complex::ZERO, Complex::ZERO, coeff])
}
