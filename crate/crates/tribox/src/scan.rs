//! Parameter sweeps, bisection thresholds, and analysis reports.
//!
//! `scan` walks a family over a grid of the visibility parameter, classifies
//! every point, and refines each bound crossing by bisection on the affine
//! value functions; `analyze_*` produce a full single-point report;
//! `verify_model` runs the decomposition checks behind the `verify`
//! subcommand.

use crate::assemblages::{
    box_from_assemblage_1sdi, box_from_assemblage_2sdi, make_assemblage_1sdi,
    make_assemblage_2sdi,
};
use crate::boxes::{born_tripartite, mermin_family, svetlichny_family, NoSignalingReport, Relabeling, TripartiteBox};
use crate::inequalities::{classify_with_tol, svetlichny_chsh_identity_check, InequalityReport};
use crate::linalg::{hermitian_min_eigenvalue, tensor, CMatrix};
use crate::models::{
    mermin_steering_model, reconstruct, reduced_family_witnesses, state_table_deviation,
    svetlichny_steering_model,
};
use crate::states::{
    ghz_witness_value, noisy_ghz, singlet, DensityMatrix, MeasurementSettings,
};
use crate::{tol, Error, Family, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Analytic box of a family at one parameter value.
pub fn family_box(family: Family, v: f64) -> Result<TripartiteBox> {
    match family {
        Family::Svetlichny => svetlichny_family(v),
        Family::Mermin => mermin_family(v),
    }
}

/// Named state constructors reachable from the CLI.
pub fn state_by_name(name: &str, v: Option<f64>) -> Result<DensityMatrix> {
    match name {
        "noisy-ghz" => {
            let v = v.ok_or(Error::OutOfRange {
                name: "v",
                value: f64::NAN,
                range: "[0, 1] (required for noisy-ghz)",
            })?;
            noisy_ghz(v)
        }
        // The singlet on Alice+Bob extended by an uncorrelated maximally
        // mixed qubit on Charlie's side.
        "singlet-ext" => {
            let ab = singlet().outer();
            let half = CMatrix::identity(2).scale(crate::linalg::r(0.5));
            DensityMatrix::new(tensor(&ab, &half), vec![2, 2, 2])
        }
        other => Err(Error::UnknownName {
            kind: "state",
            name: other.to_string(),
        }),
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub v: f64,
    pub witness: f64,
    pub witness_negative: bool,
    pub reports: Vec<InequalityReport>,
}

/// A refined bound crossing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdCrossing {
    pub name: String,
    pub v: f64,
}

/// Sweep output: per-point classification plus bisected thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionReport {
    pub family: Family,
    pub v_min: f64,
    pub v_max: f64,
    pub steps: usize,
    pub seed: u64,
    pub points: Vec<GridPoint>,
    pub thresholds: Vec<ThresholdCrossing>,
}

/// Bisect a sign change of `f` on [lo, hi]; `None` when f does not change
/// sign. The root is located to better than `tol::BISECTION`.
pub fn bisect_crossing(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let rising = fhi > flo;
    for _ in 0..200 {
        if (hi - lo) < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Grid sweep with bisection-refined thresholds.
///
/// Deterministic for fixed (family, range, steps, seed); the seed is carried
/// in the report for reproducibility of any sampling done downstream.
pub fn scan(
    family: Family,
    v_min: f64,
    v_max: f64,
    steps: usize,
    seed: u64,
    tolerance: f64,
) -> Result<RegionReport> {
    if !(0.0 <= v_min && v_min < v_max && v_max <= 1.0 + tol::RANGE_SLACK) {
        return Err(Error::OutOfRange {
            name: "v range",
            value: v_min,
            range: "0 <= v_min < v_max <= 1",
        });
    }
    if steps < 2 {
        return Err(Error::OutOfRange {
            name: "steps",
            value: steps as f64,
            range: ">= 2",
        });
    }

    let mut points = Vec::with_capacity(steps);
    for i in 0..steps {
        let v = v_min + (v_max - v_min) * i as f64 / (steps - 1) as f64;
        let b = family_box(family, v)?;
        let witness = ghz_witness_value(&noisy_ghz(v)?)?;
        points.push(GridPoint {
            v,
            witness,
            witness_negative: witness < -tolerance,
            reports: classify_with_tol(&b, tolerance),
        });
    }

    // Bisect each report's margin over the window; affine in v, so a sign
    // change pins the crossing uniquely.
    let mut thresholds = Vec::new();
    for (k, template) in points[0].reports.iter().enumerate() {
        let name = template.name.clone();
        let margin = |v: f64| -> f64 {
            let b = family_box(family, v).expect("v inside validated window");
            let r = &classify_with_tol(&b, tolerance)[k];
            r.value - r.bound
        };
        if let Some(v) = bisect_crossing(margin, v_min, v_max) {
            // Interior crossings only: a margin that only touches zero at
            // the window edge is not a region boundary.
            if v > v_min + 1e-12 && v < v_max - 1e-12 {
                thresholds.push(ThresholdCrossing { name, v });
            }
        }
    }
    let witness_margin =
        |v: f64| -> f64 { -ghz_witness_value(&noisy_ghz(v).unwrap()).unwrap() };
    if let Some(v) = bisect_crossing(witness_margin, v_min, v_max) {
        if v > v_min + 1e-12 && v < v_max - 1e-12 {
            thresholds.push(ThresholdCrossing {
                name: "ghz-witness".into(),
                v,
            });
        }
    }
    thresholds.sort_by(|a, b| a.v.total_cmp(&b.v));

    Ok(RegionReport {
        family,
        v_min,
        v_max,
        steps,
        seed,
        points,
        thresholds,
    })
}

impl RegionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV rows: v, witness, then value/violated per inequality report.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,witness,witness_negative");
        if let Some(p) = self.points.first() {
            for r in &p.reports {
                out.push_str(&format!(",{0}_value,{0}_violated", r.name));
            }
        }
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{},{}", p.v, p.witness, p.witness_negative));
            for r in &p.reports {
                out.push_str(&format!(",{},{}", r.value, r.violated));
            }
            out.push('\n');
        }
        out
    }

    /// Compact ASCII summary: one strip per inequality, `#` where the grid
    /// point violates the bound.
    pub fn region_strip(&self) -> String {
        let mut out = format!(
            "{} family, v in [{:.3}, {:.3}], {} grid points\n",
            self.family, self.v_min, self.v_max, self.steps
        );
        let width = 56usize;
        let resample = |flag_at: &dyn Fn(&GridPoint) -> bool| -> String {
            (0..width)
                .map(|col| {
                    let idx = col * (self.points.len() - 1) / (width - 1).max(1);
                    if flag_at(&self.points[idx]) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect()
        };
        if let Some(p) = self.points.first() {
            for (k, r) in p.reports.iter().enumerate() {
                let strip = resample(&|gp: &GridPoint| gp.reports[k].violated);
                let cross = self
                    .thresholds
                    .iter()
                    .find(|t| t.name == r.name)
                    .map(|t| format!("  cross v = {:.9}", t.v))
                    .unwrap_or_default();
                out.push_str(&format!("  {:26} |{strip}|{cross}\n", r.name));
            }
        }
        let strip = resample(&|gp: &GridPoint| gp.witness_negative);
        let cross = self
            .thresholds
            .iter()
            .find(|t| t.name == "ghz-witness")
            .map(|t| format!("  cross v = {:.9}", t.v))
            .unwrap_or_default();
        out.push_str(&format!("  {:26} |{strip}|{cross}\n", "ghz-witness"));
        out
    }
}

/// Assemblage consistency numbers for a state + settings analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssemblageChecks {
    pub two_path_1sdi: f64,
    pub two_path_2sdi: f64,
    pub reduction_1sdi: f64,
    pub reduction_2sdi: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Decomposition verification behind the `verify` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: Family,
    pub v: f64,
    pub reconstruction_error: f64,
    pub table_errors: [f64; 4],
    pub lro_witnesses: [Option<Relabeling>; 4],
    pub pass: bool,
}

/// Full single-point analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub source: String,
    pub no_signaling: NoSignalingReport,
    pub reports: Vec<InequalityReport>,
    pub svetlichny_chsh_identity: f64,
    pub witness: Option<f64>,
    pub assemblage: Option<AssemblageChecks>,
    pub model: Option<VerifyReport>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV of the inequality reports.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,scenario,value,bound,violated,margin\n");
        for r in &self.reports {
            let scenario = serde_json::to_value(r.scenario)
                .expect("scenario serializes")
                .as_str()
                .unwrap()
                .to_string();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.name, scenario, r.value, r.bound, r.violated, r.margin
            ));
        }
        out
    }

    pub fn any_violation(&self) -> bool {
        self.reports.iter().any(|r| r.violated)
    }
}

/// Analyze a bare box (e.g. loaded from a file).
pub fn analyze_box(b: &TripartiteBox, source: &str, tolerance: f64) -> Result<AnalysisReport> {
    b.validate(tolerance)?;
    Ok(AnalysisReport {
        source: source.to_string(),
        no_signaling: b.no_signaling_report(tolerance),
        reports: classify_with_tol(b, tolerance),
        svetlichny_chsh_identity: svetlichny_chsh_identity_check(b),
        witness: None,
        assemblage: None,
        model: None,
    })
}

/// Analyze a family point; includes the decomposition verification when the
/// parameter lies in the modelled range.
pub fn analyze_family(family: Family, v: f64, tolerance: f64) -> Result<AnalysisReport> {
    let b = family_box(family, v)?;
    let mut report = analyze_box(&b, &format!("{family} family, v = {v}"), tolerance)?;
    report.witness = Some(ghz_witness_value(&noisy_ghz(v)?)?);
    if v > 0.0 && v <= FRAC_1_SQRT_2 + tol::RANGE_SLACK {
        report.model = Some(verify_model(family, v)?);
    }
    Ok(report)
}

/// Analyze a state measured with given settings; includes witness and
/// assemblage consistency checks.
pub fn analyze_state(
    rho: &DensityMatrix,
    settings: &MeasurementSettings,
    source: &str,
    tolerance: f64,
) -> Result<AnalysisReport> {
    let b = born_tripartite(rho, settings)?;
    let mut report = analyze_box(&b, source, tolerance)?;
    report.witness = Some(ghz_witness_value(rho)?);

    let asm1 = make_assemblage_1sdi(rho, &settings.charlie)?;
    let via1 = box_from_assemblage_1sdi(&asm1, &settings.alice, &settings.bob)?;
    let asm2 = make_assemblage_2sdi(rho, &settings.bob, &settings.charlie)?;
    let via2 = box_from_assemblage_2sdi(&asm2, &settings.alice)?;

    let rho_ab = rho.trace_out(&[2])?;
    let rho_a = rho.trace_out(&[1, 2])?;
    let reduction_1sdi = (0..2)
        .map(|z| asm1.reduced(z).max_abs_diff(rho_ab.matrix()))
        .fold(0.0, f64::max);
    let mut reduction_2sdi = 0.0f64;
    for y in 0..2 {
        for z in 0..2 {
            reduction_2sdi = reduction_2sdi.max(asm2.reduced(y, z).max_abs_diff(rho_a.matrix()));
        }
    }
    let mut min_eig = f64::INFINITY;
    for c in 0..2 {
        for z in 0..2 {
            min_eig = min_eig.min(hermitian_min_eigenvalue(asm1.element(c, z))?);
        }
    }
    for bo in 0..2 {
        for c in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    min_eig = min_eig.min(hermitian_min_eigenvalue(asm2.element(bo, c, y, z))?);
                }
            }
        }
    }
    let two_path_1sdi = b.max_abs_diff(&via1);
    let two_path_2sdi = b.max_abs_diff(&via2);
    report.assemblage = Some(AssemblageChecks {
        two_path_1sdi,
        two_path_2sdi,
        reduction_1sdi,
        reduction_2sdi,
        min_eigenvalue: min_eig,
        pass: two_path_1sdi <= tol::TWO_PATH
            && two_path_2sdi <= tol::TWO_PATH
            && reduction_1sdi <= tolerance
            && reduction_2sdi <= tolerance
            && min_eig >= -tol::POSITIVITY,
    });
    Ok(report)
}

/// Run the three decomposition checks for a family at one parameter value:
/// reconstruction equality, Born-table agreement, and per-λ reduction to the
/// reference bipartite family under local reversible operations.
///
/// Errors with `ModelRange` outside (0, 1/√2].
pub fn verify_model(family: Family, v: f64) -> Result<VerifyReport> {
    let model = match family {
        Family::Svetlichny => svetlichny_steering_model(v)?,
        Family::Mermin => mermin_steering_model(v)?,
    };
    let reconstruction_error = reconstruct(&model).max_abs_diff(&family_box(family, v)?);

    let (alice, bob) = match family {
        Family::Svetlichny => {
            let s = crate::states::svetlichny_settings();
            (s.alice, s.bob)
        }
        Family::Mermin => {
            let s = crate::states::mermin_settings();
            (s.alice, s.bob)
        }
    };
    let mut table_errors = [0.0f64; 4];
    for (lambda, err) in table_errors.iter_mut().enumerate() {
        let ket = model.terms[lambda]
            .generating_state
            .as_ref()
            .expect("family models carry generating states");
        let rho = DensityMatrix::from_pure(ket, vec![2, 2])?;
        let born = crate::boxes::born_bipartite(&rho, &alice, &bob)?;
        *err = born.max_abs_diff(&model.terms[lambda].table);
    }
    let overall_table_error = state_table_deviation(family, v)?;

    let ws = reduced_family_witnesses(family, v)?;
    let lro_witnesses: [Option<Relabeling>; 4] = [ws[0], ws[1], ws[2], ws[3]];

    let pass = reconstruction_error <= tol::RECONSTRUCTION
        && table_errors.iter().all(|e| *e <= tol::STATE_TABLE)
        && overall_table_error <= tol::STATE_TABLE
        && lro_witnesses.iter().all(|w| w.is_some());
    Ok(VerifyReport {
        family,
        v,
        reconstruction_error,
        table_errors,
        lro_witnesses,
        pass,
    })
}
