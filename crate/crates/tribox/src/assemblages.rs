//! Conditional-state assemblages for the partially trusted scenarios.
//!
//! In the 1SDI scenario Charlie's black-box measurement leaves unnormalized
//! two-qubit states σ_{c|z} = Tr_C[(I ⊗ I ⊗ M_{c|z}) ρ] on Alice and Bob; in
//! the 2SDI scenario Bob and Charlie leave single-qubit states
//! σ_{bc|yz} = Tr_BC[(I ⊗ M_{b|y} ⊗ M_{c|z}) ρ] on Alice. Elements are kept
//! unnormalized exactly as defined — outcome probabilities are their traces —
//! and zero-probability elements stay as (near-)zero matrices.

use crate::boxes::TripartiteBox;
use crate::linalg::{hermitian_min_eigenvalue, partial_trace, tensor_all, CMatrix};
use crate::states::{projector, DensityMatrix, DichotomicObservable};
use crate::{tol, Error, Result};
use serde::Serialize;

/// σ_{c|z}: unnormalized conditional states on Alice+Bob, indexed by
/// Charlie's outcome and setting.
#[derive(Debug, Clone)]
pub struct Assemblage1Sdi {
    elements: [[CMatrix; 2]; 2],
}

impl Assemblage1Sdi {
    pub fn new(elements: [[CMatrix; 2]; 2]) -> Result<Self> {
        let asm = Assemblage1Sdi { elements };
        asm.validate(tol::POSITIVITY)?;
        Ok(asm)
    }

    pub fn element(&self, c: usize, z: usize) -> &CMatrix {
        &self.elements[c][z]
    }

    /// P(c|z) = Tr σ_{c|z}.
    pub fn outcome_prob(&self, c: usize, z: usize) -> f64 {
        self.element(c, z).trace().re
    }

    /// Σ_c σ_{c|z} for one setting.
    pub fn reduced(&self, z: usize) -> CMatrix {
        self.element(0, z).add(self.element(1, z))
    }

    /// Positivity of every element, z-independence of the reduced state,
    /// and unit total trace.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for c in 0..2 {
            for z in 0..2 {
                let el = self.element(c, z);
                if el.rows() != 4 || el.cols() != 4 {
                    return Err(Error::InvalidAssemblage(format!(
                        "element ({c},{z}) is {}x{}, expected 4x4",
                        el.rows(),
                        el.cols()
                    )));
                }
                let min = hermitian_min_eigenvalue(el)?;
                if min < -tolerance {
                    return Err(Error::InvalidAssemblage(format!(
                        "element ({c},{z}) has min eigenvalue {min:.3e}"
                    )));
                }
            }
        }
        let consistency = self.reduced(0).max_abs_diff(&self.reduced(1));
        if consistency > tolerance {
            return Err(Error::InvalidAssemblage(format!(
                "reduced state depends on z by {consistency:.3e}"
            )));
        }
        let total = self.reduced(0).trace().re;
        if (total - 1.0).abs() > tolerance {
            return Err(Error::InvalidAssemblage(format!(
                "total trace {total} != 1"
            )));
        }
        Ok(())
    }

    /// JSON dump: per element, setting and outcome indices plus flattened
    /// complex entries as [re, im] pairs.
    pub fn to_json(&self) -> String {
        let mut dump = Vec::with_capacity(4);
        for z in 0..2 {
            for c in 0..2 {
                dump.push(ElementDump::new(vec![c], vec![z], self.element(c, z)));
            }
        }
        serde_json::to_string_pretty(&dump).expect("assemblage serializes")
    }
}

/// σ_{bc|yz}: unnormalized conditional qubit states on Alice.
#[derive(Debug, Clone)]
pub struct Assemblage2Sdi {
    elements: Vec<CMatrix>, // indexed by (b,c,y,z) bits
}

#[inline]
fn idx2(b: usize, c: usize, y: usize, z: usize) -> usize {
    b << 3 | c << 2 | y << 1 | z
}

impl Assemblage2Sdi {
    pub fn element(&self, b: usize, c: usize, y: usize, z: usize) -> &CMatrix {
        &self.elements[idx2(b, c, y, z)]
    }

    pub fn outcome_prob(&self, b: usize, c: usize, y: usize, z: usize) -> f64 {
        self.element(b, c, y, z).trace().re
    }

    /// Σ_{bc} σ_{bc|yz} for one setting pair.
    pub fn reduced(&self, y: usize, z: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(2, 2);
        for b in 0..2 {
            for c in 0..2 {
                acc = acc.add(self.element(b, c, y, z));
            }
        }
        acc
    }

    /// Positivity, (y,z)-independence of the reduced state, unit total
    /// trace, and no-signaling of the induced outcome distribution
    /// P(bc|yz) between the two untrusted parties.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for b in 0..2 {
            for c in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let el = self.element(b, c, y, z);
                        if el.rows() != 2 || el.cols() != 2 {
                            return Err(Error::InvalidAssemblage(format!(
                                "element ({b},{c}|{y},{z}) is {}x{}, expected 2x2",
                                el.rows(),
                                el.cols()
                            )));
                        }
                        let min = hermitian_min_eigenvalue(el)?;
                        if min < -tolerance {
                            return Err(Error::InvalidAssemblage(format!(
                                "element ({b},{c}|{y},{z}) has min eigenvalue {min:.3e}"
                            )));
                        }
                    }
                }
            }
        }
        let base = self.reduced(0, 0);
        for y in 0..2 {
            for z in 0..2 {
                let dev = self.reduced(y, z).max_abs_diff(&base);
                if dev > tolerance {
                    return Err(Error::InvalidAssemblage(format!(
                        "reduced state depends on (y,z) by {dev:.3e}"
                    )));
                }
            }
        }
        let total = base.trace().re;
        if (total - 1.0).abs() > tolerance {
            return Err(Error::InvalidAssemblage(format!(
                "total trace {total} != 1"
            )));
        }
        // Marginal of Bob's outcome must not depend on z, and Charlie's
        // not on y.
        for s in 0..2 {
            for o in 0..2 {
                let pb = |z: usize| -> f64 {
                    (0..2).map(|c| self.outcome_prob(o, c, s, z)).sum()
                };
                if (pb(0) - pb(1)).abs() > tolerance {
                    return Err(Error::InvalidAssemblage(format!(
                        "P(b|y) signals across z by {:.3e}",
                        (pb(0) - pb(1)).abs()
                    )));
                }
                let pc = |y: usize| -> f64 {
                    (0..2).map(|b| self.outcome_prob(b, o, y, s)).sum()
                };
                if (pc(0) - pc(1)).abs() > tolerance {
                    return Err(Error::InvalidAssemblage(format!(
                        "P(c|z) signals across y by {:.3e}",
                        (pc(0) - pc(1)).abs()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut dump = Vec::with_capacity(16);
        for y in 0..2 {
            for z in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        dump.push(ElementDump::new(
                            vec![b, c],
                            vec![y, z],
                            self.element(b, c, y, z),
                        ));
                    }
                }
            }
        }
        serde_json::to_string_pretty(&dump).expect("assemblage serializes")
    }
}

#[derive(Serialize)]
struct ElementDump {
    outcomes: Vec<usize>,
    settings: Vec<usize>,
    entries: Vec<[f64; 2]>,
}

impl ElementDump {
    fn new(outcomes: Vec<usize>, settings: Vec<usize>, m: &CMatrix) -> Self {
        ElementDump {
            outcomes,
            settings,
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// σ_{c|z} = Tr_C[(I ⊗ I ⊗ M_{c|z}) ρ] for Charlie's two observables.
pub fn make_assemblage_1sdi(
    rho: &DensityMatrix,
    charlie: &[DichotomicObservable; 2],
) -> Result<Assemblage1Sdi> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "1SDI assemblage needs dims [2,2,2], got {:?}",
            rho.dims()
        )));
    }
    let i2 = CMatrix::identity(2);
    let make = |c: usize, z: usize| -> Result<CMatrix> {
        let op = tensor_all(&[&i2, &i2, &projector(&charlie[z], c)]);
        partial_trace(&op.mul(rho.matrix()), &[2, 2, 2], &[2])
    };
    let elements = [
        [make(0, 0)?, make(0, 1)?],
        [make(1, 0)?, make(1, 1)?],
    ];
    Assemblage1Sdi::new(elements)
}

/// σ_{bc|yz} = Tr_BC[(I ⊗ M_{b|y} ⊗ M_{c|z}) ρ].
pub fn make_assemblage_2sdi(
    rho: &DensityMatrix,
    bob: &[DichotomicObservable; 2],
    charlie: &[DichotomicObservable; 2],
) -> Result<Assemblage2Sdi> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "2SDI assemblage needs dims [2,2,2], got {:?}",
            rho.dims()
        )));
    }
    let i2 = CMatrix::identity(2);
    let mut elements = Vec::with_capacity(16);
    for _ in 0..16 {
        elements.push(CMatrix::zeros(2, 2));
    }
    for b in 0..2 {
        for c in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let op = tensor_all(&[
                        &i2,
                        &projector(&bob[y], b),
                        &projector(&charlie[z], c),
                    ]);
                    elements[idx2(b, c, y, z)] =
                        partial_trace(&op.mul(rho.matrix()), &[2, 2, 2], &[1, 2])?;
                }
            }
        }
    }
    let asm = Assemblage2Sdi { elements };
    asm.validate(tol::POSITIVITY)?;
    Ok(asm)
}

/// P(abc|xyz) = Tr[(M_{a|x} ⊗ M_{b|y}) σ_{c|z}].
pub fn box_from_assemblage_1sdi(
    asm: &Assemblage1Sdi,
    alice: &[DichotomicObservable; 2],
    bob: &[DichotomicObservable; 2],
) -> Result<TripartiteBox> {
    let b = TripartiteBox::from_fn(|x, y, z, a, bo, c| {
        let effect = crate::linalg::tensor(&projector(&alice[x], a), &projector(&bob[y], bo));
        effect.trace_product_re(asm.element(c, z))
    });
    Ok(b)
}

/// P(abc|xyz) = Tr[M_{a|x} σ_{bc|yz}].
pub fn box_from_assemblage_2sdi(
    asm: &Assemblage2Sdi,
    alice: &[DichotomicObservable; 2],
) -> Result<TripartiteBox> {
    let b = TripartiteBox::from_fn(|x, y, z, a, bo, c| {
        projector(&alice[x], a).trace_product_re(asm.element(bo, c, y, z))
    });
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::born_tripartite;
    use crate::linalg::{r, tensor, Ket};
    use crate::states::{
        mermin_settings, noisy_ghz, pauli_z, singlet, svetlichny_settings, DichotomicObservable,
    };

    fn product_state() -> DensityMatrix {
        // singlet on AB (x) |0><0| on C
        let ab = singlet().outer();
        let c0 = Ket::basis(2, 0).outer();
        DensityMatrix::new(tensor(&ab, &c0), vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn product_state_assemblage_factorizes() {
        let rho = product_state();
        let charlie = svetlichny_settings().charlie;
        let asm = make_assemblage_1sdi(&rho, &charlie).unwrap();
        // sigma_{c|z} = rho_AB * Tr(M_{c|z} |0><0|); for sx and sy each
        // outcome has probability 1/2 on |0>.
        let rho_ab = singlet().outer();
        for c in 0..2 {
            for z in 0..2 {
                let expect = rho_ab.scale(r(0.5));
                assert!(asm.element(c, z).approx_eq(&expect, 1e-12));
            }
        }
    }

    #[test]
    fn ghz_assemblage_element_traces() {
        let asm = make_assemblage_1sdi(&noisy_ghz(1.0).unwrap(), &svetlichny_settings().charlie)
            .unwrap();
        for c in 0..2 {
            for z in 0..2 {
                assert!((asm.outcome_prob(c, z) - 0.5).abs() < 1e-12);
            }
        }
        // Completeness: the reduced state is the same for both settings.
        assert!(asm.reduced(0).max_abs_diff(&asm.reduced(1)) < 1e-14);
    }

    #[test]
    fn reduction_matches_traced_state() {
        for v in [0.0, 0.4, 1.0] {
            let rho = noisy_ghz(v).unwrap();
            let asm = make_assemblage_1sdi(&rho, &mermin_settings().charlie).unwrap();
            let rho_ab = rho.trace_out(&[2]).unwrap();
            assert!(asm.reduced(0).max_abs_diff(rho_ab.matrix()) < 1e-12);

            let asm2 =
                make_assemblage_2sdi(&rho, &mermin_settings().bob, &mermin_settings().charlie)
                    .unwrap();
            let rho_a = rho.trace_out(&[1, 2]).unwrap();
            for y in 0..2 {
                for z in 0..2 {
                    assert!(asm2.reduced(y, z).max_abs_diff(rho_a.matrix()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_sdi_ghz_reduced_is_maximally_mixed() {
        let s = mermin_settings();
        let asm = make_assemblage_2sdi(&noisy_ghz(0.8).unwrap(), &s.bob, &s.charlie).unwrap();
        let half = CMatrix::identity(2).scale(r(0.5));
        assert!(asm.reduced(0, 0).max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn two_path_consistency_both_scenarios() {
        for v in [0.0, 0.35, 0.8, 1.0] {
            for settings in [svetlichny_settings(), mermin_settings()] {
                let rho = noisy_ghz(v).unwrap();
                let direct = born_tripartite(&rho, &settings).unwrap();

                let asm1 = make_assemblage_1sdi(&rho, &settings.charlie).unwrap();
                let via1 = box_from_assemblage_1sdi(&asm1, &settings.alice, &settings.bob).unwrap();
                assert!(direct.max_abs_diff(&via1) < 1e-12);

                let asm2 = make_assemblage_2sdi(&rho, &settings.bob, &settings.charlie).unwrap();
                let via2 = box_from_assemblage_2sdi(&asm2, &settings.alice).unwrap();
                assert!(direct.max_abs_diff(&via2) < 1e-12);
            }
        }
    }

    #[test]
    fn product_box_factorizes() {
        let rho = product_state();
        let s = svetlichny_settings();
        let asm = make_assemblage_1sdi(&rho, &s.charlie).unwrap();
        let b = box_from_assemblage_1sdi(&asm, &s.alice, &s.bob).unwrap();
        // P(abc|xyz) = P(ab|xy) * P(c|z) for a product state.
        let ab = crate::boxes::born_bipartite(
            &DensityMatrix::new(singlet().outer(), vec![2, 2]).unwrap(),
            &s.alice,
            &s.bob,
        )
        .unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    for a in 0..2 {
                        for bo in 0..2 {
                            for c in 0..2 {
                                let expect = ab.prob(x, y, a, bo) * 0.5;
                                assert!((b.prob(x, y, z, a, bo, c) - expect).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_state_2sdi_factorizes() {
        // rho_A (x) rho_BC: every element is rho_A scaled by P(bc|yz).
        let a = Ket::basis(2, 0).outer();
        let bc = singlet().outer();
        let rho = DensityMatrix::new(tensor(&a, &bc), vec![2, 2, 2]).unwrap();
        let s = mermin_settings();
        let asm = make_assemblage_2sdi(&rho, &s.bob, &s.charlie).unwrap();
        let pair = crate::boxes::born_bipartite(
            &DensityMatrix::new(singlet().outer(), vec![2, 2]).unwrap(),
            &s.bob,
            &s.charlie,
        )
        .unwrap();
        for b in 0..2 {
            for c in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let expect = a.scale(r(pair.prob(y, z, b, c)));
                        assert!(asm.element(b, c, y, z).approx_eq(&expect, 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn positivity_across_grid() {
        let s = mermin_settings();
        for i in 0..=10 {
            let v = i as f64 / 10.0;
            let rho = noisy_ghz(v).unwrap();
            let asm = make_assemblage_2sdi(&rho, &s.bob, &s.charlie).unwrap();
            asm.validate(1e-10).unwrap();
        }
    }

    #[test]
    fn dimension_errors() {
        let rho = DensityMatrix::new(CMatrix::identity(4).scale(r(0.25)), vec![2, 2]).unwrap();
        let obs = [
            DichotomicObservable::new(pauli_z(), "sz").unwrap(),
            DichotomicObservable::new(pauli_z(), "sz").unwrap(),
        ];
        assert!(make_assemblage_1sdi(&rho, &obs).is_err());
        assert!(make_assemblage_2sdi(&rho, &obs, &obs).is_err());
    }

    #[test]
    fn json_dump_shape() {
        let asm = make_assemblage_1sdi(&noisy_ghz(0.5).unwrap(), &svetlichny_settings().charlie)
            .unwrap();
        let text = asm.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), 4);
        assert_eq!(arr[0]["entries"].as_array().unwrap().len(), 16);
        assert!(arr[0]["entries"][0].as_array().unwrap().len() == 2);

        let s = mermin_settings();
        let asm2 = make_assemblage_2sdi(&noisy_ghz(0.5).unwrap(), &s.bob, &s.charlie).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&asm2.to_json()).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 16);
        assert_eq!(parsed[0]["entries"].as_array().unwrap().len(), 4);
    }
}
