//! Seeded random states, settings, and boxes for the sampling bound checks.
//!
//! Pure states are drawn by normalizing complex Gaussian vectors, which is
//! uniform in the Haar sense; all randomness flows through a caller-supplied
//! seeded generator so runs are reproducible.

use crate::boxes::{born_tripartite, TripartiteBox};
use crate::linalg::{c, r, CMatrix, Complex, Ket};
use crate::models::DeterministicStrategy;
use crate::states::{projector, DensityMatrix, DichotomicObservable, MeasurementSettings};
use crate::Result;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The crate-standard seeded generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box–Muller.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-like random pure state of the given dimension.
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    loop {
        let amps: Vec<Complex> = (0..dim).map(|_| c(gaussian(rng), gaussian(rng))).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let amps = amps.into_iter().map(|z| z / r(norm)).collect();
            return Ket::normalized(amps).expect("normalized by construction");
        }
    }
}

/// Random ±1 qubit observable n̂·σ with n̂ uniform on the sphere.
pub fn random_observable(rng: &mut impl Rng) -> DichotomicObservable {
    let mut n = [0.0f64; 3];
    loop {
        for slot in &mut n {
            *slot = gaussian(rng);
        }
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len > 1e-6 {
            for slot in &mut n {
                *slot /= len;
            }
            break;
        }
    }
    let m = CMatrix::new(
        2,
        2,
        vec![r(n[2]), c(n[0], -n[1]), c(n[0], n[1]), r(-n[2])],
    )
    .unwrap();
    DichotomicObservable::new(m, "random").expect("unit Bloch vector observable")
}

/// Random dichotomic settings for all three parties.
pub fn random_settings(rng: &mut impl Rng) -> MeasurementSettings {
    MeasurementSettings {
        alice: [random_observable(rng), random_observable(rng)],
        bob: [random_observable(rng), random_observable(rng)],
        charlie: [random_observable(rng), random_observable(rng)],
    }
}

/// Which pair of parties shares the entangled block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    AbVsC,
    AcVsB,
    BcVsA,
}

/// Random biseparable pure three-qubit state: a Haar-like two-qubit state on
/// one pair tensored with a Haar-like single qubit, for a random cut.
pub fn random_biseparable_ket(rng: &mut impl Rng) -> Ket {
    let cut = match rng.gen_range(0..3) {
        0 => Cut::AbVsC,
        1 => Cut::AcVsB,
        _ => Cut::BcVsA,
    };
    random_biseparable_ket_for_cut(rng, cut)
}

pub fn random_biseparable_ket_for_cut(rng: &mut impl Rng, cut: Cut) -> Ket {
    let pair = random_ket(rng, 4);
    let solo = random_ket(rng, 2);
    let (i, j, k) = match cut {
        Cut::AbVsC => (0, 1, 2),
        Cut::AcVsB => (0, 2, 1),
        Cut::BcVsA => (1, 2, 0),
    };
    let mut amps = vec![Complex::ZERO; 8];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let q = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
        *amp = pair.amplitudes()[q[i] * 2 + q[j]] * solo.amplitudes()[q[k]];
    }
    Ket::normalized(amps).expect("product of normalized states")
}

/// Fully product box: random pure qubits for Alice and Bob measured with the
/// given settings, and a random deterministic strategy for Charlie.
pub fn random_product_deterministic_box(
    rng: &mut impl Rng,
    settings: &MeasurementSettings,
) -> TripartiteBox {
    let qubit_probs = |ket: &Ket, obs: &[DichotomicObservable; 2]| {
        let rho = ket.outer();
        [
            [
                projector(&obs[0], 0).trace_product_re(&rho),
                projector(&obs[0], 1).trace_product_re(&rho),
            ],
            [
                projector(&obs[1], 0).trace_product_re(&rho),
                projector(&obs[1], 1).trace_product_re(&rho),
            ],
        ]
    };
    let pa = qubit_probs(&random_ket(rng, 2), &settings.alice);
    let pb = qubit_probs(&random_ket(rng, 2), &settings.bob);
    let charlie = DeterministicStrategy {
        alpha: rng.gen_range(0..2),
        beta: rng.gen_range(0..2),
    };
    TripartiteBox::from_fn(|x, y, z, a, b, c| {
        pa[x][a] * pb[y][b] * charlie.distribution(z)[c]
    })
}

/// Precomputed projective effects M_{a|x} ⊗ M_{b|y} ⊗ M_{c|z} for one choice
/// of settings, for fast Born boxes of pure states.
pub struct BornKernel {
    effects: Vec<CMatrix>, // 64, in box storage order
}

impl BornKernel {
    pub fn new(settings: &MeasurementSettings) -> Self {
        let mut effects = Vec::with_capacity(64);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            for cc in 0..2 {
                                effects.push(crate::linalg::tensor_all(&[
                                    &projector(&settings.alice[x], a),
                                    &projector(&settings.bob[y], b),
                                    &projector(&settings.charlie[z], cc),
                                ]));
                            }
                        }
                    }
                }
            }
        }
        BornKernel { effects }
    }

    /// Born box of a pure three-qubit state: P = <ψ|E|ψ> per effect.
    pub fn box_for_ket(&self, ket: &Ket) -> TripartiteBox {
        assert_eq!(ket.dim(), 8, "BornKernel expects three qubits");
        TripartiteBox::from_fn(|x, y, z, a, b, c| {
            let slot = (((x << 1 | y) << 1 | z) << 3) | (a << 2 | b << 1 | c);
            ket.expectation(&self.effects[slot])
        })
    }
}

/// Born box via the density-matrix path; used to cross-check the kernel.
pub fn born_for_ket(ket: &Ket, settings: &MeasurementSettings) -> Result<TripartiteBox> {
    let rho = DensityMatrix::from_pure(ket, vec![2, 2, 2])?;
    born_tripartite(&rho, settings)
}
