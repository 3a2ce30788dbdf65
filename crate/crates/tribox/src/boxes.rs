//! Conditional-probability boxes and the analytic correlation families.
//!
//! A tripartite box holds the 64 probabilities P(abc|xyz) for two settings
//! and two outcomes per party; a bipartite box holds the 16 probabilities
//! P(ab|xy). Boxes store raw probabilities — correlators are derived views.

use crate::states::{projector, DensityMatrix, DichotomicObservable, MeasurementSettings};
use crate::linalg::{tensor, tensor_all};
use crate::{tol, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

#[inline]
fn parity_sign(bit: usize) -> f64 {
    if bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The 64-entry tensor P(abc|A_x B_y C_z).
#[derive(Debug, Clone)]
pub struct TripartiteBox {
    p: [f64; 64],
}

#[inline]
fn tri_index(x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> usize {
    (((x << 1 | y) << 1 | z) << 3) | (a << 2 | b << 1 | c)
}

impl TripartiteBox {
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize, usize, usize) -> f64) -> Self {
        let mut p = [0.0; 64];
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                p[tri_index(x, y, z, a, b, c)] = f(x, y, z, a, b, c);
                            }
                        }
                    }
                }
            }
        }
        TripartiteBox { p }
    }

    pub fn uniform() -> Self {
        TripartiteBox { p: [0.125; 64] }
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> f64 {
        self.p[tri_index(x, y, z, a, b, c)]
    }

    #[inline]
    #[allow(clippy::too_many_arguments)] // mirrors the index structure of prob()
    pub fn set_prob(&mut self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize, v: f64) {
        self.p[tri_index(x, y, z, a, b, c)] = v;
    }

    /// Parity-weighted sum Σ (−1)^{a⊕b⊕c} P(abc|xyz).
    pub fn correlator(&self, x: usize, y: usize, z: usize) -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    s += parity_sign(a ^ b ^ c) * self.prob(x, y, z, a, b, c);
                }
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &TripartiteBox) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Range, normalization, and no-signaling at the given tolerance.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for (i, &v) in self.p.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("box probability"));
            }
            if !(-tol::CONSTRUCT..=1.0 + tol::CONSTRUCT).contains(&v) {
                return Err(Error::InvalidBox(format!(
                    "entry {i} = {v} outside [0, 1]"
                )));
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let total: f64 = (0..8)
                        .map(|o| self.prob(x, y, z, o >> 2, (o >> 1) & 1, o & 1))
                        .sum();
                    if (total - 1.0).abs() > tolerance {
                        return Err(Error::InvalidBox(format!(
                            "P(.|{x}{y}{z}) sums to {total}"
                        )));
                    }
                }
            }
        }
        let ns = self.no_signaling_report(tolerance);
        if !ns.pass {
            return Err(Error::InvalidBox(format!(
                "no-signaling violated by {:.3e}",
                ns.max
            )));
        }
        Ok(())
    }

    /// Maximum marginal-consistency discrepancy per marginal family.
    pub fn no_signaling_report(&self, tolerance: f64) -> NoSignalingReport {
        // Two-party marginals must not depend on the third party's setting.
        let mut max_ab = 0.0f64;
        let mut max_ac = 0.0f64;
        let mut max_bc = 0.0f64;
        for s0 in 0..2 {
            for s1 in 0..2 {
                for o0 in 0..2 {
                    for o1 in 0..2 {
                        let ab = |z: usize| -> f64 {
                            (0..2).map(|c| self.prob(s0, s1, z, o0, o1, c)).sum()
                        };
                        max_ab = max_ab.max((ab(0) - ab(1)).abs());
                        let ac = |y: usize| -> f64 {
                            (0..2).map(|b| self.prob(s0, y, s1, o0, b, o1)).sum()
                        };
                        max_ac = max_ac.max((ac(0) - ac(1)).abs());
                        let bc = |x: usize| -> f64 {
                            (0..2).map(|a| self.prob(x, s0, s1, a, o0, o1)).sum()
                        };
                        max_bc = max_bc.max((bc(0) - bc(1)).abs());
                    }
                }
            }
        }
        // Single-party marginals against every pair of other-party settings.
        let single = |party: usize| -> f64 {
            let mut worst = 0.0f64;
            for s in 0..2 {
                for o in 0..2 {
                    let mut vals = Vec::with_capacity(4);
                    for t0 in 0..2 {
                        for t1 in 0..2 {
                            let mut total = 0.0;
                            for u0 in 0..2 {
                                for u1 in 0..2 {
                                    let (x, y, z, a, b, c) = match party {
                                        0 => (s, t0, t1, o, u0, u1),
                                        1 => (t0, s, t1, u0, o, u1),
                                        _ => (t0, t1, s, u0, u1, o),
                                    };
                                    total += self.prob(x, y, z, a, b, c);
                                }
                            }
                            vals.push(total);
                        }
                    }
                    for w in &vals {
                        worst = worst.max((w - vals[0]).abs());
                    }
                }
            }
            worst
        };
        let (max_a, max_b, max_c) = (single(0), single(1), single(2));
        let max = [max_ab, max_ac, max_bc, max_a, max_b, max_c]
            .into_iter()
            .fold(0.0, f64::max);
        NoSignalingReport {
            max_ab,
            max_ac,
            max_bc,
            max_a,
            max_b,
            max_c,
            max,
            tol: tolerance,
            pass: max <= tolerance,
        }
    }

    /// JSON form: one block per setting triple, outcomes in (a,b,c)
    /// lexicographic order.
    pub fn to_json(&self) -> String {
        let blocks: Vec<BoxBlock> = self.blocks();
        serde_json::to_string_pretty(&blocks).expect("box serializes")
    }

    fn blocks(&self) -> Vec<BoxBlock> {
        let mut blocks = Vec::with_capacity(8);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let mut probs = [0.0; 8];
                    for (o, slot) in probs.iter_mut().enumerate() {
                        *slot = self.prob(x, y, z, o >> 2, (o >> 1) & 1, o & 1);
                    }
                    blocks.push(BoxBlock {
                        settings: [x as u8, y as u8, z as u8],
                        probs,
                    });
                }
            }
        }
        blocks
    }

    pub fn from_json(text: &str) -> Result<TripartiteBox> {
        let blocks: Vec<BoxBlock> = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("json line {}, column {}", e.line(), e.column()),
            reason: e.to_string(),
        })?;
        Self::from_blocks(&blocks)
    }

    fn from_blocks(blocks: &[BoxBlock]) -> Result<TripartiteBox> {
        if blocks.len() != 8 {
            return Err(Error::Parse {
                location: "box blocks".into(),
                reason: format!("expected 8 setting blocks, got {}", blocks.len()),
            });
        }
        let mut seen = [false; 8];
        let mut out = TripartiteBox { p: [0.0; 64] };
        for blk in blocks {
            let [x, y, z] = blk.settings;
            if x > 1 || y > 1 || z > 1 {
                return Err(Error::Parse {
                    location: format!("settings {:?}", blk.settings),
                    reason: "setting bits must be 0 or 1".into(),
                });
            }
            let s = (x as usize) << 2 | (y as usize) << 1 | z as usize;
            if seen[s] {
                return Err(Error::Parse {
                    location: format!("settings {:?}", blk.settings),
                    reason: "duplicate setting block".into(),
                });
            }
            seen[s] = true;
            for (o, &v) in blk.probs.iter().enumerate() {
                out.set_prob(
                    x as usize,
                    y as usize,
                    z as usize,
                    o >> 2,
                    (o >> 1) & 1,
                    o & 1,
                    v,
                );
            }
        }
        Ok(out)
    }

    /// CSV form with header `x,y,z,a,b,c,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,a,b,c,p\n");
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                out.push_str(&format!(
                                    "{x},{y},{z},{a},{b},{c},{}\n",
                                    self.prob(x, y, z, a, b, c)
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<TripartiteBox> {
        let mut out = TripartiteBox { p: [f64::NAN; 64] };
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("x,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::Parse {
                    location: format!("csv line {}", lineno + 1),
                    reason: format!("expected 7 fields, got {}", fields.len()),
                });
            }
            let mut bits = [0usize; 6];
            for (k, f) in fields[..6].iter().enumerate() {
                bits[k] = match *f {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::Parse {
                            location: format!("csv line {}, field {}", lineno + 1, k + 1),
                            reason: format!("expected bit, got {other:?}"),
                        })
                    }
                };
            }
            let p: f64 = fields[6].parse().map_err(|_| Error::Parse {
                location: format!("csv line {}, field 7", lineno + 1),
                reason: format!("bad probability {:?}", fields[6]),
            })?;
            out.set_prob(bits[0], bits[1], bits[2], bits[3], bits[4], bits[5], p);
            rows += 1;
        }
        if rows != 64 || out.p.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse {
                location: "csv".into(),
                reason: format!("expected 64 data rows covering all entries, got {rows}"),
            });
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct BoxBlock {
    settings: [u8; 3],
    probs: [f64; 8],
}

/// Per-marginal-family no-signaling discrepancies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub max_ab: f64,
    pub max_ac: f64,
    pub max_bc: f64,
    pub max_a: f64,
    pub max_b: f64,
    pub max_c: f64,
    pub max: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Maximum marginal-consistency discrepancy of a tripartite box.
pub fn check_no_signaling(b: &TripartiteBox, tolerance: f64) -> NoSignalingReport {
    b.no_signaling_report(tolerance)
}

/// The 16-entry tensor P(ab|A_x B_y).
#[derive(Debug, Clone)]
pub struct BipartiteBox {
    p: [f64; 16],
}

#[inline]
fn bi_index(x: usize, y: usize, a: usize, b: usize) -> usize {
    ((x << 1 | y) << 2) | (a << 1 | b)
}

impl BipartiteBox {
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut p = [0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        p[bi_index(x, y, a, b)] = f(x, y, a, b);
                    }
                }
            }
        }
        BipartiteBox { p }
    }

    pub fn uniform() -> Self {
        BipartiteBox { p: [0.25; 16] }
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[bi_index(x, y, a, b)]
    }

    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                s += parity_sign(a ^ b) * self.prob(x, y, a, b);
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &BipartiteBox) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for &v in &self.p {
            if !v.is_finite() || !(-tol::CONSTRUCT..=1.0 + tol::CONSTRUCT).contains(&v) {
                return Err(Error::InvalidBox(format!("entry {v} outside [0, 1]")));
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                let total: f64 = (0..4).map(|o| self.prob(x, y, o >> 1, o & 1)).sum();
                if (total - 1.0).abs() > tolerance {
                    return Err(Error::InvalidBox(format!("P(.|{x}{y}) sums to {total}")));
                }
            }
        }
        let ns = self.no_signaling_max();
        if ns > tolerance {
            return Err(Error::InvalidBox(format!(
                "no-signaling violated by {ns:.3e}"
            )));
        }
        Ok(())
    }

    /// Max discrepancy of single-party marginals across the other setting.
    pub fn no_signaling_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in 0..2 {
            for o in 0..2 {
                let ma = |y: usize| -> f64 { (0..2).map(|b| self.prob(s, y, o, b)).sum() };
                worst = worst.max((ma(0) - ma(1)).abs());
                let mb = |x: usize| -> f64 { (0..2).map(|a| self.prob(x, s, a, o)).sum() };
                worst = worst.max((mb(0) - mb(1)).abs());
            }
        }
        worst
    }
}

fn range_check(name: &'static str, v: f64, lo_open: bool, lo: f64, hi: f64) -> Result<()> {
    let lo_ok = if lo_open { v > lo } else { v >= lo - tol::RANGE_SLACK };
    if !(lo_ok && v <= hi + tol::RANGE_SLACK) {
        return Err(Error::OutOfRange {
            name,
            value: v,
            range: if lo_open { "(0, 1]" } else { "[0, 1]" },
        });
    }
    Ok(())
}

/// Svetlichny family: P = (2 + (−1)^{a⊕b⊕c⊕xy⊕yz⊕xz} √2 V) / 16.
pub fn svetlichny_family(v: f64) -> Result<TripartiteBox> {
    range_check("v", v, false, 0.0, 1.0)?;
    Ok(TripartiteBox::from_fn(|x, y, z, a, b, c| {
        let s = (a ^ b ^ c) ^ (x & y) ^ (y & z) ^ (x & z);
        (2.0 + parity_sign(s) * SQRT_2 * v) / 16.0
    }))
}

/// Mermin family: P = (1 + (−1)^{a⊕b⊕c⊕xy⊕yz⊕xz} δ_{x⊕y⊕1,z} V) / 8.
///
/// The stated range is 0 < V ≤ 1; V = 0 is additionally accepted as the
/// uniform box (a harmless limit that is useful in tests).
pub fn mermin_family(v: f64) -> Result<TripartiteBox> {
    range_check("v", v, false, 0.0, 1.0)?;
    Ok(TripartiteBox::from_fn(|x, y, z, a, b, c| {
        let delta = if (x ^ y ^ 1) == z { 1.0 } else { 0.0 };
        let s = (a ^ b ^ c) ^ (x & y) ^ (y & z) ^ (x & z);
        (1.0 + parity_sign(s) * delta * v) / 8.0
    }))
}

/// BB84 family: P = (1 + (−1)^{a⊕b⊕xy} δ_{x,y} W) / 4, 0 < W ≤ 1.
pub fn bb84_family(w: f64) -> Result<BipartiteBox> {
    range_check("w", w, true, 0.0, 1.0)?;
    Ok(BipartiteBox::from_fn(|x, y, a, b| {
        let delta = if x == y { 1.0 } else { 0.0 };
        (1.0 + parity_sign(a ^ b ^ (x & y)) * delta * w) / 4.0
    }))
}

/// CHSH family: P = (2 + (−1)^{a⊕b⊕xy} √2 W) / 8, 0 < W ≤ 1.
pub fn chsh_family(w: f64) -> Result<BipartiteBox> {
    range_check("w", w, true, 0.0, 1.0)?;
    Ok(BipartiteBox::from_fn(|x, y, a, b| {
        (2.0 + parity_sign(a ^ b ^ (x & y)) * SQRT_2 * w) / 8.0
    }))
}

/// Born-rule box for a three-qubit state and per-party settings.
pub fn born_tripartite(
    rho: &DensityMatrix,
    settings: &MeasurementSettings,
) -> Result<TripartiteBox> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "born_tripartite needs dims [2,2,2], got {:?}",
            rho.dims()
        )));
    }
    let projectors = |pair: &[DichotomicObservable; 2]| {
        [
            [projector(&pair[0], 0), projector(&pair[0], 1)],
            [projector(&pair[1], 0), projector(&pair[1], 1)],
        ]
    };
    let pa = projectors(&settings.alice);
    let pb = projectors(&settings.bob);
    let pc = projectors(&settings.charlie);
    Ok(TripartiteBox::from_fn(|x, y, z, a, b, c| {
        let effect = tensor_all(&[&pa[x][a], &pb[y][b], &pc[z][c]]);
        effect.trace_product_re(rho.matrix())
    }))
}

/// Born-rule box for a two-qubit state and per-party settings.
pub fn born_bipartite(
    rho: &DensityMatrix,
    alice: &[DichotomicObservable; 2],
    bob: &[DichotomicObservable; 2],
) -> Result<BipartiteBox> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "born_bipartite needs dims [2,2], got {:?}",
            rho.dims()
        )));
    }
    Ok(BipartiteBox::from_fn(|x, y, a, b| {
        let effect = tensor(&projector(&alice[x], a), &projector(&bob[y], b));
        effect.trace_product_re(rho.matrix())
    }))
}

/// One party's local reversible operation: an input flip plus an
/// input-conditioned output relabel a → a ⊕ α·x ⊕ β (α applied to the
/// pre-flip input).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRelabeling {
    pub flip_input: bool,
    pub alpha: u8,
    pub beta: u8,
}

impl PartyRelabeling {
    pub fn identity() -> Self {
        PartyRelabeling {
            flip_input: false,
            alpha: 0,
            beta: 0,
        }
    }

    #[inline]
    fn source_input(&self, x: usize) -> usize {
        x ^ self.flip_input as usize
    }

    #[inline]
    fn source_output(&self, x_src: usize, a: usize) -> usize {
        a ^ ((self.alpha as usize) & x_src) ^ self.beta as usize
    }
}

/// Per-party relabelings for a bipartite box (no party permutation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub alice: PartyRelabeling,
    pub bob: PartyRelabeling,
}

impl Relabeling {
    pub fn identity() -> Self {
        Relabeling {
            alice: PartyRelabeling::identity(),
            bob: PartyRelabeling::identity(),
        }
    }

    /// The full group: 8 relabelings per party, 64 pairs.
    pub fn enumerate() -> Vec<Relabeling> {
        let mut parties = Vec::with_capacity(8);
        for flip in [false, true] {
            for alpha in 0..2u8 {
                for beta in 0..2u8 {
                    parties.push(PartyRelabeling {
                        flip_input: flip,
                        alpha,
                        beta,
                    });
                }
            }
        }
        let mut out = Vec::with_capacity(64);
        for &alice in &parties {
            for &bob in &parties {
                out.push(Relabeling { alice, bob });
            }
        }
        out
    }
}

/// Apply a local reversible operation to a bipartite box.
pub fn lro_apply(b: &BipartiteBox, rel: &Relabeling) -> BipartiteBox {
    BipartiteBox::from_fn(|x, y, a, b_out| {
        let xs = rel.alice.source_input(x);
        let ys = rel.bob.source_input(y);
        b.prob(
            xs,
            ys,
            rel.alice.source_output(xs, a),
            rel.bob.source_output(ys, b_out),
        )
    })
}

/// Exhaustive search for a relabeling carrying `b1` onto `b2`.
pub fn lro_equivalent(b1: &BipartiteBox, b2: &BipartiteBox, tolerance: f64) -> Option<Relabeling> {
    Relabeling::enumerate()
        .into_iter()
        .find(|rel| lro_apply(b1, rel).max_abs_diff(b2) <= tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{mermin_settings, noisy_ghz, svetlichny_settings};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn svetlichny_family_entries() {
        let b = svetlichny_family(0.0).unwrap();
        assert!(b.max_abs_diff(&TripartiteBox::uniform()) < 1e-15);

        let b = svetlichny_family(1.0).unwrap();
        assert!((b.prob(0, 0, 0, 0, 0, 0) - (2.0 + SQRT_2) / 16.0).abs() < 1e-15);

        // At v = 1/sqrt2 a parity-odd entry at even setting parity is 1/16.
        let b = svetlichny_family(FRAC_1_SQRT_2).unwrap();
        assert!((b.prob(0, 0, 0, 1, 0, 0) - 1.0 / 16.0).abs() < 1e-15);

        assert!(svetlichny_family(1.5).is_err());
        assert!(svetlichny_family(-0.2).is_err());
    }

    #[test]
    fn mermin_family_entries() {
        let b = mermin_family(1.0).unwrap();
        // delta active at (0,0,1): even-parity outcomes at 1/4, odd at 0.
        assert!((b.prob(0, 0, 1, 0, 0, 0) - 0.25).abs() < 1e-15);
        assert!(b.prob(0, 0, 1, 1, 0, 0).abs() < 1e-15);
        // delta inactive at (0,0,0): uniform.
        for o in 0..8 {
            assert!((b.prob(0, 0, 0, o >> 2, (o >> 1) & 1, o & 1) - 0.125).abs() < 1e-15);
        }
        // v=1/2 at (1,1,1) with odd outcome parity: sign (+) * delta * 1/2.
        let b = mermin_family(0.5).unwrap();
        assert!((b.prob(1, 1, 1, 1, 0, 0) - 3.0 / 16.0).abs() < 1e-15);

        // v=0 accepted as the uniform limit.
        let b = mermin_family(0.0).unwrap();
        assert!(b.max_abs_diff(&TripartiteBox::uniform()) < 1e-15);
        assert!(mermin_family(1.2).is_err());
    }

    #[test]
    fn family_correlators() {
        for v in [0.0, 0.3, 0.7, 1.0] {
            let b = svetlichny_family(v).unwrap();
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let sign = parity_sign((x & y) ^ (y & z) ^ (x & z));
                        let expect = sign * v / SQRT_2;
                        assert!((b.correlator(x, y, z) - expect).abs() < 1e-14);
                    }
                }
            }
        }
        let b = mermin_family(0.6).unwrap();
        assert!((b.correlator(0, 0, 1) - 0.6).abs() < 1e-14);
        assert!(b.correlator(0, 0, 0).abs() < 1e-14);
        assert!(TripartiteBox::uniform().correlator(1, 0, 1).abs() < 1e-15);
    }

    #[test]
    fn bb84_family_entries() {
        let b = bb84_family(1.0).unwrap();
        assert!((b.prob(0, 0, 0, 0) - 0.5).abs() < 1e-15);
        assert!((b.prob(0, 0, 1, 1) - 0.5).abs() < 1e-15);
        for a in 0..2 {
            for bo in 0..2 {
                assert!((b.prob(0, 1, a, bo) - 0.25).abs() < 1e-15);
            }
        }
        // W = sqrt2 * V maps V = 1/(2*sqrt2) to W = 1/2.
        let w = SQRT_2 * (1.0 / (2.0 * SQRT_2));
        assert!((w - 0.5).abs() < 1e-15);
        assert!(bb84_family(0.0).is_err());
    }

    #[test]
    fn chsh_family_entries_and_value() {
        let b = chsh_family(1.0).unwrap();
        assert!((b.prob(0, 0, 0, 0) - (2.0 + SQRT_2) / 8.0).abs() < 1e-15);
        for x in 0..2 {
            for y in 0..2 {
                let total: f64 = (0..4).map(|o| b.prob(x, y, o >> 1, o & 1)).sum();
                assert!((total - 1.0).abs() < 1e-14);
            }
        }
        for w in [0.2, 0.8, 1.0] {
            let b = chsh_family(w).unwrap();
            let chsh = crate::inequalities::chsh_value(&b);
            assert!((chsh - 2.0 * SQRT_2 * w).abs() < 1e-13);
        }
    }

    #[test]
    fn born_matches_family_at_spot_values() {
        for v in [0.0, 0.3, FRAC_1_SQRT_2, 1.0] {
            let rho = noisy_ghz(v).unwrap();
            let b = born_tripartite(&rho, &svetlichny_settings()).unwrap();
            assert!(b.max_abs_diff(&svetlichny_family(v).unwrap()) < 1e-12);
            let b = born_tripartite(&rho, &mermin_settings()).unwrap();
            assert!(b.max_abs_diff(&mermin_family(v).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn born_on_maximally_mixed_is_uniform() {
        let rho = noisy_ghz(0.0).unwrap();
        for settings in [svetlichny_settings(), mermin_settings()] {
            let b = born_tripartite(&rho, &settings).unwrap();
            assert!(b.max_abs_diff(&TripartiteBox::uniform()) < 1e-14);
        }
    }

    #[test]
    fn no_signaling_of_families_and_counterexample() {
        let ns = svetlichny_family(0.7).unwrap().no_signaling_report(1e-10);
        assert!(ns.pass);
        assert!(ns.max < 1e-14);

        let born = born_tripartite(&noisy_ghz(0.9).unwrap(), &svetlichny_settings()).unwrap();
        assert!(born.no_signaling_report(1e-12).pass);

        // Move weight within one context only: normalization survives,
        // signaling appears.
        let mut bad = TripartiteBox::uniform();
        bad.set_prob(0, 0, 0, 0, 0, 0, 0.125 + 0.01);
        bad.set_prob(0, 0, 0, 0, 0, 1, 0.125 - 0.01);
        let ns = bad.no_signaling_report(1e-10);
        assert!(!ns.pass);
        assert!((ns.max - 0.01).abs() < 1e-12);
        assert!(bad.validate(1e-10).is_err());
    }

    #[test]
    fn lro_identity_and_involution() {
        let b = bb84_family(0.7).unwrap();
        let id = Relabeling::identity();
        assert!(lro_apply(&b, &id).max_abs_diff(&b) < 1e-15);

        // Pure input flips and pure output relabels are involutions.
        let flip = Relabeling {
            alice: PartyRelabeling {
                flip_input: true,
                alpha: 0,
                beta: 0,
            },
            bob: PartyRelabeling::identity(),
        };
        let twice = lro_apply(&lro_apply(&b, &flip), &flip);
        assert!(twice.max_abs_diff(&b) < 1e-15);

        let out = Relabeling {
            alice: PartyRelabeling {
                flip_input: false,
                alpha: 1,
                beta: 1,
            },
            bob: PartyRelabeling {
                flip_input: false,
                alpha: 1,
                beta: 0,
            },
        };
        let twice = lro_apply(&lro_apply(&b, &out), &out);
        assert!(twice.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn lro_preserves_box_structure() {
        let b = chsh_family(0.9).unwrap();
        for rel in Relabeling::enumerate() {
            let q = lro_apply(&b, &rel);
            q.validate(1e-12).expect("relabeled box stays valid");
        }
    }

    #[test]
    fn lro_equivalent_finds_and_rejects() {
        let b = bb84_family(0.6).unwrap();
        let w = lro_equivalent(&b, &b, 1e-12).expect("identity witness");
        assert!(lro_apply(&b, &w).max_abs_diff(&b) < 1e-12);

        // BB84 at W=1 has deterministic entries 1/2; CHSH caps at (2+sqrt2)/8.
        assert!(lro_equivalent(&bb84_family(1.0).unwrap(), &chsh_family(1.0).unwrap(), 1e-9)
            .is_none());
    }

    #[test]
    fn json_round_trip() {
        let b = svetlichny_family(0.62).unwrap();
        let text = b.to_json();
        let back = TripartiteBox::from_json(&text).unwrap();
        assert!(b.max_abs_diff(&back) == 0.0);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let b = mermin_family(0.41).unwrap();
        let text = b.to_csv();
        let back = TripartiteBox::from_csv(&text).unwrap();
        assert!(b.max_abs_diff(&back) == 0.0);

        let err = TripartiteBox::from_csv("x,y,z,a,b,c,p\n0,0,0,0,0,0,oops\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(TripartiteBox::from_csv("x,y,z,a,b,c,p\n").is_err());
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(TripartiteBox::from_json("[{\"settings\":[0,0],\"probs\":[]}]").is_err());
        let b = svetlichny_family(0.5).unwrap();
        let mut blocks = b.blocks();
        blocks[1].settings = [0, 0, 0];
        let text = serde_json::to_string(&blocks).unwrap();
        assert!(matches!(
            TripartiteBox::from_json(&text),
            Err(Error::Parse { .. })
        ));
    }
}
