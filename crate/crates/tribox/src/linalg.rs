//! Minimal dense complex linear algebra for dimensions up to 8.
//!
//! One global convention is fixed here and used everywhere else: storage is
//! row-major and in tensor products the *first* factor is the most
//! significant subsystem, so for parties A, B, C the basis index of
//! `|q_A q_B q_C>` is `4*q_A + 2*q_B + q_C`.

use crate::{tol, Error, Result};

pub type Complex = num_complex::Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Dense complex matrix, row-major.
///
/// Equality is always tolerance-parameterized (`approx_eq`); there is no
/// `PartialEq` on purpose.
#[derive(Debug, Clone)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    /// Build from a row-major entry list. Rejects non-finite entries and
    /// length mismatches.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = r(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: Complex) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Re Tr(self * other); the usual pairing for expectation values.
    pub fn trace_product_re(&self, other: &CMatrix) -> f64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut t = Complex::ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                t += self.get(i, j) * other.get(j, i);
            }
        }
        t.re
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tolerance: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.max_abs_diff(other) <= tolerance
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tolerance
    }
}

/// Complex state vector.
#[derive(Debug, Clone)]
pub struct Ket {
    amps: Vec<Complex>,
}

impl Ket {
    /// Physical-state constructor: requires finite amplitudes and unit norm
    /// within `tol::CONSTRUCT`.
    pub fn normalized(amps: Vec<Complex>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch("empty state vector".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitude"));
        }
        let k = Ket { amps };
        let n = k.norm();
        if (n - 1.0).abs() > tol::CONSTRUCT {
            return Err(Error::OutOfRange {
                name: "state norm",
                value: n,
                range: "1 ± 1e-12",
            });
        }
        Ok(k)
    }

    /// Basis state |i> in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amps = vec![Complex::ZERO; dim];
        amps[i] = r(1.0);
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Ket) -> Complex {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Projector |psi><psi|.
    pub fn outer(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.amps[i] * self.amps[j].conj()
        })
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket { amps }
    }

    /// <psi| M |psi> as a real number (M Hermitian).
    pub fn expectation(&self, m: &CMatrix) -> f64 {
        debug_assert_eq!(m.rows(), self.dim());
        let mut acc = Complex::ZERO;
        for i in 0..self.dim() {
            let mut row = Complex::ZERO;
            for j in 0..self.dim() {
                row += m.get(i, j) * self.amps[j];
            }
            acc += self.amps[i].conj() * row;
        }
        acc.re
    }
}

/// Kronecker product; first factor is the most significant subsystem.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Kronecker product of a list, left to right.
pub fn tensor_all(ms: &[&CMatrix]) -> CMatrix {
    assert!(!ms.is_empty());
    let mut out = ms[0].clone();
    for m in &ms[1..] {
        out = tensor(&out, m);
    }
    out
}

/// Partial trace over the subsystems listed in `traced`.
///
/// `dims` gives the per-subsystem dimensions, most significant first; their
/// product must equal the (square) matrix dimension. Tracing every subsystem
/// leaves a 1x1 matrix holding the scalar trace.
pub fn partial_trace(m: &CMatrix, dims: &[usize], traced: &[usize]) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() || dims.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {:?} do not factor dimension {}",
            dims,
            m.rows()
        )));
    }
    let mut is_traced = vec![false; dims.len()];
    for &t in traced {
        if t >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "traced subsystem {} out of range for {} subsystems",
                t,
                dims.len()
            )));
        }
        is_traced[t] = true;
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&k| !is_traced[k]).collect();
    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();

    // Row-major multi-index decode, most significant subsystem first.
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut parts = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            parts[k] = idx % dims[k];
            idx /= dims[k];
        }
        parts
    };
    let encode_kept = |parts: &[usize]| -> usize {
        let mut idx = 0;
        for &k in &kept {
            idx = idx * dims[k] + parts[k];
        }
        idx
    };

    let mut out = CMatrix::zeros(kept_dim.max(1), kept_dim.max(1));
    for i in 0..total {
        let pi = decode(i);
        for j in 0..total {
            let pj = decode(j);
            if (0..dims.len()).any(|k| is_traced[k] && pi[k] != pj[k]) {
                continue;
            }
            let (oi, oj) = (encode_kept(&pi), encode_kept(&pj));
            let v = out.get(oi, oj) + m.get(i, j);
            out.set(oi, oj, v);
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// Closed form for 1x1 and 2x2; for larger matrices the Hermitian matrix
/// H = A + iB is embedded as the real symmetric [[A, -B], [B, A]] (same
/// spectrum, doubled) and diagonalized by cyclic Jacobi sweeps.
pub fn hermitian_min_eigenvalue(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > 1e-9 {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    if n == 1 {
        return Ok(m.get(0, 0).re);
    }
    if n == 2 {
        let (a, d) = (m.get(0, 0).re, m.get(1, 1).re);
        // Symmetrized off-diagonal kills ~1e-16 asymmetry from products.
        let b = (m.get(0, 1) + m.get(1, 0).conj()).norm() / 2.0;
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        return Ok(mid - rad);
    }

    let mut em = vec![vec![0.0f64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize to wash out round-off asymmetry before embedding.
            let h = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            em[i][j] = h.re;
            em[i + n][j + n] = h.re;
            em[i][j + n] = -h.im;
            em[i + n][j] = h.im;
        }
    }
    let eigs = jacobi_symmetric_eigenvalues(em);
    Ok(eigs.into_iter().fold(f64::INFINITY, f64::min))
}

/// Cyclic Jacobi on a real symmetric matrix; returns the eigenvalues.
#[allow(clippy::needless_range_loop)] // rotations address paired indices
fn jacobi_symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cth = 1.0 / (t * t + 1.0).sqrt();
                let sth = t * cth;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cth * akp - sth * akq;
                    a[k][q] = sth * akp + cth * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cth * apk - sth * aqk;
                    a[q][k] = sth * apk + cth * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
