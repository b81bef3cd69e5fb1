//! Small dense complex linear algebra: just enough for two- and three-qubit
//! density matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `|a><b|` for two kets of equal or different length.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix product; panics on inner-dimension mismatch (see [`CMatrix::try_mul`]).
    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs)
            .expect("matrix product dimension mismatch")
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `self * m * self^dagger`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        self.matmul(m).matmul(&self.adjoint())
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square());
        let n = self.rows;
        let herm =
            nalgebra::DMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> CMatrix {
    CMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a[(ai, aj)];
            if x == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = x * b[(bi, bj)];
                }
            }
        }
    }
    out
}

pub fn kron_ket(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Pure state vector. Normalization is checked where it matters
/// ([`pure_fidelity`], [`QState::from_ket`]), not on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket(Vec<Complex64>);

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Ket(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Ket(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn inner(&self, other: &Ket) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn with_phase(&self, phase: f64) -> Ket {
        let w = Complex64::from_polar(1.0, phase);
        Ket(self.0.iter().map(|a| a * w).collect())
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.0, &self.0)
    }

    fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(())
    }
}

/// Density matrix satisfying hermiticity, unit trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    matrix: CMatrix,
}

impl QState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        validate_density(&matrix, tol.validity)?;
        Ok(Self { matrix })
    }

    /// Skips validation; for matrices that are valid by construction
    /// (convex mixtures, CPTP images of valid states).
    pub(crate) fn trusted(matrix: CMatrix) -> Self {
        debug_assert!(validate_density(&matrix, 1e-8).is_ok(), "{matrix:?}");
        Self { matrix }
    }

    pub fn from_ket(ket: &Ket) -> Result<Self> {
        ket.check_normalized(Tolerances::DEFAULT.validity)?;
        Ok(Self {
            matrix: ket.projector(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.hermitian_eigenvalues()
    }
}

fn validate_density(m: &CMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidState(format!(
            "{}x{} matrix is not square",
            m.rows, m.cols
        )));
    }
    if m.data
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let herm = m.hermiticity_defect();
    if herm > tol {
        return Err(Error::InvalidState(format!(
            "not Hermitian (defect {herm:e})"
        )));
    }
    let tr = m.trace();
    if (tr - ONE).norm() > tol {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let min_ev = m.hermitian_eigenvalues()[0];
    if min_ev < -tol {
        return Err(Error::InvalidState(format!(
            "not positive semidefinite (eigenvalue {min_ev:e})"
        )));
    }
    Ok(())
}

/// Reduced density matrix over the subsystems in `keep` (any order; output
/// keeps them in ascending order).
pub fn partial_trace(s: &QState, keep: &[usize], dims: &[usize]) -> Result<QState> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to state dimension {}",
            s.dim()
        )));
    }
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {keep:?} must be a nonempty subset of 0..{}",
            dims.len()
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..dims.len())
        .filter(|&i| kept[i])
        .map(|i| dims[i])
        .collect();
    let traced_dims: Vec<usize> = (0..dims.len())
        .filter(|&i| !kept[i])
        .map(|i| dims[i])
        .collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Full index from (kept multi-index, traced multi-index).
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut kd = digits(kept_idx, &kept_dims).into_iter();
        let mut td = digits(traced_idx, &traced_dims).into_iter();
        let mut full = 0;
        for (i, &d) in dims.iter().enumerate() {
            let digit = if kept[i] { kd.next() } else { td.next() }.unwrap_or(0);
            full = full * d + digit;
        }
        full
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = ZERO;
            for t in 0..traced_total {
                acc += s.matrix[(compose(r, t), compose(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(QState::trusted(out))
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

/// `sum_i K_i rho K_i^dagger`.
pub fn apply_kraus(s: &QState, ch: &KrausChannel) -> Result<QState> {
    if ch.dim() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {}, state has dimension {}",
            ch.dim(),
            s.dim()
        )));
    }
    let mut out = CMatrix::zeros(s.dim(), s.dim());
    for k in ch.operators() {
        out = &out + &k.conjugate(&s.matrix);
    }
    Ok(QState::trusted(out))
}

/// `<ket| rho |ket>`, clamped into `[0, 1]` when within tolerance of either end.
pub fn pure_fidelity(ket: &Ket, s: &QState) -> Result<f64> {
    let tol = Tolerances::DEFAULT.validity;
    ket.check_normalized(tol)?;
    if ket.dim() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket has dimension {}, state {}",
            ket.dim(),
            s.dim()
        )));
    }
    Ok(clamp_unit(expectation(ket.amplitudes(), &s.matrix), tol))
}

/// `<v|m|v>` without any checks.
pub(crate) fn expectation_complex(v: &[Complex64], m: &CMatrix) -> Complex64 {
    let mv = m.apply(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

/// Real part of `<v|m|v>` without any checks.
pub(crate) fn expectation(v: &[Complex64], m: &CMatrix) -> f64 {
    expectation_complex(v, m).re
}

pub(crate) fn clamp_unit(x: f64, tol: f64) -> f64 {
    if x < 0.0 && x > -tol {
        0.0
    } else if x > 1.0 && x < 1.0 + tol {
        1.0
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausChannel;
    use crate::states::{bell_state, schmidt_state, BellIndex, SchmidtParam};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(2)),
            CMatrix::identity(4)
        );
        let xx = kron(&pauli_x(), &pauli_x());
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(xx.apply(&ket00), vec![ZERO, ZERO, ZERO, ONE]);
        let zi = kron(&pauli_z(), &CMatrix::identity(2));
        let diag: Vec<f64> = (0..4).map(|i| zi[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn partial_trace_examples() {
        let phi_plus = QState::from_ket(&bell_state(BellIndex::PhiPlus)).unwrap();
        let r = partial_trace(&phi_plus, &[0], &[2, 2]).unwrap();
        assert!(
            r.matrix()
                .max_abs_diff(&CMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );

        let alpha = 0.3;
        let rho = schmidt_state(SchmidtParam::new(alpha).unwrap());
        let r = partial_trace(&rho, &[0], &[2, 2]).unwrap();
        let want = CMatrix::diagonal(&[c(alpha), c(1.0 - alpha)]);
        assert!(r.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = QState::maximally_mixed(4);
        assert!(partial_trace(&rho, &[0], &[2, 3]).is_err());
        assert!(partial_trace(&rho, &[], &[2, 2]).is_err());
        assert!(partial_trace(&rho, &[2], &[2, 2]).is_err());
    }

    #[test]
    fn partial_trace_three_qubits_middle() {
        // |0><0| (x) I/2 (x) |1><1|, keep the middle and last
        let a = QState::from_ket(&Ket::from_real(&[1.0, 0.0])).unwrap();
        let b = QState::maximally_mixed(2);
        let cst = QState::from_ket(&Ket::from_real(&[0.0, 1.0])).unwrap();
        let full = QState::new(kron(&kron(a.matrix(), b.matrix()), cst.matrix())).unwrap();
        let bc = partial_trace(&full, &[1, 2], &[2, 2, 2]).unwrap();
        assert!(bc.matrix().max_abs_diff(&kron(b.matrix(), cst.matrix())) < 1e-15);
        let ac = partial_trace(&full, &[2, 0], &[2, 2, 2]).unwrap();
        assert!(ac.matrix().max_abs_diff(&kron(a.matrix(), cst.matrix())) < 1e-15);
    }

    #[test]
    fn identity_kraus_is_noop() {
        let ch = KrausChannel::new(vec![CMatrix::identity(4)]).unwrap();
        let rho = schmidt_state(SchmidtParam::new(0.2).unwrap());
        let out = apply_kraus(&rho, &ch).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let wrong = KrausChannel::new(vec![CMatrix::identity(2)]).unwrap();
        assert!(apply_kraus(&rho, &wrong).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = Ket::from_real(&[1.0, 0.0]);
        let plus = Ket::from_real(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        let rho0 = QState::from_ket(&zero).unwrap();
        assert_eq!(pure_fidelity(&zero, &rho0).unwrap(), 1.0);
        assert!((pure_fidelity(&zero, &QState::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-15);
        assert!((pure_fidelity(&plus, &rho0).unwrap() - 0.5).abs() < 1e-15);
        let bad = Ket::from_real(&[1.0, 1.0]);
        assert!(matches!(
            pure_fidelity(&bad, &rho0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn rejects_invalid_states() {
        let not_psd = CMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(QState::new(not_psd).is_err());
        let bad_trace = CMatrix::identity(2);
        assert!(QState::new(bad_trace).is_err());
        let non_herm = CMatrix::new(2, 2, vec![c(0.5), I * 0.1, ZERO, c(0.5)]).unwrap();
        assert!(QState::new(non_herm).is_err());
        assert!(CMatrix::new(2, 2, vec![ZERO; 3]).is_err());
    }

    fn arb_density(dim: usize) -> impl Strategy<Value = QState> {
        prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
            let g = CMatrix::new(
                dim,
                dim,
                v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect(),
            )
            .unwrap();
            let m = g.matmul(&g.adjoint());
            let tr = m.trace().re.max(1e-9);
            QState::new(m.scale_real(1.0 / tr)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn partial_trace_of_product(a in arb_density(2), b in arb_density(2)) {
            let prod = QState::new(kron(a.matrix(), b.matrix())).unwrap();
            let ra = partial_trace(&prod, &[0], &[2, 2]).unwrap();
            let rb = partial_trace(&prod, &[1], &[2, 2]).unwrap();
            prop_assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-12);
            prop_assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }

        #[test]
        fn fidelity_ignores_global_phase(t in 0.0f64..std::f64::consts::PI, p in 0.0f64..std::f64::consts::TAU, g in -6.0f64..6.0, rho in arb_density(2)) {
            let ket = Ket::new(vec![c((t / 2.0).cos()), Complex64::from_polar((t / 2.0).sin(), p)]);
            let f0 = pure_fidelity(&ket, &rho).unwrap();
            let f1 = pure_fidelity(&ket.with_phase(g), &rho).unwrap();
            prop_assert!((f0 - f1).abs() < 1e-12);
        }
    }
}
