//! Truncated Fock ⊗ qubit Hilbert space.
//!
//! Basis ordering is fixed: the composite index of `|n⟩ ⊗ |q⟩` is
//! `2·n + q`, with the qubit ordered `(|−⟩, |+⟩)` (ground first). Serialized
//! matrices rely on this ordering.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, Sparse};
use crate::scalar::{one, re, zero, CMatrix, CVector, Modulus, Real, C};

/// Fock-space truncation: photon numbers `0..=n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpec {
    n_max: usize,
}

impl FockSpec {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter(format!("n_max must be at least 1, got {n_max}")));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the source (Fock) factor.
    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Dimension of the source ⊗ target space.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, n: usize, q: Qubit) -> usize {
        debug_assert!(n <= self.n_max);
        2 * n + q as usize
    }

    pub fn decompose(&self, index: usize) -> (usize, Qubit) {
        let q = if index.is_multiple_of(2) { Qubit::Ground } else { Qubit::Excited };
        (index / 2, q)
    }

    /// Recovers the truncation from a composite dimension.
    pub fn from_composite_dim(dim: usize) -> Result<Self> {
        if dim < 4 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("{dim} is not a Fock⊗qubit dimension")));
        }
        Self::new(dim / 2 - 1)
    }
}

/// Qubit basis label; the discriminant is the qubit index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    /// `|−⟩`
    Ground = 0,
    /// `|+⟩`
    Excited = 1,
}

/// Tensor factor of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Source,
    Target,
}

/// Which space a density operator lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    Source,
    Target,
    Composite,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Layout::Source => "source",
            Layout::Target => "target",
            Layout::Composite => "source⊗target",
        };
        f.write_str(s)
    }
}

/// Smallest truncation considered adequate for coherent amplitude `|α|`:
/// `⌈|α|² + 8|α| + 10⌉`.
pub fn min_truncation(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize
}

/// Dense square complex operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    matrix: CMatrix<T>,
    label: String,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(Self { matrix, label: label.into() })
    }

    pub(crate) fn from_matrix(matrix: CMatrix<T>, label: impl Into<String>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix, label: label.into() }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(CMatrix::zeros(dim, dim), "0")
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(CMatrix::identity(dim, dim), "I")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C<T> {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.matrix.adjoint(), format!("{}†", self.label))
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::from_matrix(self.matrix.map(|z| z * k), self.label.clone())
    }

    pub fn scale_re(&self, k: T) -> Self {
        self.scale(re(k))
    }

    /// `A ⊗ B`, with `A` the slow (outer) index.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix(self.matrix.kronecker(&other.matrix), format!("{}⊗{}", self.label, other.label))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix(&self.matrix * &other.matrix - &other.matrix * &self.matrix, format!("[{},{}]", self.label, other.label))
    }

    pub fn apply(&self, psi: &CVector<T>) -> CVector<T> {
        &self.matrix * psi
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn hermiticity_residual(&self) -> T {
        linalg::max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.matrix[(i, j)] == if i == j { one() } else { zero() }))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|z| *z == zero())
    }

    pub(crate) fn sparse(&self) -> Sparse<T> {
        Sparse::from_dense(&self.matrix)
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_matrix(&self.matrix + &rhs.matrix, format!("{}+{}", self.label, rhs.label))
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_matrix(&self.matrix - &rhs.matrix, format!("{}−{}", self.label, rhs.label))
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_matrix(&self.matrix * &rhs.matrix, format!("{}{}", self.label, rhs.label))
    }
}

/// Photon annihilation operator `â` on the Fock factor, `⟨n−1|â|n⟩ = √n`.
pub fn annihilation<T: Real>(spec: FockSpec) -> Operator<T> {
    let d = spec.fock_dim();
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = re(T::lit(n as f64).sqrt());
    }
    Operator::from_matrix(m, "a")
}

/// Qubit lowering operator `b̂`, `⟨−|b̂|+⟩ = 1`.
pub fn qubit_lowering<T: Real>() -> Operator<T> {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = one();
    Operator::from_matrix(m, "b")
}

/// Lifts a factor operator to the composite space by tensoring with the
/// identity on the other factor.
pub fn embed<T: Real>(op: &Operator<T>, which: Factor, spec: FockSpec) -> Result<Operator<T>> {
    let (expected, out) = match which {
        Factor::Source => (spec.fock_dim(), op.kron(&Operator::identity(2))),
        Factor::Target => (2, Operator::identity(spec.fock_dim()).kron(op)),
    };
    if op.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: op.dim() });
    }
    Ok(out.with_label(op.label.clone()))
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> PureState<T> {
    /// Normalizes `amplitudes`; fails on a zero or non-finite vector.
    pub fn new(amplitudes: CVector<T>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self { amplitudes: amplitudes.map(|z| z / norm) })
    }

    pub(crate) fn from_normalized(amplitudes: CVector<T>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = one();
        Self { amplitudes: v }
    }

    /// `|n⟩ ⊗ |q⟩`.
    pub fn fock_qubit(spec: FockSpec, n: usize, q: Qubit) -> Self {
        Self::basis(spec.dim(), spec.index(n, q))
    }

    /// `|source⟩ ⊗ |target⟩`.
    pub fn product(source: &Self, target: &Self) -> Self {
        Self { amplitudes: source.amplitudes.kronecker(&target.amplitudes) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &Operator<T>) -> C<T> {
        self.amplitudes.dotc(&(op.matrix() * &self.amplitudes))
    }

    pub fn projector(&self) -> DensityOperator<T> {
        let layout = match self.dim() {
            2 => Layout::Target,
            d if d % 2 == 0 && d >= 4 => Layout::Composite,
            _ => Layout::Source,
        };
        self.projector_with(layout)
    }

    pub fn projector_with(&self, layout: Layout) -> DensityOperator<T> {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::from_parts(m, layout)
    }
}

/// Coherent state `|α⟩`, truncated at `n_max` and renormalized. Logs a
/// warning when the truncation is below [`min_truncation`].
pub fn coherent_state<T: Real>(alpha: C<T>, spec: FockSpec) -> PureState<T> {
    if !coherent_truncation_adequate(alpha, spec) {
        warn!(
            "n_max = {} is below the recommended truncation {} for |alpha| = {}",
            spec.n_max(),
            min_truncation(alpha.modulus().as_f64()),
            alpha.modulus()
        );
    }
    let d = spec.fock_dim();
    let mut amps = CVector::zeros(d);
    // e^{-|α|²/2} α^n / √n!, built by recursion; the prefactor cancels on
    // renormalization but is kept so the unnormalized vector is the textbook one.
    amps[0] = re((-alpha.norm_sqr() * T::lit(0.5)).exp());
    for n in 1..d {
        amps[n] = amps[n - 1] * alpha / T::lit(n as f64).sqrt();
    }
    PureState::new(amps).expect("coherent amplitudes are nonzero")
}

pub fn coherent_truncation_adequate<T: Real>(alpha: C<T>, spec: FockSpec) -> bool {
    spec.n_max() >= min_truncation(alpha.modulus().as_f64())
}

/// Fock state `|n⟩` of the source factor.
pub fn fock_state<T: Real>(n: usize, spec: FockSpec) -> Result<PureState<T>> {
    if n > spec.n_max() {
        return Err(Error::InvalidParameter(format!("photon number {n} exceeds n_max = {}", spec.n_max())));
    }
    Ok(PureState::basis(spec.fock_dim(), n))
}

pub fn qubit_state<T: Real>(q: Qubit) -> PureState<T> {
    PureState::basis(2, q as usize)
}

/// Density operator with its subsystem layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Real> {
    matrix: CMatrix<T>,
    layout: Layout,
}

impl<T: Real> DensityOperator<T> {
    /// Validates hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (minimum eigenvalue ≥ −1e-10).
    pub fn new(matrix: CMatrix<T>, layout: Layout) -> Result<Self> {
        let rho = Self::from_parts(matrix, layout);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(matrix: CMatrix<T>, layout: Layout) -> Self {
        Self { matrix, layout }
    }

    /// Wraps a matrix without checking the density-operator invariants.
    pub fn unchecked(matrix: CMatrix<T>, layout: Layout) -> Self {
        Self::from_parts(matrix, layout)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        match self.layout {
            Layout::Target if m.nrows() != 2 => {
                return Err(Error::LayoutMismatch(format!("target layout needs dimension 2, found {}", m.nrows())))
            }
            Layout::Composite if !m.nrows().is_multiple_of(2) || m.nrows() < 4 => {
                return Err(Error::LayoutMismatch(format!("dimension {} is not a composite dimension", m.nrows())))
            }
            _ => {}
        }
        let herm = linalg::max_abs_diff(m, &m.adjoint());
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm})")));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(1e-10) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C<T> {
        linalg::trace(&self.matrix)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// `tr(A ρ)`.
    pub fn expectation(&self, op: &Operator<T>) -> Result<C<T>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        let m = &self.matrix;
        let a = op.matrix();
        let d = self.dim();
        let mut acc = zero();
        for i in 0..d {
            for k in 0..d {
                acc += a[(i, k)] * m[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `ρ_S ⊗ ρ_T`.
    pub fn tensor(source: &Self, target: &Self) -> Result<Self> {
        if target.dim() != 2 {
            return Err(Error::LayoutMismatch("target factor must be a qubit".into()));
        }
        Ok(Self::from_parts(source.matrix.kronecker(&target.matrix), Layout::Composite))
    }

    /// Weighted sum of density operators sharing a layout.
    pub fn mixture(parts: &[(T, &Self)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let d = first.1.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
            }
            m += rho.matrix.map(|z| z * *w);
        }
        Ok(Self::from_parts(m, first.1.layout))
    }
}

/// Reduced density operator on the kept factor.
pub fn partial_trace<T: Real>(rho: &DensityOperator<T>, keep: Factor) -> Result<DensityOperator<T>> {
    if rho.layout() != Layout::Composite {
        return Err(Error::LayoutMismatch(format!("partial trace needs a composite state, found {}", rho.layout())));
    }
    let spec = FockSpec::from_composite_dim(rho.dim())?;
    let m = rho.matrix();
    let out = match keep {
        Factor::Source => {
            let d = spec.fock_dim();
            DMatrix::from_fn(d, d, |n, k| m[(2 * n, 2 * k)] + m[(2 * n + 1, 2 * k + 1)])
        }
        Factor::Target => DMatrix::from_fn(2, 2, |q, p| {
            (0..spec.fock_dim()).fold(zero(), |acc, n| acc + m[(2 * n + q, 2 * n + p)])
        }),
    };
    let layout = match keep {
        Factor::Source => Layout::Source,
        Factor::Target => Layout::Target,
    };
    Ok(DensityOperator::from_parts(out, layout))
}

/// Partial transpose over the qubit factor.
pub fn partial_transpose_target<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let d = m.nrows();
    DMatrix::from_fn(d, d, |i, j| {
        let (n, q) = (i / 2, i % 2);
        let (k, p) = (j / 2, j % 2);
        m[(2 * n + p, 2 * k + q)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn spec(n: usize) -> FockSpec {
        FockSpec::new(n).unwrap()
    }

    #[test]
    fn annihilation_matrix_elements() {
        let a = annihilation::<f64>(spec(1));
        let out = a.apply(PureState::basis(2, 1).amplitudes());
        assert_eq!(out[0], one());
        assert_eq!(out[1], zero());

        let a = annihilation::<f64>(spec(5));
        let out = a.apply(PureState::basis(6, 4).amplitudes());
        assert!((out[3] - re(2.0)).norm() < 1e-15);
        assert!(out.iter().enumerate().all(|(i, z)| i == 3 || z.norm() == 0.0));

        let vac = a.apply(PureState::basis(6, 0).amplitudes());
        assert!(vac.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn qubit_lowering_action() {
        let b = qubit_lowering::<f64>();
        let plus = qubit_state::<f64>(Qubit::Excited);
        let minus = qubit_state::<f64>(Qubit::Ground);
        assert_eq!(b.apply(plus.amplitudes()), *minus.amplitudes());
        assert!(b.apply(minus.amplitudes()).iter().all(|z| z.norm() == 0.0));
        let proj = &b.adjoint() * &b;
        assert_eq!(proj.matrix(), plus.projector().matrix());
        assert!((&b * &b).is_zero());
    }

    #[test]
    fn embedded_factors_commute() {
        let s = spec(4);
        let a = embed(&annihilation::<f64>(s), Factor::Source, s).unwrap();
        let b = embed(&qubit_lowering::<f64>(), Factor::Target, s).unwrap();
        assert!(a.commutator(&b).max_abs_diff(&Operator::zeros(s.dim())) < 1e-14);
        assert!(a.adjoint().commutator(&b).max_abs_diff(&Operator::zeros(s.dim())) < 1e-14);
        let id = embed(&Operator::<f64>::identity(5), Factor::Source, s).unwrap();
        assert!(id.is_identity());
        let num = &a.adjoint() * &a;
        for n in 0..=4 {
            let i = s.index(n, Qubit::Excited);
            assert!((num.entry(i, i) - re(n as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let s = spec(3);
        let err = embed(&qubit_lowering::<f64>(), Factor::Source, s).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, found: 2 });
    }

    #[test]
    fn canonical_commutator_below_truncation() {
        let s = spec(6);
        let a = annihilation::<f64>(s);
        let comm = a.commutator(&a.adjoint());
        for i in 0..s.n_max() {
            for j in 0..s.n_max() {
                let expect = if i == j { one() } else { zero() };
                assert!((comm.entry(i, j) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coherent_state_examples() {
        let s = spec(20);
        let vac = coherent_state::<f64>(zero(), s);
        assert_eq!(vac, PureState::basis(21, 0));

        let s = spec(30);
        let psi = coherent_state(re(1.5), s);
        let a = annihilation::<f64>(s);
        let n = psi.expectation(&(&a.adjoint() * &a));
        assert!((n.re - 2.25).abs() < 1e-8 && n.im.abs() < 1e-15);

        let s = spec(20);
        let alpha = re(1.0);
        let psi = coherent_state(alpha, s);
        let resid = (annihilation::<f64>(s).apply(psi.amplitudes()) - psi.amplitudes().map(|z| z * alpha)).norm();
        assert!(resid < 1e-8, "{resid}");
    }

    #[test]
    fn coherent_residual_decreases_with_truncation() {
        let alpha = c(0.8, -0.6);
        let mut last = f64::INFINITY;
        for n in 2..24 {
            let s = spec(n);
            let psi = coherent_state(alpha, s);
            let r = (annihilation::<f64>(s).apply(psi.amplitudes()) - psi.amplitudes().map(|z| z * alpha)).norm();
            assert!(r < last, "n_max={n}: {r} !< {last}");
            last = r;
        }
    }

    #[test]
    fn partial_trace_examples() {
        let s = spec(3);
        let rho = PureState::<f64>::fock_qubit(s, 0, Qubit::Ground).projector();
        let src = partial_trace(&rho, Factor::Source).unwrap();
        assert_eq!(src.matrix(), PureState::<f64>::basis(4, 0).projector().matrix());

        let mut v = CVector::<f64>::zeros(s.dim());
        v[s.index(0, Qubit::Excited)] = one();
        v[s.index(1, Qubit::Ground)] = one();
        let rho = PureState::new(v).unwrap().projector();
        let tgt = partial_trace(&rho, Factor::Target).unwrap();
        assert!(linalg::max_abs_diff(tgt.matrix(), &CMatrix::identity(2, 2).map(|z| z * 0.5)) < 1e-15);
        let src = partial_trace(&rho, Factor::Source).unwrap();
        assert!((src.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((src.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(src.matrix()[(0, 1)].norm() < 1e-15);

        let err = partial_trace(&tgt, Factor::Source).unwrap_err();
        assert!(matches!(err, Error::LayoutMismatch(_)));
    }

    #[test]
    fn density_operator_validation() {
        let mut m = CMatrix::<f64>::identity(2, 2);
        assert!(DensityOperator::new(m.clone(), Layout::Target).is_err());
        m[(1, 1)] = zero();
        assert!(DensityOperator::new(m.clone(), Layout::Target).is_ok());
        m[(0, 1)] = re(0.7);
        m[(1, 0)] = re(0.7);
        assert!(matches!(DensityOperator::new(m, Layout::Target), Err(Error::InvalidState(_))));
    }

    #[test]
    fn single_precision_operators() {
        let s = spec(12);
        let psi = coherent_state::<f32>(c(0.3, 0.2), s);
        assert!((psi.norm() - 1.0).abs() < 1e-6);
        let a = annihilation::<f32>(s);
        let r = (a.apply(psi.amplitudes()) - psi.amplitudes().map(|z| z * c(0.3, 0.2))).norm();
        assert!(r < 1e-5);
    }
}
