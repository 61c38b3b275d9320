//! Entanglement and separability diagnostics for the source–qubit state.

use nalgebra::{DMatrix, SVD};

use crate::error::{Error, Result};
use crate::hilbert::{coherent_state, partial_transpose_target, DensityOperator, FockSpec, Layout, PureState};
use crate::linalg;
use crate::scalar::{c, cis, CMatrix, CVector, Modulus, Real};

/// Normalization slack accepted by [`schmidt_entropy`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Squared Schmidt coefficients of a composite pure state, descending.
pub fn schmidt_coefficients<T: Real>(psi: &PureState<T>) -> Result<Vec<T>> {
    let spec = FockSpec::from_composite_dim(psi.dim())?;
    let norm = psi.norm();
    if (norm - T::one()).abs() > T::tol(NORM_TOLERANCE) {
        return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
    }
    let amps = psi.amplitudes();
    let m = DMatrix::from_fn(spec.fock_dim(), 2, |n, q| amps[2 * n + q]);
    let svd = SVD::new(m, false, false);
    let mut p: Vec<T> = svd.singular_values.iter().map(|s| *s * *s).collect();
    p.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(p)
}

/// Entanglement entropy in bits.
pub fn schmidt_entropy<T: Real>(psi: &PureState<T>) -> Result<T> {
    let ln2 = T::lit(std::f64::consts::LN_2);
    let h = schmidt_coefficients(psi)?
        .into_iter()
        .filter(|&p| p > T::zero())
        .fold(T::zero(), |acc, p| acc - p * p.ln() / ln2);
    Ok(h.max(T::zero()))
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose over the qubit.
pub fn negativity<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    if rho.layout() != Layout::Composite {
        return Err(Error::LayoutMismatch(format!("negativity needs a composite state, found {}", rho.layout())));
    }
    rho.validate()?;
    let pt = partial_transpose_target(rho.matrix());
    Ok(linalg::hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&v| v < T::zero())
        .fold(T::zero(), |acc, v| acc - v))
}

/// `½‖A − B‖₁` for Hermitian matrices.
pub fn trace_distance_matrices<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    let diff = a - b;
    let sum = linalg::hermitian_eigenvalues(&diff).into_iter().fold(T::zero(), |acc, v| acc + v.abs());
    Ok(sum * T::lit(0.5))
}

pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    trace_distance_matrices(a.matrix(), b.matrix())
}

/// Matrix element outside the allowed support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Offender<T: Real> {
    pub row: usize,
    pub col: usize,
    pub magnitude: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport<T: Real> {
    pub pass: bool,
    pub tolerance: T,
    pub max_violation: T,
    /// Number of entries at or above tolerance.
    pub violations: usize,
    /// The largest offending entries, at most [`MAX_REPORTED`].
    pub offenders: Vec<Offender<T>>,
}

pub const MAX_REPORTED: usize = 32;

/// Checks that `ρ` only couples basis states with the same total quanta
/// `n + q`, i.e. `|n,−⟩` and `|n−1,+⟩`, and has no coherence between
/// different totals.
pub fn support_pattern_check<T: Real>(rho: &DensityOperator<T>, tol: T) -> SupportReport<T> {
    support_pattern_check_matrix(rho.matrix(), tol)
}

pub fn support_pattern_check_matrix<T: Real>(m: &CMatrix<T>, tol: T) -> SupportReport<T> {
    let quanta = |i: usize| i / 2 + i % 2;
    let mut offenders = Vec::new();
    let mut max_violation = T::zero();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if quanta(i) == quanta(j) {
                continue;
            }
            let magnitude = m[(i, j)].modulus();
            if magnitude > max_violation {
                max_violation = magnitude;
            }
            if magnitude >= tol {
                offenders.push(Offender { row: i, col: j, magnitude });
            }
        }
    }
    let violations = offenders.len();
    offenders.sort_by(|a, b| b.magnitude.partial_cmp(&a.magnitude).expect("finite magnitudes"));
    offenders.truncate(MAX_REPORTED);
    SupportReport { pass: violations == 0, tolerance: tol, max_violation, violations, offenders }
}

/// Norm of the part of `ψ` outside `span{|n,−⟩, |n−1,+⟩}`.
pub fn out_of_span_amplitude<T: Real>(psi: &PureState<T>, n: usize) -> Result<T> {
    let spec = FockSpec::from_composite_dim(psi.dim())?;
    let amps = psi.amplitudes();
    let inside = |i: usize| {
        let (k, q) = spec.decompose(i);
        k + q as usize == n
    };
    let sq = (0..amps.len()).filter(|&i| !inside(i)).fold(T::zero(), |acc, i| acc + amps[i].norm_sqr());
    Ok(sq.sqrt())
}

/// Phase-averaged separable state: a radial distribution of coherent
/// amplitudes, each carrying the qubit state
/// `a′e^{−iφ/2}|−⟩ + b′e^{iφ/2}|+⟩` at its phase `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAveragedSpec<T: Real> {
    pub radial_weights: Vec<(T, T)>,
    pub a_prime: T,
    pub b_prime: T,
    pub phase_points: usize,
}

impl<T: Real> PhaseAveragedSpec<T> {
    pub fn new(radial_weights: Vec<(T, T)>, a_prime: T, b_prime: T, phase_points: usize) -> Result<Self> {
        let s = Self { radial_weights, a_prime, b_prime, phase_points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phase_points == 0 {
            return Err(Error::InvalidParameter("phase_points must be at least 1".into()));
        }
        let norm = self.a_prime * self.a_prime + self.b_prime * self.b_prime;
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidParameter(format!("a′² + b′² = {norm}, expected 1")));
        }
        if self.radial_weights.is_empty() {
            return Err(Error::InvalidParameter("radial distribution is empty".into()));
        }
        let mut total = T::zero();
        for &(r, w) in &self.radial_weights {
            if !(r >= T::zero()) || !(w >= T::zero()) {
                return Err(Error::InvalidParameter(format!("radius {r} and weight {w} must be non-negative")));
            }
            total += w;
        }
        if (total - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidParameter(format!("radial weights sum to {total}")));
        }
        Ok(())
    }

    /// `|T_φ⟩`.
    pub fn target_state(&self, phi: T) -> PureState<T> {
        let half = phi * T::lit(0.5);
        let v = CVector::from_vec(vec![cis(-half) * c(self.a_prime, T::zero()), cis(half) * c(self.b_prime, T::zero())]);
        PureState::new(v).expect("a′² + b′² = 1")
    }
}

/// One product term `w · |ψ_S⟩⟨ψ_S| ⊗ |ψ_T⟩⟨ψ_T|` of a separable decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm<T: Real> {
    pub weight: T,
    pub source: PureState<T>,
    pub target: PureState<T>,
}

/// The explicit separable decomposition behind [`phase_averaged_state`].
pub fn phase_averaged_terms<T: Real>(spec: &PhaseAveragedSpec<T>, fock: FockSpec) -> Result<Vec<ProductTerm<T>>> {
    spec.validate()?;
    let k = spec.phase_points;
    if k < 4 * fock.n_max() {
        return Err(Error::InvalidParameter(format!(
            "phase quadrature with {k} points is too coarse for n_max = {}; need at least {}",
            fock.n_max(),
            4 * fock.n_max()
        )));
    }
    let two_pi = T::two_pi();
    let inv_k = T::one() / T::lit(k as f64);
    let mut terms = Vec::with_capacity(spec.radial_weights.len() * k);
    for &(r, w) in &spec.radial_weights {
        for j in 0..k {
            let phi = two_pi * T::lit(j as f64) * inv_k;
            terms.push(ProductTerm {
                weight: w * inv_k,
                source: coherent_state(cis(phi) * c(r, T::zero()), fock),
                target: spec.target_state(phi),
            });
        }
    }
    Ok(terms)
}

/// Sum of product terms as a composite density operator.
pub fn assemble_product_terms<T: Real>(terms: &[ProductTerm<T>]) -> Result<DensityOperator<T>> {
    let first = terms.first().ok_or_else(|| Error::InvalidState("no product terms".into()))?;
    let d = first.source.dim() * first.target.dim();
    let mut m = CMatrix::zeros(d, d);
    for t in terms {
        let psi = PureState::product(&t.source, &t.target);
        if psi.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: psi.dim() });
        }
        let v = psi.amplitudes();
        m += (v * v.adjoint()).map(|z| z * t.weight);
    }
    Ok(DensityOperator::unchecked(m, Layout::Composite))
}

/// `Σ_r w_r (1/K) Σ_k |re^{iφ_k}⟩⟨re^{iφ_k}| ⊗ |T_{φ_k}⟩⟨T_{φ_k}|` with
/// `φ_k = 2πk/K`. For `K ≥ 4·n_max` the discrete phase average is exact on
/// the truncated space.
pub fn phase_averaged_state<T: Real>(spec: &PhaseAveragedSpec<T>, fock: FockSpec) -> Result<DensityOperator<T>> {
    assemble_product_terms(&phase_averaged_terms(spec, fock)?)
}
