//! Factorized ansatz: each classical source amplitude path carries its own
//! conditional qubit state, and the composite state is the weighted sum of
//! the resulting product terms.

use rayon::prelude::*;

use crate::analysis::trace_distance_matrices;
use crate::error::{Error, Result};
use crate::evolve::{check_density, rk4_step, STABILITY_LIMIT};
use crate::hilbert::{coherent_state, DensityOperator, FockSpec, Layout, Operator, PureState};
use crate::linalg;
use crate::liouvillian::{target_generator, CouplingConfig, Superoperator};
use crate::scalar::{imag, CMatrix, Modulus, Real, C};
use crate::sources::ClassicalPath;

/// `Ĥ_drive(α) = i·k·(α* b̂ − α b̂†)` on the qubit, `k = √(γ_S γ_T^f)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveHamiltonian<T: Real> {
    pub alpha: C<T>,
    pub prefactor: T,
}

impl<T: Real> DriveHamiltonian<T> {
    pub fn new(alpha: C<T>, config: &CouplingConfig<T>) -> Self {
        Self { alpha, prefactor: config.coupling() }
    }

    pub fn matrix(&self) -> CMatrix<T> {
        let i = imag::<T>();
        let k = C::new(self.prefactor, T::zero());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = i * k * self.alpha.conj();
        m[(1, 0)] = -i * k * self.alpha;
        m
    }

    pub fn operator(&self) -> Operator<T> {
        Operator::new(self.matrix(), "H_drive").expect("square")
    }
}

/// Qubit states conditioned on one amplitude path, on the path's times.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTargetState<T: Real> {
    pub times: Vec<T>,
    pub rhos: Vec<DensityOperator<T>>,
}

/// Integrates `dρ_T/dt = 𝓛'_T ρ_T − i[Ĥ_drive(α_t), ρ_T]` with RK4 on the
/// path's own time points, reading `α_t` by linear interpolation.
pub fn solve_separated_target<T: Real>(
    path: &ClassicalPath<T>,
    config: &CouplingConfig<T>,
    rho_t0: &DensityOperator<T>,
) -> Result<ConditionalTargetState<T>> {
    if rho_t0.layout() != Layout::Target {
        return Err(Error::LayoutMismatch(format!("initial target state has layout {}", rho_t0.layout())));
    }
    rho_t0.validate()?;
    config.validate()?;
    if path.is_empty() {
        return Err(Error::InvalidParameter("empty amplitude path".into()));
    }
    let rate = config.max_rate().as_f64();
    for w in path.times.windows(2) {
        let dt = w[1] - w[0];
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter("path times must increase".into()));
        }
        if dt.as_f64() * rate > STABILITY_LIMIT + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "path step {dt} violates the step rule dt·rate ≤ {STABILITY_LIMIT}"
            )));
        }
    }
    let l_t = target_generator(config).compile();
    let rhs = |t: T, rho: &CMatrix<T>| {
        let h = DriveHamiltonian::new(path.amplitude_at(t), config).matrix();
        let comm = &h * rho - rho * &h;
        l_t.apply(rho) - comm * imag::<T>()
    };
    let mut rho = rho_t0.matrix().clone();
    let mut rhos = vec![rho_t0.clone()];
    for w in path.times.windows(2) {
        rho = rk4_step(w[0], w[1] - w[0], &rho, rhs);
        let state = DensityOperator::unchecked(rho.clone(), Layout::Target);
        check_density(&state, w[1])?;
        rhos.push(state);
    }
    Ok(ConditionalTargetState { times: path.times.clone(), rhos })
}

/// Solves every path from the same initial qubit state, in parallel.
pub fn solve_all<T: Real>(
    paths: &[ClassicalPath<T>],
    config: &CouplingConfig<T>,
    rho_t0: &DensityOperator<T>,
) -> Result<Vec<ConditionalTargetState<T>>> {
    paths.par_iter().map(|p| solve_separated_target(p, config, rho_t0)).collect()
}

/// One summand `w · |α⟩⟨α| ⊗ ρ_T` of the ansatz. The product structure is
/// carried by the type: a source ket and a qubit density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzTerm<T: Real> {
    pub weight: T,
    pub alpha: C<T>,
    pub source: PureState<T>,
    pub target: DensityOperator<T>,
}

impl<T: Real> AnsatzTerm<T> {
    pub fn matrix(&self) -> CMatrix<T> {
        let v = self.source.amplitudes();
        let src = (v * v.adjoint()).map(|z| z * self.weight);
        src.kronecker(self.target.matrix())
    }
}

/// Product terms of the ansatz at grid index `t_index`.
pub fn ansatz_terms<T: Real>(
    paths: &[ClassicalPath<T>],
    conditionals: &[ConditionalTargetState<T>],
    t_index: usize,
    fock: FockSpec,
) -> Result<Vec<AnsatzTerm<T>>> {
    if paths.len() != conditionals.len() {
        return Err(Error::DimensionMismatch { expected: paths.len(), found: conditionals.len() });
    }
    if paths.is_empty() {
        return Err(Error::InvalidParameter("no paths".into()));
    }
    let total = paths.iter().fold(T::zero(), |acc, p| acc + p.weight);
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidParameter(format!("path weights sum to {total}")));
    }
    paths
        .iter()
        .zip(conditionals)
        .map(|(p, cond)| {
            if cond.rhos.len() != p.len() || t_index >= p.len() {
                return Err(Error::GridMismatch(format!(
                    "index {t_index} with path length {} and {} conditional states",
                    p.len(),
                    cond.rhos.len()
                )));
            }
            let alpha = p.alphas[t_index];
            Ok(AnsatzTerm {
                weight: p.weight,
                alpha,
                source: coherent_state(alpha, fock),
                target: cond.rhos[t_index].clone(),
            })
        })
        .collect()
}

/// `Σ_m w_m |α_m(t)⟩⟨α_m(t)| ⊗ ρ_{T|α_m}(t)`.
pub fn build_ansatz_state<T: Real>(
    paths: &[ClassicalPath<T>],
    conditionals: &[ConditionalTargetState<T>],
    t_index: usize,
    fock: FockSpec,
) -> Result<DensityOperator<T>> {
    let terms = ansatz_terms(paths, conditionals, t_index, fock)?;
    let d = fock.dim();
    let m = terms.iter().fold(CMatrix::zeros(d, d), |acc, t| acc + t.matrix());
    Ok(DensityOperator::unchecked(m, Layout::Composite))
}

/// Deviation between two composite states at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison<T: Real> {
    pub trace_distance: T,
    /// Largest entry deviation in each qubit block `(q, p)`, indexed
    /// `[q][p]` with `0 = |−⟩`, `1 = |+⟩`.
    pub block_max: [[T; 2]; 2],
}

impl<T: Real> Comparison<T> {
    pub fn max_block(&self) -> T {
        self.block_max.iter().flatten().fold(T::zero(), |a, &b| a.max(b))
    }
}

pub fn compare_to_full<T: Real>(ansatz: &DensityOperator<T>, full: &DensityOperator<T>) -> Result<Comparison<T>> {
    if ansatz.dim() != full.dim() {
        return Err(Error::DimensionMismatch { expected: full.dim(), found: ansatz.dim() });
    }
    if !ansatz.dim().is_multiple_of(2) {
        return Err(Error::LayoutMismatch("comparison needs composite states".into()));
    }
    let diff = ansatz.matrix() - full.matrix();
    let mut block_max = [[T::zero(); 2]; 2];
    for j in 0..diff.ncols() {
        for i in 0..diff.nrows() {
            let b = &mut block_max[i % 2][j % 2];
            *b = b.max(diff[(i, j)].modulus());
        }
    }
    let trace_distance = trace_distance_matrices(ansatz.matrix(), full.matrix())?;
    Ok(Comparison { trace_distance, block_max })
}

/// Per-time comparisons of two aligned state series.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport<T: Real> {
    pub times: Vec<T>,
    pub points: Vec<Comparison<T>>,
}

impl<T: Real> ComparisonReport<T> {
    pub fn max_trace_distance(&self) -> T {
        self.points.iter().fold(T::zero(), |a, p| a.max(p.trace_distance))
    }

    pub fn max_block_deviation(&self) -> T {
        self.points.iter().fold(T::zero(), |a, p| a.max(p.max_block()))
    }

    /// True when any time point's trace distance exceeds `tol`.
    pub fn exceeds(&self, tol: T) -> bool {
        self.points.iter().any(|p| p.trace_distance > tol)
    }
}

pub fn compare_series<T: Real>(
    times: &[T],
    ansatz: &[DensityOperator<T>],
    full: &[DensityOperator<T>],
) -> Result<ComparisonReport<T>> {
    if ansatz.len() != full.len() || times.len() != full.len() {
        return Err(Error::GridMismatch(format!(
            "{} times, {} ansatz states, {} reference states",
            times.len(),
            ansatz.len(),
            full.len()
        )));
    }
    let points = ansatz.iter().zip(full).map(|(a, f)| compare_to_full(a, f)).collect::<Result<_>>()?;
    Ok(ComparisonReport { times: times.to_vec(), points })
}

/// Frobenius norm of `(ρ(t+h/2) − ρ(t−h/2))/h − 𝓛ρ(t)`.
pub fn generator_residual<T: Real>(
    before: &DensityOperator<T>,
    center: &DensityOperator<T>,
    after: &DensityOperator<T>,
    h: T,
    generator: &Superoperator<T>,
) -> Result<T> {
    let derivative = (after.matrix() - before.matrix()).map(|z| z / h);
    let r = derivative - generator.apply(center.matrix())?;
    Ok(linalg::frobenius(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::negativity;
    use crate::evolve::TimeGrid;
    use crate::hilbert::{qubit_state, Qubit};
    use crate::scalar::{c, re, zero};

    fn path(grid: &TimeGrid<f64>, alpha: C<f64>, weight: f64) -> ClassicalPath<f64> {
        let times = grid.times();
        let n = times.len();
        ClassicalPath::new(times, vec![alpha; n], weight).unwrap()
    }

    fn excited(rho: &DensityOperator<f64>) -> f64 {
        rho.matrix()[(1, 1)].re
    }

    #[test]
    fn drive_hamiltonian_is_hermitian() {
        let cfg = CouplingConfig::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let h = DriveHamiltonian::new(c(0.3, -1.1), &cfg).operator();
        assert!(h.hermiticity_residual() < 1e-15);
        assert!((h.entry(0, 1) - c(0.0, 0.5f64.sqrt()) * c(0.3, 1.1)).norm() < 1e-15);
    }

    #[test]
    fn undriven_qubit_decays() {
        let cfg = CouplingConfig::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let g = TimeGrid::new(0.0, 3.0, 0.01).unwrap();
        let sol = solve_separated_target(&path(&g, zero(), 1.0), &cfg, &qubit_state(Qubit::Excited).projector()).unwrap();
        for (t, rho) in sol.times.iter().zip(&sol.rhos) {
            assert!((excited(rho) - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_drive_reaches_bloch_steady_state() {
        let cfg = CouplingConfig::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let alpha = 1.5;
        let g = TimeGrid::new(0.0, 40.0, 0.01).unwrap();
        let sol = solve_separated_target(&path(&g, re(alpha), 1.0), &cfg, &qubit_state(Qubit::Ground).projector()).unwrap();
        let omega = 2.0 * (cfg.gamma_s * cfg.gamma_tf).sqrt() * alpha;
        let gt = cfg.gamma_t();
        let expected = (omega * omega / 4.0) / (gt * gt / 4.0 + omega * omega / 2.0);
        assert!((excited(sol.rhos.last().unwrap()) - expected).abs() < 1e-6);
    }

    #[test]
    fn no_forward_coupling_ignores_the_path() {
        let cfg = CouplingConfig::new(1.0, 0.0, 0.7, 0.0).unwrap();
        let g = TimeGrid::new(0.0, 2.0, 0.01).unwrap();
        let sol = solve_separated_target(&path(&g, re(2.0), 1.0), &cfg, &qubit_state(Qubit::Excited).projector()).unwrap();
        for (t, rho) in sol.times.iter().zip(&sol.rhos) {
            assert!((excited(rho) - (-0.7 * t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn solver_rejects_bad_input() {
        let cfg = CouplingConfig::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        let p = path(&g, zero(), 1.0);
        assert!(solve_separated_target(&p, &cfg, &qubit_state(Qubit::Ground).projector()).is_err());
        let fine = path(&TimeGrid::new(0.0, 1.0, 0.01).unwrap(), zero(), 1.0);
        let bad = DensityOperator::unchecked(CMatrix::identity(2, 2), Layout::Target);
        assert!(solve_separated_target(&fine, &cfg, &bad).is_err());
    }

    #[test]
    fn single_path_gives_pure_product() {
        let s = FockSpec::new(8).unwrap();
        let g = TimeGrid::new(0.0, 0.5, 0.01).unwrap();
        let p = vec![path(&g, c(0.5, 0.2), 1.0)];
        let plus = qubit_state(Qubit::Excited).projector();
        let cond = vec![ConditionalTargetState { times: g.times(), rhos: vec![plus.clone(); g.steps() + 1] }];
        let rho = build_ansatz_state(&p, &cond, 10, s).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let expected = PureState::product(&coherent_state(c(0.5, 0.2), s), &qubit_state(Qubit::Excited)).projector();
        assert!(linalg::max_abs_diff(rho.matrix(), expected.matrix()) < 1e-14);
    }

    #[test]
    fn cat_mixture_is_separable() {
        let s = FockSpec::new(10).unwrap();
        let g = TimeGrid::new(0.0, 0.1, 0.01).unwrap();
        let p = vec![path(&g, re(1.0), 0.5), path(&g, re(-1.0), 0.5)];
        let rt = qubit_state::<f64>(Qubit::Ground).projector();
        let cond = vec![ConditionalTargetState { times: g.times(), rhos: vec![rt; g.steps() + 1] }; 2];
        let rho = build_ansatz_state(&p, &cond, 3, s).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!(negativity(&rho).unwrap() < 1e-12);
        // Odd-photon coherences cancel between the two branches.
        assert!(rho.matrix()[(0, 2)].norm() < 1e-15);
        assert!(build_ansatz_state(&p, &cond[..1], 3, s).is_err());
        assert!(build_ansatz_state(&p, &cond, 99, s).is_err());
    }

    #[test]
    fn comparison_flags_mismatch() {
        let s = FockSpec::new(3).unwrap();
        let a = PureState::<f64>::fock_qubit(s, 1, Qubit::Ground).projector();
        let b = PureState::<f64>::fock_qubit(s, 0, Qubit::Excited).projector();
        let same = compare_to_full(&a, &a).unwrap();
        assert_eq!(same.trace_distance, 0.0);
        assert_eq!(same.max_block(), 0.0);
        let report = compare_series(&[0.0, 1.0], &[a.clone(), a.clone()], &[a.clone(), b]).unwrap();
        assert!(report.exceeds(1e-6));
        assert!((report.max_trace_distance() - 1.0).abs() < 1e-12);
        assert_eq!(report.points[1].block_max[0][0], 1.0);
        assert_eq!(report.points[1].block_max[1][1], 1.0);
        assert_eq!(report.points[1].block_max[0][1], 0.0);
    }
}
