//! Acceptance criteria A1–A9 as runnable checks. Each criterion returns a
//! [`Verdict`] listing the measured quantities against their tolerances.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    negativity, out_of_span_amplitude, phase_averaged_state, schmidt_entropy, support_pattern_check, trace_distance,
    PhaseAveragedSpec,
};
use crate::ansatz::{build_ansatz_state, generator_residual, solve_all, solve_separated_target, DriveHamiltonian};
use crate::error::{Error, Result};
use crate::evolve::{evolve_master, stability_rate, ChannelLabel, EnsembleAccumulator, TimeGrid, Unraveling};
use crate::hilbert::{
    coherent_state, partial_trace, qubit_state, DensityOperator, Factor, FockSpec, Layout, PureState, Qubit,
};
use crate::linalg::{frobenius, max_abs_diff};
use crate::liouvillian::{
    build_h_st, build_h_t, build_jump_ops, build_nonhermitian_h, build_total, ladder_operators, regroup, CouplingConfig,
};
use crate::scalar::{c, cis, imag, re, C};
use crate::sources::{build_l_s, classical_paths, BirthDeathParams, SourceModel};

/// Pinned tolerances of every criterion.
pub mod tolerance {
    pub const A1_ENTROPY: f64 = 1e-6;
    pub const A2_OUT_OF_SPAN: f64 = 1e-10;
    pub const A2_PEAK_ENTROPY: f64 = 0.1;
    pub const A3_DEVIATION: f64 = 1e-12;
    pub const A4_DEVIATION: f64 = 1e-13;
    pub const A5_DRIVE_IDENTITY: f64 = 1e-7;
    pub const A5_MOLLOW: f64 = 1e-6;
    pub const A6_TRACE_DISTANCE: f64 = 1e-6;
    pub const A6_RESIDUAL: f64 = 1e-6;
    pub const A7_TRAJECTORIES: usize = 2000;
    pub const A7_PHASE_SUPPORT: f64 = 1e-10;
    pub const A7_NEGATIVITY: f64 = 1e-10;
    pub const A8_TRAJECTORIES: usize = 2000;
    pub const A9_BARE_CAVITY: f64 = 1e-8;
    pub const A9_BLOCH: f64 = 1e-6;
    pub const A9_RICHARDSON: f64 = 12.0;

    /// `5/√M` for the ensemble support check.
    pub fn a7_support() -> f64 {
        5.0 / (A7_TRAJECTORIES as f64).sqrt()
    }

    /// `5/√M` for the ensemble-versus-master comparison.
    pub fn a8_trace_distance() -> f64 {
        5.0 / (A8_TRAJECTORIES as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
}

impl Criterion {
    pub const ALL: [Criterion; 9] = [
        Criterion::A1,
        Criterion::A2,
        Criterion::A3,
        Criterion::A4,
        Criterion::A5,
        Criterion::A6,
        Criterion::A7,
        Criterion::A8,
        Criterion::A9,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Criterion::A1 => "A1",
            Criterion::A2 => "A2",
            Criterion::A3 => "A3",
            Criterion::A4 => "A4",
            Criterion::A5 => "A5",
            Criterion::A6 => "A6",
            Criterion::A7 => "A7",
            Criterion::A8 => "A8",
            Criterion::A9 => "A9",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            Criterion::A1 => "coherent drive keeps conditional states factorized",
            Criterion::A2 => "birth-death conditional states stay on the ladder and entangle",
            Criterion::A3 => "regrouped generator equals the original",
            Criterion::A4 => "closed-form trajectory Hamiltonian",
            Criterion::A5 => "coupling acts as a classical drive on coherent sources",
            Criterion::A6 => "factorized ansatz solves the free-decay master equation",
            Criterion::A7 => "coarse-grained birth-death state has ladder support; phase-averaged states separable",
            Criterion::A8 => "trajectory ensemble reproduces the master equation",
            Criterion::A9 => "closed-form oracle regression",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id().eq_ignore_ascii_case(name))
    }

    pub fn run(&self) -> Verdict {
        let result = match self {
            Criterion::A1 => a1(),
            Criterion::A2 => a2(),
            Criterion::A3 => a3(),
            Criterion::A4 => a4(),
            Criterion::A5 => a5(),
            Criterion::A6 => a6(),
            Criterion::A7 => a7(),
            Criterion::A8 => a8(),
            Criterion::A9 => a9(),
        };
        match result {
            Ok(checks) => Verdict { criterion: *self, checks, error: None },
            Err(e) => Verdict { criterion: *self, checks: Vec::new(), error: Some(e.to_string()) },
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `"all"` or a single criterion id.
pub fn select(suite: &str) -> Option<Vec<Criterion>> {
    if suite.eq_ignore_ascii_case("all") {
        Some(Criterion::ALL.to_vec())
    } else {
        Criterion::parse(suite).map(|c| vec![c])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `measured < tolerance`.
    Below,
    /// Passes when `measured ≥ tolerance`.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    /// Diagnostic checks are reported but do not decide the verdict.
    pub diagnostic: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, bound: Bound::Below, diagnostic: false }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, bound: Bound::AtLeast, diagnostic: false }
    }

    pub fn diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::Below => self.measured < self.tolerance,
            Bound::AtLeast => self.measured >= self.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub criterion: Criterion,
    pub checks: Vec<Check>,
    /// Set when the criterion could not be evaluated.
    pub error: Option<String>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().filter(|c| !c.diagnostic).all(Check::pass)
    }
}

pub fn run_suite(criteria: &[Criterion]) -> Vec<Verdict> {
    criteria.iter().map(Criterion::run).collect()
}

fn coupling() -> Result<CouplingConfig<f64>> {
    CouplingConfig::new(1.0, 0.5, 0.5, 0.0)
}

fn composite(source: &DensityOperator<f64>, target: &DensityOperator<f64>) -> Result<DensityOperator<f64>> {
    DensityOperator::tensor(source, target)
}

fn ground() -> DensityOperator<f64> {
    qubit_state(Qubit::Ground).projector()
}

fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> C<f64> {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// `GG†/tr(GG†)` for a random complex 2×2 `G`.
fn random_qubit_state(rng: &mut ChaCha8Rng) -> DensityOperator<f64> {
    let g = DMatrix::from_fn(2, 2, |_, _| random_complex(rng, 1.0));
    let m = &g * g.adjoint();
    let tr = m[(0, 0)].re + m[(1, 1)].re;
    DensityOperator::unchecked(m.map(|z| z / tr), Layout::Target)
}

fn coherent_source(alpha: C<f64>, spec: FockSpec) -> DensityOperator<f64> {
    coherent_state(alpha, spec).projector_with(Layout::Source)
}

fn a1() -> Result<Vec<Check>> {
    let spec = FockSpec::new(20)?;
    let config = coupling()?;
    let alpha_ss = 1.5;
    let model = SourceModel::CoherentDrive { epsilon: re(alpha_ss * config.gamma_s / 2.0), initial_amplitude: re(alpha_ss) };
    let psi0 = PureState::product(&coherent_state(re(alpha_ss), spec), &qubit_state(Qubit::Ground));
    let grid = TimeGrid::new(0.0, 10.0, 0.01)?;
    let grid = grid.with_sample_every(grid.steps());
    grid.check_stability(stability_rate(&config, &model))?;
    let unraveling = Unraveling::new(&config, &model, spec)?;
    let worst = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut worst = 0.0_f64;
            let mut failure = None;
            unraveling.run_observed(&psi0, &grid, seed, |v| match schmidt_entropy(v.state) {
                Ok(h) => worst = worst.max(h),
                Err(e) => failure = Some(e),
            })?;
            failure.map_or(Ok(worst), Err)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(vec![Check::below("max Schmidt entropy over 200 trajectories", worst, tolerance::A1_ENTROPY)])
}

fn a2() -> Result<Vec<Check>> {
    let spec = FockSpec::new(20)?;
    let config = coupling()?;
    let params = BirthDeathParams::default();
    let n0 = params.photons0 as i64;
    let model = SourceModel::BirthDeathLaser(params.clone());
    let psi0 = PureState::fock_qubit(spec, params.photons0, Qubit::Ground);
    let grid = TimeGrid::new(0.0, 5.0, 0.002)?;
    let grid = grid.with_sample_every(grid.steps());
    let unraveling = Unraveling::new(&config, &model, spec)?;
    let per_trajectory = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut out_of_span = 0.0_f64;
            let mut peak = 0.0_f64;
            let mut failure = None;
            unraveling.run_observed(&psi0, &grid, seed, |v| {
                let r = v.record;
                let n = n0 + r.count(ChannelLabel::Gain) as i64
                    - r.count(ChannelLabel::ForwardF) as i64
                    - r.count(ChannelLabel::SideS) as i64;
                if n < 0 {
                    failure = Some(Error::InvariantViolation { time: v.time, detail: "record predicts negative quanta".into() });
                    return;
                }
                match (out_of_span_amplitude(v.state, n as usize), schmidt_entropy(v.state)) {
                    (Ok(x), Ok(h)) => {
                        out_of_span = out_of_span.max(x);
                        peak = peak.max(h);
                    }
                    (Err(e), _) | (_, Err(e)) => failure = Some(e),
                }
            })?;
            failure.map_or(Ok((out_of_span, peak)), Err)
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let worst_span = per_trajectory.iter().map(|p| p.0).fold(0.0, f64::max);
    let weakest_peak = per_trajectory.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::below("max out-of-span amplitude over 50 trajectories", worst_span, tolerance::A2_OUT_OF_SPAN),
        Check::at_least("smallest per-trajectory peak Schmidt entropy", weakest_peak, tolerance::A2_PEAK_ENTROPY),
    ])
}

fn a3() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let spec = FockSpec::new(rng.random_range(1..=6))?;
        let config = CouplingConfig::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(-2.0..2.0),
        )?;
        let model = if k % 2 == 0 {
            SourceModel::CoherentDrive { epsilon: random_complex(&mut rng, 1.0), initial_amplitude: re(0.0) }
        } else {
            SourceModel::FreeDecayMixture { initial: vec![(re(0.0), 1.0)] }
        };
        let l_s = build_l_s(&model, spec)?;
        let original = build_total(&l_s, &config, spec)?.to_matrix()?;
        let regrouped = regroup(&l_s, &config, spec)?.total().to_matrix()?;
        worst = worst.max(max_abs_diff(&original, &regrouped));
    }
    Ok(vec![Check::below("max entry deviation over 20 random configurations", worst, tolerance::A3_DEVIATION)])
}

fn a4() -> Result<Vec<Check>> {
    let spec = FockSpec::new(20)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut configs = vec![coupling()?];
    for _ in 0..5 {
        configs.push(CouplingConfig::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(-2.0..2.0),
        )?);
    }
    let mut worst = 0.0_f64;
    for config in &configs {
        let jumps = build_jump_ops(config, spec);
        let half_i = imag::<f64>() * re(0.5);
        let ss = (&jumps.side.adjoint() * &jumps.side).scale(half_i);
        let ff = (&jumps.forward.adjoint() * &jumps.forward).scale(half_i);
        let lhs = &(&(&build_h_t(config, spec) + &build_h_st(config, spec)) - &ss) - &ff;
        worst = worst.max(lhs.max_abs_diff(&build_nonhermitian_h(config, spec)));
    }
    Ok(vec![Check::below("max entry deviation over 6 configurations", worst, tolerance::A4_DEVIATION)])
}

/// Largest Frobenius deviation of `𝓛'_ST(|α⟩⟨α| ⊗ ρ_T)` from
/// `|α⟩⟨α| ⊗ (−i[Ĥ_drive(α), ρ_T])`.
fn drive_identity_deviation(n_max: usize) -> Result<f64> {
    let spec = FockSpec::new(n_max)?;
    let config = coupling()?;
    let l_st = regroup(&build_l_s(&SourceModel::FreeDecayMixture { initial: vec![(re(0.0), 1.0)] }, spec)?, &config, spec)?
        .coupling
        .compile();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let targets: Vec<_> = (0..10).map(|_| random_qubit_state(&mut rng)).collect();
    let mut worst = 0.0_f64;
    for k in 1..=6 {
        let alpha = cis(1.1 * k as f64) * re(0.25 * k as f64);
        let src = coherent_source(alpha, spec);
        let h = DriveHamiltonian::new(alpha, &config).matrix();
        for rho_t in &targets {
            let lhs = l_st.apply(composite(&src, rho_t)?.matrix());
            let comm = (&h * rho_t.matrix() - rho_t.matrix() * &h).map(|z| -imag::<f64>() * z);
            let rhs = src.matrix().kronecker(&comm);
            worst = worst.max(frobenius(&(lhs - rhs)));
        }
    }
    Ok(worst)
}

fn a5() -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::below("drive identity, |α| ≤ 1.5, n_max = 20", drive_identity_deviation(20)?, tolerance::A5_DRIVE_IDENTITY),
        Check::below("drive identity, |α| ≤ 1.5, n_max = 25", drive_identity_deviation(25)?, tolerance::A5_DRIVE_IDENTITY)
            .diagnostic(),
    ];

    let spec = FockSpec::new(20)?;
    let config = coupling()?;
    let model = SourceModel::CoherentDrive { epsilon: re(0.75), initial_amplitude: re(0.0) };
    let grid = TimeGrid::new(0.0, 5.0, 0.002)?;
    grid.check_stability(stability_rate(&config, &model))?;
    let l = regroup(&build_l_s(&model, spec)?, &config, spec)?.total();
    let rho0 = composite(&model.initial_source_state(spec)?, &ground())?;
    let full = evolve_master(&rho0, &l, &grid)?;
    let path = classical_paths(&model, &config, &grid, 1, 0)?.remove(0);
    let separated = solve_separated_target(&path, &config, &ground())?;
    let mut worst = 0.0_f64;
    for (rho, rho_t) in full.states.iter().zip(&separated.rhos) {
        worst = worst.max(trace_distance(&partial_trace(rho, Factor::Target)?, rho_t)?);
    }
    checks.push(Check::below("reduced target vs separated solve, max trace distance", worst, tolerance::A5_MOLLOW));
    Ok(checks)
}

fn a6() -> Result<Vec<Check>> {
    let spec = FockSpec::new(25)?;
    let config = coupling()?;
    let initial: Vec<_> = (0..8).map(|k| (cis(std::f64::consts::TAU * k as f64 / 8.0) * re(1.5), 1.0 / 8.0)).collect();
    let model = SourceModel::FreeDecayMixture { initial };
    let grid = TimeGrid::new(0.0, 6.0, 0.001)?.with_sample_every(20);
    grid.check_stability(stability_rate(&config, &model))?;
    let l = regroup(&build_l_s(&model, spec)?, &config, spec)?.total();
    let rho_t0 = ground();
    let full = evolve_master(&composite(&model.initial_source_state(spec)?, &rho_t0)?, &l, &grid)?;

    // Ansatz on the half-step grid: index 2k is integration step k.
    let fine = grid.refined(2);
    let paths = classical_paths(&model, &config, &fine, 8, 0)?;
    let conditionals = solve_all(&paths, &config, &rho_t0)?;
    let mut worst_distance = 0.0_f64;
    let mut worst_residual = 0.0_f64;
    for (k, rho) in grid.sample_indices().into_iter().zip(&full.states) {
        let center = build_ansatz_state(&paths, &conditionals, 2 * k, spec)?;
        worst_distance = worst_distance.max(trace_distance(&center, rho)?);
        if k > 0 && k < grid.steps() {
            let before = build_ansatz_state(&paths, &conditionals, 2 * k - 1, spec)?;
            let after = build_ansatz_state(&paths, &conditionals, 2 * k + 1, spec)?;
            worst_residual = worst_residual.max(generator_residual(&before, &center, &after, grid.dt, &l)?);
        }
    }
    Ok(vec![
        Check::below("ansatz vs full master, max trace distance", worst_distance, tolerance::A6_TRACE_DISTANCE),
        Check::below("central-difference generator residual (Frobenius)", worst_residual, tolerance::A6_RESIDUAL),
    ])
}

fn a7() -> Result<Vec<Check>> {
    let spec = FockSpec::new(20)?;
    let config = coupling()?;
    let params = BirthDeathParams::default();
    let model = SourceModel::BirthDeathLaser(params.clone());
    let psi0 = PureState::fock_qubit(spec, params.photons0, Qubit::Ground);
    let grid = TimeGrid::new(0.0, 1.0, 0.002)?.with_sample_every(50);
    let unraveling = Unraveling::new(&config, &model, spec)?;
    let seeds: Vec<u64> = (0..tolerance::A7_TRAJECTORIES as u64).collect();
    let mut acc = EnsembleAccumulator::new();
    for chunk in seeds.chunks(100) {
        for r in unraveling.run_many(&psi0, &grid, chunk)? {
            acc.add(&r)?;
        }
    }
    let mut worst_support = 0.0_f64;
    for rho in acc.finish()? {
        worst_support = worst_support.max(support_pattern_check(&rho, tolerance::a7_support()).max_violation);
    }

    let fock = FockSpec::new(12)?;
    let specs = [
        PhaseAveragedSpec::new(vec![(1.5, 1.0)], 0.8, 0.6, 48)?,
        PhaseAveragedSpec::new(vec![(0.5, 0.25), (1.0, 0.5), (2.0, 0.25)], 0.6, 0.8, 48)?,
        PhaseAveragedSpec::new(vec![(0.0, 0.5), (1.2, 0.5)], 1.0, 0.0, 60)?,
    ];
    let mut worst_phase_support = 0.0_f64;
    let mut worst_negativity = 0.0_f64;
    for s in &specs {
        let rho = phase_averaged_state(s, fock)?;
        worst_phase_support = worst_phase_support.max(support_pattern_check(&rho, tolerance::A7_PHASE_SUPPORT).max_violation);
        worst_negativity = worst_negativity.max(negativity(&rho)?);
    }
    Ok(vec![
        Check::below("ensemble off-ladder max entry, 2000 trajectories", worst_support, tolerance::a7_support()),
        Check::below("phase-averaged off-ladder max entry", worst_phase_support, tolerance::A7_PHASE_SUPPORT),
        Check::below("phase-averaged negativity", worst_negativity, tolerance::A7_NEGATIVITY),
    ])
}

fn a8() -> Result<Vec<Check>> {
    let spec = FockSpec::new(20)?;
    let config = coupling()?;
    let model = SourceModel::CoherentDrive { epsilon: re(0.75), initial_amplitude: re(0.0) };
    let grid = TimeGrid::new(0.0, 5.0, 0.01)?.with_sample_every(10);
    grid.check_stability(stability_rate(&config, &model))?;
    let psi0 = PureState::fock_qubit(spec, 0, Qubit::Ground);
    let unraveling = Unraveling::new(&config, &model, spec)?;
    let seeds: Vec<u64> = (0..tolerance::A8_TRAJECTORIES as u64).collect();
    let mut acc = EnsembleAccumulator::new();
    for chunk in seeds.chunks(100) {
        for r in unraveling.run_many(&psi0, &grid, chunk)? {
            acc.add(&r)?;
        }
    }
    let l = regroup(&build_l_s(&model, spec)?, &config, spec)?.total();
    let master = evolve_master(&psi0.projector(), &l, &grid)?;
    let mut worst = 0.0_f64;
    for (avg, rho) in acc.finish()?.iter().zip(&master.states) {
        worst = worst.max(trace_distance(avg, rho)?);
    }
    Ok(vec![Check::below("ensemble vs master, max trace distance", worst, tolerance::a8_trace_distance())])
}

/// Largest deviation of `⟨â†â⟩` from `|α₀|²e^{−γ_S t}` for a bare cavity.
pub fn bare_cavity_error(dt: f64) -> Result<f64> {
    let spec = FockSpec::new(25)?;
    let config = CouplingConfig::new(1.0, 0.0, 0.0, 0.0)?;
    let alpha0 = 1.5;
    let model = SourceModel::FreeDecayMixture { initial: vec![(re(alpha0), 1.0)] };
    let grid = TimeGrid::new(0.0, 4.0, dt)?;
    let grid = grid.with_sample_every((0.1 / dt).round() as usize);
    let l = regroup(&build_l_s(&model, spec)?, &config, spec)?.total();
    let rho0 = composite(&model.initial_source_state(spec)?, &ground())?;
    let sol = evolve_master(&rho0, &l, &grid)?;
    let (a, _) = ladder_operators::<f64>(spec);
    let number = &a.adjoint() * &a;
    let mut worst = 0.0_f64;
    for (t, rho) in sol.times.iter().zip(&sol.states) {
        let n = rho.expectation(&number)?.re;
        worst = worst.max((n - alpha0 * alpha0 * (-config.gamma_s * t).exp()).abs());
    }
    Ok(worst)
}

/// Excited population of the qubit after a long constant drive, and the
/// optical-Bloch steady-state value.
pub fn bloch_steady_state(alpha: f64) -> Result<(f64, f64)> {
    let config = coupling()?;
    let grid = TimeGrid::new(0.0, 40.0, 0.01)?;
    let times = grid.times();
    let n = times.len();
    let path = crate::sources::ClassicalPath::new(times, vec![re(alpha); n], 1.0)?;
    let sol = solve_separated_target(&path, &config, &ground())?;
    let measured = sol.rhos.last().expect("non-empty grid").matrix()[(1, 1)].re;
    let omega = 2.0 * config.coupling() * alpha;
    let gt = config.gamma_t();
    let expected = (omega * omega / 4.0) / (gt * gt / 4.0 + omega * omega / 2.0);
    Ok((measured, expected))
}

fn a9() -> Result<Vec<Check>> {
    let coarse = bare_cavity_error(0.01)?;
    let fine = bare_cavity_error(0.005)?;
    let (measured, expected) = bloch_steady_state(1.5)?;
    Ok(vec![
        Check::below("bare-cavity ⟨a†a⟩ error, dt = 0.01", coarse, tolerance::A9_BARE_CAVITY),
        Check::at_least("Richardson ratio, dt = 0.01 → 0.005", coarse / fine, tolerance::A9_RICHARDSON),
        Check::below("optical-Bloch excited population error", (measured - expected).abs(), tolerance::A9_BLOCH),
    ])
}
