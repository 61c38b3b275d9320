//! Time evolution: RK4 integration of the master equation and Monte-Carlo
//! wavefunction trajectories with environmental records.
//!
//! Random-stream contract for trajectories: each trajectory owns one
//! `ChaCha8Rng` seeded with its seed (stream 0). Every step draws exactly one
//! uniform variate; a step that produces an event draws one more to select
//! the channel. Mixture-member selection for the initial state uses stream 1
//! of the same seed, so it never shifts the per-step draws.

use std::fmt;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{DensityOperator, FockSpec, Layout, Operator, PureState};
use crate::linalg::Sparse;
use crate::liouvillian::{build_jump_ops, build_nonhermitian_h, CouplingConfig, Superoperator};
use crate::scalar::{imag, re, CMatrix, CVector, Real, C};
use crate::sources::{source_hamiltonian, source_jump_channels, BirthDeathState, SourceModel};

/// Largest `dt · rate` the master integrator accepts.
pub const STABILITY_LIMIT: f64 = 0.05;
/// Per-step jump probability above which a trajectory step is an error.
pub const STEP_PROBABILITY_LIMIT: f64 = 0.1;
/// Per-step jump probability above which a warning is logged.
pub const STEP_PROBABILITY_RECOMMENDED: f64 = 0.01;
/// Trace drift tolerated by the master integrator.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// Most negative eigenvalue tolerated by the master integrator.
pub const NEGATIVITY_LIMIT: f64 = 1e-8;

/// Uniform grid `t0, t0+dt, …, t1`. States are stored every
/// `sample_every` steps, and always at `t1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T: Real> {
    pub t0: T,
    pub t1: T,
    pub dt: T,
    pub sample_every: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t0: T, t1: T, dt: T) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(t1 >= t0) {
            return Err(Error::InvalidParameter(format!("t1 = {t1} precedes t0 = {t0}")));
        }
        let ratio = ((t1 - t0) / dt).as_f64();
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::InvalidParameter(format!("(t1 − t0)/dt = {ratio} is not an integer")));
        }
        Ok(Self { t0, t1, dt, sample_every: 1 })
    }

    pub fn with_sample_every(mut self, every: usize) -> Self {
        self.sample_every = every.max(1);
        self
    }

    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).as_f64().round() as usize
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + self.dt * T::lit(k as f64)
    }

    /// Every step time, `steps() + 1` entries.
    pub fn times(&self) -> Vec<T> {
        (0..=self.steps()).map(|k| self.time(k)).collect()
    }

    pub fn is_sample(&self, k: usize) -> bool {
        k.is_multiple_of(self.sample_every) || k == self.steps()
    }

    pub fn sample_indices(&self) -> Vec<usize> {
        (0..=self.steps()).filter(|&k| self.is_sample(k)).collect()
    }

    pub fn sample_times(&self) -> Vec<T> {
        self.sample_indices().into_iter().map(|k| self.time(k)).collect()
    }

    /// Same span with the step divided by `factor`; sampling keeps the
    /// original sample times.
    pub fn refined(&self, factor: usize) -> Self {
        Self { dt: self.dt / T::lit(factor as f64), sample_every: self.sample_every * factor, ..*self }
    }

    /// Enforces `dt · max_rate ≤ 0.05`.
    pub fn check_stability(&self, max_rate: T) -> Result<()> {
        let x = (self.dt * max_rate).as_f64();
        if x > STABILITY_LIMIT + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "dt·rate = {x:.4} exceeds the step rule {STABILITY_LIMIT}; reduce dt below {}",
                STABILITY_LIMIT / max_rate.as_f64()
            )));
        }
        Ok(())
    }
}

/// Rate entering the step rule: the largest coupling or source rate.
pub fn stability_rate<T: Real>(config: &CouplingConfig<T>, model: &SourceModel<T>) -> T {
    config.max_rate().max(model.max_rate())
}

/// Fourth-order Runge–Kutta step for `dy/dt = f(t, y)`.
pub(crate) fn rk4_step<T: Real>(t: T, dt: T, y: &CMatrix<T>, f: impl Fn(T, &CMatrix<T>) -> CMatrix<T>) -> CMatrix<T> {
    let half = dt * T::lit(0.5);
    let k1 = f(t, y);
    let k2 = f(t + half, &(y + k1.map(|z| z * half)));
    let k3 = f(t + half, &(y + k2.map(|z| z * half)));
    let k4 = f(t + dt, &(y + k3.map(|z| z * dt)));
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    y + (k1 + k2.map(|z| z * two) + k3.map(|z| z * two) + k4).map(|z| z * sixth)
}

/// Density operators at the grid's sample times.
#[derive(Clone, Debug)]
pub struct MasterSolution<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityOperator<T>>,
}

pub(crate) fn check_density<T: Real>(rho: &DensityOperator<T>, t: T) -> Result<()> {
    let tr = rho.trace();
    let drift = ((tr.re - T::one()).abs() + tr.im.abs()).as_f64();
    if drift > TRACE_DRIFT_LIMIT.max(1e3 * T::EPS) {
        return Err(Error::InvariantViolation { time: t.as_f64(), detail: format!("trace drifted by {drift:.3e}") });
    }
    let min = rho.min_eigenvalue().as_f64();
    if min < -NEGATIVITY_LIMIT.max(1e3 * T::EPS) {
        return Err(Error::InvariantViolation { time: t.as_f64(), detail: format!("eigenvalue {min:.3e} is negative") });
    }
    Ok(())
}

/// Integrates `dρ/dt = 𝓛ρ` with classical RK4. Every stored state is
/// re-checked for trace drift and negativity.
pub fn evolve_master<T: Real>(rho0: &DensityOperator<T>, generator: &Superoperator<T>, grid: &TimeGrid<T>) -> Result<MasterSolution<T>> {
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { expected: generator.dim(), found: rho0.dim() });
    }
    rho0.validate()?;
    let compiled = generator.compile();
    let layout = rho0.layout();
    let mut rho = rho0.matrix().clone();
    let mut out = MasterSolution { times: vec![grid.t0], states: vec![rho0.clone()] };
    for k in 1..=grid.steps() {
        if !compiled.is_trivial() {
            rho = rk4_step(grid.time(k - 1), grid.dt, &rho, |_, r| compiled.apply(r));
        }
        if grid.is_sample(k) {
            let t = grid.time(k);
            let state = DensityOperator::unchecked(rho.clone(), layout);
            check_density(&state, t)?;
            out.times.push(t);
            out.states.push(state);
        }
    }
    Ok(out)
}

/// `tr(A ρ)`.
pub fn expectation<T: Real>(rho: &DensityOperator<T>, op: &Operator<T>) -> Result<C<T>> {
    rho.expectation(op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelLabel {
    ForwardF,
    SideS,
    Pump,
    Gain,
    Nonlasing,
}

impl ChannelLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelLabel::ForwardF => "forward_f",
            ChannelLabel::SideS => "side_s",
            ChannelLabel::Pump => "pump",
            ChannelLabel::Gain => "gain",
            ChannelLabel::Nonlasing => "nonlasing",
        }
    }
}

impl fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rate multiplier of a channel; carrier-dependent channels scale with `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelRate<T: Real> {
    Constant(T),
    PerCarrier(T),
}

impl<T: Real> ChannelRate<T> {
    pub fn weight(&self, carriers: u64) -> T {
        match *self {
            ChannelRate::Constant(r) => r,
            ChannelRate::PerCarrier(r) => r * T::lit(carriers as f64),
        }
    }
}

/// A monitored channel. With an operator, the effective jump operator is
/// `√weight(N) · C`; without one, the channel is a classical event that only
/// changes the carrier counter by `carrier_delta`.
#[derive(Clone, Debug)]
pub struct JumpChannel<T: Real> {
    pub label: ChannelLabel,
    pub operator: Option<Operator<T>>,
    pub rate: ChannelRate<T>,
    pub carrier_delta: i64,
}

impl<T: Real> JumpChannel<T> {
    pub fn quantum(label: ChannelLabel, operator: Operator<T>, rate: ChannelRate<T>, carrier_delta: i64) -> Self {
        Self { label, operator: Some(operator), rate, carrier_delta }
    }

    pub fn classical(label: ChannelLabel, rate: ChannelRate<T>, carrier_delta: i64) -> Self {
        Self { label, operator: None, rate, carrier_delta }
    }
}

/// `f̂` and `ŝ` channels of the cascaded coupling.
pub fn coupling_channels<T: Real>(config: &CouplingConfig<T>, spec: FockSpec) -> Vec<JumpChannel<T>> {
    let jumps = build_jump_ops(config, spec);
    vec![
        JumpChannel::quantum(ChannelLabel::ForwardF, jumps.forward, ChannelRate::Constant(T::one()), 0),
        JumpChannel::quantum(ChannelLabel::SideS, jumps.side, ChannelRate::Constant(T::one()), 0),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event<T: Real> {
    pub time: T,
    pub label: ChannelLabel,
}

/// Time-ordered environmental record of one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Record<T: Real> {
    pub events: Vec<Event<T>>,
    pub seed: u64,
}

impl<T: Real> Record<T> {
    pub fn count(&self, label: ChannelLabel) -> usize {
        self.events.iter().filter(|e| e.label == label).count()
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult<T: Real> {
    pub record: Record<T>,
    pub times: Vec<T>,
    pub states: Vec<PureState<T>>,
    /// Carrier counter at each sample time, for birth–death sources.
    pub carriers: Option<Vec<BirthDeathState>>,
}

/// Second-order keeps the `−H²dt²/2` term of the no-jump propagator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Propagator {
    #[default]
    FirstOrder,
    SecondOrder,
}

/// What an observer sees after every step (and once at `t0`).
pub struct StepView<'a, T: Real> {
    pub step: usize,
    pub time: T,
    pub state: &'a PureState<T>,
    pub carriers: Option<u64>,
    pub record: &'a Record<T>,
}

#[derive(Clone, Debug)]
struct CompiledChannel<T: Real> {
    label: ChannelLabel,
    jump: Option<Sparse<T>>,
    /// `C†C`, kept only for carrier-dependent quantum channels whose
    /// non-Hermitian contribution changes with `N`.
    decay: Option<Sparse<T>>,
    rate: ChannelRate<T>,
    carrier_delta: i64,
}

/// Monte-Carlo wavefunction unraveling of the cascaded master equation for
/// one source model.
#[derive(Clone, Debug)]
pub struct Unraveling<T: Real> {
    dim: usize,
    hamiltonian: Sparse<T>,
    channels: Vec<CompiledChannel<T>>,
    carriers0: Option<u64>,
    propagator: Propagator,
}

impl<T: Real> Unraveling<T> {
    pub fn new(config: &CouplingConfig<T>, model: &SourceModel<T>, spec: FockSpec) -> Result<Self> {
        config.validate()?;
        model.validate()?;
        let mut channels = coupling_channels(config, spec);
        let mut carriers0 = None;
        if let SourceModel::BirthDeathLaser(p) = model {
            channels.extend(source_jump_channels(model, config, spec)?);
            carriers0 = Some(p.carriers0);
        }
        // Constant-rate channels fold their −(i/2)C†C into the Hamiltonian
        // (already part of the closed form for f̂ and ŝ).
        let mut h = &source_hamiltonian(model, spec) + &build_nonhermitian_h(config, spec);
        let mut compiled = Vec::new();
        for ch in channels {
            let (jump, decay) = match &ch.operator {
                Some(op) if op.is_zero() => continue,
                Some(op) => {
                    let cdc = &op.adjoint() * op;
                    match ch.rate {
                        ChannelRate::Constant(r) if !matches!(ch.label, ChannelLabel::ForwardF | ChannelLabel::SideS) => {
                            h = &h + &cdc.scale(-imag::<T>() * re(r * T::lit(0.5)));
                            (Some(op.sparse()), None)
                        }
                        ChannelRate::Constant(_) => (Some(op.sparse()), None),
                        ChannelRate::PerCarrier(_) => (Some(op.sparse()), Some(cdc.sparse())),
                    }
                }
                None => (None, None),
            };
            compiled.push(CompiledChannel { label: ch.label, jump, decay, rate: ch.rate, carrier_delta: ch.carrier_delta });
        }
        Ok(Self { dim: spec.dim(), hamiltonian: h.sparse(), channels: compiled, carriers0, propagator: Propagator::FirstOrder })
    }

    pub fn with_propagator(mut self, propagator: Propagator) -> Self {
        self.propagator = propagator;
        self
    }

    pub fn channel_labels(&self) -> Vec<ChannelLabel> {
        self.channels.iter().map(|c| c.label).collect()
    }

    pub fn run(&self, psi0: &PureState<T>, grid: &TimeGrid<T>, seed: u64) -> Result<TrajectoryResult<T>> {
        self.run_observed(psi0, grid, seed, |_| {})
    }

    /// Runs one trajectory, calling `observer` at `t0` and after every step.
    pub fn run_observed(
        &self,
        psi0: &PureState<T>,
        grid: &TimeGrid<T>,
        seed: u64,
        mut observer: impl FnMut(&StepView<'_, T>),
    ) -> Result<TrajectoryResult<T>> {
        if psi0.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: psi0.dim() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dt = grid.dt;
        let mut psi = psi0.amplitudes().clone();
        let mut carriers = self.carriers0;
        let mut record = Record { events: Vec::new(), seed };
        let mut result = TrajectoryResult {
            record: Record { events: Vec::new(), seed },
            times: vec![grid.t0],
            states: vec![psi0.clone()],
            carriers: carriers.map(|n| vec![BirthDeathState { carriers: n }]),
        };
        observer(&StepView { step: 0, time: grid.t0, state: psi0, carriers, record: &record });

        let mut warned = false;
        let mut kicked: Vec<Option<CVector<T>>> = vec![None; self.channels.len()];
        let mut probs = vec![0.0_f64; self.channels.len()];
        for k in 1..=grid.steps() {
            let t_prev = grid.time(k - 1);
            let n = carriers.unwrap_or(0);
            let mut total = 0.0;
            for (i, ch) in self.channels.iter().enumerate() {
                let w = ch.rate.weight(n);
                let p = match &ch.jump {
                    Some(op) => {
                        let v = op.mul_vec(&psi);
                        let p = (dt * w * v.norm_squared()).as_f64();
                        kicked[i] = Some(v);
                        p
                    }
                    None => (dt * w).as_f64(),
                };
                probs[i] = p;
                total += p;
            }
            if total > STEP_PROBABILITY_LIMIT {
                let (i, p) = probs.iter().enumerate().fold((0, 0.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
                return Err(Error::StepProbability {
                    probability: total,
                    limit: STEP_PROBABILITY_LIMIT,
                    channel: self.channels[i].label.to_string(),
                    channel_probability: p,
                    time: t_prev.as_f64(),
                });
            }
            if total > STEP_PROBABILITY_RECOMMENDED && !warned {
                warn!("per-step jump probability {total:.4} exceeds the recommended {STEP_PROBABILITY_RECOMMENDED} at t = {t_prev}");
                warned = true;
            }

            let u: f64 = rng.random();
            if u < total {
                let r: f64 = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = self.channels.len() - 1;
                for (i, &p) in probs.iter().enumerate() {
                    acc += p;
                    if r < acc && p > 0.0 {
                        chosen = i;
                        break;
                    }
                }
                let ch = &self.channels[chosen];
                if let Some(v) = kicked[chosen].take() {
                    let norm = v.norm();
                    psi = v.map(|z| z / norm);
                }
                if let Some(n) = carriers.as_mut() {
                    *n = n.checked_add_signed(ch.carrier_delta).ok_or_else(|| Error::InvariantViolation {
                        time: grid.time(k).as_f64(),
                        detail: format!("carrier number would become negative on `{}`", ch.label),
                    })?;
                }
                record.events.push(Event { time: grid.time(k), label: ch.label });
            } else {
                psi = self.no_jump(&psi, dt, n);
            }

            let state = PureState::from_normalized(psi.clone());
            observer(&StepView { step: k, time: grid.time(k), state: &state, carriers, record: &record });
            if grid.is_sample(k) {
                result.times.push(grid.time(k));
                result.states.push(state);
                if let (Some(list), Some(n)) = (result.carriers.as_mut(), carriers) {
                    list.push(BirthDeathState { carriers: n });
                }
            }
        }
        result.record = record;
        Ok(result)
    }

    fn effective_h(&self, v: &CVector<T>, carriers: u64) -> CVector<T> {
        let mut out = self.hamiltonian.mul_vec(v);
        for ch in &self.channels {
            if let Some(decay) = &ch.decay {
                let w = ch.rate.weight(carriers);
                if w != T::zero() {
                    decay.mul_vec_acc(v, -imag::<T>() * re(w * T::lit(0.5)), &mut out);
                }
            }
        }
        out
    }

    fn no_jump(&self, psi: &CVector<T>, dt: T, carriers: u64) -> CVector<T> {
        let hpsi = self.effective_h(psi, carriers);
        let step = -imag::<T>() * re(dt);
        let mut next = psi + hpsi.map(|z| z * step);
        if self.propagator == Propagator::SecondOrder {
            let h2psi = self.effective_h(&hpsi, carriers);
            next += h2psi.map(|z| z * (step * step * re(T::lit(0.5))));
        }
        let norm = next.norm();
        next.map(|z| z / norm)
    }

    /// Independent trajectories, one per seed, returned in seed order.
    pub fn run_many(&self, psi0: &PureState<T>, grid: &TimeGrid<T>, seeds: &[u64]) -> Result<Vec<TrajectoryResult<T>>> {
        seeds.par_iter().map(|&s| self.run(psi0, grid, s)).collect()
    }
}

/// Convenience wrapper: build the unraveling and run one trajectory.
pub fn mcwf_run<T: Real>(
    psi0: &PureState<T>,
    config: &CouplingConfig<T>,
    model: &SourceModel<T>,
    spec: FockSpec,
    grid: &TimeGrid<T>,
    seed: u64,
) -> Result<TrajectoryResult<T>> {
    Unraveling::new(config, model, spec)?.run(psi0, grid, seed)
}

/// Picks a mixture member with probability proportional to its weight,
/// from stream 1 of `seed`.
pub fn mixture_member<T: Real>(weights: &[T], seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let total: f64 = weights.iter().map(|w| w.as_f64()).sum();
    let r = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w.as_f64();
        if r < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Running sum of trajectory projectors; reduction order is the insertion
/// order, so feeding results in seed order is reproducible.
#[derive(Clone, Debug)]
pub struct EnsembleAccumulator<T: Real> {
    times: Vec<T>,
    sums: Vec<CMatrix<T>>,
    count: usize,
}

impl<T: Real> EnsembleAccumulator<T> {
    pub fn new() -> Self {
        Self { times: Vec::new(), sums: Vec::new(), count: 0 }
    }

    pub fn add(&mut self, result: &TrajectoryResult<T>) -> Result<()> {
        if self.count == 0 {
            self.times = result.times.clone();
            self.sums = result.states.iter().map(|s| CMatrix::zeros(s.dim(), s.dim())).collect();
        } else if result.times != self.times {
            return Err(Error::GridMismatch(format!(
                "trajectory with seed {} has {} samples, expected {}",
                result.record.seed,
                result.times.len(),
                self.times.len()
            )));
        }
        for (sum, psi) in self.sums.iter_mut().zip(&result.states) {
            let v = psi.amplitudes();
            *sum += v * v.adjoint();
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn finish(&self) -> Result<Vec<DensityOperator<T>>> {
        if self.count == 0 {
            return Err(Error::InvalidState("ensemble average of zero trajectories".into()));
        }
        let inv = T::one() / T::lit(self.count as f64);
        Ok(self.sums.iter().map(|m| DensityOperator::unchecked(m.map(|z| z * inv), Layout::Composite)).collect())
    }
}

impl<T: Real> Default for EnsembleAccumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// `ρ̄(t) = (1/M) Σ |ψ_m(t)⟩⟨ψ_m(t)|` at each common sample time.
pub fn ensemble_average<T: Real>(results: &[TrajectoryResult<T>]) -> Result<Vec<DensityOperator<T>>> {
    let mut acc = EnsembleAccumulator::new();
    for r in results {
        acc.add(r)?;
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilation, coherent_state, embed, qubit_state, Factor, Qubit};
    use crate::liouvillian::{ladder_operators, regroup};
    use crate::scalar::{c, zero};
    use crate::sources::{build_l_s, steady_amplitude, BirthDeathParams};

    fn spec(n: usize) -> FockSpec {
        FockSpec::new(n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.3).is_err());
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap().with_sample_every(3);
        assert_eq!(g.steps(), 10);
        assert_eq!(g.sample_indices(), vec![0, 3, 6, 9, 10]);
        assert!(g.check_stability(0.5).is_ok());
        assert!(g.check_stability(1.0).is_err());
    }

    #[test]
    fn zero_generator_leaves_state_unchanged() {
        let s = spec(3);
        let rho0 = PureState::product(&coherent_state(c(0.3, 0.1), s), &qubit_state(Qubit::Excited)).projector();
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        let sol = evolve_master(&rho0, &Superoperator::zero(s.dim()), &g).unwrap();
        assert_eq!(sol.states.len(), 11);
        assert!(sol.states.iter().all(|r| r == &rho0));
    }

    fn bare_cavity_error(dt: f64, t1: f64) -> f64 {
        let s = spec(25);
        let cfg = CouplingConfig::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let alpha0 = c(1.5, 0.0);
        let model = SourceModel::FreeDecayMixture { initial: vec![(alpha0, 1.0)] };
        let l = regroup(&build_l_s(&model, s).unwrap(), &cfg, s).unwrap().total();
        let rho0 = DensityOperator::tensor(&model.initial_source_state(s).unwrap(), &qubit_state(Qubit::Ground).projector()).unwrap();
        let g = TimeGrid::new(0.0, t1, dt).unwrap().with_sample_every(10);
        let sol = evolve_master(&rho0, &l, &g).unwrap();
        let (a, _) = ladder_operators::<f64>(s);
        let num = &a.adjoint() * &a;
        sol.times
            .iter()
            .zip(&sol.states)
            .map(|(t, rho)| (rho.expectation(&num).unwrap().re - 2.25 * (-t).exp()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn bare_cavity_matches_exponential_decay() {
        assert!(bare_cavity_error(0.01, 4.0) < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let coarse = bare_cavity_error(0.01, 4.0);
        let fine = bare_cavity_error(0.005, 4.0);
        assert!(coarse / fine > 12.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn zero_rates_give_empty_record() {
        let s = spec(3);
        let cfg = CouplingConfig::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let model = SourceModel::FreeDecayMixture { initial: vec![(zero(), 1.0)] };
        let psi0 = PureState::product(&coherent_state::<f64>(c(0.4, 0.0), s), &qubit_state(Qubit::Excited));
        let g = TimeGrid::new(0.0, 2.0, 0.01).unwrap();
        let r = mcwf_run(&psi0, &cfg, &model, s, &g, 1).unwrap();
        assert!(r.record.events.is_empty());
        assert!(r.states.iter().all(|p| (p.inner(&psi0).norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn fock_source_conserves_quanta() {
        let s = spec(5);
        let cfg = CouplingConfig::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let model = SourceModel::FreeDecayMixture { initial: vec![(zero(), 1.0)] };
        let psi0 = PureState::fock_qubit(s, 3, Qubit::Ground);
        let (a, b) = ladder_operators::<f64>(s);
        let total = &(&a.adjoint() * &a) + &(&b.adjoint() * &b);
        let g = TimeGrid::new(0.0, 6.0, 0.005).unwrap();
        for seed in 0..10 {
            let mut worst: f64 = 0.0;
            mcwf_run(&psi0, &cfg, &model, s, &g, seed).unwrap();
            Unraveling::new(&cfg, &model, s)
                .unwrap()
                .run_observed(&psi0, &g, seed, |v: &StepView<'_, f64>| {
                    let emitted = v.record.events.len() as f64;
                    let quanta = v.state.expectation(&total).re + emitted;
                    worst = worst.max((quanta - 3.0).abs());
                })
                .unwrap();
            assert!(worst < 1e-10, "seed {seed}: {worst}");
        }
    }

    #[test]
    fn trajectories_are_reproducible() {
        let s = spec(8);
        let cfg = CouplingConfig::default();
        let model = SourceModel::BirthDeathLaser(BirthDeathParams::default());
        let psi0 = PureState::fock_qubit(s, 3, Qubit::Ground);
        let g = TimeGrid::new(0.0, 1.0, 0.002).unwrap().with_sample_every(50);
        let a = mcwf_run(&psi0, &cfg, &model, s, &g, 42).unwrap();
        let b = mcwf_run(&psi0, &cfg, &model, s, &g, 42).unwrap();
        assert_eq!(a.record, b.record);
        assert_eq!(a.states, b.states);
        let times: Vec<f64> = a.record.events.iter().map(|e| e.time).collect();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn step_probability_violation_names_channel() {
        let s = spec(8);
        let cfg = CouplingConfig::default();
        let model = SourceModel::BirthDeathLaser(BirthDeathParams::default());
        let psi0 = PureState::fock_qubit(s, 3, Qubit::Ground);
        let g = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        match mcwf_run(&psi0, &cfg, &model, s, &g, 1) {
            Err(Error::StepProbability { channel, .. }) => assert_eq!(channel, "gain"),
            other => panic!("expected a step-probability error, got {other:?}"),
        }
    }

    #[test]
    fn ensemble_average_examples() {
        let s = spec(6);
        let cfg = CouplingConfig::default();
        let eps = c(0.5, 0.0);
        let model = SourceModel::CoherentDrive { epsilon: eps, initial_amplitude: steady_amplitude(eps, 1.0) };
        let psi0 = PureState::product(&coherent_state(steady_amplitude(eps, 1.0), s), &qubit_state(Qubit::Ground));
        let g = TimeGrid::new(0.0, 1.0, 0.01).unwrap().with_sample_every(25);
        let un = Unraveling::new(&cfg, &model, s).unwrap();
        let one = un.run(&psi0, &g, 3).unwrap();
        let avg = ensemble_average(std::slice::from_ref(&one)).unwrap();
        for (rho, psi) in avg.iter().zip(&one.states) {
            assert!(crate::linalg::max_abs_diff(rho.matrix(), psi.projector().matrix()) < 1e-15);
        }
        let same = ensemble_average(&[one.clone(), one.clone(), one.clone()]).unwrap();
        for (x, y) in same.iter().zip(&avg) {
            assert!(crate::linalg::max_abs_diff(x.matrix(), y.matrix()) < 1e-15);
        }
        let other = un.run(&psi0, &TimeGrid::new(0.0, 0.5, 0.01).unwrap(), 4).unwrap();
        assert!(matches!(ensemble_average(&[one, other]), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn expectation_examples() {
        let s = spec(3);
        let rho = PureState::<f64>::fock_qubit(s, 1, Qubit::Ground).projector();
        let id = Operator::identity(s.dim());
        assert_eq!(expectation(&rho, &id).unwrap(), c(1.0, 0.0));
        let a = embed(&annihilation::<f64>(s), Factor::Source, s).unwrap();
        assert_eq!(expectation(&rho, &(&a.adjoint() * &a)).unwrap(), c(1.0, 0.0));
        let psi = PureState::product(&coherent_state(c(0.2, 0.7), s), &qubit_state(Qubit::Excited));
        let x = &a + &a.adjoint();
        assert!(expectation(&psi.projector(), &x).unwrap().im.abs() < 1e-12);
        assert!(expectation(&rho, &Operator::identity(3)).is_err());
    }
}
