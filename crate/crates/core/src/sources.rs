//! Laser source models: their source generator, their trajectory jump
//! channels and the classical amplitude paths that carry their
//! Glauber–Sudarshan P distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::evolve::{ChannelLabel, ChannelRate, JumpChannel, TimeGrid};
use crate::hilbert::{annihilation, coherent_state, embed, fock_state, DensityOperator, Factor, FockSpec, Layout, Operator};
use crate::liouvillian::{CouplingConfig, Superoperator};
use crate::scalar::{cis, imag, re, CMatrix, Modulus, Real, C};

/// Parameters of the birth–death laser. The carrier number is a classical
/// counter attached to each trajectory; the photon number lives in the
/// Fock register.
#[derive(Clone, Debug, PartialEq)]
pub struct BirthDeathParams<T: Real> {
    /// Pump rate `Λ` (carrier births).
    pub pump_rate: T,
    /// Stimulated-emission rate per carrier `g`; the gain channel is
    /// `√(g·N) â†`.
    pub gain_per_carrier: T,
    /// Non-lasing carrier loss per carrier `γ_nl`.
    pub nonlasing_rate: T,
    /// Initial carrier number `N₀`.
    pub carriers0: u64,
    /// Initial photon number `n₀`.
    pub photons0: usize,
}

impl Default for BirthDeathParams<f64> {
    fn default() -> Self {
        Self { pump_rate: 2.0, gain_per_carrier: 1.0, nonlasing_rate: 0.5, carriers0: 5, photons0: 3 }
    }
}

/// Classical carrier register of a birth–death trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BirthDeathState {
    pub carriers: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceModel<T: Real> {
    /// Coherent drive `Ĥ_S = i(εâ† − ε*â)`; `initial_amplitude` is the
    /// coherent amplitude at `t = 0`.
    CoherentDrive { epsilon: C<T>, initial_amplitude: C<T> },
    /// Undriven cavity prepared in a weighted mixture of coherent states.
    FreeDecayMixture { initial: Vec<(C<T>, T)> },
    /// Trajectory-only birth–death laser.
    BirthDeathLaser(BirthDeathParams<T>),
}

impl<T: Real> SourceModel<T> {
    pub fn name(&self) -> &'static str {
        match self {
            SourceModel::CoherentDrive { .. } => "coherent_drive",
            SourceModel::FreeDecayMixture { .. } => "free_decay_mixture",
            SourceModel::BirthDeathLaser(_) => "birth_death_laser",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SourceModel::CoherentDrive { epsilon, initial_amplitude } => {
                if !(epsilon.re.is_finite() && epsilon.im.is_finite() && initial_amplitude.re.is_finite() && initial_amplitude.im.is_finite()) {
                    return Err(Error::InvalidParameter("coherent drive amplitudes must be finite".into()));
                }
            }
            SourceModel::FreeDecayMixture { initial } => {
                if initial.is_empty() {
                    return Err(Error::InvalidParameter("free-decay mixture needs at least one amplitude".into()));
                }
                if initial.iter().any(|(_, w)| !(*w >= T::zero())) {
                    return Err(Error::InvalidParameter("mixture weights must be non-negative".into()));
                }
                let total = initial.iter().fold(T::zero(), |a, (_, w)| a + *w);
                if (total - T::one()).abs() > T::tol(1e-12) {
                    return Err(Error::InvalidParameter(format!("mixture weights sum to {total}, not 1")));
                }
            }
            SourceModel::BirthDeathLaser(p) => {
                for (name, v) in [("pump_rate", p.pump_rate), ("gain_per_carrier", p.gain_per_carrier), ("nonlasing_rate", p.nonlasing_rate)] {
                    if !v.is_finite() || v < T::zero() {
                        return Err(Error::InvalidParameter(format!("{name} must be finite and non-negative, got {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest source rate scale, for step-size rules.
    pub fn max_rate(&self) -> T {
        match self {
            SourceModel::CoherentDrive { epsilon, .. } => epsilon.modulus(),
            SourceModel::FreeDecayMixture { .. } => T::zero(),
            SourceModel::BirthDeathLaser(p) => {
                let n0 = T::lit(p.carriers0 as f64);
                let m = if p.pump_rate > p.nonlasing_rate * n0 { p.pump_rate } else { p.nonlasing_rate * n0 };
                let g = p.gain_per_carrier * n0 * T::lit(p.photons0 as f64 + 1.0);
                if g > m { g } else { m }
            }
        }
    }

    /// Source density operator at `t = 0` on the Fock factor.
    pub fn initial_source_state(&self, spec: FockSpec) -> Result<DensityOperator<T>> {
        match self {
            SourceModel::CoherentDrive { initial_amplitude, .. } => {
                Ok(coherent_state(*initial_amplitude, spec).projector_with(Layout::Source))
            }
            SourceModel::FreeDecayMixture { initial } => {
                let d = spec.fock_dim();
                let mut m = CMatrix::zeros(d, d);
                for (alpha, w) in initial {
                    m += coherent_state(*alpha, spec).projector_with(Layout::Source).into_matrix().map(|z| z * *w);
                }
                Ok(DensityOperator::unchecked(m, Layout::Source))
            }
            SourceModel::BirthDeathLaser(p) => Ok(fock_state(p.photons0, spec)?.projector_with(Layout::Source)),
        }
    }
}

/// Steady coherent amplitude of a driven, damped cavity, `2ε/γ_S`.
pub fn steady_amplitude<T: Real>(epsilon: C<T>, gamma_s: T) -> C<T> {
    epsilon * re(T::lit(2.0) / gamma_s)
}

/// Source generator `𝓛_S` on the Fock factor (without the output damping,
/// which the regrouping adds).
pub fn build_l_s<T: Real>(model: &SourceModel<T>, spec: FockSpec) -> Result<Superoperator<T>> {
    match model {
        SourceModel::CoherentDrive { epsilon, .. } => {
            let a = annihilation::<T>(spec);
            let drive = &a.adjoint().scale(*epsilon) - &a.scale(epsilon.conj());
            let h = drive.scale(imag()).with_label("H_S");
            Ok(Superoperator::hamiltonian(&h).with_label("L_S"))
        }
        SourceModel::FreeDecayMixture { .. } => Ok(Superoperator::zero(spec.fock_dim()).with_label("L_S")),
        SourceModel::BirthDeathLaser(_) => {
            Err(Error::UnsupportedVariant { model: "birth_death_laser", operation: "a source generator" })
        }
    }
}

/// Source Hamiltonian embedded in the composite space (zero when the model
/// has none).
pub fn source_hamiltonian<T: Real>(model: &SourceModel<T>, spec: FockSpec) -> Operator<T> {
    match model {
        SourceModel::CoherentDrive { epsilon, .. } => {
            let a = annihilation::<T>(spec);
            let h = (&a.adjoint().scale(*epsilon) - &a.scale(epsilon.conj())).scale(imag());
            embed(&h, Factor::Source, spec).expect("fock dimension").with_label("H_S")
        }
        _ => Operator::zeros(spec.dim()),
    }
}

/// Birth–death channels: pump `N → N+1` (classical, rate `Λ`), gain
/// `√(g·N) â†` with `N → N−1`, and non-lasing loss `N → N−1` at rate
/// `γ_nl·N` (classical).
pub fn source_jump_channels<T: Real>(
    model: &SourceModel<T>,
    _config: &CouplingConfig<T>,
    spec: FockSpec,
) -> Result<Vec<JumpChannel<T>>> {
    let SourceModel::BirthDeathLaser(p) = model else {
        return Err(Error::UnsupportedVariant { model: model.name(), operation: "source jump channels" });
    };
    let create = embed(&annihilation::<T>(spec).adjoint(), Factor::Source, spec)?.with_label("a†");
    Ok(vec![
        JumpChannel::classical(ChannelLabel::Pump, ChannelRate::Constant(p.pump_rate), 1),
        JumpChannel::quantum(ChannelLabel::Gain, create, ChannelRate::PerCarrier(p.gain_per_carrier), -1),
        JumpChannel::classical(ChannelLabel::Nonlasing, ChannelRate::PerCarrier(p.nonlasing_rate), -1),
    ])
}

/// Sampled amplitude path `α_t` with its statistical weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPath<T: Real> {
    pub times: Vec<T>,
    pub alphas: Vec<C<T>>,
    pub weight: T,
}

impl<T: Real> ClassicalPath<T> {
    pub fn new(times: Vec<T>, alphas: Vec<C<T>>, weight: T) -> Result<Self> {
        if times.len() != alphas.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: alphas.len() });
        }
        if !(weight >= T::zero()) {
            return Err(Error::InvalidParameter(format!("path weight must be non-negative, got {weight}")));
        }
        Ok(Self { times, alphas, weight })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Piecewise-linear amplitude at time `t` (clamped to the path's span).
    pub fn amplitude_at(&self, t: T) -> C<T> {
        let n = self.times.len();
        if n == 0 {
            return crate::scalar::zero();
        }
        if t <= self.times[0] {
            return self.alphas[0];
        }
        if t >= self.times[n - 1] {
            return self.alphas[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let u = (t - t0) / (t1 - t0);
        self.alphas[k] * re(T::one() - u) + self.alphas[k + 1] * re(u)
    }
}

/// `P(α, α*, t)` at a fixed time as a weighted sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct PDistribution<T: Real> {
    pub samples: Vec<(C<T>, T)>,
}

impl<T: Real> PDistribution<T> {
    pub fn new(samples: Vec<(C<T>, T)>) -> Result<Self> {
        let p = Self { samples };
        SourceModel::FreeDecayMixture { initial: p.samples.clone() }.validate()?;
        Ok(p)
    }

    /// Slice of a path ensemble at grid index `k`.
    pub fn from_paths(paths: &[ClassicalPath<T>], k: usize) -> Result<Self> {
        Self::new(paths.iter().map(|p| (p.alphas[k], p.weight)).collect())
    }

    /// `Σ w |α⟩⟨α|` on the Fock factor.
    pub fn density(&self, spec: FockSpec) -> DensityOperator<T> {
        let d = spec.fock_dim();
        let mut m = CMatrix::zeros(d, d);
        for (alpha, w) in &self.samples {
            m += coherent_state(*alpha, spec).projector_with(Layout::Source).into_matrix().map(|z| z * *w);
        }
        DensityOperator::unchecked(m, Layout::Source)
    }
}

/// Deterministic classical paths of the source models. `count` and `seed`
/// are accepted for interface uniformity; both families are deterministic.
pub fn classical_paths<T: Real>(
    model: &SourceModel<T>,
    config: &CouplingConfig<T>,
    grid: &TimeGrid<T>,
    _count: usize,
    _seed: u64,
) -> Result<Vec<ClassicalPath<T>>> {
    let times = grid.times();
    let half = config.gamma_s * T::lit(0.5);
    match model {
        SourceModel::FreeDecayMixture { initial } => initial
            .iter()
            .map(|&(alpha0, w)| {
                let alphas = times.iter().map(|&t| alpha0 * re((-half * (t - grid.t0)).exp())).collect();
                ClassicalPath::new(times.clone(), alphas, w)
            })
            .collect(),
        SourceModel::CoherentDrive { epsilon, initial_amplitude } => {
            // dα/dt = ε − (γ_S/2)α.
            let alphas = times
                .iter()
                .map(|&t| {
                    let decay = (-half * (t - grid.t0)).exp();
                    if half == T::zero() {
                        *initial_amplitude + *epsilon * re(t - grid.t0)
                    } else {
                        let ss = *epsilon / re(half);
                        ss + (*initial_amplitude - ss) * re(decay)
                    }
                })
                .collect();
            Ok(vec![ClassicalPath::new(times, alphas, T::one())?])
        }
        SourceModel::BirthDeathLaser(_) => {
            Err(Error::UnsupportedVariant { model: "birth_death_laser", operation: "classical paths" })
        }
    }
}

/// Phase-diffusing decaying ring paths
/// `α_t = r₀ e^{−γ_S t/2} e^{iφ_t}` with `φ₀` uniform on `[0, 2π)` and
/// Brownian increments of variance `2D·dt`. Equal weights.
pub fn ring_paths<T: Real>(r0: T, diffusion: T, gamma_s: T, grid: &TimeGrid<T>, count: usize, seed: u64) -> Result<Vec<ClassicalPath<T>>> {
    ring_paths_with_phase(r0, diffusion, gamma_s, grid, count, seed, None)
}

/// As [`ring_paths`], optionally pinning the initial phase. The random
/// stream draws the initial phase first (when not pinned), then one normal
/// variate per step.
pub fn ring_paths_with_phase<T: Real>(
    r0: T,
    diffusion: T,
    gamma_s: T,
    grid: &TimeGrid<T>,
    count: usize,
    seed: u64,
    initial_phase: Option<T>,
) -> Result<Vec<ClassicalPath<T>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("ring_paths needs count ≥ 1".into()));
    }
    if !(diffusion >= T::zero()) || !(r0 >= T::zero()) {
        return Err(Error::InvalidParameter("ring radius and diffusion must be non-negative".into()));
    }
    let times = grid.times();
    let step_sd = (T::lit(2.0) * diffusion * grid.dt).sqrt().as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = T::one() / T::lit(count as f64);
    let half = gamma_s * T::lit(0.5);
    (0..count)
        .map(|_| {
            let mut phi = match initial_phase {
                Some(p) => p.as_f64(),
                None => rng.random::<f64>() * std::f64::consts::TAU,
            };
            let mut alphas = Vec::with_capacity(times.len());
            for (k, &t) in times.iter().enumerate() {
                if k > 0 {
                    let z: f64 = rng.sample(StandardNormal);
                    phi += step_sd * z;
                }
                let radius = r0 * (-half * (t - grid.t0)).exp();
                alphas.push(cis(T::lit(phi)) * re(radius));
            }
            ClassicalPath::new(times.clone(), alphas, weight)
        })
        .collect()
}
