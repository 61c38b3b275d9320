//! Experiment configuration: one JSON document per run. Missing optional
//! fields take the defaults below; the resolved document is echoed into
//! every run's manifest.

use std::path::{Path, PathBuf};

use cascade_core::evolve::stability_rate;
use cascade_core::hilbert::{qubit_state, FockSpec, Qubit};
use cascade_core::scalar::c;
use cascade_core::sources::BirthDeathParams;
use cascade_core::{CouplingConfig, PureState, SourceModel, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Complex number as `[re, im]`.
pub type Complex = [f64; 2];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub coupling: CouplingSection,
    pub source: SourceSection,
    #[serde(default)]
    pub target_initial: TargetInitial,
    pub grid: GridSection,
    pub n_max: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trajectories: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub gamma_s: f64,
    pub gamma_tf: f64,
    pub gamma_ts: f64,
    #[serde(default)]
    pub delta: f64,
}

impl Default for CouplingSection {
    fn default() -> Self {
        let d = CouplingConfig::<f64>::default();
        Self { gamma_s: d.gamma_s, gamma_tf: d.gamma_tf, gamma_ts: d.gamma_ts, delta: d.delta }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSection {
    CoherentDrive {
        epsilon: Complex,
        #[serde(default)]
        initial_amplitude: Complex,
    },
    FreeDecayMixture {
        initial: Vec<MixtureMember>,
    },
    BirthDeathLaser {
        #[serde(default = "default_pump")]
        pump_rate: f64,
        #[serde(default = "default_gain")]
        gain_per_carrier: f64,
        #[serde(default = "default_nonlasing")]
        nonlasing_rate: f64,
        #[serde(default = "default_carriers")]
        carriers0: u64,
        #[serde(default = "default_photons")]
        photons0: usize,
    },
}

fn default_pump() -> f64 {
    BirthDeathParams::default().pump_rate
}
fn default_gain() -> f64 {
    BirthDeathParams::default().gain_per_carrier
}
fn default_nonlasing() -> f64 {
    BirthDeathParams::default().nonlasing_rate
}
fn default_carriers() -> u64 {
    BirthDeathParams::default().carriers0
}
fn default_photons() -> usize {
    BirthDeathParams::default().photons0
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MixtureMember {
    pub alpha: Complex,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TargetInitial {
    #[default]
    Ground,
    Excited,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    #[serde(default = "one")]
    pub sample_every: usize,
}

/// A configuration converted to core types and checked against every
/// module precondition.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub coupling: CouplingConfig<f64>,
    pub model: SourceModel<f64>,
    pub spec: FockSpec,
    pub grid: TimeGrid<f64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills defaults and validates. Relative output directories resolve
    /// against the current directory.
    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        let invalid = |e: cascade_core::Error| CliError::Config(e.to_string());
        let cs = self.coupling;
        let coupling = CouplingConfig::new(cs.gamma_s, cs.gamma_tf, cs.gamma_ts, cs.delta).map_err(invalid)?;
        let model = self.source.to_model();
        model.validate().map_err(invalid)?;
        let spec = FockSpec::new(self.n_max).map_err(invalid)?;
        if self.grid.sample_every == 0 {
            return Err(CliError::Config("grid.sample_every must be at least 1".into()));
        }
        let grid = TimeGrid::new(self.grid.t0, self.grid.t1, self.grid.dt)
            .map_err(invalid)?
            .with_sample_every(self.grid.sample_every);
        grid.check_stability(stability_rate(&coupling, &model)).map_err(invalid)?;
        if self.trajectories == 0 {
            return Err(CliError::Config("trajectories must be at least 1".into()));
        }
        if let SourceSection::BirthDeathLaser { photons0, .. } = self.source {
            if photons0 > self.n_max {
                return Err(CliError::Config(format!("photons0 = {photons0} exceeds n_max = {}", self.n_max)));
            }
        }
        let output_dir = self.output_dir.clone().unwrap_or_else(|| PathBuf::from("output").join(&self.scenario));
        self.output_dir = Some(output_dir.clone());
        Ok(Resolved { config: self, coupling, model, spec, grid, output_dir })
    }
}

impl SourceSection {
    pub fn to_model(&self) -> SourceModel<f64> {
        match self {
            SourceSection::CoherentDrive { epsilon, initial_amplitude } => SourceModel::CoherentDrive {
                epsilon: c(epsilon[0], epsilon[1]),
                initial_amplitude: c(initial_amplitude[0], initial_amplitude[1]),
            },
            SourceSection::FreeDecayMixture { initial } => SourceModel::FreeDecayMixture {
                initial: initial.iter().map(|m| (c(m.alpha[0], m.alpha[1]), m.weight)).collect(),
            },
            SourceSection::BirthDeathLaser { pump_rate, gain_per_carrier, nonlasing_rate, carriers0, photons0 } => {
                SourceModel::BirthDeathLaser(BirthDeathParams {
                    pump_rate: *pump_rate,
                    gain_per_carrier: *gain_per_carrier,
                    nonlasing_rate: *nonlasing_rate,
                    carriers0: *carriers0,
                    photons0: *photons0,
                })
            }
        }
    }
}

impl TargetInitial {
    pub fn state(&self) -> PureState<f64> {
        match self {
            TargetInitial::Ground => qubit_state(Qubit::Ground),
            TargetInitial::Excited => qubit_state(Qubit::Excited),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "t",
        "source": {"model": "free_decay_mixture", "initial": [{"alpha": [1.0, 0.0], "weight": 1.0}]},
        "grid": {"t1": 1.0, "dt": 0.01},
        "n_max": 8
    }"#;

    #[test]
    fn defaults_are_filled() {
        let cfg: ExperimentConfig = serde_json::from_str(MINIMAL).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.config.coupling, CouplingSection::default());
        assert_eq!(r.config.trajectories, 1);
        assert_eq!(r.config.grid.sample_every, 1);
        assert_eq!(r.config.output_dir, Some(PathBuf::from("output/t")));
        assert_eq!(r.grid.steps(), 100);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = serde_json::from_str::<ExperimentConfig>("{\n  \"scenario\": \"x\",\n  \"n_max\": oops\n}").unwrap_err();
        assert_eq!(err.line(), 3);
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(&MINIMAL.replace("\"n_max\"", "\"nmax\"")).is_err());
        let bad_dt: ExperimentConfig = serde_json::from_str(&MINIMAL.replace("0.01", "0.3")).unwrap();
        assert!(matches!(bad_dt.resolve(), Err(CliError::Config(_))));
        let unstable: ExperimentConfig = serde_json::from_str(&MINIMAL.replace("0.01", "0.1")).unwrap();
        assert!(matches!(unstable.resolve(), Err(CliError::Config(_))));
    }
}
