use std::path::{Path, PathBuf};

use cascade_core::analysis::{out_of_span_amplitude, schmidt_entropy, support_pattern_check};
use cascade_core::evolve::{evolve_master, mixture_member, ChannelLabel, EnsembleAccumulator, StepView, Unraveling};
use cascade_core::hilbert::{coherent_state, fock_state};
use cascade_core::liouvillian::{ladder_operators, regroup};
use cascade_core::sources::build_l_s;
use cascade_core::verification::{self, Bound, Verdict};
use cascade_core::{DensityOperator, Operator, PureState, SourceModel};
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Resolved, TargetInitial};
use crate::error::CliError;
use crate::output::{num, write_json, write_state, StateDump, Table};

/// Off-ladder entries below this magnitude count as absent in trajectory
/// output.
pub const LADDER_TOLERANCE: f64 = 1e-10;

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'a str,
    version: &'a str,
    command: &'a str,
    config: &'a ExperimentConfig,
    outputs: Vec<String>,
}

fn write_manifest(r: &Resolved, command: &str, outputs: Vec<String>) -> Result<(), CliError> {
    let manifest = Manifest { program: "cascade", version: env!("CARGO_PKG_VERSION"), command, config: &r.config, outputs };
    write_json(&r.output_dir.join("manifest.json"), &manifest)
}

struct Observables {
    number: Operator<f64>,
    excitation: Operator<f64>,
    a: Operator<f64>,
    b: Operator<f64>,
}

impl Observables {
    fn new(r: &Resolved) -> Self {
        let (a, b) = ladder_operators::<f64>(r.spec);
        Self { number: &a.adjoint() * &a, excitation: &b.adjoint() * &b, a, b }
    }

    const HEADER: [&'static str; 8] = ["time", "photon_number", "excitation", "a_re", "a_im", "b_re", "b_im", "purity"];

    fn row(&self, t: f64, rho: &DensityOperator<f64>) -> Result<Vec<String>, CliError> {
        let a = rho.expectation(&self.a)?;
        let b = rho.expectation(&self.b)?;
        Ok(vec![
            num(t),
            num(rho.expectation(&self.number)?.re),
            num(rho.expectation(&self.excitation)?.re),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num(rho.purity()),
        ])
    }
}

pub fn run_master(config_path: &Path) -> Result<(), CliError> {
    let r = ExperimentConfig::load(config_path)?.resolve()?;
    let l_s = build_l_s(&r.model, r.spec).map_err(|e| CliError::Config(e.to_string()))?;
    let generator = regroup(&l_s, &r.coupling, r.spec)?.total();
    let source = r.model.initial_source_state(r.spec)?;
    let rho0 = DensityOperator::tensor(&source, &r.config.target_initial.state().projector())?;
    info!("run-master `{}`: dim {}, {} steps", r.config.scenario, r.spec.dim(), r.grid.steps());
    let solution = evolve_master(&rho0, &generator, &r.grid)?;

    let obs = Observables::new(&r);
    let mut table = Table::new(&Observables::HEADER)?;
    for (t, rho) in solution.times.iter().zip(&solution.states) {
        table.row(obs.row(*t, rho)?)?;
    }
    table.save(&r.output_dir.join("observables.csv"))?;
    let (t_end, rho_end) = (solution.times.last().copied().unwrap_or(r.grid.t0), solution.states.last().unwrap_or(&rho0));
    write_state(&r.output_dir.join("final_state.json"), &StateDump::density(t_end, r.spec.n_max(), rho_end.matrix()))?;
    write_manifest(&r, "run-master", vec!["observables.csv".into(), "final_state.json".into()])?;
    println!("wrote {}", r.output_dir.display());
    Ok(())
}

fn initial_state(r: &Resolved, seed: u64) -> Result<PureState<f64>, CliError> {
    let target = r.config.target_initial.state();
    let source = match &r.model {
        SourceModel::CoherentDrive { initial_amplitude, .. } => coherent_state(*initial_amplitude, r.spec),
        SourceModel::FreeDecayMixture { initial } => {
            let weights: Vec<f64> = initial.iter().map(|m| m.1).collect();
            coherent_state(initial[mixture_member(&weights, seed)].0, r.spec)
        }
        SourceModel::BirthDeathLaser(p) => fock_state(p.photons0, r.spec)?,
    };
    Ok(PureState::product(&source, &target))
}

/// Per-sample trajectory diagnostics.
struct SeriesRow {
    time: f64,
    photon_number: f64,
    excitation: f64,
    entropy: f64,
    carriers: Option<u64>,
    out_of_span: Option<f64>,
}

pub fn run_trajectories(config_path: &Path) -> Result<(), CliError> {
    let r = ExperimentConfig::load(config_path)?.resolve()?;
    let unraveling = Unraveling::new(&r.coupling, &r.model, r.spec)?;
    let obs = Observables::new(&r);
    let ladder_start = match &r.model {
        SourceModel::BirthDeathLaser(p) => Some(p.photons0 + usize::from(r.config.target_initial == TargetInitial::Excited)),
        _ => None,
    };
    info!("run-trajectories `{}`: {} trajectories of {} steps", r.config.scenario, r.config.trajectories, r.grid.steps());

    let runs = (0..r.config.trajectories)
        .into_par_iter()
        .map(|k| {
            let seed = r.config.seed + k as u64;
            let psi0 = initial_state(&r, seed)?;
            let mut rows = Vec::new();
            let mut failure = None;
            let observer = |v: &StepView<'_, f64>| {
                if !r.grid.is_sample(v.step) || failure.is_some() {
                    return;
                }
                let out_of_span = ladder_start.map(|n0| {
                    let rec = v.record;
                    let n = n0 as i64 + rec.count(ChannelLabel::Gain) as i64
                        - rec.count(ChannelLabel::ForwardF) as i64
                        - rec.count(ChannelLabel::SideS) as i64;
                    if n < 0 {
                        Ok(1.0)
                    } else {
                        out_of_span_amplitude(v.state, n as usize)
                    }
                });
                let row = (|| {
                    Ok::<_, cascade_core::Error>(SeriesRow {
                        time: v.time,
                        photon_number: v.state.expectation(&obs.number).re,
                        excitation: v.state.expectation(&obs.excitation).re,
                        entropy: schmidt_entropy(v.state)?,
                        carriers: v.carriers,
                        out_of_span: out_of_span.transpose()?,
                    })
                })();
                match row {
                    Ok(row) => rows.push(row),
                    Err(e) => failure = Some(e),
                }
            };
            let result = unraveling.run_observed(&psi0, &r.grid, seed, observer)?;
            if let Some(e) = failure {
                return Err(CliError::from(e));
            }
            Ok((result, rows))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut outputs = Vec::new();
    let mut acc = EnsembleAccumulator::new();
    for (k, (result, rows)) in runs.iter().enumerate() {
        let name = format!("records/record_{k:04}.csv");
        let mut record = Table::new(&["time", "channel"])?;
        for e in &result.record.events {
            record.row([num(e.time), e.label.as_str().to_string()])?;
        }
        record.save(&r.output_dir.join(&name))?;
        outputs.push(name);

        let name = format!("series/trajectory_{k:04}.csv");
        let mut header = vec!["time", "photon_number", "excitation", "schmidt_entropy"];
        if ladder_start.is_some() {
            header.extend(["carriers", "out_of_span", "ladder_ok"]);
        }
        let mut series = Table::new(&header)?;
        for row in rows {
            let mut fields = vec![num(row.time), num(row.photon_number), num(row.excitation), num(row.entropy)];
            if let Some(x) = row.out_of_span {
                fields.push(row.carriers.unwrap_or(0).to_string());
                fields.push(num(x));
                fields.push(u8::from(x < LADDER_TOLERANCE).to_string());
            }
            series.row(fields)?;
        }
        series.save(&r.output_dir.join(&name))?;
        outputs.push(name);
        acc.add(result)?;
    }

    let averaged = acc.finish()?;
    let mut header = Observables::HEADER.to_vec();
    header.push("off_ladder_max");
    let mut table = Table::new(&header)?;
    for (t, rho) in acc.times().iter().zip(&averaged) {
        let mut row = obs.row(*t, rho)?;
        row.push(num(support_pattern_check(rho, LADDER_TOLERANCE).max_violation));
        table.row(row)?;
    }
    table.save(&r.output_dir.join("ensemble.csv"))?;
    outputs.push("ensemble.csv".into());
    let t_end = acc.times().last().copied().unwrap_or(r.grid.t0);
    let last = averaged.last().expect("at least the initial sample");
    write_state(&r.output_dir.join("ensemble_final_state.json"), &StateDump::density(t_end, r.spec.n_max(), last.matrix()))?;
    outputs.push("ensemble_final_state.json".into());
    write_manifest(&r, "run-trajectories", outputs)?;
    println!("wrote {} ({} trajectories)", r.output_dir.display(), runs.len());
    Ok(())
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    measured: f64,
    tolerance: f64,
    bound: &'a str,
    diagnostic: bool,
    pass: bool,
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    id: &'a str,
    summary: &'a str,
    pass: bool,
    error: Option<&'a str>,
    checks: Vec<CheckRecord<'a>>,
}

#[derive(Serialize)]
struct VerdictFile<'a> {
    suite: &'a str,
    pass: bool,
    criteria: Vec<VerdictRecord<'a>>,
}

fn record(v: &Verdict) -> VerdictRecord<'_> {
    VerdictRecord {
        id: v.criterion.id(),
        summary: v.criterion.summary(),
        pass: v.pass(),
        error: v.error.as_deref(),
        checks: v
            .checks
            .iter()
            .map(|c| CheckRecord {
                name: &c.name,
                measured: c.measured,
                tolerance: c.tolerance,
                bound: match c.bound {
                    Bound::Below => "below",
                    Bound::AtLeast => "at_least",
                },
                diagnostic: c.diagnostic,
                pass: c.pass(),
            })
            .collect(),
    }
}

pub fn verify(suite: &str, out: &Path) -> Result<(), CliError> {
    let criteria = verification::select(suite)
        .ok_or_else(|| CliError::Config(format!("unknown suite `{suite}`; expected `all` or A1..A9")))?;
    let mut verdicts = Vec::new();
    println!("{:<4} {:<6} {:<58} {:>12} {:>12}", "id", "result", "check", "measured", "tolerance");
    for c in criteria {
        let v = c.run();
        let status = if v.pass() { "PASS" } else { "FAIL" };
        if let Some(e) = &v.error {
            println!("{:<4} {:<6} error: {e}", c.id(), status);
        }
        for k in &v.checks {
            let op = match k.bound {
                Bound::Below => "<",
                Bound::AtLeast => ">=",
            };
            let name = if k.diagnostic { format!("{} (diagnostic)", k.name) } else { k.name.clone() };
            println!("{:<4} {:<6} {:<58} {:>12.3e} {op:>2}{:>10.1e}", c.id(), status, name, k.measured, k.tolerance);
        }
        verdicts.push(v);
    }
    let pass = verdicts.iter().all(Verdict::pass);
    let file = VerdictFile { suite, pass, criteria: verdicts.iter().map(record).collect() };
    let path: PathBuf = out.join("verdicts.json");
    write_json(&path, &file)?;
    println!("wrote {}", path.display());
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass()).map(|v| v.criterion.id()).collect();
        Err(CliError::Verify(format!("failing criteria: {}", failed.join(", "))))
    }
}
