//! Experiment dispatch: one [`ResultTable`] per configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, IonConfig, IonMode, SweepParam};
use crate::estimation::{derive_seed, estimate_g, estimate_g_unconditional, sample_joint_outcomes};
use crate::exact::{evolve_exact, exact_intensity};
use crate::hilbert::{sigma_x, FockPointerState, QubitState};
use crate::ion::{exact_protocol_prediction, IonProtocol, ProtocolMode};
use crate::weak_value::{intensity_first_order, weak_value, PointerOutcome};
use crate::{Error, Result};

/// Build identifier baked in at compile time (`git rev-parse --short HEAD`).
pub const BUILD_ID: &str = env!("WEAKMEAS_BUILD_ID");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    /// The configuration that produced the table, including the seed.
    pub config: ExperimentConfig,
    /// Crate name → version for the engine and the sampling stack.
    pub engine: BTreeMap<String, String>,
    pub build_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: TableMetadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            metadata: TableMetadata {
                config: config.clone(),
                engine: engine_versions(),
                build_id: BUILD_ID.to_owned(),
            },
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) -> Result<()> {
        debug_assert_eq!(row.len(), self.columns.len());
        if let Some(k) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::Precondition(format!(
                "non-finite value {} in column `{}` of row {}",
                row[k],
                self.columns[k],
                self.rows.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Checks that every row has one value per column.
    pub fn is_rectangular(&self) -> bool {
        self.rows.iter().all(|r| r.len() == self.columns.len())
    }
}

fn engine_versions() -> BTreeMap<String, String> {
    [
        ("weakmeas", env!("CARGO_PKG_VERSION")),
        ("rand_chacha", "0.9.0"),
        ("rand_distr", "0.5.1"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v.to_owned()))
    .collect()
}

struct Inputs {
    s0: QubitState,
    phi0: FockPointerState,
    m: usize,
}

fn inputs(cfg: &ExperimentConfig) -> Result<Inputs> {
    let pointer = cfg
        .pointer
        .as_ref()
        .ok_or_else(|| Error::Precondition("experiment needs a [pointer] section".into()))?;
    Ok(Inputs {
        s0: cfg.qubit.state()?,
        phi0: pointer.state()?,
        m: pointer.m,
    })
}

/// Coupling values for the run: the `g` sweep grid, or the single configured `g`.
fn g_values(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    match (&cfg.sweep, &cfg.coupling) {
        (Some(sweep), _) if sweep.param == SweepParam::G => Ok(sweep.values()),
        (_, Some(coupling)) => Ok(vec![coupling.spec()?.g]),
        _ => Err(Error::Precondition(
            "experiment needs [coupling] or a g [sweep]".into(),
        )),
    }
}

/// Runs the configured experiment. Deterministic for a given configuration,
/// including its sampling seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    match cfg.experiment {
        ExperimentKind::WeakValue => run_weak_value(cfg),
        ExperimentKind::IntensitySweep => run_intensity_sweep(cfg),
        ExperimentKind::ExactVsFirstOrder => run_exact_vs_first_order(cfg),
        ExperimentKind::IonProtocol => run_ion_protocol(cfg),
        ExperimentKind::Estimate => run_estimate(cfg),
    }
}

fn run_weak_value(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let post = cfg
        .postselect
        .as_ref()
        .ok_or_else(|| Error::Precondition("weak_value needs a [postselect] section".into()))?;
    let s0 = cfg.qubit.state()?;
    let sf = post.state.state()?;
    let a = post.operator.matrix();
    let mut table = ResultTable::new(
        cfg,
        &[
            "branch",
            "value_re",
            "value_im",
            "overlap_re",
            "overlap_im",
            "overlap_prob",
        ],
    );
    let main = weak_value(&a, &s0, &sf)?;
    table.push(vec![
        0.0,
        main.value.re,
        main.value.im,
        main.overlap.re,
        main.overlap.im,
        main.overlap_prob,
    ])?;
    // The complementary branch is reported only when its weak value exists.
    match weak_value(&a, &s0, &sf.orthogonal()) {
        Ok(comp) => table.push(vec![
            1.0,
            comp.value.re,
            comp.value.im,
            comp.overlap.re,
            comp.overlap.im,
            comp.overlap_prob,
        ])?,
        Err(Error::OrthogonalPostSelection { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(table)
}

fn run_intensity_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let Inputs { s0, phi0, m } = inputs(cfg)?;
    let a = sigma_x();
    let outcome = PointerOutcome::Fock(m);
    let mut table = ResultTable::new(cfg, &["g", "i0", "i_s", "i_comp", "i_g", "i_total"]);
    for g in g_values(cfg)? {
        let r = intensity_first_order(&s0, &phi0, &a, g, &outcome)?;
        table.push(vec![g, r.i0, r.i_s, r.i_comp, r.i_g, r.total])?;
    }
    Ok(table)
}

fn run_exact_vs_first_order(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let Inputs { s0, phi0, m } = inputs(cfg)?;
    let a = sigma_x();
    let outcome = PointerOutcome::Fock(m);
    let mut table = ResultTable::new(
        cfg,
        &[
            "g",
            "I_s_first",
            "I_s_exact",
            "I_comp_first",
            "I_comp_exact",
            "I_total",
            "residual",
        ],
    );
    for g in g_values(cfg)? {
        let first = intensity_first_order(&s0, &phi0, &a, g, &outcome)?;
        let exact = exact_intensity(&s0, &phi0, g, &outcome)?;
        let residual = (exact.i_s - first.i_s)
            .abs()
            .max((exact.i_comp - first.i_comp).abs());
        table.push(vec![
            g,
            first.i_s,
            exact.i_s,
            first.i_comp,
            exact.i_comp,
            exact.total,
            residual,
        ])?;
    }
    Ok(table)
}

fn protocol(ion: &IonConfig, delta: Option<f64>) -> Result<IonProtocol> {
    let mode = match ion.mode {
        IonMode::Effective => ProtocolMode::Effective,
        IonMode::FullJc => ProtocolMode::FullJc {
            omega0: ion
                .omega0
                .ok_or_else(|| Error::Precondition("full_jc needs ion.omega0".into()))?,
            delta: delta
                .or(ion.delta)
                .ok_or_else(|| Error::Precondition("full_jc needs ion.delta".into()))?,
        },
    };
    Ok(IonProtocol {
        mode,
        carrier_rabi: ion.omega_s,
        carrier_phase: ion.theta,
        readout_rabi: ion.omega_r,
    })
}

fn run_ion_protocol(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let Inputs { s0, phi0, .. } = inputs(cfg)?;
    let ion = cfg
        .ion
        .as_ref()
        .ok_or_else(|| Error::Precondition("ion_protocol needs an [ion] section".into()))?;
    let full_jc = ion.mode == IonMode::FullJc;

    // (g, δ) grid: a δ sweep runs at the single configured g.
    let points: Vec<(f64, Option<f64>)> = match &cfg.sweep {
        Some(sweep) if sweep.param == SweepParam::Delta => {
            let g = g_values(cfg)?[0];
            sweep.values().into_iter().map(|d| (g, Some(d))).collect()
        }
        _ => g_values(cfg)?.into_iter().map(|g| (g, ion.delta)).collect(),
    };

    let mut columns = vec!["g"];
    if full_jc {
        columns.push("delta");
    }
    columns.extend([
        "p_readout",
        "p_readout_down",
        "p_readout_up",
        "exact_i1",
        "exact_i1_g",
        "exact_i1_e",
        "max_abs_diff",
        "leakage",
    ]);
    let mut table = ResultTable::new(cfg, &columns);
    for (g, delta) in points {
        let report = protocol(ion, delta)?.run(&s0, &phi0, g)?;
        let exact = exact_protocol_prediction(&s0, &phi0, g)?;
        let mut row = vec![g];
        if full_jc {
            row.push(delta.unwrap_or(f64::NAN));
        }
        row.extend([
            report.p_readout,
            report.p_readout_down,
            report.p_readout_up,
            exact.p_readout,
            exact.p_readout_down,
            exact.p_readout_up,
            report.max_abs_diff(&exact),
            report.leakage,
        ]);
        table.push(row)?;
    }
    Ok(table)
}

fn run_estimate(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let Inputs { s0, phi0, m } = inputs(cfg)?;
    let sampling = cfg
        .sampling
        .ok_or_else(|| Error::Precondition("estimate needs a [sampling] section".into()))?;
    let i_m = phi0.amp(m)?.norm_sqr();
    let mut table = ResultTable::new(
        cfg,
        &[
            "g",
            "task",
            "g_hat",
            "std_error",
            "n_used",
            "g_hat_unconditional",
            "std_error_unconditional",
        ],
    );
    for (task, g) in g_values(cfg)?.into_iter().enumerate() {
        let psi = evolve_exact(&s0, &phi0, g)?;
        let seed = derive_seed(sampling.seed, task as u64);
        let record = sample_joint_outcomes(&psi, sampling.shots, seed)?;
        let post = estimate_g(&record, &s0, m)?;
        let total = estimate_g_unconditional(&record, &s0, i_m, m)?;
        table.push(vec![
            g,
            task as f64,
            post.g_hat,
            post.std_error,
            post.n_used as f64,
            total.g_hat,
            total.std_error,
        ])?;
    }
    Ok(table)
}

/// A short human-readable account of a table.
pub fn summarize(table: &ResultTable) -> String {
    let cfg = &table.metadata.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} row(s) x {} column(s) [build {}]",
        cfg.experiment.name(),
        table.rows.len(),
        table.columns.len(),
        table.metadata.build_id
    );
    if let Some(s) = cfg.sampling {
        let _ = writeln!(out, "  shots = {}, seed = {}", s.shots, s.seed);
    }
    for (k, name) in table.columns.iter().enumerate() {
        let (lo, hi) = table
            .rows
            .iter()
            .map(|r| r[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        if lo <= hi {
            let _ = writeln!(out, "  {name:<24} [{lo:.6e}, {hi:.6e}]");
        }
    }
    out
}
