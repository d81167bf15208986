//! Experiment configuration: a sectioned key-value (TOML) document.
//!
//! ```toml
//! experiment = "exact_vs_first_order"  # weak_value | intensity_sweep |
//!                                      # exact_vs_first_order | ion_protocol | estimate
//! [qubit]                              # α|g⟩ + β|e⟩
//! alpha_re = 0.7071067811865476
//! beta_im = 0.7071067811865476         # omitted components default to 0
//!
//! [postselect]                         # weak_value only
//! alpha_re = 1.0
//! operator = "sigma_x"                 # sigma_x | sigma_y | sigma_z
//!
//! [pointer]
//! n_max = 16
//! amps = [[0, 0.6, 0.0], [1, 0.8, 0.0]]  # (n, c_re, c_im)
//! m = 1                                # observed Fock level
//!
//! [coupling]                           # g, or g0 and t, or all three consistently
//! g = 0.01
//!
//! [sweep]
//! param = "g"                          # g | delta (delta: ion_protocol, full_jc)
//! start = 0.0
//! stop = 0.1
//! points = 11
//! scale = "linear"                     # linear | log
//!
//! [ion]
//! mode = "full_jc"                     # effective | full_jc
//! omega0 = 1.0
//! delta = 40.0
//! omega_s = 1.0
//! theta = -1.5707963267948966
//! omega_r = 1.0
//!
//! [sampling]
//! shots = 1000000
//! seed = 42
//!
//! [output]
//! path = "out.csv"
//! format = "csv"                       # csv | json
//! ```
//!
//! Angles are radians and frequencies angular frequencies (ħ = 1). State
//! amplitudes are renormalized; a norm further than [`CONFIG_NORM_TOL`] from 1
//! is rejected.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::hilbert::{
    sigma_x, sigma_y, sigma_z, DenseOperator, FockPointerState, QubitState, C64, DEFAULT_N_MAX,
};
use crate::weak_value::CouplingSpec;
use crate::{ConfigError, Error, Result};

/// Accepted deviation of configured state norms from 1 before renormalization.
pub const CONFIG_NORM_TOL: f64 = 1e-6;
/// Accepted `|g − g₀t|` when all three coupling keys are given.
pub const COUPLING_CONSISTENCY_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    WeakValue,
    IntensitySweep,
    ExactVsFirstOrder,
    IonProtocol,
    Estimate,
}

impl ExperimentKind {
    const NAMES: [(&'static str, ExperimentKind); 5] = [
        ("weak_value", ExperimentKind::WeakValue),
        ("intensity_sweep", ExperimentKind::IntensitySweep),
        ("exact_vs_first_order", ExperimentKind::ExactVsFirstOrder),
        ("ion_protocol", ExperimentKind::IonProtocol),
        ("estimate", ExperimentKind::Estimate),
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES
            .iter()
            .find(|(_, k)| *k == self)
            .map(|(n, _)| *n)
            .unwrap_or("?")
    }

    fn requirements(self) -> &'static str {
        match self {
            ExperimentKind::WeakValue => "[qubit] and [postselect]",
            ExperimentKind::IntensitySweep | ExperimentKind::ExactVsFirstOrder => {
                "[qubit], [pointer] and [coupling] or a g [sweep]"
            }
            ExperimentKind::IonProtocol => {
                "[qubit], [pointer], [ion] and [coupling] or a g [sweep]"
            }
            ExperimentKind::Estimate => {
                "[qubit], [pointer], [sampling] and [coupling] or a g [sweep]"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitConfig {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
}

impl QubitConfig {
    pub fn state(&self) -> Result<QubitState> {
        QubitState::normalize(
            C64::new(self.alpha_re, self.alpha_im),
            C64::new(self.beta_re, self.beta_im),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    SigmaX,
    SigmaY,
    SigmaZ,
}

impl OperatorKind {
    pub fn matrix(self) -> DenseOperator {
        match self {
            OperatorKind::SigmaX => sigma_x(),
            OperatorKind::SigmaY => sigma_y(),
            OperatorKind::SigmaZ => sigma_z(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostselectConfig {
    pub state: QubitConfig,
    pub operator: OperatorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerAmp {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerConfig {
    pub n_max: usize,
    pub amps: Vec<PointerAmp>,
    pub m: usize,
}

impl PointerConfig {
    pub fn state(&self) -> Result<FockPointerState> {
        let mut amps = vec![C64::new(0.0, 0.0); self.n_max + 1];
        for a in &self.amps {
            let slot = amps.get_mut(a.n).ok_or(Error::IndexOutOfRange {
                index: a.n,
                len: self.n_max + 1,
            })?;
            *slot += C64::new(a.re, a.im);
        }
        FockPointerState::normalize(amps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub g: Option<f64>,
    pub g0: Option<f64>,
    pub t: Option<f64>,
}

impl CouplingConfig {
    pub fn spec(&self) -> Result<CouplingSpec> {
        match (self.g, self.g0, self.t) {
            (_, Some(g0), Some(t)) => CouplingSpec::from_rate(g0, t),
            (Some(g), _, _) => CouplingSpec::from_g(g),
            _ => Err(Error::Precondition(
                "coupling needs g or both g0 and t".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    G,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: SweepScale,
}

impl SweepConfig {
    /// Grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let f = k as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.start + f * (self.stop - self.start),
                    SweepScale::Log => {
                        (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IonMode {
    Effective,
    FullJc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonConfig {
    pub mode: IonMode,
    pub omega0: Option<f64>,
    pub delta: Option<f64>,
    pub omega_s: f64,
    pub theta: f64,
    pub omega_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: OutputFormat,
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub qubit: QubitConfig,
    pub postselect: Option<PostselectConfig>,
    pub pointer: Option<PointerConfig>,
    pub coupling: Option<CouplingConfig>,
    pub sweep: Option<SweepConfig>,
    pub ion: Option<IonConfig>,
    pub sampling: Option<SamplingConfig>,
    pub output: OutputConfig,
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "experiment",
    "qubit",
    "postselect",
    "pointer",
    "coupling",
    "sweep",
    "ion",
    "sampling",
    "output",
];
const QUBIT_KEYS: &[&str] = &["alpha_re", "alpha_im", "beta_re", "beta_im"];
const POSTSELECT_KEYS: &[&str] = &["alpha_re", "alpha_im", "beta_re", "beta_im", "operator"];
const POINTER_KEYS: &[&str] = &["n_max", "amps", "m"];
const COUPLING_KEYS: &[&str] = &["g", "g0", "t"];
const SWEEP_KEYS: &[&str] = &["param", "start", "stop", "points", "scale"];
const ION_KEYS: &[&str] = &["mode", "omega0", "delta", "omega_s", "theta", "omega_r"];
const SAMPLING_KEYS: &[&str] = &["shots", "seed"];
const OUTPUT_KEYS: &[&str] = &["path", "format"];

/// Collects every problem instead of stopping at the first one.
struct Validator {
    errors: Vec<ConfigError>,
}

impl Validator {
    fn error(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError::new(key, message));
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str, allowed: &[&str]) -> Option<&'a Table> {
        match root.get(name)? {
            Value::Table(t) => {
                for key in t.keys() {
                    if !allowed.contains(&key.as_str()) {
                        self.error(format!("{name}.{key}"), "unknown key");
                    }
                }
                Some(t)
            }
            _ => {
                self.error(name, "expected a [section]");
                None
            }
        }
    }

    fn float(&mut self, t: &Table, section: &str, key: &str) -> Option<f64> {
        let v = match t.get(key)? {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => {
                self.error(format!("{section}.{key}"), "expected a number");
                return None;
            }
        };
        if !v.is_finite() {
            self.error(format!("{section}.{key}"), "must be finite");
            return None;
        }
        Some(v)
    }

    fn unsigned(&mut self, t: &Table, section: &str, key: &str) -> Option<u64> {
        match t.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            _ => {
                self.error(format!("{section}.{key}"), "expected a nonnegative integer");
                None
            }
        }
    }

    fn string<'a>(&mut self, t: &'a Table, section: &str, key: &str) -> Option<&'a str> {
        match t.get(key)? {
            Value::String(s) => Some(s.as_str()),
            _ => {
                self.error(format!("{section}.{key}"), "expected a string");
                None
            }
        }
    }

    fn choice<T: Copy>(
        &mut self,
        t: &Table,
        section: &str,
        key: &str,
        options: &[(&str, T)],
    ) -> Option<T> {
        let s = self.string(t, section, key)?;
        match options.iter().find(|(name, _)| *name == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
                self.error(
                    format!("{section}.{key}"),
                    format!("unknown value `{s}` (expected one of {})", names.join(", ")),
                );
                None
            }
        }
    }

    fn qubit_amplitudes(&mut self, t: &Table, section: &str) -> QubitConfig {
        let mut get = |k| self.float(t, section, k).unwrap_or(0.0);
        let q = QubitConfig {
            alpha_re: get("alpha_re"),
            alpha_im: get("alpha_im"),
            beta_re: get("beta_re"),
            beta_im: get("beta_im"),
        };
        let norm =
            (q.alpha_re.powi(2) + q.alpha_im.powi(2) + q.beta_re.powi(2) + q.beta_im.powi(2))
                .sqrt();
        if (norm - 1.0).abs() > CONFIG_NORM_TOL {
            self.error(
                section,
                format!("amplitudes must be normalized, norm = {norm}"),
            );
        }
        q
    }

    fn pointer(&mut self, t: &Table) -> Option<PointerConfig> {
        let n_max = self
            .unsigned(t, "pointer", "n_max")
            .unwrap_or(DEFAULT_N_MAX as u64) as usize;
        let m = self.unsigned(t, "pointer", "m").unwrap_or(1) as usize;
        if m > n_max {
            self.error("pointer.m", format!("must not exceed n_max = {n_max}"));
        }
        let Some(raw) = t.get("amps") else {
            self.error(
                "pointer.amps",
                "missing; expected a list of [n, c_re, c_im]",
            );
            return None;
        };
        let Value::Array(entries) = raw else {
            self.error("pointer.amps", "expected a list of [n, c_re, c_im]");
            return None;
        };
        let mut amps = Vec::with_capacity(entries.len());
        for (k, entry) in entries.iter().enumerate() {
            let key = format!("pointer.amps[{k}]");
            let parsed = match entry {
                Value::Array(items) if items.len() == 2 || items.len() == 3 => {
                    let n = match &items[0] {
                        Value::Integer(i) if *i >= 0 => Some(*i as usize),
                        _ => None,
                    };
                    let num = |v: &Value| match v {
                        Value::Float(f) if f.is_finite() => Some(*f),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    };
                    let re = num(&items[1]);
                    let im = items.get(2).map_or(Some(0.0), num);
                    n.zip(re)
                        .zip(im)
                        .map(|((n, re), im)| PointerAmp { n, re, im })
                }
                _ => None,
            };
            match parsed {
                Some(a) if a.n > n_max => {
                    self.error(key, format!("level {} exceeds n_max = {n_max}", a.n))
                }
                Some(a) => amps.push(a),
                None => self.error(key, "expected [n, c_re, c_im] with integer n >= 0"),
            }
        }
        let norm = amps
            .iter()
            .map(|a| a.re * a.re + a.im * a.im)
            .sum::<f64>()
            .sqrt();
        if amps.len() == entries.len() && (norm - 1.0).abs() > CONFIG_NORM_TOL {
            self.error(
                "pointer.amps",
                format!("amplitudes must be normalized, norm = {norm}"),
            );
        }
        Some(PointerConfig { n_max, amps, m })
    }
}

/// Parses and validates a configuration document, reporting all problems.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let root: Table = toml::from_str(text).map_err(|e| {
        Error::Config(vec![ConfigError::new(
            "<document>",
            e.to_string().trim().replace('\n', " "),
        )])
    })?;
    let mut v = Validator { errors: Vec::new() };
    for key in root.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            v.error(key.clone(), "unknown key");
        }
    }

    let experiment = match root.get("experiment") {
        None => {
            v.error("experiment", "missing required key");
            None
        }
        Some(_) => v.choice(&root, "<root>", "experiment", &ExperimentKind::NAMES),
    };
    // Report choice errors under the bare key name.
    for e in &mut v.errors {
        if e.key == "<root>.experiment" {
            e.key = "experiment".into();
        }
    }

    let qubit = v
        .section(&root, "qubit", QUBIT_KEYS)
        .map(|t| v.qubit_amplitudes(t, "qubit"));

    let postselect = v.section(&root, "postselect", POSTSELECT_KEYS).map(|t| {
        let state = v.qubit_amplitudes(t, "postselect");
        let operator = if t.contains_key("operator") {
            v.choice(
                t,
                "postselect",
                "operator",
                &[
                    ("sigma_x", OperatorKind::SigmaX),
                    ("sigma_y", OperatorKind::SigmaY),
                    ("sigma_z", OperatorKind::SigmaZ),
                ],
            )
            .unwrap_or(OperatorKind::SigmaX)
        } else {
            OperatorKind::SigmaX
        };
        PostselectConfig { state, operator }
    });

    let pointer = v
        .section(&root, "pointer", POINTER_KEYS)
        .and_then(|t| v.pointer(t));

    let coupling = v.section(&root, "coupling", COUPLING_KEYS).map(|t| {
        let c = CouplingConfig {
            g: v.float(t, "coupling", "g"),
            g0: v.float(t, "coupling", "g0"),
            t: v.float(t, "coupling", "t"),
        };
        match (c.g, c.g0, c.t) {
            (None, None, None) => v.error("coupling", "needs g or both g0 and t"),
            (_, Some(_), None) => v.error("coupling.t", "g0 given without t"),
            (_, None, Some(_)) => v.error("coupling.g0", "t given without g0"),
            (Some(g), Some(g0), Some(t)) if (g - g0 * t).abs() > COUPLING_CONSISTENCY_TOL => v
                .error(
                    "coupling",
                    format!("inconsistent: g = {g} but g0 * t = {}", g0 * t),
                ),
            _ => {}
        }
        if let Some(g) = c.g {
            if g < 0.0 {
                v.error("coupling.g", "must be >= 0");
            }
        }
        if let Some(t) = c.t {
            if t < 0.0 {
                v.error("coupling.t", "must be >= 0");
            }
        }
        if let (Some(g0), Some(t)) = (c.g0, c.t) {
            if g0 * t < 0.0 {
                v.error("coupling", "g0 * t must be >= 0");
            }
        }
        c
    });

    let sweep = v.section(&root, "sweep", SWEEP_KEYS).and_then(|t| {
        let param = match t.get("param") {
            None => {
                v.error("sweep.param", "missing required key");
                None
            }
            Some(_) => v.choice(
                t,
                "sweep",
                "param",
                &[("g", SweepParam::G), ("delta", SweepParam::Delta)],
            ),
        };
        let start = v.float(t, "sweep", "start");
        let stop = v.float(t, "sweep", "stop");
        if start.is_none() && !t.contains_key("start") {
            v.error("sweep.start", "missing required key");
        }
        if stop.is_none() && !t.contains_key("stop") {
            v.error("sweep.stop", "missing required key");
        }
        let points = match v.unsigned(t, "sweep", "points") {
            Some(p) if p >= 2 => Some(p as usize),
            Some(_) => {
                v.error("sweep.points", "points ≥ 2 required");
                None
            }
            None => {
                if !t.contains_key("points") {
                    v.error("sweep.points", "missing required key");
                }
                None
            }
        };
        let scale = if t.contains_key("scale") {
            v.choice(
                t,
                "sweep",
                "scale",
                &[("linear", SweepScale::Linear), ("log", SweepScale::Log)],
            )
        } else {
            Some(SweepScale::Linear)
        };
        let (param, start, stop, points, scale) = (param?, start?, stop?, points?, scale?);
        if scale == SweepScale::Log && (start <= 0.0 || stop <= 0.0) {
            v.error("sweep", "log scale needs start > 0 and stop > 0");
        }
        if param == SweepParam::G && (start < 0.0 || stop < 0.0) {
            v.error("sweep", "g must be >= 0 over the whole sweep");
        }
        if param == SweepParam::Delta && (start <= 0.0 || stop <= 0.0) {
            v.error("sweep", "delta must be > 0 over the whole sweep");
        }
        Some(SweepConfig {
            param,
            start,
            stop,
            points,
            scale,
        })
    });

    let ion = v.section(&root, "ion", ION_KEYS).map(|t| {
        let mode = if t.contains_key("mode") {
            v.choice(
                t,
                "ion",
                "mode",
                &[
                    ("effective", IonMode::Effective),
                    ("full_jc", IonMode::FullJc),
                ],
            )
            .unwrap_or(IonMode::Effective)
        } else {
            IonMode::Effective
        };
        let omega0 = v.float(t, "ion", "omega0");
        let delta = v.float(t, "ion", "delta");
        let omega_s = v.float(t, "ion", "omega_s").unwrap_or(1.0);
        let theta = v.float(t, "ion", "theta").unwrap_or(-FRAC_PI_2);
        let omega_r = v.float(t, "ion", "omega_r").unwrap_or(1.0);
        for (key, value) in [
            ("omega0", omega0),
            ("delta", delta),
            ("omega_s", Some(omega_s)),
            ("omega_r", Some(omega_r)),
        ] {
            if let Some(x) = value {
                if x <= 0.0 {
                    v.error(format!("ion.{key}"), "must be > 0");
                }
            }
        }
        IonConfig {
            mode,
            omega0,
            delta,
            omega_s,
            theta,
            omega_r,
        }
    });

    let sampling = v.section(&root, "sampling", SAMPLING_KEYS).map(|t| {
        let shots = v.unsigned(t, "sampling", "shots");
        let seed = v.unsigned(t, "sampling", "seed");
        if shots.is_none() && !t.contains_key("shots") {
            v.error("sampling.shots", "missing required key");
        }
        if shots == Some(0) {
            v.error("sampling.shots", "must be >= 1");
        }
        if seed.is_none() && !t.contains_key("seed") {
            v.error("sampling.seed", "missing required key");
        }
        SamplingConfig {
            shots: shots.unwrap_or(1),
            seed: seed.unwrap_or(0),
        }
    });

    let output = match v.section(&root, "output", OUTPUT_KEYS) {
        Some(t) => {
            let path = v.string(t, "output", "path").map(str::to_owned);
            let format = if t.contains_key("format") {
                v.choice(
                    t,
                    "output",
                    "format",
                    &[("csv", OutputFormat::Csv), ("json", OutputFormat::Json)],
                )
                .unwrap_or(OutputFormat::Csv)
            } else {
                OutputFormat::Csv
            };
            OutputConfig { path, format }
        }
        None => OutputConfig {
            path: None,
            format: OutputFormat::Csv,
        },
    };

    if qubit.is_none() && !root.contains_key("qubit") {
        v.error("qubit", "missing required section");
    }

    if let Some(kind) = experiment {
        check_requirements(
            &mut v,
            kind,
            &Sections {
                postselect: postselect.as_ref(),
                pointer: pointer.as_ref(),
                coupling: coupling.as_ref(),
                sweep: sweep.as_ref(),
                ion: ion.as_ref(),
                sampling: sampling.as_ref(),
                root: &root,
            },
        );
    }

    match (v.errors.is_empty(), experiment, qubit) {
        (true, Some(experiment), Some(qubit)) => Ok(ExperimentConfig {
            experiment,
            qubit,
            postselect,
            pointer,
            coupling,
            sweep,
            ion,
            sampling,
            output,
        }),
        _ => Err(Error::Config(v.errors)),
    }
}

struct Sections<'a> {
    postselect: Option<&'a PostselectConfig>,
    pointer: Option<&'a PointerConfig>,
    coupling: Option<&'a CouplingConfig>,
    sweep: Option<&'a SweepConfig>,
    ion: Option<&'a IonConfig>,
    sampling: Option<&'a SamplingConfig>,
    root: &'a Table,
}

fn check_requirements(v: &mut Validator, kind: ExperimentKind, s: &Sections<'_>) {
    let needs = kind.requirements();
    let missing = |v: &mut Validator, section: &str, present: bool| {
        if !present && !s.root.contains_key(section) {
            v.error(
                section,
                format!(
                    "missing required section; experiment `{}` needs {needs}",
                    kind.name()
                ),
            );
        }
    };
    if kind == ExperimentKind::WeakValue {
        missing(v, "postselect", s.postselect.is_some());
        return;
    }
    missing(v, "pointer", s.pointer.is_some());

    let sweeps_g = s.sweep.is_some_and(|sw| sw.param == SweepParam::G);
    if !sweeps_g {
        missing(v, "coupling", s.coupling.is_some());
    }
    if let Some(sw) = s.sweep {
        if sw.param == SweepParam::Delta {
            let full_jc = s.ion.is_some_and(|ion| ion.mode == IonMode::FullJc);
            if kind != ExperimentKind::IonProtocol || !full_jc {
                v.error(
                    "sweep.param",
                    "delta sweeps need experiment `ion_protocol` with ion.mode = \"full_jc\"",
                );
            }
        }
    }

    match kind {
        ExperimentKind::IonProtocol => {
            missing(v, "ion", s.ion.is_some());
            if let Some(p) = s.pointer {
                if p.amps
                    .iter()
                    .any(|a| a.n > 1 && (a.re != 0.0 || a.im != 0.0))
                {
                    v.error(
                        "pointer.amps",
                        "ion_protocol needs a pointer supported on n = 0, 1",
                    );
                }
                if p.m != 1 {
                    v.error("pointer.m", "ion_protocol reads out m = 1");
                }
            }
            if let Some(ion) = s.ion {
                if ion.mode == IonMode::FullJc {
                    if ion.omega0.is_none() {
                        v.error("ion.omega0", "required for mode = \"full_jc\"");
                    }
                    let sweeps_delta = s.sweep.is_some_and(|sw| sw.param == SweepParam::Delta);
                    if ion.delta.is_none() && !sweeps_delta {
                        v.error("ion.delta", "required for mode = \"full_jc\"");
                    }
                }
            }
        }
        ExperimentKind::Estimate => missing(v, "sampling", s.sampling.is_some()),
        _ => {}
    }
}
