//! Pulse-level simulation of the two-ion weak measurement.
//!
//! The register is `ion1 ⊗ CM mode ⊗ ion2` with `dims = [2, n_max + 1, 2]`.
//! Internal levels use `|↓⟩` = 0 and `|↑⟩` = 1. Ion 1 carries the measured
//! qubit in the rotated basis
//!
//! ```text
//! |e⟩ = (|↑⟩ + |↓⟩)/√2,   |g⟩ = (|↑⟩ − |↓⟩)/√2,
//! ```
//!
//! in which `τz = |↑⟩⟨↑| − |↓⟩⟨↓|` acts as `σx`. The CM mode is the pointer and
//! ion 2 reads it out.
//!
//! # Phase conventions
//!
//! A red-sideband pulse on ion `k` is
//! `H(t) = Ω (e^{i(δt + φ)} a τ₊ + e^{-i(δt + φ)} a† τ₋)` with the time origin
//! at the start of the pulse. It couples only the pairs
//! `{|↑, n⟩, |↓, n + 1⟩}`; in the frame rotating at `±δ/2` each pair sees the
//! static generator `[[δ/2, Ω√(n+1) e^{iφ}], [Ω√(n+1) e^{-iφ}, −δ/2]]`, which is
//! exponentiated in closed form (generalized Rabi frequency
//! `λ = ½√(δ² + 4Ω²(n+1))`) and rotated back. `|↓, 0⟩` is dark and, in the
//! truncated space, so is `|↑, n_max⟩`. At `δ = 0` a pulse of area `Ωt = π/2`
//! maps `|↑, 0⟩ → −i|↓, 1⟩` and `|1⟩|↓⟩ → −i|0⟩|↑⟩` with no further phase.
//!
//! The carrier pulse on ion 1 is `H = Ω (e^{-iθ} τ₊ + e^{iθ} τ₋)`.
//!
//! Far from resonance the ion-1 sideband acts as
//! `g₀ [a†a τz + |↑⟩⟨↑|]` with `g₀ = Ω²/δ`. The `|↑⟩⟨↑|` Stark term is removed
//! by the frame rotation `exp(+i g₀ t |↑⟩⟨↑|)` ([`stark_compensate`]), after
//! which the evolution is `exp(-i g₀ t a†a τz)` ([`effective_evolve`]).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::exact::{conditional_probability, evolve_exact, fock_probability};
use crate::hilbert::{
    annihilation, identity, op_tensor, sigma_plus, DenseOperator, FockPointerState, JointState,
    QubitOutcome, QubitState, C64, TRUNCATION_TOL,
};
use crate::weak_value::{IntensityReport, Order};
use crate::{Error, Result};

pub const ION1_AXIS: usize = 0;
pub const MODE_AXIS: usize = 1;
pub const ION2_AXIS: usize = 2;

/// Top-level amplitude above which a sideband pulse would be distorted by
/// the Fock cutoff.
pub const TOP_LEVEL_AMP_TOL: f64 = 1e-8;
/// Maximum `|↑_r⟩` population of ion 2 accepted before the readout pulse.
pub const READOUT_PREP_TOL: f64 = 1e-10;
/// Maximum pointer population outside `{|0⟩, |1⟩}` accepted by the protocol.
pub const PROTOCOL_SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IonLevel {
    Down,
    Up,
}

impl IonLevel {
    pub fn index(self) -> usize {
        match self {
            IonLevel::Down => 0,
            IonLevel::Up => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ion {
    First,
    Second,
}

impl Ion {
    pub fn axis(self) -> usize {
        match self {
            Ion::First => ION1_AXIS,
            Ion::Second => ION2_AXIS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    RedSidebandIon1,
    RedSidebandIon2,
    CarrierIon1,
}

/// One laser pulse. Frequencies are angular (ħ = 1), the phase is in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub kind: PulseKind,
    pub rabi: f64,
    pub detuning: f64,
    pub phase: f64,
    pub duration: f64,
}

impl PulseSpec {
    pub fn new(
        kind: PulseKind,
        rabi: f64,
        detuning: f64,
        phase: f64,
        duration: f64,
    ) -> Result<Self> {
        let finite = [rabi, detuning, phase, duration]
            .iter()
            .all(|v| v.is_finite());
        if !finite || rabi < 0.0 || duration < 0.0 {
            return Err(Error::Precondition(format!(
                "pulse needs finite parameters with rabi >= 0 and duration >= 0, \
                 got rabi = {rabi}, detuning = {detuning}, phase = {phase}, duration = {duration}"
            )));
        }
        Ok(Self {
            kind,
            rabi,
            detuning,
            phase,
            duration,
        })
    }

    pub fn red_sideband_ion1(rabi: f64, detuning: f64, duration: f64) -> Result<Self> {
        Self::new(PulseKind::RedSidebandIon1, rabi, detuning, 0.0, duration)
    }

    pub fn red_sideband_ion2(rabi: f64, duration: f64) -> Result<Self> {
        Self::new(PulseKind::RedSidebandIon2, rabi, 0.0, 0.0, duration)
    }

    pub fn carrier_ion1(rabi: f64, phase: f64, duration: f64) -> Result<Self> {
        Self::new(PulseKind::CarrierIon1, rabi, 0.0, phase, duration)
    }

    fn expect(&self, kind: PulseKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Precondition(format!(
                "expected a {kind:?} pulse, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Ion-1 amplitudes `(↓, ↑)` of the qubit state `α|g⟩ + β|e⟩`.
pub fn qubit_to_ion_levels(s0: &QubitState) -> [C64; 2] {
    let (a, b) = (s0.alpha(), s0.beta());
    [(b - a) * FRAC_1_SQRT_2, (a + b) * FRAC_1_SQRT_2]
}

/// Qubit amplitudes `(g, e)` of ion-1 amplitudes `(↓, ↑)`.
pub fn ion_levels_to_qubit(levels: [C64; 2]) -> [C64; 2] {
    let [down, up] = levels;
    [(up - down) * FRAC_1_SQRT_2, (up + down) * FRAC_1_SQRT_2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonRegister {
    state: JointState,
}

impl IonRegister {
    pub fn new(state: JointState) -> Result<Self> {
        match state.dims() {
            [2, levels, 2] if *levels >= 1 => {}
            other => {
                return Err(Error::Precondition(format!(
                    "ion register needs dims [2, n_max + 1, 2], got {other:?}"
                )))
            }
        }
        if !state.is_normalized() {
            return Err(Error::NotNormalized { norm: state.norm() });
        }
        Ok(Self { state })
    }

    /// Product state `ion1 ⊗ φ₀ ⊗ ion2` from `(↓, ↑)` amplitudes.
    pub fn prepare(ion1: [C64; 2], phi0: &FockPointerState, ion2: [C64; 2]) -> Result<Self> {
        let levels = phi0.dim();
        let mut amps = Vec::with_capacity(4 * levels);
        for a in ion1 {
            for c in phi0.amps() {
                for b in ion2 {
                    amps.push(a * c * b);
                }
            }
        }
        Self::new(JointState::new(vec![2, levels, 2], amps)?)
    }

    /// Ion 1 in the qubit state `s0`, the mode in `φ₀`, ion 2 in `|↓_r⟩`.
    pub fn from_qubit(s0: &QubitState, phi0: &FockPointerState) -> Result<Self> {
        Self::prepare(
            qubit_to_ion_levels(s0),
            phi0,
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
    }

    pub fn state(&self) -> &JointState {
        &self.state
    }

    pub fn n_max(&self) -> usize {
        self.state.dims()[MODE_AXIS] - 1
    }

    fn levels(&self) -> usize {
        self.state.dims()[MODE_AXIS]
    }

    fn flat(&self, ion1: usize, n: usize, ion2: usize) -> usize {
        (ion1 * self.levels() + n) * 2 + ion2
    }

    pub fn amp(&self, ion1: IonLevel, n: usize, ion2: IonLevel) -> Result<C64> {
        self.state.amp(&[ion1.index(), n, ion2.index()])
    }

    /// Population of the top Fock level.
    pub fn top_level_population(&self) -> f64 {
        self.state
            .level_population(MODE_AXIS, self.n_max())
            .unwrap_or(0.0)
    }

    fn top_level_max_amp(&self) -> f64 {
        let top = self.n_max();
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| self.state.amps()[self.flat(i, top, j)].norm())
            .fold(0.0, f64::max)
    }

    /// Ion-1 qubit amplitudes `(g, e)` of the pointer level `n` with ion 2 in
    /// `ion2`.
    pub fn qubit_amplitudes(&self, n: usize, ion2: IonLevel) -> Result<[C64; 2]> {
        let down = self.amp(IonLevel::Down, n, ion2)?;
        let up = self.amp(IonLevel::Up, n, ion2)?;
        Ok(ion_levels_to_qubit([down, up]))
    }

    fn with_amps(&self, amps: Vec<C64>) -> Result<Self> {
        Self::new(JointState::new(self.state.dims().to_vec(), amps)?)
    }
}

/// Ideal projective shelving readout of one ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShelvingReadout {
    /// Probability of fluorescence, i.e. of finding the ion in `|↑⟩`.
    pub p_fluoresce: f64,
    pub target: Ion,
}

pub fn shelve(reg: &IonRegister, target: Ion) -> ShelvingReadout {
    ShelvingReadout {
        p_fluoresce: reg
            .state
            .level_population(target.axis(), IonLevel::Up.index())
            .unwrap_or(0.0),
        target,
    }
}

/// Joint probability of the given ion levels (`None` = not measured).
pub fn joint_probability(reg: &IonRegister, ion1: Option<IonLevel>, ion2: Option<IonLevel>) -> f64 {
    let mut constraints = Vec::with_capacity(2);
    if let Some(level) = ion1 {
        constraints.push((ION1_AXIS, level.index()));
    }
    if let Some(level) = ion2 {
        constraints.push((ION2_AXIS, level.index()));
    }
    reg.state.joint_population(&constraints).unwrap_or(0.0)
}

/// Closed-form propagator of one sideband pair in the basis
/// `(|↑, n⟩, |↓, n + 1⟩)`, for pair coupling `coupling = Ω√(n+1)`.
pub fn sideband_pair_propagator(coupling: f64, detuning: f64, phase: f64, t: f64) -> [[C64; 2]; 2] {
    let half = detuning / 2.0;
    let lambda = (half * half + coupling * coupling).sqrt();
    let (sin_lt, cos_lt) = (lambda * t).sin_cos();
    // sin(λt)/λ → t as λ → 0
    let sinc = if lambda == 0.0 { t } else { sin_lt / lambda };
    let off = C64::from_polar(coupling, phase);
    let minus_i = C64::new(0.0, -1.0);
    let rotating = [
        [
            C64::new(cos_lt, 0.0) + minus_i * sinc * half,
            minus_i * sinc * off,
        ],
        [
            minus_i * sinc * off.conj(),
            C64::new(cos_lt, 0.0) - minus_i * sinc * half,
        ],
    ];
    let up_phase = C64::from_polar(1.0, half * t);
    let down_phase = up_phase.conj();
    [
        [up_phase * rotating[0][0], up_phase * rotating[0][1]],
        [down_phase * rotating[1][0], down_phase * rotating[1][1]],
    ]
}

fn apply_sideband(reg: &IonRegister, ion: Ion, pulse: &PulseSpec) -> Result<IonRegister> {
    let mut amps = reg.state.amps().to_vec();
    let n_max = reg.n_max();
    let (up, down) = (IonLevel::Up.index(), IonLevel::Down.index());
    for spectator in 0..2 {
        for n in 0..n_max {
            let (i_up, i_down) = match ion {
                Ion::First => (reg.flat(up, n, spectator), reg.flat(down, n + 1, spectator)),
                Ion::Second => (reg.flat(spectator, n, up), reg.flat(spectator, n + 1, down)),
            };
            let coupling = pulse.rabi * ((n + 1) as f64).sqrt();
            let u = sideband_pair_propagator(coupling, pulse.detuning, pulse.phase, pulse.duration);
            let (a_up, a_down) = (amps[i_up], amps[i_down]);
            amps[i_up] = u[0][0] * a_up + u[0][1] * a_down;
            amps[i_down] = u[1][0] * a_up + u[1][1] * a_down;
        }
    }
    reg.with_amps(amps)
}

/// Red-sideband Hamiltonian on the full register at time `t` (pulse clock),
/// as a dense matrix for oracle propagation.
pub fn red_sideband_hamiltonian(
    n_max: usize,
    ion: Ion,
    rabi: f64,
    detuning: f64,
    phase: f64,
    t: f64,
) -> Result<DenseOperator> {
    let raise = match ion {
        Ion::First => op_tensor(
            &op_tensor(&sigma_plus(), &annihilation(n_max))?,
            &identity(2),
        )?,
        Ion::Second => op_tensor(
            &op_tensor(&identity(2), &annihilation(n_max))?,
            &sigma_plus(),
        )?,
    };
    let forward = raise.scale(C64::from_polar(rabi, detuning * t + phase));
    forward.add(&forward.adjoint())
}

/// Carrier Hamiltonian `Ω (e^{-iθ} τ₊ + e^{iθ} τ₋)` on one ion, in `(↓, ↑)`.
pub fn carrier_hamiltonian(rabi: f64, phase: f64) -> DenseOperator {
    let raise = sigma_plus().scale(C64::from_polar(rabi, -phase));
    raise.add(&raise.adjoint()).expect("2x2 operators")
}

/// First-red-sideband pulse on ion 1, solved exactly pair by pair.
pub fn jc_evolve(reg: &IonRegister, pulse: &PulseSpec) -> Result<IonRegister> {
    pulse.expect(PulseKind::RedSidebandIon1)?;
    let top_amp = reg.top_level_max_amp();
    if top_amp > TOP_LEVEL_AMP_TOL {
        return Err(Error::Truncation {
            n_max: reg.n_max(),
            population: reg.top_level_population(),
        });
    }
    let out = apply_sideband(reg, Ion::First, pulse)?;
    let top = out.top_level_population();
    if top > TRUNCATION_TOL {
        log::warn!(
            "sideband pulse pushed population {top:e} onto n_max = {}",
            out.n_max()
        );
    }
    Ok(out)
}

/// `exp(-i g₀ t a†a τz)` on ion 1 and the mode.
pub fn effective_evolve(reg: &IonRegister, g0: f64, t: f64) -> Result<IonRegister> {
    let g = g0 * t;
    let mut amps = reg.state.amps().to_vec();
    for n in 0..reg.levels() {
        let up = C64::from_polar(1.0, -g * n as f64);
        let down = up.conj();
        for r in 0..2 {
            amps[reg.flat(IonLevel::Up.index(), n, r)] *= up;
            amps[reg.flat(IonLevel::Down.index(), n, r)] *= down;
        }
    }
    reg.with_amps(amps)
}

/// Frame rotation `exp(+i g₀t |↑⟩⟨↑|)` on ion 1 that removes the Stark term of
/// the far-detuned sideband.
pub fn stark_compensate(reg: &IonRegister, g0t: f64) -> Result<IonRegister> {
    let phase = C64::from_polar(1.0, g0t);
    let mut amps = reg.state.amps().to_vec();
    for n in 0..reg.levels() {
        for r in 0..2 {
            amps[reg.flat(IonLevel::Up.index(), n, r)] *= phase;
        }
    }
    reg.with_amps(amps)
}

/// `U_s = exp(-i H_s t)` on ion 1's internal levels.
pub fn carrier_rotation(reg: &IonRegister, pulse: &PulseSpec) -> Result<IonRegister> {
    pulse.expect(PulseKind::CarrierIon1)?;
    let (sin, cos) = (pulse.rabi * pulse.duration).sin_cos();
    let h = carrier_hamiltonian(pulse.rabi, pulse.phase);
    let generator = if pulse.rabi > 0.0 {
        h.scale(C64::new(0.0, -sin / pulse.rabi))
    } else {
        DenseOperator::zeros(2)
    };
    let u = identity(2).scale(C64::new(cos, 0.0)).add(&generator)?;
    IonRegister::new(reg.state.apply_local(ION1_AXIS, &u)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutOutcome {
    pub register: IonRegister,
    /// Population that sat in Fock levels `n ≥ 2` before the pulse and so
    /// does not follow the `{|0⟩, |1⟩}` logic table.
    pub leakage: f64,
}

/// Red-sideband readout pulse on ion 2 mapping the mode onto `|↑_r⟩`.
pub fn readout_map(reg: &IonRegister, pulse: &PulseSpec) -> Result<ReadoutOutcome> {
    pulse.expect(PulseKind::RedSidebandIon2)?;
    let excited = reg
        .state
        .level_population(ION2_AXIS, IonLevel::Up.index())?;
    if excited > READOUT_PREP_TOL {
        return Err(Error::Precondition(format!(
            "readout ion must start in |down_r>, found |up_r> population {excited:e}"
        )));
    }
    let leakage = (2..reg.levels())
        .map(|n| reg.state.level_population(MODE_AXIS, n).unwrap_or(0.0))
        .sum();
    Ok(ReadoutOutcome {
        register: apply_sideband(reg, Ion::Second, pulse)?,
        leakage,
    })
}

/// How the weak coupling step of the protocol is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolMode {
    /// `exp(-i g a†a τz)` applied directly.
    Effective,
    /// Detuned sideband pulse of duration `g δ / Ω₀²`, then the Stark frame
    /// rotation.
    FullJc { omega0: f64, delta: f64 },
}

/// Readout statistics of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolReport {
    /// `P(↑_r)`.
    pub p_readout: f64,
    /// `P(↑_r, ↓)`: readout fires and ion 1 is dark (post-selection on `|g⟩`).
    pub p_readout_down: f64,
    /// `P(↑_r, ↑)`: readout fires and ion 1 fluoresces (post-selection on `|e⟩`).
    pub p_readout_up: f64,
    pub leakage: f64,
}

impl ProtocolReport {
    pub fn intensity_report(&self, s0: &QubitState) -> IntensityReport {
        IntensityReport {
            i0: self.p_readout,
            i_s: self.p_readout_down,
            i_comp: self.p_readout_up,
            i_g: self.p_readout_down - self.p_readout * s0.alpha().norm_sqr(),
            total: self.p_readout_down + self.p_readout_up,
            order: Order::Exact,
        }
    }

    pub fn max_abs_diff(&self, other: &ProtocolReport) -> f64 {
        [
            self.p_readout - other.p_readout,
            self.p_readout_down - other.p_readout_down,
            self.p_readout_up - other.p_readout_up,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Prepare → weak coupling → `U_s` → `U_r` → shelving readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonProtocol {
    pub mode: ProtocolMode,
    /// `Ω_s`; the carrier pulse lasts `π/(4Ω_s)`.
    pub carrier_rabi: f64,
    /// `θ` of the carrier pulse.
    pub carrier_phase: f64,
    /// `Ω_r`; the readout pulse lasts `π/(2Ω_r)`.
    pub readout_rabi: f64,
}

impl IonProtocol {
    /// Protocol with the carrier set to `θ = −π/2` so that `U_s|e⟩ = |↑⟩` and
    /// `U_s|g⟩ = −|↓⟩`.
    pub fn new(mode: ProtocolMode) -> Self {
        Self {
            mode,
            carrier_rabi: 1.0,
            carrier_phase: -FRAC_PI_2,
            readout_rabi: 1.0,
        }
    }

    pub fn carrier_pulse(&self) -> Result<PulseSpec> {
        if self.carrier_rabi.is_nan() || self.carrier_rabi <= 0.0 {
            return Err(Error::Precondition(
                "carrier Rabi frequency must be positive".into(),
            ));
        }
        PulseSpec::carrier_ion1(
            self.carrier_rabi,
            self.carrier_phase,
            FRAC_PI_4 / self.carrier_rabi,
        )
    }

    pub fn readout_pulse(&self) -> Result<PulseSpec> {
        if self.readout_rabi.is_nan() || self.readout_rabi <= 0.0 {
            return Err(Error::Precondition(
                "readout Rabi frequency must be positive".into(),
            ));
        }
        PulseSpec::red_sideband_ion2(self.readout_rabi, FRAC_PI_2 / self.readout_rabi)
    }

    /// Weak coupling step of strength `g` in the configured mode.
    pub fn couple(&self, reg: &IonRegister, g: f64) -> Result<IonRegister> {
        match self.mode {
            ProtocolMode::Effective => effective_evolve(reg, 1.0, g),
            ProtocolMode::FullJc { omega0, delta } => {
                if !(omega0 > 0.0 && delta > 0.0) {
                    return Err(Error::Precondition(format!(
                        "full JC mode needs omega0 > 0 and delta > 0, got omega0 = {omega0}, delta = {delta}"
                    )));
                }
                let g0 = omega0 * omega0 / delta;
                let pulse = PulseSpec::red_sideband_ion1(omega0, delta, g / g0)?;
                stark_compensate(&jc_evolve(reg, &pulse)?, g)
            }
        }
    }

    pub fn run(&self, s0: &QubitState, phi0: &FockPointerState, g: f64) -> Result<ProtocolReport> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Precondition(format!(
                "coupling g must be >= 0, got {g}"
            )));
        }
        let outside: f64 = phi0.amps().iter().skip(2).map(|c| c.norm_sqr()).sum();
        if outside > PROTOCOL_SUPPORT_TOL {
            return Err(Error::Precondition(format!(
                "ion protocol needs a pointer supported on {{|0>, |1>}}, found population {outside:e} above n = 1"
            )));
        }
        // Room for the virtual |↓, 2⟩ admixture of the detuned sideband.
        let phi0 = phi0.extended(phi0.n_max().max(2))?;
        let reg = IonRegister::from_qubit(s0, &phi0)?;
        let reg = self.couple(&reg, g)?;
        let reg = carrier_rotation(&reg, &self.carrier_pulse()?)?;
        let readout = readout_map(&reg, &self.readout_pulse()?)?;
        let reg = readout.register;
        Ok(ProtocolReport {
            p_readout: shelve(&reg, Ion::Second).p_fluoresce,
            p_readout_down: joint_probability(&reg, Some(IonLevel::Down), Some(IonLevel::Up)),
            p_readout_up: joint_probability(&reg, Some(IonLevel::Up), Some(IonLevel::Up)),
            leakage: readout.leakage,
        })
    }
}

/// Runs the protocol with the default carrier and readout pulses.
pub fn run_ion_protocol(
    s0: &QubitState,
    phi0: &FockPointerState,
    g: f64,
    mode: ProtocolMode,
) -> Result<ProtocolReport> {
    IonProtocol::new(mode).run(s0, phi0, g)
}

/// The exact-engine prediction `(I₁, I₁|η_g1|², I₁|η_e1|²)` for the protocol.
pub fn exact_protocol_prediction(
    s0: &QubitState,
    phi0: &FockPointerState,
    g: f64,
) -> Result<ProtocolReport> {
    let psi = evolve_exact(s0, phi0, g)?;
    Ok(ProtocolReport {
        p_readout: fock_probability(&psi, 1)?,
        p_readout_down: conditional_probability(&psi, 1, QubitOutcome::G)?,
        p_readout_up: conditional_probability(&psi, 1, QubitOutcome::E)?,
        leakage: 0.0,
    })
}
