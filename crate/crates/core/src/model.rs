//! Parameter records, drive protocols, ensemble state and the observables
//! shared by every other module.
//!
//! All rates are angular frequencies in rad/s and all times are in seconds.
//! Conversion from "frequency / 2π" values happens only in the JSON layer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::EnsembleGrid;
use crate::error::{Error, Result};

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Tag carried by serialized parameter documents.
pub const UNITS_TAG: &str = "2pi_hz";

/// Physical rates and ensemble size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cavity FWHM linewidth κ.
    pub kappa: f64,
    /// Single-atom spontaneous decay γ.
    pub gamma: f64,
    /// r.m.s. single-atom coupling g.
    pub g_rms: f64,
    pub n_atoms: u64,
    /// Cavity-atom detuning Δ_ca = ω_c − ω_a.
    pub delta_ca: f64,
    /// Trap depth over thermal energy, U₀/(k_B T).
    pub trap_depth_ratio: f64,
    /// Maximum AC-Stark shift of the broadening distribution.
    pub delta_max: f64,
}

impl PhysicalParams {
    pub fn new(
        kappa: f64,
        gamma: f64,
        g_rms: f64,
        n_atoms: u64,
        delta_ca: f64,
        trap_depth_ratio: f64,
        delta_max: f64,
    ) -> Result<Self> {
        let p = Self { kappa, gamma, g_rms, n_atoms, delta_ca, trap_depth_ratio, delta_max };
        p.validate()?;
        Ok(p)
    }

    /// Simulation parameter set of the Sr-88 cavity experiment:
    /// κ = 2π·153 kHz, γ = 2π·7.5 kHz, g_rms = 2π·7.8 kHz, δ_max = 2π·125 kHz,
    /// U₀ = 6.34 k_B T, resonant cavity.
    pub fn sr88_defaults(n_atoms: u64) -> Self {
        Self {
            kappa: TWO_PI * 153e3,
            gamma: TWO_PI * 7.5e3,
            g_rms: TWO_PI * 7.8e3,
            n_atoms,
            delta_ca: 0.0,
            trap_depth_ratio: 6.34,
            delta_max: TWO_PI * 125e3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        let all_finite = [
            self.kappa,
            self.gamma,
            self.g_rms,
            self.delta_ca,
            self.trap_depth_ratio,
            self.delta_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("all rates must be finite");
        }
        if self.kappa <= 0.0 {
            return bad("kappa must be > 0");
        }
        if self.gamma < 0.0 {
            return bad("gamma must be >= 0");
        }
        if self.g_rms <= 0.0 {
            return bad("g_rms must be > 0");
        }
        if self.n_atoms < 1 {
            return bad("n_atoms must be >= 1");
        }
        if self.delta_max < 0.0 {
            return bad("delta_max must be >= 0");
        }
        if self.trap_depth_ratio <= 1.0 {
            return bad("trap_depth_ratio must be > 1");
        }
        Ok(())
    }

    pub fn with_n_atoms(mut self, n_atoms: u64) -> Self {
        self.n_atoms = n_atoms;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_delta_max(mut self, delta_max: f64) -> Self {
        self.delta_max = delta_max;
        self
    }

    pub fn with_delta_ca(mut self, delta_ca: f64) -> Self {
        self.delta_ca = delta_ca;
        self
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n_atoms as f64).sqrt()
    }

    /// Homogeneous critical drive Ω_c^h = 2 N g²/κ.
    pub fn omega_c_h(&self) -> f64 {
        2.0 * self.n_atoms as f64 * self.g_rms * self.g_rms / self.kappa
    }

    pub fn derived(&self) -> DerivedParams {
        derive_params(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ParamsDoc::from(*self)).expect("params serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: ParamsDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// Wire form of [`PhysicalParams`]: frequencies divided by 2π.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub units: String,
    #[serde(alias = "kappa_2pi_hz")]
    pub kappa: f64,
    #[serde(alias = "gamma_2pi_hz")]
    pub gamma: f64,
    #[serde(alias = "g_rms_2pi_hz")]
    pub g_rms: f64,
    pub n_atoms: u64,
    #[serde(default, alias = "delta_ca_2pi_hz")]
    pub delta_ca: f64,
    pub trap_depth_ratio: f64,
    #[serde(alias = "delta_max_2pi_hz")]
    pub delta_max: f64,
}

impl From<PhysicalParams> for ParamsDoc {
    fn from(p: PhysicalParams) -> Self {
        Self {
            units: UNITS_TAG.to_string(),
            kappa: p.kappa / TWO_PI,
            gamma: p.gamma / TWO_PI,
            g_rms: p.g_rms / TWO_PI,
            n_atoms: p.n_atoms,
            delta_ca: p.delta_ca / TWO_PI,
            trap_depth_ratio: p.trap_depth_ratio,
            delta_max: p.delta_max / TWO_PI,
        }
    }
}

impl TryFrom<ParamsDoc> for PhysicalParams {
    type Error = Error;

    fn try_from(d: ParamsDoc) -> Result<Self> {
        if d.units != UNITS_TAG {
            return Err(Error::InvalidParams(format!(
                "unsupported units tag {:?}, expected {UNITS_TAG:?}",
                d.units
            )));
        }
        PhysicalParams::new(
            d.kappa * TWO_PI,
            d.gamma * TWO_PI,
            d.g_rms * TWO_PI,
            d.n_atoms,
            d.delta_ca * TWO_PI,
            d.trap_depth_ratio,
            d.delta_max * TWO_PI,
        )
    }
}

/// Combinations of [`PhysicalParams`] used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// C = 4g²/(κγ); infinite when γ = 0.
    pub cooperativity: f64,
    /// Γ = 4g²/κ.
    pub gamma_collective: f64,
    /// Ω_c^h = 2Ng²/κ.
    pub omega_c_h: f64,
    /// Vacuum Rabi splitting 2g√N.
    pub vrs: f64,
    /// Empty-cavity field per unit drive, 1/(2g): ⟨a⟩ = Ω_d/(2g).
    pub alpha_empty: f64,
}

pub fn derive_params(p: &PhysicalParams) -> DerivedParams {
    let g2 = p.g_rms * p.g_rms;
    DerivedParams {
        cooperativity: if p.gamma > 0.0 { 4.0 * g2 / (p.kappa * p.gamma) } else { f64::INFINITY },
        gamma_collective: 4.0 * g2 / p.kappa,
        omega_c_h: p.omega_c_h(),
        vrs: 2.0 * p.g_rms * p.sqrt_n(),
        alpha_empty: 1.0 / (2.0 * p.g_rms),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveShape {
    Quench,
    Ramp,
    Constant,
}

/// Time-dependent Rabi drive Ω_d(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveProtocol {
    pub shape: DriveShape,
    /// Target drive in rad/s.
    pub omega_d: f64,
    /// Linear-rise duration in s (ignored unless `shape` is `Ramp`).
    #[serde(default)]
    pub t_ramp: f64,
    /// Total drive duration in s.
    pub t_hold: f64,
}

impl DriveProtocol {
    pub fn quench(omega_d: f64, t_hold: f64) -> Result<Self> {
        Self::new(DriveShape::Quench, omega_d, 0.0, t_hold)
    }

    pub fn ramp(omega_d: f64, t_ramp: f64, t_hold: f64) -> Result<Self> {
        Self::new(DriveShape::Ramp, omega_d, t_ramp, t_hold)
    }

    pub fn constant(omega_d: f64, t_hold: f64) -> Result<Self> {
        Self::new(DriveShape::Constant, omega_d, 0.0, t_hold)
    }

    pub fn new(shape: DriveShape, omega_d: f64, t_ramp: f64, t_hold: f64) -> Result<Self> {
        let p = Self { shape, omega_d, t_ramp, t_hold };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_d.is_finite() && self.omega_d >= 0.0) {
            return Err(Error::InvalidParams("omega_d must be finite and >= 0".into()));
        }
        if !(self.t_hold.is_finite() && self.t_ramp.is_finite()) {
            return Err(Error::InvalidParams("drive times must be finite".into()));
        }
        if !(0.0 <= self.t_ramp && self.t_ramp <= self.t_hold) {
            return Err(Error::InvalidParams("need 0 <= t_ramp <= t_hold".into()));
        }
        if self.shape == DriveShape::Ramp && self.t_ramp == 0.0 {
            return Err(Error::InvalidParams("ramp protocol needs t_ramp > 0".into()));
        }
        Ok(())
    }

    pub fn with_omega_d(mut self, omega_d: f64) -> Self {
        self.omega_d = omega_d;
        self
    }

    pub fn with_t_hold(mut self, t_hold: f64) -> Self {
        self.t_hold = t_hold;
        self
    }

    /// Ω_d(t) for `0 <= t <= t_hold`.
    pub fn drive_amplitude(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_hold).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t:e} s outside drive window [0, {:e}]",
                self.t_hold
            )));
        }
        Ok(self.amplitude_unchecked(t))
    }

    /// Ω_d(t) without the window check; used inside the integrator, where
    /// stages may evaluate marginally past `t_hold`.
    pub fn amplitude_unchecked(&self, t: f64) -> f64 {
        match self.shape {
            DriveShape::Ramp if t < self.t_ramp => self.omega_d * t / self.t_ramp,
            _ => self.omega_d,
        }
    }

    /// Times at which Ω_d(t) has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            DriveShape::Ramp => vec![self.t_ramp],
            _ => Vec::new(),
        }
    }
}

/// Mean-field state of one coupling/detuning group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupState {
    /// g_k / g_rms.
    pub eta: f64,
    /// δ_k − δ̄ in rad/s.
    pub delta: f64,
    pub weight: f64,
    /// ⟨s_k⁻⟩.
    pub s: Complex64,
    /// ⟨s_k^z⟩.
    pub z: f64,
}

/// Normalized cavity field α = ⟨a⟩/√N plus per-group spin moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleState {
    pub alpha: Complex64,
    pub groups: Vec<GroupState>,
}

impl EnsembleState {
    /// Every atom at the south pole, empty cavity.
    pub fn ground(grid: &EnsembleGrid) -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            groups: grid
                .nodes
                .iter()
                .map(|n| GroupState {
                    eta: n.eta,
                    delta: n.delta_centered,
                    weight: n.weight,
                    s: Complex64::new(0.0, 0.0),
                    z: -0.5,
                })
                .collect(),
        }
    }

    /// Every group rotated from −z towards +y by θ_k = η_k·phase, with α = 0.
    /// This is the γ = 0 mean-field steady state when `phase` = g√N·Q_ss.
    pub fn rotated(grid: &EnsembleGrid, phase: f64) -> Self {
        let mut st = Self::ground(grid);
        for g in &mut st.groups {
            let th = g.eta * phase;
            g.s = Complex64::new(0.0, -0.5 * th.sin());
            g.z = -0.5 * th.cos();
        }
        st
    }

    pub fn validate(&self) -> Result<()> {
        let wsum: f64 = self.groups.iter().map(|g| g.weight).sum();
        if (wsum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("group weights sum to {wsum}, not 1")));
        }
        for (i, g) in self.groups.iter().enumerate() {
            let len2 = g.s.norm_sqr() + g.z * g.z;
            if len2 > 0.25 + 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "group {i}: Bloch vector length² {len2} exceeds 1/4"
                )));
            }
        }
        Ok(())
    }

    /// Flat layout used by the integrator: [Re α, Im α, (Re s, Im s, z) per group].
    pub fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 + 3 * self.groups.len());
        y.push(self.alpha.re);
        y.push(self.alpha.im);
        for g in &self.groups {
            y.extend_from_slice(&[g.s.re, g.s.im, g.z]);
        }
        y
    }

    /// Inverse of [`pack`](Self::pack), reusing this state's group layout.
    pub fn unpack_from(&self, y: &[f64]) -> Self {
        let mut st = self.clone();
        st.alpha = Complex64::new(y[0], y[1]);
        for (k, g) in st.groups.iter_mut().enumerate() {
            let b = 2 + 3 * k;
            g.s = Complex64::new(y[b], y[b + 1]);
            g.z = y[b + 2];
        }
        st
    }

    /// N⁻¹ Σ_k g_k s_k / g_rms = Σ_k w_k η_k s_k.
    pub fn radiating_dipole(&self) -> Complex64 {
        self.groups.iter().map(|g| g.s * (g.weight * g.eta)).sum()
    }
}

/// Quantities extracted from an [`EnsembleState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    /// J̃z/(N/2).
    pub j_z_weighted: f64,
    /// Σ_k w_k η_k s_k.
    pub j_minus_weighted: Complex64,
    pub transmission: f64,
    /// Ω_SR = i(4g²/κ)·N·Σ_k w_k η_k s_k.
    pub omega_sr: Complex64,
}

/// J̃z/(N/2) = 2 Σ w η² z / Σ w η².
pub fn weighted_inversion(state: &EnsembleState) -> Result<f64> {
    let (num, den) = state.groups.iter().fold((0.0, 0.0), |(n, d), g| {
        let w2 = g.weight * g.eta * g.eta;
        (n + w2 * g.z, d + w2)
    });
    if den <= 0.0 {
        return Err(Error::DegenerateGrid("sum of w·η² vanishes".into()));
    }
    Ok(2.0 * num / den)
}

/// Intracavity power normalized to the empty, resonant cavity at the same drive.
pub fn transmission_fraction(alpha: Complex64, omega_d: f64, p: &PhysicalParams) -> Result<f64> {
    if !(omega_d > 0.0) {
        return Err(Error::UndefinedNormalization(
            "transmission needs a positive drive".into(),
        ));
    }
    let field = alpha.norm() * p.sqrt_n();
    let empty = omega_d / (2.0 * p.g_rms);
    Ok((field / empty).powi(2))
}

/// Observables of `state`; transmission is normalized to drive `omega_d_ref`
/// and reported as 0 when that drive vanishes.
pub fn observables(state: &EnsembleState, omega_d_ref: f64, p: &PhysicalParams) -> Result<Observables> {
    let j_minus = state.radiating_dipole();
    let transmission = if omega_d_ref > 0.0 {
        transmission_fraction(state.alpha, omega_d_ref, p)?
    } else {
        0.0
    };
    let d = p.derived();
    Ok(Observables {
        j_z_weighted: weighted_inversion(state)?,
        j_minus_weighted: j_minus,
        transmission,
        omega_sr: Complex64::new(0.0, d.gamma_collective * p.n_atoms as f64) * j_minus,
    })
}
