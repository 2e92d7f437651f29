//! Stationary solutions of the mean-field model in each regime and the
//! critical drives at which the cooperative branch ceases to exist.
//!
//! Drives are given as r = Ω_d/Ω_c^h throughout.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::EnsembleGrid;
use crate::dynamics::integrate_from_ground;
use crate::error::{Error, Result};
use crate::model::{weighted_inversion, DriveProtocol, EnsembleState, GroupState, PhysicalParams};
use crate::numerics::bessel::bessel_j012;
use crate::numerics::ode::OdeOptions;
use crate::numerics::roots::{brent, golden_max, ROOT_MAX_ITER, ROOT_XTOL};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// First maximum of J₁.
const J1_ARGMAX: f64 = 1.841_183_781_340_659_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// γ = 0, uniform coupling.
    IdealHomog,
    /// γ = 0, standing-wave coupling distribution.
    IdealInhomog,
    /// γ > 0, uniform coupling.
    SeHomog,
    /// γ > 0, standing-wave coupling distribution.
    SeInhomog,
    /// γ > 0, coupling distribution and AC-Stark broadening on a grid.
    SeBroadened,
    /// Finite-time threshold of the full dynamics after a ramp-and-hold drive.
    Dynamic,
}

impl Regime {
    pub const STATIONARY: [Regime; 5] = [
        Regime::IdealHomog,
        Regime::IdealInhomog,
        Regime::SeHomog,
        Regime::SeInhomog,
        Regime::SeBroadened,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::IdealHomog => "ideal_homog",
            Regime::IdealInhomog => "ideal_inhomog",
            Regime::SeHomog => "se_homog",
            Regime::SeInhomog => "se_inhomog",
            Regime::SeBroadened => "se_broadened",
            Regime::Dynamic => "dynamic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::STATIONARY
            .iter()
            .chain(std::iter::once(&Regime::Dynamic))
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Spec(format!("unknown regime {s:?}")))
    }
}

/// Stationary solution on the cooperative branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateSolution {
    pub regime: Regime,
    pub exists: bool,
    /// Normalized field β = α·√(8g²N/γ²) (regimes with γ > 0).
    pub beta: Option<Complex64>,
    /// Rotation phase y = g√N·Q_ss (regimes with γ = 0); group k sits at
    /// polar angle η_k·y.
    pub q_phase: Option<f64>,
    /// J̃z/(N/2).
    pub j_z_weighted: Option<f64>,
}

impl SteadyStateSolution {
    fn absent(regime: Regime) -> Self {
        Self { regime, exists: false, beta: None, q_phase: None, j_z_weighted: None }
    }

    fn ideal(regime: Regime, q_phase: f64, j_z: f64) -> Self {
        Self { regime, exists: true, beta: None, q_phase: Some(q_phase), j_z_weighted: Some(j_z) }
    }

    fn se(regime: Regime, beta: Complex64, j_z: f64) -> Self {
        Self { regime, exists: true, beta: Some(beta), q_phase: None, j_z_weighted: Some(j_z) }
    }

    /// Accumulated field Q_ss in seconds.
    pub fn q_seconds(&self, p: &PhysicalParams) -> Option<f64> {
        self.q_phase.map(|y| y / (p.g_rms * p.sqrt_n()))
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("drive ratio {r} must be finite and >= 0")));
    }
    Ok(())
}

/// Uniform coupling without decay: sin y = r, J̃z/(N/2) = −√(1−r²).
pub fn ss_ideal_homog(r: f64) -> Result<SteadyStateSolution> {
    check_r(r)?;
    if r > 1.0 {
        return Ok(SteadyStateSolution::absent(Regime::IdealHomog));
    }
    Ok(SteadyStateSolution::ideal(Regime::IdealHomog, r.asin(), -(1.0 - r * r).sqrt()))
}

/// √2·J₁(x) with x = √2·y, the continuum coupling average Σ w η sin(η y).
pub fn ideal_inhomog_lhs(x: f64) -> f64 {
    SQRT2 * bessel_j012(x)[1]
}

/// Standing-wave coupling without decay: √2 J₁(x) = r on the first branch,
/// J̃z/(N/2) = −[J₀(x) − J₂(x)].
pub fn ss_ideal_inhomog(r: f64) -> Result<SteadyStateSolution> {
    check_r(r)?;
    if r == 0.0 {
        return Ok(SteadyStateSolution::ideal(Regime::IdealInhomog, 0.0, -1.0));
    }
    if r > ideal_inhomog_lhs(J1_ARGMAX) {
        return Ok(SteadyStateSolution::absent(Regime::IdealInhomog));
    }
    let x = brent(|x| ideal_inhomog_lhs(x) - r, 0.0, J1_ARGMAX, ROOT_XTOL, ROOT_MAX_ITER)?;
    let [j0, _, j2] = bessel_j012(x);
    Ok(SteadyStateSolution::ideal(Regime::IdealInhomog, x / SQRT2, -(j0 - j2)))
}

/// Ideal steady state on an explicit grid: Σ w η sin(η y) = r for the
/// smallest positive y, with every group rotated by η_k·y. Detunings are
/// ignored.
pub fn ss_ideal_grid(r: f64, grid: &EnsembleGrid) -> Result<SteadyStateSolution> {
    check_r(r)?;
    let f = |y: f64| grid.nodes.iter().map(|n| n.weight * n.eta * (n.eta * y).sin()).sum::<f64>();
    let eta_max = grid.nodes.iter().map(|n| n.eta.abs()).fold(0.0, f64::max);
    if eta_max == 0.0 {
        return Err(Error::DegenerateGrid("all couplings vanish".into()));
    }
    let (y_max, f_max) = first_local_max(&f, std::f64::consts::PI / eta_max)?;
    let regime = Regime::IdealInhomog;
    if r > f_max {
        return Ok(SteadyStateSolution::absent(regime));
    }
    let y = if r == 0.0 { 0.0 } else { brent(|y| f(y) - r, 0.0, y_max, ROOT_XTOL, ROOT_MAX_ITER)? };
    let state = EnsembleState::rotated(grid, y);
    Ok(SteadyStateSolution::ideal(regime, y, weighted_inversion(&state)?))
}

/// √2β/(1+β²), the homogeneous drive-field relation with decay.
pub fn se_homog_lhs(beta: f64) -> f64 {
    SQRT2 * beta / (1.0 + beta * beta)
}

/// Uniform coupling with decay: β = (1 − √(1−2r²))/(√2 r),
/// J̃z/(N/2) = −[1 + √(1−2r²)]/2.
pub fn ss_se_homog(r: f64) -> Result<SteadyStateSolution> {
    check_r(r)?;
    if r > 1.0 / SQRT2 {
        return Ok(SteadyStateSolution::absent(Regime::SeHomog));
    }
    let root = (1.0 - 2.0 * r * r).max(0.0).sqrt();
    // (1 − √(1−2r²))/(√2 r) rewritten without cancellation.
    let beta = SQRT2 * r / (1.0 + root);
    Ok(SteadyStateSolution::se(Regime::SeHomog, Complex64::new(beta, 0.0), -0.5 * (1.0 + root)))
}

/// (√2/β)(1 − 1/√(1+2β²)), the continuum standing-wave relation with decay.
pub fn se_inhomog_lhs(beta: f64) -> f64 {
    SQRT2 * beta * se_inhomog_saturation(beta)
}

/// Σ w η²/(1 + β²η²) over the continuum η = √2 cos φ:
/// (1 − 1/√(1+2β²))/β², with the β → 0 limit 1.
fn se_inhomog_saturation(beta: f64) -> f64 {
    let b2 = beta * beta;
    if b2 < 1e-6 {
        // Series 1 − 3β²/2 + 5β⁴/2.
        return 1.0 - 1.5 * b2 + 2.5 * b2 * b2;
    }
    let s = (1.0 + 2.0 * b2).sqrt();
    // 1 − 1/s = (s − 1)/s = 2β²/(s(s + 1))
    2.0 / (s * (s + 1.0))
}

/// Standing-wave coupling with decay; smallest positive β root.
pub fn ss_se_inhomog(r: f64) -> Result<SteadyStateSolution> {
    check_r(r)?;
    let regime = Regime::SeInhomog;
    let (b_max, f_max) = first_local_max(&se_inhomog_lhs, 1.0)?;
    if r > f_max {
        return Ok(SteadyStateSolution::absent(regime));
    }
    let b = if r == 0.0 { 0.0 } else { brent(|b| se_inhomog_lhs(b) - r, 0.0, b_max, ROOT_XTOL, ROOT_MAX_ITER)? };
    Ok(SteadyStateSolution::se(regime, Complex64::new(b, 0.0), -se_inhomog_saturation(b)))
}

/// Settings of the broadened solver.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BroadenedOptions {
    /// Keep the (1 + 2iΔ_ca/κ)·κγ/(4g²N) cavity-decay term, which is O(1/(NC))
    /// and dropped by default.
    pub include_cavity_term: bool,
}

/// Drive-field relation on a broadened grid, evaluated at field magnitude b.
struct BroadenedRelation<'a> {
    grid: &'a EnsembleGrid,
    /// 2/γ, converting δ_k − δ̄ to D_k.
    d_scale: f64,
    cavity: Complex64,
}

impl<'a> BroadenedRelation<'a> {
    fn new(grid: &'a EnsembleGrid, p: &PhysicalParams, opts: BroadenedOptions) -> Result<Self> {
        if !(p.gamma > 0.0) {
            return Err(Error::Domain("broadened steady state needs gamma > 0".into()));
        }
        let cavity = if opts.include_cavity_term {
            let c = p.kappa * p.gamma / (4.0 * p.g_rms * p.g_rms * p.n_atoms as f64);
            Complex64::new(1.0, 2.0 * p.delta_ca / p.kappa) * c
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(Self { grid, d_scale: 2.0 / p.gamma, cavity })
    }

    /// Per-node saturation L_k = 1/(1 + b²η²/(1 + D_k²)).
    fn saturation(&self, b: f64, eta: f64, delta: f64) -> f64 {
        let d = delta * self.d_scale;
        1.0 / (1.0 + b * b * eta * eta / (1.0 + d * d))
    }

    /// c + Σ w η² L_k/(1 + iD_k).
    fn response(&self, b: f64) -> Complex64 {
        self.cavity
            + self
                .grid
                .nodes
                .iter()
                .map(|n| {
                    let l = self.saturation(b, n.eta, n.delta_centered);
                    Complex64::new(n.weight * n.eta * n.eta * l, 0.0) / Complex64::new(1.0, n.delta_centered * self.d_scale)
                })
                .sum::<Complex64>()
    }

    fn lhs(&self, b: f64) -> f64 {
        SQRT2 * b * self.response(b).norm()
    }
}

/// Broadened steady state: √2·b·|c + S(b)| = r for the smallest positive b,
/// with β = b·e^{−i arg(c + S)}.
pub fn ss_broadened(
    r: f64,
    grid: &EnsembleGrid,
    p: &PhysicalParams,
    opts: BroadenedOptions,
) -> Result<SteadyStateSolution> {
    check_r(r)?;
    let rel = BroadenedRelation::new(grid, p, opts)?;
    let regime = Regime::SeBroadened;
    let (b_max, f_max) = first_local_max(&|b| rel.lhs(b), 1.0)?;
    if r > f_max {
        return Ok(SteadyStateSolution::absent(regime));
    }
    let b = if r == 0.0 { 0.0 } else { brent(|b| rel.lhs(b) - r, 0.0, b_max, ROOT_XTOL, ROOT_MAX_ITER)? };
    let resp = rel.response(b);
    let beta = Complex64::from_polar(b, -resp.arg());
    let state = broadened_state(beta, grid, p)?;
    Ok(SteadyStateSolution::se(regime, beta, weighted_inversion(&state)?))
}

/// Mean-field state corresponding to a broadened solution β:
/// α = βγ/(√8 g√N), z_k = −L_k/2, s_k = −iβη_k L_k/(√2(1 + iD_k)).
pub fn broadened_state(beta: Complex64, grid: &EnsembleGrid, p: &PhysicalParams) -> Result<EnsembleState> {
    let rel = BroadenedRelation::new(grid, p, BroadenedOptions::default())?;
    let b = beta.norm();
    let groups = grid
        .nodes
        .iter()
        .map(|n| {
            let l = rel.saturation(b, n.eta, n.delta_centered);
            let denom = Complex64::new(SQRT2, SQRT2 * n.delta_centered * rel.d_scale);
            GroupState {
                eta: n.eta,
                delta: n.delta_centered,
                weight: n.weight,
                s: Complex64::new(0.0, -n.eta * l) * beta / denom,
                z: -0.5 * l,
            }
        })
        .collect();
    Ok(EnsembleState { alpha: beta * (p.gamma / (8f64.sqrt() * p.g_rms * p.sqrt_n())), groups })
}

/// Residual of the defining relation of `sol` at drive ratio r.
pub fn steady_residual(
    sol: &SteadyStateSolution,
    r: f64,
    grid: Option<&EnsembleGrid>,
    p: Option<&PhysicalParams>,
    opts: BroadenedOptions,
) -> Result<f64> {
    if !sol.exists {
        return Err(Error::NoSteadyState("solution does not exist".into()));
    }
    let b = sol.beta.map(|b| b.norm());
    let y = sol.q_phase;
    Ok(match sol.regime {
        Regime::IdealHomog => y.unwrap().sin() - r,
        Regime::IdealInhomog => match grid {
            Some(g) => g.nodes.iter().map(|n| n.weight * n.eta * (n.eta * y.unwrap()).sin()).sum::<f64>() - r,
            None => ideal_inhomog_lhs(SQRT2 * y.unwrap()) - r,
        },
        Regime::SeHomog => se_homog_lhs(b.unwrap()) - r,
        Regime::SeInhomog => se_inhomog_lhs(b.unwrap()) - r,
        Regime::SeBroadened => {
            let (g, p) = grid
                .zip(p)
                .ok_or_else(|| Error::InvalidParams("broadened residual needs grid and params".into()))?;
            let rel = BroadenedRelation::new(g, p, opts)?;
            let beta = sol.beta.unwrap();
            // Complex form: √2 β (c + S) must equal r.
            (SQRT2 * beta * rel.response(beta.norm()) - r).norm()
        }
        Regime::Dynamic => return Err(Error::Domain("dynamic regime has no stationary relation".into())),
    })
}

/// Locates the first local maximum of `f` on (0, ∞) by geometric scanning
/// from `scale` followed by golden-section refinement.
fn first_local_max(f: &dyn Fn(f64) -> f64, scale: f64) -> Result<(f64, f64)> {
    let n_scan: usize = 400;
    let lo = 1e-3 * scale;
    let ratio = (1e4f64).powf(1.0 / n_scan as f64);
    let xs: Vec<f64> = (0..=n_scan).map(|i| lo * ratio.powi(i as i32)).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for i in 1..n_scan {
        if fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1] {
            let (x, fx) = golden_max(f, xs[i - 1], xs[i + 1], 1e-10 * xs[i]);
            return Ok((x, fx));
        }
    }
    Err(Error::RootFinding("no interior maximum of the drive-field relation".into()))
}

/// Critical drive Ω_crit/Ω_c^h of a regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalDrive {
    pub regime: Regime,
    pub value: f64,
}

/// Largest drive supporting the cooperative branch. `grid` and `p` are
/// required for [`Regime::SeBroadened`].
pub fn critical_drive(
    regime: Regime,
    grid: Option<&EnsembleGrid>,
    p: Option<&PhysicalParams>,
    opts: BroadenedOptions,
) -> Result<CriticalDrive> {
    let value = match regime {
        Regime::IdealHomog => golden_max(f64::sin, 0.0, std::f64::consts::PI, 1e-10).1,
        Regime::IdealInhomog => golden_max(ideal_inhomog_lhs, 0.5, 3.0, 1e-10).1,
        Regime::SeHomog => first_local_max(&se_homog_lhs, 1.0)?.1,
        Regime::SeInhomog => first_local_max(&se_inhomog_lhs, 1.0)?.1,
        Regime::SeBroadened => {
            let (g, p) = grid
                .zip(p)
                .ok_or_else(|| Error::InvalidParams("broadened critical drive needs grid and params".into()))?;
            let rel = BroadenedRelation::new(g, p, opts)?;
            first_local_max(&|b| rel.lhs(b), 1.0)?.1
        }
        Regime::Dynamic => {
            return Err(Error::InvalidParams("use dynamic_critical_drive for the dynamic regime".into()))
        }
    };
    Ok(CriticalDrive { regime, value })
}

/// Protocol for the finite-time critical drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicCriticalSpec {
    pub t_ramp: f64,
    pub t_hold: f64,
    /// Scan range and step in r = Ω_d/Ω_c^h.
    pub r_lo: f64,
    pub r_hi: f64,
    pub r_step: f64,
    /// Tolerance on r for the final refinement.
    pub r_tol: f64,
}

impl Default for DynamicCriticalSpec {
    fn default() -> Self {
        Self { t_ramp: 5e-6, t_hold: 9.3e-6, r_lo: 0.5, r_hi: 1.0, r_step: 0.02, r_tol: 1e-4 }
    }
}

/// J̃z/(N/2) at the end of a ramp-and-hold drive to r·Ω_c^h from the ground state.
pub fn final_inversion(r: f64, grid: &EnsembleGrid, p: &PhysicalParams, t_ramp: f64, t_hold: f64, opts: &OdeOptions) -> Result<f64> {
    let proto = DriveProtocol::ramp(r * p.omega_c_h(), t_ramp, t_hold)?;
    let tr = integrate_from_ground(grid, p, &proto, &[t_hold], opts)?;
    Ok(tr.last()?.j_z_weighted)
}

/// Smallest r at which J̃z/(N/2) at the end of the drive first reaches zero.
pub fn dynamic_critical_drive(
    grid: &EnsembleGrid,
    p: &PhysicalParams,
    spec: &DynamicCriticalSpec,
    opts: &OdeOptions,
) -> Result<CriticalDrive> {
    if !(spec.r_step > 0.0 && spec.r_lo < spec.r_hi) {
        return Err(Error::InvalidParams("dynamic critical scan needs r_lo < r_hi and r_step > 0".into()));
    }
    let f = |r: f64| final_inversion(r, grid, p, spec.t_ramp, spec.t_hold, opts);
    let mut prev = (spec.r_lo, f(spec.r_lo)?);
    if prev.1 >= 0.0 {
        return Err(Error::RootFinding(format!("inversion already non-negative at r = {}", spec.r_lo)));
    }
    let n = ((spec.r_hi - spec.r_lo) / spec.r_step).ceil() as usize;
    for i in 1..=n {
        let r = (spec.r_lo + i as f64 * spec.r_step).min(spec.r_hi);
        let v = f(r)?;
        if v >= 0.0 {
            let mut err = None;
            let root = brent(
                |x| match f(x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                },
                prev.0,
                r,
                spec.r_tol,
                ROOT_MAX_ITER,
            );
            if let Some(e) = err {
                return Err(e);
            }
            return Ok(CriticalDrive { regime: Regime::Dynamic, value: root? });
        }
        prev = (r, v);
    }
    Err(Error::RootFinding(format!("no zero crossing of the inversion below r = {}", spec.r_hi)))
}

/// Critical drives for a set of regimes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalTable {
    pub entries: Vec<CriticalDrive>,
}

fn conditions(regime: Regime) -> (&'static str, &'static str) {
    match regime {
        Regime::IdealHomog => ("no decay", "uniform"),
        Regime::IdealInhomog => ("no decay", "standing wave"),
        Regime::SeHomog => ("decay", "uniform"),
        Regime::SeInhomog => ("decay", "standing wave"),
        Regime::SeBroadened => ("decay + broadening", "standing wave"),
        Regime::Dynamic => ("finite-time dynamics", "standing wave"),
    }
}

/// Critical drives for `regimes`. The broadened entry uses `grid` and `p`;
/// the dynamic entry integrates the full model per `dynamic`.
pub fn critical_table(
    p: &PhysicalParams,
    grid: &EnsembleGrid,
    regimes: &[Regime],
    dynamic: Option<&DynamicCriticalSpec>,
    opts: &OdeOptions,
) -> Result<CriticalTable> {
    let mut entries = Vec::with_capacity(regimes.len());
    for &regime in regimes {
        let entry = match regime {
            Regime::Dynamic => {
                let spec = dynamic.copied().unwrap_or_default();
                dynamic_critical_drive(grid, p, &spec, opts)?
            }
            _ => critical_drive(regime, Some(grid), Some(p), BroadenedOptions::default())?,
        };
        entries.push(entry);
    }
    Ok(CriticalTable { entries })
}

impl CriticalTable {
    pub fn get(&self, regime: Regime) -> Option<f64> {
        self.entries.iter().find(|e| e.regime == regime).map(|e| e.value)
    }

    /// CSV with columns `regime,conditions,coupling,omega_crit_over_omega_c_h`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["regime", "conditions", "coupling", "omega_crit_over_omega_c_h"])?;
        for e in &self.entries {
            let (c, k) = conditions(e.regime);
            w.write_record([e.regime.name(), c, k, &format!("{:.6}", e.value)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned text with one row per condition and columns for uniform and
    /// standing-wave coupling.
    pub fn to_text(&self) -> String {
        let rows = [
            ("no decay", Some(Regime::IdealHomog), Some(Regime::IdealInhomog)),
            ("finite-time dynamics", None, Some(Regime::Dynamic)),
            ("decay", Some(Regime::SeHomog), Some(Regime::SeInhomog)),
            ("decay + broadening", None, Some(Regime::SeBroadened)),
        ];
        let cell = |r: Option<Regime>| match r.and_then(|r| self.get(r)) {
            Some(v) => format!("{v:.3}"),
            None => "-".to_string(),
        };
        let mut s = String::new();
        let _ = writeln!(s, "{:<22} {:>10} {:>14}", "Omega_crit/Omega_c^h", "uniform", "standing wave");
        for (label, a, b) in rows {
            if a.and_then(|r| self.get(r)).is_none() && b.and_then(|r| self.get(r)).is_none() {
                continue;
            }
            let _ = writeln!(s, "{:<22} {:>10} {:>14}", label, cell(a), cell(b));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ensemble_grid;
    use crate::dynamics::rhs_full;
    use crate::model::TWO_PI;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ideal_homog_examples() {
        assert_eq!(ss_ideal_homog(0.0).unwrap().j_z_weighted, Some(-1.0));
        assert_eq!(ss_ideal_homog(1.0).unwrap().j_z_weighted, Some(0.0));
        assert!(close(ss_ideal_homog(0.6).unwrap().j_z_weighted.unwrap(), -0.8, 1e-15));
        assert!(!ss_ideal_homog(1.01).unwrap().exists);
        assert!(ss_ideal_homog(-0.1).is_err());
    }

    #[test]
    fn ideal_inhomog_examples() {
        let s = ss_ideal_inhomog(0.0).unwrap();
        assert_eq!((s.q_phase, s.j_z_weighted), (Some(0.0), Some(-1.0)));
        let c = critical_drive(Regime::IdealInhomog, None, None, BroadenedOptions::default()).unwrap();
        assert!(close(c.value, 0.822_881_7, 1e-6));
        assert!(close(c.value, 0.82, 0.005));
        let at = ss_ideal_inhomog(c.value - 1e-12).unwrap();
        assert!(close(SQRT2 * at.q_phase.unwrap(), J1_ARGMAX, 1e-4));
        // Frozen value of −[J₀ − J₂] at the first maximum of J₁.
        assert!(close(at.j_z_weighted.unwrap(), -0.000_207, 5e-3));
        assert!(!ss_ideal_inhomog(0.83).unwrap().exists);
    }

    #[test]
    fn bessel_maximum_matches_integral_representation() {
        // J₁(x) = (1/π)∫₀^π cos(θ − x sin θ) dθ, trapezoid on a periodic integrand.
        let j1_integral = |x: f64| {
            let n = 2000;
            let h = std::f64::consts::PI / n as f64;
            let mut s = 0.5 * ((0.0f64).cos() + (std::f64::consts::PI).cos());
            for i in 1..n {
                let th = i as f64 * h;
                s += (th - x * th.sin()).cos();
            }
            s * h / std::f64::consts::PI
        };
        assert!(close(bessel_j012(1.8412)[1], j1_integral(1.8412), 1e-12));
        assert!(close(bessel_j012(1.8412)[1], 0.58187, 1e-4));
        for x in [0.3, 1.0, 4.0, 9.0, 25.0] {
            assert!(close(bessel_j012(x)[1], j1_integral(x), 1e-12), "x = {x}");
        }
    }

    #[test]
    fn ideal_inhomog_matches_phase_quadrature() {
        // Σ w η sin(η y) over η = √2 cos φ equals √2 J₁(√2 y).
        let grid = EnsembleGrid::from_nodes(
            crate::distributions::coupling_grid(64)
                .unwrap()
                .into_iter()
                .map(|(eta, weight)| crate::distributions::GridNode { eta, delta_centered: 0.0, weight })
                .collect(),
        );
        for r in [0.1, 0.4, 0.7, 0.8] {
            let a = ss_ideal_inhomog(r).unwrap();
            let b = ss_ideal_grid(r, &grid).unwrap();
            assert!(close(a.q_phase.unwrap(), b.q_phase.unwrap(), 1e-10), "r = {r}");
            assert!(close(a.j_z_weighted.unwrap(), b.j_z_weighted.unwrap(), 1e-10), "r = {r}");
        }
    }

    #[test]
    fn se_homog_examples() {
        let s = ss_se_homog(0.0).unwrap();
        assert_eq!(s.beta.unwrap().re, 0.0);
        assert_eq!(s.j_z_weighted, Some(-1.0));
        let edge = ss_se_homog(1.0 / SQRT2).unwrap();
        // √(1−2r²) amplifies the rounding of 1/√2 to about 1e-8.
        assert!(close(edge.j_z_weighted.unwrap(), -0.5, 1e-7));
        let mid = ss_se_homog(0.5).unwrap();
        assert!(close(mid.j_z_weighted.unwrap(), -0.5 * (1.0 + 0.5f64.sqrt()), 1e-15));
        assert!(close(mid.j_z_weighted.unwrap(), -0.8536, 1e-4));
        let b = mid.beta.unwrap().re;
        assert!(close(b, (1.0 - 0.5f64.sqrt()) / (SQRT2 * 0.5), 1e-15));
        assert!(!ss_se_homog(0.71).unwrap().exists);
        let c = critical_drive(Regime::SeHomog, None, None, BroadenedOptions::default()).unwrap();
        assert!(close(c.value, 1.0 / SQRT2, 1e-12));
    }

    #[test]
    fn se_inhomog_examples() {
        let small = ss_se_inhomog(1e-6).unwrap();
        assert!(close(small.j_z_weighted.unwrap(), -1.0, 1e-10));
        assert!(close(small.beta.unwrap().re, 1e-6 / SQRT2, 1e-12));
        assert!(close(se_inhomog_lhs(1.0), SQRT2 * (1.0 - 1.0 / 3f64.sqrt()), 1e-15));
        assert!(close(se_inhomog_lhs(1.0), 0.5977, 1e-4));
        let c = critical_drive(Regime::SeInhomog, None, None, BroadenedOptions::default()).unwrap();
        assert!(close(c.value, 0.60, 0.005));
        assert!(close(c.value, 0.600_566_2, 1e-6));
        assert!(!ss_se_inhomog(0.61).unwrap().exists);
    }

    #[test]
    fn se_inhomog_closed_form_matches_phase_quadrature() {
        for b in [1e-4, 0.2, 0.9, 2.5] {
            let n = 4000;
            let (mut lhs, mut jz) = (0.0, 0.0);
            for j in 0..n {
                let phi = TWO_PI * j as f64 / n as f64;
                let eta2 = 2.0 * phi.cos().powi(2);
                let l = 1.0 / (1.0 + b * b * eta2);
                lhs += eta2 * l / n as f64;
                jz -= eta2 * l / n as f64;
            }
            assert!(close(se_inhomog_lhs(b), SQRT2 * b * lhs, 1e-12), "b = {b}");
            assert!(close(-se_inhomog_saturation(b), jz, 1e-12), "b = {b}");
        }
    }

    fn params(delta_khz: f64) -> PhysicalParams {
        PhysicalParams::sr88_defaults(10_000).with_delta_max(TWO_PI * delta_khz * 1e3)
    }

    #[test]
    fn broadened_reduces_to_se_inhomog_without_broadening() {
        let p = params(0.0);
        let grid = ensemble_grid(20, 4, &p).unwrap();
        for r in [0.1, 0.3, 0.55] {
            let a = ss_broadened(r, &grid, &p, BroadenedOptions::default()).unwrap();
            let b = ss_se_inhomog(r).unwrap();
            assert!(close(a.j_z_weighted.unwrap(), b.j_z_weighted.unwrap(), 1e-6));
            assert!(close(a.beta.unwrap().norm(), b.beta.unwrap().re, 1e-6));
        }
    }

    #[test]
    fn broadened_reduces_to_se_homog_on_uniform_grid() {
        let p = params(0.0);
        let grid = EnsembleGrid::single();
        for r in [0.2, 0.5, 0.7] {
            let a = ss_broadened(r, &grid, &p, BroadenedOptions::default()).unwrap();
            let b = ss_se_homog(r).unwrap();
            assert!(close(a.j_z_weighted.unwrap(), b.j_z_weighted.unwrap(), 1e-10));
        }
    }

    #[test]
    fn broadened_critical_drives() {
        for (khz, want) in [(100.0, 0.29), (125.0, 0.26), (150.0, 0.24)] {
            let p = params(khz);
            let grid = ensemble_grid(20, 40, &p).unwrap();
            let c = critical_drive(Regime::SeBroadened, Some(&grid), Some(&p), BroadenedOptions::default()).unwrap();
            assert!(close(c.value, want, 0.01), "{khz} kHz: {}", c.value);
        }
    }

    #[test]
    fn broadened_solution_is_stationary_in_full_model() {
        let p = params(125.0);
        let grid = ensemble_grid(20, 40, &p).unwrap();
        let opts = BroadenedOptions { include_cavity_term: true };
        for r in [0.1, 0.2, 0.25] {
            let sol = ss_broadened(r, &grid, &p, opts).unwrap();
            assert!(steady_residual(&sol, r, Some(&grid), Some(&p), opts).unwrap() < 1e-9);
            let st = broadened_state(sol.beta.unwrap(), &grid, &p).unwrap();
            let proto = DriveProtocol::constant(r * p.omega_c_h(), 1.0).unwrap();
            let d = rhs_full(&st, 0.5, &p, &proto);
            let norm = d.pack().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < 1e-6 * p.n_atoms as f64, "r = {r}: {norm:e}");
        }
    }

    #[test]
    fn broadened_requires_decay() {
        let p = params(125.0).with_gamma(0.0);
        let grid = ensemble_grid(5, 5, &p).unwrap();
        assert!(matches!(
            ss_broadened(0.1, &grid, &p, BroadenedOptions::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn stationary_table_rows() {
        let p = params(125.0);
        let grid = ensemble_grid(20, 40, &p).unwrap();
        let t = critical_table(&p, &grid, &Regime::STATIONARY, None, &OdeOptions::default()).unwrap();
        assert!(close(t.get(Regime::IdealHomog).unwrap(), 1.0, 1e-12));
        assert!(close(t.get(Regime::IdealInhomog).unwrap(), 0.82, 0.01));
        assert!(close(t.get(Regime::SeHomog).unwrap(), 0.71, 0.01));
        assert!(close(t.get(Regime::SeInhomog).unwrap(), 0.60, 0.01));
        assert!(close(t.get(Regime::SeBroadened).unwrap(), 0.26, 0.01));
        let text = t.to_text();
        assert!(text.contains("standing wave"));
        assert!(!text.contains("finite-time"));
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 6);
    }

    #[test]
    fn regime_names_round_trip() {
        for r in Regime::STATIONARY.iter().chain([Regime::Dynamic].iter()) {
            assert_eq!(Regime::parse(r.name()).unwrap(), *r);
        }
        assert!(Regime::parse("other").is_err());
    }

    proptest! {
        #[test]
        fn solutions_satisfy_their_relations(r in 0.0f64..1.0) {
            let o = BroadenedOptions::default();
            for sol in [ss_ideal_homog(r).unwrap(), ss_ideal_inhomog(r).unwrap(), ss_se_homog(r).unwrap(), ss_se_inhomog(r).unwrap()] {
                if sol.exists {
                    prop_assert!(steady_residual(&sol, r, None, None, o).unwrap().abs() < 1e-9);
                    let jz = sol.j_z_weighted.unwrap();
                    prop_assert!((-1.0..=1e-12).contains(&jz));
                }
            }
        }

        #[test]
        fn inversion_non_decreasing_along_branch(r1 in 0.0f64..0.6, dr in 0.0f64..0.1) {
            let r2 = r1 + dr;
            let solvers: [fn(f64) -> Result<SteadyStateSolution>; 4] = [ss_ideal_homog, ss_ideal_inhomog, ss_se_homog, ss_se_inhomog];
            for f in solvers {
                let (a, b) = (f(r1).unwrap(), f(r2).unwrap());
                if a.exists && b.exists {
                    prop_assert!(b.j_z_weighted.unwrap() >= a.j_z_weighted.unwrap() - 1e-12);
                }
            }
        }
    }
}
