//! Slow evolution on the cooperative branch caused by single-atom decay:
//! the remnant cavity field, the one-variable drift model for uniform
//! coupling, its fixed point and the time to reach the normal phase.

use num_complex::Complex64;
use serde::Serialize;

use crate::distributions::EnsembleGrid;
use crate::dynamics::integrate;
use crate::error::{Error, Result};
use crate::model::{DriveProtocol, EnsembleState, PhysicalParams};
use crate::numerics::adaptive_simpson;
use crate::numerics::ode::{integrate_dense, OdeOptions};
use crate::steady::{critical_drive, ss_ideal_grid, BroadenedOptions, Regime};

/// Inversion u = J̃z/(N/2) ∈ [−1, 0] of the drift model at drive ratio r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftState {
    pub u: f64,
    pub r: f64,
}

/// Quasi-static field α = γR/(4i g√N Ĵ) that holds the radiating dipole
/// fixed, with R = Σ w η (1 + 2iΔ_k/γ) s_k and Ĵ = Σ w η² z_k.
pub fn remnant_field(state: &EnsembleState, p: &PhysicalParams) -> Result<Complex64> {
    let (r_hat, j_hat) = state.groups.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(r, j), g| {
        let factor = if p.gamma > 0.0 {
            Complex64::new(1.0, 2.0 * g.delta / p.gamma)
        } else {
            Complex64::new(1.0, 0.0)
        };
        (r + factor * g.s * (g.weight * g.eta), j + g.weight * g.eta * g.eta * g.z)
    });
    if r_hat == Complex64::new(0.0, 0.0) {
        return Ok(r_hat);
    }
    if j_hat.abs() < 1e-14 {
        return Err(Error::SingularDrift("weighted inversion vanished; normal phase reached".into()));
    }
    if p.gamma == 0.0 {
        // With γ = 0 only the detuning part of R survives: γ(1 + 2iΔ/γ) = γ + 2iΔ.
        let r_det: Complex64 = state
            .groups
            .iter()
            .map(|g| Complex64::new(0.0, 2.0 * g.delta) * g.s * (g.weight * g.eta))
            .sum();
        return Ok(r_det / (Complex64::new(0.0, 4.0) * p.g_rms * p.sqrt_n() * j_hat));
    }
    Ok(p.gamma * r_hat / (Complex64::new(0.0, 4.0) * p.g_rms * p.sqrt_n() * j_hat))
}

/// du/dt = −γ[r²/(2u) + u + 1].
pub fn drift_rhs(state: DriftState, gamma: f64) -> Result<f64> {
    if state.u == 0.0 {
        return Err(Error::SingularDrift("u = 0".into()));
    }
    Ok(-gamma * (state.r * state.r / (2.0 * state.u) + state.u + 1.0))
}

/// Stable fixed point u* = −(1 + √(1 − 2r²))/2, or `None` above r = 1/√2.
pub fn drift_fixed_point(r: f64) -> Result<Option<f64>> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("drive ratio {r} must be finite and >= 0")));
    }
    let disc = 1.0 - 2.0 * r * r;
    if disc < 0.0 && r > std::f64::consts::FRAC_1_SQRT_2 {
        return Ok(None);
    }
    Ok(Some(-0.5 * (1.0 + disc.max(0.0).sqrt())))
}

/// Time for the drift model to carry u from −√(1−r²) to 0, in units of 1/γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibrationTime {
    pub closed_form: f64,
    pub quadrature: f64,
}

/// Equilibration time for 1/√2 < r < 1. The closed form is cross-checked
/// against adaptive quadrature of dt = −u du/(r²/2 + u² + u).
pub fn equilibration_time(r: f64) -> Result<EquilibrationTime> {
    if !(r > std::f64::consts::FRAC_1_SQRT_2 && r < 1.0) {
        return Err(Error::Domain(format!("equilibration time needs 1/sqrt(2) < r < 1, got {r}")));
    }
    let closed_form = equilibration_closed_form(r);
    let u0 = -(1.0 - r * r).sqrt();
    // r²/2 + u² + u written as (u + ½)² + (2r² − 1)/4 to avoid cancellation near u = −½.
    let gap = 0.25 * (2.0 * r * r - 1.0);
    let quadrature = adaptive_simpson(|u| -u / ((u + 0.5).powi(2) + gap), u0, 0.0, 1e-11 * closed_form.abs().max(1.0))
        .ok_or(Error::QuadratureNonConvergence { change: f64::NAN })?;
    if (closed_form / quadrature - 1.0).abs() > 5e-3 {
        return Err(Error::QuadratureNonConvergence { change: closed_form - quadrature });
    }
    Ok(EquilibrationTime { closed_form, quadrature })
}

/// γT = ½ ln[(2 − r² − 2√(1−r²))/r²]
///      + (1/a)[atan((2√(1−r²) − 1)/a) + atan(1/a)],  a = √(2r² − 1).
fn equilibration_closed_form(r: f64) -> f64 {
    let r2 = r * r;
    let c = (1.0 - r2).sqrt();
    let a = (2.0 * r2 - 1.0).sqrt();
    0.5 * ((2.0 - r2 - 2.0 * c) / r2).ln() + (((2.0 * c - 1.0) / a).atan() + (1.0 / a).atan()) / a
}

/// Drift-model trajectory sampled at `t_samples` (s), starting from `u0` at
/// `t0`. Integration ends early once u comes within 1e-6 of 0; the
/// returned vectors then hold only the samples reached.
pub fn drift_trajectory(
    r: f64,
    gamma: f64,
    u0: f64,
    t0: f64,
    t_samples: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(-1.0..0.0).contains(&u0) {
        return Err(Error::Domain(format!("initial inversion {u0} not in [-1, 0)")));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain("drift model needs gamma > 0".into()));
    }
    let sol = integrate_dense(
        |_, y, dy| dy[0] = -gamma * (r * r / (2.0 * y[0]) + y[0] + 1.0),
        t0,
        &[u0],
        t_samples,
        &[],
        opts,
        |_, y| y[0] > -1e-6,
    )?;
    Ok((sol.times, sol.states.iter().map(|y| y[0]).collect()))
}

/// Full mean-field model against the drift model above the first-order
/// threshold.
#[derive(Debug, Clone, Serialize)]
pub struct DriftComparison {
    pub times: Vec<f64>,
    pub full: Vec<f64>,
    pub drift: Vec<f64>,
    pub max_abs_difference: f64,
}

/// Runs the full model with standing-wave couplings (no broadening) at
/// `factor`·Ω_c^{nh,se}, starting from the γ = 0 steady state at that drive,
/// and the drift model at `factor`·Ω_c^{h,se} from the full model's
/// inversion at t = 1/κ. Both are compared on [1/κ, t_end].
pub fn compare_full_and_drift(
    p: &PhysicalParams,
    grid: &EnsembleGrid,
    factor: f64,
    t_end: f64,
    n_samples: usize,
    opts: &OdeOptions,
) -> Result<DriftComparison> {
    let o = BroadenedOptions::default();
    let r_full = factor * critical_drive(Regime::SeInhomog, None, None, o)?.value;
    let r_drift = factor * critical_drive(Regime::SeHomog, None, None, o)?.value;
    let prep = ss_ideal_grid(r_full, grid)?;
    let phase = prep
        .q_phase
        .ok_or_else(|| Error::NoSteadyState(format!("no ideal steady state at r = {r_full}")))?;
    let initial = EnsembleState::rotated(grid, phase);

    let t0 = 1.0 / p.kappa;
    if !(t_end > t0) {
        return Err(Error::InvalidParams("comparison window must end after 1/kappa".into()));
    }
    let n = n_samples.max(2);
    let samples: Vec<f64> = (0..n).map(|i| t0 + (t_end - t0) * i as f64 / (n - 1) as f64).collect();
    let proto = DriveProtocol::constant(r_full * p.omega_c_h(), t_end)?;
    let full = integrate(&initial, p, &proto, &samples, opts)?.j_z();
    let (_, drift) = drift_trajectory(r_drift, p.gamma, full[0], t0, &samples, opts)?;
    // Past the point where the drift model reaches u = 0 it stays there.
    let drift: Vec<f64> = (0..samples.len()).map(|i| drift.get(i).copied().unwrap_or(0.0)).collect();
    let max_abs_difference = full.iter().zip(&drift).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DriftComparison { times: samples, full, drift, max_abs_difference })
}
