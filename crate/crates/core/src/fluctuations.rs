//! Bloch-vector geometry of the cooperative steady state, the
//! Holstein-Primakoff squeezing estimate and the linearized response to a
//! drive quench.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Mean-field collective spin direction, tilted from −z towards +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochAngle {
    pub theta: f64,
    /// ⟨J_y⟩/(N/2).
    pub j_y: f64,
    /// ⟨J_z⟩/(N/2).
    pub j_z: f64,
}

/// θ = arcsin(r) for r = Ω_d/Ω_c^h ≤ 1.
pub fn mean_field_angle(r: f64) -> Result<BlochAngle> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("drive ratio {r} must be finite and >= 0")));
    }
    if r > 1.0 {
        return Err(Error::NoSteadyState(format!("r = {r} exceeds the critical drive")));
    }
    let theta = r.asin();
    Ok(BlochAngle { theta, j_y: r, j_z: -theta.cos() })
}

/// ⟨J_x²⟩ = (N/4)√(1 − r²) to leading order in the Holstein-Primakoff expansion.
pub fn hp_squeezing(r: f64, n_atoms: u64) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("drive ratio {r} must be finite and >= 0")));
    }
    if r >= 1.0 {
        return Err(Error::Validity(format!(
            "expansion about the mean-field direction breaks down at r = {r} >= 1"
        )));
    }
    Ok(0.25 * n_atoms as f64 * (1.0 - r * r).sqrt())
}

/// Linearized rates after a quench, −κ/4 ± i√(2g²·N|j_z|/2 − κ²/16), with
/// `j_z_weighted` = J̃z/(N/2). A negative radicand gives the two real
/// rates of the overdamped branch.
pub fn quench_eigenvalues(j_z_weighted: f64, p: &PhysicalParams) -> Result<[Complex64; 2]> {
    if !(j_z_weighted.is_finite() && j_z_weighted <= 0.0) {
        return Err(Error::Domain(format!("inversion {j_z_weighted} must be <= 0")));
    }
    let j_atoms = 0.5 * p.n_atoms as f64 * j_z_weighted.abs();
    let radicand = 2.0 * p.g_rms * p.g_rms * j_atoms - p.kappa * p.kappa / 16.0;
    let re = -0.25 * p.kappa;
    Ok(if radicand >= 0.0 {
        let w = radicand.sqrt();
        [Complex64::new(re, w), Complex64::new(re, -w)]
    } else {
        let s = (-radicand).sqrt();
        [Complex64::new(re + s, 0.0), Complex64::new(re - s, 0.0)]
    })
}
