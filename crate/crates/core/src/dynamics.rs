//! Mean-field time evolution: the full atom-cavity model, the reduced ideal
//! (γ = 0, δ = 0) model and the adiabatically eliminated spin model, plus
//! trajectory post-processing.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::distributions::EnsembleGrid;
use crate::error::{Error, Result};
use crate::model::{observables, DriveProtocol, EnsembleState, Observables, PhysicalParams};
use crate::numerics::ode::{integrate_dense, OdeOptions};
use crate::numerics::trapezoid;
use crate::table::fmt_f64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<EnsembleState>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn j_z(&self) -> Vec<f64> {
        self.observables.iter().map(|o| o.j_z_weighted).collect()
    }

    pub fn last(&self) -> Result<&Observables> {
        self.observables.last().ok_or(Error::EmptyTrajectory)
    }

    /// Largest ||s_k|² + z_k² − 1/4| over all samples and groups.
    pub fn max_spin_length_error(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|s| s.groups.iter())
            .map(|g| (g.s.norm_sqr() + g.z * g.z - 0.25).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns
    /// `t_s,re_alpha,im_alpha,jz_weighted,transmission,re_jminus_weighted,im_jminus_weighted`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t_s",
            "re_alpha",
            "im_alpha",
            "jz_weighted",
            "transmission",
            "re_jminus_weighted",
            "im_jminus_weighted",
        ])?;
        for ((t, st), o) in self.times.iter().zip(&self.states).zip(&self.observables) {
            w.write_record(
                [
                    *t,
                    st.alpha.re,
                    st.alpha.im,
                    o.j_z_weighted,
                    o.transmission,
                    o.j_minus_weighted.re,
                    o.j_minus_weighted.im,
                ]
                .iter()
                .map(|v| fmt_f64(*v)),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-group constants of the full model.
struct Coefficients {
    half_kappa: f64,
    delta_ca: f64,
    half_gamma: f64,
    gamma: f64,
    sqrt_n: f64,
    drive_gain: f64,
    /// (w_k g_k, g_k √N, δ_k − δ̄) per group.
    groups: Vec<(f64, f64, f64)>,
}

impl Coefficients {
    fn new(state: &EnsembleState, p: &PhysicalParams) -> Self {
        let sqrt_n = p.sqrt_n();
        Self {
            half_kappa: 0.5 * p.kappa,
            delta_ca: p.delta_ca,
            half_gamma: 0.5 * p.gamma,
            gamma: p.gamma,
            sqrt_n,
            drive_gain: p.kappa / (4.0 * p.g_rms * sqrt_n),
            groups: state
                .groups
                .iter()
                .map(|g| {
                    let gk = g.eta * p.g_rms;
                    (g.weight * gk, gk * sqrt_n, g.delta)
                })
                .collect(),
        }
    }

    /// Flat right-hand side in the layout of [`EnsembleState::pack`].
    fn eval(&self, omega_d: f64, y: &[f64], dy: &mut [f64]) {
        let alpha = Complex64::new(y[0], y[1]);
        let mut polarization = Complex64::new(0.0, 0.0);
        for (k, &(wg, gs, delta)) in self.groups.iter().enumerate() {
            let b = 2 + 3 * k;
            let s = Complex64::new(y[b], y[b + 1]);
            let z = y[b + 2];
            polarization += s * wg;
            let ds = I * (2.0 * gs * z) * alpha - s * Complex64::new(self.half_gamma, delta);
            dy[b] = ds.re;
            dy[b + 1] = ds.im;
            // −i g√N (α s* − α* s) = 2 g√N Im(α s*)
            dy[b + 2] = 2.0 * gs * (alpha * s.conj()).im - self.gamma * (z + 0.5);
        }
        let da = -alpha * Complex64::new(self.half_kappa, self.delta_ca) - I * self.sqrt_n * polarization
            + self.drive_gain * omega_d;
        dy[0] = da.re;
        dy[1] = da.im;
    }
}

/// Time derivative of the full mean-field state. The returned record has
/// the same group layout as `state`, with α, s_k and z_k holding derivatives.
pub fn rhs_full(state: &EnsembleState, t: f64, p: &PhysicalParams, proto: &DriveProtocol) -> EnsembleState {
    let c = Coefficients::new(state, p);
    let y = state.pack();
    let mut dy = vec![0.0; y.len()];
    c.eval(proto.amplitude_unchecked(t), &y, &mut dy);
    state.unpack_from(&dy)
}

/// Integrates the full model from `initial` and samples it at `t_samples`.
pub fn integrate(
    initial: &EnsembleState,
    p: &PhysicalParams,
    proto: &DriveProtocol,
    t_samples: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    p.validate()?;
    proto.validate()?;
    initial.validate()?;
    check_samples(t_samples, proto)?;
    let c = Coefficients::new(initial, p);
    let sol = integrate_dense(
        |t, y, dy| c.eval(proto.amplitude_unchecked(t), y, dy),
        0.0,
        &initial.pack(),
        t_samples,
        &proto.breakpoints(),
        opts,
        |_, _| false,
    )?;
    let states: Vec<EnsembleState> = sol.states.iter().map(|y| initial.unpack_from(y)).collect();
    let observables = states
        .iter()
        .map(|s| observables(s, proto.omega_d, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times: sol.times, states, observables })
}

/// Integrates from the all-ground state on `grid`.
pub fn integrate_from_ground(
    grid: &EnsembleGrid,
    p: &PhysicalParams,
    proto: &DriveProtocol,
    t_samples: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    integrate(&EnsembleState::ground(grid), p, proto, t_samples, opts)
}

/// `n` equally spaced sample times covering [0, t_end].
pub fn uniform_samples(t_end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

fn check_samples(t_samples: &[f64], proto: &DriveProtocol) -> Result<()> {
    if t_samples.is_empty() {
        return Err(Error::InvalidParams("no sample times".into()));
    }
    let slack = 1e-12 * proto.t_hold.max(1e-300);
    if t_samples.iter().any(|&t| !(t >= 0.0 && t <= proto.t_hold + slack)) {
        return Err(Error::Domain(format!(
            "sample times must lie in [0, {:e}] s",
            proto.t_hold
        )));
    }
    if t_samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("sample times must be strictly increasing".into()));
    }
    Ok(())
}

/// Cavity field and accumulated field Q = ∫ 2α dt of the reduced ideal model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedIdealState {
    pub alpha: Complex64,
    /// Units of seconds.
    pub q: Complex64,
}

impl ReducedIdealState {
    pub fn ground() -> Self {
        Self { alpha: Complex64::new(0.0, 0.0), q: Complex64::new(0.0, 0.0) }
    }

    /// J̃z/(N/2) implied by Q: −Σ w η² cos(η g√N Q)/Σ w η².
    pub fn j_z_weighted(&self, p: &PhysicalParams, grid: &EnsembleGrid) -> f64 {
        let y = p.g_rms * p.sqrt_n() * self.q;
        let (num, den) = grid.nodes.iter().fold((0.0, 0.0), |(n, d), nd| {
            let w2 = nd.weight * nd.eta * nd.eta;
            (n + w2 * (y * nd.eta).cos().re, d + w2)
        });
        -num / den
    }
}

/// Derivative of the reduced ideal model at drive `omega_d`.
pub fn rhs_ideal_reduced(
    state: &ReducedIdealState,
    omega_d: f64,
    p: &PhysicalParams,
    grid: &EnsembleGrid,
) -> ReducedIdealState {
    let sqrt_n = p.sqrt_n();
    let gsn = p.g_rms * sqrt_n;
    let restoring: Complex64 = grid
        .nodes
        .iter()
        .map(|n| {
            let gk = n.eta * p.g_rms;
            (state.q * (n.eta * gsn)).sin() * (n.weight * gk)
        })
        .sum();
    ReducedIdealState {
        alpha: -0.5 * p.kappa * state.alpha - 0.5 * sqrt_n * restoring
            + p.kappa * omega_d / (4.0 * p.g_rms * sqrt_n),
        q: 2.0 * state.alpha,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedIdealState>,
    pub j_z_weighted: Vec<f64>,
}

pub fn integrate_ideal_reduced(
    initial: ReducedIdealState,
    p: &PhysicalParams,
    proto: &DriveProtocol,
    grid: &EnsembleGrid,
    t_samples: &[f64],
    opts: &OdeOptions,
) -> Result<ReducedTrajectory> {
    p.validate()?;
    proto.validate()?;
    check_samples(t_samples, proto)?;
    let pack = |s: &ReducedIdealState| [s.alpha.re, s.alpha.im, s.q.re, s.q.im];
    let unpack = |y: &[f64]| ReducedIdealState {
        alpha: Complex64::new(y[0], y[1]),
        q: Complex64::new(y[2], y[3]),
    };
    let sol = integrate_dense(
        |t, y, dy| {
            let d = rhs_ideal_reduced(&unpack(y), proto.amplitude_unchecked(t), p, grid);
            dy.copy_from_slice(&pack(&d));
        },
        0.0,
        &pack(&initial),
        t_samples,
        &proto.breakpoints(),
        opts,
        |_, _| false,
    )?;
    let states: Vec<ReducedIdealState> = sol.states.iter().map(|y| unpack(y)).collect();
    let j_z_weighted = states.iter().map(|s| s.j_z_weighted(p, grid)).collect();
    Ok(ReducedTrajectory { times: sol.times, states, j_z_weighted })
}

/// Derivatives (dJ⁻/dt, dJz/dt) of the adiabatically eliminated collective
/// spin model with collective rate Γ = 4g²/κ.
pub fn rhs_crf_reduced(j_minus: Complex64, j_z: f64, omega_d: f64, gamma_collective: f64) -> (Complex64, f64) {
    let d_minus = I * omega_d * j_z + gamma_collective * j_z * j_minus;
    // J⁺ − J⁻ = −2i Im(J⁻)
    let d_z = -omega_d * j_minus.im - gamma_collective * j_minus.norm_sqr();
    (d_minus, d_z)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrfTrajectory {
    pub times: Vec<f64>,
    pub j_minus: Vec<Complex64>,
    pub j_z: Vec<f64>,
}

/// Integrates the collective spin model from J⁻ = 0, Jz = −N/2.
pub fn integrate_crf_reduced(
    p: &PhysicalParams,
    proto: &DriveProtocol,
    t_samples: &[f64],
    opts: &OdeOptions,
) -> Result<CrfTrajectory> {
    p.validate()?;
    proto.validate()?;
    check_samples(t_samples, proto)?;
    let gc = p.derived().gamma_collective;
    let half_n = 0.5 * p.n_atoms as f64;
    // Scaled by N/2 so the state is O(1).
    let sol = integrate_dense(
        |t, y, dy| {
            // With J = (N/2)·y the drive term is unchanged and Γ becomes Γ·N/2.
            let (dm, dz) = rhs_crf_reduced(Complex64::new(y[0], y[1]), y[2], proto.amplitude_unchecked(t), gc * half_n);
            dy[0] = dm.re;
            dy[1] = dm.im;
            dy[2] = dz;
        },
        0.0,
        &[0.0, 0.0, -1.0],
        t_samples,
        &proto.breakpoints(),
        opts,
        |_, _| false,
    )?;
    Ok(CrfTrajectory {
        times: sol.times,
        j_minus: sol.states.iter().map(|y| Complex64::new(y[0], y[1]) * half_n).collect(),
        j_z: sol.states.iter().map(|y| y[2] * half_n).collect(),
    })
}

/// Oscillation frequency and 1/e amplitude decay rate of a ringing signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillation {
    /// Angular frequency in rad/s.
    pub frequency: f64,
    pub decay_rate: f64,
    pub extrema: usize,
}

/// Oscillation of J̃z(t) inside `window` = (t_start, t_end).
pub fn extract_oscillation(traj: &Trajectory, window: (f64, f64)) -> Result<Oscillation> {
    extract_oscillation_signal(&traj.times, &traj.j_z(), window)
}

/// Extrema-based frequency and decay estimate for uniformly sampled data.
///
/// Extrema are located by parabolic interpolation. The baseline is the
/// mean over the last quarter of the window; extrema whose distance from
/// the baseline falls below 1e-3 of the largest are treated as settled
/// and ignored along with everything after them. The window should extend
/// well past the ringdown so the baseline is settled.
pub fn extract_oscillation_signal(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<Oscillation> {
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= window.0 && times[i] <= window.1)
        .collect();
    if idx.len() < 5 {
        return Err(Error::InsufficientOscillation { found: 0 });
    }
    let t = &times[idx[0]..=idx[idx.len() - 1]];
    let y = &values[idx[0]..=idx[idx.len() - 1]];
    let q = (3 * t.len()) / 4;
    let span = t[t.len() - 1] - t[q];
    let baseline = if span > 0.0 { trapezoid(&t[q..], &y[q..]) / span } else { y[y.len() - 1] };

    let mut ext_t = Vec::new();
    let mut ext_a = Vec::new();
    for i in 1..y.len() - 1 {
        let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
        if (y1 - y0) * (y2 - y1) < 0.0 {
            let den = y0 - 2.0 * y1 + y2;
            let off = if den != 0.0 { 0.5 * (y0 - y2) / den } else { 0.0 };
            let h = 0.5 * (t[i + 1] - t[i - 1]);
            ext_t.push(t[i] + off * h);
            ext_a.push((y1 - 0.25 * (y0 - y2) * off - baseline).abs());
        }
    }
    let amax = ext_a.iter().cloned().fold(0.0, f64::max);
    let keep = ext_a.iter().take_while(|&&a| a > 1e-3 * amax).count();
    if keep < 3 {
        return Err(Error::InsufficientOscillation { found: keep });
    }
    let (ext_t, ext_a) = (&ext_t[..keep], &ext_a[..keep]);
    let mean_spacing = (ext_t[keep - 1] - ext_t[0]) / (keep - 1) as f64;
    let frequency = std::f64::consts::PI / mean_spacing;

    // Least-squares slope of log amplitude against time.
    let n = keep as f64;
    let mt = ext_t.iter().sum::<f64>() / n;
    let logs: Vec<f64> = ext_a.iter().map(|a| a.ln()).collect();
    let ml = logs.iter().sum::<f64>() / n;
    let (sxy, sxx) = ext_t.iter().zip(&logs).fold((0.0, 0.0), |(sxy, sxx), (&ti, &li)| {
        (sxy + (ti - mt) * (li - ml), sxx + (ti - mt).powi(2))
    });
    Ok(Oscillation { frequency, decay_rate: -sxy / sxx, extrema: keep })
}

/// Trapezoidal time average of each observable over the final `fraction`
/// of the trajectory.
pub fn tail_average(traj: &Trajectory, fraction: f64) -> Result<Observables> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!("tail fraction {fraction} not in (0, 1]")));
    }
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let t_end = traj.times[traj.len() - 1];
    let t_start = t_end - fraction * (t_end - traj.times[0]);
    let first = traj.times.iter().position(|&t| t >= t_start).unwrap_or(traj.len() - 1);
    let t = &traj.times[first..];
    let obs = &traj.observables[first..];
    if t.len() == 1 {
        return Ok(obs[0]);
    }
    let span = t[t.len() - 1] - t[0];
    let avg = |f: &dyn Fn(&Observables) -> f64| {
        let v: Vec<f64> = obs.iter().map(f).collect();
        trapezoid(t, &v) / span
    };
    Ok(Observables {
        j_z_weighted: avg(&|o| o.j_z_weighted),
        j_minus_weighted: Complex64::new(avg(&|o| o.j_minus_weighted.re), avg(&|o| o.j_minus_weighted.im)),
        transmission: avg(&|o| o.transmission),
        omega_sr: Complex64::new(avg(&|o| o.omega_sr.re), avg(&|o| o.omega_sr.im)),
    })
}
