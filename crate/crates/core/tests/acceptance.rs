//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crfsim::distributions::{ensemble_grid, homogeneous_grid};
use crfsim::drift::{compare_full_and_drift, equilibration_time};
use crfsim::dynamics::{extract_oscillation, integrate_from_ground, uniform_samples};
use crfsim::fluctuations::quench_eigenvalues;
use crfsim::model::{DriveProtocol, PhysicalParams};
use crfsim::numerics::ode::OdeOptions;
use crfsim::runner::{run_oracle_check, run_sweep, run_table, OracleSuite, SweepSpec, TableSpec};
use crfsim::steady::{dynamic_critical_drive, ss_ideal_grid, DynamicCriticalSpec, Regime};
use crfsim::table::ResultTable;

/// Span of J̃z/(N/2), which runs from −1 to 1.
const FULL_SCALE: f64 = 2.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn params_doc(n_atoms: u64, gamma_hz: f64, delta_max_hz: f64) -> Value {
    json!({
        "units": "2pi_hz",
        "kappa_2pi_hz": 153e3,
        "gamma_2pi_hz": gamma_hz,
        "g_rms_2pi_hz": 7.8e3,
        "n_atoms": n_atoms,
        "trap_depth_ratio": 6.34,
        "delta_max_2pi_hz": delta_max_hz
    })
}

fn standing_wave_sweep(n_atoms: u64, values: Vec<f64>, protocol: Value, outputs: Value) -> Value {
    json!({
        "axis": "omega_d",
        "values": values,
        "params": params_doc(n_atoms, 7.5e3, 125e3),
        "protocol": protocol,
        "drive_reference": "dynamic",
        "outputs": outputs,
        "grid": {"n_phi": 20, "n_delta": 40}
    })
}

fn sweep(doc: Value) -> Result<ResultTable, String> {
    let spec = SweepSpec::from_value(doc).map_err(|e| e.to_string())?;
    let res = run_sweep(&spec, 0).map_err(|e| e.to_string())?;
    if let Some(p) = res.points.iter().find(|p| p.error.is_some()) {
        return Err(format!("point {}: {}", p.value, p.error.as_deref().unwrap_or("")));
    }
    Ok(res.table)
}

fn column(t: &ResultTable, name: &str) -> Vec<f64> {
    t.numeric_column(name).expect("numeric column").into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn c1_second_order_curve() -> Result<Verdict, String> {
    let values: Vec<f64> = (0..=19).map(|i| 0.05 * i as f64).collect();
    let doc = json!({
        "axis": "omega_d",
        "values": values,
        "params": params_doc(10_000, 0.0, 0.0),
        "protocol": {"shape": "ramp", "omega_d": 0.0, "t_ramp": 20e-6, "t_hold": 60e-6},
        "outputs": ["jz"],
        "grid": {"n_phi": 1, "n_delta": 1, "coupling": "uniform"}
    });
    let t = sweep(doc)?;
    let r = column(&t, "omega_d_over_omega_c_h");
    let jz = column(&t, "jz_final");
    let worst = r.iter().zip(&jz).map(|(r, j)| (j + (1.0 - r * r).sqrt()).abs()).fold(0.0, f64::max);
    Ok(verdict(worst < 1e-3, format!("max |J̃z + sqrt(1 - r²)| = {worst:.2e} over r <= 0.95 (tol 1e-3)")))
}

fn c2_critical_table() -> Result<Verdict, String> {
    let spec = TableSpec::from_value(json!({
        "params": params_doc(10_000, 7.5e3, 125e3),
        "grid": {"n_phi": 20, "n_delta": 40},
        "dynamic": true
    }))
    .map_err(|e| e.to_string())?;
    let t = run_table(&spec).map_err(|e| e.to_string())?;
    let expect = [
        (Regime::IdealHomog, 1.0, 0.01),
        (Regime::IdealInhomog, 0.82, 0.01),
        (Regime::SeHomog, 0.71, 0.01),
        (Regime::SeInhomog, 0.6, 0.01),
        (Regime::SeBroadened, 0.26, 0.01),
        (Regime::Dynamic, 0.70, 0.02),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (regime, want, tol) in expect {
        let got = t.get(regime).unwrap_or(f64::NAN);
        let ok = (got - want).abs() <= tol;
        pass &= ok;
        parts.push(format!("{}={got:.4}{}", regime.name(), if ok { "" } else { "!" }));
    }
    Ok(verdict(pass, parts.join(" ")))
}

fn c3_first_order_jump() -> Result<Verdict, String> {
    let values: Vec<f64> = (0..=14).map(|i| 0.25 + 0.025 * i as f64).collect();
    let doc = standing_wave_sweep(
        10_000,
        values.clone(),
        json!({"shape": "ramp", "omega_d": 0.0, "t_ramp": 5e-6, "t_hold": 300e-6}),
        json!(["jz"]),
    );
    let t = sweep(doc)?;
    let jz = column(&t, "jz_final");
    let (k, jump) = jz
        .windows(2)
        .map(|w| w[1] - w[0])
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or("sweep too short")?;
    let at = 0.5 * (values[k] + values[k + 1]);
    let pass = jump >= 0.3 && (at - 0.4).abs() <= 0.05;
    Ok(verdict(pass, format!("largest step {jump:.3} (need >= 0.3) at Ω_d/Ω_c = {at:.4} (need 0.4 ± 0.05)")))
}

fn c4_detuning_invariance() -> Result<Verdict, String> {
    // Drives are fixed in absolute terms, as multiples of the Δ_ca = 0 threshold.
    let p = PhysicalParams::sr88_defaults(10_000);
    let grid = ensemble_grid(20, 40, &p).map_err(|e| e.to_string())?;
    let opts = OdeOptions { rtol: 1e-8, ..OdeOptions::default() };
    let oc = dynamic_critical_drive(&grid, &p, &DynamicCriticalSpec::default(), &opts).map_err(|e| e.to_string())?.value;
    let values: Vec<f64> = linspace(0.1, 0.8, 8).iter().map(|x| x * oc).collect();
    let curves: Vec<Vec<f64>> = [0.0, 2.0, -2.0, 5.0, -5.0]
        .par_iter()
        .map(|&d| {
            let mut doc = standing_wave_sweep(
                10_000,
                values.clone(),
                json!({"shape": "ramp", "omega_d": 0.0, "t_ramp": 5e-6, "t_hold": 9.3e-6}),
                json!(["jz"]),
            );
            doc["params"]["delta_ca_2pi_hz"] = json!(d * 153e3);
            doc["drive_reference"] = json!("omega_c_h");
            sweep(doc).map(|t| column(&t, "jz_final"))
        })
        .collect::<Result<_, _>>()?;
    let spread = (0..values.len())
        .map(|i| {
            let col = curves.iter().map(|c| c[i]);
            col.clone().fold(f64::NEG_INFINITY, f64::max) - col.fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let rel = spread / FULL_SCALE;
    Ok(verdict(
        rel < 0.02,
        format!("max pairwise spread {spread:.4} = {:.2}% of full scale (tol 2%), Ω_c = {oc:.4} Ω_c^h", 100.0 * rel),
    ))
}

fn c5_quench_response() -> Result<Verdict, String> {
    let p = PhysicalParams::sr88_defaults(10_000).with_gamma(0.0).with_delta_max(0.0);
    p.validate().map_err(|e| e.to_string())?;
    let opts = OdeOptions { rtol: 1e-10, ..OdeOptions::default() };
    let cases = [(true, 0.2), (true, 0.52), (false, 0.3), (false, 0.52)];
    let results: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(uniform, r)| {
            let grid = if uniform { homogeneous_grid(1, &p) } else { ensemble_grid(30, 1, &p) }.map_err(|e| e.to_string())?;
            let jss = ss_ideal_grid(r, &grid).map_err(|e| e.to_string())?.j_z_weighted.ok_or("no steady state")?;
            let [ev, _] = quench_eigenvalues(jss, &p).map_err(|e| e.to_string())?;
            let proto = DriveProtocol::quench(r * p.omega_c_h(), 40e-6).map_err(|e| e.to_string())?;
            let tr = integrate_from_ground(&grid, &p, &proto, &uniform_samples(40e-6, 40_001), &opts).map_err(|e| e.to_string())?;
            let osc = extract_oscillation(&tr, (0.0, 40e-6)).map_err(|e| e.to_string())?;
            Ok((osc.frequency / ev.im - 1.0, osc.decay_rate * 4.0 / p.kappa - 1.0))
        })
        .collect::<Result<_, String>>()?;
    let f_worst = results.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
    let d_worst = results.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let pass = f_worst < 0.05 && d_worst < 0.25;
    Ok(verdict(
        pass,
        format!("frequency deviation {:.2}% (tol 5%), 1/e time deviation {:.1}% (tol 25%) over 4 quenches", 100.0 * f_worst, 100.0 * d_worst),
    ))
}

fn c6_equilibration_time() -> Result<Verdict, String> {
    let mut worst: f64 = 0.0;
    for r in linspace(0.72, 0.99, 28) {
        let t = equilibration_time(r).map_err(|e| e.to_string())?;
        worst = worst.max((t.closed_form / t.quadrature - 1.0).abs());
    }
    let a = equilibration_time(1.06 / 2f64.sqrt()).map_err(|e| e.to_string())?.closed_form;
    let b = equilibration_time(1.13 / 2f64.sqrt()).map_err(|e| e.to_string())?.closed_form;
    let pass = worst < 5e-3 && (a / 4.8 - 1.0).abs() <= 0.05 && (b / 2.0 - 1.0).abs() <= 0.10;
    Ok(verdict(
        pass,
        format!("closed form vs quadrature {worst:.1e} (tol 0.5%), γT(1.06/√2) = {a:.3} (4.8 ± 5%), γT(1.13/√2) = {b:.3} (2 ± 10%)"),
    ))
}

fn c7_drift_model() -> Result<Verdict, String> {
    let p = PhysicalParams::sr88_defaults(10_000).with_delta_max(0.0);
    let grid = ensemble_grid(20, 1, &p).map_err(|e| e.to_string())?;
    let c = compare_full_and_drift(&p, &grid, 1.06, 3.0 / p.gamma, 601, &OdeOptions::default())
        .map_err(|e| e.to_string())?;
    let rel = c.max_abs_difference / FULL_SCALE;
    Ok(verdict(
        rel <= 0.05,
        format!("max |Δ J̃z| = {:.4} = {:.1}% of full scale (tol 5%) over [1/κ, 3/γ]", c.max_abs_difference, 100.0 * rel),
    ))
}

fn c8_oracle_suite() -> Result<Verdict, String> {
    let rep = run_oracle_check(&OracleSuite::ALL);
    let failed: Vec<String> = rep.checks.iter().filter(|c| !c.pass).map(|c| format!("{:?} {}", c.suite, c.name)).collect();
    let summary = rep
        .checks
        .iter()
        .filter(|c| c.suite != OracleSuite::GeneratorResidual)
        .map(|c| format!("{}={:.2e}", c.name, c.value.unwrap_or(f64::NAN)))
        .collect::<Vec<_>>()
        .join(", ");
    let max_res = rep
        .checks
        .iter()
        .filter(|c| c.suite == OracleSuite::GeneratorResidual)
        .filter_map(|c| c.value)
        .fold(0.0, f64::max);
    Ok(verdict(
        rep.pass,
        format!("{} checks, max generator residual {max_res:.1e}; {summary}; failed: {failed:?}", rep.checks.len()),
    ))
}

fn c9_transmission() -> Result<Verdict, String> {
    let below = linspace(0.1, 0.9, 9);
    let above = linspace(1.05, 1.5, 10);
    let values: Vec<f64> = below.iter().chain(&above).copied().collect();
    let mut doc = standing_wave_sweep(
        10_000,
        values,
        json!({"shape": "ramp", "omega_d": 0.0, "t_ramp": 5e-6, "t_hold": 9.3e-6}),
        json!(["transmission"]),
    );
    doc["n_samples"] = json!(2001);
    doc["tail_fraction"] = json!(5.0 / 9.3);
    let t = sweep(doc)?;
    let tr = column(&t, "transmission_tail");
    let (lo, hi) = tr.split_at(below.len());
    let max_lo = lo.iter().copied().fold(0.0, f64::max);
    let monotone = hi.windows(2).all(|w| w[1] > w[0]);
    Ok(verdict(
        max_lo < 1e-3 && monotone,
        format!("max T below 0.9Ω_c = {max_lo:.1e} (tol 1e-3); T over [1.05, 1.5]Ω_c rising: {monotone} ({:.3} .. {:.3})", hi[0], hi[hi.len() - 1]),
    ))
}

fn c10_quench_above_ramp() -> Result<Verdict, String> {
    let values = linspace(0.05, 0.95, 20);
    let run = |shape: &str, t_ramp: f64| {
        sweep(standing_wave_sweep(
            8_300,
            values.clone(),
            json!({"shape": shape, "omega_d": 0.0, "t_ramp": t_ramp, "t_hold": 9.3e-6}),
            json!(["jz"]),
        ))
        .map(|t| column(&t, "jz_final"))
    };
    let q = run("quench", 0.0)?;
    let r = run("ramp", 5e-6)?;
    let min_gap = q.iter().zip(&r).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    Ok(verdict(min_gap >= 0.0, format!("min (quench − ramp) J̃z over 20 drives = {min_gap:.4}")))
}

type Criterion = (&'static str, fn() -> Result<Verdict, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 second-order transition curve", c1_second_order_curve),
        ("2 critical-drive table", c2_critical_table),
        ("3 first-order jump", c3_first_order_jump),
        ("4 detuning invariance", c4_detuning_invariance),
        ("5 quench linear response", c5_quench_response),
        ("6 equilibration time", c6_equilibration_time),
        ("7 drift-model validation", c7_drift_model),
        ("8 oracle suite", c8_oracle_suite),
        ("9 transmission indicator", c9_transmission),
        ("10 quench above ramp", c10_quench_above_ramp),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "{} criterion {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
