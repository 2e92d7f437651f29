//! Deterministic quadrature grids for the coupling and AC-Stark broadening
//! distributions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, TWO_PI};

/// Smallest coupling grid for which Σ w η² = 1 holds.
pub const MIN_N_PHI: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    /// g_k / g_rms.
    pub eta: f64,
    /// δ_k − δ̄ in rad/s.
    pub delta_centered: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleGrid {
    pub nodes: Vec<GridNode>,
    /// δ̄ in rad/s.
    pub mean_delta: f64,
    /// Standard deviation of the broadening distribution in rad/s.
    pub std_delta: f64,
}

/// Equal-weight broadening nodes with the analytic moments of the distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadeningNodes {
    pub nodes: Vec<(f64, f64)>,
    pub mean: f64,
    pub std: f64,
}

/// Coupling nodes η_j = √2 cos(2πj/n_phi), j = 1..n_phi, each of weight 1/n_phi.
pub fn coupling_grid(n_phi: usize) -> Result<Vec<(f64, f64)>> {
    if n_phi < MIN_N_PHI {
        return Err(Error::Grid(format!(
            "n_phi = {n_phi}: need at least {MIN_N_PHI} coupling nodes for sum(w eta^2) = 1"
        )));
    }
    let w = 1.0 / n_phi as f64;
    Ok((1..=n_phi)
        .map(|j| (2f64.sqrt() * (TWO_PI * j as f64 / n_phi as f64).cos(), w))
        .collect())
}

/// Quantile nodes of P(δ) ∝ (δ/δ_max)^(r−1) on (0, δ_max).
pub fn broadening_nodes(n_delta: usize, trap_depth_ratio: f64, delta_max: f64) -> Result<BroadeningNodes> {
    if n_delta < 1 {
        return Err(Error::Grid("n_delta must be >= 1".into()));
    }
    if !(delta_max.is_finite() && delta_max >= 0.0) {
        return Err(Error::Domain(format!("delta_max = {delta_max} must be finite and >= 0")));
    }
    let r = trap_depth_ratio;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("trap depth ratio {r} must be finite and > 0")));
    }
    let w = 1.0 / n_delta as f64;
    let nodes = (1..=n_delta)
        .map(|i| {
            let q = (i as f64 - 0.5) / n_delta as f64;
            (delta_max * q.powf(1.0 / r), w)
        })
        .collect();
    let mean = delta_max * r / (r + 1.0);
    let std = delta_max * (r / (r + 2.0)).sqrt() / (r + 1.0);
    Ok(BroadeningNodes { nodes, mean, std })
}

/// Outer product of `n_phi` coupling nodes and `n_delta` broadening nodes.
///
/// Detunings are centered on the mean of the discrete nodes so that
/// Σ w δ_centered vanishes to rounding; `mean_delta` and `std_delta`
/// report the analytic moments.
pub fn ensemble_grid(n_phi: usize, n_delta: usize, p: &PhysicalParams) -> Result<EnsembleGrid> {
    let couplings = coupling_grid(n_phi)?;
    build(&couplings, n_delta, p)
}

/// Uniform coupling (η = 1) with the broadening distribution of `p`.
pub fn homogeneous_grid(n_delta: usize, p: &PhysicalParams) -> Result<EnsembleGrid> {
    build(&[(1.0, 1.0)], n_delta, p)
}

fn build(couplings: &[(f64, f64)], n_delta: usize, p: &PhysicalParams) -> Result<EnsembleGrid> {
    let b = broadening_nodes(n_delta, p.trap_depth_ratio, p.delta_max)?;
    let node_mean = b.nodes.iter().map(|(d, w)| d * w).sum::<f64>();
    let mut nodes = Vec::with_capacity(couplings.len() * b.nodes.len());
    for &(eta, wc) in couplings {
        for &(d, wd) in &b.nodes {
            nodes.push(GridNode { eta, delta_centered: d - node_mean, weight: wc * wd });
        }
    }
    Ok(EnsembleGrid { nodes, mean_delta: b.mean, std_delta: b.std })
}

impl EnsembleGrid {
    /// Grid from explicit nodes; moments are taken from the nodes themselves.
    pub fn from_nodes(nodes: Vec<GridNode>) -> Self {
        let mean = nodes.iter().map(|n| n.weight * n.delta_centered).sum::<f64>();
        let var = nodes
            .iter()
            .map(|n| n.weight * (n.delta_centered - mean).powi(2))
            .sum::<f64>();
        Self { nodes, mean_delta: 0.0, std_delta: var.sqrt() }
    }

    /// A single group with η = 1 and no broadening.
    pub fn single() -> Self {
        Self::from_nodes(vec![GridNode { eta: 1.0, delta_centered: 0.0, weight: 1.0 }])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w η^power.
    pub fn eta_moment(&self, power: i32) -> f64 {
        self.nodes.iter().map(|n| n.weight * n.eta.powi(power)).sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.nodes.iter().map(|n| n.delta_centered.abs()).fold(0.0, f64::max)
    }

    /// CSV with columns `eta,delta_centered_2pi_hz,weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eta", "delta_centered_2pi_hz", "weight"])?;
        for n in &self.nodes {
            w.write_record([
                format!("{:.17e}", n.eta),
                format!("{:.17e}", n.delta_centered / TWO_PI),
                format!("{:.17e}", n.weight),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_node_coupling_grid() {
        let g = coupling_grid(4).unwrap();
        let s2 = 2f64.sqrt();
        let want = [0.0, -s2, 0.0, s2];
        for ((eta, w), v) in g.iter().zip(want) {
            assert!((eta - v).abs() < 1e-15);
            assert_eq!(*w, 0.25);
        }
        let m2: f64 = g.iter().map(|(e, w)| w * e * e).sum();
        assert!((m2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thirty_node_normalization() {
        let g = coupling_grid(30).unwrap();
        assert_eq!(g.len(), 30);
        let m2: f64 = g.iter().map(|(e, w)| w * e * e).sum();
        assert!((m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_grid_breaks_normalization_and_is_rejected() {
        // Direct evaluation: η = √2cos(π) and √2cos(2π) give Σwη² = 2.
        let m2: f64 = (1..=2)
            .map(|j| 0.5 * 2.0 * (TWO_PI * j as f64 / 2.0).cos().powi(2))
            .sum();
        assert!((m2 - 2.0).abs() < 1e-15);
        assert!(matches!(coupling_grid(2), Err(Error::Grid(_))));
        assert!(matches!(coupling_grid(1), Err(Error::Grid(_))));
    }

    #[test]
    fn odd_grids_also_normalized() {
        for n in [3, 5, 7, 21] {
            let m2: f64 = coupling_grid(n).unwrap().iter().map(|(e, w)| w * e * e).sum();
            assert!((m2 - 1.0).abs() < 1e-12, "n_phi = {n}");
        }
    }

    #[test]
    fn default_broadening_moments() {
        let dmax = TWO_PI * 125e3;
        let b = broadening_nodes(40, 6.34, dmax).unwrap();
        assert!((b.mean / dmax - 6.34 / 7.34).abs() < 1e-14);
        // The analytic ratio is √(r/(r+2))/(r+1) = 0.1188.
        let ratio = b.std / dmax;
        assert!((ratio - (6.34f64 / 8.34).sqrt() / 7.34).abs() < 1e-14);
        assert!((ratio - 0.11).abs() < 0.01);
        assert!((b.std / TWO_PI - 14e3).abs() < 3e3);
    }

    #[test]
    fn no_broadening() {
        let b = broadening_nodes(10, 6.34, 0.0).unwrap();
        assert!(b.nodes.iter().all(|(d, _)| *d == 0.0));
        assert_eq!(b.std, 0.0);
        assert!(matches!(broadening_nodes(10, 6.34, -1.0), Err(Error::Domain(_))));
        assert!(broadening_nodes(0, 6.34, 1.0).is_err());
    }

    #[test]
    fn dense_nodes_reproduce_analytic_std() {
        let b = broadening_nodes(100_000, 6.34, 1.0).unwrap();
        let n = b.nodes.len() as f64;
        let mean = b.nodes.iter().map(|(d, _)| d).sum::<f64>() / n;
        let var = b.nodes.iter().map(|(d, _)| (d - mean).powi(2)).sum::<f64>() / n;
        assert!((var.sqrt() / b.std - 1.0).abs() < 1e-3);
        assert!((mean / b.mean - 1.0).abs() < 1e-3);
    }

    #[test]
    fn full_grid_layout_and_invariants() {
        let p = PhysicalParams::sr88_defaults(10_000);
        let g = ensemble_grid(20, 40, &p).unwrap();
        assert_eq!(g.len(), 800);
        assert!((g.weight_sum() - 1.0).abs() < 1e-12);
        assert!((g.eta_moment(2) - 1.0).abs() < 1e-3);
        let first: f64 = g.nodes.iter().map(|n| n.weight * n.delta_centered).sum();
        assert!(first.abs() < 1e-9 * p.delta_max);
        let cross: f64 = g.nodes.iter().map(|n| n.weight * n.eta.powi(2) * n.delta_centered).sum();
        assert!(cross.abs() < 1e-9 * p.delta_max);
        assert!(ensemble_grid(1, 40, &p).is_err());
    }

    #[test]
    fn csv_columns() {
        let p = PhysicalParams::sr88_defaults(100);
        let g = ensemble_grid(3, 2, &p).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "eta,delta_centered_2pi_hz,weight");
        assert_eq!(lines.count(), 6);
    }

    proptest! {
        #[test]
        fn quantile_cdf_within_one_over_n(r in 0.2f64..20.0, n in 1usize..200) {
            let b = broadening_nodes(n, r, 1.0).unwrap();
            // Empirical CDF steps at the nodes; compare with q = δ^r on both sides of each step.
            for (i, (d, _)) in b.nodes.iter().enumerate() {
                let analytic = d.powf(r);
                let below = i as f64 / n as f64;
                let above = (i + 1) as f64 / n as f64;
                prop_assert!((analytic - below).abs() <= 1.0 / n as f64 + 1e-12);
                prop_assert!((analytic - above).abs() <= 1.0 / n as f64 + 1e-12);
            }
        }

        #[test]
        fn grids_are_normalized_and_centered(n_phi in 3usize..40, n_delta in 1usize..60, dmax in 0.0f64..1e6) {
            let mut p = PhysicalParams::sr88_defaults(100);
            p.delta_max = dmax;
            let g = ensemble_grid(n_phi, n_delta, &p).unwrap();
            prop_assert!((g.weight_sum() - 1.0).abs() < 1e-12);
            prop_assert!((g.eta_moment(2) - 1.0).abs() < 1e-12);
            let c: f64 = g.nodes.iter().map(|n| n.weight * n.delta_centered).sum();
            prop_assert!(c.abs() <= 1e-9 * dmax.max(1e-300));
        }
    }
}
