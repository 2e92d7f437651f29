//! Exact small-N quantum references: the analytic steady state of the
//! adiabatically eliminated collective model in the Dicke basis, a
//! brute-force atom ⊗ cavity Liouvillian steady state, and the spherical
//! distribution of the normal phase.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::numerics::gauss_legendre;

pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub const MAX_DICKE_ATOMS: u64 = 200;
pub const MAX_LIOUVILLIAN_ATOMS: u64 = 4;
/// Largest Hilbert dimension accepted by the Liouvillian solver; the
/// superoperator is the square of this.
pub const MAX_LIOUVILLIAN_DIM: usize = 30;

/// Collective spin operators for J = N/2.
///
/// Basis index i holds m = −J + i, so index 0 is the fully inverted-down
/// state and J⁻ has its entries on the superdiagonal. For N = 1 the basis
/// is (|↓⟩, |↑⟩) and J⁻ = [[0, 1], [0, 0]].
#[derive(Debug, Clone)]
pub struct DickeOperators {
    pub dimension: usize,
    pub j_minus: CMatrix,
    pub j_plus: CMatrix,
    pub j_z: CMatrix,
    pub j_x: CMatrix,
}

pub fn dicke_operators(n_atoms: u64) -> Result<DickeOperators> {
    if n_atoms < 1 {
        return Err(Error::InvalidParams("n_atoms must be >= 1".into()));
    }
    if n_atoms > MAX_DICKE_ATOMS {
        return Err(Error::DimensionOverflow(format!(
            "{n_atoms} atoms exceeds the Dicke-basis limit of {MAX_DICKE_ATOMS}"
        )));
    }
    let d = n_atoms as usize + 1;
    let j = 0.5 * n_atoms as f64;
    let mut j_minus = CMatrix::zeros(d, d);
    let mut j_z = CMatrix::zeros(d, d);
    for i in 0..d {
        let m = -j + i as f64;
        j_z[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            j_minus[(i - 1, i)] = Complex64::new((j * (j + 1.0) - m * (m - 1.0)).sqrt(), 0.0);
        }
    }
    let j_plus = j_minus.adjoint();
    let j_x = (&j_plus + &j_minus) * Complex64::new(0.5, 0.0);
    Ok(DickeOperators { dimension: d, j_minus, j_plus, j_z, j_x })
}

/// Dense density matrix with validity diagnostics.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Hermitizes and trace-normalizes `m`.
    pub fn from_unnormalized(m: CMatrix) -> Result<Self> {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = h.trace().re;
        if !(tr.is_finite() && tr.abs() > 0.0) {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        Ok(Self { matrix: h / Complex64::new(tr, 0.0) })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn expect(&self, op: &CMatrix) -> Complex64 {
        (&self.matrix * op).trace()
    }

    pub fn diagnostics(&self) -> DensityDiagnostics {
        let m = &self.matrix;
        let hermiticity_error = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let eig = nalgebra::SymmetricEigen::new(m.clone());
        let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        DensityDiagnostics { hermiticity_error, trace_error: (m.trace().re - 1.0).abs(), min_eigenvalue }
    }

    /// Hermiticity to 1e-10, unit trace to 1e-10 and eigenvalues above −1e-8.
    pub fn validate(&self) -> Result<DensityDiagnostics> {
        let d = self.diagnostics();
        if d.hermiticity_error > 1e-10 || d.trace_error > 1e-10 || d.min_eigenvalue < -1e-8 {
            return Err(Error::Validity(format!("density matrix check failed: {d:?}")));
        }
        Ok(d)
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        0.5 * nalgebra::SymmetricEigen::new(herm).eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Exact steady state of the collective model together with the observables
/// and checks reported for it.
#[derive(Debug, Clone)]
pub struct CrfSteadyState {
    pub n_atoms: u64,
    pub r: f64,
    pub rho: DensityMatrix,
    pub ops: DickeOperators,
    /// Frobenius condition estimate of J⁻ + iλ.
    pub condition: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrfReport {
    pub n_atoms: u64,
    pub r: f64,
    /// λ = Ω_d/Γ = r·N/2.
    pub lambda: f64,
    /// 2⟨J_z⟩/N.
    pub j_z_scaled: f64,
    pub mean_field_j_z: Option<f64>,
    pub j_minus: Complex64,
    pub j_x_squared: f64,
    pub generator_residual: f64,
    pub condition: f64,
    pub diagnostics: DensityDiagnostics,
}

/// ρ ∝ (J⁻ + iλ)⁻¹ (J⁺ − iλ)⁻¹ with λ = r·N/2, the steady state of
/// dρ/dt = −i(λ/2)[J⁺ + J⁻, ρ] + J⁻ρJ⁺ − ½{J⁺J⁻, ρ} in units of Γ.
pub fn crf_exact_steady_state(n_atoms: u64, r: f64) -> Result<CrfSteadyState> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!("drive ratio {r} must be finite and >= 0")));
    }
    let ops = dicke_operators(n_atoms)?;
    let lambda = 0.5 * r * n_atoms as f64;
    if lambda == 0.0 {
        return Err(Error::IllConditioned { condition: f64::INFINITY });
    }
    let d = ops.dimension;
    // A = J⁻ + iλ is upper bidiagonal; back-substitution for X = A⁻¹ involves
    // only products, so there is no cancellation.
    let diag = I * lambda;
    let mut x = CMatrix::zeros(d, d);
    for col in 0..d {
        x[(col, col)] = ONE / diag;
        for row in (0..col).rev() {
            x[(row, col)] = -ops.j_minus[(row, row + 1)] * x[(row + 1, col)] / diag;
        }
    }
    let a = &ops.j_minus + CMatrix::identity(d, d) * diag;
    let condition = a.norm() * x.norm();
    if !condition.is_finite() {
        return Err(Error::IllConditioned { condition });
    }
    let rho = DensityMatrix::from_unnormalized(&x * x.adjoint())?;
    Ok(CrfSteadyState { n_atoms, r, rho, ops, condition })
}

impl CrfSteadyState {
    pub fn lambda(&self) -> f64 {
        0.5 * self.r * self.n_atoms as f64
    }

    /// 2⟨J_z⟩/N.
    pub fn j_z_scaled(&self) -> f64 {
        2.0 * self.rho.expect(&self.ops.j_z).re / self.n_atoms as f64
    }

    pub fn j_minus(&self) -> Complex64 {
        self.rho.expect(&self.ops.j_minus)
    }

    pub fn j_x_squared(&self) -> f64 {
        self.rho.expect(&(&self.ops.j_x * &self.ops.j_x)).re
    }

    /// Generator applied to ρ.
    pub fn generator(&self, rho: &CMatrix) -> CMatrix {
        let o = &self.ops;
        let h = (&o.j_plus + &o.j_minus) * Complex64::new(0.5 * self.lambda(), 0.0);
        let pm = &o.j_plus * &o.j_minus;
        let comm = &h * rho - rho * &h;
        comm * (-I) + &o.j_minus * rho * &o.j_plus - (&pm * rho + rho * &pm) * Complex64::new(0.5, 0.0)
    }

    /// ‖L(ρ)‖/‖ρ‖ in Frobenius norm.
    pub fn generator_residual(&self) -> f64 {
        self.generator(&self.rho.matrix).norm() / self.rho.matrix.norm()
    }

    pub fn report(&self) -> CrfReport {
        let mean_field_j_z = (self.r <= 1.0).then(|| -(1.0 - self.r * self.r).sqrt());
        CrfReport {
            n_atoms: self.n_atoms,
            r: self.r,
            lambda: self.lambda(),
            j_z_scaled: self.j_z_scaled(),
            mean_field_j_z,
            j_minus: self.j_minus(),
            j_x_squared: self.j_x_squared(),
            generator_residual: self.generator_residual(),
            condition: self.condition,
            diagnostics: self.rho.diagnostics(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomBasis {
    /// Symmetric Dicke states; used when there is no single-atom decay.
    Dicke,
    /// Full 2^N product basis, needed for single-atom decay.
    Product,
}

/// Steady state of the driven Tavis-Cummings model with cavity loss (and
/// single-atom decay when γ > 0) on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct LiouvillianSteadyState {
    pub rho: DensityMatrix,
    pub basis: AtomBasis,
    pub atom_dim: usize,
    pub fock_dim: usize,
    pub top_fock_population: f64,
    /// ⟨a⟩ (not normalized by √N).
    pub field: Complex64,
    /// Two smallest singular values of the superoperator, ascending.
    pub smallest_singular_values: [f64; 2],
    pub generator_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiouvillianReport {
    pub n_atoms: u64,
    pub n_max_photons: usize,
    pub basis: AtomBasis,
    pub omega_d: f64,
    pub field_re: f64,
    pub field_im: f64,
    pub top_fock_population: f64,
    pub smallest_singular_values: [f64; 2],
    pub generator_norm: f64,
    pub diagnostics: DensityDiagnostics,
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Single-atom lowering operators σ⁻_k in the 2^N product basis (bit k set
/// means atom k excited).
fn product_lowering(n_atoms: usize) -> Vec<CMatrix> {
    let d = 1usize << n_atoms;
    (0..n_atoms)
        .map(|k| {
            let mut m = CMatrix::zeros(d, d);
            for s in 0..d {
                if s & (1 << k) != 0 {
                    m[(s & !(1 << k), s)] = ONE;
                }
            }
            m
        })
        .collect()
}

/// Builds the superoperator for H = g(a†J⁻ + aJ⁺) − i(κΩ_d/4g)(a − a†) with
/// collapse operators √κ a and, if γ > 0, √γ σ⁻_k, and returns its null vector.
///
/// `p.n_atoms` is ignored in favour of `n_atoms`.
pub fn liouvillian_steady_state(
    n_atoms: u64,
    n_max_photons: usize,
    p: &PhysicalParams,
    omega_d: f64,
) -> Result<LiouvillianSteadyState> {
    if !(1..=MAX_LIOUVILLIAN_ATOMS).contains(&n_atoms) {
        return Err(Error::DimensionOverflow(format!(
            "Liouvillian oracle supports 1..={MAX_LIOUVILLIAN_ATOMS} atoms, got {n_atoms}"
        )));
    }
    if !(omega_d.is_finite() && omega_d >= 0.0) {
        return Err(Error::Domain("omega_d must be finite and >= 0".into()));
    }
    let n = n_atoms as usize;
    let (basis, atom_dim) = if p.gamma > 0.0 && n > 1 { (AtomBasis::Product, 1usize << n) } else { (AtomBasis::Dicke, n + 1) };
    let fock_dim = n_max_photons + 1;
    let dim = atom_dim * fock_dim;
    if dim > MAX_LIOUVILLIAN_DIM {
        return Err(Error::DimensionOverflow(format!(
            "Hilbert dimension {dim} exceeds {MAX_LIOUVILLIAN_DIM}"
        )));
    }

    let (j_minus, atom_lowering) = match basis {
        AtomBasis::Dicke => {
            let ops = dicke_operators(n_atoms)?;
            let low = if p.gamma > 0.0 { vec![ops.j_minus.clone()] } else { Vec::new() };
            (ops.j_minus, low)
        }
        AtomBasis::Product => {
            let low = product_lowering(n);
            let sum = low.iter().fold(CMatrix::zeros(atom_dim, atom_dim), |acc, m| acc + m);
            (sum, low)
        }
    };
    let mut a_fock = CMatrix::zeros(fock_dim, fock_dim);
    for k in 1..fock_dim {
        a_fock[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let ia = CMatrix::identity(atom_dim, atom_dim);
    let ic = CMatrix::identity(fock_dim, fock_dim);
    let a = kron(&ia, &a_fock);
    let ad = a.adjoint();
    let jm = kron(&j_minus, &ic);
    let jp = jm.adjoint();
    let g = Complex64::new(p.g_rms, 0.0);
    let eps = p.kappa * omega_d / (4.0 * p.g_rms);
    let h = (&ad * &jm + &a * &jp) * g - (&a - &ad) * (I * eps);

    let id = CMatrix::identity(dim, dim);
    // Row-major vectorization: vec(A X B) = (A ⊗ Bᵀ) vec(X).
    let mut l = (kron(&h, &id) - kron(&id, &h.transpose())) * (-I);
    let mut add_dissipator = |c: &CMatrix, rate: f64| {
        let cdc = c.adjoint() * c;
        let d = kron(c, &c.conjugate()) - kron(&cdc, &id) * Complex64::new(0.5, 0.0)
            - kron(&id, &cdc.transpose()) * Complex64::new(0.5, 0.0);
        l += d * Complex64::new(rate, 0.0);
    };
    add_dissipator(&a, p.kappa);
    if p.gamma > 0.0 {
        match basis {
            AtomBasis::Product => {
                for s in &atom_lowering {
                    add_dissipator(&kron(s, &ic), p.gamma);
                }
            }
            // A single atom: J⁻ is σ⁻.
            AtomBasis::Dicke => add_dissipator(&kron(&atom_lowering[0], &ic), p.gamma),
        }
    }

    let svd = l.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let generator_norm = svd.singular_values[order[order.len() - 1]];
    let threshold = 1e-8 * generator_norm;
    let s0 = svd.singular_values[order[0]];
    let s1 = svd.singular_values[order[1]];
    if s0 > threshold {
        return Err(Error::NullSpaceMissing { sigma: s0, threshold });
    }
    let multiplicity = order.iter().filter(|&&i| svd.singular_values[i] <= threshold).count();
    if multiplicity > 1 {
        return Err(Error::NullSpaceDegenerate { multiplicity });
    }
    let null = v_t.row(order[0]).map(|z| z.conj());
    let rho_raw = CMatrix::from_row_slice(dim, dim, null.as_slice());
    let rho = DensityMatrix::from_unnormalized(rho_raw)?;

    let fock_pops = fock_populations(&rho, atom_dim, fock_dim);
    let top_fock_population = fock_pops[fock_dim - 1];
    if top_fock_population > 1e-6 {
        return Err(Error::Truncation { top_population: top_fock_population });
    }
    let field = rho.expect(&a);
    Ok(LiouvillianSteadyState {
        rho,
        basis,
        atom_dim,
        fock_dim,
        top_fock_population,
        field,
        smallest_singular_values: [s0, s1],
        generator_norm,
    })
}

fn fock_populations(rho: &DensityMatrix, atom_dim: usize, fock_dim: usize) -> Vec<f64> {
    (0..fock_dim)
        .map(|n| (0..atom_dim).map(|a| rho.matrix[(a * fock_dim + n, a * fock_dim + n)].re).sum())
        .collect()
}

impl LiouvillianSteadyState {
    /// Atomic state with the cavity traced out.
    pub fn atom_reduced(&self) -> Result<DensityMatrix> {
        let (da, dc) = (self.atom_dim, self.fock_dim);
        let mut m = CMatrix::zeros(da, da);
        for i in 0..da {
            for j in 0..da {
                m[(i, j)] = (0..dc).map(|c| self.rho.matrix[(i * dc + c, j * dc + c)]).sum();
            }
        }
        DensityMatrix::from_unnormalized(m)
    }

    pub fn report(&self, n_atoms: u64, omega_d: f64) -> LiouvillianReport {
        LiouvillianReport {
            n_atoms,
            n_max_photons: self.fock_dim - 1,
            basis: self.basis,
            omega_d,
            field_re: self.field.re,
            field_im: self.field.im,
            top_fock_population: self.top_fock_population,
            smallest_singular_values: self.smallest_singular_values,
            generator_norm: self.generator_norm,
            diagnostics: self.rho.diagnostics(),
        }
    }
}

/// Normal-phase distribution P(θ, φ) ∝ 1/|sin θ e^{iφ} + i r|² on the unit
/// sphere with measure sin θ dθ dφ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalDistribution {
    pub r: f64,
    pub normalization: f64,
}

impl SphericalDistribution {
    pub fn unnormalized(r: f64, theta: f64, phi: f64) -> f64 {
        let s = theta.sin();
        1.0 / (s * s + r * r + 2.0 * r * s * phi.sin())
    }

    pub fn density(&self, theta: f64, phi: f64) -> f64 {
        Self::unnormalized(self.r, theta, phi) / self.normalization
    }
}

/// Moments of the normal-phase distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalPhaseMoments {
    pub distribution: SphericalDistribution,
    /// ⟨J_z⟩/(N/2) = ⟨cos θ⟩.
    pub j_z_scaled: f64,
    /// ⟨|J⁻|²⟩/(N/2)² = ⟨sin² θ⟩.
    pub j_perp_squared: f64,
    pub n_quad: usize,
}

/// 2D quadrature (Gauss-Legendre in θ, trapezoid in φ)
/// at `n_quad` and `2·n_quad` points per axis; fails if the two differ by
/// more than 1e-6.
pub fn normal_phase_moments(r: f64, n_quad: usize) -> Result<NormalPhaseMoments> {
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::Domain(format!("normal phase needs r > 1, got {r}")));
    }
    if n_quad < 64 {
        return Err(Error::InvalidParams(format!("n_quad = {n_quad}: need at least 64")));
    }
    let coarse = sphere_moments(r, n_quad);
    let fine = sphere_moments(r, 2 * n_quad);
    let change = (fine[0] / coarse[0] - 1.0)
        .abs()
        .max((fine[1] / fine[0] - coarse[1] / coarse[0]).abs())
        .max((fine[2] / fine[0] - coarse[2] / coarse[0]).abs());
    if change > 1e-6 {
        return Err(Error::QuadratureNonConvergence { change });
    }
    let [norm, cz, s2] = fine;
    Ok(NormalPhaseMoments {
        distribution: SphericalDistribution { r, normalization: norm },
        j_z_scaled: cz / norm,
        j_perp_squared: s2 / norm,
        n_quad: 2 * n_quad,
    })
}

/// (∫P, ∫P cos θ, ∫P sin² θ) with measure sin θ dθ dφ.
fn sphere_moments(r: f64, n: usize) -> [f64; 3] {
    let (x, w) = gauss_legendre(n);
    let half_pi = 0.5 * std::f64::consts::PI;
    let dphi = std::f64::consts::TAU / n as f64;
    let mut out = [0.0; 3];
    for (xi, wi) in x.iter().zip(&w) {
        let theta = half_pi * (xi + 1.0);
        let (st, ct) = theta.sin_cos();
        let phi_sum: f64 = (0..n).map(|j| SphericalDistribution::unnormalized(r, theta, j as f64 * dphi)).sum::<f64>() * dphi;
        let base = wi * half_pi * st * phi_sum;
        out[0] += base;
        out[1] += base * ct;
        out[2] += base * st * st;
    }
    out
}
