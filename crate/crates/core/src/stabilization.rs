//! Pointwise feedback with a prescribed decay rate.
//!
//! In eigen-coordinates the truncated system is `ċ = A c + B (f, g)ᵀ` with
//! `A = diag(iω_n)` and `B` the projection of the Dirac input at `x₀`. With the
//! weighted Gramian
//!
//! ```text
//!     Λ_ω = ∫_0^{T_h} e^{−2ωs} e^{−As} B Bᴴ e^{−Aᴴs} ds
//! ```
//!
//! the feedback `(f, g)ᵀ = K c`, `K = −Bᴴ Λ_ω⁻¹`, satisfies
//! `(A+BK)Λ_ω + Λ_ω(A+BK)ᴴ ≤ −2ωΛ_ω`, so every closed-loop eigenvalue has real part
//! at most `−ω`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::exp_moment;
use crate::linalg::{hermitian_eigenvalues, symmetrize};
use crate::modal::{energy, ModalState};
use crate::spectral::{critical_time, resonance_check, ModeBranch, PhysicalParams, Spectrum};

/// Number of uniform steps used by [`closed_loop_simulate`].
pub const SIMULATION_STEPS: usize = 400;
/// Largest admissible condition number of `Λ_ω`.
pub const MAX_GRAMIAN_CONDITION: f64 = 1e14;
/// Frequencies closer than this are reported as a resonance.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Feedback functionals `F`, `G` as rows over modal coordinates:
/// `f(t) = Σ_n F_n c_n(t)`, `g(t) = Σ_n G_n c_n(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackGains {
    pub f_row: Vec<Complex64>,
    pub g_row: Vec<Complex64>,
    pub omega_target: f64,
    pub horizon: f64,
    pub x0: f64,
}

impl FeedbackGains {
    /// The open loop.
    pub fn zero(dim: usize, x0: f64) -> Self {
        let zeros = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            f_row: zeros.clone(),
            g_row: zeros,
            omega_target: 0.0,
            horizon: 0.0,
            x0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f_row
            .iter()
            .chain(&self.g_row)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |K_{−k}^± − conj(K_k^±)|` over both rows; zero means real fields
    /// produce real feedback.
    pub fn conjugate_symmetry_residual(&self, spec: &Spectrum) -> f64 {
        let n = spec.n();
        let mut worst: f64 = 0.0;
        for row in [&self.f_row, &self.g_row] {
            for idx in 0..row.len() {
                let mb = spec.label(idx);
                let mirror = ModeBranch::new(-mb.k, mb.branch).index(n);
                worst = worst.max((row[mirror] - row[idx].conj()).norm());
            }
        }
        worst
    }

    /// Feedback values `(F c, G c)`.
    pub fn apply(&self, state: &ModalState) -> (Complex64, Complex64) {
        let dot = |row: &[Complex64]| row.iter().zip(state.coeffs()).map(|(k, c)| k * c).sum();
        (dot(&self.f_row), dot(&self.g_row))
    }
}

/// Input matrix: column 0 feeds the u-equation, column 1 the v-equation.
pub fn input_matrix(spec: &Spectrum, x0: f64) -> DMatrix<Complex64> {
    let w = spec.params().weight();
    DMatrix::from_fn(spec.dim(), 2, |i, j| {
        let z = spec.z(i);
        let phase = Complex64::from_polar(1.0, -(spec.k(i) as f64) * x0);
        let comp = if j == 0 { z[0] } else { w * z[1] };
        phase * comp / (2.0 * PI * spec.norm_sq(i))
    })
}

/// `diag(iω_n)`.
pub fn generator(spec: &Spectrum) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        spec.dim(),
        (0..spec.dim()).map(|i| Complex64::new(0.0, spec.omega(i))),
    ))
}

/// `Λ_ω` in closed form.
pub fn weighted_gramian(spec: &Spectrum, x0: f64, omega: f64, horizon: f64) -> DMatrix<Complex64> {
    let b = input_matrix(spec, x0);
    let bb = &b * b.adjoint();
    let dim = spec.dim();
    let g = DMatrix::from_fn(dim, dim, |m, n| {
        let rate = Complex64::new(-2.0 * omega, spec.omega(n) - spec.omega(m));
        bb[(m, n)] * exp_moment(0, rate, horizon)
    });
    symmetrize(&g)
}

pub fn feedback_gains(
    params: &PhysicalParams,
    n: usize,
    x0: f64,
    omega_target: f64,
    horizon: f64,
) -> Result<FeedbackGains> {
    feedback_gains_on(&Spectrum::new(*params, n), x0, omega_target, horizon)
}

pub fn feedback_gains_on(
    spec: &Spectrum,
    x0: f64,
    omega_target: f64,
    horizon: f64,
) -> Result<FeedbackGains> {
    let params = spec.params();
    if !(omega_target > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "decay rate must be positive, got {omega_target}"
        )));
    }
    let t0 = critical_time(params);
    if !(horizon > t0) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} must exceed the critical time {t0}"
        )));
    }
    let res = resonance_check(params, spec.n(), RESONANCE_TOL)?;
    if !res.is_clean() {
        let (p, q) = res.pairs[0];
        return Err(Error::InvalidArgument(format!(
            "resonant frequencies {p} and {q}; gains are undefined"
        )));
    }
    let gram = weighted_gramian(spec, x0, omega_target, horizon);
    let ev = hermitian_eigenvalues(&gram);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if !(lo > 0.0) || hi / lo > MAX_GRAMIAN_CONDITION {
        return Err(Error::GramianSingular { min_eig: lo });
    }
    let chol = gram
        .cholesky()
        .ok_or(Error::GramianSingular { min_eig: lo })?;
    let b = input_matrix(spec, x0);
    // K = −Bᴴ Λ⁻¹ = −(Λ⁻¹ B)ᴴ
    let x = chol.solve(&b);
    let f_row: Vec<Complex64> = x.column(0).iter().map(|z| -z.conj()).collect();
    let g_row: Vec<Complex64> = x.column(1).iter().map(|z| -z.conj()).collect();
    // real fields must give real feedback: K_{−k} = conj(K_k)
    Ok(FeedbackGains {
        f_row: conjugate_symmetrize(spec, &f_row),
        g_row: conjugate_symmetrize(spec, &g_row),
        omega_target,
        horizon,
        x0,
    })
}

fn conjugate_symmetrize(spec: &Spectrum, row: &[Complex64]) -> Vec<Complex64> {
    let n = spec.n();
    (0..row.len())
        .map(|idx| {
            let mb = spec.label(idx);
            let mirror = ModeBranch::new(-mb.k, mb.branch).index(n);
            0.5 * (row[idx] + row[mirror].conj())
        })
        .collect()
}

/// `A + B K`.
pub fn closed_loop_matrix(spec: &Spectrum, gains: &FeedbackGains) -> DMatrix<Complex64> {
    let dim = spec.dim();
    let k = DMatrix::from_fn(2, dim, |r, c| {
        if r == 0 {
            gains.f_row[c]
        } else {
            gains.g_row[c]
        }
    });
    generator(spec) + input_matrix(spec, gains.x0) * k
}

/// Largest real part of the eigenvalues.
pub fn spectral_abscissa(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form has a triangular factor")
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Energies along a closed-loop trajectory and the fitted decay.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// `−slope/2` of the least-squares line through `log E(t)` over the second half,
    /// i.e. the decay rate of the norm.
    pub fitted_rate: f64,
    /// `max_t √(E(t)/E(0)) e^{0.9 ω t}`.
    pub fitted_m: f64,
}

/// Integrate the closed loop with the exact step propagator `exp(h(A+BK))`.
pub fn closed_loop_simulate(
    spec: &Spectrum,
    gains: &FeedbackGains,
    state0: &ModalState,
    t_sim: f64,
) -> Result<SimulationReport> {
    if !(t_sim > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "simulation horizon must be positive, got {t_sim}"
        )));
    }
    let e0 = energy(spec, state0);
    if !(e0 > 0.0) {
        return Err(Error::InvalidArgument(
            "initial state has zero energy".into(),
        ));
    }
    let h = t_sim / SIMULATION_STEPS as f64;
    let step = (closed_loop_matrix(spec, gains) * Complex64::new(h, 0.0)).exp();
    let mut x = DVector::from_column_slice(state0.coeffs());
    let mut times = Vec::with_capacity(SIMULATION_STEPS + 1);
    let mut energies = Vec::with_capacity(SIMULATION_STEPS + 1);
    for j in 0..=SIMULATION_STEPS {
        if j > 0 {
            x = &step * x;
        }
        let state = ModalState::from_coeffs(spec.n(), x.iter().copied().collect())?;
        times.push(j as f64 * h);
        energies.push(energy(spec, &state));
    }
    let tail: Vec<(f64, f64)> = times
        .iter()
        .zip(&energies)
        .skip(SIMULATION_STEPS / 2)
        .filter(|(_, e)| **e > 0.0)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    let fitted_rate = -least_squares_slope(&tail) / 2.0;
    let fitted_m = times
        .iter()
        .zip(&energies)
        .map(|(t, e)| (e / e0).sqrt() * (0.9 * gains.omega_target * t).exp())
        .fold(0.0, f64::max);
    Ok(SimulationReport {
        times,
        energies,
        fitted_rate,
        fitted_m,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
