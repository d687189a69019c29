//! States in the eigenbasis and their evolution.
//!
//! A forward state is a finite family of coefficients `c_k^±` representing
//!
//! ```text
//!     (u, v)(t, x) = Σ_{|k|≤N} (c_k^+ e^{iω_k^+ t} Z_k^+ + c_k^− e^{iω_k^− t} Z_k^−) e^{ikx}.
//! ```
//!
//! Adjoint states use the eigenvectors `W_k^± = diag(1, ac/d) Z_k^±` of `S_kᵀ`.
//! Fourier coefficients follow `u(x) = Σ û_k e^{ikx}`, `û_k = (1/2π)∫ u e^{−ikx} dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::integrals::exp_moment;
use crate::signal::{ExpTerm, ExponentialSignal};
use crate::spectral::{modal_dim, ModeBranch, Spectrum};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Coefficients `c_k^±` for `|k| ≤ N` in the forward eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl ModalState {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![ZERO; modal_dim(n)],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != modal_dim(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for N={n}, got {}",
                modal_dim(n),
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    /// A single basis element `amp · e^{ikx} Z_k^±`.
    pub fn single(n: usize, mb: ModeBranch, amp: Complex64) -> Self {
        let mut s = Self::zeros(n);
        s.coeffs[mb.index(n)] = amp;
        s
    }

    /// Coefficients with independent uniform real and imaginary parts in `[−1, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let coeffs = (0..modal_dim(n))
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Self { n, coeffs }
    }

    /// A random state whose fields `(u, v)` are real: `c_{−k}^± = conj(c_k^±)`.
    pub fn random_real<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut s = Self::random(n, rng);
        s.symmetrize_real();
        s
    }

    /// A random state normalized to unit energy.
    pub fn random_unit<R: Rng + ?Sized>(spec: &Spectrum, rng: &mut R) -> Self {
        let s = Self::random(spec.n(), rng);
        let e = energy(spec, &s);
        s.scaled(Complex64::new(1.0 / e.sqrt(), 0.0))
    }

    /// Replace the state by its projection onto real fields.
    pub fn symmetrize_real(&mut self) {
        let n = self.n;
        let orig = self.coeffs.clone();
        for idx in 0..self.coeffs.len() {
            let mb = ModeBranch::from_index(idx, n);
            let mirror = ModeBranch::new(-mb.k, mb.branch).index(n);
            self.coeffs[idx] = 0.5 * (orig[idx] + orig[mirror].conj());
        }
    }

    /// `max |c_{−k}^± − conj(c_k^±)|`; zero for real fields.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let n = self.n;
        (0..self.coeffs.len())
            .map(|idx| {
                let mb = ModeBranch::from_index(idx, n);
                let mirror = ModeBranch::new(-mb.k, mb.branch).index(n);
                (self.coeffs[mirror] - self.coeffs[idx].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, mb: ModeBranch) -> Complex64 {
        self.coeffs[mb.index(self.n)]
    }

    pub fn set(&mut self, mb: ModeBranch, value: Complex64) {
        let idx = mb.index(self.n);
        self.coeffs[idx] = value;
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "truncation mismatch");
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Fourier coefficients `(û_k, v̂_k) = c_k^+ Z_k^+ + c_k^− Z_k^−`.
    pub fn fourier(&self, spec: &Spectrum, k: i64) -> [Complex64; 2] {
        let n = self.n;
        let ip = 2 * (k + n as i64) as usize;
        let (zp, zm) = (spec.z(ip), spec.z(ip + 1));
        let (cp, cm) = (self.coeffs[ip], self.coeffs[ip + 1]);
        [cp * zp[0] + cm * zm[0], cp * zp[1] + cm * zm[1]]
    }

    /// Resolve Fourier coefficients onto the eigenbasis by weighted-orthogonal
    /// projection.
    pub fn from_fourier(spec: &Spectrum, fourier: &[[Complex64; 2]]) -> Self {
        let n = spec.n();
        assert_eq!(fourier.len(), 2 * n + 1);
        let w = spec.params().weight();
        let mut s = Self::zeros(n);
        for (j, uv) in fourier.iter().enumerate() {
            for idx in [2 * j, 2 * j + 1] {
                let z = spec.z(idx);
                s.coeffs[idx] = (uv[0] * z[0] + w * uv[1] * z[1]) / spec.norm_sq(idx);
            }
        }
        s
    }

    /// `∫_𝕋 u dx = 2π û₀`.
    pub fn mean_u(&self, spec: &Spectrum) -> Complex64 {
        2.0 * PI * self.fourier(spec, 0)[0]
    }

    /// `∫_𝕋 v dx = 2π v̂₀`.
    pub fn mean_v(&self, spec: &Spectrum) -> Complex64 {
        2.0 * PI * self.fourier(spec, 0)[1]
    }
}

/// Coefficients `b_k^±` in the adjoint eigenbasis `W_k^±`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointState {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl AdjointState {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![ZERO; modal_dim(n)],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != modal_dim(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for N={n}, got {}",
                modal_dim(n),
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let s = ModalState::random(n, rng);
        Self {
            n,
            coeffs: s.coeffs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Physical Fourier coefficients `(φ̂_k, ψ̂_k) = b_k^+ W_k^+ + b_k^− W_k^−`.
    pub fn fourier(&self, spec: &Spectrum, k: i64) -> [Complex64; 2] {
        let ip = 2 * (k + self.n as i64) as usize;
        let (wp, wm) = (spec.adjoint_z(ip), spec.adjoint_z(ip + 1));
        let (bp, bm) = (self.coeffs[ip], self.coeffs[ip + 1]);
        [bp * wp[0] + bm * wm[0], bp * wp[1] + bm * wm[1]]
    }

    /// Resolve adjoint Fourier coefficients onto `W_k^±` (orthogonal for the
    /// inverse weight `diag(1, d/(ac))`).
    pub fn from_fourier(spec: &Spectrum, fourier: &[[Complex64; 2]]) -> Self {
        let n = spec.n();
        assert_eq!(fourier.len(), 2 * n + 1);
        let inv_w = 1.0 / spec.params().weight();
        let mut s = Self::zeros(n);
        for (j, uv) in fourier.iter().enumerate() {
            for idx in [2 * j, 2 * j + 1] {
                let w = spec.adjoint_z(idx);
                let norm = w[0] * w[0] + inv_w * w[1] * w[1];
                s.coeffs[idx] = (uv[0] * w[0] + inv_w * uv[1] * w[1]) / norm;
            }
        }
        s
    }
}

/// Samples of `(u, v)` at `x_j = 2πj/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn(m: usize, f: impl Fn(f64) -> [Complex64; 2]) -> Self {
        let (u, v) = (0..m)
            .map(|j| {
                let uv = f(grid_point(j, m));
                (uv[0], uv[1])
            })
            .unzip();
        Self { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Largest imaginary part over both components.
    pub fn max_imag(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}

pub fn grid_point(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// Fourier coefficients of the Dirac mass at `x₀`: `e^{−ikx₀}/(2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingProfile {
    pub x0: f64,
}

impl ForcingProfile {
    pub fn new(x0: f64) -> Self {
        Self {
            x0: x0.rem_euclid(2.0 * PI),
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        cis(-(k as f64) * self.x0) / (2.0 * PI)
    }
}

fn check_grid(n: usize, m: usize) -> Result<()> {
    let required = 2 * n + 2;
    if m < required {
        return Err(Error::Alias {
            samples: m,
            n,
            required,
        });
    }
    Ok(())
}

/// Discrete Fourier analysis on the grid followed by eigenbasis resolution.
pub fn project(spec: &Spectrum, fields: &GridFunction) -> Result<ModalState> {
    let n = spec.n();
    let m = fields.len();
    check_grid(n, m)?;
    let fourier: Vec<[Complex64; 2]> = (-(n as i64)..=(n as i64))
        .map(|k| {
            let mut acc = [ZERO; 2];
            for j in 0..m {
                let e = cis(-(k as f64) * grid_point(j, m));
                acc[0] += fields.u[j] * e;
                acc[1] += fields.v[j] * e;
            }
            [acc[0] / m as f64, acc[1] / m as f64]
        })
        .collect();
    Ok(ModalState::from_fourier(spec, &fourier))
}

/// Inverse transform of `(û_k, v̂_k)` onto `M` grid points.
pub fn reconstruct(spec: &Spectrum, state: &ModalState, m: usize) -> Result<GridFunction> {
    let n = spec.n();
    check_grid(n, m)?;
    let fourier: Vec<[Complex64; 2]> = (-(n as i64)..=(n as i64))
        .map(|k| state.fourier(spec, k))
        .collect();
    Ok(GridFunction::from_fn(m, |x| {
        let mut acc = [ZERO; 2];
        for (j, uv) in fourier.iter().enumerate() {
            let k = j as i64 - n as i64;
            let e = cis(k as f64 * x);
            acc[0] += uv[0] * e;
            acc[1] += uv[1] * e;
        }
        acc
    }))
}

/// Pointwise evaluation `(u(x), v(x))` of a state.
pub fn eval_point(spec: &Spectrum, state: &ModalState, x: f64) -> [Complex64; 2] {
    let n = spec.n() as i64;
    let mut acc = [ZERO; 2];
    for k in -n..=n {
        let uv = state.fourier(spec, k);
        let e = cis(k as f64 * x);
        acc[0] += uv[0] * e;
        acc[1] += uv[1] * e;
    }
    acc
}

/// Free evolution `c_k^±(t) = c_k^±(0) e^{iω_k^± t}`.
pub fn evolve(spec: &Spectrum, state: &ModalState, t: f64) -> ModalState {
    let coeffs = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, c)| c * cis(spec.omega(idx) * t))
        .collect();
    ModalState { n: state.n, coeffs }
}

/// `E = ∫_𝕋 |u|² + (ac/d)|v|² dx = 2π Σ |c_k^±|² ‖Z_k^±‖²_w`.
pub fn energy(spec: &Spectrum, state: &ModalState) -> f64 {
    2.0 * PI
        * state
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c.norm_sqr() * spec.norm_sq(idx))
            .sum::<f64>()
}

/// Energy inner product `∫ u ū' + (ac/d) v v̄' dx`.
pub fn h_inner(spec: &Spectrum, x: &ModalState, y: &ModalState) -> Complex64 {
    2.0 * PI
        * x.coeffs
            .iter()
            .zip(&y.coeffs)
            .enumerate()
            .map(|(idx, (a, b))| a * b.conj() * spec.norm_sq(idx))
            .sum::<Complex64>()
}

pub fn h_norm(spec: &Spectrum, state: &ModalState) -> f64 {
    energy(spec, state).sqrt()
}

/// Unweighted pairing `∫_𝕋 u φ̄ + v ψ̄ dx` between a forward and an adjoint state;
/// the forward and adjoint flows preserve it.
pub fn dual_pairing(spec: &Spectrum, state: &ModalState, adj: &AdjointState) -> Complex64 {
    let n = spec.n() as i64;
    2.0 * PI
        * (-n..=n)
            .map(|k| {
                let z = state.fourier(spec, k);
                let w = adj.fourier(spec, k);
                z[0] * w[0].conj() + z[1] * w[1].conj()
            })
            .sum::<Complex64>()
}

/// Traces `t ↦ (u(t, x₀), v(t, x₀))` as exponential sums.
pub fn trace(
    spec: &Spectrum,
    state: &ModalState,
    x0: f64,
) -> (ExponentialSignal, ExponentialSignal) {
    traces_with(spec, &state.coeffs, x0, |idx| spec.z(idx))
}

/// Traces `t ↦ (φ(t, x₀), ψ(t, x₀))` of an adjoint solution.
pub fn adjoint_trace(
    spec: &Spectrum,
    adj: &AdjointState,
    x0: f64,
) -> (ExponentialSignal, ExponentialSignal) {
    traces_with(spec, &adj.coeffs, x0, |idx| spec.adjoint_z(idx))
}

fn traces_with(
    spec: &Spectrum,
    coeffs: &[Complex64],
    x0: f64,
    vector: impl Fn(usize) -> [f64; 2],
) -> (ExponentialSignal, ExponentialSignal) {
    let mut first = Vec::with_capacity(coeffs.len());
    let mut second = Vec::with_capacity(coeffs.len());
    for (idx, c) in coeffs.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let z = vector(idx);
        let amp = c * cis(spec.k(idx) as f64 * x0);
        first.push(ExpTerm::new(amp * z[0], spec.omega(idx), 0));
        second.push(ExpTerm::new(amp * z[1], spec.omega(idx), 0));
    }
    (
        ExponentialSignal::new(first).simplify(),
        ExponentialSignal::new(second).simplify(),
    )
}

/// Adjoint free evolution `b_k^±(t) = b_k^±(0) e^{iω_k^± t}`.
pub fn adjoint_evolve(spec: &Spectrum, adj: &AdjointState, t: f64) -> AdjointState {
    let coeffs = adj
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, b)| b * cis(spec.omega(idx) * t))
        .collect();
    AdjointState { n: adj.n, coeffs }
}

/// Solution at time `T` of the system forced by `f(t) δ_{x₀}` (u-equation) and
/// `g(t) δ_{x₀}` (v-equation), starting from `state0` at `t = 0`.
///
/// Per mode the forcing `e^{−ikx₀}/(2π) (f, g)` is resolved on `Z_k^±` and the
/// Duhamel integral `∫_0^T e^{iω(T−s)} s^p e^{iμs} ds` is evaluated in closed form;
/// `μ = ω` is handled by the same kernel without a special case.
pub fn forced_evolve(
    spec: &Spectrum,
    state0: &ModalState,
    f: Option<&ExponentialSignal>,
    g: Option<&ExponentialSignal>,
    x0: f64,
    t_final: f64,
) -> ModalState {
    let profile = ForcingProfile::new(x0);
    let w = spec.params().weight();
    let empty = ExponentialSignal::zero();
    let f = f.unwrap_or(&empty);
    let g = g.unwrap_or(&empty);
    let coeffs = state0
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, c0)| {
            let omega = spec.omega(idx);
            let z = spec.z(idx);
            let scale = profile.coeff(spec.k(idx)) / spec.norm_sq(idx);
            let mut duhamel = ZERO;
            for (signal, weight) in [(f, z[0]), (g, w * z[1])] {
                if weight == 0.0 {
                    continue;
                }
                for term in &signal.terms {
                    let rate = Complex64::new(0.0, term.frequency - omega);
                    duhamel += weight * term.amplitude * exp_moment(term.degree, rate, t_final);
                }
            }
            cis(omega * t_final) * (c0 + scale * duhamel)
        })
        .collect();
    ModalState {
        n: state0.n,
        coeffs,
    }
}
