//! HUM steering with pointwise controls.
//!
//! The adjoint state `Φ₀ = Σ b_n W_n e^{ikx}` generates the controls
//! `f = −φ(·, x₀)`, `g = −ψ(·, x₀)`. Null-steering a defect `y` then reduces to
//! `Λ b = 2π diag(‖Z_n‖²_w) y` with `Λ_{mn} = ∫_0^T conj(s_m) s_n dt`, where
//! `s_n(t) = e^{ik_n x₀} e^{iω_n t} W_n` is the trace of the `n`-th adjoint mode.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gram::{exp_gram, GramMatrix, ObservationWindow};
use crate::linalg::{complement_basis, hermitian_eigenvalues, restrict};
use crate::modal::{
    adjoint_evolve, adjoint_trace, dual_pairing, evolve, forced_evolve, h_norm, AdjointState,
    ModalState,
};
use crate::signal::ExponentialSignal;
use crate::spectral::{critical_time, Branch, ModeBranch, PhysicalParams, Spectrum};

/// Largest admissible condition number of `Λ`.
pub const MAX_CONDITION: f64 = 1e14;
/// Relative tolerance on the conserved mean in single-control modes.
pub const MEAN_TOL: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 2;

/// Which controls act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlMode {
    Both,
    /// Only the u-equation is forced; `∫v dx` is conserved.
    FOnly,
    /// Only the v-equation is forced; `∫u dx` is conserved.
    GOnly,
}

impl ControlMode {
    pub fn name(self) -> &'static str {
        match self {
            ControlMode::Both => "both",
            ControlMode::FOnly => "f_only",
            ControlMode::GOnly => "g_only",
        }
    }

    fn mask(self) -> [f64; 2] {
        match self {
            ControlMode::Both => [1.0, 1.0],
            ControlMode::FOnly => [1.0, 0.0],
            ControlMode::GOnly => [0.0, 1.0],
        }
    }
}

impl std::str::FromStr for ControlMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(ControlMode::Both),
            "f" | "f_only" => Ok(ControlMode::FOnly),
            "g" | "g_only" => Ok(ControlMode::GOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown control mode '{other}'"
            ))),
        }
    }
}

/// The conserved mean in a single-control mode and the matching adjoint
/// direction that the active trace cannot see.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanConstraint {
    /// `"u"` or `"v"`: the field whose mean is conserved.
    pub component: &'static str,
    /// Kernel direction of `Λ` in adjoint coordinates.
    pub kernel: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct HumSystem {
    /// `Λ` in adjoint modal coordinates.
    pub lambda: GramMatrix,
    pub mode: ControlMode,
    pub constraint: Option<MeanConstraint>,
    pub x0: f64,
    pub horizon: f64,
    spectrum: Spectrum,
}

impl HumSystem {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `∫_0^T |φ(t,x₀)|² + |ψ(t,x₀)|² dt` restricted to the active traces.
    pub fn form(&self, seed: &AdjointState) -> f64 {
        let b = DVector::from_column_slice(seed.coeffs());
        (b.adjoint() * &self.lambda.entries * &b)[(0, 0)].re
    }

    /// Orthonormal basis of the admissible adjoint subspace.
    fn admissible_basis(&self) -> Option<DMatrix<Complex64>> {
        self.constraint
            .as_ref()
            .map(|c| complement_basis(&DVector::from_column_slice(&c.kernel)))
    }

    /// `Λ` restricted to the admissible subspace.
    pub fn restricted(&self) -> DMatrix<Complex64> {
        match self.admissible_basis() {
            Some(q) => restrict(&self.lambda.entries, &q),
            None => self.lambda.entries.clone(),
        }
    }

    /// Ascending eigenvalues of the restricted operator.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.restricted())
    }

    /// Smallest eigenvalue on the admissible subspace.
    pub fn coercivity(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `λ_max/λ_min` on the admissible subspace (infinite if `λ_min ≤ 0`).
    pub fn condition(&self) -> f64 {
        let ev = self.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

/// `Λ` for all modes `|k| ≤ N` over `[0, T]`.
pub fn assemble_lambda(
    params: &PhysicalParams,
    n: usize,
    x0: f64,
    t: f64,
    mode: ControlMode,
) -> Result<HumSystem> {
    assemble_lambda_on(&Spectrum::new(*params, n), x0, t, mode)
}

pub fn assemble_lambda_on(
    spec: &Spectrum,
    x0: f64,
    t: f64,
    mode: ControlMode,
) -> Result<HumSystem> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {t}"
        )));
    }
    let mask = mode.mask();
    let basis: Vec<ExponentialSignal> = (0..spec.dim())
        .map(|i| ExponentialSignal::pure(spec.omega(i)))
        .collect();
    let weights: Vec<[Complex64; 2]> = (0..spec.dim())
        .map(|i| {
            let w = spec.adjoint_z(i);
            let phase = Complex64::from_polar(1.0, spec.k(i) as f64 * x0);
            [phase * w[0] * mask[0], phase * w[1] * mask[1]]
        })
        .collect();
    let mut lambda = exp_gram(&basis, Some(&weights), ObservationWindow::of_length(t)?)?;
    // exp_gram pairs b_m with conj(b_n); Λ wants conj(s_m) s_n
    lambda.entries = lambda.entries.map(|z| z.conj());
    let constraint = structural_kernel(spec, mode);
    Ok(HumSystem {
        lambda,
        mode,
        constraint,
        x0,
        horizon: t,
        spectrum: spec.clone(),
    })
}

fn structural_kernel(spec: &Spectrum, mode: ControlMode) -> Option<MeanConstraint> {
    let (component, sign) = match mode {
        ControlMode::Both => return None,
        ControlMode::FOnly => ("v", -1.0),
        ControlMode::GOnly => ("u", 1.0),
    };
    let n = spec.n();
    let mut kernel = vec![Complex64::new(0.0, 0.0); spec.dim()];
    kernel[ModeBranch::new(0, Branch::Plus).index(n)] = Complex64::new(1.0, 0.0);
    kernel[ModeBranch::new(0, Branch::Minus).index(n)] = Complex64::new(sign, 0.0);
    Some(MeanConstraint { component, kernel })
}

/// Controls over `[0, T]` together with the adjoint seed that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPlan {
    pub f: Option<ExponentialSignal>,
    pub g: Option<ExponentialSignal>,
    pub x0: f64,
    pub horizon: f64,
    pub adjoint_seed: AdjointState,
    pub mode: ControlMode,
}

impl ControlPlan {
    /// Controls `f = −φ(·,x₀)`, `g = −ψ(·,x₀)` generated by an adjoint seed.
    pub fn from_seed(
        spec: &Spectrum,
        seed: AdjointState,
        x0: f64,
        horizon: f64,
        mode: ControlMode,
    ) -> Self {
        let (phi, psi) = adjoint_trace(spec, &seed, x0);
        let minus = Complex64::new(-1.0, 0.0);
        let f = (mode != ControlMode::GOnly).then(|| phi.scaled(minus));
        let g = (mode != ControlMode::FOnly).then(|| psi.scaled(minus));
        Self {
            f,
            g,
            x0,
            horizon,
            adjoint_seed: seed,
            mode,
        }
    }

    /// `∫_0^T |f|² + |g|² dt`.
    pub fn cost(&self) -> f64 {
        let t = self.horizon;
        self.f.as_ref().map_or(0.0, |f| f.norm_sq(0.0, t))
            + self.g.as_ref().map_or(0.0, |g| g.norm_sq(0.0, t))
    }

    /// Largest amplitude mismatch between the stored controls and the adjoint
    /// traces regenerated from the seed.
    pub fn reconstruction_residual(&self, spec: &Spectrum) -> f64 {
        let fresh = Self::from_seed(
            spec,
            self.adjoint_seed.clone(),
            self.x0,
            self.horizon,
            self.mode,
        );
        let diff = |a: &Option<ExponentialSignal>, b: &Option<ExponentialSignal>| match (a, b) {
            (Some(a), Some(b)) => a
                .plus(&b.scaled(Complex64::new(-1.0, 0.0)))
                .simplify()
                .max_amplitude(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        diff(&self.f, &fresh.f).max(diff(&self.g, &fresh.g))
    }
}

/// HUM controls steering `initial` at `t = 0` to `target` at `t = T`.
pub fn solve_control(
    params: &PhysicalParams,
    n: usize,
    x0: f64,
    t: f64,
    initial: &ModalState,
    target: &ModalState,
    mode: ControlMode,
) -> Result<ControlPlan> {
    let system = assemble_lambda(params, n, x0, t, mode)?;
    solve_with(&system, initial, target)
}

/// Same as [`solve_control`] with a pre-assembled operator.
pub fn solve_with(
    system: &HumSystem,
    initial: &ModalState,
    target: &ModalState,
) -> Result<ControlPlan> {
    let spec = system.spectrum();
    let params = spec.params();
    let t = system.horizon;
    if initial.n() != spec.n() || target.n() != spec.n() {
        return Err(Error::InvalidArgument(
            "state truncation does not match the operator".into(),
        ));
    }
    let t0 = critical_time(params);
    if params.is_resonant() && t <= t0 {
        return Err(Error::InvalidArgument(format!(
            "horizon {t} does not exceed the critical time {t0} for resonant parameters"
        )));
    }
    // null-steer the defect y = initial − S(−T) target
    let defect = initial.sub(&evolve(spec, target, -t));
    if let Some(c) = &system.constraint {
        let mean = if c.component == "u" {
            defect.mean_u(spec)
        } else {
            defect.mean_v(spec)
        };
        let scale = h_norm(spec, initial).max(h_norm(spec, target)).max(1.0);
        let tol = MEAN_TOL * scale * (2.0 * PI).sqrt();
        if mean.norm() > tol {
            return Err(Error::ConstraintViolation {
                component: c.component,
                defect: mean.norm(),
                tol,
            });
        }
    }
    let rhs = DVector::from_iterator(
        spec.dim(),
        defect
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, y)| y * (2.0 * PI * spec.norm_sq(i))),
    );
    let q = system.admissible_basis();
    let (lam, rhs_r) = match &q {
        Some(q) => (restrict(&system.lambda.entries, q), q.adjoint() * &rhs),
        None => (system.lambda.entries.clone(), rhs),
    };
    let x = hermitian_solve(&lam)?(&rhs_r);
    let b = match &q {
        Some(q) => q * x,
        None => x,
    };
    let seed = AdjointState::from_coeffs(spec.n(), b.iter().copied().collect())?;
    Ok(ControlPlan::from_seed(
        spec,
        seed,
        system.x0,
        t,
        system.mode,
    ))
}

/// Cholesky solve with iterative refinement, guarded by the condition number.
fn hermitian_solve(
    m: &DMatrix<Complex64>,
) -> Result<impl Fn(&DVector<Complex64>) -> DVector<Complex64>> {
    let ev = hermitian_eigenvalues(m);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned {
            condition,
            alpha: lo,
        });
    }
    let chol = m.clone().cholesky().ok_or(Error::IllConditioned {
        condition,
        alpha: lo,
    })?;
    let m = m.clone();
    Ok(move |rhs: &DVector<Complex64>| {
        let mut x = chol.solve(rhs);
        for _ in 0..REFINEMENT_STEPS {
            let r = rhs - &m * &x;
            x += chol.solve(&r);
        }
        x
    })
}

/// `‖state(T) − target‖_H / max(‖target‖_H, ‖initial‖_H, 1)` after running the plan.
pub fn verify_roundtrip(
    spec: &Spectrum,
    plan: &ControlPlan,
    initial: &ModalState,
    target: &ModalState,
) -> f64 {
    let reached = forced_evolve(
        spec,
        initial,
        plan.f.as_ref(),
        plan.g.as_ref(),
        plan.x0,
        plan.horizon,
    );
    let scale = h_norm(spec, target).max(h_norm(spec, initial)).max(1.0);
    h_norm(spec, &reached.sub(target)) / scale
}

/// Both sides of the transposition identity
///
/// ```text
///     ⟨z(T), w(T)⟩ = ⟨z(0), w(0)⟩ + ∫_0^T f conj(φ(t,x₀)) + g conj(ψ(t,x₀)) dt
/// ```
///
/// with `⟨·,·⟩` the unweighted L² pairing, `z` forced by `(f, g)` and `w` the
/// free adjoint solution seeded by `seed`. For `T < 0` the integral is oriented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualitySides {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Largest modulus among the three terms, or 1.
    pub scale: f64,
}

impl DualitySides {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.scale
    }
}

pub fn duality_sides(
    spec: &Spectrum,
    f: Option<&ExponentialSignal>,
    g: Option<&ExponentialSignal>,
    x0: f64,
    initial: &ModalState,
    seed: &AdjointState,
    t: f64,
) -> DualitySides {
    let final_state = forced_evolve(spec, initial, f, g, x0, t);
    let final_adjoint = adjoint_evolve(spec, seed, t);
    let lhs = dual_pairing(spec, &final_state, &final_adjoint);
    let start = dual_pairing(spec, initial, seed);
    let (phi, psi) = adjoint_trace(spec, seed, x0);
    let flux = f.map_or(Complex64::new(0.0, 0.0), |f| f.inner(&phi, 0.0, t))
        + g.map_or(Complex64::new(0.0, 0.0), |g| g.inner(&psi, 0.0, t));
    let scale = lhs.norm().max(start.norm()).max(flux.norm()).max(1.0);
    DualitySides {
        lhs,
        rhs: start + flux,
        scale,
    }
}

/// `|LHS − RHS| / scale` of the transposition identity.
pub fn duality_residual(
    spec: &Spectrum,
    f: Option<&ExponentialSignal>,
    g: Option<&ExponentialSignal>,
    x0: f64,
    initial: &ModalState,
    seed: &AdjointState,
    t: f64,
) -> f64 {
    duality_sides(spec, f, g, x0, initial, seed, t).residual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn free_arrival_needs_no_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = PhysicalParams::generic();
        let spec = Spectrum::new(p, 6);
        let init = ModalState::random_unit(&spec, &mut rng);
        let target = evolve(&spec, &init, 1.0);
        let plan = solve_control(&p, 6, 0.0, 1.0, &init, &target, ControlMode::Both).unwrap();
        assert!(plan.adjoint_seed.coeffs().iter().all(|b| b.norm() <= 1e-12));
        assert!(verify_roundtrip(&spec, &plan, &init, &target) <= 1e-12);
    }

    #[test]
    fn frozen_k0_mode_is_linear_in_horizon() {
        let p = PhysicalParams::generic();
        let a = assemble_lambda(&p, 0, 0.3, 1.0, ControlMode::Both).unwrap();
        let b = assemble_lambda(&p, 0, 0.3, 2.5, ControlMode::Both).unwrap();
        let diff = &b.lambda.entries - &a.lambda.entries * Complex64::new(2.5, 0.0);
        assert!(diff.norm() <= 1e-13 * b.lambda.entries.norm());
    }

    #[test]
    fn g_only_rejects_mean_mismatch() {
        let p = PhysicalParams::generic();
        let spec = Spectrum::new(p, 3);
        let init = ModalState::single(
            3,
            ModeBranch::new(0, Branch::Plus),
            Complex64::new(1.0, 0.0),
        );
        let target = ModalState::zeros(3);
        let err = solve_control(&p, 3, 0.0, 1.0, &init, &target, ControlMode::GOnly).unwrap_err();
        assert!(matches!(
            err,
            Error::ConstraintViolation { component: "u", .. }
        ));
        assert!(spec.dim() > 0);
    }

    #[test]
    fn zero_controls_conserve_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = Spectrum::new(PhysicalParams::generic(), 4);
        let z = ModalState::random(4, &mut rng);
        let w = AdjointState::random(4, &mut rng);
        assert!(duality_residual(&spec, None, None, 0.2, &z, &w, 3.0) <= 1e-12);
    }

    #[test]
    fn resonant_horizon_below_critical_time_is_rejected() {
        let p = PhysicalParams::resonant();
        let z = ModalState::zeros(2);
        let r = solve_control(&p, 2, 0.0, 1.0, &z, &z, ControlMode::Both);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
