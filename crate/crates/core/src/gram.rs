//! Exponential Gram matrices and observability constants.
//!
//! All entries are closed-form integrals of products of exponential sums, so the
//! only numerical error comes from the Hermitian eigensolves.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    complement_basis, hermitian_eigen, hermitian_eigenvalues, hermitian_residual, restrict,
};
use crate::modal::ModalState;
use crate::signal::{ExpTerm, ExponentialSignal};
use crate::spectral::{limit_eigenvectors, Branch, ModeBranch, PhysicalParams, Spectrum};

/// Tolerance below which two frequencies of a chain are treated as equal.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Smallest clustering tolerance tried before giving up.
pub const EPSILON_FLOOR: f64 = 1e-14;
/// Relative eigenvalue threshold defining the numerical kernel.
pub const KERNEL_REL_TOL: f64 = 1e-12;

/// A non-degenerate time interval `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationWindow {
    t0: f64,
    t1: f64,
}

impl ObservationWindow {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidArgument(format!(
                "window [{t0}, {t1}] is degenerate"
            )));
        }
        Ok(Self { t0, t1 })
    }

    /// `[0, len]`.
    pub fn of_length(len: f64) -> Result<Self> {
        Self::new(0.0, len)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// One or two labelled frequencies closer than `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub members: Vec<(ModeBranch, f64)>,
    pub epsilon: f64,
}

impl Chain {
    pub fn is_pair(&self) -> bool {
        self.members.len() == 2
    }
}

/// Partition labelled frequencies into classes of the transitive closure of
/// `|ω − ω'| < ε`, halving `ε` until no class has more than two members and every
/// pair mixes the two branches. Chains come out sorted by frequency.
pub fn cluster_chains(frequencies: &[(ModeBranch, f64)], epsilon: f64) -> Result<Vec<Chain>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "clustering tolerance must be positive, got {epsilon}"
        )));
    }
    let mut sorted = frequencies.to_vec();
    sorted.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.k.cmp(&y.0.k)));
    let mut eps = epsilon;
    loop {
        let mut classes: Vec<Vec<(ModeBranch, f64)>> = Vec::new();
        for &entry in &sorted {
            match classes.last_mut() {
                Some(class) if entry.1 - class.last().unwrap().1 < eps => class.push(entry),
                _ => classes.push(vec![entry]),
            }
        }
        let offending = classes
            .iter()
            .find(|c| c.len() > 2 || (c.len() == 2 && c[0].0.branch == c[1].0.branch));
        match offending {
            None => {
                return Ok(classes
                    .into_iter()
                    .map(|members| Chain {
                        members,
                        epsilon: eps,
                    })
                    .collect())
            }
            Some(class) => {
                eps /= 2.0;
                if eps < EPSILON_FLOOR {
                    return Err(Error::EpsilonUnderflow {
                        floor: EPSILON_FLOOR,
                        near: class[0].1,
                    });
                }
            }
        }
    }
}

/// `min(1, γ̂/4)` with `γ̂` the smallest gap between consecutive same-branch
/// frequencies of the given labels.
pub fn default_epsilon(frequencies: &[(ModeBranch, f64)]) -> f64 {
    let mut gamma = f64::INFINITY;
    for branch in [Branch::Plus, Branch::Minus] {
        let mut same: Vec<(i64, f64)> = frequencies
            .iter()
            .filter(|(mb, _)| mb.branch == branch)
            .map(|(mb, w)| (mb.k, *w))
            .collect();
        same.sort_by_key(|e| e.0);
        for w in same.windows(2) {
            if w[1].0 == w[0].0 + 1 {
                gamma = gamma.min((w[1].1 - w[0].1).abs());
            }
        }
    }
    if gamma.is_finite() {
        (gamma / 4.0).min(1.0)
    } else {
        1.0
    }
}

/// Newton basis of a chain: `{e^{iω₁t}}` for a singleton,
/// `{e^{iω₁t}, (e^{iω₁t} − e^{iω₂t})/(ω₁ − ω₂)}` for a pair and
/// `{e^{iωt}, t e^{iωt}}` when the pair coincides.
pub fn divided_diff_basis(chain: &Chain) -> Vec<ExponentialSignal> {
    let one = Complex64::new(1.0, 0.0);
    match chain.members.as_slice() {
        [(_, w)] => vec![ExponentialSignal::pure(*w)],
        [(_, w1), (_, w2)] => {
            let first = ExponentialSignal::pure(*w1);
            let delta = w1 - w2;
            let second = if delta.abs() <= COINCIDENCE_TOL {
                ExponentialSignal::new(vec![ExpTerm::new(one, *w1, 1)])
            } else {
                ExponentialSignal::new(vec![
                    ExpTerm::new(one / delta, *w1, 0),
                    ExpTerm::new(-one / delta, *w2, 0),
                ])
            };
            vec![first, second]
        }
        _ => panic!("chains have one or two members"),
    }
}

/// Hermitian matrix of closed-form exponential integrals over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub entries: DMatrix<Complex64>,
    pub window: ObservationWindow,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// `∫ |Σ_n c_n W_n b_n(t)|² dt = Σ_{m,n} c_m G_{mn} conj(c_n)`.
    pub fn form(&self, coeffs: &[Complex64]) -> f64 {
        let n = self.dim();
        assert_eq!(coeffs.len(), n);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            for k in 0..n {
                acc += coeffs[m] * self.entries[(m, k)] * coeffs[k].conj();
            }
        }
        acc.re
    }
}

/// Entry `(m, n) = ⟨W_m, W_n⟩ ∫_I b_m(t) conj(b_n(t)) dt` with `⟨x, y⟩ = Σ x_i conj(y_i)`;
/// without weights `⟨W_m, W_n⟩ = 1`.
pub fn exp_gram(
    basis: &[ExponentialSignal],
    weights: Option<&[[Complex64; 2]]>,
    window: ObservationWindow,
) -> Result<GramMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("Gram basis is empty".into()));
    }
    if let Some(w) = weights {
        if w.len() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} basis functions",
                w.len(),
                basis.len()
            )));
        }
    }
    let n = basis.len();
    let mut entries = DMatrix::zeros(n, n);
    for m in 0..n {
        for k in m..n {
            let mut value = basis[m].inner(&basis[k], window.t0, window.t1);
            if let Some(w) = weights {
                value *= w[m][0] * w[k][0].conj() + w[m][1] * w[k][1].conj();
            }
            entries[(m, k)] = value;
            entries[(k, m)] = value.conj();
        }
        entries[(m, m)].im = 0.0;
    }
    Ok(GramMatrix { entries, window })
}

/// Which pointwise traces are observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservationMode {
    Both,
    UOnly,
    VOnly,
}

impl ObservationMode {
    pub fn name(self) -> &'static str {
        match self {
            ObservationMode::Both => "both",
            ObservationMode::UOnly => "u",
            ObservationMode::VOnly => "v",
        }
    }

    fn mask(self) -> [f64; 2] {
        match self {
            ObservationMode::Both => [1.0, 1.0],
            ObservationMode::UOnly => [1.0, 0.0],
            ObservationMode::VOnly => [0.0, 1.0],
        }
    }
}

impl std::str::FromStr for ObservationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(ObservationMode::Both),
            "u" | "u_only" => Ok(ObservationMode::UOnly),
            "v" | "v_only" => Ok(ObservationMode::VOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown observation mode '{other}'"
            ))),
        }
    }
}

/// Eigenvectors used to build the trace map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorModel {
    #[default]
    Exact,
    /// `Z_k^±` replaced by the large-`|k|` limits `Z^±` for `k ≠ 0`.
    Limit,
}

/// Options for [`observability_report`].
#[derive(Debug, Clone, Default)]
pub struct ObservabilityOptions {
    /// Dense modal indices spanning the state space; `None` means all.
    pub indices: Option<Vec<usize>>,
    pub vectors: VectorModel,
    /// Clustering tolerance for the single-trace Newton basis; `None` means
    /// [`default_epsilon`].
    pub epsilon: Option<f64>,
}

/// Constants of the single-trace inequality in divided-difference coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedReport {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityReport {
    /// Smallest generalized eigenvalue of the observation form against the energy.
    pub alpha: f64,
    /// Largest generalized eigenvalue.
    pub beta: f64,
    /// Eigenvalues `≤ 1e-12·beta`.
    pub kernel_dim: usize,
    /// Unit-energy states spanning the numerical kernel.
    pub kernel: Vec<ModalState>,
    /// `alpha` on the energy-orthogonal complement of the unobservable constant
    /// direction in single-trace modes; equals `alpha` in two-trace mode.
    pub alpha_reduced: f64,
    pub divided: Option<DividedReport>,
}

/// Observability constants for all modes `|k| ≤ N`.
pub fn observability_constants(
    params: &PhysicalParams,
    n: usize,
    x0: f64,
    window: ObservationWindow,
    mode: ObservationMode,
) -> Result<ObservabilityReport> {
    let spec = Spectrum::new(*params, n);
    observability_report(&spec, x0, window, mode, &ObservabilityOptions::default())
}

/// Extreme generalized eigenvalues of `c ↦ ∫_I |observed traces at x₀|² dt`
/// against the energy `2π Σ |c_n|² ‖Z_n‖²_w`.
pub fn observability_report(
    spec: &Spectrum,
    x0: f64,
    window: ObservationWindow,
    mode: ObservationMode,
    opts: &ObservabilityOptions,
) -> Result<ObservabilityReport> {
    let indices: Vec<usize> = opts
        .indices
        .clone()
        .unwrap_or_else(|| (0..spec.dim()).collect());
    if indices.is_empty() {
        return Err(Error::InvalidArgument("empty mode family".into()));
    }
    let params = spec.params();
    let limits = limit_eigenvectors(params);
    let vector = |idx: usize| -> [f64; 2] {
        match opts.vectors {
            VectorModel::Limit if spec.k(idx) != 0 => match spec.label(idx).branch {
                Branch::Plus => limits.0,
                Branch::Minus => limits.1,
            },
            _ => spec.z(idx),
        }
    };
    let mask = mode.mask();
    let basis: Vec<ExponentialSignal> = indices
        .iter()
        .map(|&i| ExponentialSignal::pure(spec.omega(i)))
        .collect();
    let weights: Vec<[Complex64; 2]> = indices
        .iter()
        .map(|&i| {
            let z = vector(i);
            let phase = Complex64::from_polar(1.0, spec.k(i) as f64 * x0);
            [phase * z[0] * mask[0], phase * z[1] * mask[1]]
        })
        .collect();
    let gram = exp_gram(&basis, Some(&weights), window)?;
    let energy: Vec<f64> = indices
        .iter()
        .map(|&i| 2.0 * PI * params.weighted_norm_sq(vector(i)))
        .collect();
    let scale: Vec<f64> = energy.iter().map(|e| 1.0 / e.sqrt()).collect();
    let dim = indices.len();
    let normalized = DMatrix::from_fn(dim, dim, |m, k| gram.entries[(m, k)] * scale[m] * scale[k]);
    let (values, vectors) = hermitian_eigen(&normalized);
    // the form is positive semidefinite; negative values are roundoff
    let alpha = values[0].max(0.0);
    let beta = values[dim - 1];
    let threshold = KERNEL_REL_TOL * beta;

    // eigenvectors hold conj(c) because the form is Σ c_m G_mn conj(c_n)
    let to_state = |v: &[Complex64]| {
        let mut state = ModalState::zeros(spec.n());
        for (pos, &idx) in indices.iter().enumerate() {
            state.coeffs_mut()[idx] = (v[pos] * scale[pos]).conj();
        }
        state
    };
    let column = |m: &DMatrix<Complex64>, j: usize| -> Vec<Complex64> {
        m.column(j).iter().copied().collect()
    };

    // The structural direction is known exactly. When it is present it is
    // reported as is and the search continues on its complement, so a nearly
    // degenerate eigensolve cannot smear it.
    let structural = structural_direction(spec, &indices, mode)
        .filter(|_| dim > 1)
        .map(|dir| {
            let y = DVector::from_iterator(
                dim,
                dir.iter().zip(&energy).map(|(c, e)| c.conj() * e.sqrt()),
            );
            let y = &y / Complex64::new(y.norm(), 0.0);
            let q = complement_basis(&y);
            let (vals, vecs) = hermitian_eigen(&restrict(&normalized, &q));
            (y, q, vals, vecs)
        });
    let (kernel, alpha_reduced) = match &structural {
        Some((y, q, vals, vecs)) => {
            let mut kernel = Vec::new();
            let visible = (y.adjoint() * &normalized * y)[(0, 0)].re;
            if visible <= threshold {
                kernel.push(to_state(y.as_slice()));
            }
            let lifted = q * vecs;
            for (j, _) in vals
                .iter()
                .enumerate()
                .take_while(|(_, v)| **v <= threshold)
            {
                kernel.push(to_state(&column(&lifted, j)));
            }
            (kernel, vals[0].max(0.0))
        }
        None => {
            let kernel = values
                .iter()
                .enumerate()
                .take_while(|(_, v)| **v <= threshold)
                .map(|(j, _)| to_state(&column(&vectors, j)))
                .collect();
            (kernel, alpha)
        }
    };

    let divided = match mode {
        ObservationMode::Both => None,
        _ => Some(divided_constants(spec, &indices, window, opts.epsilon)?),
    };

    Ok(ObservabilityReport {
        alpha,
        beta,
        kernel_dim: kernel.len(),
        kernel,
        alpha_reduced,
        divided,
    })
}

/// The `k = 0` combination invisible to a single trace: `c₀^+ = −c₀^−` for the
/// u-trace and `c₀^+ = c₀^−` for the v-trace, as coefficients over `indices`.
fn structural_direction(
    spec: &Spectrum,
    indices: &[usize],
    mode: ObservationMode,
) -> Option<Vec<Complex64>> {
    let sign = match mode {
        ObservationMode::Both => return None,
        ObservationMode::UOnly => -1.0,
        ObservationMode::VOnly => 1.0,
    };
    let n = spec.n();
    let plus = ModeBranch::new(0, Branch::Plus).index(n);
    let minus = ModeBranch::new(0, Branch::Minus).index(n);
    if !(indices.contains(&plus) && indices.contains(&minus)) {
        return None;
    }
    Some(
        indices
            .iter()
            .map(|&i| {
                if i == plus {
                    Complex64::new(1.0, 0.0)
                } else if i == minus {
                    Complex64::new(sign, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect(),
    )
}

/// Gram of the Newton basis built over the chains of the family, with the double
/// zero frequency counted as a single constant element.
fn divided_constants(
    spec: &Spectrum,
    indices: &[usize],
    window: ObservationWindow,
    epsilon: Option<f64>,
) -> Result<DividedReport> {
    let family: Vec<(ModeBranch, f64)> = indices
        .iter()
        .map(|&i| (spec.label(i), spec.omega(i)))
        .collect();
    let eps = epsilon.unwrap_or_else(|| default_epsilon(&family));
    let mut elements: Vec<(ModeBranch, f64)> = Vec::with_capacity(indices.len());
    let mut seen_zero = false;
    for &i in indices {
        let mb = spec.label(i);
        if mb.k == 0 {
            if seen_zero {
                continue;
            }
            seen_zero = true;
        }
        elements.push((mb, spec.omega(i)));
    }
    let chains = cluster_chains(&elements, eps)?;
    let basis: Vec<ExponentialSignal> = chains.iter().flat_map(divided_diff_basis).collect();
    let gram = exp_gram(&basis, None, window)?;
    let values = gram.eigenvalues();
    Ok(DividedReport {
        alpha: values[0],
        beta: values[values.len() - 1],
        epsilon: chains.first().map_or(eps, |c| c.epsilon),
        chains,
    })
}

/// Extreme eigenvalues `(direct, inverse)` = `(λ_max, λ_min)` of the scalar Gram
/// of `{e^{iω_j t}}` over the window.
pub fn ingham_report(frequencies: &[f64], window: ObservationWindow) -> Result<(f64, f64)> {
    if frequencies.is_empty() {
        return Err(Error::InvalidArgument("empty frequency family".into()));
    }
    let mut sorted = frequencies.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] <= COINCIDENCE_TOL) {
        return Err(Error::InvalidArgument(
            "frequencies must be distinct".into(),
        ));
    }
    let basis: Vec<ExponentialSignal> = frequencies
        .iter()
        .map(|&w| ExponentialSignal::pure(w))
        .collect();
    let gram = exp_gram(&basis, None, window)?;
    let values = gram.eigenvalues();
    Ok((values[values.len() - 1], values[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mb(k: i64, plus: bool) -> ModeBranch {
        ModeBranch::new(k, if plus { Branch::Plus } else { Branch::Minus })
    }

    #[test]
    fn well_separated_frequencies_are_singletons() {
        let f = [(mb(0, true), 0.0), (mb(1, true), 10.0), (mb(2, true), 20.0)];
        let chains = cluster_chains(&f, 1.0).unwrap();
        assert_eq!(chains.len(), 3);
        assert!(chains.iter().all(|c| !c.is_pair() && c.epsilon == 1.0));
    }

    #[test]
    fn zero_pair_stays_together() {
        let spec = Spectrum::new(PhysicalParams::resonant(), 6);
        let f = spec.frequencies();
        for eps in [1e-6, 0.1, 0.3] {
            let chains = cluster_chains(&f, eps).unwrap();
            let zero = chains
                .iter()
                .find(|c| c.members.iter().any(|m| m.0.k == 0))
                .unwrap();
            assert_eq!(zero.members.len(), 2);
            assert!(zero.members.iter().all(|m| m.0.k == 0));
        }
    }

    #[test]
    fn halving_splits_a_loose_triple() {
        // 0, 0.6, 1.2 chain together at ε=1; at ε=0.5 they separate
        let f = [(mb(0, true), 0.0), (mb(1, false), 0.6), (mb(1, true), 1.2)];
        let chains = cluster_chains(&f, 1.0).unwrap();
        assert_eq!(chains.len(), 3);
        assert_eq!(chains[0].epsilon, 0.5);
    }

    #[test]
    fn halving_splits_pair_beyond_half_epsilon() {
        let f = [(mb(1, true), 0.0), (mb(2, true), 0.7)];
        let chains = cluster_chains(&f, 1.0).unwrap();
        assert_eq!(chains.len(), 2);
    }

    #[test]
    fn exact_triple_underflows() {
        let f = [(mb(0, true), 0.0), (mb(0, false), 0.0), (mb(3, true), 0.0)];
        assert!(matches!(
            cluster_chains(&f, 1.0),
            Err(Error::EpsilonUnderflow { .. })
        ));
    }

    #[test]
    fn newton_basis_shapes() {
        let single = Chain {
            members: vec![(mb(1, true), 3.0)],
            epsilon: 1.0,
        };
        let b = divided_diff_basis(&single);
        assert_eq!(b, vec![ExponentialSignal::pure(3.0)]);
        let zero = Chain {
            members: vec![(mb(0, true), 0.0), (mb(0, false), 0.0)],
            epsilon: 1.0,
        };
        let b = divided_diff_basis(&zero);
        assert_eq!(
            b[1].terms,
            vec![ExpTerm::new(Complex64::new(1.0, 0.0), 0.0, 1)]
        );
    }

    #[test]
    fn gram_of_constant_and_harmonics() {
        let w = ObservationWindow::of_length(2.5).unwrap();
        let g = exp_gram(&[ExponentialSignal::pure(0.0)], None, w).unwrap();
        assert!((g.entries[(0, 0)].re - 2.5).abs() < 1e-15);
        let basis: Vec<_> = (-2..=2)
            .map(|k| ExponentialSignal::pure(k as f64))
            .collect();
        let g = exp_gram(
            &basis,
            None,
            ObservationWindow::of_length(2.0 * PI).unwrap(),
        )
        .unwrap();
        let diff =
            &g.entries - DMatrix::<Complex64>::identity(5, 5) * Complex64::new(2.0 * PI, 0.0);
        assert!(diff.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn ingham_single_frequency() {
        let (d, i) = ingham_report(&[1.7], ObservationWindow::of_length(3.0).unwrap()).unwrap();
        assert!((d - 3.0).abs() < 1e-14 && (i - 3.0).abs() < 1e-14);
        assert!(ingham_report(&[1.0, 1.0], ObservationWindow::of_length(1.0).unwrap()).is_err());
    }

    #[test]
    fn degenerate_window_rejected() {
        assert!(ObservationWindow::new(1.0, 1.0).is_err());
        assert!(ObservationWindow::of_length(-1.0).is_err());
    }

    #[test]
    fn default_epsilon_uses_same_branch_gaps() {
        let spec = Spectrum::new(PhysicalParams::generic(), 3);
        let f = spec.frequencies();
        let eps = default_epsilon(&f);
        assert!(eps > 0.0 && eps <= 1.0);
        assert_eq!(default_epsilon(&[(mb(0, true), 0.0)]), 1.0);
    }

    #[test]
    fn two_trace_generic_has_trivial_kernel() {
        let p = PhysicalParams::generic();
        let r = observability_constants(
            &p,
            6,
            0.0,
            ObservationWindow::of_length(1.0).unwrap(),
            ObservationMode::Both,
        )
        .unwrap();
        assert!(r.alpha > 0.0);
        assert_eq!(r.kernel_dim, 0);
        assert!(r.divided.is_none());
    }
}
