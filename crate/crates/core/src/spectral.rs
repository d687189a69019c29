//! Physical parameters, per-mode symbols and the closed-form diagonalization.
//!
//! Fourier mode `e^{ikx}` of the linearized coupled KdV system
//!
//! ```text
//!     u_t + u_xxx + a v_xxx = 0
//!     v_t + (r/c) v_x + (1/c) v_xxx + (d/c) u_xxx = 0
//! ```
//!
//! evolves by `ẑ' = i S_k ẑ` with the real symbol
//! `S_k = [[k³, a k³], [d k³/c, (k³ − r k)/c]]`. Its eigenvalues `ω_k^±` and
//! eigenvectors `Z_k^±` are available in closed form; this module evaluates them in
//! a cancellation-free way and derives gap statistics, resonance diagnostics and the
//! critical observation time.

use nalgebra::Matrix2;

use crate::error::{Error, Result};

/// Tolerance on `|ad − 1|` below which the quadruple is treated as resonant.
pub const RESONANCE_EPS: f64 = 1e-12;

/// Positive model coefficients `(a, c, d, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    a: f64,
    c: f64,
    d: f64,
    r: f64,
}

impl PhysicalParams {
    pub fn new(a: f64, c: f64, d: f64, r: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("c", c), ("d", d), ("r", r)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(Self { a, c, d, r })
    }

    /// `(a, c, d, r) = (2, 1, 1, 1)`: non-resonant, `T₀ = 0`.
    pub fn generic() -> Self {
        Self {
            a: 2.0,
            c: 1.0,
            d: 1.0,
            r: 1.0,
        }
    }

    /// `(a, c, d, r) = (1, 1, 1, 1)`: `ad = 1`, `T₀ = 4π`.
    pub fn resonant() -> Self {
        Self {
            a: 1.0,
            c: 1.0,
            d: 1.0,
            r: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Weight `ac/d` of the second component in the energy norm.
    pub fn weight(&self) -> f64 {
        self.a * self.c / self.d
    }

    /// `|ad − 1| ≤ RESONANCE_EPS`.
    pub fn is_resonant(&self) -> bool {
        (self.a * self.d - 1.0).abs() <= RESONANCE_EPS
    }

    /// Weighted inner product `x₁ȳ₁ + (ac/d) x₂ȳ₂` on real 2-vectors.
    pub fn weighted_dot(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        x[0] * y[0] + self.weight() * x[1] * y[1]
    }

    pub fn weighted_norm_sq(&self, z: [f64; 2]) -> f64 {
        self.weighted_dot(z, z)
    }
}

/// Sign in front of the square root in the eigenfrequency formula.
///
/// The label follows the formula for every `k`, including `k < 0`, so that
/// `ω_{−k}^± = −ω_k^±`. For `k < 0` the `Plus` branch is therefore the numerically
/// smaller root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(Error::InvalidArgument(format!("unknown branch '{other}'"))),
        }
    }
}

/// A Fourier mode together with a spectral branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeBranch {
    pub k: i64,
    pub branch: Branch,
}

impl ModeBranch {
    pub fn new(k: i64, branch: Branch) -> Self {
        Self { k, branch }
    }

    /// Position in the dense layout used by [`Spectrum`] and the modal states:
    /// `2(k + N) + {0 for +, 1 for −}`.
    pub fn index(self, n: usize) -> usize {
        debug_assert!(self.k.unsigned_abs() as usize <= n);
        2 * (self.k + n as i64) as usize + if self.branch == Branch::Plus { 0 } else { 1 }
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        let k = (idx / 2) as i64 - n as i64;
        let branch = if idx % 2 == 0 {
            Branch::Plus
        } else {
            Branch::Minus
        };
        Self { k, branch }
    }
}

impl std::fmt::Display for ModeBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.k, self.branch.symbol())
    }
}

/// Number of modal coordinates at truncation `N`: `2(2N + 1)`.
pub fn modal_dim(n: usize) -> usize {
    2 * (2 * n + 1)
}

/// Eigenfrequency and (real) eigenvector of one mode and branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub omega: f64,
    /// `(z₁, z₂)`: u-part and v-part.
    pub z: [f64; 2],
}

/// `S_k = [[k³, a k³], [d k³/c, (k³ − r k)/c]]`; the per-mode generator is `i S_k`.
pub fn symbol_matrix(params: &PhysicalParams, k: i64) -> Matrix2<f64> {
    let kf = k as f64;
    let k3 = kf * kf * kf;
    let (a, c, d, r) = (params.a, params.c, params.d, params.r);
    Matrix2::new(k3, a * k3, d * k3 / c, (k3 - r * kf) / c)
}

/// Symbol of the adjoint system, `S̃_k = S_kᵀ`.
pub fn adjoint_symbol_matrix(params: &PhysicalParams, k: i64) -> Matrix2<f64> {
    symbol_matrix(params, k).transpose()
}

/// Scaled quantities for `k ≠ 0`: `λ± = 2c ω±/k³` and the second eigenvector
/// components `z₂±`, both free of cancellation.
fn scaled_roots(params: &PhysicalParams, k: i64) -> ([f64; 2], [f64; 2]) {
    let (a, c, d, r) = (params.a, params.c, params.d, params.r);
    let kf = k as f64;
    let s = r / (kf * kf);
    let q = (4.0 * a * c * d + (c - 1.0 + s).powi(2)).sqrt();
    let lam_plus = c + 1.0 - s + q;
    // λ+ λ− = 4c(1 − ad − s); λ+ > 0 always
    let lam_minus = 4.0 * c * ((1.0 - a * d) - s) / lam_plus;
    // z₂± = p ± q with p = 1 − c − s, and z₂+ z₂− = −4acd
    let p = 1.0 - c - s;
    let (z2p, z2m) = if p >= 0.0 {
        let zp = p + q;
        (zp, -4.0 * a * c * d / zp)
    } else {
        let zm = p - q;
        (-4.0 * a * c * d / zm, zm)
    };
    ([lam_plus, lam_minus], [z2p, z2m])
}

/// `(ω_k^+, ω_k^−)` with the formula-sign labeling.
pub fn eigenfrequencies(params: &PhysicalParams, k: i64) -> (f64, f64) {
    if k == 0 {
        return (0.0, 0.0);
    }
    let ([lp, lm], _) = scaled_roots(params, k);
    let kf = k as f64;
    let k3 = kf * kf * kf;
    let two_c = 2.0 * params.c;
    (k3 * lp / two_c, k3 * lm / two_c)
}

/// `(Z_k^+, Z_k^−)` paired with their frequencies.
pub fn eigenvectors(params: &PhysicalParams, k: i64) -> (EigenPair, EigenPair) {
    let (a, c, d) = (params.a, params.c, params.d);
    let z1 = 2.0 * a * c;
    if k == 0 {
        let z2 = (4.0 * a * c * d).sqrt();
        return (
            EigenPair {
                omega: 0.0,
                z: [z1, z2],
            },
            EigenPair {
                omega: 0.0,
                z: [z1, -z2],
            },
        );
    }
    let (wp, wm) = eigenfrequencies(params, k);
    let (_, [z2p, z2m]) = scaled_roots(params, k);
    (
        EigenPair {
            omega: wp,
            z: [z1, z2p],
        },
        EigenPair {
            omega: wm,
            z: [z1, z2m],
        },
    )
}

/// Limits `Z^± = (2ac, 1 − c ± √(4acd + (c−1)²))` of `Z_k^±` as `|k| → ∞`.
pub fn limit_eigenvectors(params: &PhysicalParams) -> ([f64; 2], [f64; 2]) {
    let (a, c, d) = (params.a, params.c, params.d);
    let q = (4.0 * a * c * d + (c - 1.0).powi(2)).sqrt();
    let p = 1.0 - c;
    let (zp, zm) = if p >= 0.0 {
        (p + q, -4.0 * a * c * d / (p + q))
    } else {
        (-4.0 * a * c * d / (p - q), p - q)
    };
    ([2.0 * a * c, zp], [2.0 * a * c, zm])
}

/// Residual of the characteristic quadratic
/// `c ω² + (rk − (c+1)k³) ω + (1 − ad)k⁶ − rk⁴` at `omega`.
pub fn characteristic_residual(params: &PhysicalParams, k: i64, omega: f64) -> f64 {
    let (a, c, d, r) = (params.a, params.c, params.d, params.r);
    let kf = k as f64;
    let k3 = kf * kf * kf;
    c * omega * omega + (r * kf - (c + 1.0) * k3) * omega + (1.0 - a * d) * k3 * k3 - r * kf.powi(4)
}

/// Critical time `T₀`: `0` when `ad ≠ 1`, `2πc(c+1)/r` when `ad = 1`.
pub fn critical_time(params: &PhysicalParams) -> f64 {
    if params.is_resonant() {
        2.0 * std::f64::consts::PI * params.c * (params.c + 1.0) / params.r
    } else {
        0.0
    }
}

/// The truncated spectrum `{(ω_k^±, Z_k^±) : |k| ≤ N}` in the dense modal layout.
#[derive(Debug, Clone)]
pub struct Spectrum {
    params: PhysicalParams,
    n: usize,
    pairs: Vec<EigenPair>,
}

impl Spectrum {
    pub fn new(params: PhysicalParams, n: usize) -> Self {
        let mut pairs = Vec::with_capacity(modal_dim(n));
        for k in -(n as i64)..=(n as i64) {
            let (p, m) = eigenvectors(&params, k);
            pairs.push(p);
            pairs.push(m);
        }
        Self { params, n, pairs }
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, idx: usize) -> &EigenPair {
        &self.pairs[idx]
    }

    pub fn get(&self, mb: ModeBranch) -> &EigenPair {
        &self.pairs[mb.index(self.n)]
    }

    pub fn omega(&self, idx: usize) -> f64 {
        self.pairs[idx].omega
    }

    pub fn z(&self, idx: usize) -> [f64; 2] {
        self.pairs[idx].z
    }

    pub fn label(&self, idx: usize) -> ModeBranch {
        ModeBranch::from_index(idx, self.n)
    }

    /// Mode number `k` at a dense index.
    pub fn k(&self, idx: usize) -> i64 {
        (idx / 2) as i64 - self.n as i64
    }

    /// `‖Z‖²_w` at a dense index.
    pub fn norm_sq(&self, idx: usize) -> f64 {
        self.params.weighted_norm_sq(self.pairs[idx].z)
    }

    /// Adjoint eigenvector `W = diag(1, ac/d) Z`, an eigenvector of `S_kᵀ` with the
    /// same eigenvalue.
    pub fn adjoint_z(&self, idx: usize) -> [f64; 2] {
        let z = self.pairs[idx].z;
        [z[0], self.params.weight() * z[1]]
    }

    pub fn labels(&self) -> impl Iterator<Item = ModeBranch> + '_ {
        (0..self.dim()).map(move |i| self.label(i))
    }

    /// All `(label, ω)` pairs.
    pub fn frequencies(&self) -> Vec<(ModeBranch, f64)> {
        (0..self.dim())
            .map(|i| (self.label(i), self.omega(i)))
            .collect()
    }
}

/// Gap statistics of the truncated spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub n: usize,
    /// `ω_{k+1}^+ − ω_k^+` for `k = −N, …, N−1`.
    pub plus_gaps: Vec<f64>,
    /// `ω_{k+1}^− − ω_k^−` for `k = −N, …, N−1`.
    pub minus_gaps: Vec<f64>,
    /// `A = (c + 1 + √(4acd + (c−1)²)) / (2c)`, so that `ω_k^+ ≈ A k³`.
    pub a_const: f64,
    /// `B = 4c(1−ad)/(c+1+√(4acd+(c−1)²))` when `ad ≠ 1` (so `ω_k^− ≈ (B/2c) k³`),
    /// and the limiting gap `−r/(c(c+1))` when `ad = 1`.
    pub b_or_slope: f64,
    pub gamma_inf_estimate: f64,
    pub d_plus_estimate: f64,
    pub t0: f64,
}

/// Gap sequences, asymptotic constants, and an upper-density estimate for `|k| ≤ N`.
pub fn gap_report(params: &PhysicalParams, n: usize) -> Result<GapReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "gap report needs N ≥ 2, got {n}"
        )));
    }
    let (a, c, d, r) = (params.a, params.c, params.d, params.r);
    let ni = n as i64;
    let freqs: Vec<(f64, f64)> = (-ni..=ni).map(|k| eigenfrequencies(params, k)).collect();
    let plus_gaps = freqs.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let minus_gaps = freqs.windows(2).map(|w| w[1].1 - w[0].1).collect();

    let root = (4.0 * a * c * d + (c - 1.0).powi(2)).sqrt();
    let a_const = (c + 1.0 + root) / (2.0 * c);
    let b_or_slope = if params.is_resonant() {
        -r / (c * (c + 1.0))
    } else {
        4.0 * c * (1.0 - a * d) / (c + 1.0 + root)
    };
    let t0 = critical_time(params);
    let d_plus = upper_density_estimate(params, n, t0);
    Ok(GapReport {
        n,
        plus_gaps,
        minus_gaps,
        a_const,
        b_or_slope,
        gamma_inf_estimate: if d_plus > 0.0 {
            1.0 / d_plus
        } else {
            f64::INFINITY
        },
        d_plus_estimate: d_plus,
        t0,
    })
}

/// `min_ℓ n⁺(ℓ)/ℓ` over a finite ladder of window lengths.
///
/// Only frequencies inside `(−Ω, Ω)` take part, where `Ω` is the smallest
/// `|ω_{N+1}^±|`: inside that range the truncated family coincides with the full one.
/// The ladder is `{T₀/4, T₀/2, T₀, 2T₀, Ω}` when `T₀ > 0` and the geometric ladder
/// `Ω·2^{−j}`, `j = 0..8`, otherwise. The double zero `ω₀^+ = ω₀^− = 0` counts once.
fn upper_density_estimate(params: &PhysicalParams, n: usize, t0: f64) -> f64 {
    let (wp, wm) = eigenfrequencies(params, n as i64 + 1);
    let omega_cap = wp.abs().min(wm.abs());
    let ni = n as i64;
    let mut values: Vec<f64> = (-ni..=ni)
        .flat_map(|k| {
            let (p, m) = eigenfrequencies(params, k);
            if k == 0 {
                vec![p]
            } else {
                vec![p, m]
            }
        })
        .filter(|w| w.abs() < omega_cap)
        .collect();
    values.sort_by(|x, y| x.total_cmp(y));
    if values.is_empty() {
        return 0.0;
    }
    let span_half = omega_cap;
    let ladder: Vec<f64> = if t0 > 0.0 {
        [t0 / 4.0, t0 / 2.0, t0, 2.0 * t0, span_half]
            .into_iter()
            .filter(|&l| l <= 2.0 * omega_cap)
            .collect()
    } else {
        (0..9).map(|j| span_half / 2f64.powi(j)).collect()
    };
    ladder
        .into_iter()
        .map(|len| max_count_in_window(&values, len) as f64 / len)
        .fold(f64::INFINITY, f64::min)
}

/// Largest number of sorted values contained in a closed interval of length `len`.
pub fn max_count_in_window(sorted: &[f64], len: f64) -> usize {
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..sorted.len() {
        if hi < lo {
            hi = lo;
        }
        while hi < sorted.len() && sorted[hi] - sorted[lo] <= len {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    best
}

/// Result of a pairwise frequency coincidence scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    /// Distinct labels whose frequencies differ by less than the tolerance.
    pub pairs: Vec<(ModeBranch, ModeBranch)>,
    /// The structural coincidence `ω₀^+ = ω₀^− = 0`, always present.
    pub k0_degenerate: bool,
}

impl ResonanceReport {
    pub fn is_clean(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// All pairs of distinct labels with `|ω − ω'| < tol`, the `k = 0` pair excluded.
pub fn resonance_check(params: &PhysicalParams, n: usize, tol: f64) -> Result<ResonanceReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resonance tolerance must be positive, got {tol}"
        )));
    }
    let spec = Spectrum::new(*params, n);
    let mut entries = spec.frequencies();
    entries.sort_by(|x, y| x.1.total_cmp(&y.1));
    let zero_plus = ModeBranch::new(0, Branch::Plus);
    let zero_minus = ModeBranch::new(0, Branch::Minus);
    let mut pairs = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[j].1 - entries[i].1 >= tol {
                break;
            }
            let (x, y) = (entries[i].0, entries[j].0);
            let structural =
                (x == zero_plus && y == zero_minus) || (x == zero_minus && y == zero_plus);
            if !structural {
                pairs.push(if x <= y { (x, y) } else { (y, x) });
            }
        }
    }
    pairs.sort();
    Ok(ResonanceReport {
        pairs,
        k0_degenerate: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ones() -> PhysicalParams {
        PhysicalParams::resonant()
    }

    #[test]
    fn rejects_nonpositive_params() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        let p = PhysicalParams::new(2.0, 3.0, 4.0, 5.0).unwrap();
        assert_eq!(p.weight(), 2.0 * 3.0 / 4.0);
        assert!(!p.is_resonant());
        assert!(ones().is_resonant());
    }

    #[test]
    fn symbol_matrix_examples() {
        assert_eq!(symbol_matrix(&ones(), 0), Matrix2::zeros());
        assert_eq!(symbol_matrix(&ones(), 1), Matrix2::new(1.0, 1.0, 1.0, 0.0));
        let p = PhysicalParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(symbol_matrix(&p, 2), Matrix2::new(8.0, 16.0, 8.0, 6.0));
    }

    #[test]
    fn eigenfrequency_examples() {
        assert_eq!(eigenfrequencies(&ones(), 0), (0.0, 0.0));
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let (p, m) = eigenfrequencies(&ones(), 1);
        assert!((p - golden).abs() < 1e-15);
        assert!((m - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        // formula-sign labeling: ω_{-k}^± = −ω_k^±, so the values are the
        // reflected pair {−(1−√5)/2, −(1+√5)/2}
        let (pn, mn) = eigenfrequencies(&ones(), -1);
        assert!((pn + p).abs() < 1e-15 && (mn + m).abs() < 1e-15);
        let mut vals = [pn, mn];
        vals.sort_by(|x, y| y.total_cmp(x));
        assert!((vals[0] + (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((vals[1] + golden).abs() < 1e-15);
    }

    #[test]
    fn k0_eigenvectors() {
        let (p, m) = eigenvectors(&ones(), 0);
        assert_eq!(p.z, [2.0, 2.0]);
        assert_eq!(m.z, [2.0, -2.0]);
    }

    #[test]
    fn eigenvectors_tend_to_limits() {
        let p = ones();
        let (zp, zm) = limit_eigenvectors(&p);
        assert!((zp[0] - 2.0).abs() < 1e-15 && (zp[1] - 2.0).abs() < 1e-15);
        assert!((zm[0] - 2.0).abs() < 1e-15 && (zm[1] + 2.0).abs() < 1e-15);
        let (ep, em) = eigenvectors(&p, 10_000);
        assert!((ep.z[1] - zp[1]).abs() < 1e-7);
        assert!((em.z[1] - zm[1]).abs() < 1e-7);
    }

    #[test]
    fn weighted_orthogonality_and_relation() {
        for params in [
            PhysicalParams::generic(),
            ones(),
            PhysicalParams::new(0.3, 2.5, 1.7, 0.2).unwrap(),
        ] {
            for k in -40..=40 {
                let (p, m) = eigenvectors(&params, k);
                let scale =
                    params.weighted_norm_sq(p.z).sqrt() * params.weighted_norm_sq(m.z).sqrt();
                assert!(params.weighted_dot(p.z, m.z).abs() <= 1e-12 * scale);
                if k != 0 {
                    let k3 = (k as f64).powi(3);
                    for e in [p, m] {
                        // (ω − k³) z₁ − a k³ z₂ = 0, scaled by k⁻³
                        let res = (e.omega / k3 - 1.0) * e.z[0] - params.a() * e.z[1];
                        assert!(res.abs() <= 1e-12 * (1.0 + e.z[0].abs()), "k={k} res={res}");
                    }
                }
            }
        }
    }

    #[test]
    fn characteristic_residual_small() {
        for params in [PhysicalParams::generic(), ones()] {
            for k in -64..=64 {
                let (p, m) = eigenfrequencies(&params, k);
                for w in [p, m] {
                    let res = characteristic_residual(&params, k, w);
                    assert!(
                        res.abs() <= 1e-9 * (w * w).max(1.0),
                        "k={k} ω={w} res={res}"
                    );
                }
            }
        }
    }

    #[test]
    fn critical_time_examples() {
        assert_eq!(critical_time(&PhysicalParams::generic()), 0.0);
        assert!((critical_time(&ones()) - 4.0 * PI).abs() < 1e-14);
        let p = PhysicalParams::new(0.5, 2.0, 2.0, PI).unwrap();
        assert!((critical_time(&p) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn gap_report_constants() {
        let rep = gap_report(&ones(), 200).unwrap();
        assert!((rep.a_const - 2.0).abs() < 1e-15);
        assert!((rep.b_or_slope + 0.5).abs() < 1e-15);
        assert_eq!(rep.plus_gaps.len(), 400);
        assert!((rep.minus_gaps.last().unwrap() + 0.5).abs() < 0.05);
        assert!(gap_report(&ones(), 1).is_err());
    }

    #[test]
    fn index_layout_roundtrip() {
        let n = 5;
        for idx in 0..modal_dim(n) {
            assert_eq!(ModeBranch::from_index(idx, n).index(n), idx);
        }
    }

    #[test]
    fn window_counting() {
        let v = [0.0, 0.5, 1.0, 1.5, 10.0];
        assert_eq!(max_count_in_window(&v, 1.0), 3);
        assert_eq!(max_count_in_window(&v, 0.1), 1);
        assert_eq!(max_count_in_window(&v, 20.0), 5);
    }

    #[test]
    fn resonance_excludes_structural_pair() {
        let rep = resonance_check(&ones(), 12, 1e-9).unwrap();
        assert!(rep.is_clean());
        assert!(rep.k0_degenerate);
        // a huge tolerance collects many pairs but never ((0,+),(0,−))
        let rep = resonance_check(&ones(), 3, 1e6).unwrap();
        assert!(!rep.pairs.is_empty());
        let structural = (
            ModeBranch::new(0, Branch::Plus),
            ModeBranch::new(0, Branch::Minus),
        );
        assert!(!rep.pairs.contains(&structural));
        assert!(resonance_check(&ones(), 3, 0.0).is_err());
    }
}
