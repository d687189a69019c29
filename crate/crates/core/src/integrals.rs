//! Closed-form moments of complex exponentials.
//!
//! Every time integral in the toolkit reduces to
//!
//! ```text
//!     ∫_{t0}^{t1} t^m e^{z t} dt,   m ∈ {0, 1, 2},  z ∈ ℂ
//! ```
//!
//! which is evaluated through the scaled kernel `ψ_m(θ) = ∫_0^1 u^m e^{θ u} du`
//! with `θ = z·L`. For `|θ| < 1` a power series is used, which stays accurate when
//! the rate is tiny or exactly zero (the resonant Duhamel case); otherwise the
//! closed form `ψ_0 = (e^θ − 1)/θ`, `ψ_m = (e^θ − m ψ_{m−1})/θ`.

use num_complex::Complex64;

const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 28;

/// `ψ_m(θ) = ∫_0^1 u^m e^{θu} du`.
pub fn unit_moment(m: u32, theta: Complex64) -> Complex64 {
    if theta.norm() < SERIES_RADIUS {
        // Σ_j θ^j / (j! (m + j + 1))
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..SERIES_TERMS {
            sum += term / (m as f64 + j as f64 + 1.0);
            term *= theta / (j as f64 + 1.0);
        }
        sum
    } else {
        let e = theta.exp();
        let mut psi = (e - 1.0) / theta;
        for j in 1..=m {
            psi = (e - j as f64 * psi) / theta;
        }
        psi
    }
}

/// `∫_0^len s^m e^{rate·s} ds`. `len` may be negative (oriented integral).
pub fn exp_moment(m: u32, rate: Complex64, len: f64) -> Complex64 {
    if len == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    len.powi(m as i32 + 1) * unit_moment(m, rate * len)
}

/// `∫_{t0}^{t1} t^m e^{rate·t} dt` (oriented: swapping the limits flips the sign).
pub fn window_moment(m: u32, rate: Complex64, t0: f64, t1: f64) -> Complex64 {
    let len = t1 - t0;
    if t0 == 0.0 {
        return exp_moment(m, rate, len);
    }
    // t = t0 + s, binomial expansion of (t0 + s)^m
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=m {
        let binom = binomial(m, j) as f64;
        acc += binom * t0.powi((m - j) as i32) * exp_moment(j, rate, len);
    }
    (rate * t0).exp() * acc
}

/// Purely oscillatory special case `∫_{t0}^{t1} t^m e^{iδt} dt`.
pub fn osc_moment(m: u32, delta: f64, t0: f64, t1: f64) -> Complex64 {
    window_moment(m, Complex64::new(0.0, delta), t0, t1)
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn zero_rate_is_polynomial_moment() {
        for m in 0..3 {
            let got = osc_moment(m, 0.0, 0.5, 2.0);
            let want = (2.0f64.powi(m as i32 + 1) - 0.5f64.powi(m as i32 + 1)) / (m as f64 + 1.0);
            assert!(
                close(got, Complex64::new(want, 0.0), 1e-15),
                "m={m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn matches_closed_form_away_from_resonance() {
        let delta = 3.7;
        let t = 2.3;
        let i = Complex64::i();
        let want0 = ((i * delta * t).exp() - 1.0) / (i * delta);
        assert!(close(osc_moment(0, delta, 0.0, t), want0, 1e-14));
        // ∫_0^T s e^{iδs} ds = e^{iδT}(T/(iδ) + 1/δ²) − 1/δ²
        let want1 = (i * delta * t).exp() * (t / (i * delta) + 1.0 / (delta * delta))
            - 1.0 / (delta * delta);
        assert!(close(osc_moment(1, delta, 0.0, t), want1, 1e-14));
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        for m in 0..3 {
            for &theta in &[0.999, 1.001] {
                let z = Complex64::new(0.3 * theta, 0.9539392014169456 * theta);
                let series = {
                    let mut term = Complex64::new(1.0, 0.0);
                    let mut sum = Complex64::new(0.0, 0.0);
                    for j in 0..40 {
                        sum += term / (m as f64 + j as f64 + 1.0);
                        term *= z / (j as f64 + 1.0);
                    }
                    sum
                };
                assert!(close(unit_moment(m, z), series, 1e-14));
            }
        }
    }

    #[test]
    fn near_resonant_rate_has_no_cancellation() {
        // (e^{iθ} − 1)/(iθ) = sin θ/θ + i·2sin²(θ/2)/θ, free of cancellation
        let t = 3.0;
        for &delta in &[1e-13, 1e-9, 1e-6, 1e-4] {
            let th = delta * t;
            let got = osc_moment(0, delta, 0.0, t);
            let want = Complex64::new(t * th.sin() / th, t * 2.0 * (th / 2.0).sin().powi(2) / th);
            assert!(close(got, want, 1e-14), "δ={delta}");
        }
    }

    #[test]
    fn oriented_integral_flips_sign() {
        let z = Complex64::new(-0.4, 2.0);
        for m in 0..3 {
            let a = window_moment(m, z, -1.5, 0.75);
            let b = window_moment(m, z, 0.75, -1.5);
            assert!(close(a, -b, 1e-14));
        }
    }
}
