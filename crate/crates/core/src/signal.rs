//! Finite exponential sums `Σ_j A_j t^{p_j} e^{iμ_j t}` with `p_j ∈ {0, 1}`.
//!
//! Pointwise traces, controls and divided-difference basis functions all live in
//! this class, so every time integral in the pipeline has a closed form.

use num_complex::Complex64;

use crate::integrals::osc_moment;

/// One term `amplitude · t^degree · e^{i·frequency·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub amplitude: Complex64,
    pub frequency: f64,
    pub degree: u32,
}

impl ExpTerm {
    pub fn new(amplitude: Complex64, frequency: f64, degree: u32) -> Self {
        Self {
            amplitude,
            frequency,
            degree,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let phase = Complex64::new(0.0, self.frequency * t).exp();
        self.amplitude * phase * t.powi(self.degree as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExponentialSignal {
    pub terms: Vec<ExpTerm>,
}

impl ExponentialSignal {
    pub fn new(terms: Vec<ExpTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `e^{iμt}`.
    pub fn pure(frequency: f64) -> Self {
        Self::new(vec![ExpTerm::new(Complex64::new(1.0, 0.0), frequency, 0)])
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| ExpTerm {
                    amplitude: t.amplitude * factor,
                    ..*t
                })
                .collect(),
        )
    }

    /// Concatenation; call [`simplify`](Self::simplify) to merge terms.
    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::new(terms)
    }

    /// Merge terms with identical `(frequency, degree)` by adding amplitudes and
    /// drop exact zeros. Terms are ordered by degree, then frequency.
    pub fn simplify(mut self) -> Self {
        self.terms.sort_by(|x, y| {
            x.degree
                .cmp(&y.degree)
                .then(x.frequency.total_cmp(&y.frequency))
        });
        let mut merged: Vec<ExpTerm> = Vec::with_capacity(self.terms.len());
        for term in self.terms {
            match merged.last_mut() {
                Some(last) if last.frequency == term.frequency && last.degree == term.degree => {
                    last.amplitude += term.amplitude;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.amplitude != Complex64::new(0.0, 0.0));
        Self::new(merged)
    }

    /// `∫_{t0}^{t1} f(t) conj(g(t)) dt` in closed form (oriented).
    pub fn inner(&self, other: &Self, t0: f64, t1: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.terms {
            for q in &other.terms {
                acc += p.amplitude
                    * q.amplitude.conj()
                    * osc_moment(p.degree + q.degree, p.frequency - q.frequency, t0, t1);
            }
        }
        acc
    }

    /// `∫_{t0}^{t1} |f(t)|² dt`.
    pub fn norm_sq(&self, t0: f64, t1: f64) -> f64 {
        self.inner(self, t0, t1).re
    }

    /// Largest `|amplitude|`, handy for scale-free tolerances.
    pub fn max_amplitude(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude.norm())
            .fold(0.0, f64::max)
    }
}
