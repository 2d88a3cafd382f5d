//! Pointwise evaluation of bracket products `Σ_n φ̂(γ+n) conj(ψ̂(γ+n))`.

use num_complex::Complex64;

use super::generator::{DecayBound, Generator, Multiplier};
use super::periodic::cos_pi;
use super::SiOptions;
use crate::bspline::centered_bspline;
use crate::error::{Error, Result};

#[derive(Clone)]
enum Kernel {
    /// Two centered B-splines: by Poisson summation the bracket is the
    /// cosine series with coefficients `B_{a+b}(k)`.
    Poisson(Vec<f64>),
    /// Truncated integer sum over `|n| ≤ radius`.
    Direct { left: Generator, right: Generator, radius: i64 },
}

/// A prepared bracket product that can be evaluated at any `γ`.
#[derive(Clone)]
pub struct BracketPlan {
    left: Vec<Multiplier>,
    right: Vec<Multiplier>,
    kernel: Kernel,
}

fn peel(g: &Generator) -> (Vec<Multiplier>, Generator) {
    let mut multipliers = Vec::new();
    let mut current = g.clone();
    while let Generator::Modulated { multiplier, base } = current {
        multipliers.push(multiplier);
        current = (*base).clone();
    }
    (multipliers, current)
}

/// Smallest radius `R` with `Σ_{|n| > R} |φ̂ ψ̂|(γ + n) < tol` for `γ ∈ [0, 1)`.
pub(crate) fn truncation_radius(a: DecayBound, b: DecayBound, opts: &SiOptions) -> Result<i64> {
    let rho = a.radius.max(b.radius);
    let r_min = rho.ceil() as i64 + 1;
    if a.constant == 0.0 || b.constant == 0.0 {
        return Ok(r_min);
    }
    let c = a.constant * b.constant;
    let p = a.exponent + b.exponent;
    if !(p > 1.0) {
        return Err(Error::NonSummableTail(format!("combined decay exponent {p} is not above 1")));
    }
    // For n > R, |γ+n| ≥ n; for n < -R, |γ+n| ≥ |n| - 1 ≥ R.
    let tail = |r: f64| c * (2.0 * r.powf(1.0 - p) / (p - 1.0) + r.powf(-p));
    let guess = (2.0 * c / ((p - 1.0) * opts.tail_tol)).powf(1.0 / (p - 1.0)).ceil();
    if !guess.is_finite() || guess > 4.0 * opts.max_radius as f64 {
        return Err(Error::NonSummableTail(format!(
            "tail below {:.1e} needs a radius near {guess:.3e}, above the limit {}",
            opts.tail_tol, opts.max_radius
        )));
    }
    let mut r = (guess as i64).max(r_min);
    while r > r_min && tail((r - 1) as f64) < opts.tail_tol {
        r -= 1;
    }
    while tail(r as f64) >= opts.tail_tol {
        r += 1;
    }
    if r as usize > opts.max_radius {
        return Err(Error::NonSummableTail(format!(
            "tail below {:.1e} needs radius {r}, above the limit {}",
            opts.tail_tol, opts.max_radius
        )));
    }
    Ok(r)
}

impl BracketPlan {
    pub fn new(phi: &Generator, psi: &Generator, opts: &SiOptions) -> Result<Self> {
        let (left, a) = peel(phi);
        let (right, b) = peel(psi);
        let kernel = match (&a, &b) {
            (Generator::BSpline { order: p }, Generator::BSpline { order: q }) => {
                let s = p + q;
                let coeffs = (0..=s / 2).map(|k| centered_bspline(s, k as f64)).collect();
                Kernel::Poisson(coeffs)
            }
            _ => {
                let radius = truncation_radius(a.decay_bound(), b.decay_bound(), opts)?;
                Kernel::Direct { left: a, right: b, radius }
            }
        };
        Ok(Self { left, right, kernel })
    }

    /// Value of the bracket at `γ` (any real; the bracket is 1-periodic).
    pub fn eval(&self, gamma: f64) -> Complex64 {
        let g = gamma.rem_euclid(1.0);
        let core = match &self.kernel {
            Kernel::Poisson(coeffs) => {
                let mut acc = 0.0;
                for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc += 2.0 * c * cos_pi(2.0 * k as f64 * g);
                }
                Complex64::new(acc + coeffs[0], 0.0)
            }
            Kernel::Direct { left, right, radius } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in (1..=*radius).rev() {
                    for x in [g + n as f64, g - n as f64] {
                        acc += left.fourier_transform(x) * right.fourier_transform(x).conj();
                    }
                }
                acc + left.fourier_transform(g) * right.fourier_transform(g).conj()
            }
        };
        let l: Complex64 = self.left.iter().map(|m| m.eval(g)).product();
        let r: Complex64 = self.right.iter().map(|m| m.eval(g)).product();
        l * r.conj() * core
    }

    /// Number of integer shifts summed per evaluation (0 for the closed form).
    pub fn radius(&self) -> Option<i64> {
        match &self.kernel {
            Kernel::Poisson(_) => None,
            Kernel::Direct { radius, .. } => Some(*radius),
        }
    }
}
