//! 1-periodic functions on dyadic grids and trigonometric polynomials.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID_LOG2: u32 = 1;
pub const MAX_GRID_LOG2: u32 = 26;

/// `sin(π x)`, exact at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `cos(π x)`, exact at integers and half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = (x - 2.0 * (x / 2.0).round()).abs();
    if r <= 0.25 {
        (PI * r).cos()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).sin()
    } else {
        -(PI * (1.0 - r)).cos()
    }
}

/// `e^{-2πi t}`.
pub fn cis_neg_2pi(t: f64) -> Complex64 {
    Complex64::new(cos_pi(2.0 * t), -sin_pi(2.0 * t))
}

/// Samples of a 1-periodic function at `γ_j = j / 2^m`, `j = 0..2^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFunction {
    grid_log2: u32,
    samples: Vec<Complex64>,
}

impl PeriodicFunction {
    pub fn new(grid_log2: u32, samples: Vec<Complex64>) -> Result<Self> {
        check_grid(grid_log2)?;
        if samples.len() != 1usize << grid_log2 {
            return Err(Error::DimensionMismatch { expected: 1 << grid_log2, found: samples.len() });
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("periodic samples must be finite".into()));
        }
        Ok(Self { grid_log2, samples })
    }

    /// Samples `f` on the grid in parallel.
    pub fn from_fn<F>(grid_log2: u32, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        check_grid(grid_log2)?;
        let n = 1usize << grid_log2;
        let samples = (0..n).into_par_iter().map(|j| f(grid_point(grid_log2, j))).collect();
        Self::new(grid_log2, samples)
    }

    pub fn constant(grid_log2: u32, value: Complex64) -> Result<Self> {
        check_grid(grid_log2)?;
        Self::new(grid_log2, vec![value; 1 << grid_log2])
    }

    pub fn grid_log2(&self) -> u32 {
        self.grid_log2
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn gamma(&self, j: usize) -> f64 {
        grid_point(self.grid_log2, j)
    }

    pub fn map<F>(&self, f: F) -> PeriodicFunction
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        PeriodicFunction {
            grid_log2: self.grid_log2,
            samples: self.samples.par_iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &PeriodicFunction) -> Result<f64> {
        if self.grid_log2 != other.grid_log2 {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Writes `gamma,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["gamma", "re", "im"])?;
        for (j, z) in self.samples.iter().enumerate() {
            w.write_record([
                crate::io::fmt_sig(self.gamma(j)),
                crate::io::fmt_sig(z.re),
                crate::io::fmt_sig(z.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn check_grid(grid_log2: u32) -> Result<()> {
    if !(MIN_GRID_LOG2..=MAX_GRID_LOG2).contains(&grid_log2) {
        return Err(Error::InvalidInput(format!(
            "grid_log2 must lie in [{MIN_GRID_LOG2}, {MAX_GRID_LOG2}], got {grid_log2}"
        )));
    }
    Ok(())
}

pub fn grid_point(grid_log2: u32, j: usize) -> f64 {
    j as f64 / (1u64 << grid_log2) as f64
}

/// A trigonometric polynomial `H(γ) = Σ_{|k| ≤ K} c_k e^{-2πikγ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSymbol {
    /// `c_{-K}, ..., c_K`.
    coefficients: Vec<Complex64>,
}

impl TruncatedSymbol {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "a truncated symbol needs 2K+1 coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn constant(c0: Complex64) -> Self {
        Self { coefficients: vec![c0] }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() / 2
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `c_k`, zero outside `|k| ≤ K`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k + self.order() as i64;
        if idx < 0 || idx as usize >= self.coefficients.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coefficients[idx as usize]
        }
    }

    /// `(k, c_k)` pairs from `-K` to `K`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k0 = self.order() as i64;
        self.coefficients.iter().enumerate().map(move |(i, &c)| (i as i64 - k0, c))
    }

    pub fn eval(&self, gamma: f64) -> Complex64 {
        self.iter().map(|(k, c)| c * cis_neg_2pi(k as f64 * gamma)).sum()
    }

    /// `Σ |c_k|`, an upper bound for `sup |H|`.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }
}

/// A 1-periodic multiplier that can be sampled on a dyadic grid and,
/// where known, between grid points.
pub trait PeriodicSymbol: Sync {
    /// Whether samples on the `2^m` grid are available.
    fn supports_grid(&self, grid_log2: u32) -> bool;
    fn grid_value(&self, grid_log2: u32, j: usize) -> Complex64;
    /// Off-grid value; `None` for purely sampled symbols.
    fn value(&self, gamma: f64) -> Option<Complex64>;
}

impl PeriodicSymbol for PeriodicFunction {
    fn supports_grid(&self, grid_log2: u32) -> bool {
        grid_log2 <= self.grid_log2
    }

    fn grid_value(&self, grid_log2: u32, j: usize) -> Complex64 {
        self.samples[j << (self.grid_log2 - grid_log2)]
    }

    fn value(&self, _gamma: f64) -> Option<Complex64> {
        None
    }
}

impl PeriodicSymbol for TruncatedSymbol {
    fn supports_grid(&self, _grid_log2: u32) -> bool {
        true
    }

    fn grid_value(&self, grid_log2: u32, j: usize) -> Complex64 {
        self.eval(grid_point(grid_log2, j))
    }

    fn value(&self, gamma: f64) -> Option<Complex64> {
        Some(self.eval(gamma))
    }
}

/// A symbol given by a closure on `[0, 1)`.
#[derive(Clone)]
pub struct FnSymbol(pub Arc<dyn Fn(f64) -> Complex64 + Send + Sync>);

impl PeriodicSymbol for FnSymbol {
    fn supports_grid(&self, _grid_log2: u32) -> bool {
        true
    }

    fn grid_value(&self, grid_log2: u32, j: usize) -> Complex64 {
        (self.0)(grid_point(grid_log2, j))
    }

    fn value(&self, gamma: f64) -> Option<Complex64> {
        Some((self.0)(gamma.rem_euclid(1.0)))
    }
}

/// `c_k = 2^{-m} Σ_j P(γ_j) e^{2πikγ_j}` for `|k| ≤ K`, so that
/// `P(γ) ≈ Σ c_k e^{-2πikγ}`.
pub fn fourier_coefficients(p: &PeriodicFunction, order: usize) -> Result<TruncatedSymbol> {
    let n = p.len();
    if 2 * order + 1 > n {
        return Err(Error::InvalidInput(format!(
            "order {order} needs at least {} grid points, grid has {n}",
            2 * order + 1
        )));
    }
    let mut buf = p.samples().to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let k0 = order as i64;
    let coefficients = (-k0..=k0)
        .map(|k| buf[k.rem_euclid(n as i64) as usize] * scale)
        .collect();
    TruncatedSymbol::new(coefficients)
}

/// Samples a trigonometric polynomial on the `2^m` grid.
pub fn eval_trig_poly(symbol: &TruncatedSymbol, grid_log2: u32) -> Result<PeriodicFunction> {
    PeriodicFunction::from_fn(grid_log2, |g| symbol.eval(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trig_helpers_exact_at_special_points() {
        for k in -5..=5 {
            assert_eq!(sin_pi(k as f64), 0.0);
            assert_eq!(cos_pi(k as f64 + 0.5), 0.0);
        }
        assert_eq!(cos_pi(1.0), -1.0);
        assert_eq!(sin_pi(0.5), 1.0);
        for &x in &[0.1, 0.37, -2.3, 7.9, 1234.567] {
            assert_abs_diff_eq!(sin_pi(x), (PI * x).sin(), epsilon = 1e-11);
            assert_abs_diff_eq!(cos_pi(x), (PI * x).cos(), epsilon = 1e-11);
        }
    }

    #[test]
    fn coefficients_of_constant() {
        let p = PeriodicFunction::constant(8, re(1.0)).unwrap();
        let c = fourier_coefficients(&p, 3).unwrap();
        assert_abs_diff_eq!(c.coefficient(0).re, 1.0, epsilon = 1e-15);
        for k in [-3, -2, -1, 1, 2, 3] {
            assert!(c.coefficient(k).norm() < 1e-15);
        }
    }

    #[test]
    fn coefficients_of_cosine() {
        let p = PeriodicFunction::from_fn(8, |g| re(cos_pi(2.0 * g))).unwrap();
        let c = fourier_coefficients(&p, 2).unwrap();
        assert_abs_diff_eq!(c.coefficient(1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.coefficient(-1).re, 0.5, epsilon = 1e-15);
        assert!(c.coefficient(0).norm() < 1e-15);
        assert!(c.coefficient(2).norm() < 1e-15);
    }

    #[test]
    fn sign_convention_matches_symbol_evaluation() {
        // P(γ) = e^{-2πiγ} must give c_1 = 1.
        let p = PeriodicFunction::from_fn(6, cis_neg_2pi).unwrap();
        let c = fourier_coefficients(&p, 1).unwrap();
        assert_abs_diff_eq!(c.coefficient(1).re, 1.0, epsilon = 1e-14);
        assert!(c.coefficient(-1).norm() < 1e-14);
    }

    #[test]
    fn order_too_large_for_grid() {
        let p = PeriodicFunction::constant(2, re(1.0)).unwrap();
        assert!(fourier_coefficients(&p, 1).is_ok());
        assert!(matches!(fourier_coefficients(&p, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn trig_poly_examples() {
        let one = TruncatedSymbol::constant(re(1.0));
        let p = eval_trig_poly(&one, 6).unwrap();
        assert!(p.samples().iter().all(|z| (z - re(1.0)).norm() < 1e-15));
        let cos = TruncatedSymbol::new(vec![re(0.5), re(0.0), re(0.5)]).unwrap();
        let p = eval_trig_poly(&cos, 6).unwrap();
        for (j, z) in p.samples().iter().enumerate() {
            assert_abs_diff_eq!(z.re, (2.0 * PI * p.gamma(j)).cos(), epsilon = 1e-14);
            assert!(z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_grids_and_lengths() {
        assert!(PeriodicFunction::new(3, vec![re(0.0); 7]).is_err());
        assert!(PeriodicFunction::constant(0, re(0.0)).is_err());
        assert!(PeriodicFunction::new(1, vec![re(f64::NAN), re(0.0)]).is_err());
        assert!(TruncatedSymbol::new(vec![re(1.0), re(2.0)]).is_err());
    }

    #[test]
    fn sampled_symbol_serves_coarser_grids() {
        let p = PeriodicFunction::from_fn(6, |g| re(g)).unwrap();
        assert!(p.supports_grid(4));
        assert!(!p.supports_grid(7));
        assert_eq!(p.grid_value(4, 3), re(3.0 / 16.0));
    }
}
