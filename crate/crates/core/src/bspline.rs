//! Centered B-splines and the truncated oblique duals `ψ_K = Σ_{|k|≤K} c_k B₃(· - k)`
//! of `{T_k B₁}` with respect to `span{T_k B₃}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift_invariant::{self as si, Generator, SiOptions, TruncatedSymbol};

pub use crate::shift_invariant::generator::MAX_BSPLINE_ORDER;

/// Centered B-spline of order `m` at `x`, support `[-m/2, m/2]`.
///
/// For `m = 1` the value at the jumps `±1/2` is `1/2`. Orders up to twice
/// [`MAX_BSPLINE_ORDER`] are accepted so that bracket kernels of two
/// admissible splines can be evaluated.
pub fn centered_bspline(order: u32, x: f64) -> f64 {
    let m = order as usize;
    if m == 0 {
        return 0.0;
    }
    let t = x + m as f64 / 2.0;
    if t < 0.0 || t > m as f64 {
        return 0.0;
    }
    // vals[j] = N_k(t - j), cardinal spline on [0, k].
    let mut vals: Vec<f64> = (0..m)
        .map(|j| {
            let s = t - j as f64;
            if s > 0.0 && s < 1.0 {
                1.0
            } else if s == 0.0 || s == 1.0 {
                0.5
            } else {
                0.0
            }
        })
        .collect();
    for k in 1..m {
        for j in 0..(m - k) {
            let s = t - j as f64;
            vals[j] = (s * vals[j] + (k as f64 + 1.0 - s) * vals[j + 1]) / k as f64;
        }
    }
    vals[0]
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order > MAX_BSPLINE_ORDER {
        return Err(Error::InvalidInput(format!(
            "B-spline order must lie in [1, {MAX_BSPLINE_ORDER}], got {order}"
        )));
    }
    Ok(())
}

/// Generator with `φ̂(ξ) = sinc(ξ)^m`.
pub fn bspline_ft(order: u32) -> Result<Generator> {
    Generator::bspline(order)
}

/// Time-domain value `B_m(x)`.
pub fn bspline_time(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(centered_bspline(order, x))
}

/// `ψ_K` together with its certified approximation error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDualGenerator {
    pub k: usize,
    pub coefficients: TruncatedSymbol,
    pub support: [f64; 2],
    pub eps: f64,
}

impl TruncatedDualGenerator {
    pub fn generator(&self) -> Generator {
        Generator::modulated(self.coefficients.clone(), Generator::BSpline { order: 3 })
    }

    /// `ψ_K(x) = Σ c_k B₃(x - k)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(k, c)| c.re * centered_bspline(3, x - k as f64))
            .sum()
    }

    /// Lower bound on the best `ε` for which `{T_k B₁}`, `{T_k ψ_K}` are
    /// approximate oblique duals.
    pub fn necessary_eps(&self, opts: &SiOptions) -> Result<f64> {
        si::necessary_eps(&b1(), &b3(), &self.coefficients, opts)
    }
}

fn b1() -> Generator {
    Generator::BSpline { order: 1 }
}

fn b3() -> Generator {
    Generator::BSpline { order: 3 }
}

pub fn psi_support(k: usize) -> [f64; 2] {
    let half = (3 + 2 * k) as f64 / 2.0;
    [-half, half]
}

/// Truncates the exact dual symbol `1 / bracket(B₁, B₃)` to `|k| ≤ K`.
pub fn truncated_dual_generator(k: usize, opts: &SiOptions) -> Result<TruncatedDualGenerator> {
    let h = si::dual_symbol(&b1(), &b3(), opts)?;
    let coefficients = si::fourier_coefficients(&h, k)?;
    let eps = si::sufficient_eps(&b1(), &b3(), &coefficients, opts)?;
    Ok(TruncatedDualGenerator { k, coefficients, support: psi_support(k), eps })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TableRow {
    pub K: usize,
    pub support_lo: f64,
    pub support_hi: f64,
    pub eps: f64,
}

/// Supports and errors of `ψ_K` for `K = 0..=k_max`.
pub fn example_table(k_max: usize, opts: &SiOptions) -> Result<Vec<TableRow>> {
    let h = si::dual_symbol(&b1(), &b3(), opts)?;
    let full = si::fourier_coefficients(&h, k_max)?;
    (0..=k_max)
        .map(|k| {
            let c = TruncatedSymbol::new(full.iter().filter(|(j, _)| j.unsigned_abs() as usize <= k).map(|(_, c)| c).collect())?;
            let eps = si::sufficient_eps(&b1(), &b3(), &c, opts)?;
            let [lo, hi] = psi_support(k);
            Ok(TableRow { K: k, support_lo: lo, support_hi: hi, eps })
        })
        .collect()
}

/// `n_samples` uniform samples `(x, ψ_K(x))` over the support of `ψ_K`.
pub fn emit_psi_samples(k: usize, n_samples: usize, opts: &SiOptions) -> Result<Vec<(f64, f64)>> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n_samples}")));
    }
    let psi = truncated_dual_generator(k, opts)?;
    let [lo, hi] = psi.support;
    let step = (hi - lo) / (n_samples - 1) as f64;
    Ok((0..n_samples)
        .map(|i| {
            let x = if i + 1 == n_samples { hi } else { lo + i as f64 * step };
            (x, psi.eval(x))
        })
        .collect())
}
