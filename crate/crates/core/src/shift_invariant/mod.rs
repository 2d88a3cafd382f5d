//! Fourier-domain tools for integer-translate systems `{T_k φ}`.
//!
//! All quantities are 1-periodic functions of `γ` built from bracket
//! products. Essential suprema and infima are taken over the grid points of
//! `{Φ > τ_Φ}` (with `τ_Φ` relative to `max Φ`), followed by one
//! golden-section pass around the best grid cell whenever the integrand can
//! be evaluated between grid points.

mod bracket;
pub mod generator;
pub mod periodic;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bracket::BracketPlan;
pub use generator::{DecayBound, Generator, Multiplier, TabulatedTransform};
pub use periodic::{
    eval_trig_poly, fourier_coefficients, FnSymbol, PeriodicFunction, PeriodicSymbol, TruncatedSymbol,
};

use crate::error::{Error, Result};

/// Grid and tolerance settings for the Fourier-domain computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiOptions {
    pub grid_log2: u32,
    /// `τ_Φ = zero_rel_tol · max Φ` separates the zero set of `Φ`.
    pub zero_rel_tol: f64,
    /// `τ_c`: brackets below this modulus on `{Φ > τ_Φ}` are singular.
    pub singular_tol: f64,
    /// Bound on the neglected tail of truncated integer sums.
    pub tail_tol: f64,
    /// Largest truncation radius for directly summed brackets.
    pub max_radius: usize,
    /// Sharpen grid extrema by a local golden-section search.
    pub refine: bool,
}

impl Default for SiOptions {
    fn default() -> Self {
        Self {
            grid_log2: 16,
            zero_rel_tol: 1e-12,
            singular_tol: 1e-10,
            tail_tol: 1e-14,
            max_radius: 1 << 15,
            refine: true,
        }
    }
}

impl SiOptions {
    pub fn with_grid(grid_log2: u32) -> Self {
        Self { grid_log2, ..Self::default() }
    }

    fn n(&self) -> usize {
        1usize << self.grid_log2
    }

    fn gamma(&self, j: usize) -> f64 {
        periodic::grid_point(self.grid_log2, j)
    }
}

/// Frame bounds of `{T_k φ}` read off `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiFrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub zero_set_fraction: f64,
}

/// Verdict of the `L² = V ⊕ W^⊥` test for two generators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiDirectSum {
    pub ok: bool,
    /// `min |bracket(φ, φ₁)|` over `{Φ > τ_Φ}`.
    pub c: f64,
    pub zero_sets_agree: bool,
    pub phi: SiFrameBounds,
    pub phi1: SiFrameBounds,
}

/// Sampled Fourier transform on `γ_j + n`, `|n| ≤ n_periods`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSpectrum {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Max,
    Min,
}

/// Location and value of a grid extremum after local refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub gamma: f64,
}

type OffGrid<'a> = Option<&'a (dyn Fn(f64) -> Option<f64> + Sync)>;

fn better(goal: Goal, a: f64, b: f64) -> bool {
    match goal {
        Goal::Max => a > b,
        Goal::Min => a < b,
    }
}

/// Golden-section search for the extremum of `f` on `[lo, hi]`.
fn golden_section(f: &(dyn Fn(f64) -> Option<f64> + Sync), lo: f64, hi: f64, goal: Goal) -> Option<Extremum> {
    let score = |x: f64| -> f64 {
        match (f(x), goal) {
            (Some(v), Goal::Max) => v,
            (Some(v), Goal::Min) => -v,
            (None, _) => f64::NEG_INFINITY,
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (score(x1), score(x2));
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = score(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = score(x2);
        }
    }
    let x = if f1 >= f2 { x1 } else { x2 };
    f(x).map(|value| Extremum { value, gamma: x.rem_euclid(1.0) })
}

/// Extremum over the grid points where `on_grid` is defined, optionally
/// sharpened between the neighbours of the best grid point.
fn extremum<G>(opts: &SiOptions, on_grid: G, off_grid: OffGrid<'_>, goal: Goal) -> Result<Extremum>
where
    G: Fn(usize) -> Option<f64> + Sync,
{
    let values: Vec<Option<f64>> = (0..opts.n()).into_par_iter().map(&on_grid).collect();
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| better(goal, v, b)) {
                best = Some((j, v));
            }
        }
    }
    let (j, value) = best.ok_or(Error::EmptySupport)?;
    let mut out = Extremum { value, gamma: opts.gamma(j) };
    if let (true, Some(f)) = (opts.refine, off_grid) {
        let h = 1.0 / opts.n() as f64;
        if let Some(refined) = golden_section(f, out.gamma - h, out.gamma + h, goal) {
            if better(goal, refined.value, out.value) {
                out = refined;
            }
        }
    }
    Ok(out)
}

/// Self-bracket `Φ` on the grid with its zero-set threshold.
struct SelfBracket {
    plan: BracketPlan,
    grid: Vec<f64>,
    threshold: f64,
}

impl SelfBracket {
    fn new(phi: &Generator, opts: &SiOptions) -> Result<Self> {
        let plan = BracketPlan::new(phi, phi, opts)?;
        let grid: Vec<f64> = (0..opts.n()).into_par_iter().map(|j| plan.eval(opts.gamma(j)).re).collect();
        let max = grid.iter().copied().fold(0.0, f64::max);
        Ok(Self { plan, grid, threshold: opts.zero_rel_tol * max })
    }

    fn on_support(&self, j: usize) -> bool {
        self.grid[j] > self.threshold
    }

    fn at(&self, gamma: f64) -> Option<f64> {
        let v = self.plan.eval(gamma).re;
        (v > self.threshold).then_some(v)
    }
}

/// Samples of `Σ_n φ̂(γ+n) conj(ψ̂(γ+n))` on the grid.
pub fn bracket(phi: &Generator, psi: &Generator, opts: &SiOptions) -> Result<PeriodicFunction> {
    let plan = BracketPlan::new(phi, psi, opts)?;
    PeriodicFunction::from_fn(opts.grid_log2, |g| plan.eval(g))
}

/// `Φ(γ) = Σ_n |φ̂(γ+n)|²` on the grid.
pub fn self_bracket(phi: &Generator, opts: &SiOptions) -> Result<PeriodicFunction> {
    bracket(phi, phi, opts)
}

/// Frame bounds `α ≤ Φ ≤ β` on `{Φ > τ_Φ}` and the measure of the zero set.
pub fn si_frame_bounds(phi: &PeriodicFunction, opts: &SiOptions) -> Result<SiFrameBounds> {
    let upper = phi.samples().iter().map(|z| z.re).fold(0.0, f64::max);
    let slack = 1e-12 * upper.max(1.0);
    if let Some(z) = phi.samples().iter().find(|z| z.re < -slack || z.im.abs() > slack) {
        return Err(Error::InvalidInput(format!("self-bracket must be real and non-negative, found {z}")));
    }
    let threshold = opts.zero_rel_tol * upper;
    let support: Vec<f64> = phi.samples().iter().map(|z| z.re).filter(|&v| v > threshold).collect();
    let lower = support.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SiFrameBounds {
        lower: if support.is_empty() { 0.0 } else { lower },
        upper,
        zero_set_fraction: 1.0 - support.len() as f64 / phi.len() as f64,
    })
}

/// Checks equal zero sets of `Φ`, `Φ₁` and `|bracket(φ, φ₁)| ≥ c > τ_c`.
pub fn si_direct_sum_check(phi: &Generator, phi1: &Generator, opts: &SiOptions) -> Result<SiDirectSum> {
    let sb = SelfBracket::new(phi, opts)?;
    let sb1 = SelfBracket::new(phi1, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    let to_fn = |v: &[f64]| {
        PeriodicFunction::new(opts.grid_log2, v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    };
    let bounds = si_frame_bounds(&to_fn(&sb.grid)?, opts)?;
    let bounds1 = si_frame_bounds(&to_fn(&sb1.grid)?, opts)?;
    let zero_sets_agree = (0..opts.n()).all(|j| sb.on_support(j) == sb1.on_support(j));
    let c = (0..opts.n())
        .into_par_iter()
        .filter(|&j| sb.on_support(j))
        .map(|j| cross.eval(opts.gamma(j)).norm())
        .reduce(|| f64::INFINITY, f64::min);
    let c = if c.is_finite() { c } else { 0.0 };
    Ok(SiDirectSum {
        ok: zero_sets_agree && c > opts.singular_tol,
        c,
        zero_sets_agree,
        phi: bounds,
        phi1: bounds1,
    })
}

/// `ess inf |bracket(φ, φ₁)| / √(Φ Φ₁)` over `{Φ > τ_Φ}`, a lower bound for
/// `cos θ(W, V)`.
pub fn si_cos_lower_bound(phi: &Generator, phi1: &Generator, opts: &SiOptions) -> Result<f64> {
    let sb = SelfBracket::new(phi, opts)?;
    let p1 = BracketPlan::new(phi1, phi1, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    let ratio = |g: f64, phi_val: f64| -> f64 {
        let p1v = p1.eval(g).re;
        if p1v <= 0.0 {
            return 0.0;
        }
        (cross.eval(g).norm() / (phi_val * p1v).sqrt()).min(1.0)
    };
    let on_grid = |j: usize| sb.on_support(j).then(|| ratio(opts.gamma(j), sb.grid[j]));
    let off = |g: f64| sb.at(g).map(|v| ratio(g, v));
    Ok(extremum(opts, on_grid, Some(&off), Goal::Min)?.value)
}

/// `sup |bracket(φ, φ̃) - 1|` over `{Φ > τ_Φ}`: the tight `ε` for which
/// `{T_k φ}`, `{T_k φ̃}` reconstruct within `ε` on the span of `{T_k φ}`.
pub fn si_duality_defect(phi: &Generator, phit: &Generator, opts: &SiOptions) -> Result<f64> {
    let sb = SelfBracket::new(phi, opts)?;
    let cross = BracketPlan::new(phi, phit, opts)?;
    let one = Complex64::new(1.0, 0.0);
    let on_grid = |j: usize| sb.on_support(j).then(|| (cross.eval(opts.gamma(j)) - one).norm());
    let off = |g: f64| sb.at(g).map(|_| (cross.eval(g) - one).norm());
    Ok(extremum(opts, on_grid, Some(&off), Goal::Max)?.value)
}

fn check_nonsingular(sb: &SelfBracket, cross: &BracketPlan, opts: &SiOptions) -> Result<()> {
    let min_abs = (0..opts.n())
        .into_par_iter()
        .filter(|&j| sb.on_support(j))
        .map(|j| cross.eval(opts.gamma(j)).norm())
        .reduce(|| f64::INFINITY, f64::min);
    if min_abs < opts.singular_tol {
        return Err(Error::SingularSymbol { min_abs });
    }
    if !min_abs.is_finite() {
        return Err(Error::EmptySupport);
    }
    Ok(())
}

/// `H̃ = 1 / bracket(φ, φ₁)` on `{Φ > τ_Φ}` (zero elsewhere): the symbol of
/// the unique oblique dual generator.
pub fn dual_symbol(phi: &Generator, phi1: &Generator, opts: &SiOptions) -> Result<PeriodicFunction> {
    let sb = SelfBracket::new(phi, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    check_nonsingular(&sb, &cross, opts)?;
    let samples = (0..opts.n())
        .into_par_iter()
        .map(|j| {
            if sb.on_support(j) {
                cross.eval(opts.gamma(j)).inv()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PeriodicFunction::new(opts.grid_log2, samples)
}

/// [`dual_symbol`] as a symbol that can be evaluated anywhere.
pub fn exact_dual_symbol(phi: &Generator, phi1: &Generator, opts: &SiOptions) -> Result<FnSymbol> {
    let sb = SelfBracket::new(phi, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    check_nonsingular(&sb, &cross, opts)?;
    Ok(FnSymbol(Arc::new(move |g| match sb.at(g) {
        Some(_) => cross.eval(g).inv(),
        None => Complex64::new(0.0, 0.0),
    })))
}

#[derive(Clone, Copy)]
enum Weight {
    Sufficient,
    Necessary,
}

fn symbol_eps(
    phi: &Generator,
    phi1: &Generator,
    h: &dyn PeriodicSymbol,
    weight: Weight,
    opts: &SiOptions,
) -> Result<f64> {
    if !h.supports_grid(opts.grid_log2) {
        return Err(Error::InvalidInput(format!(
            "symbol is not sampled on the 2^{} grid",
            opts.grid_log2
        )));
    }
    let sb = SelfBracket::new(phi, opts)?;
    let p1 = BracketPlan::new(phi1, phi1, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    check_nonsingular(&sb, &cross, opts)?;
    let integrand = |g: f64, phi_val: f64, hv: Complex64| -> f64 {
        let b = cross.eval(g);
        match weight {
            Weight::Sufficient => {
                let scale = (phi_val * p1.eval(g).re.max(0.0)).sqrt();
                scale * (hv.conj() - b.inv()).norm()
            }
            Weight::Necessary => (hv.conj() * b - 1.0).norm(),
        }
    };
    let on_grid = |j: usize| {
        sb.on_support(j)
            .then(|| integrand(opts.gamma(j), sb.grid[j], h.grid_value(opts.grid_log2, j)))
    };
    let off = |g: f64| match (sb.at(g), h.value(g)) {
        (Some(pv), Some(hv)) => Some(integrand(g, pv, hv)),
        _ => None,
    };
    let off_grid: OffGrid<'_> = if h.value(0.0).is_some() { Some(&off) } else { None };
    Ok(extremum(opts, on_grid, off_grid, Goal::Max)?.value)
}

/// `sup √(Φ Φ₁) |H̄ - H̃|` over `{Φ > τ_Φ}`; certifies `{T_k φ}` and
/// `{T_k ψ}`, `ψ̂ = H φ̂₁`, as approximate oblique duals with this `ε`.
pub fn sufficient_eps(phi: &Generator, phi1: &Generator, h: &dyn PeriodicSymbol, opts: &SiOptions) -> Result<f64> {
    symbol_eps(phi, phi1, h, Weight::Sufficient, opts)
}

/// `sup |bracket(φ, φ₁)| |H̄ - H̃|` over `{Φ > τ_Φ}`; no smaller `ε` can
/// make the pair approximate oblique duals.
pub fn necessary_eps(phi: &Generator, phi1: &Generator, h: &dyn PeriodicSymbol, opts: &SiOptions) -> Result<f64> {
    symbol_eps(phi, phi1, h, Weight::Necessary, opts)
}

/// The generator of `π_{W V^⊥} f`: `τ φ̂` with `τ = bracket(f, φ₁) / bracket(φ, φ₁)`
/// on `{Φ > τ_Φ}` and `τ = 0` on the zero set.
pub fn projection_generator(phi: &Generator, phi1: &Generator, f: &Generator, opts: &SiOptions) -> Result<Generator> {
    let sb = SelfBracket::new(phi, opts)?;
    let cross = BracketPlan::new(phi, phi1, opts)?;
    check_nonsingular(&sb, &cross, opts)?;
    let numer = BracketPlan::new(f, phi1, opts)?;
    let sb = Arc::new(sb);
    let ratio = {
        let sb = Arc::clone(&sb);
        move |g: f64| match sb.at(g) {
            Some(_) => numer.eval(g) / cross.eval(g),
            None => Complex64::new(0.0, 0.0),
        }
    };
    // Sampled bound on |τ|, used only to size later truncations.
    let bound = (0..opts.n())
        .into_par_iter()
        .map(|j| ratio(opts.gamma(j)).norm())
        .reduce(|| 0.0, f64::max);
    let multiplier = Multiplier::Function { eval: Arc::new(ratio), bound: bound * (1.0 + 1e-6) };
    Ok(Generator::modulated_by(multiplier, phi.clone()))
}

/// Samples `(π_{W V^⊥} f)^` at `γ_j + n` for `|n| ≤ n_periods`.
pub fn project_fourier(
    phi: &Generator,
    phi1: &Generator,
    f: &Generator,
    n_periods: usize,
    opts: &SiOptions,
) -> Result<SampledSpectrum> {
    let projected = projection_generator(phi, phi1, f, opts)?;
    Ok(sample_spectrum(&projected, n_periods, opts))
}

/// Samples `ĝ` at `γ_j + n` for `|n| ≤ n_periods`, ordered by `ξ`.
pub fn sample_spectrum(g: &Generator, n_periods: usize, opts: &SiOptions) -> SampledSpectrum {
    let np = n_periods as i64;
    let xi: Vec<f64> = (-np..=np)
        .flat_map(|n| (0..opts.n()).map(move |j| n as f64 + opts.gamma(j)))
        .collect();
    let values = xi.par_iter().map(|&x| g.fourier_transform(x)).collect();
    SampledSpectrum { xi, values }
}

/// Fourier-domain Neumann refinement of a symbol: with
/// `d = 1 - H̄ b`, returns `H_N` where `H̄_N = H̄ Σ_{n ≤ N} d^n`.
///
/// Points with `|b| ≤ τ_c` are left unchanged.
pub fn refine_symbol(
    h: &PeriodicFunction,
    b: &PeriodicFunction,
    order: usize,
    opts: &SiOptions,
) -> Result<PeriodicFunction> {
    if h.grid_log2() != b.grid_log2() {
        return Err(Error::DimensionMismatch { expected: h.len(), found: b.len() });
    }
    let one = Complex64::new(1.0, 0.0);
    let defect = |hv: Complex64, bv: Complex64| one - hv.conj() * bv;
    let sup_d = h
        .samples()
        .iter()
        .zip(b.samples())
        .filter(|(_, bv)| bv.norm() > opts.singular_tol)
        .map(|(&hv, &bv)| defect(hv, bv).norm())
        .fold(0.0, f64::max);
    if sup_d >= 1.0 {
        return Err(Error::RefinementNotGuaranteed { defect: sup_d });
    }
    let samples = h
        .samples()
        .par_iter()
        .zip(b.samples().par_iter())
        .map(|(&hv, &bv)| {
            if bv.norm() <= opts.singular_tol {
                return hv;
            }
            let d = defect(hv, bv);
            let mut acc = one;
            for _ in 0..order {
                acc = one + d * acc;
            }
            (hv.conj() * acc).conj()
        })
        .collect();
    PeriodicFunction::new(h.grid_log2(), samples)
}
