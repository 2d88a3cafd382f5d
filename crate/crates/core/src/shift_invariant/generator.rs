//! Generators of shift-invariant spaces, described by their Fourier transforms.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::periodic::{sin_pi, PeriodicSymbol, TruncatedSymbol};
use crate::error::{Error, Result};

/// Largest B-spline order accepted as a generator.
pub const MAX_BSPLINE_ORDER: u32 = 20;

/// Tail majorant: `|φ̂(ξ)| ≤ constant · |ξ|^{-exponent}` whenever `|ξ| ≥ radius`.
///
/// `constant = 0` means `φ̂` vanishes outside `[-radius, radius]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayBound {
    pub radius: f64,
    pub constant: f64,
    pub exponent: f64,
}

impl DecayBound {
    pub fn compact(radius: f64) -> Self {
        Self { radius, constant: 0.0, exponent: f64::INFINITY }
    }

    pub fn power(radius: f64, constant: f64, exponent: f64) -> Self {
        Self { radius, constant, exponent }
    }

    pub fn at(&self, xi: f64) -> f64 {
        if self.constant == 0.0 {
            0.0
        } else {
            self.constant * xi.abs().powf(-self.exponent)
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self { constant: self.constant * factor, ..self }
    }
}

/// A 1-periodic multiplier `M` acting as `ψ̂ = M · φ̂`.
#[derive(Clone)]
pub enum Multiplier {
    Trig(Arc<TruncatedSymbol>),
    /// A closure together with an upper bound for its modulus.
    Function { eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>, bound: f64 },
}

impl Multiplier {
    pub fn eval(&self, gamma: f64) -> Complex64 {
        match self {
            Multiplier::Trig(s) => s.eval(gamma),
            Multiplier::Function { eval, .. } => eval(gamma.rem_euclid(1.0)),
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Multiplier::Trig(s) => s.l1_norm(),
            Multiplier::Function { bound, .. } => *bound,
        }
    }
}

impl PeriodicSymbol for Multiplier {
    fn supports_grid(&self, _grid_log2: u32) -> bool {
        true
    }

    fn grid_value(&self, grid_log2: u32, j: usize) -> Complex64 {
        self.eval(super::periodic::grid_point(grid_log2, j))
    }

    fn value(&self, gamma: f64) -> Option<Complex64> {
        Some(self.eval(gamma))
    }
}

/// Fourier data sampled at increasing abscissae, linearly interpolated and
/// continued beyond the table as a power law.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedTransform {
    xi: Vec<f64>,
    values: Vec<Complex64>,
    decay_exponent: f64,
}

impl TabulatedTransform {
    pub fn new(xi: Vec<f64>, values: Vec<Complex64>, decay_exponent: f64) -> Result<Self> {
        if xi.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: xi.len(), found: values.len() });
        }
        if xi.len() < 2 {
            return Err(Error::InvalidInput("tabulated transform needs at least two rows".into()));
        }
        if !xi.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("tabulated abscissae must be strictly increasing".into()));
        }
        if !(decay_exponent > 0.0) {
            return Err(Error::InvalidInput("decay exponent must be positive".into()));
        }
        if xi.iter().any(|x| !x.is_finite())
            || values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("tabulated values must be finite".into()));
        }
        Ok(Self { xi, values, decay_exponent })
    }

    /// Reads `xi,re,im` rows (with header).
    pub fn from_csv_path(path: &Path, decay_exponent: f64) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut xi = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() < 3 {
                return Err(Error::InvalidInput("expected columns xi,re,im".into()));
            }
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad number {:?}: {e}", &record[i])))
            };
            xi.push(parse(0)?);
            values.push(Complex64::new(parse(1)?, parse(2)?));
        }
        Self::new(xi, values, decay_exponent)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.xi.len();
        let (lo, hi) = (self.xi[0], self.xi[n - 1]);
        if x < lo {
            return self.tail(lo, self.values[0], x);
        }
        if x > hi {
            return self.tail(hi, self.values[n - 1], x);
        }
        let i = self.xi.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xi[i - 1], self.xi[i]);
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }

    fn tail(&self, edge: f64, value: Complex64, x: f64) -> Complex64 {
        if edge == 0.0 || edge.signum() != x.signum() {
            return Complex64::new(0.0, 0.0);
        }
        value * (edge / x).abs().powf(self.decay_exponent)
    }

    pub fn decay_bound(&self) -> DecayBound {
        let n = self.xi.len();
        let edges = [(self.xi[0], self.values[0]), (self.xi[n - 1], self.values[n - 1])];
        let radius = edges.iter().map(|(x, _)| x.abs()).fold(0.0, f64::max);
        let constant = edges
            .iter()
            .map(|(x, v)| v.norm() * x.abs().powf(self.decay_exponent))
            .fold(0.0, f64::max);
        DecayBound::power(radius, constant, self.decay_exponent)
    }
}

/// A user-supplied Fourier transform.
pub struct CustomTransform {
    pub name: String,
    pub eval: Box<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub decay: DecayBound,
}

/// A generator `φ` of `span{T_k φ}`, given through `φ̂`.
#[derive(Clone)]
pub enum Generator {
    /// Centered B-spline of the given order: `φ̂(ξ) = sinc(ξ)^order`.
    BSpline { order: u32 },
    /// `ψ̂ = M · basê` for a 1-periodic multiplier `M`.
    Modulated { multiplier: Multiplier, base: Arc<Generator> },
    Tabulated(Arc<TabulatedTransform>),
    Custom(Arc<CustomTransform>),
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::BSpline { order } => write!(f, "bspline:{order}"),
            Generator::Modulated { base, multiplier } => match multiplier {
                Multiplier::Trig(s) => write!(f, "trig[K={}]·{base:?}", s.order()),
                Multiplier::Function { .. } => write!(f, "fn·{base:?}"),
            },
            Generator::Tabulated(t) => write!(f, "table[{} rows]", t.xi.len()),
            Generator::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

/// `sin(πξ)/(πξ)` with the removable singularity filled in.
pub fn sinc(xi: f64) -> f64 {
    if xi.abs() < 1e-8 {
        let t = std::f64::consts::PI * xi;
        1.0 - t * t / 6.0
    } else {
        sin_pi(xi) / (std::f64::consts::PI * xi)
    }
}

impl Generator {
    pub fn bspline(order: u32) -> Result<Self> {
        if order == 0 || order > MAX_BSPLINE_ORDER {
            return Err(Error::InvalidInput(format!(
                "B-spline order must lie in [1, {MAX_BSPLINE_ORDER}], got {order}"
            )));
        }
        Ok(Generator::BSpline { order })
    }

    pub fn modulated(symbol: TruncatedSymbol, base: Generator) -> Self {
        Generator::Modulated { multiplier: Multiplier::Trig(Arc::new(symbol)), base: Arc::new(base) }
    }

    pub fn modulated_by(multiplier: Multiplier, base: Generator) -> Self {
        Generator::Modulated { multiplier, base: Arc::new(base) }
    }

    pub fn tabulated(table: TabulatedTransform) -> Self {
        Generator::Tabulated(Arc::new(table))
    }

    pub fn custom<F>(name: &str, eval: F, decay: DecayBound) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Generator::Custom(Arc::new(CustomTransform { name: name.to_string(), eval: Box::new(eval), decay }))
    }

    /// Parses `bspline:<order>` or `table:<csv path>:<decay exponent>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(order) = spec.strip_prefix("bspline:") {
            let order: u32 = order
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad B-spline order in {spec:?}")))?;
            return Self::bspline(order);
        }
        if let Some(rest) = spec.strip_prefix("table:") {
            let (path, exponent) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("expected table:<path>:<exponent>, got {spec:?}")))?;
            let exponent: f64 = exponent
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad decay exponent in {spec:?}")))?;
            return Ok(Self::tabulated(TabulatedTransform::from_csv_path(Path::new(path), exponent)?));
        }
        Err(Error::InvalidInput(format!("unknown generator {spec:?}")))
    }

    /// `φ̂(ξ)`.
    pub fn fourier_transform(&self, xi: f64) -> Complex64 {
        match self {
            Generator::BSpline { order } => Complex64::new(sinc(xi).powi(*order as i32), 0.0),
            Generator::Modulated { multiplier, base } => multiplier.eval(xi) * base.fourier_transform(xi),
            Generator::Tabulated(t) => t.eval(xi),
            Generator::Custom(c) => (c.eval)(xi),
        }
    }

    pub fn decay_bound(&self) -> DecayBound {
        match self {
            Generator::BSpline { order } => DecayBound::power(
                0.5,
                std::f64::consts::PI.powi(-(*order as i32)),
                *order as f64,
            ),
            Generator::Modulated { multiplier, base } => base.decay_bound().scaled(multiplier.bound()),
            Generator::Tabulated(t) => t.decay_bound(),
            Generator::Custom(c) => c.decay,
        }
    }

    /// Checks the tail majorant at the given abscissae (those inside the
    /// radius are skipped).
    pub fn decay_dominates(&self, points: &[f64]) -> bool {
        let bound = self.decay_bound();
        points
            .iter()
            .filter(|x| x.abs() >= bound.radius)
            .all(|&x| self.fourier_transform(x).norm() <= bound.at(x) * (1.0 + 1e-12) + 1e-300)
    }
}
