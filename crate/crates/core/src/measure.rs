//! Compactly supported absolutely continuous probability measures sampled on
//! a uniform grid.
//!
//! A [`GridMeasure`] stores nodal values of the density on `[lo, hi]` and is
//! the common currency between the transform, convolution, and functional
//! layers. Mass is fixed to one by trapezoid quadrature at construction; all
//! operations return new values and never mutate their inputs.

use crate::error::{Error, Result};
use crate::numutil::{
    cumulative_trapezoid, interp_uniform, monotone_cubic_eval, monotone_cubic_slopes, trapezoid,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative slack allowed on the unit-mass invariant.
pub const MASS_TOLERANCE: f64 = 1e-9;
/// Minimum number of grid nodes.
pub const MIN_GRID: usize = 16;
/// Default grid resolution used by the built-in constructors.
pub const DEFAULT_GRID_N: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    lo: f64,
    hi: f64,
    density: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    lo: f64,
    hi: f64,
    density: Vec<f64>,
}

impl GridMeasure {
    /// Build a measure from raw density samples, rescaling to unit mass.
    pub fn from_samples(lo: f64, hi: f64, samples: &[f64]) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BadConfig(format!(
                "grid endpoints must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if samples.len() < MIN_GRID {
            return Err(Error::GridTooSmall {
                got: samples.len(),
                need: MIN_GRID,
            });
        }
        for (index, &value) in samples.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        let step = (hi - lo) / (samples.len() - 1) as f64;
        let mass = trapezoid(samples, step);
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let density = samples.iter().map(|v| v / mass).collect();
        Ok(Self { lo, hi, density })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Density at an arbitrary point by linear interpolation (zero outside).
    pub fn density_at(&self, x: f64) -> f64 {
        interp_uniform(self.lo, self.step(), &self.density, x)
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.density, self.step())
    }

    pub fn mean(&self) -> f64 {
        let vals: Vec<f64> = self
            .density
            .iter()
            .enumerate()
            .map(|(i, f)| self.node(i) * f)
            .collect();
        trapezoid(&vals, self.step())
    }

    /// Centered second moment.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let vals: Vec<f64> = self
            .density
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let d = self.node(i) - m;
                d * d * f
            })
            .collect();
        trapezoid(&vals, self.step())
    }

    /// Raw moments of order 1..=m by trapezoid quadrature.
    pub fn moments(&self, m: usize) -> Result<Vec<f64>> {
        if m < 1 {
            return Err(Error::TooFewMoments { got: m, need: 1 });
        }
        let mut out = Vec::with_capacity(m);
        let mut powers: Vec<f64> = vec![1.0; self.len()];
        for _ in 0..m {
            for (i, p) in powers.iter_mut().enumerate() {
                *p *= self.node(i);
            }
            let vals: Vec<f64> = powers.iter().zip(&self.density).map(|(p, f)| p * f).collect();
            out.push(trapezoid(&vals, self.step()));
        }
        Ok(out)
    }

    /// Nodal values of the cumulative distribution function.
    pub fn cdf_nodes(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.density, self.step())
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let cdf = self.cdf_nodes();
        let h = self.step();
        let t = (x - self.lo) / h;
        let i = (t.floor() as usize).min(self.len() - 2);
        let frac = t - i as f64;
        // within a cell the density is linear, so the CDF is quadratic
        let f0 = self.density[i];
        let f1 = self.density[i + 1];
        cdf[i] + h * frac * (f0 + 0.5 * frac * (f1 - f0))
    }

    /// Smallest x with CDF(x) = q, by monotone linear interpolation of the
    /// nodal CDF.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::QuantileOutOfRange(q));
        }
        let cdf = self.cdf_nodes();
        let total = *cdf.last().unwrap();
        let target = q * total;
        let h = self.step();
        for i in 0..self.len() - 1 {
            if cdf[i + 1] >= target {
                let df = cdf[i + 1] - cdf[i];
                if df <= 0.0 {
                    continue;
                }
                let frac = (target - cdf[i]) / df;
                return Ok(self.node(i) + frac * h);
            }
        }
        Ok(self.hi)
    }

    /// Pushforward under x -> lambda * x.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveScale(lambda));
        }
        Ok(Self {
            lo: self.lo * lambda,
            hi: self.hi * lambda,
            density: self.density.iter().map(|f| f / lambda).collect(),
        })
    }

    /// Pushforward under x -> x + c (exact on the grid).
    pub fn translate(&self, c: f64) -> Self {
        Self {
            lo: self.lo + c,
            hi: self.hi + c,
            density: self.density.clone(),
        }
    }

    /// Resample onto a new uniform grid through monotone-cubic interpolation
    /// of the CDF, then differentiate. Preserves mass up to renormalization.
    pub fn regrid(&self, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let xs = self.nodes();
        let cdf = self.cdf_nodes();
        let slopes = monotone_cubic_slopes(&xs, &cdf);
        let mut density = Vec::with_capacity(n);
        let step = (hi - lo) / (n - 1) as f64;
        for i in 0..n {
            let x = lo + step * i as f64;
            let d = if x < self.lo || x > self.hi {
                0.0
            } else {
                monotone_cubic_eval(&xs, &cdf, &slopes, x).1.max(0.0)
            };
            density.push(d);
        }
        Self::from_samples(lo, hi, &density)
    }

    /// Classical convolution with the Cauchy kernel of width `eps`, truncated
    /// to a finite window and renormalized.
    ///
    /// The convolution integral is evaluated exactly for the piecewise-linear
    /// interpolant of the density, so the only approximations are the input
    /// representation and the tail truncation.
    pub fn cauchy_smooth(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveEps(eps));
        }
        let window = (self.hi - self.lo).max(50.0 * eps);
        let lo = self.lo - window;
        let hi = self.hi + window;
        let n = self.len();
        let out_step = (hi - lo) / (n - 1) as f64;
        let xs = self.nodes();
        let h = self.step();
        let mut out = Vec::with_capacity(n);
        let mut atan = vec![0.0; xs.len()];
        let mut lg = vec![0.0; xs.len()];
        for j in 0..n {
            let x = lo + out_step * j as f64;
            for (i, &xi) in xs.iter().enumerate() {
                let u = x - xi;
                atan[i] = (u / eps).atan();
                lg[i] = (u * u + eps * eps).ln();
            }
            let mut acc = 0.0;
            for i in 0..xs.len() - 1 {
                let k0 = (atan[i] - atan[i + 1]) / PI;
                let k1 = (x - xs[i]) * k0 - eps / (2.0 * PI) * (lg[i] - lg[i + 1]);
                let slope = (self.density[i + 1] - self.density[i]) / h;
                acc += self.density[i] * k0 + slope * k1;
            }
            out.push(acc.max(0.0));
        }
        Self::from_samples(lo, hi, &out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeasureJson {
            lo: self.lo,
            hi: self.hi,
            density: self.density.clone(),
        })
        .expect("measure serialization cannot fail")
    }

    /// Parse the measure JSON schema, re-normalizing and validating.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeasureJson = serde_json::from_str(text)
            .map_err(|e| Error::BadConfig(format!("measure JSON: {e}")))?;
        Self::from_samples(raw.lo, raw.hi, &raw.density)
    }
}

/// Semicircular law with the given mean and variance.
pub fn semicircle(mean: f64, variance: f64, n: usize) -> Result<GridMeasure> {
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance(variance));
    }
    let sigma = variance.sqrt();
    let lo = mean - 2.0 * sigma;
    let hi = mean + 2.0 * sigma;
    let step = (hi - lo) / (n - 1) as f64;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let x = lo + step * i as f64;
            let arg: f64 = 4.0 * variance - (x - mean) * (x - mean);
            arg.max(0.0).sqrt() / (2.0 * PI * variance)
        })
        .collect();
    GridMeasure::from_samples(lo, hi, &samples)
}

/// Uniform law on [lo, hi].
pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<GridMeasure> {
    GridMeasure::from_samples(lo, hi, &vec![1.0; n])
}

/// Smooth compactly supported bump, vanishing to all orders at the endpoints.
pub fn bump(center: f64, halfwidth: f64, n: usize) -> Result<GridMeasure> {
    if !(halfwidth > 0.0) {
        return Err(Error::BadConfig(format!(
            "bump halfwidth must be positive, got {halfwidth}"
        )));
    }
    let lo = center - halfwidth;
    let hi = center + halfwidth;
    let step = (hi - lo) / (n - 1) as f64;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let u = (lo + step * i as f64 - center) / halfwidth;
            if u.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - u * u)).exp()
            }
        })
        .collect();
    GridMeasure::from_samples(lo, hi, &samples)
}

/// Cauchy kernel of width eps evaluated at u.
fn poisson_kernel(u: f64, eps: f64) -> f64 {
    eps / (PI * (u * u + eps * eps))
}

/// The symmetric two-point law at +-1 smoothed by the Cauchy kernel, sampled
/// from the exact mixture density and truncated to a finite window.
pub fn bernoulli_smoothed(eps: f64, n: usize) -> Result<GridMeasure> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    let window = 2.0f64.max(50.0 * eps);
    let lo = -1.0 - window;
    let hi = 1.0 + window;
    let step = (hi - lo) / (n - 1) as f64;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let x = lo + step * i as f64;
            0.5 * (poisson_kernel(x + 1.0, eps) + poisson_kernel(x - 1.0, eps))
        })
        .collect();
    GridMeasure::from_samples(lo, hi, &samples)
}

/// Arcsine law on (-2, 2) smoothed by the Cauchy kernel of width eps.
///
/// Computed as the law of 2cos(U) + eps-Cauchy noise with U uniform on
/// (0, pi); the substitution removes the inverse square-root edge
/// singularities, so plain trapezoid quadrature in U converges fast.
pub fn arcsine_smoothed(eps: f64, n: usize) -> Result<GridMeasure> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    let window = 4.0f64.max(50.0 * eps);
    let lo = -2.0 - window;
    let hi = 2.0 + window;
    let step = (hi - lo) / (n - 1) as f64;
    let m = 2048;
    let du = PI / m as f64;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let x = lo + step * i as f64;
            let mut acc = 0.0;
            for j in 0..=m {
                let u = du * j as f64;
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                acc += w * poisson_kernel(x - 2.0 * u.cos(), eps);
            }
            acc * du / PI
        })
        .collect();
    GridMeasure::from_samples(lo, hi, &samples)
}

/// Sup-distance between the CDFs of two measures.
pub fn cdf_distance(a: &GridMeasure, b: &GridMeasure) -> f64 {
    let mut worst: f64 = 0.0;
    for mu in [a, b] {
        for i in 0..mu.len() {
            let x = mu.node(i);
            let d = (a.cdf_at(x) - b.cdf_at(x)).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}
