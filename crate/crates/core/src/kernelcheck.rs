//! The biholomorphic two-point kernel built from the Cauchy transform, its
//! positive-semidefiniteness, and the boundary quadruple integral that ties
//! kernel positivity to the derivative of the free Fisher information.

use crate::error::{Error, Result};
use crate::measure::GridMeasure;
use crate::numutil::{centered_derivative, interp_uniform, trapezoid};
use crate::transforms::{hilbert, CauchyEvaluator};
use ndarray::Array2;
use ndarray_linalg::{c64, EigValsh, UPLO};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Minimum tensor-grid resolution for the boundary double integrals.
const QUAD_GRID_MIN: usize = 400;
const QUAD_GRID_MAX: usize = 3600;

/// The opposite-sign kernel terms oscillate in sign over a strip of width
/// ~eps around the diagonal (that cancellation is what keeps the integral
/// finite as eps -> 0), so the tensor grid must resolve eps.
fn quad_grid(mu: &GridMeasure, eps: f64) -> usize {
    let span = mu.hi() - mu.lo();
    ((2.5 * span / eps).ceil() as usize).clamp(QUAD_GRID_MIN, QUAD_GRID_MAX)
}

fn check_off_axis(mu: &GridMeasure, z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re > mu.lo() - mu.step() && z.re < mu.hi() + mu.step() {
        return Err(Error::OnSupport(z.re));
    }
    Ok(())
}

fn kernel_from_values(g1: Complex64, g2: Complex64, quotient: Complex64) -> Complex64 {
    let s = quotient + g1 * g2;
    s * s / (g1 * g2)
}

/// The kernel K(z, w) = ((G(z)-G(w))/(z-w) + G(z)G(w))^2 / (G(z)G(w)),
/// with the removable diagonal singularity filled by G'(z).
pub fn kernel_k(mu: &GridMeasure, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_off_axis(mu, z)?;
    check_off_axis(mu, w)?;
    let ev = CauchyEvaluator::new(mu);
    let gz = ev.eval(z);
    let gw = ev.eval(w);
    let quotient = if (z - w).norm() < 1e-8 {
        ev.eval_deriv(z)
    } else {
        (gz - gw) / (z - w)
    };
    Ok(kernel_from_values(gz, gw, quotient))
}

/// Gram matrix of the kernel over a point set, [K(z_j, conj(z_k))].
#[derive(Debug, Clone)]
pub struct KernelEvaluation {
    pub points: Vec<Complex64>,
    pub gram: Array2<c64>,
}

impl KernelEvaluation {
    pub fn build(mu: &GridMeasure, points: &[Complex64]) -> Result<Self> {
        for (i, &p) in points.iter().enumerate() {
            check_off_axis(mu, p)?;
            for &q in &points[..i] {
                if (p - q).norm() < 1e-12 {
                    return Err(Error::DegeneratePoints);
                }
            }
        }
        let ev = CauchyEvaluator::new(mu);
        let g: Vec<Complex64> = points.iter().map(|&p| ev.eval(p)).collect();
        let gc: Vec<Complex64> = points.iter().map(|&p| ev.eval(p.conj())).collect();
        let n = points.len();
        let mut gram = Array2::<c64>::zeros((n, n));
        for j in 0..n {
            for k in 0..n {
                let zj = points[j];
                let wk = points[k].conj();
                let quotient = if (zj - wk).norm() < 1e-8 {
                    ev.eval_deriv(zj)
                } else {
                    (g[j] - gc[k]) / (zj - wk)
                };
                gram[[j, k]] = kernel_from_values(g[j], gc[k], quotient);
            }
        }
        Ok(Self {
            points: points.to_vec(),
            gram,
        })
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.points.len();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.gram[[j, k]] - self.gram[[k, j]].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.points.len()).map(|j| self.gram[[j, j]].re).sum()
    }
}

/// Minimum eigenvalue of the Hermitian kernel Gram matrix over the points.
pub fn gram_min_eigenvalue(mu: &GridMeasure, points: &[Complex64]) -> Result<f64> {
    let ke = KernelEvaluation::build(mu, points)?;
    let n = points.len();
    let mut herm = Array2::<c64>::zeros((n, n));
    for j in 0..n {
        for k in 0..n {
            herm[[j, k]] = 0.5 * (ke.gram[[j, k]] + ke.gram[[k, j]].conj());
        }
    }
    let vals = herm
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::BadConfig(format!("eigensolver: {e}")))?;
    Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Precomputed boundary data for the tensor-grid double integrals at one eps.
struct BoundaryCache {
    xs: Vec<f64>,
    weights: Vec<f64>,
    f: Vec<f64>,
    /// G(x_j + i eps); values below the axis follow by conjugation
    g: Vec<Complex64>,
    /// G'(x_j + i eps)
    gp: Vec<Complex64>,
    eps: f64,
}

impl BoundaryCache {
    fn build(mu: &GridMeasure, eps: f64, m: usize) -> Self {
        let ev = CauchyEvaluator::new(mu);
        let lo = mu.lo();
        let hi = mu.hi();
        let step = (hi - lo) / (m - 1) as f64;
        let mut xs = Vec::with_capacity(m);
        let mut weights = vec![step; m];
        weights[0] = 0.5 * step;
        weights[m - 1] = 0.5 * step;
        let mut f = Vec::with_capacity(m);
        let mut g = Vec::with_capacity(m);
        let mut gp = Vec::with_capacity(m);
        for j in 0..m {
            let x = lo + step * j as f64;
            xs.push(x);
            f.push(interp_uniform(mu.lo(), mu.step(), mu.density(), x));
            let (gv, gpv) = ev.eval_pair(Complex64::new(x, eps));
            g.push(gv);
            gp.push(gpv);
        }
        Self {
            xs,
            weights,
            f,
            g,
            gp,
            eps,
        }
    }

    fn g_at(&self, j: usize, sign: f64) -> Complex64 {
        if sign > 0.0 {
            self.g[j]
        } else {
            self.g[j].conj()
        }
    }

    fn gp_at(&self, j: usize, sign: f64) -> Complex64 {
        if sign > 0.0 {
            self.gp[j]
        } else {
            self.gp[j].conj()
        }
    }

    /// Difference quotient (G(z1)-G(z2))/(z1-z2) between two boundary points,
    /// with the exact-coincidence case replaced by G'.
    fn quotient(&self, j: usize, a: f64, l: usize, b: f64) -> Complex64 {
        if j == l && a == b {
            return self.gp_at(j, a);
        }
        let dz = Complex64::new(self.xs[j] - self.xs[l], (a - b) * self.eps);
        (self.g_at(j, a) - self.g_at(l, b)) / dz
    }
}

/// The three pieces of the sign-summed boundary double integral: a2 collects
/// the squared difference-quotient term over G G, a1 the difference quotient,
/// a0 the product term. The full quadruple integral is a2 + 2 a1 + a0.
fn decompose(mu: &GridMeasure, eps: f64, m: usize) -> Result<(f64, f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    let cache = BoundaryCache::build(mu, eps, m);
    let signs = [1.0f64, -1.0];
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut a1 = Complex64::new(0.0, 0.0);
    // a0 factorizes through the single integral of f G
    let mut s0 = Complex64::new(0.0, 0.0);
    for &a in &signs {
        for j in 0..m {
            s0 += cache.weights[j] * cache.f[j] * cache.g_at(j, a);
        }
    }
    let a0 = s0 * s0;
    for &a in &signs {
        for &b in &signs {
            for j in 0..m {
                let wj = cache.weights[j] * cache.f[j];
                if wj == 0.0 {
                    continue;
                }
                for l in 0..m {
                    let wl = cache.weights[l] * cache.f[l];
                    if wl == 0.0 {
                        continue;
                    }
                    let q = cache.quotient(j, a, l, b);
                    let prod = cache.g_at(j, a) * cache.g_at(l, b);
                    a1 += wj * wl * q;
                    a2 += wj * wl * q * q / prod;
                }
            }
        }
    }
    Ok((a2.re, a1.re, a0.re))
}

/// Sign-summed double integral of f(x) f(y) K(x + i a eps, y + i b eps) over
/// the four sign combinations, at a fixed eps.
pub fn quadruple_integral(mu: &GridMeasure, eps: f64) -> Result<f64> {
    let (a2, a1, a0) = decompose(mu, eps, quad_grid(mu, eps))?;
    Ok(a2 + 2.0 * a1 + a0)
}

/// The decomposition (a0, a1, a2) of the quadruple integral at fixed eps.
pub fn a_decomposition(mu: &GridMeasure, eps: f64) -> Result<(f64, f64, f64)> {
    let (a2, a1, a0) = decompose(mu, eps, quad_grid(mu, eps))?;
    Ok((a0, a1, a2))
}

/// Closed-form limits of the decomposition pieces:
/// a1 -> -(4 pi^2/3) integral of f^3, and
/// a2 -> -4 pi integral of (Hf f' - f (Hf)')/((Hf)^2 + f^2) f^2.
pub fn a_limits(mu: &GridMeasure) -> Result<(f64, f64)> {
    let bf = hilbert(mu)?;
    let h = mu.step();
    let cubes: Vec<f64> = bf.f.iter().map(|f| f * f * f).collect();
    let a1 = -(4.0 * PI * PI / 3.0) * trapezoid(&cubes, h);
    let df = centered_derivative(&bf.f, h);
    let dhf = centered_derivative(&bf.hf, h);
    let mut vals = vec![0.0; mu.len()];
    for i in 0..mu.len() {
        let f = bf.f[i];
        let hf = bf.hf[i];
        let denom = hf * hf + f * f;
        if denom > 1e-14 {
            vals[i] = (hf * df[i] - f * dhf[i]) / denom * f * f;
        }
    }
    let a2 = -4.0 * PI * trapezoid(&vals, h);
    Ok((a1, a2))
}
