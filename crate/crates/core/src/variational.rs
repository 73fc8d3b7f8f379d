//! The density-flow equation for the normalized powers, Gelfand-Tsetlin
//! coordinates lambda(s, y), the Lagrangian of the minor process, its
//! Euler-Lagrange residual, and interlacing checks.
//!
//! Two density conventions coexist deliberately: `flow_residual` works with
//! the variance-normalized family (density of the normalized power), while
//! the Gelfand-Tsetlin functions use the un-normalized family (density of
//! mu^{boxplus 1/s} itself). Mixing them silently is the likeliest bug, so
//! every function states which family it uses.

use crate::convolution::{free_power, normalized_free_power};
use crate::error::{Error, Result};
use crate::measure::GridMeasure;
use crate::numutil::{centered_derivative, interp_uniform, monotone_cubic_eval, monotone_cubic_slopes};
use crate::transforms::hilbert;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Fraction of the domain stripped from each side before taking sup-norms.
pub const BOUNDARY_EXCLUSION: f64 = 0.1;

/// Samples of lambda(s, y) on the triangular grid
/// s_i = (i - 1/2)/ns, y_ij = q_j s_i with q_j = (j - 1/2)/ny.
///
/// Rows follow constant quantile-level rays y = q_j s, not constant y, so
/// partial derivatives in (s, y) are recovered with the chain rule
/// d/ds |_ray = d_s + q_j d_y.
///
/// With eigenvalues in ascending order, Cauchy interlacing pins the field
/// into the cone  -d_y lambda <= d_s lambda <= 0:  growing the minor at a
/// fixed index can only push an eigenvalue down. (The semicircle closed form
/// lambda = sqrt(s) Q(y/s) has d_s lambda / d_y lambda = -1/2 at the median,
/// and direct minor sampling reproduces the sign.)
#[derive(Debug, Clone)]
pub struct LambdaField {
    pub s_grid: Vec<f64>,
    pub y_grid_per_s: Vec<Vec<f64>>,
    pub lambda: Vec<Vec<f64>>,
    pub ds: f64,
    pub dy: f64,
}

/// Partial derivatives of lambda at every node (one-sided at the rim).
pub struct FieldPartials {
    pub d_s: Vec<Vec<f64>>,
    pub d_y: Vec<Vec<f64>>,
}

impl LambdaField {
    /// Wrap an existing lambda matrix on the canonical triangular grid.
    /// No interlacing validation is performed; the checkers below do that.
    pub fn from_lambda_matrix(lambda: Vec<Vec<f64>>) -> Self {
        let ns = lambda.len();
        let ny = lambda[0].len();
        let s_grid: Vec<f64> = (0..ns).map(|i| (i as f64 + 0.5) / ns as f64).collect();
        let y_grid_per_s = s_grid
            .iter()
            .map(|&s| {
                (0..ny)
                    .map(|j| (j as f64 + 0.5) / ny as f64 * s)
                    .collect()
            })
            .collect();
        Self {
            s_grid,
            y_grid_per_s,
            lambda,
            ds: 1.0 / ns as f64,
            dy: 1.0 / ny as f64,
        }
    }

    pub fn ns(&self) -> usize {
        self.s_grid.len()
    }

    pub fn ny(&self) -> usize {
        self.lambda[0].len()
    }

    /// Quantile level q_j of column j.
    fn level(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.ny() as f64
    }

    /// Derivative matrices (d_s lambda, d_y lambda) via ray differences and
    /// the chain rule.
    pub fn partials(&self) -> FieldPartials {
        let ns = self.ns();
        let ny = self.ny();
        let mut d_y = vec![vec![0.0; ny]; ns];
        let mut d_s = vec![vec![0.0; ny]; ns];
        for i in 0..ns {
            let dy_phys = self.s_grid[i] * self.dy;
            for j in 0..ny {
                let dyl = if j == 0 {
                    (self.lambda[i][1] - self.lambda[i][0]) / dy_phys
                } else if j == ny - 1 {
                    (self.lambda[i][ny - 1] - self.lambda[i][ny - 2]) / dy_phys
                } else {
                    (self.lambda[i][j + 1] - self.lambda[i][j - 1]) / (2.0 * dy_phys)
                };
                d_y[i][j] = dyl;
            }
        }
        for i in 0..ns {
            for j in 0..ny {
                let ray = if i == 0 {
                    (self.lambda[1][j] - self.lambda[0][j]) / self.ds
                } else if i == ns - 1 {
                    (self.lambda[ns - 1][j] - self.lambda[ns - 2][j]) / self.ds
                } else {
                    (self.lambda[i + 1][j] - self.lambda[i - 1][j]) / (2.0 * self.ds)
                };
                d_s[i][j] = ray - self.level(j) * d_y[i][j];
            }
        }
        FieldPartials { d_s, d_y }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,y,lambda\n");
        for i in 0..self.ns() {
            for j in 0..self.ny() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.s_grid[i], self.y_grid_per_s[i][j], self.lambda[i][j]
                ));
            }
        }
        out
    }
}

/// Quantile through monotone-cubic interpolation of the nodal CDF; third
/// order beats the public linear-interpolation quantile, which matters here
/// because the Euler-Lagrange residual differentiates lambda twice.
fn cubic_quantile(mu: &GridMeasure, q: f64) -> Result<f64> {
    let seed = mu.quantile(q)?;
    let xs = mu.nodes();
    let cdf = mu.cdf_nodes();
    let total = *cdf.last().unwrap();
    let slopes = monotone_cubic_slopes(&xs, &cdf);
    let target = q * total;
    let mut x = seed;
    for _ in 0..40 {
        let (val, der) = monotone_cubic_eval(&xs, &cdf, &slopes, x);
        let r = val - target;
        if r.abs() < 1e-14 {
            break;
        }
        if der <= 0.0 {
            break;
        }
        let step = (r / der).clamp(-mu.step(), mu.step());
        x -= step;
    }
    Ok(x)
}

/// lambda(s, y) for a single point: s times the y/s quantile of the
/// un-normalized power mu^{boxplus 1/s}.
pub fn lambda_at(mu: &GridMeasure, s: f64, y: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::BadConfig(format!("s must lie in (0, 1], got {s}")));
    }
    let nu = free_power(mu, 1.0 / s)?;
    Ok(s * cubic_quantile(&nu, y / s)?)
}

fn check_connected_support(mu: &GridMeasure) -> Result<()> {
    let fmax = mu.density().iter().cloned().fold(0.0, f64::max);
    let on = |v: f64| v > 1e-9 * fmax;
    let first = mu.density().iter().position(|&v| on(v)).unwrap_or(0);
    let last = mu.density().len() - 1
        - mu.density().iter().rev().position(|&v| on(v)).unwrap_or(0);
    let mut gap = 0usize;
    for i in first..=last {
        if mu.density()[i] <= 1e-12 * fmax {
            gap += 1;
            if gap >= 3 {
                return Err(Error::DisconnectedSupport);
            }
        } else {
            gap = 0;
        }
    }
    Ok(())
}

/// Sample lambda(s, y) on the ns x ny triangular grid, one power solve per
/// s-slice (slices run in parallel).
pub fn lambda_field(mu: &GridMeasure, ns: usize, ny: usize) -> Result<LambdaField> {
    if ns < 16 || ny < 16 {
        return Err(Error::GridTooSmall {
            got: ns.min(ny),
            need: 16,
        });
    }
    check_connected_support(mu)?;
    let rows: Vec<Vec<f64>> = (0..ns)
        .into_par_iter()
        .map(|i| {
            let s = (i as f64 + 0.5) / ns as f64;
            let nu = free_power(mu, 1.0 / s)?;
            (0..ny)
                .map(|j| {
                    let q = (j as f64 + 0.5) / ny as f64;
                    Ok(s * cubic_quantile(&nu, q)?)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(LambdaField::from_lambda_matrix(rows))
}

/// Lagrangian density L(ls, ly) = log ly + log |sin(pi ls/ly)|, defined for
/// 0 < |ls/ly| < 1. The absolute value extends the formula evenly onto the
/// negative branch of the cone that the sampled fields actually occupy; on
/// the positive branch it reduces to log sin.
pub fn lagrangian_density(lambda_s: f64, lambda_y: f64) -> Result<f64> {
    let ratio = cone_ratio(lambda_s, lambda_y)?;
    Ok(lambda_y.ln() + (PI * ratio).sin().abs().ln())
}

fn cone_ratio(lambda_s: f64, lambda_y: f64) -> Result<f64> {
    if !(lambda_y > 0.0) {
        return Err(Error::NonPositiveLambdaY(lambda_y));
    }
    let ratio = lambda_s / lambda_y;
    if !(ratio.abs() > 0.0 && ratio.abs() < 1.0) {
        return Err(Error::ConeBoundary(ratio));
    }
    Ok(ratio)
}

/// Partial derivative of L in its first slot: (pi/ly) cot(pi ls/ly).
pub fn lagrangian_dls(lambda_s: f64, lambda_y: f64) -> Result<f64> {
    let ratio = cone_ratio(lambda_s, lambda_y)?;
    let arg = PI * ratio;
    Ok(PI / lambda_y * (arg.cos() / arg.sin()))
}

/// Partial derivative of L in its second slot:
/// 1/ly - (pi ls/ly^2) cot(pi ls/ly).
pub fn lagrangian_dly(lambda_s: f64, lambda_y: f64) -> Result<f64> {
    let ratio = cone_ratio(lambda_s, lambda_y)?;
    let arg = PI * ratio;
    Ok(1.0 / lambda_y - PI * ratio / lambda_y * (arg.cos() / arg.sin()))
}

/// Divergence-form Euler-Lagrange residual
/// d_s[L_ls(d_s lambda, d_y lambda)] + d_y[L_ly(d_s lambda, d_y lambda)]
/// at the interior nodes; rim nodes (where the stencil is one-sided) are NaN.
pub fn euler_lagrange_residual(field: &LambdaField) -> Result<Vec<Vec<f64>>> {
    let ns = field.ns();
    let ny = field.ny();
    let parts = field.partials();
    let mut p = vec![vec![0.0; ny]; ns];
    let mut q = vec![vec![0.0; ny]; ns];
    let margin_i = ((ns as f64 * BOUNDARY_EXCLUSION) as usize).max(1);
    let margin_j = ((ny as f64 * BOUNDARY_EXCLUSION) as usize).max(1);
    for i in 0..ns {
        for j in 0..ny {
            let ls = parts.d_s[i][j];
            let ly = parts.d_y[i][j];
            let interior = i >= margin_i && i + margin_i < ns && j >= margin_j && j + margin_j < ny;
            match (lagrangian_dls(ls, ly), lagrangian_dly(ls, ly)) {
                (Ok(a), Ok(b)) => {
                    p[i][j] = a;
                    q[i][j] = b;
                }
                _ if interior => {
                    return Err(Error::ConeBoundary(ls / ly));
                }
                _ => {
                    p[i][j] = f64::NAN;
                    q[i][j] = f64::NAN;
                }
            }
        }
    }
    let mut residual = vec![vec![f64::NAN; ny]; ns];
    for i in 1..ns - 1 {
        for j in 1..ny - 1 {
            let dy_phys = field.s_grid[i] * field.dy;
            let dyq = (q[i][j + 1] - q[i][j - 1]) / (2.0 * dy_phys);
            let dyp = (p[i][j + 1] - p[i][j - 1]) / (2.0 * dy_phys);
            let ray_p = (p[i + 1][j] - p[i - 1][j]) / (2.0 * field.ds);
            let dsp = ray_p - field.level(j) * dyp;
            residual[i][j] = dsp + dyq;
        }
    }
    Ok(residual)
}

/// Sup over the interior (outer `frac` of each axis excluded) of |values|.
pub fn interior_sup(values: &[Vec<f64>], frac: f64) -> f64 {
    let ns = values.len();
    let ny = values[0].len();
    let mi = ((ns as f64 * frac) as usize).max(1);
    let mj = ((ny as f64 * frac) as usize).max(1);
    let mut worst: f64 = 0.0;
    for i in mi..ns - mi {
        for j in mj..ny - mj {
            let v = values[i][j];
            if v.is_finite() {
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// Interlacing report: violations of -d_y lambda <= d_s lambda <= 0.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InterlacingReport {
    pub violations: usize,
    pub worst_margin: f64,
    pub worst_s: f64,
    pub worst_y: f64,
}

/// Count interior violations of the interlacing cone beyond 1e-6.
pub fn interlacing_check(field: &LambdaField) -> InterlacingReport {
    let parts = field.partials();
    let ns = field.ns();
    let ny = field.ny();
    let mut report = InterlacingReport {
        violations: 0,
        worst_margin: 0.0,
        worst_s: f64::NAN,
        worst_y: f64::NAN,
    };
    for i in 1..ns - 1 {
        for j in 1..ny - 1 {
            let ls = parts.d_s[i][j];
            let ly = parts.d_y[i][j];
            // negative margin = inside the cone with room to spare
            let margin = ls.max(-ls - ly);
            if margin > report.worst_margin {
                report.worst_margin = margin;
                report.worst_s = field.s_grid[i];
                report.worst_y = field.y_grid_per_s[i][j];
            }
            if margin > 1e-6 {
                report.violations += 1;
            }
        }
    }
    report
}

/// Interior residual of the transport equation for the normalized density
/// family f_k:  (k d_k + x/2 d_x) f_k  =  (1/pi) (Hf_k f_k' - f_k Hf_k') /
/// ((Hf_k)^2 + f_k^2) + f_k / 2.
pub fn flow_residual(mu: &GridMeasure, k: f64, dk: f64) -> Result<f64> {
    if !(dk > 0.0) {
        return Err(Error::BadConfig(format!("dk must be positive, got {dk}")));
    }
    if !(k >= 1.0 + dk) {
        return Err(Error::KLessThanOne(k - dk));
    }
    let center = normalized_free_power(mu, k)?;
    let plus = normalized_free_power(mu, k + dk)?;
    let minus = normalized_free_power(mu, k - dk)?;
    let bf = hilbert(&center)?;
    let h = center.step();
    let df = centered_derivative(&bf.f, h);
    let dhf = centered_derivative(&bf.hf, h);

    let span = center.hi() - center.lo();
    let a = center.lo() + BOUNDARY_EXCLUSION * span;
    let b = center.hi() - BOUNDARY_EXCLUSION * span;
    let m = 401;
    let mut worst: f64 = 0.0;
    for idx in 0..m {
        let x = a + (b - a) * idx as f64 / (m - 1) as f64;
        let f = center.density_at(x);
        let fp = interp_uniform(center.lo(), h, &df, x);
        let hf = interp_uniform(center.lo(), h, &bf.hf, x);
        let hfp = interp_uniform(center.lo(), h, &dhf, x);
        let dfdk = (plus.density_at(x) - minus.density_at(x)) / (2.0 * dk);
        let lhs = k * dfdk + 0.5 * x * fp;
        let denom = hf * hf + f * f;
        if denom < 1e-12 {
            continue;
        }
        let rhs = (hf * fp - f * hfp) / denom / PI + 0.5 * f;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Consistency of the field with the boundary data of the un-normalized
/// family: r1 = sup |f(lambda/s) d_y lambda - 1| and
/// r2 = sup |Hf(lambda/s) d_y lambda - cot(pi d_s lambda / d_y lambda)|,
/// both over the interior of the triangle.
pub fn gt_consistency(field: &LambdaField, mu: &GridMeasure) -> Result<(f64, f64)> {
    let ns = field.ns();
    let ny = field.ny();
    let parts = field.partials();
    let mi = ((ns as f64 * BOUNDARY_EXCLUSION) as usize).max(1);
    let mj = ((ny as f64 * BOUNDARY_EXCLUSION) as usize).max(1);
    let per_slice: Vec<(f64, f64)> = (mi..ns - mi)
        .into_par_iter()
        .map(|i| {
            let s = field.s_grid[i];
            let nu = free_power(mu, 1.0 / s)?;
            let bf = hilbert(&nu)?;
            let h = nu.step();
            let mut r1: f64 = 0.0;
            let mut r2: f64 = 0.0;
            for j in mj..ny - mj {
                let x = field.lambda[i][j] / s;
                let f = nu.density_at(x);
                let hf = interp_uniform(nu.lo(), h, &bf.hf, x);
                let ly = parts.d_y[i][j];
                let ls = parts.d_s[i][j];
                r1 = r1.max((f * ly - 1.0).abs());
                let raw = ls / ly;
                let magnitude = raw.abs().clamp(1e-9, 1.0 - 1e-9);
                let arg = PI * magnitude.copysign(if raw == 0.0 { -1.0 } else { raw });
                r2 = r2.max((hf * ly - arg.cos() / arg.sin()).abs());
            }
            Ok((r1, r2))
        })
        .collect::<Result<_>>()?;
    let r1 = per_slice.iter().map(|p| p.0).fold(0.0, f64::max);
    let r2 = per_slice.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::semicircle;

    /// Quantile of the unit semicircle by bisection on the closed-form CDF.
    fn semicircle_quantile(q: f64) -> f64 {
        let cdf = |x: f64| {
            0.5 + (x * (4.0 - x * x).sqrt() / 2.0 + 2.0 * (x / 2.0).asin()) / (2.0 * PI)
        };
        let (mut a, mut b) = (-2.0, 2.0);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if cdf(mid) < q {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn lagrangian_reference_values() {
        assert!(lagrangian_density(0.5, 1.0).unwrap().abs() < 1e-15);
        assert!(lagrangian_dls(0.5, 1.0).unwrap().abs() < 1e-12);
        assert!((lagrangian_dly(0.5, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            lagrangian_density(0.0, 1.0),
            Err(Error::ConeBoundary(_))
        ));
        assert!(matches!(
            lagrangian_density(1.0, 1.0),
            Err(Error::ConeBoundary(_))
        ));
        assert!(matches!(
            lagrangian_density(0.5, -1.0),
            Err(Error::NonPositiveLambdaY(_))
        ));
    }

    #[test]
    fn lambda_at_s_one_is_the_quantile() {
        let sc = semicircle(0.0, 1.0, 2001).unwrap();
        for q in [0.2, 0.5, 0.8] {
            let lam = lambda_at(&sc, 1.0, q).unwrap();
            let direct = sc.quantile(q).unwrap();
            assert!((lam - direct).abs() < 1e-6, "q={q}: {lam} vs {direct}");
        }
    }

    #[test]
    fn semicircle_field_matches_scaling_form() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let field = lambda_field(&sc, 24, 25).unwrap();
        // middle column is the median ray: lambda = 0 by symmetry
        for i in 0..field.ns() {
            assert!(field.lambda[i][12].abs() < 2e-3, "s={}", field.s_grid[i]);
        }
        // global scaling form lambda = sqrt(s) Q(y/s)
        let mut worst: f64 = 0.0;
        for i in 0..field.ns() {
            let s = field.s_grid[i];
            for j in 0..field.ny() {
                let q = (j as f64 + 0.5) / field.ny() as f64;
                let expect = s.sqrt() * semicircle_quantile(q);
                worst = worst.max((field.lambda[i][j] - expect).abs());
            }
        }
        assert!(worst <= 2e-3, "sup deviation {worst}");
    }

    #[test]
    fn semicircle_field_interlaces() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let field = lambda_field(&sc, 24, 24).unwrap();
        let report = interlacing_check(&field);
        assert_eq!(report.violations, 0, "worst margin {}", report.worst_margin);
    }

    #[test]
    fn injected_violation_is_flagged() {
        // monotone field satisfying the cone except one corrupted node
        let ns = 24;
        let ny = 24;
        let mut lambda = vec![vec![0.0; ny]; ns];
        for (i, row) in lambda.iter_mut().enumerate() {
            let s = (i as f64 + 0.5) / ns as f64;
            for (j, v) in row.iter_mut().enumerate() {
                let q = (j as f64 + 0.5) / ny as f64;
                *v = s.sqrt() * semicircle_quantile(q);
            }
        }
        lambda[12][12] += 0.3; // pushes d_s lambda positive on a neighbor
        let field = LambdaField::from_lambda_matrix(lambda);
        let report = interlacing_check(&field);
        assert!(report.violations > 0);
        assert!(report.worst_margin > 1e-3);
    }

    #[test]
    fn flow_residual_small_for_semicircle() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let r = flow_residual(&sc, 2.0, 0.05).unwrap();
        assert!(r <= 1e-3, "residual {r}");
    }

    #[test]
    fn flow_residual_rejects_bad_steps() {
        let sc = semicircle(0.0, 1.0, 101).unwrap();
        assert!(matches!(
            flow_residual(&sc, 1.05, 0.1),
            Err(Error::KLessThanOne(_))
        ));
        assert!(matches!(
            flow_residual(&sc, 2.0, 0.0),
            Err(Error::BadConfig(_))
        ));
    }

    #[test]
    fn constant_shift_leaves_el_residual_unchanged() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let field = lambda_field(&sc, 24, 24).unwrap();
        let r0 = euler_lagrange_residual(&field).unwrap();
        let mut shifted = field.clone();
        for row in shifted.lambda.iter_mut() {
            for v in row.iter_mut() {
                *v += 3.7;
            }
        }
        let r1 = euler_lagrange_residual(&shifted).unwrap();
        for i in 0..field.ns() {
            for j in 0..field.ny() {
                let (a, b) = (r0[i][j], r1[i][j]);
                if a.is_finite() && b.is_finite() {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn gt_consistency_on_semicircle() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let field = lambda_field(&sc, 48, 48).unwrap();
        let (r1, r2) = gt_consistency(&field, &sc).unwrap();
        assert!(r1 <= 5e-3, "r1 {r1}");
        assert!(r2 <= 2e-2, "r2 {r2}");
    }

    #[test]
    fn disconnected_support_rejected() {
        let n = 101;
        let mut s = vec![0.0; n];
        for (i, v) in s.iter_mut().enumerate() {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            if x.abs() > 0.5 {
                *v = 1.0;
            }
        }
        let mu = crate::measure::GridMeasure::from_samples(-1.0, 1.0, &s).unwrap();
        assert!(matches!(
            lambda_field(&mu, 16, 16),
            Err(Error::DisconnectedSupport)
        ));
    }
}
