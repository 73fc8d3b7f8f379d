//! Fractional free convolution powers and the semicircular flow.
//!
//! Densities are recovered from boundary values of the Cauchy transform: for
//! each output node x and a descending ladder of heights eps, the subordination
//! fixed point is solved for w = G(x + i eps), warm-started by continuation in
//! x (one serial sweep at the top of the ladder) and in eps (each node then
//! descends its own ladder independently, in parallel). The density is the
//! Richardson extrapolation of -Im w / pi over the smallest ladder heights,
//! the support is located by thresholding plus bisection on the extrapolated
//! density, and the result is renormalized to unit mass.

use crate::error::{Error, Result};
use crate::measure::GridMeasure;
use crate::numutil::extrapolate_to_zero;
use crate::transforms::{
    cumulants_to_moments, moments_to_cumulants, CauchyEvaluator,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const FIXED_POINT_TOL: f64 = 1e-13;
const DAMP_INIT: f64 = 0.5;
const DAMP_MIN: f64 = 1.0 / 64.0;
const SUPPORT_THRESHOLD: f64 = 1e-6;
const COARSE_COLUMNS: usize = 129;

/// Warm-start state carried along the continuation sweeps.
#[derive(Debug, Clone, Copy)]
struct NodeState {
    /// Boundary value w = G_out(z).
    w: Complex64,
    /// Subordination point omega with G_mu(omega) = w (flow: omega = z - t w).
    omega: Complex64,
}

/// Shared column-solve interface for the two subordination problems.
trait SubordinationSolver: Sync {
    /// Solve for the boundary value at z, optionally warm-started.
    fn solve_node(&self, z: Complex64, warm: Option<NodeState>) -> Option<NodeState>;
    /// Far-field initial guess at large Im z.
    fn far_field(&self, z: Complex64) -> NodeState;
}

/// Solver for  1/w + k R_mu(w) = z  where R_mu(w) = omega - 1/w and
/// G_mu(omega) = w (R evaluated through Newton inversion of the
/// quadrature-exact G_mu, not the truncated cumulant series).
struct PowerSolver {
    ev: CauchyEvaluator,
    k: f64,
    mean: f64,
}

impl PowerSolver {
    fn new(mu: &GridMeasure, k: f64) -> Self {
        Self {
            ev: CauchyEvaluator::new(mu),
            k,
            mean: mu.mean(),
        }
    }

    /// Newton inversion of G_mu: find omega in the upper half-plane with
    /// G_mu(omega) = w.
    fn invert_g(&self, w: Complex64, guess: Complex64) -> Option<Complex64> {
        let mut z = guess;
        if z.im <= 0.0 {
            z = Complex64::new(z.re, 1e-12);
        }
        for _ in 0..60 {
            let (g, gp) = self.ev.eval_pair(z);
            let r = g - w;
            if r.norm() <= FIXED_POINT_TOL * (1.0 + w.norm()) {
                return Some(z);
            }
            if gp.norm() < 1e-300 {
                return None;
            }
            let mut step = r / gp;
            // limit wild steps far from the warm start
            let cap = 1.0 + z.norm();
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            z -= step;
            if z.im <= 0.0 {
                z = Complex64::new(z.re, (-z.im).max(1e-13));
            }
        }
        None
    }

    /// Step-halving Newton iteration on the subordination point omega for
    /// k omega - (k-1)/G_mu(omega) = z. Near a support edge G' blows up like
    /// an inverse square root and plain Newton can cycle, so each step is
    /// accepted only if it reduces the residual.
    fn newton_omega(&self, z: Complex64, guess: Complex64) -> Option<NodeState> {
        let mut omega = guess;
        if omega.im <= 0.0 {
            omega = Complex64::new(omega.re, 1e-12);
        }
        let residual = |om: Complex64| -> Option<(Complex64, Complex64, Complex64)> {
            let (g, gp) = self.ev.eval_pair(om);
            if g.norm() < 1e-300 {
                return None;
            }
            Some((self.k * om - (self.k - 1.0) / g - z, g, gp))
        };
        let accept = |om: Complex64, g: Complex64| -> Option<NodeState> {
            // the subordination point satisfies Im omega >= Im z; a root
            // below that is spurious
            if om.im < 0.999 * z.im {
                return None;
            }
            let mut w = g;
            if w.im > 0.0 {
                w = Complex64::new(w.re, -w.im);
            }
            Some(NodeState { w, omega: om })
        };
        let (mut s_cur, mut g_cur, mut gp_cur) = residual(omega)?;
        let mut best: Option<(f64, Complex64, Complex64)> = None;
        for _ in 0..80 {
            let r_cur = s_cur.norm();
            if r_cur <= FIXED_POINT_TOL * (1.0 + z.norm()) {
                return accept(omega, g_cur);
            }
            if best.map_or(true, |(rb, _, _)| r_cur < rb) {
                best = Some((r_cur, omega, g_cur));
            }
            let sp = self.k + (self.k - 1.0) * gp_cur / (g_cur * g_cur);
            if sp.norm() < 1e-300 {
                break;
            }
            let mut step = s_cur / sp;
            let cap = 1.0 + omega.norm();
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            let mut advanced = false;
            for _ in 0..8 {
                let mut cand = omega - step;
                if cand.im <= 0.0 {
                    cand = Complex64::new(cand.re, (-cand.im).max(1e-13));
                }
                if let Some((s_new, g_new, gp_new)) = residual(cand) {
                    if s_new.norm() < r_cur {
                        omega = cand;
                        s_cur = s_new;
                        g_cur = g_new;
                        gp_cur = gp_new;
                        advanced = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        // near-converged states are still far more accurate than the
        // extrapolation error downstream
        if let Some((rb, om, g)) = best {
            if rb <= 1e-9 * (1.0 + z.norm()) {
                return accept(om, g);
            }
        }
        None
    }
}

impl SubordinationSolver for PowerSolver {
    fn far_field(&self, z: Complex64) -> NodeState {
        let omega = z - (self.k - 1.0) * self.mean;
        let w = 1.0 / (z - self.k * self.mean);
        NodeState { w, omega }
    }

    fn solve_node(&self, z: Complex64, warm: Option<NodeState>) -> Option<NodeState> {
        let init = warm.unwrap_or_else(|| self.far_field(z));
        // fast path: quadratic convergence straight from the warm start
        if let Some(state) = self.newton_omega(z, init.omega) {
            return Some(state);
        }
        // robust path: damped fixed point in w, halving the damping on
        // oscillation, with periodic Newton polish attempts
        let mut w = init.w;
        let mut omega = init.omega;
        if w.im > 0.0 {
            w = Complex64::new(w.re, -w.im);
        }
        let mut alpha = DAMP_INIT;
        let mut prev_step = f64::INFINITY;
        for iter in 0..200 {
            let om = match self.invert_g(w, omega) {
                Some(v) => v,
                None => break,
            };
            omega = om;
            let r = omega - 1.0 / w;
            let denom = z - self.k * r;
            if denom.norm() < 1e-300 {
                break;
            }
            let mut target = 1.0 / denom;
            if target.im > 0.0 {
                target = Complex64::new(target.re, -target.im);
            }
            let next = (1.0 - alpha) * w + alpha * target;
            let step = (next - w).norm();
            if step > prev_step && alpha > DAMP_MIN {
                alpha *= 0.5;
            }
            prev_step = step;
            w = next;
            if step <= FIXED_POINT_TOL * (1.0 + w.norm()) {
                return Some(NodeState { w, omega });
            }
            if iter % 20 == 19 {
                if let Some(state) = self.newton_omega(z, omega) {
                    return Some(state);
                }
            }
        }
        self.newton_omega(z, omega)
            .or_else(|| self.newton_omega(z, self.far_field(z).omega))
    }
}

/// Solver for the semicircular flow fixed point  w = G_mu(z - t w).
struct FlowSolver {
    ev: CauchyEvaluator,
    t: f64,
    mean: f64,
}

impl FlowSolver {
    fn new(mu: &GridMeasure, t: f64) -> Self {
        Self {
            ev: CauchyEvaluator::new(mu),
            t,
            mean: mu.mean(),
        }
    }

    fn newton(&self, z: Complex64, guess: Complex64) -> Option<NodeState> {
        let mut w = guess;
        if w.im > 0.0 {
            w = Complex64::new(w.re, -w.im);
        }
        for _ in 0..60 {
            let omega = z - self.t * w;
            let (g, gp) = self.ev.eval_pair(omega);
            let f = w - g;
            if f.norm() <= FIXED_POINT_TOL * (1.0 + w.norm()) {
                return Some(NodeState { w, omega });
            }
            let fp = 1.0 + self.t * gp;
            if fp.norm() < 1e-300 {
                return None;
            }
            let mut step = f / fp;
            let cap = 1.0 + w.norm();
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            w -= step;
            if w.im > 0.0 {
                w = Complex64::new(w.re, -w.im);
            }
        }
        None
    }
}

impl SubordinationSolver for FlowSolver {
    fn far_field(&self, z: Complex64) -> NodeState {
        let w = 1.0 / (z - self.mean);
        NodeState {
            w,
            omega: z - self.t * w,
        }
    }

    fn solve_node(&self, z: Complex64, warm: Option<NodeState>) -> Option<NodeState> {
        let init = warm.unwrap_or_else(|| self.far_field(z));
        if let Some(state) = self.newton(z, init.w) {
            return Some(state);
        }
        let mut w = init.w;
        if w.im > 0.0 {
            w = Complex64::new(w.re, -w.im);
        }
        let mut alpha = DAMP_INIT;
        let mut prev_step = f64::INFINITY;
        for iter in 0..200 {
            let mut target = self.ev.eval(z - self.t * w);
            if target.im > 0.0 {
                target = Complex64::new(target.re, -target.im);
            }
            let next = (1.0 - alpha) * w + alpha * target;
            let step = (next - w).norm();
            if step > prev_step && alpha > DAMP_MIN {
                alpha *= 0.5;
            }
            prev_step = step;
            w = next;
            if step <= FIXED_POINT_TOL * (1.0 + w.norm()) {
                return Some(NodeState {
                    w,
                    omega: z - self.t * w,
                });
            }
            if iter % 20 == 19 {
                if let Some(state) = self.newton(z, w) {
                    return Some(state);
                }
            }
        }
        self.newton(z, w)
            .or_else(|| self.newton(z, self.far_field(z).w))
    }
}

/// Descending ladder of boundary heights for the continuation.
fn eps_ladder(span: f64) -> Vec<f64> {
    let mut ladder = Vec::new();
    let mut e = 0.25 * span.max(2.0);
    while e > 0.25 {
        ladder.push(e);
        e *= 0.25;
    }
    ladder.extend_from_slice(&[0.1, 0.02, 3e-3, 1e-3, 3e-4, 1e-4]);
    ladder
}

/// Number of trailing ladder levels used in the Richardson extrapolation.
const EXTRAP_LEVELS: usize = 3;

/// Solve a ladder column at abscissa x, warm-started at the top.
///
/// Right at a support edge the lowest heights can drop below the resolution
/// of the source grid, where the piecewise-linear density makes the residual
/// landscape non-smooth; such levels are allowed to fail (up to two, counted
/// from the bottom) and the column extrapolates from the levels that did
/// converge.
fn solve_column<S: SubordinationSolver>(
    solver: &S,
    ladder: &[f64],
    x: f64,
    top_warm: Option<NodeState>,
) -> Option<Vec<(f64, NodeState)>> {
    let mut states: Vec<(f64, NodeState)> = Vec::with_capacity(ladder.len());
    let mut warm = top_warm;
    for (idx, &eps) in ladder.iter().enumerate() {
        let z = Complex64::new(x, eps);
        let state = match solver.solve_node(z, warm) {
            Some(v) => Some(v),
            None => {
                // the jump from the previous height may be too large for
                // this column; walk down in geometric substeps instead
                let start = if idx == 0 { 8.0 * eps } else { ladder[idx - 1] };
                let substeps = 16;
                let mut sub_warm = warm;
                let mut reached = None;
                for m in 1..=substeps {
                    let height = start * (eps / start).powf(m as f64 / substeps as f64);
                    let zz = Complex64::new(x, height);
                    match solver.solve_node(zz, sub_warm) {
                        Some(v) => {
                            sub_warm = Some(v);
                            if m == substeps {
                                reached = Some(v);
                            }
                        }
                        None => break,
                    }
                }
                reached
            }
        };
        match state {
            Some(v) => {
                warm = Some(v);
                states.push((eps, v));
            }
            None => {
                if states.len() + (ladder.len() - idx) < ladder.len() - 2 + 1 {
                    // more than two levels lost
                    return None;
                }
            }
        }
    }
    if states.len() + 2 < ladder.len() || states.len() < EXTRAP_LEVELS {
        return None;
    }
    Some(states)
}

/// Extrapolated boundary density at a solved column, using the lowest
/// heights that converged.
fn column_density(states: &[(f64, NodeState)]) -> f64 {
    let m = states.len();
    let pts: Vec<(f64, f64)> = (m - EXTRAP_LEVELS..m)
        .map(|i| (states[i].0, -states[i].1.w.im / PI))
        .collect();
    extrapolate_to_zero(&pts).max(0.0)
}

/// Shared density-reconstruction pipeline: coarse support scan, edge
/// bisection, then a full-resolution sweep over the detected support.
fn reconstruct<S: SubordinationSolver>(
    solver: &S,
    wide_lo: f64,
    wide_hi: f64,
    n_final: usize,
    diverged: impl Fn() -> Error + Sync,
) -> Result<GridMeasure> {
    let span = wide_hi - wide_lo;
    let ladder = eps_ladder(span);

    let sweep = |lo: f64, hi: f64, n: usize| -> Result<Vec<Vec<(f64, NodeState)>>> {
        let step = (hi - lo) / (n - 1) as f64;
        // serial continuation sweep at the top of the ladder
        let mut top = Vec::with_capacity(n);
        let mut warm: Option<NodeState> = None;
        for i in 0..n {
            let z = Complex64::new(lo + step * i as f64, ladder[0]);
            let state = solver.solve_node(z, warm).ok_or_else(&diverged)?;
            warm = Some(state);
            top.push(state);
        }
        // independent ladder descents per node
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = lo + step * i as f64;
                solve_column(solver, &ladder, x, Some(top[i])).ok_or_else(&diverged)
            })
            .collect()
    };

    // coarse pass for support detection
    let coarse = sweep(wide_lo, wide_hi, COARSE_COLUMNS)?;
    let coarse_step = span / (COARSE_COLUMNS - 1) as f64;
    let dens: Vec<f64> = coarse.iter().map(|c| column_density(c)).collect();
    let fmax = dens.iter().cloned().fold(0.0, f64::max);
    if !(fmax > 0.0) {
        return Err(diverged());
    }
    let thresh = SUPPORT_THRESHOLD * fmax;
    let first = dens.iter().position(|&v| v > thresh).ok_or_else(&diverged)?;
    let last = dens.len() - 1 - dens.iter().rev().position(|&v| v > thresh).unwrap();

    let density_at = |x: f64, warm: NodeState| -> Result<f64> {
        let col = solve_column(solver, &ladder, x, Some(warm)).ok_or_else(&diverged)?;
        Ok(column_density(&col))
    };

    // bisection refinement of the support endpoints
    let mut lo_edge = wide_lo + coarse_step * first as f64;
    if first > 0 {
        let mut a = lo_edge - coarse_step;
        let mut b = lo_edge;
        let warm = coarse[first - 1][0].1;
        for _ in 0..30 {
            let mid = 0.5 * (a + b);
            if density_at(mid, warm)? > thresh {
                b = mid;
            } else {
                a = mid;
            }
        }
        lo_edge = a;
    }
    let mut hi_edge = wide_lo + coarse_step * last as f64;
    if last + 1 < dens.len() {
        let mut a = hi_edge;
        let mut b = hi_edge + coarse_step;
        let warm = coarse[last][0].1;
        for _ in 0..30 {
            let mid = 0.5 * (a + b);
            if density_at(mid, warm)? > thresh {
                a = mid;
            } else {
                b = mid;
            }
        }
        hi_edge = b;
    }

    // full-resolution pass with a two-cell margin
    let pad = 2.0 * (hi_edge - lo_edge) / (n_final - 1) as f64;
    let lo = lo_edge - pad;
    let hi = hi_edge + pad;
    let full = sweep(lo, hi, n_final)?;
    let density: Vec<f64> = full.iter().map(|c| column_density(c)).collect();

    let step = (hi - lo) / (n_final - 1) as f64;
    let mass = crate::numutil::trapezoid(&density, step);
    if !(0.9..=1.1).contains(&mass) {
        return Err(diverged());
    }
    GridMeasure::from_samples(lo, hi, &density)
}

/// Fractional free convolution power mu^{boxplus k} for real k >= 1.
pub fn free_power(mu: &GridMeasure, k: f64) -> Result<GridMeasure> {
    if !(k >= 1.0) {
        return Err(Error::KLessThanOne(k));
    }
    if k == 1.0 {
        // the R-transform scaling makes the unit power the identity exactly
        return Ok(mu.clone());
    }
    let solver = PowerSolver::new(mu, k);
    // the spectrum of the compression stays inside [lo, hi], so the power
    // lives inside [k lo, k hi]
    let pad = 0.05 * k * (mu.hi() - mu.lo());
    reconstruct(
        &solver,
        k * mu.lo() - pad,
        k * mu.hi() + pad,
        mu.len(),
        || Error::SolverDiverged {
            re: f64::NAN,
            im: f64::NAN,
            k,
        },
    )
}

/// Moments of mu^{boxplus k} through the cumulant route: every free cumulant
/// scales linearly in k. Independent of the density-side solver.
pub fn free_power_moments(mu: &GridMeasure, k: f64, order: usize) -> Result<Vec<f64>> {
    if !(k >= 1.0) {
        return Err(Error::KLessThanOne(k));
    }
    if order > 16 {
        return Err(Error::OrderTooLarge(order));
    }
    let moments = mu.moments(order.max(2))?;
    let kappa = moments_to_cumulants(&moments)?;
    let mut out = cumulants_to_moments(&kappa.scale(k));
    out.truncate(order);
    Ok(out)
}

/// The variance-normalized power  k^{-1/2}_* mu^{boxplus k}.
pub fn normalized_free_power(mu: &GridMeasure, k: f64) -> Result<GridMeasure> {
    free_power(mu, k)?.dilate(k.powf(-0.5))
}

/// Free convolution with a semicircle of variance t.
pub fn semicircular_flow(mu: &GridMeasure, t: f64) -> Result<GridMeasure> {
    if t < 0.0 {
        return Err(Error::BadConfig(format!(
            "flow time must be non-negative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(mu.clone());
    }
    let solver = FlowSolver::new(mu, t);
    let widen = 2.0 * t.sqrt();
    let pad = 0.05 * (mu.hi() - mu.lo() + 2.0 * widen);
    reconstruct(
        &solver,
        mu.lo() - widen - pad,
        mu.hi() + widen + pad,
        mu.len(),
        || Error::SolverDiverged {
            re: f64::NAN,
            im: f64::NAN,
            k: t,
        },
    )
}

/// Cauchy transform of mu^{boxplus k} at a single point z in the upper
/// half-plane, by continuation from the far field down to Im z.
pub fn power_cauchy(mu: &GridMeasure, k: f64, z: Complex64) -> Result<Complex64> {
    if !(k >= 1.0) {
        return Err(Error::KLessThanOne(k));
    }
    if !(z.im > 0.0) {
        return Err(Error::TooCloseToSupport(z.re));
    }
    let solver = PowerSolver::new(mu, k);
    let mut heights = Vec::new();
    let mut e = 0.5 * k * (mu.hi() - mu.lo()).max(1.0);
    while e > 2.0 * z.im {
        heights.push(e);
        e *= 0.5;
    }
    heights.push(z.im);
    let mut warm: Option<NodeState> = None;
    for &eps in &heights {
        let zz = Complex64::new(z.re, eps);
        warm = Some(
            solver
                .solve_node(zz, warm)
                .ok_or(Error::SolverDiverged {
                    re: z.re,
                    im: eps,
                    k,
                })?,
        );
    }
    Ok(warm.unwrap().w)
}

/// Sup over a test set of z = x + i eps of the residual of the transport
/// equation  (k d_k + z d_z) G_k(z) = d_z G_k(z) / G_k(z),
/// with d_k by central differences of step dk and d_z by central differences
/// of the holomorphic function along the real direction.
pub fn burgers_residual(mu: &GridMeasure, k: f64, dk: f64, eps: f64) -> Result<f64> {
    if !(dk > 0.0) {
        return Err(Error::BadConfig(format!("dk must be positive, got {dk}")));
    }
    if !(k >= 1.0 + dk) {
        return Err(Error::KLessThanOne(k - dk));
    }
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    let a = k * mu.lo();
    let b = k * mu.hi();
    let m = 9;
    let dz = 1e-5 * (1.0 + b.abs().max(a.abs()));
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let x = a + (b - a) * (0.2 + 0.6 * i as f64 / (m - 1) as f64);
        let z = Complex64::new(x, eps);
        let g = power_cauchy(mu, k, z)?;
        let g_kp = power_cauchy(mu, k + dk, z)?;
        let g_km = power_cauchy(mu, k - dk, z)?;
        let g_zp = power_cauchy(mu, k, z + dz)?;
        let g_zm = power_cauchy(mu, k, z - dz)?;
        let dgdk = (g_kp - g_km) / (2.0 * dk);
        let dgdz = (g_zp - g_zm) / (2.0 * dz);
        let residual = (k * dgdk + z * dgdz - dgdz / g).norm();
        if residual > worst {
            worst = residual;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{bump, cdf_distance, semicircle, uniform};

    #[test]
    fn semicircle_power_is_dilation() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let p4 = free_power(&sc, 4.0).unwrap();
        let reference = sc.dilate(2.0).unwrap();
        let d = cdf_distance(&p4, &reference);
        assert!(d <= 1e-3, "cdf distance {d}");
    }

    #[test]
    fn unit_power_is_identity() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let p = free_power(&u, 1.0).unwrap();
        let d = cdf_distance(&p, &u);
        assert!(d <= 1e-4, "cdf distance {d}");
        // the solver path itself must also reproduce the measure for k near 1;
        // jump edges smear over one output cell, so the bound is looser
        let p_solved = free_power(&u, 1.0 + 1e-9).unwrap();
        let d_solved = cdf_distance(&p_solved, &u);
        assert!(d_solved <= 1e-3, "solver-path cdf distance {d_solved}");
    }

    #[test]
    fn sub_unit_power_rejected() {
        let u = uniform(-1.0, 1.0, 101).unwrap();
        assert!(matches!(free_power(&u, 0.5), Err(Error::KLessThanOne(_))));
    }

    #[test]
    fn power_preserves_mean_and_scales_free_variance() {
        let mu = uniform(-0.5, 1.5, 1201).unwrap();
        let k = 2.5;
        let p = free_power(&mu, k).unwrap();
        let mean_target = k * mu.mean();
        let var_target = k * mu.variance();
        assert!(
            (p.mean() - mean_target).abs() <= 1e-4 * mean_target.abs().max(1.0),
            "mean {} vs {}",
            p.mean(),
            mean_target
        );
        assert!(
            (p.variance() - var_target).abs() <= 1e-4 * var_target,
            "variance {} vs {}",
            p.variance(),
            var_target
        );
    }

    #[test]
    fn semigroup_composition() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let a = free_power(&free_power(&u, 2.0).unwrap(), 1.5).unwrap();
        let b = free_power(&u, 3.0).unwrap();
        let d = cdf_distance(&a, &b);
        assert!(d <= 2e-3, "semigroup cdf distance {d}");
    }

    #[test]
    fn density_route_matches_cumulant_route() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let k = 2.0;
        let p = free_power(&u, k).unwrap();
        let got = p.moments(8).unwrap();
        let want = free_power_moments(&u, k, 8).unwrap();
        let sigma = want[1].sqrt();
        for j in 0..8 {
            let scale = want[j].abs().max(sigma.powi(j as i32 + 1));
            assert!(
                (got[j] - want[j]).abs() <= 1e-3 * scale,
                "order {}: {} vs {}",
                j + 1,
                got[j],
                want[j]
            );
        }
    }

    #[test]
    fn cumulant_route_trivial_cases() {
        let sc = semicircle(0.0, 1.0, 4001).unwrap();
        let m = free_power_moments(&sc, 3.0, 2).unwrap();
        assert!((m[1] - 3.0).abs() < 2e-4, "m2 {}", m[1]);
        let u = uniform(-1.0, 1.0, 2001).unwrap();
        let m1 = free_power_moments(&u, 1.0, 6).unwrap();
        let direct = u.moments(6).unwrap();
        for (a, b) in m1.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(matches!(
            free_power_moments(&u, 2.0, 17),
            Err(Error::OrderTooLarge(17))
        ));
    }

    #[test]
    fn normalized_power_of_semicircle_is_fixed() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        for k in [1.0, 2.0] {
            let p = normalized_free_power(&sc, k).unwrap();
            let d = cdf_distance(&p, &sc);
            assert!(d <= 1e-3, "k={k}: cdf distance {d}");
        }
    }

    #[test]
    fn flow_at_zero_time_is_identity() {
        let u = uniform(-1.0, 1.0, 101).unwrap();
        let f = semicircular_flow(&u, 0.0).unwrap();
        assert_eq!(cdf_distance(&f, &u), 0.0);
    }

    #[test]
    fn flow_of_semicircle_adds_variance() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let f = semicircular_flow(&sc, 1.0).unwrap();
        let reference = semicircle(0.0, 2.0, 1201).unwrap();
        let d = cdf_distance(&f, &reference);
        assert!(d <= 1e-3, "cdf distance {d}");
    }

    #[test]
    fn flow_variance_is_additive() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let t = 0.7;
        let f = semicircular_flow(&u, t).unwrap();
        let target = u.variance() + t;
        assert!(
            (f.variance() - target).abs() <= 1e-4 * target,
            "variance {} vs {}",
            f.variance(),
            target
        );
    }

    #[test]
    fn burgers_residual_small_for_semicircle() {
        let sc = semicircle(0.0, 1.0, 1201).unwrap();
        let r = burgers_residual(&sc, 2.0, 1e-3, 1e-2).unwrap();
        assert!(r <= 1e-4, "residual {r}");
    }

    #[test]
    fn burgers_residual_central_difference_order() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let r1 = burgers_residual(&u, 1.5, 0.1, 0.05).unwrap();
        let r2 = burgers_residual(&u, 1.5, 0.05, 0.05).unwrap();
        let ratio = r1 / r2;
        assert!((2.5..=6.5).contains(&ratio), "ratio {ratio} ({r1} / {r2})");
    }

    #[test]
    fn burgers_residual_uniform() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let r = burgers_residual(&u, 1.5, 1e-3, 1e-2).unwrap();
        assert!(r <= 1e-3, "residual {r}");
    }

    #[test]
    fn smoothing_commutes_with_powers() {
        let u = uniform(-1.0, 1.0, 1201).unwrap();
        let eps = 0.05;
        let k = 2.0;
        let lhs = free_power(&u.cauchy_smooth(eps).unwrap(), k).unwrap();
        let rhs = free_power(&u, k).unwrap().cauchy_smooth(k * eps).unwrap();
        let d = cdf_distance(&lhs, &rhs);
        assert!(d <= 1e-2, "cdf distance {d}");
    }

    #[test]
    fn smooth_bump_power_keeps_mass_invariants() {
        let b = bump(0.3, 1.0, 1201).unwrap();
        let p = free_power(&b, 1.7).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-9);
        assert!(p.density().iter().all(|&v| v >= 0.0));
    }
}
