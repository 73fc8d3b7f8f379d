//! Free entropy, free Fisher information, the free score, and monotonicity
//! scans of the normalized convolution powers.

use crate::convolution::{normalized_free_power, semicircular_flow};
use crate::error::Result;
use crate::measure::GridMeasure;
use crate::numutil::{centered_derivative, trapezoid};
use crate::transforms::hilbert;
use std::f64::consts::PI;

/// Free Fisher information  (4 pi^2 / 3) * integral of f^3.
pub fn fisher_information(mu: &GridMeasure) -> f64 {
    let cubes: Vec<f64> = mu.density().iter().map(|f| f * f * f).collect();
    (4.0 * PI * PI / 3.0) * trapezoid(&cubes, mu.step())
}

/// Free Fisher information through the score route,
/// 4 pi^2 * integral of f (Hf)^2.
pub fn fisher_via_score(mu: &GridMeasure) -> Result<f64> {
    let bf = hilbert(mu)?;
    let vals: Vec<f64> = bf
        .f
        .iter()
        .zip(&bf.hf)
        .map(|(f, hf)| f * hf * hf)
        .collect();
    Ok(4.0 * PI * PI * trapezoid(&vals, mu.step()))
}

/// The free score 2 pi Hf sampled on the grid.
pub fn score(mu: &GridMeasure) -> Result<Vec<f64>> {
    let bf = hilbert(mu)?;
    Ok(bf.hf.iter().map(|v| 2.0 * PI * v).collect())
}

/// Free entropy: the logarithmic energy plus 3/4 + (1/2) log 2 pi.
///
/// The double integral of log|x-y| is assembled cell by cell with the
/// density treated as constant per cell; the log kernel is integrated in
/// closed form over every cell pair, which handles the diagonal singularity
/// exactly instead of skipping it.
pub fn free_entropy(mu: &GridMeasure) -> f64 {
    let n = mu.len();
    let h = mu.step();
    let f = mu.density();
    let avg: Vec<f64> = (0..n - 1).map(|i| 0.5 * (f[i] + f[i + 1])).collect();
    let kernel = log_cell_integrals(n - 1, h);
    let mut energy = 0.0;
    for i in 0..n - 1 {
        if avg[i] == 0.0 {
            continue;
        }
        energy += avg[i] * avg[i] * kernel[0];
        for j in i + 1..n - 1 {
            energy += 2.0 * avg[i] * avg[j] * kernel[j - i];
        }
    }
    energy + 0.75 + 0.5 * (2.0 * PI).ln()
}

/// Exact integrals of log|x - y + m h| over the cell pair [0,h]^2 for every
/// lattice offset m = 0..count-1.
fn log_cell_integrals(count: usize, h: f64) -> Vec<f64> {
    let i0 = |t: f64| if t <= 0.0 { 0.0 } else { t * t.ln() - t };
    let i1 = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            0.5 * t * t * t.ln() - 0.25 * t * t
        }
    };
    let mut out = Vec::with_capacity(count);
    out.push(h * h * (h.ln() - 1.5));
    for m in 1..count {
        let d = m as f64 * h;
        // integral over s in [-h, h] of (h - |s|) ln(s + d)
        let low = (h - d) * (i0(d) - i0(d - h)) + (i1(d) - i1(d - h));
        let high = (h + d) * (i0(d + h) - i0(d)) - (i1(d + h) - i1(d));
        out.push(low + high);
    }
    out
}

/// Free entropy through the flow integral: one half the integral over t of
/// (1/(1+t) - Phi(flow at time t)), plus (1/2) log 2 pi e, with the tail
/// beyond t_max replaced by the matched asymptotic Phi ~ 1/(kappa2 + t).
pub fn entropy_via_flow(mu: &GridMeasure, t_max: f64, steps: usize) -> Result<f64> {
    let kappa2 = mu.variance();
    // substitution t = e^u - 1 concentrates nodes at small t; composite
    // Simpson needs an even interval count
    let m = steps.max(8) & !1usize;
    let u_max = (1.0 + t_max).ln();
    let du = u_max / m as f64;
    let mut acc = 0.0;
    for j in 0..=m {
        let u = du * j as f64;
        let t = u.exp() - 1.0;
        let phi = fisher_information(&semicircular_flow(mu, t)?);
        let integrand = (1.0 / (1.0 + t) - phi) * u.exp();
        let w = if j == 0 || j == m {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * integrand;
    }
    let head = acc * du / 3.0;
    let tail = ((kappa2 + t_max) / (1.0 + t_max)).ln();
    Ok(0.5 * (head + tail) + 0.5 * (2.0 * PI * std::f64::consts::E).ln())
}

/// One row of a monotonicity scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScanRow {
    pub k: f64,
    pub phi: f64,
    pub chi: f64,
}

/// Scan table with the worst monotonicity violations observed.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// max upward step of Phi between consecutive k (monotone scan: <= 0)
    pub worst_phi_increase: f64,
    /// max downward step of chi between consecutive k (monotone scan: <= 0)
    pub worst_chi_decrease: f64,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,phi,chi\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.k, r.phi, r.chi));
        }
        out
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.worst_phi_increase <= tol && self.worst_chi_decrease <= tol
    }
}

/// Evaluate Phi and chi of the normalized powers along a k-grid.
pub fn monotonicity_scan(mu: &GridMeasure, k_grid: &[f64]) -> Result<ScanReport> {
    if k_grid.is_empty() {
        return Err(crate::error::Error::BadConfig(
            "monotonicity scan needs a non-empty k grid".into(),
        ));
    }
    let rows = k_grid
        .iter()
        .map(|&k| {
            let nu = normalized_free_power(mu, k)?;
            Ok(ScanRow {
                k,
                phi: fisher_information(&nu),
                chi: free_entropy(&nu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst_phi: f64 = 0.0;
    let mut worst_chi: f64 = 0.0;
    for w in rows.windows(2) {
        worst_phi = worst_phi.max(w[1].phi - w[0].phi);
        worst_chi = worst_chi.max(w[0].chi - w[1].chi);
    }
    Ok(ScanReport {
        rows,
        worst_phi_increase: worst_phi,
        worst_chi_decrease: worst_chi,
    })
}

/// Both sides of the derivative identity for Phi of the normalized powers at
/// k = 1: the finite-difference derivative (lhs) and the direct quadrature of
/// its closed form,
/// (8 pi^2/3) int f^3 + 4 pi int (Hf f' - f (Hf)')/((Hf)^2 + f^2) f^2.
///
/// Powers are only defined for k >= 1, so the derivative is taken one-sidedly
/// at second order, with Richardson pairing over two step sizes.
pub fn dphi_dk_at_one(mu: &GridMeasure) -> Result<(f64, f64)> {
    // the k-jitter of the reconstruction scales with the output cell size;
    // 4001 nodes keep it below the h^2 truncation of the stencils
    let fine;
    let mu = if mu.len() >= 4001 {
        mu
    } else {
        fine = mu.regrid(mu.lo(), mu.hi(), 4001)?;
        &fine
    };
    let phi_at =
        |k: f64| -> Result<f64> { Ok(fisher_information(&normalized_free_power(mu, k)?)) };
    // every stencil node goes through the solver so that its systematic
    // reconstruction bias cancels in the difference
    let one_sided = |h: f64| -> Result<f64> {
        Ok((-2.5 * phi_at(1.0 + h)? + 4.0 * phi_at(1.0 + 2.0 * h)?
            - 1.5 * phi_at(1.0 + 3.0 * h)?)
            / h)
    };
    let h_big = 2e-2;
    let h_small = 1e-2;
    let d_big = one_sided(h_big)?;
    let d_small = one_sided(h_small)?;
    // both estimates are O(h^2); eliminate the quadratic term
    let lhs = (d_small * h_big * h_big - d_big * h_small * h_small)
        / (h_big * h_big - h_small * h_small);

    let bf = hilbert(mu)?;
    let h = mu.step();
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
    let cubes: Vec<f64> = bf.f.iter().map(|f| f * f * f).collect();
    let rhs = (8.0 * PI * PI / 3.0) * trapezoid(&cubes, h) + 4.0 * PI * trapezoid(&vals, h);
    Ok((lhs, rhs))
}
