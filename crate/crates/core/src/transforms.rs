//! Cauchy transform evaluation, Plemelj boundary values, the discrete
//! Hilbert transform, and moment/free-cumulant conversion.

use crate::error::{Error, Result};
use crate::measure::GridMeasure;
use crate::numutil::{centered_derivative, interp_uniform, trapezoid};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Quadrature-backed evaluator for G(z) = integral of f(x)/(z-x) dx and its
/// z-derivative.
///
/// Away from the real axis a plain trapezoid sum is used. Within three grid
/// spacings of the axis the integrand is near-singular, so the local linear
/// part of the density is subtracted and integrated in closed form; the
/// remainder is smooth enough for the trapezoid rule again.
pub(crate) struct CauchyEvaluator {
    lo: f64,
    hi: f64,
    step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    density: Vec<f64>,
    dens_deriv: Vec<f64>,
    weighted_density: Vec<f64>,
}

impl CauchyEvaluator {
    pub fn new(mu: &GridMeasure) -> Self {
        let n = mu.len();
        let step = mu.step();
        let mut weights = vec![step; n];
        weights[0] = 0.5 * step;
        weights[n - 1] = 0.5 * step;
        let weighted_density: Vec<f64> = weights
            .iter()
            .zip(mu.density())
            .map(|(w, f)| w * f)
            .collect();
        Self {
            lo: mu.lo(),
            hi: mu.hi(),
            step,
            nodes: mu.nodes(),
            weights,
            density: mu.density().to_vec(),
            dens_deriv: centered_derivative(mu.density(), step),
            weighted_density,
        }
    }

    fn near_axis(&self, z: Complex64) -> bool {
        z.im.abs() < 3.0 * self.step
            && z.re > self.lo - 3.0 * self.step
            && z.re < self.hi + 3.0 * self.step
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if !self.near_axis(z) {
            // wf / (z - x) expanded with one real reciprocal per node
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..self.nodes.len() {
                let dre = z.re - self.nodes[i];
                let inv = self.weighted_density[i] / (dre * dre + z.im * z.im);
                re += dre * inv;
                im -= z.im * inv;
            }
            return Complex64::new(re, im);
        }
        let x0 = z.re.clamp(self.lo, self.hi);
        let f0 = interp_uniform(self.lo, self.step, &self.density, x0);
        let d0 = interp_uniform(self.lo, self.step, &self.dens_deriv, x0);
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..self.nodes.len() {
            let residue =
                self.weights[i] * (self.density[i] - f0 - d0 * (self.nodes[i] - x0));
            let dre = z.re - self.nodes[i];
            let inv = residue / (dre * dre + z.im * z.im);
            re += dre * inv;
            im -= z.im * inv;
        }
        let acc = Complex64::new(re, im);
        let i0 = (z - self.lo).ln() - (z - self.hi).ln();
        let i1 = -(self.hi - self.lo) + (z - x0) * i0;
        acc + f0 * i0 + d0 * i1
    }

    /// Evaluate G and G' in a single pass over the grid.
    pub fn eval_pair(&self, z: Complex64) -> (Complex64, Complex64) {
        if !self.near_axis(z) {
            let (mut gre, mut gim) = (0.0, 0.0);
            let (mut pre, mut pim) = (0.0, 0.0);
            for i in 0..self.nodes.len() {
                let dre = z.re - self.nodes[i];
                let dim = z.im;
                let n2 = dre * dre + dim * dim;
                let inv = self.weighted_density[i] / n2;
                // term = wf * conj(d) / |d|^2
                let tre = dre * inv;
                let tim = -dim * inv;
                gre += tre;
                gim += tim;
                // term / d = term * conj(d) / |d|^2
                let inv2 = 1.0 / n2;
                pre -= (tre * dre + tim * dim) * inv2;
                pim -= (tim * dre - tre * dim) * inv2;
            }
            return (
                Complex64::new(gre, gim),
                Complex64::new(pre, pim),
            );
        }
        let x0 = z.re.clamp(self.lo, self.hi);
        let f0 = interp_uniform(self.lo, self.step, &self.density, x0);
        let d0 = interp_uniform(self.lo, self.step, &self.dens_deriv, x0);
        let (mut gre, mut gim) = (0.0, 0.0);
        let (mut pre, mut pim) = (0.0, 0.0);
        for i in 0..self.nodes.len() {
            let residue =
                self.weights[i] * (self.density[i] - f0 - d0 * (self.nodes[i] - x0));
            let dre = z.re - self.nodes[i];
            let dim = z.im;
            let n2 = dre * dre + dim * dim;
            let inv = residue / n2;
            let tre = dre * inv;
            let tim = -dim * inv;
            gre += tre;
            gim += tim;
            let inv2 = 1.0 / n2;
            pre -= (tre * dre + tim * dim) * inv2;
            pim -= (tim * dre - tre * dim) * inv2;
        }
        let g = Complex64::new(gre, gim);
        let gp = Complex64::new(pre, pim);
        let i0 = (z - self.lo).ln() - (z - self.hi).ln();
        let i1 = -(self.hi - self.lo) + (z - x0) * i0;
        let di0 = 1.0 / (z - self.lo) - 1.0 / (z - self.hi);
        let di1 = i0 + (z - x0) * di0;
        (g + f0 * i0 + d0 * i1, gp + f0 * di0 + d0 * di1)
    }

    /// Antiderivative data: integral of f(t) Log(z - t) dt, so that its
    /// z-derivative is G(z). Continuous in the closed upper half-plane since
    /// z - t stays there.
    pub fn log_potential(&self, z: Complex64) -> Complex64 {
        let x0 = z.re.clamp(self.lo, self.hi);
        let f0 = interp_uniform(self.lo, self.step, &self.density, x0);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.nodes.len() {
            let residue = self.weights[i] * (self.density[i] - f0);
            if residue != 0.0 {
                acc += residue * (z - self.nodes[i]).ln();
            }
        }
        // integral of Log(z - t) over [lo, hi] in closed form
        let anti = |t: f64| {
            let d = z - t;
            d * (1.0 - d.ln())
        };
        acc + f0 * (anti(self.hi) - anti(self.lo))
    }

    pub fn eval_deriv(&self, z: Complex64) -> Complex64 {
        if !self.near_axis(z) {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..self.nodes.len() {
                let d = z - self.nodes[i];
                acc -= self.weights[i] * self.density[i] / (d * d);
            }
            return acc;
        }
        let x0 = z.re.clamp(self.lo, self.hi);
        let f0 = interp_uniform(self.lo, self.step, &self.density, x0);
        let d0 = interp_uniform(self.lo, self.step, &self.dens_deriv, x0);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.nodes.len() {
            let residue = self.density[i] - f0 - d0 * (self.nodes[i] - x0);
            let d = z - self.nodes[i];
            acc -= self.weights[i] * residue / (d * d);
        }
        let i0 = (z - self.lo).ln() - (z - self.hi).ln();
        let di0 = 1.0 / (z - self.lo) - 1.0 / (z - self.hi);
        let di1 = i0 + (z - x0) * di0;
        acc + f0 * di0 + d0 * di1
    }
}

/// Cauchy transform G(z) of the measure at a point off the support.
pub fn cauchy_transform(mu: &GridMeasure, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > mu.lo() - mu.step() && z.re < mu.hi() + mu.step() {
        return Err(Error::TooCloseToSupport(z.re));
    }
    Ok(CauchyEvaluator::new(mu).eval(z))
}

/// Derivative G'(z), same domain restrictions as [`cauchy_transform`].
pub fn cauchy_transform_deriv(mu: &GridMeasure, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > mu.lo() - mu.step() && z.re < mu.hi() + mu.step() {
        return Err(Error::TooCloseToSupport(z.re));
    }
    Ok(CauchyEvaluator::new(mu).eval_deriv(z))
}

/// Paired boundary data (density and its Hilbert transform) on the grid.
#[derive(Debug, Clone)]
pub struct BoundaryField {
    pub grid: Vec<f64>,
    pub f: Vec<f64>,
    pub hf: Vec<f64>,
}

impl BoundaryField {
    /// Value of the first orthogonality identity, integral of f * Hf.
    pub fn orthogonality_defect(&self) -> f64 {
        let step = self.grid[1] - self.grid[0];
        let vals: Vec<f64> = self.f.iter().zip(&self.hf).map(|(a, b)| a * b).collect();
        trapezoid(&vals, step)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f,hf\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{},{},{}\n", self.grid[i], self.f[i], self.hf[i]));
        }
        out
    }
}

/// Principal-value Hilbert transform of the density on its own grid.
///
/// Uses the odd-offset midpoint rule: nodes an odd number of spacings away
/// from the evaluation point carry weight 2h, which realizes the symmetric
/// cancellation of the principal value; half weights at the boundary nodes
/// correct the overhanging end cells.
pub fn hilbert(mu: &GridMeasure) -> Result<BoundaryField> {
    let n = mu.len();
    if n < 64 {
        return Err(Error::GridTooSmall { got: n, need: 64 });
    }
    let h = mu.step();
    let f = mu.density();
    let grid = mu.nodes();
    let mut hf = vec![0.0; n];
    for i in 0..n {
        let xi = grid[i];
        let start = if i % 2 == 0 { 1 } else { 0 };
        let mut acc = 0.0;
        let mut j = start;
        while j < n {
            acc += f[j] / (xi - grid[j]);
            j += 2;
        }
        acc *= 2.0 * h;
        // the first/last odd-offset cell overhangs the boundary by h
        if start == 0 {
            acc -= h * f[0] / (xi - grid[0]);
        }
        if (n - 1 - i) % 2 == 1 {
            acc -= h * f[n - 1] / (xi - grid[n - 1]);
        }
        hf[i] = acc / PI;
    }
    Ok(BoundaryField {
        grid,
        f: f.to_vec(),
        hf,
    })
}

/// Boundary values G(x + i eps) at every grid node.
pub fn plemelj_boundary(mu: &GridMeasure, eps: f64) -> Result<Vec<Complex64>> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    let ev = CauchyEvaluator::new(mu);
    Ok(mu
        .nodes()
        .iter()
        .map(|&x| ev.eval(Complex64::new(x, eps)))
        .collect())
}

/// Truncated free cumulant sequence kappa_1..kappa_m.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSeries {
    kappa: Vec<f64>,
}

impl CumulantSeries {
    pub fn new(kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(Error::TooFewMoments {
                got: kappa.len(),
                need: 2,
            });
        }
        if kappa[1] < 0.0 {
            return Err(Error::NonPositiveVariance(kappa[1]));
        }
        Ok(Self { kappa })
    }

    pub fn order(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// kappa_n with 1-based index.
    pub fn get(&self, n: usize) -> f64 {
        self.kappa[n - 1]
    }

    /// Cumulants of the k-th free convolution power (every kappa_n scales
    /// linearly in k).
    pub fn scale(&self, k: f64) -> Self {
        Self {
            kappa: self.kappa.iter().map(|v| k * v).collect(),
        }
    }
}

/// Coefficient of x^r in (sum_i m[i] x^i)^j, where m[0] is the zeroth moment.
fn power_coefficient(m: &[f64], j: usize, r: usize) -> f64 {
    let mut poly = vec![0.0; r + 1];
    poly[0] = 1.0;
    for _ in 0..j {
        let mut next = vec![0.0; r + 1];
        for (a, &pa) in poly.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for b in 0..=(r - a) {
                next[a + b] += pa * m[b];
            }
        }
        poly = next;
    }
    poly[r]
}

/// Invert the free moment-cumulant recursion
/// m_n = sum_j kappa_j * sum_{i_1+..+i_j = n-j} m_{i_1} ... m_{i_j}.
pub fn moments_to_cumulants(moments: &[f64]) -> Result<CumulantSeries> {
    if moments.len() < 2 {
        return Err(Error::TooFewMoments {
            got: moments.len(),
            need: 2,
        });
    }
    let order = moments.len();
    let mut m = vec![1.0];
    m.extend_from_slice(moments);
    let mut kappa = vec![0.0; order];
    for n in 1..=order {
        let mut rest = 0.0;
        for j in 1..n {
            rest += kappa[j - 1] * power_coefficient(&m, j, n - j);
        }
        kappa[n - 1] = m[n] - rest;
    }
    // measured variances can round slightly negative
    if kappa[1] < 0.0 && kappa[1] > -1e-12 {
        kappa[1] = 0.0;
    }
    CumulantSeries::new(kappa)
}

/// Forward free moment-cumulant recursion.
pub fn cumulants_to_moments(k: &CumulantSeries) -> Vec<f64> {
    let order = k.order();
    let mut m = vec![1.0];
    for n in 1..=order {
        let mut mn = 0.0;
        for j in 1..=n {
            mn += k.get(j) * power_coefficient(&m, j, n - j);
        }
        m.push(mn);
    }
    m.remove(0);
    m
}

/// Truncated R-transform sum_{n>=0} kappa_{n+1} s^n.
pub fn r_transform(k: &CumulantSeries, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut last = Complex64::new(0.0, 0.0);
    for n in 1..=k.order() {
        last = k.get(n) * pow;
        acc += last;
        pow *= s;
    }
    if last.norm() > 1e-12 * acc.norm().max(1e-300) {
        return Err(Error::SeriesNotConverged(s.norm()));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{bump, semicircle, uniform};

    /// Closed-form Cauchy transform of the unit semicircle, branch chosen so
    /// that G ~ 1/z at infinity.
    fn g_semicircle(z: Complex64) -> Complex64 {
        let root = (z * z - 4.0).sqrt();
        let root = if (z - root).norm() < (z + root).norm() {
            root
        } else {
            -root
        };
        (z - root) / 2.0
    }

    #[test]
    fn semicircle_transform_matches_closed_form() {
        let sc = semicircle(0.0, 1.0, 2001).unwrap();
        let g = cauchy_transform(&sc, Complex64::new(3.0, 0.0)).unwrap();
        let expect = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((g.re - expect).abs() < 1e-5, "{g}");
        assert!(g.im.abs() < 1e-12);

        for z in [Complex64::new(0.5, 0.8), Complex64::new(-1.0, 0.05)] {
            let got = cauchy_transform(&sc, z).unwrap();
            let want = g_semicircle(z);
            assert!((got - want).norm() < 5e-5, "z={z} got={got} want={want}");
        }
    }

    #[test]
    fn transform_decays_like_one_over_z() {
        let sc = semicircle(0.3, 2.0, 501).unwrap();
        let z = Complex64::new(0.0, 1e6);
        let g = cauchy_transform(&sc, z).unwrap();
        assert!((z * g - 1.0).norm() <= 1e-6);
    }

    #[test]
    fn uniform_transform_log_value() {
        let u = uniform(-1.0, 1.0, 2001).unwrap();
        let g = cauchy_transform(&u, Complex64::new(2.0, 0.0)).unwrap();
        assert!((g.re - 0.5 * 3.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn real_point_inside_support_rejected() {
        let u = uniform(-1.0, 1.0, 101).unwrap();
        assert!(matches!(
            cauchy_transform(&u, Complex64::new(0.3, 0.0)),
            Err(Error::TooCloseToSupport(_))
        ));
    }

    #[test]
    fn hilbert_of_semicircle_is_linear() {
        let sc = semicircle(0.0, 1.0, 2001).unwrap();
        let bf = hilbert(&sc).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &x) in bf.grid.iter().enumerate() {
            if x.abs() <= 1.8 {
                worst = worst.max((bf.hf[i] - x / (2.0 * PI)).abs());
            }
        }
        assert!(worst <= 5e-3, "interior sup error {worst}");
    }

    #[test]
    fn hilbert_vanishes_at_center_of_even_density() {
        let b = bump(0.0, 1.0, 1001).unwrap();
        let bf = hilbert(&b).unwrap();
        assert!(bf.hf[500].abs() < 1e-12);
    }

    #[test]
    fn hilbert_identities_on_smooth_bump() {
        let b = bump(0.0, 1.5, 4001).unwrap();
        let bf = hilbert(&b).unwrap();
        let h = bf.grid[1] - bf.grid[0];

        let defect = bf.orthogonality_defect();
        let scale: f64 = trapezoid(
            &bf.f
                .iter()
                .zip(&bf.hf)
                .map(|(a, b)| (a * b).abs())
                .collect::<Vec<_>>(),
            h,
        );
        assert!(defect.abs() <= 1e-5 * scale.max(1e-3), "defect {defect}");

        let lhs = trapezoid(
            &bf.f
                .iter()
                .zip(&bf.hf)
                .map(|(a, b)| a * b * b)
                .collect::<Vec<_>>(),
            h,
        );
        let rhs = trapezoid(&bf.f.iter().map(|a| a * a * a / 3.0).collect::<Vec<_>>(), h);
        assert!((lhs - rhs).abs() <= 1e-5 * rhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn hilbert_product_identity_nodally() {
        // H(f Hf) = ((Hf)^2 - f^2) / 2 on the interior 90%
        let b = bump(0.0, 1.5, 4001).unwrap();
        let bf = hilbert(&b).unwrap();
        let prod: Vec<f64> = bf.f.iter().zip(&bf.hf).map(|(a, b)| a * b).collect();
        let mu2 = GridMeasureProxy::new(&bf.grid, &prod);
        let h2 = mu2.hilbert_raw();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let n = bf.grid.len();
        for i in 0..n {
            if bf.grid[i].abs() <= 0.9 * 1.5 {
                let rhs = 0.5 * (bf.hf[i] * bf.hf[i] - bf.f[i] * bf.f[i]);
                worst = worst.max((h2[i] - rhs).abs());
                scale = scale.max(rhs.abs());
            }
        }
        assert!(worst <= 1e-5 * scale.max(1e-2), "worst {worst} scale {scale}");
    }

    /// Raw odd-offset Hilbert rule for a signed sample array (test helper;
    /// the public `hilbert` requires a probability density).
    struct GridMeasureProxy<'a> {
        grid: &'a [f64],
        vals: &'a [f64],
    }

    impl<'a> GridMeasureProxy<'a> {
        fn new(grid: &'a [f64], vals: &'a [f64]) -> Self {
            Self { grid, vals }
        }

        fn hilbert_raw(&self) -> Vec<f64> {
            let n = self.grid.len();
            let h = self.grid[1] - self.grid[0];
            let mut out = vec![0.0; n];
            for i in 0..n {
                let xi = self.grid[i];
                let start = if i % 2 == 0 { 1 } else { 0 };
                let mut acc = 0.0;
                let mut j = start;
                while j < n {
                    acc += self.vals[j] / (xi - self.grid[j]);
                    j += 2;
                }
                acc *= 2.0 * h;
                if start == 0 {
                    acc -= h * self.vals[0] / (xi - self.grid[0]);
                }
                if (n - 1 - i) % 2 == 1 {
                    acc -= h * self.vals[n - 1] / (xi - self.grid[n - 1]);
                }
                out[i] = acc / PI;
            }
            out
        }
    }

    #[test]
    fn plemelj_values_converge_first_order() {
        let sc = semicircle(0.0, 1.0, 2001).unwrap();
        let g = plemelj_boundary(&sc, 1e-3).unwrap();
        let mid = 1000; // x = 0
        let expect = Complex64::new(0.0, -(4.0f64 + 1e-6).sqrt() / 2.0 + 0.5e-3);
        assert!((g[mid] - expect).norm() < 5e-5, "{}", g[mid]);
        for v in &g {
            assert!(v.im <= 1e-14);
        }

        // interior convergence rate in eps against the Plemelj limit
        let b = bump(0.0, 1.5, 2001).unwrap();
        let bf = hilbert(&b).unwrap();
        let idx = 700;
        let x = bf.grid[idx];
        let limit = Complex64::new(PI * bf.hf[idx], -PI * bf.f[idx]);
        let ev = CauchyEvaluator::new(&b);
        let e1 = (ev.eval(Complex64::new(x, 0.02)) - limit).norm();
        let e2 = (ev.eval(Complex64::new(x, 0.01)) - limit).norm();
        let rate = (e1 / e2).log2();
        assert!((0.6..=1.6).contains(&rate), "rate {rate} e1={e1} e2={e2}");
    }

    #[test]
    fn semicircle_cumulants_collapse_to_variance() {
        let m = vec![0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0];
        let k = moments_to_cumulants(&m).unwrap();
        assert!((k.get(2) - 1.0).abs() < 1e-12);
        for n in [1, 3, 4, 5, 6, 7, 8] {
            if n != 2 {
                assert!(k.get(n).abs() < 1e-10, "kappa_{n} = {}", k.get(n));
            }
        }
    }

    #[test]
    fn bernoulli_cumulants() {
        let m = vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let k = moments_to_cumulants(&m).unwrap();
        assert!((k.get(2) - 1.0).abs() < 1e-12);
        assert!((k.get(4) + 1.0).abs() < 1e-12);
        assert!((k.get(6) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn translation_shifts_only_first_cumulant() {
        let mu = uniform(-1.0, 1.0, 2001).unwrap();
        let k0 = moments_to_cumulants(&mu.moments(6).unwrap()).unwrap();
        let k1 = moments_to_cumulants(&mu.translate(0.7).moments(6).unwrap()).unwrap();
        assert!((k1.get(1) - k0.get(1) - 0.7).abs() < 1e-9);
        for n in 2..=6 {
            assert!((k1.get(n) - k0.get(n)).abs() < 1e-7, "kappa_{n}");
        }
    }

    #[test]
    fn catalan_moments_from_pure_variance() {
        let k = CumulantSeries::new(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let m = cumulants_to_moments(&k);
        assert_eq!(m.len(), 8);
        let expect = [0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0];
        for (a, b) in m.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_moments_are_powers() {
        let k = CumulantSeries::new(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let m = cumulants_to_moments(&k);
        for (j, v) in m.iter().enumerate() {
            assert!((v - 0.5f64.powi(j as i32 + 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn r_transform_of_semicircle_is_identity() {
        let k = CumulantSeries::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let r = r_transform(&k, Complex64::new(0.1, 0.0)).unwrap();
        assert!((r - 0.1).norm() < 1e-15);
        let at0 = r_transform(&k, Complex64::new(0.0, 0.0)).unwrap();
        assert!((at0 - k.get(1)).norm() < 1e-15);
    }

    #[test]
    fn r_transform_inverts_cauchy_transform() {
        let u = uniform(-1.0, 1.0, 4001).unwrap();
        let k = moments_to_cumulants(&u.moments(16).unwrap()).unwrap();
        let z = Complex64::new(5.0, 1.0);
        let g = cauchy_transform(&u, z).unwrap();
        let r = r_transform(&k, g).unwrap();
        let back = 1.0 / g + r;
        assert!((back - z).norm() < 1e-6, "{back}");
    }
}
