//! Small shared quadrature and interpolation helpers.

/// Trapezoid rule on uniformly spaced samples.
pub(crate) fn trapezoid(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (0.5 * (values[0] + values[values.len() - 1]) + inner)
}

/// Cumulative trapezoid integral; output[0] = 0, output[i] = integral up to node i.
pub(crate) fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Linear interpolation on a uniform grid; zero outside [lo, hi].
pub(crate) fn interp_uniform(lo: f64, step: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let t = (x - lo) / step;
    if t <= 0.0 {
        return if t == 0.0 { values[0] } else { 0.0 };
    }
    let i = t.floor() as usize;
    if i + 1 >= n {
        return if t <= (n - 1) as f64 { values[n - 1] } else { 0.0 };
    }
    let frac = t - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Centered first derivative on a uniform grid (one-sided at the ends).
pub(crate) fn centered_derivative(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    out[0] = (values[1] - values[0]) / step;
    out[n - 1] = (values[n - 1] - values[n - 2]) / step;
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * step);
    }
    out
}

/// Monotone cubic (Fritsch-Carlson) slopes for interpolating a non-decreasing
/// sequence without overshoot.
pub(crate) fn monotone_cubic_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = vec![0.0; n - 1];
    for i in 0..n - 1 {
        d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] <= 0.0 {
            0.0
        } else {
            0.5 * (d[i - 1] + d[i])
        };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let a = m[i] / d[i];
            let b = m[i + 1] / d[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * d[i];
                m[i + 1] = tau * b * d[i];
            }
        }
    }
    m
}

/// Evaluate the Fritsch-Carlson interpolant and its derivative at x.
pub(crate) fn monotone_cubic_eval(
    xs: &[f64],
    ys: &[f64],
    slopes: &[f64],
    x: f64,
) -> (f64, f64) {
    let n = xs.len();
    if x <= xs[0] {
        return (ys[0], slopes[0]);
    }
    if x >= xs[n - 1] {
        return (ys[n - 1], slopes[n - 1]);
    }
    let mut idx = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    if idx >= n - 1 {
        idx = n - 2;
    }
    let h = xs[idx + 1] - xs[idx];
    let t = (x - xs[idx]) / h;
    let (y0, y1, m0, m1) = (ys[idx], ys[idx + 1], slopes[idx], slopes[idx + 1]);
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    let dh00 = 6.0 * t * t - 6.0 * t;
    let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
    let dh01 = -dh00;
    let dh11 = 3.0 * t * t - 2.0 * t;
    let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * m0 + dh11 * m1;
    (value, deriv)
}

/// Polynomial extrapolation to zero through (eps_i, value_i) pairs (Neville).
pub(crate) fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut vals: Vec<f64> = points.iter().map(|p| p.1).collect();
    let eps: Vec<f64> = points.iter().map(|p| p.0).collect();
    for level in 1..n {
        for i in 0..n - level {
            let denom = eps[i] - eps[i + level];
            vals[i] = (0.0 - eps[i + level]) / denom * vals[i]
                + (eps[i] - 0.0) / denom * vals[i + 1];
        }
    }
    vals[0]
}
