//! Piecewise cubic Hermite interpolation of tabulated series.
//!
//! Knot slopes come from the three-point (non-uniform) finite difference, with
//! one-sided differences at the ends. The interpolant is C1, reproduces
//! quadratics exactly on interior intervals, and integrates in closed form.

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSeries {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicSeries {
    /// `knots` must be strictly ascending and the same length as `values`.
    pub fn new(knots: &[f64], values: &[f64]) -> Self {
        assert_eq!(knots.len(), values.len(), "knots and values differ in length");
        assert!(!knots.is_empty(), "empty series");
        let n = knots.len();
        let mut slopes = vec![0.0; n];
        if n >= 3 {
            for k in 1..n - 1 {
                let h0 = knots[k] - knots[k - 1];
                let h1 = knots[k + 1] - knots[k];
                let d0 = (values[k] - values[k - 1]) / h0;
                let d1 = (values[k + 1] - values[k]) / h1;
                slopes[k] = (h1 * d0 + h0 * d1) / (h0 + h1);
            }
            let h0 = knots[1] - knots[0];
            let h1 = knots[2] - knots[1];
            let d0 = (values[1] - values[0]) / h0;
            let d1 = (values[2] - values[1]) / h1;
            slopes[0] = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            let h0 = knots[n - 2] - knots[n - 3];
            let h1 = knots[n - 1] - knots[n - 2];
            let d0 = (values[n - 2] - values[n - 3]) / h0;
            let d1 = (values[n - 1] - values[n - 2]) / h1;
            slopes[n - 1] = ((2.0 * h1 + h0) * d1 - h1 * d0) / (h0 + h1);
        } else if n == 2 {
            let d = (values[1] - values[0]) / (knots[1] - knots[0]);
            slopes = vec![d, d];
        }
        Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            slopes,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interval index containing `t` (clamped to the table).
    pub fn segment(&self, t: f64) -> usize {
        let n = self.knots.len();
        if n < 2 || t <= self.knots[0] {
            return 0;
        }
        if t >= self.knots[n - 1] {
            return n - 2;
        }
        self.knots.partition_point(|&k| k <= t) - 1
    }

    /// Value at `t`; outside the table the end cubic is extrapolated.
    pub fn eval(&self, t: f64) -> f64 {
        if self.knots.len() == 1 {
            return self.values[0];
        }
        let k = self.segment(t);
        let h = self.knots[k + 1] - self.knots[k];
        let s = (t - self.knots[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[k] + h10 * h * self.slopes[k] + h01 * self.values[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// Exact integral of the interpolant over knot interval `k`.
    pub fn interval_integral(&self, k: usize) -> f64 {
        let h = self.knots[k + 1] - self.knots[k];
        0.5 * h * (self.values[k] + self.values[k + 1]) + h * h * (self.slopes[k] - self.slopes[k + 1]) / 12.0
    }

    /// Exact integral over `[knots[k], t]` for `t` inside interval `k`.
    pub fn partial_integral(&self, k: usize, t: f64) -> f64 {
        let h = self.knots[k + 1] - self.knots[k];
        let s = (t - self.knots[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        // Antiderivatives of the Hermite basis on [0, s].
        let i00 = 0.5 * s4 - s3 + s;
        let i10 = 0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2;
        let i01 = -0.5 * s4 + s3;
        let i11 = 0.25 * s4 - s3 / 3.0;
        h * (i00 * self.values[k]
            + i10 * h * self.slopes[k]
            + i01 * self.values[k + 1]
            + i11 * h * self.slopes[k + 1])
    }

    /// Running integral from the first knot, evaluated at every knot.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.knots.len());
        let mut acc = 0.0;
        out.push(0.0);
        for k in 0..self.knots.len().saturating_sub(1) {
            acc += self.interval_integral(k);
            out.push(acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots() {
        let x = [0.0, 0.3, 0.5, 1.2, 2.0];
        let y = [1.0, -2.0, 0.5, 0.0, 3.0];
        let s = CubicSeries::new(&x, &y);
        for (a, b) in x.iter().zip(y.iter()) {
            assert!((s.eval(*a) - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_is_exact() {
        let x: Vec<f64> = (0..12).map(|k| (k as f64).powf(1.3) * 0.1).collect();
        let f = |t: f64| 2.0 * t * t - t + 0.5;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSeries::new(&x, &y);
        for k in 0..200 {
            let t = x[11] * k as f64 / 199.0;
            assert!((s.eval(t) - f(t)).abs() < 1e-12);
        }
        let total = s.cumulative()[11];
        let b = x[11];
        assert!((total - (2.0 * b.powi(3) / 3.0 - b * b / 2.0 + 0.5 * b)).abs() < 1e-12);
    }

    #[test]
    fn partial_integral_matches_full() {
        let x = [0.0, 0.5, 1.0, 1.7];
        let y = [0.0, 1.0, -1.0, 2.0];
        let s = CubicSeries::new(&x, &y);
        for k in 0..3 {
            assert!((s.partial_integral(k, x[k + 1]) - s.interval_integral(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn converges_on_oscillation() {
        let n = 2001;
        let x: Vec<f64> = (0..n).map(|k| k as f64 * 1e-3).collect();
        let y: Vec<f64> = x.iter().map(|t| (100.0 * t).sin()).collect();
        let s = CubicSeries::new(&x, &y);
        let err = (0..5000)
            .map(|k| {
                let t = 2.0 * k as f64 / 4999.0;
                (s.eval(t) - (100.0 * t).sin()).abs()
            })
            .fold(0.0, f64::max);
        // Error of the three-point slopes: about (f h)^3 / 16 for sin(f t).
        assert!(err < 1e-4, "{err}");
    }
}
