//! Shape-preserving cubic interpolation on a uniform grid.

/// Monotone cubic Hermite interpolant on `t_i = t0 + i h`.
///
/// Slopes are centered differences clipped so that monotone data stay
/// monotone (no overshoot between nodes).
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    t0: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(t0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 3 && h > 0.0);
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        for i in 0..n {
            let raw = if i == 0 {
                (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h)
            } else {
                (y[i + 1] - y[i - 1]) / (2.0 * h)
            };
            let dl = delta[i.saturating_sub(1)];
            let dr = delta[i.min(n - 2)];
            d[i] = if dl * dr <= 0.0 {
                0.0
            } else {
                let m = 3.0 * dl.abs().min(dr.abs());
                raw.clamp(-m, m)
            };
        }
        MonotoneCubic { t0, h, y, d }
    }

    pub fn lo(&self) -> f64 {
        self.t0
    }

    pub fn hi(&self) -> f64 {
        self.t0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Value at `t`, clamped into the grid.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let s = ((t - self.t0) / self.h).max(0.0);
        let i = (s as usize).min(self.y.len() - 2);
        let f = (s - i as f64).min(1.0);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i] * self.h, self.d[i + 1] * self.h);
        let f2 = f * f;
        let f3 = f2 * f;
        (2.0 * f3 - 3.0 * f2 + 1.0) * y0
            + (f3 - 2.0 * f2 + f) * d0
            + (-2.0 * f3 + 3.0 * f2) * y1
            + (f3 - f2) * d1
    }
}
