//! Compensated and log-scaled summation.

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sum of signed terms given as `sign · exp(log_mag)`, kept relative to the
/// running largest magnitude so that no term over- or underflows.
#[derive(Clone, Copy, Debug)]
pub struct SignedLogSum {
    shift: f64,
    acc: NeumaierSum,
}

impl Default for SignedLogSum {
    fn default() -> Self {
        SignedLogSum {
            shift: f64::NEG_INFINITY,
            acc: NeumaierSum::new(),
        }
    }
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `sign · exp(log_mag)`.
    #[inline]
    pub fn add(&mut self, log_mag: f64, sign: f64) {
        if log_mag == f64::NEG_INFINITY || sign == 0.0 {
            return;
        }
        if log_mag > self.shift {
            if self.shift > f64::NEG_INFINITY {
                self.acc.scale((self.shift - log_mag).exp());
            }
            self.shift = log_mag;
        }
        self.acc.add(sign * (log_mag - self.shift).exp());
    }

    /// Adds a term `w · exp(log_mag)` where `w` is any finite real.
    #[inline]
    pub fn add_weighted(&mut self, log_mag: f64, w: f64) {
        if w != 0.0 {
            self.add(log_mag + w.abs().ln(), w.signum());
        }
    }

    /// `(ln |sum|, sign)`; sign is 0 for an empty or vanishing sum.
    pub fn log_value(&self) -> (f64, f64) {
        let v = self.acc.value();
        if v == 0.0 || self.shift == f64::NEG_INFINITY {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (self.shift + v.abs().ln(), v.signum())
        }
    }

    pub fn value(&self) -> f64 {
        let (l, s) = self.log_value();
        if s == 0.0 {
            0.0
        } else {
            s * l.exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn log_sum_handles_huge_terms() {
        let mut s = SignedLogSum::new();
        s.add(1000.0, 1.0);
        s.add(1000.0 + 2f64.ln(), 1.0);
        let (l, sign) = s.log_value();
        assert_eq!(sign, 1.0);
        assert!((l - (1000.0 + 3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_sum_matches_direct() {
        let xs = [0.3, -1.2, 4.5, 1e-8, -2.0];
        let mut s = SignedLogSum::new();
        for &x in &xs {
            s.add_weighted(0.0, x);
        }
        let direct: f64 = xs.iter().sum();
        assert!((s.value() - direct).abs() < 1e-14);
        assert_eq!(SignedLogSum::new().value(), 0.0);
    }
}
