//! Gauss rules.

use super::special::ln_gamma;

/// Nodes and weights of a quadrature rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The rule mapped from `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        Rule {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `n`-point Gauss–Laguerre rule for `∫_0^∞ f(x) e^{-x} dx`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(n >= 1);
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let (mut pp, mut p2) = (0.0, 0.0);
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 - z) * p2 / j as f64 - (j - 1) as f64 * p3 / j as f64;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -(ln_gamma(nf) - ln_gamma(nf)).exp() / (pp * nf * p2);
    }
    Rule { nodes, weights }
}

/// Composite Gauss–Legendre over consecutive breakpoints.
pub fn composite(breaks: &[f64], per_panel: usize) -> Rule {
    let base = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(per_panel * breaks.len());
    let mut weights = Vec::with_capacity(per_panel * breaks.len());
    for w in breaks.windows(2) {
        let r = base.mapped(w[0], w[1]);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_is_exact_for_polynomials() {
        let r = gauss_legendre(16);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m = r.integrate(|x| x.powi(30));
        assert!((m - 2.0 / 31.0).abs() < 1e-14);
        let r = gauss_legendre(64).mapped(0.0, 1.0);
        assert!((r.integrate(|x| x.exp()) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn laguerre_moments() {
        let r = gauss_laguerre(64);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // ∫ x^k e^{-x} = k!
        let mut fact = 1.0;
        for k in 1..12 {
            fact *= k as f64;
            let m = r.integrate(|x| x.powi(k));
            assert!((m / fact - 1.0).abs() < 1e-11, "k = {k}: {m} vs {fact}");
        }
        assert!((r.integrate(|x| (-x).exp()) - 0.5).abs() < 1e-10);
    }
}
