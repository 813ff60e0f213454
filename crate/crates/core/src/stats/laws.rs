//! Closed-form limit laws: samplers and exact distribution functions.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::quadrature::{composite, Rule};
use crate::numeric::special::{beta_reg, gamma_p, gamma_q};
use crate::rng::stream;

/// A law with a sampler and an exact CDF.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    Exp1,
    Gamma { a: f64 },
    Beta { a: f64, b: f64 },
    /// `(2γ_{3/2})^{−1}`, the limit `M(∞, 1/4)`.
    YuleQuarter,
    /// `(√π/4) β_{3/4,1/4}^{−1/2} γ_{5/4}^{−1/2}` with independent factors.
    BstQuarter,
}

impl Law {
    pub fn tag(&self) -> String {
        match self {
            Law::Exp1 => "exp1".into(),
            Law::Gamma { a } => format!("gamma({a})"),
            Law::Beta { a, b } => format!("beta({a},{b})"),
            Law::YuleQuarter => "yule_quarter".into(),
            Law::BstQuarter => "bst_quarter".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Law::Gamma { a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::Domain(format!("gamma shape {a} must be positive")))
            }
            Law::Beta { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                Err(Error::Domain(format!("beta parameters ({a}, {b}) must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Mean of the law (`1` for both quarter laws).
    pub fn mean(&self) -> f64 {
        match *self {
            Law::Exp1 | Law::YuleQuarter | Law::BstQuarter => 1.0,
            Law::Gamma { a } => a,
            Law::Beta { a, b } => a / (a + b),
        }
    }
}

/// I.i.d. draws from a [`Law`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub law: Law,
    pub values: Vec<f64>,
    pub seed: u64,
    pub size: usize,
}

fn gamma_draw<R: Rng>(g: &Gamma<f64>, rng: &mut R) -> f64 {
    g.sample(rng)
}

fn beta_draw<R: Rng>(ga: &Gamma<f64>, gb: &Gamma<f64>, rng: &mut R) -> f64 {
    loop {
        let x = gamma_draw(ga, rng);
        let y = gamma_draw(gb, rng);
        let s = x + y;
        if s > 0.0 && x > 0.0 {
            return x / s;
        }
    }
}

/// `n` draws from `law`, a pure function of `(law, seed, n)`.
pub fn sample_limit_law(law: Law, seed: u64, n: usize) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1".into()));
    }
    law.validate()?;
    let mut rng = stream(seed, &format!("law:{}", law.tag()), 0);
    let gamma = |a: f64| Gamma::new(a, 1.0).expect("validated shape");
    let mut values = Vec::with_capacity(n);
    match law {
        Law::Exp1 => {
            values.extend((0..n).map(|_| {
                let x: f64 = Exp1.sample(&mut rng);
                x
            }));
        }
        Law::Gamma { a } => {
            let g = gamma(a);
            values.extend((0..n).map(|_| gamma_draw(&g, &mut rng)));
        }
        Law::Beta { a, b } => {
            let (ga, gb) = (gamma(a), gamma(b));
            values.extend((0..n).map(|_| beta_draw(&ga, &gb, &mut rng)));
        }
        Law::YuleQuarter => {
            let g = gamma(1.5);
            while values.len() < n {
                let x = 0.5 / gamma_draw(&g, &mut rng);
                if x.is_finite() {
                    values.push(x);
                }
            }
        }
        Law::BstQuarter => {
            let (ga, gb, g) = (gamma(0.75), gamma(0.25), gamma(1.25));
            let c = std::f64::consts::PI.sqrt() / 4.0;
            while values.len() < n {
                let b = beta_draw(&ga, &gb, &mut rng);
                let x = c / (b * gamma_draw(&g, &mut rng)).sqrt();
                if x.is_finite() {
                    values.push(x);
                }
            }
        }
    }
    Ok(SampleSet {
        law,
        values,
        seed,
        size: n,
    })
}

/// Density `(2π t^5)^{−1/2} e^{−1/(2t)}` of `(2γ_{3/2})^{−1}`.
pub fn yule_quarter_density(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (-0.5 / t).exp() / (2.0 * std::f64::consts::PI * t.powi(5)).sqrt()
}

/// Rules for `E_B[f(B)]`, `B ∼ β_{3/4,1/4}`, split at `1/2`.
///
/// On `(0, 1/2)` the substitution `b = w^{4/3}` and on `(1/2, 1)` the
/// substitution `1 − b = s^4` remove the endpoint singularities of the density.
fn beta_quarter_rules() -> &'static (Rule, Rule) {
    use std::sync::OnceLock;
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| {
        let panels = |hi: f64| -> Vec<f64> { (0..=24).map(|i| hi * i as f64 / 24.0).collect() };
        let w_hi = 0.5f64.powf(0.75);
        let s_hi = 0.5f64.powf(0.25);
        // Geometric panels near b = 0 resolve the cutoff of Q(5/4, c/b) at small c.
        let mut wb = vec![0.0];
        wb.extend((0..=36).rev().map(|k| w_hi * 10f64.powf(-f64::from(k) / 3.0)));
        let rw = composite(&wb, 12);
        let rs = composite(&panels(s_hi), 12);
        // B(3/4, 1/4) = π√2.
        let norm = std::f64::consts::PI * std::f64::consts::SQRT_2;
        // b^{-1/4}(1-b)^{-3/4} db = (4/3)(1-b)^{-3/4} dw = 4 b^{-1/4} ds
        let left = Rule {
            weights: rw
                .nodes
                .iter()
                .zip(&rw.weights)
                .map(|(&w, &q)| {
                    let b = w.powf(4.0 / 3.0);
                    q * (4.0 / 3.0) * (1.0 - b).powf(-0.75) / norm
                })
                .collect(),
            nodes: rw.nodes.iter().map(|&w| w.powf(4.0 / 3.0)).collect(),
        };
        let right = Rule {
            weights: rs
                .nodes
                .iter()
                .zip(&rs.weights)
                .map(|(&s, &q)| {
                    let b = 1.0 - s.powi(4);
                    q * 4.0 * b.powf(-0.25) / norm
                })
                .collect(),
            nodes: rs.nodes.iter().map(|&s| 1.0 - s.powi(4)).collect(),
        };
        (left, right)
    })
}

fn beta_quarter_expectation(f: impl Fn(f64) -> f64) -> f64 {
    let (l, r) = beta_quarter_rules();
    l.nodes
        .iter()
        .zip(&l.weights)
        .chain(r.nodes.iter().zip(&r.weights))
        .map(|(&b, &w)| w * f(b))
        .sum()
}

/// `P(X ≤ x)` for the law. Outside the support the value is 0 or 1.
pub fn target_cdf(law: Law, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    match law {
        Law::Exp1 => {
            if x <= 0.0 {
                0.0
            } else {
                -(-x).exp_m1()
            }
        }
        Law::Gamma { a } => {
            if x <= 0.0 {
                0.0
            } else {
                gamma_p(a, x)
            }
        }
        Law::Beta { a, b } => {
            if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1.0
            } else {
                beta_reg(a, b, x)
            }
        }
        Law::YuleQuarter => {
            if x <= 0.0 {
                0.0
            } else if x.is_infinite() {
                1.0
            } else {
                gamma_q(1.5, 0.5 / x)
            }
        }
        Law::BstQuarter => {
            if x <= 0.0 {
                0.0
            } else if x.is_infinite() {
                1.0
            } else {
                // X ≤ x  ⇔  γ_{5/4} ≥ π/(16 x² β).
                let c2 = std::f64::consts::PI / 16.0 / (x * x);
                beta_quarter_expectation(|b| gamma_q(1.25, c2 / b)).clamp(0.0, 1.0)
            }
        }
    }
}
