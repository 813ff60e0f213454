//! Goodness-of-fit statistics and the report type shared by every suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::laws::SampleSet;
use crate::error::{Error, Result};
use crate::numeric::special::gamma_q;
use crate::numeric::NeumaierSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Ks,
    ChiSquared,
    Moment,
    PathwiseDiff,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for information only, never fails a run.
    Informational,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Named numbers for one stage of a schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub values: BTreeMap<String, f64>,
}

impl Stage {
    pub fn new(label: impl Into<String>) -> Self {
        Stage {
            label: label.into(),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub suite: String,
    pub kind: TestKind,
    pub seed: Option<u64>,
    pub sample_sizes: Vec<u64>,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub stages: Vec<Stage>,
    pub statistics: BTreeMap<String, f64>,
    /// Every threshold the verdict used.
    pub tolerances: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl TestReport {
    pub fn new(suite: impl Into<String>, kind: TestKind) -> Self {
        TestReport {
            suite: suite.into(),
            kind,
            seed: None,
            sample_sizes: Vec::new(),
            statistic: f64::NAN,
            p_value: None,
            stages: Vec::new(),
            statistics: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            verdict: Verdict::Informational,
            notes: Vec::new(),
        }
    }

    /// False only for a failed verdict.
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn stat(&mut self, key: &str, v: f64) -> &mut Self {
        self.statistics.insert(key.to_string(), v);
        self
    }

    pub fn tol(&mut self, key: &str, v: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `suite,kind,statistic,p_value,verdict`
    pub fn csv_row(&self) -> String {
        let kind = serde_json::to_value(self.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let verdict = serde_json::to_value(self.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        format!(
            "{},{},{:e},{},{}",
            self.suite,
            kind,
            self.statistic,
            self.p_value.map(|p| format!("{p:e}")).unwrap_or_default(),
            verdict
        )
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        // Theta-function form converges fast for small λ.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value with Stephens' small-sample correction.
fn ks_p(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// One-sample two-sided Kolmogorov–Smirnov test.
pub fn ks_test_values(suite: &str, values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestReport> {
    if values.len() < 10 {
        return Err(Error::Precondition(format!(
            "KS test needs at least 10 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Precondition("KS test got a NaN value".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let mut r = TestReport::new(suite, TestKind::Ks);
    r.sample_sizes = vec![v.len() as u64];
    r.statistic = d;
    r.p_value = Some(ks_p(d, n));
    Ok(r)
}

pub fn ks_test(samples: &SampleSet, cdf: impl Fn(f64) -> f64) -> Result<TestReport> {
    let mut r = ks_test_values(&format!("ks:{}", samples.law.tag()), &samples.values, cdf)?;
    r.seed = Some(samples.seed);
    Ok(r)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(suite: &str, a: &[f64], b: &[f64]) -> Result<TestReport> {
    if a.len() < 10 || b.len() < 10 {
        return Err(Error::Precondition("two-sample KS needs at least 10 values per side".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let mut r = TestReport::new(suite, TestKind::Ks);
    r.sample_sizes = vec![x.len() as u64, y.len() as u64];
    r.statistic = d;
    r.p_value = Some(ks_p(d, n * m / (n + m)));
    Ok(r)
}

/// Pearson chi-squared of counts against cell probabilities, `k − 1` degrees of freedom.
pub fn chi_squared(suite: &str, observed: &[u64], probs: &[f64]) -> Result<TestReport> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Precondition("chi-squared needs matching cells, at least two".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::Precondition("chi-squared needs a positive total count".into()));
    }
    let psum: f64 = probs.iter().sum();
    if (psum - 1.0).abs() > 1e-9 || probs.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Precondition(format!("cell probabilities sum to {psum}")));
    }
    let mut stat = NeumaierSum::new();
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        stat.add((o as f64 - e).powi(2) / e);
    }
    let df = (observed.len() - 1) as f64;
    let mut r = TestReport::new(suite, TestKind::ChiSquared);
    r.sample_sizes = vec![total];
    r.statistic = stat.value();
    r.p_value = Some(gamma_q(df / 2.0, r.statistic / 2.0));
    r.stat("degrees_of_freedom", df);
    Ok(r)
}

/// Sample mean and its standard error, with compensated sums.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = v.iter().copied().collect::<NeumaierSum>().value() / n;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let ss = v.iter().map(|x| (x - m) * (x - m)).collect::<NeumaierSum>().value();
    (m, (ss / (n - 1.0) / n).sqrt())
}
