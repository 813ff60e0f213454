//! The four additive martingales and the BST normalizer `C_n(z)`.

use super::value::{param, Index, Kind, MartingaleValue};
use crate::error::{Error, Result};
use crate::numeric::special::{digamma, ln_gamma};
use crate::numeric::{NeumaierSum, SignedLogSum};
use crate::ratios::SplitRatios;
use crate::tree::BinaryTreeShape;
use crate::yule::YulePath;

const DIRECT_LIMIT: u64 = 1000;

/// `ln Γ(n + a) − ln Γ(n + b)` for large `n` by the Stirling series of the difference.
fn ln_gamma_ratio_large(n: f64, a: f64, b: f64) -> f64 {
    fn bern(k: usize, a: f64) -> f64 {
        match k {
            2 => a * a - a + 1.0 / 6.0,
            3 => a * a * a - 1.5 * a * a + 0.5 * a,
            4 => a.powi(4) - 2.0 * a.powi(3) + a * a - 1.0 / 30.0,
            5 => a.powi(5) - 2.5 * a.powi(4) + 5.0 / 3.0 * a.powi(3) - a / 6.0,
            6 => a.powi(6) - 3.0 * a.powi(5) + 2.5 * a.powi(4) - 0.5 * a * a + 1.0 / 42.0,
            _ => unreachable!(),
        }
    }
    let mut s = (a - b) * n.ln();
    let mut p = 1.0;
    for k in 1..=5usize {
        p /= n;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        s += sign * (bern(k + 1, a) - bern(k + 1, b)) * p / (k * (k + 1)) as f64;
    }
    s
}

/// `ln C_n(z)` with `C_n(z) = ∏_{k<n} (k + 2z)/(k + 1)`.
pub fn ln_c_n(n: u64, z: f64) -> f64 {
    let a = 2.0 * z;
    if n <= DIRECT_LIMIT {
        let s: NeumaierSum = (0..n)
            .map(|k| {
                let k = k as f64;
                ((a - 1.0) / (k + 1.0)).ln_1p()
            })
            .collect();
        s.value()
    } else {
        ln_gamma_ratio_large(n as f64, a, 1.0) - ln_gamma(a)
    }
}

pub fn c_n(n: u64, z: f64) -> f64 {
    if n == 0 || z == 0.5 {
        return 1.0;
    }
    ln_c_n(n, z).exp()
}

/// `C_n'(z)/C_n(z) = Σ_{k<n} 2/(k + 2z)`.
pub fn c_n_log_derivative(n: u64, z: f64) -> f64 {
    let a = 2.0 * z;
    if n <= DIRECT_LIMIT {
        let s: NeumaierSum = (0..n).map(|k| 2.0 / (k as f64 + a)).collect();
        s.value()
    } else {
        2.0 * (digamma(n as f64 + a) - digamma(a))
    }
}

fn check_profile(profile: &[u64], n: u64) -> Result<()> {
    let leaves: u64 = profile.iter().sum();
    if leaves != n + 1 {
        return Err(Error::Precondition(format!(
            "profile has {leaves} leaves, a tree with {n} internal nodes has {}",
            n + 1
        )));
    }
    Ok(())
}

/// `M_n^BST(z) = Σ_k U_k(n) z^k / C_n(z)` from the leaf-depth profile.
pub fn m_bst_profile(profile: &[u64], n: u64, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    check_profile(profile, n)?;
    let index = Index::Size(n);
    if z == 0.5 {
        return Ok(MartingaleValue::exact(Kind::Bst, index, p, 1.0));
    }
    let (lz, lc) = (z.ln(), ln_c_n(n, z));
    let mut s = SignedLogSum::new();
    for (d, &c) in profile.iter().enumerate() {
        if c > 0 {
            s.add((c as f64).ln() + d as f64 * lz - lc, 1.0);
        }
    }
    Ok(MartingaleValue::from_sum(Kind::Bst, index, p, &s))
}

pub fn m_bst(shape: &BinaryTreeShape, z: f64) -> Result<MartingaleValue> {
    m_bst_profile(&shape.profile(), shape.internal_count() as u64, z)
}

/// `M(t, z) = Σ_{u alive at t} z^{|u|} e^{t(1−2z)}` from the alive profile.
pub fn m_yule_profile(profile: &[u64], t: f64, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let index = Index::Time(t);
    if z == 0.5 {
        return Ok(MartingaleValue::exact(Kind::Yule, index, p, 1.0));
    }
    let (lz, shift) = (z.ln(), t * (1.0 - 2.0 * z));
    let mut s = SignedLogSum::new();
    for (d, &c) in profile.iter().enumerate() {
        if c > 0 {
            s.add((c as f64).ln() + d as f64 * lz + shift, 1.0);
        }
    }
    Ok(MartingaleValue::from_sum(Kind::Yule, index, p, &s))
}

pub fn m_yule(path: &YulePath, t: f64, z: f64) -> Result<MartingaleValue> {
    let profile = path.alive_profile(t)?;
    m_yule_profile(&profile, t, z)
}

/// `M_g^GEN(z) = Σ_{|u|=g} z^g e^{(1−2z) S^u}` from the generation's birth times.
pub fn m_gen_births(births: &[f64], g: u32, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let index = Index::Generation(g);
    if z == 0.5 {
        return Ok(MartingaleValue::exact(Kind::Gen, index, p, 1.0));
    }
    let (gl, th) = (g as f64 * z.ln(), 1.0 - 2.0 * z);
    let mut s = SignedLogSum::new();
    for &b in births {
        s.add(gl + th * b, 1.0);
    }
    Ok(MartingaleValue::from_sum(Kind::Gen, index, p, &s))
}

pub fn m_gen(path: &YulePath, g: u8, z: f64) -> Result<MartingaleValue> {
    let births = path.generation_births(g)?;
    m_gen_births(&births, u32::from(g), z)
}

/// `Σ_{v ≼ u, v ≠ ∅} ln U^(v)` for every `u` of generation `g`, in label order.
pub(crate) fn log_products(ratios: &SplitRatios, g: u8) -> Result<Vec<f64>> {
    if g > ratios.estimation_depth() {
        return Err(Error::Range(format!(
            "ratios populated to depth {}, requested {g}",
            ratios.estimation_depth()
        )));
    }
    let v = ratios.values();
    let mut level = vec![0.0];
    for d in 1..=g {
        let base = (1usize << d) - 1;
        let next: Vec<f64> = (0..1usize << d)
            .map(|i| level[i / 2] + v[base + i].ln())
            .collect();
        level = next;
    }
    Ok(level)
}

/// `M_g^BIS(z) = Σ_{|u|=g} (∏_{v ≼ u} U^(v))^{2z−1} z^g`.
pub fn m_bis(ratios: &SplitRatios, g: u8, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let logs = log_products(ratios, g)?;
    let index = Index::Generation(u32::from(g));
    if z == 0.5 {
        return Ok(MartingaleValue::exact(Kind::Bis, index, p, 1.0));
    }
    let (gl, e) = (f64::from(g) * z.ln(), 2.0 * z - 1.0);
    let mut s = SignedLogSum::new();
    for &l in &logs {
        s.add(gl + e * l, 1.0);
    }
    Ok(MartingaleValue::from_sum(Kind::Bis, index, p, &s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::NodeLabel;
    use crate::yule::{simulate_yule, Stop};

    fn l(s: &str) -> NodeLabel {
        s.parse().unwrap()
    }

    #[test]
    fn normalizer() {
        assert_eq!(c_n(0, 3.0), 1.0);
        assert!((c_n(1, 0.7) - 1.4).abs() < 1e-15);
        assert_eq!(c_n(17, 0.5), 1.0);
        assert!((c_n(3, 2.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn normalizer_large_n_matches_direct_sum() {
        for &z in &[0.25, 0.7, 1.0, 2.155] {
            for &n in &[1001u64, 5000, 100_000] {
                let direct: NeumaierSum = (0..n)
                    .map(|k| ((2.0 * z - 1.0) / (k as f64 + 1.0)).ln_1p())
                    .collect();
                let a = ln_c_n(n, z);
                assert!((a - direct.value()).abs() < 1e-12 * (1.0 + a.abs()), "z={z} n={n}");
                let dd: NeumaierSum = (0..n).map(|k| 2.0 / (k as f64 + 2.0 * z)).collect();
                let b = c_n_log_derivative(n, z);
                assert!((b - dd.value()).abs() < 1e-12 * b.abs(), "z={z} n={n}");
            }
        }
        // C_n(1) = n + 1
        assert!((c_n(99_999, 1.0) / 100_000.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bst_examples() {
        let t1 = BinaryTreeShape::decode("100").unwrap();
        for z in [0.3, 1.0, 2.0] {
            assert!((m_bst(&t1, z).unwrap().value() - 1.0).abs() < 1e-15);
            for t2 in t1.one_step_children() {
                assert!((m_bst(&t2, z).unwrap().value() - 1.0).abs() < 1e-14);
            }
        }
        let comb = BinaryTreeShape::from_internal(&[NodeLabel::ROOT, l("0"), l("00")]).unwrap();
        assert!((m_bst(&comb, 2.0).unwrap().value() - 1.1).abs() < 1e-14);
    }

    #[test]
    fn yule_examples() {
        let p = simulate_yule(1, Stop::LeafCount(1)).unwrap();
        let tau1 = p.jump_time(1).unwrap();
        let t = tau1.min(1.0) * 0.5;
        let v = m_yule(&p, t, 0.8).unwrap().value();
        assert!((v - (t * (1.0 - 1.6)).exp()).abs() < 1e-15);
        let p = simulate_yule(1, Stop::Time(6.0)).unwrap();
        assert_eq!(m_yule(&p, 5.0, 0.5).unwrap().value(), 1.0);
        let n = p.population(5.0).unwrap() as f64;
        assert!((m_yule(&p, 5.0, 1.0).unwrap().value() - (-5f64).exp() * n).abs() < 1e-13 * n);
    }

    #[test]
    fn gen_examples() {
        let v = m_gen_births(&[0.5, 0.5], 1, 1.0).unwrap().value();
        assert!((v - 1.213_061).abs() < 1e-6);
        let p = simulate_yule(2, Stop::Generation(5)).unwrap();
        assert_eq!(m_gen(&p, 0, 0.9).unwrap().value(), 1.0);
        assert_eq!(m_gen(&p, 5, 0.5).unwrap().value(), 1.0);
        assert!(m_gen(&p, 6, 0.9).is_err());
    }

    #[test]
    fn bis_examples() {
        let r = SplitRatios::from_left_values(1, &[0.3], 10).unwrap();
        assert!((m_bis(&r, 1, 1.0).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((m_bis(&r, 1, 2.0).unwrap().value() - 0.74).abs() < 1e-14);
        assert_eq!(m_bis(&r, 1, 0.5).unwrap().value(), 1.0);
        assert!(m_bis(&r, 2, 1.0).is_err());
        assert_eq!(m_bis(&r, 0, 3.0).unwrap().value(), 1.0);
    }
}
