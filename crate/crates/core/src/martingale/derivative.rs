//! Analytic `z`-derivatives of the additive martingales.

use super::additive::{c_n_log_derivative, ln_c_n, log_products};
use super::value::{param, Index, Kind, MartingaleValue};
use crate::error::{Error, Result};
use crate::numeric::SignedLogSum;
use crate::ratios::SplitRatios;
use crate::tree::BinaryTreeShape;
use crate::yule::YulePath;

/// `Σ_u z^{|u|} (|u|/z − C_n'/C_n) / C_n`.
pub fn d_bst_profile(profile: &[u64], n: u64, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let leaves: u64 = profile.iter().sum();
    if leaves != n + 1 {
        return Err(Error::Precondition(format!(
            "profile has {leaves} leaves, expected {}",
            n + 1
        )));
    }
    let (lz, lc, dc) = (z.ln(), ln_c_n(n, z), c_n_log_derivative(n, z));
    let mut s = SignedLogSum::new();
    for (d, &c) in profile.iter().enumerate() {
        if c > 0 {
            s.add_weighted(d as f64 * lz - lc, c as f64 * (d as f64 / z - dc));
        }
    }
    Ok(MartingaleValue::from_sum(Kind::DBst, Index::Size(n), p, &s))
}

pub fn d_bst(shape: &BinaryTreeShape, z: f64) -> Result<MartingaleValue> {
    d_bst_profile(&shape.profile(), shape.internal_count() as u64, z)
}

/// `Σ_u (|u|/z − 2t) z^{|u|} e^{t(1−2z)}`.
pub fn d_yule_profile(profile: &[u64], t: f64, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let (lz, shift) = (z.ln(), t * (1.0 - 2.0 * z));
    let mut s = SignedLogSum::new();
    for (d, &c) in profile.iter().enumerate() {
        if c > 0 {
            s.add_weighted(d as f64 * lz + shift, c as f64 * (d as f64 / z - 2.0 * t));
        }
    }
    Ok(MartingaleValue::from_sum(Kind::DYule, Index::Time(t), p, &s))
}

pub fn d_yule(path: &YulePath, t: f64, z: f64) -> Result<MartingaleValue> {
    d_yule_profile(&path.alive_profile(t)?, t, z)
}

/// `Σ_{|u|=g} (g/z − 2S^u) z^g e^{(1−2z)S^u}`.
pub fn d_gen_births(births: &[f64], g: u32, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let (gl, th, gz) = (g as f64 * z.ln(), 1.0 - 2.0 * z, g as f64 / z);
    let mut s = SignedLogSum::new();
    for &b in births {
        s.add_weighted(gl + th * b, gz - 2.0 * b);
    }
    Ok(MartingaleValue::from_sum(Kind::DGen, Index::Generation(g), p, &s))
}

pub fn d_gen(path: &YulePath, g: u8, z: f64) -> Result<MartingaleValue> {
    d_gen_births(&path.generation_births(g)?, u32::from(g), z)
}

/// `Σ_{|u|=g} (g/z + 2 Σ_v ln U^(v)) (∏_v U^(v))^{2z−1} z^g`.
pub fn d_bis(ratios: &SplitRatios, g: u8, z: f64) -> Result<MartingaleValue> {
    let p = param(z)?;
    let logs = log_products(ratios, g)?;
    let (gl, e, gz) = (f64::from(g) * z.ln(), 2.0 * z - 1.0, f64::from(g) / z);
    let mut s = SignedLogSum::new();
    for &l in &logs {
        s.add_weighted(gl + e * l, gz + 2.0 * l);
    }
    Ok(MartingaleValue::from_sum(
        Kind::DBis,
        Index::Generation(u32::from(g)),
        p,
        &s,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::additive::{m_bis, m_bst, m_gen_births, m_yule_profile};
    use super::*;
    use crate::bst::BstProcess;
    use crate::yule::{simulate_yule, Stop};

    fn central(f: impl Fn(f64) -> f64, z: f64) -> f64 {
        let h = 1e-6;
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    #[test]
    fn derivative_of_constant_trees() {
        let t1 = BinaryTreeShape::decode("100").unwrap();
        assert!(d_bst(&t1, 1.3).unwrap().value().abs() < 1e-14);
        let d = d_gen_births(&[0.5, 0.5], 1, 1.0).unwrap().value();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn finite_difference_agreement() {
        for seed in 0..25u64 {
            let z = 0.3 + 0.07 * seed as f64;
            let mut bst = BstProcess::new(seed);
            bst.grow_to(40 + seed as usize).unwrap();
            let shape = bst.shape();
            let a = d_bst(&shape, z).unwrap().value();
            let fd = central(|z| m_bst(&shape, z).unwrap().value(), z);
            assert!((a - fd).abs() <= 1e-6 * (1.0 + a.abs()), "bst {a} {fd}");

            let path = simulate_yule(seed, Stop::Time(3.0)).unwrap().extend(Stop::Generation(6)).unwrap();
            let prof = path.alive_profile(2.5).unwrap();
            let a = d_yule_profile(&prof, 2.5, z).unwrap().value();
            let fd = central(|z| m_yule_profile(&prof, 2.5, z).unwrap().value(), z);
            assert!((a - fd).abs() <= 1e-6 * (1.0 + a.abs()), "yule {a} {fd}");

            let births = path.generation_births(6).unwrap();
            let a = d_gen_births(&births, 6, z).unwrap().value();
            let fd = central(|z| m_gen_births(&births, 6, z).unwrap().value(), z);
            assert!((a - fd).abs() <= 1e-6 * (1.0 + a.abs()), "gen {a} {fd}");

            let r = SplitRatios::sample_uniform(seed, 6).unwrap();
            let a = d_bis(&r, 6, z).unwrap().value();
            let fd = central(|z| m_bis(&r, 6, z).unwrap().value(), z);
            assert!((a - fd).abs() <= 1e-6 * (1.0 + a.abs()), "bis {a} {fd}");
        }
    }
}
