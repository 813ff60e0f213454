//! `simulate`: martingale trajectories as `path_id,index,kind,z,value` rows.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Model, StopRule};
use super::{fmt_value, Artifacts};
use crate::bst::BstProcess;
use crate::error::Result;
use crate::martingale::{
    d_bis, d_bst_profile, d_gen, d_yule, m_bis, m_bst_profile, m_gen, m_yule, Kind, MartingaleValue,
};
use crate::ratios::SplitRatios;
use crate::rng::path_seed;
use crate::yule::{simulate_yule, Stop};

pub const TRAJECTORY_HEADER: &str = "path_id,index,kind,z,value\n";

pub(super) fn simulate(c: &ExperimentConfig) -> Result<Artifacts> {
    let model = c.model.unwrap_or(Model::Yule);
    let stop = c.stop_rule()?;
    let z = c.z.unwrap_or(1.0);
    let steps = c.steps.unwrap_or(100);
    let paths = c.paths.unwrap_or(1);
    let chunks: Vec<String> = (0..paths)
        .into_par_iter()
        .map(|i| trajectory(model, stop, z, steps, path_seed(c.seed, i as u64), i))
        .collect::<Result<_>>()?;
    let mut csv = String::from(TRAJECTORY_HEADER);
    for chunk in chunks {
        csv.push_str(&chunk);
    }
    let mut art = Artifacts::default();
    art.add("trajectories.csv", csv);
    Ok(art)
}

/// `0, …, n` thinned to at most `steps + 1` evenly spaced values.
fn checkpoints(n: u64, steps: usize) -> Vec<u64> {
    let steps = steps as u64;
    let mut v: Vec<u64> = (0..=steps.min(n))
        .map(|j| ((n as u128 * j as u128 + (steps.min(n) as u128) / 2) / steps.min(n) as u128) as u64)
        .collect();
    v.dedup();
    v
}

fn row(out: &mut String, path: usize, index: impl std::fmt::Display, kind: Kind, z: f64, v: &MartingaleValue) {
    let _ = writeln!(out, "{path},{index},{kind},{z},{}", fmt_value(v.value()));
}

fn trajectory(model: Model, stop: StopRule, z: f64, steps: usize, seed: u64, id: usize) -> Result<String> {
    let mut out = String::new();
    match (model, stop) {
        (Model::Yule, StopRule::Time(t_end)) => {
            let path = simulate_yule(seed, Stop::Time(t_end))?;
            for k in 0..=steps {
                let t = t_end * k as f64 / steps as f64;
                row(&mut out, id, t, Kind::Yule, z, &m_yule(&path, t, z)?);
                row(&mut out, id, t, Kind::DYule, z, &d_yule(&path, t, z)?);
            }
        }
        (Model::Yule, StopRule::Leaves(n)) => {
            let path = simulate_yule(seed, Stop::LeafCount(n))?;
            for k in checkpoints(n, steps) {
                let tau = path.jump_time(k as usize)?;
                row(&mut out, id, k, Kind::Yule, z, &m_yule(&path, tau, z)?);
                let profile = path.shape_at_jump(k as usize)?.profile();
                row(&mut out, id, k, Kind::Bst, z, &m_bst_profile(&profile, k, z)?);
            }
        }
        (Model::Yule, StopRule::Generation(g)) => {
            let path = simulate_yule(seed, Stop::Generation(g))?;
            for h in 0..=g {
                row(&mut out, id, h, Kind::Gen, z, &m_gen(&path, h, z)?);
                row(&mut out, id, h, Kind::DGen, z, &d_gen(&path, h, z)?);
            }
        }
        (Model::Bst, StopRule::Size(n)) => {
            let mut p = BstProcess::new(seed);
            for k in checkpoints(n, steps) {
                p.grow_to(k as usize)?;
                row(&mut out, id, k, Kind::Bst, z, &m_bst_profile(p.profile(), k, z)?);
                row(&mut out, id, k, Kind::DBst, z, &d_bst_profile(p.profile(), k, z)?);
            }
        }
        (Model::Bisection, StopRule::Generation(g)) => {
            let ratios = SplitRatios::sample_uniform(seed, g)?;
            for h in 0..=g {
                row(&mut out, id, h, Kind::Bis, z, &m_bis(&ratios, h, z)?);
                row(&mut out, id, h, Kind::DBis, z, &d_bis(&ratios, h, z)?);
            }
        }
        _ => unreachable!("stop rules are validated against the model"),
    }
    Ok(out)
}
