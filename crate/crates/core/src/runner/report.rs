//! `report`: integrity check and tabular summary of an earlier run directory.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::{fmt_value, sha256_hex, Artifacts};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::stats::{TestReport, Verdict};

#[derive(Serialize)]
struct Overview {
    source_command: String,
    source_config_hash: String,
    files_checked: usize,
    files_mismatched: Vec<String>,
    reports: usize,
    passed: usize,
    failed: usize,
    informational: usize,
    failing: Vec<String>,
    source_failures: Vec<String>,
}

pub(super) fn report(c: &ExperimentConfig) -> Result<Artifacts> {
    let dir = c.input.as_ref().expect("validated");
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json"))?)
        .map_err(|e| Error::Format(format!("manifest.json: {e}")))?;
    let files = manifest["files"]
        .as_object()
        .ok_or_else(|| Error::Format("manifest.json has no file table".into()))?;
    let mut art = Artifacts::default();
    let mut mismatched = Vec::new();
    let mut table = String::from("file,suite,kind,statistic,p_value,verdict\n");
    let (mut passed, mut failed, mut info, mut reports) = (0, 0, 0, 0);
    let mut failing = Vec::new();
    for (name, hash) in files {
        let bytes = std::fs::read(dir.join(name)).unwrap_or_default();
        if Some(sha256_hex(&bytes).as_str()) != hash.as_str() {
            mismatched.push(name.clone());
            continue;
        }
        if name.starts_with("reports/") && name.ends_with(".json") {
            let r: TestReport =
                serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("{name}: {e}")))?;
            reports += 1;
            match r.verdict {
                Verdict::Pass => passed += 1,
                Verdict::Fail => {
                    failed += 1;
                    failing.push(r.suite.clone());
                }
                Verdict::Informational => info += 1,
            }
            let _ = writeln!(table, "{name},{}", r.csv_row());
        }
        if name == "trajectories.csv" {
            art.add("trajectory_means.csv", trajectory_means(&String::from_utf8_lossy(&bytes))?);
        }
    }
    if reports > 0 {
        art.add("reports.csv", table);
    }
    let strings = |v: &serde_json::Value| -> Vec<String> {
        v.as_array()
            .map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect())
            .unwrap_or_default()
    };
    let overview = Overview {
        source_command: manifest["command"].as_str().unwrap_or_default().to_string(),
        source_config_hash: manifest["config_hash"].as_str().unwrap_or_default().to_string(),
        files_checked: files.len(),
        files_mismatched: mismatched.clone(),
        reports,
        passed,
        failed,
        informational: info,
        failing,
        source_failures: strings(&manifest["failures"]),
    };
    art.add("overview.json", serde_json::to_string_pretty(&overview)? + "\n");
    if !mismatched.is_empty() {
        art.failures.push(format!("input integrity: {}", mismatched.join(", ")));
    }
    Ok(art)
}

/// Mean and standard error across paths for every `(kind, z, index)`.
fn trajectory_means(csv: &str) -> Result<String> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut acc: HashMap<(String, String, String), (NeumaierSum, NeumaierSum, u64)> = HashMap::new();
    for (i, line) in csv.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Format(format!("trajectories.csv line {}: expected 5 fields", i + 1)));
        }
        let v: f64 = f[4]
            .parse()
            .map_err(|_| Error::Format(format!("trajectories.csv line {}: bad value", i + 1)))?;
        let key = (f[2].to_string(), f[3].to_string(), f[1].to_string());
        let e = acc.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (NeumaierSum::new(), NeumaierSum::new(), 0)
        });
        e.0.add(v);
        e.1.add(v * v);
        e.2 += 1;
    }
    let mut out = String::from("kind,z,index,paths,mean,se\n");
    for key in order {
        let (s, s2, n) = &acc[&key];
        let m = s.value() / *n as f64;
        let se = if *n > 1 {
            ((s2.value() - *n as f64 * m * m).max(0.0) / (*n as f64 - 1.0) / *n as f64).sqrt()
        } else {
            f64::NAN
        };
        let _ = writeln!(out, "{},{},{},{n},{},{}", key.0, key.1, key.2, fmt_value(m), fmt_value(se));
    }
    Ok(out)
}
