//! Configuration-driven runs: simulations, solvers, verification suites and
//! summaries, each written to a fresh directory named by the config hash.

mod config;
mod report;
mod simulate;
mod solve;
mod suites;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use config::{
    Command, Equation, ExperimentConfig, GridSpec, Model, SolverOverrides, Spacing, StopRule, SuiteName,
    MAX_SIM_GENERATION, MAX_SIM_SIZE, MAX_SIM_TIME,
};
pub use suites::{run_suite, CriterionResult};

/// Files produced by a run, keyed by path relative to the run directory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub files: BTreeMap<String, Vec<u8>>,
    /// Failed acceptance criteria, by name.
    pub failures: Vec<String>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(name.into(), bytes.into());
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub failures: Vec<String>,
    pub wall_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical config; names the run directory.
pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(&config.canonical())?.as_bytes()))
}

pub fn run_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    let hash = config_hash(config)?;
    Ok(config.out_dir().join(format!("{}-{}", config.command.name(), &hash[..16])))
}

#[derive(Serialize)]
struct Manifest<'a> {
    package: &'static str,
    version: &'static str,
    command: &'static str,
    config: ExperimentConfig,
    config_hash: String,
    files: BTreeMap<&'a str, String>,
    failures: &'a [String],
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(f),
    }
}

/// Computes every output of a run in memory, manifest included.
/// The bytes depend only on the canonical config.
pub fn produce(config: &ExperimentConfig) -> Result<Artifacts> {
    config.validate()?;
    let mut art = match config.command {
        Command::Simulate => simulate::simulate(config)?,
        Command::Solve => solve::solve(config)?,
        Command::Verify => suites::verify(config)?,
        Command::Report => report::report(config)?,
    };
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        config: config.canonical(),
        config_hash: config_hash(config)?,
        files: art.files.iter().map(|(k, v)| (k.as_str(), sha256_hex(v))).collect(),
        failures: &art.failures,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    art.add("manifest.json", text);
    Ok(art)
}

/// Validates, computes and writes a run. Refuses to touch a non-empty directory.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = run_dir(config)?;
    if dir.exists() && std::fs::read_dir(&dir)?.next().is_some() {
        return Err(Error::config(
            "out",
            format!("{} already holds a run with this configuration; choose another --out", dir.display()),
        ));
    }
    let start = Instant::now();
    let art = with_pool(config.threads, || produce(config))?;
    for (name, bytes) in &art.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, bytes)?;
    }
    Ok(Outcome {
        dir,
        files: art.files.keys().cloned().collect(),
        failures: art.failures,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Seed of a named sub-experiment under a master seed.
pub(crate) fn sub_seed(master: u64, tag: &str) -> u64 {
    let mut k = crate::rng::mix64(master ^ 0x5EED);
    for b in tag.bytes() {
        k = crate::rng::mix64(k ^ u64::from(b));
    }
    k
}

/// `{:.17e}`, enough digits to round-trip.
pub(crate) fn fmt_value(v: f64) -> String {
    format!("{v:.17e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_placement() {
        let mut a = ExperimentConfig::new(Command::Verify);
        a.suite = Some(SuiteName::Mellin);
        let mut b = a.clone();
        b.out = Some("elsewhere".into());
        b.threads = Some(2);
        assert_eq!(run_dir(&a).unwrap().file_name(), run_dir(&b).unwrap().file_name());
        b.seed = 9;
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }

    #[test]
    fn refuses_to_overwrite() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(Command::Verify);
        c.suite = Some(SuiteName::Critical);
        c.out = Some(tmp.path().to_path_buf());
        let first = run(&c).unwrap();
        assert!(first.dir.join("manifest.json").is_file());
        assert!(first.failures.is_empty());
        assert!(matches!(run(&c), Err(Error::Config { field, .. }) if field == "out"));
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
