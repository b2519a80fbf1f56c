//! Append-only JSON-lines cache of converged sweep points.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bcs_gap::asymptotics::SweepRecord;
use bcs_gap::sweep::SweepConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_FILE: &str = "cache.jsonl";

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    records: Vec<SweepRecord>,
}

/// Content hash of everything that determines the records at one `μ`.
pub fn point_key(potential: &str, mu: f64, cfg: &SweepConfig) -> String {
    let settings = serde_json::to_string(cfg).expect("sweep settings serialize");
    let mut h = Sha256::new();
    h.update(format!(
        "v{}|{potential}|{mu:e}|{settings}",
        bcs_gap::asymptotics::CSV_SCHEMA_VERSION
    ));
    hex::encode(h.finalize())
}

pub struct Cache {
    path: PathBuf,
    entries: HashMap<String, Vec<SweepRecord>>,
}

impl Cache {
    /// Loads `dir/cache.jsonl`; unreadable lines are skipped with a warning.
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            let file = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line?;
                match serde_json::from_str::<Entry>(&line) {
                    Ok(e) => {
                        entries.insert(e.key, e.records);
                    }
                    Err(err) => log::warn!("{} line {}: skipped ({err})", path.display(), i + 1),
                }
            }
        }
        Ok(Self { path, entries })
    }

    pub fn get(&self, key: &str) -> Option<&Vec<SweepRecord>> {
        self.entries.get(key)
    }

    /// Stores fully converged rows only; rows with non-finite values are not
    /// representable in JSON.
    pub fn insert(&mut self, key: String, records: &[SweepRecord]) -> Result<()> {
        if records.is_empty() || !records.iter().all(cacheable) {
            return Ok(());
        }
        let line = serde_json::to_string(&Entry {
            key: key.clone(),
            records: records.to_vec(),
        })?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("cannot open {}", self.path.display()))?;
        writeln!(f, "{line}")?;
        self.entries.insert(key, records.to_vec());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

fn cacheable(r: &SweepRecord) -> bool {
    r.is_ok()
        && [
            r.mu,
            r.g,
            r.kappa,
            r.e_mu,
            r.b_mu_kappa,
            r.b_mu_zero,
            r.b_mu_zero_effective,
            r.xi,
            r.delta_fermi,
            r.t_c,
            r.m_mu,
            r.thm1_functional,
            r.tc_prediction,
            r.xi_prediction,
            r.ratio,
        ]
        .iter()
        .all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(xi: f64) -> SweepRecord {
        let mut r = SweepRecord::failed(100.0, 30.0, 1.0, "ok");
        for x in [
            &mut r.e_mu,
            &mut r.b_mu_kappa,
            &mut r.b_mu_zero,
            &mut r.b_mu_zero_effective,
            &mut r.delta_fermi,
            &mut r.t_c,
            &mut r.m_mu,
            &mut r.thm1_functional,
            &mut r.tc_prediction,
            &mut r.xi_prediction,
            &mut r.ratio,
        ] {
            *x = 0.1 + 0.2;
        }
        r.xi = xi;
        r
    }

    #[test]
    fn round_trips_exactly_and_skips_failures() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = Cache::open(dir.path()).unwrap();
        let good = record(1.0 / 3.0);
        c.insert("a".into(), &[good.clone()]).unwrap();
        c.insert("b".into(), &[record(f64::NAN)]).unwrap();
        let reopened = Cache::open(dir.path()).unwrap();
        assert_eq!(reopened.len(), 1);
        assert_eq!(reopened.get("a").unwrap()[0], good);
    }

    #[test]
    fn key_depends_on_every_input() {
        let cfg = SweepConfig::default();
        let k = point_key("gaussian", 100.0, &cfg);
        assert_eq!(k, point_key("gaussian", 100.0, &cfg));
        assert_ne!(k, point_key("gaussian", 200.0, &cfg));
        assert_ne!(k, point_key("yukawa", 100.0, &cfg));
        let mut other = cfg.clone();
        other.gap.tol = 1e-9;
        assert_ne!(k, point_key("gaussian", 100.0, &other));
    }
}
