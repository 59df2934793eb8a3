//! The seeded parallel simulation harness: one `GapRecord` per
//! `(degree, trial)`, written as JSONL behind a header line, byte-identical
//! across thread counts and resumable after interruption.

use crate::config::RunConfig;
use kacgap::gaps::{count_x_n, disk_min_gap, min_gap, pair_gaps, GapRecord};
use kacgap::rootfinder::{find_roots, SolverOptions};
use kacgap::sampling::{parse_law, sample_polynomial, trial_seed};
use kacgap::Error;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Header {
    pub kind: String,
    pub version: String,
    pub config_hash: String,
    pub config: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub records: usize,
    pub reused: usize,
    pub degraded: usize,
    pub config_hash: String,
}

fn make_record(
    cfg: &RunConfig,
    degree: u32,
    trial: u64,
    task_index: u64,
) -> Result<GapRecord, Error> {
    let law = parse_law(&cfg.law)?;
    let seed = trial_seed(cfg.seed, task_index);
    let poly = sample_polynomial(law, degree, seed)?;
    let opts = SolverOptions {
        residual_tol: cfg.residual_tol,
        max_iters: cfg.max_iters,
        polish: cfg.polish,
    };
    let rs = find_roots(&poly, opts)?;
    let mut x_counts = BTreeMap::new();
    for (id, u) in &cfg.u_sets {
        x_counts.insert(id.clone(), count_x_n(&rs, cfg.k, u, degree));
    }
    Ok(GapRecord {
        trial,
        seed,
        n: degree,
        law: law.tag(),
        m_n_scaled: min_gap(&rs, degree),
        gaps: pair_gaps(&rs, degree, cfg.k, cfg.gap_cutoff),
        x_counts,
        disk_min_gap: disk_min_gap(&rs, cfg.r0),
        max_residual: rs.max_residual(),
    })
}

/// All `(degree, trial)` tasks in output order, with the task index that
/// seeds the trial stream (stable under resume and any scheduling).
fn task_list(cfg: &RunConfig) -> Vec<(u32, u64, u64)> {
    let mut tasks = Vec::new();
    for (di, &degree) in cfg.degrees.iter().enumerate() {
        for trial in 0..cfg.trials {
            let task_index = di as u64 * cfg.trials + trial;
            tasks.push((degree, trial, task_index));
        }
    }
    tasks
}

/// Runs the simulation, writing a header line plus one record per task
/// sorted by (degree, trial). With `resume`, records already present in a
/// compatible output file are reused and only missing tasks are computed.
/// The final file is byte-identical either way.
pub fn run_simulate(
    cfg: &RunConfig,
    resume: bool,
) -> Result<RunSummary, Box<dyn std::error::Error>> {
    cfg.validate()?;
    let path = Path::new(&cfg.out);
    let header = Header {
        kind: "header".to_string(),
        version: crate::VERSION.to_string(),
        config_hash: cfg.hash(),
        config: cfg.canonical_kv(),
    };

    let mut existing: BTreeMap<(u32, u64), GapRecord> = BTreeMap::new();
    if resume && path.exists() {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        match lines.next().map(serde_json::from_str::<Header>) {
            Some(Ok(h)) if h.config_hash == header.config_hash => {
                for line in lines {
                    // A truncated tail line parses as an error; skip it.
                    if let Ok(rec) = serde_json::from_str::<GapRecord>(line) {
                        existing.insert((rec.n, rec.trial), rec);
                    }
                }
            }
            Some(Ok(h)) => {
                return Err(Box::new(Error::InvalidArgument(format!(
                    "resume config hash mismatch: file {} vs config {}",
                    h.config_hash, header.config_hash
                ))));
            }
            _ => {}
        }
    }

    let tasks = task_list(cfg);
    let reused = tasks
        .iter()
        .filter(|(d, t, _)| existing.contains_key(&(*d, *t)))
        .count();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()?;
    let computed: Vec<((u32, u64), GapRecord)> = pool.install(|| {
        use rayon::prelude::*;
        tasks
            .par_iter()
            .filter(|(d, t, _)| !existing.contains_key(&(*d, *t)))
            .map(|&(degree, trial, task_index)| {
                make_record(cfg, degree, trial, task_index).map(|r| ((degree, trial), r))
            })
            .collect::<Result<_, Error>>()
    })?;
    existing.extend(computed);

    let mut out = String::new();
    out.push_str(&serde_json::to_string(&header)?);
    out.push('\n');
    let mut degraded = 0;
    for (degree, trial, _) in &tasks {
        let rec = &existing[&(*degree, *trial)];
        if rec.max_residual > cfg.residual_tol {
            degraded += 1;
        }
        out.push_str(&serde_json::to_string(rec)?);
        out.push('\n');
    }

    // Atomic replace so an interrupted write never corrupts a resumable file.
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(out.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;

    Ok(RunSummary {
        records: tasks.len(),
        reused,
        degraded,
        config_hash: header.config_hash,
    })
}

/// Reads the records of a results file (header skipped), verifying the
/// header parses.
pub fn read_records(path: &Path) -> Result<(Header, Vec<GapRecord>), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Header = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty results file".into()))?,
    )?;
    let records = lines
        .map(serde_json::from_str::<GapRecord>)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header, records))
}
