//! Run configuration with a key=value text format.

use kacgap::intervals::IntervalSet;
use kacgap::sampling::parse_law;
use kacgap::Error;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Law spec: `gaussian | rademacher | uniform3 | uniform:<half-width>`.
    pub law: String,
    pub degrees: Vec<u32>,
    /// Trials per degree.
    pub trials: u64,
    pub seed: u64,
    pub k: f64,
    /// Interval sets keyed by id; ids are unique by construction.
    pub u_sets: BTreeMap<String, IntervalSet>,
    pub beta: f64,
    /// Smoothness level exponent: `A = n^smooth_exp`.
    pub smooth_exp: f64,
    pub residual_tol: f64,
    pub max_iters: u32,
    pub polish: bool,
    /// Disk radius for the in-disk separation probe.
    pub r0: f64,
    /// Retention cutoff for scaled pair gaps.
    pub gap_cutoff: f64,
    /// 0 means one worker per available core.
    pub threads: usize,
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut u_sets = BTreeMap::new();
        u_sets.insert("U1".to_string(), IntervalSet::interval(0.0, 1.0).unwrap());
        u_sets.insert("U2".to_string(), IntervalSet::interval(0.0, 2.0).unwrap());
        RunConfig {
            law: "gaussian".to_string(),
            degrees: vec![1000],
            trials: 100,
            seed: 1,
            k: 10.0,
            u_sets,
            beta: 0.05,
            smooth_exp: 0.15,
            residual_tol: 1e-10,
            max_iters: 200,
            polish: true,
            r0: 0.8,
            gap_cutoff: 100.0,
            threads: 0,
            out: "results.jsonl".to_string(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        parse_law(&self.law)?;
        if self.degrees.is_empty() || self.degrees.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("degrees must all be >= 2".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.r0.is_nan() || self.r0 <= 0.0 || self.r0 >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "r0 = {} not in (0,1)",
                self.r0
            )));
        }
        Ok(())
    }

    /// Canonical key=value serialization; [`RunConfig::parse`] inverts it.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "law = {}", self.law);
        let degrees: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "degrees = {}", degrees.join(","));
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "k = {}", self.k);
        for (id, u) in &self.u_sets {
            let _ = writeln!(s, "u.{id} = {}", u.to_text());
        }
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "smooth_exp = {}", self.smooth_exp);
        let _ = writeln!(s, "residual_tol = {}", self.residual_tol);
        let _ = writeln!(s, "max_iters = {}", self.max_iters);
        let _ = writeln!(s, "polish = {}", self.polish);
        let _ = writeln!(s, "r0 = {}", self.r0);
        let _ = writeln!(s, "gap_cutoff = {}", self.gap_cutoff);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "out = {}", self.out);
        s
    }

    /// Parses the key=value format. Unknown keys are rejected; `#` starts
    /// a comment line.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut cfg = RunConfig {
            u_sets: BTreeMap::new(),
            ..RunConfig::default()
        };
        let bad = |k: &str, v: &str| Error::InvalidArgument(format!("bad value for {k}: {v}"));
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key = value: {line}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "law" => cfg.law = value.to_string(),
                "degrees" => {
                    cfg.degrees = value
                        .split(',')
                        .map(|d| d.trim().parse().map_err(|_| bad("degrees", value)))
                        .collect::<Result<_, _>>()?;
                }
                "trials" => cfg.trials = value.parse().map_err(|_| bad(key, value))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(key, value))?,
                "k" => cfg.k = value.parse().map_err(|_| bad(key, value))?,
                "beta" => cfg.beta = value.parse().map_err(|_| bad(key, value))?,
                "smooth_exp" => cfg.smooth_exp = value.parse().map_err(|_| bad(key, value))?,
                "residual_tol" => cfg.residual_tol = value.parse().map_err(|_| bad(key, value))?,
                "max_iters" => cfg.max_iters = value.parse().map_err(|_| bad(key, value))?,
                "polish" => {
                    cfg.polish = match value {
                        "true" | "on" => true,
                        "false" | "off" => false,
                        _ => return Err(bad(key, value)),
                    }
                }
                "r0" => cfg.r0 = value.parse().map_err(|_| bad(key, value))?,
                "gap_cutoff" => cfg.gap_cutoff = value.parse().map_err(|_| bad(key, value))?,
                "threads" => cfg.threads = value.parse().map_err(|_| bad(key, value))?,
                "out" => cfg.out = value.to_string(),
                _ => {
                    if let Some(id) = key.strip_prefix("u.") {
                        if cfg
                            .u_sets
                            .insert(id.to_string(), IntervalSet::parse(value)?)
                            .is_some()
                        {
                            return Err(Error::InvalidArgument(format!(
                                "duplicate interval set id {id}"
                            )));
                        }
                    } else {
                        return Err(Error::InvalidArgument(format!("unknown key {key}")));
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical form for stamping: execution-only fields (thread count,
    /// output path) are normalized away so the same statistical run is
    /// byte-identical no matter how it was scheduled or where it landed.
    pub fn canonical_kv(&self) -> String {
        RunConfig {
            threads: 0,
            out: String::new(),
            ..self.clone()
        }
        .to_kv()
    }

    /// FNV-1a hash of the canonical text, for version stamping.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical_kv().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    /// Parses the CLI `id=a:b[,c:d];id2=...` interval-set list.
    pub fn parse_u_sets(text: &str) -> Result<BTreeMap<String, IntervalSet>, Error> {
        let mut out = BTreeMap::new();
        for item in text.split(';') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (id, spec) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected id=a:b[,c:d] in {item}"))
            })?;
            if out
                .insert(id.trim().to_string(), IntervalSet::parse(spec)?)
                .is_some()
            {
                return Err(Error::InvalidArgument(format!("duplicate id {id}")));
            }
        }
        Ok(out)
    }
}
