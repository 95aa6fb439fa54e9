//! Synthetic traces: alternating active/idle phases with exponential
//! lengths, or a gathering profile where each process reaches an assembly
//! point at a fixed time.
//!
//! Local timestamps are the true sample times; skew is applied at ingestion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::{Time, TraceHeader, TraceRecord};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{what} = {value} is not a positive multiple of the quantum {quantum}")]
    Quantization { what: &'static str, value: Time, quantum: Time },
    #[error("gathering profile needs {expected} assembly times, got {got}")]
    Assembly { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Generic,
    Gathering { assembly: Vec<Time> },
}

/// All durations are in raw units (milliseconds in the shipped examples).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub epsilon: Time,
    pub seed: u64,
    pub duration: Time,
    pub sample_period: Time,
    pub mean_active: Time,
    pub mean_idle: Time,
    pub quantum: Time,
    pub profile: Profile,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 2,
            epsilon: 10,
            seed: 0,
            duration: 60_000,
            sample_period: 1000,
            mean_active: 10_000,
            mean_idle: 5000,
            quantum: 1,
            profile: Profile::Generic,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::Config("n must be at least 1".into()));
        }
        if self.quantum == 0 {
            return Err(SimError::Config("quantum must be positive".into()));
        }
        let q = self.quantum;
        let positive = [
            ("sample_period", self.sample_period),
            ("mean_active", self.mean_active),
            ("mean_idle", self.mean_idle),
        ];
        for (what, value) in positive {
            if value == 0 || !value.is_multiple_of(q) {
                return Err(SimError::Quantization { what, value, quantum: q });
            }
        }
        for (what, value) in [("epsilon", self.epsilon), ("duration", self.duration)] {
            if !value.is_multiple_of(q) {
                return Err(SimError::Quantization { what, value, quantum: q });
            }
        }
        if let Profile::Gathering { assembly } = &self.profile {
            if assembly.len() != self.n {
                return Err(SimError::Assembly { expected: self.n, got: assembly.len() });
            }
            if let Some(&t) = assembly.iter().find(|&&t| !t.is_multiple_of(q)) {
                return Err(SimError::Quantization { what: "assembly", value: t, quantum: q });
            }
        }
        Ok(())
    }

    pub fn proc_name(k: usize) -> String {
        format!("P{}", k + 1)
    }

    fn rng(&self, k: usize) -> ChaCha8Rng {
        // one stream per process, so a process's trace does not depend on n
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase {
    pub start: Time,
    pub len: Time,
    pub active: bool,
}

fn sample_len(dist: &Exp<f64>, rng: &mut ChaCha8Rng, quantum: Time) -> Time {
    let x: f64 = dist.sample(rng);
    let q = (x / quantum as f64).round().max(1.0) as Time;
    q * quantum
}

/// Alternating phases of process `k`, covering at least `[0, until]`.
pub fn phase_schedule(cfg: &SimConfig, k: usize, until: Time) -> Vec<Phase> {
    let mut rng = cfg.rng(k);
    let active = Exp::new(1.0 / cfg.mean_active as f64).expect("positive mean");
    let idle = Exp::new(1.0 / cfg.mean_idle as f64).expect("positive mean");
    let mut is_active = rand::Rng::random_bool(&mut rng, 0.5);
    let mut start = 0;
    let mut phases = Vec::new();
    loop {
        let len = sample_len(if is_active { &active } else { &idle }, &mut rng, cfg.quantum);
        phases.push(Phase { start, len, active: is_active });
        start += len;
        if start > until {
            return phases;
        }
        is_active = !is_active;
    }
}

fn sample_times(cfg: &SimConfig) -> Vec<Time> {
    (0..=cfg.duration / cfg.sample_period).map(|i| i * cfg.sample_period).collect()
}

/// Records of process `k`, in index order.
pub fn process_records(cfg: &SimConfig, k: usize) -> Vec<TraceRecord> {
    let name = SimConfig::proc_name(k);
    let mut points: Vec<(Time, bool)> = match &cfg.profile {
        Profile::Generic => {
            let phases = phase_schedule(cfg, k, cfg.duration);
            let mut i = 0;
            sample_times(cfg)
                .into_iter()
                .map(|t| {
                    while phases[i].start + phases[i].len <= t {
                        i += 1;
                    }
                    (t, phases[i].active)
                })
                .collect()
        }
        Profile::Gathering { assembly } => {
            let at = assembly[k];
            let mut times = sample_times(cfg);
            // the arrival itself is an observed event
            if at <= cfg.duration && !times.contains(&at) {
                times.push(at);
                times.sort_unstable();
            }
            times.into_iter().map(|t| (t, t >= at)).collect()
        }
    };
    let atom = match cfg.profile {
        Profile::Generic => "active",
        Profile::Gathering { .. } => "at_assembly",
    };
    if cfg.duration == 0 {
        points.truncate(1);
    }
    points
        .into_iter()
        .enumerate()
        .map(|(i, (t, v))| TraceRecord::new(name.clone(), i, t as i64).with_atom(atom, v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    pub header: TraceHeader,
    /// All records ordered by timestamp, then process.
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn to_jsonl(&self) -> String {
        crate::trace::write_trace(&self.header, &self.records)
    }
}

pub fn generate_trace(cfg: &SimConfig) -> Result<SimTrace, SimError> {
    cfg.validate()?;
    let mut records: Vec<(usize, TraceRecord)> =
        (0..cfg.n).flat_map(|k| process_records(cfg, k).into_iter().map(move |r| (k, r))).collect();
    records.sort_by_key(|(k, r)| (r.ts, *k, r.index));
    Ok(SimTrace {
        header: TraceHeader {
            procs: (0..cfg.n).map(SimConfig::proc_name).collect(),
            epsilon: Some(cfg.epsilon),
            unit: Some(cfg.quantum),
        },
        records: records.into_iter().map(|(_, r)| r).collect(),
    })
}
