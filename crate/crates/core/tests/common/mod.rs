//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewmon::lattice::{LatticeStore, Predicates};
use skewmon::logic::{parse_formula, Formula, PredId};
use skewmon::trace::{ProcessStream, Quantum, TraceRecord};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-process records with increasing timestamps and random `a`/`b` atoms.
pub fn random_records(rng: &mut SeededRng, n: usize, max_states: usize, max_step: i64) -> Vec<Vec<TraceRecord>> {
    (0..n)
        .map(|k| {
            let events = rng.random_range(2..=max_states + 1);
            let mut ts = rng.random_range(0..=2);
            (0..events)
                .map(|i| {
                    if i > 0 {
                        ts += rng.random_range(1..=max_step);
                    }
                    TraceRecord::new(format!("P{}", k + 1), i, ts)
                        .with_atom("a", rng.random_bool(0.5))
                        .with_atom("b", rng.random_bool(0.3))
                })
                .collect()
        })
        .collect()
}

/// A random state predicate over the processes' atoms and the clock.
pub fn random_phi(rng: &mut SeededRng, n: usize, depth: u32, max_const: u64) -> String {
    let roll = rng.random_range(0..10);
    if depth == 0 || roll < 4 {
        return if rng.random_range(0..5) == 0 {
            let op = ["<", "<=", ">", ">="][rng.random_range(0..4)];
            format!("T{op}{}", rng.random_range(0..=max_const))
        } else {
            format!("P{}.{}", rng.random_range(1..=n), if rng.random_bool(0.7) { "a" } else { "b" })
        };
    }
    let a = random_phi(rng, n, depth - 1, max_const);
    match roll {
        4 | 5 => format!("!({a})"),
        _ => {
            let b = random_phi(rng, n, depth - 1, max_const);
            let op = ["&&", "||", "->", "&&"][rng.random_range(0..4)];
            format!("({a}) {op} ({b})")
        }
    }
}

pub fn random_window(rng: &mut SeededRng, max: u64) -> (u64, u64) {
    let lo = rng.random_range(0..=max);
    let hi = rng.random_range(lo..=max);
    (lo, hi)
}

pub const MODALITIES: [&str; 4] = ["A<>", "E<>", "A[]", "E[]"];

pub fn procs(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("P{k}")).collect()
}

pub fn resolve(text: &str, preds: &mut Predicates, procs: &[String]) -> Formula<PredId> {
    parse_formula(text)
        .unwrap_or_else(|e| panic!("{text}: {e}"))
        .try_map_leaves(&mut |n: &String| preds.resolve(n, procs))
        .unwrap()
}

/// Feeds every record (round-robin by index) into a fresh store. `None` when
/// the first global state is inconsistent.
pub fn build_store(records: &[Vec<TraceRecord>], eps: u64, preds: Predicates) -> Option<LatticeStore> {
    let n = records.len();
    let mut store = LatticeStore::new(procs(n), preds);
    let mut streams: Vec<ProcessStream> =
        (0..n).map(|k| ProcessStream::new(k, format!("P{}", k + 1), eps, Quantum::default())).collect();
    let longest = records.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..longest {
        for (k, r) in records.iter().enumerate() {
            if let Some(rec) = r.get(i) {
                if let Some(state) = streams[k].ingest_record(rec).unwrap() {
                    streams[k].pop_state();
                    store.advance(state).ok()?;
                }
            }
        }
    }
    Some(store)
}

/// A random interleaving of per-process records that keeps each process in
/// order.
pub fn interleave(rng: &mut SeededRng, records: &[Vec<TraceRecord>]) -> Vec<TraceRecord> {
    let mut next = vec![0; records.len()];
    let mut out = Vec::new();
    loop {
        let open: Vec<usize> = (0..records.len()).filter(|&k| next[k] < records[k].len()).collect();
        if open.is_empty() {
            return out;
        }
        let k = open[rng.random_range(0..open.len())];
        out.push(records[k][next[k]].clone());
        next[k] += 1;
    }
}
