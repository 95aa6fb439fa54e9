//! Brute-force reference semantics for small instances.
//!
//! Works on the lattice directly: enumerates every location path from the
//! initial CGS to an active-surface CGS and every integer jump-time vector
//! allowed by guards and invariants, appends the all-φ and none-φ suffixes,
//! and evaluates the timed modality on the resulting occupancy. Nothing here
//! goes through the automaton or the CTL checker.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{CgsId, LatticeStore};
use crate::logic::{ClockOp, Expr, Formula, LabelSet, Modality, PredId, Quantifier, Verdict3};
use crate::trace::Time;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle scope exceeded: {what} is {value}, cap is {cap}")]
    Scope { what: &'static str, value: u64, cap: u64 },
    #[error("no initial global state yet")]
    NotReady,
    #[error("horizon {given} is below the required {required}")]
    Horizon { given: Time, required: Time },
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub max_cgs: usize,
    pub max_horizon: Time,
    /// Upper bound on explored path prefixes.
    pub max_prefixes: u64,
    /// Visits successors in a seeded random order instead of id order.
    pub shuffle: Option<u64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_cgs: 64, max_horizon: 64, max_prefixes: 5_000_000, shuffle: None }
    }
}

fn holds(phi: &Expr<PredId>, labels: &LabelSet, t: Time) -> bool {
    match phi {
        Expr::True => true,
        Expr::False => false,
        Expr::Leaf(p) => labels.contains(*p),
        Expr::Clock(c) => match c.op {
            ClockOp::Lt => t < c.bound,
            ClockOp::Le => t <= c.bound,
            ClockOp::Gt => t > c.bound,
            ClockOp::Ge => t >= c.bound,
        },
        Expr::Not(e) => !holds(e, labels, t),
        Expr::And(a, b) => holds(a, labels, t) && holds(b, labels, t),
        Expr::Or(a, b) => holds(a, labels, t) || holds(b, labels, t),
        Expr::Implies(a, b) => !holds(a, labels, t) || holds(b, labels, t),
        Expr::Observed(e) => holds(e, labels, t),
    }
}

struct Instance<'a> {
    store: &'a LatticeStore,
    f: &'a Formula<PredId>,
    horizon: Time,
    /// Earliest time the run may leave each accepting CGS for the suffix.
    suffix_entry: Vec<Option<Time>>,
    order: Vec<Vec<CgsId>>,
    prefixes: u64,
    max_prefixes: u64,
    /// Achieved `(σ⊤ satisfies, σ⊥ satisfies)` pairs.
    outcomes: BTreeSet<(bool, bool)>,
}

impl Instance<'_> {
    fn eventually(&self) -> bool {
        self.f.modality == Modality::Eventually
    }

    /// Modality restricted to the occupancy `[from, to]` of CGS `c`.
    fn local(&self, c: CgsId, from: Time, to: Time) -> bool {
        let (lo, hi) = (from.max(self.f.window.lo), to.min(self.f.window.hi));
        let labels = &self.store.cgs(c).labels;
        if self.eventually() {
            (lo..=hi).any(|j| holds(&self.f.phi, labels, j))
        } else {
            (lo..=hi).all(|j| holds(&self.f.phi, labels, j))
        }
    }

    fn fold(&self, acc: bool, x: bool) -> bool {
        if self.eventually() {
            acc || x
        } else {
            acc && x
        }
    }

    /// Records the outcome of ending the observed part at `c` at time `d`.
    fn finish(&mut self, c: CgsId, entered: Time, acc: bool, d: Time) {
        let prefix = self.fold(acc, self.local(c, entered, d));
        // the suffix is occupied on [d, ∞)
        let suffix_meets_window = d <= self.f.window.hi;
        let pair = if self.eventually() {
            (prefix || suffix_meets_window, prefix)
        } else {
            (prefix, prefix && !suffix_meets_window)
        };
        self.outcomes.insert(pair);
    }

    fn explore(&mut self, c: CgsId, states: BTreeSet<(Time, bool)>) -> Result<(), OracleError> {
        self.prefixes += 1;
        if self.prefixes > self.max_prefixes {
            return Err(OracleError::Scope { what: "path prefixes", value: self.prefixes, cap: self.max_prefixes });
        }
        let inv = self.store.cgs(c).possible.hi.min(self.horizon);
        if let Some(entry) = self.suffix_entry[c] {
            for &(t, acc) in &states {
                for d in t.max(entry)..=inv {
                    self.finish(c, t, acc, d);
                }
            }
        }
        for next in self.order[c].clone() {
            let n = self.store.cgs(next);
            let upper = inv.min(n.possible.hi);
            let mut reached = BTreeSet::new();
            for &(t, acc) in &states {
                for t2 in t.max(n.possible.lo)..=upper {
                    reached.insert((t2, self.fold(acc, self.local(c, t, t2))));
                }
            }
            if !reached.is_empty() {
                self.explore(next, reached)?;
            }
        }
        Ok(())
    }
}

/// Earliest suffix time from accepting `c`: the smallest, over dimensions at
/// the frontier, of `max(I_pos(C).lo, I_def(C[i]).hi)`, and no earlier than
/// `I_def(C).hi` when that interval is non-empty.
fn suffix_entry(store: &LatticeStore, c: CgsId, gmax: &[usize]) -> Option<Time> {
    let cgs = store.cgs(c);
    let states = store.constituents(&cgs.coords);
    let guard = (0..gmax.len())
        .filter(|&k| cgs.coords[k] == gmax[k])
        .map(|k| cgs.possible.lo.max(states[k].he.interval.lo))
        .min()?;
    if cgs.definite.lo <= cgs.definite.hi {
        Some(guard.max(cgs.definite.hi))
    } else {
        Some(guard)
    }
}

/// Smallest horizon the oracle accepts for `f` on `store`.
pub fn oracle_horizon(store: &LatticeStore, f: &Formula<PredId>) -> Time {
    let mut m = f.window.hi;
    for c in store.all() {
        m = m.max(c.possible.hi);
    }
    for b in f.phi.clock_bounds() {
        m = m.max(b);
    }
    1 + m
}

pub fn oracle_check(store: &LatticeStore, f: &Formula<PredId>, horizon: Time) -> Result<Verdict3, OracleError> {
    oracle_check_with(store, f, horizon, &OracleOptions::default())
}

pub fn oracle_check_with(
    store: &LatticeStore,
    f: &Formula<PredId>,
    horizon: Time,
    opts: &OracleOptions,
) -> Result<Verdict3, OracleError> {
    let c0 = store.initial().ok_or(OracleError::NotReady)?;
    let gmax = store.gmax().ok_or(OracleError::NotReady)?;
    if store.len() > opts.max_cgs {
        return Err(OracleError::Scope { what: "global states", value: store.len() as u64, cap: opts.max_cgs as u64 });
    }
    if horizon > opts.max_horizon {
        return Err(OracleError::Scope { what: "horizon", value: horizon, cap: opts.max_horizon });
    }
    let required = oracle_horizon(store, f);
    if horizon < required {
        return Err(OracleError::Horizon { given: horizon, required });
    }
    let surface: BTreeSet<CgsId> = (0..store.len())
        .filter(|&c| store.cgs(c).coords.iter().zip(&gmax).any(|(a, b)| a == b))
        .collect();
    let suffix_entry =
        (0..store.len()).map(|c| if surface.contains(&c) { suffix_entry(store, c, &gmax) } else { None }).collect();
    let mut order: Vec<Vec<CgsId>> = (0..store.len()).map(|c| store.successors(c).to_vec()).collect();
    if let Some(seed) = opts.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for o in &mut order {
            o.shuffle(&mut rng);
        }
    }
    let mut inst = Instance {
        store,
        f,
        horizon,
        suffix_entry,
        order,
        prefixes: 0,
        max_prefixes: opts.max_prefixes,
        outcomes: BTreeSet::new(),
    };
    inst.explore(c0, BTreeSet::from([(0, f.modality == Modality::Always)]))?;
    let per_path: Vec<Verdict3> = inst
        .outcomes
        .iter()
        .map(|&p| match p {
            (true, true) => Verdict3::Top,
            (false, false) => Verdict3::Bot,
            _ => Verdict3::Unknown,
        })
        .collect();
    Ok(match f.quantifier {
        Quantifier::Exists => {
            if per_path.contains(&Verdict3::Top) {
                Verdict3::Top
            } else if per_path.iter().all(|v| *v == Verdict3::Bot) {
                Verdict3::Bot
            } else {
                Verdict3::Unknown
            }
        }
        Quantifier::Forall => {
            if per_path.iter().all(|v| *v == Verdict3::Top) {
                Verdict3::Top
            } else if per_path.contains(&Verdict3::Bot) {
                Verdict3::Bot
            } else {
                Verdict3::Unknown
            }
        }
    })
}
