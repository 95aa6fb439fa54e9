//! The lattice of consistent global states (CGSs) of an observed trace.
//!
//! States arrive one at a time per process. Once every process has closed its
//! first state the initial CGS exists, and each later state grows the lattice
//! from its active surface: the CGSs that still touch the latest observed
//! state of some process.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::logic::{Expr, LabelSet, LogicError, PredId};
use crate::trace::{definitely_before_states, Interval, LocalState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("process #{proc}: expected state {expected}, got {got}")]
    Sequence { proc: usize, expected: usize, got: usize },
    #[error("state from unknown process #{0}")]
    UnknownProcess(usize),
    #[error("definition error: {0}")]
    Definition(String),
    #[error("the initial global state is inconsistent; every process must start before any other process finishes its first state")]
    InconsistentInitial,
    #[error("CGS {0:?} has an empty possible interval")]
    EmptyPossible(Vec<usize>),
}

impl From<LogicError> for LatticeError {
    fn from(e: LogicError) -> Self {
        LatticeError::Definition(e.to_string())
    }
}

pub type CgsId = usize;

/// `proc.atom`, resolved to a process index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomRef {
    pub proc: usize,
    pub atom: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub expr: Expr<AtomRef>,
}

/// The alphabet of CGS predicates.
#[derive(Clone, Debug, Default)]
pub struct Predicates {
    defs: Vec<PredicateDef>,
    by_name: HashMap<String, PredId>,
}

fn resolve_atom(name: &str, procs: &[String]) -> Result<AtomRef, LatticeError> {
    let (proc, atom) = name
        .split_once('.')
        .ok_or_else(|| LatticeError::Definition(format!("{name:?} is not of the form proc.atom")))?;
    let proc = procs
        .iter()
        .position(|p| p == proc)
        .ok_or_else(|| LatticeError::Definition(format!("unknown process {proc:?} in {name:?}")))?;
    if atom.is_empty() {
        return Err(LatticeError::Definition(format!("empty atom name in {name:?}")));
    }
    Ok(AtomRef { proc, atom: atom.to_string() })
}

impl Predicates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn defs(&self) -> &[PredicateDef] {
        &self.defs
    }

    pub fn id(&self, name: &str) -> Option<PredId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: PredId) -> &str {
        &self.defs[id].name
    }

    /// Defines `name := expr` where every leaf of `expr` is `proc.atom`.
    pub fn define(
        &mut self,
        name: &str,
        expr: &Expr<String>,
        procs: &[String],
    ) -> Result<PredId, LatticeError> {
        if self.by_name.contains_key(name) {
            return Err(LatticeError::Definition(format!("predicate {name:?} defined twice")));
        }
        if self.defs.len() >= LabelSet::CAPACITY {
            return Err(LatticeError::Definition(format!(
                "at most {} predicates are supported",
                LabelSet::CAPACITY
            )));
        }
        if !expr.clock_bounds().is_empty() {
            return Err(LatticeError::Definition(format!(
                "predicate {name:?} must not mention the clock"
            )));
        }
        let expr = expr.try_map(&mut |leaf: &String| resolve_atom(leaf, procs))?;
        let id = self.defs.len();
        self.defs.push(PredicateDef { name: name.to_string(), expr });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Resolves a formula leaf: a defined predicate, or `proc.atom` which is
    /// defined on the fly.
    pub fn resolve(&mut self, name: &str, procs: &[String]) -> Result<PredId, LatticeError> {
        if let Some(id) = self.id(name) {
            return Ok(id);
        }
        if name.contains('.') {
            return self.define(name, &Expr::Leaf(name.to_string()), procs);
        }
        Err(LatticeError::Definition(format!("undefined predicate {name:?}")))
    }
}

/// Labels a global state (one local state per process) with the predicates
/// it satisfies.
pub fn label_cgs(states: &[&LocalState], defs: &Predicates) -> Result<LabelSet, LatticeError> {
    let mut labels = LabelSet::default();
    for (id, def) in defs.defs.iter().enumerate() {
        let holds = def.expr.eval_with(0, &mut |a: &AtomRef| {
            let s = states
                .get(a.proc)
                .ok_or_else(|| LatticeError::Definition(format!("no state for process #{}", a.proc)))?;
            s.atoms.get(&a.atom).copied().ok_or_else(|| {
                LatticeError::Definition(format!(
                    "atom {:?} missing on process #{} state {}",
                    a.atom, a.proc, s.index
                ))
            })
        })?;
        if holds {
            labels.insert(id);
        }
    }
    Ok(labels)
}

/// Pairwise concurrency of the constituent states.
pub fn cgs_consistent(states: &[&LocalState]) -> bool {
    states.iter().enumerate().all(|(i, a)| {
        states
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || !definitely_before_states(a, b))
    })
}

/// Intersections of the constituent definite and possible intervals.
pub fn cgs_intervals(states: &[&LocalState]) -> (Interval, Interval) {
    let mut def = Interval::new(0, u64::MAX);
    let mut pos = Interval::new(0, u64::MAX);
    for s in states {
        def = def.meet(&s.definite());
        pos = pos.meet(&s.possible());
    }
    (def, pos)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cgs {
    pub coords: Vec<usize>,
    pub definite: Interval,
    pub possible: Interval,
    pub labels: LabelSet,
}

#[derive(Debug)]
pub struct LatticeStore {
    procs: Vec<String>,
    predicates: Predicates,
    states: Vec<Vec<LocalState>>,
    /// States merged into the lattice, per process.
    merged: Vec<usize>,
    cgs: Vec<Cgs>,
    index: HashMap<Vec<usize>, CgsId>,
    succ: Vec<Vec<CgsId>>,
    pred: Vec<Vec<CgsId>>,
    /// `by_coord[k][i]`: CGSs whose k-th component is state i.
    by_coord: Vec<Vec<Vec<CgsId>>>,
}

impl LatticeStore {
    pub fn new(procs: Vec<String>, predicates: Predicates) -> Self {
        let n = procs.len();
        LatticeStore {
            procs,
            predicates,
            states: vec![Vec::new(); n],
            merged: vec![0; n],
            cgs: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            by_coord: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.procs.len()
    }

    pub fn procs(&self) -> &[String] {
        &self.procs
    }

    pub fn predicates(&self) -> &Predicates {
        &self.predicates
    }

    pub fn states(&self, proc: usize) -> &[LocalState] {
        &self.states[proc]
    }

    pub fn len(&self) -> usize {
        self.cgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cgs.is_empty()
    }

    pub fn cgs(&self, id: CgsId) -> &Cgs {
        &self.cgs[id]
    }

    pub fn all(&self) -> &[Cgs] {
        &self.cgs
    }

    pub fn id_of(&self, coords: &[usize]) -> Option<CgsId> {
        self.index.get(coords).copied()
    }

    pub fn initial(&self) -> Option<CgsId> {
        (!self.cgs.is_empty()).then_some(0)
    }

    pub fn successors(&self, id: CgsId) -> &[CgsId] {
        &self.succ[id]
    }

    pub fn predecessors(&self, id: CgsId) -> &[CgsId] {
        &self.pred[id]
    }

    /// Local state `coords[k]` of every process `k`.
    pub fn constituents(&self, coords: &[usize]) -> Vec<&LocalState> {
        coords.iter().enumerate().map(|(k, &i)| &self.states[k][i]).collect()
    }

    /// Index of the latest closed state per process, once the lattice exists.
    pub fn gmax(&self) -> Option<Vec<usize>> {
        (!self.cgs.is_empty()).then(|| self.merged.iter().map(|m| m - 1).collect())
    }

    /// CGSs with at least one component at the latest closed state.
    pub fn active_surface(&self) -> Vec<CgsId> {
        let Some(gmax) = self.gmax() else { return Vec::new() };
        let mut out: Vec<CgsId> = gmax
            .iter()
            .enumerate()
            .flat_map(|(k, &g)| self.by_coord[k].get(g).into_iter().flatten().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Adds the next closed state of its process and returns the CGSs that
    /// became part of the lattice, in topological order.
    pub fn advance(&mut self, s: LocalState) -> Result<Vec<CgsId>, LatticeError> {
        let k = s.proc;
        if k >= self.n() {
            return Err(LatticeError::UnknownProcess(k));
        }
        let expected = self.states[k].len();
        if s.index != expected {
            return Err(LatticeError::Sequence { proc: k, expected, got: s.index });
        }
        self.states[k].push(s);

        if self.cgs.is_empty() {
            if self.states.iter().any(|q| q.is_empty()) {
                return Ok(Vec::new());
            }
            let origin = vec![0; self.n()];
            if !cgs_consistent(&self.constituents(&origin)) {
                return Err(LatticeError::InconsistentInitial);
            }
            self.merged = vec![1; self.n()];
            let mut added = vec![self.insert(origin)?];
            for j in 0..self.n() {
                while self.merged[j] < self.states[j].len() {
                    added.extend(self.merge_next(j)?);
                }
            }
            return Ok(added);
        }
        self.merge_next(k)
    }

    /// Merges state `merged[k]` of process `k`: new CGSs all have that state
    /// as component `k` and are reached from the previous active surface by
    /// one step along `k`, then steps along other dimensions.
    fn merge_next(&mut self, k: usize) -> Result<Vec<CgsId>, LatticeError> {
        let i = self.merged[k];
        self.merged[k] += 1;
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        for &c in self.by_coord[k].get(i - 1).into_iter().flatten() {
            let mut next = self.cgs[c].coords.clone();
            next[k] = i;
            if !seen.contains(&next) && cgs_consistent(&self.constituents(&next)) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
        let mut found = Vec::new();
        while let Some(coords) = queue.pop_front() {
            for j in (0..self.n()).filter(|&j| j != k) {
                if coords[j] + 1 >= self.merged[j] {
                    continue;
                }
                let mut next = coords.clone();
                next[j] += 1;
                if !seen.contains(&next) && cgs_consistent(&self.constituents(&next)) {
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
            found.push(coords);
        }
        found.sort_by(|a, b| {
            a.iter().sum::<usize>().cmp(&b.iter().sum::<usize>()).then_with(|| a.cmp(b))
        });
        found.into_iter().map(|c| self.insert(c)).collect()
    }

    fn insert(&mut self, coords: Vec<usize>) -> Result<CgsId, LatticeError> {
        let states = self.constituents(&coords);
        let (definite, possible) = cgs_intervals(&states);
        if possible.is_empty() {
            return Err(LatticeError::EmptyPossible(coords));
        }
        let labels = label_cgs(&states, &self.predicates)?;
        let id = self.cgs.len();
        let preds: Vec<CgsId> = (0..coords.len())
            .filter(|&j| coords[j] > 0)
            .filter_map(|j| {
                let mut p = coords.clone();
                p[j] -= 1;
                self.index.get(&p).copied()
            })
            .collect();
        for &p in &preds {
            self.succ[p].push(id);
        }
        for (k, &c) in coords.iter().enumerate() {
            let slot = &mut self.by_coord[k];
            if slot.len() <= c {
                slot.resize(c + 1, Vec::new());
            }
            slot[c].push(id);
        }
        self.index.insert(coords.clone(), id);
        self.cgs.push(Cgs { coords, definite, possible, labels });
        self.succ.push(Vec::new());
        self.pred.push(preds);
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_expr;
    use crate::trace::fixtures::{states_for, worked_trace};
    use crate::trace::Time;
    use proptest::prelude::*;

    fn procs(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("P{i}")).collect()
    }

    fn feed_round_robin(store: &mut LatticeStore, traces: Vec<Vec<LocalState>>) -> Vec<CgsId> {
        let mut iters: Vec<_> = traces.into_iter().map(|t| t.into_iter()).collect();
        let mut added = Vec::new();
        loop {
            let mut progressed = false;
            for it in iters.iter_mut() {
                if let Some(s) = it.next() {
                    added.extend(store.advance(s).unwrap());
                    progressed = true;
                }
            }
            if !progressed {
                return added;
            }
        }
    }

    fn worked_store() -> LatticeStore {
        let mut store = LatticeStore::new(procs(2), Predicates::new());
        feed_round_robin(&mut store, worked_trace());
        store
    }

    /// Every coordinate vector below `gmax` that passes the consistency test.
    fn brute_force(store: &LatticeStore) -> Vec<Vec<usize>> {
        let gmax = store.gmax().unwrap();
        let mut out = Vec::new();
        let mut cur = vec![0; gmax.len()];
        loop {
            if cgs_consistent(&store.constituents(&cur)) {
                out.push(cur.clone());
            }
            let mut k = 0;
            loop {
                if k == cur.len() {
                    out.sort();
                    return out;
                }
                if cur[k] < gmax[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    fn stored(store: &LatticeStore) -> Vec<Vec<usize>> {
        let mut v: Vec<_> = store.all().iter().map(|c| c.coords.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn consistency_examples() {
        let t = worked_trace();
        assert!(cgs_consistent(&[&t[0][1], &t[1][1]]));
        assert!(!cgs_consistent(&[&t[0][0], &t[1][3]]));
        assert!(cgs_consistent(&[&t[1][2]]));
    }

    #[test]
    fn interval_examples() {
        let t = worked_trace();
        assert_eq!(
            cgs_intervals(&[&t[0][1], &t[1][1]]),
            (Interval::new(6, 7), Interval::new(4, 9))
        );
        assert_eq!(cgs_intervals(&[&t[0][1], &t[1][3]]).1, Interval::new(10, 13));
        let (d, p) = cgs_intervals(&[&t[1][2]]);
        assert_eq!((d, p), (t[1][2].definite(), t[1][2].possible()));
    }

    #[test]
    fn initial_cgs_and_surface() {
        let mut store = LatticeStore::new(procs(2), Predicates::new());
        let t = worked_trace();
        assert!(store.advance(t[0][0].clone()).unwrap().is_empty());
        assert_eq!(store.active_surface(), Vec::<CgsId>::new());
        let added = store.advance(t[1][0].clone()).unwrap();
        assert_eq!(added, vec![0]);
        assert_eq!(store.cgs(0).coords, vec![0, 0]);
        assert_eq!(store.active_surface(), vec![0]);
    }

    #[test]
    fn worked_lattice_is_exactly_the_consistent_set() {
        let store = worked_store();
        assert_eq!(store.gmax(), Some(vec![2, 3]));
        assert_eq!(stored(&store), brute_force(&store));
        let mut surface: Vec<Vec<usize>> =
            store.active_surface().into_iter().map(|c| store.cgs(c).coords.clone()).collect();
        surface.sort();
        // (2,2) is consistent on this trace: he(s2_2) = [10,12] overlaps le(s1_2) = [11,13]
        assert_eq!(surface, vec![vec![1, 3], vec![2, 2], vec![2, 3]]);
    }

    #[test]
    fn edges_are_unit_steps() {
        let store = worked_store();
        for (id, c) in store.all().iter().enumerate() {
            for &s in store.successors(id) {
                let d = &store.cgs(s).coords;
                let diff: usize = c.coords.iter().zip(d).map(|(a, b)| b - a).sum();
                assert_eq!(diff, 1);
                assert!(c.coords.iter().zip(d).all(|(a, b)| b >= a));
            }
        }
    }

    #[test]
    fn far_future_state_adds_nothing() {
        let mut store = LatticeStore::new(procs(2), Predicates::new());
        feed_round_robin(
            &mut store,
            vec![states_for(0, &[0, 5, 10], 0, &[]), states_for(1, &[0, 6], 0, &[])],
        );
        let before = store.len();
        let surface_before = store.active_surface();
        // P1 state 2 spans [10, 100]; P2 is still in state 0 which ended at 6
        let far = states_for(0, &[0, 5, 10, 100], 0, &[]).pop().unwrap();
        assert!(store.advance(far).unwrap().is_empty());
        assert_eq!(store.len(), before);
        assert_eq!(store.gmax(), Some(vec![2, 0]));
        // the surface keeps every CGS touching P2's latest state
        assert_eq!(store.active_surface(), surface_before);
    }

    #[test]
    fn out_of_order_state_is_rejected() {
        let mut store = LatticeStore::new(procs(2), Predicates::new());
        let t = worked_trace();
        assert_eq!(
            store.advance(t[0][1].clone()),
            Err(LatticeError::Sequence { proc: 0, expected: 0, got: 1 })
        );
    }

    #[test]
    fn inconsistent_start_is_reported() {
        let mut store = LatticeStore::new(procs(2), Predicates::new());
        store.advance(states_for(0, &[0, 2], 0, &[]).remove(0)).unwrap();
        assert_eq!(
            store.advance(states_for(1, &[10, 12], 0, &[]).remove(0)),
            Err(LatticeError::InconsistentInitial)
        );
    }

    #[test]
    fn labeling_examples() {
        let p = procs(3);
        let mut defs = Predicates::new();
        defs.define("a", &parse_expr("P1.x && P2.x").unwrap(), &p).unwrap();
        let s1 = states_for(0, &[0, 1], 0, &[("x", true)]);
        let s2t = states_for(1, &[0, 1], 0, &[("x", true)]);
        let s2f = states_for(1, &[0, 1], 0, &[("x", false)]);
        assert_eq!(label_cgs(&[&s1[0], &s2t[0]], &defs).unwrap(), [0].into_iter().collect());
        assert!(label_cgs(&[&s1[0], &s2f[0]], &defs).unwrap().is_empty());

        let mut gather = Predicates::new();
        gather
            .define("a", &parse_expr("P1.at && P2.at && P3.at").unwrap(), &p)
            .unwrap();
        for mask in 0..8u8 {
            let sts: Vec<_> = (0..3)
                .map(|k| states_for(k, &[0, 1], 0, &[("at", mask & (1 << k) != 0)]).remove(0))
                .collect();
            let refs: Vec<&LocalState> = sts.iter().collect();
            assert_eq!(label_cgs(&refs, &gather).unwrap().contains(0), mask == 7);
        }

        let mut bad = Predicates::new();
        bad.define("b", &parse_expr("P1.missing").unwrap(), &p).unwrap();
        assert!(matches!(label_cgs(&[&s1[0]], &bad), Err(LatticeError::Definition(_))));
        assert!(bad.define("c", &parse_expr("P9.x").unwrap(), &p).is_err());
        assert!(bad.define("d", &parse_expr("x").unwrap(), &p).is_err());
        assert!(bad.resolve("nope", &p).is_err());
        assert_eq!(bad.resolve("P2.y", &p).unwrap(), 1);
    }

    /// Up to `n` processes, each with 1..=5 states, timestamps starting at 0.
    fn arb_traces(max_n: usize, max_states: usize) -> impl Strategy<Value = (Vec<Vec<Time>>, Time)> {
        let proc = prop::collection::vec(1u64..6, 2..=max_states + 1).prop_map(|gaps| {
            let mut t = 0;
            let mut ts = vec![0];
            for g in gaps.iter().skip(1) {
                t += g;
                ts.push(t);
            }
            ts
        });
        (prop::collection::vec(proc, 1..=max_n), 0u64..3)
    }

    fn build(ts: &[Vec<Time>], eps: Time, order_seed: u64) -> LatticeStore {
        let mut store = LatticeStore::new(procs(ts.len()), Predicates::new());
        let mut traces: Vec<VecDeque<LocalState>> = ts
            .iter()
            .enumerate()
            .map(|(k, t)| states_for(k, t, eps, &[]).into())
            .collect();
        let mut x = order_seed;
        while traces.iter().any(|t| !t.is_empty()) {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let live: Vec<usize> = (0..traces.len()).filter(|&k| !traces[k].is_empty()).collect();
            let k = live[(x >> 33) as usize % live.len()];
            let s = traces[k].pop_front().unwrap();
            let before: Vec<Cgs> = store.all().to_vec();
            let added = store.advance(s).unwrap();
            // growth is monotone and reported additions are the new tail
            assert_eq!(&store.all()[..before.len()], &before[..]);
            assert_eq!(added, (before.len()..store.len()).collect::<Vec<_>>());
        }
        store
    }

    proptest! {
        #[test]
        fn advance_matches_exhaustive_enumeration((ts, eps) in arb_traces(3, 5), seed in any::<u64>()) {
            let store = build(&ts, eps, seed);
            prop_assert_eq!(stored(&store), brute_force(&store));
            let gmax = store.gmax().unwrap();
            let surface = store.active_surface();
            for (id, c) in store.all().iter().enumerate() {
                let on_surface = c.coords.iter().zip(&gmax).any(|(a, g)| a == g);
                prop_assert_eq!(on_surface, surface.contains(&id));
                let states = store.constituents(&c.coords);
                let (d, p) = cgs_intervals(&states);
                prop_assert_eq!((d, p), (c.definite, c.possible));
                prop_assert!(!p.is_empty());
            }
            // active surface bound n * p^(n-1)
            let n = ts.len() as u32;
            let p = ts.iter().map(|t| t.len() - 1).max().unwrap();
            prop_assert!(surface.len() <= (n as usize) * p.pow(n - 1));
        }

        #[test]
        fn larger_skew_never_removes_cgs((ts, eps) in arb_traces(3, 4)) {
            let small: HashSet<_> = stored(&build(&ts, eps, 1)).into_iter().collect();
            let large: HashSet<_> = stored(&build(&ts, eps + 2, 1)).into_iter().collect();
            prop_assert!(small.is_subset(&large));
        }

        #[test]
        fn zero_skew_distinct_times_form_a_chain(raw in prop::collection::vec(prop::collection::vec(1u64..20, 2..5), 2..=3)) {
            // timestamps k, k + n*g1, ... are globally distinct by residue
            let n = raw.len() as u64;
            let ts: Vec<Vec<Time>> = raw.iter().enumerate().map(|(k, gaps)| {
                let mut t = k as u64;
                let mut v = vec![t];
                for g in gaps { t += g * n; v.push(t); }
                v
            }).collect();
            let mut store = LatticeStore::new(procs(ts.len()), Predicates::new());
            let mut ok = true;
            for (k, t) in ts.iter().enumerate() {
                for s in states_for(k, t, 0, &[]) {
                    if store.advance(s).is_err() { ok = false; }
                }
            }
            prop_assume!(ok);
            let all = stored(&store);
            for a in &all {
                for b in &all {
                    let le = a.iter().zip(b).all(|(x, y)| x <= y);
                    let ge = a.iter().zip(b).all(|(x, y)| x >= y);
                    prop_assert!(le || ge, "{:?} and {:?} are incomparable", a, b);
                }
            }
        }
    }
}
