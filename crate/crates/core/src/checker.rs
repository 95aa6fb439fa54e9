//! Fixpoint CTL checking on the unfolded automata, the two-suffix verdict,
//! and the online monitoring loop.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{extend, unfold_with, AutomatonError, DiscreteGraph, TimedAutomaton, UnfoldOptions};
use crate::lattice::{LatticeError, LatticeStore, Predicates};
use crate::logic::{
    combine_verdicts, eval_state_pred, to_ctl, CtlFormula, Formula, LogicError, Modality, Polarity, PredId,
    PropertySet, Quantifier, Verdict3,
};
use crate::trace::{LocalState, ProcessStream, Quantum, Time, TraceError, TraceRecord};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("graph has no initial node")]
    NoInitial,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

fn predecessors(g: &DiscreteGraph) -> Vec<Vec<u32>> {
    let mut pred = vec![Vec::new(); g.len()];
    for (v, out) in g.succ.iter().enumerate() {
        for &w in out {
            pred[w as usize].push(v as u32);
        }
    }
    pred
}

/// Nodes satisfying `psi`.
fn label_nodes(g: &DiscreteGraph, psi: &crate::logic::Expr<PredId>, polarity: Polarity) -> Result<Vec<bool>, LogicError> {
    g.nodes
        .iter()
        .map(|n| eval_state_pred(psi, &n.labels, n.time, n.at_inf(), Some(polarity)))
        .collect()
}

/// Least fixpoint `Z = target ∪ pre_exists(Z)`.
fn exists_eventually(g: &DiscreteGraph, pred: &[Vec<u32>], target: &[bool]) -> Vec<bool> {
    let mut z = target.to_vec();
    let mut work: Vec<u32> = (0..g.len() as u32).filter(|&v| z[v as usize]).collect();
    while let Some(v) = work.pop() {
        for &p in &pred[v as usize] {
            if !z[p as usize] {
                z[p as usize] = true;
                work.push(p);
            }
        }
    }
    z
}

/// Least fixpoint `Z = target ∪ pre_forall(Z)`.
fn forall_eventually(g: &DiscreteGraph, pred: &[Vec<u32>], target: &[bool]) -> Vec<bool> {
    let mut pending: Vec<usize> = g.succ.iter().map(|s| s.len()).collect();
    let mut z = target.to_vec();
    let mut work: Vec<u32> = (0..g.len() as u32).filter(|&v| z[v as usize]).collect();
    while let Some(v) = work.pop() {
        for &p in &pred[v as usize] {
            let p = p as usize;
            if z[p] {
                continue;
            }
            pending[p] -= 1;
            if pending[p] == 0 {
                z[p] = true;
                work.push(p as u32);
            }
        }
    }
    z
}

/// Greatest fixpoint `Z = target ∩ pre_exists(Z)`.
fn exists_always(g: &DiscreteGraph, pred: &[Vec<u32>], target: &[bool]) -> Vec<bool> {
    let mut z = target.to_vec();
    let mut live: Vec<usize> = g
        .succ
        .iter()
        .map(|s| s.iter().filter(|&&w| z[w as usize]).count())
        .collect();
    let mut work: Vec<u32> = (0..g.len() as u32).filter(|&v| z[v as usize] && live[v as usize] == 0).collect();
    for &v in &work {
        z[v as usize] = false;
    }
    while let Some(v) = work.pop() {
        for &p in &pred[v as usize] {
            let p = p as usize;
            if !z[p] {
                continue;
            }
            live[p] -= 1;
            if live[p] == 0 {
                z[p] = false;
                work.push(p as u32);
            }
        }
    }
    z
}

/// Decides `c` at the initial node of `graph` under the given suffix
/// polarity. Infinite paths are those that end in a self-loop.
pub fn check_ctl(graph: &DiscreteGraph, c: &CtlFormula<PredId>, polarity: Polarity) -> Result<bool, CheckError> {
    if graph.initial >= graph.len() {
        return Err(CheckError::NoInitial);
    }
    let pred = predecessors(graph);
    let sat = label_nodes(graph, &c.psi, polarity)?;
    let holds = match (c.quantifier, c.modality) {
        (Quantifier::Exists, Modality::Eventually) => exists_eventually(graph, &pred, &sat),
        (Quantifier::Forall, Modality::Eventually) => forall_eventually(graph, &pred, &sat),
        (Quantifier::Exists, Modality::Always) => exists_always(graph, &pred, &sat),
        (Quantifier::Forall, Modality::Always) => {
            let bad: Vec<bool> = sat.iter().map(|s| !s).collect();
            exists_eventually(graph, &pred, &bad).into_iter().map(|b| !b).collect()
        }
    };
    Ok(holds[graph.initial])
}

/// How the extended automata are discretised for checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discretisation {
    /// Every integer clock value up to the horizon.
    Exact,
    /// Only values where some constraint changes, cut off after the window.
    Compressed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub verdict: Verdict3,
    pub top: bool,
    pub bot: bool,
    /// Node counts of the two unfolded graphs.
    pub nodes: (usize, usize),
}

/// `1 + max(automaton constants, Loc_inf guards, window.hi, formula constants)`.
pub fn horizon_for(ta: &TimedAutomaton, f: &Formula<PredId>) -> Result<Time, CheckError> {
    let eta = extend(ta, Polarity::Top, ta.gmax())?;
    Ok(eta.required_horizon(f.max_constant()))
}

fn formula_breakpoints(f: &Formula<PredId>) -> Vec<Time> {
    let mut bp = vec![f.window.lo, f.window.hi, f.window.hi + 1];
    for c in f.phi.clock_bounds() {
        bp.extend([c.saturating_sub(1), c, c + 1]);
    }
    bp
}

/// Three-valued verdict of `f` on the automaton of the observed trace.
pub fn check(ta: &TimedAutomaton, f: &Formula<PredId>) -> Result<CheckOutcome, CheckError> {
    check_with(ta, f, Discretisation::Compressed)
}

pub fn check_with(ta: &TimedAutomaton, f: &Formula<PredId>, mode: Discretisation) -> Result<CheckOutcome, CheckError> {
    let ctl = to_ctl(f);
    let horizon = horizon_for(ta, f)?;
    let opts = match mode {
        Discretisation::Exact => UnfoldOptions::full(horizon),
        Discretisation::Compressed => UnfoldOptions {
            horizon,
            compressed: true,
            // past the window the CTL state formula no longer changes
            cutoff: Some(f.window.hi + 1),
            breakpoints: formula_breakpoints(f),
        },
    };
    let mut results = [false; 2];
    let mut nodes = [0; 2];
    for (i, pol) in [Polarity::Top, Polarity::Bot].into_iter().enumerate() {
        let eta = extend(ta, pol, ta.gmax())?;
        let graph = unfold_with(&eta, &opts)?;
        nodes[i] = graph.len();
        results[i] = check_ctl(&graph, &ctl, pol)?;
    }
    Ok(CheckOutcome {
        verdict: combine_verdicts(results[0], results[1]),
        top: results[0],
        bot: results[1],
        nodes: (nodes[0], nodes[1]),
    })
}

#[derive(Clone, Debug)]
pub struct MonitoredFormula {
    pub id: String,
    /// As written, in raw units.
    pub source: Formula,
    /// Resolved, in ticks.
    pub formula: Formula<PredId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub step: usize,
    pub proc: String,
    pub index: usize,
    pub verdicts: Vec<(String, Verdict3)>,
    pub locations: usize,
    pub accepting: usize,
    pub build: Duration,
    pub check: Duration,
}

impl StepReport {
    /// One line of the step report file.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "step": self.step,
            "proc": self.proc,
            "index": self.index,
            "verdicts": self.verdicts.iter().map(|(id, v)| serde_json::json!({"formula": id, "verdict": v.to_string()})).collect::<Vec<_>>(),
            "locations": self.locations,
            "accepting": self.accepting,
            "build_us": self.build.as_micros() as u64,
            "check_us": self.check.as_micros() as u64,
        })
    }
}

/// Online monitor: ingests records, grows the lattice and automaton, and
/// re-checks every formula after each closed state.
#[derive(Debug)]
pub struct Monitor {
    store: LatticeStore,
    ta: Option<TimedAutomaton>,
    formulas: Vec<MonitoredFormula>,
    last: Vec<Verdict3>,
    streams: Vec<ProcessStream>,
    quantum: Quantum,
    steps: usize,
}

impl Monitor {
    /// `eps` is in raw units and must be a multiple of `quantum`.
    pub fn new(procs: Vec<String>, props: &PropertySet, eps: u64, quantum: Quantum) -> Result<Self, CheckError> {
        let eps = quantum.to_ticks(eps)?;
        let mut predicates = Predicates::new();
        for (name, expr) in &props.predicates {
            predicates.define(name, expr, &procs)?;
        }
        let mut formulas = Vec::new();
        for (id, f) in &props.formulas {
            let resolved = f
                .quantize(quantum)?
                .try_map_leaves(&mut |name: &String| predicates.resolve(name, &procs))?;
            formulas.push(MonitoredFormula { id: id.clone(), source: f.clone(), formula: resolved });
        }
        let streams = procs
            .iter()
            .enumerate()
            .map(|(k, p)| ProcessStream::new(k, p.clone(), eps, quantum))
            .collect();
        let last = vec![Verdict3::Unknown; formulas.len()];
        Ok(Monitor {
            store: LatticeStore::new(procs, predicates),
            ta: None,
            formulas,
            last,
            streams,
            quantum,
            steps: 0,
        })
    }

    pub fn store(&self) -> &LatticeStore {
        &self.store
    }

    pub fn automaton(&self) -> Option<&TimedAutomaton> {
        self.ta.as_ref()
    }

    pub fn formulas(&self) -> &[MonitoredFormula] {
        &self.formulas
    }

    pub fn verdicts(&self) -> &[Verdict3] {
        &self.last
    }

    pub fn quantum(&self) -> Quantum {
        self.quantum
    }

    /// Feeds one trace record; returns a report when it closed a state.
    pub fn ingest(&mut self, record: &TraceRecord) -> Result<Option<StepReport>, CheckError> {
        let k = self
            .streams
            .iter()
            .position(|s| s.name() == record.proc)
            .ok_or_else(|| TraceError::UnknownProcess(record.proc.clone()))?;
        let Some(_) = self.streams[k].ingest_record(record)? else {
            return Ok(None);
        };
        let state = self.streams[k].pop_state().expect("closed state is queued");
        self.step(state).map(Some)
    }

    /// Advances the lattice with `s`, extends the automaton and re-checks
    /// every formula.
    pub fn step(&mut self, s: LocalState) -> Result<StepReport, CheckError> {
        let (proc, index) = (self.store.procs()[s.proc].clone(), s.index);
        let started = Instant::now();
        self.store.advance(s)?;
        if self.store.initial().is_some() {
            match &mut self.ta {
                Some(ta) => ta.sync(&self.store)?,
                None => self.ta = Some(crate::automaton::build_ta(&self.store)?),
            }
        }
        let build = started.elapsed();
        let started = Instant::now();
        if let Some(ta) = &self.ta {
            for (f, last) in self.formulas.iter().zip(self.last.iter_mut()) {
                *last = check(ta, &f.formula)?.verdict;
            }
        }
        let check_time = started.elapsed();
        self.steps += 1;
        Ok(StepReport {
            step: self.steps,
            proc,
            index,
            verdicts: self.formulas.iter().map(|f| f.id.clone()).zip(self.last.iter().copied()).collect(),
            locations: self.ta.as_ref().map_or(0, |t| t.len()),
            accepting: self.ta.as_ref().map_or(0, |t| t.accepting().len()),
            build,
            check: check_time,
        })
    }
}

pub fn monitor_step(m: &mut Monitor, s: LocalState) -> Result<StepReport, CheckError> {
    m.step(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_ta, unfold, NodeLoc};
    use crate::logic::{parse_formula, Expr, LabelSet};
    use crate::trace::fixtures::{states_for, worked_trace};

    fn props(lines: &[&str]) -> PropertySet {
        let mut p = PropertySet::default();
        for l in lines {
            p.add_line(l).unwrap();
        }
        p
    }

    fn resolve(f: &str, preds: &mut Predicates, procs: &[String]) -> Formula<PredId> {
        parse_formula(f).unwrap().try_map_leaves(&mut |n: &String| preds.resolve(n, procs)).unwrap()
    }

    fn worked_store(preds: Predicates) -> LatticeStore {
        let procs = vec!["P1".to_string(), "P2".to_string()];
        let mut store = LatticeStore::new(procs, preds);
        let t = worked_trace();
        let mut labelled: Vec<Vec<LocalState>> = t
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|mut s| {
                        s.atoms.insert("x".into(), false);
                        s
                    })
                    .collect()
            })
            .collect();
        for i in 0..5 {
            for p in labelled.iter_mut() {
                if i < p.len() {
                    store.advance(p[i].clone()).unwrap();
                }
            }
        }
        store
    }

    /// Every maximal path of the graph, as node sequences ending in a self-loop.
    fn all_paths(g: &DiscreteGraph) -> Vec<Vec<usize>> {
        fn go(g: &DiscreteGraph, v: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            path.push(v);
            if g.succ[v].contains(&(v as u32)) {
                out.push(path.clone());
            }
            for &w in &g.succ[v] {
                if w as usize != v {
                    go(g, w as usize, path, out);
                }
            }
            path.pop();
        }
        let mut out = Vec::new();
        go(g, g.initial, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn forall_eventually_on_worked_trace_matches_path_enumeration() {
        let procs = vec!["P1".to_string(), "P2".to_string()];
        let mut preds = Predicates::new();
        preds.define("a", &crate::logic::parse_expr("P1.x && P2.x").unwrap(), &procs).unwrap();
        let f = resolve("A<>[0,15] a", &mut preds, &procs);
        let store = worked_store(preds);
        let ta = build_ta(&store).unwrap();
        let eta = extend(&ta, Polarity::Top, ta.gmax()).unwrap();
        let g = unfold(&eta, horizon_for(&ta, &f).unwrap()).unwrap();
        let ctl = to_ctl(&f);
        let by_paths = all_paths(&g).iter().all(|p| {
            p.iter().any(|&v| {
                let n = &g.nodes[v];
                eval_state_pred(&ctl.psi, &n.labels, n.time, n.at_inf(), Some(Polarity::Top)).unwrap()
            })
        });
        assert!(by_paths);
        assert!(check_ctl(&g, &ctl, Polarity::Top).unwrap());
        // every path reaches Loc_inf by clock 14
        for p in all_paths(&g) {
            let entry = p.iter().find(|&&v| g.nodes[v].loc == NodeLoc::Inf).unwrap();
            assert!(g.nodes[*entry].time <= 14);
        }
    }

    #[test]
    fn trivial_formulas() {
        let procs = vec!["P1".to_string(), "P2".to_string()];
        let mut preds = Predicates::new();
        preds.define("a", &crate::logic::parse_expr("P1.x").unwrap(), &procs).unwrap();
        let store = worked_store(preds);
        let ta = build_ta(&store).unwrap();
        let eta = extend(&ta, Polarity::Bot, ta.gmax()).unwrap();
        let g = unfold(&eta, 20).unwrap();
        let always_true = CtlFormula { quantifier: Quantifier::Forall, modality: Modality::Always, psi: Expr::True };
        assert!(check_ctl(&g, &always_true, Polarity::Bot).unwrap());
        let never = CtlFormula {
            quantifier: Quantifier::Exists,
            modality: Modality::Eventually,
            psi: Expr::Observed(Box::new(Expr::Leaf(0))),
        };
        assert!(!check_ctl(&g, &never, Polarity::Bot).unwrap());
    }

    #[test]
    fn inconclusive_on_worked_trace() {
        let procs = vec!["P1".to_string(), "P2".to_string()];
        let mut preds = Predicates::new();
        preds.define("a", &crate::logic::parse_expr("P1.x && P2.x").unwrap(), &procs).unwrap();
        let f = resolve("A<>[0,15] a", &mut preds, &procs);
        let store = worked_store(preds);
        let ta = build_ta(&store).unwrap();
        for mode in [Discretisation::Exact, Discretisation::Compressed] {
            let out = check_with(&ta, &f, mode).unwrap();
            assert_eq!((out.top, out.bot, out.verdict), (true, false, Verdict3::Unknown));
        }
    }

    #[test]
    fn witness_in_observed_prefix_is_conclusive() {
        // single process; state 1 holds `a` during [5, 9]
        let procs = vec!["P1".to_string()];
        let mut preds = Predicates::new();
        let mut store_states = states_for(0, &[0, 5, 9, 14], 0, &[("x", false)]);
        store_states[1].atoms.insert("x".into(), true);
        let f = resolve("E<>[0,10] P1.x", &mut preds, &procs);
        let g = resolve("A[][0,0] P1.x", &mut preds, &procs);
        let mut store = LatticeStore::new(procs, preds);
        for s in store_states {
            store.advance(s).unwrap();
        }
        let ta = build_ta(&store).unwrap();
        assert_eq!(check(&ta, &f).unwrap().verdict, Verdict3::Top);
        assert_eq!(check(&ta, &g).unwrap().verdict, Verdict3::Bot);
    }

    #[test]
    fn monitor_reports_unknown_until_initial_cgs() {
        let p = props(&["a := P1.x && P2.x", "A<>[0,15] a"]);
        let mut m = Monitor::new(vec!["P1".into(), "P2".into()], &p, 1, Quantum::default()).unwrap();
        let rec = |proc: &str, index: usize, ts: i64, x: bool| TraceRecord {
            proc: proc.into(),
            index,
            ts,
            atoms: [("x".to_string(), x)].into_iter().collect(),
            interval: None,
        };
        assert!(m.ingest(&rec("P1", 0, 0, false)).unwrap().is_none());
        assert!(m.ingest(&rec("P2", 0, 0, false)).unwrap().is_none());
        let r = m.ingest(&rec("P1", 1, 5, false)).unwrap().unwrap();
        assert_eq!(r.verdicts[0].1, Verdict3::Unknown);
        assert_eq!(r.locations, 0);
        // first CGS exists; `a` is false there and the future is open
        let r = m.ingest(&rec("P2", 1, 4, false)).unwrap().unwrap();
        assert_eq!(r.locations, 1);
        assert_eq!(r.verdicts[0].1, Verdict3::Unknown);
        // both atoms become true; once every run has passed into it, TRUE
        m.ingest(&rec("P1", 2, 8, true)).unwrap();
        m.ingest(&rec("P2", 2, 9, true)).unwrap();
        m.ingest(&rec("P1", 3, 20, true)).unwrap();
        let r = m.ingest(&rec("P2", 3, 21, true)).unwrap().unwrap();
        assert_eq!(r.verdicts[0].1, Verdict3::Top);
        let r = m.ingest(&rec("P1", 4, 30, false)).unwrap().unwrap();
        assert_eq!(r.verdicts[0].1, Verdict3::Top);
        assert!(m.ingest(&rec("P3", 0, 0, false)).is_err());
    }

    #[test]
    fn monitor_reports_false_once_window_passes() {
        let p = props(&["A<>[0,15] P1.x"]);
        let mut m = Monitor::new(vec!["P1".into()], &p, 0, Quantum::default()).unwrap();
        let mut verdicts = Vec::new();
        for (i, ts) in [0, 6, 12, 18, 24].into_iter().enumerate() {
            let r = TraceRecord {
                proc: "P1".into(),
                index: i,
                ts,
                atoms: [("x".to_string(), false)].into_iter().collect(),
                interval: None,
            };
            if let Some(rep) = m.ingest(&r).unwrap() {
                verdicts.push(rep.verdicts[0].1);
            }
        }
        assert_eq!(verdicts, vec![Verdict3::Unknown, Verdict3::Unknown, Verdict3::Bot, Verdict3::Bot]);
    }

    #[test]
    fn undefined_predicate_is_rejected() {
        let p = props(&["A<>[0,15] nope"]);
        assert!(matches!(
            Monitor::new(vec!["P1".into()], &p, 0, Quantum::default()),
            Err(CheckError::Lattice(LatticeError::Definition(_)))
        ));
    }

    #[test]
    fn report_line_shape() {
        let r = StepReport {
            step: 1,
            proc: "P1".into(),
            index: 0,
            verdicts: vec![("PHI_1".into(), Verdict3::Top)],
            locations: 3,
            accepting: 1,
            build: Duration::from_micros(5),
            check: Duration::from_micros(7),
        };
        let v = r.to_json();
        assert_eq!(v["verdicts"][0]["verdict"], "TRUE");
        assert_eq!(v["locations"], 3);
        assert_eq!(v["check_us"], 7);
        let _ = LabelSet::default();
    }
}
