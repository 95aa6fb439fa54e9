//! The lattice as a single-clock timed automaton, its two suffix extensions,
//! and their integer-time unfolding.
//!
//! Locations are CGSs. A location may be occupied while `T <= I_pos.hi`, and
//! is entered once `T >= I_pos.lo`. The clock is never reset. The suffix
//! location `Loc_inf` is entered from accepting (active-surface) locations
//! and stands for every future the trace may still have.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::lattice::{CgsId, LatticeStore};
use crate::logic::{LabelSet, Polarity};
use crate::trace::{Interval, Time};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("the lattice has no initial CGS yet")]
    NotReady,
    #[error("the automaton has no accepting location")]
    NoAccepting,
    #[error("horizon {given} is below the required minimum {required}")]
    Horizon { given: Time, required: Time },
    #[error("guard of {dst:?} ({guard}) is below the guard of its predecessor {src:?} ({prev})")]
    GuardOrder { src: Vec<usize>, dst: Vec<usize>, prev: Time, guard: Time },
    #[error("dead end at location {loc:?}, time {time}")]
    DeadEnd { loc: Option<Vec<usize>>, time: Time },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub cgs: CgsId,
    pub coords: Vec<usize>,
    /// `T <= invariant` while here: `I_pos.hi`.
    pub invariant: Time,
    /// Guard of every transition into this location: `I_pos.lo`.
    pub entry_guard: Time,
    pub definite: Interval,
    pub labels: LabelSet,
    /// `I_def(C[k]).hi` of every component `k`.
    pub component_def_hi: Vec<Time>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub src: usize,
    pub dst: usize,
    pub guard: Time,
}

/// Location indices coincide with CGS ids of the store it was built from.
#[derive(Clone, Debug, Default)]
pub struct TimedAutomaton {
    locations: Vec<Location>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    accepting: Vec<usize>,
    gmax: Vec<usize>,
}

/// Builds the automaton of the current lattice.
pub fn build_ta(store: &LatticeStore) -> Result<TimedAutomaton, AutomatonError> {
    let mut ta = TimedAutomaton::default();
    ta.sync(store)?;
    Ok(ta)
}

impl TimedAutomaton {
    /// Adds the locations and transitions of CGSs discovered since the last
    /// call and refreshes the accepting set.
    pub fn sync(&mut self, store: &LatticeStore) -> Result<(), AutomatonError> {
        let gmax = store.gmax().ok_or(AutomatonError::NotReady)?;
        for id in self.locations.len()..store.len() {
            let c = store.cgs(id);
            let component_def_hi = store
                .constituents(&c.coords)
                .iter()
                .map(|s| s.definite().hi)
                .collect();
            self.locations.push(Location {
                cgs: id,
                coords: c.coords.clone(),
                invariant: c.possible.hi,
                entry_guard: c.possible.lo,
                definite: c.definite,
                labels: c.labels,
                component_def_hi,
            });
            self.outgoing.push(Vec::new());
            for &p in store.predecessors(id) {
                let prev = self.locations[p].entry_guard;
                let guard = c.possible.lo;
                if guard < prev {
                    return Err(AutomatonError::GuardOrder {
                        src: self.locations[p].coords.clone(),
                        dst: c.coords.clone(),
                        prev,
                        guard,
                    });
                }
                self.outgoing[p].push(self.transitions.len());
                self.transitions.push(Transition { src: p, dst: id, guard });
            }
        }
        self.accepting = store.active_surface();
        self.gmax = gmax;
        Ok(())
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, i: usize) -> &Location {
        &self.locations[i]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, loc: usize) -> impl Iterator<Item = &Transition> {
        self.outgoing[loc].iter().map(|&t| &self.transitions[t])
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn gmax(&self) -> &[usize] {
        &self.gmax
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Largest invariant or guard bound.
    pub fn max_constant(&self) -> Time {
        self.locations.iter().map(|l| l.invariant.max(l.entry_guard)).max().unwrap_or(0)
    }
}

/// Earliest time the trace may leave accepting location `loc` for a yet
/// unobserved successor: over the dimensions at their latest state, the
/// earliest possible guard of the successor along that dimension.
pub fn inf_guard(loc: &Location, gmax: &[usize]) -> Option<Time> {
    loc.coords
        .iter()
        .zip(gmax)
        .enumerate()
        .filter(|(_, (c, g))| c == g)
        .map(|(k, _)| loc.entry_guard.max(loc.component_def_hi[k]))
        .min()
}

#[derive(Clone, Debug)]
pub struct ExtendedTa<'a> {
    pub base: &'a TimedAutomaton,
    pub polarity: Polarity,
    /// `(accepting location, guard)` of every transition into `Loc_inf`.
    pub inf_guards: Vec<(usize, Time)>,
    /// Lower bound actually used on each `Loc_inf` transition: the guard
    /// combined with the accepting-time bound `I_def(C).hi`.
    pub inf_entry: Vec<(usize, Time)>,
    /// Number of accepting locations where the accepting-time bound was
    /// larger than the guard.
    pub guard_adjustments: usize,
}

/// Adds `Loc_inf` with one transition from every accepting location.
pub fn extend<'a>(
    ta: &'a TimedAutomaton,
    polarity: Polarity,
    gmax: &[usize],
) -> Result<ExtendedTa<'a>, AutomatonError> {
    if ta.accepting().is_empty() {
        return Err(AutomatonError::NoAccepting);
    }
    let mut inf_guards = Vec::with_capacity(ta.accepting().len());
    let mut inf_entry = Vec::with_capacity(ta.accepting().len());
    let mut guard_adjustments = 0;
    for &a in ta.accepting() {
        let loc = ta.location(a);
        let Some(g) = inf_guard(loc, gmax) else {
            return Err(AutomatonError::NoAccepting);
        };
        let mut entry = g;
        if !loc.definite.is_empty() && loc.definite.hi > g {
            entry = loc.definite.hi;
            guard_adjustments += 1;
        }
        inf_guards.push((a, g));
        inf_entry.push((a, entry));
    }
    Ok(ExtendedTa { base: ta, polarity, inf_guards, inf_entry, guard_adjustments })
}

impl ExtendedTa<'_> {
    /// `1 + max(invariants, guards, Loc_inf guards, window_hi)`.
    pub fn required_horizon(&self, window_hi: Time) -> Time {
        let inf = self.inf_entry.iter().map(|(_, g)| *g).max().unwrap_or(0);
        1 + self.base.max_constant().max(inf).max(window_hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeLoc {
    Loc(usize),
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub loc: NodeLoc,
    /// Index into the time axis.
    pub point: usize,
    /// Representative clock value.
    pub time: Time,
    pub labels: LabelSet,
}

impl Node {
    pub fn at_inf(&self) -> bool {
        self.loc == NodeLoc::Inf
    }
}

/// How the clock is discretised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldOptions {
    /// Clock values `>= horizon` are one saturated value.
    pub horizon: Time,
    /// Keep only the integer values where some constraint changes truth
    /// value; stretches in between become one representative point.
    pub compressed: bool,
    /// Clock values `>= cutoff` are one absorbing point. Sound when the
    /// checked state formula is constant from `cutoff` on.
    pub cutoff: Option<Time>,
    /// Additional constants the checked formula compares the clock against.
    pub breakpoints: Vec<Time>,
}

impl UnfoldOptions {
    pub fn full(horizon: Time) -> Self {
        UnfoldOptions { horizon, compressed: false, cutoff: None, breakpoints: Vec::new() }
    }
}

/// Finite graph over `(location, clock value)` nodes. Dwell edges advance the
/// clock to the next axis point; jump edges change location at a fixed clock
/// value. The last axis point carries a self-loop.
#[derive(Clone, Debug)]
pub struct DiscreteGraph {
    pub polarity: Polarity,
    axis: Vec<Time>,
    /// The last point stands for every value from it on.
    pub last: Time,
    pub nodes: Vec<Node>,
    pub succ: Vec<Vec<u32>>,
    pub initial: usize,
}

impl DiscreteGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn axis(&self) -> &[Time] {
        &self.axis
    }

    pub fn find(&self, loc: NodeLoc, time: Time) -> Option<usize> {
        self.nodes.iter().position(|n| n.loc == loc && n.time == time)
    }
}

/// Unfolds over every integer clock value in `[0, horizon]`.
pub fn unfold(eta: &ExtendedTa<'_>, horizon: Time) -> Result<DiscreteGraph, AutomatonError> {
    unfold_with(eta, &UnfoldOptions::full(horizon))
}

pub fn unfold_with(eta: &ExtendedTa<'_>, opts: &UnfoldOptions) -> Result<DiscreteGraph, AutomatonError> {
    let required = eta.required_horizon(0);
    if opts.horizon < required {
        return Err(AutomatonError::Horizon { given: opts.horizon, required });
    }
    let ta = eta.base;
    let last = opts.cutoff.map_or(opts.horizon, |c| c.min(opts.horizon));

    let mut inf_entry = vec![None; ta.len()];
    for &(a, g) in &eta.inf_entry {
        inf_entry[a] = Some(g);
    }

    let axis: Vec<Time> = if opts.compressed {
        let mut bp: BTreeSet<Time> = BTreeSet::new();
        bp.insert(0);
        bp.insert(last);
        for l in ta.locations().iter().filter(|l| l.entry_guard <= last) {
            bp.insert(l.invariant);
            bp.insert(l.entry_guard);
        }
        bp.extend(eta.inf_entry.iter().map(|(_, g)| *g));
        bp.extend(opts.breakpoints.iter().copied());
        let bp: Vec<Time> = bp.into_iter().filter(|&b| b <= last).collect();
        let mut axis = Vec::with_capacity(bp.len() * 2);
        for w in bp.windows(2) {
            axis.push(w[0]);
            if w[1] - w[0] >= 2 {
                axis.push(w[0] + 1);
            }
        }
        axis.push(last);
        axis
    } else {
        (0..=last).collect()
    };
    let last_point = axis.len() - 1;

    let mut ids: HashMap<(NodeLoc, usize), u32> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |loc: NodeLoc, point: usize, nodes: &mut Vec<Node>, succ: &mut Vec<Vec<u32>>, queue: &mut VecDeque<u32>| -> u32 {
        *ids.entry((loc, point)).or_insert_with(|| {
            let labels = match loc {
                NodeLoc::Loc(l) => ta.location(l).labels,
                NodeLoc::Inf => LabelSet::default(),
            };
            nodes.push(Node { loc, point, time: axis[point], labels });
            succ.push(Vec::new());
            let id = (nodes.len() - 1) as u32;
            queue.push_back(id);
            id
        })
    };
    let initial = intern(NodeLoc::Loc(ta.initial()), 0, &mut nodes, &mut succ, &mut queue);

    while let Some(id) = queue.pop_front() {
        let Node { loc, point, time, .. } = nodes[id as usize];
        let mut out = Vec::new();
        if point == last_point {
            out.push(id);
        } else {
            let next_time = axis[point + 1];
            match loc {
                NodeLoc::Inf => out.push(intern(loc, point + 1, &mut nodes, &mut succ, &mut queue)),
                NodeLoc::Loc(l) => {
                    let here = ta.location(l);
                    if next_time <= here.invariant {
                        out.push(intern(loc, point + 1, &mut nodes, &mut succ, &mut queue));
                    }
                    for t in ta.outgoing(l) {
                        if time >= t.guard && time <= ta.location(t.dst).invariant {
                            out.push(intern(NodeLoc::Loc(t.dst), point, &mut nodes, &mut succ, &mut queue));
                        }
                    }
                    if let Some(g) = inf_entry[l] {
                        if time >= g {
                            out.push(intern(NodeLoc::Inf, point, &mut nodes, &mut succ, &mut queue));
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(AutomatonError::DeadEnd {
                loc: match loc {
                    NodeLoc::Loc(l) => Some(ta.location(l).coords.clone()),
                    NodeLoc::Inf => None,
                },
                time,
            });
        }
        succ[id as usize] = out;
    }

    Ok(DiscreteGraph { polarity: eta.polarity, axis, last, nodes, succ, initial: initial as usize })
}
