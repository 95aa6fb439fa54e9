//! Graphviz exports of the lattice and the automata. Times are printed in
//! raw units (`unit` ticks each). Output is deterministic.

use std::fmt::Write;

use crate::automaton::{ExtendedTa, TimedAutomaton};
use crate::lattice::LatticeStore;
use crate::logic::Polarity;

fn node_id(coords: &[usize]) -> String {
    let mut s = String::from("C");
    for c in coords {
        write!(s, "_{c}").unwrap();
    }
    s
}

fn title(coords: &[usize]) -> String {
    let parts: Vec<String> = coords.iter().map(ToString::to_string).collect();
    format!("C({})", parts.join(","))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Consistent global states with both intervals; the active surface is
/// drawn filled.
pub fn lattice_dot(store: &LatticeStore, unit: u64) -> String {
    let active = store.active_surface();
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for (id, c) in store.all().iter().enumerate() {
        let style = if active.contains(&id) { ", style=filled, fillcolor=gray80" } else { "" };
        writeln!(
            out,
            "  {} [label=\"{}\\nI_def={}\\nI_pos={}\"{style}];",
            node_id(&c.coords),
            title(&c.coords),
            c.definite.scaled(unit),
            c.possible.scaled(unit)
        )
        .unwrap();
    }
    for (id, c) in store.all().iter().enumerate() {
        for &s in store.successors(id) {
            writeln!(out, "  {} -> {};", node_id(&c.coords), node_id(&store.cgs(s).coords)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn ta_body(ta: &TimedAutomaton, unit: u64, out: &mut String) {
    for (i, l) in ta.locations().iter().enumerate() {
        let mut attrs = String::new();
        if i == ta.initial() {
            attrs.push_str(", penwidth=2");
        }
        if ta.accepting().contains(&i) {
            attrs.push_str(", peripheries=2");
        }
        writeln!(
            out,
            "  {} [label=\"{}\\ninv: T<={}\"{attrs}];",
            node_id(&l.coords),
            title(&l.coords),
            l.invariant * unit
        )
        .unwrap();
    }
    for t in ta.transitions() {
        writeln!(
            out,
            "  {} -> {} [label=\"T>={}\"];",
            node_id(&ta.location(t.src).coords),
            node_id(&ta.location(t.dst).coords),
            t.guard * unit
        )
        .unwrap();
    }
}

/// Locations with invariants, transitions with guards. Accepting locations
/// have a double border.
pub fn ta_dot(ta: &TimedAutomaton, unit: u64) -> String {
    let mut out = String::from("digraph ta {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    ta_body(ta, unit, &mut out);
    out.push_str("}\n");
    out
}

/// The automaton plus `Loc_inf`, labelled with `phi` or its negation.
pub fn extended_dot(eta: &ExtendedTa<'_>, phi: &str, unit: u64) -> String {
    let (name, label) = match eta.polarity {
        Polarity::Top => ("ext_top", format!("{{{}}}", escape(phi))),
        Polarity::Bot => ("ext_bot", format!("{{!({})}}", escape(phi))),
    };
    let mut out = format!("digraph {name} {{\n  rankdir=LR;\n  node [shape=ellipse];\n");
    ta_body(eta.base, unit, &mut out);
    writeln!(out, "  Loc_inf [label=\"Loc_inf\\n{label}\", shape=doublecircle];").unwrap();
    for &(a, g) in &eta.inf_entry {
        writeln!(out, "  {} -> Loc_inf [label=\"T>={}\"];", node_id(&eta.base.location(a).coords), g * unit).unwrap();
    }
    out.push_str("  Loc_inf -> Loc_inf;\n}\n");
    out
}
