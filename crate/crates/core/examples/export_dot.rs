// Graphviz files for the lattice, the automaton and both extensions.

use std::fs;

use skewmon::automaton::extend;
use skewmon::dot::{extended_dot, lattice_dot, ta_dot};
use skewmon::{Monitor, Polarity, PropertySet, Quantum, TraceRecord};

pub fn run_example() -> Result<(), skewmon::Error> {
    let props = PropertySet::parse("A<>[0,15] P1.x && P2.x")?;
    let mut m = Monitor::new(vec!["P1".into(), "P2".into()], &props, 1, Quantum::default())?;
    for (p, ts) in [("P1", [0, 5, 12, 16, 20]), ("P2", [0, 4, 8, 11, 13])] {
        for (i, t) in ts.into_iter().enumerate() {
            m.ingest(&TraceRecord::new(p, i, t).with_atom("x", false))?;
        }
    }
    let ta = m.automaton().expect("initial state exists");
    let phi = m.formulas()[0].source.phi.to_string();
    let dir = std::env::temp_dir().join("skewmon-dot");
    fs::create_dir_all(&dir).map_err(|e| skewmon::Error::Io(e.to_string()))?;
    let files = [
        ("lattice.dot", lattice_dot(m.store(), 1)),
        ("ta.dot", ta_dot(ta, 1)),
        ("ext_top.dot", extended_dot(&extend(ta, Polarity::Top, ta.gmax())?, &phi, 1)),
        ("ext_bot.dot", extended_dot(&extend(ta, Polarity::Bot, ta.gmax())?, &phi, 1)),
    ];
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, &text).map_err(|e| skewmon::Error::Io(e.to_string()))?;
        println!("{} ({} lines)", path.display(), text.lines().count());
    }
    print!("{}", ta_dot(ta, 1));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
