// Intervals, lattice and automaton of a small two-process trace with a
// skew bound of 1.

use skewmon::automaton::{extend, inf_guard};
use skewmon::{Monitor, Polarity, PropertySet, Quantum, TraceRecord};

pub fn run_example() -> Result<(), skewmon::Error> {
    let mut m = Monitor::new(vec!["P1".into(), "P2".into()], &PropertySet::default(), 1, Quantum::default())?;
    let p1 = [0, 5, 12, 16];
    let p2 = [0, 4, 8, 11, 13];
    for (i, &t2) in p2.iter().enumerate() {
        if let Some(&t1) = p1.get(i) {
            m.ingest(&TraceRecord::new("P1", i, t1))?;
        }
        m.ingest(&TraceRecord::new("P2", i, t2))?;
    }

    let store = m.store();
    for s in store.states(0) {
        println!("s1_{}: I_def={} I_pos={}", s.index, s.definite(), s.possible());
    }
    println!("{} consistent global states", store.len());
    for c in store.all() {
        println!("  C{:?}: I_def={} I_pos={}", c.coords, c.definite, c.possible);
    }

    let ta = m.automaton().expect("lattice has an initial state");
    let gmax = ta.gmax().to_vec();
    println!("G_max = {gmax:?}");
    for &a in ta.accepting() {
        let l = ta.location(a);
        println!("accepting C{:?}: inv T<={} Loc_inf guard {:?}", l.coords, l.invariant, inf_guard(l, &gmax));
    }
    let eta = extend(ta, Polarity::Top, &gmax)?;
    println!("suffix entry bounds: {:?}", eta.inf_entry);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
