// How the automaton grows with the skew bound and the process count.

use skewmon::{generate_trace, Monitor, PropertySet, Quantum, SimConfig};

fn locations(cfg: &SimConfig) -> Result<usize, skewmon::Error> {
    let trace = generate_trace(cfg)?;
    let mut m = Monitor::new(trace.header.procs.clone(), &PropertySet::default(), cfg.epsilon, Quantum::default())?;
    for rec in &trace.records {
        m.ingest(rec)?;
    }
    Ok(m.automaton().map_or(0, |ta| ta.len()))
}

pub fn run_example() -> Result<(), skewmon::Error> {
    let base = SimConfig { n: 2, seed: 6, duration: 60_000, ..Default::default() };
    println!("eps(ms)  |Loc|   (n=2, 60 s)");
    for eps in [0, 100, 200, 500, 1000] {
        println!("{eps:>7}  {:>5}", locations(&SimConfig { epsilon: eps, ..base.clone() })?);
    }
    println!("n  |Loc|   (eps=200 ms)");
    for n in 2..=4 {
        println!("{n}  {:>5}", locations(&SimConfig { n, epsilon: 200, ..base.clone() })?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
