// Two robots reach an assembly point at 15.0 s and 15.5 s, clocks skewed
// by at most 10 ms. "All gathered within 16 s" holds; "within 14 s" fails.

use skewmon::{generate_trace, Monitor, Profile, PropertySet, Quantum, SimConfig};

pub fn run_example() -> Result<(), skewmon::Error> {
    let cfg = SimConfig {
        n: 2,
        epsilon: 10,
        duration: 20_000,
        profile: Profile::Gathering { assembly: vec![15_000, 15_500] },
        ..Default::default()
    };
    let trace = generate_trace(&cfg)?;
    let props = PropertySet::parse("at := P1.at_assembly && P2.at_assembly\nA<>[0,16000] at\nA<>[0,14000] at\n")?;
    let mut m = Monitor::new(trace.header.procs.clone(), &props, cfg.epsilon, Quantum::default())?;
    let mut shown = Vec::new();
    for rec in &trace.records {
        if let Some(step) = m.ingest(rec)? {
            let v: Vec<String> = step.verdicts.iter().map(|(_, v)| v.symbol().to_string()).collect();
            // print only when some verdict changes
            if shown != v {
                println!("t={:>6} ms  {}#{}  {}", rec.ts, step.proc, step.index, v.join(" "));
                shown = v;
            }
        }
    }
    for (f, v) in m.formulas().iter().zip(m.verdicts()) {
        println!("{} {} -> {v}", f.id, f.source);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
