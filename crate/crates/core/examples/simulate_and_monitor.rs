// Generic activity traces from the simulator, monitored online with the
// per-step report.

use std::time::Duration;

use skewmon::{generate_trace, Monitor, PropertySet, Quantum, SimConfig};

pub fn run_example() -> Result<(), skewmon::Error> {
    let cfg = SimConfig { n: 3, epsilon: 200, seed: 42, duration: 120_000, ..Default::default() };
    let trace = generate_trace(&cfg)?;
    println!("{} records from {} processes", trace.records.len(), cfg.n);

    let props = PropertySet::parse(
        "all := P1.active && P2.active && P3.active\n\
         E<>[0,30000] all\n\
         A[][0,60000] P1.active || P2.active || P3.active\n",
    )?;
    let mut m = Monitor::new(trace.header.procs.clone(), &props, cfg.epsilon, Quantum::default())?;
    let mut busiest = Duration::ZERO;
    let mut last = None;
    for rec in &trace.records {
        if let Some(step) = m.ingest(rec)? {
            busiest = busiest.max(step.build + step.check);
            if step.step % 60 == 0 {
                println!("{}", step.to_json());
            }
            last = Some(step);
        }
    }
    let last = last.expect("trace closes states");
    println!("{} steps, {} locations, slowest step {busiest:?}", last.step, last.locations);
    for (id, v) in &last.verdicts {
        println!("{id} {v}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
