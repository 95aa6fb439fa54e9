// A property that the observed prefix can neither confirm nor refute: the
// best-case suffix satisfies it in time, the worst case does not.

use skewmon::automaton::build_ta;
use skewmon::checker::check;
use skewmon::lattice::{LatticeStore, Predicates};
use skewmon::trace::ProcessStream;
use skewmon::{parse_expr, parse_formula, Quantum, TraceRecord, Verdict3};

pub fn run_example() -> Result<(), skewmon::Error> {
    let procs = vec!["P1".to_string(), "P2".to_string()];
    let mut preds = Predicates::new();
    preds.define("a", &parse_expr("P1.home && P2.home")?, &procs)?;
    let f = parse_formula("A<>[0,15] a")?.try_map_leaves(&mut |n: &String| preds.resolve(n, &procs))?;

    let mut store = LatticeStore::new(procs.clone(), preds);
    for (k, ts) in [vec![0, 5, 12, 16], vec![0, 4, 8, 11, 13]].into_iter().enumerate() {
        let mut stream = ProcessStream::new(k, procs[k].clone(), 1, Quantum::default());
        for (i, t) in ts.into_iter().enumerate() {
            if let Some(s) = stream.ingest_record(&TraceRecord::new(&*procs[k], i, t).with_atom("home", false))? {
                store.advance(s)?;
            }
        }
    }

    let ta = build_ta(&store)?;
    let out = check(&ta, &f)?;
    println!("TA_top |= A<>(T<=15 && a): {}", out.top);
    println!("TA_bot |= A<>(T<=15 && a): {}", out.bot);
    println!("verdict: {}", out.verdict);
    assert_eq!(out.verdict, Verdict3::Unknown);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
