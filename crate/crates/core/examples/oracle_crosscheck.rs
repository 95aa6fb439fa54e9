// The fixpoint checker against brute-force path enumeration on a few
// random small traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewmon::automaton::build_ta;
use skewmon::checker::check;
use skewmon::lattice::{LatticeStore, Predicates};
use skewmon::oracle::{oracle_check, oracle_horizon};
use skewmon::trace::ProcessStream;
use skewmon::{parse_formula, Quantum, TraceRecord};

pub fn run_example() -> Result<(), skewmon::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let procs = vec!["P1".to_string(), "P2".to_string()];
    let formulas = ["A<>[0,12] P1.a && P2.a", "E<>[4,9] P1.a", "A[][0,6] P1.a || T>=3", "E[][2,20] !P2.a"];
    let mut compared = 0;
    while compared < 8 {
        let mut preds = Predicates::new();
        let text = formulas[compared % formulas.len()];
        let f = parse_formula(text)?.try_map_leaves(&mut |n: &String| preds.resolve(n, &procs))?;
        let mut store = LatticeStore::new(procs.clone(), preds);
        let mut ok = true;
        for (k, name) in procs.iter().enumerate() {
            let mut stream = ProcessStream::new(k, name.clone(), 1, Quantum::default());
            let mut t = 0;
            for i in 0..4 {
                t += rng.random_range(1..=4);
                let rec = TraceRecord::new(name.as_str(), i, t).with_atom("a", rng.random_bool(0.5));
                if let Some(s) = stream.ingest_record(&rec)? {
                    ok &= store.advance(s).is_ok();
                }
            }
        }
        if !ok {
            continue; // inconsistent first global state, draw again
        }
        let fast = check(&build_ta(&store)?, &f)?.verdict;
        let slow = oracle_check(&store, &f, oracle_horizon(&store, &f))?;
        println!("{text:<26} {} CGSs  checker {fast:<12} oracle {slow}", store.len());
        assert_eq!(fast, slow);
        compared += 1;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
