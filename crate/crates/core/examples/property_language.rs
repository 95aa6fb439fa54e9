// Parsing formulas, the clock-constraint rewrite, and predicate
// evaluation.

use skewmon::logic::{eval_state_pred, LabelSet};
use skewmon::{parse_formula, to_ctl, PropertySet};

pub fn run_example() -> Result<(), skewmon::Error> {
    for text in ["A<>[0,15000] a", "E[][2,7] !a || T>=5", "A[][0,10] a -> b && c"] {
        let f = parse_formula(text)?;
        println!("{text:<24} parsed {f}    ctl {}", to_ctl(&f));
    }
    match parse_formula("A<>[0,5] (E<>[0,3] a)") {
        Err(e) => println!("nested modality rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // a property file: definitions and formulas, `#` comments
    let props = PropertySet::parse("# robots at the assembly point\nat := R1.front && R2.front\nA<>[0,15000] at\n")?;
    for (id, f) in &props.formulas {
        println!("{id}: {f}");
    }

    // state predicates over predicate ids
    let phi = parse_formula("E<>[0,20] a && T<=15")?.try_map_leaves(&mut |_: &String| Ok::<_, ()>(0)).unwrap().phi;
    let labels: LabelSet = [0].into_iter().collect();
    println!("a && T<=15 at t=12: {}", eval_state_pred(&phi, &labels, 12, false, None)?);
    println!("a && T<=15 at t=16: {}", eval_state_pred(&phi, &labels, 16, false, None)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
