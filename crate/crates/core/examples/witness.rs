//! Turning a winning strategy into existential traces.

use hyperprove::relspec::{lasso_models_direct, AtomTable, Formula};
use hyperprove::solver::{check_hyper, extract_witness, Caps, HyperQuery};
use hyperprove::{Lasso, Lts};

fn main() -> hyperprove::Result<()> {
    let ts = Lts::parse("lts TS { states s0 s1 s2; init s0; alphabet a b; s0 -> s1; s0 -> s2; s1 -a-> s1; s2 -b-> s2; }")?;
    let atoms = AtomTable::parse("atom swap(e1, e2) := (e1 is a and e2 is b) or (e1 is b and e2 is a);")?;
    let q = HyperQuery::new(vec![ts.clone()], vec![ts.clone()], Formula::parse("always swap")?, atoms);
    let res = check_hyper(&q, &Caps::default())?;
    assert!(res.is_proved());

    for word in ts.enumerate_lassos(ts.init(), 3)? {
        let run = ts.realize(&word).expect("enumerated lassos are traces");
        let w = extract_witness(&res, &[run])?;
        let pair = [word.clone(), w.words[0].clone()];
        let ok = lasso_models_direct(&pair, &res.formula, &res.atoms)?;
        println!("{word}  ->  {}  (satisfies: {ok})", w.words[0]);
    }

    let wrong = Lasso::parse("a b^w")?;
    println!("{wrong} realizable: {}", ts.realize(&wrong).is_some());
    Ok(())
}
