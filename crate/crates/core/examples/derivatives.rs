//! Formula derivatives, closures and the two lasso evaluators.

use hyperprove::relspec::{
    closure, derive, lasso_models_derivative, lasso_models_direct, nonempty, AtomTable, Formula, DEFAULT_CLOSURE_CAP,
};
use hyperprove::{EventLabel, Lasso};

fn main() -> hyperprove::Result<()> {
    let atoms = AtomTable::parse(
        "atom a1(e1, e2) := e1 is a;
         atom a2(e1, e2) := e2 is a;
         atom b2(e1, e2) := e2 is b;",
    )?;
    let f = Formula::parse("(a1 and a2) weakuntil b2")?;
    let a = EventLabel::sym("a");
    let b = EventLabel::sym("b");

    let once = derive(&f, &[a.clone(), a.clone()], &atoms);
    let twice = derive(&once, &[a.clone(), b.clone()], &atoms);
    println!("{f}\n  after (a, a): {once}\n  after (a, b): {twice}");
    println!("  after (b, a): {}", derive(&f, &[b.clone(), a.clone()], &atoms));

    let alphabets = vec![vec![a.clone(), b.clone()], vec![a, b]];
    let (store, g) = closure(&f, &alphabets, &atoms, DEFAULT_CLOSURE_CAP)?;
    println!("closure: {} formulas, {} tuple classes", g.len(), g.num_classes());
    for &n in g.nodes() {
        println!("  {}  nonempty={}", store.to_formula(n), g.nonempty(n));
    }
    println!("satisfiable: {}", nonempty(&f, &alphabets, &atoms)?);

    for (l, r) in [("a^w", "a b^w"), ("a^w", "b a^w"), ("a^w", "a^w")] {
        let pair = [Lasso::parse(l)?, Lasso::parse(r)?];
        let direct = lasso_models_direct(&pair, &f, &atoms)?;
        let deriv = lasso_models_derivative(&pair, &f, &atoms)?;
        println!("({l}, {r}): direct={direct} derivative={deriv}");
    }
    Ok(())
}
