//! Solving a forall-exists query with a weak-until formula.

use hyperprove::relspec::{AtomTable, Formula};
use hyperprove::solver::{check_hyper, oracle_region, Caps, HyperQuery};
use hyperprove::Lts;

fn main() -> hyperprove::Result<()> {
    let left = Lts::parse("lts L { states q0; init q0; q0 -a-> q0; }")?;
    let right = Lts::parse("lts R { states s0 s1; init s0; s0 -a-> s1; s1 -b-> s1; }")?;
    let atoms = AtomTable::parse(
        "atom a1(e1, e2) := e1 is a;
         atom a2(e1, e2) := e2 is a;
         atom b2(e1, e2) := e2 is b;",
    )?;
    let formula = Formula::parse("(a1 and a2) weakuntil b2")?;
    let q = HyperQuery::new(vec![left], vec![right], formula, atoms);

    let res = check_hyper(&q, &Caps::default())?;
    print!("{}", res.report(true));
    let agrees = oracle_region(&res.arena) == res.region.winning;
    println!("attractor oracle agrees: {agrees}");
    Ok(())
}
