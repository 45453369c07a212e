//! Simulation as the special case `forall exists always eq`.

use hyperprove::solver::check_simulation;
use hyperprove::Lts;

fn main() -> hyperprove::Result<()> {
    let ts1 = Lts::parse("lts TS1 { states q0 q1 q2; init q0; q0 -a-> q1; q0 -a-> q2; q1 -b-> q1; q2 -c-> q2; }")?;
    let ts2 = Lts::parse("lts TS2 { states s0 s1; init s0; s0 -a-> s1; s1 -b-> s1; s1 -c-> s1; }")?;

    let fwd = check_simulation(&ts1, &ts2)?;
    println!("TS1 <= TS2:\n{}", fwd.report(true));

    let back = check_simulation(&ts2, &ts1)?;
    println!("TS2 <= TS1:\n{}", back.report(false));
    Ok(())
}
