//! Driving the proof kernel rule by rule on the echo example.

use hyperprove::imp::parse_program;
use hyperprove::kernel::{Kernel, KernelOptions, SyncOutcome, System, SystemDef, TExpr};
use hyperprove::relspec::{AtomTable, Formula};

fn main() -> hyperprove::Result<()> {
    let echo = || System { name: "echo".into(), def: SystemDef::Imp(parse_program("loop { input x; output x }").unwrap()) };
    let atoms = AtomTable::parse("atom double(e1, e2) := (e1 is out(x)) implies (e2 == out(2 * x));")?;
    let opts = KernelOptions { modulus: 4, ..Default::default() };
    let mut k = Kernel::new(echo(), echo(), &Formula::parse("always double")?, atoms, &opts)?;

    let g = k.init();
    println!("init:   {}", k.describe(&g));
    let g = match k.sync(&g).expect("sync") {
        SyncOutcome::Synced(g) | SyncOutcome::Stopped(g, _) => g,
    };
    println!("sync:   {}", k.describe(&g));
    match k.cycle(&g) {
        Ok(()) => unreachable!(),
        Err(e) => println!("cycle refused: {e}"),
    }
    let reply = TExpr::Mul(Box::new(TExpr::Const(2)), Box::new(TExpr::Name("v1".into())));
    let g = k.step_io(&g, Some(&reply)).expect("input-input");
    println!("step:   {}", k.describe(&g));
    let g = k.deriv(&g).expect("deriv");
    println!("deriv:  {}", k.describe(&g));
    let g = k.step_io(&g, None).expect("output-output");
    let g = k.deriv(&g).expect("deriv");
    println!("deriv:  {}", k.describe(&g));
    k.cycle(&g).expect("cycle");
    println!("closed by cycle");

    println!("trace:");
    for app in k.trace() {
        println!("  {:<14} {:?} -> {:?}", app.rule.to_string(), app.before, app.after);
    }
    Ok(())
}
