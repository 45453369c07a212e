//! Compiling an IMP_io program to a finite LTS.

use hyperprove::imp::{compile_lts, parse_program, ImpOptions};

fn main() -> hyperprove::Result<()> {
    let echo = parse_program("loop { input x; output x }")?;
    let c = compile_lts("echo", &echo, &ImpOptions::with_modulus(2))?;
    println!("{} states", c.lts.num_states());
    for s in c.lts.states() {
        println!("  {} = {}", c.lts.state_name(s), c.config(s));
    }
    for t in c.lts.transitions() {
        let label = t.label.as_ref().map_or("tau".to_string(), ToString::to_string);
        println!("  {} -{label}-> {}", c.lts.state_name(t.src), c.lts.state_name(t.dst));
    }

    let incr = parse_program("x := 0; loop { x := x + 1; output x }")?;
    let opts = ImpOptions { input_domain: Some(vec![0, 1]), ..ImpOptions::with_modulus(8) };
    println!("incr at M=8: {} states", compile_lts("incr", &incr, &opts)?.lts.num_states());
    Ok(())
}
