//! Checking finite logs against a formula with derivatives.

use std::path::Path;

use hyperprove::cli::{monitor_spec, parse_events, Flags};
use hyperprove::decl::SpecFile;

fn main() -> hyperprove::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let echo = SpecFile::load(dir.join("echo.spec"))?;
    let wu = SpecFile::load(dir.join("weak_until.spec"))?;
    let cases = [
        (&echo, "out(1) out(2)", "out(2) out(0)"),
        (&echo, "out(1) out(2)", "out(2) out(1)"),
        (&wu, "a a a", "a b b"),
        (&wu, "a a", "b a"),
    ];
    for (spec, l, r) in cases {
        let out = monitor_spec(spec, &[parse_events(l)?, parse_events(r)?], &Flags::default());
        print!("[{l}] vs [{r}] -> {}", out.report);
    }
    Ok(())
}
