//! Running proof scripts from spec files, including a broken one.

use std::path::Path;

use hyperprove::cli::{prove_spec, Flags};
use hyperprove::decl::SpecFile;
use hyperprove::kernel::parse_script;

fn main() -> hyperprove::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    for name in ["echo", "incr", "swap", "align", "weak_until", "simulation"] {
        let spec = SpecFile::load(dir.join(format!("{name}.spec")))?;
        let out = prove_spec(&spec, &Flags::default());
        print!("[{name}] exit {}\n{}", out.code, out.report);
    }

    let mut spec = SpecFile::load(dir.join("incr.spec"))?;
    spec.proof = Some(parse_script(
        "init. left 1. right 1. invariant (2 * l.x == r.x). left 3. right 2. havoc_r 3. right 2. step. deriv. cycle. qed",
    )?);
    let out = prove_spec(&spec, &Flags::default());
    print!("[incr, havoc_r 3] exit {}\n{}", out.code, out.report);
    Ok(())
}
