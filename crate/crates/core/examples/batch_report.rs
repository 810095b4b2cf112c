//! Evaluates a generated manifest in parallel and writes tables and histograms.

use groundcam::cli::{cmd_eval, cmd_gen_fixtures, FixtureKind, GenArgs, RunConfig};
use groundcam::report::{render_table, TableFormat};

fn main() -> groundcam::Result<()> {
    let root = std::env::temp_dir().join("groundcam-batch-example");
    let mut gen = GenArgs::new(FixtureKind::Random, root.join("fixtures"));
    gen.n = 200;
    gen.seed = 3;
    let manifest = cmd_gen_fixtures(&gen)?;

    let mut run = RunConfig::new(manifest, root.join("report"));
    run.group_by = "dataset,model".parse()?;
    run.svg = true;
    let outcome = cmd_eval(&run)?;

    print!("{}", outcome.table);
    println!();
    print!("{}", render_table(&outcome.rows, TableFormat::Csv)?);
    println!();
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
