//! Runs a bundled experiment plan against its checked-in cassette.
//!
//! Replay mode needs no network and no API keys: every prompt is rendered,
//! looked up in the cassette by its content digest, scored, aggregated,
//! and compared — the exact pipeline a live run would use, minus the HTTP
//! call. The printed markdown report ends with the configured statistical
//! pairings.
//!
//! ```text
//! cargo run -p hashprompt --example replay_experiment               # exp1
//! cargo run -p hashprompt --example replay_experiment -- PLAN.toml  # any plan
//! ```

use std::path::PathBuf;

use hashprompt::runner::{run_plan, ExperimentPlan, ProviderCatalog};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan_path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            // Default to the bundled free-text plan, wherever we run from.
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/plans/exp1_linda.toml")
        });

    let plan = ExperimentPlan::load(&plan_path)?;
    println!(
        "plan {} from {}: {} trial blocks, {} pairings\n",
        plan.id,
        plan_path.display(),
        plan.trials.len(),
        plan.pairings.len()
    );

    // Replay needs no provider presets at all.
    let outcome = run_plan(&plan, &ProviderCatalog::default())?;
    print!("{}", outcome.markdown);

    println!(
        "\n{} trials scored, {} refusals, {} transport errors",
        outcome.scored.len(),
        outcome.refusals,
        outcome.transport_errors
    );
    Ok(())
}
