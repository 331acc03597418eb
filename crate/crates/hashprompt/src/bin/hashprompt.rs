//! Thin command-line front end over the library.
//!
//! Every subcommand maps onto one library call; the richer, commented
//! walkthroughs live in `examples/`. Exit codes: 0 on full success, 1 on
//! operational errors (bad paths, malformed config), 2 when a run finished
//! but at least one trial carries an error status.

use std::error::Error;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hashprompt::corpus::Dataset;
use hashprompt::gateway::Cassette;
use hashprompt::hasher::{self, HashingScheme};
use hashprompt::miner::{apriori, MiningTask};
use hashprompt::prompts::PromptVariant;
use hashprompt::runner::{self, ExperimentPlan, ProviderCatalog, RunMode};
use hashprompt::stats::{self, ContingencyTable2x2};

#[derive(Parser)]
#[command(
    name = "hashprompt",
    version,
    about = "Bias-aware prompt hashing and a replayable evaluation harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Apply {
    /// Replace each configured surface form with its identifier.
    #[default]
    Hash,
    /// Replace each configured surface form with a fixed placeholder.
    Mask,
    /// Map identifiers back to their surface forms.
    Dehash,
}

#[derive(Subcommand)]
enum Command {
    /// Print a prompt template, or list all template paths.
    Render {
        /// Template path such as `linda-free-text/original` or
        /// `itemset/correct/3`; omit to list the catalog.
        variant: Option<String>,
    },
    /// Hash, mask, or dehash a text using a substitution scheme.
    Hash {
        /// Scheme file (`surface | identifier | description? | note?` per
        /// line); defaults to the built-in two-option scheme.
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Which direction to apply.
        #[arg(long, value_enum, default_value_t)]
        apply: Apply,
        /// Input file; reads stdin when omitted.
        input: Option<PathBuf>,
    },
    /// Print a bundled transaction table as CSV.
    Derive {
        /// `correct`, `wrong`, or `hashed`; omit for all three.
        dataset: Option<String>,
    },
    /// Mine frequent itemsets from a bundled table.
    Mine {
        /// `correct`, `wrong`, or `hashed`; omit for all three.
        dataset: Option<String>,
        #[arg(long, default_value_t = 2)]
        min_support: u32,
        /// Itemset length 1-5; omit for all lengths.
        #[arg(long)]
        length: Option<u32>,
    },
    /// Execute an experiment plan and write its artifacts.
    Run {
        /// Plan file (TOML).
        plan: PathBuf,
        /// Provider catalog (TOML); required for live or record mode.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the plan's cassette path.
        #[arg(long)]
        cassette: Option<PathBuf>,
        /// Permit network calls. Without this flag the plan runs in
        /// replay mode regardless of what it declares.
        #[arg(long)]
        live: bool,
        /// Override the plan's artifact directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score the raw trial records in a cassette.
    Score {
        /// Cassette of trial records (JSONL).
        #[arg(long)]
        cassette: PathBuf,
        /// Write scored records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Statistics for one 2x2 contingency table.
    Stats {
        /// The four cells: LEFT_SUCCESSES LEFT_FAILURES RIGHT_SUCCESSES
        /// RIGHT_FAILURES.
        cells: Vec<u64>,
    },
    /// Replay a plan and print its markdown report without side effects.
    Report {
        /// Plan file (TOML).
        plan: PathBuf,
        /// Override the plan's cassette path.
        #[arg(long)]
        cassette: Option<PathBuf>,
        /// Also write artifacts into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Box<dyn Error>> {
    match path {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn parse_dataset(name: &str) -> Result<Dataset, Box<dyn Error>> {
    Dataset::parse(name).ok_or_else(|| {
        format!("unknown dataset {name:?}; expected correct, wrong, or hashed").into()
    })
}

fn selected_datasets(name: Option<&String>) -> Result<Vec<Dataset>, Box<dyn Error>> {
    match name {
        Some(name) => Ok(vec![parse_dataset(name)?]),
        None => Ok(Dataset::ALL.to_vec()),
    }
}

fn load_plan(
    path: &Path,
    cassette: Option<PathBuf>,
    out: Option<PathBuf>,
    live: bool,
) -> Result<ExperimentPlan, Box<dyn Error>> {
    let mut plan = ExperimentPlan::load(path)?;
    if let Some(cassette) = cassette {
        plan.cassette = Some(cassette);
    }
    if let Some(out) = out {
        plan.out = Some(out);
    }
    if !live && plan.mode != RunMode::Replay {
        eprintln!(
            "note: plan declares {} mode; running as replay (pass --live to allow network calls)",
            plan.mode.as_str()
        );
        plan.mode = RunMode::Replay;
    }
    plan.validate()?;
    Ok(plan)
}

fn execute_plan(plan: &ExperimentPlan, config: Option<&PathBuf>) -> Result<u8, Box<dyn Error>> {
    let providers = match config {
        Some(path) => ProviderCatalog::load(path)?,
        None if plan.mode == RunMode::Replay => ProviderCatalog::default(),
        None => return Err("live or record mode needs --config with provider presets".into()),
    };
    let outcome = runner::run_plan(plan, &providers)?;
    print!("{}", outcome.markdown);
    if let Some(dir) = &plan.out {
        let paths = runner::write_artifacts(&outcome, dir)?;
        for path in paths {
            eprintln!("wrote {}", path.display());
        }
    }
    if outcome.fully_successful() {
        Ok(0)
    } else {
        eprintln!(
            "{} trial(s) ended with a transport error; see the scored records",
            outcome.transport_errors
        );
        Ok(2)
    }
}

fn run(cli: Cli) -> Result<u8, Box<dyn Error>> {
    match cli.command {
        Command::Render { variant } => {
            match variant {
                Some(path) => {
                    let variant: PromptVariant = path.parse()?;
                    print!("{}", variant.render()?.text);
                }
                None => {
                    for variant in PromptVariant::catalog() {
                        println!("{variant}");
                    }
                }
            }
            Ok(0)
        }
        Command::Hash {
            scheme,
            apply,
            input,
        } => {
            let scheme = match scheme {
                Some(path) => HashingScheme::parse(&std::fs::read_to_string(path)?)?,
                None => hasher::linda_scheme(),
            };
            let text = read_input(input.as_ref())?;
            let output = match apply {
                Apply::Hash => hasher::hash_text(&text, &scheme)?,
                Apply::Mask => hasher::mask_text(&text, &scheme),
                Apply::Dehash => hasher::dehash_text(&text, &scheme),
            };
            print!("{output}");
            Ok(0)
        }
        Command::Derive { dataset } => {
            for dataset in selected_datasets(dataset.as_ref())? {
                println!("# {}", dataset.name());
                println!("{}", dataset.table().to_csv());
            }
            Ok(0)
        }
        Command::Mine {
            dataset,
            min_support,
            length,
        } => {
            let lengths: Vec<u32> = match length {
                Some(length) => vec![length],
                None => (1..=5).collect(),
            };
            for dataset in selected_datasets(dataset.as_ref())? {
                println!("# {}", dataset.name());
                let table = dataset.table();
                for &length in &lengths {
                    let task = MiningTask::new(min_support, length)?;
                    let itemsets = apriori(&table, &task)?;
                    println!("set_length_{length}: {} itemset(s)", itemsets.len());
                    for itemset in itemsets {
                        let items: Vec<String> =
                            itemset.items().iter().map(|i| format!("{i:?}")).collect();
                        println!("  {{{}}} support {}", items.join(", "), itemset.support());
                    }
                }
                println!();
            }
            Ok(0)
        }
        Command::Run {
            plan,
            config,
            cassette,
            live,
            out,
        } => {
            let plan = load_plan(&plan, cassette, out, live)?;
            execute_plan(&plan, config.as_ref())
        }
        Command::Report {
            plan,
            cassette,
            out,
        } => {
            let explicit_out = out.is_some();
            let mut plan = load_plan(&plan, cassette, out, false)?;
            if !explicit_out {
                plan.out = None;
            }
            execute_plan(&plan, None)
        }
        Command::Score { cassette, out } => {
            let records = Cassette::load(&cassette)?;
            let scored = runner::score_records(records.records())?;
            let mut lines = String::new();
            for trial in &scored {
                lines.push_str(&serde_json::to_string(trial)?);
                lines.push('\n');
            }
            match out {
                Some(path) => {
                    std::fs::write(&path, lines)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{lines}"),
            }
            Ok(0)
        }
        Command::Stats { cells } => {
            let [a, b, c, d]: [u64; 4] = cells
                .as_slice()
                .try_into()
                .map_err(|_| "stats expects exactly four cell counts: A B C D")?;
            let table = ContingencyTable2x2::new(a, b, c, d)?;
            match stats::summarize(&table) {
                Ok(summary) => println!("{summary}"),
                Err(_) => {
                    println!("table      = [[{a}, {b}], [{c}, {d}]]");
                    println!(
                        "degenerate table (a zero margin); Fisher p = {}",
                        stats::format_p(stats::fisher_exact(&table))
                    );
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
