//! Regenerates the bundled data files that are derived from code: the
//! replay cassettes (reconstructed from published per-condition tallies),
//! the substitution scheme files, and the dataset value-bijection maps.
//!
//! ```text
//! cargo run -p hashprompt --example build_cassettes [-- DATA_DIR]
//! ```
//!
//! `DATA_DIR` defaults to `data/` in the current directory. Output is
//! byte-stable: running this twice changes nothing, and the test suite
//! checks the checked-in files match what this program writes.

use std::error::Error;
use std::path::PathBuf;

use hashprompt::corpus::{hashed_value_bijection, wrong_value_bijection, ValueBijection};
use hashprompt::fixtures;
use hashprompt::hasher::{linda_scheme, tabular_linda_scheme};

fn bijection_file(bijection: &ValueBijection, comment: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {comment}\n"));
    out.push_str(&format!("# scope: {:?}\n", bijection.scope()));
    for (source, target) in bijection.pairs() {
        out.push_str(&format!("{source} => {target}\n"));
    }
    out
}

fn main() -> Result<(), Box<dyn Error>> {
    let data_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"));

    let cassette_dir = data_dir.join("cassettes");
    std::fs::create_dir_all(&cassette_dir)?;
    for (stem, cassette) in fixtures::all_cassettes() {
        let path = cassette_dir.join(format!("{stem}.jsonl"));
        cassette.save(&path)?;
        println!("wrote {} ({} trials)", path.display(), cassette.len());
    }

    let scheme_dir = data_dir.join("schemes");
    std::fs::create_dir_all(&scheme_dir)?;
    for (name, scheme) in [
        ("linda.scheme", linda_scheme()),
        ("tabular.scheme", tabular_linda_scheme()),
    ] {
        let path = scheme_dir.join(name);
        std::fs::write(&path, format!("{scheme}\n"))?;
        println!("wrote {} ({} entries)", path.display(), scheme.len());
    }

    let bijection_dir = data_dir.join("bijections");
    std::fs::create_dir_all(&bijection_dir)?;
    for (name, bijection, comment) in [
        (
            "wrong.map",
            wrong_value_bijection(),
            "trait scrambling: factual table -> wrong table",
        ),
        (
            "hashed.map",
            hashed_value_bijection(),
            "identifier substitution: factual table -> hashed table",
        ),
    ] {
        let path = bijection_dir.join(name);
        std::fs::write(&path, bijection_file(&bijection, comment))?;
        println!(
            "wrote {} ({} pairs)",
            path.display(),
            bijection.pairs().len()
        );
    }

    Ok(())
}
