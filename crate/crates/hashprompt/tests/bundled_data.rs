//! Keeps the checked-in `data/` tree honest: every file that is derived
//! from code (replay cassettes, scheme files, bijection maps) must parse
//! back to the builtin value and byte-match what the `build_cassettes`
//! example would write today.

use std::path::PathBuf;

use hashprompt::corpus::{hashed_value_bijection, wrong_value_bijection, ValueBijection};
use hashprompt::fixtures;
use hashprompt::gateway::Cassette;
use hashprompt::hasher::{linda_scheme, tabular_linda_scheme, HashingScheme};

fn data(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(path)
}

fn read(path: &str) -> String {
    let path = data(path);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{} unreadable: {e}", path.display()))
}

#[test]
fn checked_in_cassettes_match_the_fixture_generators_byte_for_byte() {
    for (stem, cassette) in fixtures::all_cassettes() {
        let on_disk = read(&format!("cassettes/{stem}.jsonl"));
        assert_eq!(
            cassette.to_jsonl(),
            on_disk,
            "{stem}.jsonl drifted from fixtures::all_cassettes(); \
             rerun the build_cassettes example"
        );
        let parsed = Cassette::parse(&on_disk).unwrap();
        assert_eq!(parsed.len(), cassette.len());
    }
}

#[test]
fn checked_in_schemes_parse_back_to_the_builtins() {
    for (file, builtin) in [
        ("schemes/linda.scheme", linda_scheme()),
        ("schemes/tabular.scheme", tabular_linda_scheme()),
    ] {
        let text = read(file);
        assert_eq!(HashingScheme::parse(&text).unwrap(), builtin, "{file}");
        assert_eq!(text, format!("{builtin}\n"), "{file} formatting drifted");
    }
}

#[test]
fn checked_in_bijection_maps_parse_back_to_the_builtins() {
    for (file, builtin) in [
        ("bijections/wrong.map", wrong_value_bijection()),
        ("bijections/hashed.map", hashed_value_bijection()),
    ] {
        let text = read(file);
        let parsed = ValueBijection::parse(&text, builtin.scope()).unwrap();
        assert_eq!(parsed, builtin, "{file}");
        assert!(
            text.contains(&format!("# scope: {:?}", builtin.scope())),
            "{file} must record its scope"
        );
    }
}
