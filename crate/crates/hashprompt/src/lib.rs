//! Bias-aware prompt hashing and a replayable evaluation harness for LLM
//! reasoning experiments.
//!
//! The core idea: when a prompt contains surface forms that nudge a model
//! toward stereotyped answers ("colorful coat", "reading", "fox"), replace
//! each of them with a unique meaningless identifier (`cdf14`, `rfg5a`, ...).
//! Unlike masking with a fixed symbol, the identifiers stay referenceable
//! across the text, so the logical structure of the task survives while the
//! associative cues do not. This crate bundles that transformation together
//! with everything needed to measure its effect:
//!
//! * [`hasher`] — hashing, dehashing and masking of free text under a
//!   [`hasher::HashingScheme`].
//! * [`corpus`] — small CSV transaction tables and the value bijections that
//!   derive the scrambled (`wrong`) and identifier-only (`hashed`) dataset
//!   variants from the factual one.
//! * [`miner`] — ground-truth frequent-itemset mining (level-wise Apriori plus
//!   an independent brute-force oracle).
//! * [`prompts`] — the catalog of prompt templates for all experiment
//!   variants, reproduced byte-for-byte.
//! * [`gateway`] — a chat-completion client with record/replay cassettes,
//!   retry, and rate limiting; replay mode needs no network and no API keys.
//! * [`judge`] — response parsing and scoring: option-choice verdicts for the
//!   Linda-style tasks, precision/recall/hallucination scoring for the
//!   itemset task.
//! * [`stats`] — 2×2 contingency statistics: Yates-corrected chi-square,
//!   two-sided Fisher exact test, Cramér's V with Cohen interpretation.
//! * [`runner`] — config-driven experiment orchestration and report emission.
//!
//! # Examples
//!
//! The `examples/` directory is the front door; each file is a runnable tour
//! of one capability:
//!
//! * `cargo run -p hashprompt --example hash_vs_mask` — hashing vs masking on
//!   a three-sentence text, with the round trip back.
//! * `cargo run -p hashprompt --example derive_datasets` — derive the wrong
//!   and hashed tables from the factual one via value bijections.
//! * `cargo run -p hashprompt --example mine_itemsets` — frequent itemsets of
//!   all three tables, Apriori vs brute force.
//! * `cargo run -p hashprompt --example render_prompts` — print the template
//!   catalog.
//! * `cargo run -p hashprompt --example score_response` — parse and score a
//!   model-style answer against the mining oracle.
//! * `cargo run -p hashprompt --example contingency_stats` — the statistical
//!   battery over published result tallies.
//! * `cargo run -p hashprompt --example replay_experiment` — run a bundled
//!   experiment plan from its cassette and print the report.
//! * `cargo run -p hashprompt --example build_cassettes` — regenerate the
//!   bundled replay cassettes from the published tallies.
//!
//! The same operations are scriptable through the thin `hashprompt` binary
//! (`render`, `hash`, `derive`, `mine`, `run`, `score`, `stats`, `report`).

pub mod corpus;
pub mod fixtures;
pub mod gateway;
pub mod hasher;
pub mod judge;
pub mod miner;
pub mod prompts;
pub mod runner;
pub mod stats;
