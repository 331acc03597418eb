//! Deterministic replay cassettes for all four experiments.
//!
//! Live responses from the studied chat models cannot be redistributed, so
//! these builders reconstruct, for every trial, a response whose *scored*
//! outcome matches the published result tables exactly: per-model answer
//! tallies for the two-option problems, and per-dataset found / not-found /
//! hallucination totals (plus the four outcome categories where published)
//! for the mining task. Where the sources only give aggregates, trials are
//! filled in by a fixed canonical rule, so the cassettes are byte-stable
//! across rebuilds and the aggregate numbers — not the individual wordings
//! — are the ground truth being preserved.
//!
//! Canonical filling rules:
//! - Two-option runs emit correct answers first, then conjunction answers,
//!   then non-answers, with 1-based iteration numbers.
//! - Mining runs: 5 repetitions × lengths 1–5 per dataset. Outcome
//!   categories are dealt to (repetition, length) cells repetition-major,
//!   lengths ordered by oracle size descending (3, 2, 4, 1, 5). Missed
//!   itemsets go one-per-lower-recall-run, remainder front-filled; each
//!   lower-precision run hallucinates exactly one set (the minimum
//!   consistent with the category counts). A missed run drops oracle sets
//!   from the front; hallucinated sets are below-support-threshold value
//!   combinations, so they can never collide with true itemsets.

use crate::corpus::Dataset;
use crate::gateway::{Cassette, TrialKey, TrialRecord, TrialStatus};
use crate::judge::{LindaChoice, OutputCategory};
use crate::miner::{self, MiningTask};
use crate::prompts::{AnswerKey, LindaForm, LindaOptions, PromptVariant, TabularForm};
use itertools::Itertools;
use std::collections::BTreeSet;

/// Fixed timestamp so rebuilt cassettes are byte-identical.
pub const FIXED_TIMESTAMP: &str = "2025-01-01T00:00:00Z";

/// The four chat models of the free-text two-option experiment.
pub const EXP1_MODELS: [&str; 4] = ["gemini", "gpt-3.5", "gpt-4-copilot", "llama-2-70b"];
/// The two models of the itemset-mining experiment.
pub const EXP2_MODELS: [&str; 2] = ["gpt-4o", "llama-3.1-405b"];
/// The five models of the tabular two-option experiment.
pub const EXP3_MODELS: [&str; 5] = [
    "gpt-4o",
    "gemini",
    "llama-3.1-70b-instruct",
    "llama-3.1-405b-instruct",
    "mixtral-large-2",
];
/// The two reasoning-mode models compared in the fourth experiment.
pub const EXP4_MODELS: [&str; 2] = ["chatgpt-o3-mini", "gemini-2-flash-thinking"];

/// Minimum support shared by every mining task here.
const MIN_SUPPORT: u32 = 2;
/// Oracle sizes per itemset length (index = length − 1) for each built-in
/// dataset; identical across datasets because they differ by a bijection.
const ORACLE_SIZES: [u32; 5] = [6, 14, 16, 9, 2];
/// Cell order within one repetition: lengths by oracle size descending.
const LENGTH_ORDER: [u32; 5] = [3, 2, 4, 1, 5];
/// Hallucinations per run are capped so the spread stays readable.
const MAX_HALLUCINATIONS_PER_RUN: u32 = 4;

// ---------------------------------------------------------------------------
// Two-option trial synthesis
// ---------------------------------------------------------------------------

/// (correct, conjunction, no-answer) counts for one model and variant.
type AnswerTally = (u32, u32, u32);

fn linda_response(options: &LindaOptions, choice: LindaChoice) -> String {
    match choice {
        LindaChoice::NonConjunction => {
            if options.lettered {
                format!("A) {}", options.correct)
            } else {
                format!("{}.", options.correct)
            }
        }
        LindaChoice::Conjunction => {
            if options.lettered {
                format!("B) {}", options.conjunction)
            } else {
                format!("{}.", options.conjunction)
            }
        }
        LindaChoice::Neither => "Neither. I need more information to decide.".to_string(),
    }
}

fn push_linda_trials(
    cassette: &mut Cassette,
    experiment: &str,
    model: &str,
    variant: PromptVariant,
    tally: AnswerTally,
) {
    let rendered = variant.render().expect("catalog variant renders");
    let AnswerKey::Linda(options) = rendered.answer_key else {
        panic!("two-option variant must carry a two-option answer key");
    };
    let mut iteration = 0;
    for (count, choice) in [
        (tally.0, LindaChoice::NonConjunction),
        (tally.1, LindaChoice::Conjunction),
        (tally.2, LindaChoice::Neither),
    ] {
        for _ in 0..count {
            iteration += 1;
            cassette.append(TrialRecord {
                key: TrialKey::new(
                    experiment,
                    variant.to_string(),
                    model,
                    iteration,
                    &rendered.text,
                ),
                prompt: rendered.text.clone(),
                response: linda_response(&options, choice),
                status: TrialStatus::Ok,
                timestamp: FIXED_TIMESTAMP.to_string(),
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Mining trial synthesis
// ---------------------------------------------------------------------------

/// One planned mining run: which cell, how many oracle sets to omit, and
/// how many fabricated sets to add.
#[derive(Debug, Clone, Copy)]
struct MiningRun {
    length: u32,
    rep: u32,
    misses: u32,
    hallucinations: u32,
}

fn empty_runs() -> Vec<MiningRun> {
    let mut runs = Vec::with_capacity(25);
    for rep in 1..=5 {
        for length in LENGTH_ORDER {
            runs.push(MiningRun {
                length,
                rep,
                misses: 0,
                hallucinations: 0,
            });
        }
    }
    runs
}

fn capacity(length: u32) -> u32 {
    ORACLE_SIZES[length as usize - 1]
}

/// Lays out 25 runs whose scored categories and total found count match a
/// published category column. `category_counts` is in the order of
/// [`OutputCategory::ALL`].
fn published_runs(category_counts: [u32; 4], total_misses: u32) -> Vec<MiningRun> {
    let categories: Vec<OutputCategory> = category_counts
        .iter()
        .zip(OutputCategory::ALL)
        .flat_map(|(&count, category)| std::iter::repeat_n(category, count as usize))
        .collect();
    assert_eq!(categories.len(), 25, "category counts must cover 25 runs");

    let mut runs = empty_runs();
    for (run, category) in runs.iter_mut().zip(&categories) {
        if matches!(
            category,
            OutputCategory::PerfectRecallLowerPrecision | OutputCategory::LowerPrecisionLowerRecall
        ) {
            run.hallucinations = 1;
        }
    }

    let lower_recall: Vec<usize> = categories
        .iter()
        .enumerate()
        .filter(|(_, category)| {
            matches!(
                category,
                OutputCategory::PerfectPrecisionLowerRecall
                    | OutputCategory::LowerPrecisionLowerRecall
            )
        })
        .map(|(i, _)| i)
        .collect();
    let mut remaining = total_misses;
    for &i in &lower_recall {
        runs[i].misses = 1;
        remaining -= 1;
    }
    for &i in &lower_recall {
        let extra = remaining.min(capacity(runs[i].length) - runs[i].misses);
        runs[i].misses += extra;
        remaining -= extra;
    }
    assert_eq!(remaining, 0, "misses must fit the published categories");
    runs
}

/// Lays out 25 runs matching published found/hallucination totals when no
/// category breakdown was published: misses front-fill the canonical cell
/// order, hallucinations back-fill it a few per run.
fn totals_only_runs(total_misses: u32, total_hallucinations: u32) -> Vec<MiningRun> {
    let mut runs = empty_runs();
    let mut remaining = total_misses;
    for run in runs.iter_mut() {
        let take = remaining.min(capacity(run.length));
        run.misses = take;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    assert_eq!(remaining, 0, "misses exceed the oracle across 25 runs");

    let mut remaining = total_hallucinations;
    for run in runs.iter_mut().rev() {
        let take = remaining.min(MAX_HALLUCINATIONS_PER_RUN);
        run.hallucinations = take;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    assert_eq!(remaining, 0, "hallucinations exceed the layout budget");
    runs
}

/// Fabricates `count` distinct item sets of the given length that sit below
/// the support threshold and therefore can never appear in any oracle.
///
/// Candidates are value combinations ordered with the first column's values
/// (unique per row in every built-in dataset) in front, so low-support sets
/// are found immediately.
fn hallucinated_sets(dataset: Dataset, length: u32, count: u32) -> Vec<BTreeSet<String>> {
    if count == 0 {
        return Vec::new();
    }
    let table = dataset.table();
    let mut values: Vec<String> = table.rows().iter().map(|row| row[0].clone()).collect();
    let mut seen: BTreeSet<String> = values.iter().cloned().collect();
    for row in table.rows() {
        for value in &row[1..] {
            if seen.insert(value.clone()) {
                values.push(value.clone());
            }
        }
    }
    let sets: Vec<BTreeSet<String>> = values
        .into_iter()
        .combinations(length as usize)
        .map(|combo| combo.into_iter().collect::<BTreeSet<String>>())
        .filter(|set| {
            let support = table
                .rows()
                .iter()
                .filter(|row| set.iter().all(|item| row.iter().any(|cell| cell == item)))
                .count() as u32;
            support < MIN_SUPPORT
        })
        .take(count as usize)
        .collect();
    assert_eq!(sets.len(), count as usize, "not enough fabricable sets");
    sets
}

fn format_set<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let quoted: Vec<String> = items.into_iter().map(|item| format!("{item:?}")).collect();
    format!("{{{}}}", quoted.join(", "))
}

/// Builds the response text for one mining run: the kept oracle sets in
/// canonical order followed by any fabricated sets.
fn mining_response(dataset: Dataset, run: &MiningRun) -> String {
    let task = MiningTask::new(MIN_SUPPORT, run.length).expect("valid task");
    let oracle = miner::apriori(&dataset.table(), &task).expect("built-in dataset mines");
    assert!(run.misses <= oracle.len() as u32);
    let mut sets: Vec<String> = oracle
        .iter()
        .skip(run.misses as usize)
        .map(|itemset| format_set(itemset.items()))
        .collect();
    for set in hallucinated_sets(dataset, run.length, run.hallucinations) {
        sets.push(format_set(&set));
    }
    if sets.is_empty() {
        format!("set_length_{} = {{}}", run.length)
    } else {
        format!("set_length_{} = {}", run.length, sets.join(", "))
    }
}

fn push_mining_trials(
    cassette: &mut Cassette,
    experiment: &str,
    model: &str,
    dataset: Dataset,
    runs: &[MiningRun],
) {
    for run in runs {
        let variant = PromptVariant::Itemset {
            dataset,
            length: run.length,
        };
        let rendered = variant.render().expect("catalog variant renders");
        cassette.append(TrialRecord {
            key: TrialKey::new(
                experiment,
                variant.to_string(),
                model,
                run.rep,
                &rendered.text,
            ),
            prompt: rendered.text,
            response: mining_response(dataset, run),
            status: TrialStatus::Ok,
            timestamp: FIXED_TIMESTAMP.to_string(),
        });
    }
}

// ---------------------------------------------------------------------------
// The seven cassettes
// ---------------------------------------------------------------------------

/// Free-text two-option problem: 4 models × (20 original + 10 × 3 reworded
/// variants). The flagship result: identifier rewording flips several
/// models from always-fallacy to mostly-correct, while merely adding
/// neutral descriptions (the validation variant) does not.
pub fn exp1_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let per_form: [(LindaForm, [AnswerTally; 4]); 4] = [
        (
            LindaForm::Original,
            [(0, 1, 19), (0, 20, 0), (0, 20, 0), (0, 20, 0)],
        ),
        (
            LindaForm::HashedWithDescription,
            [(0, 10, 0), (3, 7, 0), (10, 0, 0), (0, 10, 0)],
        ),
        (
            LindaForm::HashedWithoutDescription,
            [(10, 0, 0), (3, 7, 0), (1, 9, 0), (0, 10, 0)],
        ),
        (
            LindaForm::Validation,
            [(0, 10, 0), (0, 10, 0), (0, 10, 0), (0, 10, 0)],
        ),
    ];
    for (form, tallies) in per_form {
        for (model, tally) in EXP1_MODELS.iter().zip(tallies) {
            // The agent-roleplay opener made this model refuse the reworded
            // and validation prompts, so those runs dropped it.
            let preamble = !(*model == "gpt-4-copilot" && form != LindaForm::Original);
            let variant = PromptVariant::LindaFreeText { form, preamble };
            push_linda_trials(&mut cassette, "exp1-linda", model, variant, tally);
        }
    }
    cassette
}

/// Itemset extraction: 2 models × 3 dataset variants × 5 lengths × 5
/// repetitions, with published category columns and found totals.
pub fn exp2_published_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let cases: [(&str, Dataset, [u32; 4], u32); 6] = [
        ("gpt-4o", Dataset::Correct, [14, 4, 6, 1], 213),
        ("gpt-4o", Dataset::Wrong, [13, 6, 2, 4], 212),
        ("gpt-4o", Dataset::Hashed, [15, 6, 4, 0], 225),
        ("llama-3.1-405b", Dataset::Correct, [7, 8, 10, 0], 194),
        ("llama-3.1-405b", Dataset::Wrong, [5, 11, 6, 3], 201),
        ("llama-3.1-405b", Dataset::Hashed, [5, 18, 0, 2], 230),
    ];
    for (model, dataset, categories, found) in cases {
        let runs = published_runs(categories, 235 - found);
        push_mining_trials(&mut cassette, "exp2-itemsets", model, dataset, &runs);
    }
    cassette
}

/// A flawless synthetic miner over every dataset: each run returns exactly
/// the oracle. Useful as a pipeline self-check — scoring must report every
/// itemset found and nothing hallucinated.
pub fn exp2_perfect_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    for dataset in Dataset::ALL {
        let runs = empty_runs();
        push_mining_trials(
            &mut cassette,
            "exp2-perfect",
            "perfect-miner",
            dataset,
            &runs,
        );
    }
    cassette
}

/// Tabular two-option problem: 5 models × 3 table variants × 10 runs.
pub fn exp3_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let per_form: [(TabularForm, [u32; 5]); 3] = [
        (TabularForm::NotHashed, [4, 0, 0, 0, 7]),
        (TabularForm::HashedWithoutRelationships, [7, 0, 8, 10, 7]),
        (TabularForm::HashedWithRelationships, [7, 0, 0, 7, 0]),
    ];
    for (form, correct_counts) in per_form {
        for (model, correct) in EXP3_MODELS.iter().zip(correct_counts) {
            // The agent-roleplay opener made this model refuse the reworded
            // tables, so those runs dropped it.
            let preamble = !(*model == "llama-3.1-70b-instruct" && form != TabularForm::NotHashed);
            let variant = PromptVariant::LindaTabular { form, preamble };
            push_linda_trials(
                &mut cassette,
                "exp3-tabular",
                model,
                variant,
                (correct, 10 - correct, 0),
            );
        }
    }
    cassette
}

/// Reasoning-mode models on the original free-text two-option prompt.
pub fn exp4_linda_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let variant = PromptVariant::LindaFreeText {
        form: LindaForm::Original,
        preamble: true,
    };
    for (model, tally) in EXP4_MODELS.iter().zip([(6, 4, 0), (10, 0, 0)]) {
        push_linda_trials(&mut cassette, "exp4-linda", model, variant, tally);
    }
    cassette
}

/// Reasoning-mode models on the plain and scrambled mining datasets; only
/// found / not-found / hallucination totals were published for these.
pub fn exp4_itemset_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let cases: [(&str, Dataset, u32, u32); 4] = [
        ("chatgpt-o3-mini", Dataset::Correct, 15, 9),
        ("chatgpt-o3-mini", Dataset::Wrong, 18, 18),
        ("gemini-2-flash-thinking", Dataset::Correct, 92, 18),
        ("gemini-2-flash-thinking", Dataset::Wrong, 46, 20),
    ];
    for (model, dataset, misses, hallucinations) in cases {
        let runs = totals_only_runs(misses, hallucinations);
        push_mining_trials(&mut cassette, "exp4-itemsets", model, dataset, &runs);
    }
    cassette
}

/// Reasoning-mode models on the plain tabular two-option prompt.
pub fn exp4_tabular_cassette() -> Cassette {
    let mut cassette = Cassette::new();
    let variant = PromptVariant::LindaTabular {
        form: TabularForm::NotHashed,
        preamble: true,
    };
    for (model, tally) in EXP4_MODELS.iter().zip([(3, 7, 0), (10, 0, 0)]) {
        push_linda_trials(&mut cassette, "exp4-tabular", model, variant, tally);
    }
    cassette
}

/// Every cassette with its file stem, in build order.
pub fn all_cassettes() -> Vec<(&'static str, Cassette)> {
    vec![
        ("exp1_linda", exp1_cassette()),
        ("exp2_itemsets", exp2_published_cassette()),
        ("exp2_perfect", exp2_perfect_cassette()),
        ("exp3_tabular", exp3_cassette()),
        ("exp4_linda", exp4_linda_cassette()),
        ("exp4_itemsets", exp4_itemset_cassette()),
        ("exp4_tabular", exp4_tabular_cassette()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::prompt_digest;
    use crate::judge::{self, ExperimentTally, ScoredTrial};
    use std::str::FromStr;

    /// Scores a cassette exactly the way a replayed run would: re-render
    /// the variant named in each key, check the stored prompt matches it
    /// byte for byte, then judge the stored response.
    fn score_cassette(cassette: &Cassette) -> Vec<ScoredTrial> {
        cassette
            .records()
            .iter()
            .map(|record| {
                let variant = PromptVariant::from_str(&record.key.variant).unwrap();
                let rendered = variant.render().unwrap();
                assert_eq!(record.prompt, rendered.text, "{}", record.key);
                assert_eq!(record.key.digest, prompt_digest(&rendered.text));
                judge::score_trial(record, &rendered.answer_key)
            })
            .collect()
    }

    fn tally(cassette: &Cassette) -> ExperimentTally {
        judge::aggregate(&score_cassette(cassette)).unwrap()
    }

    fn linda_counts(tally: &ExperimentTally, model: &str, variant_prefix: &str) -> (u32, u32, u32) {
        let mut counts = (0, 0, 0);
        for ((m, variant), condition) in &tally.conditions {
            if m == model && variant.starts_with(variant_prefix) {
                let linda = condition.linda.expect("two-option condition");
                counts.0 += linda.non_conjunction;
                counts.1 += linda.conjunction;
                counts.2 += linda.neither;
            }
        }
        counts
    }

    #[test]
    fn free_text_tallies_match_the_published_tables() {
        let tally = tally(&exp1_cassette());
        assert_eq!(tally.experiment, "exp1-linda");

        let expected: [(&str, [AnswerTally; 4]); 4] = [
            (
                "linda-free-text/original",
                [(0, 1, 19), (0, 20, 0), (0, 20, 0), (0, 20, 0)],
            ),
            (
                "linda-free-text/hashed-with-desc",
                [(0, 10, 0), (3, 7, 0), (10, 0, 0), (0, 10, 0)],
            ),
            (
                "linda-free-text/hashed-without-desc",
                [(10, 0, 0), (3, 7, 0), (1, 9, 0), (0, 10, 0)],
            ),
            (
                "linda-free-text/validation",
                [(0, 10, 0), (0, 10, 0), (0, 10, 0), (0, 10, 0)],
            ),
        ];
        for (prefix, per_model) in expected {
            for (model, want) in EXP1_MODELS.iter().zip(per_model) {
                assert_eq!(
                    linda_counts(&tally, model, prefix),
                    want,
                    "{model} {prefix}"
                );
            }
        }
    }

    #[test]
    fn free_text_correct_vs_wrong_summary_rows() {
        // Correct answers per variant across all models, with "wrong"
        // covering both the conjunction choice and no answer.
        let tally = tally(&exp1_cassette());
        let summarize = |prefix: &str| {
            let mut correct = 0;
            let mut wrong = 0;
            for model in EXP1_MODELS {
                let (c, j, n) = linda_counts(&tally, model, prefix);
                correct += c;
                wrong += j + n;
            }
            (correct, wrong)
        };
        assert_eq!(summarize("linda-free-text/original"), (0, 80));
        assert_eq!(summarize("linda-free-text/hashed-without-desc"), (14, 26));
        assert_eq!(summarize("linda-free-text/hashed-with-desc"), (13, 27));
    }

    #[test]
    fn copilot_reworded_prompts_drop_the_roleplay_opener() {
        let cassette = exp1_cassette();
        for record in cassette.records() {
            let no_preamble = record.key.variant.ends_with("/no-preamble");
            let is_copilot_adjusted =
                record.key.model == "gpt-4-copilot" && !record.key.variant.contains("/original");
            assert_eq!(no_preamble, is_copilot_adjusted, "{}", record.key);
            assert_eq!(
                record.prompt.starts_with("Pretend to be an agent"),
                !no_preamble
            );
        }
    }

    fn itemset_totals(
        tally: &ExperimentTally,
        model: &str,
        dataset: &str,
    ) -> (u32, u32, u32, [u32; 4]) {
        let prefix = format!("itemset/{dataset}/");
        let mut found = 0;
        let mut not_found = 0;
        let mut hallucinated = 0;
        let mut categories = [0u32; 4];
        for ((m, variant), condition) in &tally.conditions {
            if m == model && variant.starts_with(&prefix) {
                let itemsets = condition.itemsets.expect("mining condition");
                found += itemsets.found;
                not_found += itemsets.not_found;
                hallucinated += itemsets.hallucinated;
                for (slot, category) in categories.iter_mut().zip(OutputCategory::ALL) {
                    *slot += itemsets.categories.get(category);
                }
            }
        }
        (found, not_found, hallucinated, categories)
    }

    #[test]
    fn mining_tallies_match_the_published_tables() {
        let tally = tally(&exp2_published_cassette());
        let cases: [(&str, &str, u32, [u32; 4]); 6] = [
            ("gpt-4o", "correct", 213, [14, 4, 6, 1]),
            ("gpt-4o", "wrong", 212, [13, 6, 2, 4]),
            ("gpt-4o", "hashed", 225, [15, 6, 4, 0]),
            ("llama-3.1-405b", "correct", 194, [7, 8, 10, 0]),
            ("llama-3.1-405b", "wrong", 201, [5, 11, 6, 3]),
            ("llama-3.1-405b", "hashed", 230, [5, 18, 0, 2]),
        ];
        for (model, dataset, want_found, want_categories) in cases {
            let (found, not_found, hallucinated, categories) =
                itemset_totals(&tally, model, dataset);
            assert_eq!(found, want_found, "{model} {dataset}");
            assert_eq!(found + not_found, 235, "{model} {dataset}");
            assert_eq!(categories, want_categories, "{model} {dataset}");
            // One fabricated set per lower-precision run.
            assert_eq!(
                hallucinated,
                want_categories[1] + want_categories[3],
                "{model} {dataset}"
            );
        }
    }

    #[test]
    fn perfect_runs_find_everything_and_invent_nothing() {
        let tally = tally(&exp2_perfect_cassette());
        for dataset in ["correct", "wrong", "hashed"] {
            let (found, not_found, hallucinated, categories) =
                itemset_totals(&tally, "perfect-miner", dataset);
            assert_eq!((found, not_found, hallucinated), (235, 0, 0), "{dataset}");
            assert_eq!(categories, [25, 0, 0, 0], "{dataset}");
        }
    }

    #[test]
    fn tabular_tallies_match_the_published_table() {
        let tally = tally(&exp3_cassette());
        let per_form: [(&str, [u32; 5]); 3] = [
            ("linda-tabular/not-hashed", [4, 0, 0, 0, 7]),
            ("linda-tabular/hashed-without-rel", [7, 0, 8, 10, 7]),
            ("linda-tabular/hashed-with-rel", [7, 0, 0, 7, 0]),
        ];
        for (prefix, correct_counts) in per_form {
            for (model, correct) in EXP3_MODELS.iter().zip(correct_counts) {
                let (c, j, n) = linda_counts(&tally, model, prefix);
                assert_eq!(c, correct, "{model} {prefix}");
                assert_eq!(c + j + n, 10, "{model} {prefix}");
            }
        }
        // Summed across models: 11/39 plain vs 32/18 reworded-without-notes.
        let sum = |prefix: &str| {
            EXP3_MODELS
                .iter()
                .map(|m| linda_counts(&tally, m, prefix).0)
                .sum::<u32>()
        };
        assert_eq!(sum("linda-tabular/not-hashed"), 11);
        assert_eq!(sum("linda-tabular/hashed-without-rel"), 32);
        assert_eq!(sum("linda-tabular/hashed-with-rel"), 14);
    }

    #[test]
    fn tabular_prompt_rewording_drops_the_opener_only_for_the_refusing_model() {
        let cassette = exp3_cassette();
        for record in cassette.records() {
            let no_preamble = record.key.variant.ends_with("/no-preamble");
            let adjusted = record.key.model == "llama-3.1-70b-instruct"
                && !record.key.variant.contains("/not-hashed");
            assert_eq!(no_preamble, adjusted, "{}", record.key);
        }
    }

    #[test]
    fn reasoning_mode_tallies_match_the_published_tables() {
        let linda = tally(&exp4_linda_cassette());
        assert_eq!(
            linda_counts(&linda, "chatgpt-o3-mini", "linda-free-text/original"),
            (6, 4, 0)
        );
        assert_eq!(
            linda_counts(
                &linda,
                "gemini-2-flash-thinking",
                "linda-free-text/original"
            ),
            (10, 0, 0)
        );

        let tabular = tally(&exp4_tabular_cassette());
        assert_eq!(
            linda_counts(&tabular, "chatgpt-o3-mini", "linda-tabular/not-hashed"),
            (3, 7, 0)
        );
        assert_eq!(
            linda_counts(
                &tabular,
                "gemini-2-flash-thinking",
                "linda-tabular/not-hashed"
            ),
            (10, 0, 0)
        );

        let mining = tally(&exp4_itemset_cassette());
        let cases: [(&str, &str, u32, u32, u32); 4] = [
            ("chatgpt-o3-mini", "correct", 220, 15, 9),
            ("chatgpt-o3-mini", "wrong", 217, 18, 18),
            ("gemini-2-flash-thinking", "correct", 143, 92, 18),
            ("gemini-2-flash-thinking", "wrong", 189, 46, 20),
        ];
        for (model, dataset, want_found, want_missed, want_hallucinated) in cases {
            let (found, not_found, hallucinated, _) = itemset_totals(&mining, model, dataset);
            assert_eq!(
                (found, not_found, hallucinated),
                (want_found, want_missed, want_hallucinated),
                "{model} {dataset}"
            );
        }
    }

    #[test]
    fn cassettes_are_deterministic_and_distinct() {
        let first = all_cassettes();
        let second = all_cassettes();
        let mut stems = BTreeSet::new();
        for ((stem_a, cassette_a), (stem_b, cassette_b)) in first.iter().zip(&second) {
            assert_eq!(stem_a, stem_b);
            assert_eq!(cassette_a.to_jsonl(), cassette_b.to_jsonl());
            assert!(stems.insert(*stem_a), "duplicate cassette stem {stem_a}");
            assert!(!cassette_a.is_empty());
        }
        assert_eq!(stems.len(), 7);
    }

    #[test]
    fn trial_counts_match_the_protocols() {
        assert_eq!(exp1_cassette().len(), 4 * (20 + 10 + 10 + 10));
        assert_eq!(exp2_published_cassette().len(), 2 * 3 * 25);
        assert_eq!(exp2_perfect_cassette().len(), 3 * 25);
        assert_eq!(exp3_cassette().len(), 5 * 3 * 10);
        assert_eq!(exp4_linda_cassette().len(), 2 * 10);
        assert_eq!(exp4_itemset_cassette().len(), 2 * 2 * 25);
        assert_eq!(exp4_tabular_cassette().len(), 2 * 10);
    }

    #[test]
    fn fabricated_sets_are_never_true_itemsets() {
        for dataset in Dataset::ALL {
            for length in 1..=5u32 {
                let task = MiningTask::new(MIN_SUPPORT, length).unwrap();
                let oracle = miner::apriori(&dataset.table(), &task).unwrap();
                let oracle_sets: BTreeSet<BTreeSet<String>> = oracle
                    .iter()
                    .map(|itemset| itemset.items().iter().cloned().collect())
                    .collect();
                let fabricated = hallucinated_sets(dataset, length, 4);
                assert_eq!(fabricated.len(), 4);
                for set in &fabricated {
                    assert_eq!(set.len(), length as usize);
                    assert!(!oracle_sets.contains(set), "{set:?} is a true itemset");
                }
            }
        }
    }
}
