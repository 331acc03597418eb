//! Turns raw model responses into structured, scoreable answers.
//!
//! Two answer shapes exist. Two-option trials are classified into a
//! [`LindaVerdict`]: did the response pick the single-property option, the
//! conjunction option, or neither (refusals, hedges, unparseable text, and
//! both-options answers all land in Neither rather than being guessed at).
//! Itemset trials are parsed into sets of item labels and scored against
//! the exhaustive mining oracle as a [`ScoreBreakdown`] — true/false
//! positives, precision, recall, and one of four outcome categories.
//!
//! Everything here is a pure, total function: no response errors, no
//! network. An unparseable response scores as zero recall; an empty
//! (refused) response is a first-class outcome, not a retry. Verdicts keep
//! the matched substring as evidence so borderline classifications can be
//! audited by hand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{TrialRecord, TrialStatus};
use crate::miner::{self, Itemset, MiningTask};
use crate::prompts::{AnswerKey, LindaOptions};

/// Errors raised while combining scored trials.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgeError {
    /// Tallies only make sense within one experiment.
    #[error("cannot aggregate trials from different experiments: {first:?} and {second:?}")]
    MixedAggregation { first: String, second: String },
}

// ---------------------------------------------------------------------------
// Two-option classification
// ---------------------------------------------------------------------------

/// Which option a two-option response selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LindaChoice {
    /// The single-property option (the statistically correct answer).
    NonConjunction,
    /// The conjunction option (the fallacy answer).
    Conjunction,
    /// No usable selection: refusals, hedges, both options, or noise.
    Neither,
}

impl fmt::Display for LindaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LindaChoice::NonConjunction => "non-conjunction",
            LindaChoice::Conjunction => "conjunction",
            LindaChoice::Neither => "neither",
        })
    }
}

/// A classified two-option answer plus the substring that decided it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LindaVerdict {
    pub choice: LindaChoice,
    /// The matched option text, letter, or hedge phrase; empty when the
    /// verdict fell through to the default.
    pub evidence: String,
}

impl LindaVerdict {
    fn new(choice: LindaChoice, evidence: impl Into<String>) -> Self {
        Self {
            choice,
            evidence: evidence.into(),
        }
    }
}

/// Hedge and refusal phrases that mark a deliberate non-answer.
const HEDGE_PHRASES: &[&str] = &[
    "more information",
    "not enough information",
    "insufficient information",
    "cannot answer",
    "can't answer",
    "cannot determine",
    "can't determine",
    "cannot decide",
    "can't decide",
    "unable to answer",
    "unable to determine",
    "i cannot",
    "i can't",
    "it depends",
    "no answer",
    "neither option",
    "neither of",
];

/// True if the byte before/after `range` is a word boundary in `text`.
fn bounded(text: &str, start: usize, end: usize) -> bool {
    let before_ok = start == 0
        || text[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
    let after_ok = end == text.len()
        || text[end..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
    before_ok && after_ok
}

/// Finds explicit option letters: `A)` / `B)` at word boundaries, or the
/// word "option" followed by the letter. Case-insensitive.
fn find_letters(response: &str) -> (bool, Option<String>, bool, Option<String>) {
    let mut saw_a = false;
    let mut saw_b = false;
    let mut evidence_a = None;
    let mut evidence_b = None;
    let bytes = response.as_bytes();
    for (i, window) in bytes.windows(2).enumerate() {
        let letter = window[0].to_ascii_lowercase();
        if window[1] == b')' && (letter == b'a' || letter == b'b') && bounded(response, i, i + 1) {
            let token = &response[i..i + 2];
            if letter == b'a' {
                saw_a = true;
                evidence_a.get_or_insert_with(|| token.to_string());
            } else {
                saw_b = true;
                evidence_b.get_or_insert_with(|| token.to_string());
            }
        }
    }
    let lower = response.to_lowercase();
    let mut search = 0;
    while let Some(offset) = lower[search..].find("option") {
        let start = search + offset;
        let end = start + "option".len();
        search = end;
        if !bounded(&lower, start, end) {
            continue;
        }
        let tail = lower[end..].trim_start();
        if let Some(letter) = tail.chars().next() {
            let letter_start = end + (lower[end..].len() - tail.len());
            if bounded(&lower, letter_start, letter_start + 1) {
                if letter == 'a' {
                    saw_a = true;
                    evidence_a.get_or_insert_with(|| response[start..letter_start + 1].to_string());
                } else if letter == 'b' {
                    saw_b = true;
                    evidence_b.get_or_insert_with(|| response[start..letter_start + 1].to_string());
                }
            }
        }
    }
    (saw_a, evidence_a, saw_b, evidence_b)
}

/// Byte ranges of every occurrence of `needle` in `haystack`.
fn occurrences(haystack: &str, needle: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut from = 0;
    while let Some(offset) = haystack[from..].find(needle) {
        let start = from + offset;
        spans.push((start, start + needle.len()));
        from = start + 1;
    }
    spans
}

/// Classifies a two-option response. Total and deterministic, applying in
/// priority order:
///
/// 1. an explicit option letter (`A)`, `B)`, "option A/B") when the prompt
///    lettered its options — both letters present is ambiguous → Neither;
/// 2. a verbatim option string, checking the conjunction option first since
///    it strictly contains the other; the shorter option appearing
///    *outside* every conjunction occurrence alongside a conjunction
///    occurrence means both options were quoted → Neither;
/// 3. an explicit hedge or refusal phrase → Neither;
/// 4. otherwise Neither with empty evidence.
pub fn classify_linda(response: &str, options: &LindaOptions) -> LindaVerdict {
    debug_assert_ne!(options.correct, options.conjunction);

    if options.lettered {
        let (saw_a, evidence_a, saw_b, evidence_b) = find_letters(response);
        match (saw_a, saw_b) {
            (true, true) => {
                return LindaVerdict::new(
                    LindaChoice::Neither,
                    format!(
                        "both options selected: {} and {}",
                        evidence_a.unwrap_or_default(),
                        evidence_b.unwrap_or_default()
                    ),
                );
            }
            (true, false) => {
                return LindaVerdict::new(
                    LindaChoice::NonConjunction,
                    evidence_a.unwrap_or_default(),
                );
            }
            (false, true) => {
                return LindaVerdict::new(LindaChoice::Conjunction, evidence_b.unwrap_or_default());
            }
            (false, false) => {}
        }
    }

    let conjunction_spans = occurrences(response, &options.conjunction);
    let correct_spans = occurrences(response, &options.correct);
    let standalone_correct = correct_spans.iter().any(|&(start, end)| {
        !conjunction_spans
            .iter()
            .any(|&(c_start, c_end)| start >= c_start && end <= c_end)
    });
    match (!conjunction_spans.is_empty(), standalone_correct) {
        (true, true) => {
            return LindaVerdict::new(
                LindaChoice::Neither,
                format!(
                    "both options quoted: {:?} and {:?}",
                    options.correct, options.conjunction
                ),
            );
        }
        (true, false) => {
            return LindaVerdict::new(LindaChoice::Conjunction, options.conjunction.clone());
        }
        (false, true) => {
            return LindaVerdict::new(LindaChoice::NonConjunction, options.correct.clone());
        }
        (false, false) => {}
    }

    let lower = response.to_lowercase();
    for phrase in HEDGE_PHRASES {
        if lower.contains(phrase) {
            return LindaVerdict::new(LindaChoice::Neither, *phrase);
        }
    }

    LindaVerdict::new(LindaChoice::Neither, "")
}

// ---------------------------------------------------------------------------
// Itemset parsing and scoring
// ---------------------------------------------------------------------------

/// Extracts every brace-delimited group of comma-separated tokens from a
/// response, in order of appearance.
///
/// Tolerates code fences, a leading `set_length_k =` assignment, single or
/// double quotes, bare tokens, and surrounding prose. Tokens are trimmed;
/// groups that yield no tokens (like `{}`) report nothing and are skipped;
/// duplicate sets are removed keeping the first occurrence. A response with
/// no braces parses to an empty list, which scores as zero recall.
pub fn parse_itemsets(response: &str) -> Vec<BTreeSet<String>> {
    let mut sets = Vec::new();
    let mut seen = BTreeSet::new();
    let mut rest = response;
    while let Some(open) = rest.find('{') {
        let after_open = &rest[open + 1..];
        let Some(close) = after_open.find('}') else {
            break;
        };
        let group = &after_open[..close];
        let mut set = BTreeSet::new();
        for token in group.split(',') {
            let token = token.trim();
            let token = token
                .strip_prefix('"')
                .and_then(|t| t.strip_suffix('"'))
                .or_else(|| token.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')))
                .unwrap_or(token)
                .trim();
            if !token.is_empty() {
                set.insert(token.to_string());
            }
        }
        if !set.is_empty() && seen.insert(set.clone()) {
            sets.push(set);
        }
        rest = &after_open[close + 1..];
    }
    sets
}

/// The four outcome classes for one mining run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputCategory {
    /// Every true itemset found and nothing else.
    PerfectPrecisionAndRecall,
    /// Every true itemset found, plus hallucinations.
    PerfectRecallLowerPrecision,
    /// Only true itemsets found, but some were missed.
    PerfectPrecisionLowerRecall,
    /// Some true itemsets missed and hallucinations present.
    LowerPrecisionLowerRecall,
}

impl OutputCategory {
    pub const ALL: [OutputCategory; 4] = [
        OutputCategory::PerfectPrecisionAndRecall,
        OutputCategory::PerfectRecallLowerPrecision,
        OutputCategory::PerfectPrecisionLowerRecall,
        OutputCategory::LowerPrecisionLowerRecall,
    ];

    /// Category is a pure function of whether precision and recall hit 1.
    pub fn from_flags(perfect_precision: bool, perfect_recall: bool) -> Self {
        match (perfect_precision, perfect_recall) {
            (true, true) => OutputCategory::PerfectPrecisionAndRecall,
            (false, true) => OutputCategory::PerfectRecallLowerPrecision,
            (true, false) => OutputCategory::PerfectPrecisionLowerRecall,
            (false, false) => OutputCategory::LowerPrecisionLowerRecall,
        }
    }
}

impl fmt::Display for OutputCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputCategory::PerfectPrecisionAndRecall => "Perfect precision and perfect recall",
            OutputCategory::PerfectRecallLowerPrecision => "Perfect recall, lower precision",
            OutputCategory::PerfectPrecisionLowerRecall => "Perfect precision, lower recall",
            OutputCategory::LowerPrecisionLowerRecall => "Lower precision, lower recall",
        })
    }
}

/// Scores for one mining response against the exhaustive oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    /// Output itemsets present in the oracle.
    pub tp: u32,
    /// Output itemsets absent from the oracle — hallucinations, including
    /// sets of the wrong cardinality.
    pub fp: u32,
    /// Same count as `tp`; the "true itemsets found" view.
    pub found: u32,
    /// Oracle itemsets the output missed.
    pub not_found: u32,
    /// `tp / (tp + fp)`, or 1 when the output was empty (vacuous).
    pub precision: f64,
    /// `tp / |oracle|`, or 1 when the oracle itself is empty.
    pub recall: f64,
    pub category: OutputCategory,
}

/// Scores parsed output sets against the mining oracle for the same task.
///
/// Comparison is set equality on item labels; supports are ignored. Any
/// output set whose cardinality differs from `task.length` can never match
/// and therefore counts as a hallucination. Duplicate output sets are
/// removed (keeping first occurrence) before counting, so a formatting
/// quirk is not double-penalized.
pub fn score_run(
    parsed: &[BTreeSet<String>],
    oracle: &[Itemset],
    task: &MiningTask,
) -> ScoreBreakdown {
    let mut deduped: Vec<&BTreeSet<String>> = Vec::new();
    let mut seen = BTreeSet::new();
    for set in parsed {
        if seen.insert(set.clone()) {
            deduped.push(set);
        }
    }
    let oracle_sets: BTreeSet<BTreeSet<String>> = oracle
        .iter()
        .map(|itemset| itemset.items().iter().cloned().collect())
        .collect();
    debug_assert!(oracle_sets
        .iter()
        .all(|set| set.len() == task.length as usize));

    let tp = deduped
        .iter()
        .filter(|set| oracle_sets.contains(**set))
        .count() as u32;
    let fp = deduped.len() as u32 - tp;
    let not_found = oracle.len() as u32 - tp;
    let precision = if tp + fp == 0 {
        1.0
    } else {
        f64::from(tp) / f64::from(tp + fp)
    };
    let recall = if oracle.is_empty() {
        1.0
    } else {
        f64::from(tp) / oracle.len() as f64
    };
    ScoreBreakdown {
        tp,
        fp,
        found: tp,
        not_found,
        precision,
        recall,
        category: OutputCategory::from_flags(fp == 0, not_found == 0),
    }
}

// ---------------------------------------------------------------------------
// Trial-level scoring
// ---------------------------------------------------------------------------

/// A completed trial plus its judged outcome: the verdict for two-option
/// trials, the score breakdown for mining trials. Serializes as the trial
/// record's fields extended with `verdict`/`score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTrial {
    #[serde(flatten)]
    pub record: TrialRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<LindaVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreBreakdown>,
}

/// Judges one trial against its answer key. Refused and failed trials are
/// still scored — an empty response classifies as Neither or zero recall —
/// so they stay visible in every tally.
pub fn score_trial(record: &TrialRecord, key: &AnswerKey) -> ScoredTrial {
    let mut scored = ScoredTrial {
        record: record.clone(),
        verdict: None,
        score: None,
    };
    match key {
        AnswerKey::Linda(options) => {
            scored.verdict = Some(classify_linda(&record.response, options));
        }
        AnswerKey::Itemset { dataset, task } => {
            let oracle =
                miner::apriori(&dataset.table(), task).expect("built-in dataset always mines");
            let parsed = parse_itemsets(&record.response);
            scored.score = Some(score_run(&parsed, &oracle, task));
        }
    }
    scored
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Counts of the four outcome categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub perfect_precision_and_recall: u32,
    pub perfect_recall_lower_precision: u32,
    pub perfect_precision_lower_recall: u32,
    pub lower_precision_lower_recall: u32,
}

impl CategoryCounts {
    pub fn bump(&mut self, category: OutputCategory) {
        match category {
            OutputCategory::PerfectPrecisionAndRecall => self.perfect_precision_and_recall += 1,
            OutputCategory::PerfectRecallLowerPrecision => self.perfect_recall_lower_precision += 1,
            OutputCategory::PerfectPrecisionLowerRecall => self.perfect_precision_lower_recall += 1,
            OutputCategory::LowerPrecisionLowerRecall => self.lower_precision_lower_recall += 1,
        }
    }

    pub fn get(&self, category: OutputCategory) -> u32 {
        match category {
            OutputCategory::PerfectPrecisionAndRecall => self.perfect_precision_and_recall,
            OutputCategory::PerfectRecallLowerPrecision => self.perfect_recall_lower_precision,
            OutputCategory::PerfectPrecisionLowerRecall => self.perfect_precision_lower_recall,
            OutputCategory::LowerPrecisionLowerRecall => self.lower_precision_lower_recall,
        }
    }

    pub fn total(&self) -> u32 {
        OutputCategory::ALL.iter().map(|&c| self.get(c)).sum()
    }
}

/// Two-option answer counts for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LindaTally {
    pub non_conjunction: u32,
    pub conjunction: u32,
    pub neither: u32,
}

/// Mining-score totals for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ItemsetTally {
    /// True itemsets found, summed across runs.
    pub found: u32,
    /// True itemsets missed, summed across runs.
    pub not_found: u32,
    /// Hallucinated itemsets, summed across runs.
    pub hallucinated: u32,
    pub categories: CategoryCounts,
}

/// Everything tallied for one (model, variant) condition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConditionTally {
    pub trials: u32,
    pub refusals: u32,
    pub transport_errors: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linda: Option<LindaTally>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub itemsets: Option<ItemsetTally>,
}

/// Per-condition tallies for one experiment, keyed by (model, variant).
/// (Not serde-serializable as-is: JSON maps need string keys; report
/// emitters flatten the conditions into arrays instead.)
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentTally {
    pub experiment: String,
    pub conditions: BTreeMap<(String, String), ConditionTally>,
}

impl ExperimentTally {
    pub fn condition(&self, model: &str, variant: &str) -> Option<&ConditionTally> {
        self.conditions
            .get(&(model.to_string(), variant.to_string()))
    }

    /// Sums a field across all conditions matching a variant predicate.
    pub fn sum_where<F, G>(&self, matches: F, pick: G) -> u32
    where
        F: Fn(&str, &str) -> bool,
        G: Fn(&ConditionTally) -> u32,
    {
        self.conditions
            .iter()
            .filter(|((model, variant), _)| matches(model, variant))
            .map(|(_, tally)| pick(tally))
            .sum()
    }
}

/// Folds scored trials into per-condition tallies.
///
/// All records must belong to the same experiment; zero records produce an
/// empty tally.
pub fn aggregate(trials: &[ScoredTrial]) -> Result<ExperimentTally, JudgeError> {
    let mut tally = ExperimentTally::default();
    for trial in trials {
        let key = &trial.record.key;
        if tally.experiment.is_empty() {
            tally.experiment = key.experiment.clone();
        } else if tally.experiment != key.experiment {
            return Err(JudgeError::MixedAggregation {
                first: tally.experiment.clone(),
                second: key.experiment.clone(),
            });
        }
        let condition = tally
            .conditions
            .entry((key.model.clone(), key.variant.clone()))
            .or_default();
        condition.trials += 1;
        match trial.record.status {
            TrialStatus::Refusal => condition.refusals += 1,
            TrialStatus::TransportError => condition.transport_errors += 1,
            TrialStatus::Ok => {}
        }
        if let Some(verdict) = &trial.verdict {
            let linda = condition.linda.get_or_insert_with(LindaTally::default);
            match verdict.choice {
                LindaChoice::NonConjunction => linda.non_conjunction += 1,
                LindaChoice::Conjunction => linda.conjunction += 1,
                LindaChoice::Neither => linda.neither += 1,
            }
        }
        if let Some(score) = &trial.score {
            let itemsets = condition.itemsets.get_or_insert_with(ItemsetTally::default);
            itemsets.found += score.found;
            itemsets.not_found += score.not_found;
            itemsets.hallucinated += score.fp;
            itemsets.categories.bump(score.category);
        }
    }
    Ok(tally)
}
