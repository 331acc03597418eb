//! Config-driven experiment orchestration.
//!
//! An [`ExperimentPlan`] is a TOML file naming the trials to run — which
//! prompt variant, against which model, how many iterations — plus the
//! statistical pairings to compute afterwards. `run_plan` renders each
//! prompt, dispatches it through the gateway (replaying a cassette by
//! default; live calls are an explicit opt-in at the CLI layer), scores
//! every response, aggregates per-condition tallies, runs the configured
//! 2×2 comparisons, and renders a markdown report plus a machine-readable
//! JSON summary.
//!
//! Trials execute sequentially in plan order: every aggregate is
//! order-independent anyway, and sequential replay keeps reports
//! byte-identical across runs. A transport failure does not abort the plan
//! — the trial is recorded with its error status and the outcome carries a
//! non-zero error count for the caller's exit code. A cassette miss in
//! replay mode does abort, naming the missing trial, since a partial
//! replay would silently misstate the aggregates.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{Gateway, GatewayError, ProviderConfig, TrialKey, TrialRecord, TrialStatus};
use crate::judge::{
    self, ConditionTally, ExperimentTally, JudgeError, OutputCategory, ScoredTrial,
};
use crate::prompts::{PromptError, PromptVariant};
use crate::stats::{self, ContingencyTable2x2, StatsError, StatsSummary};

/// Errors raised while loading or executing a plan.
#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("no provider configured for model {0:?}")]
    UnknownModel(String),
    #[error("replay cassette has no entry for trial {key} (prompt digest {digest})")]
    CassetteMiss { key: String, digest: String },
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Config(#[from] toml::de::Error),
}

// ---------------------------------------------------------------------------
// Plan schema
// ---------------------------------------------------------------------------

/// Which family of prompts a plan exercises; every trial variant must
/// belong to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LindaFreeText,
    Itemset,
    LindaTabular,
}

impl ExperimentKind {
    fn admits(self, variant: &PromptVariant) -> bool {
        matches!(
            (self, variant),
            (
                ExperimentKind::LindaFreeText,
                PromptVariant::LindaFreeText { .. }
            ) | (ExperimentKind::Itemset, PromptVariant::Itemset { .. })
                | (
                    ExperimentKind::LindaTabular,
                    PromptVariant::LindaTabular { .. }
                )
        )
    }
}

/// How trials are answered: from the network, from the network while
/// recording, or from a cassette only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Live,
    Record,
    #[default]
    Replay,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Live => "live",
            RunMode::Record => "record",
            RunMode::Replay => "replay",
        }
    }
}

/// One block of repeated trials: a prompt variant sent to a model N times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub model: String,
    pub variant: String,
    pub iterations: u32,
}

/// What counts as a success when reducing a condition to a 2×2 table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Two-option answers: non-conjunction vs everything else.
    Correct,
    /// Mining: true itemsets found vs missed.
    Found,
}

/// One side of a pairing: either a filter over this run's conditions, or
/// literal counts (for comparisons against results published elsewhere).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingSide {
    Literal {
        successes: u64,
        failures: u64,
    },
    Filter {
        /// Variant prefix; `linda-free-text/original` also matches its
        /// `/no-preamble` twin, `itemset/correct/` matches all lengths.
        variant: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<String>,
    },
}

/// A configured 2×2 comparison between two conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingSpec {
    pub label: String,
    pub measure: Measure,
    pub left: PairingSide,
    pub right: PairingSide,
}

/// A declarative experiment: trials to run and comparisons to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub id: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cassette: Option<PathBuf>,
    /// Default directory for written artifacts; the CLI may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub trials: Vec<TrialSpec>,
    #[serde(default)]
    pub pairings: Vec<PairingSpec>,
}

impl ExperimentPlan {
    pub fn parse(text: &str) -> Result<Self, RunnerError> {
        let plan: ExperimentPlan = toml::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    /// Loads a plan file. Relative `cassette` and `out` paths resolve
    /// against the plan file's directory, so bundled plans work from any
    /// working directory.
    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let mut plan = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [&mut plan.cassette, &mut plan.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&p);
            }
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.id.is_empty() {
            return Err(RunnerError::InvalidPlan("id must not be empty".into()));
        }
        for trial in &self.trials {
            if trial.iterations == 0 {
                return Err(RunnerError::InvalidPlan(format!(
                    "trial {} × {} has zero iterations",
                    trial.model, trial.variant
                )));
            }
            let variant: PromptVariant = trial
                .variant
                .parse()
                .map_err(|e: PromptError| RunnerError::InvalidPlan(e.to_string()))?;
            if !self.kind.admits(&variant) {
                return Err(RunnerError::InvalidPlan(format!(
                    "variant {} does not belong to experiment kind {:?}",
                    trial.variant, self.kind
                )));
            }
        }
        if self.mode != RunMode::Live && self.cassette.is_none() && !self.trials.is_empty() {
            return Err(RunnerError::InvalidPlan(format!(
                "{} mode requires a cassette path",
                self.mode.as_str()
            )));
        }
        Ok(())
    }
}

/// Provider presets keyed by the model id used in plans.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProviderCatalog {
    #[serde(default)]
    pub models: BTreeMap<String, ProviderConfig>,
}

impl ProviderCatalog {
    pub fn parse(text: &str) -> Result<Self, RunnerError> {
        let catalog: ProviderCatalog = toml::from_str(text)?;
        for (model, provider) in &catalog.models {
            provider
                .validate()
                .map_err(|e| RunnerError::InvalidPlan(format!("provider {model}: {e}")))?;
        }
        Ok(catalog)
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// One computed pairing: the 2×2 cells and the statistics, or a note when
/// the table was too degenerate to test.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub label: String,
    pub cells: [u64; 4],
    pub stats: Option<StatsSummary>,
    pub note: Option<String>,
}

/// Everything a finished plan produces.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub plan: ExperimentPlan,
    pub scored: Vec<ScoredTrial>,
    pub tally: ExperimentTally,
    pub comparisons: Vec<Comparison>,
    pub markdown: String,
    pub json: serde_json::Value,
    pub refusals: u32,
    pub transport_errors: u32,
}

impl RunOutcome {
    /// True when every trial completed without a transport failure;
    /// drives the CLI exit code.
    pub fn fully_successful(&self) -> bool {
        self.transport_errors == 0
    }
}

fn placeholder_provider(model: &str) -> ProviderConfig {
    ProviderConfig {
        endpoint: "replay://cassette".to_string(),
        model: model.to_string(),
        api_key_env: "HASHPROMPT_UNUSED".to_string(),
        sampling: Default::default(),
        requests_per_minute: 60,
    }
}

/// Runs a plan end to end. `providers` may be empty in replay mode, which
/// touches neither the network nor any API key.
pub fn run_plan(
    plan: &ExperimentPlan,
    providers: &ProviderCatalog,
) -> Result<RunOutcome, RunnerError> {
    plan.validate()?;
    let gateway = match plan.mode {
        RunMode::Replay if plan.trials.is_empty() => Gateway::replay_cassette(Default::default()),
        RunMode::Replay => {
            let path = plan.cassette.as_ref().expect("validated");
            if !path.exists() {
                return Err(RunnerError::InvalidPlan(format!(
                    "replay cassette {} does not exist",
                    path.display()
                )));
            }
            Gateway::replay(path)?
        }
        RunMode::Record => Gateway::record(plan.cassette.as_ref().expect("validated"))?,
        RunMode::Live => Gateway::live(),
    };

    let mut scored = Vec::new();
    let mut refusals = 0;
    let mut transport_errors = 0;
    for spec in &plan.trials {
        let variant: PromptVariant = spec.variant.parse().expect("validated");
        let rendered = variant.render()?;
        let provider = match plan.mode {
            RunMode::Replay => placeholder_provider(&spec.model),
            _ => providers
                .models
                .get(&spec.model)
                .cloned()
                .ok_or_else(|| RunnerError::UnknownModel(spec.model.clone()))?,
        };
        for iteration in 1..=spec.iterations {
            let key = TrialKey::new(
                &plan.id,
                spec.variant.clone(),
                &spec.model,
                iteration,
                &rendered.text,
            );
            let record = match gateway.complete(&provider, &key, &rendered.text) {
                Ok(completion) => TrialRecord {
                    key,
                    prompt: rendered.text.clone(),
                    response: completion.response,
                    status: completion.status,
                    timestamp: completion.timestamp,
                },
                Err(GatewayError::CassetteMiss(digest)) => {
                    return Err(RunnerError::CassetteMiss {
                        key: key.to_string(),
                        digest,
                    });
                }
                Err(GatewayError::TransportError { attempts, message }) => TrialRecord {
                    key,
                    prompt: rendered.text.clone(),
                    response: format!("transport failure after {attempts} attempts: {message}"),
                    status: TrialStatus::TransportError,
                    timestamp: chrono::Utc::now().to_rfc3339(),
                },
                Err(other) => return Err(other.into()),
            };
            match record.status {
                TrialStatus::Refusal => refusals += 1,
                TrialStatus::TransportError => transport_errors += 1,
                TrialStatus::Ok => {}
            }
            scored.push(judge::score_trial(&record, &rendered.answer_key));
        }
    }

    let tally = judge::aggregate(&scored)?;
    let comparisons: Vec<Comparison> = plan
        .pairings
        .iter()
        .map(|pairing| compare(&tally, pairing))
        .collect::<Result<_, _>>()?;
    let markdown = render_markdown(plan, &tally, &comparisons, refusals, transport_errors);
    let json = render_json(plan, &tally, &comparisons, refusals, transport_errors);
    Ok(RunOutcome {
        plan: plan.clone(),
        scored,
        tally,
        comparisons,
        markdown,
        json,
        refusals,
        transport_errors,
    })
}

/// Scores raw trial records against the answer keys their variant strings
/// name; used by the standalone `score` path where no plan is involved.
pub fn score_records(records: &[TrialRecord]) -> Result<Vec<ScoredTrial>, RunnerError> {
    records
        .iter()
        .map(|record| {
            let variant: PromptVariant = record
                .key
                .variant
                .parse()
                .map_err(|e: PromptError| RunnerError::InvalidPlan(e.to_string()))?;
            let rendered = variant.render()?;
            Ok(judge::score_trial(record, &rendered.answer_key))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

fn resolve_side(
    tally: &ExperimentTally,
    side: &PairingSide,
    measure: Measure,
) -> Result<(u64, u64), RunnerError> {
    match side {
        PairingSide::Literal {
            successes,
            failures,
        } => Ok((*successes, *failures)),
        PairingSide::Filter { variant, model } => {
            let mut successes = 0u64;
            let mut failures = 0u64;
            let mut matched = false;
            for ((m, v), condition) in &tally.conditions {
                if let Some(wanted) = model {
                    if m != wanted {
                        continue;
                    }
                }
                if !v.starts_with(variant.as_str()) {
                    continue;
                }
                matched = true;
                match measure {
                    Measure::Correct => {
                        let linda = condition.linda.ok_or_else(|| {
                            RunnerError::InvalidPlan(format!(
                                "condition {m}/{v} has no two-option answers to pair on"
                            ))
                        })?;
                        successes += u64::from(linda.non_conjunction);
                        failures += u64::from(linda.conjunction + linda.neither);
                    }
                    Measure::Found => {
                        let itemsets = condition.itemsets.ok_or_else(|| {
                            RunnerError::InvalidPlan(format!(
                                "condition {m}/{v} has no mining scores to pair on"
                            ))
                        })?;
                        successes += u64::from(itemsets.found);
                        failures += u64::from(itemsets.not_found);
                    }
                }
            }
            if !matched {
                return Err(RunnerError::InvalidPlan(format!(
                    "pairing filter matched no condition (variant {variant:?}, model {model:?})"
                )));
            }
            Ok((successes, failures))
        }
    }
}

/// Reduces one pairing to a 2×2 table — left condition on the top row —
/// and computes the full statistics block. A degenerate table (a zero
/// margin) is reported as a note instead of an error.
pub fn compare(tally: &ExperimentTally, pairing: &PairingSpec) -> Result<Comparison, RunnerError> {
    let (left_s, left_f) = resolve_side(tally, &pairing.left, pairing.measure)?;
    let (right_s, right_f) = resolve_side(tally, &pairing.right, pairing.measure)?;
    let cells = [left_s, left_f, right_s, right_f];
    match ContingencyTable2x2::new(left_s, left_f, right_s, right_f) {
        Ok(table) => match stats::summarize(&table) {
            Ok(summary) => Ok(Comparison {
                label: pairing.label.clone(),
                cells,
                stats: Some(summary),
                note: None,
            }),
            Err(StatsError::DegenerateTable) => Ok(Comparison {
                label: pairing.label.clone(),
                cells,
                stats: None,
                note: Some(format!(
                    "degenerate table (a zero margin); Fisher p = {}",
                    stats::format_p(stats::fisher_exact(&table))
                )),
            }),
            Err(other) => Err(RunnerError::InvalidPlan(other.to_string())),
        },
        Err(_) => Ok(Comparison {
            label: pairing.label.clone(),
            cells,
            stats: None,
            note: Some("empty table; nothing to compare".to_string()),
        }),
    }
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

/// Variant string minus its `/no-preamble` suffix: the grouping unit for
/// report tables, since the preamble tweak is a delivery detail, not a
/// separate condition in the result tables.
fn variant_base(variant: &str) -> &str {
    variant.strip_suffix("/no-preamble").unwrap_or(variant)
}

fn plan_models(plan: &ExperimentPlan) -> Vec<String> {
    let mut models = Vec::new();
    for spec in &plan.trials {
        if !models.contains(&spec.model) {
            models.push(spec.model.clone());
        }
    }
    models
}

fn plan_variant_bases(plan: &ExperimentPlan) -> Vec<String> {
    let mut bases = Vec::new();
    for spec in &plan.trials {
        let base = variant_base(&spec.variant).to_string();
        if !bases.contains(&base) {
            bases.push(base);
        }
    }
    bases
}

fn merged_condition(tally: &ExperimentTally, model: &str, base: &str) -> ConditionTally {
    let mut merged = ConditionTally::default();
    for ((m, variant), condition) in &tally.conditions {
        if m != model || variant_base(variant) != base {
            continue;
        }
        merged.trials += condition.trials;
        merged.refusals += condition.refusals;
        merged.transport_errors += condition.transport_errors;
        if let Some(linda) = condition.linda {
            let slot = merged.linda.get_or_insert_with(Default::default);
            slot.non_conjunction += linda.non_conjunction;
            slot.conjunction += linda.conjunction;
            slot.neither += linda.neither;
        }
        if let Some(itemsets) = condition.itemsets {
            let slot = merged.itemsets.get_or_insert_with(Default::default);
            slot.found += itemsets.found;
            slot.not_found += itemsets.not_found;
            slot.hallucinated += itemsets.hallucinated;
            for category in OutputCategory::ALL {
                let count = itemsets.categories.get(category);
                for _ in 0..count {
                    slot.categories.bump(category);
                }
            }
        }
    }
    merged
}

/// Itemset variant bases grouped as (dataset, length), in plan order.
fn plan_datasets(plan: &ExperimentPlan) -> Vec<String> {
    let mut datasets = Vec::new();
    for spec in &plan.trials {
        if let Ok(PromptVariant::Itemset { dataset, .. }) = spec.variant.parse() {
            let name = dataset.name().to_string();
            if !datasets.contains(&name) {
                datasets.push(name);
            }
        }
    }
    datasets
}

fn dataset_totals(
    tally: &ExperimentTally,
    model: &str,
    dataset: &str,
) -> crate::judge::ItemsetTally {
    let mut merged = crate::judge::ItemsetTally::default();
    let prefix = format!("itemset/{dataset}/");
    for ((m, variant), condition) in &tally.conditions {
        if m != model || !variant.starts_with(&prefix) {
            continue;
        }
        if let Some(itemsets) = condition.itemsets {
            merged.found += itemsets.found;
            merged.not_found += itemsets.not_found;
            merged.hallucinated += itemsets.hallucinated;
            for category in OutputCategory::ALL {
                for _ in 0..itemsets.categories.get(category) {
                    merged.categories.bump(category);
                }
            }
        }
    }
    merged
}

fn render_markdown(
    plan: &ExperimentPlan,
    tally: &ExperimentTally,
    comparisons: &[Comparison],
    refusals: u32,
    transport_errors: u32,
) -> String {
    let mut out = String::new();
    let total_trials: u32 = plan.trials.iter().map(|t| t.iterations).sum();
    writeln!(out, "# Report: {}", plan.id).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "- mode: {}", plan.mode.as_str()).unwrap();
    writeln!(
        out,
        "- trials: {total_trials} (refusals: {refusals}, transport errors: {transport_errors})"
    )
    .unwrap();
    writeln!(out).unwrap();

    let models = plan_models(plan);
    match plan.kind {
        ExperimentKind::LindaFreeText | ExperimentKind::LindaTabular => {
            writeln!(out, "## Answer tallies").unwrap();
            writeln!(out).unwrap();
            for base in plan_variant_bases(plan) {
                writeln!(out, "### {base}").unwrap();
                writeln!(out).unwrap();
                writeln!(out, "| Answer | {} |", models.join(" | ")).unwrap();
                writeln!(out, "|---|{}", "---|".repeat(models.len())).unwrap();
                let conditions: Vec<ConditionTally> = models
                    .iter()
                    .map(|m| merged_condition(tally, m, &base))
                    .collect();
                for (label, pick) in [
                    ("Correct (non-conjunction)", 0usize),
                    ("Conjunction", 1),
                    ("No answer", 2),
                ] {
                    let row: Vec<String> = conditions
                        .iter()
                        .map(|c| {
                            let linda = c.linda.unwrap_or_default();
                            let value =
                                [linda.non_conjunction, linda.conjunction, linda.neither][pick];
                            value.to_string()
                        })
                        .collect();
                    writeln!(out, "| {label} | {} |", row.join(" | ")).unwrap();
                }
                writeln!(out).unwrap();
            }

            writeln!(out, "### Correct vs wrong per variant (all models)").unwrap();
            writeln!(out).unwrap();
            writeln!(out, "| Variant | Correct | Wrong |").unwrap();
            writeln!(out, "|---|---|---|").unwrap();
            for base in plan_variant_bases(plan) {
                let mut correct = 0u32;
                let mut wrong = 0u32;
                for model in &models {
                    let linda = merged_condition(tally, model, &base)
                        .linda
                        .unwrap_or_default();
                    correct += linda.non_conjunction;
                    wrong += linda.conjunction + linda.neither;
                }
                writeln!(out, "| {base} | {correct} | {wrong} |").unwrap();
            }
            writeln!(out).unwrap();
        }
        ExperimentKind::Itemset => {
            let datasets = plan_datasets(plan);
            writeln!(out, "## Itemset results").unwrap();
            writeln!(out).unwrap();
            for model in &models {
                writeln!(out, "### {model}").unwrap();
                writeln!(out).unwrap();
                writeln!(out, "| Itemsets | {} |", datasets.join(" | ")).unwrap();
                writeln!(out, "|---|{}", "---|".repeat(datasets.len())).unwrap();
                let totals: Vec<crate::judge::ItemsetTally> = datasets
                    .iter()
                    .map(|d| dataset_totals(tally, model, d))
                    .collect();
                for (label, pick) in [("Found", 0usize), ("Not found", 1), ("Hallucinations", 2)] {
                    let row: Vec<String> = totals
                        .iter()
                        .map(|t| [t.found, t.not_found, t.hallucinated][pick].to_string())
                        .collect();
                    writeln!(out, "| {label} | {} |", row.join(" | ")).unwrap();
                }
                writeln!(out).unwrap();

                writeln!(out, "| Category | {} |", datasets.join(" | ")).unwrap();
                writeln!(out, "|---|{}", "---|".repeat(datasets.len())).unwrap();
                for category in OutputCategory::ALL {
                    let row: Vec<String> = totals
                        .iter()
                        .map(|t| t.categories.get(category).to_string())
                        .collect();
                    writeln!(out, "| {category} | {} |", row.join(" | ")).unwrap();
                }
                writeln!(out).unwrap();
            }

            writeln!(out, "### Per-length detail").unwrap();
            writeln!(out).unwrap();
            writeln!(
                out,
                "_Finer granularity than the published aggregate tables._"
            )
            .unwrap();
            writeln!(out).unwrap();
            writeln!(
                out,
                "| Model | Dataset | Length | Found | Not found | Hallucinations |"
            )
            .unwrap();
            writeln!(out, "|---|---|---|---|---|---|").unwrap();
            for model in &models {
                for dataset in &datasets {
                    for length in 1..=5u32 {
                        let variant = format!("itemset/{dataset}/{length}");
                        if let Some(condition) = tally.condition(model, &variant) {
                            let itemsets = condition.itemsets.unwrap_or_default();
                            writeln!(
                                out,
                                "| {model} | {dataset} | {length} | {} | {} | {} |",
                                itemsets.found, itemsets.not_found, itemsets.hallucinated
                            )
                            .unwrap();
                        }
                    }
                }
            }
            writeln!(out).unwrap();
        }
    }

    if !comparisons.is_empty() {
        writeln!(out, "## Statistics").unwrap();
        writeln!(out).unwrap();
        for comparison in comparisons {
            writeln!(out, "### {}", comparison.label).unwrap();
            writeln!(out).unwrap();
            writeln!(out, "```").unwrap();
            match (&comparison.stats, &comparison.note) {
                (Some(summary), _) => writeln!(out, "{summary}").unwrap(),
                (None, Some(note)) => {
                    let [a, b, c, d] = comparison.cells;
                    writeln!(out, "table      = [[{a}, {b}], [{c}, {d}]]").unwrap();
                    writeln!(out, "{note}").unwrap();
                }
                (None, None) => unreachable!("comparison carries stats or a note"),
            }
            writeln!(out, "```").unwrap();
            writeln!(out).unwrap();
        }
    }
    out
}

fn render_json(
    plan: &ExperimentPlan,
    tally: &ExperimentTally,
    comparisons: &[Comparison],
    refusals: u32,
    transport_errors: u32,
) -> serde_json::Value {
    let conditions: Vec<serde_json::Value> = tally
        .conditions
        .iter()
        .map(|((model, variant), condition)| {
            serde_json::json!({
                "model": model,
                "variant": variant,
                "tally": condition,
            })
        })
        .collect();
    let comparisons: Vec<serde_json::Value> = comparisons
        .iter()
        .map(|comparison| {
            let stats = comparison.stats.as_ref().map(|summary| {
                serde_json::json!({
                    "chi2": summary.chi_square.statistic,
                    "chi2_p": summary.chi_square.p_value,
                    "fisher_p": summary.fisher_p,
                    "cramers_v": summary.effect.cramers_v,
                    "interpretation": summary.effect.interpretation.to_string(),
                })
            });
            serde_json::json!({
                "label": comparison.label,
                "cells": comparison.cells,
                "stats": stats,
                "note": comparison.note,
            })
        })
        .collect();
    serde_json::json!({
        "id": plan.id,
        "kind": plan.kind,
        "mode": plan.mode.as_str(),
        "experiment": tally.experiment,
        "refusals": refusals,
        "transport_errors": transport_errors,
        "conditions": conditions,
        "comparisons": comparisons,
    })
}

/// Writes the scored trials, markdown report, and JSON summary into `dir`,
/// returning the created paths.
pub fn write_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    std::fs::create_dir_all(dir)?;
    let scored_path = dir.join("scored.jsonl");
    let mut lines = String::new();
    for trial in &outcome.scored {
        lines.push_str(&serde_json::to_string(trial).expect("scored trial serializes"));
        lines.push('\n');
    }
    std::fs::write(&scored_path, lines)?;
    let report_path = dir.join("report.md");
    std::fs::write(&report_path, &outcome.markdown)?;
    let json_path = dir.join("report.json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&outcome.json).expect("report serializes"),
    )?;
    Ok(vec![scored_path, report_path, json_path])
}
