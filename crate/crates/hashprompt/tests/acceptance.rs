//! Acceptance suite: nine numbered end-to-end checks, one test per
//! criterion, each printing a single PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The checks rest on oracle equivalence (two independent miners, an
//! exhaustive Fisher enumeration), invariants (round trips, equivariance,
//! determinism), and exact reproduction of the published aggregate numbers
//! from the bundled replay data — not on re-querying any live model.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hashprompt::corpus::{
    apply_bijection, builtin_datasets, hashed_value_bijection, wrong_value_bijection,
    BijectionScope, Dataset, TransactionTable, ValueBijection,
};
use hashprompt::hasher::{
    dehash_text, generate_scheme, hash_text, mask_text, HashingScheme, IdentifierStyle,
    SchemeEntry, StyleKind,
};
use hashprompt::judge::{parse_itemsets, score_run, OutputCategory};
use hashprompt::miner::{apriori, brute_force, Itemset, MiningTask};
use hashprompt::prompts::{render_itemset, PromptVariant};
use hashprompt::runner::{run_plan, ExperimentPlan, ProviderCatalog};
use hashprompt::stats::{fisher_exact, summarize, ContingencyTable2x2};

fn budget(name: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= limit,
        "{name} took {elapsed:?}, budget {limit:?}"
    );
}

fn plan_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/plans/{name}"))
}

/// Random cross-column-unique table: values are column-tagged, so no value
/// ever appears in two columns.
fn random_table(rng: &mut StdRng) -> TransactionTable {
    let columns = rng.gen_range(1..=6);
    let rows = rng.gen_range(1..=8);
    let header: Vec<String> = (0..columns).map(|c| format!("col{c}")).collect();
    let body: Vec<Vec<String>> = (0..rows)
        .map(|_| {
            (0..columns)
                .map(|c| format!("c{c}v{}", rng.gen_range(0..3)))
                .collect()
        })
        .collect();
    TransactionTable::new(header, body).expect("generated table is well-formed")
}

#[test]
fn criterion_1_miner_ground_truth() {
    let start = Instant::now();
    let expected_sizes = [6usize, 14, 16, 9, 2];
    let datasets = builtin_datasets();

    let mine_all = |table: &TransactionTable| -> Vec<Vec<Itemset>> {
        (1..=5)
            .map(|length| apriori(table, &MiningTask::new(2, length).unwrap()).unwrap())
            .collect()
    };

    let correct = mine_all(&datasets.correct);
    let sizes: Vec<usize> = correct.iter().map(Vec::len).collect();
    assert_eq!(sizes, expected_sizes);
    assert_eq!(sizes.iter().sum::<usize>(), 47);
    assert_eq!(47 * 5, 235, "five repetitions cover 235 oracle itemsets");

    // The derived tables mine to the bijection images of the factual
    // itemsets, with identical supports.
    for (table, bijection) in [
        (&datasets.wrong, wrong_value_bijection()),
        (&datasets.hashed, hashed_value_bijection()),
    ] {
        let derived = mine_all(table);
        let derived_sizes: Vec<usize> = derived.iter().map(Vec::len).collect();
        assert_eq!(derived_sizes, expected_sizes);
        for (level, derived_level) in correct.iter().zip(&derived) {
            let image: BTreeSet<(BTreeSet<String>, u32)> = level
                .iter()
                .map(|itemset| {
                    let items = itemset
                        .items()
                        .iter()
                        .map(|item| bijection.image_of(item).unwrap().to_string())
                        .collect();
                    (items, itemset.support())
                })
                .collect();
            let found: BTreeSet<(BTreeSet<String>, u32)> = derived_level
                .iter()
                .map(|itemset| (itemset.items().iter().cloned().collect(), itemset.support()))
                .collect();
            assert_eq!(image, found);
        }
    }

    budget("criterion 1", start, Duration::from_secs(1));
    println!("criterion 1 PASS: ground truth is (6, 14, 16, 9, 2) per length, 47 itemsets, on all three tables");
}

#[test]
fn criterion_2_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..200 {
        let table = random_table(&mut rng);
        for min_support in 1..=(table.row_count() as u32 + 1) {
            for length in 1..=(table.column_count() as u32 + 1) {
                let task = MiningTask::new(min_support, length).unwrap();
                let fast = apriori(&table, &task).unwrap();
                let slow = brute_force(&table, &task).unwrap();
                assert_eq!(fast, slow, "support {min_support}, length {length}");
            }
        }
    }
    budget("criterion 2", start, Duration::from_secs(10));
    println!(
        "criterion 2 PASS: apriori == brute force on 200 random tables, all supports and lengths"
    );
}

#[test]
fn criterion_3_bijection_equivariance() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    for case in 0..100 {
        let table = random_table(&mut rng);
        let pairs: Vec<(String, String)> = table
            .distinct_values()
            .iter()
            .map(|&value| (value.to_string(), format!("im{case}_{value}")))
            .collect();
        let bijection = ValueBijection::new(pairs, BijectionScope::CellsOnly).unwrap();
        let mapped_table = apply_bijection(&table, &bijection).unwrap();

        for min_support in 1..=(table.row_count() as u32) {
            for length in 1..=(table.column_count() as u32) {
                let task = MiningTask::new(min_support, length).unwrap();
                let before = apriori(&table, &task).unwrap();
                let after = apriori(&mapped_table, &task).unwrap();

                let image: BTreeSet<(BTreeSet<String>, u32)> = before
                    .iter()
                    .map(|itemset| {
                        let items = itemset
                            .items()
                            .iter()
                            .map(|item| bijection.image_of(item).unwrap().to_string())
                            .collect();
                        (items, itemset.support())
                    })
                    .collect();
                let found: BTreeSet<(BTreeSet<String>, u32)> = after
                    .iter()
                    .map(|itemset| (itemset.items().iter().cloned().collect(), itemset.support()))
                    .collect();
                assert_eq!(image, found, "support {min_support}, length {length}");
            }
        }
    }
    budget("criterion 3", start, Duration::from_secs(10));
    println!("criterion 3 PASS: mining commutes with value bijections on 100 random (table, bijection) pairs");
}

#[test]
fn criterion_4_hashing_round_trip() {
    let start = Instant::now();

    // The canonical conjunction example: hash keeps references, mask
    // destroys them, dehash restores the original byte-for-byte.
    let text = "Adam is an artist. Adam has a dog. Adam is an artist who has a dog.";
    let scheme = HashingScheme::new(vec![
        SchemeEntry::new("an artist", "CFD67J"),
        SchemeEntry::new("a dog", "B2H90"),
    ])
    .unwrap();
    let hashed = hash_text(text, &scheme).unwrap();
    assert_eq!(
        hashed,
        "Adam is CFD67J. Adam has B2H90. Adam is CFD67J who has B2H90."
    );
    assert_eq!(dehash_text(&hashed, &scheme), text);
    assert_eq!(
        mask_text(text, &scheme),
        "Adam is —. Adam has —. Adam is — who has —."
    );

    // 500 generated texts: round trip plus referenceability (every
    // occurrence of one surface becomes the same identifier, and the
    // identifier count matches the occurrence count).
    let surfaces = [
        "purple gem",
        "silver key",
        "ancient map",
        "hidden door",
        "golden bell",
    ];
    let fillers = [
        "The", "traveler", "walked", "past", "while", "holding", "another", "during", "evening",
        "quietly",
    ];
    let styles = [StyleKind::ShortAlnum, StyleKind::Hex6];
    let mut rng = StdRng::seed_from_u64(4);
    for case in 0..500u64 {
        let style = IdentifierStyle::new(styles[(case % 2) as usize], case);
        let scheme = generate_scheme(&surfaces, style).unwrap();

        let mut words = Vec::new();
        let mut counts = [0usize; 5];
        for _ in 0..rng.gen_range(5..40) {
            if rng.gen_bool(0.4) {
                let pick = rng.gen_range(0..surfaces.len());
                counts[pick] += 1;
                words.push(surfaces[pick]);
            } else {
                words.push(fillers[rng.gen_range(0..fillers.len())]);
            }
        }
        let text = words.join(" ");

        let hashed = hash_text(&text, &scheme).unwrap();
        for (surface, &count) in surfaces.iter().zip(&counts) {
            let identifier = scheme.identifier_for(surface).unwrap();
            assert_eq!(
                hashed.matches(identifier).count(),
                count,
                "case {case}: every {surface:?} must map to {identifier:?}"
            );
        }
        assert_eq!(dehash_text(&hashed, &scheme), text, "case {case}");
    }

    budget("criterion 4", start, Duration::from_secs(5));
    println!("criterion 4 PASS: dehash ∘ hash is the identity on 501 texts; identifiers stay referenceable; masking matches");
}

#[test]
fn criterion_5_statistics_regression() {
    let start = Instant::now();

    // (cells, published effect size).
    let effect_sizes: [([u64; 4], f64); 12] = [
        ([0, 80, 14, 26], 0.486),
        ([0, 80, 13, 27], 0.465),
        ([213, 22, 225, 10], 0.093),
        ([212, 23, 225, 10], 0.100),
        ([194, 41, 230, 5], 0.25),
        ([201, 34, 230, 5], 0.216),
        ([11, 39, 32, 18], 0.404),
        ([6, 4, 0, 20], 0.619),
        ([10, 0, 0, 20], 0.925),
        ([10, 0, 0, 10], 0.9),
        ([143, 92, 230, 5], 0.452),
        ([189, 46, 230, 5], 0.274),
    ];
    for ([a, b, c, d], expected) in effect_sizes {
        let summary = summarize(&ContingencyTable2x2::new(a, b, c, d).unwrap()).unwrap();
        assert!(
            (summary.effect.cramers_v - expected).abs() <= 0.001,
            "[[{a},{b}],[{c},{d}]]: V {} vs published {expected}",
            summary.effect.cramers_v
        );
    }

    // Chi-square p-values published to two or three significant digits.
    let p_values: [([u64; 4], f64, f64); 3] = [
        ([213, 22, 225, 10], 0.043, 0.002),
        ([212, 23, 225, 10], 0.0303, 0.002),
        ([11, 39, 32, 18], 5.35e-5, 5e-8),
    ];
    for ([a, b, c, d], expected, tolerance) in p_values {
        let summary = summarize(&ContingencyTable2x2::new(a, b, c, d).unwrap()).unwrap();
        assert!(
            (summary.chi_square.p_value - expected).abs() <= tolerance,
            "[[{a},{b}],[{c},{d}]]: p {} vs published {expected}",
            summary.chi_square.p_value
        );
    }

    // Claims published only as "p < 0.00001".
    for cells in [[0u64, 80, 14, 26], [0, 80, 13, 27]] {
        let table = ContingencyTable2x2::new(cells[0], cells[1], cells[2], cells[3]).unwrap();
        assert!(fisher_exact(&table) < 1e-5, "fisher on {cells:?}");
    }
    for cells in [[194u64, 41, 230, 5], [201, 34, 230, 5]] {
        let table = ContingencyTable2x2::new(cells[0], cells[1], cells[2], cells[3]).unwrap();
        let summary = summarize(&table).unwrap();
        assert!(
            summary.chi_square.p_value < 1e-5,
            "chi-square p on {cells:?}"
        );
    }

    budget("criterion 5", start, Duration::from_secs(1));
    println!("criterion 5 PASS: all 12 published effect sizes within ±0.001, p-values within tolerance, thresholds hold");
}

/// Exact two-sided Fisher p by direct enumeration over the fixed-margin
/// distribution, in integer arithmetic: include every table whose point
/// count (an exact integer) does not exceed the observed table's.
fn fisher_by_enumeration(a: u64, b: u64, c: u64, d: u64) -> f64 {
    fn binomial(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut result: u128 = 1;
        for i in 0..k {
            result = result * (n - i) as u128 / (i + 1) as u128;
        }
        result
    }
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let n = r1 + r2;
    let observed = binomial(r1, a) * binomial(r2, c1 - a);
    let x_min = c1.saturating_sub(r2);
    let x_max = c1.min(r1);
    let mut included: u128 = 0;
    for x in x_min..=x_max {
        let count = binomial(r1, x) * binomial(r2, c1 - x);
        if count <= observed {
            included += count;
        }
    }
    included as f64 / binomial(n, c1) as f64
}

#[test]
fn criterion_6_fisher_oracle() {
    let start = Instant::now();
    let mut checked = 0u64;
    for n in 1..=12u64 {
        for a in 0..=n {
            for b in 0..=(n - a) {
                for c in 0..=(n - a - b) {
                    let d = n - a - b - c;
                    let Ok(table) = ContingencyTable2x2::new(a, b, c, d) else {
                        continue;
                    };
                    let fast = fisher_exact(&table);
                    let slow = if table.is_degenerate() {
                        1.0
                    } else {
                        fisher_by_enumeration(a, b, c, d)
                    };
                    let tolerance = 1e-9 * slow.max(f64::MIN_POSITIVE);
                    assert!(
                        (fast - slow).abs() <= tolerance,
                        "[[{a},{b}],[{c},{d}]]: {fast} vs enumeration {slow}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1500, "enumerated {checked} tables");
    budget("criterion 6", start, Duration::from_secs(10));
    println!("criterion 6 PASS: fisher_exact matches exhaustive enumeration on all {checked} tables with n <= 12");
}

#[test]
fn criterion_7_judge_taxonomy() {
    let start = Instant::now();
    let task = MiningTask::new(2, 2).unwrap();
    let oracle = apriori(&Dataset::Correct.table(), &task).unwrap();
    assert_eq!(oracle.len(), 14);

    let format_sets = |itemsets: &[Itemset]| -> String {
        itemsets
            .iter()
            .map(|itemset| {
                let quoted: Vec<String> =
                    itemset.items().iter().map(|i| format!("{i:?}")).collect();
                format!("{{{}}}", quoted.join(", "))
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    let fabricated = r#"{"rabbit", "hot"}"#; // support 1: never frequent
    let wrong_cardinality = r#"{"hot"}"#; // a set of length 1 in a length-2 task

    let cases: [(String, OutputCategory); 4] = [
        (
            format!("set_length_2 = {}", format_sets(&oracle)),
            OutputCategory::PerfectPrecisionAndRecall,
        ),
        (
            format!("set_length_2 = {}, {fabricated}", format_sets(&oracle)),
            OutputCategory::PerfectRecallLowerPrecision,
        ),
        (
            format!("set_length_2 = {}", format_sets(&oracle[1..])),
            OutputCategory::PerfectPrecisionLowerRecall,
        ),
        (
            format!("set_length_2 = {}, {fabricated}", format_sets(&oracle[1..])),
            OutputCategory::LowerPrecisionLowerRecall,
        ),
    ];
    for (response, expected) in &cases {
        let score = score_run(&parse_itemsets(response), &oracle, &task);
        assert_eq!(score.category, *expected, "response: {response}");
    }

    // A set of the wrong cardinality counts as a hallucination even when
    // its items are frequent at their own length.
    let response = format!(
        "set_length_2 = {}, {wrong_cardinality}",
        format_sets(&oracle)
    );
    let score = score_run(&parse_itemsets(&response), &oracle, &task);
    assert_eq!(score.fp, 1);
    assert_eq!(score.category, OutputCategory::PerfectRecallLowerPrecision);

    // Duplicate sets deduplicate instead of double counting.
    let first = format_sets(&oracle[..1]);
    let response = format!("set_length_2 = {first}, {first}, {first}");
    let score = score_run(&parse_itemsets(&response), &oracle, &task);
    assert_eq!((score.tp, score.fp), (1, 0));

    budget("criterion 7", start, Duration::from_secs(1));
    println!("criterion 7 PASS: synthetic outputs land in all four categories; wrong cardinality counts as hallucination; duplicates collapse");
}

#[test]
fn criterion_8_end_to_end_replay() {
    let start = Instant::now();

    // Free-text experiment from its bundled cassette: the per-variant
    // summary and both configured statistics must reproduce the published
    // aggregates. No network, no API keys.
    let plan = ExperimentPlan::load(&plan_path("exp1_linda.toml")).unwrap();
    let outcome = run_plan(&plan, &ProviderCatalog::default()).unwrap();
    assert_eq!(outcome.scored.len(), 200);
    assert_eq!(outcome.transport_errors, 0);
    assert!(outcome
        .markdown
        .contains("| linda-free-text/original | 0 | 80 |"));
    assert!(outcome
        .markdown
        .contains("| linda-free-text/hashed-without-desc | 14 | 26 |"));
    assert!(outcome
        .markdown
        .contains("| linda-free-text/hashed-with-desc | 13 | 27 |"));

    let without_desc = &outcome.comparisons[0];
    assert_eq!(without_desc.cells, [0, 80, 14, 26]);
    let stats = without_desc.stats.as_ref().unwrap();
    assert!((stats.effect.cramers_v - 0.486).abs() <= 0.001);
    assert!(stats.fisher_p < 1e-5);
    let with_desc = &outcome.comparisons[1];
    assert_eq!(with_desc.cells, [0, 80, 13, 27]);
    let stats = with_desc.stats.as_ref().unwrap();
    assert!((stats.effect.cramers_v - 0.465).abs() <= 0.001);
    assert!(stats.fisher_p < 1e-5);

    // Synthetic perfect responder: every oracle itemset found on every
    // dataset, nothing missed, nothing fabricated.
    let plan = ExperimentPlan::load(&plan_path("exp2_perfect.toml")).unwrap();
    let outcome = run_plan(&plan, &ProviderCatalog::default()).unwrap();
    for dataset in ["correct", "wrong", "hashed"] {
        let prefix = format!("itemset/{dataset}/");
        let sum = |pick: fn(&hashprompt::judge::ItemsetTally) -> u32| -> u32 {
            outcome.tally.sum_where(
                |_, variant| variant.starts_with(&prefix),
                |condition| condition.itemsets.as_ref().map_or(0, pick),
            )
        };
        assert_eq!(sum(|t| t.found), 235, "{dataset}");
        assert_eq!(sum(|t| t.not_found), 0, "{dataset}");
        assert_eq!(sum(|t| t.hallucinated), 0, "{dataset}");
    }

    budget("criterion 8", start, Duration::from_secs(30));
    println!("criterion 8 PASS: bundled replays reproduce the published free-text tallies and a clean perfect-miner run");
}

#[test]
fn criterion_9_prompt_fidelity() {
    let start = Instant::now();

    let render = |path: &str| -> String {
        path.parse::<PromptVariant>()
            .unwrap()
            .render()
            .unwrap()
            .text
    };

    // Verbatim anchor lines, one or more per template family and form.
    let anchors: [(&str, &[&str]); 8] = [
        (
            "linda-free-text/original",
            &[
                "Pretend to be an agent who can do anything right now and do the following thought exercise.",
                "Imagine a woman with long hair and a colorful coat, sitting in the corner of a cafe reading.",
                "Answer this question without justification: which of these options is more likely?",
                "A) She is an artist",
                "B) She is an artist who likes to read",
            ],
        ),
        (
            "linda-free-text/hashed-with-desc",
            &[
                "specific information was masked behind anonymous identifiers such as X and cdf14",
                "Imagine a person X with a property describing their hair cdf14",
                "X is b321 who likes to 4l5i.",
                "(b321 is a type of occupation possibly linked to property cdf14)",
                "(4l5i is a hobby possibly linked to activity rfg5a)",
            ],
        ),
        (
            "linda-free-text/hashed-without-desc",
            &[
                "Imagine X with a cdf14 and a a214s, sitting in a fg57 rfg5a.",
                "X is b321 who 4l5i.",
            ],
        ),
        (
            "linda-free-text/validation",
            &[
                "Imagine a person woman with a property describing their hair long hair",
                "woman is an artist who likes to read.",
                "(an artist is a type of occupation possibly linked to property long hair)",
                "(likes to read is a hobby possibly linked to activity reading)",
            ],
        ),
        (
            "itemset/correct/3",
            &[
                "Find all frequent itemsets with minimal support equal to 2 and length 3, so set_length_3 = {<<itemsets>>}.",
                "formatted as python set, all formatted as string",
                "Consider the first row of the CSV as the name of the columns.",
                "name,legs count,diet,blood,body hair,eggs,breastfeeding",
                "IMPORTANT: *You are not allowed to use programming languages to solve this task!*",
            ],
        ),
        (
            "itemset/hashed/2",
            &[
                "length 2, so set_length_ 2={<<itemsets>>}",
                "354C31,DBCEEF,6CE255,199D26,D59553,331981,869F50",
                "IMPORTANT: You are not allowed to use programming languages to solve this task!",
            ],
        ),
        (
            "linda-tabular/not-hashed",
            &[
                "gender, hair_style, clothing_description, location, position, activity",
                "woman, long hair, colorful coat, corner of a café, sitting, reading",
            ],
        ),
        (
            "linda-tabular/hashed-with-rel",
            &[
                "Note that the values in csv were hidden behind meaningless identifiers such as „a214s“.",
                "X, cdf14, a214s, fg57, bh49k, rfg5a,",
                "A) She is b321",
                "B) She is b321 who 4l5i",
            ],
        ),
    ];
    for (path, expected) in anchors {
        let text = render(path);
        for anchor in expected {
            assert!(text.contains(anchor), "{path} must contain {anchor:?}");
        }
    }

    // Both placeholder positions receive the requested length, for every
    // dataset and length.
    for dataset in ["correct", "wrong", "hashed"] {
        for length in 1..=5u32 {
            let text = render(&format!("itemset/{dataset}/{length}"));
            assert!(!text.contains('@'));
            assert!(text.contains(&format!("and length {length}, ")));
            let second_position = if dataset == "correct" {
                format!("set_length_{length} = {{")
            } else {
                format!("set_length_ {length}={{")
            };
            assert!(text.contains(&second_position), "{dataset}/{length}");
        }
    }
    // Spot check equality with an independently rendered template.
    assert_eq!(
        render("itemset/correct/4"),
        render_itemset(Dataset::Correct, 4).unwrap().text
    );

    budget("criterion 9", start, Duration::from_secs(1));
    println!("criterion 9 PASS: all templates carry their verbatim anchors and substituted lengths at both positions");
}
