//! Ground-truth frequent-itemset mining.
//!
//! Model outputs on the itemset task are scored against the exact solution,
//! which this module computes twice by construction: [`apriori`] is the
//! production path (classic level-wise candidate generation), and
//! [`brute_force`] is an independent oracle that enumerates every value
//! subset outright. The two are kept deliberately separate so they can check
//! each other; at desk scale, performance is irrelevant and clarity wins.
//!
//! Items are bare cell values rather than `(column, value)` pairs because the
//! task prompts print itemsets "without the column names"; the cross-column
//! uniqueness precondition (see [`crate::corpus`]) is what makes that
//! unambiguous.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::corpus::{CorpusError, TransactionTable};

/// Maximum distinct-value count accepted by the brute-force oracle.
const ORACLE_VALUE_LIMIT: usize = 20;

/// Errors raised by the mining operations.
#[derive(Debug, Error)]
pub enum MinerError {
    /// Mining parameters must both be at least 1.
    #[error("mining task must have min_support ≥ 1 and length ≥ 1")]
    InvalidTask,
    /// The input table failed a corpus-level precondition.
    #[error(transparent)]
    Table(#[from] CorpusError),
    /// The brute-force oracle refuses inputs beyond desk scale.
    #[error("brute-force oracle limited to {limit} distinct values, table has {found}")]
    OracleTooLarge { found: usize, limit: usize },
}

/// A set of item labels together with its exact support count.
///
/// Items are kept sorted, so equality and ordering are canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Itemset {
    items: Vec<String>,
    support: u32,
}

impl Itemset {
    pub fn new<I, S>(items: I, support: u32) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut items: Vec<String> = items.into_iter().map(Into::into).collect();
        items.sort();
        items.dedup();
        Self { items, support }
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn support(&self) -> u32 {
        self.support
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Formats the items as a quoted set literal: `{"4", "hot"}`.
impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{item:?}")?;
        }
        write!(f, "}}")
    }
}

/// Parameters of one mining run: the support threshold and the exact itemset
/// length requested of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MiningTask {
    pub min_support: u32,
    pub length: u32,
}

impl MiningTask {
    pub fn new(min_support: u32, length: u32) -> Result<Self, MinerError> {
        let task = Self {
            min_support,
            length,
        };
        task.validate()?;
        Ok(task)
    }

    fn validate(&self) -> Result<(), MinerError> {
        if self.min_support < 1 || self.length < 1 {
            return Err(MinerError::InvalidTask);
        }
        Ok(())
    }
}

fn row_sets(table: &TransactionTable) -> Vec<BTreeSet<&str>> {
    table
        .rows()
        .iter()
        .map(|row| row.iter().map(String::as_str).collect())
        .collect()
}

fn support_of(rows: &[BTreeSet<&str>], items: &[&str]) -> u32 {
    rows.iter()
        .filter(|row| items.iter().all(|item| row.contains(item)))
        .count() as u32
}

/// Level-wise Apriori: exactly the itemsets of `task.length` items with
/// support ≥ `task.min_support`, in canonical (lexicographic) order.
///
/// Lengths beyond the column count simply yield an empty result — the prompt
/// space admits such requests in principle, and the correct answer is "none".
pub fn apriori(table: &TransactionTable, task: &MiningTask) -> Result<Vec<Itemset>, MinerError> {
    task.validate()?;
    table.check_cross_column_unique()?;
    if task.length as usize > table.column_count() {
        return Ok(Vec::new());
    }
    let rows = row_sets(table);

    // Level 1: frequent single values, sorted (BTreeMap iteration order).
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for row in &rows {
        for &value in row {
            *counts.entry(value).or_insert(0) += 1;
        }
    }
    let mut level: Vec<(Vec<&str>, u32)> = counts
        .into_iter()
        .filter(|&(_, support)| support >= task.min_support)
        .map(|(value, support)| (vec![value], support))
        .collect();

    for _ in 2..=task.length {
        let known: BTreeSet<&[&str]> = level.iter().map(|(items, _)| items.as_slice()).collect();
        let mut next = Vec::new();
        for i in 0..level.len() {
            for j in (i + 1)..level.len() {
                let (a, b) = (&level[i].0, &level[j].0);
                // Prefix join: extend `a` by the last item of `b` when all
                // but the last items agree. The level is sorted, so equal
                // prefixes are contiguous and the first mismatch ends the
                // inner scan.
                if a[..a.len() - 1] != b[..b.len() - 1] {
                    break;
                }
                let mut candidate = a.clone();
                candidate.push(b[b.len() - 1]);
                // Downward closure: every (k-1)-subset must itself be
                // frequent, otherwise the candidate cannot be.
                let closed = (0..candidate.len()).all(|skip| {
                    let mut subset = candidate.clone();
                    subset.remove(skip);
                    known.contains(subset.as_slice())
                });
                if !closed {
                    continue;
                }
                let support = support_of(&rows, &candidate);
                if support >= task.min_support {
                    next.push((candidate, support));
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }

    Ok(level
        .into_iter()
        .filter(|(items, _)| items.len() == task.length as usize)
        .map(|(items, support)| Itemset::new(items, support))
        .collect())
}

/// Exhaustive oracle: enumerates every `task.length`-subset of the distinct
/// values and counts its support directly. Same contract as [`apriori`],
/// guarded to desk-scale inputs.
pub fn brute_force(
    table: &TransactionTable,
    task: &MiningTask,
) -> Result<Vec<Itemset>, MinerError> {
    task.validate()?;
    table.check_cross_column_unique()?;
    let values = table.distinct_values();
    if values.len() > ORACLE_VALUE_LIMIT {
        return Err(MinerError::OracleTooLarge {
            found: values.len(),
            limit: ORACLE_VALUE_LIMIT,
        });
    }
    let rows = row_sets(table);
    Ok(values
        .into_iter()
        .combinations(task.length as usize)
        .filter_map(|combo| {
            let support = support_of(&rows, &combo);
            (support >= task.min_support).then(|| Itemset::new(combo, support))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{
        apply_bijection, builtin_datasets, parse_table, BijectionScope, Dataset, ValueBijection,
    };
    use proptest::prelude::*;

    fn mine(table: &TransactionTable, min_support: u32, length: u32) -> Vec<Itemset> {
        apriori(
            table,
            &MiningTask {
                min_support,
                length,
            },
        )
        .unwrap()
    }

    #[test]
    fn per_length_counts_match_on_all_datasets() {
        // Frozen expected counts, independently verified by exhaustive
        // enumeration: 6 + 14 + 16 + 9 + 2 = 47 frequent itemsets at
        // support 2 across lengths 1..=5, identical for all three variants.
        let expected = [6usize, 14, 16, 9, 2];
        for dataset in Dataset::ALL {
            let table = dataset.table();
            let counts: Vec<usize> = (1..=5).map(|k| mine(&table, 2, k).len()).collect();
            assert_eq!(counts, expected, "counts for {dataset}");
            assert_eq!(counts.iter().sum::<usize>(), 47);
        }
    }

    #[test]
    fn frequent_singletons_are_the_known_six() {
        let table = builtin_datasets().correct;
        let found = mine(&table, 2, 1);
        let expected = [
            ("4", 3),
            ("false", 3),
            ("hot", 4),
            ("indeed", 4),
            ("omnivore", 2),
            ("yes", 4),
        ];
        assert_eq!(found.len(), expected.len());
        for (itemset, (item, support)) in found.iter().zip(expected) {
            assert_eq!(itemset.items(), [item]);
            assert_eq!(itemset.support(), support);
        }
    }

    #[test]
    fn hashed_five_itemsets_are_exact() {
        let table = builtin_datasets().hashed;
        let found = brute_force(
            &table,
            &MiningTask {
                min_support: 2,
                length: 5,
            },
        )
        .unwrap();
        assert_eq!(
            found,
            vec![
                Itemset::new(["269963", "999999", "A6463C", "ADC8A2", "D11884"], 2),
                Itemset::new(["269963", "999999", "ADC8A2", "B0FAAD", "D11884"], 2),
            ]
        );
        assert_eq!(found, mine(&table, 2, 5));
    }

    #[test]
    fn length_beyond_column_count_is_empty() {
        let table = builtin_datasets().correct;
        assert!(mine(&table, 2, 8).is_empty());
        assert!(mine(&table, 1, 100).is_empty());
    }

    #[test]
    fn support_one_length_one_lists_every_distinct_value() {
        let table = builtin_datasets().correct;
        let found = mine(&table, 1, 1);
        assert_eq!(found.len(), table.distinct_values().len());
        assert!(found.iter().all(|s| s.support() >= 1));
    }

    #[test]
    fn zero_parameters_are_rejected() {
        let table = builtin_datasets().correct;
        assert!(matches!(
            apriori(
                &table,
                &MiningTask {
                    min_support: 0,
                    length: 1
                }
            ),
            Err(MinerError::InvalidTask)
        ));
        assert!(matches!(
            brute_force(
                &table,
                &MiningTask {
                    min_support: 2,
                    length: 0
                }
            ),
            Err(MinerError::InvalidTask)
        ));
    }

    #[test]
    fn header_only_table_mines_to_nothing() {
        let table = parse_table("a,b,c").unwrap();
        assert!(mine(&table, 1, 1).is_empty());
        assert!(brute_force(
            &table,
            &MiningTask {
                min_support: 1,
                length: 1
            }
        )
        .unwrap()
        .is_empty());
    }

    #[test]
    fn clashing_table_is_rejected_before_mining() {
        let table = parse_table("a,b\nx,y\ny,x").unwrap();
        assert!(matches!(
            apriori(
                &table,
                &MiningTask {
                    min_support: 1,
                    length: 1
                }
            ),
            Err(MinerError::Table(_))
        ));
    }

    #[test]
    fn oracle_guard_trips_on_wide_vocabularies() {
        let header: Vec<String> = (0..7).map(|c| format!("h{c}")).collect();
        // 3 rows x 7 columns of pairwise-distinct values = 21 > 20.
        let rows: Vec<Vec<String>> = (0..3)
            .map(|r| (0..7).map(|c| format!("v{r}_{c}")).collect())
            .collect();
        let table = TransactionTable::new(header, rows).unwrap();
        match brute_force(
            &table,
            &MiningTask {
                min_support: 1,
                length: 1,
            },
        ) {
            Err(MinerError::OracleTooLarge {
                found: 21,
                limit: 20,
            }) => {}
            other => panic!("expected OracleTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn apriori_matches_oracle_on_builtin_datasets() {
        for dataset in Dataset::ALL {
            let table = dataset.table();
            for min_support in 1..=5 {
                for length in 1..=8 {
                    let task = MiningTask {
                        min_support,
                        length,
                    };
                    assert_eq!(
                        apriori(&table, &task).unwrap(),
                        brute_force(&table, &task).unwrap(),
                        "{dataset} support {min_support} length {length}"
                    );
                }
            }
        }
    }

    #[test]
    fn raising_support_never_adds_itemsets() {
        let table = builtin_datasets().correct;
        for length in 1..=5 {
            for min_support in 1..4 {
                let low: BTreeSet<_> = mine(&table, min_support, length)
                    .into_iter()
                    .map(|s| s.items().to_vec())
                    .collect();
                let high: BTreeSet<_> = mine(&table, min_support + 1, length)
                    .into_iter()
                    .map(|s| s.items().to_vec())
                    .collect();
                assert!(high.is_subset(&low));
            }
        }
    }

    #[test]
    fn downward_closure_holds() {
        let table = builtin_datasets().correct;
        for length in 2..=5u32 {
            let shorter: BTreeSet<Vec<String>> = mine(&table, 2, length - 1)
                .into_iter()
                .map(|s| s.items().to_vec())
                .collect();
            for itemset in mine(&table, 2, length) {
                for skip in 0..itemset.len() {
                    let mut subset = itemset.items().to_vec();
                    subset.remove(skip);
                    assert!(shorter.contains(&subset), "{itemset} missing subset");
                }
            }
        }
    }

    #[test]
    fn display_is_a_quoted_set_literal() {
        let itemset = Itemset::new(["hot", "4"], 3);
        assert_eq!(itemset.to_string(), r#"{"4", "hot"}"#);
    }

    prop_compose! {
        fn arb_table()(cols in 1usize..=4, rows in 1usize..=6)
            (cells in proptest::collection::vec(
                proptest::collection::vec(0u8..4, cols), rows),
             cols in Just(cols))
            -> TransactionTable
        {
            let header = (0..cols).map(|c| format!("h{c}")).collect();
            let rows = cells
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(c, v)| format!("c{c}v{v}"))
                        .collect()
                })
                .collect();
            TransactionTable::new(header, rows).unwrap()
        }
    }

    proptest! {
        #[test]
        fn apriori_equals_brute_force(
            table in arb_table(),
            min_support in 1u32..=4,
            length in 1u32..=5,
        ) {
            let task = MiningTask { min_support, length };
            prop_assert_eq!(
                apriori(&table, &task).unwrap(),
                brute_force(&table, &task).unwrap()
            );
        }

        #[test]
        fn mining_commutes_with_bijections(
            table in arb_table(),
            min_support in 1u32..=3,
            length in 1u32..=4,
        ) {
            let pairs = table
                .distinct_values()
                .into_iter()
                .map(|v| (v.to_string(), format!("img_{v}")))
                .collect();
            let bijection = ValueBijection::new(pairs, BijectionScope::CellsOnly).unwrap();
            let image = apply_bijection(&table, &bijection).unwrap();
            let task = MiningTask { min_support, length };

            let mapped: Vec<Itemset> = {
                let mut sets: Vec<Itemset> = apriori(&table, &task)
                    .unwrap()
                    .into_iter()
                    .map(|s| {
                        let items = s
                            .items()
                            .iter()
                            .map(|item| bijection.image_of(item).unwrap().to_string());
                        Itemset::new(items, s.support())
                    })
                    .collect();
                sets.sort();
                sets
            };
            prop_assert_eq!(mapped, apriori(&image, &task).unwrap());
        }
    }
}
