//! Transaction tables and the value bijections that derive dataset variants.
//!
//! The itemset experiments run over three small CSV tables: a factual
//! `correct` table of animal traits, a `wrong` variant in which every
//! bias-inducing value has been systematically swapped for a misleading one
//! (rabbits get six legs), and a `hashed` variant in which every value — and
//! the header — is replaced by a meaningless identifier. Both derived tables
//! are images of the correct one under a [`ValueBijection`], which is exactly
//! what keeps their frequent-itemset structure identical: mining commutes
//! with any injective per-cell relabeling.
//!
//! Tables here are deliberately tiny and the CSV dialect deliberately dumb:
//! no quoting, no escapes, cells trimmed, a comma inside a value is a format
//! error. Cross-column uniqueness (no value appears in two different columns)
//! is a precondition for treating bare values as items during mining and is
//! checked explicitly.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Errors raised by table parsing, validation, and bijection application.
#[derive(Debug, Error)]
pub enum CorpusError {
    /// The input contained no non-blank lines.
    #[error("empty input: no CSV lines found")]
    EmptyTable,
    /// A data row's width differs from the header's. Row indices are 1-based.
    #[error("ragged table: data row {0} has a different width than the header")]
    RaggedTable(usize),
    /// The same value occurs in two different columns, so bare values can no
    /// longer identify items unambiguously.
    #[error("value {value:?} appears in two different columns ({first} and {second})")]
    CrossColumnClash {
        value: String,
        first: usize,
        second: usize,
    },
    /// The bijection is not total over the table's scoped vocabulary.
    #[error("bijection has no image for value {0:?}")]
    IncompleteBijection(String),
    /// Two sources map to the same target.
    #[error("bijection is not injective: {left:?} and {right:?} both map to {target:?}")]
    NotInjective {
        left: String,
        right: String,
        target: String,
    },
    /// The same source value is mapped twice.
    #[error("bijection maps source {0:?} more than once")]
    DuplicateSource(String),
    /// Cell values cannot contain commas in this dialect.
    #[error("value {0:?} contains a comma; this CSV dialect has no quoting")]
    CommaInValue(String),
    /// A bijection file line did not look like `source => target`.
    #[error("bijection line {0}: expected `source => target`")]
    MalformedPair(usize),
    /// A table needs at least one column.
    #[error("header must have at least one column")]
    EmptyHeader,
}

/// A rectangular table of trimmed string cells with a named header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TransactionTable {
    /// Builds a table, enforcing rectangularity and the no-comma dialect rule.
    /// A table may have zero data rows (header only).
    pub fn new(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, CorpusError> {
        if header.is_empty() {
            return Err(CorpusError::EmptyHeader);
        }
        for cell in header.iter().chain(rows.iter().flatten()) {
            if cell.contains(',') {
                return Err(CorpusError::CommaInValue(cell.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(CorpusError::RaggedTable(i + 1));
            }
        }
        Ok(Self { header, rows })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn column_count(&self) -> usize {
        self.header.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Serializes the table back to CSV text (no trailing newline).
    pub fn to_csv(&self) -> String {
        let mut lines = Vec::with_capacity(self.rows.len() + 1);
        lines.push(self.header.join(","));
        for row in &self.rows {
            lines.push(row.join(","));
        }
        lines.join("\n")
    }

    /// Verifies that no data value occurs in two different columns.
    ///
    /// Repetition *within* a column is fine (that is what support counts);
    /// repetition across columns would make a bare value ambiguous as an
    /// item.
    pub fn check_cross_column_unique(&self) -> Result<(), CorpusError> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for row in &self.rows {
            for (col, value) in row.iter().enumerate() {
                match seen.get(value.as_str()) {
                    Some(&first) if first != col => {
                        return Err(CorpusError::CrossColumnClash {
                            value: value.clone(),
                            first,
                            second: col,
                        });
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(value, col);
                    }
                }
            }
        }
        Ok(())
    }

    /// All distinct data-cell values, sorted. The header does not contribute.
    pub fn distinct_values(&self) -> Vec<&str> {
        let mut values: Vec<&str> = self.rows.iter().flatten().map(String::as_str).collect();
        values.sort_unstable();
        values.dedup();
        values
    }
}

impl fmt::Display for TransactionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// Parses CSV text: first non-blank line is the header, cells are trimmed.
pub fn parse_table(text: &str) -> Result<TransactionTable, CorpusError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line = lines.next().ok_or(CorpusError::EmptyTable)?;
    let split =
        |line: &str| -> Vec<String> { line.split(',').map(|c| c.trim().to_string()).collect() };
    let header = split(header_line);
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = split(line);
        if row.len() != header.len() {
            return Err(CorpusError::RaggedTable(i + 1));
        }
        rows.push(row);
    }
    TransactionTable::new(header, rows)
}

/// Which part of a table a bijection covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BijectionScope {
    /// Data cells only; the header keeps its original names.
    CellsOnly,
    /// Data cells and header names alike.
    CellsAndHeader,
}

/// An injective value-to-value map, applied atomically per cell.
///
/// Applying the map cell by cell (never as sequential text substitution) is
/// what makes chained mappings such as `4 → 6, 2 → 4` and swaps such as
/// `true ↔ false` safe: each cell is looked up exactly once in the original
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueBijection {
    pairs: Vec<(String, String)>,
    index: BTreeMap<String, String>,
    scope: BijectionScope,
}

impl ValueBijection {
    /// Builds a bijection from ordered `(source, target)` pairs.
    pub fn new(pairs: Vec<(String, String)>, scope: BijectionScope) -> Result<Self, CorpusError> {
        let mut index = BTreeMap::new();
        let mut targets: BTreeMap<&str, &str> = BTreeMap::new();
        for (source, target) in &pairs {
            if index.contains_key(source) {
                return Err(CorpusError::DuplicateSource(source.clone()));
            }
            if let Some(&other) = targets.get(target.as_str()) {
                return Err(CorpusError::NotInjective {
                    left: other.to_string(),
                    right: source.clone(),
                    target: target.clone(),
                });
            }
            targets.insert(target, source);
            index.insert(source.clone(), target.clone());
        }
        Ok(Self {
            pairs,
            index,
            scope,
        })
    }

    /// Parses the bijection file format: one `source => target` per line,
    /// blank lines and `#` comments skipped.
    pub fn parse(text: &str, scope: BijectionScope) -> Result<Self, CorpusError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, target) = line
                .split_once("=>")
                .ok_or(CorpusError::MalformedPair(i + 1))?;
            pairs.push((source.trim().to_string(), target.trim().to_string()));
        }
        Self::new(pairs, scope)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn scope(&self) -> BijectionScope {
        self.scope
    }

    pub fn image_of(&self, value: &str) -> Option<&str> {
        self.index.get(value).map(String::as_str)
    }

    /// The inverse map (targets become sources). Always valid because the
    /// forward map is injective with unique sources.
    pub fn inverse(&self) -> ValueBijection {
        let pairs = self
            .pairs
            .iter()
            .map(|(s, t)| (t.clone(), s.clone()))
            .collect();
        ValueBijection::new(pairs, self.scope).expect("inverse of a valid bijection is valid")
    }
}

/// Applies a bijection to every scoped cell of a cross-column-unique table.
pub fn apply_bijection(
    table: &TransactionTable,
    bijection: &ValueBijection,
) -> Result<TransactionTable, CorpusError> {
    table.check_cross_column_unique()?;
    let map_one = |value: &String| -> Result<String, CorpusError> {
        bijection
            .image_of(value)
            .map(str::to_string)
            .ok_or_else(|| CorpusError::IncompleteBijection(value.clone()))
    };
    let header = match bijection.scope() {
        BijectionScope::CellsAndHeader => table
            .header()
            .iter()
            .map(map_one)
            .collect::<Result<Vec<_>, _>>()?,
        BijectionScope::CellsOnly => table.header().to_vec(),
    };
    let rows = table
        .rows()
        .iter()
        .map(|row| row.iter().map(map_one).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    TransactionTable::new(header, rows)
}

/// The factual animal-traits table used by the itemset experiments.
pub const CSV_CORRECT: &str = "name,legs count,diet,blood,body hair,eggs,breastfeeding
rabbit,4,herbivore,hot,yes,false,indeed
human,2,omnivore,hot,yes,false,indeed
fox,4,omnivore,hot,yes,false,indeed
platypus,4,carnivore,hot,yes,true,indeed";

/// The misleading variant: same animals, systematically scrambled traits.
pub const CSV_WRONG: &str = "name,legs count,diet,blood,body hair,eggs,breastfeeding
rabbit,6,carnivore,cold,no,true,negative
human,4,herbivore,cold,no,true,negative
fox,6,herbivore,cold,no,true,negative
platypus,6,omnivore,cold,no,false,negative";

/// The identifier-only variant: every value and header name hashed.
pub const CSV_HASHED: &str = "354C31,DBCEEF,6CE255,199D26,D59553,331981,869F50
B2895C,B0FAAD,9ED0E8,D11884,269963,ADC8A2,999999
1520D1,49E95E,A6463C,D11884,269963,ADC8A2,999999
0BEA8D,B0FAAD,A6463C,D11884,269963,ADC8A2,999999
7EA60D,B0FAAD,C5B9CC,D11884,269963,420666,999999";

/// The mapping that turns the correct table into the wrong one.
///
/// Animal names map to themselves; every trait value is replaced by a
/// misleading counterpart. Note the chain `4 → 6, 2 → 4` and the swap
/// `true ↔ false`: per-cell application keeps these well-defined.
pub fn wrong_value_bijection() -> ValueBijection {
    let pairs = [
        ("rabbit", "rabbit"),
        ("human", "human"),
        ("fox", "fox"),
        ("platypus", "platypus"),
        ("4", "6"),
        ("2", "4"),
        ("herbivore", "carnivore"),
        ("omnivore", "herbivore"),
        ("carnivore", "omnivore"),
        ("hot", "cold"),
        ("yes", "no"),
        ("false", "true"),
        ("true", "false"),
        ("indeed", "negative"),
    ];
    ValueBijection::new(
        pairs.iter().map(|&(s, t)| (s.into(), t.into())).collect(),
        BijectionScope::CellsOnly,
    )
    .expect("builtin wrong mapping is valid")
}

/// The mapping that turns the correct table into the hashed one
/// (header included).
pub fn hashed_value_bijection() -> ValueBijection {
    let pairs = [
        ("name", "354C31"),
        ("legs count", "DBCEEF"),
        ("diet", "6CE255"),
        ("blood", "199D26"),
        ("body hair", "D59553"),
        ("eggs", "331981"),
        ("breastfeeding", "869F50"),
        ("rabbit", "B2895C"),
        ("human", "1520D1"),
        ("fox", "0BEA8D"),
        ("platypus", "7EA60D"),
        ("4", "B0FAAD"),
        ("2", "49E95E"),
        ("herbivore", "9ED0E8"),
        ("omnivore", "A6463C"),
        ("carnivore", "C5B9CC"),
        ("hot", "D11884"),
        ("yes", "269963"),
        ("false", "ADC8A2"),
        ("true", "420666"),
        ("indeed", "999999"),
    ];
    ValueBijection::new(
        pairs.iter().map(|&(s, t)| (s.into(), t.into())).collect(),
        BijectionScope::CellsAndHeader,
    )
    .expect("builtin hash mapping is valid")
}

/// The three builtin dataset variants.
#[derive(Debug, Clone)]
pub struct BuiltinDatasets {
    pub correct: TransactionTable,
    pub wrong: TransactionTable,
    pub hashed: TransactionTable,
}

/// Returns the three builtin tables, byte-faithful to the experiment prompts.
pub fn builtin_datasets() -> BuiltinDatasets {
    BuiltinDatasets {
        correct: parse_table(CSV_CORRECT).expect("builtin correct table parses"),
        wrong: parse_table(CSV_WRONG).expect("builtin wrong table parses"),
        hashed: parse_table(CSV_HASHED).expect("builtin hashed table parses"),
    }
}

/// Names one of the three builtin dataset variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dataset {
    Correct,
    Wrong,
    Hashed,
}

impl Dataset {
    pub const ALL: [Dataset; 3] = [Dataset::Correct, Dataset::Wrong, Dataset::Hashed];

    pub fn table(self) -> TransactionTable {
        let datasets = builtin_datasets();
        match self {
            Dataset::Correct => datasets.correct,
            Dataset::Wrong => datasets.wrong,
            Dataset::Hashed => datasets.hashed,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Correct => "correct",
            Dataset::Wrong => "wrong",
            Dataset::Hashed => "hashed",
        }
    }

    pub fn parse(name: &str) -> Option<Dataset> {
        match name {
            "correct" => Some(Dataset::Correct),
            "wrong" => Some(Dataset::Wrong),
            "hashed" => Some(Dataset::Hashed),
            _ => None,
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
