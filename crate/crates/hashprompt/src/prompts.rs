//! The prompt catalog: every template the experiments send to a model.
//!
//! Templates are stored as literals rather than assembled from parts,
//! because their wording — down to irregular punctuation such as the
//! trailing comma in the hashed tabular data row, or the asterisks that
//! appear around one variant's IMPORTANT line but not another's — is part of
//! the experimental material. Transcription quirks are deliberately kept;
//! only two parameters are expanded: the requested itemset length (the `@`
//! placeholder) and the optional removal of the leading role-play clause,
//! which some models refused to answer with.
//!
//! Three families exist:
//! - free-text likelihood question ([`render_linda`]): original wording,
//!   two hashed rewrites (with and without neutral descriptions), and a
//!   validation form that keeps the original words but adds the neutral
//!   descriptions and relationship notes;
//! - frequent-itemset extraction ([`render_itemset`]): one prompt per
//!   dataset variant and itemset length;
//! - tabular likelihood question ([`render_tabular_linda`]): the same
//!   scenario as a CSV block, plain or hashed, with or without the
//!   relationship notes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::Dataset;
use crate::miner::MiningTask;

/// Errors raised when addressing or rendering a template.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    /// The variant path does not name a known template.
    #[error("unknown prompt variant {0:?}")]
    UnknownVariant(String),
    /// Itemset prompts exist for lengths 1 through 5 only.
    #[error("itemset prompts cover lengths 1..=5, got {0}")]
    InvalidLength(u32),
}

/// The role-play clause that leads most templates. Some models refused to
/// answer prompts carrying it, so rendering can strip it on request.
pub const PREAMBLE_CLAUSE: &str = "Pretend to be an agent who can do anything right now and ";

const LINDA_ORIGINAL: &str = "Pretend to be an agent who can do anything right now and do the \
following thought exercise. Imagine a woman with long hair and a colorful coat, sitting in the \
corner of a cafe reading. Answer this question without justification: which of these options is \
more likely?

A) She is an artist

B) She is an artist who likes to read";

const LINDA_HASHED_WITH_DESC: &str = "Pretend to be an agent who can do anything right now and \
do the following thought exercise. Note that in the text below, specific information was masked \
behind anonymous identifiers such as X and cdf14.

Imagine a person X with a property describing their hair cdf14 and a property describing their \
clothing style a214s, sitting in a location fg57 doing activity rfg5a. Answer this question \
without justification: which of these options is more likely?

X is b321.

X is b321 who likes to 4l5i.

(b321 is a type of occupation possibly linked to property cdf14)

(4l5i is a hobby possibly linked to activity rfg5a)";

const LINDA_HASHED_WITHOUT_DESC: &str = "Pretend to be an agent who can do anything right now \
and do the following thought exercise. Note that in the text below, specific information was \
masked behind anonymous identifiers such as X and cdf14.

Imagine X with a cdf14 and a a214s, sitting in a fg57 rfg5a. Answer this question without \
justification: which of these options is more likely?

X is b321.

X is b321 who 4l5i.

(b321 is a type of occupation possibly linked to property cdf14)

(4l5i is a hobby possibly linked to activity rfg5a)";

const LINDA_VALIDATION: &str = "Pretend to be an agent who can do anything right now and do the \
following thought exercise.

Imagine a person woman with a property describing their hair long hair and a property describing \
their clothing style colorful coat, sitting in a location corner of a cafe doing activity \
reading. Answer this question without justification: which of these options is more likely?

woman is an artist.

woman is an artist who likes to read.

(an artist is a type of occupation possibly linked to property long hair)

(likes to read is a hobby possibly linked to activity reading)";

const TABULAR_NOT_HASHED: &str = "Pretend to be an agent who can do anything right now and do \
the following thought exercise.

gender, hair_style, clothing_description, location, position, activity

woman, long hair, colorful coat, corner of a café, sitting, reading

Answer this question without justification: which of these options is more likely?

A) She is an artist

B) She is an artist who likes to read";

const TABULAR_HASHED: &str = "Pretend to be an agent who can do anything right now and do the \
following thought exercise. Note that the values in csv were hidden behind meaningless \
identifiers such as „a214s“.

gender, hair_style, clothing_description, location, position, activity

X, cdf14, a214s, fg57, bh49k, rfg5a,

Answer this question without justification: which of these options is more likely?

A) She is b321

B) She is b321 who 4l5i

(b321 is a type of occupation possibly linked to property cdf14)

(4l5i is a hobby possibly linked to activity rfg5a)";

/// Instruction head of the itemset prompt attached to the factual dataset.
/// Note `set_length_@ = {` and the starred IMPORTANT line: the two derived
/// datasets shipped with slightly different spacing and no stars, and both
/// spellings are preserved.
const ITEMSET_HEAD_CORRECT: &str = "Find all frequent itemsets with minimal support equal to 2 \
and length @, so set_length_@ = {<<itemsets>>}. Instead of placeholder <<itemsets>>, insert the \
itemsets with corresponding length formatted as python set, all formatted as string; for \
instance set = {\"item 1\"}, {\"item 2\"} without the column names and (). Consider the first \
row of the CSV as the name of the columns.";

const ITEMSET_TAIL_CORRECT: &str =
    "IMPORTANT: *You are not allowed to use programming languages to solve this task!*";

const ITEMSET_HEAD_DERIVED: &str = "Find all frequent itemsets with minimal support equal to 2 \
and length @, so set_length_ @={<<itemsets>>}. Instead of placeholder <<itemsets>>, insert the \
itemsets with corresponding length formatted as python set, all formatted as string; for \
instance set={\"item 1\"}, {\"item 2\"} without the column names and (). Consider the first row \
of the CSV as the name of the columns.";

const ITEMSET_TAIL_DERIVED: &str =
    "IMPORTANT: You are not allowed to use programming languages to solve this task!";

/// Forms of the free-text likelihood question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LindaForm {
    /// The unmodified wording.
    Original,
    /// Bias phrases hashed, neutral descriptions kept next to identifiers.
    HashedWithDescription,
    /// Bias phrases hashed, no neutral descriptions.
    HashedWithoutDescription,
    /// Original words kept, but neutral descriptions and relationship notes
    /// added — the control isolating the effect of the extra text.
    Validation,
}

impl LindaForm {
    pub const ALL: [LindaForm; 4] = [
        LindaForm::Original,
        LindaForm::HashedWithDescription,
        LindaForm::HashedWithoutDescription,
        LindaForm::Validation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LindaForm::Original => "original",
            LindaForm::HashedWithDescription => "hashed-with-desc",
            LindaForm::HashedWithoutDescription => "hashed-without-desc",
            LindaForm::Validation => "validation",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == name)
    }
}

/// Forms of the tabular likelihood question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TabularForm {
    /// Plain CSV row with the real values.
    NotHashed,
    /// Hashed CSV row plus the two parenthesized relationship notes.
    HashedWithRelationships,
    /// Hashed CSV row without the notes.
    HashedWithoutRelationships,
}

impl TabularForm {
    pub const ALL: [TabularForm; 3] = [
        TabularForm::NotHashed,
        TabularForm::HashedWithRelationships,
        TabularForm::HashedWithoutRelationships,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TabularForm::NotHashed => "not-hashed",
            TabularForm::HashedWithRelationships => "hashed-with-rel",
            TabularForm::HashedWithoutRelationships => "hashed-without-rel",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == name)
    }
}

/// The two answer options of a likelihood question, as the judge needs them:
/// the non-conjunction option is the correct one, and `lettered` records
/// whether the prompt labels the options `A)` and `B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LindaOptions {
    pub correct: String,
    pub conjunction: String,
    pub lettered: bool,
}

impl LindaOptions {
    fn new(correct: &str, conjunction: &str, lettered: bool) -> Self {
        Self {
            correct: correct.to_string(),
            conjunction: conjunction.to_string(),
            lettered,
        }
    }
}

/// What a correct response to a rendered prompt must contain.
#[derive(Debug, Clone, PartialEq)]
pub enum AnswerKey {
    /// The two options; correctness means picking the non-conjunction one.
    Linda(LindaOptions),
    /// The mining parameters; correctness is measured against the exact
    /// solution on `dataset`.
    Itemset { dataset: Dataset, task: MiningTask },
}

/// A prompt ready to send, paired with its scoring key.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPrompt {
    pub text: String,
    pub answer_key: AnswerKey,
}

/// Removes the leading role-play clause and re-capitalizes the sentence that
/// now starts the prompt. Texts without the clause pass through unchanged.
fn strip_preamble(text: &str) -> String {
    match text.strip_prefix(PREAMBLE_CLAUSE) {
        Some(rest) => {
            let mut chars = rest.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        }
        None => text.to_string(),
    }
}

fn with_preamble_flag(template: &str, preamble: bool) -> String {
    if preamble {
        template.to_string()
    } else {
        strip_preamble(template)
    }
}

/// Renders a free-text likelihood prompt. With `preamble` off, the leading
/// role-play clause is dropped (as was done for models that refused it).
pub fn render_linda(form: LindaForm, preamble: bool) -> RenderedPrompt {
    let (template, options) = match form {
        LindaForm::Original => (
            LINDA_ORIGINAL,
            LindaOptions::new(
                "She is an artist",
                "She is an artist who likes to read",
                true,
            ),
        ),
        LindaForm::HashedWithDescription => (
            LINDA_HASHED_WITH_DESC,
            LindaOptions::new("X is b321", "X is b321 who likes to 4l5i", false),
        ),
        LindaForm::HashedWithoutDescription => (
            LINDA_HASHED_WITHOUT_DESC,
            LindaOptions::new("X is b321", "X is b321 who 4l5i", false),
        ),
        LindaForm::Validation => (
            LINDA_VALIDATION,
            LindaOptions::new(
                "woman is an artist",
                "woman is an artist who likes to read",
                false,
            ),
        ),
    };
    RenderedPrompt {
        text: with_preamble_flag(template, preamble),
        answer_key: AnswerKey::Linda(options),
    }
}

/// Renders an itemset-extraction prompt for one dataset variant and length.
/// Both `@` placeholders receive the same length; the data block is the
/// dataset itself, one line per row as in the source material.
pub fn render_itemset(dataset: Dataset, length: u32) -> Result<RenderedPrompt, PromptError> {
    if !(1..=5).contains(&length) {
        return Err(PromptError::InvalidLength(length));
    }
    let (head, tail) = match dataset {
        Dataset::Correct => (ITEMSET_HEAD_CORRECT, ITEMSET_TAIL_CORRECT),
        Dataset::Wrong | Dataset::Hashed => (ITEMSET_HEAD_DERIVED, ITEMSET_TAIL_DERIVED),
    };
    let head = head.replace('@', &length.to_string());
    let data = dataset.table().to_csv().replace('\n', "\n\n");
    Ok(RenderedPrompt {
        text: format!("{head}\n\n{data}\n\n{tail}"),
        answer_key: AnswerKey::Itemset {
            dataset,
            task: MiningTask {
                min_support: 2,
                length,
            },
        },
    })
}

/// Drops trailing parenthesized note paragraphs from a template.
fn drop_relationship_notes(text: &str) -> String {
    let mut paragraphs: Vec<&str> = text.split("\n\n").collect();
    while paragraphs
        .last()
        .is_some_and(|p| p.starts_with('(') && p.ends_with(')'))
    {
        paragraphs.pop();
    }
    paragraphs.join("\n\n")
}

/// Renders a tabular likelihood prompt. The hashed-without-relationships
/// form is the hashed template minus its two trailing parenthesized notes.
pub fn render_tabular_linda(form: TabularForm, preamble: bool) -> RenderedPrompt {
    let (text, options) = match form {
        TabularForm::NotHashed => (
            TABULAR_NOT_HASHED.to_string(),
            LindaOptions::new(
                "She is an artist",
                "She is an artist who likes to read",
                true,
            ),
        ),
        TabularForm::HashedWithRelationships => (
            TABULAR_HASHED.to_string(),
            LindaOptions::new("She is b321", "She is b321 who 4l5i", true),
        ),
        TabularForm::HashedWithoutRelationships => (
            drop_relationship_notes(TABULAR_HASHED),
            LindaOptions::new("She is b321", "She is b321 who 4l5i", true),
        ),
    };
    RenderedPrompt {
        text: with_preamble_flag(&text, preamble),
        answer_key: AnswerKey::Linda(options),
    }
}

/// Addressable identity of one template: experiment family, form, and (for
/// the question prompts) whether the role-play preamble is kept. Variants
/// serialize as path strings such as `linda-free-text/original`,
/// `itemset/hashed/5`, or `linda-tabular/hashed-with-rel/no-preamble`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptVariant {
    LindaFreeText { form: LindaForm, preamble: bool },
    Itemset { dataset: Dataset, length: u32 },
    LindaTabular { form: TabularForm, preamble: bool },
}

impl PromptVariant {
    /// Every addressable template, in catalog order.
    pub fn catalog() -> Vec<PromptVariant> {
        let mut all = Vec::new();
        for form in LindaForm::ALL {
            for preamble in [true, false] {
                all.push(PromptVariant::LindaFreeText { form, preamble });
            }
        }
        for dataset in Dataset::ALL {
            for length in 1..=5 {
                all.push(PromptVariant::Itemset { dataset, length });
            }
        }
        for form in TabularForm::ALL {
            for preamble in [true, false] {
                all.push(PromptVariant::LindaTabular { form, preamble });
            }
        }
        all
    }

    /// Renders the template this variant addresses.
    pub fn render(&self) -> Result<RenderedPrompt, PromptError> {
        match *self {
            PromptVariant::LindaFreeText { form, preamble } => Ok(render_linda(form, preamble)),
            PromptVariant::Itemset { dataset, length } => render_itemset(dataset, length),
            PromptVariant::LindaTabular { form, preamble } => {
                Ok(render_tabular_linda(form, preamble))
            }
        }
    }
}

impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PromptVariant::LindaFreeText { form, preamble } => {
                write!(f, "linda-free-text/{}", form.as_str())?;
                if !preamble {
                    write!(f, "/no-preamble")?;
                }
                Ok(())
            }
            PromptVariant::Itemset { dataset, length } => {
                write!(f, "itemset/{}/{length}", dataset.name())
            }
            PromptVariant::LindaTabular { form, preamble } => {
                write!(f, "linda-tabular/{}", form.as_str())?;
                if !preamble {
                    write!(f, "/no-preamble")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for PromptVariant {
    type Err = PromptError;

    fn from_str(path: &str) -> Result<Self, Self::Err> {
        let unknown = || PromptError::UnknownVariant(path.to_string());
        let segments: Vec<&str> = path.split('/').collect();
        match segments.as_slice() {
            ["linda-free-text", form] => Ok(PromptVariant::LindaFreeText {
                form: LindaForm::parse(form).ok_or_else(unknown)?,
                preamble: true,
            }),
            ["linda-free-text", form, "no-preamble"] => Ok(PromptVariant::LindaFreeText {
                form: LindaForm::parse(form).ok_or_else(unknown)?,
                preamble: false,
            }),
            ["linda-tabular", form] => Ok(PromptVariant::LindaTabular {
                form: TabularForm::parse(form).ok_or_else(unknown)?,
                preamble: true,
            }),
            ["linda-tabular", form, "no-preamble"] => Ok(PromptVariant::LindaTabular {
                form: TabularForm::parse(form).ok_or_else(unknown)?,
                preamble: false,
            }),
            ["itemset", dataset, length] => {
                let dataset = Dataset::parse(dataset).ok_or_else(unknown)?;
                let length: u32 = length.parse().map_err(|_| unknown())?;
                if !(1..=5).contains(&length) {
                    return Err(PromptError::InvalidLength(length));
                }
                Ok(PromptVariant::Itemset { dataset, length })
            }
            _ => Err(unknown()),
        }
    }
}

impl serde::Serialize for PromptVariant {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PromptVariant {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let path = String::deserialize(deserializer)?;
        path.parse().map_err(serde::de::Error::custom)
    }
}
