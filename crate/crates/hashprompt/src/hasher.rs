//! Surface-form hashing: the debiasing transform itself.
//!
//! The idea: replace bias-inducing surface forms ("woman", "artist") with
//! unique, meaningless identifiers ("X", "b321") before a text reaches a
//! model. Unlike blanket masking, each surface keeps its own identifier, so
//! the text can still *refer* to the hidden concepts — options can mention
//! them, relationships between them can be stated — while the semantic cue
//! that triggers the bias is gone. [`mask_text`] provides the irreversible
//! baseline (every surface becomes `—`) for contrast, and [`dehash_text`]
//! maps identifiers in model output back to surfaces for scoring.
//!
//! Matching is case-sensitive and whole-word: a surface or identifier only
//! fires when not embedded in a longer alphanumeric run, so hashing `read`
//! never corrupts `bread` and dehashing `X` never fires inside other words.
//! Nested surfaces resolve longest-first (`likes to read` before `read`).

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// The fixed replacement token used by [`mask_text`].
pub const MASK_TOKEN: &str = "—";

/// Errors raised when building, parsing, or applying a scheme.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HasherError {
    /// Scheme surfaces must be pairwise distinct.
    #[error("surface {0:?} appears more than once in the scheme")]
    DuplicateSurface(String),
    /// Identifiers must be pairwise distinct unless sharing is opted into.
    #[error("identifier {0:?} is assigned to more than one surface")]
    DuplicateIdentifier(String),
    /// Surfaces and identifiers must be non-empty after trimming.
    #[error("scheme entries need a non-empty surface and identifier")]
    EmptyField,
    /// An identifier that equals a surface would make hashing ambiguous.
    #[error("identifier {0:?} is also a surface in the same scheme")]
    IdentifierIsSurface(String),
    /// The input already contains an identifier the scheme would introduce.
    #[error("identifier {0:?} already occurs in the input text")]
    IdentifierCollision(String),
    /// Rejection sampling could not find a conforming fresh identifier.
    #[error("gave up generating a fresh identifier after {attempts} attempts")]
    StyleExhausted { attempts: usize },
    /// A scheme file line does not have 2–4 `|`-separated fields.
    #[error("malformed scheme entry on line {0}")]
    MalformedEntry(usize),
}

/// One substitution rule, optionally annotated for prompt construction.
///
/// `neutral_description` is the bias-free gloss that can stand next to the
/// identifier ("a property describing their hair"); `relationship_note` is a
/// parenthesized hint relating identifiers to each other, appended to some
/// prompt variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeEntry {
    pub surface: String,
    pub identifier: String,
    pub neutral_description: Option<String>,
    pub relationship_note: Option<String>,
}

impl SchemeEntry {
    pub fn new(surface: impl Into<String>, identifier: impl Into<String>) -> Self {
        Self {
            surface: surface.into(),
            identifier: identifier.into(),
            neutral_description: None,
            relationship_note: None,
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.neutral_description = Some(description.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.relationship_note = Some(note.into());
        self
    }
}

/// An ordered list of substitution rules.
///
/// Entry order matters twice: earlier entries win when a shared identifier
/// is dehashed, and the scheme file format preserves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashingScheme {
    entries: Vec<SchemeEntry>,
}

impl HashingScheme {
    /// Builds a scheme with strictly distinct surfaces and identifiers.
    pub fn new(entries: Vec<SchemeEntry>) -> Result<Self, HasherError> {
        Self::validate(&entries, false)?;
        Ok(Self { entries })
    }

    /// Builds a scheme in which several surfaces may share one identifier
    /// (hand-authored schemes sometimes map near-synonyms, e.g. "read" and
    /// "likes to read", to a single label). [`dehash_text`] resolves a
    /// shared identifier to its first entry. Surfaces stay distinct.
    pub fn with_shared_identifiers(entries: Vec<SchemeEntry>) -> Result<Self, HasherError> {
        Self::validate(&entries, true)?;
        Ok(Self { entries })
    }

    fn validate(entries: &[SchemeEntry], allow_shared: bool) -> Result<(), HasherError> {
        let mut surfaces = BTreeSet::new();
        let mut identifiers = BTreeSet::new();
        for entry in entries {
            if entry.surface.trim().is_empty() || entry.identifier.trim().is_empty() {
                return Err(HasherError::EmptyField);
            }
            if !surfaces.insert(entry.surface.as_str()) {
                return Err(HasherError::DuplicateSurface(entry.surface.clone()));
            }
            if !identifiers.insert(entry.identifier.as_str()) && !allow_shared {
                return Err(HasherError::DuplicateIdentifier(entry.identifier.clone()));
            }
        }
        for entry in entries {
            if surfaces.contains(entry.identifier.as_str()) {
                return Err(HasherError::IdentifierIsSurface(entry.identifier.clone()));
            }
        }
        Ok(())
    }

    /// Parses the scheme file format: one entry per line,
    /// `surface | identifier | neutral_description? | relationship_note?`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, HasherError> {
        let mut entries = Vec::new();
        for (index, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if !(2..=4).contains(&fields.len()) || fields[..2].iter().any(|f| f.is_empty()) {
                return Err(HasherError::MalformedEntry(index + 1));
            }
            let mut entry = SchemeEntry::new(fields[0], fields[1]);
            if let Some(description) = fields.get(2).filter(|f| !f.is_empty()) {
                entry = entry.with_description(*description);
            }
            if let Some(note) = fields.get(3).filter(|f| !f.is_empty()) {
                entry = entry.with_note(*note);
            }
            entries.push(entry);
        }
        Self::with_shared_identifiers(entries)
    }

    pub fn entries(&self) -> &[SchemeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn identifier_for(&self, surface: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.surface == surface)
            .map(|e| e.identifier.as_str())
    }

    /// First entry wins for shared identifiers.
    pub fn surface_for(&self, identifier: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.identifier == identifier)
            .map(|e| e.surface.as_str())
    }
}

/// Renders the scheme file format; [`HashingScheme::parse`] round-trips it.
impl fmt::Display for HashingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, entry) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} | {}", entry.surface, entry.identifier)?;
            match (&entry.neutral_description, &entry.relationship_note) {
                (None, None) => {}
                (description, None) => write!(f, " | {}", description.as_deref().unwrap_or(""))?,
                (description, Some(note)) => {
                    write!(f, " | {} | {note}", description.as_deref().unwrap_or(""))?
                }
            }
        }
        Ok(())
    }
}

/// Shape of generated identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StyleKind {
    /// One uppercase letter: `X`.
    SingleLetter,
    /// Four or five lowercase alphanumerics: `cdf14`.
    ShortAlnum,
    /// Six uppercase hex digits: `354C31`.
    Hex6,
}

/// Identifier shape plus the seed that makes generation reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentifierStyle {
    pub kind: StyleKind,
    pub seed: u64,
}

impl IdentifierStyle {
    pub fn new(kind: StyleKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

const GENERATION_ATTEMPTS: usize = 10_000;

fn sample_identifier(kind: StyleKind, rng: &mut ChaCha8Rng) -> String {
    const LOWER_ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    const HEX_UPPER: &[u8] = b"0123456789ABCDEF";
    match kind {
        StyleKind::SingleLetter => char::from(b'A' + rng.gen_range(0..26)).to_string(),
        StyleKind::ShortAlnum => {
            let len = rng.gen_range(4..=5);
            (0..len)
                .map(|_| char::from(LOWER_ALNUM[rng.gen_range(0..LOWER_ALNUM.len())]))
                .collect()
        }
        StyleKind::Hex6 => (0..6)
            .map(|_| char::from(HEX_UPPER[rng.gen_range(0..HEX_UPPER.len())]))
            .collect(),
    }
}

/// Generates a scheme over `surfaces`, one identifier each, with a possibly
/// different identifier shape per entry. Deterministic for a fixed seed.
///
/// Candidates are rejection-sampled: an identifier is discarded if it
/// overlaps any surface or any previously chosen identifier as a substring
/// in either direction, so the result is collision-free by construction.
pub fn generate_scheme_mixed(
    surfaces: &[(&str, StyleKind)],
    seed: u64,
) -> Result<HashingScheme, HasherError> {
    let mut seen = BTreeSet::new();
    for (surface, _) in surfaces {
        if surface.trim().is_empty() {
            return Err(HasherError::EmptyField);
        }
        if !seen.insert(*surface) {
            return Err(HasherError::DuplicateSurface(surface.to_string()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<SchemeEntry> = Vec::with_capacity(surfaces.len());
    for &(surface, kind) in surfaces {
        let mut chosen = None;
        for _ in 0..GENERATION_ATTEMPTS {
            let candidate = sample_identifier(kind, &mut rng);
            let overlaps =
                |other: &str| other.contains(candidate.as_str()) || candidate.contains(other);
            if surfaces.iter().any(|(s, _)| overlaps(s))
                || entries.iter().any(|e| overlaps(&e.identifier))
            {
                continue;
            }
            chosen = Some(candidate);
            break;
        }
        let identifier = chosen.ok_or(HasherError::StyleExhausted {
            attempts: GENERATION_ATTEMPTS,
        })?;
        entries.push(SchemeEntry::new(surface, identifier));
    }
    HashingScheme::new(entries)
}

/// [`generate_scheme_mixed`] with one identifier shape for every entry.
pub fn generate_scheme(
    surfaces: &[&str],
    style: IdentifierStyle,
) -> Result<HashingScheme, HasherError> {
    let mixed: Vec<(&str, StyleKind)> = surfaces.iter().map(|&s| (s, style.kind)).collect();
    generate_scheme_mixed(&mixed, style.seed)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// True when `text[start..end]` is not embedded in a longer alphanumeric run.
fn on_word_boundary(text: &str, start: usize, end: usize) -> bool {
    let before_ok = text[..start]
        .chars()
        .next_back()
        .is_none_or(|c| !is_word_char(c));
    let after_ok = text[end..].chars().next().is_none_or(|c| !is_word_char(c));
    before_ok && after_ok
}

/// Single left-to-right pass replacing whole-word occurrences of each
/// pattern; patterns are tried longest-first at every position, and replaced
/// spans are never rescanned. Returns the rewritten text and the number of
/// replacements made.
fn replace_whole_words(text: &str, pairs: &[(&str, &str)]) -> (String, usize) {
    let mut ordered: Vec<(&str, &str)> = pairs.to_vec();
    ordered.sort_by_key(|(pattern, _)| std::cmp::Reverse(pattern.len()));

    let mut out = String::with_capacity(text.len());
    let mut replaced = 0;
    let mut i = 0;
    while i < text.len() {
        let mut matched = false;
        for &(pattern, replacement) in &ordered {
            if text[i..].starts_with(pattern) && on_word_boundary(text, i, i + pattern.len()) {
                out.push_str(replacement);
                i += pattern.len();
                replaced += 1;
                matched = true;
                break;
            }
        }
        if !matched {
            let c = text[i..].chars().next().expect("in-bounds index");
            out.push(c);
            i += c.len_utf8();
        }
    }
    (out, replaced)
}

/// Replaces every whole-word occurrence of each scheme surface with its
/// identifier; all other text is byte-identical. Repeated occurrences of one
/// surface yield the same identifier, which is what keeps the hidden
/// concepts referenceable.
///
/// If the input still contains surfaces (i.e. it is un-hashed source text)
/// while one of the scheme's identifiers already occurs in it, the
/// substitution would be ambiguous to invert, so the call fails with
/// [`HasherError::IdentifierCollision`]. Text that contains no surface at
/// all — including already-hashed text — passes through unchanged, which
/// makes the transform idempotent.
pub fn hash_text(text: &str, scheme: &HashingScheme) -> Result<String, HasherError> {
    let pairs: Vec<(&str, &str)> = scheme
        .entries
        .iter()
        .map(|e| (e.surface.as_str(), e.identifier.as_str()))
        .collect();
    let (out, replaced) = replace_whole_words(text, &pairs);
    if replaced > 0 {
        for entry in &scheme.entries {
            if text.contains(entry.identifier.as_str()) {
                return Err(HasherError::IdentifierCollision(entry.identifier.clone()));
            }
        }
    }
    Ok(out)
}

/// Replaces every whole-word occurrence of each scheme surface with the
/// fixed token [`MASK_TOKEN`]. Irreversible by construction: distinct
/// surfaces collapse onto one token, so masked text cannot refer to the
/// hidden concepts individually.
pub fn mask_text(text: &str, scheme: &HashingScheme) -> String {
    let pairs: Vec<(&str, &str)> = scheme
        .entries
        .iter()
        .map(|e| (e.surface.as_str(), MASK_TOKEN))
        .collect();
    replace_whole_words(text, &pairs).0
}

/// Replaces every whole-word identifier occurrence with its surface; tokens
/// the scheme does not know pass through untouched. When several entries
/// share an identifier, the first entry wins.
pub fn dehash_text(text: &str, scheme: &HashingScheme) -> String {
    let mut seen = BTreeSet::new();
    let pairs: Vec<(&str, &str)> = scheme
        .entries
        .iter()
        .filter(|e| seen.insert(e.identifier.as_str()))
        .map(|e| (e.identifier.as_str(), e.surface.as_str()))
        .collect();
    replace_whole_words(text, &pairs).0
}

/// The canonical scheme for the free-text likelihood-question experiments:
/// the character description's bias-inducing phrases and the two answer
/// phrases, with neutral descriptions and the two relationship notes used by
/// the described prompt variant. "read" and "likes to read" share one
/// identifier, with "read" listed first so dehashing prefers it.
pub fn linda_scheme() -> HashingScheme {
    let note_occupation = "(b321 is a type of occupation possibly linked to property cdf14)";
    let note_hobby = "(4l5i is a hobby possibly linked to activity rfg5a)";
    HashingScheme::with_shared_identifiers(vec![
        SchemeEntry::new("woman", "X").with_description("person"),
        SchemeEntry::new("long hair", "cdf14").with_description("a property describing their hair"),
        SchemeEntry::new("colorful coat", "a214s")
            .with_description("a property describing their clothing style"),
        SchemeEntry::new("corner of a café", "fg57").with_description("a location"),
        SchemeEntry::new("reading", "rfg5a").with_description("doing activity"),
        SchemeEntry::new("artist", "b321")
            .with_description("type of occupation")
            .with_note(note_occupation),
        SchemeEntry::new("read", "4l5i")
            .with_description("a hobby")
            .with_note(note_hobby),
        SchemeEntry::new("likes to read", "4l5i")
            .with_description("a hobby")
            .with_note(note_hobby),
    ])
    .expect("canonical scheme is well-formed")
}

/// The scheme for the tabular variant of the same task: the free-text
/// entries plus the `sitting` cell, which only exists as a column in the
/// tabular representation. Ordered to match the CSV columns.
pub fn tabular_linda_scheme() -> HashingScheme {
    let linda = linda_scheme();
    let mut entries: Vec<SchemeEntry> = linda.entries().to_vec();
    entries.insert(
        4,
        SchemeEntry::new("sitting", "bh49k").with_description("position"),
    );
    HashingScheme::with_shared_identifiers(entries).expect("canonical scheme is well-formed")
}
