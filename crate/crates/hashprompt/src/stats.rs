//! Statistical battery for 2×2 contingency tables.
//!
//! Every comparison in the evaluation harness reduces to a 2×2 table
//! (condition × correct/wrong, or condition × found/not-found), so this
//! module implements exactly the df = 1 toolkit: Yates-corrected chi-square,
//! two-sided Fisher's exact test, and Cramér's V with the conventional
//! small/medium/large reading.
//!
//! Design notes baked in as invariants:
//! - The continuity correction is applied unconditionally; effect sizes are
//!   derived from the corrected statistic.
//! - The two-sided Fisher p sums the point probabilities of every
//!   margin-preserving table at most as probable as the observed one
//!   (relative tolerance 1e-12). [`fisher_exact_enumerated`] recomputes the
//!   same quantity with exact integer binomials as an independent
//!   cross-check route.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;
use std::fmt;
use thiserror::Error;

/// Errors raised by the statistical operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    /// A contingency table needs at least one observation.
    #[error("contingency table must contain at least one observation")]
    EmptyTable,
    /// Chi-square expectations divide by row and column margins.
    #[error("chi-square is undefined when a row or column margin is zero")]
    DegenerateTable,
}

/// A 2×2 table of non-negative counts.
///
/// Rows are the two conditions being compared; columns are the two outcomes
/// (correct/wrong or found/not-found). Laid out as
/// `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContingencyTable2x2 {
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl ContingencyTable2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Result<Self, StatsError> {
        if a + b + c + d == 0 {
            return Err(StatsError::EmptyTable);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn cells(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn n(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn row_totals(&self) -> (u64, u64) {
        (self.a + self.b, self.c + self.d)
    }

    pub fn column_totals(&self) -> (u64, u64) {
        (self.a + self.c, self.b + self.d)
    }

    /// True when any row or column margin is zero, in which case the
    /// chi-square expectations are undefined and the exact test is trivial.
    pub fn is_degenerate(&self) -> bool {
        let (r1, r2) = self.row_totals();
        let (c1, c2) = self.column_totals();
        r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0
    }
}

impl fmt::Display for ContingencyTable2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// The corrected test statistic and its upper-tail probability at df = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
}

/// Yates-corrected chi-square for a 2×2 table.
///
/// The statistic is Σ (max(|O − E| − 0.5, 0))² / E over the four cells, with
/// expectations from the row/column margins. The p-value is the upper tail of
/// the chi-square distribution with one degree of freedom, which for df = 1
/// reduces to `erfc(sqrt(x / 2))`.
pub fn chi_square_corrected(table: &ContingencyTable2x2) -> Result<ChiSquare, StatsError> {
    if table.is_degenerate() {
        return Err(StatsError::DegenerateTable);
    }
    let (r1, r2) = table.row_totals();
    let (c1, c2) = table.column_totals();
    let n = table.n() as f64;
    let observed = table.cells().map(|o| o as f64);
    let expected = [
        (r1 * c1) as f64 / n,
        (r1 * c2) as f64 / n,
        (r2 * c1) as f64 / n,
        (r2 * c2) as f64 / n,
    ];
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, e)| {
            let corrected = ((o - e).abs() - 0.5).max(0.0);
            corrected * corrected / e
        })
        .sum();
    let p_value = erfc((statistic / 2.0).sqrt());
    Ok(ChiSquare { statistic, p_value })
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma((n + 1) as f64) - ln_gamma((k + 1) as f64) - ln_gamma((n - k + 1) as f64)
}

/// Two-sided Fisher's exact test.
///
/// Sums the hypergeometric point probabilities of every table with the same
/// margins whose probability does not exceed the observed table's (within a
/// relative tolerance of 1e-12, applied in log space). Degenerate margins
/// admit only one table, so the p-value is 1 by construction.
pub fn fisher_exact(table: &ContingencyTable2x2) -> f64 {
    if table.is_degenerate() {
        return 1.0;
    }
    let (r1, r2) = table.row_totals();
    let (c1, _) = table.column_totals();
    let ln_denom = ln_choose(table.n(), c1);
    let ln_point = |x: u64| ln_choose(r1, x) + ln_choose(r2, c1 - x) - ln_denom;

    let observed = ln_point(table.a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let mut p = 0.0;
    for x in lo..=hi {
        let lp = ln_point(x);
        if lp <= observed + 1e-12 {
            p += lp.exp();
        }
    }
    p.min(1.0)
}

fn choose_exact(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Independent oracle for [`fisher_exact`]: the same two-sided sum computed
/// with exact integer binomial coefficients instead of log-gamma arithmetic,
/// so point-probability comparisons are exact rather than tolerance-based.
///
/// Intended for cross-checking at desk scale; the intermediate binomials
/// overflow above n ≈ 120, so inputs are capped well below that.
pub fn fisher_exact_enumerated(table: &ContingencyTable2x2) -> f64 {
    assert!(
        table.n() <= 100,
        "enumeration oracle limited to n ≤ 100, got n = {}",
        table.n()
    );
    let (r1, r2) = table.row_totals();
    let (c1, _) = table.column_totals();
    // Point probability of cell value x is C(r1, x)·C(r2, c1−x)/C(n, c1);
    // with the denominator shared, tables compare by numerator alone.
    let numerator = |x: u64| choose_exact(r1, x) * choose_exact(r2, c1 - x);
    let observed = numerator(table.a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let total: u128 = (lo..=hi)
        .map(numerator)
        .filter(|&num| num <= observed)
        .sum();
    total as f64 / choose_exact(table.n(), c1) as f64
}

/// Qualitative reading of a Cramér's V value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpretation {
    Small,
    Medium,
    Large,
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpretation::Small => "small",
            Interpretation::Medium => "medium",
            Interpretation::Large => "large",
        })
    }
}

/// Cramér's V together with its interpretation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectSize {
    pub cramers_v: f64,
    pub interpretation: Interpretation,
}

impl fmt::Display for EffectSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} ({})", self.cramers_v, self.interpretation)
    }
}

/// Cramér's V for a 2×2 table: `sqrt(chi2 / n)` (the min-dimension − 1
/// factor is 1), taking the *corrected* statistic as input. Values ≤ 0.10
/// read as small, values up to 0.30 as medium, larger ones as large.
pub fn cramers_v(chi2: f64, n: u64) -> EffectSize {
    assert!(n >= 1, "effect size needs at least one observation");
    assert!(chi2 >= 0.0, "chi-square statistic cannot be negative");
    let v = (chi2 / n as f64).sqrt();
    let interpretation = if v <= 0.10 {
        Interpretation::Small
    } else if v <= 0.30 {
        Interpretation::Medium
    } else {
        Interpretation::Large
    };
    EffectSize {
        cramers_v: v,
        interpretation,
    }
}

/// The full battery for one table: corrected chi-square with p, Fisher's
/// exact p, and the effect size. This is what `hashprompt stats` prints and
/// what run reports embed per pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsSummary {
    pub cells: [u64; 4],
    pub n: u64,
    pub chi_square: ChiSquare,
    pub fisher_p: f64,
    pub effect: EffectSize,
}

pub fn summarize(table: &ContingencyTable2x2) -> Result<StatsSummary, StatsError> {
    let chi_square = chi_square_corrected(table)?;
    Ok(StatsSummary {
        cells: table.cells(),
        n: table.n(),
        chi_square,
        fisher_p: fisher_exact(table),
        effect: cramers_v(chi_square.statistic, table.n()),
    })
}

/// Formats a probability with four significant digits, switching to
/// scientific notation below 0.001.
pub fn format_p(p: f64) -> String {
    if p == 0.0 {
        return "0.000".to_string();
    }
    if p >= 0.001 {
        let decimals = (3 - p.log10().floor() as i32).max(0) as usize;
        format!("{p:.decimals$}")
    } else {
        format!("{p:.3e}")
    }
}

impl fmt::Display for StatsSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.cells;
        writeln!(f, "table      = [[{a}, {b}], [{c}, {d}]]  (n = {})", self.n)?;
        writeln!(
            f,
            "chi2       = {:.4} (Yates-corrected, df = 1), p = {}",
            self.chi_square.statistic,
            format_p(self.chi_square.p_value)
        )?;
        writeln!(f, "fisher p   = {}", format_p(self.fisher_p))?;
        write!(f, "cramers v  = {}", self.effect)
    }
}
