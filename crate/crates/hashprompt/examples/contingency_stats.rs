//! The statistical battery over the published result tallies.
//!
//! Every headline claim reduces to a 2x2 contingency table: successes and
//! failures under two prompt conditions. For each table this prints the
//! Yates-corrected chi-square with its p-value, the two-sided Fisher exact
//! p, and Cramér's V with the conventional small/medium/large reading.
//!
//! ```text
//! cargo run -p hashprompt --example contingency_stats
//! ```

use hashprompt::stats::{summarize, ContingencyTable2x2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: [(&str, [u64; 4]); 12] = [
        // Free-text two-option problem, all models pooled.
        (
            "free-text: original vs hashed without descriptions",
            [0, 80, 14, 26],
        ),
        (
            "free-text: original vs hashed with descriptions",
            [0, 80, 13, 27],
        ),
        // Itemset mining, found vs missed ground-truth sets.
        ("mining gpt-4o: correct vs hashed", [213, 22, 225, 10]),
        ("mining gpt-4o: wrong vs hashed", [212, 23, 225, 10]),
        (
            "mining llama-3.1-405b: correct vs hashed",
            [194, 41, 230, 5],
        ),
        ("mining llama-3.1-405b: wrong vs hashed", [201, 34, 230, 5]),
        // Tabular two-option problem, all models pooled.
        (
            "tabular: not hashed vs hashed without relationships",
            [11, 39, 32, 18],
        ),
        // Reasoning-mode models vs earlier results.
        ("reasoning o3-mini vs predecessor, free text", [6, 4, 0, 20]),
        (
            "reasoning flash-thinking vs predecessor, free text",
            [10, 0, 0, 20],
        ),
        (
            "reasoning flash-thinking vs predecessor, tabular",
            [10, 0, 0, 10],
        ),
        (
            "reasoning flash-thinking on correct vs best hashed run",
            [143, 92, 230, 5],
        ),
        (
            "reasoning flash-thinking on wrong vs best hashed run",
            [189, 46, 230, 5],
        ),
    ];

    for (label, [a, b, c, d]) in cases {
        let table = ContingencyTable2x2::new(a, b, c, d)?;
        let summary = summarize(&table)?;
        println!("## {label}\n{summary}\n");
    }
    Ok(())
}
