//! Parses and scores model-style answers.
//!
//! Two scorers exist. Mining answers are brace-delimited itemset lists,
//! scored set-by-set against the Apriori ground truth: true sets found,
//! true sets missed, and fabricated sets (hallucinations), which place the
//! run into one of four precision/recall categories. Two-option answers
//! are classified as the statistically correct choice, the conjunction
//! (fallacy) choice, or no answer.
//!
//! ```text
//! cargo run -p hashprompt --example score_response
//! ```

use hashprompt::corpus::Dataset;
use hashprompt::judge::{classify_linda, parse_itemsets, score_run};
use hashprompt::miner::{apriori, MiningTask};
use hashprompt::prompts::{render_linda, LindaForm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // --- a mining answer -------------------------------------------------
    let response = r#"Here are the frequent sets of length 2:
set_length_2 = {"4", "hot"}, {"yes", "false"}, {"rabbit", "hot"},
               {"4", "hot"}, {'indeed', 'omnivore'}"#;
    println!("response:\n{response}\n");

    let parsed = parse_itemsets(response);
    println!(
        "parsed {} distinct sets (duplicates dropped):",
        parsed.len()
    );
    for set in &parsed {
        println!("  {:?}", set);
    }

    let task = MiningTask::new(2, 2)?;
    let oracle = apriori(&Dataset::Correct.table(), &task)?;
    let score = score_run(&parsed, &oracle, &task);
    println!(
        "\nagainst the {}-set ground truth: found {}, missed {}, hallucinated {}",
        oracle.len(),
        score.found,
        score.not_found,
        score.fp
    );
    println!(
        "precision {:.3}, recall {:.3} -> category: {}",
        score.precision, score.recall, score.category
    );
    // {"rabbit", "hot"} only occurs in one row, so it counts as fabricated.
    assert_eq!(score.fp, 1);

    // --- two-option answers ----------------------------------------------
    println!();
    let options = match render_linda(LindaForm::Original, true).answer_key {
        hashprompt::prompts::AnswerKey::Linda(options) => options,
        _ => unreachable!("two-option prompt carries a two-option key"),
    };
    for response in [
        "The more likely option is B) She is an artist who likes to read.",
        "She is an artist.",
        "I would need more information to decide.",
    ] {
        let verdict = classify_linda(response, &options);
        println!(
            "{response:<66} -> {} ({:?})",
            verdict.choice, verdict.evidence
        );
    }
    Ok(())
}
