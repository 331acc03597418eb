//! Prints the full prompt-template catalog.
//!
//! Every experiment variant is a named template: the free-text two-option
//! problem in four wordings (each with and without the agent-roleplay
//! opener), the itemset-extraction prompt for three tables and five set
//! lengths, and the tabular two-option problem in three table variants.
//!
//! ```text
//! cargo run -p hashprompt --example render_prompts            # list paths
//! cargo run -p hashprompt --example render_prompts -- all     # full texts
//! cargo run -p hashprompt --example render_prompts -- PATH    # one text
//! ```

use hashprompt::prompts::PromptVariant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1);
    let catalog = PromptVariant::catalog();

    match arg.as_deref() {
        None => {
            println!("{} templates:", catalog.len());
            for variant in &catalog {
                println!("  {variant}");
            }
            println!("\npass `all` or one of the paths above to see the text");
        }
        Some("all") => {
            for variant in &catalog {
                let rendered = variant.render()?;
                println!("==== {variant} ====");
                println!("{}\n", rendered.text);
            }
        }
        Some(path) => {
            let variant: PromptVariant = path.parse()?;
            print!("{}", variant.render()?.text);
        }
    }
    Ok(())
}
