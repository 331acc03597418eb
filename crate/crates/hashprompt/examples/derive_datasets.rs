//! Derives the two reworded transaction tables from the factual one.
//!
//! The mining experiments use three 4x7 animal-trait tables: `correct`
//! (factual values), `wrong` (traits scrambled between animals), and
//! `hashed` (every cell a meaningless identifier). The second and third are
//! not independent data — each is the image of the factual table under a
//! value bijection, which is exactly what makes mining results comparable
//! across them.
//!
//! ```text
//! cargo run -p hashprompt --example derive_datasets
//! ```

use hashprompt::corpus::{
    apply_bijection, builtin_datasets, hashed_value_bijection, wrong_value_bijection,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let datasets = builtin_datasets();

    println!("factual table:\n{}\n", datasets.correct.to_csv());

    let wrong = apply_bijection(&datasets.correct, &wrong_value_bijection())?;
    println!(
        "after the trait-scrambling bijection:\n{}\n",
        wrong.to_csv()
    );
    assert_eq!(
        wrong, datasets.wrong,
        "derivation matches the bundled table"
    );

    let hashed = apply_bijection(&datasets.correct, &hashed_value_bijection())?;
    println!("after the identifier bijection:\n{}\n", hashed.to_csv());
    assert_eq!(
        hashed, datasets.hashed,
        "derivation matches the bundled table"
    );

    let bijection = hashed_value_bijection();
    println!("a few mappings from the identifier bijection:");
    for (source, target) in bijection.pairs().iter().take(5) {
        println!("  {source:<12} => {target}");
    }
    println!("  ... ({} pairs total)", bijection.pairs().len());

    // Bijections invert: applying the inverse restores the factual table.
    let restored = apply_bijection(&hashed, &bijection.inverse())?;
    assert_eq!(restored, datasets.correct);
    println!("\ninverse bijection restores the factual table: ok");

    Ok(())
}
