//! Runs the twelve acceptance criteria and prints one line per criterion.
//! Exits nonzero if any criterion fails.

use cmcvol::verify::run_all;

fn main() {
    let outcomes = run_all();
    println!();
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("\nacceptance: {} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
