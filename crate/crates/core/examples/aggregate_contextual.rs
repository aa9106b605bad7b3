//! Averages exported contextual hidden states into one vector per word and
//! writes them in the word2vec text format.
//!
//! cargo run --example aggregate_contextual

use std::path::Path;

use clex::context::{aggregate, export_as_wordvectors, read_records};

fn main() -> clex::Result<()> {
    let records = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/records_3.ndjson");
    let outcome = aggregate(read_records(&records)?, "ANG")?;
    println!("{:?}", outcome.stats);
    for (word, mean) in &outcome.embeddings.words {
        let head: Vec<String> = mean.vector.iter().map(|v| format!("{v:+.3}")).collect();
        println!("{word:<12} n={} [{}]", mean.count, head.join(" "));
    }
    let out = std::env::temp_dir().join("clex-example-ANG.vec");
    export_as_wordvectors(&outcome.embeddings, &out)?;
    println!("wrote {}", out.display());

    // records of other periods are skipped; none left is an error
    match aggregate(read_records(&records)?, "NOR") {
        Err(e) => println!("NOR: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
