//! Splits dated charters into period slices, prints corpus statistics and
//! selects the target words that are frequent in every period.
//!
//! cargo run --example split_corpus

use clex::corpus::{
    compute_frequencies, normalize_and_tokenize, parse_charters, select_targets, split_periods, CharterFormat,
};
use clex::PeriodSpec;

const CHARTERS: &str = "\
id,year,text
s1,704,\"Ego Aethelred rex Anglorum dedi terram ecclesiae. Hoc donum confirmavi!\"
s2,1045,\"Ego Eadward rex terram dedi sancto Petro; testes fuerunt.\"
s3,1086,\"Willelmus rex concessit terram in feudo et elemosina.\"
s4,1140,\"Stephanus rex confirmavit finem factum in curia.\"
s5,1190,\"Ricardus rex concessit terram et finem in curia.\"
s6,1300,\"Late charter outside every period.\"
";

fn main() -> clex::Result<()> {
    println!("{:?}", normalize_and_tokenize("Ego Aethelred rex dedi. Hoc donum!"));

    let charters = parse_charters(CHARTERS.as_bytes(), CharterFormat::Csv, "inline")?;
    let split = split_periods(&charters, &PeriodSpec::deeds_defaults())?;
    for slice in &split.slices {
        println!(
            "{:<4} {}-{}: {} charters, {} tokens",
            slice.name(),
            slice.period.start_year,
            slice.period.end_year,
            slice.charter_count,
            slice.token_count
        );
    }
    for c in &split.excluded {
        println!("excluded {} ({})", c.id, c.year);
    }

    let freqs = compute_frequencies(&split.slices)?;
    let targets = select_targets(&freqs, 5.0)?;
    println!("targets frequent in every period: {targets:?}");
    Ok(())
}
