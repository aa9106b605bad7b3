use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::normalize_and_tokenize;
use super::Charter;
use crate::{Error, Result};

/// A named, inclusive year interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub name: String,
    pub start_year: i64,
    pub end_year: i64,
}

impl PeriodSpec {
    pub fn new(name: impl Into<String>, start_year: i64, end_year: i64) -> Self {
        PeriodSpec {
            name: name.into(),
            start_year,
            end_year,
        }
    }

    pub fn contains(&self, year: i64) -> bool {
        self.start_year <= year && year <= self.end_year
    }

    /// Anglo-Saxon, Norman and Plantagenet periods of the DEEDS charters.
    pub fn deeds_defaults() -> Vec<PeriodSpec> {
        vec![
            PeriodSpec::new("ANG", 589, 1065),
            PeriodSpec::new("NOR", 1066, 1153),
            PeriodSpec::new("PLA", 1154, 1272),
        ]
    }
}

/// Checks that every interval is well formed, names are unique, and the list
/// is sorted ascending without overlaps.
pub fn validate_specs(specs: &[PeriodSpec]) -> Result<()> {
    let mut names = HashSet::new();
    for spec in specs {
        if spec.name.trim().is_empty() {
            return Err(Error::Validation("period name must not be empty".into()));
        }
        if !names.insert(spec.name.as_str()) {
            return Err(Error::Validation(format!("duplicate period name {:?}", spec.name)));
        }
        if spec.start_year > spec.end_year {
            return Err(Error::Validation(format!(
                "period {} starts after it ends ({} > {})",
                spec.name, spec.start_year, spec.end_year
            )));
        }
    }
    for pair in specs.windows(2) {
        if pair[1].start_year <= pair[0].end_year {
            return Err(Error::Validation(format!(
                "periods {} and {} overlap or are out of order",
                pair[0].name, pair[1].name
            )));
        }
    }
    Ok(())
}

/// Reads a JSON array of `{name, start_year, end_year}`.
pub fn load_period_specs(path: impl AsRef<Path>) -> Result<Vec<PeriodSpec>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let specs: Vec<PeriodSpec> = serde_json::from_str(&raw)?;
    validate_specs(&specs)?;
    Ok(specs)
}

/// The tokenized sentences of every charter dated inside one period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSlice {
    pub period: PeriodSpec,
    pub sentences: Vec<Vec<String>>,
    pub charter_count: usize,
    pub token_count: usize,
}

impl PeriodSlice {
    pub fn new(period: PeriodSpec, sentences: Vec<Vec<String>>, charter_count: usize) -> Self {
        let token_count = sentences.iter().map(Vec::len).sum();
        PeriodSlice {
            period,
            sentences,
            charter_count,
            token_count,
        }
    }

    pub fn name(&self) -> &str {
        &self.period.name
    }

    pub fn is_empty(&self) -> bool {
        self.token_count == 0
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedCharter {
    pub id: String,
    pub year: i64,
}

#[derive(Clone, Debug)]
pub struct PeriodSplit {
    /// One slice per spec, in spec order.
    pub slices: Vec<PeriodSlice>,
    /// Charters dated outside every spec.
    pub excluded: Vec<ExcludedCharter>,
}

impl PeriodSplit {
    pub fn get(&self, name: &str) -> Option<&PeriodSlice> {
        self.slices.iter().find(|s| s.period.name == name)
    }
}

pub fn split_periods(charters: &[Charter], specs: &[PeriodSpec]) -> Result<PeriodSplit> {
    validate_specs(specs)?;
    let mut sentences: Vec<Vec<Vec<String>>> = vec![Vec::new(); specs.len()];
    let mut counts = vec![0usize; specs.len()];
    let mut excluded = Vec::new();

    for charter in charters {
        // specs are sorted and disjoint, so at most one matches
        match specs.iter().position(|s| s.contains(charter.year)) {
            Some(idx) => {
                counts[idx] += 1;
                sentences[idx].extend(normalize_and_tokenize(&charter.text));
            }
            None => excluded.push(ExcludedCharter {
                id: charter.id.clone(),
                year: charter.year,
            }),
        }
    }

    let slices = specs
        .iter()
        .cloned()
        .zip(sentences)
        .zip(counts)
        .map(|((spec, sents), count)| PeriodSlice::new(spec, sents, count))
        .collect();
    Ok(PeriodSplit { slices, excluded })
}

/// Writes one sentence per line, tokens separated by single spaces.
pub fn write_slice(slice: &PeriodSlice, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for sentence in &slice.sentences {
        writeln!(out, "{}", sentence.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a slice written by [`write_slice`]. The charter count is not stored
/// in the file and is passed through.
pub fn read_slice(path: impl AsRef<Path>, period: PeriodSpec, charter_count: usize) -> Result<PeriodSlice> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut sentences = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    }
    Ok(PeriodSlice::new(period, sentences, charter_count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn charter(id: &str, year: i64, text: &str) -> Charter {
        Charter {
            id: id.into(),
            year,
            text: text.into(),
        }
    }

    fn period_of(year: i64) -> Option<String> {
        let split = split_periods(&[charter("x", year, "a")], &PeriodSpec::deeds_defaults()).unwrap();
        split
            .slices
            .iter()
            .find(|s| s.charter_count == 1)
            .map(|s| s.period.name.clone())
    }

    #[test]
    fn boundary_years() {
        assert_eq!(period_of(589).as_deref(), Some("ANG"));
        assert_eq!(period_of(1065).as_deref(), Some("ANG"));
        assert_eq!(period_of(1066).as_deref(), Some("NOR"));
        assert_eq!(period_of(1153).as_deref(), Some("NOR"));
        assert_eq!(period_of(1154).as_deref(), Some("PLA"));
        assert_eq!(period_of(1272).as_deref(), Some("PLA"));
        assert_eq!(period_of(1273), None);
        assert_eq!(period_of(588), None);
    }

    #[test]
    fn excluded_are_reported() {
        let charters = [charter("a", 700, "x y."), charter("b", 1300, "late"), charter("c", 1100, "z")];
        let split = split_periods(&charters, &PeriodSpec::deeds_defaults()).unwrap();
        assert_eq!(split.excluded, vec![ExcludedCharter { id: "b".into(), year: 1300 }]);
        assert_eq!(split.get("ANG").unwrap().token_count, 2);
        assert_eq!(split.get("NOR").unwrap().charter_count, 1);
        assert_eq!(split.get("PLA").unwrap().charter_count, 0);
    }

    #[test]
    fn invalid_specs() {
        assert!(validate_specs(&[PeriodSpec::new("A", 10, 5)]).is_err());
        assert!(validate_specs(&[PeriodSpec::new("A", 1, 10), PeriodSpec::new("B", 10, 20)]).is_err());
        assert!(validate_specs(&[PeriodSpec::new("B", 11, 20), PeriodSpec::new("A", 1, 10)]).is_err());
        assert!(validate_specs(&[PeriodSpec::new("A", 1, 10), PeriodSpec::new("A", 11, 20)]).is_err());
        assert!(validate_specs(&PeriodSpec::deeds_defaults()).is_ok());
    }

    #[test]
    fn slice_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ANG.txt");
        let slice = PeriodSlice::new(
            PeriodSpec::new("ANG", 589, 1065),
            vec![vec!["ego".into(), "rex".into()], vec!["dedi".into()]],
            2,
        );
        write_slice(&slice, &path).unwrap();
        let back = read_slice(&path, slice.period.clone(), 2).unwrap();
        assert_eq!(back, slice);
    }

    proptest! {
        #[test]
        fn every_charter_lands_once(years in proptest::collection::vec(1i64..1500, 0..60)) {
            let charters: Vec<_> = years
                .iter()
                .enumerate()
                .map(|(i, &y)| charter(&format!("c{i}"), y, "terra data est"))
                .collect();
            let split = split_periods(&charters, &PeriodSpec::deeds_defaults()).unwrap();
            let placed: usize = split.slices.iter().map(|s| s.charter_count).sum();
            prop_assert_eq!(placed + split.excluded.len(), charters.len());
            for slice in &split.slices {
                prop_assert_eq!(slice.token_count, slice.sentences.iter().map(Vec::len).sum::<usize>());
            }
        }
    }
}
