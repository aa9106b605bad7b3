use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A dated source document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Charter {
    pub id: String,
    /// Year C.E.
    pub year: i64,
    pub text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharterFormat {
    Csv,
    Jsonl,
}

impl CharterFormat {
    /// Guesses the format from a file extension (`.csv`, `.jsonl`, `.ndjson`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(CharterFormat::Csv),
            "jsonl" | "ndjson" => Some(CharterFormat::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for CharterFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CharterFormat::Csv),
            "jsonl" => Ok(CharterFormat::Jsonl),
            other => Err(Error::Usage(format!("unknown charter format {other:?}"))),
        }
    }
}

pub fn load_charters(path: impl AsRef<Path>, format: CharterFormat) -> Result<Vec<Charter>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_charters(file, format, &path.display().to_string())
}

/// Reads charters from any reader. `source_name` only labels error messages.
pub fn parse_charters<R: Read>(reader: R, format: CharterFormat, source_name: &str) -> Result<Vec<Charter>> {
    let charters = match format {
        CharterFormat::Csv => parse_csv(reader, source_name)?,
        CharterFormat::Jsonl => parse_jsonl(reader, source_name)?,
    };

    let mut seen = HashSet::with_capacity(charters.len());
    for (charter, line) in &charters {
        if !seen.insert(charter.id.as_str()) {
            return Err(Error::Validation(format!(
                "{source_name}:{line}: duplicate charter id {:?}",
                charter.id
            )));
        }
    }
    Ok(charters.into_iter().map(|(c, _)| c).collect())
}

fn check_fields(id: &str, year: i64, source_name: &str, line: usize) -> Result<()> {
    if id.is_empty() {
        return Err(Error::parse(source_name, line, "empty charter id"));
    }
    if year <= 0 {
        return Err(Error::parse(source_name, line, format!("year must be positive, got {year}")));
    }
    Ok(())
}

fn parse_year(raw: &str, source_name: &str, line: usize) -> Result<i64> {
    raw.trim()
        .parse::<i64>()
        .map_err(|_| Error::parse(source_name, line, format!("year is not an integer: {raw:?}")))
}

fn parse_csv<R: Read>(reader: R, source_name: &str) -> Result<Vec<(Charter, usize)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse(source_name, 1, format!("missing column {name:?}")))
    };
    let (id_col, year_col, text_col) = (column("id")?, column("year")?, column("text")?);

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |col: usize, name: &str| {
            record
                .get(col)
                .ok_or_else(|| Error::parse(source_name, line, format!("missing field {name:?}")))
        };
        let id = field(id_col, "id")?.trim().to_string();
        let year = parse_year(field(year_col, "year")?, source_name, line)?;
        let text = field(text_col, "text")?.to_string();
        check_fields(&id, year, source_name, line)?;
        out.push((Charter { id, year, text }, line));
    }
    Ok(out)
}

fn parse_jsonl<R: Read>(reader: R, source_name: &str) -> Result<Vec<(Charter, usize)>> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(source_name, lineno, format!("invalid JSON: {e}")))?;
        let get = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| Error::parse(source_name, lineno, format!("missing field {name:?}")))
        };
        let id = match get("id")? {
            serde_json::Value::String(s) => s.trim().to_string(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(Error::parse(source_name, lineno, "field \"id\" must be a string")),
        };
        let year = match get("year")? {
            serde_json::Value::Number(n) => n
                .as_i64()
                .ok_or_else(|| Error::parse(source_name, lineno, format!("year is not an integer: {n}")))?,
            serde_json::Value::String(s) => parse_year(s, source_name, lineno)?,
            other => {
                return Err(Error::parse(source_name, lineno, format!("year is not an integer: {other}")))
            }
        };
        let text = get("text")?
            .as_str()
            .ok_or_else(|| Error::parse(source_name, lineno, "field \"text\" must be a string"))?
            .to_string();
        check_fields(&id, year, source_name, lineno)?;
        out.push((Charter { id, year, text }, lineno));
    }
    Ok(out)
}
