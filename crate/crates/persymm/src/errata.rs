//! The recorded corrections applied to transcribed closed forms.
//!
//! Enumeration is ground truth: wherever a transcribed formula disagrees
//! with brute force in its own validity window, the corrected form is
//! implemented and the deviation is recorded here (shipped as
//! `data/errata.tsv`). Golden tests assert the corrected values.

use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erratum {
    pub id: String,
    pub citation: String,
    pub context: String,
    pub printed: String,
    pub corrected: String,
    pub note: String,
}

const ERRATA_TSV: &str = include_str!("../data/errata.tsv");

/// Parses a TSV errata table (header line, then one record per line).
pub fn parse(tsv: &str) -> Result<Vec<Erratum>, String> {
    let mut out = Vec::new();
    for (idx, line) in tsv.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(format!(
                "errata line {}: expected 6 tab-separated fields, got {}",
                idx + 1,
                fields.len()
            ));
        }
        out.push(Erratum {
            id: fields[0].to_string(),
            citation: fields[1].to_string(),
            context: fields[2].to_string(),
            printed: fields[3].to_string(),
            corrected: fields[4].to_string(),
            note: fields[5].to_string(),
        });
    }
    Ok(out)
}

/// The built-in errata list.
pub fn all() -> &'static [Erratum] {
    static CACHE: OnceLock<Vec<Erratum>> = OnceLock::new();
    CACHE.get_or_init(|| parse(ERRATA_TSV).expect("built-in errata table is well-formed"))
}

pub fn by_id(id: &str) -> Option<&'static Erratum> {
    all().iter().find(|e| e.id == id)
}
