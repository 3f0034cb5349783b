//! Corpus ingestion and text normalization.
//!
//! Documents arrive as JSONL records with fields {id, date, source, text};
//! ingestion validates them and returns a (date, id)-sorted corpus. From
//! there, [`normalize`] reduces each document to a token sequence
//! (casefolding, edge-punctuation trimming, numeral and stopword removal,
//! optional lemma mapping), and [`build_vocabulary`] collects the terms the
//! representation layer indexes against.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One dated, sourced text unit (e.g. a front-page article).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub source: String,
    pub text: String,
}

/// A document reduced to its normalized token sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub id: String,
    pub date: NaiveDate,
    pub source: String,
    pub tokens: Vec<String>,
}

/// Options for [`normalize`]. The default applies no lemma mapping.
#[derive(Clone, Debug, Default)]
pub struct NormalizeOpts {
    /// Surface form → lemma substitution, applied after casefolding and edge
    /// trimming and before the numeral and stopword filters, so mapped
    /// tokens are still subject to both filters.
    pub lemmas: Option<HashMap<String, String>>,
}

/// Ordered term list with its inverse index. Built by [`build_vocabulary`],
/// which guarantees lexicographic term order and a bijective index.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Read a JSONL corpus from disk. See [`read_jsonl`] for the contract.
pub fn ingest(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let file = File::open(path.as_ref())?;
    read_jsonl(BufReader::new(file))
}

/// Parse one JSON document record per non-blank line and return the corpus
/// sorted by (date, id). Malformed lines, unparseable dates, empty text,
/// and duplicate ids are all errors naming the offending line.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Document>> {
    #[derive(Deserialize)]
    struct Raw {
        id: String,
        date: String,
        source: String,
        text: String,
    }

    let mut docs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: Raw =
            serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let date = NaiveDate::parse_from_str(&raw.date, "%Y-%m-%d").map_err(|_| {
            Error::parse(
                lineno,
                format!(
                    "record {:?}: invalid date {:?} (expected YYYY-MM-DD)",
                    raw.id, raw.date
                ),
            )
        })?;
        if raw.text.trim().is_empty() {
            return Err(Error::parse(
                lineno,
                format!("record {:?}: text is empty", raw.id),
            ));
        }
        if !seen.insert(raw.id.clone()) {
            return Err(Error::parse(
                lineno,
                format!("duplicate document id {:?}", raw.id),
            ));
        }
        docs.push(Document {
            id: raw.id,
            date,
            source: raw.source,
            text: raw.text,
        });
    }
    docs.sort_unstable_by(|a, b| (a.date, a.id.as_str()).cmp(&(b.date, b.id.as_str())));
    Ok(docs)
}

/// Serialize documents as JSONL, the inverse of [`read_jsonl`].
pub fn write_jsonl<W: Write>(docs: &[Document], mut w: W) -> Result<()> {
    for d in docs {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Casefold, trim non-alphanumeric token edges, apply the optional lemma
/// map, and drop numerals and stopwords. Token order is preserved; an empty
/// result is legal. Idempotent when the lemma map is empty or the identity.
pub fn normalize(
    doc: &Document,
    stopwords: &HashSet<String>,
    opts: &NormalizeOpts,
) -> TokenizedDoc {
    let lower = doc.text.to_lowercase();
    let mut tokens = Vec::new();
    for raw in lower.split_whitespace() {
        let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
        if trimmed.is_empty() {
            continue;
        }
        let token = match opts.lemmas.as_ref().and_then(|m| m.get(trimmed)) {
            Some(lemma) => lemma.as_str(),
            None => trimmed,
        };
        if token.is_empty() || is_numeral(token) || stopwords.contains(token) {
            continue;
        }
        tokens.push(token.to_string());
    }
    TokenizedDoc {
        id: doc.id.clone(),
        date: doc.date,
        source: doc.source.clone(),
        tokens,
    }
}

/// A token is a numeral when only decimal digits remain after stripping the
/// separator characters ".,:-" (so "2020", "3.14" and "1,5" are numerals
/// while "covid-19" is not).
fn is_numeral(token: &str) -> bool {
    let mut saw_digit = false;
    for c in token.chars() {
        match c {
            '.' | ',' | ':' | '-' => {}
            d if d.is_ascii_digit() => saw_digit = true,
            _ => return false,
        }
    }
    saw_digit
}

/// Collect the tokens whose corpus frequency is at least `min_count`, in
/// lexicographic order. An empty result is an error since downstream
/// distributions would be undefined.
pub fn build_vocabulary(docs: &[TokenizedDoc], min_count: usize) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::config("min_count must be at least 1"));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        for t in &doc.tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let terms: Vec<String> = counts
        .iter()
        .filter(|&(_, &c)| c >= min_count)
        .map(|(t, _)| t.to_string())
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary { terms, index })
}

/// Load a stopword file: one token per line, casefolded, blank lines
/// ignored.
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let file = File::open(path.as_ref())?;
    let mut set = HashSet::new();
    for line in BufReader::new(file).lines() {
        let token = line?.trim().to_lowercase();
        if !token.is_empty() {
            set.insert(token);
        }
    }
    Ok(set)
}

/// Load a lemma map: one "surface<TAB>lemma" pair per line, casefolded.
pub fn load_lemmas(path: impl AsRef<Path>) -> Result<HashMap<String, String>> {
    let file = File::open(path.as_ref())?;
    let mut map = HashMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (surface, lemma) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(i + 1, "expected two tab-separated fields".to_string()))?;
        let (surface, lemma) = (surface.trim().to_lowercase(), lemma.trim().to_lowercase());
        if surface.is_empty() || lemma.is_empty() {
            return Err(Error::parse(i + 1, "empty surface or lemma".to_string()));
        }
        map.insert(surface, lemma);
    }
    Ok(map)
}
