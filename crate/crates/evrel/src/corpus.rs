//! JSON Lines corpus files.
//!
//! One record per line:
//!
//! ```text
//! {"id":"d1","split":"train",
//!  "tokens":[{"t":"at","pos":"IN","v":3},...],
//!  "events":[5,11],
//!  "relations":[{"i":0,"j":1,"temporal":"BF","subevent":"PC"}]}
//! ```
//!
//! `v` (vocabulary id) is optional; tokens without it are hashed into the
//! vocabulary given by [`LoadOptions::vocab`]. `split` defaults to `train`.
//! Relations list labelled canonical pairs only, either head may be null.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use evrel_core::data::{CorpusRecord, Split};
use evrel_core::model::{pos_id, Document, Token, OOV, POS_TAGS};
use evrel_core::relations::{
    count_violations, transitive_closure, ConflictError, Head, RelationGraph, RelationLabel,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: gold graph of {id} does not close: {source}")]
    Conflict {
        line: usize,
        id: String,
        source: ConflictError,
    },
    #[error("line {line}: closed gold graph of {id} violates {count} triples")]
    Inconsistent { line: usize, id: String, count: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Close and validate every gold graph. The stored graph is returned
    /// unchanged either way.
    pub strict: bool,
    /// Hash bucket count for tokens without a `v` field.
    pub vocab: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { strict: true, vocab: 512 }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenLine {
    t: String,
    pos: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationLine {
    i: usize,
    j: usize,
    #[serde(default)]
    temporal: Option<String>,
    #[serde(default)]
    subevent: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    id: String,
    #[serde(default = "default_split")]
    split: String,
    tokens: Vec<TokenLine>,
    events: Vec<usize>,
    relations: Vec<RelationLine>,
}

fn default_split() -> String {
    Split::Train.name().to_string()
}

/// FNV-1a of the token text, mapped into `1..vocab` so that id 0 stays
/// reserved for unknown words.
pub fn hashed_vocab_id(text: &str, vocab: usize) -> usize {
    if vocab < 2 {
        return OOV;
    }
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    1 + (h % (vocab as u64 - 1)) as usize
}

fn to_line(record: &CorpusRecord) -> RecordLine {
    let doc = &record.document;
    RecordLine {
        id: doc.id.clone(),
        split: record.split.name().to_string(),
        tokens: doc
            .tokens
            .iter()
            .map(|t| TokenLine { t: t.text.clone(), pos: POS_TAGS[t.pos].to_string(), v: Some(t.vocab_id) })
            .collect(),
        events: doc.events.clone(),
        relations: record
            .gold
            .labeled_pairs()
            .map(|(i, j, l)| RelationLine {
                i,
                j,
                temporal: l.temporal.map(|x| x.code().to_string()),
                subevent: l.subevent.map(|x| x.code().to_string()),
            })
            .collect(),
    }
}

fn from_line(raw: RecordLine, line: usize, opts: &LoadOptions) -> Result<CorpusRecord, CorpusError> {
    let fail = |message: String| CorpusError::Parse { line, message };
    let split = Split::from_name(&raw.split).map_err(|e| fail(e.to_string()))?;
    let mut tokens = Vec::with_capacity(raw.tokens.len());
    for t in raw.tokens {
        let pos = pos_id(&t.pos).ok_or_else(|| fail(format!("unknown POS tag {:?}", t.pos)))?;
        let vocab_id = t.v.unwrap_or_else(|| hashed_vocab_id(&t.t, opts.vocab));
        tokens.push(Token { text: t.t, vocab_id, pos });
    }
    let document = Document { id: raw.id, tokens, events: raw.events };
    document.validate(POS_TAGS.len()).map_err(|e| fail(e.to_string()))?;
    let n = document.events.len();
    let mut gold = RelationGraph::new(n);
    for r in raw.relations {
        if r.i == r.j || r.i >= n || r.j >= n {
            return Err(fail(format!("relation ({}, {}) outside {n} events", r.i, r.j)));
        }
        let mut set = |code: Option<String>, head: Head| -> Result<(), CorpusError> {
            if let Some(code) = code {
                let label = RelationLabel::from_code(&code)
                    .ok_or_else(|| fail(format!("unknown label {code:?}")))?;
                if label.head() != head {
                    return Err(fail(format!("{code} is not a {head:?} label")));
                }
                gold.set(r.i, r.j, label);
            }
            Ok(())
        };
        set(r.temporal, Head::Temporal)?;
        set(r.subevent, Head::Subevent)?;
    }
    if opts.strict {
        let id = document.id.clone();
        let closed = transitive_closure(&gold)
            .map_err(|source| CorpusError::Conflict { line, id: id.clone(), source })?;
        let count = count_violations(&closed).violating_triples;
        if count > 0 {
            return Err(CorpusError::Inconsistent { line, id, count });
        }
    }
    Ok(CorpusRecord { document, gold, split })
}

pub fn write_corpus<W: Write>(records: &[CorpusRecord], mut out: W) -> Result<(), CorpusError> {
    for r in records {
        serde_json::to_writer(&mut out, &to_line(r)).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads records, reporting 1-based line numbers. Blank lines are skipped.
pub fn read_corpus<R: BufRead>(input: R, opts: &LoadOptions) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut records = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RecordLine = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
        records.push(from_line(raw, line_no, opts)?);
    }
    Ok(records)
}

pub fn save_corpus(records: &[CorpusRecord], path: &Path) -> Result<(), CorpusError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_corpus(records, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<Vec<CorpusRecord>, CorpusError> {
    read_corpus(BufReader::new(File::open(path)?), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use evrel_core::data::{generate_corpus, split_corpus, SyntheticSpec};

    fn sample() -> Vec<CorpusRecord> {
        let spec = SyntheticSpec { docs: 12, noise: 0.2, coref: 0.2, ..SyntheticSpec::default() };
        split_corpus(generate_corpus(&spec).unwrap(), &[0.5, 0.25, 0.25], 3).unwrap()
    }

    fn roundtrip(records: &[CorpusRecord], opts: &LoadOptions) -> Result<Vec<CorpusRecord>, CorpusError> {
        let mut buf = Vec::new();
        write_corpus(records, &mut buf).unwrap();
        read_corpus(buf.as_slice(), opts)
    }

    #[test]
    fn round_trip_is_identity() {
        let records = sample();
        assert_eq!(roundtrip(&records, &LoadOptions::default()).unwrap(), records);
    }

    #[test]
    fn truncated_file_reports_its_line() {
        let mut buf = Vec::new();
        write_corpus(&sample()[..3], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 20];
        match read_corpus(cut.as_bytes(), &LoadOptions::default()) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    fn triangle(third: &str) -> String {
        let tok = |t: &str| format!(r#"{{"t":"{t}","pos":"VB"}}"#);
        format!(
            r#"{{"id":"x","tokens":[{},{},{}],"events":[0,1,2],"relations":[{{"i":0,"j":1,"temporal":"BF"}},{{"i":1,"j":2,"temporal":"BF"}},{{"i":0,"j":2,"temporal":"{third}"}}]}}"#,
            tok("a"),
            tok("b"),
            tok("c")
        )
    }

    #[test]
    fn strict_load_rejects_contradictions() {
        let bad = triangle("AF");
        let err = read_corpus(bad.as_bytes(), &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::Conflict { line: 1, .. }), "{err}");
        let lenient = LoadOptions { strict: false, ..LoadOptions::default() };
        let r = read_corpus(bad.as_bytes(), &lenient).unwrap();
        assert_eq!(r[0].gold.get(0, 2, Head::Temporal), Some(RelationLabel::After));
        assert!(read_corpus(triangle("BF").as_bytes(), &LoadOptions::default()).is_ok());
    }

    #[test]
    fn missing_vocab_ids_are_hashed() {
        let r = read_corpus(triangle("BF").as_bytes(), &LoadOptions::default()).unwrap();
        let ids: Vec<usize> = r[0].document.tokens.iter().map(|t| t.vocab_id).collect();
        assert!(ids.iter().all(|&v| (1..512).contains(&v)));
        assert_eq!(ids[0], hashed_vocab_id("a", 512));
        assert_eq!(r[0].split, Split::Train);
    }

    #[test]
    fn bad_labels_and_indices_are_parse_errors() {
        for bad in [
            triangle("XX"),
            triangle("PC"),
            triangle("BF").replace(r#""j":2,"temporal":"BF"}]"#, r#""j":7,"temporal":"BF"}]"#),
            triangle("BF").replace(r#""pos":"VB""#, r#""pos":"ZZ""#),
        ] {
            let err = read_corpus(bad.as_bytes(), &LoadOptions::default()).unwrap_err();
            assert!(matches!(err, CorpusError::Parse { line: 1, .. }), "{bad}: {err}");
        }
    }
}
