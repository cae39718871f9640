//! Conversion of RED relation exports.
//!
//! Input is tab-separated, one relation per line: document id, first
//! event index, second event index, raw RED relation. Lines starting with
//! `#` are comments. The export carries no text, so each event becomes a
//! single placeholder token `e<k>`.

use std::collections::BTreeMap;
use std::io::BufRead;

use evrel_core::data::{map_red_label, CorpusRecord, Split};
use evrel_core::model::{pos_id, Document, Token};
use evrel_core::relations::RelationGraph;

use crate::corpus::hashed_vocab_id;

#[derive(Debug, thiserror::Error)]
pub enum RedError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Converted records plus the raw strings that fell back to a default
/// class, with their counts.
#[derive(Debug, Default)]
pub struct Conversion {
    pub records: Vec<CorpusRecord>,
    pub unlisted: BTreeMap<String, usize>,
}

pub fn convert_red<R: BufRead>(input: R, vocab: usize) -> Result<Conversion, RedError> {
    let mut docs: BTreeMap<String, Vec<(usize, usize, String)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |message: &str| RedError::Parse { line: line_no, message: message.to_string() };
        let fields: Vec<&str> = line.split('\t').collect();
        let [doc, e1, e2, raw] = fields[..] else {
            return Err(fail("expected 4 tab-separated fields"));
        };
        let e1: usize = e1.trim().parse().map_err(|_| fail("bad first event index"))?;
        let e2: usize = e2.trim().parse().map_err(|_| fail("bad second event index"))?;
        if e1 == e2 {
            return Err(fail("a relation needs two distinct events"));
        }
        if !docs.contains_key(doc) {
            order.push(doc.to_string());
        }
        docs.entry(doc.to_string()).or_default().push((e1, e2, raw.to_string()));
    }

    let mut out = Conversion::default();
    let pos = pos_id("VB").expect("VB is a known tag");
    for id in order {
        let rels = &docs[&id];
        let n = rels.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
        let tokens = (0..n)
            .map(|k| {
                let text = format!("e{k}");
                Token { vocab_id: hashed_vocab_id(&text, vocab), text, pos }
            })
            .collect();
        let mut gold = RelationGraph::new(n);
        for (a, b, raw) in rels {
            let m = map_red_label(raw);
            if !m.listed {
                log::warn!("{id}: unlisted RED relation {raw:?} mapped to a default class");
                *out.unlisted.entry(raw.clone()).or_default() += 1;
            }
            for label in m.subevent.into_iter().chain(m.temporal) {
                gold.set(*a, *b, label);
            }
        }
        let document = Document { id, tokens, events: (0..n).collect() };
        out.records.push(CorpusRecord { document, gold, split: Split::Train });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use evrel_core::relations::{Head, RelationLabel::*};

    #[test]
    fn converts_listed_and_unlisted_relations() {
        let tsv = "# doc\te1\te2\trel\nd1\t0\t2\tCONTAINS-SUBEVENT\nd1\t1\t0\tBEGINS-ON\nd2\t0\t1\tIDENTICAL\n";
        let c = convert_red(tsv.as_bytes(), 64).unwrap();
        assert_eq!(c.records.len(), 2);
        let g = &c.records[0].gold;
        assert_eq!(g.n_events(), 3);
        assert_eq!(g.get(0, 2, Head::Subevent), Some(ParentChild));
        assert_eq!(g.get(0, 2, Head::Temporal), Some(Before));
        assert_eq!(g.get(1, 0, Head::Temporal), Some(After));
        assert_eq!(g.get(0, 1, Head::Temporal), Some(Before));
        assert_eq!(c.records[1].gold.get(0, 1, Head::Subevent), Some(NoRel));
        assert_eq!(c.unlisted.get("IDENTICAL"), Some(&1));
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let err = convert_red("d1\t0\t1\tBEFORE\nd1\t0\tx\tBEFORE\n".as_bytes(), 64).unwrap_err();
        assert!(matches!(err, RedError::Parse { line: 2, .. }));
        let err = convert_red("d1\t0\t1\n".as_bytes(), 64).unwrap_err();
        assert!(matches!(err, RedError::Parse { line: 1, .. }));
    }
}
