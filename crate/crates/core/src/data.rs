//! Synthetic event-complex corpora, document-level splits, partial
//! annotation, and the RED label mapping.
//!
//! A generated document is a short narrative. Each event mention carries
//! cues for its latent start time, its hierarchy (scene, role, branch) and
//! a trigger lexeme; coreferent mentions reuse the cues and trigger of the
//! event they refer to. Gold labels are a function of the latent structure,
//! so every gold graph is consistent by construction.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{pos_id, Document, Token};
use crate::relations::{
    count_violations, pair_is_consistent, Head, RelationGraph, RelationLabel,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("split fractions must be non-negative, at most three and sum to 1, got {0:?}")]
    BadFractions(Vec<f64>),
    #[error("unknown split `{0}`")]
    UnknownSplit(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn from_name(name: &str) -> Result<Split, DataError> {
        Split::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| DataError::UnknownSplit(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorpusRecord {
    pub document: Document,
    pub gold: RelationGraph,
    pub split: Split,
}

/// Text templates for rendering events.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Grammar {
    /// Every mention states all of its cues.
    #[default]
    Explicit,
    /// Cues are dropped at random; adjacent mentions are linked by a
    /// connective describing their relative order.
    Narrative,
}

impl Grammar {
    pub fn id(self) -> u32 {
        match self {
            Grammar::Explicit => 0,
            Grammar::Narrative => 1,
        }
    }

    pub fn from_id(id: u32) -> Option<Grammar> {
        match id {
            0 => Some(Grammar::Explicit),
            1 => Some(Grammar::Narrative),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub docs: usize,
    /// Inclusive range of events per document.
    pub events: (usize, usize),
    /// Inclusive range of children a node may take.
    pub branching: (usize, usize),
    /// Probability that an unrelated pair is relabelled Vague, and that a
    /// new root event carries no time anchor.
    pub noise: f64,
    /// Probability that a mention corefers with an earlier event.
    pub coref: f64,
    pub vocab_size: usize,
    pub grammar: Grammar,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 0,
            docs: 200,
            events: (5, 9),
            branching: (1, 3),
            noise: 0.05,
            coref: 0.1,
            vocab_size: 64,
            grammar: Grammar::Explicit,
        }
    }
}

/// Start times are drawn from `0..TIME_SLOTS`.
pub const TIME_SLOTS: u32 = 10;
const MAX_SCENES: usize = 4;
const MAX_BRANCHES: usize = 4;
const MAX_DEPTH: u8 = 2;

const FUNCTION_WORDS: [(&str, &str); 15] = [
    ("<unk>", "X"),
    (".", "PUNCT"),
    (",", "PUNCT"),
    ("at", "IN"),
    ("the", "DT"),
    ("then", "RB"),
    ("meanwhile", "RB"),
    ("earlier", "RB"),
    ("it", "PRP"),
    ("again", "RB"),
    ("overall", "JJ"),
    ("step", "NN"),
    ("substep", "NN"),
    ("and", "CC"),
    ("sometime", "RB"),
];

/// Vocabulary ids: function words, then time, scene and branch markers,
/// then trigger lexemes up to `vocab_size`.
struct Lexicon {
    vocab_size: usize,
}

impl Lexicon {
    const TIME: usize = FUNCTION_WORDS.len();
    const SCENE: usize = Self::TIME + TIME_SLOTS as usize;
    const BRANCH: usize = Self::SCENE + MAX_SCENES;
    const TRIGGER: usize = Self::BRANCH + MAX_BRANCHES;
    const MIN_TRIGGERS: usize = 8;

    fn triggers(&self) -> usize {
        self.vocab_size - Self::TRIGGER
    }

    fn word(&self, text: &str) -> Token {
        let (i, (w, pos)) = FUNCTION_WORDS
            .iter()
            .enumerate()
            .find(|(_, (w, _))| *w == text)
            .expect("function word");
        token(w, i, pos)
    }

    fn time(&self, t: u32) -> Token {
        token(&format!("day{t}"), Self::TIME + t as usize, "CD")
    }

    fn scene(&self, s: usize) -> Token {
        token(&format!("scene{s}"), Self::SCENE + s, "NNP")
    }

    fn branch(&self, b: usize) -> Token {
        token(&format!("line{b}"), Self::BRANCH + b, "NNP")
    }

    fn trigger(&self, k: usize) -> Token {
        token(&format!("ev{k}"), Self::TRIGGER + k, "VB")
    }
}

fn token(text: &str, vocab_id: usize, pos: &str) -> Token {
    Token { text: text.to_string(), vocab_id, pos: pos_id(pos).expect("known tag") }
}

/// Smallest vocabulary the generator accepts.
pub const MIN_VOCAB: usize = Lexicon::TRIGGER + Lexicon::MIN_TRIGGERS;

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::InvalidSpec(m.to_string()));
        if self.events.0 == 0 || self.events.0 > self.events.1 {
            return bad("events range must be non-empty and start at 1 or more");
        }
        if self.branching.0 > self.branching.1 || self.branching.1 == 0 {
            return bad("branching range must be non-empty with a positive maximum");
        }
        if !(0.0..=1.0).contains(&self.noise) || !(0.0..=1.0).contains(&self.coref) {
            return bad("noise and coref fractions must lie in [0, 1]");
        }
        if self.vocab_size < MIN_VOCAB {
            return Err(DataError::InvalidSpec(format!(
                "vocab_size must be at least {MIN_VOCAB}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    start: u32,
    scene: usize,
    depth: u8,
    branch: Option<usize>,
    parent: Option<usize>,
    trigger: usize,
    capacity: usize,
    children: usize,
    untimed: bool,
}

/// One sampled event complex: a gold graph over `n_events` mentions and the
/// document describing it. Deterministic in `(spec, seed, n_events)`.
pub fn generate_complex(
    spec: &SyntheticSpec,
    seed: u64,
    n_events: usize,
) -> Result<(RelationGraph, Document), DataError> {
    spec.validate()?;
    if n_events == 0 {
        return Err(DataError::InvalidSpec("n_events must be at least 1".to_string()));
    }
    let lex = Lexicon { vocab_size: spec.vocab_size };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Latent forest; `mention_of[m]` is the node mention `m` refers to.
    let mut nodes: Vec<Node> = Vec::new();
    let mut mention_of: Vec<usize> = Vec::with_capacity(n_events);
    let mut scenes = 0;
    for _ in 0..n_events {
        let timed: Vec<usize> = (0..nodes.len()).filter(|&k| !nodes[k].untimed).collect();
        if !timed.is_empty() && rng.gen_bool(spec.coref) {
            mention_of.push(timed[rng.gen_range(0..timed.len())]);
            continue;
        }
        let open: Vec<usize> = (0..nodes.len())
            .filter(|&k| nodes[k].depth < MAX_DEPTH && nodes[k].children < nodes[k].capacity)
            // A child starts strictly after its parent.
            .filter(|&k| nodes[k].start + 1 < TIME_SLOTS)
            .filter(|&k| nodes[k].depth > 0 || nodes[k].children < MAX_BRANCHES)
            .collect();
        let attach = !open.is_empty() && (scenes >= MAX_SCENES || rng.gen_bool(0.6));
        let capacity = rng.gen_range(spec.branching.0..=spec.branching.1);
        let trigger = rng.gen_range(0..lex.triggers());
        let node = if !attach && rng.gen_bool(spec.noise) {
            // An event with no time anchor: vague against everything.
            Node {
                start: rng.gen_range(0..TIME_SLOTS),
                scene: rng.gen_range(0..MAX_SCENES),
                depth: 0,
                branch: None,
                parent: None,
                trigger,
                capacity: 0,
                children: 0,
                untimed: true,
            }
        } else if attach {
            let p = open[rng.gen_range(0..open.len())];
            let parent = nodes[p];
            nodes[p].children += 1;
            let branch = parent.branch.or(Some(parent.children));
            let latest = TIME_SLOTS - 1;
            let start = (parent.start + rng.gen_range(1..=3)).min(latest);
            Node {
                start,
                scene: parent.scene,
                depth: parent.depth + 1,
                branch,
                parent: Some(p),
                trigger,
                capacity,
                children: 0,
                untimed: false,
            }
        } else {
            scenes += 1;
            Node {
                start: rng.gen_range(0..TIME_SLOTS / 2),
                scene: (scenes - 1) % MAX_SCENES,
                depth: 0,
                branch: None,
                parent: None,
                trigger,
                capacity,
                children: 0,
                untimed: false,
            }
        };
        nodes.push(node);
        mention_of.push(nodes.len() - 1);
    }

    // Textual order: roughly chronological.
    let mut order: Vec<usize> = (0..n_events).collect();
    let keys: Vec<f64> = mention_of
        .iter()
        .map(|&k| nodes[k].start as f64 + rng.gen_range(-2.5..2.5))
        .collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mentions: Vec<usize> = order.iter().map(|&m| mention_of[m]).collect();

    let ancestor = |a: usize, d: usize| {
        let mut cur = nodes[d].parent;
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = nodes[p].parent;
        }
        false
    };
    let mut gold = RelationGraph::new(n_events);
    for i in 0..n_events {
        for j in i + 1..n_events {
            let (a, b) = (mentions[i], mentions[j]);
            let sub = if a == b {
                RelationLabel::Coref
            } else if ancestor(a, b) {
                RelationLabel::ParentChild
            } else if ancestor(b, a) {
                RelationLabel::ChildParent
            } else {
                RelationLabel::NoRel
            };
            let (sa, sb) = (nodes[a].start, nodes[b].start);
            let temp = if nodes[a].untimed || nodes[b].untimed {
                RelationLabel::Vague
            } else if sa < sb {
                RelationLabel::Before
            } else if sa > sb {
                RelationLabel::After
            } else {
                RelationLabel::Equal
            };
            gold.set(i, j, sub);
            gold.set(i, j, temp);
        }
    }
    let mut unrelated: Vec<(usize, usize)> = gold
        .pairs()
        .filter(|(_, _, l)| l.subevent == Some(RelationLabel::NoRel))
        .map(|(i, j, _)| (i, j))
        .collect();
    unrelated.shuffle(&mut rng);
    for (i, j) in unrelated {
        if rng.gen_bool(spec.noise) {
            let before = gold.get(i, j, Head::Temporal).expect("complete");
            gold.set(i, j, RelationLabel::Vague);
            if !pair_is_consistent(&gold, i, j) {
                gold.set(i, j, before);
            }
        }
    }
    debug_assert_eq!(count_violations(&gold).violating_triples, 0);

    let doc = render(spec, &lex, &mut rng, &nodes, &mentions, seed);
    Ok((gold, doc))
}

fn render(
    spec: &SyntheticSpec,
    lex: &Lexicon,
    rng: &mut ChaCha8Rng,
    nodes: &[Node],
    mentions: &[usize],
    seed: u64,
) -> Document {
    let mut tokens = Vec::new();
    let mut events = Vec::with_capacity(mentions.len());
    let mut seen = alloc::vec![false; nodes.len()];
    let narrative = spec.grammar == Grammar::Narrative;
    for (m, &k) in mentions.iter().enumerate() {
        let node = nodes[k];
        let prev = m.checked_sub(1).map(|p| nodes[mentions[p]]);
        if let Some(prev) = prev.filter(|p| narrative && !p.untimed && !node.untimed) {
            let prev = prev.start;
            let word = match node.start.cmp(&prev) {
                core::cmp::Ordering::Greater => "then",
                core::cmp::Ordering::Equal => "meanwhile",
                core::cmp::Ordering::Less => "earlier",
            };
            tokens.push(lex.word(word));
            tokens.push(lex.word(","));
        }
        let keep = |rng: &mut ChaCha8Rng| !narrative || rng.gen_bool(0.8);
        if node.untimed {
            tokens.push(lex.word("sometime"));
        } else if keep(rng) {
            tokens.push(lex.word("at"));
            tokens.push(lex.time(node.start));
        }
        if keep(rng) {
            tokens.push(lex.word("the"));
            tokens.push(lex.scene(node.scene));
        }
        let role = match node.depth {
            0 => "overall",
            1 => "step",
            _ => "substep",
        };
        tokens.push(lex.word(role));
        if let Some(b) = node.branch {
            if keep(rng) {
                tokens.push(lex.branch(b));
            }
        }
        if seen[k] {
            tokens.push(lex.word("it"));
        }
        events.push(tokens.len());
        tokens.push(lex.trigger(node.trigger));
        if seen[k] {
            tokens.push(lex.word("again"));
        }
        seen[k] = true;
        tokens.push(lex.word("."));
    }
    Document { id: format!("syn-{seed:016x}"), tokens, events }
}

/// `spec.docs` records, all tagged [`Split::Train`].
pub fn generate_corpus(spec: &SyntheticSpec) -> Result<Vec<CorpusRecord>, DataError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.docs)
        .map(|_| {
            let seed = rng.gen::<u64>();
            let n = rng.gen_range(spec.events.0..=spec.events.1);
            let (gold, document) = generate_complex(spec, seed, n)?;
            Ok(CorpusRecord { document, gold, split: Split::Train })
        })
        .collect()
}

/// Tags records train/dev/test by document. `fractions` lists the train,
/// dev and test shares (missing trailing shares are zero); counts are
/// rounded by largest remainder. Record order is preserved.
pub fn split_corpus(
    mut records: Vec<CorpusRecord>,
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<CorpusRecord>, DataError> {
    let sum: f64 = fractions.iter().sum();
    if fractions.is_empty()
        || fractions.len() > 3
        || fractions.iter().any(|f| !(0.0..=1.0).contains(f))
        || (sum - 1.0).abs() > 1e-9
    {
        return Err(DataError::BadFractions(fractions.to_vec()));
    }
    let n = records.len();
    let mut counts: Vec<usize> = fractions.iter().map(|f| (f * n as f64) as usize).collect();
    let mut by_remainder: Vec<usize> = (0..fractions.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = fractions[a] * n as f64 - counts[a] as f64;
        let rb = fractions[b] * n as f64 - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut short = n - counts.iter().sum::<usize>();
    for &k in by_remainder.iter().cycle() {
        if short == 0 {
            break;
        }
        counts[k] += 1;
        short -= 1;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut pos = 0;
    for (k, &c) in counts.iter().enumerate() {
        for &r in &idx[pos..pos + c] {
            records[r].split = Split::ALL[k];
        }
        pos += c;
    }
    Ok(records)
}

/// How training documents are annotated. Each document is annotated for
/// the temporal head only, the subevent head only, or both, and only for
/// pairs whose mentions are at most `window` events apart in the text
/// (`0` keeps every pair).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnotationProtocol {
    pub window: usize,
    pub temporal_only: f64,
    pub subevent_only: f64,
}

impl AnnotationProtocol {
    pub const FULL: AnnotationProtocol =
        AnnotationProtocol { window: 0, temporal_only: 0.0, subevent_only: 0.0 };
}

impl Default for AnnotationProtocol {
    fn default() -> Self {
        AnnotationProtocol { window: 2, temporal_only: 0.5, subevent_only: 0.5 }
    }
}

/// Drops gold labels of training records according to `protocol`. Dev and
/// test records keep their full graphs.
pub fn annotate_partially(records: &mut [CorpusRecord], protocol: &AnnotationProtocol, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in records.iter_mut().filter(|r| r.split == Split::Train) {
        let u: f64 = rng.gen();
        let keep_temporal = u >= protocol.subevent_only;
        let keep_subevent = u < protocol.subevent_only
            || u >= protocol.subevent_only + protocol.temporal_only;
        let n = r.gold.n_events();
        for i in 0..n {
            for j in i + 1..n {
                let far = protocol.window > 0 && j - i > protocol.window;
                if far || !keep_temporal {
                    r.gold.clear(i, j, Head::Temporal);
                }
                if far || !keep_subevent {
                    r.gold.clear(i, j, Head::Subevent);
                }
            }
        }
    }
}

/// Generator seed offset used by [`ablation_corpus`], so the document
/// stream and the split/annotation streams differ for the same seed.
pub const ABLATION_SEED_OFFSET: u64 = 100;

/// The synthetic ablation corpus for one seed: `docs` documents of 5 to 9
/// events, split 0.7/0.1/0.2 and partially annotated with the default
/// protocol.
pub fn ablation_corpus(seed: u64, docs: usize, vocab: usize) -> Result<Vec<CorpusRecord>, DataError> {
    let spec = SyntheticSpec {
        seed: seed.wrapping_add(ABLATION_SEED_OFFSET),
        docs,
        vocab_size: vocab,
        ..SyntheticSpec::default()
    };
    let mut records = split_corpus(generate_corpus(&spec)?, &[0.7, 0.1, 0.2], seed)?;
    annotate_partially(&mut records, &AnnotationProtocol::default(), seed);
    Ok(records)
}

/// Result of [`map_red_label`]. `listed` is false when the string is not
/// one of the explicitly mapped RED relations and was assigned a default.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RedMapping {
    pub subevent: Option<RelationLabel>,
    pub temporal: Option<RelationLabel>,
    pub listed: bool,
}

const RED_TEMPORAL_WORDS: [&str; 12] = [
    "BEFORE", "AFTER", "OVERLAP", "CONTAINS", "BEGINS", "ENDS", "SIMULTANEOUS", "REINITIATES",
    "CAUSES", "PRECONDITION", "INITIATES", "TERMINATES",
];

/// Maps a RED relation string to the labels of this task. Matching ignores
/// case and surrounding whitespace. Unlisted temporal or causal relations
/// map to Vague; everything else (identity, bridging, set membership and
/// so on) maps to NoRel.
pub fn map_red_label(raw: &str) -> RedMapping {
    use RelationLabel::*;
    let key = raw.trim().to_ascii_uppercase();
    let listed = |subevent, temporal| RedMapping { subevent, temporal, listed: true };
    match key.as_str() {
        "BEFORE" | "BEFORE/CAUSES" | "BEFORE/PRECONDITION" | "ENDS-ON" | "OVERLAP/PRECONDITION" => {
            listed(None, Some(Before))
        }
        "SIMULTANEOUS" => listed(None, Some(Equal)),
        "OVERLAP" | "REINITIATES" => listed(None, Some(Vague)),
        "CONTAINS" | "CONTAINS-SUBEVENT" => listed(Some(ParentChild), Some(Before)),
        "BEGINS-ON" => listed(None, Some(After)),
        _ if RED_TEMPORAL_WORDS.iter().any(|w| key.contains(w)) => {
            RedMapping { subevent: None, temporal: Some(Vague), listed: false }
        }
        _ => RedMapping { subevent: Some(NoRel), temporal: None, listed: false },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::transitive_closure;
    use RelationLabel::*;

    fn spec() -> SyntheticSpec {
        SyntheticSpec { noise: 0.2, coref: 0.2, ..SyntheticSpec::default() }
    }

    #[test]
    fn single_event_has_no_edges() {
        let (g, doc) = generate_complex(&spec(), 7, 1).unwrap();
        assert_eq!(g.label_count(), 0);
        assert_eq!(doc.events.len(), 1);
        assert_eq!(count_violations(&g).violating_triples, 0);
    }

    #[test]
    fn generated_graphs_are_consistent_and_closed() {
        for grammar in [Grammar::Explicit, Grammar::Narrative] {
            let s = SyntheticSpec { grammar, ..spec() };
            for seed in 0..200 {
                let (g, doc) = generate_complex(&s, seed, 8).unwrap();
                assert!(g.is_complete());
                assert_eq!(count_violations(&g).violating_triples, 0, "seed {seed}");
                assert_eq!(transitive_closure(&g).unwrap(), g);
                doc.validate(18).unwrap();
                assert!(doc.tokens.iter().all(|t| t.vocab_id < s.vocab_size));
                assert!(doc.events.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(generate_complex(&spec(), 3, 8), generate_complex(&spec(), 3, 8));
        let s = SyntheticSpec { docs: 5, ..spec() };
        assert_eq!(generate_corpus(&s).unwrap(), generate_corpus(&s).unwrap());
    }

    #[test]
    fn corpus_uses_every_label() {
        let records = generate_corpus(&SyntheticSpec { docs: 100, ..spec() }).unwrap();
        let mut counts = [0usize; 8];
        for r in &records {
            for (_, _, l) in r.gold.pairs() {
                l.labels().for_each(|x| counts[x.index()] += 1);
            }
        }
        assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
    }

    #[test]
    fn invalid_specs() {
        for bad in [
            SyntheticSpec { events: (5, 4), ..spec() },
            SyntheticSpec { noise: 1.5, ..spec() },
            SyntheticSpec { vocab_size: MIN_VOCAB - 1, ..spec() },
        ] {
            assert!(matches!(bad.validate(), Err(DataError::InvalidSpec(_))));
        }
    }

    #[test]
    fn split_counts() {
        let records = generate_corpus(&SyntheticSpec { docs: 100, ..spec() }).unwrap();
        let tagged = split_corpus(records.clone(), &[0.8, 0.2], 1).unwrap();
        let train = tagged.iter().filter(|r| r.split == Split::Train).count();
        assert_eq!((train, tagged.len() - train), (80, 20));
        assert_eq!(tagged, split_corpus(records.clone(), &[0.8, 0.2], 1).unwrap());
        let all = split_corpus(records.clone(), &[1.0], 9).unwrap();
        assert!(all.iter().all(|r| r.split == Split::Train));
        assert!(split_corpus(records, &[0.5, 0.4], 1).is_err());
    }

    #[test]
    fn partial_annotation_respects_protocol() {
        let records = generate_corpus(&SyntheticSpec { docs: 40, ..spec() }).unwrap();
        let mut records = split_corpus(records, &[0.5, 0.5], 2).unwrap();
        let full = records.clone();
        annotate_partially(&mut records, &AnnotationProtocol::default(), 5);
        for (r, f) in records.iter().zip(&full) {
            assert!(r.gold.is_subgraph_of(&f.gold));
            if r.split != Split::Train {
                assert_eq!(r.gold, f.gold);
                continue;
            }
            for (i, j, l) in r.gold.pairs() {
                if j - i > 2 {
                    assert!(l.is_empty());
                }
                assert!(l.temporal.is_none() || l.subevent.is_none());
            }
        }
    }

    #[test]
    fn red_table() {
        let m = |s| {
            let r = map_red_label(s);
            assert!(r.listed, "{s}");
            (r.subevent, r.temporal)
        };
        for s in ["BEFORE", "BEFORE/CAUSES", "BEFORE/PRECONDITION", "ENDS-ON", "OVERLAP/PRECONDITION"] {
            assert_eq!(m(s), (None, Some(Before)));
        }
        assert_eq!(m("SIMULTANEOUS"), (None, Some(Equal)));
        assert_eq!(m("OVERLAP"), (None, Some(Vague)));
        assert_eq!(m("REINITIATES"), (None, Some(Vague)));
        assert_eq!(m("CONTAINS"), (Some(ParentChild), Some(Before)));
        assert_eq!(m("CONTAINS-SUBEVENT"), (Some(ParentChild), Some(Before)));
        assert_eq!(m("BEGINS-ON"), (None, Some(After)));
        let other = map_red_label("OVERLAP/CAUSES");
        assert_eq!((other.temporal, other.listed), (Some(Vague), false));
        let other = map_red_label("IDENTICAL");
        assert_eq!((other.subevent, other.listed), (Some(NoRel), false));
    }
}
