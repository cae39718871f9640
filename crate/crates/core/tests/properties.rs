use evrel_core::data::{generate_complex, map_red_label, split_corpus, generate_corpus, Split, SyntheticSpec};
use evrel_core::harness::{evaluate_subevent, evaluate_temprel, greedy_graph};
use evrel_core::inference::{global_decode, greedy_decode, DecodingProblem};
use evrel_core::losses::{
    annotation_loss, conjunction_loss, symmetry_loss, ConjunctionPenalty, ConjunctionRules,
    ConstraintScope, LabelWeights, PairScores, RuleKind, RuleTerm,
};
use evrel_core::model::{init_params, pair_features, score_document, CellType, Dims, Document, Token};
use evrel_core::relations::{
    count_violations, implied_temprel, induce, transitive_closure, Head, RelationGraph, RelationLabel,
};
use proptest::prelude::*;

fn head_dist() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.01f64..1.0).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.map(|x| x / s)
    })
}

fn pair_scores() -> impl Strategy<Value = PairScores> {
    (head_dist(), head_dist()).prop_map(|(temporal, subevent)| PairScores { temporal, subevent })
}

fn label() -> impl Strategy<Value = RelationLabel> {
    (0usize..8).prop_map(|i| RelationLabel::from_index(i).unwrap())
}

/// A sparse random graph: each canonical pair gets each head with
/// probability one half.
fn sparse_graph(max_n: usize) -> impl Strategy<Value = RelationGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec((prop::option::of(0usize..4), prop::option::of(0usize..4)), pairs)
            .prop_map(move |slots| {
                let mut g = RelationGraph::new(n);
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        let (t, s) = slots[k];
                        if let Some(t) = t {
                            g.set(i, j, RelationLabel::TEMPORAL[t]);
                        }
                        if let Some(s) = s {
                            g.set(i, j, RelationLabel::SUBEVENT[s]);
                        }
                        k += 1;
                    }
                }
                g
            })
    })
}

fn problem(max_n: usize) -> impl Strategy<Value = DecodingProblem> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(pair_scores(), n * (n - 1))
            .prop_map(move |s| DecodingProblem::new(n, s).unwrap())
    })
}

/// Every non-NR subevent label carries its implied temporal label.
fn coherent(g: &RelationGraph) -> bool {
    g.pairs().all(|(_, _, l)| match (l.subevent, l.temporal) {
        (Some(s), Some(t)) => implied_temprel(s).is_none_or(|x| x == t),
        _ => true,
    })
}

#[test]
fn inverse_is_an_involution_on_every_label() {
    for l in RelationLabel::ALL {
        assert_eq!(l.inverse().inverse(), l);
    }
}

#[test]
fn table_cells_are_self_consistent() {
    for a in RelationLabel::ALL {
        for b in RelationLabel::ALL {
            let e = induce(a, b);
            assert!(e.required.intersection(e.forbidden).is_empty());
            for h in Head::ALL {
                assert!(e.required.iter().filter(|l| l.head() == h).count() <= 1);
            }
            let m = induce(b.inverse(), a.inverse());
            for r in e.required.iter() {
                assert!(!m.forbidden.contains(r.inverse()), "{a} {b} requires {r}");
            }
            for r in m.required.iter() {
                assert!(!e.forbidden.contains(r.inverse()), "mirror of {a} {b} requires {r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_is_idempotent_monotone_and_consistent(g in sparse_graph(7)) {
        if let Ok(c) = transitive_closure(&g) {
            prop_assert!(g.is_subgraph_of(&c));
            prop_assert_eq!(transitive_closure(&c).unwrap(), c.clone());
            prop_assert_eq!(count_violations(&c).violating_triples, 0);
        }
    }

    #[test]
    fn losses_are_non_negative(
        a in pair_scores(), b in pair_scores(), c in pair_scores(), l in label(),
    ) {
        let w = LabelWeights::default();
        prop_assert!(annotation_loss(&[a], &[l], &w).unwrap() >= 0.0);
        prop_assert!(symmetry_loss(&a, &b) >= 0.0);
        let rules = ConjunctionRules::from_table(ConstraintScope::ALL);
        for penalty in [ConjunctionPenalty::Absolute, ConjunctionPenalty::Hinge] {
            prop_assert!(conjunction_loss(&[(a, b, c)], &rules, penalty).unwrap() >= 0.0);
        }
    }

    #[test]
    fn symmetry_vanishes_exactly_on_mirrored_scores(a in pair_scores(), b in pair_scores()) {
        prop_assert_eq!(symmetry_loss(&a, &a.mirrored()), 0.0);
        if b != a.mirrored() {
            prop_assert!(symmetry_loss(&a, &b) > 0.0);
        }
    }

    #[test]
    fn conjunction_term_vanishes_on_the_product(
        alpha in label(), beta in label(), pa in 0.05f64..0.95, pb in 0.05f64..0.95,
    ) {
        let Some(gamma) = induce(alpha, beta).required.iter().next() else { return Ok(()) };
        let put = |l: RelationLabel, p: f64| {
            let mut s = PairScores::uniform();
            let rest = (1.0 - p) / 3.0;
            for x in l.head().labels() {
                let v = if x == l { p } else { rest };
                match l.head() {
                    Head::Temporal => s.temporal[x.head_index()] = v,
                    Head::Subevent => s.subevent[x.head_index()] = v,
                }
            }
            s
        };
        let rule = ConjunctionRules::single(RuleTerm { alpha, beta, consequent: gamma, kind: RuleKind::Required });
        let triple = (put(alpha, pa), put(beta, pb), put(gamma, pa * pb));
        let l = conjunction_loss(&[triple], &rule, ConjunctionPenalty::Absolute).unwrap();
        prop_assert!(l < 1e-9, "{l}");
    }

    #[test]
    fn weight_scaling_scales_only_the_annotation_term(
        scores in prop::collection::vec(pair_scores(), 1..6), c in 0.01f64..100.0, seed in 0usize..8,
    ) {
        let gold: Vec<RelationLabel> =
            (0..scores.len()).map(|k| RelationLabel::from_index((k + seed) % 8).unwrap()).collect();
        let w = LabelWeights([0.5, 1.0, 2.0, 1.5, 0.7, 3.0, 1.1, 0.9]);
        let base = annotation_loss(&scores, &gold, &w).unwrap();
        let scaled = annotation_loss(&scores, &gold, &w.scaled(c)).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-12 * (c * base).max(1.0));
    }

    #[test]
    fn global_decode_is_consistent_and_beats_consistent_greedy(p in problem(6)) {
        let (g, stats) = global_decode(&p, 12).unwrap();
        prop_assert_eq!(count_violations(&g).violating_triples, 0);
        prop_assert_eq!(stats.violations, 0);
        prop_assert!(g.is_complete());
        let greedy = greedy_graph(&p);
        if count_violations(&greedy).violating_triples == 0 && coherent(&greedy) {
            let go = p.objective(&greedy).unwrap();
            prop_assert!(stats.objective >= go - 1e-9 * (1.0 + go.abs()));
        }
    }

    #[test]
    fn greedy_ignores_positive_rescaling(s in pair_scores(), c in 0.01f64..100.0) {
        for head in Head::ALL {
            let mut r = s;
            let h = match head {
                Head::Temporal => &mut r.temporal,
                Head::Subevent => &mut r.subevent,
            };
            let z: f64 = h.iter().map(|x| x * c).sum();
            *h = h.map(|x| x * c / z);
            prop_assert_eq!(greedy_decode(&r, head), greedy_decode(&s, head));
        }
    }

    #[test]
    fn generated_gold_closes_without_violations(seed in any::<u64>(), n in 1usize..12, noise in 0.0f64..0.5) {
        let spec = SyntheticSpec { noise, coref: 0.2, ..SyntheticSpec::default() };
        let (g, doc) = generate_complex(&spec, seed, n).unwrap();
        prop_assert_eq!(doc.events.len(), n);
        let c = transitive_closure(&g).unwrap();
        prop_assert_eq!(count_violations(&c).violating_triples, 0);
    }

    #[test]
    fn split_is_a_partition(docs in 1usize..40, seed in any::<u64>(), a in 0.0f64..1.0) {
        let spec = SyntheticSpec { docs, events: (2, 3), ..SyntheticSpec::default() };
        let records = generate_corpus(&spec).unwrap();
        let ids: Vec<String> = records.iter().map(|r| r.document.id.clone()).collect();
        let rest = 1.0 - a;
        let split = split_corpus(records, &[a, rest / 2.0, rest / 2.0], seed).unwrap();
        prop_assert_eq!(split.iter().map(|r| r.document.id.clone()).collect::<Vec<_>>(), ids);
        let total: usize = Split::ALL.iter().map(|s| split.iter().filter(|r| r.split == *s).count()).sum();
        prop_assert_eq!(total, docs);
    }

    #[test]
    fn red_mapping_is_total_and_deterministic(raw in ".{0,24}") {
        let m = map_red_label(&raw);
        prop_assert_eq!(m, map_red_label(&raw));
        prop_assert!(m.temporal.is_some() || m.subevent.is_some());
    }

    #[test]
    fn evaluation_ignores_document_order(gs in prop::collection::vec(sparse_graph(5), 1..5), shift in 0usize..4) {
        let gold: Vec<RelationGraph> = gs.into_iter().filter_map(|g| transitive_closure(&g).ok()).collect();
        prop_assume!(!gold.is_empty());
        let pred: Vec<RelationGraph> = gold
            .iter()
            .map(|g| {
                let n = g.n_events();
                let mut p = RelationGraph::new(n);
                for i in 0..n {
                    for j in i + 1..n {
                        p.set(i, j, RelationLabel::TEMPORAL[(i + j + shift) % 4]);
                        p.set(i, j, RelationLabel::SUBEVENT[(i * j + shift) % 4]);
                    }
                }
                p
            })
            .collect();
        let k = shift % gold.len();
        let rot = |v: &[RelationGraph]| {
            let mut v = v.to_vec();
            v.rotate_left(k);
            v
        };
        let t = evaluate_temprel(&pred, &gold).unwrap();
        prop_assert_eq!(evaluate_temprel(&rot(&pred), &rot(&gold)).unwrap(), t);
        prop_assert_eq!(evaluate_subevent(&rot(&pred), &rot(&gold)).unwrap(), evaluate_subevent(&pred, &gold).unwrap());
        let hm = if t.precision + t.recall > 0.0 {
            2.0 * t.precision * t.recall / (t.precision + t.recall)
        } else {
            0.0
        };
        prop_assert_eq!(t.f1, hm);
    }

    #[test]
    fn pair_features_are_direction_sensitive(
        h1 in prop::collection::vec(-1.0f64..1.0, 3), h2 in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        prop_assume!(h1 != h2);
        prop_assert_ne!(pair_features(&h1, &h2).unwrap(), pair_features(&h2, &h1).unwrap());
    }

    #[test]
    fn scoring_is_deterministic(ids in prop::collection::vec(0usize..12, 2..7), seed in 0u64..100) {
        let dims = Dims { vocab: 12, d_tok: 3, d_h: 2, cell: CellType::Lstm, ..Dims::default() };
        let params = init_params(seed, dims);
        let doc = Document {
            id: "p".into(),
            tokens: ids.iter().map(|&v| Token { text: format!("w{v}"), vocab_id: v, pos: v % 18 }).collect(),
            events: vec![0, ids.len() - 1],
        };
        let a = score_document(&doc, &params, 1e-12).unwrap();
        prop_assert_eq!(a, score_document(&doc, &params, 1e-12).unwrap());
    }
}
