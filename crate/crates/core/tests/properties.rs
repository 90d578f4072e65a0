use proptest::prelude::*;

use normex_core::clause_table::{self, AnnotatedPhrase, Anchor, ClauseRow, ClauseTable, Format, Modality, Refinement};
use normex_core::codiagram::build_model;
use normex_core::depgraph::{parse_conllu, to_conllu, DependencyGraph, LabelProfile, Token};
use normex_core::evaluate::score;
use normex_core::heuristics::{resolve_anaphora, route, Destination, LexiconConfig};
use normex_core::normalize::RenderStyle;
use normex_core::rules::{extract_sentence, resolve_modality, Attachment, ModalitySignal, ModifierKind, RawModifier, SignalSource};

const NOUNS: [&str; 5] = ["virus", "code", "spam", "file", "image"];
const VERBS: [&str; 5] = ["copy", "share", "sell", "rent", "modify"];

fn tree(order: Vec<usize>, picks: Vec<usize>, forms: Vec<String>) -> DependencyGraph {
    let n = order.len();
    let mut heads = vec![0; n];
    for k in 1..n {
        heads[order[k]] = order[picks[k] % k] + 1;
    }
    let tokens = (0..n)
        .map(|i| Token::new(i + 1, &forms[i], &forms[i].to_lowercase(), "X", heads[i], if heads[i] == 0 { "root" } else { "dep" }))
        .collect();
    DependencyGraph::new("g", "", tokens).unwrap()
}

fn arb_tree() -> impl Strategy<Value = DependencyGraph> {
    (1usize..12).prop_flat_map(|n| {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(0usize..64, n),
            proptest::collection::vec("[A-Za-z0-9'.,-]{1,8}", n),
        )
            .prop_map(|(o, p, f)| tree(o, p, f))
    })
}

struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    fn push(&mut self, form: &str, upos: &str, head: usize, rel: &str) -> usize {
        let id = self.tokens.len() + 1;
        self.tokens.push(Token::new(id, form, form, upos, head, rel));
        id
    }

    fn fix_head(&mut self, id: usize, head: usize) {
        self.tokens[id - 1].head = head;
    }
}

/// "You must not V1 , V2 ... or Vn O1 , O2 ... or Om ."
fn coordinated(verbs: usize, objects: usize, coord: &str, ud: bool) -> DependencyGraph {
    let mut s = Sentence { tokens: Vec::new() };
    let subj = s.push("You", "PRON", 0, "nsubj");
    let aux = s.push("must", "AUX", 0, "aux");
    let neg = s.push("not", "PART", 0, if ud { "advmod" } else { "neg" });
    let coordinate = |s: &mut Sentence, words: &[&str], upos: &str, first_rel: &str| -> Vec<usize> {
        let mut ids = Vec::new();
        for (k, w) in words.iter().enumerate() {
            if k > 0 {
                let last = k + 1 == words.len();
                let sep = if last { coord } else { "," };
                let rel = if last { "cc" } else { "punct" };
                s.push(sep, if last { "CCONJ" } else { "PUNCT" }, 0, rel);
            }
            ids.push(s.push(w, upos, 0, if k == 0 { first_rel } else { "conj" }));
        }
        let first = ids[0];
        for (idx, t) in s.tokens.clone().iter().enumerate() {
            let id = idx + 1;
            if id <= first || id > *ids.last().unwrap() {
                continue;
            }
            if t.deprel == "conj" {
                s.fix_head(id, first);
            } else if t.deprel == "cc" || t.deprel == "punct" {
                let next = ids.iter().copied().find(|&c| c > id).unwrap();
                s.fix_head(id, if ud { next } else { first });
            }
        }
        ids
    };
    let vs = coordinate(&mut s, &VERBS[..verbs], "VERB", "root");
    let os = coordinate(&mut s, &NOUNS[..objects], "NOUN", if ud { "obj" } else { "dobj" });
    let head = vs[0];
    s.fix_head(os[0], head);
    for id in [subj, aux, neg] {
        s.fix_head(id, head);
    }
    s.push(".", "PUNCT", head, "punct");
    DependencyGraph::new("c", "", s.tokens).unwrap()
}

fn arb_word() -> impl Strategy<Value = String> {
    "([b-z]{4,7})( [b-z]{4,7}){0,2}|"
}

fn arb_phrase() -> impl Strategy<Value = AnnotatedPhrase> {
    (prop_oneof![Just(Anchor::S), Just(Anchor::V), Just(Anchor::O)], "[A-Za-z][A-Za-z0-9 ,'|\\\\\"<>]{0,14}[a-z]")
        .prop_map(|(a, t)| AnnotatedPhrase::new(a, t))
}

fn arb_modality() -> impl Strategy<Value = Modality> {
    prop_oneof![Just(Modality::D), Just(Modality::P), Just(Modality::O), Just(Modality::F)]
}

fn arb_group() -> impl Strategy<Value = Vec<ClauseRow>> {
    let row = (
        arb_modality(),
        arb_word(),
        arb_word(),
        arb_word(),
        proptest::collection::vec(arb_phrase(), 0..3),
        proptest::collection::vec(arb_phrase(), 0..3),
        proptest::collection::vec(arb_phrase(), 0..2),
        proptest::collection::vec(arb_phrase(), 0..3),
        prop_oneof![Just(Refinement::And), Just(Refinement::Or), Just(Refinement::Seq)],
    )
        .prop_map(|(modality, subject, verb, object, time, adverbials, conditions, notes, refinement)| ClauseRow {
            sent_id: String::new(),
            refinement,
            modality,
            subject,
            verb,
            object,
            time,
            adverbials,
            conditions,
            notes,
        });
    proptest::collection::vec(row, 1..4)
}

fn arb_table() -> impl Strategy<Value = ClauseTable> {
    ("[a-z0-9_-]{0,8}", proptest::collection::vec(arb_group(), 0..5)).prop_map(|(doc, groups)| {
        let mut rows = Vec::new();
        for (s, group) in groups.into_iter().enumerate() {
            for (k, mut r) in group.into_iter().enumerate() {
                r.sent_id = format!("s{s}");
                if k == 0 {
                    r.refinement = Refinement::None;
                }
                rows.push(r);
            }
        }
        ClauseTable::new(doc, rows)
    })
}

fn arb_record() -> impl Strategy<Value = RawModifier> {
    (
        prop_oneof![
            Just(ModifierKind::Advmod),
            Just(ModifierKind::Pp),
            Just(ModifierKind::Advcl),
            Just(ModifierKind::RelativeClause),
            Just(ModifierKind::VerbalModifier),
            Just(ModifierKind::Other),
        ],
        prop_oneof![Just(Attachment::Verb), Just(Attachment::Subject), Just(Attachment::Object)],
        proptest::option::of("[a-z]{2,6}"),
        proptest::option::of("[a-z]{2,6}"),
    )
        .prop_map(|(k, a, m, h)| RawModifier::detached(k, a, m.as_deref(), h.as_deref()))
}

fn arb_lexicon() -> impl Strategy<Value = LexiconConfig> {
    let set = || proptest::collection::btree_set("[a-z]{2,6}", 0..6);
    (set(), set(), set(), set(), set(), set(), set()).prop_map(|(tp, ap, tn, tm, cm, ta, ia)| LexiconConfig {
        temporal_prepositions: tp,
        ambiguous_prepositions: ap,
        temporal_nouns: tn,
        temporal_markers: tm,
        condition_markers: cm,
        temporal_adverbs: ta,
        irrelevant_adverbs: ia,
        ..LexiconConfig::default()
    })
}

proptest! {
    #[test]
    fn conllu_round_trip(g in arb_tree()) {
        let text = to_conllu(std::slice::from_ref(&g));
        let back = parse_conllu(text.as_bytes()).unwrap();
        prop_assert_eq!(back, vec![g]);
    }

    #[test]
    fn subtree_and_yield_agree(g in arb_tree()) {
        let root = g.root();
        prop_assert_eq!(g.subtree(root).len(), g.len());
        let none = Default::default();
        prop_assert_eq!(g.yield_ids(root, &none), (1..=g.len()).collect::<Vec<_>>());
    }

    #[test]
    fn coordination_expands_to_all_pairs(verbs in 1usize..=5, objects in 1usize..=5, or in any::<bool>(), ud in any::<bool>()) {
        let coord = if or { "or" } else { "and" };
        let profile = if ud { LabelProfile::ud() } else { LabelProfile::stanford_classic() };
        let g = coordinated(verbs, objects, coord, ud);
        let rows = extract_sentence(&g, &LexiconConfig::default(), &profile, RenderStyle::Canonical);
        prop_assert_eq!(rows.len(), verbs * objects);
        let op = if or { Refinement::Or } else { Refinement::And };
        for (k, r) in rows.iter().enumerate() {
            prop_assert_eq!(r.refinement, if k == 0 { Refinement::None } else { op });
            prop_assert_eq!(r.modality, Modality::F);
            prop_assert_eq!(r.subject.as_str(), "<user>");
            prop_assert_eq!(r.verb.as_str(), VERBS[k / objects]);
            prop_assert_eq!(r.object.as_str(), NOUNS[k % objects]);
        }
        let table = ClauseTable::new("c", rows);
        prop_assert!(table.validate().is_ok());
        prop_assert_eq!(build_model(&table).unwrap().leaf_count(), verbs * objects);
    }

    #[test]
    fn routing_is_total_and_rules_only_keeps_everything(record in arb_record(), cfg in arb_lexicon()) {
        let r = route(&record, &cfg);
        if record.kind != ModifierKind::Advmod {
            prop_assert_ne!(r.destination, Destination::Drop);
        }
        prop_assert_ne!(r.destination, Destination::Object);
        let plain = route(&record, &LexiconConfig::rules_only());
        prop_assert_ne!(plain.destination, Destination::Drop);
        if record.attachment == Attachment::Verb {
            prop_assert_eq!(plain.destination, match record.kind {
                ModifierKind::Advmod | ModifierKind::Pp | ModifierKind::Advcl => Destination::Adverbials,
                _ => Destination::Notes,
            });
        }
    }

    #[test]
    fn adding_a_temporal_preposition_only_moves_to_time(record in arb_record(), cfg in arb_lexicon(), extra in "[a-z]{2,6}") {
        let before = route(&record, &cfg);
        let mut wider = cfg.clone();
        wider.temporal_prepositions.insert(extra.clone());
        let after = route(&record, &wider);
        prop_assert!(after == before || after.destination == Destination::Time);
        if record.kind == ModifierKind::Pp && record.marker.as_deref() == Some(extra.as_str()) {
            prop_assert_eq!(after.destination, Destination::Time);
        }
    }

    #[test]
    fn table_round_trip(t in arb_table()) {
        prop_assert!(t.validate().is_ok());
        for f in [Format::Csv, Format::Json] {
            let bytes = clause_table::serialize(&t, f);
            let back = clause_table::deserialize(&bytes, f).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(clause_table::serialize(&back, f), bytes);
        }
    }

    #[test]
    fn scoring_a_table_against_itself(t in arb_table()) {
        let report = score(&t, &t).unwrap();
        let c = report.counts;
        prop_assert_eq!(c.matched_fields, c.gold_fields);
        prop_assert_eq!(c.matched_fields, c.predicted_fields);
        if c.gold_fields > 0 {
            prop_assert_eq!(report.aggregate.f1, 1.0);
        }
    }

    #[test]
    fn scores_stay_in_range_and_swap(a in arb_table(), b in arb_table()) {
        let ab = score(&a, &b).unwrap();
        let ba = score(&b, &a).unwrap();
        for s in [ab.aggregate, ba.aggregate] {
            prop_assert!((0.0..=1.0).contains(&s.precision));
            prop_assert!((0.0..=1.0).contains(&s.recall));
            prop_assert!((0.0..=1.0).contains(&s.f1));
        }
        prop_assert_eq!(ab.counts.predicted_fields, ba.counts.gold_fields);
        prop_assert!(ab.counts.matched_fields <= ab.counts.predicted_fields.min(ab.counts.gold_fields));
    }

    #[test]
    fn corrupting_a_field_never_helps(a in arb_table(), masks in proptest::collection::vec(0u8..16, 16), pick in 0usize..64, field in 0usize..3) {
        prop_assume!(!a.rows.is_empty());
        let mut b = a.clone();
        for (r, m) in b.rows.iter_mut().zip(masks) {
            for (bit, slot) in [&mut r.subject, &mut r.verb, &mut r.object].into_iter().enumerate() {
                if m & (1 << bit) != 0 {
                    slot.push_str(" gold");
                }
            }
            if m & 8 != 0 {
                r.modality = Modality::D;
            }
        }
        let before = score(&a, &b).unwrap();
        let mut worse = a.clone();
        let r = &mut worse.rows[pick % a.rows.len()];
        let slot = [&mut r.subject, &mut r.verb, &mut r.object].into_iter().nth(field).unwrap();
        prop_assume!(!slot.is_empty());
        slot.push('#');
        let after = score(&worse, &b).unwrap();
        prop_assert!(after.aggregate.precision <= before.aggregate.precision);
        prop_assert!(after.aggregate.recall <= before.aggregate.recall);
    }

    #[test]
    fn codiagram_has_one_leaf_per_row(t in arb_table()) {
        let m = build_model(&t).unwrap();
        prop_assert_eq!(m.leaf_count(), t.rows.len());
        prop_assert_eq!(m.roots.len(), t.sentence_groups().len());
    }

    #[test]
    fn anaphora_resolution_is_idempotent(form in "[A-Za-z]{1,6}|[Yy]ou|[Ww]e|[Oo]ur|your") {
        let cfg = LexiconConfig::default();
        let once = resolve_anaphora(&Token::new(1, &form, &form.to_lowercase(), "PRON", 0, "root"), &cfg);
        let twice = resolve_anaphora(&Token::new(1, &once, &once, "PRON", 0, "root"), &cfg);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn modality_precedence_over_every_signal_set() {
    let all = [Modality::D, Modality::P, Modality::O, Modality::F];
    for mask in 0u8..16 {
        let signals: Vec<ModalitySignal> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &m)| ModalitySignal { modality: m, source: SignalSource::CoreAux })
            .collect();
        let expected = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &m)| m).max().unwrap_or(Modality::D);
        assert_eq!(resolve_modality(&signals), expected, "mask {mask:04b}");
    }
}
