use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{
    classify_modality_core, detach_np_modifiers, detach_verb_modifiers, find_predicates, passive_to_active, Attachment,
    PredicateSite, RawModifier,
};
use crate::clause_table::{AnnotatedPhrase, Anchor, ClauseRow, ClauseTable, Modality};
use crate::depgraph::{DependencyGraph, LabelProfile, TokenId};
use crate::heuristics::{numeric_condition, prepositional_object_fallback, refine_modality, route, Destination, LexiconConfig};
use crate::normalize::{RenderStyle, Renderer};

/// Which tokens fed each field of a row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowTrace {
    pub subject: BTreeSet<TokenId>,
    pub verb: BTreeSet<TokenId>,
    pub object: BTreeSet<TokenId>,
    pub phrases: Vec<(Destination, BTreeSet<TokenId>)>,
}

impl RowTrace {
    /// Every field's token set, in a fixed order.
    pub fn fields(&self) -> impl Iterator<Item = &BTreeSet<TokenId>> {
        [&self.subject, &self.verb, &self.object]
            .into_iter()
            .chain(self.phrases.iter().map(|(_, t)| t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedRow {
    pub row: ClauseRow,
    pub trace: RowTrace,
}

struct Builder<'a> {
    g: &'a DependencyGraph,
    cfg: &'a LexiconConfig,
    profile: &'a LabelProfile,
    render: Renderer<'a>,
    row: ClauseRow,
    trace: RowTrace,
}

impl<'a> Builder<'a> {
    fn place(&mut self, record: &RawModifier) {
        let r = route(record, self.cfg);
        if r.destination == Destination::Drop {
            return;
        }
        let Some(phrase) = self.render.render_modifier(record, r.anchor, self.g) else {
            return;
        };
        self.push(r.destination, phrase, record.tokens.clone());
    }

    fn push(&mut self, destination: Destination, phrase: AnnotatedPhrase, tokens: BTreeSet<TokenId>) {
        let list = match destination {
            Destination::Time => &mut self.row.time,
            Destination::Adverbials => &mut self.row.adverbials,
            Destination::Conditions => &mut self.row.conditions,
            Destination::Notes | Destination::Object => &mut self.row.notes,
            Destination::Drop => return,
        };
        list.push(phrase);
        self.trace.phrases.push((destination, tokens));
    }

    /// Renders a subject or object, detaching its modifiers and numeric conditions.
    fn noun_phrase(&mut self, head: TokenId, attachment: Attachment, extra_excluded: &BTreeSet<TokenId>) -> (String, BTreeSet<TokenId>) {
        let anchor = if attachment == Attachment::Subject { Anchor::S } else { Anchor::O };
        let det = detach_np_modifiers(head, attachment, self.g, self.profile);
        let mut excluded = extra_excluded.clone();
        for rec in &det.detached {
            excluded.extend(rec.root);
            self.place(rec);
        }
        if self.cfg.structural_heuristics {
            if let Some(nc) = numeric_condition(head, self.g) {
                excluded.insert(nc.root);
                self.push(Destination::Conditions, AnnotatedPhrase::new(anchor, nc.text), nc.tokens);
            }
        }
        let np = self.render.render_np(head, self.g, &excluded);
        (np.text, np.tokens)
    }
}

fn extract_site(site: &PredicateSite, g: &DependencyGraph, cfg: &LexiconConfig, profile: &LabelProfile, style: RenderStyle) -> ExtractedRow {
    let mut b = Builder {
        g,
        cfg,
        profile,
        render: Renderer::new(cfg, profile, style),
        row: ClauseRow {
            sent_id: g.sent_id().to_string(),
            refinement: site.refinement_from_coordination,
            ..Default::default()
        },
        trace: RowTrace::default(),
    };
    if site.notes_only {
        b.row.modality = Modality::D;
        let all: BTreeSet<TokenId> = g.tokens().iter().map(|t| t.id).collect();
        b.push(Destination::Notes, AnnotatedPhrase::new(Anchor::V, g.text()), all);
        return ExtractedRow { row: b.row, trace: b.trace };
    }

    let site = passive_to_active(site, g);
    b.row.modality = refine_modality(classify_modality_core(&site, g), &site, g, cfg);

    let mut object = site.object_head;
    let mut iobj_as_object = false;
    if object.is_none() && site.indirect_object.is_some() {
        object = site.indirect_object;
        iobj_as_object = true;
    }
    let promoted = if object.is_none() && cfg.structural_heuristics {
        prepositional_object_fallback(&site, g, profile)
    } else {
        None
    };
    if let Some(pp) = &promoted {
        object = pp.object;
    }

    b.row.verb = b
        .render
        .render_verb(&site, promoted.as_ref().map(|p| p.preposition.as_str()), iobj_as_object, g);
    b.trace.verb.insert(site.verb_head);
    b.trace.verb.extend(g.deps_of(site.verb_head, crate::depgraph::Role::Particle, profile));
    if let Some(pp) = &promoted {
        b.trace.verb.extend(&pp.marker_tokens);
    }

    let markers: BTreeSet<TokenId> = site.prohibition_marker_tokens(g, cfg, profile).into_iter().collect();
    let records: Vec<RawModifier> = detach_verb_modifiers(&site, g, profile)
        .into_iter()
        .filter(|r| r.root.is_none_or(|root| !markers.contains(&root)))
        .filter(|r| promoted.as_ref().is_none_or(|pp| r.root != Some(pp.root)))
        .collect();
    let mut consumed: BTreeSet<TokenId> = site.frame_tokens.iter().copied().collect();
    consumed.extend(records.iter().filter_map(|r| r.root));
    consumed.extend(&markers);
    consumed.extend(promoted.as_ref().map(|p| p.root));

    if let Some(s) = site.subject_head {
        let (text, tokens) = b.noun_phrase(s, Attachment::Subject, &BTreeSet::new());
        b.row.subject = text;
        b.trace.subject = tokens;
    }
    for rec in &records {
        b.place(rec);
    }
    if let Some(o) = object {
        let excluded: BTreeSet<TokenId> = promoted.iter().flat_map(|p| p.marker_tokens.iter().copied()).collect();
        let (text, tokens) = b.noun_phrase(o, Attachment::Object, &excluded);
        b.row.object = text;
        b.trace.object = tokens;
    }
    if let (Some(io), false) = (site.indirect_object, iobj_as_object) {
        let rec = RawModifier::other(g, io, Attachment::Verb);
        if let Some(mut phrase) = b.render.render_modifier(&rec, Anchor::V, g) {
            phrase.text = format!("to {}", phrase.text);
            b.push(Destination::Notes, phrase, rec.tokens.clone());
        }
    }
    for &c in g.children(site.verb_head) {
        if consumed.contains(&c) {
            continue;
        }
        b.place(&RawModifier::other(g, c, Attachment::Verb));
    }
    ExtractedRow { row: b.row, trace: b.trace }
}

/// Rows for one sentence with per-field token provenance.
pub fn extract_sentence_traced(g: &DependencyGraph, cfg: &LexiconConfig, profile: &LabelProfile, style: RenderStyle) -> Vec<ExtractedRow> {
    find_predicates(g, profile)
        .iter()
        .map(|site| extract_site(site, g, cfg, profile, style))
        .collect()
}

pub fn extract_sentence(g: &DependencyGraph, cfg: &LexiconConfig, profile: &LabelProfile, style: RenderStyle) -> Vec<ClauseRow> {
    extract_sentence_traced(g, cfg, profile, style)
        .into_iter()
        .map(|r| r.row)
        .collect()
}

/// Extracts every sentence in parallel; rows keep document order.
pub fn extract_document(
    doc_id: &str,
    graphs: &[DependencyGraph],
    cfg: &LexiconConfig,
    profile: &LabelProfile,
    style: RenderStyle,
) -> ClauseTable {
    let rows: Vec<Vec<ClauseRow>> = graphs
        .par_iter()
        .map(|g| extract_sentence(g, cfg, profile, style))
        .collect();
    ClauseTable::new(doc_id, rows.into_iter().flatten().collect())
}
