//! Structural extraction rules.
//!
//! These follow directly from dependency labels and POS tags: predicate
//! location, coordination expansion, core modality, passive conversion and
//! modifier detachment. [`extract_sentence`] ties them together with the
//! heuristic and normalisation layers.

mod extract;

use std::collections::BTreeSet;

use crate::clause_table::{Modality, Refinement};
use crate::depgraph::{DependencyGraph, LabelProfile, PrepPhrase, Role, TokenId};
use crate::heuristics::{is_prohibition_marker, LexiconConfig};

pub use extract::{extract_document, extract_sentence, extract_sentence_traced, ExtractedRow, RowTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Voice {
    Active,
    Passive,
}

/// Where a modality signal came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalSource {
    CoreAux,
    ExtendedAux,
    Predicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModalitySignal {
    pub modality: Modality,
    pub source: SignalSource,
}

impl ModalitySignal {
    pub fn permission(source: SignalSource) -> Self {
        ModalitySignal { modality: Modality::P, source }
    }

    pub fn obligation(source: SignalSource) -> Self {
        ModalitySignal { modality: Modality::O, source }
    }

    pub fn prohibition(source: SignalSource) -> Self {
        ModalitySignal { modality: Modality::F, source }
    }
}

/// Prohibition beats obligation beats permission; no signal is a declaration.
pub fn resolve_modality(signals: &[ModalitySignal]) -> Modality {
    signals.iter().map(|s| s.modality).max().unwrap_or(Modality::D)
}

/// One predicate candidate: a verb (or copular predicate) with its core arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSite {
    pub verb_head: TokenId,
    pub subject_head: Option<TokenId>,
    pub object_head: Option<TokenId>,
    pub indirect_object: Option<TokenId>,
    pub voice: Voice,
    /// Non-passive auxiliaries in scope (modals, tense), own or inherited.
    pub aux_tokens: Vec<TokenId>,
    pub passive_aux_tokens: Vec<TokenId>,
    pub negation_tokens: Vec<TokenId>,
    pub negated: bool,
    pub copula: Option<TokenId>,
    pub agent: Option<PrepPhrase>,
    pub refinement_from_coordination: Refinement,
    /// Modifiers of the first conjunct that scope over this one too.
    pub shared_modifiers: Vec<TokenId>,
    /// Adverbs in modal scope; checked against prohibition markers.
    pub adverb_candidates: Vec<TokenId>,
    /// Direct dependents of `verb_head` accounted for by the predicate frame.
    pub frame_tokens: Vec<TokenId>,
    pub converted_from_passive: bool,
    /// No verbal or copular root: the sentence is kept as a note.
    pub notes_only: bool,
}

impl PredicateSite {
    fn notes_only(root: TokenId) -> Self {
        PredicateSite {
            verb_head: root,
            subject_head: None,
            object_head: None,
            indirect_object: None,
            voice: Voice::Active,
            aux_tokens: Vec::new(),
            passive_aux_tokens: Vec::new(),
            negation_tokens: Vec::new(),
            negated: false,
            copula: None,
            agent: None,
            refinement_from_coordination: Refinement::None,
            shared_modifiers: Vec::new(),
            adverb_candidates: Vec::new(),
            frame_tokens: Vec::new(),
            converted_from_passive: false,
            notes_only: true,
        }
    }

    /// Adverbs and auxiliaries in scope that the lexicon lists as prohibition markers.
    pub fn prohibition_markers(&self, g: &DependencyGraph, cfg: &LexiconConfig) -> Vec<TokenId> {
        self.adverb_candidates
            .iter()
            .copied()
            .filter(|&t| cfg.prohibition_markers.contains(&g.token(t).lower_lemma()))
            .collect()
    }

    pub(crate) fn prohibition_marker_tokens(&self, g: &DependencyGraph, cfg: &LexiconConfig, profile: &LabelProfile) -> Vec<TokenId> {
        self.adverb_candidates
            .iter()
            .copied()
            .filter(|&t| is_prohibition_marker(g.token(t), cfg, profile))
            .collect()
    }
}

fn is_predicate(g: &DependencyGraph, id: TokenId, profile: &LabelProfile) -> bool {
    let t = g.token(id);
    t.upos == "VERB"
        || t.upos == "AUX"
        || t.xpos.starts_with("VB")
        || g.first_dep(id, Role::Copula, profile).is_some()
        || g.first_dep(id, Role::Subject, profile).is_some()
        || g.first_dep(id, Role::PassiveSubject, profile).is_some()
}

fn coordinator(g: &DependencyGraph, profile: &LabelProfile, head: TokenId, prev: TokenId, conj: TokenId) -> Option<Refinement> {
    // Stanford hangs the coordinator on the first conjunct, UD on the following one.
    let between = |c: &TokenId| *c > prev && *c < conj;
    let cc = g
        .deps_of(head, Role::Coordination, profile)
        .into_iter()
        .rfind(between)
        .or_else(|| g.deps_of(conj, Role::Coordination, profile).into_iter().find(|&c| c < conj))?;
    let lemma = g.token(cc).lower_lemma();
    Some(if lemma == "or" || lemma == "and/or" { Refinement::Or } else { Refinement::And })
}

/// One refinement per conjunct of `head`. A conjunct joined by a comma takes
/// the next coordinator of the list, or the previous one when none follows.
fn conjunct_refinements(g: &DependencyGraph, profile: &LabelProfile, head: TokenId, conjs: &[TokenId]) -> Vec<Refinement> {
    let mut prev = head;
    let explicit: Vec<Option<Refinement>> = conjs
        .iter()
        .map(|&c| {
            let r = coordinator(g, profile, head, prev, c);
            prev = c;
            r
        })
        .collect();
    let mut out = vec![Refinement::And; conjs.len()];
    let mut next = explicit.iter().rev().flatten().next().copied();
    for i in (0..conjs.len()).rev() {
        if let Some(r) = explicit[i] {
            next = Some(r);
        }
        out[i] = next.unwrap_or(Refinement::And);
    }
    out
}

/// `head` followed by its conjuncts, each paired with the refinement it contributes.
fn expand_conjuncts(g: &DependencyGraph, profile: &LabelProfile, head: TokenId) -> Vec<(TokenId, Refinement)> {
    let conjs = g.deps_of(head, Role::Conjunct, profile);
    let refs = conjunct_refinements(g, profile, head, &conjs);
    std::iter::once((head, Refinement::None)).chain(conjs.into_iter().zip(refs)).collect()
}

fn leftmost(ids: Vec<TokenId>) -> Option<TokenId> {
    ids.into_iter().next()
}

fn subject_of(g: &DependencyGraph, profile: &LabelProfile, v: TokenId) -> Option<TokenId> {
    let mut subjects = g.deps_of(v, Role::Subject, profile);
    subjects.extend(g.deps_of(v, Role::PassiveSubject, profile));
    subjects.sort_unstable();
    leftmost(subjects)
}

fn verb_modifier_roots(g: &DependencyGraph, profile: &LabelProfile, v: TokenId) -> Vec<TokenId> {
    g.children(v)
        .iter()
        .copied()
        .filter(|&c| {
            let t = g.token(c);
            (profile.matches(Role::AdverbialModifier, t) && !profile.matches(Role::Negation, t))
                || profile.matches(Role::PrepositionalModifier, t)
                || profile.matches(Role::AdverbialClause, t)
        })
        .collect()
}

fn agent_of(g: &DependencyGraph, profile: &LabelProfile, v: TokenId, passive: bool) -> Option<PrepPhrase> {
    if let Some(a) = g.first_dep(v, Role::Agent, profile) {
        if let Some(pp) = profile.prep_phrase(g, a).filter(|pp| pp.object.is_some()) {
            return Some(pp);
        }
    }
    if passive {
        return profile
            .prep_phrases(g, v)
            .into_iter()
            .find(|pp| pp.preposition == "by" && pp.object.is_some());
    }
    None
}

struct Frame {
    subject: Option<TokenId>,
    aux: Vec<TokenId>,
    passive_aux: Vec<TokenId>,
    negation: Vec<TokenId>,
    copula: Option<TokenId>,
    object: Option<TokenId>,
    iobj: Option<TokenId>,
}

fn frame_of(g: &DependencyGraph, profile: &LabelProfile, v: TokenId) -> Frame {
    Frame {
        subject: subject_of(g, profile, v),
        aux: g.deps_of(v, Role::Auxiliary, profile),
        passive_aux: g.deps_of(v, Role::PassiveAuxiliary, profile),
        negation: g.deps_of(v, Role::Negation, profile),
        copula: g.first_dep(v, Role::Copula, profile),
        object: g.first_dep(v, Role::DirectObject, profile),
        iobj: g.first_dep(v, Role::IndirectObject, profile),
    }
}

/// Locates predicate candidates and expands coordination into one site per
/// combination of verb, subject and object conjuncts.
pub fn find_predicates(g: &DependencyGraph, profile: &LabelProfile) -> Vec<PredicateSite> {
    let root = g.root();
    if !is_predicate(g, root, profile) {
        return vec![PredicateSite::notes_only(root)];
    }
    let root_frame = frame_of(g, profile, root);
    let copular_root = root_frame.copula.is_some();
    let verbs: Vec<(TokenId, Refinement)> = {
        let conjs: Vec<TokenId> = g
            .deps_of(root, Role::Conjunct, profile)
            .into_iter()
            .filter(|&c| is_predicate(g, c, profile) || copular_root)
            .collect();
        let refs = conjunct_refinements(g, profile, root, &conjs);
        std::iter::once((root, Refinement::None)).chain(conjs.into_iter().zip(refs)).collect()
    };
    let last_conj_end = verbs.iter().skip(1).map(|&(c, _)| g.span(c).1).max();
    let root_mods = verb_modifier_roots(g, profile, root);
    let shared: Vec<TokenId> = match last_conj_end {
        Some(end) => root_mods
            .iter()
            .copied()
            .filter(|&m| {
                let (lo, hi) = g.span(m);
                hi < root || lo > end
            })
            .collect(),
        None => Vec::new(),
    };

    let mut sites = Vec::new();
    for (k, &(v, verb_ref)) in verbs.iter().enumerate() {
        let own = if k == 0 { &root_frame } else { &frame_of(g, profile, v) };
        let inherits = k > 0 && own.subject.is_none();
        let inherits_aux = inherits && own.aux.is_empty() && own.passive_aux.is_empty();

        let subject = own.subject.or(if inherits { root_frame.subject } else { None });
        let mut aux = own.aux.clone();
        let mut passive_aux = own.passive_aux.clone();
        let mut negation = own.negation.clone();
        let mut adverbs: Vec<TokenId> = g
            .deps_of(v, Role::AdverbialModifier, profile)
            .into_iter()
            .filter(|&a| !profile.matches(Role::Negation, g.token(a)))
            .collect();
        if inherits_aux {
            aux.extend(&root_frame.aux);
            passive_aux.extend(&root_frame.passive_aux);
            negation.extend(&root_frame.negation);
            adverbs.extend(shared.iter().copied().filter(|&m| profile.matches(Role::AdverbialModifier, g.token(m))));
        }
        let copula = own.copula.or(if inherits && copular_root { root_frame.copula } else { None });
        let passive_subject = subject.is_some_and(|s| profile.matches(Role::PassiveSubject, g.token(s)));
        let voice = if passive_subject || !passive_aux.is_empty() { Voice::Passive } else { Voice::Active };

        let object = own.object.or(match (inherits, root_frame.object, last_conj_end) {
            (true, Some(o), Some(end)) if o > end => Some(o),
            _ => None,
        });
        let agent = agent_of(g, profile, v, voice == Voice::Passive);

        let mut frame_tokens: Vec<TokenId> = Vec::new();
        frame_tokens.extend(own.subject);
        frame_tokens.extend(own.object);
        frame_tokens.extend(own.iobj);
        frame_tokens.extend(&own.aux);
        frame_tokens.extend(&own.passive_aux);
        frame_tokens.extend(&own.negation);
        frame_tokens.extend(own.copula);
        frame_tokens.extend(agent.as_ref().map(|a| a.root));
        frame_tokens.extend(g.deps_of(v, Role::Coordination, profile));
        frame_tokens.extend(g.deps_of(v, Role::Punctuation, profile));
        frame_tokens.extend(g.deps_of(v, Role::Particle, profile));
        frame_tokens.extend(g.deps_of(v, Role::ClauseMarker, profile));
        if k == 0 {
            frame_tokens.extend(verbs.iter().skip(1).map(|&(c, _)| c));
        }
        frame_tokens.sort_unstable();
        frame_tokens.dedup();

        let subjects = match subject {
            Some(s) => expand_conjuncts(g, profile, s).into_iter().map(|(t, r)| (Some(t), r)).collect(),
            None => vec![(None, Refinement::None)],
        };
        let objects = match object {
            Some(o) => expand_conjuncts(g, profile, o).into_iter().map(|(t, r)| (Some(t), r)).collect(),
            None => vec![(None, Refinement::None)],
        };
        for (si, &(s, s_ref)) in subjects.iter().enumerate() {
            for (oi, &(o, o_ref)) in objects.iter().enumerate() {
                let refinement = if oi > 0 {
                    o_ref
                } else if si > 0 {
                    s_ref
                } else {
                    verb_ref
                };
                sites.push(PredicateSite {
                    verb_head: v,
                    subject_head: s,
                    object_head: o,
                    indirect_object: own.iobj,
                    voice,
                    aux_tokens: aux.clone(),
                    passive_aux_tokens: passive_aux.clone(),
                    negated: !negation.is_empty(),
                    negation_tokens: negation.clone(),
                    copula,
                    agent: agent.clone(),
                    refinement_from_coordination: refinement,
                    shared_modifiers: if k > 0 && inherits { shared.clone() } else { Vec::new() },
                    adverb_candidates: adverbs.clone(),
                    frame_tokens: frame_tokens.clone(),
                    converted_from_passive: false,
                    notes_only: false,
                });
            }
        }
    }
    if let Some(first) = sites.first_mut() {
        first.refinement_from_coordination = Refinement::None;
    }
    sites
}

/// Core auxiliaries only: `may` permits, `must` obliges, negation prohibits.
pub fn classify_modality_core(site: &PredicateSite, g: &DependencyGraph) -> Modality {
    let mut signals = Vec::new();
    for &aux in &site.aux_tokens {
        match g.token(aux).lower_lemma().as_str() {
            "may" => signals.push(ModalitySignal::permission(SignalSource::CoreAux)),
            "must" => signals.push(ModalitySignal::obligation(SignalSource::CoreAux)),
            _ => {}
        }
    }
    if site.negated {
        signals.push(ModalitySignal::prohibition(SignalSource::CoreAux));
    }
    resolve_modality(&signals)
}

/// Turns a passive with a by-agent into the active voice. Agentless passives
/// are returned unchanged and rendered as passives.
pub fn passive_to_active(site: &PredicateSite, _g: &DependencyGraph) -> PredicateSite {
    let mut out = site.clone();
    if site.voice != Voice::Passive {
        return out;
    }
    if let Some(agent_head) = site.agent.as_ref().and_then(|a| a.object) {
        out.voice = Voice::Active;
        out.object_head = site.subject_head;
        out.subject_head = Some(agent_head);
        out.converted_from_passive = true;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModifierKind {
    Advmod,
    Pp,
    Advcl,
    RelativeClause,
    VerbalModifier,
    /// Any other dependent the rules do not interpret.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attachment {
    Verb,
    Subject,
    Object,
}

/// A detached modifier before routing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawModifier {
    pub kind: ModifierKind,
    pub attachment: Attachment,
    pub root: Option<TokenId>,
    pub tokens: BTreeSet<TokenId>,
    /// Preposition of a PP or marker of an adverbial clause, lower-cased.
    pub marker: Option<String>,
    /// Lemma of the adverb, of the PP's noun head, or of the clause head.
    pub head_lemma: Option<String>,
}

impl RawModifier {
    /// A record not tied to any graph, for routing on its own.
    pub fn detached(kind: ModifierKind, attachment: Attachment, marker: Option<&str>, head_lemma: Option<&str>) -> Self {
        RawModifier {
            kind,
            attachment,
            root: None,
            tokens: BTreeSet::new(),
            marker: marker.map(str::to_lowercase),
            head_lemma: head_lemma.map(str::to_string),
        }
    }

    fn from_graph(g: &DependencyGraph, root: TokenId, kind: ModifierKind, attachment: Attachment) -> Self {
        RawModifier {
            kind,
            attachment,
            root: Some(root),
            tokens: g.subtree(root),
            marker: None,
            head_lemma: None,
        }
    }

    fn pp(g: &DependencyGraph, pp: &PrepPhrase, attachment: Attachment) -> Self {
        let mut r = RawModifier::from_graph(g, pp.root, ModifierKind::Pp, attachment);
        r.marker = Some(pp.preposition.clone());
        r.head_lemma = pp.object.map(|o| g.token(o).lower_lemma());
        r
    }

    pub(crate) fn other(g: &DependencyGraph, root: TokenId, attachment: Attachment) -> Self {
        RawModifier::from_graph(g, root, ModifierKind::Other, attachment)
    }

    fn start(&self) -> TokenId {
        self.tokens.first().copied().or(self.root).unwrap_or(0)
    }
}

/// Result of splitting a noun phrase into its concise core and detached modifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpDetachment {
    pub core: BTreeSet<TokenId>,
    pub detached: Vec<RawModifier>,
}

/// Separates relative clauses, verbal modifiers and prepositional modifiers
/// from a subject or object head.
pub fn detach_np_modifiers(np_head: TokenId, attachment: Attachment, g: &DependencyGraph, profile: &LabelProfile) -> NpDetachment {
    let mut detached = Vec::new();
    for &c in g.children(np_head) {
        let t = g.token(c);
        if profile.matches(Role::RelativeClause, t) {
            detached.push(RawModifier::from_graph(g, c, ModifierKind::RelativeClause, attachment));
        } else if profile.matches(Role::VerbalModifier, t) {
            detached.push(RawModifier::from_graph(g, c, ModifierKind::VerbalModifier, attachment));
        } else if profile.matches(Role::PrepositionalModifier, t) {
            if let Some(pp) = profile.prep_phrase(g, c) {
                detached.push(RawModifier::pp(g, &pp, attachment));
            }
        }
    }
    let mut excluded: BTreeSet<TokenId> = detached.iter().filter_map(|d| d.root).collect();
    excluded.extend(g.deps_of(np_head, Role::Conjunct, profile));
    excluded.extend(g.deps_of(np_head, Role::Coordination, profile));
    let core = g.yield_ids(np_head, &excluded).into_iter().collect();
    NpDetachment { core, detached }
}

/// Adverbs, PPs and adverbial clauses of the verb (plus shared modifiers of
/// the first conjunct), in surface order. The by-agent is not a modifier.
pub fn detach_verb_modifiers(site: &PredicateSite, g: &DependencyGraph, profile: &LabelProfile) -> Vec<RawModifier> {
    if site.notes_only {
        return Vec::new();
    }
    let agent_root = site.agent.as_ref().map(|a| a.root);
    let mut roots = verb_modifier_roots(g, profile, site.verb_head);
    roots.extend(&site.shared_modifiers);
    let mut out: Vec<RawModifier> = roots
        .into_iter()
        .filter(|&r| Some(r) != agent_root)
        .filter_map(|r| {
            let t = g.token(r);
            if profile.matches(Role::AdverbialClause, t) {
                let mut m = RawModifier::from_graph(g, r, ModifierKind::Advcl, Attachment::Verb);
                let mut markers = g.deps_of(r, Role::ClauseMarker, profile);
                if markers.is_empty() {
                    // "when" and friends are often parsed as a clause-initial adverb
                    let first = g.span(r).0;
                    markers.extend(
                        g.deps_of(r, Role::AdverbialModifier, profile)
                            .into_iter()
                            .filter(|&a| a == first),
                    );
                }
                if !markers.is_empty() {
                    m.marker = Some(
                        markers
                            .iter()
                            .map(|&k| g.token(k).lower_lemma())
                            .collect::<Vec<_>>()
                            .join(" "),
                    );
                }
                m.head_lemma = Some(t.lower_lemma());
                Some(m)
            } else if profile.matches(Role::PrepositionalModifier, t) {
                profile.prep_phrase(g, r).map(|pp| RawModifier::pp(g, &pp, Attachment::Verb))
            } else {
                let mut m = RawModifier::from_graph(g, r, ModifierKind::Advmod, Attachment::Verb);
                m.head_lemma = Some(t.lower_lemma());
                Some(m)
            }
        })
        .collect();
    out.sort_by_key(RawModifier::start);
    out
}
