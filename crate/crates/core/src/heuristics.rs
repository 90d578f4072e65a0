//! Lexicon-driven refinements on top of the structural rules.
//!
//! Everything here is controlled by a [`LexiconConfig`]. The empty config
//! ([`LexiconConfig::rules_only`]) switches every heuristic off, leaving the
//! pure rule-based extraction.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause_table::{Anchor, Modality};
use crate::depgraph::{DependencyGraph, LabelProfile, PrepPhrase, Role, Token, TokenId};
use crate::rules::{resolve_modality, Attachment, ModalitySignal, ModifierKind, PredicateSite, RawModifier, SignalSource};

type WordSet = BTreeSet<String>;

fn words(list: &[&str]) -> WordSet {
    list.iter().map(|w| w.to_string()).collect()
}

/// Keyword lists and switches for the heuristic layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconConfig {
    pub permission_aux: WordSet,
    pub obligation_aux: WordSet,
    pub prohibition_markers: WordSet,
    pub obligation_predicates: WordSet,
    pub permission_predicates: WordSet,
    pub prohibition_predicates: WordSet,
    pub temporal_prepositions: WordSet,
    pub ambiguous_prepositions: WordSet,
    pub temporal_nouns: WordSet,
    pub temporal_markers: WordSet,
    pub condition_markers: WordSet,
    pub temporal_adverbs: WordSet,
    pub irrelevant_adverbs: WordSet,
    pub anaphora_map: BTreeMap<String, String>,
    /// Numeric-attribute conditions and the prepositional-object fallback.
    pub structural_heuristics: bool,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            permission_aux: words(&["may", "can"]),
            obligation_aux: words(&["must", "shall", "will"]),
            prohibition_markers: words(&["never"]),
            obligation_predicates: words(&["responsible", "require"]),
            permission_predicates: WordSet::new(),
            prohibition_predicates: WordSet::new(),
            temporal_prepositions: words(&["after", "before", "during", "until"]),
            ambiguous_prepositions: words(&["in", "within", "for", "at", "on", "over"]),
            temporal_nouns: words(&["day", "week", "month", "year", "hour", "date"]),
            temporal_markers: words(&["while", "when", "whenever", "until", "before", "after"]),
            condition_markers: words(&["if"]),
            temporal_adverbs: words(&["always", "immediately", "before", "after"]),
            irrelevant_adverbs: words(&["very", "however", "also", "furthermore", "moreover", "additionally"]),
            anaphora_map: [
                ("we", "<we>"),
                ("our", "<we>"),
                ("ours", "<we>"),
                ("us", "<we>"),
                ("you", "<user>"),
                ("your", "<user>"),
                ("yours", "<user>"),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
            structural_heuristics: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("`{0}` is listed as both a permission and an obligation auxiliary")]
    AuxOverlap(String),
    #[error("anaphora tag `{tag}` for `{pronoun}` must be wrapped in angle brackets")]
    UnbracketedTag { pronoun: String, tag: String },
}

impl LexiconConfig {
    /// All lists empty and structural heuristics off.
    pub fn rules_only() -> Self {
        LexiconConfig {
            permission_aux: WordSet::new(),
            obligation_aux: WordSet::new(),
            prohibition_markers: WordSet::new(),
            obligation_predicates: WordSet::new(),
            permission_predicates: WordSet::new(),
            prohibition_predicates: WordSet::new(),
            temporal_prepositions: WordSet::new(),
            ambiguous_prepositions: WordSet::new(),
            temporal_nouns: WordSet::new(),
            temporal_markers: WordSet::new(),
            condition_markers: WordSet::new(),
            temporal_adverbs: WordSet::new(),
            irrelevant_adverbs: WordSet::new(),
            anaphora_map: BTreeMap::new(),
            structural_heuristics: false,
        }
    }

    pub fn is_rules_only(&self) -> bool {
        *self == LexiconConfig::rules_only()
    }

    /// Parses a lexicon document. Omitted keys keep their shipped defaults;
    /// the empty document `{}` selects rules-only mode.
    pub fn from_json(bytes: &[u8]) -> Result<Self, LexiconError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)?;
        let cfg = match &value {
            serde_json::Value::Object(map) if map.is_empty() => LexiconConfig::rules_only(),
            _ => serde_json::from_value(value)?,
        };
        cfg.validate()?;
        Ok(cfg.lowercased())
    }

    pub fn validate(&self) -> Result<(), LexiconError> {
        if let Some(w) = self.permission_aux.intersection(&self.obligation_aux).next() {
            return Err(LexiconError::AuxOverlap(w.clone()));
        }
        for (pronoun, tag) in &self.anaphora_map {
            if !(tag.len() > 2 && tag.starts_with('<') && tag.ends_with('>')) {
                return Err(LexiconError::UnbracketedTag { pronoun: pronoun.clone(), tag: tag.clone() });
            }
        }
        Ok(())
    }

    fn lowercased(mut self) -> Self {
        for set in [
            &mut self.permission_aux,
            &mut self.obligation_aux,
            &mut self.prohibition_markers,
            &mut self.obligation_predicates,
            &mut self.permission_predicates,
            &mut self.prohibition_predicates,
            &mut self.temporal_prepositions,
            &mut self.ambiguous_prepositions,
            &mut self.temporal_nouns,
            &mut self.temporal_markers,
            &mut self.condition_markers,
            &mut self.temporal_adverbs,
            &mut self.irrelevant_adverbs,
        ] {
            *set = set.iter().map(|w| w.to_lowercase()).collect();
        }
        self.anaphora_map = self.anaphora_map.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect();
        self
    }

    fn has(set: &WordSet, word: &str) -> bool {
        set.contains(&word.to_lowercase())
    }
}

/// Where a modifier phrase ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Destination {
    Time,
    Adverbials,
    Conditions,
    Notes,
    /// Promoted to the Object field by the prepositional-object fallback.
    Object,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Route {
    pub destination: Destination,
    pub anchor: Anchor,
}

impl Route {
    fn to(destination: Destination, anchor: Anchor) -> Self {
        Route { destination, anchor }
    }
}

/// Extended auxiliary lists, prohibition markers and predicate lemmas.
/// Never lowers `base`: precedence is F > O > P > D over all signals.
pub fn refine_modality(base: Modality, site: &PredicateSite, g: &DependencyGraph, cfg: &LexiconConfig) -> Modality {
    let mut signals = Vec::new();
    for &aux in &site.aux_tokens {
        let lemma = g.token(aux).lower_lemma();
        if LexiconConfig::has(&cfg.permission_aux, &lemma) {
            signals.push(ModalitySignal::permission(SignalSource::ExtendedAux));
        }
        if LexiconConfig::has(&cfg.obligation_aux, &lemma) {
            signals.push(ModalitySignal::obligation(SignalSource::ExtendedAux));
        }
        if LexiconConfig::has(&cfg.prohibition_markers, &lemma) {
            signals.push(ModalitySignal::prohibition(SignalSource::ExtendedAux));
        }
    }
    if !site.prohibition_markers(g, cfg).is_empty() {
        signals.push(ModalitySignal::prohibition(SignalSource::ExtendedAux));
    }
    if site.negated {
        signals.push(ModalitySignal::prohibition(SignalSource::CoreAux));
    }
    if !site.notes_only {
        let lemma = g.token(site.verb_head).lower_lemma();
        if LexiconConfig::has(&cfg.obligation_predicates, &lemma) {
            signals.push(ModalitySignal::obligation(SignalSource::Predicate));
        }
        if LexiconConfig::has(&cfg.permission_predicates, &lemma) {
            signals.push(ModalitySignal::permission(SignalSource::Predicate));
        }
        if LexiconConfig::has(&cfg.prohibition_predicates, &lemma) {
            signals.push(ModalitySignal::prohibition(SignalSource::Predicate));
        }
    }
    base.max(resolve_modality(&signals))
}

fn pp_is_temporal(preposition: &str, head_lemma: Option<&str>, cfg: &LexiconConfig) -> bool {
    LexiconConfig::has(&cfg.temporal_prepositions, preposition)
        || (LexiconConfig::has(&cfg.ambiguous_prepositions, preposition)
            && head_lemma.is_some_and(|h| LexiconConfig::has(&cfg.temporal_nouns, h)))
}

/// Routes a prepositional modifier of the verb or of the object.
///
/// Temporal PPs go to Time anchored on the verb, including object-attached
/// ones (PP-attachment repair). Otherwise verb PPs are Adverbials and object
/// PPs stay object Notes.
pub fn route_pp(record: &RawModifier, cfg: &LexiconConfig) -> Route {
    let prep = record.marker.as_deref().unwrap_or("");
    if pp_is_temporal(prep, record.head_lemma.as_deref(), cfg) {
        return Route::to(Destination::Time, Anchor::V);
    }
    match record.attachment {
        Attachment::Verb => Route::to(Destination::Adverbials, Anchor::V),
        Attachment::Object => Route::to(Destination::Notes, Anchor::O),
        Attachment::Subject => Route::to(Destination::Notes, Anchor::S),
    }
}

/// Adverbial clauses by their marker: temporal, conditional, or plain adverbial.
pub fn route_advcl(record: &RawModifier, cfg: &LexiconConfig) -> Route {
    let marker = record.marker.as_deref().unwrap_or("");
    if LexiconConfig::has(&cfg.temporal_markers, marker) {
        Route::to(Destination::Time, Anchor::V)
    } else if LexiconConfig::has(&cfg.condition_markers, marker) {
        Route::to(Destination::Conditions, Anchor::V)
    } else {
        Route::to(Destination::Adverbials, Anchor::V)
    }
}

/// Simple adverbs: temporal ones to Time, emphasis and gluing words dropped.
pub fn filter_adverb(record: &RawModifier, cfg: &LexiconConfig) -> Route {
    let lemma = record.head_lemma.as_deref().unwrap_or("");
    if LexiconConfig::has(&cfg.temporal_adverbs, lemma) {
        Route::to(Destination::Time, Anchor::V)
    } else if LexiconConfig::has(&cfg.irrelevant_adverbs, lemma) {
        Route::to(Destination::Drop, Anchor::V)
    } else {
        Route::to(Destination::Adverbials, Anchor::V)
    }
}

/// Total routing over every kind of raw modifier.
pub fn route(record: &RawModifier, cfg: &LexiconConfig) -> Route {
    let anchor = match record.attachment {
        Attachment::Verb => Anchor::V,
        Attachment::Subject => Anchor::S,
        Attachment::Object => Anchor::O,
    };
    match record.kind {
        ModifierKind::Advmod => filter_adverb(record, cfg),
        ModifierKind::Pp => route_pp(record, cfg),
        ModifierKind::Advcl => route_advcl(record, cfg),
        ModifierKind::RelativeClause | ModifierKind::VerbalModifier | ModifierKind::Other => {
            Route::to(Destination::Notes, anchor)
        }
    }
}

/// A cardinal-number dependent of a subject or object head, split off as a condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericCondition {
    pub root: TokenId,
    pub tokens: BTreeSet<TokenId>,
    pub text: String,
}

pub fn numeric_condition(np_head: TokenId, g: &DependencyGraph) -> Option<NumericCondition> {
    let num = g.children(np_head).iter().copied().find(|&c| g.token(c).is_numeric())?;
    let tokens = g.subtree(num);
    let text = crate::depgraph::detokenize(tokens.iter().map(|&t| g.token(t).form.as_str()));
    Some(NumericCondition { root: num, tokens, text })
}

/// With no direct object (and no by-agent), the leftmost PP of the verb
/// becomes a prepositional object.
pub fn prepositional_object_fallback(site: &PredicateSite, g: &DependencyGraph, profile: &LabelProfile) -> Option<PrepPhrase> {
    if site.notes_only || site.object_head.is_some() || site.agent.is_some() {
        return None;
    }
    profile
        .prep_phrases(g, site.verb_head)
        .into_iter()
        .find(|pp| pp.object.is_some())
}

/// Canonical tag for a pronoun, or its lemma when the map has no entry.
pub fn resolve_anaphora(token: &Token, cfg: &LexiconConfig) -> String {
    let form = token.form.to_lowercase();
    if let Some(tag) = cfg.anaphora_map.get(&form) {
        return tag.clone();
    }
    if let Some(tag) = cfg.anaphora_map.get(&token.lower_lemma()) {
        return tag.clone();
    }
    token.lemma_or_form().to_string()
}

/// Whether [`resolve_anaphora`] would rewrite this token.
pub fn is_mapped_pronoun(token: &Token, cfg: &LexiconConfig) -> bool {
    cfg.anaphora_map.contains_key(&token.form.to_lowercase()) || cfg.anaphora_map.contains_key(&token.lower_lemma())
}

pub(crate) fn is_prohibition_marker(token: &Token, cfg: &LexiconConfig, profile: &LabelProfile) -> bool {
    LexiconConfig::has(&cfg.prohibition_markers, &token.lower_lemma())
        && (profile.matches(Role::AdverbialModifier, token) || profile.matches(Role::Auxiliary, token))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(prep: &str, head: &str, attachment: Attachment) -> RawModifier {
        RawModifier::detached(ModifierKind::Pp, attachment, Some(prep), Some(head))
    }

    #[test]
    fn temporal_preposition_goes_to_time() {
        let r = route_pp(&pp("during", "term", Attachment::Verb), &LexiconConfig::default());
        assert_eq!(r, Route::to(Destination::Time, Anchor::V));
    }

    #[test]
    fn plain_verb_pp_is_adverbial() {
        let r = route_pp(&pp("in", "jurisdiction", Attachment::Verb), &LexiconConfig::default());
        assert_eq!(r, Route::to(Destination::Adverbials, Anchor::V));
    }

    #[test]
    fn misattached_temporal_pp_is_repaired() {
        let cfg = LexiconConfig::default();
        let r = route_pp(&pp("within", "day", Attachment::Object), &cfg);
        assert_eq!(r, Route::to(Destination::Time, Anchor::V));
        let r = route_pp(&pp("on", "Facebook", Attachment::Object), &cfg);
        assert_eq!(r, Route::to(Destination::Notes, Anchor::O));
    }

    #[test]
    fn advcl_markers() {
        let cfg = LexiconConfig::default();
        let rec = |m: &str| RawModifier::detached(ModifierKind::Advcl, Attachment::Verb, Some(m), None);
        assert_eq!(route_advcl(&rec("if"), &cfg).destination, Destination::Conditions);
        assert_eq!(route_advcl(&rec("when"), &cfg).destination, Destination::Time);
        assert_eq!(route_advcl(&rec("because"), &cfg).destination, Destination::Adverbials);
    }

    #[test]
    fn adverb_filter() {
        let cfg = LexiconConfig::default();
        let rec = |w: &str| RawModifier::detached(ModifierKind::Advmod, Attachment::Verb, None, Some(w));
        assert_eq!(filter_adverb(&rec("immediately"), &cfg).destination, Destination::Time);
        assert_eq!(filter_adverb(&rec("however"), &cfg).destination, Destination::Drop);
        assert_eq!(filter_adverb(&rec("publicly"), &cfg).destination, Destination::Adverbials);
    }

    #[test]
    fn anaphora_resolution() {
        let cfg = LexiconConfig::default();
        assert_eq!(resolve_anaphora(&Token::new(1, "us", "we", "PRON", 0, "root"), &cfg), "<we>");
        assert_eq!(resolve_anaphora(&Token::new(1, "You", "you", "PRON", 0, "root"), &cfg), "<user>");
        assert_eq!(resolve_anaphora(&Token::new(1, "it", "it", "PRON", 0, "root"), &cfg), "it");
        let once = resolve_anaphora(&Token::new(1, "our", "we", "PRON", 0, "root"), &cfg);
        let twice = resolve_anaphora(&Token::new(1, &once, &once, "PRON", 0, "root"), &cfg);
        assert_eq!(once, twice);
    }

    #[test]
    fn lexicon_documents() {
        assert!(LexiconConfig::from_json(b"{}").unwrap().is_rules_only());
        let partial = LexiconConfig::from_json(br#"{"condition_markers": ["If", "unless"]}"#).unwrap();
        assert!(partial.condition_markers.contains("unless"));
        assert!(partial.condition_markers.contains("if"));
        assert_eq!(partial.obligation_aux, LexiconConfig::default().obligation_aux);
        assert!(matches!(
            LexiconConfig::from_json(br#"{"permission_aux": ["must"]}"#),
            Err(LexiconError::AuxOverlap(_))
        ));
        assert!(matches!(
            LexiconConfig::from_json(br#"{"anaphora_map": {"we": "WE"}}"#),
            Err(LexiconError::UnbracketedTag { .. })
        ));
        assert!(LexiconConfig::from_json(br#"{"no_such_list": []}"#).is_err());
    }

    #[test]
    fn shipped_defaults_are_consistent() {
        let cfg = LexiconConfig::default();
        cfg.validate().unwrap();
        for w in ["may", "can"] {
            assert!(cfg.permission_aux.contains(w));
        }
        for w in ["must", "shall", "will"] {
            assert!(cfg.obligation_aux.contains(w));
        }
        for w in ["day", "week", "month"] {
            assert!(cfg.temporal_nouns.contains(w));
        }
    }
}
