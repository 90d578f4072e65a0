//! Rendering of core fields and modifier phrases.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::clause_table::{is_article, AnnotatedPhrase, Anchor};
use crate::depgraph::{detokenize, DependencyGraph, LabelProfile, PpShape, Role, TokenId};
use crate::heuristics::{is_mapped_pronoun, resolve_anaphora, LexiconConfig};
use crate::rules::{PredicateSite, RawModifier, Voice};

/// How canonical pronoun tags are spelled in the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderStyle {
    /// Tags verbatim: `<user>`, `<we>`.
    #[default]
    Canonical,
    /// Tags as names: `User`, `We`.
    Display,
}

impl FromStr for RenderStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(RenderStyle::Canonical),
            "display" => Ok(RenderStyle::Display),
            other => Err(format!("unknown style `{other}` (expected canonical or display)")),
        }
    }
}

/// Spells a tag in the given style. Words that are not tags pass through.
pub fn display_tag(tag: &str, style: RenderStyle) -> String {
    match (style, tag.strip_prefix('<').and_then(|t| t.strip_suffix('>'))) {
        (RenderStyle::Display, Some(inner)) if !inner.is_empty() => {
            let mut chars = inner.chars();
            let first = chars.next().map(|c| c.to_uppercase().collect::<String>()).unwrap_or_default();
            first + chars.as_str()
        }
        _ => tag.to_string(),
    }
}

fn possessive(tag: String) -> String {
    tag + "'s"
}

/// A rendered noun phrase and the tokens it used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedNp {
    pub text: String,
    pub tokens: BTreeSet<TokenId>,
}

/// Bundles what the renderers need besides the graph.
#[derive(Debug, Clone, Copy)]
pub struct Renderer<'a> {
    pub cfg: &'a LexiconConfig,
    pub profile: &'a LabelProfile,
    pub style: RenderStyle,
}

impl<'a> Renderer<'a> {
    pub fn new(cfg: &'a LexiconConfig, profile: &'a LabelProfile, style: RenderStyle) -> Self {
        Renderer { cfg, profile, style }
    }

    fn tag(&self, g: &DependencyGraph, id: TokenId) -> String {
        display_tag(&resolve_anaphora(g.token(id), self.cfg), self.style)
    }

    fn surface(&self, g: &DependencyGraph, id: TokenId) -> String {
        let t = g.token(id);
        if is_mapped_pronoun(t, self.cfg) {
            let tag = self.tag(g, id);
            if self.profile.matches(Role::Possessive, t) {
                possessive(tag)
            } else {
                tag
            }
        } else {
            t.form.clone()
        }
    }

    /// Concise noun phrase: head lemma with its remaining modifiers, articles
    /// and determiners dropped, pronouns resolved, and a pronoun or proper-noun
    /// possessor moved behind as `Y of X`.
    pub fn render_np(&self, head: TokenId, g: &DependencyGraph, excluded: &BTreeSet<TokenId>) -> RenderedNp {
        let p = self.profile;
        let mut excl = excluded.clone();
        excl.extend(g.deps_of(head, Role::Conjunct, p));
        excl.extend(g.deps_of(head, Role::Coordination, p));
        if p.pp_shape() == PpShape::CaseMarked {
            excl.extend(g.deps_of(head, Role::Case, p));
        }
        excl.extend(
            g.deps_of(head, Role::Determiner, p)
                .into_iter()
                .filter(|&d| g.token(d).lower_lemma() != "no"),
        );
        let mut suffix: Option<(String, BTreeSet<TokenId>)> = None;
        if let Some(poss) = g.first_dep(head, Role::Possessive, p) {
            let t = g.token(poss);
            if t.is_pronoun() || is_mapped_pronoun(t, self.cfg) {
                excl.insert(poss);
                suffix = Some((self.tag(g, poss), g.subtree(poss)));
            } else if t.upos == "PROPN" || t.xpos.starts_with("NNP") {
                excl.insert(poss);
                let mut inner_excl: BTreeSet<TokenId> = g.deps_of(poss, Role::PossessiveMarker, p).into_iter().collect();
                inner_excl.extend(excluded);
                let ids: Vec<TokenId> = g
                    .yield_ids(poss, &inner_excl)
                    .into_iter()
                    .filter(|&i| !is_article(&g.token(i).form))
                    .collect();
                let text = detokenize(ids.iter().map(|&i| g.token(i).form.as_str()));
                suffix = Some((text, g.subtree(poss).difference(excluded).copied().collect()));
            }
        }
        let mut ids: Vec<TokenId> = g
            .yield_ids(head, &excl)
            .into_iter()
            .filter(|&i| i == head || !is_article(&g.token(i).form))
            .collect();
        trim_edges(g, &mut ids, head);
        let words: Vec<String> = ids
            .iter()
            .map(|&i| {
                let t = g.token(i);
                if i == head {
                    if t.is_pronoun() || is_mapped_pronoun(t, self.cfg) {
                        self.tag(g, i)
                    } else {
                        t.lemma_or_form().to_string()
                    }
                } else {
                    self.surface(g, i)
                }
            })
            .collect();
        let mut text = detokenize(words.iter().map(String::as_str));
        let mut tokens: BTreeSet<TokenId> = ids.into_iter().collect();
        if let Some((s, toks)) = suffix {
            if !s.is_empty() {
                text = format!("{text} of {s}");
            }
            tokens.extend(toks);
        }
        RenderedNp { text, tokens }
    }

    /// Verb field: lemma with particle and folded preposition; `[is] form` for
    /// agentless passives and `[is] predicate` for copular clauses.
    pub fn render_verb(&self, site: &PredicateSite, folded: Option<&str>, iobj_as_object: bool, g: &DependencyGraph) -> String {
        if site.notes_only {
            return String::new();
        }
        let head = g.token(site.verb_head);
        let passive = site.voice == Voice::Passive && !site.converted_from_passive;
        let mut out = if site.copula.is_some() {
            format!("[is] {}", head.lemma_or_form())
        } else if passive {
            format!("[is] {}", head.form.to_lowercase())
        } else {
            head.lemma_or_form().to_lowercase()
        };
        for prt in g.deps_of(site.verb_head, Role::Particle, self.profile) {
            out.push(' ');
            out.push_str(&g.token(prt).form.to_lowercase());
        }
        match folded {
            Some("to") if passive => out.push_str(" [to]"),
            Some(prep) => {
                out.push(' ');
                out.push_str(prep);
            }
            None if iobj_as_object => out.push_str(" [to]"),
            None => {}
        }
        out
    }

    /// Surface text of a modifier with pronouns resolved. Articles are kept.
    pub fn render_modifier(&self, record: &RawModifier, anchor: Anchor, g: &DependencyGraph) -> Option<AnnotatedPhrase> {
        let mut ids: Vec<TokenId> = record.tokens.iter().copied().collect();
        let root = record.root.unwrap_or(0);
        while let Some(&first) = ids.first() {
            let t = g.token(first);
            let coordinator = t.head == root && self.profile.matches(Role::Coordination, t);
            if t.is_punct() || coordinator {
                ids.remove(0);
            } else {
                break;
            }
        }
        while ids.last().is_some_and(|&l| g.token(l).is_punct()) {
            ids.pop();
        }
        if ids.is_empty() {
            return None;
        }
        let words: Vec<String> = ids.iter().map(|&i| self.surface(g, i)).collect();
        Some(AnnotatedPhrase::new(anchor, detokenize(words.iter().map(String::as_str))))
    }
}

fn trim_edges(g: &DependencyGraph, ids: &mut Vec<TokenId>, keep: TokenId) {
    while ids.first().is_some_and(|&f| f != keep && g.token(f).is_punct()) {
        ids.remove(0);
    }
    while ids.last().is_some_and(|&l| l != keep && g.token(l).is_punct()) {
        ids.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::Token;

    fn g(tokens: &[(&str, &str, &str, TokenId, &str)]) -> DependencyGraph {
        let toks = tokens
            .iter()
            .enumerate()
            .map(|(i, &(f, l, u, h, r))| Token::new(i + 1, f, l, u, h, r))
            .collect();
        DependencyGraph::new("t", "", toks).unwrap()
    }

    #[test]
    fn tags_in_display_style() {
        assert_eq!(display_tag("<user>", RenderStyle::Display), "User");
        assert_eq!(display_tag("<user>", RenderStyle::Canonical), "<user>");
        assert_eq!(display_tag("fee", RenderStyle::Display), "fee");
    }

    #[test]
    fn np_drops_articles_and_lemmatises_head() {
        let graph = g(&[("the", "the", "DET", 3, "det"), ("late", "late", "ADJ", 3, "amod"), ("fees", "fee", "NOUN", 0, "root")]);
        let cfg = LexiconConfig::default();
        let p = LabelProfile::stanford_classic();
        let r = Renderer::new(&cfg, &p, RenderStyle::Canonical);
        let np = r.render_np(3, &graph, &BTreeSet::new());
        assert_eq!(np.text, "late fee");
        assert_eq!(np.tokens, BTreeSet::from([2, 3]));
    }

    #[test]
    fn pronoun_possessor_moves_behind() {
        let graph = g(&[("your", "you", "PRON", 2, "poss"), ("account", "account", "NOUN", 0, "root")]);
        let cfg = LexiconConfig::default();
        let p = LabelProfile::stanford_classic();
        let np = Renderer::new(&cfg, &p, RenderStyle::Display).render_np(2, &graph, &BTreeSet::new());
        assert_eq!(np.text, "account of User");
        let np = Renderer::new(&cfg, &p, RenderStyle::Canonical).render_np(2, &graph, &BTreeSet::new());
        assert_eq!(np.text, "account of <user>");
    }

    #[test]
    fn common_noun_possessor_stays_in_place() {
        let graph = g(&[
            ("the", "the", "DET", 2, "det"),
            ("renter", "renter", "NOUN", 4, "poss"),
            ("'s", "'s", "PART", 2, "possessive"),
            ("risk", "risk", "NOUN", 0, "root"),
        ]);
        let cfg = LexiconConfig::default();
        let p = LabelProfile::stanford_classic();
        let np = Renderer::new(&cfg, &p, RenderStyle::Canonical).render_np(4, &graph, &BTreeSet::new());
        assert_eq!(np.text, "renter's risk");
    }
}
