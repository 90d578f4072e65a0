use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{DependencyGraph, Token, TokenId};

/// Abstract grammatical relation addressed by the extraction rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Subject,
    PassiveSubject,
    DirectObject,
    IndirectObject,
    Auxiliary,
    PassiveAuxiliary,
    Negation,
    RelativeClause,
    VerbalModifier,
    PrepositionalModifier,
    AdverbialModifier,
    AdverbialClause,
    ClauseMarker,
    Coordination,
    Conjunct,
    Agent,
    Copula,
    /// Link between a preposition and its nominal. Points from preposition to
    /// noun in preposition-headed schemes and from noun to preposition in
    /// case-marked ones; see [`PpShape`].
    Case,
    Possessive,
    PossessiveMarker,
    Determiner,
    Multiword,
    Particle,
    Punctuation,
}

impl Role {
    pub const ALL: [Role; 24] = [
        Role::Subject,
        Role::PassiveSubject,
        Role::DirectObject,
        Role::IndirectObject,
        Role::Auxiliary,
        Role::PassiveAuxiliary,
        Role::Negation,
        Role::RelativeClause,
        Role::VerbalModifier,
        Role::PrepositionalModifier,
        Role::AdverbialModifier,
        Role::AdverbialClause,
        Role::ClauseMarker,
        Role::Coordination,
        Role::Conjunct,
        Role::Agent,
        Role::Copula,
        Role::Case,
        Role::Possessive,
        Role::PossessiveMarker,
        Role::Determiner,
        Role::Multiword,
        Role::Particle,
        Role::Punctuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Subject => "SUBJECT",
            Role::PassiveSubject => "PASSIVE_SUBJECT",
            Role::DirectObject => "DIRECT_OBJECT",
            Role::IndirectObject => "INDIRECT_OBJECT",
            Role::Auxiliary => "AUXILIARY",
            Role::PassiveAuxiliary => "PASSIVE_AUXILIARY",
            Role::Negation => "NEGATION",
            Role::RelativeClause => "RELATIVE_CLAUSE",
            Role::VerbalModifier => "VERBAL_MODIFIER",
            Role::PrepositionalModifier => "PREPOSITIONAL_MODIFIER",
            Role::AdverbialModifier => "ADVERBIAL_MODIFIER",
            Role::AdverbialClause => "ADVERBIAL_CLAUSE",
            Role::ClauseMarker => "CLAUSE_MARKER",
            Role::Coordination => "COORDINATION",
            Role::Conjunct => "CONJUNCT",
            Role::Agent => "AGENT",
            Role::Copula => "COPULA",
            Role::Case => "CASE",
            Role::Possessive => "POSSESSIVE",
            Role::PossessiveMarker => "POSSESSIVE_MARKER",
            Role::Determiner => "DETERMINER",
            Role::Multiword => "MULTIWORD",
            Role::Particle => "PARTICLE",
            Role::Punctuation => "PUNCTUATION",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .iter()
            .copied()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ProfileError::UnknownRole(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("unknown relation role `{0}`")]
    UnknownRole(String),
    #[error("profile `{profile}` maps role {role} to no labels")]
    EmptyRole { profile: String, role: Role },
    #[error("unknown label profile `{0}` (expected `stanford-classic` or `ud`)")]
    UnknownProfile(String),
}

/// Concrete labels realising one role, optionally restricted to some lemmas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoleLabels {
    pub labels: BTreeSet<String>,
    pub lemmas: Option<BTreeSet<String>>,
}

impl RoleLabels {
    pub fn of(labels: &[&str]) -> Self {
        RoleLabels {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            lemmas: None,
        }
    }

    pub fn with_lemmas(mut self, lemmas: &[&str]) -> Self {
        self.lemmas = Some(lemmas.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn matches(&self, token: &Token) -> bool {
        if !self.labels.contains(token.deprel.as_str()) {
            return false;
        }
        match &self.lemmas {
            Some(lemmas) => lemmas.contains(&token.lower_lemma()),
            None => true,
        }
    }
}

/// How prepositional phrases hang in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpShape {
    /// The preposition heads the phrase (`prep` → `pobj`).
    PrepositionHeaded,
    /// The nominal heads the phrase and carries a `case` dependent.
    CaseMarked,
}

/// Mapping from abstract roles to the labels of one annotation scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelProfile {
    name: String,
    pp_shape: PpShape,
    mapping: BTreeMap<Role, RoleLabels>,
}

impl LabelProfile {
    pub fn new(name: impl Into<String>, pp_shape: PpShape, mapping: BTreeMap<Role, RoleLabels>) -> Result<Self, ProfileError> {
        let name = name.into();
        for role in Role::ALL {
            if mapping.get(&role).is_none_or(|l| l.labels.is_empty()) {
                return Err(ProfileError::EmptyRole { profile: name, role });
            }
        }
        Ok(LabelProfile { name, pp_shape, mapping })
    }

    /// Classic Stanford typed dependencies.
    pub fn stanford_classic() -> Self {
        use Role::*;
        let mapping = BTreeMap::from([
            (Subject, RoleLabels::of(&["nsubj"])),
            (PassiveSubject, RoleLabels::of(&["nsubjpass"])),
            (DirectObject, RoleLabels::of(&["dobj"])),
            (IndirectObject, RoleLabels::of(&["iobj"])),
            (Auxiliary, RoleLabels::of(&["aux"])),
            (PassiveAuxiliary, RoleLabels::of(&["auxpass"])),
            (Negation, RoleLabels::of(&["neg"])),
            (RelativeClause, RoleLabels::of(&["rcmod"])),
            (VerbalModifier, RoleLabels::of(&["vmod", "partmod", "infmod"])),
            (PrepositionalModifier, RoleLabels::of(&["prep"])),
            (AdverbialModifier, RoleLabels::of(&["advmod"])),
            (AdverbialClause, RoleLabels::of(&["advcl"])),
            (ClauseMarker, RoleLabels::of(&["mark"])),
            (Coordination, RoleLabels::of(&["cc"])),
            (Conjunct, RoleLabels::of(&["conj"])),
            (Agent, RoleLabels::of(&["agent"])),
            (Copula, RoleLabels::of(&["cop"])),
            (Case, RoleLabels::of(&["pobj", "pcomp"])),
            (Possessive, RoleLabels::of(&["poss"])),
            (PossessiveMarker, RoleLabels::of(&["possessive"])),
            (Determiner, RoleLabels::of(&["det", "predet"])),
            (Multiword, RoleLabels::of(&["mwe"])),
            (Particle, RoleLabels::of(&["prt"])),
            (Punctuation, RoleLabels::of(&["punct"])),
        ]);
        LabelProfile::new("stanford-classic", PpShape::PrepositionHeaded, mapping).expect("shipped profile is complete")
    }

    /// Universal Dependencies (v2 English labels).
    pub fn ud() -> Self {
        use Role::*;
        let mapping = BTreeMap::from([
            (Subject, RoleLabels::of(&["nsubj"])),
            (PassiveSubject, RoleLabels::of(&["nsubj:pass"])),
            (DirectObject, RoleLabels::of(&["obj"])),
            (IndirectObject, RoleLabels::of(&["iobj"])),
            (Auxiliary, RoleLabels::of(&["aux"])),
            (PassiveAuxiliary, RoleLabels::of(&["aux:pass"])),
            (Negation, RoleLabels::of(&["advmod"]).with_lemmas(&["not", "n't"])),
            (RelativeClause, RoleLabels::of(&["acl:relcl"])),
            (VerbalModifier, RoleLabels::of(&["acl"])),
            (PrepositionalModifier, RoleLabels::of(&["obl", "nmod"])),
            (AdverbialModifier, RoleLabels::of(&["advmod"])),
            (AdverbialClause, RoleLabels::of(&["advcl"])),
            (ClauseMarker, RoleLabels::of(&["mark"])),
            (Coordination, RoleLabels::of(&["cc"])),
            (Conjunct, RoleLabels::of(&["conj"])),
            (Agent, RoleLabels::of(&["obl:agent"])),
            (Copula, RoleLabels::of(&["cop"])),
            (Case, RoleLabels::of(&["case"])),
            (Possessive, RoleLabels::of(&["nmod:poss"])),
            (PossessiveMarker, RoleLabels::of(&["case"]).with_lemmas(&["'s", "'"])),
            (Determiner, RoleLabels::of(&["det", "det:predet"])),
            (Multiword, RoleLabels::of(&["fixed"])),
            (Particle, RoleLabels::of(&["compound:prt"])),
            (Punctuation, RoleLabels::of(&["punct"])),
        ]);
        LabelProfile::new("ud", PpShape::CaseMarked, mapping).expect("shipped profile is complete")
    }

    pub fn by_name(name: &str) -> Result<Self, ProfileError> {
        match name {
            "stanford-classic" | "stanford" | "sd" => Ok(LabelProfile::stanford_classic()),
            "ud" | "universal" => Ok(LabelProfile::ud()),
            other => Err(ProfileError::UnknownProfile(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pp_shape(&self) -> PpShape {
        self.pp_shape
    }

    pub fn labels(&self, role: Role) -> Result<&RoleLabels, ProfileError> {
        self.mapping
            .get(&role)
            .ok_or_else(|| ProfileError::UnknownRole(role.name().to_string()))
    }

    pub fn matches(&self, role: Role, token: &Token) -> bool {
        self.mapping.get(&role).is_some_and(|l| l.matches(token))
    }

    /// Normalised view of a prepositional dependent `node` (a PREPOSITIONAL_MODIFIER
    /// or AGENT child). `None` when `node` has no recognisable preposition.
    pub fn prep_phrase(&self, g: &DependencyGraph, node: TokenId) -> Option<PrepPhrase> {
        let attached_to = g.token(node).head;
        match self.pp_shape {
            PpShape::PrepositionHeaded => {
                let object = g.first_dep(node, Role::Case, self);
                if object.is_none() && self.matches(Role::Agent, g.token(node)) && !g.token(node).upos.eq("ADP") {
                    // collapsed agent: the nominal itself carries the label
                    return Some(PrepPhrase {
                        root: node,
                        attached_to,
                        marker_tokens: Vec::new(),
                        preposition: "by".to_string(),
                        object: Some(node),
                    });
                }
                let mut markers = g.deps_of(node, Role::Multiword, self);
                markers.push(node);
                markers.sort_unstable();
                Some(PrepPhrase {
                    root: node,
                    attached_to,
                    preposition: self.marker_string(g, &markers),
                    marker_tokens: markers,
                    object,
                })
            }
            PpShape::CaseMarked => {
                let case = g
                    .children(node)
                    .iter()
                    .copied()
                    .find(|&c| self.matches(Role::Case, g.token(c)) && !self.matches(Role::PossessiveMarker, g.token(c)))?;
                let mut markers = g.deps_of(case, Role::Multiword, self);
                markers.push(case);
                markers.sort_unstable();
                Some(PrepPhrase {
                    root: node,
                    attached_to,
                    preposition: self.marker_string(g, &markers),
                    marker_tokens: markers,
                    object: Some(node),
                })
            }
        }
    }

    fn marker_string(&self, g: &DependencyGraph, markers: &[TokenId]) -> String {
        markers
            .iter()
            .map(|&m| g.token(m).form.to_lowercase())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Prepositional modifiers of `head`, in surface order.
    pub fn prep_phrases(&self, g: &DependencyGraph, head: TokenId) -> Vec<PrepPhrase> {
        g.deps_of(head, Role::PrepositionalModifier, self)
            .into_iter()
            .filter_map(|c| self.prep_phrase(g, c))
            .collect()
    }
}

/// A prepositional phrase seen the same way under both schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepPhrase {
    /// Subtree root covering the whole phrase.
    pub root: TokenId,
    pub attached_to: TokenId,
    /// Tokens spelling the preposition (may be several: "such as").
    pub marker_tokens: Vec<TokenId>,
    /// Lower-cased preposition string.
    pub preposition: String,
    /// Head of the governed noun phrase.
    pub object: Option<TokenId>,
}
