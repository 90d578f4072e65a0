//! Dependency graphs over parsed sentences.
//!
//! A [`DependencyGraph`] is one sentence as a rooted, labelled tree over its
//! tokens. Graphs are validated on construction (single root, resolvable and
//! acyclic heads) and immutable afterwards. Relations are addressed through
//! abstract [`Role`]s resolved by a [`LabelProfile`], so the extraction code
//! never mentions a concrete label scheme.

mod conllu;
mod profile;

use std::collections::BTreeSet;

use thiserror::Error;

pub use conllu::{parse_conllu, to_conllu, ConllError, ConllErrorKind};
pub use profile::{LabelProfile, PpShape, PrepPhrase, ProfileError, Role, RoleLabels};

/// Sentence-local, 1-based token index. `0` is the virtual root.
pub type TokenId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: TokenId,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// Minimal constructor; unused CoNLL-U columns are left as `_`.
    pub fn new(id: TokenId, form: &str, lemma: &str, upos: &str, head: TokenId, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            xpos: "_".to_string(),
            feats: "_".to_string(),
            head,
            deprel: deprel.to_string(),
            deps: "_".to_string(),
            misc: "_".to_string(),
        }
    }

    /// Lemma, falling back to the surface form when the lemma column is empty.
    pub fn lemma_or_form(&self) -> &str {
        if self.lemma.is_empty() || self.lemma == "_" {
            &self.form
        } else {
            &self.lemma
        }
    }

    pub fn lower_lemma(&self) -> String {
        self.lemma_or_form().to_lowercase()
    }

    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT" || self.deprel == "punct"
    }

    pub fn is_numeric(&self) -> bool {
        self.upos == "NUM" || self.xpos == "CD"
    }

    pub fn is_pronoun(&self) -> bool {
        self.upos == "PRON" || self.xpos == "PRP" || self.xpos == "PRP$"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("sentence has no tokens")]
    Empty,
    #[error("token ids must run 1..n in order; found {found} at position {expected}")]
    NonSequentialId { expected: TokenId, found: TokenId },
    #[error("token {0} is its own head")]
    SelfHead(TokenId),
    #[error("token {id} points to missing head {head}")]
    DanglingHead { id: TokenId, head: TokenId },
    #[error("no root token (head = 0)")]
    NoRoot,
    #[error("multiple root tokens: {0:?}")]
    MultipleRoots(Vec<TokenId>),
    #[error("head relation is cyclic at token {0}")]
    Cycle(TokenId),
    #[error("token {0} does not exist")]
    MissingToken(TokenId),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

impl GraphError {
    /// The token the error is about, when there is one.
    pub fn token(&self) -> Option<TokenId> {
        match self {
            GraphError::NonSequentialId { expected, .. } => Some(*expected),
            GraphError::SelfHead(id) | GraphError::Cycle(id) | GraphError::MissingToken(id) => Some(*id),
            GraphError::DanglingHead { id, .. } => Some(*id),
            GraphError::MultipleRoots(ids) => ids.get(1).copied(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    sent_id: String,
    text: String,
    tokens: Vec<Token>,
    // children[id] in surface order; children[0] holds the root.
    children: Vec<Vec<TokenId>>,
    root: TokenId,
}

impl DependencyGraph {
    pub fn new(sent_id: impl Into<String>, text: impl Into<String>, tokens: Vec<Token>) -> Result<Self, GraphError> {
        if tokens.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = tokens.len();
        for (i, t) in tokens.iter().enumerate() {
            if t.id != i + 1 {
                return Err(GraphError::NonSequentialId { expected: i + 1, found: t.id });
            }
            if t.head == t.id {
                return Err(GraphError::SelfHead(t.id));
            }
            if t.head > n {
                return Err(GraphError::DanglingHead { id: t.id, head: t.head });
            }
        }
        let roots: Vec<TokenId> = tokens.iter().filter(|t| t.head == 0).map(|t| t.id).collect();
        match roots.len() {
            0 => return Err(GraphError::NoRoot),
            1 => {}
            _ => return Err(GraphError::MultipleRoots(roots)),
        }
        // With a single root, every token reaches it unless it sits on a cycle.
        for t in &tokens {
            let mut cur = t.id;
            let mut steps = 0;
            while cur != 0 {
                cur = tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(GraphError::Cycle(t.id));
                }
            }
        }
        let mut children = vec![Vec::new(); n + 1];
        for t in &tokens {
            children[t.head].push(t.id);
        }
        Ok(DependencyGraph {
            sent_id: sent_id.into(),
            text: text.into(),
            tokens,
            children,
            root: roots[0],
        })
    }

    pub fn sent_id(&self) -> &str {
        &self.sent_id
    }

    /// The same sentence under another identifier.
    pub fn with_sent_id(mut self, sent_id: impl Into<String>) -> Self {
        self.sent_id = sent_id.into();
        self
    }

    /// The original sentence; reconstructed from token forms when the source had no text.
    pub fn text(&self) -> String {
        if self.text.is_empty() {
            detokenize(self.tokens.iter().map(|t| t.form.as_str()))
        } else {
            self.text.clone()
        }
    }

    pub(crate) fn raw_text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> TokenId {
        self.root
    }

    pub fn contains(&self, id: TokenId) -> bool {
        id >= 1 && id <= self.tokens.len()
    }

    /// Panics on an id outside the sentence; use [`DependencyGraph::get`] for checked access.
    pub fn token(&self, id: TokenId) -> &Token {
        &self.tokens[id - 1]
    }

    pub fn get(&self, id: TokenId) -> Option<&Token> {
        if self.contains(id) {
            Some(&self.tokens[id - 1])
        } else {
            None
        }
    }

    /// Direct dependents in surface order.
    pub fn children(&self, id: TokenId) -> &[TokenId] {
        &self.children[id]
    }

    /// Tokens whose head is `node` and whose relation plays `role`, in surface order.
    pub fn dependents(&self, node: TokenId, role: Role, profile: &LabelProfile) -> Result<Vec<TokenId>, GraphError> {
        if !self.contains(node) {
            return Err(GraphError::MissingToken(node));
        }
        let labels = profile.labels(role)?;
        Ok(self.children[node]
            .iter()
            .copied()
            .filter(|&c| labels.matches(self.token(c)))
            .collect())
    }

    /// Infallible variant for ids already known to be valid.
    pub(crate) fn deps_of(&self, node: TokenId, role: Role, profile: &LabelProfile) -> Vec<TokenId> {
        self.children[node]
            .iter()
            .copied()
            .filter(|&c| profile.matches(role, self.token(c)))
            .collect()
    }

    pub(crate) fn first_dep(&self, node: TokenId, role: Role, profile: &LabelProfile) -> Option<TokenId> {
        self.children[node].iter().copied().find(|&c| profile.matches(role, self.token(c)))
    }

    /// All token ids in the subtree rooted at `node`, including `node`.
    pub fn subtree(&self, node: TokenId) -> BTreeSet<TokenId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(cur) = stack.pop() {
            out.insert(cur);
            stack.extend(self.children[cur].iter().copied());
        }
        out
    }

    /// Tokens of `node`'s subtree minus the subtrees rooted at any `excluded` id, in surface order.
    pub fn yield_span(&self, node: TokenId, excluded: &BTreeSet<TokenId>) -> Vec<&Token> {
        self.yield_ids(node, excluded).into_iter().map(|id| self.token(id)).collect()
    }

    pub fn yield_ids(&self, node: TokenId, excluded: &BTreeSet<TokenId>) -> Vec<TokenId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(cur) = stack.pop() {
            if excluded.contains(&cur) {
                continue;
            }
            out.push(cur);
            stack.extend(self.children[cur].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// First and last token id covered by `node`'s subtree.
    pub fn span(&self, node: TokenId) -> (TokenId, TokenId) {
        let sub = self.subtree(node);
        (*sub.first().unwrap_or(&node), *sub.last().unwrap_or(&node))
    }
}

const NO_SPACE_BEFORE: &[&str] = &[",", ".", ";", ":", "!", "?", ")", "]", "%", "'s", "'", "n't", "'re", "'ll", "'m", "'ve", "'d"];
const NO_SPACE_AFTER: &[&str] = &["(", "["];

/// Joins word forms with single spaces, attaching punctuation and clitics.
pub fn detokenize<'a, I>(words: I) -> String
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = String::new();
    let mut glue_next = true;
    for w in words {
        if !glue_next && !NO_SPACE_BEFORE.contains(&w.to_lowercase().as_str()) {
            out.push(' ');
        }
        out.push_str(w);
        glue_next = NO_SPACE_AFTER.contains(&w);
    }
    out
}
