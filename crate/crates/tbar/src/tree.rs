//! Rooted locally finite trees: explicit finite tables and finite-state
//! automata describing infinite self-similar trees.
//!
//! Vertices are addressed by their child-index word from the root; the empty
//! word is the root itself. Both representations answer the same structural
//! queries (child counts, address validity, liveness), which is all the
//! geometry layer needs.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Child-index word addressing a vertex; the empty word is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct VertexAddress(Vec<u32>);

impl VertexAddress {
    pub fn root() -> Self {
        VertexAddress(Vec::new())
    }

    pub fn new(word: Vec<u32>) -> Self {
        VertexAddress(word)
    }

    pub fn word(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn parent(&self) -> Option<VertexAddress> {
        if self.0.is_empty() {
            None
        } else {
            Some(VertexAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, index: u32) -> VertexAddress {
        let mut w = self.0.clone();
        w.push(index);
        VertexAddress(w)
    }

    /// The ancestor at the given depth (a prefix of this word).
    pub fn truncate(&self, depth: u32) -> VertexAddress {
        VertexAddress(self.0[..(depth as usize).min(self.0.len())].to_vec())
    }

    /// Length of the longest common prefix with `other`.
    pub fn lcp_len(&self, other: &VertexAddress) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl From<Vec<u32>> for VertexAddress {
    fn from(word: Vec<u32>) -> Self {
        VertexAddress(word)
    }
}

impl From<&[u32]> for VertexAddress {
    fn from(word: &[u32]) -> Self {
        VertexAddress(word.to_vec())
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl fmt::Debug for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexAddress({self})")
    }
}

/// Explicit finite tree: a prefix-closed table mapping each vertex address to
/// its child count. Children implied by a count but absent from the table are
/// leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTree {
    children: BTreeMap<Vec<u32>, u32>,
}

impl ExplicitTree {
    pub fn new(children: BTreeMap<Vec<u32>, u32>) -> Self {
        ExplicitTree { children }
    }

    /// Builds a table from `(address word, child count)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vec<u32>, u32)>) -> Self {
        ExplicitTree {
            children: pairs.into_iter().collect(),
        }
    }

    /// A path of `edges` edges (each vertex has one child, the last is a leaf).
    pub fn path(edges: u32) -> Self {
        let mut children = BTreeMap::new();
        for d in 0..=edges {
            let count = u32::from(d < edges);
            children.insert((0..d).map(|_| 0u32).collect(), count);
        }
        ExplicitTree { children }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, u32)> {
        self.children.iter().map(|(k, v)| (k, *v))
    }

    fn count_of(&self, word: &[u32]) -> u32 {
        self.children.get(word).copied().unwrap_or(0)
    }

    /// Deepest vertex implied by the table (listed keys plus their leaf
    /// children).
    pub fn max_depth(&self) -> u32 {
        self.children
            .iter()
            .map(|(k, c)| k.len() as u32 + u32::from(*c > 0))
            .max()
            .unwrap_or(0)
    }
}

/// State id in a [`TreeAutomaton`].
pub type StateId = usize;

/// Finite-state description of a (possibly infinite) locally finite tree:
/// each state fixes a child count, and the transition picks the child's
/// state. The tree is the unfolding from the initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAutomaton {
    states: Vec<String>,
    initial: StateId,
    counts: Vec<u32>,
    /// `delta[q][i]` is the state of child `i`; validation flags states where
    /// the arity disagrees with `counts[q]`.
    delta: Vec<Vec<StateId>>,
}

impl TreeAutomaton {
    pub fn new(
        states: Vec<String>,
        initial: StateId,
        counts: Vec<u32>,
        delta: Vec<Vec<StateId>>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidSpec("automaton has no states".into()));
        }
        if initial >= states.len() || counts.len() != states.len() || delta.len() != states.len() {
            return Err(Error::InvalidSpec(
                "automaton tables must cover exactly the state set".into(),
            ));
        }
        if let Some(q) = delta.iter().flatten().find(|q| **q >= states.len()) {
            return Err(Error::InvalidSpec(format!(
                "transition targets unknown state index {q}"
            )));
        }
        Ok(TreeAutomaton {
            states,
            initial,
            counts,
            delta,
        })
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn count(&self, q: StateId) -> u32 {
        self.counts[q]
    }

    /// Runs the automaton along a word, checking each index against the
    /// current state's child count.
    pub fn state_after(&self, word: &[u32]) -> Result<StateId> {
        let mut q = self.initial;
        for (pos, &i) in word.iter().enumerate() {
            if i >= self.counts[q] {
                return Err(Error::invalid_address(
                    VertexAddress::new(word.to_vec()),
                    format!(
                        "index {i} at position {pos} exceeds child count {} of state {}",
                        self.counts[q], self.states[q]
                    ),
                ));
            }
            q = *self.delta[q].get(i as usize).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "missing transition for (state {}, child {i})",
                    self.states[q]
                ))
            })?;
        }
        Ok(q)
    }

    pub fn step(&self, q: StateId, i: u32) -> Result<StateId> {
        if i >= self.counts[q] {
            return Err(Error::InvalidSpec(format!(
                "child index {i} exceeds child count {} of state {}",
                self.counts[q], self.states[q]
            )));
        }
        self.delta[q].get(i as usize).copied().ok_or_else(|| {
            Error::InvalidSpec(format!(
                "missing transition for (state {}, child {i})",
                self.states[q]
            ))
        })
    }

    /// States from which an infinite descending path exists (greatest fixed
    /// point of "has a child in the set").
    pub fn alive_states(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for q in 0..n {
                if !alive[q] {
                    continue;
                }
                let arity = (self.counts[q] as usize).min(self.delta[q].len());
                let has_live_child = self.delta[q][..arity].iter().any(|&r| alive[r]);
                if !has_live_child {
                    alive[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }
}

/// A rooted locally finite tree, explicit or automaton-described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeSpec {
    Explicit(ExplicitTree),
    Programmatic(TreeAutomaton),
}

impl TreeSpec {
    /// The regular tree where every vertex has `arity` children.
    pub fn regular(arity: u32) -> Self {
        TreeSpec::Programmatic(
            TreeAutomaton::new(vec!["q".into()], 0, vec![arity], vec![vec![0; arity as usize]])
                .expect("single-state automaton is well formed"),
        )
    }

    pub fn binary() -> Self {
        TreeSpec::regular(2)
    }

    pub fn ternary() -> Self {
        TreeSpec::regular(3)
    }

    /// The single infinite ray (every vertex has exactly one child).
    pub fn unary() -> Self {
        TreeSpec::regular(1)
    }

    /// Number of children of the addressed vertex.
    pub fn child_count(&self, v: &VertexAddress) -> Result<u32> {
        match self {
            TreeSpec::Explicit(t) => {
                self.check_address(v)?;
                Ok(t.count_of(v.word()))
            }
            TreeSpec::Programmatic(a) => {
                let q = a.state_after(v.word())?;
                Ok(a.count(q))
            }
        }
    }

    /// Verifies that every index along the word is in range.
    pub fn check_address(&self, v: &VertexAddress) -> Result<()> {
        match self {
            TreeSpec::Explicit(t) => {
                let w = v.word();
                for (pos, &i) in w.iter().enumerate() {
                    let count = t.count_of(&w[..pos]);
                    if i >= count {
                        return Err(Error::invalid_address(
                            v,
                            format!("index {i} at position {pos} exceeds child count {count}"),
                        ));
                    }
                }
                Ok(())
            }
            TreeSpec::Programmatic(a) => a.state_after(v.word()).map(|_| ()),
        }
    }

    /// True iff the tree has infinitely many vertices (equivalently, hosts a
    /// ray). Decided on the automaton's reachable live states.
    pub fn is_infinite(&self) -> bool {
        match self {
            TreeSpec::Explicit(_) => false,
            TreeSpec::Programmatic(a) => a.alive_states()[a.initial()],
        }
    }

    /// Checks the structural invariants and gathers statistics.
    pub fn validate(&self) -> ValidationReport {
        match self {
            TreeSpec::Explicit(t) => validate_explicit(t),
            TreeSpec::Programmatic(a) => validate_programmatic(a),
        }
    }
}

fn validate_explicit(t: &ExplicitTree) -> ValidationReport {
    let mut violations = Vec::new();
    if !t.children.contains_key(&Vec::new()) {
        violations.push("missing root entry \"\"".to_string());
    }
    for word in t.children.keys() {
        if word.is_empty() {
            continue;
        }
        let parent = &word[..word.len() - 1];
        if !t.children.contains_key(parent) {
            violations.push(format!(
                "not prefix-closed: {} listed but parent {} missing",
                VertexAddress::new(word.clone()),
                VertexAddress::new(parent.to_vec()),
            ));
            continue;
        }
        let index = *word.last().expect("non-empty word");
        let parent_count = t.count_of(parent);
        if index >= parent_count {
            violations.push(format!(
                "child index out of range: {} has index {index} but parent has {parent_count} children",
                VertexAddress::new(word.clone()),
            ));
        }
    }
    let vertex_count = 1 + t.children.values().map(|c| u64::from(*c)).sum::<u64>();
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        vertex_count: Some(vertex_count),
        max_depth: Some(t.max_depth()),
        infinite: false,
    }
}

fn validate_programmatic(a: &TreeAutomaton) -> ValidationReport {
    let mut violations = Vec::new();
    for q in 0..a.states.len() {
        let count = a.counts[q] as usize;
        let arity = a.delta[q].len();
        if arity < count {
            violations.push(format!(
                "missing transition for (state {}, child {})",
                a.states[q], arity
            ));
        } else if arity > count {
            violations.push(format!(
                "transition beyond child count for state {} (count {}, {} transitions)",
                a.states[q], count, arity
            ));
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        vertex_count: None,
        max_depth: None,
        infinite: a.alive_states()[a.initial()],
    }
}

/// Outcome of [`TreeSpec::validate`]: violations are reported, not thrown.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
    pub infinite: bool,
}

// JSON wire format. Explicit trees key vertices by their digit string ("" is
// the root, "010" is [0,1,0]); this caps the explicit format at 10 children
// per vertex, which in-memory trees do not share.

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecRepr {
    Explicit {
        children: BTreeMap<String, u32>,
    },
    Programmatic {
        states: Vec<String>,
        initial: String,
        counts: BTreeMap<String, u32>,
        delta: BTreeMap<String, Vec<String>>,
    },
}

fn parse_digit_key(key: &str) -> std::result::Result<Vec<u32>, String> {
    key.chars()
        .map(|c| {
            c.to_digit(10)
                .ok_or_else(|| format!("address key {key:?} contains non-digit {c:?}"))
        })
        .collect()
}

fn render_digit_key(word: &[u32]) -> std::result::Result<String, String> {
    word.iter()
        .map(|&i| {
            if i <= 9 {
                Ok(char::from(b'0' + i as u8))
            } else {
                Err(format!(
                    "child index {i} exceeds 9 and cannot be written as a digit key"
                ))
            }
        })
        .collect()
}

impl TryFrom<SpecRepr> for TreeSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<TreeSpec> {
        match repr {
            SpecRepr::Explicit { children } => {
                let mut table = BTreeMap::new();
                for (key, count) in children {
                    let word = parse_digit_key(&key).map_err(Error::Parse)?;
                    table.insert(word, count);
                }
                Ok(TreeSpec::Explicit(ExplicitTree::new(table)))
            }
            SpecRepr::Programmatic {
                states,
                initial,
                counts,
                delta,
            } => {
                let index_of = |name: &str| -> Result<StateId> {
                    states
                        .iter()
                        .position(|s| s == name)
                        .ok_or_else(|| Error::Parse(format!("unknown state {name:?}")))
                };
                {
                    let mut seen = std::collections::BTreeSet::new();
                    for s in &states {
                        if !seen.insert(s) {
                            return Err(Error::Parse(format!("duplicate state {s:?}")));
                        }
                    }
                }
                let initial = index_of(&initial)?;
                let mut count_vec = vec![0u32; states.len()];
                for (name, c) in &counts {
                    count_vec[index_of(name)?] = *c;
                }
                let mut delta_vec = vec![Vec::new(); states.len()];
                for (name, targets) in &delta {
                    let q = index_of(name)?;
                    delta_vec[q] = targets
                        .iter()
                        .map(|t| index_of(t))
                        .collect::<Result<Vec<_>>>()?;
                }
                TreeAutomaton::new(states, initial, count_vec, delta_vec)
                    .map(TreeSpec::Programmatic)
            }
        }
    }
}

impl Serialize for TreeSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            TreeSpec::Explicit(t) => {
                let mut children = BTreeMap::new();
                for (word, count) in t.entries() {
                    let key = render_digit_key(word).map_err(S::Error::custom)?;
                    children.insert(key, count);
                }
                SpecRepr::Explicit { children }
            }
            TreeSpec::Programmatic(a) => {
                let name = |q: StateId| a.states[q].clone();
                SpecRepr::Programmatic {
                    states: a.states.clone(),
                    initial: name(a.initial),
                    counts: a
                        .states
                        .iter()
                        .enumerate()
                        .map(|(q, s)| (s.clone(), a.counts[q]))
                        .collect(),
                    delta: a
                        .states
                        .iter()
                        .enumerate()
                        .map(|(q, s)| (s.clone(), a.delta[q].iter().map(|&r| name(r)).collect()))
                        .collect(),
                }
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TreeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(deserializer)?;
        TreeSpec::try_from(repr).map_err(D::Error::custom)
    }
}
