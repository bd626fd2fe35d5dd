//! Search-plan data model: nodes, edges, validation, canonical serialization.
//!
//! A search plan is a DAG whose nodes carry search keywords plus a search
//! source and whose edges are information dependencies. The plan text grammar
//! is comma-separated items: node items `ID: keywords (source search)` and
//! edge items `ID -> ID`, with backslash escapes for literal `,`, `(`, `)`
//! and for a `-` that would otherwise start `->`.
//!
//! All values are immutable after construction; invalid plans are
//! unrepresentable.

mod dot;
mod grammar;
mod legacy;
mod tokens;

pub use dot::to_dot;
pub use grammar::parse_plan;
pub use legacy::{compare_token_cost, convert_legacy, LegacyNode, LegacyPlanDoc, TokenCostComparison};
pub use tokens::{count_tokens, TokenCounter};

use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;
use thiserror::Error;

/// Everything that can go wrong while building or rendering a plan.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("syntax error at line {line}, col {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: NodeId, to: NodeId },
    #[error("edge references unknown node id {0}")]
    DanglingEdge(String),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("cycle detected: {}", format_cycle(.0))]
    CycleDetected(Vec<NodeId>),
    #[error("unknown search source '{0}'")]
    UnknownSource(String),
    #[error("invalid node id '{0}': expected 1-8 chars matching [A-Z][A-Z0-9]*")]
    InvalidNodeId(String),
    #[error("invalid keywords: {0}")]
    InvalidKeywords(String),
    #[error("invalid source tag '{0}': expected [a-z][a-z0-9_]*")]
    InvalidSourceTag(String),
    #[error("a plan must have at least one node")]
    EmptyPlan,
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("legacy plan schema error: {0}")]
    Schema(String),
    #[error("failed to load token vocabulary: {0}")]
    VocabLoad(String),
}

fn format_cycle(path: &[NodeId]) -> String {
    path.iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Node identifier: 1-8 chars, uppercase letter then uppercase alphanumerics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, PlanError> {
        let id = id.into();
        let mut chars = id.chars();
        let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_uppercase());
        let tail_ok = chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit());
        if !head_ok || !tail_ok || id.len() > 8 {
            return Err(PlanError::InvalidNodeId(id));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(de)?;
        NodeId::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Lowercase search-source identifier (`general`, `news`, ...). Shape is
/// validated here; membership in the active registry is checked when a plan
/// is built.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SourceTag(String);

impl SourceTag {
    pub fn new(name: impl Into<String>) -> Result<Self, PlanError> {
        let name = name.into();
        let mut chars = name.chars();
        let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase());
        let tail_ok = chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !head_ok || !tail_ok {
            return Err(PlanError::InvalidSourceTag(name));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for SourceTag {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(de)?;
        SourceTag::new(raw).map_err(serde::de::Error::custom)
    }
}

/// The set of source tags a plan may reference. Defaults to the four
/// standard sources; extend with [`SourceRegistry::register`].
#[derive(Debug, Clone)]
pub struct SourceRegistry {
    names: BTreeSet<String>,
}

impl SourceRegistry {
    pub const DEFAULT_SOURCES: [&'static str; 4] = ["general", "news", "financial", "industry"];

    pub fn empty() -> Self {
        Self {
            names: BTreeSet::new(),
        }
    }

    pub fn register(&mut self, name: &str) -> Result<(), PlanError> {
        SourceTag::new(name)?;
        self.names.insert(name.to_string());
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

impl Default for SourceRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        for name in Self::DEFAULT_SOURCES {
            reg.register(name).expect("default sources are valid tags");
        }
        reg
    }
}

/// Maximum keyword length after unescaping.
pub const MAX_KEYWORDS_CHARS: usize = 512;

/// One search step: keywords to search for and the source to search in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanNode {
    pub id: NodeId,
    pub keywords: String,
    pub source: SourceTag,
}

impl PlanNode {
    pub fn new(id: NodeId, keywords: impl Into<String>, source: SourceTag) -> Result<Self, PlanError> {
        let keywords = keywords.into();
        if keywords.is_empty() {
            return Err(PlanError::InvalidKeywords("keywords are empty".into()));
        }
        if keywords.chars().count() > MAX_KEYWORDS_CHARS {
            return Err(PlanError::InvalidKeywords(format!(
                "keywords exceed {MAX_KEYWORDS_CHARS} characters"
            )));
        }
        if keywords.trim() != keywords {
            return Err(PlanError::InvalidKeywords(
                "keywords have leading or trailing whitespace".into(),
            ));
        }
        Ok(Self { id, keywords, source })
    }
}

/// Dependency edge: results of `from` inform the query for `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEdge {
    pub from: NodeId,
    pub to: NodeId,
}

impl PlanEdge {
    pub fn new(from: NodeId, to: NodeId) -> Result<Self, PlanError> {
        if from == to {
            return Err(PlanError::SelfLoop(from));
        }
        Ok(Self { from, to })
    }
}

/// A validated search plan: unique node ids, no dangling or duplicate edges,
/// acyclic, at least one node. Node and edge order is preserved as written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchPlan {
    nodes: Vec<PlanNode>,
    edges: Vec<PlanEdge>,
}

impl SearchPlan {
    /// Build a plan, checking every invariant against `registry`.
    pub fn new(
        nodes: Vec<PlanNode>,
        edges: Vec<PlanEdge>,
        registry: &SourceRegistry,
    ) -> Result<Self, PlanError> {
        for node in &nodes {
            if !registry.contains(node.source.as_str()) {
                return Err(PlanError::UnknownSource(node.source.as_str().to_string()));
            }
        }
        Self::new_structural(nodes, edges)
    }

    /// Build a plan checking structural invariants only (no registry).
    /// Used when deserializing exported traces, where the original registry
    /// is not available.
    pub fn new_structural(nodes: Vec<PlanNode>, edges: Vec<PlanEdge>) -> Result<Self, PlanError> {
        if nodes.is_empty() {
            return Err(PlanError::EmptyPlan);
        }
        let mut seen = BTreeSet::new();
        for node in &nodes {
            if !seen.insert(node.id.clone()) {
                return Err(PlanError::DuplicateNode(node.id.clone()));
            }
        }
        let mut edge_seen = BTreeSet::new();
        for edge in &edges {
            if edge.from == edge.to {
                return Err(PlanError::SelfLoop(edge.from.clone()));
            }
            for endpoint in [&edge.from, &edge.to] {
                if !seen.contains(endpoint) {
                    return Err(PlanError::DanglingEdge(endpoint.as_str().to_string()));
                }
            }
            if !edge_seen.insert((edge.from.clone(), edge.to.clone())) {
                return Err(PlanError::DuplicateEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
        }
        let ids: Vec<NodeId> = nodes.iter().map(|n| n.id.clone()).collect();
        validate_acyclic(&ids, &edges)?;
        Ok(Self { nodes, edges })
    }

    pub fn nodes(&self) -> &[PlanNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[PlanEdge] {
        &self.edges
    }

    pub fn node(&self, id: &NodeId) -> Option<&PlanNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    /// Parse plan text against the default source registry.
    pub fn parse(text: &str) -> Result<Self, PlanError> {
        parse_plan(text, &SourceRegistry::default())
    }

    /// Canonical plan text: node items in node order, then edge items in
    /// edge order, joined by `", "`. Re-parsing the result yields an equal
    /// plan.
    pub fn to_plan_string(&self) -> String {
        let mut items = Vec::with_capacity(self.nodes.len() + self.edges.len());
        for node in &self.nodes {
            items.push(format!(
                "{}: {} ({} search)",
                node.id,
                escape_keywords(&node.keywords),
                node.source
            ));
        }
        for edge in &self.edges {
            items.push(format!("{} -> {}", edge.from, edge.to));
        }
        items.join(", ")
    }

    /// Direct predecessors of `id`, in edge order.
    pub fn predecessors(&self, id: &NodeId) -> Vec<&NodeId> {
        self.edges
            .iter()
            .filter(|e| &e.to == id)
            .map(|e| &e.from)
            .collect()
    }

    /// Topological order with deterministic tie-breaking: among
    /// simultaneously-ready nodes the lexicographically smallest id first.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let ids: Vec<NodeId> = self.nodes.iter().map(|n| n.id.clone()).collect();
        topo_order(&ids, &self.edges).expect("SearchPlan invariant guarantees acyclicity")
    }
}

impl<'de> Deserialize<'de> for SearchPlan {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            nodes: Vec<PlanNode>,
            edges: Vec<PlanEdge>,
        }
        let raw = Raw::deserialize(de)?;
        SearchPlan::new_structural(raw.nodes, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// Escape keywords for the plan text format: backslash before `,`, `(`, `)`,
/// `\`, and before a `-` that is immediately followed by `>`.
pub(crate) fn escape_keywords(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let chars: Vec<char> = raw.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '\\' | ',' | '(' | ')' => {
                out.push('\\');
                out.push(c);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push('\\');
                out.push('-');
            }
            _ => out.push(c),
        }
    }
    out
}

/// Check a raw node/edge list for directed cycles. Edge endpoints must
/// reference listed nodes. On failure the witness path starts and ends on
/// the same node, e.g. `[A, B, A]`.
pub fn validate_acyclic(node_ids: &[NodeId], edges: &[PlanEdge]) -> Result<(), PlanError> {
    let index: BTreeMap<&NodeId, usize> = node_ids.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_ids.len()];
    for edge in edges {
        let from = *index
            .get(&edge.from)
            .ok_or_else(|| PlanError::DanglingEdge(edge.from.as_str().to_string()))?;
        let to = *index
            .get(&edge.to)
            .ok_or_else(|| PlanError::DanglingEdge(edge.to.as_str().to_string()))?;
        adjacency[from].push(to);
    }

    // Iterative DFS with tri-color marking; a back edge yields the witness.
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; node_ids.len()];
    let mut parent: Vec<Option<usize>> = vec![None; node_ids.len()];
    for start in 0..node_ids.len() {
        if color[start] != Color::White {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        color[start] = Color::Gray;
        loop {
            let Some(&(node, next)) = stack.last() else {
                break;
            };
            if next < adjacency[node].len() {
                stack.last_mut().expect("stack is non-empty").1 += 1;
                let succ = adjacency[node][next];
                match color[succ] {
                    Color::White => {
                        color[succ] = Color::Gray;
                        parent[succ] = Some(node);
                        stack.push((succ, 0));
                    }
                    Color::Gray => {
                        // Walk parents back from `node` to `succ`.
                        let mut path = vec![node_ids[succ].clone()];
                        let mut cursor = node;
                        let mut rev = vec![cursor];
                        while cursor != succ {
                            cursor = parent[cursor].expect("gray nodes form a parent chain");
                            rev.push(cursor);
                        }
                        rev.reverse();
                        path.extend(rev.into_iter().skip(1).map(|i| node_ids[i].clone()));
                        path.push(node_ids[succ].clone());
                        return Err(PlanError::CycleDetected(path));
                    }
                    Color::Black => {}
                }
            } else {
                color[node] = Color::Black;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Kahn's algorithm over raw lists with a lexicographic min-heap, so the
/// order is deterministic. Errors if the edges form a cycle.
pub fn topo_order(node_ids: &[NodeId], edges: &[PlanEdge]) -> Result<Vec<NodeId>, PlanError> {
    let index: BTreeMap<&NodeId, usize> = node_ids.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut indegree = vec![0usize; node_ids.len()];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_ids.len()];
    for edge in edges {
        let from = *index
            .get(&edge.from)
            .ok_or_else(|| PlanError::DanglingEdge(edge.from.as_str().to_string()))?;
        let to = *index
            .get(&edge.to)
            .ok_or_else(|| PlanError::DanglingEdge(edge.to.as_str().to_string()))?;
        adjacency[from].push(to);
        indegree[to] += 1;
    }
    let mut ready: BinaryHeap<Reverse<(&NodeId, usize)>> = (0..node_ids.len())
        .filter(|&i| indegree[i] == 0)
        .map(|i| Reverse((&node_ids[i], i)))
        .collect();
    let mut order = Vec::with_capacity(node_ids.len());
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(node_ids[i].clone());
        for &succ in &adjacency[i] {
            indegree[succ] -= 1;
            if indegree[succ] == 0 {
                ready.push(Reverse((&node_ids[succ], succ)));
            }
        }
    }
    if order.len() != node_ids.len() {
        return Err(PlanError::InvalidPlan("plan contains a cycle".into()));
    }
    Ok(order)
}
