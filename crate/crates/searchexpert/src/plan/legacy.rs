//! Conversion from the legacy code-based plan representation.
//!
//! The legacy format is a JSON document
//! `{"nodes":[{"id":str,"kw":str,"src":str}],"edges":[[str,str],...]}`.
//! Converting preserves ids, keywords, and edges exactly; the payoff is the
//! token count of the natural-language form versus the legacy document.

use super::{
    NodeId, PlanEdge, PlanError, PlanNode, SearchPlan, SourceRegistry, SourceTag, TokenCounter,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegacyNode {
    pub id: String,
    pub kw: String,
    pub src: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegacyPlanDoc {
    pub nodes: Vec<LegacyNode>,
    pub edges: Vec<(String, String)>,
}

impl LegacyPlanDoc {
    pub fn from_json(json: &str) -> Result<Self, PlanError> {
        serde_json::from_str(json).map_err(|e| PlanError::Schema(e.to_string()))
    }

    /// Compact canonical JSON of the document — the form token costs are
    /// measured on.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("legacy doc serializes")
    }
}

/// Convert a legacy document into a validated [`SearchPlan`], preserving
/// node ids, keywords, sources, and edges byte-for-byte.
pub fn convert_legacy(doc: &LegacyPlanDoc, registry: &SourceRegistry) -> Result<SearchPlan, PlanError> {
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for legacy in &doc.nodes {
        let id = NodeId::new(legacy.id.clone())?;
        let source = SourceTag::new(legacy.src.clone())?;
        nodes.push(PlanNode::new(id, legacy.kw.clone(), source)?);
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (from, to) in &doc.edges {
        edges.push(PlanEdge::new(NodeId::new(from.clone())?, NodeId::new(to.clone())?)?);
    }
    SearchPlan::new(nodes, edges, registry)
}

/// Token costs of the natural-language form versus the legacy document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenCostComparison {
    pub nl_tokens: usize,
    pub legacy_tokens: usize,
    /// `1 - nl_tokens / legacy_tokens`, computed as an exact integer
    /// difference before the single float division.
    pub reduction_ratio: f64,
}

/// Count both representations of `doc` and report the reduction.
pub fn compare_token_cost(
    doc: &LegacyPlanDoc,
    counter: &TokenCounter,
    registry: &SourceRegistry,
) -> Result<TokenCostComparison, PlanError> {
    let plan = convert_legacy(doc, registry)?;
    let nl_tokens = counter.count(&plan.to_plan_string());
    let legacy_tokens = counter.count(&doc.to_json());
    debug_assert!(legacy_tokens > 0, "a valid legacy doc has tokens");
    let reduction_ratio = (legacy_tokens as i64 - nl_tokens as i64) as f64 / legacy_tokens as f64;
    Ok(TokenCostComparison {
        nl_tokens,
        legacy_tokens,
        reduction_ratio,
    })
}
