//! Graphviz DOT rendering of search plans.

use super::SearchPlan;

/// Render the plan as a DOT digraph. Node labels are
/// `id: keywords` over `(source)`; output is deterministic (plan order).
pub fn to_dot(plan: &SearchPlan) -> String {
    let mut out = String::from("digraph search_plan {\n  rankdir=LR;\n");
    for node in plan.nodes() {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}: {}\\n({})\"];\n",
            node.id,
            node.id,
            escape_label(&node.keywords),
            node.source
        ));
    }
    for edge in plan.edges() {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", edge.from, edge.to));
    }
    out.push_str("}\n");
    out
}

fn escape_label(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}
