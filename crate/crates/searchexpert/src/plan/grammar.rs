//! Hand-rolled parser for the plan text grammar.
//!
//! Items are separated by unescaped commas. A node item is
//! `ID: keywords (source search)`; an edge item is `ID -> ID`. A backslash
//! escapes the next character, which is how a literal `,`, `(`, `)`, `\` or
//! a `-` followed by `>` gets into keywords. Edges may reference nodes
//! declared later; references are resolved in a second pass.

use super::{NodeId, PlanEdge, PlanError, PlanNode, SearchPlan, SourceRegistry, SourceTag};

/// One input character with its 1-indexed position.
#[derive(Clone, Copy)]
struct Pos {
    ch: char,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, expected: impl Into<String>) -> PlanError {
    PlanError::Syntax {
        line,
        col,
        expected: expected.into(),
    }
}

/// Parse plan text into a validated [`SearchPlan`], preserving node and edge
/// order as written. Source tags must be present in `registry`.
pub fn parse_plan(text: &str, registry: &SourceRegistry) -> Result<SearchPlan, PlanError> {
    let chars = index_positions(text);
    let items = split_items(&chars);

    let mut nodes: Vec<PlanNode> = Vec::new();
    let mut edges: Vec<(PlanEdge, usize, usize)> = Vec::new();

    let mut any_item = false;
    for item in items {
        let item = trim_ws(item);
        if item.is_empty() {
            // A trailing comma or a blank item between commas.
            continue;
        }
        any_item = true;
        match parse_item(item)? {
            Item::Node(node) => {
                if nodes.iter().any(|n| n.id == node.id) {
                    return Err(PlanError::DuplicateNode(node.id));
                }
                nodes.push(node);
            }
            Item::Edge(edge, line, col) => edges.push((edge, line, col)),
        }
    }
    if !any_item {
        let (line, col) = end_position(&chars);
        return Err(syntax(line, col, "at least one plan item"));
    }

    // Second pass: edges may reference nodes in either direction.
    for (edge, _, _) in &edges {
        for endpoint in [&edge.from, &edge.to] {
            if !nodes.iter().any(|n| &n.id == endpoint) {
                return Err(PlanError::DanglingEdge(endpoint.as_str().to_string()));
            }
        }
    }
    let edges: Vec<PlanEdge> = edges.into_iter().map(|(e, _, _)| e).collect();
    SearchPlan::new(nodes, edges, registry)
}

enum Item {
    Node(PlanNode),
    Edge(PlanEdge, usize, usize),
}

fn index_positions(text: &str) -> Vec<Pos> {
    let mut out = Vec::with_capacity(text.len());
    let mut line = 1;
    let mut col = 1;
    for ch in text.chars() {
        out.push(Pos { ch, line, col });
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    out
}

fn end_position(chars: &[Pos]) -> (usize, usize) {
    chars.last().map(|p| (p.line, p.col)).unwrap_or((1, 1))
}

/// Split on unescaped commas. Escapes are preserved for the item parsers.
fn split_items(chars: &[Pos]) -> Vec<&[Pos]> {
    let mut items = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        match chars[i].ch {
            '\\' => i += 2,
            ',' => {
                items.push(&chars[start..i]);
                i += 1;
                start = i;
            }
            _ => i += 1,
        }
    }
    items.push(&chars[start..]);
    items
}

fn trim_ws(mut item: &[Pos]) -> &[Pos] {
    while let Some(first) = item.first() {
        if first.ch.is_whitespace() {
            item = &item[1..];
        } else {
            break;
        }
    }
    while let Some(last) = item.last() {
        if last.ch.is_whitespace() {
            item = &item[..item.len() - 1];
        } else {
            break;
        }
    }
    item
}

fn parse_item(item: &[Pos]) -> Result<Item, PlanError> {
    let (id, rest) = parse_node_id(item)?;
    let rest = trim_leading_ws(rest);
    match rest.first() {
        Some(p) if p.ch == ':' => parse_node_body(id, &rest[1..]),
        Some(p) if p.ch == '-' && rest.get(1).map(|q| q.ch) == Some('>') => {
            let (line, col) = (p.line, p.col);
            let target = trim_ws(&rest[2..]);
            let (to, tail) = parse_node_id(target)?;
            if !trim_ws(tail).is_empty() {
                let extra = trim_ws(tail)[0];
                return Err(syntax(extra.line, extra.col, "end of edge item"));
            }
            let edge = PlanEdge::new(id, to)?;
            Ok(Item::Edge(edge, line, col))
        }
        Some(p) => Err(syntax(p.line, p.col, "':' or '->' after node id")),
        None => {
            let last = item.last().expect("item is non-empty");
            Err(syntax(last.line, last.col + 1, "':' or '->' after node id"))
        }
    }
}

fn trim_leading_ws(mut rest: &[Pos]) -> &[Pos] {
    while let Some(first) = rest.first() {
        if first.ch.is_whitespace() {
            rest = &rest[1..];
        } else {
            break;
        }
    }
    rest
}

fn parse_node_id(item: &[Pos]) -> Result<(NodeId, &[Pos]), PlanError> {
    let first = item
        .first()
        .ok_or_else(|| syntax(1, 1, "node id ([A-Z][A-Z0-9]*)"))?;
    if !first.ch.is_ascii_uppercase() {
        return Err(syntax(first.line, first.col, "node id ([A-Z][A-Z0-9]*)"));
    }
    let mut len = 1;
    while len < item.len() && (item[len].ch.is_ascii_uppercase() || item[len].ch.is_ascii_digit()) {
        len += 1;
    }
    let raw: String = item[..len].iter().map(|p| p.ch).collect();
    let id = NodeId::new(raw).map_err(|_| syntax(first.line, first.col, "node id of at most 8 chars"))?;
    Ok((id, &item[len..]))
}

/// Parse `keywords (source search)` after the colon. The keyword span runs
/// to the first unescaped `(`; escapes are resolved here.
fn parse_node_body(id: NodeId, body: &[Pos]) -> Result<Item, PlanError> {
    let mut keywords = String::new();
    let mut i = 0;
    let mut paren: Option<usize> = None;
    while i < body.len() {
        let p = body[i];
        match p.ch {
            '\\' => {
                match body.get(i + 1) {
                    Some(next) => keywords.push(next.ch),
                    None => return Err(syntax(p.line, p.col, "a character after '\\'")),
                }
                i += 2;
            }
            '(' => {
                paren = Some(i);
                break;
            }
            ')' => return Err(syntax(p.line, p.col, "escaped ')' in keywords")),
            '-' if body.get(i + 1).map(|q| q.ch) == Some('>') => {
                return Err(syntax(p.line, p.col, "escaped '-' before '>' in keywords"));
            }
            _ => {
                keywords.push(p.ch);
                i += 1;
            }
        }
    }
    let paren_at = match paren {
        Some(at) => at,
        None => {
            let (line, col) = body
                .last()
                .map(|p| (p.line, p.col + 1))
                .unwrap_or((1, 1));
            return Err(syntax(line, col, "'(source search)' after keywords"));
        }
    };
    let keywords = keywords.trim().to_string();
    if keywords.is_empty() {
        let p = body.get(paren_at).expect("paren index is in range");
        return Err(syntax(p.line, p.col, "non-empty keywords before '('"));
    }

    // Source group: `(<tag> search)`.
    let group = &body[paren_at + 1..];
    let group = trim_leading_ws(group);
    let mut len = 0;
    while len < group.len()
        && (group[len].ch.is_ascii_lowercase()
            || group[len].ch.is_ascii_digit()
            || group[len].ch == '_')
    {
        len += 1;
    }
    if len == 0 {
        let (line, col) = group
            .first()
            .map(|p| (p.line, p.col))
            .unwrap_or_else(|| (body[paren_at].line, body[paren_at].col + 1));
        return Err(syntax(line, col, "source tag ([a-z][a-z0-9_]*)"));
    }
    let tag_raw: String = group[..len].iter().map(|p| p.ch).collect();
    let after_tag = trim_leading_ws(&group[len..]);
    let search_word: String = after_tag.iter().take(6).map(|p| p.ch).collect();
    if search_word != "search" {
        let (line, col) = after_tag
            .first()
            .map(|p| (p.line, p.col))
            .unwrap_or((group[len - 1].line, group[len - 1].col + 1));
        return Err(syntax(line, col, "the word 'search' after the source tag"));
    }
    let after_search = trim_leading_ws(&after_tag[6..]);
    match after_search.first() {
        Some(p) if p.ch == ')' => {
            let tail = trim_ws(&after_search[1..]);
            if let Some(extra) = tail.first() {
                return Err(syntax(extra.line, extra.col, "end of node item after ')'"));
            }
        }
        Some(p) => return Err(syntax(p.line, p.col, "')'")),
        None => {
            let last = after_tag.last().expect("'search' was just read");
            return Err(syntax(last.line, last.col + 1, "')'"));
        }
    }

    let source = SourceTag::new(tag_raw)?;
    let node = PlanNode::new(id, keywords, source)?;
    Ok(Item::Node(node))
}
