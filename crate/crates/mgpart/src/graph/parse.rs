use super::{GraphBuilder, GraphError, Length, MetricGraph};

/// Parses the line-based `.mg` format.
///
/// ```text
/// # comment
/// graph lasso
/// vertex w
/// vertex v
/// edge stick w v 1
/// edge ring v v 3/2
/// dirichlet w
/// ```
pub fn parse_graph(text: &str) -> Result<MetricGraph, GraphError> {
    let at = |line: usize, error: GraphError| GraphError::AtLine {
        line,
        error: Box::new(error),
    };
    let mut b = GraphBuilder::new("graph");
    // line numbers for the semantic checks done by the builder
    let mut vertex_lines = Vec::new();
    let mut edge_lines = Vec::new();
    let mut dirichlet_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match (words[0], words.len()) {
            ("graph", n) if n >= 2 => {
                b.name(words[1..].join(" "));
            }
            ("vertex", 2) => {
                b.vertex(words[1]);
                vertex_lines.push((line, words[1].to_string()));
            }
            ("edge", 5) => {
                let len: Length = words[4]
                    .parse()
                    .map_err(|e: super::LengthParseError| at(line, GraphError::Syntax(e.to_string())))?;
                if !len.is_valid() {
                    return Err(at(
                        line,
                        GraphError::NonpositiveLength {
                            edge: words[1].to_string(),
                            value: words[4].to_string(),
                        },
                    ));
                }
                b.edge(words[1], words[2], words[3], len);
                edge_lines.push((line, words[1].to_string(), words[2].to_string(), words[3].to_string()));
            }
            ("dirichlet", 2) => {
                b.dirichlet(words[1]);
                dirichlet_lines.push((line, words[1].to_string()));
            }
            ("graph" | "vertex" | "edge" | "dirichlet", _) => {
                return Err(at(line, GraphError::Syntax(format!("wrong arity for `{}`", words[0]))));
            }
            (other, _) => {
                return Err(at(line, GraphError::Syntax(format!("unknown directive `{other}`"))));
            }
        }
    }
    b.build().map_err(|e| {
        let line = match &e {
            GraphError::DuplicateVertex(id) => vertex_lines.iter().filter(|(_, v)| v == id).nth(1).map(|x| x.0),
            GraphError::DuplicateEdge(id) => edge_lines.iter().filter(|x| &x.1 == id).nth(1).map(|x| x.0),
            GraphError::UnknownVertex(id) => edge_lines
                .iter()
                .find(|x| &x.2 == id || &x.3 == id)
                .map(|x| x.0)
                .or_else(|| dirichlet_lines.iter().find(|x| &x.1 == id).map(|x| x.0)),
            GraphError::IsolatedVertex(id) => vertex_lines.iter().find(|(_, v)| v == id).map(|x| x.0),
            _ => None,
        };
        match line {
            Some(line) => at(line, e),
            None => e,
        }
    })
}
