//! JSON and Graphviz DOT exports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::format::KgDocument;

pub const PALETTE: [&str; 8] = ["black", "blue", "red", "darkgreen", "orange", "purple", "brown", "magenta"];
const STYLES: [&str; 4] = ["solid", "dashed", "dotted", "bold"];

#[derive(Serialize)]
struct JsonDocument<'a> {
    format: &'static str,
    #[serde(flatten)]
    doc: &'a KgDocument,
}

/// The canonical document as pretty-printed JSON.
pub fn to_json(doc: &KgDocument) -> String {
    let doc = doc.canonical();
    let wrapped = JsonDocument { format: "kg", doc: &doc };
    serde_json::to_string_pretty(&wrapped).expect("document serializes") + "\n"
}

/// Graphviz rendering of the skeleton. Squares are not drawn.
///
/// Color `c` is drawn in `PALETTE[(c - 1) % 8]` with line style
/// `STYLES[(c - 1) / 8 % 4]`. Every edge carries its id as a label so
/// parallel edges stay distinguishable; loops additionally attach to the
/// top of their vertex.
pub fn to_dot(doc: &KgDocument) -> String {
    let doc = doc.canonical();
    let mut out = String::new();
    out.push_str("// lossy export: factorization squares are not represented\n");
    out.push_str("digraph kgraph {\n");
    let _ = writeln!(out, "  // rank {}", doc.rank);
    for (c, name) in &doc.colors {
        let _ = writeln!(out, "  // color {c}: {name}");
    }
    for v in &doc.vertices {
        let _ = writeln!(out, "  \"{}\";", escape(v));
    }
    for e in &doc.edges {
        let color = PALETTE[(e.color - 1) % PALETTE.len()];
        let style = STYLES[(e.color - 1) / PALETTE.len() % STYLES.len()];
        let ports = if e.src == e.rng {
            ", tailport=\"n\", headport=\"n\""
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\", color=\"{color}\", fontcolor=\"{color}\", style=\"{style}\"{ports}];",
            escape(&e.src),
            escape(&e.rng),
            escape(&e.id)
        );
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn dot_marks_loops_and_palette() {
        let doc = KgDocument::from_kgraph(&generators::figure1());
        let dot = to_dot(&doc);
        assert!(dot.starts_with("// lossy export"));
        assert!(dot.contains("\"v\" -> \"v\" [label=\"red_v\", color=\"red\", fontcolor=\"red\", style=\"solid\", tailport=\"n\", headport=\"n\"];"));
        assert!(dot.contains("\"v\" -> \"w\" [label=\"blue_vw\", color=\"blue\""));
        assert_eq!(dot.matches(" -> ").count(), 12);
    }

    #[test]
    fn json_mirrors_document() {
        let doc = KgDocument::from_kgraph(&generators::torus(&[3, 1]).unwrap());
        let value: serde_json::Value = serde_json::from_str(&to_json(&doc)).unwrap();
        assert_eq!(value["format"], "kg");
        assert_eq!(value["version"], 1);
        assert_eq!(value["rank"], 2);
        assert_eq!(value["vertices"].as_array().unwrap().len(), 3);
        assert_eq!(value["edges"][0]["id"], "a0_0");
        assert_eq!(value["squares"].as_array().unwrap().len(), 3);
    }
}
