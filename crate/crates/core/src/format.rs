//! The `.kg` text format.
//!
//! ```text
//! kg 1
//! rank 2
//! colors 1:black 2:blue
//! # square a2 a1 = b2 b1 means a2.a1 ~ b2.b1; the rightmost edge is traversed first
//! vertex u
//! edge a 1 u u
//! edge b 2 u u
//! square b a = a b
//! ```
//!
//! Other `#` lines are kept as metadata comments. Serialization is
//! canonical: vertices, edges and squares are each sorted, and every square
//! lists its lexicographically smaller side first.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::factorization::{Square, SquareSet};
use crate::kgraph::{assemble, KGraph};
use crate::skeleton::{ColoredDigraph, EdgeSpec};

pub const VERSION: u32 = 1;
pub const CONVENTION: &str =
    "# square a2 a1 = b2 b1 means a2.a1 ~ b2.b1; the rightmost edge is traversed first";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeDecl {
    pub id: String,
    pub color: usize,
    pub src: String,
    pub rng: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SquareDecl {
    pub lhs: [String; 2],
    pub rhs: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KgDocument {
    pub version: u32,
    pub rank: usize,
    pub colors: BTreeMap<usize, String>,
    pub comments: Vec<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDecl>,
    pub squares: Vec<SquareDecl>,
}

impl KgDocument {
    pub fn from_kgraph(k: &KGraph) -> KgDocument {
        let g = k.skeleton();
        let edges = g
            .edges()
            .iter()
            .map(|e| EdgeDecl {
                id: e.id.clone(),
                color: e.color,
                src: g.vertex_name(e.src).to_string(),
                rng: g.vertex_name(e.rng).to_string(),
            })
            .collect();
        let name = |e| g.edge_name(e).to_string();
        let squares = k
            .squares()
            .squares()
            .iter()
            .map(|sq| SquareDecl {
                lhs: [name(sq.lhs.0), name(sq.lhs.1)],
                rhs: [name(sq.rhs.0), name(sq.rhs.1)],
            })
            .collect();
        KgDocument {
            version: VERSION,
            rank: g.rank(),
            colors: BTreeMap::new(),
            comments: Vec::new(),
            vertices: g.vertex_names().to_vec(),
            edges,
            squares,
        }
        .canonical()
    }

    /// Sorted copy; each square lists its smaller side first.
    pub fn canonical(&self) -> KgDocument {
        let mut doc = self.clone();
        doc.vertices.sort();
        doc.edges.sort_by(|a, b| a.id.cmp(&b.id));
        for sq in &mut doc.squares {
            if sq.rhs < sq.lhs {
                std::mem::swap(&mut sq.lhs, &mut sq.rhs);
            }
        }
        doc.squares.sort();
        doc
    }

    pub fn to_kgraph(&self) -> Result<KGraph, FormatError> {
        let sem = |e: crate::Error| FormatError::Semantic(e.to_string());
        let specs = self.edges.iter().map(|e| EdgeSpec {
            id: e.id.clone(),
            color: e.color,
            src: e.src.clone(),
            rng: e.rng.clone(),
        });
        let g = ColoredDigraph::new(self.rank, self.vertices.iter().cloned(), specs).map_err(sem)?;
        let mut squares = Vec::new();
        for sq in &self.squares {
            let names = [&sq.lhs[0], &sq.lhs[1], &sq.rhs[0], &sq.rhs[1]].map(|s| s.as_str());
            let square = Square::from_names(&g, names).map_err(sem)?;
            if let Some(defect) = square.defect(&g) {
                return Err(FormatError::Semantic(format!(
                    "square {} {} = {} {}: {defect}",
                    names[0], names[1], names[2], names[3]
                )));
            }
            squares.push(square);
        }
        let set = SquareSet::new(&g, squares);
        let report = crate::factorization::validate_kg2(&g, &set);
        if let Some(p) = report.multiply_covered.first() {
            return Err(FormatError::Semantic(format!("2-path {p} appears in more than one square")));
        }
        if let Some(p) = report.uncovered.first() {
            return Err(FormatError::Semantic(format!("2-path {p} is not covered by any square")));
        }
        assemble(g, set).map_err(|e| match e {
            crate::Error::Kg3Failure(r) => FormatError::Semantic(format!(
                "braid condition fails on {}",
                r.failures.first().map(|f| f.path.as_str()).unwrap_or("?")
            )),
            other => sem(other),
        })
    }
}

pub fn serialize(doc: &KgDocument) -> String {
    let doc = doc.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "kg {}", doc.version);
    let _ = writeln!(out, "rank {}", doc.rank);
    if !doc.colors.is_empty() {
        let names: Vec<String> = doc.colors.iter().map(|(c, n)| format!("{c}:{n}")).collect();
        let _ = writeln!(out, "colors {}", names.join(" "));
    }
    let _ = writeln!(out, "{CONVENTION}");
    for c in &doc.comments {
        if c.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {c}");
        }
    }
    for v in &doc.vertices {
        let _ = writeln!(out, "vertex {v}");
    }
    for e in &doc.edges {
        let _ = writeln!(out, "edge {} {} {} {}", e.id, e.color, e.src, e.rng);
    }
    for sq in &doc.squares {
        let _ = writeln!(out, "square {} {} = {} {}", sq.lhs[0], sq.lhs[1], sq.rhs[0], sq.rhs[1]);
    }
    out
}

pub fn write_kgraph(k: &KGraph) -> String {
    serialize(&KgDocument::from_kgraph(k))
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse(text: &str) -> Result<KgDocument, FormatError> {
    let mut doc = KgDocument {
        version: VERSION,
        rank: 0,
        colors: BTreeMap::new(),
        comments: Vec::new(),
        vertices: Vec::new(),
        edges: Vec::new(),
        squares: Vec::new(),
    };
    let mut seen_header = false;
    let mut seen_rank = false;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let syntax = |column: usize, expected: &str| FormatError::Syntax {
            line,
            column,
            expected: expected.to_string(),
        };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if trimmed != CONVENTION {
                let body = rest.strip_prefix(' ').unwrap_or(rest);
                doc.comments.push(body.to_string());
            }
            continue;
        }
        let toks = tokens(raw);
        let end = raw.trim_end().len() + 1;
        let (col, keyword) = toks[0];
        let arg = |i: usize, expected: &str| -> Result<&str, FormatError> {
            toks.get(i).map(|t| t.1).ok_or_else(|| syntax(end, expected))
        };
        let number = |i: usize, expected: &str| -> Result<usize, FormatError> {
            let s = arg(i, expected)?;
            s.parse::<usize>().map_err(|_| syntax(toks[i].0, expected))
        };
        let exact = |n: usize| -> Result<(), FormatError> {
            match toks.get(n) {
                Some(&(c, _)) => Err(syntax(c, "end of line")),
                None => Ok(()),
            }
        };
        if !seen_header {
            if keyword != "kg" {
                return Err(syntax(col, "header `kg 1`"));
            }
            let v = number(1, "format version")?;
            if v != VERSION as usize {
                return Err(syntax(toks[1].0, "format version 1"));
            }
            exact(2)?;
            seen_header = true;
            continue;
        }
        match keyword {
            "rank" if !seen_rank => {
                doc.rank = number(1, "rank")?;
                if doc.rank == 0 {
                    return Err(syntax(toks[1].0, "positive rank"));
                }
                exact(2)?;
                seen_rank = true;
            }
            _ if !seen_rank => return Err(syntax(col, "`rank`")),
            "colors" => {
                if toks.len() < 2 {
                    return Err(syntax(end, "color names"));
                }
                for &(c, tok) in &toks[1..] {
                    let Some((num, name)) = tok.split_once(':') else {
                        return Err(syntax(c, "COLOR:NAME"));
                    };
                    let num: usize = num.parse().map_err(|_| syntax(c, "color number"))?;
                    if name.is_empty() {
                        return Err(syntax(c + tok.len(), "color name"));
                    }
                    doc.colors.insert(num, name.to_string());
                }
            }
            "vertex" => {
                doc.vertices.push(arg(1, "vertex id")?.to_string());
                exact(2)?;
            }
            "edge" => {
                doc.edges.push(EdgeDecl {
                    id: arg(1, "edge id")?.to_string(),
                    color: number(2, "edge color")?,
                    src: arg(3, "source vertex")?.to_string(),
                    rng: arg(4, "range vertex")?.to_string(),
                });
                exact(5)?;
            }
            "square" => {
                let a2 = arg(1, "edge id")?.to_string();
                let a1 = arg(2, "edge id")?.to_string();
                if arg(3, "`=`")? != "=" {
                    return Err(syntax(toks[3].0, "`=`"));
                }
                let b2 = arg(4, "edge id")?.to_string();
                let b1 = arg(5, "edge id")?.to_string();
                exact(6)?;
                doc.squares.push(SquareDecl {
                    lhs: [a2, a1],
                    rhs: [b2, b1],
                });
            }
            _ => return Err(syntax(col, "`vertex`, `edge`, `square` or `colors`")),
        }
    }
    if !seen_header {
        return Err(FormatError::Syntax {
            line: 1,
            column: 1,
            expected: "header `kg 1`".into(),
        });
    }
    if !seen_rank {
        return Err(FormatError::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            expected: "`rank`".into(),
        });
    }
    if let Some((&c, _)) = doc.colors.iter().find(|(&c, _)| c == 0 || c > doc.rank) {
        return Err(FormatError::Semantic(format!("color {c} is outside 1..={}", doc.rank)));
    }
    Ok(doc)
}

pub fn read_kgraph(text: &str) -> Result<KGraph, FormatError> {
    parse(text)?.to_kgraph()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn torus_file_round_trip() {
        let text = write_kgraph(&generators::torus(&[3, 1]).unwrap());
        let k = read_kgraph(&text).unwrap();
        assert_eq!(k.skeleton().vertex_count(), 3);
        assert_eq!(k.skeleton().edge_count(), 6);
        assert_eq!(k.squares().len(), 3);
        assert_eq!(write_kgraph(&k), text);
    }

    #[test]
    fn canonical_documents_are_fixed_points() {
        let mut doc = KgDocument::from_kgraph(&generators::figure1());
        doc.colors.insert(1, "black".into());
        doc.colors.insert(3, "red".into());
        doc.comments.push("generated fixture".into());
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn monochrome_square_is_semantic() {
        let text = "kg 1\nrank 1\nvertex p\nedge a 1 p p\nedge b 1 p p\nsquare a b = b a\n";
        assert!(matches!(read_kgraph(text), Err(FormatError::Semantic(_))));
    }

    #[test]
    fn syntax_errors_point_at_tokens() {
        let err = parse("kg 1\nrank 2\nedge a x u u\n").unwrap_err();
        assert_eq!(
            err,
            FormatError::Syntax {
                line: 3,
                column: 8,
                expected: "edge color".into()
            }
        );
        let err = parse("kg 1\nrank 2\nsquare a b c d e\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 3, column: 12, .. }));
        assert!(matches!(parse("rank 1\n"), Err(FormatError::Syntax { line: 1, column: 1, .. })));
        assert!(matches!(parse("kg 1\nvertex p\n"), Err(FormatError::Syntax { line: 2, .. })));
    }

    #[test]
    fn dangling_and_duplicate_ids_are_semantic() {
        let dangling = "kg 1\nrank 1\nvertex p\nedge a 1 p q\n";
        let err = read_kgraph(dangling).unwrap_err();
        assert!(err.to_string().contains('q'));
        let double = "kg 1\nrank 2\nvertex p\nedge a 1 p p\nedge b 2 p p\nsquare b a = a b\nsquare a b = b a\n";
        let err = read_kgraph(double).unwrap_err();
        assert!(err.to_string().contains("more than one square"), "{err}");
    }
}
