use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{complete_cube, two_path_name, Square, SquareSet};
use crate::kgraph::{assemble, KGraph};
use crate::skeleton::{ColoredDigraph, EdgeId, EdgeSpec};

/// One class of 2-paths mixing a linked edge with another color, and the
/// edge added for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DelayClass {
    pub edge: String,
    pub color: usize,
    /// The representative with the linked edge outermost.
    pub outer: String,
    /// The representative with the linked edge innermost.
    pub inner: String,
}

#[derive(Clone, Debug)]
pub struct DelayResult {
    pub graph: KGraph,
    pub delayed_edge: String,
    /// Edges of the delayed color linked to it through squares.
    pub linked: Vec<String>,
    pub classes: Vec<DelayClass>,
    /// Midpoint vertex added for each linked edge.
    pub added_vertices: Vec<String>,
    /// `(edge, first half, second half)` for each linked edge.
    pub split_edges: Vec<(String, String, String)>,
    /// Input edges carried over unchanged.
    pub inclusion: Vec<String>,
}

impl DelayResult {
    /// Name of the vertex added in the middle of the delayed edge.
    pub fn midpoint(&self) -> String {
        midpoint_name(&self.delayed_edge)
    }
}

fn midpoint_name(g: &str) -> String {
    format!("v__{g}")
}

fn half_name(g: &str, half: usize) -> String {
    format!("{g}__{half}")
}

/// Splits `f` and every edge linked to it into two halves through a new
/// midpoint vertex, adding one edge per square touching a linked edge.
pub fn delay(k: &KGraph, f: EdgeId) -> Result<DelayResult> {
    let g = k.skeleton();
    if f.0 >= g.edge_count() {
        return Err(Error::UnknownEdge(format!("#{}", f.0)));
    }
    let c1 = g.color(f);
    let squares = k.squares().squares();
    let mut squares_of: Vec<Vec<usize>> = vec![Vec::new(); g.edge_count()];
    for (i, sq) in squares.iter().enumerate() {
        for e in [sq.lhs.0, sq.lhs.1, sq.rhs.0, sq.rhs.1] {
            if g.color(e) == c1 && !squares_of[e.0].contains(&i) {
                squares_of[e.0].push(i);
            }
        }
    }
    // Breadth-first closure: the two delayed-color edges of a square are linked.
    let mut linked = vec![false; g.edge_count()];
    linked[f.0] = true;
    let mut queue = VecDeque::from([f]);
    while let Some(e) = queue.pop_front() {
        for &i in &squares_of[e.0] {
            for x in [squares[i].lhs.0, squares[i].lhs.1, squares[i].rhs.0, squares[i].rhs.1] {
                if g.color(x) == c1 && !linked[x.0] {
                    linked[x.0] = true;
                    queue.push_back(x);
                }
            }
        }
    }
    let linked_edges: Vec<EdgeId> = g.edge_ids().filter(|e| linked[e.0]).collect();

    // Each square through a linked edge is a class: (H, a) ~ (b, G) with H
    // the linked edge outermost and G the linked edge innermost.
    struct Class {
        square: usize,
        outer: (EdgeId, EdgeId),
        inner: (EdgeId, EdgeId),
        name: String,
    }
    let mut classes = Vec::new();
    for (i, sq) in squares.iter().enumerate() {
        let [p, q] = sq.sides();
        if !(linked[p.0 .0] || linked[p.1 .0]) {
            continue;
        }
        let (outer, inner) = if g.color(p.0) == c1 { (p, q) } else { (q, p) };
        let a = two_path_name(g, outer);
        let b = two_path_name(g, inner);
        let name = format!("e__{}", a.min(b));
        classes.push(Class {
            square: i,
            outer,
            inner,
            name,
        });
    }

    let mut taken: BTreeSet<String> = g.vertex_names().iter().cloned().collect();
    taken.extend(g.edges().iter().map(|e| e.id.clone()));
    let mut claim = |name: String| -> Result<String> {
        if !taken.insert(name.clone()) {
            return Err(Error::NameCollision(name));
        }
        Ok(name)
    };
    let mut vertices: Vec<String> = g.vertex_names().to_vec();
    let mut added_vertices = Vec::new();
    for &e in &linked_edges {
        let v = claim(midpoint_name(g.edge_name(e)))?;
        vertices.push(v.clone());
        added_vertices.push(v);
    }
    let mut specs = Vec::new();
    let mut split_edges = Vec::new();
    let mut inclusion = Vec::new();
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let (s, r) = (g.vertex_name(edge.src).to_string(), g.vertex_name(edge.rng).to_string());
        if linked[e.0] {
            let mid = midpoint_name(&edge.id);
            let h1 = claim(half_name(&edge.id, 1))?;
            let h2 = claim(half_name(&edge.id, 2))?;
            specs.push(EdgeSpec {
                id: h1.clone(),
                color: c1,
                src: s,
                rng: mid.clone(),
            });
            specs.push(EdgeSpec {
                id: h2.clone(),
                color: c1,
                src: mid,
                rng: r,
            });
            split_edges.push((edge.id.clone(), h1, h2));
        } else {
            specs.push(EdgeSpec {
                id: edge.id.clone(),
                color: edge.color,
                src: s,
                rng: r,
            });
            inclusion.push(edge.id.clone());
        }
    }
    let mut class_info = Vec::new();
    for c in &classes {
        let name = claim(c.name.clone())?;
        let (h, _) = c.outer;
        let (b, gg) = c.inner;
        specs.push(EdgeSpec {
            id: name.clone(),
            color: g.color(b),
            src: midpoint_name(g.edge_name(gg)),
            rng: midpoint_name(g.edge_name(h)),
        });
        class_info.push(DelayClass {
            edge: name,
            color: g.color(b),
            outer: two_path_name(g, c.outer),
            inner: two_path_name(g, c.inner),
        });
    }
    let child = ColoredDigraph::new(g.rank(), vertices, specs)?;
    let id = |name: &str| child.edge_by_name(name);
    let same = |e: EdgeId| id(g.edge_name(e));
    let half = |e: EdgeId, n: usize| id(&half_name(g.edge_name(e), n));

    let mut out = Vec::new();
    // Squares away from the linked edges carry over.
    for (i, sq) in squares.iter().enumerate() {
        if classes.iter().any(|c| c.square == i) {
            continue;
        }
        out.push(Square::new((same(sq.lhs.0)?, same(sq.lhs.1)?), (same(sq.rhs.0)?, same(sq.rhs.1)?)));
    }
    // Around each split: b.G2 ~ H2.e and e.G1 ~ H1.a.
    let mut class_of_square: HashMap<usize, usize> = HashMap::new();
    for (n, c) in classes.iter().enumerate() {
        let (h, a) = c.outer;
        let (b, gg) = c.inner;
        let e = id(&class_info[n].edge)?;
        out.push(Square::new((same(b)?, half(gg, 2)?), (half(h, 2)?, e)));
        out.push(Square::new((e, half(gg, 1)?), (half(h, 1)?, same(a)?)));
        class_of_square.insert(c.square, n);
    }
    // Between added edges of different colors, through cube completion.
    let mut seen = BTreeSet::new();
    for alpha in &classes {
        let shared = alpha.outer.0;
        for beta in &classes {
            if beta.inner.1 != shared || g.color(alpha.outer.1) == g.color(beta.inner.0) {
                continue;
            }
            let (delta, gamma) = complete_cube(g, k.squares(), &squares[alpha.square], &squares[beta.square], shared)?;
            let edge_of = |sq: &Square| -> Result<EdgeId> {
                let index = k
                    .squares()
                    .square_index_of(sq.lhs)
                    .and_then(|i| class_of_square.get(&i))
                    .ok_or_else(|| {
                        Error::NotComposableConfiguration(format!(
                            "cube face {} does not touch a linked edge",
                            sq.display(g)
                        ))
                    })?;
                id(&class_info[*index].edge)
            };
            let e_alpha = id(&alpha.name)?;
            let e_beta = id(&beta.name)?;
            let lhs = (e_beta, e_alpha);
            let rhs = (edge_of(&gamma)?, edge_of(&delta)?);
            let key = if lhs <= rhs { (lhs, rhs) } else { (rhs, lhs) };
            if seen.insert(key) {
                out.push(Square::new(lhs, rhs));
            }
        }
    }
    let squares = SquareSet::new(&child, out);
    let graph = assemble(child, squares)?;
    Ok(DelayResult {
        graph,
        delayed_edge: g.edge_name(f).to_string(),
        linked: linked_edges.iter().map(|&e| g.edge_name(e).to_string()).collect(),
        classes: class_info,
        added_vertices,
        split_edges,
        inclusion,
    })
}
