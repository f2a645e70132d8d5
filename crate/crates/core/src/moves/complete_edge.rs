use super::{induced_squares, is_stationary};
use crate::error::{Error, Result};
use crate::factorization::Path;
use crate::kgraph::{assemble, GradedFunctor, KGraph, PathFunctor, Realization};
use crate::skeleton::{ColorSet, ColoredDigraph, EdgeId, EdgeSpec, VertexId};

/// Exactly one edge of every color, all with the same endpoints, and
/// closed under squares against edges of any color.
pub fn is_complete_edge(k: &KGraph, edges: &[EdgeId]) -> bool {
    let g = k.skeleton();
    let mut colors: Vec<usize> = edges.iter().map(|&e| g.color(e)).collect();
    colors.sort_unstable();
    if colors != (1..=g.rank()).collect::<Vec<_>>() {
        return false;
    }
    is_stationary(k, edges, &ColorSet::all(g.rank())).passed
}

#[derive(Clone, Debug)]
pub struct CompleteEdgeReduction {
    pub graph: KGraph,
    pub realization: Realization,
    /// The common range of the edges leaving the removed vertex.
    pub redirect_target: String,
    /// The edge leaving the removed vertex used to extend redirected edges.
    pub fixed_edge: String,
}

/// Removes `w` together with the edges leaving it, and redirects every edge
/// into `w` to the range of those edges.
pub fn complete_edge_reduction(k: &KGraph, w: VertexId) -> Result<CompleteEdgeReduction> {
    let g = k.skeleton();
    if w.0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", w.0)));
    }
    let unmet = |reason: &str| Error::HypothesesNotMet {
        vertex: g.vertex_name(w).to_string(),
        reason: reason.to_string(),
        report: None,
    };
    let leaving = g.out_edges(w).to_vec();
    let entering = g.in_edges(w).to_vec();
    if !is_complete_edge(k, &leaving) {
        return Err(unmet("the edges leaving the vertex do not form a complete edge"));
    }
    if !is_complete_edge(k, &entering) {
        return Err(unmet("the edges entering the vertex do not form a complete edge"));
    }
    let x = g.rng(leaving[0]);
    if x == w {
        return Err(unmet("the complete edge leaving the vertex is a loop"));
    }
    let fixed = *leaving
        .iter()
        .find(|&&e| g.color(e) == 1)
        .expect("complete edge has every color");
    let vertices: Vec<String> = g
        .vertex_ids()
        .filter(|&v| v != w)
        .map(|v| g.vertex_name(v).to_string())
        .collect();
    let mut specs = Vec::new();
    let mut edge_map = Vec::new();
    for e in g.edge_ids() {
        if g.src(e) == w {
            continue;
        }
        let edge = g.edge(e);
        let redirected = edge.rng == w;
        let rng = if redirected { x } else { edge.rng };
        specs.push(EdgeSpec {
            id: edge.id.clone(),
            color: edge.color,
            src: g.vertex_name(edge.src).to_string(),
            rng: g.vertex_name(rng).to_string(),
        });
        edge_map.push(if redirected {
            Path::new(g, vec![fixed, e])?
        } else {
            Path::edge(g, e)
        });
    }
    let child = ColoredDigraph::new(g.rank(), vertices, specs)?;
    let vertex_map = child
        .vertex_names()
        .iter()
        .map(|v| g.vertex(v))
        .collect::<Result<Vec<_>>>()?;
    let par = PathFunctor { vertex_map, edge_map };
    let mut grading = GradedFunctor::degree(g);
    for &e in &leaving {
        grading.values[e.0][g.color(fixed) - 1] -= 1;
    }
    let squares = induced_squares(k, &child, &par)?;
    let graph = assemble(child, squares)?;
    Ok(CompleteEdgeReduction {
        realization: Realization {
            source: graph.clone(),
            target: k.clone(),
            functor: par,
            grading,
        },
        graph,
        redirect_target: g.vertex_name(x).to_string(),
        fixed_edge: g.edge_name(fixed).to_string(),
    })
}
