use serde::Serialize;

use super::{check_hr, induced_squares, is_reducible, neighborhood, Reducibility};
use crate::error::{Error, Result};
use crate::factorization::Path;
use crate::kgraph::{assemble, GradedFunctor, KGraph, PathFunctor, Realization};
use crate::skeleton::{ColorSet, ColoredDigraph, EdgeId, EdgeSpec, VertexId};

/// Shape of the parent image of an edge of the reduced graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParType {
    /// The edge itself (length 1).
    Xi,
    /// The re-sourced co-bridge followed by its bridge (length 2).
    Theta,
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub graph: KGraph,
    /// Parent realization of the reduced graph in the input graph.
    pub realization: Realization,
    pub bridge_color: usize,
    /// One entry per edge of `graph`.
    pub classification: Vec<ParType>,
    /// Edges of the input graph that were re-sourced.
    pub co_bridges: Vec<EdgeId>,
}

/// Deletes the neighborhood of `w` and every bridge edge, re-sourcing each
/// co-bridge through the bridge of color `bridge_color`.
pub fn reduce(k: &KGraph, w: VertexId, colors: &ColorSet, bridge_color: usize) -> Result<ReductionResult> {
    let g = k.skeleton();
    if !colors.contains(bridge_color) {
        return Err(Error::BridgeColorNotInB(bridge_color));
    }
    let report = check_hr(k, w, colors)?;
    if !report.passed {
        return Err(Error::HypothesesNotMet {
            vertex: report.vertex.clone(),
            reason: report.first_failure().unwrap_or_default(),
            report: Some(Box::new(report)),
        });
    }
    let u = neighborhood(k, w, colors)?;
    // bridge[x] = the bridge of color `bridge_color` into x, for x in U.
    let mut bridge: Vec<Option<EdgeId>> = vec![None; g.vertex_count()];
    for &x in &u.vertices {
        if let Reducibility::Reducible { bridges, .. } = is_reducible(k, x, colors)? {
            bridge[x.0] = Some(bridges[&bridge_color]);
        }
    }
    let in_u = |v: VertexId| bridge[v.0].is_some();
    let mut removed = vec![false; g.edge_count()];
    for &e in &u.edges {
        removed[e.0] = true;
    }
    for e in g.edge_ids() {
        if colors.contains(g.color(e)) && in_u(g.rng(e)) {
            removed[e.0] = true;
        }
    }
    let vertices: Vec<String> = g
        .vertex_ids()
        .filter(|&v| !in_u(v))
        .map(|v| g.vertex_name(v).to_string())
        .collect();
    let mut specs = Vec::new();
    let mut kept = Vec::new();
    let mut co_bridges = Vec::new();
    for e in g.edge_ids() {
        if removed[e.0] {
            continue;
        }
        let edge = g.edge(e);
        let src = match bridge[edge.src.0] {
            Some(f) => {
                co_bridges.push(e);
                g.src(f)
            }
            None => edge.src,
        };
        specs.push(EdgeSpec {
            id: edge.id.clone(),
            color: edge.color,
            src: g.vertex_name(src).to_string(),
            rng: g.vertex_name(edge.rng).to_string(),
        });
        kept.push(e);
    }
    let child = ColoredDigraph::new(g.rank(), vertices, specs)?;
    let mut classification = Vec::new();
    let mut edge_map = Vec::new();
    for &e in &kept {
        match bridge[g.src(e).0] {
            Some(f) => {
                classification.push(ParType::Theta);
                edge_map.push(Path::new(g, vec![e, f])?);
            }
            None => {
                classification.push(ParType::Xi);
                edge_map.push(Path::edge(g, e));
            }
        }
    }
    let vertex_map = child
        .vertex_names()
        .iter()
        .map(|v| g.vertex(v))
        .collect::<Result<Vec<_>>>()?;
    let par = PathFunctor { vertex_map, edge_map };
    let mut grading = GradedFunctor::degree(g);
    for &e in &co_bridges {
        grading.values[e.0][bridge_color - 1] -= 1;
    }
    let squares = induced_squares(k, &child, &par)?;
    let graph = assemble(child, squares)?;
    Ok(ReductionResult {
        realization: Realization {
            source: graph.clone(),
            target: k.clone(),
            functor: par,
            grading,
        },
        graph,
        bridge_color,
        classification,
        co_bridges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::kgraph::{check_graded_functor, verify_realization};

    fn fig_reduction() -> (KGraph, ReductionResult) {
        let k = generators::figure1();
        let r = reduce(&k, k.vertex("w").unwrap(), &ColorSet::new(3, [1, 2]).unwrap(), 1).unwrap();
        (k, r)
    }

    #[test]
    fn figure1_reduction_shape() {
        let (_, r) = fig_reduction();
        let g = r.graph.skeleton();
        assert_eq!(g.vertex_names(), ["v", "x", "y"]);
        let colored = g.edges().iter().filter(|e| e.color != 3).count();
        let loops = g.edges().iter().filter(|e| e.color == 3 && e.src == e.rng).count();
        assert_eq!((colored, loops, g.edge_count()), (6, 3, 9));
        let blue = g.edge(r.graph.edge("blue_wx").unwrap());
        assert_eq!((g.vertex_name(blue.src), g.vertex_name(blue.rng)), ("v", "x"));
    }

    #[test]
    fn figure1_grading() {
        let (k, r) = fig_reduction();
        let grading = &r.realization.grading;
        assert_eq!(grading.values[k.edge("blue_wx").unwrap().0], vec![-1, 1, 0]);
        assert_eq!(grading.values[k.edge("black_vw").unwrap().0], vec![1, 0, 0]);
        let report = check_graded_functor(&k, grading).unwrap();
        assert!(report.passed);
        let sq = k.path(&["black_wx", "blue_vw"]).unwrap();
        assert_eq!(grading.value(&sq), vec![0, 1, 0]);
        let realization = verify_realization(&r.realization, Some(3)).unwrap();
        assert!(realization.passed, "{realization:?}");
    }

    #[test]
    fn classification_matches_par_length() {
        let (_, r) = fig_reduction();
        for (e, t) in r.graph.skeleton().edge_ids().zip(&r.classification) {
            let len = r.realization.functor.edge_map[e.0].len();
            assert_eq!(len, if *t == ParType::Theta { 2 } else { 1 });
        }
        let thetas = r.classification.iter().filter(|t| **t == ParType::Theta).count();
        assert_eq!(thetas, 2);
    }

    #[test]
    fn reduction_errors() {
        let k = generators::figure1();
        let b = ColorSet::new(3, [1, 2]).unwrap();
        let w = k.vertex("w").unwrap();
        assert!(matches!(reduce(&k, w, &b, 3), Err(Error::BridgeColorNotInB(3))));
        let v = k.vertex("v").unwrap();
        let err = reduce(&k, v, &ColorSet::new(3, [3]).unwrap(), 3).unwrap_err();
        assert!(matches!(err, Error::HypothesesNotMet { report: Some(_), .. }));
    }
}
