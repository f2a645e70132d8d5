//! Graph moves: products, Reduction, Delay and Complete-Edge Reduction,
//! with their hypothesis predicates.

mod complete_edge;
mod delay;
mod product;
mod reduction;

pub use complete_edge::{complete_edge_reduction, is_complete_edge, CompleteEdgeReduction};
pub use delay::{delay, DelayClass, DelayResult};
pub use product::product;
pub use reduction::{reduce, ParType, ReductionResult};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{bicolored_two_paths, equivalent, two_path_name, Path, Square, SquareSet};
use crate::kgraph::{KGraph, PathFunctor};
use crate::skeleton::{ColorSet, ColoredDigraph, Component, EdgeId, VertexId};

/// The component of `w` in the subgraph of colors outside `colors`, with
/// edge directions ignored.
pub fn neighborhood(k: &KGraph, w: VertexId, colors: &ColorSet) -> Result<Component> {
    let g = k.skeleton();
    if colors.is_empty() {
        return Err(Error::EmptyColorSet);
    }
    if w.0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", w.0)));
    }
    Ok(g.component_filtered(w, |e| !colors.contains(e.color)))
}

/// The reducibility conditions, in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Exactly one incoming edge of each color in the set.
    OneEdgePerColor,
    /// Those edges share their source.
    CommonSource,
    /// No edge of the color set runs from the vertex to itself.
    NoLoop,
    /// Every edge from the common source to the vertex has a color in the set.
    BackEdgesInColorSet,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::OneEdgePerColor => "one_edge_per_color",
            Condition::CommonSource => "common_source",
            Condition::NoLoop => "no_loop",
            Condition::BackEdgesInColorSet => "back_edges_in_color_set",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reducibility {
    /// The common source and the bridge edge for each color.
    Reducible {
        source: VertexId,
        bridges: BTreeMap<usize, EdgeId>,
    },
    NotReducible { condition: Condition, detail: String },
}

impl Reducibility {
    pub fn is_reducible(&self) -> bool {
        matches!(self, Reducibility::Reducible { .. })
    }
}

pub fn is_reducible(k: &KGraph, x: VertexId, colors: &ColorSet) -> Result<Reducibility> {
    let g = k.skeleton();
    if colors.is_empty() {
        return Err(Error::EmptyColorSet);
    }
    if x.0 >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", x.0)));
    }
    let fail = |condition, detail: String| Ok(Reducibility::NotReducible { condition, detail });
    let mut bridges = BTreeMap::new();
    for c in colors.iter() {
        let incoming: Vec<EdgeId> = g.in_edges_of_color(x, c).collect();
        if incoming.len() != 1 {
            return fail(
                Condition::OneEdgePerColor,
                format!("{} edges of color {c} end at {}", incoming.len(), g.vertex_name(x)),
            );
        }
        bridges.insert(c, incoming[0]);
    }
    let source = g.src(*bridges.values().next().expect("nonempty color set"));
    if let Some(&e) = bridges.values().find(|&&e| g.src(e) != source) {
        return fail(
            Condition::CommonSource,
            format!("{} starts at {}, not {}", g.edge_name(e), g.vertex_name(g.src(e)), g.vertex_name(source)),
        );
    }
    if let Some(&e) = g
        .out_edges(x)
        .iter()
        .find(|&&e| g.rng(e) == x && colors.contains(g.color(e)))
    {
        return fail(Condition::NoLoop, format!("{} is a loop at {}", g.edge_name(e), g.vertex_name(x)));
    }
    if let Some(&e) = g
        .out_edges(source)
        .iter()
        .find(|&&e| g.rng(e) == x && !colors.contains(g.color(e)))
    {
        return fail(
            Condition::BackEdgesInColorSet,
            format!("{} has color {} outside {colors}", g.edge_name(e), g.color(e)),
        );
    }
    Ok(Reducibility::Reducible { source, bridges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StationaryReport {
    pub passed: bool,
    pub common_endpoints: bool,
    /// Squares that would force an edge outside the set into it.
    pub failures: Vec<String>,
}

/// Checks that `edges` share endpoints and are closed under swapping
/// against edges of `colors` on either side.
pub fn is_stationary(k: &KGraph, edges: &[EdgeId], colors: &ColorSet) -> StationaryReport {
    let g = k.skeleton();
    let Some(&first) = edges.first() else {
        return StationaryReport {
            passed: false,
            common_endpoints: false,
            failures: vec!["empty edge set".into()],
        };
    };
    let common_endpoints = edges
        .iter()
        .all(|&e| g.src(e) == g.src(first) && g.rng(e) == g.rng(first));
    let mut failures = Vec::new();
    let mut note = |p: (EdgeId, EdgeId), q: Option<(EdgeId, EdgeId)>, needed: Option<EdgeId>| {
        let text = match (q, needed) {
            (Some(q), Some(n)) => format!(
                "{} ~ {} needs {}",
                two_path_name(g, p),
                two_path_name(g, q),
                g.edge_name(n)
            ),
            _ => format!("{} is not covered", two_path_name(g, p)),
        };
        if !failures.contains(&text) {
            failures.push(text);
        }
    };
    for &f in edges {
        for &lam in g.out_edges(g.rng(f)) {
            if colors.contains(g.color(lam)) && g.color(lam) != g.color(f) {
                match k.squares().partner((lam, f)) {
                    Some((_, mu)) if edges.contains(&mu) => {}
                    Some(q) => note((lam, f), Some(q), Some(q.1)),
                    None => note((lam, f), None, None),
                }
            }
        }
        for &lam in g.in_edges(g.src(f)) {
            if colors.contains(g.color(lam)) && g.color(lam) != g.color(f) {
                match k.squares().partner((f, lam)) {
                    Some((nu, _)) if edges.contains(&nu) => {}
                    Some(q) => note((f, lam), Some(q), Some(q.0)),
                    None => note((f, lam), None, None),
                }
            }
        }
    }
    StationaryReport {
        passed: common_endpoints && failures.is_empty(),
        common_endpoints,
        failures,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub vertex: String,
    pub reducible: bool,
    pub failed_condition: Option<Condition>,
    pub detail: Option<String>,
    pub common_source: Option<String>,
    /// Bridge edge per color.
    pub bridges: BTreeMap<usize, String>,
    /// Stationarity of the incoming edges with colors in the set.
    pub stationary: Option<StationaryReport>,
}

/// Full hypothesis check for a Reduction at `vertex` with color set
/// `colors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HrReport {
    pub vertex: String,
    pub colors: Vec<usize>,
    pub complement: Vec<usize>,
    pub neighborhood_vertices: Vec<String>,
    pub neighborhood_edges: Vec<String>,
    pub vertices: Vec<VertexCheck>,
    pub bridges: Vec<String>,
    pub co_bridges: Vec<String>,
    pub disjoint: bool,
    /// Every co-bridge ends outside the neighborhood.
    pub co_bridges_exit: bool,
    pub passed: bool,
}

impl HrReport {
    /// A one-line reason for failure, if any.
    pub fn first_failure(&self) -> Option<String> {
        for v in &self.vertices {
            if let Some(c) = v.failed_condition {
                return Some(format!("{} fails {c}: {}", v.vertex, v.detail.clone().unwrap_or_default()));
            }
            if let Some(s) = &v.stationary {
                if !s.passed {
                    return Some(format!("bridges into {} are not stationary", v.vertex));
                }
            }
        }
        if !self.disjoint {
            return Some("bridge and co-bridge edges overlap".into());
        }
        if !self.co_bridges_exit {
            return Some("a co-bridge ends inside the neighborhood".into());
        }
        None
    }
}

pub fn check_hr(k: &KGraph, w: VertexId, colors: &ColorSet) -> Result<HrReport> {
    let g = k.skeleton();
    let u = neighborhood(k, w, colors)?;
    let mut in_u = vec![false; g.vertex_count()];
    for &x in &u.vertices {
        in_u[x.0] = true;
    }
    let mut vertices = Vec::new();
    for &x in &u.vertices {
        let incoming: Vec<EdgeId> = g
            .in_edges(x)
            .iter()
            .copied()
            .filter(|&e| colors.contains(g.color(e)))
            .collect();
        let check = match is_reducible(k, x, colors)? {
            Reducibility::Reducible { source, bridges } => VertexCheck {
                vertex: g.vertex_name(x).to_string(),
                reducible: true,
                failed_condition: None,
                detail: None,
                common_source: Some(g.vertex_name(source).to_string()),
                bridges: bridges
                    .iter()
                    .map(|(&c, &e)| (c, g.edge_name(e).to_string()))
                    .collect(),
                stationary: Some(is_stationary(k, &incoming, colors)),
            },
            Reducibility::NotReducible { condition, detail } => VertexCheck {
                vertex: g.vertex_name(x).to_string(),
                reducible: false,
                failed_condition: Some(condition),
                detail: Some(detail),
                common_source: None,
                bridges: BTreeMap::new(),
                stationary: None,
            },
        };
        vertices.push(check);
    }
    let colored: Vec<EdgeId> = g.edge_ids().filter(|&e| colors.contains(g.color(e))).collect();
    let bridges: Vec<EdgeId> = colored.iter().copied().filter(|&e| in_u[g.rng(e).0]).collect();
    let co_bridges: Vec<EdgeId> = colored.iter().copied().filter(|&e| in_u[g.src(e).0]).collect();
    let disjoint = bridges.iter().all(|e| !co_bridges.contains(e));
    let co_bridges_exit = co_bridges.iter().all(|&e| !in_u[g.rng(e).0]);
    let passed = vertices
        .iter()
        .all(|v| v.reducible && v.stationary.as_ref().is_some_and(|s| s.passed))
        && disjoint
        && co_bridges_exit;
    let names = |es: &[EdgeId]| es.iter().map(|&e| g.edge_name(e).to_string()).collect();
    Ok(HrReport {
        vertex: g.vertex_name(w).to_string(),
        colors: colors.iter().collect(),
        complement: colors.complement(g.rank()).iter().collect(),
        neighborhood_vertices: u.vertices.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
        neighborhood_edges: names(&u.edges),
        vertices,
        bridges: names(&bridges),
        co_bridges: names(&co_bridges),
        disjoint,
        co_bridges_exit,
        passed,
    })
}

/// Squares on `child` read off from a parent functor: each bicolored
/// 2-path is paired with the unique transposed 2-path whose image is
/// equivalent to its own.
pub(crate) fn induced_squares(parent: &KGraph, child: &ColoredDigraph, par: &PathFunctor) -> Result<SquareSet> {
    let pg = parent.skeleton();
    let mut squares = Vec::new();
    let mut covered = std::collections::HashSet::new();
    for p in bicolored_two_paths(child) {
        if covered.contains(&p) {
            continue;
        }
        let (p2, p1) = p;
        let image = par.apply(&Path::new(child, vec![p2, p1])?)?;
        let mut found = Vec::new();
        for q1 in child.out_edges_of_color(child.src(p1), child.color(p2)) {
            for &q2 in child.out_edges(child.rng(q1)) {
                if child.color(q2) != child.color(p1) || child.rng(q2) != child.rng(p2) {
                    continue;
                }
                let other = par.apply(&Path::new(child, vec![q2, q1])?)?;
                if equivalent(pg, parent.squares(), &image, &other)? {
                    found.push((q2, q1));
                }
            }
        }
        if found.len() != 1 {
            return Err(Error::InducedSquareAmbiguity {
                path: two_path_name(child, p),
                candidates: found.len(),
            });
        }
        covered.insert(p);
        covered.insert(found[0]);
        squares.push(Square::new(p, found[0]));
    }
    Ok(SquareSet::new(child, squares))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn colors(k: &KGraph, c: &[usize]) -> ColorSet {
        ColorSet::new(k.rank(), c.iter().copied()).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        let k = generators::figure1();
        let w = k.vertex("w").unwrap();
        let u = neighborhood(&k, w, &colors(&k, &[1, 2])).unwrap();
        assert_eq!(u.vertices, vec![w]);
        assert_eq!(u.edges, vec![k.edge("red_w").unwrap()]);
        let u = neighborhood(&k, w, &colors(&k, &[1, 2, 3])).unwrap();
        assert_eq!(u.vertices, vec![w]);
        assert!(u.edges.is_empty());
    }

    #[test]
    fn reducibility_examples() {
        let k = generators::figure1();
        let w = k.vertex("w").unwrap();
        match is_reducible(&k, w, &colors(&k, &[1, 2])).unwrap() {
            Reducibility::Reducible { source, bridges } => {
                assert_eq!(source, k.vertex("v").unwrap());
                assert_eq!(bridges[&1], k.edge("black_vw").unwrap());
                assert_eq!(bridges[&2], k.edge("blue_vw").unwrap());
            }
            other => panic!("{other:?}"),
        }
        match is_reducible(&k, w, &colors(&k, &[3])).unwrap() {
            Reducibility::NotReducible { condition, .. } => assert_eq!(condition, Condition::NoLoop),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stationary_examples() {
        let k = generators::figure1();
        let b = colors(&k, &[1, 2]);
        let pair = [k.edge("black_vw").unwrap(), k.edge("blue_vw").unwrap()];
        assert!(is_stationary(&k, &pair, &b).passed);
        let single = is_stationary(&k, &pair[..1], &b);
        assert!(!single.passed);
        assert!(single.failures.iter().any(|f| f.ends_with("needs blue_vw")));
        let red = [k.edge("black_vw").unwrap()];
        assert!(is_stationary(&k, &red, &colors(&k, &[1])).passed);
    }

    #[test]
    fn hr_examples() {
        let k = generators::figure1();
        let report = check_hr(&k, k.vertex("w").unwrap(), &colors(&k, &[1, 2])).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.bridges, vec!["black_vw", "blue_vw"]);
        assert_eq!(report.co_bridges, vec!["black_wx", "blue_wx"]);
        assert!(report.co_bridges_exit);

        let report = check_hr(&k, k.vertex("v").unwrap(), &colors(&k, &[3])).unwrap();
        assert!(!report.passed);
        assert_eq!(report.vertices[0].failed_condition, Some(Condition::NoLoop));
        assert!(report.first_failure().unwrap().contains("no_loop"));
    }
}
