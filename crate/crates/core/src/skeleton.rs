//! Finite edge-colored directed multigraphs (1-skeletons).
//!
//! Vertices and edges carry caller-supplied string identifiers; internally
//! they are addressed by dense indices ([`VertexId`], [`EdgeId`]) in
//! declaration order. Colors are integers `1..=rank`. Loops and parallel
//! edges are allowed.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub color: usize,
    pub src: VertexId,
    pub rng: VertexId,
}

/// Edge declaration by name, as accepted by [`ColoredDigraph::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub id: String,
    pub color: usize,
    pub src: String,
    pub rng: String,
}

impl<A, B, C> From<(A, usize, B, C)> for EdgeSpec
where
    A: Into<String>,
    B: Into<String>,
    C: Into<String>,
{
    fn from((id, color, src, rng): (A, usize, B, C)) -> Self {
        EdgeSpec {
            id: id.into(),
            color,
            src: src.into(),
            rng: rng.into(),
        }
    }
}

/// A set of colors drawn from `1..=rank`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSet(BTreeSet<usize>);

impl ColorSet {
    pub fn new(rank: usize, colors: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = colors.into_iter().collect();
        if let Some(&c) = set.iter().find(|&&c| c == 0 || c > rank) {
            return Err(Error::ColorOutOfRange {
                token: format!("{c}"),
                color: c,
                rank,
            });
        }
        Ok(ColorSet(set))
    }

    pub fn all(rank: usize) -> Self {
        ColorSet((1..=rank).collect())
    }

    pub fn complement(&self, rank: usize) -> Self {
        ColorSet((1..=rank).filter(|c| !self.0.contains(c)).collect())
    }

    pub fn intersection(&self, other: &ColorSet) -> Self {
        ColorSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn contains(&self, color: usize) -> bool {
        self.0.contains(&color)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.iter().next_back().copied()
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Vertices and edges of a connected component, both in index order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct ColoredDigraph {
    rank: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl PartialEq for ColoredDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for ColoredDigraph {}

impl ColoredDigraph {
    /// Builds a skeleton, rejecting duplicate ids (across both namespaces),
    /// dangling endpoints and out-of-range colors.
    pub fn new<V, E>(rank: usize, vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator,
        E::Item: Into<EdgeSpec>,
    {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        let mut vertex_names = Vec::new();
        let mut vertex_index = HashMap::new();
        for v in vertices {
            let v: String = v.into();
            if vertex_index.contains_key(&v) {
                return Err(Error::DuplicateId(v));
            }
            vertex_index.insert(v.clone(), VertexId(vertex_names.len()));
            vertex_names.push(v);
        }
        let mut edge_list = Vec::new();
        let mut edge_index = HashMap::new();
        for spec in edges {
            let spec: EdgeSpec = spec.into();
            if edge_index.contains_key(&spec.id) || vertex_index.contains_key(&spec.id) {
                return Err(Error::DuplicateId(spec.id));
            }
            if spec.color == 0 || spec.color > rank {
                return Err(Error::ColorOutOfRange {
                    token: spec.id,
                    color: spec.color,
                    rank,
                });
            }
            let lookup = |name: &String| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::DanglingEndpoint {
                        edge: spec.id.clone(),
                        vertex: name.clone(),
                    })
            };
            let src = lookup(&spec.src)?;
            let rng = lookup(&spec.rng)?;
            edge_index.insert(spec.id.clone(), EdgeId(edge_list.len()));
            edge_list.push(Edge {
                id: spec.id,
                color: spec.color,
                src,
                rng,
            });
        }
        Ok(Self::from_parts(rank, vertex_names, edge_list, vertex_index, edge_index))
    }

    fn from_parts(
        rank: usize,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        vertex_index: HashMap<String, VertexId>,
        edge_index: HashMap<String, EdgeId>,
    ) -> Self {
        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.src.0].push(EdgeId(i));
            in_edges[e.rng.0].push(EdgeId(i));
        }
        ColoredDigraph {
            rank,
            vertices,
            edges,
            vertex_index,
            edge_index,
            out_edges,
            in_edges,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].id
    }

    pub fn color(&self, e: EdgeId) -> usize {
        self.edges[e.0].color
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].src
    }

    pub fn rng(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].rng
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_by_name(&self, name: &str) -> Result<EdgeId> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn has_id(&self, name: &str) -> bool {
        self.vertex_index.contains_key(name) || self.edge_index.contains_key(name)
    }

    /// Edges with source `v`, in declaration order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    /// Edges with range `v`, in declaration order.
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    /// Edges of `color` with range `v`.
    pub fn in_edges_of_color(&self, v: VertexId, color: usize) -> impl Iterator<Item = EdgeId> + '_ {
        self.in_edges[v.0]
            .iter()
            .copied()
            .filter(move |&e| self.color(e) == color)
    }

    /// Edges of `color` with source `v`.
    pub fn out_edges_of_color(&self, v: VertexId, color: usize) -> impl Iterator<Item = EdgeId> + '_ {
        self.out_edges[v.0]
            .iter()
            .copied()
            .filter(move |&e| self.color(e) == color)
    }

    /// Same vertex set, only the edges whose color lies in `colors`.
    pub fn subgraph_by_colors(&self, colors: &ColorSet) -> Result<ColoredDigraph> {
        if let Some(c) = colors.max().filter(|&c| c > self.rank) {
            return Err(Error::ColorOutOfRange {
                token: colors.to_string(),
                color: c,
                rank: self.rank,
            });
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| colors.contains(e.color))
            .cloned()
            .collect();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), EdgeId(i)))
            .collect();
        Ok(Self::from_parts(
            self.rank,
            self.vertices.clone(),
            edges,
            self.vertex_index.clone(),
            edge_index,
        ))
    }

    /// Connected component of `w` with edge directions ignored.
    pub fn undirected_component(&self, w: VertexId) -> Result<Component> {
        if w.0 >= self.vertices.len() {
            return Err(Error::UnknownVertex(format!("#{}", w.0)));
        }
        Ok(self.component_filtered(w, |_| true))
    }

    /// Connected component of `w` using only edges accepted by `keep`.
    pub(crate) fn component_filtered(&self, w: VertexId, keep: impl Fn(&Edge) -> bool) -> Component {
        let mut seen_v = vec![false; self.vertices.len()];
        let mut seen_e = vec![false; self.edges.len()];
        let mut queue = VecDeque::from([w]);
        seen_v[w.0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in self.out_edges[v.0].iter().chain(self.in_edges[v.0].iter()) {
                let edge = &self.edges[e.0];
                if seen_e[e.0] || !keep(edge) {
                    continue;
                }
                seen_e[e.0] = true;
                for u in [edge.src, edge.rng] {
                    if !seen_v[u.0] {
                        seen_v[u.0] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        Component {
            vertices: (0..seen_v.len()).filter(|&i| seen_v[i]).map(VertexId).collect(),
            edges: (0..seen_e.len()).filter(|&i| seen_e[i]).map(EdgeId).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure1_skeleton() -> ColoredDigraph {
        let cycle = [("v", "w"), ("w", "x"), ("x", "y"), ("y", "v")];
        let mut edges: Vec<EdgeSpec> = Vec::new();
        for (s, r) in cycle {
            edges.push((format!("black_{s}{r}"), 1, s, r).into());
            edges.push((format!("blue_{s}{r}"), 2, s, r).into());
        }
        for v in ["v", "w", "x", "y"] {
            edges.push((format!("red_{v}"), 3, v, v).into());
        }
        ColoredDigraph::new(3, ["v", "w", "x", "y"], edges).unwrap()
    }

    #[test]
    fn minimal_rank_one_skeleton() {
        let g = ColoredDigraph::new(1, ["p", "q"], [("e", 1, "q", "p"), ("l", 1, "q", "q")]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        let l = g.edge_by_name("l").unwrap();
        assert_eq!(g.src(l), g.rng(l));
    }

    #[test]
    fn figure1_has_twelve_edges() {
        let g = figure1_skeleton();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn construction_errors_name_the_token() {
        let err = ColoredDigraph::new(2, ["p"], [("e", 3, "p", "p")]).unwrap_err();
        assert!(matches!(err, Error::ColorOutOfRange { ref token, color: 3, rank: 2 } if token == "e"));
        let err = ColoredDigraph::new(1, ["p", "p"], Vec::<EdgeSpec>::new()).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(ref t) if t == "p"));
        let err = ColoredDigraph::new(1, ["p"], [("p", 1, "p", "p")]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(ref t) if t == "p"));
        let err = ColoredDigraph::new(1, ["p"], [("e", 1, "p", "q")]).unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { ref vertex, .. } if vertex == "q"));
    }

    #[test]
    fn color_subgraphs_of_figure1() {
        let g = figure1_skeleton();
        let red = g.subgraph_by_colors(&ColorSet::new(3, [3]).unwrap()).unwrap();
        assert_eq!(red.vertex_count(), 4);
        assert_eq!(red.edge_count(), 4);
        assert!(red.edges().iter().all(|e| e.src == e.rng));

        let cycle = g.subgraph_by_colors(&ColorSet::new(3, [1, 2]).unwrap()).unwrap();
        assert_eq!(cycle.vertex_count(), 4);
        assert_eq!(cycle.edge_count(), 8);
        assert!(cycle.edges().iter().all(|e| e.src != e.rng));

        assert_eq!(g.subgraph_by_colors(&ColorSet::all(3)).unwrap(), g);
    }

    #[test]
    fn subgraph_rejects_foreign_colors() {
        let g = figure1_skeleton();
        assert!(ColorSet::new(3, [4]).is_err());
        let wide = ColorSet::new(5, [4]).unwrap();
        assert!(matches!(g.subgraph_by_colors(&wide), Err(Error::ColorOutOfRange { .. })));
    }

    #[test]
    fn red_component_of_w_is_its_loop() {
        let g = figure1_skeleton();
        let red = g.subgraph_by_colors(&ColorSet::new(3, [3]).unwrap()).unwrap();
        let w = red.vertex("w").unwrap();
        let comp = red.undirected_component(w).unwrap();
        assert_eq!(comp.vertices, vec![w]);
        assert_eq!(comp.edges, vec![red.edge_by_name("red_w").unwrap()]);
    }

    #[test]
    fn isolated_vertex_component() {
        let g = ColoredDigraph::new(2, ["a", "b"], Vec::<EdgeSpec>::new()).unwrap();
        let a = g.vertex("a").unwrap();
        let comp = g.undirected_component(a).unwrap();
        assert_eq!(comp.vertices, vec![a]);
        assert!(comp.edges.is_empty());
        assert!(matches!(g.undirected_component(VertexId(7)), Err(Error::UnknownVertex(_))));
    }
}
