//! Validated k-graphs, graded functors, realizations and isomorphism.

mod iso;
mod realization;

pub use iso::{isomorphic, isomorphic_with, IsoOptions, Isomorphism, NamePairs};
pub use realization::{
    check_graded_functor, integer_left_inverse, verify_quasimorphism, verify_realization,
    GradedFunctor, GradingReport, GradingViolation, InjectivityReport, MonoidMap, PathFunctor,
    QuasimorphismReport, Realization, RealizationReport,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{
    self, validate_kg2, validate_kg3, Kg2Report, Kg3Report, Path, Square, SquareSet,
};
use crate::skeleton::{ColorSet, ColoredDigraph, EdgeId, EdgeSpec, VertexId};

/// A skeleton and square set that passed KG2 and KG3.
///
/// The only constructor is [`assemble`], so every value satisfies the
/// k-graph conditions.
#[derive(Clone, Debug)]
pub struct KGraph {
    skeleton: ColoredDigraph,
    squares: SquareSet,
    kg2: Kg2Report,
    kg3: Kg3Report,
}

pub fn assemble(skeleton: ColoredDigraph, squares: SquareSet) -> Result<KGraph> {
    let kg2 = validate_kg2(&skeleton, &squares);
    if !kg2.passed {
        return Err(Error::Kg2Failure(Box::new(kg2)));
    }
    let kg3 = validate_kg3(&skeleton, &squares, &kg2)?;
    if !kg3.passed {
        return Err(Error::Kg3Failure(Box::new(kg3)));
    }
    Ok(KGraph {
        skeleton,
        squares,
        kg2,
        kg3,
    })
}

impl KGraph {
    pub fn skeleton(&self) -> &ColoredDigraph {
        &self.skeleton
    }

    pub fn squares(&self) -> &SquareSet {
        &self.squares
    }

    pub fn rank(&self) -> usize {
        self.skeleton.rank()
    }

    pub fn kg2_report(&self) -> &Kg2Report {
        &self.kg2
    }

    pub fn kg3_report(&self) -> &Kg3Report {
        &self.kg3
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.skeleton.vertex(name)
    }

    pub fn edge(&self, name: &str) -> Result<EdgeId> {
        self.skeleton.edge_by_name(name)
    }

    pub fn path(&self, names: &[&str]) -> Result<Path> {
        Path::from_names(&self.skeleton, names)
    }

    pub fn normalize(&self, p: &Path, target: &[usize]) -> Result<Path> {
        factorization::normalize(&self.skeleton, &self.squares, p, target)
    }

    pub fn canonical_form(&self, p: &Path) -> Result<Path> {
        factorization::canonical_form(&self.skeleton, &self.squares, p)
    }

    pub fn equivalent(&self, p: &Path, q: &Path) -> Result<bool> {
        factorization::equivalent(&self.skeleton, &self.squares, p, q)
    }

    /// The sub-k-graph on the edges with color in `colors`, with colors
    /// relabelled `1..=|colors|` in increasing order.
    pub fn restrict_to_colors(&self, colors: &ColorSet) -> Result<KGraph> {
        if colors.is_empty() {
            return Err(Error::EmptyColorSet);
        }
        let g = &self.skeleton;
        let sub = g.subgraph_by_colors(colors)?;
        let relabel: Vec<usize> = (0..=g.rank())
            .map(|c| colors.iter().position(|x| x == c).map_or(0, |i| i + 1))
            .collect();
        let edges: Vec<EdgeSpec> = sub
            .edges()
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                color: relabel[e.color],
                src: g.vertex_name(e.src).to_string(),
                rng: g.vertex_name(e.rng).to_string(),
            })
            .collect();
        let skeleton = ColoredDigraph::new(colors.len(), g.vertex_names().iter().cloned(), edges)?;
        let mut squares = Vec::new();
        for sq in self.squares.squares() {
            if colors.contains(g.color(sq.lhs.0)) && colors.contains(g.color(sq.lhs.1)) {
                let e = |x: EdgeId| skeleton.edge_by_name(g.edge_name(x));
                squares.push(Square::new((e(sq.lhs.0)?, e(sq.lhs.1)?), (e(sq.rhs.0)?, e(sq.rhs.1)?)));
            }
        }
        let squares = SquareSet::new(&skeleton, squares);
        assemble(skeleton, squares)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexSourceFree {
    pub vertex: String,
    /// Some edge of any color has range here.
    pub aggregate: bool,
    /// For each color `1..=rank`, some edge of that color has range here.
    pub per_color: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceFreeReport {
    pub aggregate_passed: bool,
    pub per_color_passed: bool,
    pub vertices: Vec<VertexSourceFree>,
    /// `(vertex, color)` pairs with no incoming edge of that color.
    pub violations: Vec<(String, usize)>,
}

/// Both notions of source-freeness: the aggregate one (some incoming edge)
/// and the per-color one (an incoming edge of every color).
pub fn source_free_report(k: &KGraph) -> SourceFreeReport {
    let g = k.skeleton();
    let mut vertices = Vec::new();
    let mut violations = Vec::new();
    for v in g.vertex_ids() {
        let per_color: Vec<bool> = (1..=g.rank())
            .map(|c| g.in_edges_of_color(v, c).next().is_some())
            .collect();
        for (i, ok) in per_color.iter().enumerate() {
            if !ok {
                violations.push((g.vertex_name(v).to_string(), i + 1));
            }
        }
        vertices.push(VertexSourceFree {
            vertex: g.vertex_name(v).to_string(),
            aggregate: !g.in_edges(v).is_empty(),
            per_color,
        });
    }
    SourceFreeReport {
        aggregate_passed: vertices.iter().all(|v| v.aggregate),
        per_color_passed: violations.is_empty(),
        vertices,
        violations,
    }
}
