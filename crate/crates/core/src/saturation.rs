//! Hereditary and saturated closures of vertex sets, and the combinatorial
//! certificate bundled with a Reduction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kgraph::{
    check_graded_functor, isomorphic, source_free_report, verify_realization, GradingReport, KGraph, RealizationReport,
    SourceFreeReport,
};
use crate::moves::{check_hr, neighborhood, reduce, HrReport};
use crate::skeleton::{ColorSet, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// The vertex is the source of an edge into the set.
    Hereditary,
    /// All paths of some degree into the vertex start in the set.
    Saturated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub vertex: String,
    pub rule: Rule,
    /// The edge used by a hereditary step.
    pub edge: Option<String>,
    /// The degree used by a saturated step.
    pub degree: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Saturation {
    /// Members in vertex order.
    pub members: Vec<String>,
    #[serde(skip)]
    pub vertices: Vec<VertexId>,
    pub trace: Vec<TraceStep>,
    /// Largest total degree tried by the saturated rule; `None` when only
    /// the hereditary rule was applied.
    pub max_degree: Option<usize>,
    /// Every vertex of the graph is a member.
    pub everything: bool,
}

/// Least hereditary and saturated set containing `start`, with the
/// saturated rule limited to degrees of total size `1..=max_degree`.
pub fn saturate(k: &KGraph, start: &[VertexId], max_degree: usize) -> Result<Saturation> {
    closure(k, start, Some(max_degree))
}

/// Least hereditary set containing `start`.
pub fn hereditary_closure(k: &KGraph, start: &[VertexId]) -> Result<Saturation> {
    closure(k, start, None)
}

fn closure(k: &KGraph, start: &[VertexId], max_degree: Option<usize>) -> Result<Saturation> {
    let g = k.skeleton();
    let mut member = vec![false; g.vertex_count()];
    for &v in start {
        if v.0 >= g.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{}", v.0)));
        }
        member[v.0] = true;
    }
    let mut trace = Vec::new();
    loop {
        hereditary_pass(k, &mut member, &mut trace);
        let Some(bound) = max_degree else { break };
        let mut added = false;
        for v in g.vertex_ids() {
            if member[v.0] {
                continue;
            }
            if let Some(degree) = saturating_degree(k, v, &member, bound) {
                member[v.0] = true;
                trace.push(TraceStep {
                    vertex: g.vertex_name(v).to_string(),
                    rule: Rule::Saturated,
                    edge: None,
                    degree: Some(degree),
                });
                added = true;
                break;
            }
        }
        if !added {
            break;
        }
    }
    let vertices: Vec<VertexId> = g.vertex_ids().filter(|v| member[v.0]).collect();
    Ok(Saturation {
        members: vertices.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
        everything: vertices.len() == g.vertex_count(),
        vertices,
        trace,
        max_degree,
    })
}

fn hereditary_pass(k: &KGraph, member: &mut [bool], trace: &mut Vec<TraceStep>) {
    let g = k.skeleton();
    let mut queue: Vec<VertexId> = g.vertex_ids().filter(|v| member[v.0]).collect();
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        for &e in g.in_edges(v) {
            let s = g.src(e);
            if !member[s.0] {
                member[s.0] = true;
                queue.push(s);
                trace.push(TraceStep {
                    vertex: g.vertex_name(s).to_string(),
                    rule: Rule::Hereditary,
                    edge: Some(g.edge_name(e).to_string()),
                    degree: None,
                });
            }
        }
    }
}

/// Sources of all paths into `v` whose color word is `word` (outermost
/// first); every degree has exactly one such word in nondecreasing order.
fn sources_by_word(k: &KGraph, v: VertexId, word: &[usize]) -> Vec<VertexId> {
    let g = k.skeleton();
    let mut current = vec![v];
    for &c in word {
        let mut next: Vec<VertexId> = current
            .iter()
            .flat_map(|&u| g.in_edges_of_color(u, c).map(|e| g.src(e)))
            .collect();
        next.sort_unstable();
        next.dedup();
        current = next;
    }
    current
}

/// A degree `n` with `1 <= |n| <= bound` such that every path of degree `n`
/// into `v` starts in the set. An empty set of such paths qualifies.
fn saturating_degree(k: &KGraph, v: VertexId, member: &[bool], bound: usize) -> Option<Vec<usize>> {
    fn search(
        k: &KGraph,
        member: &[bool],
        bound: usize,
        current: Vec<VertexId>,
        word: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if !word.is_empty() && current.iter().all(|u| member[u.0]) {
            return Some(word.clone());
        }
        if word.len() == bound {
            return None;
        }
        let g = k.skeleton();
        let lowest = word.last().copied().unwrap_or(1);
        for c in lowest..=g.rank() {
            let mut next: Vec<VertexId> = current
                .iter()
                .flat_map(|&u| g.in_edges_of_color(u, c).map(|e| g.src(e)))
                .collect();
            next.sort_unstable();
            next.dedup();
            word.push(c);
            let found = search(k, member, bound, next, word);
            word.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let word = search(k, member, bound, vec![v], &mut Vec::new())?;
    let mut degree = vec![0; k.rank()];
    for c in word {
        degree[c - 1] += 1;
    }
    Some(degree)
}

/// Checks that every trace step is justified by the set built so far and
/// that replaying it from `start` yields exactly `result`.
pub fn verify_trace(k: &KGraph, start: &[VertexId], result: &Saturation) -> Result<bool> {
    let g = k.skeleton();
    let mut member = vec![false; g.vertex_count()];
    for &v in start {
        member[v.0] = true;
    }
    for step in &result.trace {
        let v = g.vertex(&step.vertex)?;
        if member[v.0] {
            return Ok(false);
        }
        let justified = match step.rule {
            Rule::Hereditary => {
                let Some(name) = &step.edge else { return Ok(false) };
                let e = g.edge_by_name(name)?;
                g.src(e) == v && member[g.rng(e).0]
            }
            Rule::Saturated => {
                let Some(degree) = &step.degree else { return Ok(false) };
                let word: Vec<usize> = degree
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &n)| std::iter::repeat_n(i + 1, n))
                    .collect();
                !word.is_empty() && sources_by_word(k, v, &word).iter().all(|u| member[u.0])
            }
        };
        if !justified {
            return Ok(false);
        }
        member[v.0] = true;
    }
    let replayed: Vec<VertexId> = g.vertex_ids().filter(|v| member[v.0]).collect();
    Ok(replayed == result.vertices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertificateBounds {
    /// Degree bound for the injectivity check of the parent realization.
    pub injectivity_degree: usize,
    /// Bound for the saturated rule; defaults to the number of vertices.
    pub max_degree: Option<usize>,
}

impl Default for CertificateBounds {
    fn default() -> Self {
        CertificateBounds {
            injectivity_degree: 3,
            max_degree: None,
        }
    }
}

/// Combinatorial evidence collected around one Reduction.
#[derive(Clone, Debug, Serialize)]
pub struct MoritaCertificate {
    pub vertex: String,
    pub colors: Vec<usize>,
    pub bridge_color: usize,
    pub hypotheses: HrReport,
    pub source_free: SourceFreeReport,
    pub grading: GradingReport,
    pub realization: RealizationReport,
    pub reduced_vertices: usize,
    pub reduced_edges: usize,
    /// The vertices kept by the reduction.
    pub corner: Vec<String>,
    pub saturation: Saturation,
    /// The hereditary rule alone reached every vertex.
    pub hereditary_only: bool,
    /// For every other color of the set: whether reducing through it gives
    /// an isomorphic graph. Informational; does not affect `passed`.
    pub bridge_color_agreement: Vec<(usize, bool)>,
    pub passed: bool,
}

pub fn morita_certificate(
    k: &KGraph,
    w: VertexId,
    colors: &ColorSet,
    bridge_color: usize,
    bounds: CertificateBounds,
) -> Result<MoritaCertificate> {
    let g = k.skeleton();
    let reduction = reduce(k, w, colors, bridge_color)?;
    let hypotheses = check_hr(k, w, colors)?;
    let source_free = source_free_report(k);
    let grading = check_graded_functor(k, &reduction.realization.grading)?;
    let realization = verify_realization(&reduction.realization, Some(bounds.injectivity_degree))?;
    let u = neighborhood(k, w, colors)?;
    let corner: Vec<VertexId> = g.vertex_ids().filter(|v| !u.vertices.contains(v)).collect();
    let mut saturation = hereditary_closure(k, &corner)?;
    let hereditary_only = saturation.everything;
    if !hereditary_only {
        let bound = bounds.max_degree.unwrap_or(g.vertex_count());
        saturation = saturate(k, &corner, bound)?;
    }
    let passed = hypotheses.passed
        && source_free.per_color_passed
        && grading.passed
        && realization.passed
        && saturation.everything;
    let mut bridge_color_agreement = Vec::new();
    for other in colors.iter().filter(|&c| c != bridge_color) {
        let agrees = reduce(k, w, colors, other).is_ok_and(|r| isomorphic(&r.graph, &reduction.graph).is_some());
        bridge_color_agreement.push((other, agrees));
    }
    let rg = reduction.graph.skeleton();
    Ok(MoritaCertificate {
        vertex: g.vertex_name(w).to_string(),
        colors: colors.iter().collect(),
        bridge_color,
        hypotheses,
        source_free,
        grading,
        realization,
        reduced_vertices: rg.vertex_count(),
        reduced_edges: rg.edge_count(),
        corner: corner.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
        saturation,
        hereditary_only,
        bridge_color_agreement,
        passed,
    })
}
