use std::collections::HashMap;

use serde::Serialize;

use super::KGraph;
use crate::error::{Error, Result};
use crate::factorization::{canonical_form, enumerate_normal_forms, equivalent, Path};
use crate::skeleton::{ColoredDigraph, VertexId};

/// A functor into `Z^dim` given by its values on edges; vertices map to 0
/// and paths to the sum over their edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedFunctor {
    pub dim: usize,
    pub values: Vec<Vec<i64>>,
}

impl GradedFunctor {
    /// The degree functor `d` of a skeleton.
    pub fn degree(g: &ColoredDigraph) -> GradedFunctor {
        let values = g
            .edges()
            .iter()
            .map(|e| unit(g.rank(), e.color))
            .collect();
        GradedFunctor {
            dim: g.rank(),
            values,
        }
    }

    pub fn value(&self, p: &Path) -> Vec<i64> {
        let mut total = vec![0; self.dim];
        for &e in p.edges() {
            for (t, v) in total.iter_mut().zip(&self.values[e.0]) {
                *t += v;
            }
        }
        total
    }
}

pub(crate) fn unit(dim: usize, color: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[color - 1] = 1;
    v
}

fn degree_i64(g: &ColoredDigraph, p: &Path) -> Vec<i64> {
    p.degree(g).into_iter().map(|x| x as i64).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradingViolation {
    pub square: String,
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradingReport {
    pub passed: bool,
    pub squares_checked: usize,
    pub violations: Vec<GradingViolation>,
}

/// A graded functor is well defined on classes iff it agrees on the two
/// sides of every square.
pub fn check_graded_functor(k: &KGraph, grading: &GradedFunctor) -> Result<GradingReport> {
    let g = k.skeleton();
    if grading.values.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "grading has {} edge values, graph has {} edges",
            grading.values.len(),
            g.edge_count()
        )));
    }
    let mut violations = Vec::new();
    for sq in k.squares().squares() {
        let lhs = Path::new(g, vec![sq.lhs.0, sq.lhs.1])?;
        let rhs = Path::new(g, vec![sq.rhs.0, sq.rhs.1])?;
        let (l, r) = (grading.value(&lhs), grading.value(&rhs));
        if l != r {
            violations.push(GradingViolation {
                square: sq.display(g),
                lhs: l,
                rhs: r,
            });
        }
    }
    Ok(GradingReport {
        passed: violations.is_empty(),
        squares_checked: k.squares().len(),
        violations,
    })
}

/// Vertex and edge images of a path-category functor `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFunctor {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<Path>,
}

impl PathFunctor {
    pub fn apply(&self, p: &Path) -> Result<Path> {
        let mut out = Path::vertex(self.vertex_map[p.src().0]);
        for &e in p.edges().iter().rev() {
            out = self.edge_map[e.0].compose(&out)?;
        }
        Ok(out)
    }

    /// Builds a functor from name pairs: every source edge must be listed.
    pub fn from_names(
        source: &ColoredDigraph,
        target: &ColoredDigraph,
        vertices: &[(&str, &str)],
        edges: &[(&str, &[&str])],
    ) -> Result<PathFunctor> {
        let mut vertex_map = vec![None; source.vertex_count()];
        for (a, b) in vertices {
            vertex_map[source.vertex(a)?.0] = Some(target.vertex(b)?);
        }
        let mut edge_map = vec![None; source.edge_count()];
        for (a, path) in edges {
            edge_map[source.edge_by_name(a)?.0] = Some(Path::from_names(target, path)?);
        }
        let vertex_map = vertex_map
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::UnknownVertex(source.vertex_name(VertexId(i)).into())))
            .collect::<Result<Vec<_>>>()?;
        let edge_map = edge_map
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| Error::UnknownEdge(source.edge_name(crate::skeleton::EdgeId(i)).into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathFunctor {
            vertex_map,
            edge_map,
        })
    }

    pub fn identity(g: &ColoredDigraph) -> PathFunctor {
        PathFunctor {
            vertex_map: g.vertex_ids().collect(),
            edge_map: g.edge_ids().map(|e| Path::edge(g, e)).collect(),
        }
    }
}

/// A functor from `source` (rank l) into `target` together with a grading
/// of `target` in `Z^l` that pulls back to the degree of `source`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub source: KGraph,
    pub target: KGraph,
    pub functor: PathFunctor,
    pub grading: GradedFunctor,
}

impl Realization {
    pub fn identity(k: &KGraph) -> Realization {
        Realization {
            source: k.clone(),
            target: k.clone(),
            functor: PathFunctor::identity(k.skeleton()),
            grading: GradedFunctor::degree(k.skeleton()),
        }
    }

    pub fn image(&self, p: &Path) -> Result<Path> {
        self.functor.apply(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub degree_bound: usize,
    pub morphisms_checked: usize,
    /// Pairs of distinct source morphisms with equivalent images.
    pub collisions: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizationReport {
    pub passed: bool,
    pub endpoint_failures: Vec<String>,
    pub degree_failures: Vec<String>,
    pub square_failures: Vec<String>,
    pub injectivity: Option<InjectivityReport>,
}

/// Checks endpoint compatibility, `grading . functor = d_source` on edges,
/// preservation of squares, and (when `injectivity_bound` is set)
/// injectivity on all morphisms of total degree up to the bound.
pub fn verify_realization(r: &Realization, injectivity_bound: Option<usize>) -> Result<RealizationReport> {
    let src = r.source.skeleton();
    let tgt = r.target.skeleton();
    if r.functor.edge_map.len() != src.edge_count() || r.functor.vertex_map.len() != src.vertex_count() {
        return Err(Error::DimensionMismatch("functor is not total on the source".into()));
    }
    if r.grading.dim != src.rank() || r.grading.values.len() != tgt.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "grading must assign Z^{} values to {} target edges",
            src.rank(),
            tgt.edge_count()
        )));
    }
    let mut endpoint_failures = Vec::new();
    let mut degree_failures = Vec::new();
    for e in src.edge_ids() {
        let img = &r.functor.edge_map[e.0];
        let name = src.edge_name(e);
        if img.src() != r.functor.vertex_map[src.src(e).0] || img.rng() != r.functor.vertex_map[src.rng(e).0] {
            endpoint_failures.push(format!("{name} -> {}", img.display(tgt)));
        }
        let got = r.grading.value(img);
        let want = unit(src.rank(), src.color(e));
        if got != want {
            degree_failures.push(format!("{name}: {got:?} != {want:?}"));
        }
    }
    let mut square_failures = Vec::new();
    if endpoint_failures.is_empty() {
        for sq in r.source.squares().squares() {
            let lhs = r.image(&Path::new(src, vec![sq.lhs.0, sq.lhs.1])?)?;
            let rhs = r.image(&Path::new(src, vec![sq.rhs.0, sq.rhs.1])?)?;
            if !equivalent(tgt, r.target.squares(), &lhs, &rhs)? {
                square_failures.push(sq.display(src));
            }
        }
    }
    let injectivity = match injectivity_bound {
        Some(bound) if endpoint_failures.is_empty() => Some(check_injectivity(r, bound)?),
        _ => None,
    };
    let passed = endpoint_failures.is_empty()
        && degree_failures.is_empty()
        && square_failures.is_empty()
        && injectivity.as_ref().is_none_or(|i| i.collisions.is_empty());
    Ok(RealizationReport {
        passed,
        endpoint_failures,
        degree_failures,
        square_failures,
        injectivity,
    })
}

fn check_injectivity(r: &Realization, bound: usize) -> Result<InjectivityReport> {
    let src = r.source.skeleton();
    let tgt = r.target.skeleton();
    let mut seen: HashMap<(VertexId, Vec<crate::skeleton::EdgeId>), String> = HashMap::new();
    let mut collisions = Vec::new();
    let mut checked = 0;
    let vertices = src.vertex_ids().map(Path::vertex);
    for p in vertices.chain(enumerate_normal_forms(src, bound)) {
        checked += 1;
        let img = canonical_form(tgt, r.target.squares(), &r.image(&p)?)?;
        let key = (img.src(), img.edges().to_vec());
        let name = p.display(src);
        if let Some(prev) = seen.get(&key) {
            collisions.push((prev.clone(), name));
        } else {
            seen.insert(key, name);
        }
    }
    Ok(InjectivityReport {
        degree_bound: bound,
        morphisms_checked: checked,
        collisions,
    })
}

/// A monoid morphism `N^cols -> N^rows` as a nonnegative integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidMap {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}

impl MonoidMap {
    pub fn new(entries: Vec<Vec<u64>>) -> Result<MonoidMap> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("monoid map must be a nonempty rectangular matrix".into()));
        }
        Ok(MonoidMap { rows, cols, entries })
    }

    pub fn identity(n: usize) -> MonoidMap {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        MonoidMap {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a as i64 * b).sum())
            .collect()
    }
}

/// An integer matrix `pi` (cols x rows) with `pi * omega = I`, found by
/// unimodular column reduction of `omega^T`.
pub fn integer_left_inverse(omega: &MonoidMap) -> Result<Vec<Vec<i64>>> {
    let (k, l) = (omega.rows, omega.cols);
    // m = omega^T (l x k); v accumulates the column operations (k x k).
    let mut m: Vec<Vec<i64>> = (0..l)
        .map(|i| (0..k).map(|j| omega.entries[j][i] as i64).collect())
        .collect();
    let mut v: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    let col_op = |m: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, dst: usize, src: usize, q: i64| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            row[dst] -= q * row[src];
        }
    };
    let swap_cols = |m: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, a: usize, b: usize| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            row.swap(a, b);
        }
    };
    let mut pivot = 0;
    let mut rank = 0;
    for i in 0..l {
        if pivot >= k {
            continue;
        }
        // Euclid across columns pivot..k on row i.
        loop {
            let nonzero: Vec<usize> = (pivot..k).filter(|&j| m[i][j] != 0).collect();
            if nonzero.len() <= 1 {
                if let Some(&j) = nonzero.first() {
                    swap_cols(&mut m, &mut v, pivot, j);
                }
                break;
            }
            let &jmin = nonzero
                .iter()
                .min_by_key(|&&j| m[i][j].abs())
                .expect("nonempty");
            swap_cols(&mut m, &mut v, pivot, jmin);
            for j in pivot + 1..k {
                if m[i][j] != 0 {
                    let q = m[i][j].div_euclid(m[i][pivot]);
                    col_op(&mut m, &mut v, j, pivot, q);
                }
            }
        }
        if m[i][pivot] != 0 {
            rank += 1;
            pivot += 1;
        }
    }
    if rank < l {
        return Err(Error::NotInjectiveOmega { rank, columns: l });
    }
    if (0..l).any(|i| m[i][i].abs() != 1) {
        return Err(Error::NoIntegerLeftInverse);
    }
    // h = m[.., ..l] is lower triangular with unit diagonal up to sign.
    // Solve x * h = I for x (l x l) row by row from the bottom.
    let mut hinv = vec![vec![0i64; l]; l];
    for c in 0..l {
        // column c of h^{-1}: h * y = e_c by forward substitution.
        let mut y = vec![0i64; l];
        for i in 0..l {
            let acc: i64 = (0..i).map(|j| m[i][j] * y[j]).sum();
            y[i] = (i64::from(i == c) - acc) * m[i][i];
        }
        for (row, yi) in hinv.iter_mut().zip(y) {
            row[c] = yi;
        }
    }
    // pi = (v[.., ..l] * hinv)^T, an l x k matrix.
    let mut pi = vec![vec![0i64; k]; l];
    for (r, pi_row) in pi.iter_mut().enumerate() {
        for (j, out) in pi_row.iter_mut().enumerate() {
            *out = (0..l).map(|t| v[j][t] * hinv[t][r]).sum();
        }
    }
    Ok(pi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasimorphismReport {
    pub passed: bool,
    pub endpoint_failures: Vec<String>,
    pub degree_failures: Vec<String>,
    pub square_failures: Vec<String>,
    pub left_inverse: Option<Vec<Vec<i64>>>,
    pub induced_realization: Option<RealizationReport>,
}

/// Checks `omega . d_source = d_target . psi` and square compatibility.
/// With `induce`, also builds the realization graded by `pi . d_target`
/// for an integer left inverse `pi` of `omega` and verifies it.
pub fn verify_quasimorphism(
    source: &KGraph,
    target: &KGraph,
    psi: &PathFunctor,
    omega: &MonoidMap,
    induce: bool,
) -> Result<QuasimorphismReport> {
    let src = source.skeleton();
    let tgt = target.skeleton();
    if omega.rows != tgt.rank() || omega.cols != src.rank() {
        return Err(Error::DimensionMismatch(format!(
            "omega must be {}x{}, got {}x{}",
            tgt.rank(),
            src.rank(),
            omega.rows,
            omega.cols
        )));
    }
    if psi.edge_map.len() != src.edge_count() || psi.vertex_map.len() != src.vertex_count() {
        return Err(Error::DimensionMismatch("functor is not total on the source".into()));
    }
    let mut endpoint_failures = Vec::new();
    let mut degree_failures = Vec::new();
    for e in src.edge_ids() {
        let img = &psi.edge_map[e.0];
        let name = src.edge_name(e);
        if img.src() != psi.vertex_map[src.src(e).0] || img.rng() != psi.vertex_map[src.rng(e).0] {
            endpoint_failures.push(format!("{name} -> {}", img.display(tgt)));
        }
        let want = omega.apply(&unit(src.rank(), src.color(e)));
        let got = degree_i64(tgt, img);
        if got != want {
            degree_failures.push(format!("{name}: {got:?} != {want:?}"));
        }
    }
    let mut square_failures = Vec::new();
    if endpoint_failures.is_empty() {
        for sq in source.squares().squares() {
            let lhs = psi.apply(&Path::new(src, vec![sq.lhs.0, sq.lhs.1])?)?;
            let rhs = psi.apply(&Path::new(src, vec![sq.rhs.0, sq.rhs.1])?)?;
            if !equivalent(tgt, target.squares(), &lhs, &rhs)? {
                square_failures.push(sq.display(src));
            }
        }
    }
    let mut passed = endpoint_failures.is_empty() && degree_failures.is_empty() && square_failures.is_empty();
    let (left_inverse, induced_realization) = if induce {
        let pi = integer_left_inverse(omega)?;
        let values = tgt
            .edges()
            .iter()
            .map(|e| pi.iter().map(|row| row[e.color - 1]).collect())
            .collect();
        let realization = Realization {
            source: source.clone(),
            target: target.clone(),
            functor: psi.clone(),
            grading: GradedFunctor {
                dim: src.rank(),
                values,
            },
        };
        let report = verify_realization(&realization, None)?;
        passed &= report.passed;
        (Some(pi), Some(report))
    } else {
        (None, None)
    };
    Ok(QuasimorphismReport {
        passed,
        endpoint_failures,
        degree_failures,
        square_failures,
        left_inverse,
        induced_realization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::kgraph::assemble;
    use crate::factorization::SquareSet;

    fn matmul(a: &[Vec<i64>], b: &MonoidMap) -> Vec<Vec<i64>> {
        a.iter()
            .map(|row| {
                (0..b.cols)
                    .map(|j| (0..b.rows).map(|t| row[t] * b.entries[t][j] as i64).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn left_inverse_examples() {
        let col = MonoidMap::new(vec![vec![1], vec![0]]).unwrap();
        assert_eq!(integer_left_inverse(&col).unwrap(), vec![vec![1, 0]]);

        let omega = MonoidMap::new(vec![vec![2, 1], vec![1, 1], vec![0, 3]]).unwrap();
        let pi = integer_left_inverse(&omega).unwrap();
        assert_eq!(matmul(&pi, &omega), vec![vec![1, 0], vec![0, 1]]);

        let zero = MonoidMap::new(vec![vec![0], vec![0]]).unwrap();
        assert!(matches!(integer_left_inverse(&zero), Err(Error::NotInjectiveOmega { rank: 0, columns: 1 })));

        let dup = MonoidMap::new(vec![vec![1, 1], vec![2, 2]]).unwrap();
        assert!(matches!(integer_left_inverse(&dup), Err(Error::NotInjectiveOmega { rank: 1, .. })));

        let doubling = MonoidMap::new(vec![vec![2]]).unwrap();
        assert!(matches!(integer_left_inverse(&doubling), Err(Error::NoIntegerLeftInverse)));
    }

    #[test]
    fn identity_realization_passes() {
        for k in [generators::torus(&[3, 1]).unwrap(), generators::figure1()] {
            let report = verify_realization(&Realization::identity(&k), Some(3)).unwrap();
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn wrong_grading_fails_degree_check() {
        let k = generators::torus(&[3, 1]).unwrap();
        let mut r = Realization::identity(&k);
        r.grading.values[0] = vec![0, 1];
        let report = verify_realization(&r, None).unwrap();
        assert!(!report.passed);
        assert_eq!(report.degree_failures.len(), 1);
    }

    #[test]
    fn degree_functor_is_always_well_defined() {
        for k in [generators::torus(&[2, 2, 2]).unwrap(), generators::figure1()] {
            let r = check_graded_functor(&k, &GradedFunctor::degree(k.skeleton())).unwrap();
            assert!(r.passed);
        }
    }

    #[test]
    fn lopsided_grading_breaks_a_square() {
        let k = generators::torus(&[3, 1]).unwrap();
        let g = k.skeleton();
        let mut grading = GradedFunctor {
            dim: 2,
            values: vec![vec![0, 0]; g.edge_count()],
        };
        grading.values[k.edge("b1_0").unwrap().0] = vec![1, 0];
        let r = check_graded_functor(&k, &grading).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations.len(), 2);
        assert!(r.violations.iter().all(|v| v.square.contains("b1_0")));
    }

    fn cycle3() -> KGraph {
        let g = ColoredDigraph::new(
            1,
            ["u0_0", "u1_0", "u2_0"],
            [
                ("a0_0", 1, "u0_0", "u1_0"),
                ("a1_0", 1, "u1_0", "u2_0"),
                ("a2_0", 1, "u2_0", "u0_0"),
            ],
        )
        .unwrap();
        let s = SquareSet::new(&g, vec![]);
        assemble(g, s).unwrap()
    }

    #[test]
    fn cycle_into_torus_quasimorphism() {
        let gamma = cycle3();
        let lambda = generators::torus(&[3, 1]).unwrap();
        let names = ["a0_0", "a1_0", "a2_0"];
        let edges: Vec<(&str, &[&str])> = names.iter().map(|n| (*n, std::slice::from_ref(n))).collect();
        let verts = [("u0_0", "u0_0"), ("u1_0", "u1_0"), ("u2_0", "u2_0")];
        let psi = PathFunctor::from_names(gamma.skeleton(), lambda.skeleton(), &verts, &edges).unwrap();
        let omega = MonoidMap::new(vec![vec![1], vec![0]]).unwrap();
        let report = verify_quasimorphism(&gamma, &lambda, &psi, &omega, true).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.left_inverse, Some(vec![vec![1, 0]]));

        let zero = MonoidMap::new(vec![vec![0], vec![0]]).unwrap();
        let report = verify_quasimorphism(&gamma, &lambda, &psi, &zero, false).unwrap();
        assert!(!report.passed);
        assert_eq!(report.degree_failures.len(), 3);
        assert!(matches!(
            verify_quasimorphism(&gamma, &lambda, &psi, &zero, true),
            Err(Error::NotInjectiveOmega { .. })
        ));
    }

    #[test]
    fn identity_is_a_one_quasimorphism() {
        let k = generators::figure1();
        let psi = PathFunctor::identity(k.skeleton());
        let report = verify_quasimorphism(&k, &k, &psi, &MonoidMap::identity(3), true).unwrap();
        assert!(report.passed);
    }
}
