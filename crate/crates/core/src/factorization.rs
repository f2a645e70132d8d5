//! The factorization rule as an explicit set of commuting squares.
//!
//! Paths are written outermost edge first: `[e_n, ..., e_1]` where `e_1`
//! is traversed first. A square `[a2, a1] ~ [b2, b1]` identifies two
//! bicolored 2-paths with transposed colors and shared endpoints.
//! Equivalence of longer paths is decided through normal forms obtained by
//! adjacent transpositions; classes are never materialized.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::skeleton::{ColoredDigraph, EdgeId, VertexId};

/// A composable 2-path `(outer, inner)`.
pub type TwoPath = (EdgeId, EdgeId);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    src: VertexId,
    rng: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    /// The degree-0 path anchored at `v`.
    pub fn vertex(v: VertexId) -> Path {
        Path {
            src: v,
            rng: v,
            edges: Vec::new(),
        }
    }

    /// A nonempty path, edges listed outermost first.
    pub fn new(g: &ColoredDigraph, edges: Vec<EdgeId>) -> Result<Path> {
        let (Some(&outer), Some(&inner)) = (edges.first(), edges.last()) else {
            return Err(Error::NotComposable("empty edge list".into()));
        };
        for w in edges.windows(2) {
            if g.src(w[0]) != g.rng(w[1]) {
                return Err(Error::NotComposable(format!(
                    "{} after {}",
                    g.edge_name(w[0]),
                    g.edge_name(w[1])
                )));
            }
        }
        Ok(Path {
            src: g.src(inner),
            rng: g.rng(outer),
            edges,
        })
    }

    pub fn from_names(g: &ColoredDigraph, names: &[&str]) -> Result<Path> {
        let edges = names
            .iter()
            .map(|n| g.edge_by_name(n))
            .collect::<Result<Vec<_>>>()?;
        Path::new(g, edges)
    }

    pub fn edge(g: &ColoredDigraph, e: EdgeId) -> Path {
        Path {
            src: g.src(e),
            rng: g.rng(e),
            edges: vec![e],
        }
    }

    pub fn src(&self) -> VertexId {
        self.src
    }

    pub fn rng(&self) -> VertexId {
        self.rng
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn color_word(&self, g: &ColoredDigraph) -> Vec<usize> {
        self.edges.iter().map(|&e| g.color(e)).collect()
    }

    /// Edge count per color, indexed `0..rank`.
    pub fn degree(&self, g: &ColoredDigraph) -> Vec<usize> {
        let mut d = vec![0; g.rank()];
        for &e in &self.edges {
            d[g.color(e) - 1] += 1;
        }
        d
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &Path) -> Result<Path> {
        if self.src != inner.rng {
            return Err(Error::NotComposable(format!(
                "source #{} vs range #{}",
                self.src.0, inner.rng.0
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&inner.edges);
        Ok(Path {
            src: inner.src,
            rng: self.rng,
            edges,
        })
    }

    pub fn display(&self, g: &ColoredDigraph) -> String {
        if self.edges.is_empty() {
            return g.vertex_name(self.src).to_string();
        }
        self.edges
            .iter()
            .map(|&e| g.edge_name(e))
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub fn two_path_name(g: &ColoredDigraph, p: TwoPath) -> String {
    format!("{}.{}", g.edge_name(p.0), g.edge_name(p.1))
}

/// One generator `lhs ~ rhs` of the factorization rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Square {
    pub lhs: TwoPath,
    pub rhs: TwoPath,
}

impl Square {
    pub fn new(lhs: TwoPath, rhs: TwoPath) -> Square {
        Square { lhs, rhs }
    }

    pub fn from_names(g: &ColoredDigraph, names: [&str; 4]) -> Result<Square> {
        let e = |n: &str| g.edge_by_name(n);
        Ok(Square {
            lhs: (e(names[0])?, e(names[1])?),
            rhs: (e(names[2])?, e(names[3])?),
        })
    }

    /// The side other than `p`, if `p` is one of the two sides.
    pub fn other_side(&self, p: TwoPath) -> Option<TwoPath> {
        if p == self.lhs {
            Some(self.rhs)
        } else if p == self.rhs {
            Some(self.lhs)
        } else {
            None
        }
    }

    pub fn sides(&self) -> [TwoPath; 2] {
        [self.lhs, self.rhs]
    }

    /// Reason the square violates the shape invariants, if any.
    pub fn defect(&self, g: &ColoredDigraph) -> Option<String> {
        let (a2, a1) = self.lhs;
        let (b2, b1) = self.rhs;
        let c = |e| g.color(e);
        if c(a2) == c(a1) {
            return Some("left side is monochrome".into());
        }
        if c(b2) != c(a1) || c(b1) != c(a2) {
            return Some("right side does not transpose the colors of the left side".into());
        }
        if g.src(a2) != g.rng(a1) {
            return Some("left side is not composable".into());
        }
        if g.src(b2) != g.rng(b1) {
            return Some("right side is not composable".into());
        }
        if g.src(a1) != g.src(b1) || g.rng(a2) != g.rng(b2) {
            return Some("sides have different endpoints".into());
        }
        None
    }

    pub fn display(&self, g: &ColoredDigraph) -> String {
        format!("{} = {}", two_path_name(g, self.lhs), two_path_name(g, self.rhs))
    }
}

/// The square generators together with a partner lookup on 2-paths.
///
/// Only well-formed squares enter the lookup, and the first square to
/// cover a 2-path owns it; [`validate_kg2`] reports everything else.
#[derive(Clone, Debug, Default)]
pub struct SquareSet {
    squares: Vec<Square>,
    owner: HashMap<TwoPath, usize>,
}

impl SquareSet {
    pub fn new(g: &ColoredDigraph, squares: Vec<Square>) -> SquareSet {
        let mut owner = HashMap::new();
        for (i, sq) in squares.iter().enumerate() {
            if sq.defect(g).is_some() {
                continue;
            }
            if owner.contains_key(&sq.lhs) || owner.contains_key(&sq.rhs) {
                continue;
            }
            owner.insert(sq.lhs, i);
            owner.insert(sq.rhs, i);
        }
        SquareSet { squares, owner }
    }

    pub fn from_names(g: &ColoredDigraph, names: &[[&str; 4]]) -> Result<SquareSet> {
        let squares = names
            .iter()
            .map(|n| Square::from_names(g, *n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareSet::new(g, squares))
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn partner(&self, p: TwoPath) -> Option<TwoPath> {
        self.owner
            .get(&p)
            .and_then(|&i| self.squares[i].other_side(p))
    }

    /// Index of the square covering `p`.
    pub fn square_index_of(&self, p: TwoPath) -> Option<usize> {
        self.owner.get(&p).copied()
    }

    pub fn square_of(&self, p: TwoPath) -> Option<&Square> {
        self.owner.get(&p).map(|&i| &self.squares[i])
    }

    /// A copy without the square at `index`.
    pub fn without(&self, g: &ColoredDigraph, index: usize) -> SquareSet {
        let mut squares = self.squares.clone();
        squares.remove(index);
        SquareSet::new(g, squares)
    }

    /// A copy with the square at `index` replaced.
    pub fn replaced(&self, g: &ColoredDigraph, index: usize, square: Square) -> SquareSet {
        let mut squares = self.squares.clone();
        squares[index] = square;
        SquareSet::new(g, squares)
    }
}

/// Every composable 2-path whose two edges have different colors.
pub fn bicolored_two_paths(g: &ColoredDigraph) -> Vec<TwoPath> {
    let mut out = Vec::new();
    for inner in g.edge_ids() {
        for &outer in g.out_edges(g.rng(inner)) {
            if g.color(outer) != g.color(inner) {
                out.push((outer, inner));
            }
        }
    }
    out
}

/// Every composable 3-path with three pairwise distinct colors.
pub fn tricolored_three_paths(g: &ColoredDigraph) -> Vec<[EdgeId; 3]> {
    let mut out = Vec::new();
    for (middle, inner) in bicolored_two_paths(g) {
        for &outer in g.out_edges(g.rng(middle)) {
            let c = g.color(outer);
            if c != g.color(middle) && c != g.color(inner) {
                out.push([outer, middle, inner]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalformedSquare {
    pub index: usize,
    pub square: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kg2Report {
    pub passed: bool,
    pub two_paths_checked: usize,
    pub malformed: Vec<MalformedSquare>,
    pub uncovered: Vec<String>,
    pub multiply_covered: Vec<String>,
}

/// Checks that every bicolored 2-path lies in exactly one well-formed square.
pub fn validate_kg2(g: &ColoredDigraph, s: &SquareSet) -> Kg2Report {
    let mut malformed = Vec::new();
    let mut coverage: HashMap<TwoPath, usize> = HashMap::new();
    for (index, sq) in s.squares().iter().enumerate() {
        match sq.defect(g) {
            Some(reason) => malformed.push(MalformedSquare {
                index,
                square: sq.display(g),
                reason,
            }),
            None => {
                *coverage.entry(sq.lhs).or_default() += 1;
                *coverage.entry(sq.rhs).or_default() += 1;
            }
        }
    }
    let paths = bicolored_two_paths(g);
    let mut uncovered = Vec::new();
    let mut multiply_covered = Vec::new();
    for &p in &paths {
        match coverage.get(&p).copied().unwrap_or(0) {
            0 => uncovered.push(two_path_name(g, p)),
            1 => {}
            _ => multiply_covered.push(two_path_name(g, p)),
        }
    }
    Kg2Report {
        passed: malformed.is_empty() && uncovered.is_empty() && multiply_covered.is_empty(),
        two_paths_checked: paths.len(),
        malformed,
        uncovered,
        multiply_covered,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidFailure {
    pub path: String,
    pub inner_first: String,
    pub outer_first: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kg3Report {
    pub passed: bool,
    pub three_paths_checked: usize,
    pub failures: Vec<BraidFailure>,
}

/// Braid check on every tricolored 3-path: swapping (inner, outer, inner)
/// must agree with (outer, inner, outer).
pub fn validate_kg3(g: &ColoredDigraph, s: &SquareSet, kg2: &Kg2Report) -> Result<Kg3Report> {
    if !kg2.passed {
        return Err(Error::Kg2NotEstablished);
    }
    let paths = tricolored_three_paths(g);
    let mut failures = Vec::new();
    for &p in &paths {
        let left = apply_swaps(g, s, p, &[1, 0, 1])?;
        let right = apply_swaps(g, s, p, &[0, 1, 0])?;
        if left != right {
            let show = |q: [EdgeId; 3]| {
                q.iter()
                    .map(|&e| g.edge_name(e))
                    .collect::<Vec<_>>()
                    .join(".")
            };
            failures.push(BraidFailure {
                path: show(p),
                inner_first: show(left),
                outer_first: show(right),
            });
        }
    }
    Ok(Kg3Report {
        passed: failures.is_empty(),
        three_paths_checked: paths.len(),
        failures,
    })
}

/// Position 0 swaps the outer pair, position 1 the inner pair.
fn apply_swaps(
    g: &ColoredDigraph,
    s: &SquareSet,
    mut p: [EdgeId; 3],
    positions: &[usize],
) -> Result<[EdgeId; 3]> {
    for &i in positions {
        let (x, y) = swap(g, s, (p[i], p[i + 1]))?;
        p[i] = x;
        p[i + 1] = y;
    }
    Ok(p)
}

/// The partner of a covered bicolored 2-path.
pub fn swap(g: &ColoredDigraph, s: &SquareSet, p: TwoPath) -> Result<TwoPath> {
    s.partner(p)
        .ok_or_else(|| Error::UncoveredPath(two_path_name(g, p)))
}

/// The equivalent path with color word `target`, by leftmost-inversion
/// bubble sort.
pub fn normalize(g: &ColoredDigraph, s: &SquareSet, p: &Path, target: &[usize]) -> Result<Path> {
    normalize_by(g, s, p, target, |_| 0)
}

/// Like [`normalize`], but `pick` chooses which adjacent inversion to
/// resolve next. It receives the (outer) positions of all current
/// inversions and returns an index into that slice.
pub fn normalize_by(
    g: &ColoredDigraph,
    s: &SquareSet,
    p: &Path,
    target: &[usize],
    mut pick: impl FnMut(&[usize]) -> usize,
) -> Result<Path> {
    let word = p.color_word(g);
    let mut sorted_word = word.clone();
    let mut sorted_target = target.to_vec();
    sorted_word.sort_unstable();
    sorted_target.sort_unstable();
    if sorted_word != sorted_target {
        return Err(Error::TargetNotPermutation {
            word,
            target: target.to_vec(),
        });
    }
    // The j-th occurrence of a color moves to the j-th slot of that color
    // in the target, so equal colors never need to cross.
    let mut slots: HashMap<usize, std::collections::VecDeque<usize>> = HashMap::new();
    for (i, &c) in target.iter().enumerate() {
        slots.entry(c).or_default().push_back(i);
    }
    let mut rank: Vec<usize> = word
        .iter()
        .map(|c| slots.get_mut(c).and_then(|q| q.pop_front()).unwrap_or(0))
        .collect();
    let mut edges = p.edges.clone();
    let mut inversions = Vec::new();
    loop {
        inversions.clear();
        inversions.extend((0..rank.len().saturating_sub(1)).filter(|&i| rank[i] > rank[i + 1]));
        if inversions.is_empty() {
            break;
        }
        let choice = pick(&inversions).min(inversions.len() - 1);
        let i = inversions[choice];
        let (x, y) = swap(g, s, (edges[i], edges[i + 1]))?;
        edges[i] = x;
        edges[i + 1] = y;
        rank.swap(i, i + 1);
    }
    Ok(Path {
        src: p.src,
        rng: p.rng,
        edges,
    })
}

/// The normal form with nondecreasing color word.
pub fn canonical_form(g: &ColoredDigraph, s: &SquareSet, p: &Path) -> Result<Path> {
    let mut word = p.color_word(g);
    word.sort_unstable();
    normalize(g, s, p, &word)
}

pub fn equivalent(g: &ColoredDigraph, s: &SquareSet, p: &Path, q: &Path) -> Result<bool> {
    if p.src != q.src || p.rng != q.rng || p.degree(g) != q.degree(g) {
        return Ok(false);
    }
    Ok(canonical_form(g, s, p)?.edges == canonical_form(g, s, q)?.edges)
}

/// Given two squares sharing `shared`, with `shared` outermost on a side of
/// `alpha` and innermost on a side of `beta`, returns the faces `(delta,
/// gamma)` of the 3-cube spanned by the boundary path: `delta` lies
/// opposite `beta` (at the cube's source) and `gamma` opposite `alpha`
/// (at the cube's range).
pub fn complete_cube(
    g: &ColoredDigraph,
    s: &SquareSet,
    alpha: &Square,
    beta: &Square,
    shared: EdgeId,
) -> Result<(Square, Square)> {
    let bad = |msg: &str| Error::NotComposableConfiguration(msg.to_string());
    let a = alpha
        .sides()
        .into_iter()
        .find(|p| p.0 == shared)
        .ok_or_else(|| bad("shared edge is not outermost on a side of the first square"))?
        .1;
    let b = beta
        .sides()
        .into_iter()
        .find(|p| p.1 == shared)
        .ok_or_else(|| bad("shared edge is not innermost on a side of the second square"))?
        .0;
    let (cb, cg, ca) = (g.color(b), g.color(shared), g.color(a));
    if cb == cg || cb == ca || cg == ca {
        return Err(bad("the boundary path does not use three distinct colors"));
    }
    let boundary = Path::new(g, vec![b, shared, a])?;
    let top = normalize(g, s, &boundary, &[cg, ca, cb])?;
    let bottom = normalize(g, s, &boundary, &[ca, cb, cg])?;
    let face = |p: TwoPath| {
        s.square_of(p)
            .copied()
            .ok_or_else(|| Error::UncoveredPath(two_path_name(g, p)))
    };
    let gamma = face((top.edges[0], top.edges[1]))?;
    let delta = face((bottom.edges[1], bottom.edges[2]))?;
    Ok((delta, gamma))
}

/// All paths of length `1..=max_len` whose color word is nondecreasing
/// (outermost first). In a k-graph these are exactly the canonical
/// representatives of the nonvertex morphisms up to that length.
pub fn enumerate_normal_forms(g: &ColoredDigraph, max_len: usize) -> Vec<Path> {
    fn extend(g: &ColoredDigraph, max_len: usize, edges: &mut Vec<EdgeId>, out: &mut Vec<Path>) {
        let last = *edges.last().expect("nonempty");
        out.push(Path {
            src: g.src(last),
            rng: g.rng(edges[0]),
            edges: edges.clone(),
        });
        if edges.len() == max_len {
            return;
        }
        for &inner in g.in_edges(g.src(last)) {
            if g.color(inner) >= g.color(last) {
                edges.push(inner);
                extend(g, max_len, edges, out);
                edges.pop();
            }
        }
    }
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    for e in g.edge_ids() {
        let mut edges = vec![e];
        extend(g, max_len, &mut edges, &mut out);
    }
    out
}
