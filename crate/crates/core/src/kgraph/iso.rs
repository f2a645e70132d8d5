use std::collections::{BTreeMap, HashMap, VecDeque};

use super::KGraph;
use crate::factorization::Square;
use crate::skeleton::{ColoredDigraph, EdgeId, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsoOptions {
    /// Also try every permutation of the colors (`rank!` of them).
    pub allow_color_permutation: bool,
}

/// A bijection between two k-graphs. `color_map[c - 1]` is the image of
/// color `c`; it is the identity unless color permutations were allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub color_map: Vec<usize>,
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
}

pub type NamePairs = Vec<(String, String)>;

impl Isomorphism {
    /// `(source name, target name)` pairs for vertices then edges.
    pub fn named(&self, a: &KGraph, b: &KGraph) -> (NamePairs, NamePairs) {
        let (ga, gb) = (a.skeleton(), b.skeleton());
        let vertices = ga
            .vertex_ids()
            .map(|v| (ga.vertex_name(v).to_string(), gb.vertex_name(self.vertex_map[v.0]).to_string()))
            .collect();
        let edges = ga
            .edge_ids()
            .map(|e| (ga.edge_name(e).to_string(), gb.edge_name(self.edge_map[e.0]).to_string()))
            .collect();
        (vertices, edges)
    }
}

/// Color-fixing isomorphism search.
pub fn isomorphic(a: &KGraph, b: &KGraph) -> Option<Isomorphism> {
    isomorphic_with(a, b, &IsoOptions::default())
}

pub fn isomorphic_with(a: &KGraph, b: &KGraph, options: &IsoOptions) -> Option<Isomorphism> {
    let (ga, gb) = (a.skeleton(), b.skeleton());
    if ga.rank() != gb.rank()
        || ga.vertex_count() != gb.vertex_count()
        || ga.edge_count() != gb.edge_count()
        || a.squares().len() != b.squares().len()
    {
        return None;
    }
    let identity: Vec<usize> = (1..=ga.rank()).collect();
    if !options.allow_color_permutation {
        return Search::new(a, b, identity).run();
    }
    let mut perms = Vec::new();
    permutations(&mut identity.clone(), 0, &mut perms);
    perms.sort();
    perms.into_iter().find_map(|p| Search::new(a, b, p).run())
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Per color (already mapped): out-degree, in-degree, loop count.
type Profile = Vec<(usize, usize, usize)>;

fn profile(g: &ColoredDigraph, v: VertexId, color_map: &[usize]) -> Profile {
    let mut p = vec![(0, 0, 0); g.rank()];
    for &e in g.out_edges(v) {
        let c = color_map[g.color(e) - 1] - 1;
        p[c].0 += 1;
        if g.rng(e) == v {
            p[c].2 += 1;
        }
    }
    for &e in g.in_edges(v) {
        p[color_map[g.color(e) - 1] - 1].1 += 1;
    }
    p
}

struct Search<'a> {
    a: &'a KGraph,
    b: &'a KGraph,
    color_map: Vec<usize>,
    profiles_a: Vec<Profile>,
    profiles_b: Vec<Profile>,
    order: Vec<VertexId>,
    vmap: Vec<Option<VertexId>>,
    used_v: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(a: &'a KGraph, b: &'a KGraph, color_map: Vec<usize>) -> Self {
        let (ga, gb) = (a.skeleton(), b.skeleton());
        let identity: Vec<usize> = (1..=gb.rank()).collect();
        let profiles_a = ga.vertex_ids().map(|v| profile(ga, v, &color_map)).collect();
        let profiles_b = gb.vertex_ids().map(|v| profile(gb, v, &identity)).collect();
        Search {
            a,
            b,
            color_map,
            profiles_a,
            profiles_b,
            order: bfs_order(ga),
            vmap: vec![None; ga.vertex_count()],
            used_v: vec![false; gb.vertex_count()],
        }
    }

    fn run(mut self) -> Option<Isomorphism> {
        let mut pa = self.profiles_a.clone();
        let mut pb = self.profiles_b.clone();
        pa.sort();
        pb.sort();
        if pa != pb {
            return None;
        }
        self.assign_vertex(0)
    }

    fn assign_vertex(&mut self, depth: usize) -> Option<Isomorphism> {
        if depth == self.order.len() {
            return self.match_edges();
        }
        let u = self.order[depth];
        for x in self.b.skeleton().vertex_ids() {
            if self.used_v[x.0] || self.profiles_a[u.0] != self.profiles_b[x.0] {
                continue;
            }
            self.vmap[u.0] = Some(x);
            self.used_v[x.0] = true;
            if self.consistent(u, x) {
                if let Some(iso) = self.assign_vertex(depth + 1) {
                    return Some(iso);
                }
            }
            self.vmap[u.0] = None;
            self.used_v[x.0] = false;
        }
        None
    }

    /// Edge counts between `u` and already assigned vertices agree with
    /// those between `x` and their images.
    fn consistent(&self, u: VertexId, x: VertexId) -> bool {
        let (ga, gb) = (self.a.skeleton(), self.b.skeleton());
        let mut counts: HashMap<(bool, VertexId, usize), i64> = HashMap::new();
        for (out, edges) in [(true, ga.out_edges(u)), (false, ga.in_edges(u))] {
            for &e in edges {
                let other = if out { ga.rng(e) } else { ga.src(e) };
                if let Some(y) = self.vmap[other.0] {
                    *counts.entry((out, y, self.color_map[ga.color(e) - 1])).or_default() += 1;
                }
            }
        }
        let inverse_used = |y: VertexId| self.used_v[y.0];
        for (out, edges) in [(true, gb.out_edges(x)), (false, gb.in_edges(x))] {
            for &e in edges {
                let other = if out { gb.rng(e) } else { gb.src(e) };
                if inverse_used(other) {
                    *counts.entry((out, other, gb.color(e))).or_default() -= 1;
                }
            }
        }
        counts.values().all(|&c| c == 0)
    }

    fn match_edges(&self) -> Option<Isomorphism> {
        let (ga, gb) = (self.a.skeleton(), self.b.skeleton());
        let vmap: Vec<VertexId> = self.vmap.iter().map(|v| v.expect("all assigned")).collect();
        let mut classes_b: BTreeMap<(VertexId, VertexId, usize), Vec<EdgeId>> = BTreeMap::new();
        for e in gb.edge_ids() {
            classes_b.entry((gb.src(e), gb.rng(e), gb.color(e))).or_default().push(e);
        }
        let candidates: Vec<Vec<EdgeId>> = ga
            .edge_ids()
            .map(|e| {
                let key = (vmap[ga.src(e).0], vmap[ga.rng(e).0], self.color_map[ga.color(e) - 1]);
                classes_b.get(&key).cloned().unwrap_or_default()
            })
            .collect();
        let mut squares_of: Vec<Vec<usize>> = vec![Vec::new(); ga.edge_count()];
        for (i, sq) in self.a.squares().squares().iter().enumerate() {
            for e in [sq.lhs.0, sq.lhs.1, sq.rhs.0, sq.rhs.1] {
                if !squares_of[e.0].contains(&i) {
                    squares_of[e.0].push(i);
                }
            }
        }
        let mut state = EdgeState {
            squares: self.a.squares().squares(),
            target: self.b,
            candidates,
            squares_of,
            emap: vec![None; ga.edge_count()],
            used: vec![false; gb.edge_count()],
        };
        if !state.assign(0) {
            return None;
        }
        Some(Isomorphism {
            color_map: self.color_map.clone(),
            vertex_map: vmap,
            edge_map: state.emap.into_iter().map(|e| e.expect("all assigned")).collect(),
        })
    }
}

struct EdgeState<'a> {
    squares: &'a [Square],
    target: &'a KGraph,
    candidates: Vec<Vec<EdgeId>>,
    squares_of: Vec<Vec<usize>>,
    emap: Vec<Option<EdgeId>>,
    used: Vec<bool>,
}

impl EdgeState<'_> {
    fn assign(&mut self, i: usize) -> bool {
        if i == self.emap.len() {
            return true;
        }
        for j in 0..self.candidates[i].len() {
            let y = self.candidates[i][j];
            if self.used[y.0] {
                continue;
            }
            self.emap[i] = Some(y);
            self.used[y.0] = true;
            if self.squares_ok(i) && self.assign(i + 1) {
                return true;
            }
            self.emap[i] = None;
            self.used[y.0] = false;
        }
        false
    }

    fn squares_ok(&self, i: usize) -> bool {
        self.squares_of[i].iter().all(|&s| {
            let sq = self.squares[s];
            let m = |e: EdgeId| self.emap[e.0];
            match (m(sq.lhs.0), m(sq.lhs.1), m(sq.rhs.0), m(sq.rhs.1)) {
                (Some(a2), Some(a1), Some(b2), Some(b1)) => {
                    self.target.squares().partner((a2, a1)) == Some((b2, b1))
                }
                _ => true,
            }
        })
    }
}

/// Vertices in breadth-first order over the undirected skeleton, starting
/// from each not yet visited vertex in declaration order.
fn bfs_order(g: &ColoredDigraph) -> Vec<VertexId> {
    let mut seen = vec![false; g.vertex_count()];
    let mut order = Vec::with_capacity(g.vertex_count());
    for start in g.vertex_ids() {
        if seen[start.0] {
            continue;
        }
        seen[start.0] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in g.out_edges(v).iter().chain(g.in_edges(v)) {
                for w in [g.src(e), g.rng(e)] {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::SquareSet;
    use crate::generators;
    use crate::kgraph::assemble;

    #[test]
    fn reflexive_with_identity() {
        for k in [generators::torus(&[3, 1]).unwrap(), generators::figure1(), generators::torus(&[2, 2, 2]).unwrap()] {
            let iso = isomorphic(&k, &k).unwrap();
            assert_eq!(iso.vertex_map, k.skeleton().vertex_ids().collect::<Vec<_>>());
            assert_eq!(iso.edge_map, k.skeleton().edge_ids().collect::<Vec<_>>());
        }
    }

    #[test]
    fn different_sizes_are_not_isomorphic() {
        let a = generators::torus(&[3, 1]).unwrap();
        let b = generators::torus(&[4, 1]).unwrap();
        assert!(isomorphic(&a, &b).is_none());
    }

    #[test]
    fn transposed_torus_needs_color_permutation() {
        let a = generators::torus(&[3, 1]).unwrap();
        let b = generators::torus(&[1, 3]).unwrap();
        assert!(isomorphic(&a, &b).is_none());
        let opts = IsoOptions {
            allow_color_permutation: true,
        };
        let iso = isomorphic_with(&a, &b, &opts).unwrap();
        assert_eq!(iso.color_map, vec![2, 1]);
    }

    #[test]
    fn relabelled_graph_is_found() {
        let k = generators::torus(&[3, 2]).unwrap();
        let g = k.skeleton();
        // Reverse declaration order and rename everything.
        let vertices: Vec<String> = g.vertex_names().iter().rev().map(|v| format!("x_{v}")).collect();
        let edges: Vec<(String, usize, String, String)> = g
            .edges()
            .iter()
            .rev()
            .map(|e| {
                (
                    format!("y_{}", e.id),
                    e.color,
                    format!("x_{}", g.vertex_name(e.src)),
                    format!("x_{}", g.vertex_name(e.rng)),
                )
            })
            .collect();
        let h = ColoredDigraph::new(2, vertices, edges).unwrap();
        let squares: Vec<Square> = k
            .squares()
            .squares()
            .iter()
            .map(|sq| {
                let e = |x: EdgeId| h.edge_by_name(&format!("y_{}", g.edge_name(x))).unwrap();
                Square::new((e(sq.lhs.0), e(sq.lhs.1)), (e(sq.rhs.0), e(sq.rhs.1)))
            })
            .collect();
        let s = SquareSet::new(&h, squares);
        let k2 = assemble(h, s).unwrap();
        let iso = isomorphic(&k, &k2).unwrap();
        let h = k2.skeleton();
        for e in g.edge_ids() {
            let f = iso.edge_map[e.0];
            assert_eq!(h.color(f), g.color(e));
            assert_eq!(h.src(f), iso.vertex_map[g.src(e).0]);
            assert_eq!(h.rng(f), iso.vertex_map[g.rng(e).0]);
        }
    }

    #[test]
    fn same_skeleton_different_squares() {
        // Bouquet with two loops per color: the product squares versus a
        // twisted rule that swaps the loops.
        let k = generators::bouquet(&[2, 2]).unwrap();
        let g = k.skeleton().clone();
        let mut twisted = Vec::new();
        for a in ["a0", "a1"] {
            for b in ["b0", "b1"] {
                let a2 = if a == "a0" { "a1" } else { "a0" };
                twisted.push([b, a, a2, b]);
            }
        }
        let s = SquareSet::from_names(&g, &twisted).unwrap();
        let k2 = assemble(g, s).unwrap();
        assert!(isomorphic(&k, &k2).is_none());
    }
}
