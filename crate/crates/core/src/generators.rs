//! Fixture k-graphs with documented identifiers.

use crate::error::{Error, Result};
use crate::factorization::SquareSet;
use crate::kgraph::{assemble, KGraph};
use crate::skeleton::ColoredDigraph;

fn letter(color: usize) -> char {
    (b'a' + (color - 1) as u8) as char
}

fn coords_name(prefix: &str, coords: &[usize]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("{prefix}{}", parts.join("_"))
}

/// The product of directed cycles `C_{n_1} x ... x C_{n_k}`.
///
/// Vertices are `u{c_1}_..._{c_k}`. The color-`i` edge leaving a vertex is
/// named by the `i`-th letter followed by the same coordinates, so `a0_0`
/// runs from `u0_0` to `u1_0` in `torus(&[3, 1])`.
pub fn torus(sizes: &[usize]) -> Result<KGraph> {
    if sizes.is_empty() || sizes.len() > 26 {
        return Err(Error::InvalidParameter(format!(
            "torus needs between 1 and 26 cycle lengths, got {}",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter("cycle lengths must be at least 1".into()));
    }
    let k = sizes.len();
    let mut points: Vec<Vec<usize>> = vec![vec![]];
    for &n in sizes {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    let step = |p: &[usize], i: usize| {
        let mut q = p.to_vec();
        q[i] = (q[i] + 1) % sizes[i];
        q
    };
    let edge_name = |p: &[usize], i: usize| coords_name(&letter(i + 1).to_string(), p);
    let vertices: Vec<String> = points.iter().map(|p| coords_name("u", p)).collect();
    let mut edges = Vec::new();
    for p in &points {
        for i in 0..k {
            edges.push((edge_name(p, i), i + 1, coords_name("u", p), coords_name("u", &step(p, i))));
        }
    }
    let g = ColoredDigraph::new(k, vertices, edges)?;
    let mut names = Vec::new();
    for p in &points {
        for i in 0..k {
            for j in i + 1..k {
                names.push([
                    edge_name(&step(p, i), j),
                    edge_name(p, i),
                    edge_name(&step(p, j), i),
                    edge_name(p, j),
                ]);
            }
        }
    }
    build(g, &names)
}

fn build(g: ColoredDigraph, names: &[[String; 4]]) -> Result<KGraph> {
    let refs: Vec<[&str; 4]> = names
        .iter()
        .map(|[a, b, c, d]| [a.as_str(), b.as_str(), c.as_str(), d.as_str()])
        .collect();
    let s = SquareSet::from_names(&g, &refs)?;
    assemble(g, s)
}

/// A directed cycle through `vertices`, doubled in colors 1 (`black_st`)
/// and 2 (`blue_st`), with `black_tu.blue_st ~ blue_tu.black_st` at every
/// middle vertex `t`.
type EdgeRow = (String, usize, String, String);

fn doubled_cycle(vertices: &[&str]) -> (Vec<String>, Vec<EdgeRow>, Vec<[String; 4]>) {
    let n = vertices.len();
    let arc = |i: usize| (vertices[i % n], vertices[(i + 1) % n]);
    let mut edges = Vec::new();
    for i in 0..n {
        let (s, t) = arc(i);
        edges.push((format!("black_{s}{t}"), 1, s.to_string(), t.to_string()));
        edges.push((format!("blue_{s}{t}"), 2, s.to_string(), t.to_string()));
    }
    let mut squares = Vec::new();
    for i in 0..n {
        let (s, t) = arc(i);
        let (_, u) = arc(i + 1);
        squares.push([
            format!("black_{t}{u}"),
            format!("blue_{s}{t}"),
            format!("blue_{t}{u}"),
            format!("black_{s}{t}"),
        ]);
    }
    (vertices.iter().map(|v| v.to_string()).collect(), edges, squares)
}

/// The 3-graph with vertices `v, w, x, y`: the directed 4-cycle
/// `v -> w -> x -> y -> v` doubled in colors 1 and 2 (`black_vw`,
/// `blue_vw`, ...) and a color-3 loop `red_v`, ... at every vertex.
/// Colors 1 and 2 commute as in `doubled_cycle`; the loops commute with
/// everything as in a product.
pub fn figure1() -> KGraph {
    let (vertices, mut edges, mut squares) = doubled_cycle(&["v", "w", "x", "y"]);
    let cycle = edges.clone();
    for v in &vertices {
        edges.push((format!("red_{v}"), 3, v.clone(), v.clone()));
    }
    for (id, _, s, t) in &cycle {
        squares.push([format!("red_{t}"), id.clone(), id.clone(), format!("red_{s}")]);
    }
    let g = ColoredDigraph::new(3, vertices, edges).expect("fixture skeleton");
    build(g, &squares).expect("fixture k-graph")
}

/// A rank-2 graph on `u, w, x`: the directed 3-cycle `u -> w -> x -> u`
/// doubled in colors 1 and 2. Both the edges into `w` and the edges out of
/// `w` form complete edges.
pub fn cr_example() -> KGraph {
    let (vertices, edges, squares) = doubled_cycle(&["u", "w", "x"]);
    let g = ColoredDigraph::new(2, vertices, edges).expect("fixture skeleton");
    build(g, &squares).expect("fixture k-graph")
}

/// One vertex `o` with `counts[i - 1]` loops of color `i`, named by the
/// color's letter and an index (`a0`, `a1`, `b0`, ...), and product
/// squares `y.x ~ x.y` between loops of different colors.
pub fn bouquet(counts: &[usize]) -> Result<KGraph> {
    if counts.is_empty() || counts.len() > 26 {
        return Err(Error::InvalidParameter(format!(
            "bouquet needs between 1 and 26 loop counts, got {}",
            counts.len()
        )));
    }
    let loops: Vec<Vec<String>> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| (0..n).map(|j| format!("{}{j}", letter(i + 1))).collect())
        .collect();
    let mut edges = Vec::new();
    for (i, names) in loops.iter().enumerate() {
        for name in names {
            edges.push((name.clone(), i + 1, "o".to_string(), "o".to_string()));
        }
    }
    let g = ColoredDigraph::new(counts.len(), ["o"], edges)?;
    let mut squares = Vec::new();
    for i in 0..loops.len() {
        for j in i + 1..loops.len() {
            for x in &loops[i] {
                for y in &loops[j] {
                    squares.push([y.clone(), x.clone(), x.clone(), y.clone()]);
                }
            }
        }
    }
    build(g, &squares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::source_free_report;

    #[test]
    fn torus_counts() {
        let t = torus(&[3, 1]).unwrap();
        assert_eq!(t.skeleton().vertex_count(), 3);
        assert_eq!(t.skeleton().edge_count(), 6);
        assert_eq!(t.squares().len(), 3);
        let g = t.skeleton();
        let a0 = g.edge(t.edge("a0_0").unwrap());
        assert_eq!((g.vertex_name(a0.src), g.vertex_name(a0.rng)), ("u0_0", "u1_0"));

        let t = torus(&[2, 2, 2]).unwrap();
        assert_eq!(t.skeleton().vertex_count(), 8);
        assert_eq!(t.skeleton().edge_count(), 24);
        assert!(t.kg3_report().three_paths_checked > 0);
        assert!(t.kg3_report().passed);
    }

    #[test]
    fn torus_rejects_bad_sizes() {
        assert!(matches!(torus(&[]), Err(Error::InvalidParameter(_))));
        assert!(matches!(torus(&[2, 0]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn fixtures_are_per_color_source_free() {
        for k in [torus(&[2, 3]).unwrap(), figure1(), cr_example(), bouquet(&[2, 1, 1]).unwrap()] {
            assert!(source_free_report(&k).per_color_passed);
        }
    }

    #[test]
    fn figure1_shape() {
        let k = figure1();
        assert_eq!(k.skeleton().edge_count(), 12);
        assert_eq!(k.squares().len(), 12);
        let p = k.path(&["black_wx", "blue_vw"]).unwrap();
        let q = k.normalize(&p, &[2, 1]).unwrap();
        assert_eq!(q.display(k.skeleton()), "blue_wx.black_vw");
    }

    #[test]
    fn bouquet_has_nonvacuous_braids() {
        let k = bouquet(&[2, 2, 2]).unwrap();
        assert_eq!(k.kg3_report().three_paths_checked, 6 * 8);
        assert!(k.kg3_report().passed);
    }
}
