use crate::error::Result;
use crate::factorization::{Square, SquareSet};
use crate::kgraph::{assemble, KGraph};
use crate::skeleton::{ColoredDigraph, EdgeSpec};

/// The Cartesian product `K1 x K2` of rank `k1 + k2`.
///
/// Vertex `(x, y)` is named `x*y`; the edge `(e, y)` is `e*y` and keeps its
/// color, the edge `(x, f)` is `x*f` with its color shifted by `k1`.
pub fn product(a: &KGraph, b: &KGraph) -> Result<KGraph> {
    let (ga, gb) = (a.skeleton(), b.skeleton());
    let shift = ga.rank();
    let pair = |x: &str, y: &str| format!("{x}*{y}");
    let mut vertices = Vec::new();
    for x in ga.vertex_names() {
        for y in gb.vertex_names() {
            vertices.push(pair(x, y));
        }
    }
    let mut edges = Vec::new();
    for e in ga.edges() {
        for y in gb.vertex_names() {
            edges.push(EdgeSpec {
                id: pair(&e.id, y),
                color: e.color,
                src: pair(ga.vertex_name(e.src), y),
                rng: pair(ga.vertex_name(e.rng), y),
            });
        }
    }
    for x in ga.vertex_names() {
        for f in gb.edges() {
            edges.push(EdgeSpec {
                id: pair(x, &f.id),
                color: f.color + shift,
                src: pair(x, gb.vertex_name(f.src)),
                rng: pair(x, gb.vertex_name(f.rng)),
            });
        }
    }
    let g = ColoredDigraph::new(shift + gb.rank(), vertices, edges)?;
    let id = |name: String| g.edge_by_name(&name);
    let mut squares = Vec::new();
    for sq in a.squares().squares() {
        for y in gb.vertex_names() {
            let e = |x| id(pair(ga.edge_name(x), y));
            squares.push(Square::new((e(sq.lhs.0)?, e(sq.lhs.1)?), (e(sq.rhs.0)?, e(sq.rhs.1)?)));
        }
    }
    for x in ga.vertex_names() {
        for sq in b.squares().squares() {
            let f = |y| id(pair(x, gb.edge_name(y)));
            squares.push(Square::new((f(sq.lhs.0)?, f(sq.lhs.1)?), (f(sq.rhs.0)?, f(sq.rhs.1)?)));
        }
    }
    // (e, y') (x, f) ~ (x', f) (e, y) for e: x -> x', f: y -> y'.
    for e in ga.edges() {
        for f in gb.edges() {
            let (x, x2) = (ga.vertex_name(e.src), ga.vertex_name(e.rng));
            let (y, y2) = (gb.vertex_name(f.src), gb.vertex_name(f.rng));
            squares.push(Square::new(
                (id(pair(&e.id, y2))?, id(pair(x, &f.id))?),
                (id(pair(x2, &f.id))?, id(pair(&e.id, y))?),
            ));
        }
    }
    let squares = SquareSet::new(&g, squares);
    assemble(g, squares)
}
