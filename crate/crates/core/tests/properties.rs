use proptest::prelude::*;

use kgraph::factorization::{enumerate_normal_forms, normalize_by};
use kgraph::format::{parse, serialize, KgDocument};
use kgraph::generators::{bouquet, figure1, torus};
use kgraph::kgraph::{check_graded_functor, isomorphic, source_free_report};
use kgraph::moves::{delay, product, reduce};
use kgraph::saturation::{hereditary_closure, saturate, verify_trace};
use kgraph::{ColorSet, EdgeId, KGraph, Path, VertexId};

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=3)
}

/// A forward walk of up to `len` edges from vertex `start % |V|`, choosing
/// the out-edge `choices[i] % outdeg` at each step.
fn walk(k: &KGraph, start: usize, choices: &[usize]) -> Path {
    let g = k.skeleton();
    let mut v = VertexId(start % g.vertex_count());
    let mut edges: Vec<EdgeId> = Vec::new();
    for &c in choices {
        let out = g.out_edges(v);
        if out.is_empty() {
            break;
        }
        let e = out[c % out.len()];
        edges.insert(0, e);
        v = g.rng(e);
    }
    Path::new(g, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tori_are_valid_and_source_free(sizes in sizes()) {
        let k = torus(&sizes).unwrap();
        prop_assert!(k.kg2_report().passed && k.kg3_report().passed);
        let sf = source_free_report(&k);
        prop_assert!(sf.per_color_passed && sf.aggregate_passed);
        prop_assert_eq!(k.skeleton().vertex_count(), sizes.iter().product::<usize>());
    }

    #[test]
    fn text_format_round_trips(sizes in sizes()) {
        let k = torus(&sizes).unwrap();
        let text = serialize(&KgDocument::from_kgraph(&k));
        let doc = parse(&text).unwrap();
        prop_assert_eq!(serialize(&doc), text);
        let back = doc.to_kgraph().unwrap();
        prop_assert!(isomorphic(&back, &k).is_some());
    }

    #[test]
    fn normalization_is_schedule_independent(
        sizes in sizes(),
        start in 0usize..64,
        choices in prop::collection::vec(0usize..8, 1..=6),
        picks in prop::collection::vec(0usize..8, 32),
        shuffle in any::<u64>(),
    ) {
        let k = torus(&sizes).unwrap();
        let g = k.skeleton();
        let p = walk(&k, start, &choices);
        let mut target = p.color_word(g);
        // A deterministic permutation of the word.
        let n = target.len();
        for i in (1..n).rev() {
            target.swap(i, (shuffle as usize >> (i % 32)) % (i + 1));
        }
        let reference = k.normalize(&p, &target).unwrap();
        prop_assert_eq!(reference.color_word(g), target.clone());
        let mut it = picks.iter().cycle();
        let other = normalize_by(g, k.squares(), &p, &target, |inv| *it.next().unwrap() % inv.len()).unwrap();
        prop_assert_eq!(other.edges(), reference.edges());
        let back = k.normalize(&reference, &p.color_word(g)).unwrap();
        prop_assert_eq!(back.edges(), p.edges());
        prop_assert!(k.equivalent(&p, &reference).unwrap());
    }

    #[test]
    fn products_of_tori_are_tori(a in sizes(), b in sizes()) {
        prop_assume!(a.len() + b.len() <= 4);
        let p = product(&torus(&a).unwrap(), &torus(&b).unwrap()).unwrap();
        let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
        prop_assert!(isomorphic(&p, &torus(&joined).unwrap()).is_some());
    }

    #[test]
    fn reduction_grading_is_additive(
        sizes in prop::collection::vec(2usize..=4, 2..=3),
        color in 0usize..3,
        start in 0usize..64,
        choices in prop::collection::vec(0usize..8, 2..=6),
        cut in 1usize..6,
    ) {
        let k = torus(&sizes).unwrap();
        let c = color % sizes.len() + 1;
        let r = reduce(&k, VertexId(0), &ColorSet::new(k.rank(), [c]).unwrap(), c).unwrap();
        let grading = &r.realization.grading;
        prop_assert!(check_graded_functor(&k, grading).unwrap().passed);
        let p = walk(&k, start, &choices);
        let cut = cut % p.len().max(1);
        prop_assume!(cut > 0 && cut < p.len());
        let g = k.skeleton();
        let outer = Path::new(g, p.edges()[..cut].to_vec()).unwrap();
        let inner = Path::new(g, p.edges()[cut..].to_vec()).unwrap();
        let sum: Vec<i64> = grading.value(&outer).iter().zip(grading.value(&inner)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(grading.value(&outer.compose(&inner).unwrap()), sum);
    }

    #[test]
    fn delay_then_reduce_is_identity(sizes in prop::collection::vec(1usize..=3, 1..=3), pick in 0usize..1000) {
        let k = torus(&sizes).unwrap();
        let g = k.skeleton();
        let f = EdgeId(pick % g.edge_count());
        let c = g.color(f);
        let d = delay(&k, f).unwrap();
        prop_assert!(d.graph.kg2_report().passed && d.graph.kg3_report().passed);
        let mid = d.graph.vertex(&d.midpoint()).unwrap();
        let r = reduce(&d.graph, mid, &ColorSet::new(k.rank(), [c]).unwrap(), c).unwrap();
        prop_assert!(isomorphic(&r.graph, &k).is_some());
    }

    #[test]
    fn saturation_is_monotone(mask_a in any::<u16>(), mask_b in any::<u16>(), which in 0usize..3) {
        let k = match which {
            0 => figure1(),
            1 => torus(&[3, 2]).unwrap(),
            _ => delay(&torus(&[2, 2]).unwrap(), EdgeId(0)).unwrap().graph,
        };
        let n = k.skeleton().vertex_count();
        let set = |mask: u16| -> Vec<VertexId> { (0..n).filter(|i| mask >> (i % 16) & 1 == 1).map(VertexId).collect() };
        let a = set(mask_a);
        let ab = set(mask_a | mask_b);
        let sa = saturate(&k, &a, n).unwrap();
        let sab = saturate(&k, &ab, n).unwrap();
        prop_assert!(sa.vertices.iter().all(|v| sab.vertices.contains(v)));
        prop_assert!(a.iter().all(|v| sa.vertices.contains(v)));
        prop_assert!(verify_trace(&k, &a, &sa).unwrap());
        let h = hereditary_closure(&k, &a).unwrap();
        prop_assert!(h.vertices.iter().all(|v| sa.vertices.contains(v)));
        // Idempotent.
        let again = saturate(&k, &sa.vertices, n).unwrap();
        prop_assert_eq!(again.vertices, sa.vertices);
    }
}

#[test]
fn normal_forms_count_morphisms() {
    // T(2,3): each degree with |n| = L has one morphism per vertex.
    let k = torus(&[2, 3]).unwrap();
    let forms = enumerate_normal_forms(k.skeleton(), 3);
    // Degrees of length 1, 2, 3 in rank 2: 2 + 3 + 4.
    assert_eq!(forms.len(), 6 * (2 + 3 + 4));
    for p in &forms {
        assert_eq!(k.canonical_form(p).unwrap().edges(), p.edges());
    }
}

#[test]
fn bouquet_paths_have_one_representative_per_word() {
    let k = bouquet(&[2, 2]).unwrap();
    let g = k.skeleton();
    let p = k.path(&["a1", "b0", "a0", "b1"]).unwrap();
    let mut words = std::collections::BTreeSet::new();
    for word in [[1, 1, 2, 2], [1, 2, 1, 2], [1, 2, 2, 1], [2, 1, 1, 2], [2, 1, 2, 1], [2, 2, 1, 1]] {
        let q = k.normalize(&p, &word).unwrap();
        assert!(k.equivalent(&p, &q).unwrap());
        words.insert(q.color_word(g));
    }
    assert_eq!(words.len(), 6);
}
