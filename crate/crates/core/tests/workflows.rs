use kgraph::format::{parse, serialize, FormatError, KgDocument};
use kgraph::generators::{cr_example, figure1, torus};
use kgraph::kgraph::{isomorphic, verify_quasimorphism, verify_realization, MonoidMap, PathFunctor};
use kgraph::moves::{check_hr, complete_edge_reduction, delay, product, reduce, Condition, ParType};
use kgraph::saturation::{morita_certificate, CertificateBounds};
use kgraph::{ColorSet, Error};

#[test]
fn figure1_reduce_delay_round_trip_through_text() {
    let k = figure1();
    let w = k.vertex("w").unwrap();
    let r = reduce(&k, w, &ColorSet::new(3, [1, 2]).unwrap(), 1).unwrap();
    assert!(verify_realization(&r.realization, Some(3)).unwrap().passed);
    assert_eq!(r.classification.iter().filter(|t| **t == ParType::Theta).count(), 2);

    let text = serialize(&KgDocument::from_kgraph(&r.graph));
    let reread = parse(&text).unwrap().to_kgraph().unwrap();
    let f = reread.edge("blue_wx").unwrap();
    let d = delay(&reread, f).unwrap();
    let mid = d.graph.vertex(&d.midpoint()).unwrap();
    let back = reduce(&d.graph, mid, &ColorSet::new(3, [2]).unwrap(), 2).unwrap();
    assert!(isomorphic(&back.graph, &reread).is_some());
}

#[test]
fn hypotheses_report_the_first_failing_condition() {
    let k = figure1();
    let report = check_hr(&k, k.vertex("w").unwrap(), &ColorSet::new(3, [3]).unwrap()).unwrap();
    assert!(!report.passed);
    let first = report.vertices.iter().find(|v| !v.reducible).unwrap();
    assert_eq!(first.failed_condition, Some(Condition::NoLoop));
    match reduce(&k, k.vertex("w").unwrap(), &ColorSet::new(3, [3]).unwrap(), 3) {
        Err(Error::HypothesesNotMet { report, .. }) => assert!(report.is_some()),
        other => panic!("expected a hypotheses failure, got {:?}", other.map(|_| ())),
    }
    let back = check_hr(&k, k.vertex("v").unwrap(), &ColorSet::new(3, [1]).unwrap()).unwrap();
    assert_eq!(back.vertices[0].failed_condition, Some(Condition::BackEdgesInColorSet));
}

#[test]
fn complete_edge_reduction_matches_reduction() {
    let k = cr_example();
    let w = k.vertex("w").unwrap();
    let cr = complete_edge_reduction(&k, w).unwrap();
    assert!(verify_realization(&cr.realization, Some(3)).unwrap().passed);
    for b in [1, 2] {
        let r = reduce(&k, w, &ColorSet::all(2), b).unwrap();
        assert!(isomorphic(&cr.graph, &r.graph).is_some());
    }
}

#[test]
fn reduction_commutes_with_products() {
    let k = figure1().restrict_to_colors(&ColorSet::new(3, [1, 2]).unwrap()).unwrap();
    let omega = torus(&[2]).unwrap();
    let reduced = reduce(&k, k.vertex("w").unwrap(), &ColorSet::all(2), 1).unwrap();
    let expected = product(&reduced.graph, &omega).unwrap();
    let p = product(&k, &omega).unwrap();
    for y in ["u0", "u1"] {
        let wy = p.vertex(&format!("w*{y}")).unwrap();
        let r = reduce(&p, wy, &ColorSet::new(3, [1, 2]).unwrap(), 1).unwrap();
        assert!(isomorphic(&r.graph, &expected).is_some());
    }
}

#[test]
fn certificate_for_every_single_color_torus_reduction() {
    let k = torus(&[3, 2, 2]).unwrap();
    for c in 1..=3 {
        let cert = morita_certificate(
            &k,
            kgraph::VertexId(0),
            &ColorSet::new(3, [c]).unwrap(),
            c,
            CertificateBounds::default(),
        )
        .unwrap();
        assert!(cert.passed && cert.hereditary_only);
        assert!(cert.saturation.everything);
    }
}

#[test]
fn cycle_into_torus_quasimorphism() {
    let cycle = torus(&[3]).unwrap();
    let target = torus(&[3, 1]).unwrap();
    let psi = PathFunctor::from_names(
        cycle.skeleton(),
        target.skeleton(),
        &[("u0", "u0_0"), ("u1", "u1_0"), ("u2", "u2_0")],
        &[("a0", &["b1_0", "a0_0"]), ("a1", &["b2_0", "a1_0"]), ("a2", &["b0_0", "a2_0"])],
    )
    .unwrap();
    let omega = MonoidMap::new(vec![vec![1], vec![1]]).unwrap();
    let report = verify_quasimorphism(&cycle, &target, &psi, &omega, true).unwrap();
    assert!(report.passed, "{report:?}");
}

#[test]
fn parse_errors_carry_positions() {
    match parse("kg 1\nrank two\n") {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    let missing = "kg 1\nrank 2\nvertex a\nedge e 1 a a\nedge f 2 a a\n";
    let doc = parse(missing).unwrap();
    assert!(doc.to_kgraph().unwrap_err().to_string().contains("e"));
}
