use leibniz_core::catalog::{courant_pairing, make_example, ExampleParams};
use leibniz_core::connection::{non_metricity, torsion, BracketKind, Connection, Metric};
use leibniz_core::levicivita::{
    check_levicivita_props, decompose_connection, koszul_residual, solve_koszul, solve_torsion_free, SolutionStatus,
};
use leibniz_core::{Algebroid, SparseArray};
use leibniz_scalar::{parse_scalar, Budget, Matrix, Scalar};

fn budget() -> Budget {
    Budget::default()
}

fn tangent(n: usize) -> Algebroid {
    make_example(&ExampleParams::TangentLie { n }, &budget()).unwrap().algebroid
}

fn diag(entries: Vec<Scalar>) -> Matrix {
    let r = entries.len();
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { entries[i].clone() } else { Scalar::zero() }).collect())
        .collect()
}

fn half_plane_metric(alg: &Algebroid) -> Metric {
    let w = parse_scalar("1/x2^2", alg.coords()).unwrap();
    Metric::new(diag(vec![w.clone(), w]), &budget()).unwrap()
}

#[test]
fn polar_coordinates_christoffel_symbols() {
    let alg = tangent(2);
    let c = alg.coords().to_vec();
    let metric = Metric::new(diag(vec![Scalar::one(), Scalar::var(0).pow(2)]), &budget()).unwrap();
    let space = solve_koszul(&alg, &metric, &budget()).unwrap();
    assert_eq!(space.status, SolutionStatus::Unique);
    let lc = space.particular.clone().unwrap();
    let p = |t: &str| parse_scalar(t, &c).unwrap();
    assert_eq!(lc.get(0, 1, 1), &p("-x1"));
    assert_eq!(lc.get(1, 0, 1), &p("1/x1"));
    assert_eq!(lc.get(1, 1, 0), &p("1/x1"));
    assert_eq!(lc.coeff().nnz(), 3);
    assert_eq!(space.denominator_loci(), vec![p("x1")]);
}

#[test]
fn constant_metric_gives_zero_connection() {
    let alg = tangent(3);
    let metric = Metric::new(diag(vec![Scalar::one(), Scalar::from_int(2), Scalar::from_int(5)]), &budget()).unwrap();
    let space = solve_koszul(&alg, &metric, &budget()).unwrap();
    assert_eq!(space.status, SolutionStatus::Unique);
    assert!(space.particular.unwrap().coeff().is_zero());
}

#[test]
fn courant_koszul_space_is_affine() {
    let ex = make_example(&ExampleParams::CourantStandard { n: 1 }, &budget()).unwrap();
    let metric = Metric::new(courant_pairing(1), &budget()).unwrap();
    let space = solve_koszul(&ex.algebroid, &metric, &budget()).unwrap();
    assert!(matches!(space.status, SolutionStatus::Affine(d) if d > 0));
    assert!(koszul_residual(&ex.algebroid, &Connection::zero(2), &metric).is_zero());
    for gen in &space.kernel_basis {
        let member = space.particular.as_ref().unwrap().coeff().add(gen);
        let c = Connection::new(member).unwrap();
        assert!(torsion(&ex.algebroid, &c, BracketKind::Modified).unwrap().is_zero());
        assert!(non_metricity(&ex.algebroid, &c, &metric).is_zero());
    }
}

#[test]
fn torsion_free_connections_on_coordinates_are_symmetric() {
    let n = 2;
    let space = solve_torsion_free(&tangent(n), &budget()).unwrap();
    assert_eq!(space.status, SolutionStatus::Affine(n * n * (n + 1) / 2));
    assert!(space.particular.unwrap().coeff().is_zero());
}

#[test]
fn symmetric_anholonomy_without_locality_is_infeasible() {
    let mut gamma = SparseArray::new(&[2, 2, 2]);
    gamma.set(&[0, 0, 1], Scalar::one());
    gamma.set(&[0, 1, 0], Scalar::one());
    let anchor = vec![vec![Scalar::one(), Scalar::zero()]];
    let alg = Algebroid::new(vec!["x1".into()], 2, anchor, gamma, SparseArray::new(&[2; 4]), None).unwrap();
    let space = solve_torsion_free(&alg, &budget()).unwrap();
    assert!(space.is_infeasible());
    assert!(!space.certificate.unwrap().is_zero());
    assert!(space.particular.is_none());
}

#[test]
fn levi_civita_connection_decomposes_trivially() {
    let alg = tangent(2);
    let metric = half_plane_metric(&alg);
    let lc = solve_koszul(&alg, &metric, &budget()).unwrap().particular.unwrap();
    let d = decompose_connection(&alg, &lc, &metric, &budget()).unwrap();
    assert!(d.report.pass);
    assert_eq!(d.lc_part, lc);
    assert!(d.torsion_part.is_zero());
    assert!(d.nonmetricity_part.is_zero());
}

#[test]
fn decomposition_separates_torsion_and_non_metricity() {
    let alg = tangent(2);
    let metric = Metric::new(diag(vec![Scalar::one(), Scalar::var(0).pow(2)]), &budget()).unwrap();
    let mut c = SparseArray::new(&[2, 2, 2]);
    c.set(&[0, 0, 1], Scalar::one());
    c.set(&[1, 1, 1], Scalar::var(1));
    let conn = Connection::new(c).unwrap();
    let d = decompose_connection(&alg, &conn, &metric, &budget()).unwrap();
    assert!(d.report.pass, "{:?}", d.report.residuals);

    let with = |extra: &SparseArray| Connection::new(d.lc_part.coeff().add(extra)).unwrap();
    let lk = with(&d.torsion_part);
    let ld = with(&d.nonmetricity_part);
    let t = |c: &Connection| torsion(&alg, c, BracketKind::Modified).unwrap();
    let q = |c: &Connection| non_metricity(&alg, c, &metric);
    assert_eq!(t(&lk), t(&conn));
    assert!(q(&lk).is_zero());
    assert!(t(&ld).is_zero());
    assert_eq!(q(&ld), q(&conn));
    assert!(!t(&conn).is_zero() && !q(&conn).is_zero());
}

#[test]
fn levi_civita_predicates() {
    let alg = tangent(2);
    let metric = half_plane_metric(&alg);
    let lc = solve_koszul(&alg, &metric, &budget()).unwrap().particular.unwrap();
    let v = check_levicivita_props(&alg, &lc, &metric, &[]).unwrap();
    assert!(v.admissible && v.koszul && v.torsion_free && v.metric_compatible);
    assert!(v.report.pass);

    let mut c = lc.coeff().clone();
    c.add_to(&[0, 0, 1], &Scalar::one());
    let twisted = Connection::new(c).unwrap();
    let v = check_levicivita_props(&alg, &twisted, &metric, &[]).unwrap();
    assert!(!v.koszul && !v.torsion_free);
    assert!(v.report.pass);
}

#[test]
fn courant_koszul_solution_is_torsion_free_and_metric() {
    let ex = make_example(&ExampleParams::CourantStandard { n: 2 }, &budget()).unwrap();
    let metric = ex.metric.unwrap();
    let space = solve_koszul(&ex.algebroid, &metric, &budget()).unwrap();
    let c = space.particular.unwrap();
    let v = check_levicivita_props(&ex.algebroid, &c, &metric, &[]).unwrap();
    assert!(v.admissible && v.koszul && v.torsion_free && v.metric_compatible);
}

#[test]
fn tiny_budget_aborts_with_resource_error() {
    let alg = tangent(2);
    let metric = half_plane_metric(&alg);
    let err = solve_koszul(&alg, &metric, &Budget { max_terms: 1 }).unwrap_err();
    assert!(err.is_budget(), "{err}");
}
