use leibniz_core::algebroid::frame_section;
use leibniz_core::catalog::{make_example, ExampleParams};
use leibniz_core::frame::{change_frame, FrameChange};
use leibniz_core::{Algebroid, EForm, SparseArray};
use leibniz_scalar::linsolve::identity;
use leibniz_scalar::{parse_scalar, Budget, Scalar};

fn s(text: &str, coords: &[String]) -> Scalar {
    parse_scalar(text, coords).unwrap()
}

fn tangent(n: usize) -> Algebroid {
    make_example(&ExampleParams::TangentLie { n }, &Budget::default()).unwrap().algebroid
}

fn courant(n: usize) -> Algebroid {
    make_example(&ExampleParams::CourantStandard { n }, &Budget::default()).unwrap().algebroid
}

#[test]
fn coordinate_bracket_follows_from_right_leibniz() {
    let alg = tangent(2);
    let c = alg.coords().to_vec();
    let u = vec![Scalar::one(), Scalar::zero()];
    let v = vec![Scalar::zero(), s("x1", &c)];
    assert_eq!(alg.bracket(&u, &v).unwrap(), vec![Scalar::zero(), Scalar::one()]);
}

#[test]
fn frame_brackets_read_structure_functions() {
    let coords = vec!["x1".to_string()];
    let mut gamma = SparseArray::new(&[2, 2, 2]);
    gamma.set(&[1, 0, 0], s("x1 + 2", &coords));
    gamma.set(&[0, 1, 0], Scalar::from_int(3));
    let anchor = vec![vec![Scalar::one(), Scalar::zero()]];
    let alg = Algebroid::new(coords.clone(), 2, anchor, gamma, SparseArray::new(&[2; 4]), None).unwrap();
    let (x0, x1) = (frame_section(2, 0), frame_section(2, 1));
    assert_eq!(alg.bracket(&x0, &x0).unwrap(), vec![Scalar::zero(), s("x1 + 2", &coords)]);
    assert_eq!(alg.bracket(&x1, &x0).unwrap(), vec![Scalar::from_int(3), Scalar::zero()]);
}

#[test]
fn dorfman_bracket_of_form_and_vector() {
    // [x2 dx1, ∂1] = −ι_{∂1} d(x2 dx1) = dx2.
    let alg = courant(2);
    let c = alg.coords().to_vec();
    let omega = vec![Scalar::zero(), Scalar::zero(), s("x2", &c), Scalar::zero()];
    let d1 = frame_section(4, 0);
    assert_eq!(alg.bracket(&omega, &d1).unwrap(), frame_section(4, 3));
}

#[test]
fn coboundary_of_functions() {
    let alg = tangent(2);
    let c = alg.coords().to_vec();
    let df = alg.coboundary(&s("x1*x2", &c));
    assert_eq!(df.get(&[0]), &s("x2", &c));
    assert_eq!(df.get(&[1]), &s("x1", &c));
    assert!(alg.coboundary(&Scalar::from_int(7)).is_zero());

    let dorfman = courant(1);
    let dx = dorfman.coboundary(&Scalar::var(0));
    assert_eq!(dx.get(&[0]), &Scalar::one());
    assert!(dx.get(&[1]).is_zero());
}

#[test]
fn interior_and_wedge_products() {
    let e1 = EForm::basis(2, 0);
    let e2 = EForm::basis(2, 1);
    let x1 = frame_section(2, 0);
    let x2 = frame_section(2, 1);
    assert_eq!(e1.interior(&x1).unwrap().as_function(), Scalar::one());
    assert_eq!(e1.wedge(&e2).interior(&x2).unwrap(), e1.scale(&(-1).into()));
    assert!(e1.wedge(&e1).is_zero());
    assert_eq!(e1.wedge(&e2), e2.wedge(&e1).scale(&(-1).into()));

    let v = vec![Scalar::var(0), Scalar::var(1)];
    let omega = e1.wedge(&e2).mul_scalar(&Scalar::var(1));
    assert!(omega.interior(&v).unwrap().interior(&v).unwrap().is_zero());

    let a = e1.mul_scalar(&Scalar::var(0));
    let b = e2.mul_scalar(&Scalar::var(1));
    assert_eq!(a.wedge(&b).eval(&[x1, x2]), &Scalar::var(0) * &Scalar::var(1));
}

#[test]
fn classification_flags() {
    let c = tangent(2).classify();
    assert!(c.almost_dull && c.almost_lie && c.pre_leibniz && c.pre_dull && c.pre_lie);

    let coords = vec!["x1".to_string()];
    let mut gamma = SparseArray::new(&[1, 1, 1]);
    gamma.set(&[0, 0, 0], Scalar::one());
    let alg = Algebroid::new(coords, 1, vec![vec![Scalar::one()]], gamma, SparseArray::new(&[1; 4]), None).unwrap();
    let c = alg.classify();
    assert!(c.almost_dull);
    assert!(!c.pre_leibniz);

    let c = courant(2).classify();
    assert!(c.pre_leibniz);
    assert!(!c.almost_dull);
}

#[test]
fn locality_projector_conditions() {
    let budget = Budget::default();
    assert!(courant(2).check_locality_projector(&budget).unwrap().pass);
    let any = tangent(2).with_proj(Some(identity(2))).unwrap();
    assert!(any.check_locality_projector(&budget).unwrap().pass);

    // The Dorfman L has vector components, so the identity projector breaks
    // the first condition.
    let full = courant(2).with_proj(Some(identity(4))).unwrap();
    let rep = full.check_locality_projector(&budget).unwrap();
    assert!(!rep.pass);
    assert!(!rep.residuals.is_empty());
}

#[test]
fn frame_change_picks_up_derivative_terms() {
    let budget = Budget::default();
    let alg = tangent(2);
    let same = change_frame(&alg, &FrameChange::new(identity(2), &budget).unwrap(), None, None, &budget).unwrap();
    assert_eq!(same.algebroid.gamma(), alg.gamma());
    assert_eq!(same.algebroid.anchor(), alg.anchor());

    let c = alg.coords().to_vec();
    let a = vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), s("x1", &c)]];
    let moved = change_frame(&alg, &FrameChange::new(a, &budget).unwrap(), None, None, &budget).unwrap();
    assert_eq!(moved.algebroid.gamma().get(&[1, 0, 1]), &s("1/x1", &c));
    assert_eq!(moved.algebroid.gamma().get(&[1, 1, 0]), &s("-1/x1", &c));
    assert_eq!(moved.algebroid.gamma().nnz(), 2);
}

#[test]
fn singular_frames_are_rejected() {
    let m = vec![vec![Scalar::one(), Scalar::var(0)], vec![Scalar::one(), Scalar::var(0)]];
    assert!(FrameChange::new(m, &Budget::default()).is_err());
}
