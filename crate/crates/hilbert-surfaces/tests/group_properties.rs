//! Properties of the involution representatives and CM matrices modulo `N`.

use hilbert_surfaces::arith::{gcd, units, Discriminant};
use hilbert_surfaces::gl2::{
    centralizer, cm_action_matrix, conjugacy_class_size, extended_centralizer, full_group,
    involution_classes, verify_class_list, InvolutionClass, ResidueMatrix,
};
use hilbert_surfaces::Error;
use proptest::prelude::*;

#[test]
fn representatives_square_to_plus_minus_determinant() {
    for n in 2..=24u64 {
        for r in units(n) {
            for class in involution_classes(n, r as i64).unwrap() {
                assert!(
                    class.matrix.squares_to_pm_det(),
                    "N = {n}, r = {r}, {}",
                    class.family
                );
                assert_eq!(class.matrix.det(), r % n.max(2), "N = {n}, r = {r}");
            }
        }
    }
}

#[test]
fn orbit_stabiliser_and_determinant_surjectivity() {
    for n in 2..=12u64 {
        let order = full_group(n).unwrap().order();
        for r in units(n) {
            for class in involution_classes(n, r as i64).unwrap() {
                let g = class.matrix;
                let orbit = conjugacy_class_size(&g).unwrap();
                assert_eq!(
                    orbit * centralizer(&g).unwrap().order(),
                    order,
                    "N = {n}, {g}"
                );
                assert_eq!(
                    extended_centralizer(&g).unwrap().det_index(),
                    1,
                    "N = {n}, {g}"
                );
            }
        }
    }
}

#[test]
fn determinant_surjective_on_extended_centralisers_up_to_24() {
    for n in [14u64, 16, 18, 20, 21, 24] {
        for r in units(n) {
            for class in involution_classes(n, r as i64).unwrap() {
                let h = extended_centralizer(&class.matrix).unwrap();
                assert_eq!(h.det_index(), 1, "N = {n}, r = {r}, {}", class.family);
            }
        }
    }
}

#[test]
fn corrupted_class_list_is_rejected_by_name() {
    let mut classes: Vec<InvolutionClass> = involution_classes(15, 1).unwrap();
    let last = classes.len() - 1;
    classes[last].matrix = classes[0].matrix;
    let family = classes[last].family.to_string();
    match verify_class_list(15, 1, &classes) {
        Err(Error::Consistency(msg)) => assert!(msg.contains(&family), "{msg}"),
        other => panic!("expected a consistency failure, got {other:?}"),
    }
    let mut short = involution_classes(16, 1).unwrap();
    short.pop();
    assert!(matches!(
        verify_class_list(16, 1, &short),
        Err(Error::Consistency(_))
    ));
}

proptest! {
    #[test]
    fn cm_matrix_has_norm_and_trace(
        disc in prop::sample::select(vec![-3i64, -4, -7, -8, -11, -12, -15, -19, -20, -24, -43, -67]),
        a in -50i64..50,
        b in -50i64..50,
        n in 2u64..60,
    ) {
        let t = disc.rem_euclid(4);
        let norm_phi = (t - disc) / 4;
        let norm = a * a + a * b * t + b * b * norm_phi;
        let trace = 2 * a + b * t;
        prop_assume!(gcd(norm, n as i64) == 1);
        let g = cm_action_matrix(Discriminant::new(disc).unwrap(), a, b, n).unwrap();
        prop_assert_eq!(g.det(), norm.rem_euclid(n as i64) as u64);
        prop_assert_eq!(g.trace(), trace.rem_euclid(n as i64) as u64);
    }

    #[test]
    fn inverse_is_two_sided(n in 2u64..40, a in 0i64..40, b in 0i64..40, c in 0i64..40, d in 0i64..40) {
        let g = ResidueMatrix::new(n, a, b, c, d);
        prop_assume!(g.is_invertible());
        let gi = g.inverse().unwrap();
        prop_assert_eq!(g.mul(&gi), ResidueMatrix::identity(n));
        prop_assert_eq!(gi.mul(&g), ResidueMatrix::identity(n));
    }
}
