//! Structural properties of the surface invariants on and around the bundled range.

use hilbert_surfaces::arith::{divisors, euler_phi, gcd, int, rat, units};
use hilbert_surfaces::modular_curves::{weyl_aux, RATIONAL_X0_PLUS};
use hilbert_surfaces::surface::*;
use hilbert_surfaces::{arith::is_unit_square, Error};
use proptest::prelude::*;

fn levels_in(min: u64, max: u64) -> Vec<Level> {
    let mut out = Vec::new();
    for n in min..=max {
        let mut reps: Vec<u64> = units(n)
            .into_iter()
            .map(|r| square_class_representative(n, r))
            .collect();
        reps.sort_unstable();
        reps.dedup();
        out.extend(reps.into_iter().map(|r| Level::new(n, r as i64).unwrap()));
    }
    out
}

fn locus_key(level: &Level) -> Vec<(String, i64, bool)> {
    let mut key: Vec<(String, i64, bool)> = fixed_locus(level)
        .unwrap()
        .into_iter()
        .map(|c| (format!("{:?}", c.signature), c.k_dot, c.in_support_s))
        .collect();
    key.sort();
    key
}

#[test]
fn invariants_depend_only_on_the_square_class() {
    let base = BaseData::bundled();
    for n in 5..=24u64 {
        for x in units(n) {
            let raw = Level::with_representative(n, x as i64).unwrap();
            let norm = Level::new(n, x as i64).unwrap();
            assert_eq!(
                singularity_census(&raw).unwrap(),
                singularity_census(&norm).unwrap()
            );
            assert_eq!(locus_key(&raw), locus_key(&norm), "N = {n}, r = {x}");
            assert_eq!(
                fixed_point_census(&raw).unwrap().isolated,
                fixed_point_census(&norm).unwrap().isolated,
                "N = {n}, r = {x}"
            );
            assert_eq!(
                frak_m(&raw).unwrap(),
                frak_m(&norm).unwrap(),
                "N = {n}, r = {x}"
            );
            assert_eq!(classify_w_by_list(&raw), classify_w_by_list(&norm));
            if classify_z_by_list(&norm) == EKClass::Rational {
                continue;
            }
            assert_eq!(
                blowdown_deltas(&raw).unwrap(),
                blowdown_deltas(&norm).unwrap()
            );
            assert_eq!(
                kwbar_dot_cinf(&raw).unwrap(),
                kwbar_dot_cinf(&norm).unwrap()
            );
            if n >= 6 {
                let a = invariant_row(&raw, &base).unwrap();
                let b = invariant_row(&norm, &base).unwrap();
                assert_eq!(InvariantRow { r: b.r, ..a }, b, "N = {n}, r = {x}");
            }
        }
    }
}

proptest! {
    #[test]
    fn normalisation_is_idempotent_and_class_invariant(n in 2u64..200, x in 1i64..400, r in 1i64..400) {
        prop_assume!(gcd(x, n as i64) == 1 && gcd(r, n as i64) == 1);
        let level = Level::new(n, r).unwrap();
        prop_assert_eq!(Level::new(n, level.r as i64).unwrap(), level);
        prop_assert_eq!(Level::new(n, x * x * r).unwrap(), level);
        prop_assert!(level.r >= 1 && level.r < n.max(2));
    }
}

#[test]
fn kappa_is_min_two_pg_minus_one_on_bundled_rows() {
    let base = BaseData::bundled();
    for (level, row) in base.iter() {
        let z = classify_z(&level, &base).unwrap();
        assert_eq!(z, EKClass::from_geometric_genus(row.pg_z), "Z{level}");
        let w = classify_w(&level, &base).unwrap();
        assert_eq!(
            w,
            EKClass::from_geometric_genus(pg_w(&level, &base).unwrap()),
            "W{level}"
        );
    }
}

#[test]
fn genus_and_canonical_bounds_hold_on_bundled_rows() {
    let base = BaseData::bundled();
    for (level, row) in base.iter() {
        let mu = weyl_aux(level.m, level.ri()).unwrap().mu;
        let scaled = int(1i64 << (2 * level.k)) * rat(1, 2) * mu;
        let pg = int(pg_w(&level, &base).unwrap());
        let kw = int(kw_squared(&level, &base).unwrap());
        assert!(
            int(2) * pg >= int(row.pg_z) - rat(1, 4) * scaled.clone() - int(1),
            "p_g at {level}"
        );
        assert!(
            int(2) * kw >= int(row.c1sq_z) - int(3) * scaled - int(6),
            "K^2 at {level}"
        );
    }
}

#[test]
fn err_vanishes_below_the_level() {
    for n in 2..=40u64 {
        for m in (1..n).filter(|&m| gcd(m as i64, n as i64) == 1) {
            let e = err(n, m).unwrap();
            assert_eq!(e.total, 0, "N = {n}, m = {m}: {e:?}");
        }
    }
}

#[test]
fn err_frozen_values() {
    assert_eq!(err(5, 6).unwrap().total, 2);
    assert_eq!(err(17, 21).unwrap().total, 2);
    assert!(matches!(err(10, 4), Err(Error::Domain(_))));
}

#[test]
fn cusp_incidence_balances_widths_on_the_table_range() {
    let mut pairs = 0;
    for level in levels_in(6, 33) {
        for &m in RATIONAL_X0_PLUS.iter().chain(&[22, 33, 46, 51, 55, 57]) {
            if gcd(m as i64, level.n as i64) != 1
                || !is_unit_square(level.n, m as i64 * level.ri())
                || m < 2
            {
                continue;
            }
            for inc in fm_cusp_incidence(&level, m).unwrap() {
                assert!(inc.widths_balance(), "{level}, m = {m}, cusp {}", inc.cusp);
            }
            pairs += 1;
        }
    }
    assert!(pairs > 300, "{pairs}");
}

#[test]
fn incidence_examples() {
    let marks = |n: u64, r: i64, m: u64| -> Vec<(u64, Vec<usize>)> {
        fm_cusp_incidence(&Level::new(n, r).unwrap(), m)
            .unwrap()
            .into_iter()
            .map(|inc| (inc.cusp.d, inc.chain_components_met()))
            .collect()
    };
    let at_16_5 = marks(16, 5, 21);
    assert_eq!(at_16_5[0], (1, vec![1]));
    assert_eq!(at_16_5[2], (7, vec![3]));
    assert_eq!(marks(17, 1, 9)[0], (1, vec![1]));
    let at_17_15 = marks(17, 1, 15);
    assert_eq!(at_17_15[2], (5, vec![2]));
    assert_eq!(at_17_15[3], (15, vec![8]));
}

#[test]
fn smoothness_obstruction_examples() {
    let at =
        |n: u64, r: i64, m: u64| fm_smoothness_obstructions(&Level::new(n, r).unwrap(), m).unwrap();
    assert!(at(16, 5, 21).is_empty());
    assert!(at(17, 1, 21).is_empty());
    assert!(at(21, 2, 29).contains(&CmObstruction {
        disc: 4,
        a: 40,
        b: 21
    }));
}

#[test]
fn census_counts_every_unit_once() {
    for level in levels_in(5, 60).into_iter().chain(levels_in(3, 3)) {
        let census = singularity_census(&level).unwrap();
        let total: u64 = census.at_infty.iter().map(|(_, c)| c).sum();
        let n = level.n;
        let expected: u64 = divisors(n)
            .into_iter()
            .filter(|&d| d != 1)
            .map(|d| euler_phi(d) * euler_phi(n / d))
            .sum();
        assert_eq!(2 * total, expected, "{level}");
        let at_zero: u64 = census.at_0.iter().map(|(_, c)| c).sum();
        assert_eq!(at_zero, hilbert_surfaces::arith::h_3n2(n), "{level}");
    }
}

#[test]
fn census_rejects_levels_two_and_four() {
    for (n, r) in [(2, 1), (4, 1), (4, 3)] {
        assert!(matches!(
            singularity_census(&Level::new(n, r).unwrap()),
            Err(Error::Domain(_))
        ));
    }
}

#[test]
fn ksmall_is_positive_for_general_type_except_four_levels() {
    let base = BaseData::bundled();
    let zero = [(24, 1), (24, 5), (24, 7), (24, 17)];
    for (level, _) in base.iter() {
        if classify_w_by_list(&level) != EKClass::GeneralType {
            continue;
        }
        let k = k_small_squared(&level, &base).unwrap();
        if zero.contains(&(level.n, level.r)) {
            assert_eq!(k, 0, "{level}");
        } else {
            assert!(k > 0, "{level}: {k}");
        }
    }
}

#[test]
fn rational_cases_are_domain_errors() {
    let base = BaseData::bundled();
    assert!(matches!(
        blowdown_deltas(&Level::new(8, 1).unwrap()),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        k_small_squared(&Level::new(15, 1).unwrap(), &base),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        base_data(&Level::new(40, 1).unwrap()),
        Err(Error::Data(_))
    ));
}

#[test]
fn isolated_fixed_points_frozen() {
    let at = |n, r| {
        fixed_point_census(&Level::new(n, r).unwrap())
            .unwrap()
            .isolated
    };
    assert_eq!(at(17, 1).total(), 4);
    assert_eq!(at(24, 5).p_inf, 0);
    assert_eq!(at(16, 1).p_inf, 2);
}
