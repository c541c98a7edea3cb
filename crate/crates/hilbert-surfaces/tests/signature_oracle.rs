//! Closed-form signatures of the involution families against coset
//! enumeration, and the small-genus curves with their tabulated signatures.

use hilbert_surfaces::arith::units;
use hilbert_surfaces::gl2::{
    crt_combine, extended_centralizer, full_group, standard_generator, ClassLabel, ResidueMatrix,
    SubgroupH, Tag,
};
use hilbert_surfaces::modular_curves::{verify_family_signatures, x1_genus, xh_signature_oracle};

#[test]
fn closed_forms_match_enumeration_up_to_21() {
    let mut checked = 0;
    let mut rejected = Vec::new();
    for n in 2..=21 {
        for r in units(n) {
            let out = verify_family_signatures(n, r as i64)
                .unwrap_or_else(|e| panic!("N = {n}, r = {r}: {e}"));
            checked += out.checked;
            if out.rejected > 0 {
                rejected.push((n, r));
            }
        }
    }
    assert!(checked > 100);
    assert_eq!(rejected, vec![(4, 3)]);
}

fn gen(tag: Tag, p: u64, k: u32, r: i64) -> ResidueMatrix {
    standard_generator(ClassLabel::new(tag, p, k).unwrap(), r).unwrap()
}

/// Returns `(η⁺, ε_∞⁺, ε₂⁺, ε₃⁺, genus, d_g)` of `X_g⁺` by enumeration.
fn row(g: ResidueMatrix) -> [u64; 6] {
    let s = xh_signature_oracle(&extended_centralizer(&g).unwrap()).unwrap();
    [s.index, s.cusps, s.e2, s.e3, s.genus, s.components]
}

#[test]
fn small_genus_two_primary_rows() {
    let id5 = ResidueMatrix::identity(5);
    let id3 = ResidueMatrix::identity(3);
    let i_sharp = crt_combine(&gen(Tag::ISharp, 2, 1, 1), &id5).unwrap();
    assert_eq!(row(i_sharp), [2, 1, 0, 2, 0, 1]);
    let borel = crt_combine(&gen(Tag::Borel, 2, 1, 1), &id5).unwrap();
    assert_eq!(row(borel), [3, 2, 1, 0, 0, 1]);
    let borel_sharp = crt_combine(&gen(Tag::BorelSharp, 2, 2, 3), &id3).unwrap();
    assert_eq!(row(borel_sharp), [6, 3, 0, 0, 0, 1]);
    let borel4 = crt_combine(&gen(Tag::BorelPow(2), 2, 2, 1), &id3).unwrap();
    assert_eq!(row(borel4), [6, 3, 0, 0, 0, 2]);
}

#[test]
fn small_genus_three_primary_rows() {
    let id5 = ResidueMatrix::identity(5);
    let at15 = |g: ResidueMatrix| row(crt_combine(&g, &id5).unwrap());
    assert_eq!(at15(gen(Tag::Borel, 3, 1, 1)), [4, 2, 0, 1, 0, 2]);
    assert_eq!(at15(gen(Tag::Ns, 3, 1, 1)), [6, 2, 2, 0, 0, 1]);
    assert_eq!(at15(gen(Tag::S, 3, 1, 2)), [12, 4, 0, 0, 0, 1]);
    assert_eq!(at15(gen(Tag::NsBar, 3, 1, 2)), [6, 2, 2, 0, 0, 1]);
}

#[test]
fn full_group_is_the_j_line() {
    let s = xh_signature_oracle(&full_group(7).unwrap()).unwrap();
    assert_eq!((s.index, s.genus, s.components), (1, 0, 1));
}

#[test]
fn x1_genus_matches_enumeration() {
    for n in 5..=21u64 {
        let elements: Vec<ResidueMatrix> = (0..n as i64)
            .flat_map(|b| [1, -1].map(|s| ResidueMatrix::new(n, s, b * s, 0, s)))
            .collect();
        let group = SubgroupH::custom(n, elements).unwrap();
        let s = xh_signature_oracle(&group).unwrap();
        assert_eq!(s.genus, x1_genus(n).unwrap(), "N = {n}");
    }
}
