//! Cross-module invariants exercised through the public API only.

use kk_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group(spec: &str) -> Group {
    Group::parse(spec).unwrap()
}

fn random_nonempty(rng: &mut ChaCha8Rng, g: &Group) -> GroupSet {
    let full = g.full_mask();
    let mut mask = rng.gen::<u64>() & full;
    if mask == 0 {
        mask = 1 << (rng.gen_range(0..g.order()));
    }
    GroupSet::from_mask(g.clone(), mask).unwrap()
}

fn small_groups(max_order: usize) -> Vec<Group> {
    (1..=max_order)
        .flat_map(abelian_group_specs)
        .map(|s| Group::new(s).unwrap())
        .collect()
}

#[test]
fn sumset_commutes_translates_and_has_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in [group("Z8"), group("Z2xZ4"), group("Z12"), group("Z3xZ3")] {
        let zero = GroupSet::singleton(g.clone(), g.identity());
        for _ in 0..200 {
            let a = random_nonempty(&mut rng, &g);
            let b = random_nonempty(&mut rng, &g);
            let ab = setops::sumset(&a, &b).unwrap();
            assert_eq!(ab, setops::sumset(&b, &a).unwrap());
            assert_eq!(setops::sumset(&a, &zero).unwrap(), a);
            let t = g.element(rng.gen_range(0..g.order())).unwrap();
            assert_eq!(
                setops::sumset(&a.translate(t), &b).unwrap(),
                ab.translate(t)
            );
            assert!(ab.len() >= a.len().max(b.len()));
        }
    }
}

#[test]
fn sumset_associates() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in [group("Z12"), group("Z2xZ2xZ3")] {
        for _ in 0..200 {
            let a = random_nonempty(&mut rng, &g);
            let b = random_nonempty(&mut rng, &g);
            let c = random_nonempty(&mut rng, &g);
            let left = setops::sumset(&setops::sumset(&a, &b).unwrap(), &c).unwrap();
            let right = setops::sumset(&a, &setops::sumset(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }
}

#[test]
fn stabilizer_fixes_its_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for g in small_groups(10) {
        for _ in 0..100 {
            let a = random_nonempty(&mut rng, &g);
            let h = setops::stabilizer(&a);
            let hs = GroupSet::from_mask(g.clone(), h.mask()).unwrap();
            assert_eq!(setops::sumset(&a, &hs).unwrap(), a);
            // Maximality: no strictly larger subgroup fixes A.
            for k in enumerate_subgroups(&g) {
                if k.order() > h.order() {
                    let ks = GroupSet::from_mask(g.clone(), k.mask()).unwrap();
                    assert_ne!(setops::sumset(&a, &ks).unwrap(), a);
                }
            }
        }
    }
}

#[test]
fn kneser_gap_nonnegative_exhaustive() {
    for g in small_groups(8) {
        let full = g.full_mask();
        for am in 1..=full {
            let a = GroupSet::from_mask(g.clone(), am).unwrap();
            for bm in am..=full {
                let b = GroupSet::from_mask(g.clone(), bm).unwrap();
                assert!(setops::kneser_gap(&a, &b).unwrap() >= 0, "{g} {a} {b}");
            }
        }
    }
}

#[test]
fn kneser_gap_nonnegative_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for g in [group("Z16"), group("Z2xZ10"), group("Z24"), group("Z4xZ4")] {
        for _ in 0..5_000 {
            let a = random_nonempty(&mut rng, &g);
            let b = random_nonempty(&mut rng, &g);
            assert!(setops::kneser_gap(&a, &b).unwrap() >= 0, "{g} {a} {b}");
        }
    }
}

#[test]
fn deficiency_set_matches_brute_force() {
    for g in small_groups(8) {
        let full = g.full_mask();
        for am in 1..=full {
            if am == full {
                continue;
            }
            let a = GroupSet::from_mask(g.clone(), am).unwrap();
            let (d, h) = setops::deficiency_set(&a).unwrap();
            let mut brute = i64::MIN;
            for bm in 1..=full {
                let b = GroupSet::from_mask(g.clone(), bm).unwrap();
                let s = setops::sumset(&a, &b).unwrap();
                if !s.is_full() {
                    brute = brute.max(a.len() as i64 + b.len() as i64 - s.len() as i64);
                }
            }
            assert_eq!(d, brute, "{g} A={a}");
            // The witness subgroup attains the maximum.
            let hs = GroupSet::from_mask(g.clone(), h.mask()).unwrap();
            assert_eq!(setops::deficiency_pair(&a, &hs).unwrap(), d);
        }
    }
}

#[test]
fn saturation_produces_maximal_trios() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for g in [group("Z10"), group("Z2xZ6")] {
        let mut seen = 0;
        while seen < 300 {
            let a = random_nonempty(&mut rng, &g);
            let b = random_nonempty(&mut rng, &g);
            let Ok(t) = trio::make_trio(&a, &b) else {
                continue;
            };
            if !t.is_nontrivial() {
                continue;
            }
            seen += 1;
            let s = trio::saturate(&t);
            assert!(trio::is_maximal(&s), "{g} {a} {b}");
            assert!(trio::trio_deficiency(&s) >= trio::trio_deficiency(&t));
            assert_eq!(trio::saturate(&s), s);
            if t.is_critical() {
                assert!(s.is_critical());
            }
        }
    }
}

#[test]
fn similarity_orbit_preserves_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let g = group("Z2xZ6");
    let trios = enumerate_maximal_critical_trios(&g, true).unwrap();
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for t in trios.iter().take(60) {
        for _ in 0..8 {
            let perm = PERMS[rng.gen_range(0..6)];
            let g0 = g.element(rng.gen_range(0..g.order())).unwrap();
            let g1 = g.element(rng.gen_range(0..g.order())).unwrap();
            let s = trio::Similarity::perm_shifts(&g, perm, g0, g1).unwrap();
            let u = trio::apply_similarity(t, &s).unwrap();
            assert_eq!(trio::trio_deficiency(&u), trio::trio_deficiency(t));
            assert!(u.is_critical() && u.is_nontrivial());
            assert!(trio::is_maximal(&u));
            let back = trio::apply_similarity(&u, &s.inverse(&g)).unwrap();
            assert_eq!(&back, t);
            assert_eq!(trio::canonical_rep(&u), trio::canonical_rep(t));
        }
    }
}

#[test]
fn dedup_enumeration_counts_orbits() {
    for g in [group("Z6"), group("Z8"), group("Z2xZ4")] {
        let all = enumerate_maximal_critical_trios(&g, false).unwrap();
        let orbits = enumerate_maximal_critical_trios(&g, true).unwrap();
        let mut reps: Vec<Trio> = all.iter().map(trio::canonical_rep).collect();
        reps.sort_by_key(|t| t.masks());
        reps.dedup();
        assert_eq!(reps.len(), orbits.len(), "{g}");
    }
}

#[test]
fn decomposition_round_trips_through_text() {
    for g in [group("Z8"), group("Z2xZ4"), group("Z9")] {
        for t in enumerate_maximal_critical_trios(&g, true).unwrap() {
            let cert = decompose(&t).unwrap();
            assert!(matches!(verify_certificate(&cert), Verdict::Ok));
            let doc = CertificateDocument::new(cert);
            let text = certify::render_document(&doc);
            let parsed = parse_certificate(&text).unwrap();
            assert!(matches!(verify_certificate(&parsed.certificate), Verdict::Ok));
            assert_eq!(certify::render_document(&parsed), text);
        }
    }
}

#[test]
fn pure_tags_certify_maximal_critical_deficiency() {
    use StructureKind::*;
    for g in small_groups(9) {
        for t in enumerate_maximal_critical_trios(&g, true).unwrap() {
            if let Some(tag) = find_structure(&t, &[PureBeat, PureChord]) {
                check_tag(&t, &tag).unwrap();
                assert!(t.is_critical());
                assert!(trio::is_maximal(&t));
                assert_eq!(trio::trio_deficiency(&t), tag.h.order() as i64, "{g}");
            }
        }
    }
}

#[test]
fn near_sequence_profile_example() {
    let g = group("Z12");
    let h = Subgroup::new(parse_set(&g, "{0,4,8}").unwrap()).unwrap();
    let r = g.element(1).unwrap();
    let a = parse_set(&g, "{0,1,4,5,8}").unwrap();
    let p = setops::sequence_profile(&a, &h, r).unwrap();
    assert!(!p.is_sequence); // A itself is not H-stable
    assert!(p.is_near); // A+H is {0,1,4,5,8,9} and only 9 is missing
    assert!(p.is_basic);
    assert_eq!(p.length, 2);
    assert!(p.is_proper); // complement has 7 >= 2|H| elements
    assert!(p.nontrivial_near);

    let stable = parse_set(&g, "{0,4,8,1,5,9}").unwrap();
    let q = setops::sequence_profile(&stable, &h, r).unwrap();
    assert!(q.is_sequence && q.is_basic && q.nontrivial_sequence);
}

#[test]
fn purification_never_decreases_deficiency() {
    // Split a generator coset of a cyclic quotient and confirm the rebuilt
    // trio keeps at least the original deficiency.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for g in [group("Z12"), group("Z2xZ8")] {
        let subgroups: Vec<Subgroup> = enumerate_subgroups(&g)
            .into_iter()
            .filter(|h| h.order() > 1 && h.order() < g.order())
            .collect();
        let mut done = 0;
        let mut tries = 0;
        while done < 100 && tries < 50_000 {
            tries += 1;
            let h = &subgroups[rng.gen_range(0..subgroups.len())];
            let q = QuotientMap::new(&g, h).unwrap();
            if !q.is_cyclic() || q.generators().is_empty() {
                continue;
            }
            let rid = q.generators()[rng.gen_range(0..q.generators().len())];
            let r = q.rep(rid);
            let a = random_nonempty(&mut rng, &g);
            let b = random_nonempty(&mut rng, &g);
            let Ok(t) = trio::make_trio(&a, &b) else {
                continue;
            };
            if !t.is_nontrivial() || !t.is_critical() {
                continue;
            }
            // B and C must both meet the R coset for the split to exist.
            let rm = q.coset_mask(rid);
            let (_, bm, cm) = t.masks();
            if bm & rm == 0 || cm & rm == 0 {
                continue;
            }
            let Ok(p) = trio::purify(&t, h, r) else {
                continue;
            };
            done += 1;
            assert!(trio::trio_deficiency(&p) >= trio::trio_deficiency(&t));
            // A and B survive by construction; C can empty out under these
            // relaxed hypotheses, which the deficiency bound tolerates.
            let (am2, bm2, _) = p.masks();
            assert!(am2 != 0 && bm2 != 0);
        }
        assert!(done > 0, "no purification instances found in {g}");
    }
}

#[test]
fn oracle_enumeration_agrees_with_direct_scan_small() {
    for g in small_groups(6) {
        if g.order() < 2 {
            continue;
        }
        let fast = enumerate_maximal_critical_trios(&g, false).unwrap();
        let slow = enumerate_trios_direct(&g).unwrap();
        assert_eq!(fast.len(), slow.len(), "{g}");
        assert_eq!(fast, slow, "{g}");
    }
}

mod generative {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn sumset_contains_every_translate(am in 1u64..(1 << 12), bm in 1u64..(1 << 12)) {
            let g = group("Z12");
            let a = GroupSet::from_mask(g.clone(), am).unwrap();
            let b = GroupSet::from_mask(g.clone(), bm).unwrap();
            let s = setops::sumset(&a, &b).unwrap();
            for x in b.iter() {
                prop_assert!(a.translate(x).is_subset_of(&s));
            }
        }

        #[test]
        fn deficiency_pair_bounded_by_kneser(am in 1u64..(1 << 12), bm in 1u64..(1 << 12)) {
            let g = group("Z2xZ6");
            let a = GroupSet::from_mask(g.clone(), am).unwrap();
            let b = GroupSet::from_mask(g.clone(), bm).unwrap();
            let s = setops::sumset(&a, &b).unwrap();
            let stab = setops::stabilizer(&s);
            // Kneser: deficiency is at most the stabilizer order of the sumset.
            prop_assert!(setops::deficiency_pair(&a, &b).unwrap() <= stab.order() as i64);
        }
    }
}
