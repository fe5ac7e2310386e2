use std::sync::OnceLock;

use odoforge_core::cells::jpartition_equivariance_check;
use odoforge_core::extension::{phi_equivariance_check, OdometerSystem};
use odoforge_core::group::{dihedral_chain, dyadic_chain, s4_nonnormal_chain, zd_power_chain, GroupWord, QuotientChain, WordKind};
use odoforge_core::measure::{average_measure, metric_d, CylinderMeasure};
use odoforge_core::odometer::{act, OdometerPoint};
use odoforge_core::rational::{parse_pq, ratio, sum, to_pq};
use odoforge_core::tower::{verify_tower, TransversalTower};
use proptest::prelude::*;

struct Fixture {
    chain: QuotientChain,
    tower: TransversalTower,
}

fn fixtures() -> &'static [Fixture] {
    static F: OnceLock<Vec<Fixture>> = OnceLock::new();
    F.get_or_init(|| {
        [dyadic_chain(6), zd_power_chain(2, 4), dihedral_chain(5), s4_nonnormal_chain()]
            .into_iter()
            .map(|chain| {
                let tower = TransversalTower::build(&chain, chain.depth()).unwrap();
                Fixture { chain, tower }
            })
            .collect()
    })
}

/// A word of the fixture's group built from raw draws.
fn word(kind: WordKind, raw: &[i64]) -> GroupWord {
    match kind {
        WordKind::Zd(d) => GroupWord::Zd((0..d).map(|i| raw.get(i).copied().unwrap_or(0)).collect()),
        WordKind::Free(k) => raw.iter().fold(kind.identity(), |acc, &x| {
            let l = (x.rem_euclid(k as i64) + 1) as i32 * if x < 0 { -1 } else { 1 };
            acc.mul(&GroupWord::Free(vec![l])).unwrap()
        }),
    }
}

fn raw_word() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-40i64..40, 0..8)
}

fn point(f: &Fixture, top: usize) -> OdometerPoint {
    let depth = f.chain.depth();
    OdometerPoint::from_top_cell(&f.chain, depth, top % f.chain.index(depth))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cosets_respect_multiplication(i in 0usize..4, a in raw_word(), b in raw_word()) {
        let f = &fixtures()[i];
        let (g, h) = (word(f.chain.word_kind(), &a), word(f.chain.word_kind(), &b));
        let gh = g.mul(&h).unwrap();
        for n in 1..=f.chain.depth() {
            prop_assert_eq!(f.chain.left_cell(n, &gh), f.chain.act_cell(n, &g, f.chain.left_cell(n, &h)));
            prop_assert_eq!(f.chain.project_cell(n, f.chain.left_cell(n, &g)), f.chain.left_cell(n - 1, &g));
        }
        prop_assert!(g.mul(&g.inverse()).unwrap().is_identity());
    }

    #[test]
    fn translation_is_an_action(i in 0usize..4, a in raw_word(), b in raw_word(), top in 0usize..4096) {
        let f = &fixtures()[i];
        let (g, h) = (word(f.chain.word_kind(), &a), word(f.chain.word_kind(), &b));
        let z = point(f, top);
        let lhs = act(&f.chain, &g.mul(&h).unwrap(), &z).unwrap();
        let rhs = act(&f.chain, &g, &act(&f.chain, &h, &z).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(lhs.is_compatible(&f.chain));
        prop_assert_eq!(act(&f.chain, &f.chain.identity(), &z).unwrap(), z);
    }

    #[test]
    fn stage_layouts_move_with_translation(i in 0usize..4, a in raw_word(), top in 0usize..4096) {
        let f = &fixtures()[i];
        let g = word(f.chain.word_kind(), &a);
        let window = f.chain.word_kind().ball(2);
        let z = point(f, top);
        prop_assert!(jpartition_equivariance_check(&f.chain, &f.tower, &z, &g, &window).is_empty());
        let sys = OdometerSystem::new(&f.chain, &f.tower, f.chain.depth());
        for stage in 0..=f.chain.depth() {
            prop_assert!(phi_equivariance_check(&sys, &z, &g, stage, &window).is_empty());
        }
    }

    #[test]
    fn metric_is_symmetric_and_separates(i in 0usize..3, a in 0usize..4096, b in 0usize..4096) {
        let f = &fixtures()[i];
        let level = f.chain.depth().min(4);
        let za = point(f, a).truncate(level);
        let zb = point(f, b).truncate(level);
        let (ma, mb) = (CylinderMeasure::point_mass(&f.chain, &za), CylinderMeasure::point_mass(&f.chain, &zb));
        let ab = metric_d(&f.chain, &ma, &mb, level).unwrap();
        let ba = metric_d(&f.chain, &mb, &ma, level).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.partial == ratio(0, 1), za == zb);
    }

    #[test]
    fn averaging_keeps_total_mass(i in 0usize..3, raw in prop::collection::vec(1i64..20, 512)) {
        let f = &fixtures()[i];
        let n = 2;
        let size = f.chain.index(n);
        let total: i64 = raw[..size].iter().sum();
        let lambda = CylinderMeasure::new(&f.chain, n, raw[..size].iter().map(|&w| ratio(w, total)).collect()).unwrap();
        let mu = average_measure(&f.chain, &f.tower, &lambda, n).unwrap();
        prop_assert_eq!(sum(mu.weights()), ratio(1, 1));
        prop_assert!(mu.is_uniform());
    }

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_pq(&to_pq(&r)), Some(r));
    }
}

#[test]
fn tower_files_round_trip() {
    for f in fixtures() {
        let back = TransversalTower::from_json(&f.chain, &f.tower.to_json()).unwrap();
        assert!(verify_tower(&f.chain, &back).passed());
        assert_eq!(back.to_json(), f.tower.to_json());
    }
}
