mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::*;
use equipass::burnside::{BurnsideRing, GhostVector, Preimage};
use equipass::crystal::{self, cyclic_crystal, CrystalGroup};
use equipass::group::catalog;
use equipass::intlinalg::{self, Int, IntMatrix};

fn rings() -> Vec<BurnsideRing> {
    catalog::small_groups().into_iter().filter(|g| g.order() <= 16).map(|g| BurnsideRing::new(Arc::new(g))).collect()
}

#[test]
fn subgroup_classes_match_exhaustive_search() {
    for g in catalog::small_groups().into_iter().filter(|g| g.order() <= 16) {
        let all = all_subgroups_exhaustive(g.elements());
        let reps = class_reps(&g);
        let mut per_class = vec![0usize; reps.len()];
        for s in &all {
            per_class[class_index(g.elements(), &reps, s)] += 1;
        }
        let sizes: Vec<usize> = g.subgroup_classes().iter().map(|c| c.class_size).collect();
        assert_eq!(per_class, sizes, "{}", g.name());
        for (c, rep) in g.subgroup_classes().iter().zip(&reps) {
            assert_eq!(c.order, rep.len());
            assert_eq!(c.normalizer_index, normalizer_index(g.elements(), rep), "{}", g.name());
        }
    }
}

#[test]
fn generated_groups_match_independent_closure() {
    for g in catalog::small_groups() {
        let closed = closure(g.degree(), g.generators());
        assert_eq!(closed.len(), g.order());
        assert!(g.elements().iter().all(|e| closed.contains(e)));
    }
}

#[test]
fn fixed_points_detect_subconjugacy() {
    for g in catalog::small_groups().into_iter().filter(|g| g.order() <= 16) {
        let reps = class_reps(&g);
        for (ki, k) in reps.iter().enumerate() {
            for (hi, h) in reps.iter().enumerate() {
                let count = g.fixed_point_count(ki, hi);
                assert_eq!(count, fixed_points(g.elements(), k, h), "{} K={ki} H={hi}", g.name());
                let subconjugate = g.elements().iter().any(|x| conjugate_set(x, h).is_subset(k));
                assert_eq!(count > 0, subconjugate, "{} K={ki} H={hi}", g.name());
            }
        }
    }
}

fn ring_and_pair() -> impl Strategy<Value = (usize, Vec<Int>, Vec<Int>)> {
    let n = rings().len();
    (0..n).prop_flat_map(|i| {
        let r = rings()[i].rank();
        (Just(i), prop::collection::vec(-6i128..=6, r), prop::collection::vec(-6i128..=6, r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marks_are_an_injective_ring_map((i, x, y) in ring_and_pair()) {
        let ring = &rings()[i];
        let (ex, ey) = (ring.element(x.clone()).unwrap(), ring.element(y.clone()).unwrap());
        let (mx, my) = (ring.marks(&ex), ring.marks(&ey));
        prop_assert_eq!(x == y, mx == my);
        let prod = ring.marks(&ring.multiply(&ex, &ey));
        let pointwise: Vec<Int> = mx.values.iter().zip(&my.values).map(|(a, b)| a * b).collect();
        prop_assert_eq!(&prod.values, &pointwise);
        prop_assert_eq!(ring.from_ghost(&mx).unwrap(), Preimage::Element(ex.clone()));
        prop_assert_eq!(ring.multiply(&ex, &ey), ring.multiply(&ey, &ex));
    }

    #[test]
    fn non_ghost_vectors_are_rejected((i, x, _y) in ring_and_pair()) {
        let ring = &rings()[i];
        let mut v = ring.marks(&ring.element(x).unwrap());
        // shifting the mark at the trivial subgroup by 1 moves the
        // [G/e] coefficient by 1/|G|
        if ring.rank() > 1 {
            v.values[0] += 1;
            let bumped = GhostVector { values: v.values.clone() };
            let rejected = matches!(ring.from_ghost(&bumped).unwrap(), Preimage::NotInImage { .. });
            prop_assert!(rejected);
        }
    }
}

/// `U` from a word in the elementary unimodular moves.
fn unimodular(word: &[(usize, i8)]) -> IntMatrix {
    let mut u = intlinalg::identity(2);
    for &(kind, k) in word {
        let k = k as Int;
        let e: IntMatrix = match kind % 3 {
            0 => vec![vec![1, k], vec![0, 1]],
            1 => vec![vec![1, 0], vec![k, 1]],
            _ => vec![vec![0, 1], vec![1, 0]],
        };
        u = intlinalg::mat_mul(&u, &e);
    }
    u
}

fn inverse_2x2(u: &IntMatrix) -> IntMatrix {
    let d = intlinalg::determinant(u);
    vec![vec![u[1][1] * d, -u[0][1] * d], vec![-u[1][0] * d, u[0][0] * d]]
}

fn conjugated(c: &CrystalGroup, u: &IntMatrix) -> CrystalGroup {
    let gen = c.point_group().index_of(&c.point_group().generators()[0]).unwrap();
    let m = intlinalg::mat_mul(&intlinalg::mat_mul(u, c.matrix(gen)), &inverse_2x2(u));
    cyclic_crystal("conj", c.prime(), c.point_group().order() as u32, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maximality_is_invariant_under_change_of_basis(
        which in 0usize..3,
        word in prop::collection::vec((0usize..3, -2i8..=2), 0..5),
    ) {
        let base = [crystal::plane_inversion(), crystal::plane_rotation(), cyclic_crystal("flip", 2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap()];
        let c = &base[which];
        let d = conjugated(c, &unimodular(&word));
        let mut free = true;
        for g in 1..d.point_group().order() {
            let m = d.matrix(g);
            let det = (1 - m[0][0]) * (1 - m[1][1]) - m[0][1] * m[1][0];
            prop_assert_eq!(det != 0, c_free_at(&d, g));
            free &= det != 0;
        }
        prop_assert_eq!(d.free_outside_zero(), free);
        let (rc, rd) = (c.check_condition_m(), d.check_condition_m());
        prop_assert_eq!(rc.verdict, rd.verdict);
        prop_assert_eq!(rc.maximal_classes.len(), rd.maximal_classes.len());
        if rd.free_outside_zero {
            let mut orders_c: Vec<usize> = rc.maximal_classes.iter().map(|m| m.stabilizer.len()).collect();
            let mut orders_d: Vec<usize> = rd.maximal_classes.iter().map(|m| m.stabilizer.len()).collect();
            orders_c.sort();
            orders_d.sort();
            prop_assert_eq!(orders_c, orders_d);
        }
    }
}

fn c_free_at(c: &CrystalGroup, g: usize) -> bool {
    let m = c.matrix(g);
    let n = c.rank();
    let a: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| Int::from(i == j) - m[i][j]).collect()).collect();
    intlinalg::rational_rank(&intlinalg::to_rational(&a)) == n
}

#[test]
fn special_points_agree_with_brute_force() {
    for c in [crystal::infinite_dihedral(), crystal::plane_inversion(), crystal::plane_rotation()] {
        let classes = c.maximal_finite_subgroups().unwrap();
        let points = c.brute_force_special_points();
        // every brute-force point lies in the orbit of exactly one class center
        let mut hit = vec![0usize; classes.len()];
        for x in &points {
            let owners: Vec<usize> = classes
                .iter()
                .enumerate()
                .filter(|(_, m)| {
                    (0..c.point_group().order()).any(|h| {
                        let b = c.matrix(h);
                        (0..c.rank()).all(|i| {
                            let y: intlinalg::Rational =
                                (0..c.rank()).map(|j| intlinalg::Rational::from(b[i][j]) * m.center[j]).sum();
                            intlinalg::frac(y) == x[i]
                        })
                    })
                })
                .map(|(k, _)| k)
                .collect();
            assert_eq!(owners.len(), 1, "{}: {x:?}", c.name());
            hit[owners[0]] += 1;
        }
        assert!(hit.iter().all(|&k| k > 0), "{}: some class has no brute-force point", c.name());
    }
}
