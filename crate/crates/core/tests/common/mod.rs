//! Brute-force oracles built directly on permutations, independent of the
//! library's subgroup and marks machinery.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use equipass::config::Config;
use equipass::functional::{PeriodicProblem, ProblemRegistry};
use equipass::group::{FiniteGroup, Perm};

pub type PermSet = BTreeSet<Perm>;

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn problem(text: &str) -> Box<dyn PeriodicProblem> {
    ProblemRegistry::with_builtins().build(&Config::parse(text).expect("config")).expect("problem")
}

/// Closure of the generators under composition.
pub fn closure(degree: usize, gens: &[Perm]) -> PermSet {
    let mut seen = PermSet::from([Perm::identity(degree)]);
    let mut queue = VecDeque::from([Perm::identity(degree)]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

pub fn conjugate_set(g: &Perm, h: &PermSet) -> PermSet {
    h.iter().map(|x| g.compose(x).compose(&g.inverse())).collect()
}

/// Every subgroup, found by testing all `2^|G|` subsets for closure.
pub fn all_subgroups_exhaustive(elements: &[Perm]) -> BTreeSet<PermSet> {
    assert!(elements.len() <= 16);
    let degree = elements[0].degree();
    let id = Perm::identity(degree);
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << elements.len()) {
        let set: PermSet = (0..elements.len()).filter(|i| mask >> i & 1 == 1).map(|i| elements[i].clone()).collect();
        if !set.contains(&id) {
            continue;
        }
        if set.iter().all(|a| set.iter().all(|b| set.contains(&a.compose(b)))) {
            out.insert(set);
        }
    }
    out
}

/// Representatives of the library's subgroup classes, as permutation sets.
pub fn class_reps(g: &FiniteGroup) -> Vec<PermSet> {
    g.subgroup_classes()
        .iter()
        .map(|c| c.representative.iter().map(|&i| g.elements()[i].clone()).collect())
        .collect()
}

/// Index of the representative conjugate to `s`.
pub fn class_index(elements: &[Perm], reps: &[PermSet], s: &PermSet) -> usize {
    reps.iter()
        .position(|r| r.len() == s.len() && elements.iter().any(|g| &conjugate_set(g, s) == r))
        .expect("every subgroup is conjugate to a representative")
}

/// Left cosets `xH` as sorted sets.
pub fn cosets(elements: &[Perm], h: &PermSet) -> Vec<PermSet> {
    let mut seen = BTreeSet::new();
    for x in elements {
        seen.insert(h.iter().map(|y| x.compose(y)).collect::<PermSet>());
    }
    seen.into_iter().collect()
}

/// `|(G/K)^H|` by scanning cosets.
pub fn fixed_points(elements: &[Perm], k: &PermSet, h: &PermSet) -> usize {
    cosets(elements, k)
        .iter()
        .filter(|c| {
            let x = c.iter().next().unwrap();
            h.iter().all(|y| {
                let moved: PermSet = k.iter().map(|z| y.compose(x).compose(z)).collect();
                &moved == *c
            })
        })
        .count()
}

/// Decomposes `G/H × G/K` into orbits and counts them by stabilizer class.
pub fn product_orbit_counts(g: &FiniteGroup, h: &PermSet, k: &PermSet) -> Vec<i128> {
    let elements = g.elements();
    let reps = class_reps(g);
    let ch = cosets(elements, h);
    let ck = cosets(elements, k);
    let index = |cs: &[PermSet]| -> HashMap<PermSet, usize> { cs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect() };
    let (ih, ik) = (index(&ch), index(&ck));
    let act = |gp: &Perm, c: &PermSet, idx: &HashMap<PermSet, usize>| -> usize {
        idx[&c.iter().map(|x| gp.compose(x)).collect::<PermSet>()]
    };
    let mut counts = vec![0i128; reps.len()];
    let mut seen = vec![vec![false; ck.len()]; ch.len()];
    for a in 0..ch.len() {
        for b in 0..ck.len() {
            if seen[a][b] {
                continue;
            }
            let mut queue = VecDeque::from([(a, b)]);
            seen[a][b] = true;
            while let Some((x, y)) = queue.pop_front() {
                for gen in g.generators() {
                    let (nx, ny) = (act(gen, &ch[x], &ih), act(gen, &ck[y], &ik));
                    if !seen[nx][ny] {
                        seen[nx][ny] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
            let stab: PermSet = elements
                .iter()
                .filter(|e| act(e, &ch[a], &ih) == a && act(e, &ck[b], &ik) == b)
                .cloned()
                .collect();
            counts[class_index(elements, &reps, &stab)] += 1;
        }
    }
    counts
}

pub fn normalizer_index(elements: &[Perm], k: &PermSet) -> usize {
    elements.iter().filter(|g| &conjugate_set(g, k) == k).count() / k.len()
}
