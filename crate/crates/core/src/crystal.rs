//! Groups `Z^n ⋊_β P` with `P` a finite p-group acting through integer
//! matrices: freeness of the point action, maximal finite subgroups, the
//! maximality condition, and the diagram of finite subgroups feeding the
//! inverse limit of Burnside rings.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::burnside::{FamilyDiagram, Morphism};
use crate::group::{self, FiniteGroup, GroupError, Perm};
use crate::intlinalg::{self, Int, IntMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("matrix for generator {0} is not {1}x{1}")]
    Shape(usize, usize),
    #[error("matrices do not define a homomorphism at element {0}")]
    NotHomomorphism(usize),
    #[error("matrix of element {0} has determinant {1}, expected ±1")]
    NotUnimodular(usize, Int),
    #[error("point group of order {order} is not a {prime}-group")]
    NotPGroup { order: usize, prime: u64 },
    #[error("{0} generator matrices for {1} generators")]
    GeneratorCount(usize, usize),
    #[error("the point group does not act freely outside the origin")]
    NotFree,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// `G = Z^n ⋊_β P`, acting on `R^n` by `(t, h)·v = β(h) v + t`.
#[derive(Debug, Clone)]
pub struct CrystalGroup {
    name: String,
    rank: usize,
    prime: u64,
    point_group: Arc<FiniteGroup>,
    /// `β(g)` for every element of `P`, in element order.
    matrices: Vec<IntMatrix>,
}

/// A maximal finite subgroup `{(x - β(h)x, h) : h ∈ P_x}` fixing the center `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalClass {
    /// Center in `[0,1)^n`, a representative of `Q^n / Z^n` modulo `P`.
    pub center: Vec<Rational>,
    /// Indices (into the point group elements) of `P_x`.
    pub stabilizer: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionMReport {
    pub free_outside_zero: bool,
    pub maximal_classes: Vec<MaximalClass>,
    /// Distinct maximal subgroups meet trivially (checked on sampled conjugates).
    pub unique_maximal: bool,
    pub self_normalizing: bool,
    pub verdict: bool,
}

impl CrystalGroup {
    /// Builds the group from `β` on the generators of `P`.
    pub fn new(
        name: impl Into<String>,
        rank: usize,
        prime: u64,
        point_group: FiniteGroup,
        generator_matrices: Vec<IntMatrix>,
    ) -> Result<Self, GeometryError> {
        let gens = point_group.generators().len();
        if generator_matrices.len() != gens {
            return Err(GeometryError::GeneratorCount(generator_matrices.len(), gens));
        }
        for (i, m) in generator_matrices.iter().enumerate() {
            if m.len() != rank || m.iter().any(|r| r.len() != rank) {
                return Err(GeometryError::Shape(i, rank));
            }
        }
        if !point_group.is_p_group(prime)? {
            return Err(GeometryError::NotPGroup { order: point_group.order(), prime });
        }
        let gen_idx: Vec<usize> = point_group
            .generators()
            .iter()
            .map(|p| point_group.index_of(p).expect("generator is an element"))
            .collect();
        let n = point_group.order();
        let mut matrices: Vec<Option<IntMatrix>> = vec![None; n];
        matrices[0] = Some(intlinalg::identity(rank));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let mx = matrices[x].clone().expect("visited");
            for (&g, mg) in gen_idx.iter().zip(&generator_matrices) {
                let y = point_group.mul(x, g);
                let my = intlinalg::mat_mul(&mx, mg);
                match &matrices[y] {
                    None => {
                        matrices[y] = Some(my);
                        queue.push_back(y);
                    }
                    Some(existing) if *existing != my => return Err(GeometryError::NotHomomorphism(y)),
                    Some(_) => {}
                }
            }
        }
        let matrices: Vec<IntMatrix> = matrices.into_iter().map(|m| m.expect("group is generated")).collect();
        for (i, m) in matrices.iter().enumerate() {
            let d = intlinalg::determinant(m);
            if d.abs() != 1 {
                return Err(GeometryError::NotUnimodular(i, d));
            }
        }
        Ok(CrystalGroup { name: name.into(), rank, prime, point_group: Arc::new(point_group), matrices })
    }

    /// The lattice `Z^n` with trivial point group.
    pub fn lattice(rank: usize) -> Self {
        Self::new(format!("Z^{rank}"), rank, 2, group::catalog::trivial(), vec![]).expect("trivial point group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn point_group(&self) -> &FiniteGroup {
        &self.point_group
    }

    pub fn matrix(&self, element: usize) -> &IntMatrix {
        &self.matrices[element]
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    fn identity_minus(&self, element: usize) -> IntMatrix {
        let m = &self.matrices[element];
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| Int::from(i == j) - m[i][j]).collect())
            .collect()
    }

    /// `det(β(g) - I) ≠ 0` for every non-identity `g`.
    pub fn free_outside_zero(&self) -> bool {
        (1..self.point_group.order()).all(|g| intlinalg::determinant(&self.identity_minus(g)) != 0)
    }

    fn act(&self, element: usize, x: &[Rational]) -> Vec<Rational> {
        self.matrices[element]
            .iter()
            .map(|row| row.iter().zip(x).map(|(&a, &b)| Rational::from_integer(a) * b).sum())
            .collect()
    }

    /// `(I - β(h)) x` is integral.
    fn fixes_mod_lattice(&self, element: usize, x: &[Rational]) -> bool {
        let bx = self.act(element, x);
        x.iter().zip(&bx).all(|(a, b)| (*a - *b).is_integer())
    }

    pub fn stabilizer_of(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.point_group.order()).filter(|&h| self.fixes_mod_lattice(h, x)).collect()
    }

    fn reduce(x: &[Rational]) -> Vec<Rational> {
        x.iter().map(|&v| intlinalg::frac(v)).collect()
    }

    /// Points of `Q^n/Z^n` fixed (mod the lattice) by `element`, from the
    /// Smith form of `I - β(element)`.
    fn fixed_points(&self, element: usize) -> Vec<Vec<Rational>> {
        let smith = intlinalg::smith_normal_form(&self.identity_minus(element));
        let divisors = &smith.diagonal;
        let mut out = Vec::new();
        let mut counter = vec![0 as Int; self.rank];
        loop {
            let y: Vec<Rational> = counter.iter().zip(divisors).map(|(&c, &d)| Rational::new(c, d)).collect();
            let x: Vec<Rational> = smith
                .right
                .iter()
                .map(|row| row.iter().zip(&y).map(|(&a, &b)| Rational::from_integer(a) * b).sum())
                .collect();
            out.push(Self::reduce(&x));
            let mut i = 0;
            while i < self.rank {
                counter[i] += 1;
                if counter[i] < divisors[i] {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
            if i == self.rank {
                break;
            }
        }
        out
    }

    /// Representatives of the conjugacy classes of maximal finite subgroups.
    pub fn maximal_finite_subgroups(&self) -> Result<Vec<MaximalClass>, GeometryError> {
        if !self.free_outside_zero() {
            return Err(GeometryError::NotFree);
        }
        let order = self.point_group.order();
        if order == 1 {
            return Ok(vec![MaximalClass { center: vec![Rational::zero(); self.rank], stabilizer: vec![0] }]);
        }
        let mut points: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for g in 1..order {
            points.extend(self.fixed_points(g));
        }
        let mut classes = Vec::new();
        let mut done: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for x in &points {
            if done.contains(x) {
                continue;
            }
            let orbit: BTreeSet<Vec<Rational>> = (0..order).map(|h| Self::reduce(&self.act(h, x))).collect();
            let center = orbit.iter().next().expect("orbit is nonempty").clone();
            done.extend(orbit);
            let stabilizer = self.stabilizer_of(&center);
            classes.push(MaximalClass { center, stabilizer });
        }
        classes.sort_by(|a, b| a.center.cmp(&b.center));
        Ok(classes)
    }

    /// Translation part `x - β(h)x` of the element of `M_x` over `h`.
    fn translation_at(&self, x: &[Rational], h: usize) -> Vec<Rational> {
        let bx = self.act(h, x);
        x.iter().zip(&bx).map(|(a, b)| *a - *b).collect()
    }

    /// Solves the conjugation equations for `N_G(M_x)` and returns its elements
    /// as `(translation, point element)`.
    pub fn normalizer_of(&self, class: &MaximalClass) -> Vec<(Vec<Int>, usize)> {
        let x = &class.center;
        let nontrivial: Vec<usize> = class.stabilizer.iter().copied().filter(|&h| h != 0).collect();
        let Some(&h0) = nontrivial.first() else {
            return Vec::new();
        };
        let p = &*self.point_group;
        let mut out = Vec::new();
        'k: for k in 0..p.order() {
            let mut solution: Option<Vec<Rational>> = None;
            for &h in &nontrivial {
                let hk = p.conjugate(k, h);
                if !class.stabilizer.contains(&hk) {
                    continue 'k;
                }
                // (I - β(h')) s = (x - β(h')x) - β(k)(x - β(h)x)
                let t = self.translation_at(x, h);
                let bt = self.act(k, &t);
                let rhs: Vec<Rational> = self.translation_at(x, hk).iter().zip(&bt).map(|(a, b)| *a - *b).collect();
                let lhs = intlinalg::to_rational(&self.identity_minus(hk));
                match &solution {
                    None if h == h0 => {
                        let Some(s) = intlinalg::solve_rational(&lhs, &rhs) else { continue 'k };
                        if s.iter().any(|v| !v.is_integer()) {
                            continue 'k;
                        }
                        solution = Some(s);
                    }
                    Some(s) => {
                        let lhs_s: Vec<Rational> =
                            lhs.iter().map(|row| row.iter().zip(s).map(|(a, b)| *a * *b).sum()).collect();
                        if lhs_s != rhs {
                            continue 'k;
                        }
                    }
                    None => unreachable!("h0 is the first nontrivial element"),
                }
            }
            let s = solution.expect("nontrivial stabilizer");
            out.push((s.iter().map(|v| v.to_integer()).collect(), k));
        }
        out
    }

    fn is_self_normalizing(&self, class: &MaximalClass) -> bool {
        if class.stabilizer.len() <= 1 {
            return true;
        }
        let normalizer = self.normalizer_of(class);
        normalizer.len() == class.stabilizer.len()
            && normalizer.iter().all(|(s, k)| {
                class.stabilizer.contains(k)
                    && self
                        .translation_at(&class.center, *k)
                        .iter()
                        .zip(s)
                        .all(|(a, &b)| *a == Rational::from_integer(b))
            })
    }

    /// Distinct maximal subgroups among sampled conjugates (images under `P`
    /// and translations in `{-1,0,1}^n`) intersect trivially.
    fn maximal_intersections_trivial(&self, classes: &[MaximalClass]) -> bool {
        let mut samples: BTreeSet<Vec<Rational>> = BTreeSet::new();
        let shifts: Vec<Vec<Int>> = (0..3usize.pow(self.rank as u32))
            .map(|mut c| {
                (0..self.rank)
                    .map(|_| {
                        let v = (c % 3) as Int - 1;
                        c /= 3;
                        v
                    })
                    .collect()
            })
            .collect();
        for class in classes.iter().filter(|c| c.stabilizer.len() > 1) {
            for h in 0..self.point_group.order() {
                let y = self.act(h, &class.center);
                for s in &shifts {
                    samples.insert(y.iter().zip(s).map(|(a, &b)| *a + Rational::from_integer(b)).collect());
                }
            }
        }
        let samples: Vec<(Vec<Rational>, Vec<usize>)> =
            samples.into_iter().map(|x| (x.clone(), self.stabilizer_of(&x))).collect();
        for (i, (x, px)) in samples.iter().enumerate() {
            for (y, py) in &samples[i + 1..] {
                for &h in px.iter().filter(|&&h| h != 0 && py.contains(&h)) {
                    if self.translation_at(x, h) == self.translation_at(y, h) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn check_condition_m(&self) -> ConditionMReport {
        if !self.free_outside_zero() {
            return ConditionMReport {
                free_outside_zero: false,
                maximal_classes: Vec::new(),
                unique_maximal: false,
                self_normalizing: false,
                verdict: false,
            };
        }
        let classes = self.maximal_finite_subgroups().expect("free action");
        let unique_maximal = self.maximal_intersections_trivial(&classes);
        let self_normalizing = classes.iter().all(|c| self.is_self_normalizing(c));
        ConditionMReport {
            free_outside_zero: true,
            verdict: unique_maximal && self_normalizing,
            maximal_classes: classes,
            unique_maximal,
            self_normalizing,
        }
    }

    /// Maximal finite subgroups (as abstract groups) over the trivial group.
    pub fn finite_subgroup_diagram(&self) -> Result<FamilyDiagram, GeometryError> {
        let classes = self.maximal_finite_subgroups()?;
        let p = &*self.point_group;
        let mut objects = Vec::new();
        for (i, c) in classes.iter().enumerate().filter(|(_, c)| c.stabilizer.len() > 1) {
            let gens: Vec<Perm> = c.stabilizer[1..].iter().map(|&h| p.elements()[h].clone()).collect();
            objects.push(Arc::new(FiniteGroup::new(format!("M{i}"), p.degree(), gens)?));
        }
        let trivial = objects.len();
        objects.push(Arc::new(FiniteGroup::new("e", 1, vec![])?));
        let morphisms = (0..trivial).map(|target| Morphism { source: trivial, target, images: vec![] }).collect();
        Ok(FamilyDiagram { name: format!("{}_finite_subgroups", self.name), objects, morphisms })
    }
}

impl fmt::Display for MaximalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.center.iter().map(|v| v.to_string()).collect();
        write!(f, "center=({}) stabilizer_order={}", c.join(","), self.stabilizer.len())
    }
}

impl fmt::Display for ConditionMReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "free_outside_zero={}", self.free_outside_zero)?;
        writeln!(f, "maximal_classes={}", self.maximal_classes.len())?;
        for (i, c) in self.maximal_classes.iter().enumerate() {
            writeln!(f, "class {i} {c}")?;
        }
        writeln!(f, "unique_maximal={}", self.unique_maximal)?;
        writeln!(f, "self_normalizing={}", self.self_normalizing)?;
        writeln!(f, "verdict={}", if self.verdict { "PASS" } else { "FAIL" })
    }
}

/// Parses `crystal <name> rank=<n> p=<prime> [degree=<d>]` followed by, per
/// point-group generator, a cycle-notation line and `n` rows of `n` integers.
pub fn parse_crystal(text: &str, cap: usize) -> Result<CrystalGroup, GeometryError> {
    let perr = |line: usize, message: String| GeometryError::Group(GroupError::Parse { line, message });
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let Some(&(hl, header)) = lines.first() else {
        return Err(perr(1, "empty crystal file".into()));
    };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("crystal") {
        return Err(perr(hl, "expected `crystal <name> rank=<n> p=<prime>`".into()));
    }
    let name = parts.next().ok_or_else(|| perr(hl, "missing name".into()))?.to_string();
    let (mut rank, mut prime, mut degree) = (None, None, None);
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| perr(hl, format!("bad field {p:?}")))?;
        let v: u64 = v.parse().map_err(|e| perr(hl, format!("bad value for {k}: {e}")))?;
        match k {
            "rank" => rank = Some(v as usize),
            "p" => prime = Some(v),
            "degree" => degree = Some(v as usize),
            _ => return Err(perr(hl, format!("unknown field {k:?}"))),
        }
    }
    let rank = rank.filter(|&r| r > 0).ok_or_else(|| perr(hl, "missing or zero rank=".into()))?;
    let prime = prime.ok_or_else(|| perr(hl, "missing p=".into()))?;

    let mut cycle_lines = Vec::new();
    let mut matrices = Vec::new();
    let mut i = 1;
    while i < lines.len() {
        let (ln, l) = lines[i];
        if !l.starts_with('(') {
            return Err(perr(ln, format!("expected a generator in cycle notation, got {l:?}")));
        }
        cycle_lines.push((ln, l));
        let mut m = Vec::new();
        for r in 0..rank {
            let Some(&(ml, row)) = lines.get(i + 1 + r) else {
                return Err(perr(ln, format!("generator needs {rank} matrix rows")));
            };
            let row: Vec<Int> = row
                .split_whitespace()
                .map(|s| s.parse::<Int>().map_err(|e| perr(ml, format!("bad integer {s:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            if row.len() != rank {
                return Err(perr(ml, format!("expected {rank} integers")));
            }
            m.push(row);
        }
        matrices.push(m);
        i += rank + 1;
    }
    let degree = match degree {
        Some(d) => d,
        None => {
            let max_point = cycle_lines
                .iter()
                .flat_map(|(_, l)| l.split(|c: char| !c.is_ascii_digit()).filter_map(|s| s.parse::<usize>().ok()))
                .max();
            max_point.map_or(1, |m| m + 1)
        }
    };
    let gens = cycle_lines
        .iter()
        .map(|&(ln, l)| group::parse_cycles(degree, l).map_err(|m| perr(ln, m)))
        .collect::<Result<Vec<_>, _>>()?;
    let point_group = FiniteGroup::with_cap(format!("{name}_P"), degree, gens, cap)?;
    CrystalGroup::new(name, rank, prime, point_group, matrices)
}

/// Point group `Z/m` generated by one matrix.
pub fn cyclic_crystal(name: &str, prime: u64, order: u32, matrix: IntMatrix) -> Result<CrystalGroup, GeometryError> {
    let rank = matrix.len();
    CrystalGroup::new(name, rank, prime, group::catalog::cyclic(order), if order <= 1 { vec![] } else { vec![matrix] })
}

/// The infinite dihedral group `Z ⋊ Z/2`.
pub fn infinite_dihedral() -> CrystalGroup {
    cyclic_crystal("infinite_dihedral", 2, 2, vec![vec![-1]]).expect("valid")
}

/// `Z^2 ⋊ Z/2` with `β = -I`.
pub fn plane_inversion() -> CrystalGroup {
    cyclic_crystal("p2", 2, 2, vec![vec![-1, 0], vec![0, -1]]).expect("valid")
}

/// `Z^2 ⋊ Z/4` with the quarter-turn rotation.
pub fn plane_rotation() -> CrystalGroup {
    cyclic_crystal("p4", 2, 4, vec![vec![0, -1], vec![1, 0]]).expect("valid")
}

/// `Z × Z/2` with trivial action.
pub fn line_times_z2() -> CrystalGroup {
    cyclic_crystal("line_x_z2", 2, 2, vec![vec![1]]).expect("valid")
}

pub fn rational_vec(v: &[i64], denom: i64) -> Vec<Rational> {
    v.iter().map(|&a| Rational::new(a as Int, denom as Int)).collect()
}

impl CrystalGroup {
    /// Exponent-bounded brute force: all `x ∈ (1/|P|)Z^n / Z^n` with a
    /// nontrivial stabilizer.
    pub fn brute_force_special_points(&self) -> BTreeSet<Vec<Rational>> {
        let d = self.point_group.order() as Int;
        let total = (d as usize).pow(self.rank as u32);
        (0..total)
            .map(|mut c| {
                (0..self.rank)
                    .map(|_| {
                        let v = (c % d as usize) as Int;
                        c /= d as usize;
                        Rational::new(v, d)
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|x| self.stabilizer_of(x).len() > 1)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn freeness() {
        assert!(!line_times_z2().free_outside_zero());
        assert!(plane_inversion().free_outside_zero());
        assert!(plane_rotation().free_outside_zero());
        let g = plane_rotation();
        let dets: Vec<Int> = (1..4).map(|e| intlinalg::determinant(&g.identity_minus(e))).collect();
        let mut sorted = dets.clone();
        sorted.sort();
        assert_eq!(sorted, vec![2, 2, 4]);
    }

    #[test]
    fn maximal_classes_examples() {
        let classes = infinite_dihedral().maximal_finite_subgroups().unwrap();
        let centers: Vec<_> = classes.iter().map(|c| c.center.clone()).collect();
        assert_eq!(centers, vec![vec![Rational::zero()], vec![half()]]);
        assert!(classes.iter().all(|c| c.stabilizer.len() == 2));

        let classes = plane_inversion().maximal_finite_subgroups().unwrap();
        assert_eq!(classes.len(), 4);
        let z = Rational::zero();
        let centers: Vec<_> = classes.iter().map(|c| c.center.clone()).collect();
        assert_eq!(centers, vec![vec![z, z], vec![z, half()], vec![half(), z], vec![half(), half()]]);

        let trivial = CrystalGroup::lattice(2);
        let classes = trivial.maximal_finite_subgroups().unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].stabilizer, vec![0]);

        assert_eq!(line_times_z2().maximal_finite_subgroups(), Err(GeometryError::NotFree));
    }

    #[test]
    fn rotation_has_an_order_two_class() {
        let classes = plane_rotation().maximal_finite_subgroups().unwrap();
        let orders: Vec<usize> = classes.iter().map(|c| c.stabilizer.len()).collect();
        assert_eq!(orders, vec![4, 2, 4]);
    }

    #[test]
    fn condition_m_verdicts() {
        let r = infinite_dihedral().check_condition_m();
        assert!(r.verdict);
        assert_eq!(r.maximal_classes.len(), 2);
        assert!(plane_rotation().check_condition_m().verdict);
        let r = line_times_z2().check_condition_m();
        assert!(!r.verdict && !r.free_outside_zero);
    }

    #[test]
    fn normalizer_of_reflection_is_itself() {
        let g = infinite_dihedral();
        let classes = g.maximal_finite_subgroups().unwrap();
        let n = g.normalizer_of(&classes[1]);
        // center 1/2: M = {(0, e), (1, r)}
        assert_eq!(n, vec![(vec![0], 0), (vec![1], 1)]);
    }

    #[test]
    fn construction_errors() {
        let p = group::catalog::cyclic(2);
        assert!(matches!(
            CrystalGroup::new("x", 1, 2, p.clone(), vec![vec![vec![2]]]),
            Err(GeometryError::NotHomomorphism(_)) | Err(GeometryError::NotUnimodular(..))
        ));
        assert!(matches!(
            CrystalGroup::new("x", 1, 3, p.clone(), vec![vec![vec![-1]]]),
            Err(GeometryError::NotPGroup { .. })
        ));
        // a 4-cycle matrix cannot represent an involution
        assert!(matches!(
            CrystalGroup::new("x", 2, 2, p, vec![vec![vec![0, -1], vec![1, 0]]]),
            Err(GeometryError::NotHomomorphism(_))
        ));
    }

    #[test]
    fn parse_and_diagram() {
        let text = "crystal dinf rank=1 p=2\n(0 1)\n-1\n";
        let g = parse_crystal(text, group::DEFAULT_CAP).unwrap();
        assert_eq!(g.point_group().order(), 2);
        let d = g.finite_subgroup_diagram().unwrap();
        assert_eq!(d.objects.len(), 3);
        assert_eq!(d.morphisms.len(), 2);
        let bad = parse_crystal("crystal x rank=2 p=2\n(0 1)\n-1 0\n", group::DEFAULT_CAP).unwrap_err();
        assert!(matches!(bad, GeometryError::Group(GroupError::Parse { line: 2, .. })));
    }
}
