//! The Burnside ring `A(G)` of a finite group in the basis of transitive
//! `G`-sets `[G/K]`, its table of marks, and inverse limits over diagrams of
//! finite groups.
//!
//! Products are computed in ghost coordinates and pulled back through the
//! (triangular) table of marks, so every operation here is exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::group::{self, FiniteGroup, GroupError, Perm};
use crate::intlinalg::{self, Int, IntMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BurnsideError {
    #[error("coefficient vector has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("power too large: {products} products exceed cap {cap}")]
    PowerTooLarge { products: usize, cap: usize },
    #[error("ideal power needs at least one generator")]
    NoGenerators,
    #[error("invalid morphism {index}: {reason}")]
    Morphism { index: usize, reason: String },
    #[error("invalid characteristic {0}")]
    Characteristic(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Square matrix `M[H][K] = |(G/K)^H|` in subgroup-class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOfMarks {
    pub matrix: IntMatrix,
}

impl TableOfMarks {
    pub fn of(g: &FiniteGroup) -> Self {
        let n = g.subgroup_classes().len();
        let matrix = (0..n)
            .map(|h| (0..n).map(|k| g.fixed_point_count(k, h) as Int).collect())
            .collect();
        TableOfMarks { matrix }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }
}

impl fmt::Display for TableOfMarks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.matrix {
            writeln!(f, "{}", join(row))?;
        }
        Ok(())
    }
}

/// Comma-separated integers.
pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// An element of `A(G)`: integer coefficients of the basis `[G/K]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BurnsideElement {
    pub coeffs: Vec<Int>,
}

/// Marks `φ_H(x)` for every subgroup class `H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GhostVector {
    pub values: Vec<Int>,
}

/// Result of pulling a ghost vector back through the table of marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preimage {
    Element(BurnsideElement),
    /// The rational solution, with the indices of its non-integral entries.
    NotInImage { solution: Vec<Rational>, non_integral: Vec<usize> },
}

/// A prime ideal `P(H, p) = {x : φ_H(x) ≡ 0 mod p}`; characteristic 0 means `φ_H(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealSpec {
    pub class_id: usize,
    pub characteristic: u64,
}

impl IdealSpec {
    pub fn new(class_id: usize, characteristic: u64) -> Result<Self, BurnsideError> {
        if characteristic != 0 && !group::is_prime(characteristic) {
            return Err(BurnsideError::Characteristic(characteristic));
        }
        Ok(IdealSpec { class_id, characteristic })
    }
}

/// Default cap on the number of products formed by [`BurnsideRing::ideal_power`].
pub const POWER_CAP: usize = 200_000;

/// `A(G)` together with its table of marks.
#[derive(Debug, Clone)]
pub struct BurnsideRing {
    group: Arc<FiniteGroup>,
    table: TableOfMarks,
}

impl BurnsideRing {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        let table = TableOfMarks::of(&group);
        BurnsideRing { group, table }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn table(&self) -> &TableOfMarks {
        &self.table
    }

    pub fn rank(&self) -> usize {
        self.table.size()
    }

    /// Orders of the class representatives, in class order.
    pub fn class_orders(&self) -> Vec<usize> {
        self.group.subgroup_classes().iter().map(|c| c.order).collect()
    }

    pub fn element(&self, coeffs: Vec<Int>) -> Result<BurnsideElement, BurnsideError> {
        self.check_len(coeffs.len())?;
        Ok(BurnsideElement { coeffs })
    }

    pub fn zero(&self) -> BurnsideElement {
        BurnsideElement { coeffs: vec![0; self.rank()] }
    }

    /// `[G/K]` for class `k`.
    pub fn basis(&self, k: usize) -> BurnsideElement {
        let mut x = self.zero();
        x.coeffs[k] = 1;
        x
    }

    /// `[G/G]`, the one-point `G`-set.
    pub fn unit(&self) -> BurnsideElement {
        self.basis(self.rank() - 1)
    }

    fn check_len(&self, got: usize) -> Result<(), BurnsideError> {
        if got != self.rank() {
            return Err(BurnsideError::Length { expected: self.rank(), got });
        }
        Ok(())
    }

    pub fn add(&self, x: &BurnsideElement, y: &BurnsideElement) -> BurnsideElement {
        BurnsideElement { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &BurnsideElement, y: &BurnsideElement) -> BurnsideElement {
        BurnsideElement { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: Int, x: &BurnsideElement) -> BurnsideElement {
        BurnsideElement { coeffs: x.coeffs.iter().map(|a| c * a).collect() }
    }

    pub fn marks(&self, x: &BurnsideElement) -> GhostVector {
        let values = self
            .table
            .matrix
            .iter()
            .map(|row| row.iter().zip(&x.coeffs).map(|(m, c)| m * c).sum())
            .collect();
        GhostVector { values }
    }

    /// Back-substitution through the upper-triangular table of marks.
    pub fn from_ghost(&self, v: &GhostVector) -> Result<Preimage, BurnsideError> {
        self.check_len(v.values.len())?;
        let n = self.rank();
        let m = &self.table.matrix;
        let mut sol = vec![Rational::zero(); n];
        for h in (0..n).rev() {
            let mut acc = Rational::from_integer(v.values[h]);
            for k in h + 1..n {
                acc -= sol[k] * Rational::from_integer(m[h][k]);
            }
            sol[h] = acc / Rational::from_integer(m[h][h]);
        }
        let non_integral: Vec<usize> = (0..n).filter(|&i| !sol[i].is_integer()).collect();
        if non_integral.is_empty() {
            Ok(Preimage::Element(BurnsideElement { coeffs: sol.iter().map(|q| q.to_integer()).collect() }))
        } else {
            Ok(Preimage::NotInImage { solution: sol, non_integral })
        }
    }

    pub fn multiply(&self, x: &BurnsideElement, y: &BurnsideElement) -> BurnsideElement {
        let (gx, gy) = (self.marks(x), self.marks(y));
        let prod = GhostVector { values: gx.values.iter().zip(&gy.values).map(|(a, b)| a * b).collect() };
        match self.from_ghost(&prod) {
            Ok(Preimage::Element(z)) => z,
            other => panic!(
                "marks homomorphism violated in {}: product of {:?} and {:?} gave {:?}",
                self.group.name(),
                x.coeffs,
                y.coeffs,
                other
            ),
        }
    }

    pub fn power(&self, x: &BurnsideElement, n: u32) -> BurnsideElement {
        (0..n).fold(self.unit(), |acc, _| self.multiply(&acc, x))
    }

    /// `u_K = [G/K] - |(G/K)^K| [G/G]`.
    pub fn u_element(&self, k: usize) -> BurnsideElement {
        let w = self.table.matrix[k][k];
        self.sub(&self.basis(k), &self.scale(w, &self.unit()))
    }

    /// Product of `u_K` over all proper subgroup classes; its marks vanish on
    /// every proper class.
    pub fn bartsch_element(&self) -> BurnsideElement {
        let proper = self.rank() - 1;
        (0..proper).fold(self.unit(), |acc, k| self.multiply(&acc, &self.u_element(k)))
    }

    /// `Π (-|N(K):K|)` over proper classes: the expected top mark of the Bartsch element.
    pub fn bartsch_top_mark(&self) -> Int {
        let proper = self.rank() - 1;
        (0..proper).map(|k| -self.table.matrix[k][k]).product()
    }

    pub fn in_ideal(&self, spec: IdealSpec, x: &BurnsideElement) -> bool {
        let mark = self.marks(x).values[spec.class_id];
        match spec.characteristic {
            0 => mark == 0,
            p => mark.rem_euclid(p as Int) == 0,
        }
    }

    /// Generators `[G/K] - |G/K| [G/G]` (K proper) of the augmentation ideal `I_G = ker φ_e`.
    pub fn augmentation_generators(&self) -> Vec<BurnsideElement> {
        let order = self.group.order() as Int;
        let classes = self.group.subgroup_classes();
        (0..self.rank() - 1)
            .map(|k| {
                let index = order / classes[k].order as Int;
                self.sub(&self.basis(k), &self.scale(index, &self.unit()))
            })
            .collect()
    }

    /// Hermite basis of the ideal generated by all `n`-fold products of `gens`.
    pub fn ideal_power(&self, gens: &[BurnsideElement], n: u32) -> Result<Vec<BurnsideElement>, BurnsideError> {
        self.ideal_power_with_cap(gens, n, POWER_CAP)
    }

    pub fn ideal_power_with_cap(
        &self,
        gens: &[BurnsideElement],
        n: u32,
        cap: usize,
    ) -> Result<Vec<BurnsideElement>, BurnsideError> {
        if gens.is_empty() {
            return Err(BurnsideError::NoGenerators);
        }
        for g in gens {
            self.check_len(g.coeffs.len())?;
        }
        let products = multisets(gens.len(), n as usize)
            .checked_mul(self.rank())
            .unwrap_or(usize::MAX);
        if products > cap {
            return Err(BurnsideError::PowerTooLarge { products, cap });
        }
        // n-fold products as multisets, built one factor at a time
        let mut layer: Vec<(usize, BurnsideElement)> = vec![(0, self.unit())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (start, x) in &layer {
                for (i, g) in gens.iter().enumerate().skip(*start) {
                    next.push((i, self.multiply(x, g)));
                }
            }
            layer = next;
        }
        let mut rows: IntMatrix = Vec::new();
        for (_, x) in &layer {
            for k in 0..self.rank() {
                rows.push(self.multiply(x, &self.basis(k)).coeffs);
            }
        }
        Ok(intlinalg::hermite_rows(rows)
            .into_iter()
            .map(|coeffs| BurnsideElement { coeffs })
            .collect())
    }
}

fn multisets(kinds: usize, size: usize) -> usize {
    // C(kinds + size - 1, size)
    let mut acc: u128 = 1;
    for i in 0..size as u128 {
        acc = acc * (kinds as u128 + i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// A group homomorphism `source → target` given by the images of the source generators.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub source: usize,
    pub target: usize,
    pub images: Vec<Perm>,
}

/// Finite groups and injective homomorphisms between them; restrictions
/// along the morphisms define the inverse system of Burnside rings.
#[derive(Debug, Clone)]
pub struct FamilyDiagram {
    pub name: String,
    pub objects: Vec<Arc<FiniteGroup>>,
    pub morphisms: Vec<Morphism>,
}

/// Solution lattice of an inverse system of Burnside rings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitLattice {
    pub rank: usize,
    /// Basis vectors in the direct sum of the object rings, in object order.
    pub basis: IntMatrix,
    /// Offsets of each object's coordinates inside a basis vector.
    pub offsets: Vec<usize>,
}

/// Extends generator images to a map on all source elements, checking that
/// it is a well-defined injective homomorphism.
pub fn extend_homomorphism(
    source: &FiniteGroup,
    target: &FiniteGroup,
    images: &[Perm],
) -> Result<Vec<usize>, String> {
    if images.len() != source.generators().len() {
        return Err(format!(
            "{} generator images given, source has {} generators",
            images.len(),
            source.generators().len()
        ));
    }
    let img_idx: Vec<usize> = images
        .iter()
        .map(|p| target.index_of(p).ok_or_else(|| format!("image {p} is not in {}", target.name())))
        .collect::<Result<_, _>>()?;
    let gen_idx: Vec<usize> = source
        .generators()
        .iter()
        .map(|p| source.index_of(p).expect("generator is an element"))
        .collect();
    let n = source.order();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (&g, &gi) in gen_idx.iter().zip(&img_idx) {
            let y = source.mul(x, g);
            let fy = target.mul(map[x], gi);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return Err("generator images do not define a homomorphism".into());
            }
        }
    }
    // with consistency on generators, check the full multiplication law
    for a in 0..n {
        for b in 0..n {
            if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                return Err("generator images do not define a homomorphism".into());
            }
        }
    }
    let mut seen = map.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != n {
        return Err("homomorphism is not injective".into());
    }
    Ok(map)
}

/// Matrix of the restriction `A(target) → A(source)` along an injective
/// homomorphism: column `K` decomposes `target/K` into source orbits.
pub fn restriction_matrix(source: &FiniteGroup, target: &FiniteGroup, hom: &[usize]) -> IntMatrix {
    let s_classes = source.subgroup_classes().len();
    let t_classes = target.subgroup_classes();
    let mut out = vec![vec![0 as Int; t_classes.len()]; s_classes];
    let image: Vec<usize> = hom.to_vec();
    for (kc, class) in t_classes.iter().enumerate() {
        let k = &class.representative;
        let mut coset_of = vec![usize::MAX; target.order()];
        let mut reps = Vec::new();
        for g in 0..target.order() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in k {
                coset_of[target.mul(g, x)] = id;
            }
        }
        let mut visited = vec![false; reps.len()];
        for start in 0..reps.len() {
            if visited[start] {
                continue;
            }
            // orbit of the coset under the image of the source
            let mut stabilizer = Vec::new();
            for (s, &fs) in image.iter().enumerate() {
                let c = coset_of[target.mul(fs, reps[start])];
                visited[c] = true;
                if c == start {
                    stabilizer.push(s);
                }
            }
            let class = source.class_of(&stabilizer).expect("stabilizer is a subgroup");
            out[class][kc] += 1;
        }
    }
    out
}

impl FamilyDiagram {
    pub fn validate(&self) -> Result<Vec<Vec<usize>>, BurnsideError> {
        self.morphisms
            .iter()
            .enumerate()
            .map(|(index, m)| {
                let (Some(s), Some(t)) = (self.objects.get(m.source), self.objects.get(m.target)) else {
                    return Err(BurnsideError::Morphism { index, reason: "object index out of range".into() });
                };
                extend_homomorphism(s, t, &m.images).map_err(|reason| BurnsideError::Morphism { index, reason })
            })
            .collect()
    }
}

/// Lattice of compatible families `(x_i) ∈ ⊕ A(H_i)` with `res_m(x_target) = x_source`.
pub fn limit_burnside(d: &FamilyDiagram) -> Result<LimitLattice, BurnsideError> {
    let homs = d.validate()?;
    let sizes: Vec<usize> = d.objects.iter().map(|g| g.subgroup_classes().len()).collect();
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut total = 0;
    for s in &sizes {
        offsets.push(total);
        total += s;
    }
    let mut constraints: IntMatrix = Vec::new();
    for (m, hom) in d.morphisms.iter().zip(&homs) {
        let res = restriction_matrix(&d.objects[m.source], &d.objects[m.target], hom);
        for (i, row) in res.iter().enumerate() {
            let mut c = vec![0 as Int; total];
            for (j, &r) in row.iter().enumerate() {
                c[offsets[m.target] + j] += r;
            }
            c[offsets[m.source] + i] -= 1;
            constraints.push(c);
        }
    }
    let basis = if constraints.is_empty() {
        intlinalg::identity(total)
    } else {
        intlinalg::integer_kernel(&constraints, total)
    };
    Ok(LimitLattice { rank: basis.len(), basis, offsets })
}

/// Parses a diagram file:
///
/// ```text
/// diagram <name>
/// group <label> degree=<d>
/// <generator per line>
/// ...
/// morphism <source label> -> <target label>
/// <image of each source generator, one per line>
/// ```
pub fn parse_diagram(text: &str, cap: usize) -> Result<FamilyDiagram, BurnsideError> {
    let perr = |line: usize, message: String| BurnsideError::Group(GroupError::Parse { line, message });
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let Some(&(first, header)) = lines.first() else {
        return Err(perr(1, "empty diagram file".into()));
    };
    let name = header
        .strip_prefix("diagram")
        .map(|s| s.trim().to_string())
        .ok_or_else(|| perr(first, "expected `diagram <name>`".into()))?;

    let mut objects: Vec<Arc<FiniteGroup>> = Vec::new();
    let mut labels: HashMap<String, usize> = HashMap::new();
    let mut morphisms = Vec::new();
    let mut i = 1;
    while i < lines.len() {
        let (ln, l) = lines[i];
        if l.starts_with("group") {
            let (label, degree) = group::parse_group_header(ln, l)?;
            let mut gens = Vec::new();
            i += 1;
            while i < lines.len() && lines[i].1.starts_with('(') {
                gens.push(group::parse_cycles(degree, lines[i].1).map_err(|m| perr(lines[i].0, m))?);
                i += 1;
            }
            let g = FiniteGroup::with_cap(label.clone(), degree, gens, cap)?;
            labels.insert(label, objects.len());
            objects.push(Arc::new(g));
        } else if let Some(rest) = l.strip_prefix("morphism") {
            let (s, t) = rest
                .split_once("->")
                .ok_or_else(|| perr(ln, "expected `morphism <source> -> <target>`".into()))?;
            let lookup = |x: &str| labels.get(x.trim()).copied().ok_or_else(|| perr(ln, format!("unknown group {:?}", x.trim())));
            let (source, target) = (lookup(s)?, lookup(t)?);
            let needed = objects[source].generators().len();
            let degree = objects[target].degree();
            let mut images = Vec::new();
            i += 1;
            for _ in 0..needed {
                let Some(&(il, text)) = lines.get(i) else {
                    return Err(perr(ln, format!("morphism needs {needed} image lines")));
                };
                images.push(group::parse_cycles(degree, text).map_err(|m| perr(il, m))?);
                i += 1;
            }
            morphisms.push(Morphism { source, target, images });
        } else {
            return Err(perr(ln, format!("unexpected line {l:?}")));
        }
    }
    Ok(FamilyDiagram { name, objects, morphisms })
}

pub fn format_diagram(d: &FamilyDiagram) -> String {
    let mut s = format!("diagram {}\n", d.name);
    for g in &d.objects {
        s.push_str(&group::format_group(g));
    }
    for m in &d.morphisms {
        s.push_str(&format!("morphism {} -> {}\n", d.objects[m.source].name(), d.objects[m.target].name()));
        for p in &m.images {
            s.push_str(&format!("{p}\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    fn ring(g: FiniteGroup) -> BurnsideRing {
        BurnsideRing::new(Arc::new(g))
    }

    #[test]
    fn tables_of_marks() {
        assert_eq!(ring(catalog::trivial()).table().matrix, vec![vec![1]]);
        assert_eq!(ring(catalog::cyclic(2)).table().matrix, vec![vec![2, 1], vec![0, 1]]);
        let z4 = ring(catalog::cyclic(4));
        let diag: Vec<Int> = (0..3).map(|i| z4.table().matrix[i][i]).collect();
        assert_eq!(diag, vec![4, 2, 1]);
        assert_eq!(z4.table().matrix, vec![vec![4, 2, 1], vec![0, 2, 1], vec![0, 0, 1]]);
    }

    #[test]
    fn marks_examples() {
        let r = ring(catalog::cyclic(2));
        assert_eq!(r.marks(&r.unit()).values, vec![1, 1]);
        assert_eq!(r.marks(&r.basis(0)).values, vec![2, 0]);
        let x = r.element(vec![3, -1]).unwrap();
        let y = r.element(vec![-2, 5]).unwrap();
        let lhs = r.marks(&r.add(&x, &y)).values;
        let rhs: Vec<Int> = r.marks(&x).values.iter().zip(r.marks(&y).values).map(|(a, b)| a + b).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn from_ghost_examples() {
        let r = ring(catalog::cyclic(2));
        assert_eq!(r.from_ghost(&GhostVector { values: vec![1, 1] }).unwrap(), Preimage::Element(r.unit()));
        assert_eq!(r.from_ghost(&GhostVector { values: vec![2, 0] }).unwrap(), Preimage::Element(r.basis(0)));
        match r.from_ghost(&GhostVector { values: vec![1, 0] }).unwrap() {
            Preimage::NotInImage { solution, non_integral } => {
                assert_eq!(non_integral, vec![0]);
                assert_eq!(solution[0], Rational::new(1, 2));
            }
            other => panic!("expected NotInImage, got {other:?}"),
        }
        assert!(matches!(r.from_ghost(&GhostVector { values: vec![1] }), Err(BurnsideError::Length { .. })));
    }

    #[test]
    fn multiply_examples() {
        let r = ring(catalog::cyclic(2));
        let free = r.basis(0);
        assert_eq!(r.multiply(&free, &free), r.scale(2, &free));
        assert_eq!(r.multiply(&r.unit(), &free), free);
        for p in [2u32, 3, 5, 7] {
            let r = ring(catalog::cyclic(p));
            let u = r.u_element(0);
            assert_eq!(r.marks(&u).values, vec![0, -(p as Int)]);
            assert_eq!(r.multiply(&u, &u), r.scale(-(p as Int), &u));
        }
    }

    #[test]
    fn bartsch_examples() {
        let r = ring(catalog::trivial());
        assert_eq!(r.bartsch_element(), r.unit());
        let r = ring(catalog::cyclic(2));
        let x = r.bartsch_element();
        assert_eq!(x, r.element(vec![1, -2]).unwrap());
        assert_eq!(r.marks(&x).values, vec![0, -2]);
        let r = ring(catalog::cyclic(4));
        assert_eq!(r.marks(&r.bartsch_element()).values, vec![0, 0, 8]);
    }

    #[test]
    fn ideal_membership() {
        let r = ring(catalog::cyclic(2));
        let x = r.bartsch_element();
        for k in 0..2 {
            for p in [0, 2, 3] {
                assert!(!r.in_ideal(IdealSpec::new(k, p).unwrap(), &r.unit()));
            }
        }
        assert!(r.in_ideal(IdealSpec::new(0, 0).unwrap(), &x));
        assert!(r.in_ideal(IdealSpec::new(1, 2).unwrap(), &x));
        assert!(!r.in_ideal(IdealSpec::new(1, 3).unwrap(), &x));
        assert!(IdealSpec::new(0, 4).is_err());
    }

    #[test]
    fn ideal_power_examples() {
        let r = ring(catalog::cyclic(3));
        let full = r.ideal_power(&[r.unit()], 1).unwrap();
        assert_eq!(full.len(), r.rank());
        let u = r.u_element(0);
        let i1 = r.ideal_power(std::slice::from_ref(&u), 1).unwrap();
        let i2 = r.ideal_power(std::slice::from_ref(&u), 2).unwrap();
        assert_eq!(i2, vec![r.scale(3, &u)]);
        let rows = |v: &[BurnsideElement]| v.iter().map(|x| x.coeffs.clone()).collect::<Vec<_>>();
        assert!(intlinalg::lattice_contains(&rows(&i1), &rows(&i2)));
        assert!(matches!(
            r.ideal_power_with_cap(&[u.clone()], 3, 1),
            Err(BurnsideError::PowerTooLarge { .. })
        ));
    }

    #[test]
    fn restriction_to_trivial_counts_points() {
        let z4 = catalog::cyclic(4);
        let e = catalog::trivial();
        let hom = extend_homomorphism(&e, &z4, &[]).unwrap();
        assert_eq!(restriction_matrix(&e, &z4, &hom), vec![vec![4, 2, 1]]);
    }

    #[test]
    fn bad_morphisms_rejected() {
        let z4 = catalog::cyclic(4);
        let z2 = catalog::cyclic(2);
        // (0 1) of Z/2 sent to a 4-cycle is not a homomorphism
        let img = group::parse_cycles(4, "(0 1 2 3)").unwrap();
        assert!(extend_homomorphism(&z2, &z4, &[img]).is_err());
        // Z/4 → Z/2 is not injective
        let img = group::parse_cycles(2, "(0 1)").unwrap();
        assert!(extend_homomorphism(&z4, &z2, &[img]).is_err());
    }

    #[test]
    fn limit_examples() {
        let z2 = || Arc::new(catalog::cyclic(2));
        let single = FamilyDiagram { name: "one".into(), objects: vec![z2()], morphisms: vec![] };
        assert_eq!(limit_burnside(&single).unwrap().rank, 2);

        let text = "diagram dinf\ngroup A degree=2\n(0 1)\ngroup B degree=2\n(0 1)\ngroup e degree=1\n\
                    morphism e -> A\nmorphism e -> B\n";
        let d = parse_diagram(text, group::DEFAULT_CAP).unwrap();
        assert_eq!(limit_burnside(&d).unwrap().rank, 3);
        let again = parse_diagram(&format_diagram(&d), group::DEFAULT_CAP).unwrap();
        assert_eq!(limit_burnside(&again).unwrap(), limit_burnside(&d).unwrap());
    }

    #[test]
    fn limit_of_chain_is_top_ring() {
        let text = "diagram chain\ngroup Z4 degree=4\n(0 1 2 3)\ngroup Z2 degree=4\n(0 2)(1 3)\n\
                    group e degree=1\nmorphism Z2 -> Z4\n(0 2)(1 3)\nmorphism e -> Z2\nmorphism e -> Z4\n";
        let d = parse_diagram(text, group::DEFAULT_CAP).unwrap();
        let lim = limit_burnside(&d).unwrap();
        assert_eq!(lim.rank, 3);
        // every compatible family is determined by its Z/4 component
        for v in &lim.basis {
            let z4 = ring(catalog::cyclic(4));
            let x = z4.element(v[0..3].to_vec()).unwrap();
            let ghost = z4.marks(&x).values;
            assert_eq!(v[5], ghost[0]);
        }
    }
}
