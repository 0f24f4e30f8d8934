//! Finite permutation groups: element enumeration, conjugacy classes of
//! subgroups, normalizers and fixed points on coset spaces.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Default cap on the number of group elements.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Groups up to this order get a precomputed Cayley table.
const TABLE_LIMIT: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator {index} is not a bijection of 0..{degree}")]
    NotBijection { index: usize, degree: usize },
    #[error("group too large: more than {cap} elements")]
    TooLarge { cap: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A permutation of `0..degree`, stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// Builds a permutation from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Option<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                let b = cycle[(pos + 1) % cycle.len()];
                if a as usize >= degree || b as usize >= degree || touched[a as usize] {
                    return None;
                }
                touched[a as usize] = true;
                images[a as usize] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, point: u32) -> u32 {
        self.0[point as usize]
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur as u32);
                cur = self.0[cur] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// One conjugacy class of subgroups, represented by its canonical member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupClass {
    pub class_id: usize,
    /// Sorted element indices of the representative.
    pub representative: Vec<usize>,
    pub order: usize,
    /// `|N_G(H) : H|`
    pub normalizer_index: usize,
    /// Number of subgroups in the class, `|G : N_G(H)|`.
    pub class_size: usize,
}

/// A finite group generated by permutations, with its elements enumerated.
pub struct FiniteGroup {
    name: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    table: Option<Vec<u32>>,
    inverses: Vec<usize>,
    classes: OnceLock<Vec<SubgroupClass>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .field("order", &self.elements.len())
            .finish()
    }
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            name: self.name.clone(),
            degree: self.degree,
            generators: self.generators.clone(),
            elements: self.elements.clone(),
            index: self.index.clone(),
            table: self.table.clone(),
            inverses: self.inverses.clone(),
            classes: self.classes.clone(),
        }
    }
}

impl FiniteGroup {
    pub fn new(name: impl Into<String>, degree: usize, generators: Vec<Perm>) -> Result<Self, GroupError> {
        Self::with_cap(name, degree, generators, DEFAULT_CAP)
    }

    pub fn with_cap(
        name: impl Into<String>,
        degree: usize,
        generators: Vec<Perm>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        let degree = degree.max(1);
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(GroupError::NotBijection { index, degree });
            }
        }
        let elements = enumerate_elements(degree, &generators, cap)?;
        let index: HashMap<Perm, usize> =
            elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elements.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = index[&elements[a].compose(&elements[b])] as u32;
                }
            }
            t
        });
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        Ok(FiniteGroup {
            name: name.into(),
            degree,
            generators,
            elements,
            index,
            table,
            inverses,
            classes: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// All elements, identity first, in breadth-first order over the generators.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => self.index[&self.elements[a].compose(&self.elements[b])],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g h g^-1`
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// Smallest subgroup containing the given elements, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut out = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks that a sorted index list is a subgroup.
    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        if elems.first() != Some(&0) {
            return false;
        }
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        elems
            .iter()
            .all(|&a| set.contains(&self.inv(a)) && elems.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// Sorted element list of `g H g^-1`.
    pub fn conjugate_subgroup(&self, g: usize, sub: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = sub.iter().map(|&h| self.conjugate(g, h)).collect();
        out.sort_unstable();
        out
    }

    /// Lexicographically smallest conjugate of `sub`; equal for conjugate subgroups.
    pub fn canonical_conjugate(&self, sub: &[usize]) -> Vec<usize> {
        (0..self.order())
            .map(|g| self.conjugate_subgroup(g, sub))
            .min()
            .expect("group has at least one element")
    }

    pub fn normalizer(&self, sub: &[usize]) -> Vec<usize> {
        (0..self.order())
            .filter(|&g| self.conjugate_subgroup(g, sub) == sub)
            .collect()
    }

    /// Conjugacy classes of subgroups, sorted by (order, canonical element list).
    pub fn subgroup_classes(&self) -> &[SubgroupClass] {
        self.classes.get_or_init(|| self.compute_classes())
    }

    /// Class id of an arbitrary subgroup given as element indices.
    pub fn class_of(&self, sub: &[usize]) -> Option<usize> {
        let mut sorted = sub.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let canon = self.canonical_conjugate(&sorted);
        self.subgroup_classes()
            .iter()
            .find(|c| c.representative == canon)
            .map(|c| c.class_id)
    }

    pub fn trivial_class(&self) -> usize {
        0
    }

    pub fn whole_class(&self) -> usize {
        self.subgroup_classes().len() - 1
    }

    fn compute_classes(&self) -> Vec<SubgroupClass> {
        let n = self.order();
        let mut cyclic: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in 0..n {
            cyclic.insert(self.closure(&[g]));
        }
        // Joins of class representatives with cyclic subgroups reach every class.
        let mut reps: BTreeSet<Vec<usize>> =
            cyclic.iter().map(|c| self.canonical_conjugate(c)).collect();
        let mut frontier: Vec<Vec<usize>> = reps.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for c in &cyclic {
                    if c.iter().all(|x| a.binary_search(x).is_ok()) {
                        continue;
                    }
                    let mut gens = a.clone();
                    gens.extend(c.iter().copied());
                    let joined = self.closure(&gens);
                    let canon = self.canonical_conjugate(&joined);
                    if reps.insert(canon.clone()) {
                        next.push(canon);
                    }
                }
            }
            frontier = next;
        }
        let mut reps: Vec<Vec<usize>> = reps.into_iter().collect();
        reps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        reps.into_iter()
            .enumerate()
            .map(|(class_id, representative)| {
                let norm = self.normalizer(&representative).len();
                SubgroupClass {
                    class_id,
                    order: representative.len(),
                    normalizer_index: norm / representative.len(),
                    class_size: n / norm,
                    representative,
                }
            })
            .collect()
    }

    /// `|(G/K)^H|`: the number of left cosets `gK` with `H gK = gK`.
    pub fn fixed_point_count(&self, k_class: usize, h_class: usize) -> usize {
        let classes = self.subgroup_classes();
        let k = &classes[k_class].representative;
        let h = &classes[h_class].representative;
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in k {
                coset_of[self.mul(g, x)] = id;
            }
        }
        reps.iter()
            .filter(|&&g| h.iter().all(|&x| coset_of[self.mul(x, g)] == coset_of[g]))
            .count()
    }

    pub fn is_p_group(&self, p: u64) -> Result<bool, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        let mut n = self.order() as u64;
        while n % p == 0 {
            n /= p;
        }
        Ok(n == 1)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn enumerate_elements(degree: usize, generators: &[Perm], cap: usize) -> Result<Vec<Perm>, GroupError> {
    let id = Perm::identity(degree);
    let mut seen: std::collections::HashSet<Perm> = std::collections::HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut layer = vec![id];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for x in &layer {
            for g in generators {
                let y = x.compose(g);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        next.sort();
        if out.len() + next.len() > cap {
            return Err(GroupError::TooLarge { cap });
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// Parses the line format `(0 1 2)(3 4)`; `()` is the identity.
pub fn parse_cycles(degree: usize, text: &str) -> Result<Perm, String> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' in {text:?}"))?;
        let close = open.find(')').ok_or_else(|| format!("unclosed cycle in {text:?}"))?;
        let points = open[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|e| format!("bad point {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = open[close + 1..].trim_start();
    }
    Perm::from_cycles(degree, &cycles).ok_or_else(|| format!("{text:?} is not a permutation of degree {degree}"))
}

/// Parses a `group <name> degree=<d>` block followed by one generator per line.
pub fn parse_group(text: &str, cap: usize) -> Result<FiniteGroup, GroupError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(GroupError::Parse { line: 1, message: "empty group file".into() })?;
    let (name, degree) = parse_group_header(hline, header)?;
    let mut gens = Vec::new();
    for (line, l) in lines {
        gens.push(parse_cycles(degree, l).map_err(|message| GroupError::Parse { line, message })?);
    }
    FiniteGroup::with_cap(name, degree, gens, cap)
}

pub(crate) fn parse_group_header(line: usize, header: &str) -> Result<(String, usize), GroupError> {
    let err = |message: &str| GroupError::Parse { line, message: message.to_string() };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("group") {
        return Err(err("expected `group <name> degree=<d>`"));
    }
    let name = parts.next().ok_or_else(|| err("missing group name"))?.to_string();
    let degree = parts
        .find_map(|p| p.strip_prefix("degree="))
        .ok_or_else(|| err("missing degree="))?
        .parse::<usize>()
        .map_err(|e| err(&format!("bad degree: {e}")))?;
    if degree == 0 {
        return Err(err("degree must be positive"));
    }
    Ok((name, degree))
}

/// Serializes a group in the text format read by [`parse_group`].
pub fn format_group(g: &FiniteGroup) -> String {
    let mut s = format!("group {} degree={}\n", g.name(), g.degree());
    for p in g.generators() {
        s.push_str(&format!("{p}\n"));
    }
    s
}

/// Small groups used by tests, examples and the CLI.
pub mod catalog {
    use super::{FiniteGroup, Perm};

    fn build(name: &str, degree: usize, gens: Vec<Vec<Vec<u32>>>) -> FiniteGroup {
        let gens = gens
            .into_iter()
            .map(|c| Perm::from_cycles(degree, &c).expect("catalog generator"))
            .collect();
        FiniteGroup::new(name, degree, gens).expect("catalog group")
    }

    pub fn trivial() -> FiniteGroup {
        build("trivial", 1, vec![])
    }

    pub fn cyclic(n: u32) -> FiniteGroup {
        if n <= 1 {
            return trivial();
        }
        build(&format!("Z{n}"), n as usize, vec![vec![(0..n).collect()]])
    }

    pub fn klein_four() -> FiniteGroup {
        build("V4", 4, vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]])
    }

    /// Symmetries of the regular `m`-gon, order `2m`.
    pub fn dihedral(m: u32) -> FiniteGroup {
        let rot = vec![(0..m).collect::<Vec<_>>()];
        let refl: Vec<Vec<u32>> = (1..m).filter(|&i| i < m - i).map(|i| vec![i, m - i]).collect();
        build(&format!("D{m}"), m as usize, vec![rot, refl])
    }

    /// Quaternion group in its regular representation on 8 points.
    pub fn quaternion() -> FiniteGroup {
        // points: 1, i, j, k, -1, -i, -j, -k  →  0..8
        // left multiplication by i and by j
        let li = Perm::from_images(vec![1, 4, 3, 6, 5, 0, 7, 2]).unwrap();
        let lj = Perm::from_images(vec![2, 7, 4, 1, 6, 3, 0, 5]).unwrap();
        FiniteGroup::new("Q8", 8, vec![li, lj]).expect("catalog group")
    }

    /// `Z/2 × Z/4` acting on 2 + 4 points.
    pub fn z2_x_z4() -> FiniteGroup {
        build("Z2xZ4", 6, vec![vec![vec![0, 1]], vec![vec![2, 3, 4, 5]]])
    }

    /// Every group of order ≤ 16 exercised by the acceptance suite.
    pub fn small_groups() -> Vec<FiniteGroup> {
        let mut out: Vec<FiniteGroup> = (2..=16).map(cyclic).collect();
        out.push(klein_four());
        out.push(dihedral(4));
        out.push(quaternion());
        out.push(z2_x_z4());
        out
    }
}
