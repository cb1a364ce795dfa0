//! Finite abelian groups presented as products of cyclic groups.
//!
//! Elements and characters share one coordinate shape; both are addressed by
//! a little-endian mixed-radix linear index over the cyclic orders, which
//! fixes every I/O ordering in the crate.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::Bitset;
use crate::error::{LabError, Result};

/// Default ceiling on `|G|` for exhaustive subgroup enumeration.
pub const SUBGROUP_ENUMERATION_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
    size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<usize>,
}

/// A character of a finite abelian group, indexed by the same residue tuples
/// as the group's elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterIndex {
    coords: Vec<usize>,
}

impl GroupElement {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }
}

impl CharacterIndex {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(LabError::domain("a group needs at least one cyclic factor"));
        }
        if orders.contains(&0) {
            return Err(LabError::domain("cyclic orders must be at least 1"));
        }
        let size = orders
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| LabError::capacity("group size", u128::MAX, usize::MAX as u128))?;
        Ok(FiniteAbelianGroup { orders, size })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_cyclic_presentation(&self) -> bool {
        self.orders.len() == 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Builds an element, reducing each coordinate into `[0, n_j)`.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_shape(coords.len())?;
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
                .collect(),
        })
    }

    pub fn character(&self, coords: &[i64]) -> Result<CharacterIndex> {
        Ok(CharacterIndex {
            coords: self.element(coords)?.coords,
        })
    }

    pub fn trivial_character(&self) -> CharacterIndex {
        CharacterIndex {
            coords: vec![0; self.rank()],
        }
    }

    fn check_shape(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(LabError::structural(format!(
                "tuple of length {len} used with group {self} of rank {}",
                self.rank()
            )));
        }
        Ok(())
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        self.check_shape(coords.len())?;
        if let Some((c, n)) = coords.iter().zip(&self.orders).find(|(c, n)| **c >= **n) {
            return Err(LabError::structural(format!(
                "coordinate {c} out of range for cyclic factor of order {n}"
            )));
        }
        Ok(())
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        self.check_coords(&x.coords)?;
        Ok(self.encode(&x.coords))
    }

    pub fn character_index_of(&self, chi: &CharacterIndex) -> Result<usize> {
        self.check_coords(&chi.coords)?;
        Ok(self.encode(&chi.coords))
    }

    fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .rev()
            .fold(0, |acc, (&c, &n)| acc * n + c)
    }

    fn decode(&self, mut index: usize) -> Vec<usize> {
        self.orders
            .iter()
            .map(|&n| {
                let c = index % n;
                index /= n;
                c
            })
            .collect()
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        assert!(index < self.size, "element index {index} out of range");
        GroupElement {
            coords: self.decode(index),
        }
    }

    pub fn character_at(&self, index: usize) -> CharacterIndex {
        assert!(index < self.size, "character index {index} out of range");
        CharacterIndex {
            coords: self.decode(index),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size).map(|i| self.element_at(i))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_coords(&x.coords)?;
        self.check_coords(&y.coords)?;
        Ok(GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.orders)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        })
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check_coords(&x.coords)?;
        Ok(GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&self.orders)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        })
    }

    /// Sum of two elements given by linear index.
    #[inline]
    pub fn add_index(&self, mut i: usize, mut j: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for &n in &self.orders {
            let s = (i % n + j % n) % n;
            out += s * place;
            place *= n;
            i /= n;
            j /= n;
        }
        out
    }

    #[inline]
    pub fn neg_index(&self, mut i: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for &n in &self.orders {
            out += ((n - i % n) % n) * place;
            place *= n;
            i /= n;
        }
        out
    }

    #[inline]
    pub fn sub_index(&self, i: usize, j: usize) -> usize {
        self.add_index(i, self.neg_index(j))
    }

    /// Additive order of the element with linear index `i`.
    pub fn order_of_index(&self, i: usize) -> usize {
        self.decode(i)
            .iter()
            .zip(&self.orders)
            .map(|(&c, &n)| n / num_integer::gcd(c, n))
            .fold(1, num_integer::lcm)
    }

    /// Phase `sum_j chi_j x_j / n_j` reduced into `[0, 1)`.
    pub fn char_phase_index(&self, chi: usize, x: usize) -> f64 {
        let (mut chi, mut x) = (chi, x);
        let mut phase = 0.0;
        for &n in &self.orders {
            let p = ((chi % n) * (x % n)) % n;
            phase += p as f64 / n as f64;
            chi /= n;
            x /= n;
        }
        phase.fract()
    }

    #[inline]
    pub fn char_eval_index(&self, chi: usize, x: usize) -> Complex64 {
        let phase = self.char_phase_index(chi, x);
        if phase == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, TAU * phase)
    }

    /// Evaluates `chi(x) = exp(2 pi i sum_j chi_j x_j / n_j)`.
    pub fn char_eval(&self, chi: &CharacterIndex, x: &GroupElement) -> Result<Complex64> {
        let c = self.character_index_of(chi)?;
        let i = self.index_of(x)?;
        Ok(self.char_eval_index(c, i))
    }

    /// Parses an element literal such as `(1,2)` or, for cyclic groups, `3`.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let coords = parse_tuple(s)?;
        self.element(&coords)
    }

    /// Enumerates every subgroup with the default cap.
    pub fn enumerate_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.enumerate_subgroups_capped(SUBGROUP_ENUMERATION_CAP)
    }

    /// Every subgroup, grown from `{0}` by adjoining one element at a time and
    /// memoizing closures. Sorted by size, then by sorted element list.
    pub fn enumerate_subgroups_capped(&self, cap: usize) -> Result<Vec<Subgroup>> {
        if self.size > cap {
            return Err(LabError::capacity(
                format!("subgroup enumeration of {self}"),
                self.size as u128,
                cap as u128,
            ));
        }
        let trivial = Bitset::from_indices(self.size, [0]);
        let mut seen: HashSet<Bitset> = HashSet::new();
        let mut found: Vec<(Bitset, Vec<usize>)> = Vec::new();
        let mut queue = vec![(trivial.clone(), Vec::new())];
        seen.insert(trivial);
        while let Some((members, gens)) = queue.pop() {
            for x in 0..self.size {
                if members.contains(x) {
                    continue;
                }
                let joined = self.join_cyclic(&members, x);
                if seen.insert(joined.clone()) {
                    let mut g = gens.clone();
                    g.push(x);
                    queue.push((joined, g));
                }
            }
            found.push((members, gens));
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|(members, gens)| Subgroup::from_parts(self, members, gens))
            .collect();
        subgroups.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.elements.cmp(&b.elements))
        });
        Ok(subgroups)
    }

    /// `H + <x>` for a subgroup `H` given as a bitset.
    fn join_cyclic(&self, h: &Bitset, x: usize) -> Bitset {
        let mut out = h.clone();
        let mut multiple = x;
        while !h.contains(multiple) {
            for e in h.iter_ones() {
                out.insert(self.add_index(e, multiple));
            }
            multiple = self.add_index(multiple, x);
        }
        out
    }

    /// Translate of a set by `t`.
    pub fn translate(&self, s: &Bitset, t: usize) -> Bitset {
        Bitset::from_indices(self.size, s.iter_ones().map(|e| self.add_index(e, t)))
    }

    /// The period group `{h : s + h = s}` of a nonempty set.
    pub fn stabilizer(&self, s: &Bitset) -> Result<Subgroup> {
        if s.len() != self.size {
            return Err(LabError::structural("set length does not match group size"));
        }
        let s0 = s
            .first_one()
            .ok_or_else(|| LabError::domain("stabilizer of the empty set"))?;
        let mut members = Bitset::new(self.size);
        // every period h satisfies s0 + h in s
        for e in s.iter_ones() {
            let h = self.sub_index(e, s0);
            if s.iter_ones().all(|x| s.contains(self.add_index(x, h))) {
                members.insert(h);
            }
        }
        Ok(Subgroup::from_members(self, members))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = LabError;

    /// Parses `Z4`, `Z2xZ3xZ5` (also accepting `×` and `*` as separators).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let orders = s
            .split(['x', '×', '*'])
            .map(|part| {
                let part = part.trim();
                let digits = part
                    .strip_prefix('Z')
                    .or_else(|| part.strip_prefix('z'))
                    .ok_or_else(|| LabError::parse(format!("bad cyclic factor `{part}` in `{s}`")))?;
                digits
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| LabError::parse(format!("bad cyclic order `{digits}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteAbelianGroup::new(orders)
    }
}

impl TryFrom<String> for FiniteAbelianGroup {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FiniteAbelianGroup> for String {
    fn from(g: FiniteAbelianGroup) -> String {
        g.to_string()
    }
}

pub(crate) fn parse_tuple(s: &str) -> Result<Vec<i64>> {
    let t = s.trim();
    let inner = match t.strip_prefix('(') {
        Some(rest) => rest
            .strip_suffix(')')
            .ok_or_else(|| LabError::parse(format!("unbalanced tuple `{s}`")))?,
        None => t,
    };
    inner
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| LabError::parse(format!("bad coordinate `{c}` in `{s}`")))
        })
        .collect()
}

/// A subgroup, materialized as its sorted element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    generators: Vec<usize>,
    elements: Vec<usize>,
    members: Bitset,
    index: usize,
}

impl Subgroup {
    fn from_parts(g: &FiniteAbelianGroup, members: Bitset, generators: Vec<usize>) -> Self {
        let elements: Vec<usize> = members.iter_ones().collect();
        let index = g.size() / elements.len();
        Subgroup {
            generators,
            elements,
            members,
            index,
        }
    }

    /// Wraps a set already known to be a subgroup, choosing generators greedily.
    pub(crate) fn from_members(g: &FiniteAbelianGroup, members: Bitset) -> Self {
        let mut span = Bitset::from_indices(g.size(), [0]);
        let mut generators = Vec::new();
        for x in members.iter_ones() {
            if !span.contains(x) {
                span = g.join_cyclic(&span, x);
                generators.push(x);
            }
        }
        debug_assert_eq!(span, members);
        Subgroup::from_parts(g, members, generators)
    }

    pub fn trivial(g: &FiniteAbelianGroup) -> Self {
        Subgroup::from_members(g, Bitset::from_indices(g.size(), [0]))
    }

    pub fn whole(g: &FiniteAbelianGroup) -> Self {
        Subgroup::from_members(g, Bitset::full(g.size()))
    }

    /// The subgroup generated by the given element indices.
    pub fn generated_by(g: &FiniteAbelianGroup, gens: &[usize]) -> Result<Self> {
        let mut span = Bitset::from_indices(g.size(), [0]);
        for &x in gens {
            if x >= g.size() {
                return Err(LabError::structural(format!("generator {x} outside {g}")));
            }
            span = g.join_cyclic(&span, x);
        }
        Ok(Subgroup::from_members(g, span))
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn members(&self) -> &Bitset {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    /// The coset `x + H`.
    pub fn coset(&self, g: &FiniteAbelianGroup, x: usize) -> Bitset {
        g.translate(&self.members, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn literal_round_trip() {
        let g = z("Z2xZ3xZ5");
        assert_eq!(g.size(), 30);
        assert_eq!(g.to_string(), "Z2xZ3xZ5");
        assert_eq!(z("Z2×Z3"), z("Z2xZ3"));
        assert!("Z0".parse::<FiniteAbelianGroup>().is_err());
        assert!("Q4".parse::<FiniteAbelianGroup>().is_err());
        assert_eq!(g.parse_element("(1,2,4)").unwrap().coords(), &[1, 2, 4]);
    }

    #[test]
    fn addition_examples() {
        let g = z("Z4");
        let x = g.element(&[3]).unwrap();
        let y = g.element(&[2]).unwrap();
        assert_eq!(g.add(&x, &y).unwrap().coords(), &[1]);

        let h = z("Z2xZ3");
        let p = h.element(&[1, 2]).unwrap();
        assert_eq!(h.add(&p, &p).unwrap().coords(), &[0, 1]);
        assert_eq!(h.add(&p, &h.identity()).unwrap(), p);

        // shape mismatch is structural
        assert!(matches!(g.add(&x, &p), Err(LabError::Structural(_))));
    }

    #[test]
    fn mixed_radix_is_little_endian() {
        let g = z("Z2xZ3");
        assert_eq!(g.index_of(&g.element(&[1, 0]).unwrap()).unwrap(), 1);
        assert_eq!(g.index_of(&g.element(&[0, 1]).unwrap()).unwrap(), 2);
        for i in 0..g.size() {
            assert_eq!(g.index_of(&g.element_at(i)).unwrap(), i);
        }
    }

    #[test]
    fn character_examples() {
        let g = z("Z4");
        let v = g
            .char_eval(&g.character(&[1]).unwrap(), &g.element(&[1]).unwrap())
            .unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        let k = z("Z2xZ2");
        let v = k
            .char_eval(&k.character(&[1, 1]).unwrap(), &k.element(&[1, 1]).unwrap())
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let g = z("Z3xZ5");
        for x in g.elements() {
            let v = g.char_eval(&g.trivial_character(), &x).unwrap();
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn character_orthogonality() {
        for lit in ["Z6", "Z2xZ4", "Z3xZ3"] {
            let g = z(lit);
            let n = g.size();
            for a in 0..n {
                for b in 0..n {
                    let s: Complex64 = (0..n)
                        .map(|x| g.char_eval_index(a, x) * g.char_eval_index(b, x).conj())
                        .sum::<Complex64>()
                        / n as f64;
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((s - want).norm() < 1e-10, "{lit} {a} {b}");
                }
            }
        }
    }

    /// Brute-force oracle: close every subset of generators, deduplicate.
    fn subgroups_by_generator_subsets(g: &FiniteAbelianGroup) -> HashSet<Vec<usize>> {
        let n = g.size();
        let mut out = HashSet::new();
        for mask in 0u32..(1 << n) {
            let gens: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let mut set: HashSet<usize> = HashSet::from([0]);
            loop {
                let mut grew = false;
                let cur: Vec<usize> = set.iter().copied().collect();
                for &a in &cur {
                    for &x in &gens {
                        if set.insert(g.add_index(a, x)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            let mut v: Vec<usize> = set.into_iter().collect();
            v.sort();
            out.insert(v);
        }
        out
    }

    #[test]
    fn subgroup_enumeration_examples() {
        let subs = z("Z4").enumerate_subgroups().unwrap();
        let lists: Vec<&[usize]> = subs.iter().map(|s| s.elements()).collect();
        assert_eq!(lists, vec![&[0][..], &[0, 2][..], &[0, 1, 2, 3][..]]);

        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(FiniteAbelianGroup::cyclic(p).unwrap().enumerate_subgroups().unwrap().len(), 2);
        }
        assert_eq!(z("Z2xZ2").enumerate_subgroups().unwrap().len(), 5);

        for lit in ["Z2xZ2", "Z12", "Z2xZ4", "Z2xZ2xZ2", "Z3xZ3"] {
            let g = z(lit);
            let got: HashSet<Vec<usize>> = g
                .enumerate_subgroups()
                .unwrap()
                .iter()
                .map(|s| s.elements().to_vec())
                .collect();
            assert_eq!(got, subgroups_by_generator_subsets(&g), "{lit}");
        }
    }

    #[test]
    fn enumeration_cap() {
        let g = z("Z4097");
        match g.enumerate_subgroups() {
            Err(LabError::Capacity { cap, .. }) => assert_eq!(cap, 4096),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn cosets_partition() {
        let g = z("Z2xZ6");
        for h in g.enumerate_subgroups().unwrap() {
            let mut covered = Bitset::new(g.size());
            let mut count = 0;
            for x in 0..g.size() {
                let c = h.coset(&g, x);
                assert_eq!(c.count_ones(), h.order());
                if !covered.contains(x) {
                    assert_eq!(covered.intersection_count(&c), 0);
                    covered.union_with(&c);
                    count += 1;
                }
            }
            assert_eq!(covered.count_ones(), g.size());
            assert_eq!(count, h.index());
        }
    }

    #[test]
    fn stabilizer_examples() {
        let g = z("Z6");
        let s = Bitset::from_indices(6, [0, 2, 4]);
        assert_eq!(g.stabilizer(&s).unwrap().elements(), &[0, 2, 4]);
        let s = Bitset::from_indices(6, [0, 1]);
        assert!(g.stabilizer(&s).unwrap().is_trivial());
        let full = Bitset::full(6);
        assert_eq!(g.stabilizer(&full).unwrap().order(), 6);
        assert!(matches!(g.stabilizer(&Bitset::new(6)), Err(LabError::Domain(_))));
    }

    proptest! {
        #[test]
        fn character_is_homomorphism(chi in 0usize..60, x in 0usize..60, y in 0usize..60) {
            let g = z("Z3xZ4xZ5");
            let lhs = g.char_eval_index(chi, g.add_index(x, y));
            let rhs = g.char_eval_index(chi, x) * g.char_eval_index(chi, y);
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn stabilizer_is_fixed_point(bits in proptest::collection::vec(any::<bool>(), 24)) {
            let g = z("Z2xZ12");
            let s = Bitset::from_indices(24, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
            prop_assume!(!s.is_empty());
            let h = g.stabilizer(&s).unwrap();
            for &e in h.elements() {
                prop_assert_eq!(g.translate(&s, e), s.clone());
            }
            // closure under addition and negation
            for &a in h.elements() {
                prop_assert!(h.contains(g.neg_index(a)));
                for &b in h.elements() {
                    prop_assert!(h.contains(g.add_index(a, b)));
                }
            }
        }
    }
}
