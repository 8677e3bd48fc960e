//! Exhaustive generation of the nine transformation classes on `X_n`,
//! composition tables, and brute-force oracles for Green's relations and
//! regularity.
//!
//! The oracles work from raw definitions only (principal-ideal containment,
//! exhaustive inner-inverse search) and never call the criterion code they
//! are used to validate.

use std::collections::HashMap;

use thiserror::Error;

use crate::chain::FiniteChain;
use crate::finite::{compose, ClassTag, PartialMap};

/// Default ceiling on the candidate space scanned by enumeration.
pub const DEFAULT_MAX_CANDIDATES: u64 = 100_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("candidate space {candidates} exceeds ceiling {ceiling}")]
    SizeLimit { candidates: u128, ceiling: u64 },
    #[error("class {class} is not closed under composition at n={n}: {alpha} ∘ {beta} = {product} left the class")]
    ClosureViolation { class: ClassTag, n: usize, alpha: String, beta: String, product: String },
}

/// Candidate space size for a tag: `n^n` for the full classes, `(n+1)^n`
/// otherwise.
pub fn candidate_count(tag: ClassTag, n: usize) -> u128 {
    let base = if tag.is_full_class() { n as u128 } else { n as u128 + 1 };
    base.pow(n as u32)
}

/// Iterator over all candidate maps for a class, in lexicographic order of
/// the value vector (for partial classes, "undefined" sorts before value 1).
struct CandidateIter {
    chain: FiniteChain,
    partial: bool,
    state: Vec<usize>,
    done: bool,
}

impl CandidateIter {
    fn new(chain: FiniteChain, partial: bool) -> Self {
        CandidateIter { chain, partial, state: vec![0; chain.size()], done: false }
    }
}

impl Iterator for CandidateIter {
    type Item = PartialMap;

    fn next(&mut self) -> Option<PartialMap> {
        if self.done {
            return None;
        }
        let n = self.chain.size();
        let vals: Vec<Option<usize>> = self
            .state
            .iter()
            .map(|&digit| {
                if self.partial {
                    if digit == 0 {
                        None
                    } else {
                        Some(digit)
                    }
                } else {
                    Some(digit + 1)
                }
            })
            .collect();
        let map = PartialMap::from_vals(self.chain, vals);
        let radix = if self.partial { n + 1 } else { n };
        let mut k = n;
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.state[k] += 1;
            if self.state[k] < radix {
                break;
            }
            self.state[k] = 0;
        }
        Some(map)
    }
}

fn check_ceiling(tag: ClassTag, n: usize, ceiling: u64) -> Result<(), EnumError> {
    let candidates = candidate_count(tag, n);
    if candidates > ceiling as u128 {
        return Err(EnumError::SizeLimit { candidates, ceiling });
    }
    Ok(())
}

/// All members of the class on `X_n`, in deterministic order.
pub fn enumerate_class(tag: ClassTag, n: usize, ceiling: u64) -> Result<Vec<PartialMap>, EnumError> {
    check_ceiling(tag, n, ceiling)?;
    let chain = FiniteChain::new(n).expect("n ≥ 1");
    Ok(CandidateIter::new(chain, !tag.is_full_class())
        .filter(|m| tag.contains(m))
        .collect())
}

/// `|enumerate_class(tag, n)|` without materializing the maps.
pub fn count_class(tag: ClassTag, n: usize, ceiling: u64) -> Result<u64, EnumError> {
    check_ceiling(tag, n, ceiling)?;
    let chain = FiniteChain::new(n).expect("n ≥ 1");
    Ok(CandidateIter::new(chain, !tag.is_full_class())
        .filter(|m| tag.contains(m))
        .count() as u64)
}

/// Full composition table of a class monoid.
pub struct MonoidTable {
    elements: Vec<PartialMap>,
    index: HashMap<PartialMap, usize>,
    product: Vec<usize>,
    identity: usize,
}

impl MonoidTable {
    pub fn elements(&self) -> &[PartialMap] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, m: &PartialMap) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of the product `elements[i] ∘ elements[j]`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.product[i * self.elements.len() + j]
    }
}

/// Build the composition table of a class on `X_n`. Closure failure is a
/// library bug, reported as `ClosureViolation`.
pub fn build_monoid(tag: ClassTag, n: usize, ceiling: u64) -> Result<MonoidTable, EnumError> {
    let elements = enumerate_class(tag, n, ceiling)?;
    let size = elements.len() as u128;
    if size * size > ceiling as u128 {
        return Err(EnumError::SizeLimit { candidates: size * size, ceiling });
    }
    let index: HashMap<PartialMap, usize> =
        elements.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let k = elements.len();
    let mut product = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            let p = compose(&elements[i], &elements[j]).expect("same chain");
            match index.get(&p) {
                Some(&pi) => product[i * k + j] = pi,
                None => {
                    return Err(EnumError::ClosureViolation {
                        class: tag,
                        n,
                        alpha: elements[i].to_string(),
                        beta: elements[j].to_string(),
                        product: p.to_string(),
                    })
                }
            }
        }
    }
    let identity = index[&PartialMap::identity(FiniteChain::new(n).unwrap())];
    Ok(MonoidTable { elements, index, product, identity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GreenRelation {
    L,
    R,
    H,
    D,
    J,
}

impl GreenRelation {
    pub const ALL: [GreenRelation; 5] =
        [GreenRelation::L, GreenRelation::R, GreenRelation::H, GreenRelation::D, GreenRelation::J];

    pub fn name(&self) -> &'static str {
        match self {
            GreenRelation::L => "L",
            GreenRelation::R => "R",
            GreenRelation::H => "H",
            GreenRelation::D => "D",
            GreenRelation::J => "J",
        }
    }
}

impl std::str::FromStr for GreenRelation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "L" => Ok(GreenRelation::L),
            "R" => Ok(GreenRelation::R),
            "H" => Ok(GreenRelation::H),
            "D" => Ok(GreenRelation::D),
            "J" => Ok(GreenRelation::J),
            _ => Err(format!("unknown Green relation {s:?}")),
        }
    }
}

/// Partition of the table's elements under one Green relation.
pub struct GreenOracleResult {
    pub relation: GreenRelation,
    class_of: Vec<usize>,
}

impl GreenOracleResult {
    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let count = self.class_of.iter().copied().max().map_or(0, |m| m + 1);
        out.resize_with(count, Vec::new);
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn class_count(&self) -> usize {
        self.classes().len()
    }
}

type Bitset = Vec<u64>;

fn bitset_new(len: usize) -> Bitset {
    vec![0u64; len.div_ceil(64)]
}

fn bitset_set(b: &mut Bitset, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn canonical_classes(keys: Vec<Bitset>) -> Vec<usize> {
    let mut ids: HashMap<Bitset, usize> = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// Green's relations by raw principal-ideal containment: `α L β ⇔ S¹α = S¹β`,
/// `α R β ⇔ αS¹ = βS¹`, `α J β ⇔ S¹αS¹ = S¹βS¹`, `H = L ∧ R`, `D = L ∨ R`.
/// All nine classes contain the identity so `S¹ = S`, but the sets are built
/// with the adjoined identity anyway.
pub fn green_oracle(table: &MonoidTable, relation: GreenRelation) -> GreenOracleResult {
    let k = table.len();
    let class_of = match relation {
        GreenRelation::L => {
            let keys: Vec<Bitset> = (0..k)
                .map(|a| {
                    let mut s = bitset_new(k);
                    bitset_set(&mut s, a);
                    for i in 0..k {
                        bitset_set(&mut s, table.mul(i, a));
                    }
                    s
                })
                .collect();
            canonical_classes(keys)
        }
        GreenRelation::R => {
            let keys: Vec<Bitset> = (0..k)
                .map(|a| {
                    let mut s = bitset_new(k);
                    bitset_set(&mut s, a);
                    for j in 0..k {
                        bitset_set(&mut s, table.mul(a, j));
                    }
                    s
                })
                .collect();
            canonical_classes(keys)
        }
        GreenRelation::J => {
            let keys: Vec<Bitset> = (0..k)
                .map(|a| {
                    let mut s = bitset_new(k);
                    bitset_set(&mut s, a);
                    for i in 0..k {
                        let ia = table.mul(i, a);
                        bitset_set(&mut s, ia);
                        bitset_set(&mut s, table.mul(a, i));
                        for j in 0..k {
                            bitset_set(&mut s, table.mul(ia, j));
                        }
                    }
                    s
                })
                .collect();
            canonical_classes(keys)
        }
        GreenRelation::H => {
            let l = green_oracle(table, GreenRelation::L).class_of;
            let r = green_oracle(table, GreenRelation::R).class_of;
            let pairs: Vec<(usize, usize)> = l.into_iter().zip(r).collect();
            let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
            pairs
                .into_iter()
                .map(|p| {
                    let next = ids.len();
                    *ids.entry(p).or_insert(next)
                })
                .collect()
        }
        GreenRelation::D => {
            // Join of L and R as equivalences, by union-find.
            let l = green_oracle(table, GreenRelation::L).class_of;
            let r = green_oracle(table, GreenRelation::R).class_of;
            let mut parent: Vec<usize> = (0..k).collect();
            fn find(parent: &mut [usize], i: usize) -> usize {
                let mut i = i;
                while parent[i] != i {
                    parent[i] = parent[parent[i]];
                    i = parent[i];
                }
                i
            }
            let mut l_head: HashMap<usize, usize> = HashMap::new();
            let mut r_head: HashMap<usize, usize> = HashMap::new();
            for i in 0..k {
                if let Some(&h) = l_head.get(&l[i]) {
                    let (a, b) = (find(&mut parent, h), find(&mut parent, i));
                    parent[a] = b;
                } else {
                    l_head.insert(l[i], i);
                }
                if let Some(&h) = r_head.get(&r[i]) {
                    let (a, b) = (find(&mut parent, h), find(&mut parent, i));
                    parent[a] = b;
                } else {
                    r_head.insert(r[i], i);
                }
            }
            let roots: Vec<usize> = (0..k).map(|i| find(&mut parent, i)).collect();
            let mut ids: HashMap<usize, usize> = HashMap::new();
            roots
                .into_iter()
                .map(|r| {
                    let next = ids.len();
                    *ids.entry(r).or_insert(next)
                })
                .collect()
        }
    };
    GreenOracleResult { relation, class_of }
}

/// Exhaustive inner-inverse search: some `β` with `αβα = α`, or none.
pub fn regular_oracle(table: &MonoidTable, idx: usize) -> Option<usize> {
    (0..table.len()).find(|&b| table.mul(table.mul(idx, b), idx) == idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::is_orientation_preserving;

    #[test]
    fn op2_enumeration() {
        // All 4 full maps on X_2 are orientation-preserving.
        let maps = enumerate_class(ClassTag::OP, 2, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(maps.len(), 4);
        assert!(maps.iter().all(|m| m.is_full() && is_orientation_preserving(m)));
    }

    #[test]
    fn spot_counts() {
        assert_eq!(count_class(ClassTag::T, 2, DEFAULT_MAX_CANDIDATES).unwrap(), 4);
        // 3 constants + 18 two-valued cyclic + 3 rotations of (1,2,3).
        assert_eq!(count_class(ClassTag::OP, 3, DEFAULT_MAX_CANDIDATES).unwrap(), 24);
        assert_eq!(count_class(ClassTag::O, 3, DEFAULT_MAX_CANDIDATES).unwrap(), 10);
        assert_eq!(count_class(ClassTag::O, 1, DEFAULT_MAX_CANDIDATES).unwrap(), 1);
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            count_class(ClassTag::PT, 12, 1_000),
            Err(EnumError::SizeLimit { .. })
        ));
    }

    #[test]
    fn monoid_tables() {
        let t = build_monoid(ClassTag::OP, 2, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(t.len(), 4);
        let e = t.identity_index();
        for i in 0..t.len() {
            assert_eq!(t.mul(e, i), i);
            assert_eq!(t.mul(i, e), i);
        }
        // POPI_1 = {empty map, identity}.
        let t = build_monoid(ClassTag::POPI, 1, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(t.len(), 2);
        // POP_2: all 9 partial maps on X_2 are orientation-preserving.
        let t = build_monoid(ClassTag::POP, 2, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(t.len(), 9);
    }

    #[test]
    fn oracle_basics() {
        let t = build_monoid(ClassTag::OP, 2, DEFAULT_MAX_CANDIDATES).unwrap();
        let h = green_oracle(&t, GreenRelation::H);
        assert!(h.same_class(t.identity_index(), t.identity_index()));
        // L classes in OP_2 group by image.
        let l = green_oracle(&t, GreenRelation::L);
        for i in 0..t.len() {
            for j in 0..t.len() {
                assert_eq!(
                    l.same_class(i, j),
                    t.elements()[i].image() == t.elements()[j].image()
                );
            }
        }
        // Identity is its own inner inverse.
        assert_eq!(regular_oracle(&t, t.identity_index()), Some(t.identity_index()));
    }

    #[test]
    fn d_equals_j_on_op3() {
        let t = build_monoid(ClassTag::OP, 3, DEFAULT_MAX_CANDIDATES).unwrap();
        let d = green_oracle(&t, GreenRelation::D);
        let j = green_oracle(&t, GreenRelation::J);
        for i in 0..t.len() {
            for k in 0..t.len() {
                assert_eq!(d.same_class(i, k), j.same_class(i, k));
            }
        }
    }
}
