//! Partial transformations of the finite chain `X_n = {1 < … < n}`: class
//! predicates, ideal search, composition, restriction, inversion and the
//! idempotent trichotomy.
//!
//! Composition is left-to-right throughout: `x(αβ) = (xα)β`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::FiniteChain;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("maps live on different chains")]
    ChainMismatch,
    #[error("map is not injective")]
    NotInjective,
    #[error("map is not orientation-preserving")]
    NotOrientationPreserving,
    #[error("constant maps admit several ideals; pass one explicitly")]
    ConstantMap,
    #[error("the given subset is not an ideal of the map")]
    NotAnIdeal,
    #[error("map is not idempotent")]
    NotIdempotent,
    #[error("map is not full")]
    NotFull,
    #[error("element {0} outside chain of size {1}")]
    OutOfRange(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A partial transformation of `X_n`: a value for each element of its domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialMap {
    chain: FiniteChain,
    vals: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn empty(chain: FiniteChain) -> Self {
        PartialMap { chain, vals: vec![None; chain.size()] }
    }

    pub fn identity(chain: FiniteChain) -> Self {
        PartialMap { chain, vals: chain.elements().map(Some).collect() }
    }

    /// Full map from its image sequence `[1α, 2α, …, nα]`.
    pub fn full(chain: FiniteChain, images: &[usize]) -> Result<Self, TransformError> {
        if images.len() != chain.size() {
            return Err(TransformError::Parse(format!(
                "expected {} images, got {}",
                chain.size(),
                images.len()
            )));
        }
        for &v in images {
            if !chain.contains(v) {
                return Err(TransformError::OutOfRange(v, chain.size()));
            }
        }
        Ok(PartialMap { chain, vals: images.iter().map(|&v| Some(v)).collect() })
    }

    pub fn from_pairs(chain: FiniteChain, pairs: &[(usize, usize)]) -> Result<Self, TransformError> {
        let mut vals = vec![None; chain.size()];
        for &(x, v) in pairs {
            if !chain.contains(x) {
                return Err(TransformError::OutOfRange(x, chain.size()));
            }
            if !chain.contains(v) {
                return Err(TransformError::OutOfRange(v, chain.size()));
            }
            vals[x - 1] = Some(v);
        }
        Ok(PartialMap { chain, vals })
    }

    pub(crate) fn from_vals(chain: FiniteChain, vals: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(vals.len(), chain.size());
        PartialMap { chain, vals }
    }

    pub fn chain(&self) -> FiniteChain {
        self.chain
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.vals.get(x.wrapping_sub(1)).copied().flatten()
    }

    /// Domain elements in increasing order.
    pub fn dom(&self) -> Vec<usize> {
        (1..=self.chain.size()).filter(|&x| self.vals[x - 1].is_some()).collect()
    }

    pub fn dom_size(&self) -> usize {
        self.vals.iter().filter(|v| v.is_some()).count()
    }

    /// Image as a sorted, deduplicated list.
    pub fn image(&self) -> Vec<usize> {
        let mut im: Vec<usize> = self.vals.iter().flatten().copied().collect();
        im.sort_unstable();
        im.dedup();
        im
    }

    pub fn is_empty_map(&self) -> bool {
        self.vals.iter().all(|v| v.is_none())
    }

    pub fn is_full(&self) -> bool {
        self.vals.iter().all(|v| v.is_some())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.chain.size()];
        for v in self.vals.iter().flatten() {
            if seen[v - 1] {
                return false;
            }
            seen[v - 1] = true;
        }
        true
    }

    /// Nonempty with a single image value.
    pub fn is_constant(&self) -> bool {
        self.image().len() == 1
    }

    /// Kernel: domain elements grouped by image value, classes listed by
    /// their minimum element.
    pub fn kernel(&self) -> Vec<Vec<usize>> {
        let mut by_val: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in self.dom() {
            by_val.entry(self.apply(x).unwrap()).or_default().push(x);
        }
        let mut classes: Vec<Vec<usize>> = by_val.into_values().collect();
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

/// An order ideal of the domain of some map, witnessing conditions
/// (OP1)/(OP2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealSet {
    elems: Vec<usize>,
}

impl IdealSet {
    pub fn new(mut elems: Vec<usize>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        IdealSet { elems }
    }

    pub fn empty() -> Self {
        IdealSet { elems: Vec::new() }
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

impl fmt::Display for IdealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.elems.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, "}}")
    }
}

/// The nine transformation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    PT,
    T,
    I,
    O,
    PO,
    POI,
    OP,
    POP,
    POPI,
}

pub const ALL_CLASSES: [ClassTag; 9] = [
    ClassTag::PT,
    ClassTag::T,
    ClassTag::I,
    ClassTag::O,
    ClassTag::PO,
    ClassTag::POI,
    ClassTag::OP,
    ClassTag::POP,
    ClassTag::POPI,
];

impl ClassTag {
    /// Membership predicate for this class.
    pub fn contains(&self, alpha: &PartialMap) -> bool {
        match self {
            ClassTag::PT => true,
            ClassTag::T => alpha.is_full(),
            ClassTag::I => alpha.is_injective(),
            ClassTag::O => alpha.is_full() && is_order_preserving(alpha),
            ClassTag::PO => is_order_preserving(alpha),
            ClassTag::POI => is_order_preserving(alpha) && alpha.is_injective(),
            ClassTag::OP => alpha.is_full() && is_orientation_preserving(alpha),
            ClassTag::POP => is_orientation_preserving(alpha),
            ClassTag::POPI => is_orientation_preserving(alpha) && alpha.is_injective(),
        }
    }

    /// Whether the class consists of full transformations only.
    pub fn is_full_class(&self) -> bool {
        matches!(self, ClassTag::T | ClassTag::O | ClassTag::OP)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassTag::PT => "PT",
            ClassTag::T => "T",
            ClassTag::I => "I",
            ClassTag::O => "O",
            ClassTag::PO => "PO",
            ClassTag::POI => "POI",
            ClassTag::OP => "OP",
            ClassTag::POP => "POP",
            ClassTag::POPI => "POPI",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PT" => Ok(ClassTag::PT),
            "T" => Ok(ClassTag::T),
            "I" => Ok(ClassTag::I),
            "O" => Ok(ClassTag::O),
            "PO" => Ok(ClassTag::PO),
            "POI" => Ok(ClassTag::POI),
            "OP" => Ok(ClassTag::OP),
            "POP" => Ok(ClassTag::POP),
            "POPI" => Ok(ClassTag::POPI),
            _ => Err(TransformError::Parse(format!("unknown class {s:?}"))),
        }
    }
}

/// The three shapes an orientation-preserving full idempotent can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdempotentShape {
    OrderPreserving,
    /// `(X∖Y)α = {m}` with `m = min Im(α)`.
    MinAnchored(usize),
    /// `Yα = {m}` with `m = max Im(α)`.
    MaxAnchored(usize),
}

/// True iff `α` restricted to its domain is order-preserving. The empty map
/// is order-preserving.
pub fn is_order_preserving(alpha: &PartialMap) -> bool {
    let dom = alpha.dom();
    dom.windows(2).all(|w| alpha.apply(w[0]).unwrap() <= alpha.apply(w[1]).unwrap())
}

fn op_on(alpha: &PartialMap, elems: &[usize]) -> bool {
    elems.windows(2).all(|w| alpha.apply(w[0]).unwrap() <= alpha.apply(w[1]).unwrap())
}

/// Check conditions (OP1)/(OP2) for an explicit nonempty subset `Y` of the
/// domain given as the prefix `dom[..k]`.
fn prefix_is_ideal(alpha: &PartialMap, dom: &[usize], k: usize) -> bool {
    let (y, rest) = dom.split_at(k);
    if !op_on(alpha, y) || !op_on(alpha, rest) {
        return false;
    }
    if y.is_empty() || rest.is_empty() {
        return true;
    }
    let min_y = y.iter().map(|&x| alpha.apply(x).unwrap()).min().unwrap();
    let max_rest = rest.iter().map(|&x| alpha.apply(x).unwrap()).max().unwrap();
    min_y >= max_rest
}

/// All ideals of `α`, smallest first. For a nonempty map these are the
/// nonempty order-ideal prefixes of the domain satisfying (OP1)/(OP2); the
/// empty map has the empty set as its single ideal by convention.
///
/// Only prefixes need scanning: (OP2) forces every ideal to be downward
/// closed in the domain. The raw all-subsets definition is cross-checked
/// exhaustively in the test suite.
pub fn find_ideals(alpha: &PartialMap) -> Vec<IdealSet> {
    if alpha.is_empty_map() {
        return vec![IdealSet::empty()];
    }
    let dom = alpha.dom();
    (1..=dom.len())
        .filter(|&k| prefix_is_ideal(alpha, &dom, k))
        .map(|k| IdealSet::new(dom[..k].to_vec()))
        .collect()
}

/// True iff `α` is empty or admits an ideal.
pub fn is_orientation_preserving(alpha: &PartialMap) -> bool {
    alpha.is_empty_map() || !find_ideals(alpha).is_empty()
}

/// Whether the explicit subset `y` satisfies (OP1)/(OP2) for `α`.
pub fn is_ideal(alpha: &PartialMap, y: &IdealSet) -> bool {
    if alpha.is_empty_map() {
        return y.is_empty();
    }
    if y.is_empty() {
        return false;
    }
    let dom = alpha.dom();
    if !y.elems().iter().all(|&x| dom.binary_search(&x).is_ok()) {
        return false;
    }
    let k = y.elems().len();
    dom[..k] == *y.elems() && prefix_is_ideal(alpha, &dom, k)
}

/// The single ideal of a non-constant orientation-preserving map.
pub fn unique_ideal(alpha: &PartialMap) -> Result<IdealSet, TransformError> {
    if alpha.is_constant() {
        return Err(TransformError::ConstantMap);
    }
    let mut ideals = find_ideals(alpha);
    match ideals.len() {
        0 => Err(TransformError::NotOrientationPreserving),
        1 => Ok(ideals.pop().unwrap()),
        n => unreachable!("non-constant map with {n} ideals"),
    }
}

/// The glued point: `Yα ∩ (Dom∖Y)α` is either empty or the singleton `{m}`
/// with `m = min(Yα) = max((Dom∖Y)α)`.
pub fn glued_point(alpha: &PartialMap, y: &IdealSet) -> Result<Option<usize>, TransformError> {
    if !is_ideal(alpha, y) {
        return Err(TransformError::NotAnIdeal);
    }
    let dom = alpha.dom();
    let y_img: Vec<usize> =
        y.elems().iter().map(|&x| alpha.apply(x).unwrap()).collect();
    let rest_img: Vec<usize> = dom
        .iter()
        .filter(|&&x| !y.contains(x))
        .map(|&x| alpha.apply(x).unwrap())
        .collect();
    let common: Vec<usize> = y_img
        .iter()
        .filter(|v| rest_img.contains(v))
        .copied()
        .collect();
    if common.is_empty() {
        return Ok(None);
    }
    let m = common[0];
    debug_assert!(common.iter().all(|&v| v == m));
    debug_assert_eq!(y_img.iter().min(), Some(&m));
    debug_assert_eq!(rest_img.iter().max(), Some(&m));
    Ok(Some(m))
}

/// Left-to-right composition `αβ` with
/// `Dom(αβ) = {x ∈ Dom(α) : xα ∈ Dom(β)}`.
pub fn compose(alpha: &PartialMap, beta: &PartialMap) -> Result<PartialMap, TransformError> {
    if alpha.chain != beta.chain {
        return Err(TransformError::ChainMismatch);
    }
    let vals = alpha.vals.iter().map(|v| v.and_then(|x| beta.apply(x))).collect();
    Ok(PartialMap::from_vals(alpha.chain, vals))
}

/// Restriction of `α` to `A ∩ Dom(α)`.
pub fn restrict(alpha: &PartialMap, subset: &[usize]) -> PartialMap {
    let mut vals = vec![None; alpha.chain.size()];
    for &x in subset {
        if alpha.chain.contains(x) {
            vals[x - 1] = alpha.vals[x - 1];
        }
    }
    PartialMap::from_vals(alpha.chain, vals)
}

/// Inverse of an injective map: the partial permutation `Im(α) → Dom(α)`.
pub fn invert(alpha: &PartialMap) -> Result<PartialMap, TransformError> {
    if !alpha.is_injective() {
        return Err(TransformError::NotInjective);
    }
    let mut vals = vec![None; alpha.chain.size()];
    for x in alpha.dom() {
        vals[alpha.apply(x).unwrap() - 1] = Some(x);
    }
    Ok(PartialMap::from_vals(alpha.chain, vals))
}

/// Every class tag `α` belongs to, in a fixed order.
pub fn classify(alpha: &PartialMap) -> Vec<ClassTag> {
    ALL_CLASSES.iter().copied().filter(|t| t.contains(alpha)).collect()
}

/// The idempotent trichotomy for full orientation-preserving idempotents.
pub fn classify_idempotent(
    alpha: &PartialMap,
    ideal: Option<&IdealSet>,
) -> Result<IdempotentShape, TransformError> {
    if !alpha.is_full() {
        return Err(TransformError::NotFull);
    }
    if compose(alpha, alpha)? != *alpha {
        return Err(TransformError::NotIdempotent);
    }
    if is_order_preserving(alpha) {
        return Ok(IdempotentShape::OrderPreserving);
    }
    let y = match ideal {
        Some(y) => {
            if !is_ideal(alpha, y) {
                return Err(TransformError::NotAnIdeal);
            }
            y.clone()
        }
        None => unique_ideal(alpha)?,
    };
    let im = alpha.image();
    let mut y_img: Vec<usize> =
        y.elems().iter().map(|&x| alpha.apply(x).unwrap()).collect();
    y_img.sort_unstable();
    y_img.dedup();
    let mut rest_img: Vec<usize> = (1..=alpha.chain.size())
        .filter(|&x| !y.contains(x))
        .map(|x| alpha.apply(x).unwrap())
        .collect();
    rest_img.sort_unstable();
    rest_img.dedup();
    if im == y_img && im.iter().all(|&v| y.contains(v)) {
        let m = *im.first().unwrap();
        if rest_img == [m] {
            return Ok(IdempotentShape::MinAnchored(m));
        }
    }
    if im == rest_img && im.iter().all(|&v| !y.contains(v)) {
        let m = *im.last().unwrap();
        if y_img == [m] {
            return Ok(IdempotentShape::MaxAnchored(m));
        }
    }
    Err(TransformError::NotIdempotent)
}

// --- text format: full maps as `[v1,...,vn]`, partial maps as `{d1:v1,...}` ---

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            write!(f, "[")?;
            for (k, v) in self.vals.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", v.unwrap())?;
            }
            write!(f, "]")
        } else {
            write!(f, "{{")?;
            let mut first = true;
            for x in self.dom() {
                if !first {
                    write!(f, ",")?;
                }
                first = false;
                write!(f, "{}:{}", x, self.apply(x).unwrap())?;
            }
            write!(f, "}}")
        }
    }
}

impl PartialMap {
    /// Parse the compact text form against a given chain.
    pub fn parse(chain: FiniteChain, s: &str) -> Result<Self, TransformError> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let body = body.trim();
            let images: Vec<usize> = if body.is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|e| TransformError::Parse(format!("bad value {t:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?
            };
            PartialMap::full(chain, &images)
        } else if let Some(body) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let body = body.trim();
            let mut pairs = Vec::new();
            if !body.is_empty() {
                for item in body.split(',') {
                    let (x, v) = item
                        .split_once(':')
                        .ok_or_else(|| TransformError::Parse(format!("bad entry {item:?}")))?;
                    let x = x.trim().parse::<usize>()
                        .map_err(|e| TransformError::Parse(format!("bad key {x:?}: {e}")))?;
                    let v = v.trim().parse::<usize>()
                        .map_err(|e| TransformError::Parse(format!("bad value {v:?}: {e}")))?;
                    pairs.push((x, v));
                }
            }
            PartialMap::from_pairs(chain, &pairs)
        } else {
            Err(TransformError::Parse(format!("expected [..] or {{..}}, got {s:?}")))
        }
    }
}

// --- JSON schema: {"chain": n, "full": [...]} or {"chain": n, "map": {...}} ---

#[derive(Serialize, Deserialize)]
struct MapRepr {
    chain: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    full: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    map: Option<BTreeMap<String, usize>>,
}

impl Serialize for PartialMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = if self.is_full() {
            MapRepr {
                chain: self.chain.size(),
                full: Some(self.vals.iter().map(|v| v.unwrap()).collect()),
                map: None,
            }
        } else {
            MapRepr {
                chain: self.chain.size(),
                full: None,
                map: Some(
                    self.dom()
                        .into_iter()
                        .map(|x| (x.to_string(), self.apply(x).unwrap()))
                        .collect(),
                ),
            }
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MapRepr::deserialize(de)?;
        let chain = FiniteChain::new(repr.chain).map_err(D::Error::custom)?;
        match (repr.full, repr.map) {
            (Some(images), None) => PartialMap::full(chain, &images).map_err(D::Error::custom),
            (None, Some(entries)) => {
                let mut pairs = Vec::new();
                for (k, v) in entries {
                    let x = k.parse::<usize>().map_err(D::Error::custom)?;
                    pairs.push((x, v));
                }
                PartialMap::from_pairs(chain, &pairs).map_err(D::Error::custom)
            }
            (None, None) => Ok(PartialMap::empty(chain)),
            _ => Err(D::Error::custom("both \"full\" and \"map\" given")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FiniteChain {
        FiniteChain::new(n).unwrap()
    }

    fn full(n: usize, images: &[usize]) -> PartialMap {
        PartialMap::full(chain(n), images).unwrap()
    }

    fn partial(n: usize, pairs: &[(usize, usize)]) -> PartialMap {
        PartialMap::from_pairs(chain(n), pairs).unwrap()
    }

    #[test]
    fn order_preserving_examples() {
        assert!(is_order_preserving(&full(3, &[1, 2, 3])));
        assert!(!is_order_preserving(&full(3, &[2, 3, 1])));
        assert!(is_order_preserving(&partial(3, &[(1, 2), (3, 2)])));
        assert!(is_order_preserving(&PartialMap::empty(chain(3))));
    }

    #[test]
    fn find_ideals_examples() {
        assert_eq!(find_ideals(&full(3, &[2, 3, 1])), vec![IdealSet::new(vec![1, 2])]);
        // Constants admit every nonempty order ideal of the domain.
        assert_eq!(
            find_ideals(&partial(2, &[(1, 1), (2, 1)])),
            vec![IdealSet::new(vec![1]), IdealSet::new(vec![1, 2])]
        );
        assert_eq!(find_ideals(&full(3, &[1, 3, 2])), vec![]);
        assert_eq!(find_ideals(&PartialMap::empty(chain(3))), vec![IdealSet::empty()]);
    }

    #[test]
    fn orientation_preserving_examples() {
        assert!(is_orientation_preserving(&full(3, &[2, 3, 1])));
        assert!(is_orientation_preserving(&PartialMap::empty(chain(3))));
        assert!(!is_orientation_preserving(&full(3, &[1, 3, 2])));
    }

    #[test]
    fn unique_ideal_examples() {
        assert_eq!(unique_ideal(&full(3, &[2, 3, 1])).unwrap(), IdealSet::new(vec![1, 2]));
        // Order-preserving maps have the whole domain as their ideal.
        assert_eq!(unique_ideal(&full(3, &[1, 1, 2])).unwrap(), IdealSet::new(vec![1, 2, 3]));
        assert_eq!(unique_ideal(&full(3, &[2, 2, 2])), Err(TransformError::ConstantMap));
        assert_eq!(
            unique_ideal(&PartialMap::empty(chain(3))).unwrap(),
            IdealSet::empty()
        );
    }

    #[test]
    fn glued_point_examples() {
        let a = full(3, &[2, 2, 1]);
        assert_eq!(glued_point(&a, &IdealSet::new(vec![1, 2])).unwrap(), None);
        let b = full(3, &[2, 3, 2]);
        assert_eq!(glued_point(&b, &IdealSet::new(vec![1, 2])).unwrap(), Some(2));
        let id = PartialMap::identity(chain(3));
        assert_eq!(glued_point(&id, &IdealSet::new(vec![1, 2, 3])).unwrap(), None);
        assert_eq!(
            glued_point(&b, &IdealSet::new(vec![1])),
            Err(TransformError::NotAnIdeal)
        );
    }

    #[test]
    fn compose_examples() {
        let a = full(3, &[2, 3, 1]);
        assert_eq!(compose(&a, &a).unwrap(), full(3, &[3, 1, 2]));
        assert_eq!(compose(&a, &PartialMap::identity(chain(3))).unwrap(), a);
        let p = partial(3, &[(1, 3)]);
        let q = partial(3, &[(2, 1)]);
        assert!(compose(&p, &q).unwrap().is_empty_map());
        assert_eq!(
            compose(&a, &full(2, &[1, 2])),
            Err(TransformError::ChainMismatch)
        );
    }

    #[test]
    fn restrict_examples() {
        let a = full(3, &[2, 3, 1]);
        assert_eq!(restrict(&a, &[1, 3]), partial(3, &[(1, 2), (3, 1)]));
        assert_eq!(restrict(&a, &[1, 2, 3]), a);
        assert!(restrict(&a, &[]).is_empty_map());
    }

    #[test]
    fn invert_examples() {
        let a = partial(3, &[(1, 2), (2, 3)]);
        assert_eq!(invert(&a).unwrap(), partial(3, &[(2, 1), (3, 2)]));
        let id = PartialMap::identity(chain(3));
        assert_eq!(invert(&id).unwrap(), id);
        let rot = full(3, &[3, 1, 2]);
        let inv = invert(&rot).unwrap();
        assert!(is_orientation_preserving(&inv));
        assert_eq!(invert(&full(3, &[1, 1, 2])), Err(TransformError::NotInjective));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&PartialMap::identity(chain(3))), ALL_CLASSES.to_vec());
        assert_eq!(
            classify(&full(3, &[2, 3, 1])),
            vec![ClassTag::PT, ClassTag::T, ClassTag::I, ClassTag::OP, ClassTag::POP, ClassTag::POPI]
        );
        assert_eq!(
            classify(&partial(3, &[(1, 1), (3, 2)])),
            vec![
                ClassTag::PT,
                ClassTag::I,
                ClassTag::PO,
                ClassTag::POI,
                ClassTag::POP,
                ClassTag::POPI
            ]
        );
        // The empty map sits in every partial class.
        assert_eq!(
            classify(&PartialMap::empty(chain(2))),
            vec![
                ClassTag::PT,
                ClassTag::I,
                ClassTag::PO,
                ClassTag::POI,
                ClassTag::POP,
                ClassTag::POPI
            ]
        );
    }

    #[test]
    fn classify_idempotent_examples() {
        assert_eq!(
            classify_idempotent(&PartialMap::identity(chain(3)), None).unwrap(),
            IdempotentShape::OrderPreserving
        );
        assert_eq!(
            classify_idempotent(&full(3, &[1, 1, 1]), None).unwrap(),
            IdempotentShape::OrderPreserving
        );
        // e = [1,1,3,3,1] on X_5 is idempotent with ideal {1,2,3,4}:
        // Im = Yα = {1,3} ⊆ Y and (X∖Y)α = {1} = {min Im}.
        let e = full(5, &[1, 1, 3, 3, 1]);
        assert_eq!(compose(&e, &e).unwrap(), e);
        let shape = classify_idempotent(&e, Some(&IdealSet::new(vec![1, 2, 3, 4]))).unwrap();
        assert_eq!(shape, IdempotentShape::MinAnchored(1));
        assert_eq!(
            classify_idempotent(&full(3, &[2, 3, 1]), None),
            Err(TransformError::NotIdempotent)
        );
        assert_eq!(
            classify_idempotent(&partial(3, &[(1, 1)]), None),
            Err(TransformError::NotFull)
        );
    }

    #[test]
    fn max_anchored_idempotent_exists() {
        // Dual shape: Yα = {max Im}. On X_3, e = [3,1,3]: e∘e: 1↦3↦3 ✓, 2↦1↦3 ✗.
        // Search exhaustively on X_4 for a witness of shape 3.
        let ch = chain(4);
        let mut found = false;
        for code in 0..(4usize.pow(4)) {
            let mut c = code;
            let mut images = Vec::with_capacity(4);
            for _ in 0..4 {
                images.push(c % 4 + 1);
                c /= 4;
            }
            let e = PartialMap::full(ch, &images).unwrap();
            if compose(&e, &e).unwrap() != e || !is_orientation_preserving(&e) {
                continue;
            }
            if let Ok(IdempotentShape::MaxAnchored(m)) = classify_idempotent(&e, None) {
                assert_eq!(m, *e.image().last().unwrap());
                found = true;
            }
        }
        assert!(found, "no MaxAnchored idempotent found in OP_4");
    }

    #[test]
    fn text_round_trip() {
        for (n, s) in [(3, "[2,3,1]"), (3, "{1:2,3:1}"), (3, "{}"), (1, "[1]")] {
            let m = PartialMap::parse(chain(n), s).unwrap();
            assert_eq!(m.to_string(), s);
            assert_eq!(PartialMap::parse(chain(n), &m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn json_round_trip() {
        let a = full(3, &[2, 3, 1]);
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, r#"{"chain":3,"full":[2,3,1]}"#);
        assert_eq!(serde_json::from_str::<PartialMap>(&j).unwrap(), a);
        let p = partial(3, &[(1, 2), (3, 1)]);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"chain":3,"map":{"1":2,"3":1}}"#);
        assert_eq!(serde_json::from_str::<PartialMap>(&j).unwrap(), p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            fn arb_map(n: usize)(vals in proptest::collection::vec(0..=n, n)) -> PartialMap {
                let pairs: Vec<(usize, usize)> = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0)
                    .map(|(i, &v)| (i + 1, v))
                    .collect();
                PartialMap::from_pairs(chain(n), &pairs).unwrap()
            }
        }

        proptest! {
            #[test]
            fn composition_is_associative(
                a in arb_map(6), b in arb_map(6), c in arb_map(6)
            ) {
                let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
                let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn identity_is_neutral(a in arb_map(6)) {
                let id = PartialMap::identity(chain(6));
                prop_assert_eq!(&compose(&a, &id).unwrap(), &a);
                prop_assert_eq!(&compose(&id, &a).unwrap(), &a);
            }

            #[test]
            fn inversion_is_involutive(
                perm in Just(6usize).prop_flat_map(|n| proptest::sample::subsequence(
                    (1..=n).collect::<Vec<_>>(), 0..=n,
                ).prop_shuffle()),
                mask in 0u32..64,
            ) {
                let pairs: Vec<(usize, usize)> = perm
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(i, &v)| (i + 1, v))
                    .collect();
                let a = PartialMap::from_pairs(chain(6), &pairs).unwrap();
                prop_assert!(a.is_injective());
                let inv = invert(&a).unwrap();
                prop_assert_eq!(invert(&inv).unwrap(), a);
            }

            #[test]
            fn restriction_never_joins_classes(a in arb_map(5), mask in 0u32..32) {
                let subset: Vec<usize> =
                    (1..=5).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                let r = restrict(&a, &subset);
                if is_order_preserving(&a) {
                    prop_assert!(is_order_preserving(&r));
                }
                if is_orientation_preserving(&a) {
                    prop_assert!(is_orientation_preserving(&r));
                }
            }
        }
    }
}
