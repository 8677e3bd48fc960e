//! Regularity: explicit inner-inverse constructions (ζ for partial maps,
//! β for full maps) and the decidable criteria for regular elements of the
//! order-preserving and orientation-preserving full-transformation monoids.
//!
//! The criteria consume only an image description (signature plus gap
//! attainment flags), so finite images and symbolic interval unions share one
//! implementation.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{IntervalUnion, Rat, Signature};
use crate::finite::{
    compose, is_ideal, is_orientation_preserving, IdealSet, PartialMap, TransformError,
};
use crate::symbolic::{
    image_of, is_orientation_preserving_symbolic, maps_equal, ImageClaims, PieceFun,
    PiecewiseMoebiusMap, SymbolicError,
};
use crate::chain::{ExtRat, QInterval};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegError {
    #[error("image is empty")]
    EmptyImage,
    #[error("map is not orientation-preserving")]
    NotOrientationPreserving,
    #[error("the given subset is not an ideal of the map")]
    NotAnIdeal,
    #[error("map is not full")]
    NotFull,
    #[error("image violates the regularity criterion; no inner inverse exists")]
    CriterionFails,
    #[error("unsupported piece shape: {0}")]
    UnsupportedShape(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// A deterministic preimage choice `z_x ∈ xα⁻¹` preferring the ideal:
/// the smallest element of `xα⁻¹ ∩ Y` when `x ∈ Yα`, else the smallest
/// element of `xα⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceFunction {
    z_of: BTreeMap<usize, usize>,
}

impl ChoiceFunction {
    pub fn canonical(alpha: &PartialMap, ideal: &IdealSet) -> ChoiceFunction {
        let mut z_of = BTreeMap::new();
        for x in alpha.dom() {
            let v = alpha.apply(x).unwrap();
            let entry = z_of.entry(v).or_insert(x);
            let in_ideal_now = ideal.contains(x);
            let in_ideal_old = ideal.contains(*entry);
            if (in_ideal_now && !in_ideal_old) || (in_ideal_now == in_ideal_old && x < *entry) {
                *entry = x;
            }
        }
        ChoiceFunction { z_of }
    }

    /// Build from explicit choices; each `z_x` must be a preimage of `x`,
    /// inside the ideal whenever `x` has a preimage there.
    pub fn from_choices(
        alpha: &PartialMap,
        ideal: &IdealSet,
        z_of: BTreeMap<usize, usize>,
    ) -> Result<ChoiceFunction, RegError> {
        for x in alpha.image() {
            let z = *z_of.get(&x).ok_or(RegError::EmptyImage)?;
            if alpha.apply(z) != Some(x) {
                return Err(RegError::NotAnIdeal);
            }
            let ideal_has_preimage =
                ideal.elems().iter().any(|&y| alpha.apply(y) == Some(x));
            if ideal_has_preimage && !ideal.contains(z) {
                return Err(RegError::NotAnIdeal);
            }
        }
        Ok(ChoiceFunction { z_of })
    }

    pub fn z(&self, x: usize) -> usize {
        self.z_of[&x]
    }
}

/// The ζ-construction: `ζ : Im(α) → Dom(α)`, `x ↦ z_x`. Satisfies
/// `αζα = α`; lands in the orientation-preserving partial permutations, and
/// in the order-preserving ones when `α` is order-preserving.
pub fn zeta_inverse(alpha: &PartialMap, ideal: &IdealSet) -> Result<PartialMap, RegError> {
    if !is_orientation_preserving(alpha) {
        return Err(RegError::NotOrientationPreserving);
    }
    if !is_ideal(alpha, ideal) {
        return Err(RegError::NotAnIdeal);
    }
    let choice = ChoiceFunction::canonical(alpha, ideal);
    let pairs: Vec<(usize, usize)> =
        alpha.image().into_iter().map(|x| (x, choice.z(x))).collect();
    PartialMap::from_pairs(alpha.chain(), &pairs).map_err(RegError::from)
}

/// Where a regularity criterion failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapDescriptor {
    pub index: usize,
    pub left_attained: bool,
    pub right_attained: bool,
}

/// Criterion report: `condition1` collects the boundedness→extremum
/// conditions, `condition2` the per-gap attainment condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegCriterionReport {
    pub condition1: bool,
    pub condition2: bool,
    pub failing_gap: Option<GapDescriptor>,
    pub verdict: bool,
}

/// The image facts the criteria consume, shared between the finite and
/// symbolic representations.
#[derive(Debug, Clone)]
pub struct ImageFacts {
    sig: Signature,
    gaps: Vec<(bool, bool)>,
}

impl ImageFacts {
    /// Nonempty subsets of a finite chain attain their bounds everywhere.
    pub fn from_finite_image(image: &[usize]) -> Result<ImageFacts, RegError> {
        if image.is_empty() {
            return Err(RegError::EmptyImage);
        }
        Ok(ImageFacts {
            sig: Signature::finite(),
            gaps: vec![(true, true); image.len().saturating_sub(1)],
        })
    }

    pub fn from_union(u: &IntervalUnion) -> Result<ImageFacts, RegError> {
        let sig = u.signature().map_err(|_| RegError::EmptyImage)?;
        let gaps = u.gaps().map_err(|_| RegError::EmptyImage)?;
        Ok(ImageFacts { sig, gaps })
    }

    fn first_failing_gap(&self) -> Option<GapDescriptor> {
        self.gaps
            .iter()
            .enumerate()
            .find(|(_, (l, r))| !l && !r)
            .map(|(index, &(left_attained, right_attained))| GapDescriptor {
                index,
                left_attained,
                right_attained,
            })
    }
}

/// Regularity criterion for order-preserving full maps: if the image is
/// bounded above its max must exist, if bounded below its min must exist,
/// and every gap must attain a side.
pub fn reg_o_criterion(facts: &ImageFacts) -> RegCriterionReport {
    let s = facts.sig;
    let condition1 =
        (!s.bounded_above || s.has_max) && (!s.bounded_below || s.has_min);
    let failing_gap = facts.first_failing_gap();
    let condition2 = failing_gap.is_none();
    RegCriterionReport { condition1, condition2, failing_gap, verdict: condition1 && condition2 }
}

/// Regularity criterion for orientation-preserving full maps: a bound on
/// either side forces a max or a min to exist, and every gap must attain a
/// side.
pub fn reg_op_criterion(facts: &ImageFacts) -> RegCriterionReport {
    let s = facts.sig;
    let condition1 =
        !(s.bounded_above || s.bounded_below) || s.has_max || s.has_min;
    let failing_gap = facts.first_failing_gap();
    let condition2 = failing_gap.is_none();
    RegCriterionReport { condition1, condition2, failing_gap, verdict: condition1 && condition2 }
}

/// `true` iff `αβα = α`.
pub fn verify_inner_inverse(alpha: &PartialMap, beta: &PartialMap) -> Result<bool, RegError> {
    Ok(compose(&compose(alpha, beta)?, alpha)? == *alpha)
}

/// The β-construction on a finite chain, for an explicit choice function.
///
/// Clause by clause: image points go to their chosen preimage; points outside
/// the image that bound it go to `z` at the max of the image if it exists,
/// else at the min; interior non-image points go to `z` at the nearest image
/// value below if that set has a maximum, else the nearest above.
pub fn build_op_inverse_with(
    alpha: &PartialMap,
    ideal: &IdealSet,
    choice: &ChoiceFunction,
) -> Result<PartialMap, RegError> {
    if !alpha.is_full() {
        return Err(RegError::NotFull);
    }
    if !is_orientation_preserving(alpha) {
        return Err(RegError::NotOrientationPreserving);
    }
    if !is_ideal(alpha, ideal) {
        return Err(RegError::NotAnIdeal);
    }
    let image = alpha.image();
    let min_im = *image.first().unwrap();
    let max_im = *image.last().unwrap();
    let n = alpha.chain().size();
    let mut values = Vec::with_capacity(n);
    for x in 1..=n {
        let z_target = if image.binary_search(&x).is_ok() {
            x
        } else if x > max_im || x < min_im {
            // On a finite chain the max always exists.
            max_im
        } else {
            *image.iter().rev().find(|&&t| t < x).expect("interior point has image below")
        };
        values.push(choice.z(z_target));
    }
    PartialMap::full(alpha.chain(), &values).map_err(RegError::from)
}

/// The β-construction with the canonical (smallest, ideal-preferring)
/// choice function.
pub fn build_op_inverse(alpha: &PartialMap, ideal: &IdealSet) -> Result<PartialMap, RegError> {
    if !alpha.is_full() {
        return Err(RegError::NotFull);
    }
    if !is_orientation_preserving(alpha) {
        return Err(RegError::NotOrientationPreserving);
    }
    if !is_ideal(alpha, ideal) {
        return Err(RegError::NotAnIdeal);
    }
    let choice = ChoiceFunction::canonical(alpha, ideal);
    build_op_inverse_with(alpha, ideal, &choice)
}

/// Result of the symbolic β-construction.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolicInverse {
    pub beta: PiecewiseMoebiusMap,
    /// Whether `αβα = α` was confirmed by exact piecewise comparison.
    pub verified: bool,
    /// Whether `βαβ = β` happens to hold as well (reported, not required).
    pub mutual: bool,
}

/// The β-construction for a full piecewise-Möbius map on ℚ.
///
/// The image region inverts piece by piece (leftmost qualifying piece wins,
/// pieces inside the ideal first); each bounding region outside the image is
/// constant at `z` of the image max if it exists, else of the image min;
/// each interior gap is constant at `z` of the nearest attained image
/// endpoint. Fails with `CriterionFails` when the image violates the
/// regularity criterion, in which case no inner inverse exists at all.
pub fn build_op_inverse_symbolic(
    alpha: &PiecewiseMoebiusMap,
    ideal: Option<&IntervalUnion>,
) -> Result<SymbolicInverse, RegError> {
    if !alpha.is_full() {
        return Err(RegError::NotFull);
    }
    let found_ideal =
        is_orientation_preserving_symbolic(alpha).ok_or(RegError::NotOrientationPreserving)?;
    let ideal = match ideal {
        Some(y) => y.clone(),
        None => found_ideal,
    };
    // The ideal is a union of leading pieces; count them.
    let mut ideal_pieces = 0;
    let mut covered = IntervalUnion::empty();
    for (itv, _) in alpha.pieces() {
        if covered == ideal {
            break;
        }
        covered = covered.union(&IntervalUnion::from_interval(itv.clone()));
        ideal_pieces += 1;
    }
    if covered != ideal {
        return Err(RegError::NotAnIdeal);
    }

    let image = image_of(alpha);
    let facts = ImageFacts::from_union(&image)?;
    let report = reg_op_criterion(&facts);
    if !report.verdict {
        return Err(RegError::CriterionFails);
    }

    let claims = ImageClaims::build(alpha, ideal_pieces);
    let z = |x: &Rat| -> Result<Rat, RegError> {
        claims.preimage(alpha, x).ok_or_else(|| {
            RegError::UnsupportedShape(format!("no preimage claim covers {x}"))
        })
    };

    let mut pieces: Vec<(QInterval, PieceFun)> = Vec::new();
    // Image region: inverse of the claiming piece on each claimed part.
    for (region, idx) in claims.claims() {
        let (dom_itv, fun) = &alpha.pieces()[*idx];
        for part in region.parts() {
            match fun {
                PieceFun::Moebius(m) => {
                    pieces.push((part.clone(), PieceFun::Moebius(m.inverse())));
                }
                PieceFun::Const(_) => {
                    pieces.push((part.clone(), PieceFun::Const(dom_itv.sample())));
                }
            }
        }
    }
    // Bounding regions outside the image.
    let sig = facts.sig;
    if sig.bounded_below || sig.bounded_above {
        let anchor = if sig.has_max {
            image.parts().last().unwrap().hi().as_rat().unwrap().clone()
        } else {
            image.parts().first().unwrap().lo().as_rat().unwrap().clone()
        };
        let z_anchor = z(&anchor)?;
        let first = image.parts().first().unwrap();
        let last = image.parts().last().unwrap();
        if let ExtRat::Finite(lo) = first.lo() {
            let region = QInterval::new(
                ExtRat::NegInf,
                false,
                ExtRat::Finite(lo.clone()),
                !first.lo_closed(),
            )
            .map_err(SymbolicError::from)?;
            pieces.push((region, PieceFun::Const(z_anchor.clone())));
        }
        if let ExtRat::Finite(hi) = last.hi() {
            let region = QInterval::new(
                ExtRat::Finite(hi.clone()),
                !last.hi_closed(),
                ExtRat::PosInf,
                false,
            )
            .map_err(SymbolicError::from)?;
            pieces.push((region, PieceFun::Const(z_anchor)));
        }
    }
    // Interior gaps: constant at z of the attained side.
    for (k, w) in image.parts().windows(2).enumerate() {
        let (left, right) = (&w[0], &w[1]);
        let gap = QInterval::new(
            left.hi().clone(),
            !left.hi_closed(),
            right.lo().clone(),
            !right.lo_closed(),
        )
        .map_err(SymbolicError::from)?;
        let anchor = if left.hi_closed() {
            left.hi().as_rat().unwrap().clone()
        } else {
            debug_assert!(right.lo_closed(), "criterion guarantees an attained side");
            let _ = k;
            right.lo().as_rat().unwrap().clone()
        };
        pieces.push((gap, PieceFun::Const(z(&anchor)?)));
    }

    let beta = PiecewiseMoebiusMap::new(pieces)?;
    let aba = crate::symbolic::compose_symbolic(
        &crate::symbolic::compose_symbolic(alpha, &beta)?,
        alpha,
    )?;
    let verified = maps_equal(&aba, alpha);
    let bab = crate::symbolic::compose_symbolic(
        &crate::symbolic::compose_symbolic(&beta, alpha)?,
        &beta,
    )?;
    let mutual = maps_equal(&bab, &beta);
    Ok(SymbolicInverse { beta, verified, mutual })
}

/// Regularity report for a finite map (always regular) or the facts-based
/// criteria; convenience wrappers used by the CLI.
pub fn reg_o_for_finite_map(alpha: &PartialMap) -> Result<RegCriterionReport, RegError> {
    Ok(reg_o_criterion(&ImageFacts::from_finite_image(&alpha.image())?))
}

pub fn reg_op_for_finite_map(alpha: &PartialMap) -> Result<RegCriterionReport, RegError> {
    Ok(reg_op_criterion(&ImageFacts::from_finite_image(&alpha.image())?))
}
