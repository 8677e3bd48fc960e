//! Exact piecewise-Möbius transformations of the rational chain ℚ.
//!
//! A map is a finite list of (interval, piece) entries where each piece is a
//! strictly increasing Möbius map `x ↦ (ax+b)/(cx+d)` with rational
//! coefficients, or a rational constant. Decreasing pieces are rejected at
//! construction: inside an orientation-preserving map every maximal
//! monotone block is order-preserving, so nothing expressible is lost.
//!
//! Möbius maps with rational coefficients send rationals (and the point at
//! infinity) to rationals or infinity, so images, compositions and boundary
//! limits all stay exact.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{rat_int, ChainError, ExtRat, IntervalUnion, QInterval, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("malformed map: {0}")]
    MalformedMap(String),
    #[error("bad interval: {0}")]
    BadInterval(String),
    #[error("operation supports bounded intervals only")]
    UnboundedUnsupported,
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// `x ↦ (ax+b)/(cx+d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusMap {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

impl MoebiusMap {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Result<Self, SymbolicError> {
        let m = MoebiusMap { a, b, c, d };
        if m.det().is_zero() {
            return Err(SymbolicError::MalformedMap("zero determinant".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MoebiusMap { a: rat_int(1), b: rat_int(0), c: rat_int(0), d: rat_int(1) }
    }

    /// Affine `x ↦ slope·x + offset`.
    pub fn affine(slope: Rat, offset: Rat) -> Result<Self, SymbolicError> {
        MoebiusMap::new(slope, offset, rat_int(0), rat_int(1))
    }

    pub fn coefficients(&self) -> [&Rat; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    /// The pole `−d/c`, if any.
    pub fn pole(&self) -> Option<Rat> {
        if self.c.is_zero() {
            None
        } else {
            Some(-&self.d / &self.c)
        }
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let den = &self.c * x + &self.d;
        if den.is_zero() {
            None
        } else {
            Some((&self.a * x + &self.b) / den)
        }
    }

    /// The inverse map (adjugate matrix); same determinant sign.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Matrix product realizing "apply `self`, then `other`".
    pub fn then(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: &other.a * &self.a + &other.b * &self.c,
            b: &other.a * &self.b + &other.b * &self.d,
            c: &other.c * &self.a + &other.d * &self.c,
            d: &other.c * &self.b + &other.d * &self.d,
        }
    }

    /// Coefficient vectors proportional, i.e. equal as maps.
    pub fn same_map(&self, other: &MoebiusMap) -> bool {
        let u = [&self.a, &self.b, &self.c, &self.d];
        let v = [&other.a, &other.b, &other.c, &other.d];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if u[i] * v[j] != u[j] * v[i] {
                    return false;
                }
            }
        }
        true
    }

    /// One-sided limit of an increasing piece at the lower end of `itv`.
    fn lo_value(&self, itv: &QInterval) -> ExtRat {
        match itv.lo() {
            ExtRat::NegInf => {
                if self.c.is_zero() {
                    ExtRat::NegInf
                } else {
                    ExtRat::Finite(&self.a / &self.c)
                }
            }
            ExtRat::Finite(q) => match self.eval(q) {
                Some(v) => ExtRat::Finite(v),
                // Pole at an open lower endpoint: increasing from −∞.
                None => ExtRat::NegInf,
            },
            ExtRat::PosInf => unreachable!("interval lower endpoint"),
        }
    }

    fn hi_value(&self, itv: &QInterval) -> ExtRat {
        match itv.hi() {
            ExtRat::PosInf => {
                if self.c.is_zero() {
                    ExtRat::PosInf
                } else {
                    ExtRat::Finite(&self.a / &self.c)
                }
            }
            ExtRat::Finite(q) => match self.eval(q) {
                Some(v) => ExtRat::Finite(v),
                None => ExtRat::PosInf,
            },
            ExtRat::NegInf => unreachable!("interval upper endpoint"),
        }
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}x+{})/({}x+{})", self.a, self.b, self.c, self.d)
    }
}

/// One piece of a piecewise map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceFun {
    Moebius(MoebiusMap),
    Const(Rat),
}

impl PieceFun {
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        match self {
            PieceFun::Moebius(m) => m.eval(x),
            PieceFun::Const(v) => Some(v.clone()),
        }
    }

    /// Same function on an infinite set.
    pub fn same_fun(&self, other: &PieceFun) -> bool {
        match (self, other) {
            (PieceFun::Moebius(m), PieceFun::Moebius(n)) => m.same_map(n),
            (PieceFun::Const(v), PieceFun::Const(w)) => v == w,
            _ => false,
        }
    }

    /// Exact image of the piece on `itv`.
    pub fn image_on(&self, itv: &QInterval) -> QInterval {
        match self {
            PieceFun::Const(v) => QInterval::singleton(v.clone()),
            PieceFun::Moebius(m) => {
                if itv.is_singleton() {
                    let q = itv.lo().as_rat().unwrap();
                    return QInterval::singleton(m.eval(q).expect("pole outside piece"));
                }
                QInterval::new(m.lo_value(itv), itv.lo_closed(), m.hi_value(itv), itv.hi_closed())
                    .expect("monotone image is a valid interval")
            }
        }
    }
}

impl fmt::Display for PieceFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceFun::Moebius(m) => write!(f, "{}", m),
            PieceFun::Const(v) => write!(f, "const {}", v),
        }
    }
}

/// A partial transformation of ℚ given by finitely many pieces with pairwise
/// disjoint interval domains, each strictly increasing Möbius or constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseMoebiusMap {
    pieces: Vec<(QInterval, PieceFun)>,
}

impl fmt::Display for PiecewiseMoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (itv, fun)) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} -> {}", itv, fun)?;
        }
        write!(f, "}}")
    }
}

impl PiecewiseMoebiusMap {
    pub fn new(pieces: Vec<(QInterval, PieceFun)>) -> Result<Self, SymbolicError> {
        let mut pieces = pieces;
        pieces.sort_by(|(i, _), (j, _)| {
            (i.lo(), !i.lo_closed()).cmp(&(j.lo(), !j.lo_closed()))
        });
        for (itv, fun) in &pieces {
            if let PieceFun::Moebius(m) = fun {
                if !m.det().is_positive() {
                    return Err(SymbolicError::MalformedMap(format!(
                        "piece {m} on {itv} is not strictly increasing"
                    )));
                }
                if let Some(p) = m.pole() {
                    if itv.contains(&p) {
                        return Err(SymbolicError::MalformedMap(format!(
                            "pole of {m} lies inside {itv}"
                        )));
                    }
                }
            }
        }
        for w in pieces.windows(2) {
            if w[0].0.intersect(&w[1].0).is_some() {
                return Err(SymbolicError::MalformedMap(format!(
                    "piece domains {} and {} overlap",
                    w[0].0, w[1].0
                )));
            }
        }
        // Canonical form: merge adjacent pieces carrying the same function.
        let mut merged: Vec<(QInterval, PieceFun)> = Vec::with_capacity(pieces.len());
        for (itv, fun) in pieces {
            match merged.last_mut() {
                Some((last_itv, last_fun))
                    if last_fun.same_fun(&fun)
                        && IntervalUnion::normalize(vec![last_itv.clone(), itv.clone()])
                            .parts()
                            .len()
                            == 1 =>
                {
                    *last_itv = IntervalUnion::normalize(vec![last_itv.clone(), itv])
                        .parts()[0]
                        .clone();
                }
                _ => merged.push((itv, fun)),
            }
        }
        Ok(PiecewiseMoebiusMap { pieces: merged })
    }

    /// The identity on ℚ.
    pub fn identity() -> Self {
        PiecewiseMoebiusMap {
            pieces: vec![(QInterval::all(), PieceFun::Moebius(MoebiusMap::identity()))],
        }
    }

    pub fn empty() -> Self {
        PiecewiseMoebiusMap { pieces: Vec::new() }
    }

    pub fn pieces(&self) -> &[(QInterval, PieceFun)] {
        &self.pieces
    }

    pub fn domain(&self) -> IntervalUnion {
        IntervalUnion::normalize(self.pieces.iter().map(|(i, _)| i.clone()).collect())
    }

    pub fn is_full(&self) -> bool {
        self.domain() == IntervalUnion::all()
    }

    pub fn piece_containing(&self, x: &Rat) -> Option<usize> {
        self.pieces.iter().position(|(i, _)| i.contains(x))
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let k = self.piece_containing(x)?;
        self.pieces[k].1.eval(x)
    }
}

/// Exact image: per-piece monotone images, normalized.
pub fn image_of(alpha: &PiecewiseMoebiusMap) -> IntervalUnion {
    IntervalUnion::normalize(
        alpha.pieces().iter().map(|(itv, fun)| fun.image_on(itv)).collect(),
    )
}

// Value bounds of a piece: (inf, sup) as extended rationals. Whether they are
// attained never matters for the boundary comparisons below.
fn piece_bounds(itv: &QInterval, fun: &PieceFun) -> (ExtRat, ExtRat) {
    let img = fun.image_on(itv);
    (img.lo().clone(), img.hi().clone())
}

/// Decide orientation-preservation symbolically and return an ideal.
///
/// Pieces are increasing or constant, so the map is order-preserving on a
/// block of consecutive pieces iff each one's sup is at most the next one's
/// inf. An ideal boundary can never fall strictly inside a strictly
/// increasing piece (the ideal's values must dominate the complement's, while
/// values inside one increasing piece grow left to right), and whenever a cut
/// inside a constant piece works the cut at the piece boundary works too, so
/// only piece-boundary cuts need scanning. Order-preserving maps get the
/// whole domain as their ideal.
pub fn is_orientation_preserving_symbolic(
    alpha: &PiecewiseMoebiusMap,
) -> Option<IntervalUnion> {
    let pieces = alpha.pieces();
    let n = pieces.len();
    if n == 0 {
        return Some(IntervalUnion::empty());
    }
    let bounds: Vec<(ExtRat, ExtRat)> =
        pieces.iter().map(|(i, f)| piece_bounds(i, f)).collect();
    let step_ok: Vec<bool> =
        (0..n - 1).map(|k| bounds[k].1 <= bounds[k + 1].0).collect();
    let chain_ok = |lo: usize, hi: usize| (lo..hi).all(|k| step_ok[k]);
    if chain_ok(0, n - 1) {
        return Some(alpha.domain());
    }
    for k in 1..n {
        if !chain_ok(0, k - 1) || !chain_ok(k, n - 1) {
            continue;
        }
        let inf_ideal = &bounds[0].0;
        let sup_filter = &bounds[n - 1].1;
        if inf_ideal >= sup_filter {
            let ideal = IntervalUnion::normalize(
                pieces[..k].iter().map(|(i, _)| i.clone()).collect(),
            );
            return Some(ideal);
        }
    }
    None
}

/// Split an interval at every cut point inside it, producing alternating
/// open chunks and singleton chunks so that each chunk maps into a single
/// piece of any map whose finite domain boundaries are among the cuts.
fn chunk_at(itv: &QInterval, cuts: &[Rat]) -> Vec<QInterval> {
    let mut inside: Vec<&Rat> = cuts.iter().filter(|q| itv.contains(q)).collect();
    inside.sort();
    inside.dedup();
    let mut out = Vec::new();
    let mut lo = itv.lo().clone();
    let mut lo_closed = itv.lo_closed();
    for q in inside {
        if let Ok(left) =
            QInterval::new(lo.clone(), lo_closed, ExtRat::Finite(q.clone()), false)
        {
            out.push(left);
        }
        out.push(QInterval::singleton(q.clone()));
        lo = ExtRat::Finite(q.clone());
        lo_closed = false;
    }
    if let Ok(last) = QInterval::new(lo, lo_closed, itv.hi().clone(), itv.hi_closed()) {
        out.push(last);
    }
    out
}

fn finite_boundaries(map: &PiecewiseMoebiusMap) -> Vec<Rat> {
    let mut out = Vec::new();
    for (itv, _) in map.pieces() {
        if let ExtRat::Finite(q) = itv.lo() {
            out.push(q.clone());
        }
        if let ExtRat::Finite(q) = itv.hi() {
            out.push(q.clone());
        }
    }
    out
}

/// Left-to-right composition `αβ` (apply `α`, then `β`) by exact piece
/// refinement. Preimages of rational boundaries under rational Möbius maps
/// are rational, so the refinement stays exact.
pub fn compose_symbolic(
    alpha: &PiecewiseMoebiusMap,
    beta: &PiecewiseMoebiusMap,
) -> Result<PiecewiseMoebiusMap, SymbolicError> {
    let boundaries = finite_boundaries(beta);
    let mut pieces: Vec<(QInterval, PieceFun)> = Vec::new();
    for (itv, fun) in alpha.pieces() {
        match fun {
            PieceFun::Const(v) => {
                if let Some(k) = beta.piece_containing(v) {
                    let w = beta.pieces()[k].1.eval(v).expect("value inside piece domain");
                    pieces.push((itv.clone(), PieceFun::Const(w)));
                }
            }
            PieceFun::Moebius(m) => {
                let inv = m.inverse();
                let cuts: Vec<Rat> =
                    boundaries.iter().filter_map(|r| inv.eval(r)).collect();
                for chunk in chunk_at(itv, &cuts) {
                    let sample = chunk.sample();
                    let v = m.eval(&sample).expect("pole outside piece");
                    let Some(k) = beta.piece_containing(&v) else { continue };
                    let composed = match &beta.pieces()[k].1 {
                        PieceFun::Moebius(g) => PieceFun::Moebius(m.then(g)),
                        PieceFun::Const(w) => PieceFun::Const(w.clone()),
                    };
                    pieces.push((chunk, composed));
                }
            }
        }
    }
    PiecewiseMoebiusMap::new(pieces)
}

/// Equality as functions on ℚ: same domain, and on a common refinement every
/// chunk carries the same function (compared structurally; singleton chunks
/// pointwise).
pub fn maps_equal(alpha: &PiecewiseMoebiusMap, beta: &PiecewiseMoebiusMap) -> bool {
    if alpha.domain() != beta.domain() {
        return false;
    }
    let mut boundaries = finite_boundaries(alpha);
    boundaries.extend(finite_boundaries(beta));
    for (itv, fun) in alpha.pieces() {
        for chunk in chunk_at(itv, &boundaries) {
            let sample = chunk.sample();
            let Some(k) = beta.piece_containing(&sample) else { return false };
            let other = &beta.pieces()[k].1;
            if chunk.is_singleton() {
                if fun.eval(&sample) != other.eval(&sample) {
                    return false;
                }
            } else if !fun.same_fun(other) {
                return false;
            }
        }
    }
    true
}

// --- order-isomorphism and orientation-bijection analysis on intervals ---

/// Order type of a piece of a rational interval left after at most one cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PartShape {
    Empty,
    Singleton,
    Dense { has_min: bool, has_max: bool },
}

fn interval_shape(i: &QInterval) -> Result<PartShape, SymbolicError> {
    if !i.is_bounded() {
        return Err(SymbolicError::UnboundedUnsupported);
    }
    if i.is_singleton() {
        return Ok(PartShape::Singleton);
    }
    Ok(PartShape::Dense { has_min: i.lo_closed(), has_max: i.hi_closed() })
}

/// How one split cuts an interval into an order ideal and the complementary
/// order filter, described by the shapes of the two parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SplitSignature {
    pub ideal: PartShape,
    pub filter: PartShape,
}

/// All splits of a bounded interval: the two trivial splits, cuts at a
/// closed endpoint, cuts at an interior rational assigned to either side,
/// and cuts at a gap (an irrational of ℝ∖ℚ).
pub fn split_signatures(i: &QInterval) -> Result<Vec<SplitSignature>, SymbolicError> {
    let whole = interval_shape(i)?;
    let split = |ideal, filter| SplitSignature { ideal, filter };
    let mut out = vec![split(PartShape::Empty, whole), split(whole, PartShape::Empty)];
    if let PartShape::Dense { has_min, has_max } = whole {
        let dense = |mn, mx| PartShape::Dense { has_min: mn, has_max: mx };
        // Cut at an interior rational kept on the low side / high side.
        out.push(split(dense(has_min, true), dense(false, has_max)));
        out.push(split(dense(has_min, false), dense(true, has_max)));
        // Cut at a gap: neither side attains the cut.
        out.push(split(dense(has_min, false), dense(false, has_max)));
        // Cuts splitting off a closed endpoint as a singleton.
        if has_min {
            out.push(split(PartShape::Singleton, dense(false, has_max)));
        }
        if has_max {
            out.push(split(dense(has_min, false), PartShape::Singleton));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Order-isomorphism of bounded nonempty rational intervals: two singletons,
/// or two infinite intervals with the same endpoint-attainment signature.
/// Min/max existence is an order invariant, which settles the negative
/// direction; for the positive direction an affine witness maps matching
/// closed endpoints onto each other, and any two countable dense chains with
/// the same signature are isomorphic by back-and-forth.
pub fn q_interval_signature_iso(a: &QInterval, b: &QInterval) -> Result<bool, SymbolicError> {
    Ok(interval_shape(a)? == interval_shape(b)?)
}

/// Whether an orientation-preserving bijection `I → J` exists between two
/// bounded rational intervals.
///
/// Such a bijection with ideal `Y ⊆ I` maps `Y` order-isomorphically onto an
/// order filter of `J` and the complementary filter of `I` onto the
/// complementary ideal of `J`. Enumerating the split shapes of both sides
/// (including trivial, rational and gap cuts) therefore decides existence.
pub fn orientation_bijection_exists(i: &QInterval, j: &QInterval) -> Result<bool, SymbolicError> {
    let splits_i = split_signatures(i)?;
    let splits_j = split_signatures(j)?;
    for si in &splits_i {
        for sj in &splits_j {
            if si.filter == sj.ideal && si.ideal == sj.filter {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Report for the D-versus-J separation witness built from two partial
/// identities.
#[derive(Debug, Clone, Serialize)]
pub struct DjWitnessReport {
    pub alpha: PiecewiseMoebiusMap,
    pub beta: PiecewiseMoebiusMap,
    pub d_holds: bool,
    pub j_holds: bool,
    pub theta: PiecewiseMoebiusMap,
    pub tau: PiecewiseMoebiusMap,
    pub theta_image: String,
    pub tau_image: String,
}

/// Build the partial identities `α = id` on `(a,b)` and `β = id` on `[c,d]`,
/// decide D by split-signature analysis, and certify J with explicit affine
/// order-preserving injections verified exactly.
pub fn dj_gap_witness(
    a: &Rat,
    b: &Rat,
    c: &Rat,
    d: &Rat,
) -> Result<DjWitnessReport, SymbolicError> {
    if a >= b || c >= d {
        return Err(SymbolicError::BadInterval(format!(
            "need a < b and c < d, got a={a}, b={b}, c={c}, d={d}"
        )));
    }
    let i = QInterval::bounded(a.clone(), false, b.clone(), false)
        .map_err(SymbolicError::from)?;
    let j = QInterval::bounded(c.clone(), true, d.clone(), true)
        .map_err(SymbolicError::from)?;
    let alpha = PiecewiseMoebiusMap::new(vec![(
        i.clone(),
        PieceFun::Moebius(MoebiusMap::identity()),
    )])?;
    let beta = PiecewiseMoebiusMap::new(vec![(
        j.clone(),
        PieceFun::Moebius(MoebiusMap::identity()),
    )])?;
    let d_holds = orientation_bijection_exists(&i, &j)?;

    let three = rat_int(3);
    // θ : (a,b) → [c,d],  x ↦ ((d−c)x + 2bc − 2ad + bd − ac) / (3(b−a))
    let theta_fun = MoebiusMap::new(
        d - c,
        rat_int(2) * b * c - rat_int(2) * a * d + b * d - a * c,
        rat_int(0),
        &three * (b - a),
    )?;
    // τ : [c,d] → (a,b),  x ↦ ((b−a)x + 2ad − 2bc + bd − ac) / (3(d−c))
    let tau_fun = MoebiusMap::new(
        b - a,
        rat_int(2) * a * d - rat_int(2) * b * c + b * d - a * c,
        rat_int(0),
        &three * (d - c),
    )?;
    let theta = PiecewiseMoebiusMap::new(vec![(i.clone(), PieceFun::Moebius(theta_fun))])?;
    let tau = PiecewiseMoebiusMap::new(vec![(j.clone(), PieceFun::Moebius(tau_fun))])?;

    let theta_img = image_of(&theta);
    let tau_img = image_of(&tau);
    let j_union = IntervalUnion::from_interval(j.clone());
    let i_union = IntervalUnion::from_interval(i.clone());
    // Strictly increasing affine pieces are order-preserving injections; it
    // remains to check the ranges sit inside the targets.
    let j_holds = theta_img.subtract(&j_union).is_empty()
        && tau_img.subtract(&i_union).is_empty()
        && is_orientation_preserving_symbolic(&theta).is_some_and(|y| y == theta.domain())
        && is_orientation_preserving_symbolic(&tau).is_some_and(|y| y == tau.domain());

    Ok(DjWitnessReport {
        alpha,
        beta,
        d_holds,
        j_holds,
        theta,
        tau,
        theta_image: theta_img.to_string(),
        tau_image: tau_img.to_string(),
    })
}

// --- choice-function claims over the image, shared with the β-construction ---

/// For each piece (in preimage-choice priority order), the part of the image
/// it answers for. Priority: pieces inside the ideal first, left to right,
/// then the remaining pieces left to right, each claiming whatever earlier
/// pieces have not.
pub struct ImageClaims {
    claims: Vec<(IntervalUnion, usize)>,
}

impl ImageClaims {
    pub fn build(alpha: &PiecewiseMoebiusMap, ideal_pieces: usize) -> ImageClaims {
        let mut order: Vec<usize> = (0..ideal_pieces).collect();
        order.extend(ideal_pieces..alpha.pieces().len());
        let mut claimed = IntervalUnion::empty();
        let mut claims = Vec::new();
        for idx in order {
            let (itv, fun) = &alpha.pieces()[idx];
            let img = IntervalUnion::from_interval(fun.image_on(itv));
            let take = img.subtract(&claimed);
            if !take.is_empty() {
                claimed = claimed.union(&take);
                claims.push((take, idx));
            }
        }
        ImageClaims { claims }
    }

    pub fn claims(&self) -> &[(IntervalUnion, usize)] {
        &self.claims
    }

    /// The chosen preimage `z_x` of an image point.
    pub fn preimage(&self, alpha: &PiecewiseMoebiusMap, x: &Rat) -> Option<Rat> {
        for (region, idx) in &self.claims {
            if region.contains(x) {
                return Some(match &alpha.pieces()[*idx] {
                    (_, PieceFun::Moebius(m)) => {
                        m.inverse().eval(x).expect("x in the piece image")
                    }
                    (itv, PieceFun::Const(_)) => itv.sample(),
                });
            }
        }
        None
    }
}

// --- serde: {"pieces": [{"interval": "...", "moebius": [...]}, ...]} ---

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Int(i64),
    Str(String),
}

impl RatRepr {
    fn to_rat(&self) -> Result<Rat, String> {
        match self {
            RatRepr::Int(n) => Ok(rat_int(*n)),
            RatRepr::Str(s) => {
                s.parse::<Rat>().map_err(|e| format!("bad rational {s:?}: {e}"))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    interval: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    moebius: Option<[RatRepr; 4]>,
    #[serde(rename = "const", skip_serializing_if = "Option::is_none")]
    constant: Option<RatRepr>,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseRepr {
    pieces: Vec<PieceRepr>,
}

impl Serialize for PiecewiseMoebiusMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let pieces = self
            .pieces
            .iter()
            .map(|(itv, fun)| match fun {
                PieceFun::Moebius(m) => PieceRepr {
                    interval: itv.to_string(),
                    moebius: Some([
                        RatRepr::Str(m.a.to_string()),
                        RatRepr::Str(m.b.to_string()),
                        RatRepr::Str(m.c.to_string()),
                        RatRepr::Str(m.d.to_string()),
                    ]),
                    constant: None,
                },
                PieceFun::Const(v) => PieceRepr {
                    interval: itv.to_string(),
                    moebius: None,
                    constant: Some(RatRepr::Str(v.to_string())),
                },
            })
            .collect();
        PiecewiseRepr { pieces }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PiecewiseMoebiusMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PiecewiseRepr::deserialize(de)?;
        let mut pieces = Vec::new();
        for p in repr.pieces {
            let itv: QInterval = p.interval.parse().map_err(D::Error::custom)?;
            let fun = match (p.moebius, p.constant) {
                (Some([a, b, c, d]), None) => PieceFun::Moebius(
                    MoebiusMap::new(
                        a.to_rat().map_err(D::Error::custom)?,
                        b.to_rat().map_err(D::Error::custom)?,
                        c.to_rat().map_err(D::Error::custom)?,
                        d.to_rat().map_err(D::Error::custom)?,
                    )
                    .map_err(D::Error::custom)?,
                ),
                (None, Some(v)) => PieceFun::Const(v.to_rat().map_err(D::Error::custom)?),
                _ => {
                    return Err(D::Error::custom(
                        "each piece needs exactly one of \"moebius\" or \"const\"",
                    ))
                }
            };
            pieces.push((itv, fun));
        }
        PiecewiseMoebiusMap::new(pieces).map_err(D::Error::custom)
    }
}

/// The canonical irregular example on ℚ: `x/(x+1)` on `[0,∞)` and
/// `-x/(x-1)` on `(-∞,0)`, a full order-preserving map squashing the line
/// onto `(-1,1)`. The image is bounded with neither endpoint attained, so
/// the map is regular in neither full-transformation class.
pub fn irregular_squash_map() -> PiecewiseMoebiusMap {
    let left = MoebiusMap::new(rat_int(-1), rat_int(0), rat_int(1), rat_int(-1)).unwrap();
    let right = MoebiusMap::new(rat_int(1), rat_int(0), rat_int(1), rat_int(1)).unwrap();
    PiecewiseMoebiusMap::new(vec![
        (
            QInterval::new(ExtRat::NegInf, false, ExtRat::Finite(rat_int(0)), false).unwrap(),
            PieceFun::Moebius(left),
        ),
        (
            QInterval::new(ExtRat::Finite(rat_int(0)), true, ExtRat::PosInf, false).unwrap(),
            PieceFun::Moebius(right),
        ),
    ])
    .unwrap()
}

/// Order-preserving full map with image `[-1,0)`: constant `-1` below 1 and
/// `-1/x` from 1 on. Irregular among order-preserving maps (bounded above,
/// no max) but regular among orientation-preserving ones (min attained).
pub fn bounded_mirror_map() -> PiecewiseMoebiusMap {
    let inv = MoebiusMap::new(rat_int(0), rat_int(-1), rat_int(1), rat_int(0)).unwrap();
    PiecewiseMoebiusMap::new(vec![
        (
            QInterval::new(ExtRat::NegInf, false, ExtRat::Finite(rat_int(1)), false).unwrap(),
            PieceFun::Const(rat_int(-1)),
        ),
        (
            QInterval::new(ExtRat::Finite(rat_int(1)), true, ExtRat::PosInf, false).unwrap(),
            PieceFun::Moebius(inv),
        ),
    ])
    .unwrap()
}

/// A wrapped (not order-preserving) full map with ideal `(-∞,5)` whose image
/// `[1/2,1) ∪ {3/2} ∪ [2,3)` passes the regularity criterion: both interior
/// gaps attain a side.
pub fn wrapped_regular_map() -> PiecewiseMoebiusMap {
    use crate::chain::rat;
    let p2 = MoebiusMap::new(rat_int(1), rat_int(10), rat_int(0), rat_int(5)).unwrap();
    let p3 = MoebiusMap::new(rat_int(1), rat_int(-2), rat_int(0), rat_int(6)).unwrap();
    PiecewiseMoebiusMap::new(vec![
        (
            QInterval::new(ExtRat::NegInf, false, ExtRat::Finite(rat_int(0)), false).unwrap(),
            PieceFun::Const(rat(3, 2)),
        ),
        (
            QInterval::bounded(rat_int(0), true, rat_int(5), false).unwrap(),
            PieceFun::Moebius(p2),
        ),
        (
            QInterval::bounded(rat_int(5), true, rat_int(8), false).unwrap(),
            PieceFun::Moebius(p3),
        ),
        (
            QInterval::new(ExtRat::Finite(rat_int(8)), true, ExtRat::PosInf, false).unwrap(),
            PieceFun::Const(rat(3, 2)),
        ),
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::rat;
    use std::str::FromStr;

    fn itv(s: &str) -> QInterval {
        QInterval::from_str(s).unwrap()
    }

    fn union(s: &str) -> IntervalUnion {
        IntervalUnion::from_str(s).unwrap()
    }

    #[test]
    fn squash_map_image() {
        let alpha = irregular_squash_map();
        assert!(alpha.is_full());
        assert_eq!(image_of(&alpha), union("{(-1,1)}"));
    }

    #[test]
    fn identity_image_is_whole_line() {
        assert_eq!(image_of(&PiecewiseMoebiusMap::identity()), IntervalUnion::all());
    }

    #[test]
    fn half_piece_image() {
        let m = MoebiusMap::new(rat_int(1), rat_int(0), rat_int(1), rat_int(1)).unwrap();
        let map =
            PiecewiseMoebiusMap::new(vec![(itv("[0,inf)"), PieceFun::Moebius(m))]).unwrap();
        assert_eq!(image_of(&map), union("{[0,1)}"));
    }

    #[test]
    fn decreasing_piece_rejected() {
        let m = MoebiusMap::new(rat_int(-1), rat_int(0), rat_int(0), rat_int(1)).unwrap();
        let err = PiecewiseMoebiusMap::new(vec![(itv("[0,1]"), PieceFun::Moebius(m))]);
        assert!(matches!(err, Err(SymbolicError::MalformedMap(_))));
    }

    #[test]
    fn pole_inside_rejected_but_open_endpoint_ok() {
        let m = MoebiusMap::new(rat_int(0), rat_int(1), rat_int(-1), rat_int(1)).unwrap();
        // 1/(1-x) has pole at 1.
        assert!(PiecewiseMoebiusMap::new(vec![(itv("[0,2]"), PieceFun::Moebius(m.clone()))])
            .is_err());
        let ok = PiecewiseMoebiusMap::new(vec![(itv("[0,1)"), PieceFun::Moebius(m))]).unwrap();
        // Increasing to +∞ as x → 1⁻.
        assert_eq!(image_of(&ok), union("{[1,inf)}"));
    }

    #[test]
    fn squash_map_is_order_preserving() {
        let alpha = irregular_squash_map();
        let ideal = is_orientation_preserving_symbolic(&alpha).unwrap();
        assert_eq!(ideal, IntervalUnion::all());
    }

    #[test]
    fn wrapped_map_has_proper_ideal() {
        // (x-2)/(x-1) on (-∞,0) with values (1,2); x/(x+1) on [0,∞) with
        // values [0,1): orientation-preserving with ideal (-∞,0).
        let left = MoebiusMap::new(rat_int(1), rat_int(-2), rat_int(1), rat_int(-1)).unwrap();
        let right = MoebiusMap::new(rat_int(1), rat_int(0), rat_int(1), rat_int(1)).unwrap();
        let alpha = PiecewiseMoebiusMap::new(vec![
            (itv("(-inf,0)"), PieceFun::Moebius(left)),
            (itv("[0,inf)"), PieceFun::Moebius(right)),
        ])
        .unwrap();
        let ideal = is_orientation_preserving_symbolic(&alpha).unwrap();
        assert_eq!(ideal, union("{(-inf,0)}"));
        assert_eq!(image_of(&alpha), union("{[0,1), (1,2)}"));
    }

    #[test]
    fn reversed_two_pieces_not_op() {
        // x on (-∞,0), x-10 on [0,∞): values (-∞,0) then [-10,∞) overlap.
        let alpha = PiecewiseMoebiusMap::new(vec![
            (itv("(-inf,0)"), PieceFun::Moebius(MoebiusMap::identity())),
            (
                itv("[0,inf)"),
                PieceFun::Moebius(MoebiusMap::affine(rat_int(1), rat_int(-10)).unwrap()),
            ),
        ])
        .unwrap();
        assert_eq!(is_orientation_preserving_symbolic(&alpha), None);
    }

    #[test]
    fn compose_identity() {
        let alpha = irregular_squash_map();
        let id = PiecewiseMoebiusMap::identity();
        assert!(maps_equal(&compose_symbolic(&alpha, &id).unwrap(), &alpha));
        assert!(maps_equal(&compose_symbolic(&id, &alpha).unwrap(), &alpha));
        assert!(maps_equal(&compose_symbolic(&id, &id).unwrap(), &id));
    }

    #[test]
    fn compose_probe_oracle() {
        let alpha = irregular_squash_map();
        let square = compose_symbolic(&alpha, &alpha).unwrap();
        assert!(square.is_full());
        for k in 0..25i64 {
            let x = rat(7 * k - 80, 9);
            let direct = alpha.eval(&alpha.eval(&x).unwrap()).unwrap();
            assert_eq!(square.eval(&x).unwrap(), direct, "probe {x}");
        }
        // Composition of orientation-preserving maps stays in the class.
        assert!(is_orientation_preserving_symbolic(&square).is_some());
    }

    #[test]
    fn maps_equal_examples() {
        let alpha = irregular_squash_map();
        assert!(maps_equal(&alpha, &alpha));
        let x = PiecewiseMoebiusMap::identity();
        let scaled = PiecewiseMoebiusMap::new(vec![(
            QInterval::all(),
            PieceFun::Moebius(
                MoebiusMap::new(rat_int(2), rat_int(0), rat_int(0), rat_int(2)).unwrap(),
            ),
        )])
        .unwrap();
        assert!(maps_equal(&x, &scaled));
        let shifted = PiecewiseMoebiusMap::new(vec![(
            QInterval::all(),
            PieceFun::Moebius(MoebiusMap::affine(rat_int(1), rat_int(1)).unwrap()),
        )])
        .unwrap();
        assert!(!maps_equal(&x, &shifted));
    }

    #[test]
    fn signature_iso_examples() {
        assert!(q_interval_signature_iso(&itv("(0,1)"), &itv("(2,5)")).unwrap());
        assert!(!q_interval_signature_iso(&itv("(0,1)"), &itv("[0,1]")).unwrap());
        assert!(q_interval_signature_iso(&itv("[0,1)"), &itv("[2,5)")).unwrap());
        assert!(!q_interval_signature_iso(&itv("[0,0]"), &itv("[0,1]")).unwrap());
        assert!(q_interval_signature_iso(&itv("[3,3]"), &itv("[7,7]")).unwrap());
        assert!(matches!(
            q_interval_signature_iso(&itv("(-inf,0)"), &itv("[0,1]")),
            Err(SymbolicError::UnboundedUnsupported)
        ));
    }

    #[test]
    fn orientation_bijection_examples() {
        // Open into closed: impossible.
        assert!(!orientation_bijection_exists(&itv("(0,1)"), &itv("[2,5]")).unwrap());
        // Identity.
        assert!(orientation_bijection_exists(&itv("[2,5]"), &itv("[2,5]")).unwrap());
        // Half-open pair with opposite closed ends: a wrap does it.
        assert!(orientation_bijection_exists(&itv("(0,1]"), &itv("[2,3)")).unwrap());
        // Symmetric positive case both ways.
        assert!(orientation_bijection_exists(&itv("[2,3)"), &itv("(0,1]")).unwrap());
    }

    #[test]
    fn orientation_wrap_witness_verified() {
        // Explicit witness for (0,1] → [2,3): x+3/2 on [1/2,1], x+5/2 on
        // (0,1/2). Bijective, ideal (0,1/2), image exactly [2,3).
        let theta = PiecewiseMoebiusMap::new(vec![
            (
                itv("(0,1/2)"),
                PieceFun::Moebius(MoebiusMap::affine(rat_int(1), rat(5, 2)).unwrap()),
            ),
            (
                itv("[1/2,1]"),
                PieceFun::Moebius(MoebiusMap::affine(rat_int(1), rat(3, 2)).unwrap()),
            ),
        ])
        .unwrap();
        assert_eq!(image_of(&theta), union("{[2,3)}"));
        let ideal = is_orientation_preserving_symbolic(&theta).unwrap();
        assert_eq!(ideal, union("{(0,1/2)}"));
        for k in 1..20i64 {
            let x = rat(k, 20);
            let y = theta.eval(&x).unwrap();
            assert!(itv("[2,3)").contains(&y), "θ({x}) = {y} outside [2,3)");
        }
    }

    #[test]
    fn dj_witness_unit_case() {
        let r = dj_gap_witness(&rat_int(0), &rat_int(1), &rat_int(0), &rat_int(1)).unwrap();
        assert!(!r.d_holds);
        assert!(r.j_holds);
        assert_eq!(r.theta_image, "{(1/3,2/3)}");
        assert!(dj_gap_witness(&rat_int(0), &rat_int(0), &rat_int(0), &rat_int(1)).is_err());
    }

    #[test]
    fn dj_witness_skewed_case() {
        let r = dj_gap_witness(&rat_int(0), &rat_int(3), &rat_int(1), &rat_int(2)).unwrap();
        assert!(!r.d_holds);
        assert!(r.j_holds);
        // θ endpoints: (2c+d)/3 = 4/3, (c+2d)/3 = 5/3.
        assert_eq!(r.theta_image, "{(4/3,5/3)}");
    }

    #[test]
    fn json_round_trip() {
        let alpha = irregular_squash_map();
        let j = serde_json::to_string(&alpha).unwrap();
        let back: PiecewiseMoebiusMap = serde_json::from_str(&j).unwrap();
        assert!(maps_equal(&alpha, &back));
        let parsed: PiecewiseMoebiusMap = serde_json::from_str(
            r#"{"pieces":[{"interval":"[0,inf)","moebius":[1,0,1,1]},{"interval":"(-inf,0)","const":"3/2"}]}"#,
        )
        .unwrap();
        assert_eq!(parsed.pieces().len(), 2);
        assert_eq!(parsed.eval(&rat_int(-5)), Some(rat(3, 2)));
        assert_eq!(parsed.eval(&rat_int(1)), Some(rat(1, 2)));
    }

    #[test]
    fn open_image_endpoints_are_approached() {
        // Finite open image endpoints are genuine limits: probing the domain
        // near the matching end gets within 1/1000 of them.
        let eps = rat(1, 1000);
        let nudge = rat(1, 1_000_000_000);
        let far = rat_int(1_000_000_000);
        for alpha in
            [irregular_squash_map(), bounded_mirror_map(), wrapped_regular_map(), super::PiecewiseMoebiusMap::identity()]
        {
            for (itv, fun) in alpha.pieces() {
                let PieceFun::Moebius(_) = fun else { continue };
                let img = fun.image_on(itv);
                if !img.lo_closed() {
                    if let ExtRat::Finite(target) = img.lo() {
                        let x = match itv.lo() {
                            ExtRat::Finite(q) => q + &nudge,
                            ExtRat::NegInf => -far.clone(),
                            ExtRat::PosInf => unreachable!(),
                        };
                        let v = fun.eval(&x).unwrap();
                        let err = (v - target).abs();
                        assert!(err <= eps, "lo approach off by {err} on {itv}");
                    }
                }
                if !img.hi_closed() {
                    if let ExtRat::Finite(target) = img.hi() {
                        let x = match itv.hi() {
                            ExtRat::Finite(q) => q - &nudge,
                            ExtRat::PosInf => far.clone(),
                            ExtRat::NegInf => unreachable!(),
                        };
                        let v = fun.eval(&x).unwrap();
                        let err = (v - target).abs();
                        assert!(err <= eps, "hi approach off by {err} on {itv}");
                    }
                }
            }
        }
    }

    #[test]
    fn image_probe_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for alpha in [irregular_squash_map(), PiecewiseMoebiusMap::identity()] {
            let img = image_of(&alpha);
            for (itv, _) in alpha.pieces() {
                for _ in 0..200 {
                    let num = rng.gen_range(-4000i64..4000);
                    let den = rng.gen_range(1i64..50);
                    let q = rat(num, den);
                    if itv.contains(&q) {
                        let v = alpha.eval(&q).unwrap();
                        assert!(img.contains(&v), "{q} maps to {v} outside {img}");
                    }
                }
            }
        }
    }
}
