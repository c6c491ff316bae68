//! The frame of open subsets of the real line, restricted to finite unions
//! of open intervals with rational or infinite endpoints, and piecewise
//! polynomial functions over it.
//!
//! Closed sets never appear as values: they are complements of regions, and
//! boundaries are finite point sets.

use crate::poly::Poly;
use crate::rational::{fmt_q, half, parse_q, ParseRationalError, Q};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LineError {
    #[error("malformed interval ({lo}, {hi}): lower end must be below upper end")]
    MalformedRegion { lo: String, hi: String },
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("invalid endpoint `{0}`")]
    BadEndpoint(String),
    #[error("point {0} is not interior to the region")]
    PointNotInteriorToRegion(String),
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCount {
        breakpoints: usize,
        expected: usize,
        got: usize,
    },
    #[error("breakpoints must be strictly increasing")]
    UnsortedBreakpoints,
    #[error("no value assigned at breakpoint {0}")]
    MissingBreakpointValue(String),
    #[error("value given at {0}, which is not a breakpoint")]
    StrayBreakpointValue(String),
    #[error("piece {0} has degree above 1")]
    NotPiecewiseLinear(usize),
    #[error("function is discontinuous at {0} inside the interval")]
    NotContinuousOnInterval(String),
    #[error("target {target} is not between f(a) = {fa} and f(b) = {fb}")]
    TargetOutOfRange { target: String, fa: String, fb: String },
    #[error("interval [{0}, {1}] is empty")]
    EmptyInterval(String, String),
    #[error("scale factor must be positive")]
    NonPositiveScale,
}

/// An interval endpoint on the extended line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Finite(Q),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Endpoint::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, LineError> {
        match text.trim() {
            "-inf" => Ok(Endpoint::NegInf),
            "+inf" | "inf" => Ok(Endpoint::PosInf),
            t => Ok(Endpoint::Finite(parse_q(t)?)),
        }
    }
}

impl From<Q> for Endpoint {
    fn from(q: Q) -> Self {
        Endpoint::Finite(q)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => write!(f, "-inf"),
            Endpoint::PosInf => write!(f, "+inf"),
            Endpoint::Finite(q) => write!(f, "{}", fmt_q(q)),
        }
    }
}

/// Open interval `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    pub fn new(lo: impl Into<Endpoint>, hi: impl Into<Endpoint>) -> Result<Self, LineError> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo >= hi {
            return Err(LineError::MalformedRegion {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn contains(&self, x: &Q) -> bool {
        let x = Endpoint::Finite(x.clone());
        self.lo < x && x < self.hi
    }

    /// A rational strictly inside the interval: the midpoint when bounded,
    /// one unit in from a finite end, and 0 for the whole line.
    pub fn midpoint(&self) -> Q {
        match (&self.lo, &self.hi) {
            (Endpoint::Finite(a), Endpoint::Finite(b)) => (a + b) * half(),
            (Endpoint::NegInf, Endpoint::Finite(b)) => b - Q::one(),
            (Endpoint::Finite(a), Endpoint::PosInf) => a + Q::one(),
            _ => Q::zero(),
        }
    }

    fn meet(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo < hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Finite union of open intervals in canonical form: sorted, with
/// overlapping intervals merged. Intervals that merely touch, such as
/// `(0,1)` and `(1,2)`, stay separate since their union misses the shared
/// endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OpenRegion {
    intervals: Vec<Interval>,
}

/// On-disk region: `{"intervals": [{"lo": "0", "hi": "1"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFile {
    pub intervals: Vec<IntervalFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFile {
    pub lo: String,
    pub hi: String,
}

impl OpenRegion {
    pub fn empty() -> Self {
        OpenRegion::default()
    }

    pub fn top() -> Self {
        OpenRegion {
            intervals: vec![Interval {
                lo: Endpoint::NegInf,
                hi: Endpoint::PosInf,
            }],
        }
    }

    pub fn interval(lo: impl Into<Endpoint>, hi: impl Into<Endpoint>) -> Result<Self, LineError> {
        Ok(Self::from_intervals(vec![Interval::new(lo, hi)?]))
    }

    /// Normalizes an arbitrary list of intervals.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                Some(last) if iv.lo < last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        OpenRegion { intervals: out }
    }

    pub fn from_file(file: &RegionFile) -> Result<Self, LineError> {
        file.intervals
            .iter()
            .map(|iv| Interval::new(Endpoint::parse(&iv.lo)?, Endpoint::parse(&iv.hi)?))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_intervals)
    }

    pub fn to_file(&self) -> RegionFile {
        RegionFile {
            intervals: self
                .intervals
                .iter()
                .map(|iv| IntervalFile {
                    lo: iv.lo.to_string(),
                    hi: iv.hi.to_string(),
                })
                .collect(),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_top(&self) -> bool {
        *self == Self::top()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn is_subset(&self, other: &OpenRegion) -> bool {
        self.meet(other) == *self
    }

    pub fn meet(&self, other: &OpenRegion) -> OpenRegion {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                out.extend(a.meet(b));
            }
        }
        Self::from_intervals(out)
    }

    pub fn join(&self, other: &OpenRegion) -> OpenRegion {
        Self::from_intervals(
            self.intervals
                .iter()
                .chain(&other.intervals)
                .cloned()
                .collect(),
        )
    }

    /// Interior of the complement.
    pub fn not(&self) -> OpenRegion {
        gaps(self.intervals.iter().map(|iv| (iv.lo.clone(), iv.hi.clone())))
    }

    /// Interior of `complement(self) ∪ other`, computed as the complement of
    /// the closure of `self \ other`.
    pub fn implies(&self, other: &OpenRegion) -> OpenRegion {
        let mut closed: Vec<(Endpoint, Endpoint)> = Vec::new();
        for iv in &self.intervals {
            let mut cursor = iv.lo.clone();
            // whether `cursor` itself belongs to self \ other
            let mut cursor_in = false;
            for cut in &other.intervals {
                if cut.hi <= cursor || cut.lo >= iv.hi {
                    continue;
                }
                match cursor.cmp(&cut.lo) {
                    Ordering::Less => closed.push((cursor.clone(), cut.lo.clone())),
                    Ordering::Equal if cursor_in => closed.push((cursor.clone(), cursor.clone())),
                    _ => {}
                }
                if cut.hi >= iv.hi {
                    cursor = iv.hi.clone();
                    break;
                }
                cursor = cut.hi.clone();
                cursor_in = true;
            }
            if cursor < iv.hi {
                closed.push((cursor, iv.hi.clone()));
            }
        }
        closed.sort();
        gaps(closed)
    }

    /// Finite endpoints of the canonical intervals; none of them lies in the
    /// region.
    pub fn boundary(&self) -> Vec<Q> {
        let mut pts: Vec<Q> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo.finite().cloned(), iv.hi.finite().cloned()])
            .flatten()
            .collect();
        pts.dedup();
        pts
    }

    /// Cuts the region at an interior point into the parts below and above it.
    pub fn divide(&self, at: &Q) -> Result<(OpenRegion, OpenRegion), LineError> {
        if !self.contains(at) {
            return Err(LineError::PointNotInteriorToRegion(fmt_q(at)));
        }
        let below = OpenRegion::interval(Endpoint::NegInf, at.clone())?;
        let above = OpenRegion::interval(at.clone(), Endpoint::PosInf)?;
        Ok((self.meet(&below), self.meet(&above)))
    }

    /// Whether the closed complement is bounded.
    pub fn is_compact_complement(&self) -> bool {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(first), Some(last)) => first.lo == Endpoint::NegInf && last.hi == Endpoint::PosInf,
            _ => false,
        }
    }

    /// `true` when every nonzero part of `within` meets `self`, i.e.
    /// `within ∧ ¬self = 0`.
    pub fn is_dense_in(&self, within: &OpenRegion) -> bool {
        within.meet(&self.not()).is_empty()
    }

    /// Image under `x ↦ k·x` for positive `k`.
    pub fn scale(&self, k: &Q) -> Result<OpenRegion, LineError> {
        if *k <= Q::zero() {
            return Err(LineError::NonPositiveScale);
        }
        let s = |e: &Endpoint| match e {
            Endpoint::Finite(q) => Endpoint::Finite(q * k),
            other => other.clone(),
        };
        Ok(OpenRegion {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval {
                    lo: s(&iv.lo),
                    hi: s(&iv.hi),
                })
                .collect(),
        })
    }

    /// Random region with up to four intervals and small rational endpoints;
    /// may be empty only if `allow_empty`.
    pub fn random<R: Rng>(rng: &mut R, allow_empty: bool) -> OpenRegion {
        loop {
            let count = rng.gen_range(if allow_empty { 0 } else { 1 }..=4);
            let mut ivs = Vec::with_capacity(count);
            for _ in 0..count {
                let end = |r: &mut R, inf: Endpoint| {
                    if r.gen_ratio(1, 10) {
                        inf
                    } else {
                        let d: i64 = r.gen_range(1..=8);
                        Endpoint::Finite(Q::new(r.gen_range(-24..=24i64).into(), d.into()))
                    }
                };
                let a = end(rng, Endpoint::NegInf);
                let b = end(rng, Endpoint::PosInf);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if let Ok(iv) = Interval::new(lo, hi) {
                    ivs.push(iv);
                }
            }
            let region = Self::from_intervals(ivs);
            if allow_empty || !region.is_empty() {
                return region;
            }
        }
    }
}

/// Open gaps left between sorted closed pieces `[a, b]` (possibly `a = b`).
fn gaps(closed: impl IntoIterator<Item = (Endpoint, Endpoint)>) -> OpenRegion {
    let mut out = Vec::new();
    let mut cursor = Endpoint::NegInf;
    let mut any = false;
    for (lo, hi) in closed {
        any = true;
        if cursor < lo {
            out.push(Interval {
                lo: cursor.clone(),
                hi: lo,
            });
        }
        if hi > cursor {
            cursor = hi;
        }
    }
    if !any {
        return OpenRegion::top();
    }
    if cursor < Endpoint::PosInf {
        out.push(Interval {
            lo: cursor,
            hi: Endpoint::PosInf,
        });
    }
    OpenRegion { intervals: out }
}

impl fmt::Display for OpenRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.intervals.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// Piecewise polynomial function on the line with assigned values at the
/// breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFn {
    breakpoints: Vec<Q>,
    pieces: Vec<Poly>,
    values: Vec<Q>,
}

/// On-disk piecewise function. Polynomials are constant-first coefficient
/// lists; `values` is keyed by breakpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseFile {
    pub breakpoints: Vec<String>,
    pub pieces: Vec<Vec<String>>,
    pub values: BTreeMap<String, String>,
}

/// Local data of a piecewise function at a point: the two adjacent pieces
/// and the assigned value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub at: Q,
    pub left: Poly,
    pub value: Q,
    pub right: Poly,
}

/// Smoothness class of a stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Smoothness {
    Discontinuous,
    /// `C^k` for the given `k`, possibly capped at the configured maximum.
    C(u32),
    Smooth,
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Discontinuous => write!(f, "discontinuous"),
            Smoothness::C(k) => write!(f, "C{k}"),
            Smoothness::Smooth => write!(f, "Cinf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StratumShape {
    Open(Interval),
    Point(Q),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub shape: StratumShape,
    pub class: Smoothness,
}

pub const DEFAULT_K_MAX: u32 = 2;

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<Q>, pieces: Vec<Poly>, values: Vec<Q>) -> Result<Self, LineError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(LineError::PieceCount {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len() + 1,
                got: pieces.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LineError::UnsortedBreakpoints);
        }
        if values.len() != breakpoints.len() {
            let missing = breakpoints.get(values.len()).map(fmt_q).unwrap_or_default();
            return Err(LineError::MissingBreakpointValue(missing));
        }
        Ok(PiecewiseFn {
            breakpoints,
            pieces,
            values,
        })
    }

    pub fn polynomial(p: Poly) -> Self {
        PiecewiseFn {
            breakpoints: vec![],
            pieces: vec![p],
            values: vec![],
        }
    }

    pub fn from_file(file: &PiecewiseFile) -> Result<Self, LineError> {
        let breakpoints = file
            .breakpoints
            .iter()
            .map(|b| parse_q(b))
            .collect::<Result<Vec<_>, _>>()?;
        let pieces = file
            .pieces
            .iter()
            .map(|p| Poly::parse_list(p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut values = vec![None; breakpoints.len()];
        for (k, v) in &file.values {
            let at = parse_q(k)?;
            let slot = breakpoints
                .iter()
                .position(|b| *b == at)
                .ok_or_else(|| LineError::StrayBreakpointValue(k.clone()))?;
            values[slot] = Some(parse_q(v)?);
        }
        let values = values
            .into_iter()
            .zip(&breakpoints)
            .map(|(v, b)| v.ok_or_else(|| LineError::MissingBreakpointValue(fmt_q(b))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(breakpoints, pieces, values)
    }

    pub fn to_file(&self) -> PiecewiseFile {
        PiecewiseFile {
            breakpoints: self.breakpoints.iter().map(fmt_q).collect(),
            pieces: self.pieces.iter().map(Poly::to_strings).collect(),
            values: self
                .breakpoints
                .iter()
                .zip(&self.values)
                .map(|(b, v)| (fmt_q(b), fmt_q(v)))
                .collect(),
        }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    /// Inserts a breakpoint at `at` without changing the function. No-op if
    /// `at` already is a breakpoint.
    pub fn refine(&self, at: Q) -> PiecewiseFn {
        if self.breakpoints.contains(&at) {
            return self.clone();
        }
        let i = self.breakpoints.partition_point(|b| *b < at);
        let mut out = self.clone();
        let piece = self.pieces[i].clone();
        out.values.insert(i, piece.eval(&at));
        out.breakpoints.insert(i, at);
        out.pieces.insert(i, piece);
        out
    }

    pub fn eval(&self, x: &Q) -> Q {
        match self.breakpoints.binary_search(x) {
            Ok(i) => self.values[i].clone(),
            Err(i) => self.pieces[i].eval(x),
        }
    }

    pub fn germ_at(&self, x: &Q) -> Germ {
        match self.breakpoints.binary_search(x) {
            Ok(i) => Germ {
                at: x.clone(),
                left: self.pieces[i].clone(),
                value: self.values[i].clone(),
                right: self.pieces[i + 1].clone(),
            },
            Err(i) => Germ {
                at: x.clone(),
                left: self.pieces[i].clone(),
                value: self.pieces[i].eval(x),
                right: self.pieces[i].clone(),
            },
        }
    }

    /// Smoothness of the function at breakpoint `i`, capped at `k_max`.
    fn smoothness_at(&self, i: usize, k_max: u32) -> Smoothness {
        let b = &self.breakpoints[i];
        let (l, r) = (&self.pieces[i], &self.pieces[i + 1]);
        if l.eval(b) != self.values[i] || r.eval(b) != self.values[i] {
            return Smoothness::Discontinuous;
        }
        if l == r {
            return Smoothness::Smooth;
        }
        let mut k = 0;
        while k < k_max {
            let j = (k + 1) as usize;
            if l.nth_derivative(j).eval(b) != r.nth_derivative(j).eval(b) {
                break;
            }
            k += 1;
        }
        Smoothness::C(k)
    }

    /// Breakpoints where the one-sided limits and the assigned value are not
    /// all equal.
    pub fn catastrophe_set(&self) -> Vec<Q> {
        (0..self.breakpoints.len())
            .filter(|&i| self.smoothness_at(i, 0) == Smoothness::Discontinuous)
            .map(|i| self.breakpoints[i].clone())
            .collect()
    }

    /// Stratification into open intervals and point strata.
    ///
    /// Breakpoints where the function is not `C^k_max` become point strata
    /// tagged with their class. The open intervals between them are tagged
    /// `Cinf` when they contain no breakpoint with distinct adjacent pieces,
    /// and `C{k_max}` otherwise. With `k_max = 0` the open strata are exactly
    /// the maximal intervals of continuity.
    pub fn strata(&self, k_max: u32) -> Vec<Stratum> {
        let mut out = Vec::new();
        let mut lo = Endpoint::NegInf;
        let mut class = Smoothness::Smooth;
        for i in 0..self.breakpoints.len() {
            let s = self.smoothness_at(i, k_max);
            let b = self.breakpoints[i].clone();
            match s {
                Smoothness::Smooth => {}
                Smoothness::C(k) if k >= k_max => class = class.min(Smoothness::C(k_max)),
                _ => {
                    out.push(Stratum {
                        shape: StratumShape::Open(Interval {
                            lo: lo.clone(),
                            hi: Endpoint::Finite(b.clone()),
                        }),
                        class,
                    });
                    out.push(Stratum {
                        shape: StratumShape::Point(b.clone()),
                        class: s,
                    });
                    lo = Endpoint::Finite(b);
                    class = Smoothness::Smooth;
                }
            }
        }
        out.push(Stratum {
            shape: StratumShape::Open(Interval {
                lo,
                hi: Endpoint::PosInf,
            }),
            class,
        });
        out
    }

    /// Leftmost `x` in `[a, b]` with `f(x) = c`, for a piecewise-linear
    /// function continuous on `[a, b]`.
    pub fn ivt_witness(&self, a: &Q, b: &Q, c: &Q) -> Result<Q, LineError> {
        if let Some(i) = self.pieces.iter().position(|p| p.degree().unwrap_or(0) > 1) {
            return Err(LineError::NotPiecewiseLinear(i));
        }
        if a > b {
            return Err(LineError::EmptyInterval(fmt_q(a), fmt_q(b)));
        }
        if let Some(x) = self
            .catastrophe_set()
            .into_iter()
            .find(|x| a <= x && x <= b)
        {
            return Err(LineError::NotContinuousOnInterval(fmt_q(&x)));
        }
        let (fa, fb) = (self.eval(a), self.eval(b));
        let (low, high) = if fa <= fb { (&fa, &fb) } else { (&fb, &fa) };
        if c < low || c > high {
            return Err(LineError::TargetOutOfRange {
                target: fmt_q(c),
                fa: fmt_q(&fa),
                fb: fmt_q(&fb),
            });
        }
        let mut knots = vec![a.clone()];
        knots.extend(self.breakpoints.iter().filter(|x| a < *x && *x < b).cloned());
        knots.push(b.clone());
        for seg in knots.windows(2) {
            let (s, t) = (&seg[0], &seg[1]);
            if self.eval(s) == *c {
                return Ok(s.clone());
            }
            let mid = (s + t) * half();
            let piece = &self.pieces[self.breakpoints.partition_point(|x| *x < mid)];
            let slope = piece.coeff(1);
            if !slope.is_zero() {
                let x = (c - piece.coeff(0)) / slope;
                if s < &x && &x <= t {
                    return Ok(x);
                }
            }
        }
        // c = f(b) reached only at the right end
        Ok(b.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, ratio};

    fn iv(lo: i64, hi: i64) -> OpenRegion {
        OpenRegion::interval(q(lo), q(hi)).unwrap()
    }

    fn abs() -> PiecewiseFn {
        PiecewiseFn::new(
            vec![q(0)],
            vec![Poly::new(vec![q(0), q(-1)]), Poly::x()],
            vec![q(0)],
        )
        .unwrap()
    }

    fn step() -> PiecewiseFn {
        PiecewiseFn::new(
            vec![q(0)],
            vec![Poly::zero(), Poly::constant(q(1))],
            vec![q(1)],
        )
        .unwrap()
    }

    #[test]
    fn frame_operations() {
        assert_eq!(iv(0, 2).meet(&iv(1, 3)), iv(1, 2));
        let not01 = iv(0, 1).not();
        assert_eq!(
            not01,
            OpenRegion::interval(Endpoint::NegInf, q(0))
                .unwrap()
                .join(&OpenRegion::interval(q(1), Endpoint::PosInf).unwrap())
        );
        let lem = iv(0, 1).join(&not01);
        assert_eq!(lem.intervals().len(), 3);
        assert!(!lem.is_top());
        assert_eq!(OpenRegion::empty().not(), OpenRegion::top());
        assert_eq!(OpenRegion::top().not(), OpenRegion::empty());
    }

    #[test]
    fn touching_intervals_stay_apart() {
        let u = iv(0, 1).join(&iv(1, 2));
        assert_eq!(u.intervals().len(), 2);
        assert!(!u.contains(&q(1)));
        assert_eq!(iv(0, 2).join(&iv(1, 3)), iv(0, 3));
    }

    #[test]
    fn implication_handles_isolated_points() {
        let u = iv(0, 2);
        let v = iv(0, 1).join(&iv(1, 2));
        let w = u.implies(&v);
        assert_eq!(
            w,
            OpenRegion::interval(Endpoint::NegInf, q(1))
                .unwrap()
                .join(&OpenRegion::interval(q(1), Endpoint::PosInf).unwrap())
        );
        assert_eq!(iv(0, 1).implies(&iv(0, 1)), OpenRegion::top());
        assert_eq!(iv(0, 3).implies(&iv(1, 2)), iv(0, 3).not().join(&iv(1, 2)));
    }

    #[test]
    fn malformed_interval() {
        assert!(matches!(
            OpenRegion::interval(q(1), q(1)),
            Err(LineError::MalformedRegion { .. })
        ));
    }

    #[test]
    fn boundaries() {
        assert_eq!(iv(0, 1).boundary(), vec![q(0), q(1)]);
        assert_eq!(iv(0, 1).join(&iv(1, 2)).boundary(), vec![q(0), q(1), q(2)]);
        assert!(OpenRegion::top().boundary().is_empty());
    }

    #[test]
    fn division() {
        let (w, v) = iv(0, 1).divide(&half()).unwrap();
        assert_eq!(w, OpenRegion::interval(q(0), half()).unwrap());
        assert_eq!(v, OpenRegion::interval(half(), q(1)).unwrap());
        let u = iv(0, 1).join(&iv(2, 3));
        let (w, v) = u.divide(&ratio(5, 2)).unwrap();
        assert_eq!(w, iv(0, 1).join(&OpenRegion::interval(q(2), ratio(5, 2)).unwrap()));
        assert_eq!(v, OpenRegion::interval(ratio(5, 2), q(3)).unwrap());
        assert!(matches!(
            iv(0, 1).divide(&q(2)),
            Err(LineError::PointNotInteriorToRegion(_))
        ));
    }

    #[test]
    fn compact_complements() {
        let u = OpenRegion::interval(Endpoint::NegInf, q(0))
            .unwrap()
            .join(&OpenRegion::interval(q(1), Endpoint::PosInf).unwrap());
        assert!(u.is_compact_complement());
        assert!(!OpenRegion::interval(q(0), Endpoint::PosInf)
            .unwrap()
            .is_compact_complement());
        assert!(OpenRegion::top().is_compact_complement());
        assert!(!OpenRegion::empty().is_compact_complement());
    }

    #[test]
    fn germs() {
        let g = abs().germ_at(&q(0));
        assert_eq!((g.left, g.value, g.right), (Poly::new(vec![q(0), q(-1)]), q(0), Poly::x()));
        let g = step().germ_at(&q(0));
        assert_eq!((g.left, g.value, g.right), (Poly::zero(), q(1), Poly::constant(q(1))));
        let f = PiecewiseFn::new(vec![q(-3), q(0)], vec![Poly::zero(), Poly::zero(), Poly::x()], vec![q(0), q(0)]).unwrap();
        let g = f.germ_at(&q(5));
        assert_eq!((g.left.clone(), g.value, g.right.clone()), (Poly::x(), q(5), Poly::x()));
    }

    #[test]
    fn catastrophes_and_strata() {
        assert_eq!(step().catastrophe_set(), vec![q(0)]);
        assert!(abs().catastrophe_set().is_empty());
        let s = abs().strata(DEFAULT_K_MAX);
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].class, Smoothness::Smooth);
        assert_eq!(s[1], Stratum { shape: StratumShape::Point(q(0)), class: Smoothness::C(0) });
        assert_eq!(s[2].class, Smoothness::Smooth);
        let p = PiecewiseFn::polynomial(Poly::x());
        assert!(p.catastrophe_set().is_empty());
        assert_eq!(p.strata(DEFAULT_K_MAX).len(), 1);
        // with k_max = 0 only discontinuities split
        assert_eq!(abs().strata(0).len(), 1);
    }

    #[test]
    fn strata_cap_at_k_max() {
        // 0 for x < 0, x^3 for x > 0: C^2 at 0
        let f = PiecewiseFn::new(
            vec![q(0)],
            vec![Poly::zero(), Poly::new(vec![q(0), q(0), q(0), q(1)])],
            vec![q(0)],
        )
        .unwrap();
        let s = f.strata(2);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].class, Smoothness::C(2));
        let s = f.strata(3);
        assert_eq!(s[1].class, Smoothness::C(2));
    }

    #[test]
    fn ivt_examples() {
        let lin = PiecewiseFn::polynomial(Poly::new(vec![q(-1), q(2)]));
        assert_eq!(lin.ivt_witness(&q(0), &q(2), &q(0)).unwrap(), half());
        assert_eq!(abs().ivt_witness(&q(-2), &q(1), &ratio(3, 2)).unwrap(), ratio(-3, 2));
        assert!(abs().ivt_witness(&q(-1), &q(1), &ratio(1, 3)).is_err());
        assert_eq!(lin.ivt_witness(&q(0), &q(2), &q(-1)).unwrap(), q(0));
        assert_eq!(lin.ivt_witness(&q(0), &q(2), &q(3)).unwrap(), q(2));
        assert!(matches!(
            lin.ivt_witness(&q(0), &q(2), &q(4)),
            Err(LineError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            step().ivt_witness(&q(-1), &q(1), &half()),
            Err(LineError::NotContinuousOnInterval(_))
        ));
        let sq = PiecewiseFn::polynomial(Poly::new(vec![q(0), q(0), q(1)]));
        assert!(matches!(
            sq.ivt_witness(&q(0), &q(1), &half()),
            Err(LineError::NotPiecewiseLinear(0))
        ));
    }

    #[test]
    fn piecewise_file_shape() {
        let file: PiecewiseFile = serde_json::from_str(
            r#"{"breakpoints": ["0"], "pieces": [["0","-1"],["0","1"]], "values": {"0": "0"}}"#,
        )
        .unwrap();
        let f = PiecewiseFn::from_file(&file).unwrap();
        assert_eq!(f, abs());
        assert_eq!(PiecewiseFn::from_file(&f.to_file()).unwrap(), f);
        let bad = PiecewiseFile {
            breakpoints: vec!["0".into()],
            pieces: vec![vec!["0".into()], vec!["1".into()]],
            values: BTreeMap::new(),
        };
        assert_eq!(
            PiecewiseFn::from_file(&bad),
            Err(LineError::MissingBreakpointValue("0".into()))
        );
    }

    #[test]
    fn region_file_shape() {
        let file: RegionFile = serde_json::from_str(
            r#"{"intervals": [{"lo": "0", "hi": "1"}, {"lo": "1", "hi": "+inf"}]}"#,
        )
        .unwrap();
        let r = OpenRegion::from_file(&file).unwrap();
        assert_eq!(r.intervals().len(), 2);
        assert_eq!(OpenRegion::from_file(&r.to_file()).unwrap(), r);
    }
}
