//! Finite topological spaces given by an explicit family of opens.
//!
//! Point subsets are bitmasks over the point list ([`PointSet`]), so a space
//! holds at most 64 points. The order of `opens` is preserved; presheaf files
//! address opens by their index in it.

use crate::lattice::HeytingAlgebra;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("a space holds at most {MAX_POINTS} points, got {0}")]
    TooManyPoints(usize),
    #[error("point `{0}` declared twice")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("open set mentions unknown point `{0}`")]
    OpenMentionsUnknownPoint(String),
    #[error("open {0} listed twice")]
    DuplicateOpen(String),
    #[error("opens must contain the empty set and the full point set")]
    MissingEmptyOrFull,
    #[error("union of {0} and {1} is not open")]
    NotClosedUnderUnion(String, String),
    #[error("intersection of {0} and {1} is not open")]
    NotClosedUnderIntersection(String, String),
    #[error("{0} is not an open set")]
    NotAnOpen(String),
    #[error("map does not assign point `{0}`")]
    MapNotTotal(String),
}

/// A subset of the points of a space, as a bitmask over point indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        PointSet(1 << i)
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        idx.into_iter().fold(PointSet::EMPTY, |s, i| s.union(Self::singleton(i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: Self) -> Self {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        PointSet(self.0 & !o.0)
    }

    pub fn complement_in(self, n: usize) -> Self {
        PointSet::full(n).difference(self)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// On-disk space description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

/// On-disk point map: `{"map": {"p": "q"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    opens: Vec<PointSet>,
}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opens: Vec<String> = self.opens.iter().map(|&o| self.show(o)).collect();
        f.debug_struct("FiniteSpace")
            .field("points", &self.points)
            .field("opens", &opens)
            .finish()
    }
}

fn index_points(points: &[String]) -> Result<BTreeMap<&str, usize>, SpaceError> {
    if points.len() > MAX_POINTS {
        return Err(SpaceError::TooManyPoints(points.len()));
    }
    let mut index = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.as_str(), i).is_some() {
            return Err(SpaceError::DuplicatePoint(p.clone()));
        }
    }
    Ok(index)
}

impl FiniteSpace {
    /// Validates an explicit family of opens.
    pub fn new<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self, SpaceError> {
        let points: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let index = index_points(&points)?;
        let mut masks = Vec::with_capacity(opens.len());
        for open in opens {
            let mut set = PointSet::EMPTY;
            for p in open {
                let i = *index
                    .get(p.as_ref())
                    .ok_or_else(|| SpaceError::OpenMentionsUnknownPoint(p.as_ref().to_string()))?;
                set = set.union(PointSet::singleton(i));
            }
            masks.push(set);
        }
        Self::from_masks(points, masks)
    }

    pub fn from_file(file: &SpaceFile) -> Result<Self, SpaceError> {
        Self::new(&file.points, &file.opens)
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            points: self.points.clone(),
            opens: self.opens.iter().map(|&o| self.names_of(o)).collect(),
        }
    }

    pub(crate) fn from_masks(points: Vec<String>, opens: Vec<PointSet>) -> Result<Self, SpaceError> {
        if points.len() > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(points.len()));
        }
        let space = FiniteSpace { points, opens };
        for (i, o) in space.opens.iter().enumerate() {
            if space.opens[..i].contains(o) {
                return Err(SpaceError::DuplicateOpen(space.show(*o)));
            }
        }
        let full = PointSet::full(space.points.len());
        if !space.is_open(PointSet::EMPTY) || !space.is_open(full) {
            return Err(SpaceError::MissingEmptyOrFull);
        }
        for (i, &a) in space.opens.iter().enumerate() {
            for &b in &space.opens[i + 1..] {
                if !space.is_open(a.union(b)) {
                    return Err(SpaceError::NotClosedUnderUnion(space.show(a), space.show(b)));
                }
                if !space.is_open(a.intersection(b)) {
                    return Err(SpaceError::NotClosedUnderIntersection(
                        space.show(a),
                        space.show(b),
                    ));
                }
            }
        }
        Ok(space)
    }

    /// Alexandrov space of a preorder given as pairs `(a, b)` meaning `a <= b`.
    ///
    /// Opens are the down-closed sets, so the smallest open around `x` is the
    /// principal down-set of `x`. Opens are listed by size, then by bitmask.
    pub fn alexandrov<S: AsRef<str>>(points: &[S], preorder: &[(S, S)]) -> Result<Self, SpaceError> {
        let points: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let index = index_points(&points)?;
        let n = points.len();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| SpaceError::UnknownPoint(s.to_string()))
        };
        let mut below = vec![PointSet::EMPTY; n];
        for (i, b) in below.iter_mut().enumerate() {
            *b = PointSet::singleton(i);
        }
        for (a, b) in preorder {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            below[b] = below[b].union(PointSet::singleton(a));
        }
        // transitive closure of the down-sets
        loop {
            let mut changed = false;
            for x in 0..n {
                let grown = below[x]
                    .iter()
                    .fold(below[x], |acc, y| acc.union(below[y]));
                if grown != below[x] {
                    below[x] = grown;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(Self::from_masks(points, down_sets(&below))
            .expect("down-sets of a preorder form a topology"))
    }

    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Self {
        Self::alexandrov::<&str>(
            &points.iter().map(|p| p.as_ref()).collect::<Vec<_>>(),
            &[],
        )
        .expect("discrete space")
    }

    pub fn coarse<S: AsRef<str>>(points: &[S]) -> Self {
        let points: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let mut opens = vec![PointSet::EMPTY];
        if !points.is_empty() {
            opens.push(PointSet::full(points.len()));
        }
        Self::from_masks(points, opens).expect("coarse space")
    }

    /// Points `p, q` with opens `{}, {p}, {p,q}`.
    pub fn sierpinski() -> Self {
        Self::new(&["p", "q"], &[vec![], vec!["p"], vec!["p", "q"]]).expect("sierpinski space")
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.points.len())
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.opens.contains(&set)
    }

    pub fn is_closed(&self, set: PointSet) -> bool {
        self.is_open(set.complement_in(self.points.len()))
    }

    pub fn open_index(&self, set: PointSet) -> Option<usize> {
        self.opens.iter().position(|&o| o == set)
    }

    pub fn point_index(&self, name: &str) -> Result<usize, SpaceError> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))
    }

    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<PointSet, SpaceError> {
        names.iter().try_fold(PointSet::EMPTY, |acc, n| {
            Ok(acc.union(PointSet::singleton(self.point_index(n.as_ref())?)))
        })
    }

    pub fn names_of(&self, set: PointSet) -> Vec<String> {
        set.iter().map(|i| self.points[i].clone()).collect()
    }

    /// `{p,q}` rendering in point order.
    pub fn show(&self, set: PointSet) -> String {
        format!("{{{}}}", self.names_of(set).join(","))
    }

    /// Largest open contained in `set`.
    pub fn interior(&self, set: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|o| o.is_subset(set))
            .fold(PointSet::EMPTY, |acc, &o| acc.union(o))
    }

    /// Intersection of all closed sets containing `set`.
    pub fn closure(&self, set: PointSet) -> PointSet {
        let n = self.points.len();
        self.opens
            .iter()
            .map(|o| o.complement_in(n))
            .filter(|c| set.is_subset(*c))
            .fold(self.full(), |acc, c| acc.intersection(c))
    }

    pub fn boundary(&self, set: PointSet) -> PointSet {
        self.closure(set).difference(self.interior(set))
    }

    /// Smallest open containing `set` (opens are closed under intersection).
    pub fn minimal_open_containing(&self, set: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|o| set.is_subset(**o))
            .fold(self.full(), |acc, &o| acc.intersection(o))
    }

    /// First split of `u` into two nonempty disjoint opens, in open order.
    pub fn split_open(&self, u: PointSet) -> Option<(PointSet, PointSet)> {
        self.opens.iter().find_map(|&v| {
            let w = u.difference(v);
            (v.is_subset(u) && !v.is_empty() && !w.is_empty() && self.is_open(w)).then_some((v, w))
        })
    }

    fn require_open(&self, u: PointSet) -> Result<(), SpaceError> {
        if self.is_open(u) {
            Ok(())
        } else {
            Err(SpaceError::NotAnOpen(self.show(u)))
        }
    }

    pub fn is_connected_open(&self, u: PointSet) -> Result<bool, SpaceError> {
        self.require_open(u)?;
        Ok(self.split_open(u).is_none())
    }

    /// Decomposition of an open into connected opens, by repeated splitting.
    ///
    /// In a finite space the pieces are the connected components of `u`, so the
    /// result does not depend on which split is taken first. Pieces are listed
    /// in the order of `opens`.
    pub fn components(&self, u: PointSet) -> Result<Vec<PointSet>, SpaceError> {
        self.require_open(u)?;
        let mut pending = vec![u];
        let mut done = Vec::new();
        while let Some(piece) = pending.pop() {
            if piece.is_empty() {
                continue;
            }
            match self.split_open(piece) {
                Some((v, w)) => {
                    pending.push(w);
                    pending.push(v);
                }
                None => done.push(piece),
            }
        }
        done.sort_by_key(|p| self.open_index(*p));
        Ok(done)
    }

    /// Inclusion-ordered lattice of opens. Element `i` is `opens[i]`, named
    /// by [`FiniteSpace::show`].
    pub fn opens_lattice(&self) -> HeytingAlgebra {
        let n = self.opens.len();
        let names = self.opens.iter().map(|&o| self.show(o)).collect();
        let mut leq = vec![false; n * n];
        for (a, &oa) in self.opens.iter().enumerate() {
            for (b, &ob) in self.opens.iter().enumerate() {
                leq[a * n + b] = oa.is_subset(ob);
            }
        }
        HeytingAlgebra::from_relation(names, leq, None, None)
            .expect("opens of a topology form a distributive lattice")
    }

    /// Every topology on the points `a, b, c, ...` (at most 4 points).
    pub fn all_topologies(n: usize) -> Vec<FiniteSpace> {
        assert!(n <= 4, "topology enumeration is limited to 4 points");
        let names: Vec<String> = ["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect();
        let full = PointSet::full(n);
        let middle: Vec<PointSet> = (1..full.bits())
            .map(PointSet::from_bits)
            .collect();
        let mut out = Vec::new();
        for family in 0u64..(1 << middle.len()) {
            let mut opens = vec![PointSet::EMPTY];
            opens.extend(
                middle
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| family >> i & 1 == 1)
                    .map(|(_, s)| *s),
            );
            if n > 0 {
                opens.push(full);
            }
            let closed = opens.iter().all(|a| {
                opens
                    .iter()
                    .all(|b| opens.contains(&a.union(*b)) && opens.contains(&a.intersection(*b)))
            });
            if closed {
                opens.sort_by_key(|o| (o.len(), o.bits()));
                out.push(FiniteSpace {
                    points: names.clone(),
                    opens,
                });
            }
            if n == 0 {
                break;
            }
        }
        out
    }
}

fn down_sets(below: &[PointSet]) -> Vec<PointSet> {
    let n = below.len();
    let mut opens: Vec<PointSet> = (0..1u64 << n)
        .map(PointSet::from_bits)
        .filter(|s| s.iter().all(|x| below[x].is_subset(*s)))
        .collect();
    opens.sort_by_key(|o| (o.len(), o.bits()));
    opens
}

/// Result of a continuity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    /// A target open whose preimage is not open.
    Discontinuous { witness: PointSet },
}

/// A total map between the points of two finite spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    source: FiniteSpace,
    target: FiniteSpace,
    assignment: Vec<usize>,
}

impl PointMap {
    pub fn new(
        source: FiniteSpace,
        target: FiniteSpace,
        map: &BTreeMap<String, String>,
    ) -> Result<Self, SpaceError> {
        for k in map.keys() {
            source.point_index(k)?;
        }
        let assignment = source
            .points
            .iter()
            .map(|p| {
                let img = map.get(p).ok_or_else(|| SpaceError::MapNotTotal(p.clone()))?;
                target.point_index(img)
            })
            .collect::<Result<_, _>>()?;
        Ok(PointMap {
            source,
            target,
            assignment,
        })
    }

    pub(crate) fn from_indices(source: FiniteSpace, target: FiniteSpace, assignment: Vec<usize>) -> Self {
        assert_eq!(assignment.len(), source.points.len());
        PointMap {
            source,
            target,
            assignment,
        }
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn apply(&self, point: usize) -> usize {
        self.assignment[point]
    }

    pub fn image(&self, set: PointSet) -> PointSet {
        PointSet::from_indices(set.iter().map(|i| self.assignment[i]))
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        PointSet::from_indices(
            (0..self.assignment.len()).filter(|&i| set.contains(self.assignment[i])),
        )
    }

    pub fn is_continuous(&self) -> Continuity {
        self.target
            .opens
            .iter()
            .find(|&&o| !self.source.is_open(self.preimage(o)))
            .map_or(Continuity::Continuous, |&witness| {
                Continuity::Discontinuous { witness }
            })
    }

    pub fn is_bijective(&self) -> bool {
        self.source.points.len() == self.target.points.len()
            && self.image(self.source.full()) == self.target.full()
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<PointMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.assignment.len()];
        for (i, &j) in self.assignment.iter().enumerate() {
            inv[j] = i;
        }
        Some(PointMap::from_indices(self.target.clone(), self.source.clone(), inv))
    }

    pub fn is_homeomorphism(&self) -> bool {
        self.inverse().is_some_and(|inv| {
            self.is_continuous() == Continuity::Continuous
                && inv.is_continuous() == Continuity::Continuous
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_discrete() -> FiniteSpace {
        FiniteSpace::new(&["p", "q"], &[vec![], vec!["p"], vec!["q"], vec!["p", "q"]]).unwrap()
    }

    #[test]
    fn validates_examples() {
        assert!(FiniteSpace::new(&["p", "q"], &[vec![], vec!["p"], vec!["p", "q"]]).is_ok());
        assert_eq!(
            FiniteSpace::new(&["p", "q"], &[vec![], vec!["p"], vec!["q"]]),
            Err(SpaceError::MissingEmptyOrFull)
        );
        assert!(FiniteSpace::new(&["a", "b"], &[vec![], vec!["a", "b"]]).is_ok());
        assert_eq!(
            FiniteSpace::new(&["p"], &[vec![], vec!["z"]]),
            Err(SpaceError::OpenMentionsUnknownPoint("z".into()))
        );
        assert_eq!(
            FiniteSpace::new(
                &["a", "b", "c"],
                &[vec![], vec!["a"], vec!["b"], vec!["a", "b", "c"]]
            ),
            Err(SpaceError::NotClosedUnderUnion("{a}".into(), "{b}".into()))
        );
        assert_eq!(
            FiniteSpace::new(
                &["a", "b", "c"],
                &[vec![], vec!["a", "b"], vec!["b", "c"], vec!["a", "b", "c"]]
            ),
            Err(SpaceError::NotClosedUnderIntersection(
                "{a,b}".into(),
                "{b,c}".into()
            ))
        );
    }

    #[test]
    fn alexandrov_examples() {
        let disc = FiniteSpace::alexandrov::<&str>(&["p", "q"], &[]).unwrap();
        assert_eq!(disc.opens().len(), 4);
        let sier = FiniteSpace::alexandrov(&["p", "q"], &[("p", "q")]).unwrap();
        assert_eq!(sier.opens().len(), 3);
        assert_eq!(sier, FiniteSpace::sierpinski());
        let chain = FiniteSpace::alexandrov(&["p", "q", "r"], &[("p", "q"), ("q", "r")]).unwrap();
        assert_eq!(chain.opens().len(), 4);
        assert!(chain.opens().windows(2).all(|w| w[0].is_subset(w[1])));
        assert!(matches!(
            FiniteSpace::alexandrov(&["p"], &[("p", "x")]),
            Err(SpaceError::UnknownPoint(_))
        ));
    }

    #[test]
    fn sierpinski_operators() {
        let s = FiniteSpace::sierpinski();
        let p = s.subset(&["p"]).unwrap();
        let q = s.subset(&["q"]).unwrap();
        assert_eq!(s.interior(p), p);
        assert_eq!(s.closure(p), s.full());
        assert_eq!(s.boundary(p), q);
        assert_eq!(s.interior(q), PointSet::EMPTY);
        assert_eq!(s.closure(q), q);
        assert_eq!(s.boundary(q), q);
        assert_eq!(s.boundary(PointSet::EMPTY), PointSet::EMPTY);
        assert!(s.subset(&["z"]).is_err());
    }

    #[test]
    fn connectivity_examples() {
        let d = two_point_discrete();
        assert!(!d.is_connected_open(d.full()).unwrap());
        assert_eq!(
            d.components(d.full()).unwrap(),
            vec![PointSet::singleton(0), PointSet::singleton(1)]
        );
        let s = FiniteSpace::sierpinski();
        assert!(s.is_connected_open(s.full()).unwrap());
        let c = FiniteSpace::coarse(&["a", "b"]);
        assert!(c.is_connected_open(c.full()).unwrap());
        assert_eq!(
            s.is_connected_open(PointSet::singleton(1)),
            Err(SpaceError::NotAnOpen("{q}".into()))
        );
    }

    #[test]
    fn continuity_examples() {
        let s = FiniteSpace::sierpinski();
        let id = PointMap::from_indices(s.clone(), s.clone(), vec![0, 1]);
        assert_eq!(id.is_continuous(), Continuity::Continuous);
        let swap = PointMap::from_indices(s.clone(), s.clone(), vec![1, 0]);
        assert_eq!(
            swap.is_continuous(),
            Continuity::Discontinuous {
                witness: PointSet::singleton(0)
            }
        );
        let konst = PointMap::from_indices(two_point_discrete(), s.clone(), vec![1, 1]);
        assert_eq!(konst.is_continuous(), Continuity::Continuous);
        let mut m = BTreeMap::new();
        m.insert("p".to_string(), "q".to_string());
        assert_eq!(
            PointMap::new(s.clone(), s, &m),
            Err(SpaceError::MapNotTotal("q".into()))
        );
    }

    #[test]
    fn opens_lattices() {
        let s = FiniteSpace::sierpinski().opens_lattice();
        assert_eq!(s.len(), 3);
        assert!(s.is_chain());
        let d = two_point_discrete().opens_lattice();
        assert_eq!(d.len(), 4);
        assert!(d.is_boolean());
        let c = FiniteSpace::coarse(&["a", "b"]).opens_lattice();
        assert_eq!(c.len(), 2);
        assert!(c.is_chain());
    }

    #[test]
    fn topology_counts_match_known_sequence() {
        // number of labelled topologies: 1, 1, 4, 29, 355
        let counts: Vec<usize> = (0..=4).map(|n| FiniteSpace::all_topologies(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355]);
    }
}
