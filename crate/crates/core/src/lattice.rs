//! Finite bounded distributive lattices with Heyting implication.
//!
//! Element identifiers are opaque strings kept in input order; internally
//! elements are addressed by [`Elem`] indices into that order. All meets,
//! joins and implications are tabulated at construction.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("element `{0}` declared twice")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAPartialOrder(String, String),
    #[error("`{a}` and `{b}` have no {kind}")]
    NotALattice {
        a: String,
        b: String,
        kind: &'static str,
    },
    #[error("distributivity fails at ({0}, {1}, {2}): x & (y | z) != (x & y) | (x & z)")]
    NotDistributive(String, String, String),
    #[error("declared {kind} `{declared}` but the {kind} is `{actual}`")]
    BoundMismatch {
        kind: &'static str,
        declared: String,
        actual: String,
    },
}

/// Index of an element inside its algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(usize);

impl Elem {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct HeytingAlgebra {
    names: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    imp: Vec<usize>,
    top: usize,
    bottom: usize,
}

impl fmt::Debug for HeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeytingAlgebra")
            .field("elements", &self.names)
            .field("top", &self.names[self.top])
            .field("bottom", &self.names[self.bottom])
            .finish()
    }
}

/// On-disk lattice description. `order` may be just the cover relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<String>,
}

impl HeytingAlgebra {
    /// Builds and validates an algebra from element names and order pairs
    /// `(a, b)` meaning `a <= b`. The relation is closed reflexively and
    /// transitively first, so a Hasse diagram is enough.
    pub fn build<S: AsRef<str>>(
        elements: &[S],
        order: &[(S, S)],
        top: Option<&str>,
        bottom: Option<&str>,
    ) -> Result<Self, LatticeError> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return Err(LatticeError::DuplicateElement(n.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| LatticeError::UnknownElement(s.to_string()))
        };
        let n = names.len();
        let mut leq = vec![false; n * n];
        for (a, b) in order {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            leq[a * n + b] = true;
        }
        let top = top.map(lookup).transpose()?;
        let bottom = bottom.map(lookup).transpose()?;
        Self::from_relation(names, leq, top, bottom)
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self, LatticeError> {
        Self::build(
            &file.elements,
            &file.order,
            file.top.as_deref(),
            file.bottom.as_deref(),
        )
    }

    /// Emits the cover relation (Hasse diagram) with explicit bounds.
    pub fn to_file(&self) -> LatticeFile {
        let n = self.len();
        let mut order = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && self.leq[a * n + b]
                    && !(0..n).any(|c| {
                        c != a && c != b && self.leq[a * n + c] && self.leq[c * n + b]
                    })
                {
                    order.push((self.names[a].clone(), self.names[b].clone()));
                }
            }
        }
        LatticeFile {
            elements: self.names.clone(),
            order,
            top: Some(self.names[self.top].clone()),
            bottom: Some(self.names[self.bottom].clone()),
        }
    }

    /// Validates a raw `n * n` relation matrix (row-major, `leq[a*n+b]` for `a <= b`).
    pub(crate) fn from_relation(
        names: Vec<String>,
        mut leq: Vec<bool>,
        top: Option<usize>,
        bottom: Option<usize>,
    ) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for a in 0..n {
            leq[a * n + a] = true;
        }
        for k in 0..n {
            for a in 0..n {
                if leq[a * n + k] {
                    for b in 0..n {
                        if leq[k * n + b] {
                            leq[a * n + b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq[a * n + b] && leq[b * n + a] {
                    return Err(LatticeError::NotAPartialOrder(
                        names[a].clone(),
                        names[b].clone(),
                    ));
                }
            }
        }

        let le = |a: usize, b: usize| leq[a * n + b];
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let glb = (0..n).find(|&c| {
                    le(c, a) && le(c, b) && (0..n).all(|d| !(le(d, a) && le(d, b)) || le(d, c))
                });
                let lub = (0..n).find(|&c| {
                    le(a, c) && le(b, c) && (0..n).all(|d| !(le(a, d) && le(b, d)) || le(c, d))
                });
                let missing = |kind| LatticeError::NotALattice {
                    a: names[a].clone(),
                    b: names[b].clone(),
                    kind,
                };
                meet[a * n + b] = glb.ok_or_else(|| missing("meet"))?;
                join[a * n + b] = lub.ok_or_else(|| missing("join"))?;
            }
        }

        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = meet[x * n + join[y * n + z]];
                    let rhs = join[meet[x * n + y] * n + meet[x * n + z]];
                    if lhs != rhs {
                        return Err(LatticeError::NotDistributive(
                            names[x].clone(),
                            names[y].clone(),
                            names[z].clone(),
                        ));
                    }
                }
            }
        }

        let actual_top = (1..n).fold(0, |acc, e| join[acc * n + e]);
        let actual_bottom = (1..n).fold(0, |acc, e| meet[acc * n + e]);
        for (kind, declared, actual) in [
            ("top", top, actual_top),
            ("bottom", bottom, actual_bottom),
        ] {
            if let Some(d) = declared {
                if d != actual {
                    return Err(LatticeError::BoundMismatch {
                        kind,
                        declared: names[d].clone(),
                        actual: names[actual].clone(),
                    });
                }
            }
        }

        // Largest w with w & u <= v, by exhaustive search over all w.
        let mut imp = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                let candidates: Vec<usize> = (0..n).filter(|&w| le(meet[w * n + u], v)).collect();
                imp[u * n + v] = *candidates
                    .iter()
                    .find(|&&c| candidates.iter().all(|&w| le(w, c)))
                    .expect("distributive lattice has a largest candidate");
            }
        }

        Ok(HeytingAlgebra {
            names,
            leq,
            meet,
            join,
            imp,
            top: actual_top,
            bottom: actual_bottom,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Elem> + Clone {
        (0..self.names.len()).map(Elem)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.0]
    }

    pub fn element(&self, name: &str) -> Result<Elem, LatticeError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Elem)
            .ok_or_else(|| LatticeError::UnknownElement(name.to_string()))
    }

    /// Element from a raw index; panics when out of range.
    pub fn elem(&self, index: usize) -> Elem {
        assert!(index < self.len(), "element index {index} out of range");
        Elem(index)
    }

    pub fn top(&self) -> Elem {
        Elem(self.top)
    }

    pub fn bottom(&self) -> Elem {
        Elem(self.bottom)
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.0 * self.len() + b.0]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.meet[a.0 * self.len() + b.0])
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.join[a.0 * self.len() + b.0])
    }

    pub fn implies(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.imp[a.0 * self.len() + b.0])
    }

    /// `a -> bottom`.
    pub fn pseudo_complement(&self, a: Elem) -> Elem {
        self.implies(a, self.bottom())
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.bottom(), |acc, e| self.join(acc, e))
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// True when every element equals its double pseudo-complement.
    pub fn is_boolean(&self) -> bool {
        self.elements()
            .all(|a| self.pseudo_complement(self.pseudo_complement(a)) == a)
    }

    pub fn meet_named(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.meet(self.element(a)?, self.element(b)?)))
    }

    pub fn join_named(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.join(self.element(a)?, self.element(b)?)))
    }

    pub fn implies_named(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.implies(self.element(a)?, self.element(b)?)))
    }

    pub fn pseudo_complement_named(&self, a: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.pseudo_complement(self.element(a)?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> HeytingAlgebra {
        HeytingAlgebra::build(&["0", "a", "1"], &[("0", "a"), ("a", "1")], None, None).unwrap()
    }

    fn diamond() -> HeytingAlgebra {
        HeytingAlgebra::build(
            &["0", "x", "y", "1"],
            &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn three_chain_tables() {
        let c = chain3();
        assert_eq!(c.meet_named("a", "1").unwrap(), "a");
        assert_eq!(c.join_named("a", "0").unwrap(), "a");
        assert_eq!(c.implies_named("a", "0").unwrap(), "0");
        assert_eq!(c.implies_named("0", "a").unwrap(), "1");
        assert_eq!(c.implies_named("1", "a").unwrap(), "a");
        assert_eq!(c.pseudo_complement_named("a").unwrap(), "0");
        assert_eq!(c.pseudo_complement_named("0").unwrap(), "1");
        assert!(c.is_chain());
        assert!(!c.is_boolean());
    }

    #[test]
    fn diamond_tables() {
        let d = diamond();
        assert_eq!(d.meet_named("x", "y").unwrap(), "0");
        assert_eq!(d.join_named("x", "y").unwrap(), "1");
        assert_eq!(d.implies_named("x", "y").unwrap(), "y");
        assert_eq!(d.pseudo_complement_named("x").unwrap(), "y");
        assert!(d.is_boolean());
    }

    #[test]
    fn pentagon_is_not_distributive() {
        // N5: 0 < a < c < 1, 0 < b < 1
        let err = HeytingAlgebra::build(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")],
            None,
            None,
        )
        .unwrap_err();
        let LatticeError::NotDistributive(x, y, z) = err else {
            panic!("expected NotDistributive, got {err:?}");
        };
        // brute-force recheck of the reported triple on the raw order
        let up: &[(&str, &[&str])] = &[
            ("0", &["0", "a", "b", "c", "1"]),
            ("a", &["a", "c", "1"]),
            ("b", &["b", "1"]),
            ("c", &["c", "1"]),
            ("1", &["1"]),
        ];
        let le = |p: &str, q: &str| up.iter().find(|(e, _)| *e == p).unwrap().1.contains(&q);
        let all = ["0", "a", "b", "c", "1"];
        let glb = |p: &str, q: &str| {
            *all.iter()
                .filter(|&&c| le(c, p) && le(c, q))
                .find(|&&c| all.iter().all(|&d| !(le(d, p) && le(d, q)) || le(d, c)))
                .unwrap()
        };
        let lub = |p: &str, q: &str| {
            *all.iter()
                .filter(|&&c| le(p, c) && le(q, c))
                .find(|&&c| all.iter().all(|&d| !(le(p, d) && le(q, d)) || le(c, d)))
                .unwrap()
        };
        assert_ne!(glb(&x, lub(&y, &z)), lub(glb(&x, &y), glb(&x, &z)));
    }

    #[test]
    fn cycles_and_missing_bounds_are_rejected() {
        assert!(matches!(
            HeytingAlgebra::build(&["a", "b"], &[("a", "b"), ("b", "a")], None, None),
            Err(LatticeError::NotAPartialOrder(..))
        ));
        // two incomparable elements with nothing above or below
        assert!(matches!(
            HeytingAlgebra::build(&["a", "b"], &[], None, None),
            Err(LatticeError::NotALattice { .. })
        ));
        assert!(matches!(
            HeytingAlgebra::build(&["0", "1"], &[("0", "1")], Some("0"), None),
            Err(LatticeError::BoundMismatch { kind: "top", .. })
        ));
        assert!(matches!(
            HeytingAlgebra::build(&["0", "1"], &[("0", "z")], None, None),
            Err(LatticeError::UnknownElement(_))
        ));
        assert_eq!(
            HeytingAlgebra::build::<&str>(&[], &[], None, None),
            Err(LatticeError::Empty)
        );
    }

    #[test]
    fn unknown_element_lookup() {
        assert_eq!(
            chain3().meet_named("a", "q"),
            Err(LatticeError::UnknownElement("q".into()))
        );
    }

    #[test]
    fn file_round_trip_keeps_structure() {
        let d = diamond();
        let file = d.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: LatticeFile = serde_json::from_str(&json).unwrap();
        assert_eq!(HeytingAlgebra::from_file(&back).unwrap(), d);
    }

    #[test]
    fn parses_spec_json_shape() {
        let f: LatticeFile = serde_json::from_str(
            r#"{"elements": ["0","a","1"], "order": [["0","a"],["a","1"]], "top": "1", "bottom": "0"}"#,
        )
        .unwrap();
        assert_eq!(HeytingAlgebra::from_file(&f).unwrap(), chain3());
    }
}
