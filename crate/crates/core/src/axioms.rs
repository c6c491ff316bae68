//! Connectivity and divisibility axioms for locales.
//!
//! Each axiom is checked in two modes. `AsWritten` evaluates the quantified
//! formula literally, which admits degenerate instantiations (`u = 1, v = 0`
//! splits everything). `Corrected` adds the nondegeneracy side conditions and
//! reads divisibility as "every nonzero element splits into two disjoint
//! nonzero parts whose join is dense in it".

use crate::exec::{self, Exec};
use crate::lattice::{Elem, HeytingAlgebra};
use crate::line::{Endpoint, Interval, OpenRegion};
use crate::rational::{fmt_q, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("sample region #{0} is empty")]
    EmptySampleRegion(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    GlobalConnectivity,
    LocalConnectivity,
    Divisibility,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    AsWritten,
    #[default]
    Corrected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub mode: Mode,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    fn new(axiom: Axiom, mode: Mode, witness: Option<Vec<String>>) -> Self {
        AxiomReport {
            axiom,
            mode,
            holds: witness.is_none(),
            witness,
            note: None,
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

fn names(a: &HeytingAlgebra, es: &[Elem]) -> Vec<String> {
    es.iter().map(|&e| a.name(e).to_string()).collect()
}

/// Splits `z` as `u ∨ v` with `u ∧ v = 0` and both nonzero, if possible.
pub fn split_element(a: &HeytingAlgebra, z: Elem) -> Option<(Elem, Elem)> {
    let bot = a.bottom();
    a.elements().find_map(|u| {
        a.elements()
            .find(|&v| {
                u != bot && v != bot && a.join(u, v) == z && a.meet(u, v) == bot
            })
            .map(|v| (u, v))
    })
}

pub fn is_connected_element(a: &HeytingAlgebra, z: Elem) -> bool {
    split_element(a, z).is_none()
}

/// Every nonzero `z <= within` meets `d`.
pub fn is_dense_in(a: &HeytingAlgebra, d: Elem, within: Elem) -> bool {
    a.elements()
        .filter(|&z| z != a.bottom() && a.leq(z, within))
        .all(|z| a.meet(z, d) != a.bottom())
}

pub fn check_global_connectivity(a: &HeytingAlgebra, mode: Mode) -> AxiomReport {
    let (top, bot) = (a.top(), a.bottom());
    match mode {
        Mode::AsWritten => {
            // u = 1, v = 0 always satisfies 1 = u ∨ v and u ∧ v = 0
            let witness = Some(names(a, &[top, bot]));
            AxiomReport::new(Axiom::GlobalConnectivity, mode, witness)
                .with_note("degenerate witness u = 1, v = 0")
        }
        Mode::Corrected => {
            let witness = split_element(a, top).map(|(u, v)| names(a, &[u, v]));
            AxiomReport::new(Axiom::GlobalConnectivity, mode, witness)
        }
    }
}

pub fn check_local_connectivity(a: &HeytingAlgebra, mode: Mode, exec: Exec) -> AxiomReport {
    let connected: Vec<Elem> = a.elements().filter(|&z| is_connected_element(a, z)).collect();
    let cover_below = |u: Elem| {
        a.join_all(connected.iter().copied().filter(|&z| a.leq(z, u)))
    };
    match mode {
        Mode::AsWritten => {
            let cover = a.join_all(connected.iter().copied());
            let witness = (cover != a.top()).then(|| names(a, &[a.top(), cover]));
            AxiomReport::new(Axiom::LocalConnectivity, mode, witness)
        }
        Mode::Corrected => {
            let elems: Vec<Elem> = a.elements().collect();
            let witness = exec::find_map_first_in(exec, &elems, |&u| {
                let c = cover_below(u);
                (c != u).then(|| names(a, &[u, c]))
            });
            AxiomReport::new(Axiom::LocalConnectivity, mode, witness)
        }
    }
}

pub fn check_divisibility(a: &HeytingAlgebra, mode: Mode, exec: Exec) -> AxiomReport {
    let elems: Vec<Elem> = a.elements().collect();
    let bot = a.bottom();
    let witness = match mode {
        Mode::AsWritten => exec::find_map_first_in(exec, &elems, |&u| {
            let ok = elems.iter().any(|&w| {
                elems.iter().any(|&v| {
                    a.meet(w, v) == bot
                        && elems
                            .iter()
                            .all(|&z| !a.leq(a.join(w, v), z) || z == u)
                })
            });
            (!ok).then(|| names(a, &[u]))
        }),
        Mode::Corrected => exec::find_map_first_in(exec, &elems, |&u| {
            if u == bot {
                return None;
            }
            let parts: Vec<Elem> = elems
                .iter()
                .copied()
                .filter(|&e| e != bot && a.leq(e, u))
                .collect();
            let ok = parts.iter().any(|&w| {
                parts.iter().any(|&v| {
                    a.meet(w, v) == bot && is_dense_in(a, a.join(w, v), u)
                })
            });
            (!ok).then(|| names(a, &[u]))
        }),
    };
    let report = AxiomReport::new(Axiom::Divisibility, mode, witness);
    match (mode, report.holds) {
        (Mode::AsWritten, false) => report.with_note("z = 1 forces u = 1"),
        _ => report,
    }
}

/// All three axioms in the given mode.
pub fn check_all(a: &HeytingAlgebra, mode: Mode, exec: Exec) -> Vec<AxiomReport> {
    vec![
        check_global_connectivity(a, mode),
        check_local_connectivity(a, mode, exec),
        check_divisibility(a, mode, exec),
    ]
}

/// The split produced for one sample region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSplit {
    pub region: OpenRegion,
    pub cut: Q,
    pub lower: OpenRegion,
    pub upper: OpenRegion,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDivisibility {
    pub report: AxiomReport,
    pub splits: Vec<LineSplit>,
}

/// Open sub-intervals of `u` with ends drawn from its endpoints, the
/// midpoints of its intervals and `extra`.
pub fn probe_family(u: &OpenRegion, extra: &[Q]) -> Vec<OpenRegion> {
    let mut ends: Vec<Endpoint> = vec![Endpoint::NegInf, Endpoint::PosInf];
    for iv in u.intervals() {
        ends.push(iv.lo().clone());
        ends.push(iv.hi().clone());
        ends.push(Endpoint::Finite(iv.midpoint()));
    }
    ends.extend(extra.iter().cloned().map(Endpoint::Finite));
    ends.sort();
    ends.dedup();
    let mut out = Vec::new();
    for (i, lo) in ends.iter().enumerate() {
        for hi in &ends[i + 1..] {
            let z = OpenRegion::from_intervals(vec![
                Interval::new(lo.clone(), hi.clone()).expect("sorted distinct ends"),
            ])
            .meet(u);
            if !z.is_empty() {
                out.push(z);
            }
        }
    }
    out
}

fn split_sample(u: &OpenRegion) -> LineSplit {
    let cut = u.intervals()[0].midpoint();
    let (lower, upper) = u.divide(&cut).expect("midpoint lies inside the first interval");
    let joined = lower.join(&upper);
    let passed = lower.meet(&upper).is_empty()
        && !lower.is_empty()
        && !upper.is_empty()
        && joined.is_subset(u)
        && joined.is_dense_in(u)
        && probe_family(u, std::slice::from_ref(&cut))
            .iter()
            .all(|z| !z.meet(&joined).is_empty());
    LineSplit {
        region: u.clone(),
        cut,
        lower,
        upper,
        passed,
    }
}

/// Witness-based divisibility on the line: each sample is cut at the
/// midpoint of its first interval and the two halves are checked for
/// disjointness, nonemptiness and density.
pub fn check_divisibility_line(
    samples: &[OpenRegion],
    exec: Exec,
) -> Result<LineDivisibility, AxiomError> {
    if let Some(i) = samples.iter().position(OpenRegion::is_empty) {
        return Err(AxiomError::EmptySampleRegion(i));
    }
    let splits = exec::map(exec, samples, split_sample);
    let witness = splits.iter().enumerate().find(|(_, s)| !s.passed).map(|(i, s)| {
        vec![i.to_string(), s.region.to_string(), fmt_q(&s.cut)]
    });
    Ok(LineDivisibility {
        report: AxiomReport::new(Axiom::Divisibility, Mode::Corrected, witness),
        splits,
    })
}
