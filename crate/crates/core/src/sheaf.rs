//! Set-valued presheaves on finite spaces: functoriality, gluing, stalks,
//! sections around closed subsets and invariant hulls under a homeomorphism.
//!
//! Stalks are computed with the minimal-open shortcut: in a finite space
//! the neighbourhoods of a set have a least element, and every germ class
//! is represented by exactly one section over it.

use crate::exec::{self, Exec};
use crate::space::{FiniteSpace, PointMap, PointSet, SpaceError, SpaceFile};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SheafError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("no section set declared for open {0}")]
    MissingSectionSet(String),
    #[error("open index `{0}` is not an index into the opens list")]
    BadOpenIndex(String),
    #[error("restriction key `{0}` is not of the form `V->U`")]
    BadRestrictionKey(String),
    #[error("{1} is not contained in {0}")]
    NotAnInclusion(String, String),
    #[error("section `{section}` is not declared over {open}")]
    UnknownSection { open: String, section: String },
    #[error("section `{section}` declared twice over {open}")]
    DuplicateSection { open: String, section: String },
    #[error("no restriction from {0} to {1}")]
    MissingRestriction(String, String),
    #[error("restriction from {from} to {to} does not map section `{section}`")]
    RestrictionNotTotal {
        from: String,
        to: String,
        section: String,
    },
    #[error("restriction from {0} to itself is not the identity")]
    IdentityViolated(String),
    #[error("restriction {2} -> {0} differs from the composite through {1}")]
    CompositionViolated(String, String, String),
    #[error("{0} is not closed")]
    NotClosed(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("map is not a homeomorphism of the space onto itself")]
    NotAHomeomorphism,
}

/// On-disk presheaf. Opens are addressed by their index in `space.opens`;
/// restriction keys read `"V->U"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafFile {
    pub space: SpaceFile,
    pub sections: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

/// A validated presheaf: section labels per open and a total, functorial
/// restriction table for every inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    space: FiniteSpace,
    sections: Vec<Vec<String>>,
    /// `restrictions[v * m + u]` for `opens[u] ⊆ opens[v]`.
    restrictions: Vec<Option<Vec<usize>>>,
}

impl Presheaf {
    /// Validates sections and restrictions. Restrictions need only be given
    /// along the cover relation of the opens; missing ones are generated by
    /// composition and every generated or declared map is then checked for
    /// functoriality.
    pub fn new(
        space: FiniteSpace,
        sections: Vec<Vec<String>>,
        declared: Vec<((usize, usize), Vec<usize>)>,
    ) -> Result<Self, SheafError> {
        let m = space.opens().len();
        let show = |i: usize| space.show(space.opens()[i]);
        if sections.len() != m {
            return Err(SheafError::MissingSectionSet(show(sections.len().min(m - 1))));
        }
        for (i, secs) in sections.iter().enumerate() {
            for (j, s) in secs.iter().enumerate() {
                if secs[..j].contains(s) {
                    return Err(SheafError::DuplicateSection {
                        open: show(i),
                        section: s.clone(),
                    });
                }
            }
        }
        let mut table: Vec<Option<Vec<usize>>> = vec![None; m * m];
        for ((v, u), map) in declared {
            if u >= m || v >= m {
                return Err(SheafError::BadOpenIndex(format!("{v}->{u}")));
            }
            if !space.opens()[u].is_subset(space.opens()[v]) {
                return Err(SheafError::NotAnInclusion(show(v), show(u)));
            }
            if map.len() != sections[v].len() {
                return Err(SheafError::RestrictionNotTotal {
                    from: show(v),
                    to: show(u),
                    section: sections[v][map.len().min(sections[v].len().saturating_sub(1))].clone(),
                });
            }
            if map.iter().any(|&t| t >= sections[u].len()) {
                return Err(SheafError::UnknownSection {
                    open: show(u),
                    section: "?".into(),
                });
            }
            table[v * m + u] = Some(map);
        }
        for u in 0..m {
            let id: Vec<usize> = (0..sections[u].len()).collect();
            match &table[u * m + u] {
                Some(map) if *map != id => return Err(SheafError::IdentityViolated(show(u))),
                _ => table[u * m + u] = Some(id),
            }
        }
        let opens = space.opens();
        let strict = |a: usize, b: usize| a != b && opens[a].is_subset(opens[b]);
        loop {
            let mut changed = false;
            for v in 0..m {
                for u in 0..m {
                    if table[v * m + u].is_some() || !strict(u, v) {
                        continue;
                    }
                    let via = (0..m).find(|&w| {
                        strict(u, w)
                            && strict(w, v)
                            && table[v * m + w].is_some()
                            && table[w * m + u].is_some()
                    });
                    if let Some(w) = via {
                        let outer = table[v * m + w].as_ref().expect("checked");
                        let inner = table[w * m + u].as_ref().expect("checked");
                        table[v * m + u] = Some(outer.iter().map(|&s| inner[s]).collect());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for v in 0..m {
            for u in 0..m {
                if opens[u].is_subset(opens[v]) && table[v * m + u].is_none() {
                    return Err(SheafError::MissingRestriction(show(v), show(u)));
                }
            }
        }
        for v in 0..m {
            for w in 0..m {
                if !opens[w].is_subset(opens[v]) {
                    continue;
                }
                for u in 0..m {
                    if !opens[u].is_subset(opens[w]) {
                        continue;
                    }
                    let direct = table[v * m + u].as_ref().expect("total");
                    let outer = table[v * m + w].as_ref().expect("total");
                    let inner = table[w * m + u].as_ref().expect("total");
                    if direct.iter().zip(outer).any(|(&d, &o)| d != inner[o]) {
                        return Err(SheafError::CompositionViolated(show(u), show(w), show(v)));
                    }
                }
            }
        }
        Ok(Presheaf {
            space,
            sections,
            restrictions: table,
        })
    }

    pub fn from_file(file: &PresheafFile) -> Result<Self, SheafError> {
        let space = FiniteSpace::from_file(&file.space)?;
        let m = space.opens().len();
        let parse_index = |s: &str| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&i| i < m)
                .ok_or_else(|| SheafError::BadOpenIndex(s.to_string()))
        };
        let mut sections: Vec<Option<Vec<String>>> = vec![None; m];
        for (k, secs) in &file.sections {
            sections[parse_index(k)?] = Some(secs.clone());
        }
        let sections = sections
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| SheafError::MissingSectionSet(space.show(space.opens()[i]))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut declared = Vec::new();
        for (key, map) in &file.restrictions {
            let (v, u) = key
                .split_once("->")
                .ok_or_else(|| SheafError::BadRestrictionKey(key.clone()))?;
            let (v, u) = (parse_index(v)?, parse_index(u)?);
            let show = |i: usize| space.show(space.opens()[i]);
            let lookup = |open: usize, label: &str| {
                sections[open]
                    .iter()
                    .position(|s| s == label)
                    .ok_or_else(|| SheafError::UnknownSection {
                        open: show(open),
                        section: label.to_string(),
                    })
            };
            for src in map.keys() {
                lookup(v, src)?;
            }
            let table = sections[v]
                .iter()
                .map(|s| {
                    let img = map.get(s).ok_or_else(|| SheafError::RestrictionNotTotal {
                        from: show(v),
                        to: show(u),
                        section: s.clone(),
                    })?;
                    lookup(u, img)
                })
                .collect::<Result<Vec<_>, _>>()?;
            declared.push(((v, u), table));
        }
        Self::new(space, sections, declared)
    }

    /// Writes every non-identity restriction explicitly.
    pub fn to_file(&self) -> PresheafFile {
        let m = self.space.opens().len();
        let sections = (0..m).map(|i| (i.to_string(), self.sections[i].clone())).collect();
        let mut restrictions = BTreeMap::new();
        for v in 0..m {
            for u in 0..m {
                if u == v {
                    continue;
                }
                if let Some(map) = &self.restrictions[v * m + u] {
                    let entry = map
                        .iter()
                        .enumerate()
                        .map(|(s, &t)| (self.sections[v][s].clone(), self.sections[u][t].clone()))
                        .collect();
                    restrictions.insert(format!("{v}->{u}"), entry);
                }
            }
        }
        PresheafFile {
            space: self.space.to_file(),
            sections,
            restrictions,
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn sections(&self, open: usize) -> &[String] {
        &self.sections[open]
    }

    pub fn label(&self, open: usize, section: usize) -> &str {
        &self.sections[open][section]
    }

    /// Restriction of section `s` over `opens[from]` to `opens[to]`; panics
    /// unless `opens[to] ⊆ opens[from]`.
    pub fn restrict(&self, from: usize, to: usize, s: usize) -> usize {
        let m = self.space.opens().len();
        self.restrictions[from * m + to]
            .as_ref()
            .expect("restriction along an inclusion")[s]
    }

    fn open_show(&self, i: usize) -> String {
        self.space.show(self.space.opens()[i])
    }

    /// Germ classes over all opens containing `site`, each keyed by its
    /// restriction to the least such open.
    fn germs_around(&self, site: PointSet, at: StalkSite) -> Stalk {
        let opens = self.space.opens();
        let neighbourhoods: Vec<usize> = (0..opens.len())
            .filter(|&i| site.is_subset(opens[i]))
            .collect();
        let least = self.space.minimal_open_containing(site);
        let canonical_open = self
            .space
            .open_index(least)
            .expect("opens are closed under intersection");
        let mut classes: Vec<GermClass> = (0..self.sections[canonical_open].len())
            .map(|s| GermClass {
                canonical: s,
                members: Vec::new(),
            })
            .collect();
        for &u in &neighbourhoods {
            for s in 0..self.sections[u].len() {
                classes[self.restrict(u, canonical_open, s)].members.push((u, s));
            }
        }
        Stalk {
            at,
            neighbourhoods,
            canonical_open,
            classes,
        }
    }

    pub fn stalk_at_point(&self, point: &str) -> Result<Stalk, SheafError> {
        let x = self.space.point_index(point)?;
        Ok(self.germs_around(PointSet::singleton(x), StalkSite::Point(point.to_string())))
    }

    /// Sections on the neighbourhoods of a closed set, glued along
    /// restriction.
    pub fn topos_of<S: AsRef<str>>(&self, closed: &[S]) -> Result<Stalk, SheafError> {
        let k = self.space.subset(closed)?;
        if k.is_empty() {
            return Err(SheafError::EmptySubset);
        }
        if !self.space.is_closed(k) {
            return Err(SheafError::NotClosed(self.space.show(k)));
        }
        Ok(self.germs_around(k, StalkSite::Closed(self.space.names_of(k))))
    }

    /// Verifies the gluing condition over every irredundant cover of every
    /// open, including the empty cover of the empty open (which forces a
    /// single section over it). Nonempty opens are examined first, in open
    /// order.
    pub fn check_sheaf(&self, exec: Exec) -> SheafVerdict {
        let opens = self.space.opens();
        let mut order: Vec<usize> = (0..opens.len()).filter(|&i| !opens[i].is_empty()).collect();
        order.extend((0..opens.len()).filter(|&i| opens[i].is_empty()));
        let tasks: Vec<(usize, Vec<usize>)> = order
            .into_iter()
            .flat_map(|u| irredundant_covers(&self.space, u).into_iter().map(move |c| (u, c)))
            .collect();
        exec::find_map_first_in(exec, &tasks, |(u, cover)| self.gluing_failure(*u, cover))
            .map_or(SheafVerdict::Sheaf, SheafVerdict::NotSheaf)
    }

    /// First compatible family on `cover` whose amalgamation over `open` is
    /// missing or not unique.
    pub fn gluing_failure(&self, open: usize, cover: &[usize]) -> Option<GluingWitness> {
        let mut family = Vec::with_capacity(cover.len());
        self.search_families(open, cover, &mut family)
    }

    fn compatible_with_prefix(&self, cover: &[usize], family: &[usize], next: usize) -> bool {
        let opens = self.space.opens();
        let j = family.len();
        (0..j).all(|i| {
            let meet = opens[cover[i]].intersection(opens[cover[j]]);
            let w = self.space.open_index(meet).expect("opens closed under meet");
            self.restrict(cover[i], w, family[i]) == self.restrict(cover[j], w, next)
        })
    }

    fn search_families(
        &self,
        open: usize,
        cover: &[usize],
        family: &mut Vec<usize>,
    ) -> Option<GluingWitness> {
        if family.len() == cover.len() {
            let amalgamations: Vec<usize> = (0..self.sections[open].len())
                .filter(|&t| {
                    cover
                        .iter()
                        .zip(family.iter())
                        .all(|(&c, &s)| self.restrict(open, c, t) == s)
                })
                .collect();
            return (amalgamations.len() != 1).then(|| GluingWitness {
                open,
                cover: cover.to_vec(),
                family: family.clone(),
                amalgamations,
            });
        }
        let member = cover[family.len()];
        for s in 0..self.sections[member].len() {
            if self.compatible_with_prefix(cover, family, s) {
                family.push(s);
                let found = self.search_families(open, cover, family);
                family.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    /// Human-readable rendering of a gluing witness.
    pub fn describe(&self, w: &GluingWitness) -> GluingReport {
        GluingReport {
            open: self.open_show(w.open),
            cover: w.cover.iter().map(|&c| self.open_show(c)).collect(),
            family: w
                .cover
                .iter()
                .zip(&w.family)
                .map(|(&c, &s)| (self.open_show(c), self.label(c, s).to_string()))
                .collect(),
            amalgamations: w
                .amalgamations
                .iter()
                .map(|&t| self.label(w.open, t).to_string())
                .collect(),
        }
    }
}

/// Families of nonempty opens inside `opens[u]` whose union is `opens[u]`
/// and in which no member lies inside the union of the others.
pub fn irredundant_covers(space: &FiniteSpace, u: usize) -> Vec<Vec<usize>> {
    let opens = space.opens();
    let target = opens[u];
    if target.is_empty() {
        return vec![vec![]];
    }
    let members: Vec<usize> = (0..opens.len())
        .filter(|&i| !opens[i].is_empty() && opens[i].is_subset(target))
        .collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << members.len()) {
        let family: Vec<usize> = (0..members.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| members[b])
            .collect();
        let union = family.iter().fold(PointSet::EMPTY, |acc, &i| acc.union(opens[i]));
        if union != target {
            continue;
        }
        let irredundant = family.iter().all(|&i| {
            let rest = family
                .iter()
                .filter(|&&j| j != i)
                .fold(PointSet::EMPTY, |acc, &j| acc.union(opens[j]));
            !opens[i].is_subset(rest)
        });
        if irredundant {
            out.push(family);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StalkSite {
    Point(String),
    Closed(Vec<String>),
}

/// Germ class: all `(open, section)` pairs that agree near the site, keyed
/// by their common restriction to the least neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GermClass {
    pub canonical: usize,
    pub members: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stalk {
    pub at: StalkSite,
    /// Indices of the opens containing the site.
    pub neighbourhoods: Vec<usize>,
    /// Index of the least open containing the site.
    pub canonical_open: usize,
    /// One class per section over `canonical_open`, in section order.
    pub classes: Vec<GermClass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingWitness {
    pub open: usize,
    pub cover: Vec<usize>,
    /// Section index chosen on each cover member.
    pub family: Vec<usize>,
    /// Sections over `open` restricting to the family; never exactly one.
    pub amalgamations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingReport {
    pub open: String,
    pub cover: Vec<String>,
    pub family: Vec<(String, String)>,
    pub amalgamations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SheafVerdict {
    Sheaf,
    NotSheaf(GluingWitness),
}

/// Intersection of all opens fixed by `phi` that contain `k`.
pub fn invariant_hull(phi: &PointMap, k: PointSet) -> Result<PointSet, SheafError> {
    let space = phi.source();
    if space != phi.target() || !phi.is_homeomorphism() {
        return Err(SheafError::NotAHomeomorphism);
    }
    Ok(space
        .opens()
        .iter()
        .filter(|&&u| k.is_subset(u) && phi.image(u) == u)
        .fold(space.full(), |acc, &u| acc.intersection(u)))
}

/// Random functorial presheaf on `space`, used as a test and benchmark
/// fixture.
///
/// Sections over `U` are pairs of a tuple of point values on `U` and a tag;
/// restriction projects the tuple and clamps the tag to a cap that grows
/// with `|U|`. Clamping makes some presheaves non-separated; missing tuples
/// make others fail to glue. Returns `None` if some open would carry more
/// than `max_sections` sections.
pub fn random_presheaf<R: Rng>(space: &FiniteSpace, rng: &mut R, max_sections: usize) -> Option<Presheaf> {
    let n = space.points().len();
    let opens = space.opens();
    let m = opens.len();
    let values: Vec<u8> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let threshold = rng.gen_range(1..=n + 1);
    let cap = |s: PointSet| u8::from(s.len() >= threshold);
    type Section = (Vec<(usize, u8)>, u8);
    let restrict = |sec: &Section, to: PointSet| -> Section {
        (
            sec.0.iter().copied().filter(|(x, _)| to.contains(*x)).collect(),
            sec.1.min(cap(to)),
        )
    };
    let random_section = |rng: &mut R, on: PointSet| -> Section {
        (
            on.iter().map(|x| (x, rng.gen_range(0..values[x]))).collect(),
            rng.gen_range(0..=cap(on)),
        )
    };
    // largest opens first so every section is pushed down before use
    let mut by_size: Vec<usize> = (0..m).collect();
    by_size.sort_by_key(|&i| std::cmp::Reverse(opens[i].len()));
    let mut secs: Vec<Vec<Section>> = vec![Vec::new(); m];
    for &u in &by_size {
        let mut here: Vec<Section> = Vec::new();
        for &v in &by_size {
            if v != u && opens[u].is_subset(opens[v]) {
                for s in &secs[v] {
                    let r = restrict(s, opens[u]);
                    if !here.contains(&r) {
                        here.push(r);
                    }
                }
            }
        }
        let extra = if here.is_empty() { rng.gen_range(1..=3) } else { rng.gen_range(0..=2) };
        for _ in 0..extra {
            let s = random_section(rng, opens[u]);
            if !here.contains(&s) {
                here.push(s);
            }
        }
        if here.len() > max_sections {
            return None;
        }
        here.sort();
        secs[u] = here;
    }
    let label = |sec: &Section| {
        let body: String = sec
            .0
            .iter()
            .map(|(x, v)| format!("{}{}", space.points()[*x], v))
            .collect();
        format!("{}#{}", if body.is_empty() { "nil" } else { &body }, sec.1)
    };
    let sections: Vec<Vec<String>> = secs.iter().map(|s| s.iter().map(label).collect()).collect();
    let mut declared = Vec::new();
    for v in 0..m {
        for u in 0..m {
            if u != v && opens[u].is_subset(opens[v]) {
                let map = secs[v]
                    .iter()
                    .map(|s| {
                        let r = restrict(s, opens[u]);
                        secs[u].iter().position(|t| *t == r).expect("closed downward")
                    })
                    .collect();
                declared.push(((v, u), map));
            }
        }
    }
    Some(Presheaf::new(space.clone(), sections, declared).expect("projection is functorial"))
}
