//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls the optimized paths it is used to check.
#![allow(dead_code)]

use continuum::lattice::{Elem, HeytingAlgebra};
use continuum::line::{Endpoint, Interval, OpenRegion};
use continuum::rational::Q;
use continuum::sheaf::{Presheaf, Stalk};
use continuum::space::{FiniteSpace, PointSet};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use serde::de::DeserializeOwned;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_str(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

pub fn load<T: DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture exists");
    serde_json::from_str(&text).expect("fixture parses")
}

// ---------- lattices ----------

/// Greatest lower bound found by scanning the order relation only.
pub fn glb(a: &HeytingAlgebra, x: Elem, y: Elem) -> Elem {
    let lower: Vec<Elem> = a.elements().filter(|&z| a.leq(z, x) && a.leq(z, y)).collect();
    *lower
        .iter()
        .find(|&&z| lower.iter().all(|&w| a.leq(w, z)))
        .expect("meet exists")
}

pub fn lub(a: &HeytingAlgebra, x: Elem, y: Elem) -> Elem {
    let upper: Vec<Elem> = a.elements().filter(|&z| a.leq(x, z) && a.leq(y, z)).collect();
    *upper
        .iter()
        .find(|&&z| upper.iter().all(|&w| a.leq(z, w)))
        .expect("join exists")
}

/// Largest `w` with `glb(w, u) <= v`.
pub fn implies_oracle(a: &HeytingAlgebra, u: Elem, v: Elem) -> Elem {
    let cands: Vec<Elem> = a.elements().filter(|&w| a.leq(glb(a, w, u), v)).collect();
    *cands
        .iter()
        .find(|&&z| cands.iter().all(|&w| a.leq(w, z)))
        .expect("implication exists")
}

// ---------- finite spaces ----------

/// Every topology on `n` labelled points, via reflexive transitive relations.
pub fn preorder_topologies(n: usize) -> Vec<FiniteSpace> {
    let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                le[i][j] = true;
            }
        }
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| !le[i][j] || (0..n).all(|k| !le[j][k] || le[i][k]))
        });
        if !transitive {
            continue;
        }
        let rel: Vec<(String, String)> = pairs
            .iter()
            .filter(|&&(i, j)| le[i][j])
            .map(|&(i, j)| (names[i].clone(), names[j].clone()))
            .collect();
        out.push(FiniteSpace::alexandrov(&names, &rel).expect("preorder"));
    }
    out
}

pub fn interior_oracle(s: &FiniteSpace, set: PointSet) -> PointSet {
    s.opens()
        .iter()
        .filter(|o| o.is_subset(set))
        .fold(PointSet::EMPTY, |acc, &o| acc.union(o))
}

/// Points every neighbourhood of which meets `set`.
pub fn closure_oracle(s: &FiniteSpace, set: PointSet) -> PointSet {
    let n = s.points().len();
    PointSet::from_indices((0..n).filter(|&x| {
        s.opens()
            .iter()
            .filter(|o| o.contains(x))
            .all(|o| !o.is_disjoint(set))
    }))
}

pub fn subsets(n: usize) -> impl Iterator<Item = PointSet> {
    (0u64..(1 << n)).map(PointSet::from_bits)
}

// ---------- presheaves ----------

pub type Partition = BTreeSet<BTreeSet<(usize, usize)>>;

/// Germ classes at `site` by brute force: pairs `(U, s)` with `site ⊆ U`
/// identified whenever some open `W` between `site` and `U ∩ V` sees equal
/// restrictions, closed transitively.
pub fn germ_quotient(p: &Presheaf, site: PointSet) -> Partition {
    let opens = p.space().opens();
    let nbhd: Vec<usize> = (0..opens.len()).filter(|&i| site.is_subset(opens[i])).collect();
    let items: Vec<(usize, usize)> = nbhd
        .iter()
        .flat_map(|&u| (0..p.sections(u).len()).map(move |s| (u, s)))
        .collect();
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let ((u, s), (v, t)) = (items[i], items[j]);
            let common = opens[u].intersection(opens[v]);
            let agree = nbhd.iter().any(|&w| {
                opens[w].is_subset(common) && p.restrict(u, w, s) == p.restrict(v, w, t)
            });
            if agree {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (i, &item) in items.iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().insert(item);
    }
    classes.into_values().collect()
}

pub fn stalk_partition(s: &Stalk) -> Partition {
    s.classes
        .iter()
        .map(|c| c.members.iter().copied().collect())
        .collect()
}

/// Gluing over every cover (not only irredundant ones) of every open:
/// `true` iff each compatible family has exactly one amalgamation.
pub fn glues_over_all_covers(p: &Presheaf) -> bool {
    let opens = p.space().opens();
    let m = opens.len();
    for u in 0..m {
        let below: Vec<usize> = (0..m).filter(|&i| opens[i].is_subset(opens[u])).collect();
        for mask in 0u64..(1 << below.len()) {
            let cover: Vec<usize> = (0..below.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| below[k])
                .collect();
            let union = cover.iter().fold(PointSet::EMPTY, |acc, &i| acc.union(opens[i]));
            if union != opens[u] {
                continue;
            }
            let sizes: Vec<usize> = cover.iter().map(|&i| p.sections(i).len()).collect();
            let total: usize = sizes.iter().product();
            for mut code in 0..total {
                let family: Vec<usize> = sizes
                    .iter()
                    .map(|&s| {
                        let c = code % s;
                        code /= s;
                        c
                    })
                    .collect();
                let compatible = (0..cover.len()).all(|i| {
                    (0..cover.len()).all(|j| {
                        let w = opens[cover[i]].intersection(opens[cover[j]]);
                        let w = p.space().open_index(w).expect("open");
                        p.restrict(cover[i], w, family[i]) == p.restrict(cover[j], w, family[j])
                    })
                });
                if !compatible {
                    continue;
                }
                let amalgamations = (0..p.sections(u).len())
                    .filter(|&s| (0..cover.len()).all(|i| p.restrict(u, cover[i], s) == family[i]))
                    .count();
                if amalgamations != 1 {
                    return false;
                }
            }
        }
    }
    true
}

// ---------- rationals and polynomials ----------

pub fn random_q<R: Rng>(rng: &mut R, span: i64, max_den: i64) -> Q {
    Q::new(rng.gen_range(-span..=span).into(), rng.gen_range(1..=max_den).into())
}

pub fn random_coeffs<R: Rng>(rng: &mut R, max_degree: usize) -> Vec<Q> {
    let d = rng.gen_range(0..=max_degree);
    (0..=d).map(|_| random_q(rng, 9, 5)).collect()
}

/// Power-rule derivative of a constant-first coefficient list.
pub fn symbolic_derivative(coeffs: &[Q]) -> Vec<Q> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Q::from_integer((k as i64).into()))
        .collect()
}

pub fn horner(coeffs: &[Q], x: &Q) -> Q {
    coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

// ---------- regions ----------

/// Pointwise membership from the raw interval list.
pub fn in_region(r: &OpenRegion, x: &Q) -> bool {
    r.intervals().iter().any(|iv| iv.contains(x))
}

/// Whether `x` lies in the closure of `r`.
pub fn in_closure(r: &OpenRegion, x: &Q) -> bool {
    let x = Endpoint::Finite(x.clone());
    r.intervals().iter().any(|iv| *iv.lo() <= x && x <= *iv.hi())
}

/// Endpoints of all regions, the gaps between them and points beyond.
pub fn probe_points(regions: &[&OpenRegion]) -> Vec<Q> {
    let mut ends: Vec<Q> = regions
        .iter()
        .flat_map(|r| r.intervals().iter())
        .flat_map(|iv| [iv.lo().finite().cloned(), iv.hi().finite().cloned()])
        .flatten()
        .collect();
    ends.sort();
    ends.dedup();
    let mut pts = ends.clone();
    for w in ends.windows(2) {
        pts.push((&w[0] + &w[1]) / Q::from_integer(2.into()));
    }
    let lo = ends.first().cloned().unwrap_or_else(Q::zero);
    let hi = ends.last().cloned().unwrap_or_else(Q::zero);
    pts.push(lo - Q::from_integer(1.into()));
    pts.push(hi + Q::from_integer(1.into()));
    pts
}

fn endpoint_strategy() -> impl Strategy<Value = Endpoint> {
    prop_oneof![
        1 => Just(Endpoint::NegInf),
        1 => Just(Endpoint::PosInf),
        12 => (-12i64..=12, 1i64..=4).prop_map(|(n, d)| Endpoint::Finite(Q::new(n.into(), d.into()))),
    ]
}

/// Canonical regions with up to four raw intervals.
pub fn region_strategy() -> impl Strategy<Value = OpenRegion> {
    prop::collection::vec((endpoint_strategy(), endpoint_strategy()), 0..=4).prop_map(|pairs| {
        OpenRegion::from_intervals(
            pairs
                .into_iter()
                .filter_map(|(a, b)| {
                    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                    Interval::new(lo, hi).ok()
                })
                .collect(),
        )
    })
}

pub fn nonempty_region_strategy() -> impl Strategy<Value = OpenRegion> {
    region_strategy().prop_filter("nonempty", |r| !r.is_empty())
}

// ---------- CLI corpus ----------

/// One CLI invocation (without program name or global flags) and its
/// expected exit code.
pub struct Case {
    pub args: Vec<String>,
    pub code: i32,
}

fn case(code: i32, args: &[&str]) -> Case {
    let args = args
        .iter()
        .map(|a| expand(a))
        .collect();
    Case { args, code }
}

/// `@name` and `key=@name` expand to the path of fixture `name`.
pub fn expand(arg: &str) -> String {
    match arg.split_once('@') {
        Some((prefix, name)) if prefix.is_empty() || prefix.ends_with('=') => {
            format!("{prefix}{}", fixture_str(name))
        }
        _ => arg.to_string(),
    }
}

pub fn corpus() -> Vec<Case> {
    vec![
        case(0, &["lattice", "validate", "--lattice", "@chain3.json"]),
        case(1, &["lattice", "validate", "--lattice", "@n5.json"]),
        case(0, &["lattice", "meet", "--lattice", "@diamond.json", "x", "y"]),
        case(0, &["lattice", "join", "--lattice", "@diamond.json", "x", "y"]),
        case(0, &["lattice", "implies", "--lattice", "@chain3.json", "1", "a"]),
        case(0, &["lattice", "not", "--lattice", "@chain3.json", "a"]),
        case(0, &["space", "validate", "--space", "@sierpinski.json"]),
        case(1, &["space", "validate", "--space", "@not_a_topology.json"]),
        case(0, &["space", "alexandrov", "--points", "p,q,r", "--order", "p<=q,q<=r"]),
        case(0, &["space", "interior", "--space", "@sierpinski.json", "--set", "q"]),
        case(0, &["space", "closure", "--space", "@sierpinski.json", "--set", "q"]),
        case(0, &["space", "boundary", "--space", "@sierpinski.json", "--set", "p"]),
        case(1, &["space", "connected", "--space", "@discrete2.json", "--set", "p,q"]),
        case(0, &["space", "connected", "--space", "@sierpinski.json", "--set", "p,q"]),
        case(0, &["space", "components", "--space", "@discrete2.json", "--set", "p,q"]),
        case(1, &["space", "continuous", "--space", "@sierpinski.json", "--map", "@swap.json"]),
        case(0, &["space", "continuous", "--space", "@discrete2.json", "--map", "@swap.json"]),
        case(0, &["space", "opens-lattice", "--space", "@sierpinski.json"]),
        case(0, &["line", "meet", "--u", "@unit.json", "--v", "@half.json"]),
        case(0, &["line", "join", "--u", "@unit.json", "--v", "@half.json"]),
        case(0, &["line", "not", "--u", "@two_pieces.json"]),
        case(0, &["line", "implies", "--u", "@unit.json", "--v", "@half.json"]),
        case(0, &["line", "boundary", "--u", "@two_pieces.json"]),
        case(0, &["line", "divide", "--u", "@unit.json", "--at", "1/3"]),
        case(1, &["line", "compact", "--u", "@unit.json"]),
        case(0, &["line", "germ", "--fn", "@abs.json", "--at", "0"]),
        case(0, &["line", "catastrophe", "--fn", "@step.json"]),
        case(0, &["line", "strata", "--fn", "@abs.json"]),
        case(0, &["line", "ivt", "--fn", "@linear.json", "--a", "0", "--b", "2", "--c", "0"]),
        case(1, &["axioms", "check", "--lattice", "@coarse2.json"]),
        case(1, &["axioms", "check", "--space", "@discrete2.json", "--mode", "as-written"]),
        case(0, &["axioms", "check-line", "--samples", "@halving.json"]),
        case(0, &["axioms", "check-line", "--random", "200"]),
        case(0, &["sheaf", "validate", "--presheaf", "@constant.json"]),
        case(1, &["sheaf", "check", "--presheaf", "@constant.json"]),
        case(0, &["sheaf", "check", "--presheaf", "@sierpinski_presheaf.json"]),
        case(0, &["sheaf", "stalk", "--presheaf", "@sierpinski_presheaf.json", "--point", "q"]),
        case(0, &["sheaf", "topos", "--presheaf", "@sierpinski_presheaf.json", "--closed", "q"]),
        case(0, &["sheaf", "hull", "--space", "@discrete2.json", "--perm", "@swap.json", "--set", "p"]),
        case(0, &["nil", "add", "--a", "1,2", "--b", "3,-1"]),
        case(0, &["nil", "mul", "--a", "0,1", "--b", "0,1", "--order", "3"]),
        case(0, &["nil", "neg", "--a", "1/2,3"]),
        case(0, &["nil", "lift", "--poly", "0,-2,0,1", "--at", "2", "--order", "4"]),
        case(0, &["nil", "derive", "--poly", "0,-2,0,1", "--at", "2"]),
        case(0, &["nil", "leibniz", "--y", "3,5", "--z", "2,7"]),
        case(0, &["logic", "parse", "--formula", "~~p -> p"]),
        case(0, &["logic", "eval", "--formula", "p | ~p", "--lattice", "@chain3.json", "--assign", "p=a"]),
        case(0, &["logic", "eval", "--formula", "p | ~p", "--assign-region", "p=@unit.json"]),
        case(1, &["logic", "valid", "--formula", "p | ~p", "--lattice", "@chain3.json"]),
        case(0, &["logic", "valid", "--formula", "~(p & ~p)", "--lattice", "@diamond.json"]),
        case(1, &["logic", "counter", "--formula", "((p->q)->p)->p", "--max-size", "5"]),
        case(0, &["logic", "counter", "--formula", "p -> p"]),
        case(2, &["lattice", "validate", "--lattice", "@malformed.json"]),
        case(2, &["nil", "derive", "--poly", "1,x", "--at", "0"]),
    ]
}

/// `continuum --json --seed <seed> <args>` run in-process.
pub fn run_json(args: &[String], seed: u64) -> continuum::cli::Invocation {
    let mut argv = vec!["continuum".to_string(), "--json".into(), "--seed".into(), seed.to_string()];
    argv.extend(args.iter().cloned());
    continuum::cli::dispatch(argv)
}
