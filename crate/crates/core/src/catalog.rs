//! Named finite Heyting algebras used by exhaustive checks and the
//! countermodel search.

use crate::lattice::HeytingAlgebra;
use crate::space::{FiniteSpace, PointSet};

#[derive(Debug, Clone)]
pub struct NamedAlgebra {
    pub name: String,
    pub algebra: HeytingAlgebra,
}

impl NamedAlgebra {
    fn new(name: impl Into<String>, algebra: HeytingAlgebra) -> Self {
        NamedAlgebra {
            name: name.into(),
            algebra,
        }
    }
}

/// Chain `0 < a < b < ... < 1` with `n` elements. `chain(1)` is the
/// one-element algebra `{0}`.
pub fn chain(n: usize) -> HeytingAlgebra {
    assert!(n >= 1, "a chain needs at least one element");
    let names: Vec<String> = match n {
        1 => vec!["0".into()],
        _ => std::iter::once("0".to_string())
            .chain((0..n - 2).map(inner_name))
            .chain(std::iter::once("1".to_string()))
            .collect(),
    };
    let order: Vec<(String, String)> = names
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    HeytingAlgebra::build(&names, &order, None, None).expect("chains are distributive")
}

fn inner_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

/// Boolean algebra of subsets of `atoms` atoms. Elements are named by their
/// atoms (`"ab"`), with `"0"` and `"1"` for the bounds.
pub fn boolean(atoms: usize) -> HeytingAlgebra {
    assert!(atoms <= 6, "boolean catalogue stops at 64 elements");
    let size = 1usize << atoms;
    let full = size - 1;
    let names: Vec<String> = (0..size)
        .map(|m| match m {
            0 => "0".to_string(),
            m if m == full => "1".to_string(),
            m => (0..atoms).filter(|i| m >> i & 1 == 1).map(inner_name).collect(),
        })
        .collect();
    let mut leq = vec![false; size * size];
    for a in 0..size {
        for b in 0..size {
            leq[a * size + b] = a & !b == 0;
        }
    }
    HeytingAlgebra::from_relation(names, leq, None, None).expect("boolean algebra")
}

/// The four-element diamond `0 < x, y < 1`.
pub fn diamond() -> HeytingAlgebra {
    HeytingAlgebra::build(
        &["0", "x", "y", "1"],
        &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
        None,
        None,
    )
    .expect("diamond")
}

/// Chains, Boolean algebras, the diamond and the opens-lattices of every
/// topology on at most four points, keeping those with at most `max_size`
/// elements.
pub fn all_up_to(max_size: usize) -> Vec<NamedAlgebra> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.push(NamedAlgebra::new(format!("chain{n}"), chain(n)));
    }
    for atoms in 0..=6 {
        if 1 << atoms <= max_size {
            out.push(NamedAlgebra::new(format!("boolean{}", 1 << atoms), boolean(atoms)));
        }
    }
    if max_size >= 4 {
        out.push(NamedAlgebra::new("diamond", diamond()));
    }
    for n in 0..=4 {
        for (i, space) in FiniteSpace::all_topologies(n).iter().enumerate() {
            if space.opens().len() <= max_size {
                out.push(NamedAlgebra::new(
                    format!("opens{n}pt#{i}"),
                    space.opens_lattice(),
                ));
            }
        }
    }
    out
}

/// Distributive lattices that are not chains, up to isomorphism: the
/// down-set lattices of non-chain posets on at most four points, ordered by
/// size. Every lattice here has at most `max_size` elements.
pub fn non_chains(max_size: usize) -> Vec<NamedAlgebra> {
    let mut found: Vec<(usize, u64, NamedAlgebra)> = Vec::new();
    for n in 2..=4usize {
        let mut seen = Vec::new();
        for below in partial_orders(n) {
            let code = canonical_code(&below);
            if seen.contains(&code) {
                continue;
            }
            seen.push(code);
            let is_chain = (0..n).all(|a| (0..n).all(|b| below[a].contains(b) || below[b].contains(a)));
            if is_chain {
                continue;
            }
            let names: Vec<String> = ["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect();
            let pairs: Vec<(String, String)> = (0..n)
                .flat_map(|x| below[x].iter().map(move |y| (y, x)))
                .filter(|(y, x)| y != x)
                .map(|(y, x)| (names[y].clone(), names[x].clone()))
                .collect();
            let space = FiniteSpace::alexandrov(&names, &pairs).expect("poset");
            if space.opens().len() <= max_size {
                found.push((
                    space.opens().len(),
                    code,
                    NamedAlgebra::new(format!("downsets{n}pt#{code:x}"), space.opens_lattice()),
                ));
            }
        }
    }
    found.sort_by_key(|(size, code, _)| (*size, *code));
    found.into_iter().map(|(_, _, a)| a).collect()
}

/// All partial orders on `n` points as principal down-sets.
fn partial_orders(n: usize) -> Vec<Vec<PointSet>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let mut out = Vec::new();
    for rel in 0u64..(1 << pairs.len()) {
        // below[x] contains y when y <= x
        let mut below: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for (i, &(y, x)) in pairs.iter().enumerate() {
            if rel >> i & 1 == 1 {
                below[x] = below[x].union(PointSet::singleton(y));
            }
        }
        let antisymmetric = (0..n).all(|a| (0..n).all(|b| a == b || !(below[a].contains(b) && below[b].contains(a))));
        let transitive = (0..n).all(|x| below[x].iter().all(|y| below[y].is_subset(below[x])));
        if antisymmetric && transitive {
            out.push(below);
        }
    }
    out
}

/// Smallest relation encoding over all relabellings.
fn canonical_code(below: &[PointSet]) -> u64 {
    let n = below.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    permutations(&mut perm, 0, &mut |p| {
        let mut code = 0u64;
        for x in 0..n {
            for y in below[x].iter() {
                code |= 1 << (p[x] * n + p[y]);
            }
        }
        best = best.min(code);
    });
    best
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}
