mod common;

use continuum::axioms::{
    check_all, check_divisibility, check_divisibility_line, check_global_connectivity,
    check_local_connectivity, is_connected_element, Axiom, Mode,
};
use continuum::catalog;
use continuum::exec::Exec;
use continuum::lattice::{Elem, HeytingAlgebra};
use continuum::line::{OpenRegion, RegionFile};
use continuum::rational::Q;
use continuum::space::FiniteSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Divisibility read off the definition: every nonzero `u` has nonzero
/// disjoint `w, v <= u` such that no nonzero `z <= u` misses `w ∨ v`.
fn divisible_oracle(a: &HeytingAlgebra) -> bool {
    let bot = a.bottom();
    let below = |u: Elem| a.elements().filter(move |&e| e != bot && a.leq(e, u));
    a.elements().filter(|&u| u != bot).all(|u| {
        below(u).any(|w| {
            below(u).any(|v| {
                a.meet(w, v) == bot
                    && below(u).all(|z| a.meet(z, a.join(w, v)) != bot)
            })
        })
    })
}

#[test]
fn global_connectivity_agrees_with_the_connected_predicate() {
    for named in catalog::all_up_to(8) {
        let a = &named.algebra;
        let r = check_global_connectivity(a, Mode::Corrected);
        assert_eq!(r.holds, is_connected_element(a, a.top()), "{}", named.name);
        if let Some(w) = &r.witness {
            let (u, v) = (a.element(&w[0]).unwrap(), a.element(&w[1]).unwrap());
            assert_eq!(a.join(u, v), a.top());
            assert_eq!(a.meet(u, v), a.bottom());
            assert!(u != a.bottom() && v != a.bottom());
        }
    }
}

#[test]
fn corrected_divisibility_matches_the_definition() {
    for named in catalog::all_up_to(8) {
        let r = check_divisibility(&named.algebra, Mode::Corrected, Exec::Parallel);
        assert_eq!(r.holds, divisible_oracle(&named.algebra), "{}", named.name);
        assert_eq!(r, check_divisibility(&named.algebra, Mode::Corrected, Exec::Sequential));
    }
}

#[test]
fn no_finite_space_is_divisible() {
    for n in 1..=4 {
        for s in FiniteSpace::all_topologies(n) {
            let a = s.opens_lattice();
            let r = check_divisibility(&a, Mode::Corrected, Exec::Parallel);
            assert!(!r.holds, "{:?}", s.to_file());
            let u = a.element(&r.witness.unwrap()[0]).unwrap();
            assert_ne!(u, a.bottom());
        }
    }
}

#[test]
fn as_written_global_connectivity_always_fails_degenerately() {
    for named in catalog::all_up_to(8) {
        let a = &named.algebra;
        if a.len() < 2 {
            continue;
        }
        let r = check_global_connectivity(a, Mode::AsWritten);
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(vec![a.name(a.top()).to_string(), a.name(a.bottom()).to_string()])
        );
        assert!(r.note.as_deref().unwrap().contains("degenerate"));
        assert_eq!(r.mode, Mode::AsWritten);
    }
}

#[test]
fn reports_name_their_mode_and_axiom() {
    let a = catalog::diamond();
    for mode in [Mode::AsWritten, Mode::Corrected] {
        let rs = check_all(&a, mode, Exec::Parallel);
        assert_eq!(
            rs.iter().map(|r| r.axiom).collect::<Vec<_>>(),
            vec![Axiom::GlobalConnectivity, Axiom::LocalConnectivity, Axiom::Divisibility]
        );
        assert!(rs.iter().all(|r| r.mode == mode));
        assert!(rs.iter().all(|r| r.holds == r.witness.is_none()));
    }
    assert!(check_local_connectivity(&a, Mode::Corrected, Exec::Sequential).holds);
}

fn seeded_regions(seed: u64, n: usize) -> Vec<OpenRegion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| OpenRegion::random(&mut rng, false)).collect()
}

#[test]
fn line_divisibility_on_a_thousand_random_regions() {
    let samples = seeded_regions(0, 1000);
    let out = check_divisibility_line(&samples, Exec::Parallel).unwrap();
    assert!(out.report.holds, "{:?}", out.report.witness);
    assert_eq!(out.splits.len(), 1000);
    for s in &out.splits {
        assert!(s.passed);
        assert!(s.region.contains(&s.cut));
        let joined = s.lower.join(&s.upper);
        assert!(joined.is_subset(&s.region) && joined.is_dense_in(&s.region));
    }
    assert_eq!(out, check_divisibility_line(&samples, Exec::Sequential).unwrap());
}

#[test]
fn halving_chain_fixture() {
    let files: Vec<RegionFile> = common::load("halving.json");
    let chain: Vec<OpenRegion> = files.iter().map(|f| OpenRegion::from_file(f).unwrap()).collect();
    let out = check_divisibility_line(&chain, Exec::Parallel).unwrap();
    assert!(out.report.holds);
    for (k, s) in out.splits.iter().enumerate() {
        // (0, 2^-k) is cut at its midpoint and the lower half is the next link
        let len = Q::new(1.into(), (1i64 << k).into());
        assert_eq!(s.cut, &len / Q::from_integer(2.into()));
        if let Some(next) = chain.get(k + 1) {
            assert_eq!(&s.lower, next);
        }
        assert!(chain[k].is_subset(&chain[k.saturating_sub(1)]));
    }
}

#[test]
fn line_verdict_is_invariant_under_doubling() {
    let two = Q::from_integer(2.into());
    let samples = seeded_regions(9, 300);
    let scaled: Vec<OpenRegion> = samples.iter().map(|r| r.scale(&two).unwrap()).collect();
    let a = check_divisibility_line(&samples, Exec::Parallel).unwrap();
    let b = check_divisibility_line(&scaled, Exec::Parallel).unwrap();
    assert_eq!(a.report.holds, b.report.holds);
    // cuts of half-infinite intervals sit one unit from the finite end, so
    // only bounded first intervals scale their cut
    for (x, y) in a.splits.iter().zip(&b.splits) {
        let first = &x.region.intervals()[0];
        if first.lo().finite().is_none() || first.hi().finite().is_none() {
            continue;
        }
        assert_eq!(&x.cut * &two, y.cut);
        assert_eq!(x.lower.scale(&two).unwrap(), y.lower);
        assert_eq!(x.upper.scale(&two).unwrap(), y.upper);
    }
}
