use std::collections::BTreeSet;

use ddghz_core::metrics::metrics_report;
use ddghz_core::search::{
    per_spin_candidates, rank_cases, search_multispin, search_sequential, Case,
};
use ddghz_core::spin::{khz_to_rad, DEFAULT_LARMOR_KHZ};
use ddghz_core::{NuclearSpin, Register, Scheme, SearchTolerances, SequenceUnit};

fn bundled() -> Register {
    Register::bundled(khz_to_rad(DEFAULT_LARMOR_KHZ)).unwrap()
}

fn toy() -> Register {
    let full = bundled();
    let idx: Vec<usize> = ["C5", "C12", "C18", "C19"].iter().map(|l| full.index_of(l).unwrap()).collect();
    full.subset(&idx).unwrap()
}

fn toy_tol(scheme: Scheme) -> SearchTolerances {
    let mut tol = SearchTolerances::table(scheme, 3).unwrap();
    tol.k_max = 4;
    tol.t_keep = 100_000;
    tol.combo_budget = 100_000_000;
    tol
}

fn target_sets(cases: &[Case]) -> BTreeSet<Vec<usize>> {
    cases.iter().map(|c| c.targets.clone()).collect()
}

#[test]
fn spin_without_transverse_coupling_has_no_candidates() {
    let reg = Register::new(
        vec![NuclearSpin::from_khz("Z", -4.2, 0.0), NuclearSpin::from_khz("X", -11.346, 59.21)],
        khz_to_rad(DEFAULT_LARMOR_KHZ),
    )
    .unwrap();
    let c = per_spin_candidates(&reg, &SequenceUnit::cpmg(), &toy_tol(Scheme::Sequential)).unwrap();
    assert!(!c.contains_key(&0));
    assert!(c.contains_key(&1));
}

#[test]
fn single_spin_register_has_candidates_but_no_cases() {
    let reg = bundled().subset(&[4]).unwrap();
    let tol = toy_tol(Scheme::Sequential);
    let c = per_spin_candidates(&reg, &SequenceUnit::cpmg(), &tol).unwrap();
    assert!(c[&0].iter().all(|x| x.one_tangle >= 0.99));
    assert!(!c[&0].is_empty());
    assert!(search_sequential(&reg, &SequenceUnit::cpmg(), &tol).unwrap().is_empty());
}

#[test]
fn relaxing_unwanted_tolerance_keeps_candidates() {
    let reg = toy();
    let unit = SequenceUnit::cpmg();
    let mut tol = toy_tol(Scheme::Sequential);
    tol.unwanted_tol = 0.05;
    let strict = per_spin_candidates(&reg, &unit, &tol).unwrap();
    tol.unwanted_tol = 0.2;
    let loose = per_spin_candidates(&reg, &unit, &tol).unwrap();
    for (spin, list) in &strict {
        let l: BTreeSet<(u64, u64)> = loose[spin].iter().map(|c| (c.t.to_bits(), c.n)).collect();
        assert!(list.iter().all(|c| l.contains(&(c.t.to_bits(), c.n))));
    }
}

#[test]
fn emitted_cases_reverify_from_their_plans() {
    let reg = toy();
    let unit = SequenceUnit::cpmg();
    for scheme in [Scheme::Sequential, Scheme::Multispin] {
        let tol = toy_tol(scheme);
        let cases = match scheme {
            Scheme::Sequential => search_sequential(&reg, &unit, &tol),
            Scheme::Multispin => search_multispin(&reg, &unit, &tol),
        }
        .unwrap();
        for c in &cases {
            assert!(c.satisfies(&tol));
            assert_eq!(metrics_report(&reg, &c.plan, &c.targets).unwrap(), c.metrics);
            assert_eq!(c.targets.len(), 2);
        }
        for w in cases.windows(2) {
            assert!(w[0].metrics.ep_scaled >= w[1].metrics.ep_scaled);
        }
    }
}

#[test]
fn tightening_tolerances_never_adds_cases() {
    let reg = toy();
    let unit = SequenceUnit::cpmg();
    let base = toy_tol(Scheme::Sequential);
    let all = target_sets(&search_sequential(&reg, &unit, &base).unwrap());
    assert!(!all.is_empty());
    let mut tighter = Vec::new();
    let mut t = base.clone();
    t.gate_error_tol = 0.02;
    tighter.push(t);
    let mut t = base.clone();
    t.target_tol = 0.999;
    tighter.push(t);
    let mut t = base.clone();
    t.unwanted_tol = 0.03;
    tighter.push(t);
    for t_max in [1.5e-3, 1.0e-3] {
        let mut t = base.clone();
        t.t_max = t_max;
        tighter.push(t);
    }
    for t in tighter {
        let sub = target_sets(&search_sequential(&reg, &unit, &t).unwrap());
        assert!(sub.is_subset(&all), "{t:?}");
    }
}

#[test]
fn unreachable_target_tolerance_gives_no_multispin_cases() {
    let mut tol = toy_tol(Scheme::Multispin);
    tol.target_tol = 1.0;
    assert!(search_multispin(&toy(), &SequenceUnit::cpmg(), &tol).unwrap().is_empty());
}

#[test]
fn rank_weights_select_the_ordering() {
    let reg = toy();
    let tol = toy_tol(Scheme::Sequential);
    let cases = search_sequential(&reg, &SequenceUnit::cpmg(), &tol).unwrap();
    assert!(cases.len() > 2);

    let by_ep = rank_cases(cases.clone(), [1.0, 0.0, 0.0], &tol).unwrap();
    for w in by_ep.windows(2) {
        assert!(w[0].metrics.ep_scaled >= w[1].metrics.ep_scaled);
    }
    let by_time = rank_cases(cases.clone(), [0.0, 1.0, 0.0], &tol).unwrap();
    for w in by_time.windows(2) {
        assert!(w[0].total_time() <= w[1].total_time());
    }
    assert!(rank_cases(cases.clone(), [0.5, 0.6, 0.0], &tol).is_err());

    // identical cases keep insertion order
    let a = cases[0].clone();
    let mut b = cases[0].clone();
    b.scheme = Scheme::Multispin;
    let ranked = rank_cases(vec![b, a.clone()], [1.0, 0.0, 0.0], &tol).unwrap();
    assert_eq!(ranked[0].scheme, Scheme::Multispin);
    let ranked = rank_cases(vec![a, ranked[0].clone()], [1.0, 0.0, 0.0], &tol).unwrap();
    assert_eq!(ranked[0].scheme, Scheme::Sequential);
}

#[test]
fn beam_search_handles_large_subsets() {
    let full = bundled();
    let idx: Vec<usize> = ["C5", "C9", "C12", "C13", "C18", "C19", "C11"]
        .iter()
        .map(|l| full.index_of(l).unwrap())
        .collect();
    let reg = full.subset(&idx).unwrap();
    let tol = SearchTolerances::table(Scheme::Sequential, 7).unwrap();
    let cases = search_sequential(&reg, &SequenceUnit::cpmg(), &tol).unwrap();
    assert!(!cases.is_empty());
    for c in &cases {
        assert!(c.satisfies(&tol));
        assert_eq!(c.targets.len(), 6);
    }
}
