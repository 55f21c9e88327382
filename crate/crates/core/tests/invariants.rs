//! Cross-module invariants at grid scale.

mod common;

use fitzcalc::classify::{
    check_condition_c, check_identifies, check_locates, check_maximal_on_grid, check_ni, check_v_representable,
    check_vni, family_scan, Property, RegionFamily,
};
use fitzcalc::fitzpatrick::psi_envelope;
use fitzcalc::operators::{is_monotone, mr_test, mr_test_pairwise};
use fitzcalc::regions::primal_dual_grid;
use fitzcalc::sumcalc::{add_normal_cone, operator_sum, verify_sum_representative, RhoEvaluator, SumPartner};
use fitzcalc::{natural_pairing, ExtReal, GridSpecF64, OperatorF64, PointF64, RegionF64, ToleranceF64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const EPS: f64 = 1e-9;

fn pinned() -> (GridSpecF64, ToleranceF64) {
    (GridSpecF64::pinned(), ToleranceF64::pinned())
}

fn open(a: f64, b: f64) -> RegionF64 {
    RegionF64::open_interval(a, b).unwrap()
}

fn closed(a: f64, b: f64) -> RegionF64 {
    RegionF64::closed_interval(a, b).unwrap()
}

fn zoo() -> Vec<(OperatorF64, RegionF64)> {
    let nc = |a, b| OperatorF64::normal_cone_box(closed(a, b)).unwrap();
    vec![
        (OperatorF64::flat(open(0.0, 1.0), vec![0.0]).unwrap(), open(0.0, 1.0)),
        (OperatorF64::flat(open(0.0, 1.0), vec![0.0]).unwrap(), open(-0.5, 1.5)),
        (OperatorF64::flat(open(-1.0, 1.0), vec![0.5]).unwrap(), open(-0.5, 0.5)),
        (nc(-1.0, 1.0), open(-1.0, 1.0)),
        (nc(0.0, 1.0), open(-0.5, 0.5)),
        (OperatorF64::abs_subdiff(1.0).unwrap(), open(-1.0, 1.0)),
        (OperatorF64::abs_subdiff(0.5).unwrap(), open(0.25, 1.75)),
        (OperatorF64::point_complement(vec![0.0]).unwrap(), open(-1.0, 1.0)),
        (OperatorF64::point_complement(vec![0.5]).unwrap(), open(0.25, 1.0)),
        (OperatorF64::linear(vec![vec![1.0]]).unwrap(), RegionF64::ambient(1)),
        (OperatorF64::linear(vec![vec![0.5]]).unwrap(), RegionF64::ambient(1)),
    ]
}

#[test]
fn identifies_then_locates_then_vni() {
    let (g, tol) = pinned();
    for (t, v) in zoo() {
        let id = check_identifies(&t, &v, &g, &tol).unwrap().value;
        let loc = check_locates(&t, &v, None, &g, &tol).unwrap().value;
        let vni = check_vni(&t, &v, &g, &tol).unwrap().value;
        assert!(!id || loc, "{t} on {v}: identifies but does not locate");
        assert!(!loc || vni, "{t} on {v}: locates but is not V-NI");
    }
}

#[test]
fn maximal_on_grid_matches_representable_and_ni() {
    let (g, tol) = pinned();
    let ambient = RegionF64::ambient(1);
    let ops = vec![
        OperatorF64::abs_subdiff(1.0).unwrap(),
        OperatorF64::abs_subdiff(2.0).unwrap(),
        OperatorF64::linear(vec![vec![0.0]]).unwrap(),
        OperatorF64::linear(vec![vec![2.0]]).unwrap(),
        OperatorF64::flat(open(0.0, 1.0), vec![0.0]).unwrap(),
        OperatorF64::flat(RegionF64::ambient(1), vec![1.0]).unwrap(),
        OperatorF64::point_complement(vec![0.0]).unwrap(),
    ];
    for t in ops {
        let max = check_maximal_on_grid(&t, &ambient, &g, &tol).unwrap().value;
        let rep = check_v_representable(&t, &ambient, &g, &tol).unwrap().value;
        let ni = check_ni(&t, &g, &tol).unwrap().value;
        assert_eq!(max, rep && ni, "{t}: maximal={max} representable={rep} ni={ni}");
    }
}

#[test]
fn vni_extends_to_the_closure() {
    let (g, tol) = pinned();
    for (t, v) in zoo() {
        if !check_vni(&t, &v, &g, &tol).unwrap().value {
            continue;
        }
        for z in primal_dual_grid(&v.closure(), &g) {
            let phi = t.phi(&z, &v, &g, &tol).unwrap().value;
            assert!(phi.ge_within(c_of(&z), EPS), "{t} on {v}: φ={phi} below c at {z}");
        }
    }
}

#[test]
fn larger_region_raises_phi() {
    let (g, tol) = pinned();
    let inner = open(-0.5, 0.5);
    let outer = open(-1.0, 1.5);
    for t in [
        OperatorF64::abs_subdiff(1.0).unwrap(),
        OperatorF64::flat(open(-2.0, 2.0), vec![0.5]).unwrap(),
        OperatorF64::normal_cone_box(closed(-1.0, 1.0)).unwrap(),
        OperatorF64::point_complement(vec![0.0]).unwrap(),
    ] {
        for z in primal_dual_grid(&outer, &g).into_iter().step_by(7) {
            let small = t.phi(&z, &inner, &g, &tol).unwrap().value;
            let big = t.phi(&z, &outer, &g, &tol).unwrap().value;
            assert!(small <= big.add_scalar(EPS), "{t}: {small} > {big} at {z}");
        }
    }
}

#[test]
fn condition_c_domains_have_convex_closure() {
    let (g, tol) = pinned();
    for t in [
        OperatorF64::flat(open(0.0, 1.0), vec![0.0]).unwrap(),
        OperatorF64::normal_cone_box(closed(-1.0, 1.0)).unwrap(),
        OperatorF64::abs_subdiff(1.0).unwrap(),
        OperatorF64::point_complement(vec![0.0]).unwrap(),
    ] {
        let family = RegionFamily::dyadic(&t, -2.0, 2.0, 3).unwrap();
        if !family_scan(&t, &family, Property::ConditionC, &g, &tol).unwrap().value {
            continue;
        }
        let dom: Vec<f64> = primal_axis(&g)
            .into_iter()
            .filter(|&x| t.domain_closure_contains(&[x], &tol).unwrap())
            .collect();
        for &a in &dom {
            for &b in &dom {
                let m = (a + b) / 2.0;
                assert!(t.domain_closure_contains(&[m], &tol).unwrap(), "{t}: midpoint {m} of {a}, {b}");
            }
        }
    }
}

#[test]
fn condition_c_holds_on_vni_regions() {
    let (g, tol) = pinned();
    for (t, v) in zoo() {
        if check_vni(&t, &v, &g, &tol).unwrap().value {
            assert!(check_condition_c(&t, &v, &g, &tol).unwrap().value, "{t} on {v}");
        }
    }
}

#[test]
fn rho_dominates_coupling_and_graph_pairing() {
    let (g, tol) = pinned();
    let a = OperatorF64::abs_subdiff(1.0).unwrap();
    let c = closed(0.0, 2.0);
    let b = OperatorF64::normal_cone_box(c.clone()).unwrap();
    for (partner, sum, v) in [
        (SumPartner::NormalCone(c.clone()), add_normal_cone(&a, &c, &g, &tol).unwrap(), closed(-1.0, 3.0)),
        (SumPartner::Operator(b.clone()), operator_sum(&a, &b, &g, &tol).unwrap(), open(0.0, 2.0)),
    ] {
        let rho = RhoEvaluator::new(&a, &partner, &v, &g, &tol).unwrap();
        let graph = sum.enumerate_graph(&g, &v, &tol).unwrap().points;
        for z in primal_dual_grid(&v, &g).into_iter().step_by(5) {
            let r = rho.eval(&z).unwrap().value;
            let mut bound = c_of(&z);
            for w in &graph {
                bound = bound.max(natural_pairing(&z, w).unwrap() - c_of(w));
            }
            assert!(r.ge_within(bound, EPS), "{}: ρ={r} below {bound} at {z}", partner.describe());
        }
    }
}

#[test]
fn sum_routes_agree_on_shared_points() {
    let (g, tol) = pinned();
    let a = OperatorF64::abs_subdiff(1.0).unwrap();
    let c = closed(0.0, 2.0);
    let b = OperatorF64::normal_cone_box(c.clone()).unwrap();
    let v = open(0.0, 2.0);
    let cone = SumPartner::NormalCone(c.clone());
    let pair = SumPartner::Operator(b);
    assert_eq!(
        verify_sum_representative(&a, &cone, &v, &g, &tol).unwrap().value,
        verify_sum_representative(&a, &pair, &v, &g, &tol).unwrap().value
    );
    let by_cone = RhoEvaluator::new(&a, &cone, &v, &g, &tol).unwrap();
    let by_pair = RhoEvaluator::new(&a, &pair, &v, &g, &tol).unwrap();
    for z in primal_dual_grid(&v, &g) {
        let r1 = by_cone.eval(&z).unwrap().value;
        let r2 = by_pair.eval(&z).unwrap().value;
        let near_c = |r: ExtReal<f64>| r.eq_within(c_of(&z), EPS);
        assert_eq!(near_c(r1), near_c(r2), "at {z}: {r1} vs {r2}");
    }
}

#[test]
fn non_monotone_partner_is_rejected() {
    let (g, tol) = pinned();
    let a = OperatorF64::abs_subdiff(1.0).unwrap();
    let bad = OperatorF64::finite_graph(vec![p1(0.0, 1.0), p1(1.0, 0.0)]).unwrap();
    let r = verify_sum_representative(&a, &SumPartner::Operator(bad), &open(0.0, 1.0), &g, &tol);
    assert!(matches!(r, Err(fitzcalc::Error::UnsatisfiedHypothesis(_))), "{r:?}");
}

fn random_graph(seed: u64, n: usize) -> Vec<PointF64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    monotone_graph(&mut rng, n, &GridSpecF64::pinned())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_below_psi_above_coupling(seed in any::<u64>(), n in 1usize..=2) {
        let (g, tol) = pinned();
        let graph = random_graph(seed, n);
        let t = OperatorF64::finite_graph(graph.clone()).unwrap();
        let ambient = RegionF64::ambient(n);
        prop_assert!(is_monotone(&t, &g, &tol).unwrap().value);
        let psi = psi_envelope(&t, &ambient, &g, &tol).unwrap();
        for z in plane_grid(n, &g).into_iter().step_by(11) {
            let phi = t.phi(&z, &ambient, &g, &tol).unwrap().value;
            let p = psi.eval(&z).unwrap().value;
            prop_assert!(phi <= p.add_scalar(EPS), "φ={} ψ={} at {}", phi, p, z);
            prop_assert!(p.ge_within(c_of(&z), EPS));
        }
        for w in &graph {
            for &y in &g.dual_axis() {
                let z = pt(w.x(), &vec![y; n]);
                let phi = t.phi(&z, &ambient, &g, &tol).unwrap().value;
                prop_assert!(phi.ge_within(c_of(&z), EPS), "φ={} below c at {}", phi, z);
            }
        }
    }

    #[test]
    fn related_point_routes_agree(seed in any::<u64>(), x in -2.0..2.0f64, y in -3.0..3.0f64) {
        let (g, tol) = pinned();
        let graph = random_graph(seed, 1);
        let t = OperatorF64::finite_graph(graph).unwrap();
        let v = open(-1.0, 1.0);
        let z = p1(x, y);
        prop_assert_eq!(
            mr_test(&t, &v, &z, &g, &tol).unwrap(),
            mr_test_pairwise(&t, &v, &z, &g, &tol).unwrap()
        );
    }

    #[test]
    fn phi_matches_max_formula(seed in any::<u64>(), n in 1usize..=2, coords in prop::collection::vec(-3.0..3.0f64, 4)) {
        let (g, tol) = pinned();
        let graph = random_graph(seed, n);
        let t = OperatorF64::finite_graph(graph.clone()).unwrap();
        let z = PointF64::from_flat(&coords[..2 * n]).unwrap();
        let phi = t.phi(&z, &RegionF64::ambient(n), &g, &tol).unwrap();
        prop_assert!(!phi.approximate);
        let v = phi.value.finite().unwrap();
        prop_assert!((v - phi_oracle(&graph, &z)).abs() <= 1e-12);
    }
}
