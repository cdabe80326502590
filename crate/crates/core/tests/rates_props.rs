use std::collections::HashMap;

use proptest::prelude::*;

use abelrd::cli::{recompute_point, SpecFile};
use abelrd::embedding::{candidate_groups, default_embedding_for, EmbeddingSearch, FunctionTable, SearchMode};
use abelrd::group::{AbelianGroup, PrimaryCyclic};
use abelrd::prob::{Alphabet, JointPmf};
use abelrd::rate::closed_form::lossless_group_rate;
use abelrd::rate::{channel_code_rate, lower_convex_envelope, source_code_rate, theorem1_region};

const TOL: f64 = 1e-9;

fn ring() -> impl Strategy<Value = PrimaryCyclic> {
    prop::sample::select(vec![(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
        .prop_map(|(p, r)| PrimaryCyclic::new(p, r).unwrap())
}

/// `(Z, S)` with every mass positive, so `Z` is non-redundant.
fn pmf_with_side() -> impl Strategy<Value = JointPmf> {
    (ring(), 1usize..4).prop_flat_map(|(f, ns)| {
        let m = f.order() as usize;
        prop::collection::vec(0.01f64..1.0, m * ns).prop_map(move |w| {
            let s: f64 = w.iter().sum();
            let table = w.into_iter().map(|x| x / s).collect();
            JointPmf::new(vec![Alphabet::cyclic(f), Alphabet::indexed(ns)], table).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn channel_rate_at_least_conditional_entropy(p in pmf_with_side()) {
        let f = p.axis(0).primary_factor().unwrap();
        let rate = channel_code_rate(&p, 0, &[1]).unwrap();
        let h = p.conditional_entropy(&[0], &[1]).unwrap();
        prop_assert!(rate >= h - TOL);
        prop_assert!(rate <= (f.order() as f64).log2() + TOL);
        if f.r() == 1 {
            prop_assert!((rate - h).abs() < TOL);
        }
    }

    #[test]
    fn source_rate_at_most_conditional_entropy(p in pmf_with_side()) {
        let f = p.axis(0).primary_factor().unwrap();
        let rate = source_code_rate(&p, 0, &[1]).unwrap();
        let h = p.conditional_entropy(&[0], &[1]).unwrap();
        prop_assert!(rate <= h + TOL);
        prop_assert!(rate >= -TOL);
        if f.r() == 1 {
            prop_assert!((rate - h).abs() < TOL);
        }
    }

    #[test]
    fn lossless_rate_at_least_entropy(p in pmf_with_side()) {
        let f = p.axis(0).primary_factor().unwrap();
        let px = p.marginal(&[0]).unwrap().table().to_vec();
        let r = lossless_group_rate(&px, f).unwrap();
        let h = p.entropy(&[0]).unwrap();
        prop_assert!(r.rate >= h - TOL);
        if r.sufficient {
            prop_assert!((r.rate - h).abs() < TOL);
        }
    }

    #[test]
    fn envelope_is_convex_and_below_points(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..3.0), 1..40)) {
        let env = lower_convex_envelope(&pts).unwrap();
        let v = &env.vertices;
        for w in v.windows(2) {
            prop_assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1, "decreasing staircase");
        }
        for w in v.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            prop_assert!(s2 - s1 >= -1e-12);
        }
        for &(d, r) in &pts {
            let e = env.value_at(d).unwrap();
            prop_assert!(e <= r + 1e-12);
        }
    }

    #[test]
    fn embeddings_match_brute_force(
        (u, v, values) in (2usize..4, 2usize..4).prop_flat_map(|(u, v)| (Just(u), Just(v), prop::collection::vec(0usize..3, u * v))),
        name in prop::sample::select(vec!["Z3", "Z4", "Z2^2", "Z5", "Z6", "Z7", "Z2^3", "Z8", "Z9", "Z3^2"]),
    ) {
        let f = FunctionTable::full(u, v, values).unwrap();
        let g = AbelianGroup::parse(name).unwrap();
        let found = EmbeddingSearch::new(&f, &g).mode(SearchMode::All).run().unwrap();
        for e in &found {
            prop_assert!(e.verify(&f));
        }
        prop_assert_eq!(!found.is_empty(), brute_force_exists(&f, &g));
    }
}

/// Any injective `s_u`, `s_v` with `s_u(0) = s_v(0) = 0` whose sum determines `f`.
fn brute_force_exists(f: &FunctionTable, g: &AbelianGroup) -> bool {
    let n = g.order() as usize;
    if n < f.u_size() || n < f.v_size() {
        return false;
    }
    let add = g.addition_table();
    let maps = |len: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![0]];
        for _ in 1..len {
            let mut next = Vec::new();
            for m in &out {
                for x in (1..n).filter(|x| !m.contains(x)) {
                    next.push([m.clone(), vec![x]].concat());
                }
            }
            out = next;
        }
        out
    };
    let (us, vs) = (maps(f.u_size()), maps(f.v_size()));
    us.iter().any(|su| {
        vs.iter().any(|sv| {
            let mut label: HashMap<usize, usize> = HashMap::new();
            (0..f.u_size()).all(|a| {
                (0..f.v_size()).all(|b| *label.entry(add[su[a] * n + sv[b]]).or_insert(f.get(a, b)) == f.get(a, b))
            })
        })
    })
}

#[test]
fn every_function_has_a_default_embedding() {
    for values in [vec![0, 1, 2, 3, 4, 5], vec![0, 0, 0, 1, 1, 1], vec![2, 0, 1, 1, 2, 0]] {
        let f = FunctionTable::full(2, 3, values).unwrap();
        let e = default_embedding_for(&f).unwrap();
        assert!(e.verify(&f));
        assert_eq!(e.group().order(), 6);
        assert!(candidate_groups(&f).unwrap().iter().any(|g| g.order() == 6));
    }
}

#[test]
fn constant_auxiliaries_need_no_rate() {
    let text = r#"{
        "pmf": [[0.3, 0.2], [0.1, 0.4]],
        "distortion": {"preset": "hamming-on-function", "function": [[0, 1], [1, 0]]},
        "auxiliary": {"kind": "list", "channels": [{"u": [[1, 0], [1, 0]], "v": [[0, 1], [0, 1]]}]}
    }"#;
    let spec = SpecFile::parse(text).unwrap();
    let p = &spec.problems()[0];
    let curve = theorem1_region(&p.joint_pmf().unwrap(), &p.channels().unwrap(), &p.distortion().unwrap(), &p.sweep_config().unwrap())
        .unwrap();
    assert_eq!(curve.points.len(), 1);
    let pt = &curve.points[0];
    assert_eq!((pt.r1, pt.r2), (0.0, 0.0));
    // the best constant guess of X xor Y is 0, wrong with probability 0.3
    assert!((pt.d - 0.3).abs() < 1e-12);
}

#[test]
fn points_recompute_from_provenance() {
    let text = r#"{
        "pmf": [[0.3381, 0.1494], [0.2291, 0.2834]],
        "distortion": {"preset": "hamming-on-function", "function": [[0, 1], [1, 0]]},
        "auxiliary": {"kind": "grid", "u": 2, "v": 2},
        "groups": {"policy": "list", "groups": ["Z2", "Z4"]},
        "sweep": {"grid_step": 0.25, "refine": 0.125, "retention": "all"}
    }"#;
    let spec = SpecFile::parse(text).unwrap();
    let bundle = abelrd::cli::solve(&spec, abelrd::cli::RegionMode::Both).unwrap();
    let problem = &spec.problems()[0];
    let result = &bundle.problems[0];
    let mut checked = 0;
    for region in [&result.theorem1, &result.berger_tung] {
        for pt in &region.as_ref().unwrap().curve.points {
            let again = recompute_point(problem, pt).unwrap();
            assert!((again.d - pt.d).abs() < 1e-12, "{:?}", pt.provenance);
            assert!((again.r1 - pt.r1).abs() < 1e-12 && (again.r2 - pt.r2).abs() < 1e-12, "{:?}", pt.provenance);
            checked += 1;
        }
    }
    assert!(checked > 100, "{checked}");
    let refined = result.theorem1.as_ref().unwrap().curve.points.iter().filter(|p| p.provenance.grid == Some(0.125)).count();
    assert!(refined > 0);
}
