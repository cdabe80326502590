use proptest::prelude::*;

use abelrd::group::{
    coset_label, decompose_cyclic, enumerate_abelian_groups, factorize, is_prime, solve_linear, valuation, AbelianGroup,
    HomMatrix,
};

const RINGS: [(u64, u32); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)];

fn group_names() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["Z2", "Z4", "Z6", "Z2^3", "Z4+Z2", "Z9+Z3", "Z12", "Z8+Z3+Z5", "Z7"]).prop_map(String::from)
}

fn partitions(n: u32) -> u64 {
    // partitions of n into positive parts
    let mut ways = vec![0u64; n as usize + 1];
    ways[0] = 1;
    for part in 1..=n as usize {
        for total in part..=n as usize {
            ways[total] += ways[total - part];
        }
    }
    ways[n as usize]
}

proptest! {
    #[test]
    fn group_axioms(name in group_names(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let g = AbelianGroup::parse(&name).unwrap();
        let n = g.order() as usize;
        let (a, b, c) = (g.element_at(a % n), g.element_at(b % n), g.element_at(c % n));
        let add = |x: &_, y: &_| g.add(x, y).unwrap();
        let (ab, bc) = (add(&a, &b), add(&b, &c));
        prop_assert_eq!(&ab, &add(&b, &a));
        prop_assert_eq!(add(&ab, &c), add(&a, &bc));
        let zero = g.identity();
        prop_assert_eq!(add(&a, &zero), a.clone());
        let neg = g.negate(&a).unwrap();
        prop_assert_eq!(add(&a, &neg), zero);
    }

    #[test]
    fn index_round_trip(name in group_names(), i in any::<usize>()) {
        let g = AbelianGroup::parse(&name).unwrap();
        let i = i % g.order() as usize;
        prop_assert_eq!(g.index_of(&g.element_at(i)), i);
        let e = g.element_at(i);
        prop_assert_eq!(e.digits(), &g.digits_at(i)[..]);
    }

    #[test]
    fn name_round_trip(name in group_names()) {
        let g = AbelianGroup::parse(&name).unwrap();
        prop_assert_eq!(AbelianGroup::parse(&g.name()).unwrap(), g);
    }

    #[test]
    fn cyclic_decomposition_multiplies_back(n in 2u64..5000) {
        let factors = decompose_cyclic(n).unwrap();
        prop_assert_eq!(factors.iter().map(|f| f.order()).product::<u64>(), n);
        prop_assert!(factors.iter().all(|f| is_prime(f.p())));
        let mut primes: Vec<u64> = factors.iter().map(|f| f.p()).collect();
        primes.dedup();
        prop_assert_eq!(primes.len(), factors.len(), "one factor per prime");
    }

    #[test]
    fn class_count_is_a_product_of_partition_numbers(n in 2u64..200) {
        let expected: u64 = factorize(n).iter().map(|&(_, e)| partitions(e)).product();
        prop_assert_eq!(enumerate_abelian_groups(n, n).unwrap().len() as u64, expected);
    }

    #[test]
    fn homomorphisms_are_additive(
        ring in prop::sample::select(RINGS.to_vec()),
        rows in 1usize..4,
        cols in 1usize..5,
        seed in any::<Vec<u64>>(),
    ) {
        let (p, r) = ring;
        let m = p.pow(r);
        let pick = |k: usize| seed.get(k).copied().unwrap_or(k as u64 * 7 + 3) % m;
        let h = HomMatrix::new(p, r, rows, cols, (0..rows * cols).map(pick).collect()).unwrap();
        let x: Vec<u64> = (0..cols).map(|k| pick(100 + k)).collect();
        let y: Vec<u64> = (0..cols).map(|k| pick(200 + k)).collect();
        let sum: Vec<u64> = x.iter().zip(&y).map(|(a, b)| (a + b) % m).collect();
        let (hx, hy, hs) = (h.apply(&x).unwrap(), h.apply(&y).unwrap(), h.apply(&sum).unwrap());
        let expect: Vec<u64> = hx.iter().zip(&hy).map(|(a, b)| (a + b) % m).collect();
        prop_assert_eq!(hs, expect);
        // kernel size from the Smith form matches enumeration
        let kernel = h.kernel_elements(1 << 16).unwrap();
        prop_assert_eq!(kernel.len() as u64, p.pow(h.kernel_log_size()));
        for z in &kernel {
            prop_assert!(h.apply(z).unwrap().iter().all(|v| *v == 0));
        }
    }

    #[test]
    fn linear_equations_match_brute_force(ring in prop::sample::select(RINGS.to_vec()), a in any::<u64>(), b in any::<u64>()) {
        let (p, r) = ring;
        let m = p.pow(r);
        let (a, b) = (a % m, b % m);
        let brute: Vec<u64> = (0..m).filter(|x| a * x % m == b).collect();
        let solved = solve_linear(p, r, a, b).unwrap();
        prop_assert_eq!(&solved, &brute);
        let i = valuation(p, r, a);
        let expected = if b % p.pow(i) == 0 { p.pow(i) } else { 0 };
        prop_assert_eq!(solved.len() as u64, expected);
    }

    #[test]
    fn coset_labels_are_constant_on_cosets(ring in prop::sample::select(RINGS.to_vec()), i in 0u32..4, z in any::<u64>(), t in any::<u64>()) {
        let (p, r) = ring;
        let i = i.min(r);
        let m = p.pow(r);
        let z = z % m;
        let w = (z + p.pow(i) * (t % m)) % m;
        prop_assert_eq!(coset_label(p, r, i, z).unwrap(), coset_label(p, r, i, w).unwrap());
        prop_assert!(coset_label(p, r, i, z).unwrap() < p.pow(i));
    }
}

#[test]
fn small_orders() {
    let names = |n| enumerate_abelian_groups(n, n).unwrap().iter().map(AbelianGroup::name).collect::<Vec<_>>();
    assert_eq!(names(8), ["Z8", "Z4+Z2", "Z2^3"]);
    assert_eq!(names(12), ["Z4+Z3", "Z2^2+Z3"]);
    assert!(decompose_cyclic(1).is_err());
    assert_eq!(AbelianGroup::cyclic(12).unwrap().name(), "Z4+Z3");
}
