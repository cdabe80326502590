use proptest::prelude::*;

use abelrd::prob::{compose_markov, entropy_of, h2, ConditionalPmf, JointPmf};

const TOL: f64 = 1e-9;

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-3)
}

fn normalized(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn joint3() -> impl Strategy<Value = JointPmf> {
    (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| {
        weights(a * b * c).prop_map(move |w| JointPmf::from_shape(&[a, b, c], normalized(w)).unwrap())
    })
}

proptest! {
    #[test]
    fn entropy_bounds(p in joint3()) {
        let n: usize = p.shape().iter().product();
        let h = p.entropy(&[0, 1, 2]).unwrap();
        prop_assert!(h >= -TOL);
        prop_assert!(h <= (n as f64).log2() + TOL);
    }

    #[test]
    fn chain_rule(p in joint3()) {
        let hxyz = p.entropy(&[0, 1, 2]).unwrap();
        let chain = p.entropy(&[0]).unwrap()
            + p.conditional_entropy(&[1], &[0]).unwrap()
            + p.conditional_entropy(&[2], &[0, 1]).unwrap();
        prop_assert!((hxyz - chain).abs() < TOL);
    }

    #[test]
    fn conditioning_reduces_entropy(p in joint3()) {
        prop_assert!(p.conditional_entropy(&[0], &[1]).unwrap() <= p.entropy(&[0]).unwrap() + TOL);
        prop_assert!(p.conditional_entropy(&[0], &[1, 2]).unwrap() <= p.conditional_entropy(&[0], &[1]).unwrap() + TOL);
        let i = p.mutual_information(&[0], &[1], &[2]).unwrap();
        prop_assert!(i >= 0.0);
        let sym = p.mutual_information(&[1], &[0], &[2]).unwrap();
        prop_assert!((i - sym).abs() < TOL);
    }

    #[test]
    fn marginals_keep_mass(p in joint3()) {
        let m = p.marginal(&[2, 0]).unwrap();
        prop_assert!((m.table().iter().sum::<f64>() - 1.0).abs() < TOL);
        prop_assert_eq!(m.shape(), vec![p.shape()[2], p.shape()[0]]);
        prop_assert!((m.entropy(&[0, 1]).unwrap() - p.entropy(&[0, 2]).unwrap()).abs() < TOL);
    }

    #[test]
    fn markov_composition(wxy in weights(6), wu in weights(6), wv in weights(6)) {
        let pxy = JointPmf::from_shape(&[2, 3], normalized(wxy)).unwrap();
        let rows = |w: &[f64], n: usize| -> Vec<Vec<f64>> {
            w.chunks(n).map(|c| {
                let s: f64 = c.iter().sum();
                if s > 0.0 { c.iter().map(|x| x / s).collect() } else { vec![1.0 / n as f64; n] }
            }).collect()
        };
        let cu = ConditionalPmf::from_rows(&rows(&wu, 3)).unwrap();
        let cv = ConditionalPmf::from_rows(&rows(&wv, 2)).unwrap();
        let p = compose_markov(&pxy, &cu, &cv).unwrap();
        // U - X - Y - V
        prop_assert!(p.mutual_information(&[2], &[1, 3], &[0]).unwrap() < TOL);
        prop_assert!(p.mutual_information(&[3], &[0, 2], &[1]).unwrap() < TOL);
        let back = p.marginal(&[0, 1]).unwrap();
        for (a, b) in back.table().iter().zip(pxy.table()) {
            prop_assert!((a - b).abs() < TOL);
        }
    }
}

#[test]
fn binary_entropy() {
    assert_eq!(h2(0.0), 0.0);
    assert!((h2(0.5) - 1.0).abs() < 1e-15);
    assert!((h2(0.11) - entropy_of([0.11, 0.89])).abs() < 1e-15);
    assert!(JointPmf::from_rows(&[vec![0.5, 0.6]]).is_err());
    assert!(JointPmf::from_rows(&[vec![-0.1, 1.1]]).is_err());
}
