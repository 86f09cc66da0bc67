use einfty::graph::random_term;
use einfty::normalize::{Reducer, Scope, Strategy};
use einfty::simplicial::{evaluate, Chain, Face};
use einfty::surjection::Surjection;
use einfty::verify::words;
use einfty::{Coefficient, PropElement, Ring};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn term(seed: u64, n: usize, max_vertices: usize) -> PropElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, s) = random_term(&mut rng, n, max_vertices);
    PropElement::from_term(Ring::Z, g, s)
}

/// A random term whose inputs match the outputs of `below`.
fn on_top_of(below: &PropElement, seed: u64, max_vertices: usize) -> PropElement {
    term(seed, below.biarity().1, max_vertices)
}

fn sign(d: usize) -> Coefficient {
    Coefficient::from_i64(Ring::Z, if d % 2 == 0 { 1 } else { -1 })
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        q[v] = i;
    }
    q
}

fn permutation(seed: u64, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(s in any::<u64>()) {
        let a = term(s, 2, 4);
        let b = on_top_of(&a, s ^ 1, 4);
        let c = on_top_of(&b, s ^ 2, 4);
        let left = c.compose(&b).unwrap().compose(&a).unwrap();
        let right = c.compose(&b.compose(&a).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn differential_is_a_derivation_for_composition(s in any::<u64>()) {
        let a = term(s, 1, 4);
        let b = on_top_of(&a, s.rotate_left(7), 4);
        let lhs = b.compose(&a).unwrap().differential();
        let mut rhs = b.differential().compose(&a).unwrap();
        let db = b.degree().unwrap();
        rhs = rhs.add(&b.compose(&a.differential()).unwrap().scale(&sign(db)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_is_a_derivation_for_tensor(s in any::<u64>()) {
        let a = term(s, 1, 4);
        let b = term(s.rotate_left(13), 2, 4);
        let lhs = a.tensor(&b).unwrap().differential();
        let da = a.degree().unwrap();
        let rhs = a.differential().tensor(&b).unwrap()
            .add(&a.tensor(&b.differential()).unwrap().scale(&sign(da)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn actions_are_invertible(s in any::<u64>()) {
        let a = term(s, 3, 5);
        let (n, m) = a.biarity();
        let sigma = permutation(s, n);
        let tau = permutation(s ^ 99, m);
        let moved = a.act(&sigma, &tau).unwrap();
        prop_assert_eq!(moved.act(&inverse(&sigma), &inverse(&tau)).unwrap(), a.clone());
        let ids = (0..n).collect::<Vec<_>>();
        let idt = (0..m).collect::<Vec<_>>();
        prop_assert_eq!(a.act(&ids, &idt).unwrap(), a);
    }

    #[test]
    fn reduction_is_idempotent_and_strategy_independent(s in any::<u64>()) {
        let a = term(s, 2, 5);
        let nf = Reducer::new(Scope::S).reduce(&a).unwrap();
        prop_assert_eq!(Reducer::new(Scope::S).reduce(&nf).unwrap(), nf.clone());
        let other = Reducer::new(Scope::S).with_strategy(Strategy::Random(s)).reduce(&a).unwrap();
        prop_assert_eq!(other, nf);
    }

    #[test]
    fn reduction_commutes_with_the_differential(s in any::<u64>()) {
        let a = term(s, 1, 5);
        let mut red = Reducer::new(Scope::S);
        let nf = red.reduce(&a).unwrap();
        let lhs = red.reduce(&nf.differential()).unwrap();
        let rhs = red.reduce(&a.differential()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_functorial(s in any::<u64>(), d in 1usize..=2) {
        let a = term(s, 1, 3);
        let b = on_top_of(&a, s.rotate_left(29), 3);
        let ba = b.compose(&a).unwrap();
        for f in Face::all_faces(d) {
            let x = Chain::single(Ring::Z, vec![f]);
            prop_assert_eq!(evaluate(&ba, &x).unwrap(), evaluate(&b, &evaluate(&a, &x).unwrap()).unwrap());
        }
    }

    #[test]
    fn relations_hold_after_evaluation(s in any::<u64>()) {
        // reducing in S does not change the chain map
        let a = term(s, 1, 5);
        let nf = Reducer::new(Scope::S).reduce(&a).unwrap();
        for w in words(&Face::all_faces(2), 1) {
            let x = Chain::single(Ring::Z, w);
            prop_assert_eq!(evaluate(&a, &x).unwrap(), evaluate(&nf, &x).unwrap());
        }
    }

    #[test]
    fn surjections_round_trip_through_graphs(seq in proptest::collection::vec(1u32..=3, 1..7)) {
        if let Ok(s) = Surjection::new(seq) {
            let (g, _) = s.to_graph();
            prop_assert_eq!(Surjection::from_graph(&g).unwrap(), s.clone());
            prop_assert_eq!(g.degree(), s.degree());
        }
    }
}
