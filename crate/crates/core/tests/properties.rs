use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tropteich::canon::{automorphisms, canonical_form, certificate};
use tropteich::contraction::contract;
use tropteich::enumerate::enumerate_stable_graphs;
use tropteich::free_group::{conjugacy_normal_form, random_automorphism, tuples_conjugate, Word};
use tropteich::graph::WeightedGraph;
use tropteich::marking::Marking;
use tropteich::moduli::random_marking;
use tropteich::tropicalize::{padic_valuation, Valuation};

fn letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<i32>> {
    let r = rank as i32;
    prop::collection::vec((1..=r, any::<bool>()).prop_map(|(k, s)| if s { k } else { -k }), 0..=max)
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    letters(rank, max).prop_map(move |l| Word::reduce(rank, &l).unwrap())
}

fn genus3() -> &'static [WeightedGraph] {
    use std::sync::OnceLock;
    static GRAPHS: OnceLock<Vec<WeightedGraph>> = OnceLock::new();
    GRAPHS.get_or_init(|| enumerate_stable_graphs(3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_idempotent_and_free(l in letters(3, 20)) {
        let w = Word::reduce(3, &l).unwrap();
        prop_assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!(Word::reduce(3, w.letters()).unwrap(), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_identity());
    }

    #[test]
    fn multiplication_is_associative(a in word(2, 8), b in word(2, 8), c in word(2, 8)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn words_print_and_parse(w in word(3, 12)) {
        prop_assert_eq!(Word::parse(3, &w.to_string()).unwrap(), w);
    }

    #[test]
    fn automorphisms_are_homomorphisms_and_invert(seed in any::<u64>(), u in word(3, 6), v in word(3, 6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_automorphism(3, 6, &mut rng);
        prop_assert_eq!(a.apply(&u.mul(&v)).unwrap(), a.apply(&u).unwrap().mul(&a.apply(&v).unwrap()));
        let inv = a.invert().unwrap();
        prop_assert!(a.compose(&inv).unwrap().is_identity());
        prop_assert_eq!(inv.apply(&a.apply(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn normal_form_ignores_simultaneous_conjugation(
        t in prop::collection::vec(word(2, 6), 1..4),
        c in word(2, 6),
    ) {
        let moved: Vec<Word> = t.iter().map(|w| w.conjugate_by(&c)).collect();
        let (a, b) = (conjugacy_normal_form(&t), conjugacy_normal_form(&moved));
        prop_assert_eq!(&a.words, &b.words);
        for (k, w) in t.iter().enumerate() {
            prop_assert_eq!(&w.conjugate_by(&a.conjugator), &a.words[k]);
        }
        let u = tuples_conjugate(&moved, &t).unwrap().expect("conjugate tuples");
        for (x, y) in moved.iter().zip(&t) {
            prop_assert_eq!(x, &y.conjugate_by(&u));
        }
    }

    #[test]
    fn certificates_ignore_labels(k in 0usize..42, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let g = &genus3()[k];
        let mut perm: Vec<usize> = (0..g.size()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.relabel(&perm);
        prop_assert_eq!(certificate(&h), certificate(g));
        prop_assert_eq!(automorphisms(&h).len(), automorphisms(g).len());
        prop_assert_eq!(canonical_form(&h).certificate.decode().unwrap(), canonical_form(g).graph);
    }

    #[test]
    fn contractions_stay_stable(k in 0usize..42, mask in any::<u64>()) {
        let g = &genus3()[k];
        let edges: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| mask >> e & 1 == 1).collect();
        let (h, c) = contract(g, &edges).unwrap();
        prop_assert!(c.is_valid());
        prop_assert!(h.is_stable());
        prop_assert_eq!(h.genus(), 3);
        prop_assert_eq!(h.edge_count(), g.edge_count() - edges.len());
    }

    #[test]
    fn marking_classes_survive_inner_moves_and_basepoints(k in 0usize..42, seed in any::<u64>(), c in word(3, 5)) {
        let g = &genus3()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: Marking = random_marking(g, &mut rng).unwrap();
        let inner = m.act(&tropteich::free_group::GroupMap::inner(&c)).unwrap();
        prop_assert_eq!(inner.top_class(), m.top_class());
        let v = *g.vertices().last().unwrap();
        let path = m.presentation().tree_path(v).unwrap().to_vec();
        prop_assert_eq!(m.change_basepoint(&path).unwrap().top_class(), m.top_class());
        let n = m.act(&random_automorphism(3, 4, &mut rng)).unwrap();
        prop_assert_eq!(m.act(&m.difference(&n).unwrap()).unwrap(), n);
    }

    #[test]
    fn valuation_is_additive(a in 1i64..1_000_000, b in 1i64..1_000_000, c in 1i64..1_000_000, d in 1i64..1_000_000,
                             p in prop::sample::select(vec![2u64, 3, 5, 7, 31, 257])) {
        let x = BigRational::new(BigInt::from(a), BigInt::from(b));
        let y = BigRational::new(BigInt::from(-c), BigInt::from(d));
        let v = |q: &BigRational| match padic_valuation(q, p).unwrap() {
            Valuation::Finite(n) => n,
            Valuation::Infinity => unreachable!("nonzero"),
        };
        prop_assert_eq!(v(&(&x * &y)), v(&x) + v(&y));
        prop_assert_eq!(v(&(&x / &y)), v(&x) - v(&y));
    }
}
