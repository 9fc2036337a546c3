use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use randfa_core::blocks::BlockAlphabet;
use randfa_core::certificate::{epimorphism_automaton, fa_certificate, Status, WeightFunction, Witness, FA_LAMBDA};
use randfa_core::splittings::FreeProduct;
use randfa_core::words::sample_reduced;
use randfa_core::{Alphabet, BAutomaton, EAutomaton, Letter, LetterSet, Presentation, Word};

fn all_words(alphabet: &Alphabet, len: usize) -> Vec<Word> {
    let mut words = vec![Word::empty()];
    for _ in 0..len {
        words = words.into_iter().flat_map(|w| alphabet.letters().map(move |l| w.concat(&Word(vec![l])))).collect();
    }
    words
}

fn automaton_from_masks(alphabet: Alphabet, start: u64, sigma: &[u64]) -> BAutomaton {
    let m = alphabet.size();
    let sets = sigma.iter().map(|&s| LetterSet::from_mask(m, s)).collect();
    BAutomaton::new(alphabet, LetterSet::from_mask(m, start), sets).unwrap()
}

fn masks(m: u32) -> impl Strategy<Value = (u64, Vec<u64>)> {
    let full = (1u64 << m) - 1;
    (0..=full, proptest::collection::vec(0..=full, m as usize))
}

fn word(n: u32, max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0..2 * n, 0..=max_len).prop_map(|v| Word(v.into_iter().map(Letter).collect()))
}

proptest! {
    #[test]
    fn b_counts_equal_brute_force((start, sigma) in masks(4), len in 1usize..=5) {
        let a = Alphabet::new(2).unwrap();
        let aut = automaton_from_masks(a, start, &sigma);
        let words = all_words(&a, len);
        let plain = words.iter().filter(|w| aut.accepts(w).unwrap()).count();
        let reduced = words.iter().filter(|w| w.is_reduced(&a) && aut.accepts(w).unwrap()).count();
        prop_assert_eq!(aut.count_words(len), plain.into());
        prop_assert_eq!(aut.count_reduced_words(len), reduced.into());
    }

    #[test]
    fn e_counts_equal_brute_force((start, sigma) in masks(4), tau in proptest::collection::vec(0u64..16, 4), len in 1usize..=5) {
        let a = Alphabet::new(2).unwrap();
        let base = automaton_from_masks(a, start, &sigma);
        let e = EAutomaton::new(base, tau.iter().map(|&t| LetterSet::from_mask(4, t)).collect()).unwrap();
        let words = all_words(&a, len);
        let plain = words.iter().filter(|w| e.accepts(w).unwrap()).count();
        let reduced = words.iter().filter(|w| w.is_reduced(&a) && e.accepts(w).unwrap()).count();
        prop_assert_eq!(e.count_words(len), plain.into());
        prop_assert_eq!(e.count_reduced_words(len), reduced.into());
    }

    #[test]
    fn free_reduction_is_a_normal_form(w in word(3, 12), v in word(3, 12)) {
        let a = Alphabet::new(3).unwrap();
        let r = w.free_reduce(&a);
        prop_assert!(r.is_reduced(&a));
        prop_assert_eq!(r.free_reduce(&a), r.clone());
        prop_assert!(w.concat(&w.inverse(&a)).free_reduce(&a).is_empty());
        let left = r.concat(&v).free_reduce(&a);
        let right = w.concat(&v.free_reduce(&a)).free_reduce(&a);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn free_product_agrees_with_the_flat_free_group(w in word(3, 14), ra in 1u32..=2) {
        let fp = FreeProduct::new(ra, 3 - ra).unwrap();
        let flat = fp.flat_alphabet();
        let g = fp.normal_form(&[fp.unflatten(&w)]);
        prop_assert_eq!(fp.flatten(&g), w.free_reduce(&flat));
        let text = fp.format(&g);
        prop_assert_eq!(fp.parse(&text).unwrap(), g.clone());
        let h = fp.multiply(&g, &fp.inverse(&g));
        prop_assert!(h.is_identity());
    }

    #[test]
    fn blocks_round_trip(seed in any::<u64>(), k in 1usize..=3, b in 2usize..=3) {
        let a = Alphabet::new(2).unwrap();
        let blocks = BlockAlphabet::new(a, b).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let w = sample_reduced(&a, k * b, &mut rng);
        let hat = blocks.associate_word(&w).unwrap();
        prop_assert_eq!(hat.len(), k);
        prop_assert_eq!(blocks.de_block(&hat).unwrap(), w);
        let text = blocks.format_word(&hat).unwrap();
        prop_assert_eq!(blocks.parse_word(&text).unwrap(), hat);
    }

    #[test]
    fn weight_automata_accept_only_positive_words(psi in proptest::collection::vec(-2i64..=2, 2..=3)) {
        prop_assume!(psi.iter().any(|&x| x != 0));
        let a = Alphabet::new(psi.len() as u32).unwrap();
        let w = WeightFunction::new(psi);
        let aut = epimorphism_automaton(a, &w).unwrap();
        prop_assert!(aut.is_lambda_large(randfa_core::Rational::new(1, 2)));
        for len in 1..=4 {
            for x in all_words(&a, len) {
                if aut.accepts(&x).unwrap() {
                    prop_assert!(w.word_weight(&a, &x) > 0);
                }
            }
        }
    }

    #[test]
    fn certificate_verdicts_are_sound(seed in any::<u64>(), count in 0usize..=8, len in 2usize..=4) {
        let a = Alphabet::new(2).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let relators: Vec<Word> = (0..count).map(|_| sample_reduced(&a, len, &mut rng)).collect();
        let p = Presentation::new(a, relators.clone()).unwrap();
        let v = fa_certificate(&p);
        match v.status {
            Status::NotCertified => {
                prop_assert!(v.witness_is_valid(&relators));
                let Some(Witness::B(w)) = &v.witness else { panic!("b-automaton witness expected") };
                prop_assert!(w.is_lambda_large(FA_LAMBDA));
            }
            Status::Certified => {
                let aut = randfa_core::automata::random_large_automaton(a, FA_LAMBDA, &mut rng);
                prop_assert!(relators.iter().any(|r| aut.accepts(r).unwrap()));
            }
            Status::Unknown => prop_assert!(false, "n = 2 enumerates"),
        }
    }
}
