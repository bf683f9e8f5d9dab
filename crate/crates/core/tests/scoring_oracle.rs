mod common;

use common::{oracle_sos, random_fixture};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sosbias::dataset::generate;
use sosbias::dataset::Template;
use sosbias::lexicon::Lexicon;
use sosbias::scoring::toy::UniformBackend;
use sosbias::scoring::{score_sentences, sos_score, Counts, ScoreFilter};

fn tally(c: &Counts) -> (u64, u64, u64) {
    (c.greater, c.ties, c.less)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sos_matches_brute_force(seed in any::<u64>(), discrete in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fixture(&mut rng, 50, discrete);
        let got = sos_score(&f.dataset, &f.backend, ScoreFilter::default()).unwrap();
        let want = oracle_sos(&f);
        prop_assert_eq!(tally(&got.overall), want.overall);
        prop_assert_eq!(got.per_attribute.len(), want.per_attribute.len());
        for (k, t) in &want.per_attribute {
            prop_assert_eq!(tally(&got.per_attribute[k]), *t);
        }
        prop_assert_eq!(got.per_group.len(), want.per_group.len());
        for (k, t) in &want.per_group {
            prop_assert_eq!(tally(&got.per_group[k]), *t);
        }
        prop_assert_eq!(got.slot_mismatches, 0);
    }

    #[test]
    fn swapping_sentences_mirrors_counts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fixture(&mut rng, 40, true);
        let a = sos_score(&f.dataset, &f.backend, ScoreFilter::default()).unwrap();
        let b = sos_score(&f.dataset.swapped(), &f.backend, ScoreFilter::default()).unwrap();
        prop_assert_eq!(a.overall.greater, b.overall.less);
        prop_assert_eq!(a.overall.ties, b.overall.ties);
        prop_assert_eq!(a.overall.less, b.overall.greater);
    }

    #[test]
    fn uniform_score_is_shared_count_times_log_inverse_vocab(v in 1usize..100_000, n in 1usize..40) {
        let shared: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let s = format!("{} profane", shared.join(" "));
        let s_prime = format!("{} clean words", shared.join(" "));
        let backend = UniformBackend::new(v);
        let (part, a, b) = score_sentences(&s, &s_prime, &backend).unwrap();
        let want = n as f64 * (1.0 / v as f64).ln();
        prop_assert_eq!(part.n_unmodified(), n);
        prop_assert!((a - want).abs() <= 1e-12 * want.abs().max(1.0));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn tie_free_datasets_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let f = random_fixture(&mut rng, 50, false);
        let a = sos_score(&f.dataset, &f.backend, ScoreFilter::default()).unwrap();
        let b = sos_score(&f.dataset.swapped(), &f.backend, ScoreFilter::default()).unwrap();
        assert_eq!(a.overall.ties, 0);
        assert_eq!(a.overall.greater + b.overall.greater, a.overall.n());
    }
}

#[test]
fn reference_dataset_scores_every_pair() {
    let ds = generate(&Lexicon::reference(), &Template::defaults()).unwrap();
    let r = sos_score(&ds, &UniformBackend::new(30_522), ScoreFilter::default()).unwrap();
    // Equal shared content and a uniform model: every pair ties.
    assert_eq!(r.overall.ties, 1638);
    assert_eq!(r.per_attribute.len(), 6);
    // Disability has no non-marginalized terms.
    assert_eq!(r.per_group.len(), 11);
}
