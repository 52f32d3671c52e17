//! End-to-end behavior on the seeded synthetic corpus.

use polarembed_core::{
    effective_rank, generate_synthetic, neighbors, train, Dimension, Direction, SynthConfig,
    TrainConfig, TrainingSet, Weighting,
};

fn training_set(seed: u64) -> TrainingSet {
    let docs = generate_synthetic(&SynthConfig {
        seed,
        ..Default::default()
    })
    .unwrap();
    TrainingSet::from_documents(&docs, Weighting::Tf).unwrap()
}

#[test]
fn effective_rank_near_fifteen() {
    for seed in 0..3 {
        let k = effective_rank(&training_set(seed).phi, 0.15).unwrap().chosen_k;
        assert!((13..=17).contains(&k), "seed {seed}: k = {k}");
    }
}

#[test]
fn positive_words_are_farthest_from_negative_words() {
    let set = training_set(21);
    for seed in [3, 4] {
        let cfg = TrainConfig {
            dimension: Dimension::Fixed(15),
            seed,
            ..Default::default()
        };
        let model = train(&set, &cfg).unwrap();
        for word in set.vocab.words().iter().filter(|w| w.starts_with("pos")) {
            let r = neighbors(&model, word, 1, Direction::Farthest).unwrap();
            let (far, sim) = &r.ranked[0];
            assert!(far.starts_with("neg"), "{word} -> {far}");
            assert!(*sim < 0.0, "{word} -> {far}: {sim}");
        }
    }
}
