mod common;

use std::collections::BTreeSet;

use common::synthetic_graph;
use ifthen_core::seq2seq::*;
use ifthen_core::Dimension;
use proptest::prelude::*;

const TRAINABLE: [Variant; 4] = [Variant::Single9, Variant::EventInvolEvent, Variant::EventPersonXY, Variant::EventPrePost];

fn tiny(variant: Variant, seed: u64) -> ModelConfig {
    ModelConfig { variant, embed_dim: 5, enc_hidden: 6, dec_hidden: 4, seed, init_scale: 0.4, batch_size: 3, ..Default::default() }
}

#[test]
fn encoder_and_decoder_counts() {
    for (variant, encoders, decoders) in [
        (Variant::Single9, 9, 9),
        (Variant::EventInvolEvent, 2, 9),
        (Variant::EventPersonXY, 2, 9),
        (Variant::EventPrePost, 2, 8),
    ] {
        let p = ModelParams::init(&tiny(variant, 0), 12).unwrap();
        assert_eq!(p.encoder_ids().count(), encoders, "{variant}");
        assert_eq!(p.dimensions().count(), decoders, "{variant}");
        let used: BTreeSet<&str> = p.dimensions().map(|d| p.encoder_id(d).unwrap()).collect();
        assert_eq!(used.len(), encoders, "{variant}: every encoder feeds some decoder");
    }
    let pp = ModelParams::init(&tiny(Variant::EventPrePost, 0), 12).unwrap();
    assert!(pp.decoder(Dimension::XAttr).is_err());
}

#[test]
fn sharing_follows_the_groupings() {
    use Dimension::*;
    let same = |v: Variant, a: Dimension, b: Dimension| {
        let g = encoder_grouping(v).unwrap();
        g[&a] == g[&b]
    };
    assert!(same(Variant::EventInvolEvent, XIntent, OWant));
    assert!(same(Variant::EventInvolEvent, XEffect, XAttr));
    assert!(!same(Variant::EventInvolEvent, XWant, XReact));
    assert!(same(Variant::EventPersonXY, XAttr, XWant));
    assert!(!same(Variant::EventPersonXY, XWant, OWant));
    assert!(same(Variant::EventPrePost, XNeed, XIntent));
    assert!(!same(Variant::EventPrePost, XNeed, XEffect));
    assert!(!encoder_grouping(Variant::EventPrePost).unwrap().contains_key(&XAttr));
}

fn instances_for(dim: Dimension, vocab: usize) -> Vec<TrainingInstance> {
    (0..4).map(|i| random_instance(vocab, dim, 3 + i, 2 + i % 2, i as u64).unwrap()).collect()
}

#[test]
fn training_one_dimension_leaves_other_branches_untouched() {
    for variant in TRAINABLE {
        let dim = Dimension::XWant;
        let cfg = ModelConfig { epochs: 3, ..tiny(variant, 4) };
        let p0 = ModelParams::init(&cfg, 14).unwrap();
        let (p1, _) = train(p0.clone(), &instances_for(dim, 14), &cfg).unwrap();
        let active_enc = format!("encoder.{}.", p0.encoder_id(dim).unwrap());
        let active_dec = format!("decoder.{}.", dim.name());
        let mut changed = 0;
        for ((name, a), (_, b)) in p0.tensors().into_iter().zip(p1.tensors()) {
            let bits = |m: &Matrix| m.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            let active = name.starts_with(&active_enc) || name.starts_with(&active_dec) || name == "embedding";
            if active {
                changed += usize::from(bits(a) != bits(b));
            } else {
                assert_eq!(bits(a), bits(b), "{variant}: {name} moved");
            }
        }
        assert!(changed > 0, "{variant}: nothing trained");
    }
}

#[test]
fn zero_model_loss_is_log_vocab() {
    for variant in TRAINABLE {
        for v in [9usize, 30, 101] {
            let p = ModelParams::zeros(&tiny(variant, 0), v).unwrap();
            for dim in variant.dimensions() {
                let inst = random_instance(v, dim, 4, 3, 1).unwrap();
                let loss = p.sequence_loss(&inst).unwrap();
                assert!((loss - (v as f64).ln()).abs() < 1e-12, "{variant} {dim} V={v}: {loss}");
            }
        }
    }
}

#[test]
fn training_is_deterministic() {
    let graph = synthetic_graph(8);
    let triples = graph.to_triples();
    let vocab = build_vocab(triples.iter(), 1);
    for variant in TRAINABLE {
        let cfg = ModelConfig { epochs: 2, ..tiny(variant, 11) };
        let data = build_instances(&graph, &vocab, &variant.dimensions());
        let run = || {
            let (p, trace) = train(ModelParams::init(&cfg, vocab.len()).unwrap(), &data, &cfg).unwrap();
            (checkpoint_bytes(&cfg, &vocab, &p).unwrap(), trace)
        };
        let (a, ta) = run();
        let (b, tb) = run();
        assert_eq!(a, b, "{variant}");
        assert_eq!(ta.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), tb.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn checkpoint_round_trip_is_bit_exact(seed in any::<u64>(), which in 0usize..4, extra in 0usize..10) {
        let cfg = tiny(TRAINABLE[which], seed);
        let mut toks: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        toks.extend((0..extra).map(|i| format!("tok{i}")));
        let vocab = VocabularyMap::from_tokens(toks).unwrap();
        let mut p = ModelParams::init(&cfg, vocab.len()).unwrap();
        perturb_biases(&mut p, 1.0, seed);
        let bytes = checkpoint_bytes(&cfg, &vocab, &p).unwrap();
        let ck = read_checkpoint(&bytes).unwrap();
        prop_assert_eq!(&ck.config, &cfg);
        prop_assert_eq!(&ck.vocab, &vocab);
        for ((na, a), (nb, b)) in p.tensors().into_iter().zip(ck.params.tensors()) {
            prop_assert_eq!(&na, &nb);
            prop_assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        prop_assert_eq!(checkpoint_bytes(&ck.config, &ck.vocab, &ck.params).unwrap(), bytes.clone());

        // every proper prefix is rejected rather than misread
        for cut in [0, 7, 12, bytes.len() / 2, bytes.len() - 1] {
            prop_assert!(read_checkpoint(&bytes[..cut]).is_err());
        }
    }
}
