mod common;

use common::oracles::{naive_stats, random_triples};
use ifthen_core::atlas::*;
use proptest::prelude::*;

fn sorted(mut ts: Vec<Triple>) -> Vec<Triple> {
    sort_triples(&mut ts);
    ts
}

fn jsonl(ts: &[Triple]) -> String {
    let mut buf = Vec::new();
    write_atlas_jsonl(ts, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tsv_jsonl_and_graph_round_trip(seed in any::<u64>(), n in 0usize..300) {
        let ts = random_triples(seed, n);
        let want = sorted(ts.clone());

        let tsv = atlas_tsv_string(&ts).unwrap();
        let from_tsv = parse_atlas_tsv(&tsv).unwrap();
        prop_assert_eq!(&from_tsv, &want);
        prop_assert_eq!(parse_atlas(&tsv).unwrap(), want.clone());

        let js = jsonl(&from_tsv);
        let from_json = parse_atlas_jsonl(&js).unwrap();
        prop_assert_eq!(&from_json, &want);
        prop_assert_eq!(parse_atlas(&js).unwrap(), want.clone());
        prop_assert_eq!(atlas_tsv_string(&from_json).unwrap(), tsv);

        let graph = build_graph(from_json).unwrap();
        prop_assert_eq!(graph.to_triples(), want);
    }

    #[test]
    fn stats_match_naive_counts(seed in any::<u64>(), n in 0usize..400) {
        let ts = random_triples(seed, n);
        let r = graph_stats(&build_graph(ts.clone()).unwrap());
        let o = naive_stats(&ts);
        prop_assert_eq!(r.triples_total, o.triples_total);
        prop_assert_eq!(&r.triples_by_content_type, &o.triples_by_content_type);
        prop_assert_eq!(r.nodes_total, o.nodes_total);
        prop_assert_eq!(&r.nodes_by_content_type, &o.nodes_by_content_type);
        prop_assert_eq!(r.base_event_count, o.base_event_count);
        prop_assert_eq!(r.nodes_appearing_multiple, o.nodes_appearing_multiple);
        prop_assert_eq!(r.empty_annotations, o.empty_annotations);
        prop_assert_eq!(r.avg_words_all_nodes.words, o.words_all_nodes);
        prop_assert_eq!(r.avg_words_all_nodes.nodes, o.nodes_total);
    }

    #[test]
    fn graph_is_insensitive_to_input_order(seed in any::<u64>(), n in 1usize..200) {
        let ts = random_triples(seed, n);
        let mut rev = ts.clone();
        rev.reverse();
        let (a, b) = (build_graph(ts).unwrap(), build_graph(rev).unwrap());
        prop_assert_eq!(a.triples(), b.triples());
        prop_assert_eq!(graph_stats(&a), graph_stats(&b));
    }
}

#[test]
fn stats_match_naive_counts_at_ten_thousand_triples() {
    let ts = random_triples(77, 10_000);
    assert!(ts.len() > 5_000, "fixture too small: {}", ts.len());
    let r = graph_stats(&build_graph(ts.clone()).unwrap());
    let o = naive_stats(&ts);
    assert_eq!(
        (r.triples_total, r.nodes_total, r.base_event_count, r.nodes_appearing_multiple, r.empty_annotations),
        (o.triples_total, o.nodes_total, o.base_event_count, o.nodes_appearing_multiple, o.empty_annotations)
    );
    assert_eq!(r.triples_by_content_type, o.triples_by_content_type);
    assert_eq!(r.nodes_by_content_type, o.nodes_by_content_type);
}

#[test]
fn taxonomy_axis_counts() {
    let count = |f: &dyn Fn(TaxonomyCoords) -> bool| Dimension::ALL.into_iter().filter(|d| f(d.coords())).count();
    assert_eq!(count(&|c| c.volition == Volition::Voluntary), 4);
    assert_eq!(count(&|c| c.volition == Volition::Involuntary), 5);
    assert_eq!(count(&|c| c.subject == Subject::Agent), 6);
    assert_eq!(count(&|c| c.subject == Subject::Theme), 3);
    assert_eq!(count(&|c| c.causal_category == CausalCategory::Cause), 2);
    assert_eq!(count(&|c| c.causal_category == CausalCategory::Effect), 6);
    assert_eq!(count(&|c| c.causal_category == CausalCategory::Stative), 1);
    for d in Dimension::ALL {
        assert_eq!(classify_dimension(d), d.coords());
    }
}

#[test]
fn split_conflict_is_reported() {
    let a = Triple::new("PersonX naps", Dimension::XWant, "to rest", Split::Train, "w1").unwrap();
    let b = Triple::new("personx  NAPS", Dimension::XReact, "rested", Split::Test, "w2").unwrap();
    assert!(matches!(build_graph(vec![a, b]), Err(AtlasError::SplitConflict { .. })));
}
