//! Shared fixtures for integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::collections::BTreeSet;

use ifthen_core::atlas::{build_graph, AtlasGraph, Dimension, EventPhrase, Split, Triple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERBS: [&str; 10] = ["bakes", "paints", "fixes", "washes", "sells", "finds", "hides", "cleans", "builds", "moves"];
const NOUNS: [&str; 10] = ["bread", "fence", "bike", "car", "boat", "lamp", "chair", "desk", "kite", "sofa"];
const PLACES: [&str; 5] = ["home", "outside", "downtown", "upstairs", "nearby"];

/// Per-dimension phrase that ends in the event's noun.
fn template(d: Dimension) -> &'static str {
    match d {
        Dimension::XIntent => "to make it look nice and use the",
        Dimension::XNeed => "to go out first and get a new",
        Dimension::XAttr => "careful and patient with every single",
        Dimension::XEffect => "gets tired after working all day on the",
        Dimension::XReact => "feels proud and happy about the",
        Dimension::XWant => "to show all of the friends the",
        Dimension::OEffect => "others can come over later and use the",
        Dimension::OReact => "others really like the look of the",
        Dimension::OWant => "others want to ask about the price of the",
    }
}

fn noun(i: usize) -> &'static str {
    NOUNS[(i / 10 + 3 * (i % 10)) % 10]
}

/// Event `i` of the synthetic fixture: `PersonX <verb> the <noun> <place>`.
pub fn synthetic_event(i: usize) -> String {
    format!("PersonX {} the {} {}", VERBS[i % 10], noun(i), PLACES[i % 5])
}

/// Target for event `i` and dimension `d`.
pub fn synthetic_target(i: usize, d: Dimension) -> String {
    format!("{} {}", template(d), noun(i))
}

/// `n` events, one annotation per dimension each, all in Train.
pub fn synthetic_triples(n: usize) -> Vec<Triple> {
    let mut out = Vec::new();
    for i in 0..n {
        for d in Dimension::ALL {
            out.push(Triple::new(&synthetic_event(i), d, &synthetic_target(i, d), Split::Train, "w0").unwrap());
        }
    }
    out
}

pub fn synthetic_graph(n: usize) -> AtlasGraph {
    build_graph(synthetic_triples(n)).unwrap()
}

const SPLIT_VERBS: [&str; 24] = [
    "takes", "gives", "buys", "sells", "paints", "fixes", "finds", "loses", "moves", "hides", "cleans", "builds",
    "washes", "bakes", "reads", "writes", "drives", "rides", "throws", "catches", "opens", "closes", "carries", "drops",
];
const SPLIT_NOUNS: [&str; 16] =
    ["dog", "car", "bike", "fence", "lamp", "book", "desk", "kite", "boat", "cake", "letter", "ball", "door", "box", "hat", "cup"];
const TAILS: [&str; 8] = ["", "today", "at home", "for PersonY", "in the park", "again", "with care", "before dinner"];

/// Events whose (verb, noun) groups have varied sizes.
pub fn random_events(seed: u64, n: usize) -> Vec<EventPhrase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        // skew toward low indices so some groups are much larger than others
        let v = rng.random_range(0..SPLIT_VERBS.len()).min(rng.random_range(0..SPLIT_VERBS.len()));
        let o = rng.random_range(0..SPLIT_NOUNS.len());
        let tail = TAILS[rng.random_range(0..TAILS.len())];
        let det = if rng.random_bool(0.5) { "the" } else { "a" };
        let text = format!("PersonX {} {det} {} {tail} {}", SPLIT_VERBS[v], SPLIT_NOUNS[o], rng.random_range(0..12));
        if seen.insert(text.clone()) {
            out.push(EventPhrase::new(&text).unwrap());
        }
    }
    out
}
