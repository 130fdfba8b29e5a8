//! Deliberately naive reimplementations used as test oracles. They share no
//! code with the library beyond its data types.

use std::collections::BTreeMap;

use ifthen_core::atlas::{ContentType, Dimension, Split, Triple};
use ifthen_core::generate::{BeamConfig, Scored, StepModel};
use ifthen_core::overlap::{ExternalEdge, RelationGroup};
use ifthen_core::seq2seq::Seq2SeqError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERBS: [&str; 12] =
    ["eats", "buys", "sells", "paints", "fixes", "finds", "loses", "moves", "hides", "cleans", "builds", "washes"];
const OBJECTS: [&str; 12] =
    ["bread", "the car", "a bike", "the fence", "a lamp", "the dog", "a book", "the desk", "a kite", "the boat", "tea", "it"];
const TARGETS: [&str; 16] = [
    "none", "to rest", "happy", "tired", "eats bread", "to buy a bike", "gets paid", "the dog", "sad", "to sleep", "none",
    "proud", "sells the car", "to go home", "careful", "finds a book",
];

/// Random triples over small vocabularies so that duplicates, shared nodes and
/// target texts that are also events all occur. The split is a function of
/// the event and `(event, dimension, target, worker)` is never repeated.
pub fn random_triples(seed: u64, n: usize) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n && attempts < 50 * n {
        attempts += 1;
        let v = rng.random_range(0..VERBS.len());
        let o = rng.random_range(0..OBJECTS.len());
        let with_y = rng.random_bool(0.2);
        let event = if with_y {
            format!("PersonX {} PersonY {}", VERBS[v], OBJECTS[o])
        } else {
            format!("PersonX {} {}", VERBS[v], OBJECTS[o])
        };
        let dim = Dimension::ALL[rng.random_range(0..9)];
        let target = TARGETS[rng.random_range(0..TARGETS.len())];
        let worker = format!("w{}", rng.random_range(0..4));
        let split = Split::ALL[(v + o + usize::from(with_y)) % 3];
        if seen.insert((event.clone(), dim, target, worker.clone())) {
            out.push(Triple::new(&event, dim, target, split, &worker).unwrap());
        }
    }
    out
}

fn lower_collapse(s: &str) -> String {
    s.split_whitespace().map(|w| w.to_lowercase()).collect::<Vec<_>>().join(" ")
}

fn content_type(d: Dimension) -> ContentType {
    match d {
        Dimension::XIntent | Dimension::XReact | Dimension::OReact => ContentType::MentalState,
        Dimension::XAttr => ContentType::Persona,
        _ => ContentType::Event,
    }
}

/// Counts recomputed from the raw triples by linear scans.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct NaiveStats {
    pub triples_total: u64,
    pub triples_by_content_type: BTreeMap<ContentType, u64>,
    pub nodes_total: u64,
    pub nodes_by_content_type: BTreeMap<ContentType, u64>,
    pub base_event_count: u64,
    pub nodes_appearing_multiple: u64,
    pub empty_annotations: u64,
    pub words_all_nodes: u64,
}

pub fn naive_stats(triples: &[Triple]) -> NaiveStats {
    // distinct (event, dimension, target) with a representative target text
    let mut distinct: Vec<(String, Dimension, String, String, String)> = Vec::new();
    for t in triples {
        let key = (lower_collapse(t.event.text()), t.dimension, lower_collapse(t.target.text()));
        if !distinct.iter().any(|d| d.0 == key.0 && d.1 == key.1 && d.2 == key.2) {
            distinct.push((key.0, key.1, key.2, t.event.text().to_string(), t.target.text().to_string()));
        }
    }
    let mut s = NaiveStats::default();
    for ct in [ContentType::MentalState, ContentType::Event, ContentType::Persona] {
        s.triples_by_content_type.insert(ct, 0);
        s.nodes_by_content_type.insert(ct, 0);
    }
    let mut events: Vec<(String, usize)> = Vec::new();
    for t in triples {
        let k = lower_collapse(t.event.text());
        if !events.iter().any(|e| e.0 == k) {
            events.push((k, t.event.text().split_whitespace().count()));
        }
    }
    s.base_event_count = events.len() as u64;

    let mut nodes: Vec<(String, usize)> = events.clone();
    let mut typed: Vec<(ContentType, String)> = Vec::new();
    let mut occurrences: Vec<(String, u64)> = Vec::new();
    let mut bump = |k: &str| match occurrences.iter_mut().find(|o| o.0 == k) {
        Some(o) => o.1 += 1,
        None => occurrences.push((k.to_string(), 1)),
    };
    for (ek, dim, tk, _, ttext) in &distinct {
        if tk == "none" {
            s.empty_annotations += 1;
            continue;
        }
        s.triples_total += 1;
        *s.triples_by_content_type.get_mut(&content_type(*dim)).unwrap() += 1;
        if !nodes.iter().any(|n| &n.0 == tk) {
            nodes.push((tk.clone(), ttext.split_whitespace().count()));
        }
        if !typed.iter().any(|(c, k)| *c == content_type(*dim) && k == tk) {
            typed.push((content_type(*dim), tk.clone()));
        }
        bump(ek);
        if tk != ek {
            bump(tk);
        }
    }
    for (ct, _) in &typed {
        *s.nodes_by_content_type.get_mut(ct).unwrap() += 1;
    }
    s.nodes_total = nodes.len() as u64;
    s.words_all_nodes = nodes.iter().map(|n| n.1 as u64).sum();
    s.nodes_appearing_multiple = occurrences.iter().filter(|o| o.1 > 1).count() as u64;
    s
}

/// Sentence BLEU-2 written as a direct transcription of the definition:
/// clipped counts by pairwise scanning, precisions multiplied, square root.
pub fn bleu2_oracle(candidate: &[String], references: &[Vec<String>], epsilon: f64, smooth_unigrams: bool) -> f64 {
    if candidate.is_empty() || references.is_empty() {
        return 0.0;
    }
    let mut product = 1.0;
    for n in 1..=2usize {
        let grams = |s: &[String]| -> Vec<Vec<String>> {
            if s.len() < n {
                Vec::new()
            } else {
                (0..=s.len() - n).map(|i| s[i..i + n].to_vec()).collect()
            }
        };
        let cand = grams(candidate);
        let mut distinct: Vec<Vec<String>> = Vec::new();
        for g in &cand {
            if !distinct.contains(g) {
                distinct.push(g.clone());
            }
        }
        let mut clipped = 0usize;
        for g in &distinct {
            let in_cand = cand.iter().filter(|x| *x == g).count();
            let in_refs = references.iter().map(|r| grams(r).iter().filter(|x| *x == g).count()).max().unwrap_or(0);
            clipped += in_cand.min(in_refs);
        }
        let denom = if cand.is_empty() { 1 } else { cand.len() };
        let numer = if clipped == 0 {
            if n == 1 && !smooth_unigrams {
                return 0.0;
            }
            epsilon
        } else {
            clipped as f64
        };
        product *= numer / denom as f64;
    }
    let c = candidate.len() as f64;
    let mut best: Option<f64> = None;
    for r in references {
        let len = r.len() as f64;
        best = match best {
            None => Some(len),
            Some(b) if (len - c).abs() < (b - c).abs() || ((len - c).abs() == (b - c).abs() && len < b) => Some(len),
            keep => keep,
        };
    }
    let r = best.unwrap();
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    bp * product.sqrt()
}

/// Overlap by a double loop over distinct triples and edges.
pub fn naive_overlap(
    triples: &[Triple],
    edges: &[ExternalEdge],
    normalize: impl Fn(&str) -> String,
) -> BTreeMap<RelationGroup, (usize, usize)> {
    // fixtures have no case variants, so any representative text will do
    let mut keys: Vec<(String, Dimension, String)> = Vec::new();
    let mut distinct: Vec<(&str, Dimension, &str)> = Vec::new();
    for t in triples {
        let key = (lower_collapse(t.event.text()), t.dimension, lower_collapse(t.target.text()));
        if !keys.contains(&key) {
            keys.push(key);
            distinct.push((t.event.text(), t.dimension, t.target.text()));
        }
    }
    let mut out = BTreeMap::new();
    for g in RelationGroup::ALL {
        let (mut hit, mut total) = (0, 0);
        for (event, dim, target) in &distinct {
            if *target == "none" || !g.dimensions().contains(dim) {
                continue;
            }
            total += 1;
            let (s, e) = (normalize(event), normalize(target));
            let mut found = false;
            for edge in edges {
                if g.relations().contains(&edge.relation()) && edge.start() == s && edge.end() == e {
                    found = true;
                }
            }
            if found {
                hit += 1;
            }
        }
        out.insert(g, (hit, total));
    }
    out
}

/// A step model whose next-token distribution is a pseudo-random function of
/// the whole prefix, so no structure can be exploited by the search.
pub struct HashedModel {
    pub vocab: usize,
    pub seed: u64,
}

impl StepModel for HashedModel {
    type State = Vec<u32>;

    fn vocab_size(&self) -> usize {
        self.vocab
    }

    fn step(&self, state: &Vec<u32>, prev: u32) -> Result<(Vec<f64>, Vec<u32>), Seq2SeqError> {
        let mut history = state.clone();
        history.push(prev);
        let mut h = self.seed ^ 0xcbf2_9ce4_8422_2325;
        for t in &history {
            h = (h ^ u64::from(*t)).wrapping_mul(0x0000_0100_0000_01b3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let logits: Vec<f64> = (0..self.vocab).map(|_| rng.random_range(-3.0..3.0)).collect();
        let z = logits.iter().map(|x| x.exp()).sum::<f64>().ln();
        Ok((logits.iter().map(|x| x - z).collect(), history))
    }
}

/// Every complete sequence with its score: sequences end at the first `eos`
/// or at `max_len`; banned tokens are excluded and the rest renormalized.
pub fn enumerate_sequences<M: StepModel>(model: &M, init: M::State, cfg: &BeamConfig) -> Vec<Scored> {
    fn renorm(mut lp: Vec<f64>, banned: &[u32]) -> Vec<f64> {
        for b in banned {
            lp[*b as usize] = f64::NEG_INFINITY;
        }
        let m = lp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z = m + lp.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
        lp.into_iter().map(|x| x - z).collect()
    }
    fn walk<M: StepModel>(
        model: &M,
        state: M::State,
        prev: u32,
        prefix: Vec<u32>,
        score: f64,
        cfg: &BeamConfig,
        out: &mut Vec<Scored>,
    ) {
        let (lp, next) = model.step(&state, prev).unwrap();
        let lp = renorm(lp, &cfg.banned);
        for (tok, l) in lp.iter().enumerate() {
            if *l == f64::NEG_INFINITY {
                continue;
            }
            let mut tokens = prefix.clone();
            tokens.push(tok as u32);
            if tok as u32 == cfg.eos || tokens.len() == cfg.max_len {
                out.push(Scored { tokens, score: score + l });
            } else {
                walk(model, next.clone(), tok as u32, tokens, score + l, cfg, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(model, init, cfg.bos, Vec::new(), 0.0, cfg, &mut out);
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.tokens.cmp(&b.tokens)));
    out
}
