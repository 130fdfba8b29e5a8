//! Neural workflows: `train`, `generate`, `gradcheck`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use ifthen_core::generate::{
    generate_beam, generate_greedy, write_generation_dump, DecodeOptions, GenerationList, NearestNeighborIndex,
};
use ifthen_core::seq2seq::{
    apply_embeddings, build_instances, build_vocab, gradient_check, load_checkpoint, parse_embeddings, perturb_biases,
    random_instance, save_checkpoint, train as train_model, ModelConfig, ModelParams, StaticEmbeddings, Variant,
};
use ifthen_core::{Dimension, Split};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::write_resolved;
use crate::error::{required, CliError, CliResult};
use crate::io::{load_graph, read_text, thread_pool, write_json};

fn defaults() -> ModelConfig {
    ModelConfig::default()
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainArgs {
    /// Atlas file; only the train split is used [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Encoder sharing configuration
    #[arg(long, default_value_t = defaults().variant)]
    pub variant: Variant,
    /// Static word vectors `token<TAB>f1 ... fd` copied into the embedding matrix
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Word embedding width
    #[arg(long, default_value_t = defaults().embed_dim)]
    pub embed_dim: usize,
    /// Encoder state width, split evenly between the two directions
    #[arg(long, default_value_t = defaults().enc_hidden)]
    pub enc_hidden: usize,
    /// Decoder state width
    #[arg(long, default_value_t = defaults().dec_hidden)]
    pub dec_hidden: usize,
    /// Longest generation, in tokens
    #[arg(long, default_value_t = defaults().max_decode_len)]
    pub max_decode_len: usize,
    #[arg(long, default_value_t = defaults().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = defaults().batch_size)]
    pub batch_size: usize,
    #[arg(long, default_value_t = defaults().epochs)]
    pub epochs: usize,
    /// Seed for initialization and batch order
    #[arg(long, default_value_t = defaults().seed)]
    pub seed: u64,
    /// Global gradient norm cap; 0 disables clipping
    #[arg(long, default_value_t = defaults().clip_norm)]
    pub clip_norm: f64,
    /// Weights start uniform in [-init_scale, init_scale]
    #[arg(long, default_value_t = defaults().init_scale)]
    pub init_scale: f64,
    /// Keep the embedding matrix fixed during training [default: off]
    #[arg(long, default_value_t = defaults().freeze_embeddings)]
    pub freeze_embeddings: bool,
    /// Tokens seen fewer times in training data map to <unk>
    #[arg(long, default_value_t = defaults().min_count)]
    pub min_count: usize,
    /// Checkpoint path; the loss trace goes to `<out>.trace.json` [required]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl TrainArgs {
    fn model_config(&self) -> ModelConfig {
        ModelConfig {
            variant: self.variant,
            embed_dim: self.embed_dim,
            enc_hidden: self.enc_hidden,
            dec_hidden: self.dec_hidden,
            max_decode_len: self.max_decode_len,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed: self.seed,
            clip_norm: self.clip_norm,
            init_scale: self.init_scale,
            freeze_embeddings: self.freeze_embeddings,
            min_count: self.min_count,
        }
    }
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let out = required(&args.out, "out")?;
    let config = args.model_config();
    if config.variant == Variant::NearestNeighbor {
        return Err(CliError::usage("nearest-neighbor has nothing to train; use `generate --variant nearest-neighbor`"));
    }
    config.validate().map_err(|e| CliError::usage(e.to_string()))?;

    let graph = load_graph(&atlas)?;
    let triples = graph.to_triples();
    let vocab = build_vocab(&triples, config.min_count);
    let data = build_instances(&graph, &vocab, &config.variant.dimensions());
    if data.is_empty() {
        return Err(CliError::data(&atlas, "no non-empty train-split annotations to learn from"));
    }
    let mut params = ModelParams::init(&config, vocab.len()).map_err(|e| CliError::model(&atlas, e))?;
    if let Some(p) = &args.embeddings {
        let emb = parse_embeddings(&read_text(p)?).map_err(|e| CliError::data(p, e))?;
        let n = apply_embeddings(&mut params, &vocab, &emb).map_err(|e| CliError::data(p, e))?;
        log::info!("initialized {n} of {} embedding rows from {}", vocab.len(), p.display());
    }
    log::info!("{} instances, vocabulary {}, {} parameters", data.len(), vocab.len(), params.num_parameters());

    let (params, trace) = train_model(params, &data, &config).map_err(|e| CliError::model(&atlas, e))?;
    save_checkpoint(&out, &config, &vocab, &params).map_err(|e| CliError::model(&out, e))?;
    write_json(&with_suffix(&out, ".trace.json"), &serde_json::json!({ "epoch_loss": trace }))?;
    write_resolved(&out, "train", args)?;

    println!("{} epochs on {} instances ({} tokens in vocabulary)", trace.len(), data.len(), vocab.len());
    if let (Some(first), Some(last)) = (trace.first(), trace.last()) {
        println!("mean loss {first:.4} -> {last:.4}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// Trained checkpoint; with nearest-neighbor its embedding matrix may stand in for --embeddings
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Set to nearest-neighbor for the retrieval baseline; otherwise taken from the checkpoint
    #[arg(long)]
    pub variant: Option<Variant>,
    /// Static word vectors for nearest-neighbor retrieval
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Atlas supplying the events to generate for (and the retrieval pool) [required]
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Split whose events are generated for
    #[arg(long, default_value_t = Split::Test)]
    pub split: Split,
    /// Comma-separated dimensions; unset means every dimension the model has
    #[arg(long, value_delimiter = ',')]
    pub dimensions: Vec<Dimension>,
    /// Beam width, also the number of generations kept per list
    #[arg(long, default_value_t = DecodeOptions::default().beam_width)]
    pub beam_width: usize,
    /// Longest generation, in tokens
    #[arg(long, default_value_t = DecodeOptions::default().max_len)]
    pub max_len: usize,
    /// Renormalize <unk> out of every step [default: off]
    #[arg(long, default_value_t = false)]
    pub suppress_unk: bool,
    /// Greedy decoding instead of beam search [default: off]
    #[arg(long, default_value_t = false)]
    pub greedy: bool,
    /// Worker threads; output order does not depend on it
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Generation dump (JSON lines) [required]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn pick_dimensions(requested: &[Dimension], available: &[Dimension]) -> CliResult<Vec<Dimension>> {
    if requested.is_empty() {
        return Ok(available.to_vec());
    }
    for d in requested {
        if !available.contains(d) {
            return Err(CliError::usage(format!("this model has no {d} decoder")));
        }
    }
    let mut dims = requested.to_vec();
    dims.sort();
    dims.dedup();
    Ok(dims)
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let atlas = required(&args.atlas, "atlas")?;
    let out = required(&args.out, "out")?;
    if args.beam_width == 0 || args.max_len == 0 {
        return Err(CliError::usage("--beam-width and --max-len must be positive"));
    }
    let graph = load_graph(&atlas)?;
    let events: Vec<&str> = graph
        .events()
        .values()
        .filter(|e| graph.split_of(e.text()) == Some(args.split))
        .map(|e| e.text())
        .collect();
    let checkpoint = match &args.checkpoint {
        Some(p) => Some((p.clone(), load_checkpoint(p).map_err(|e| CliError::model(p, e))?)),
        None => None,
    };
    let pool = thread_pool(args.threads)?;

    let lists: Vec<GenerationList> = if args.variant == Some(Variant::NearestNeighbor) {
        let emb = match (&args.embeddings, &checkpoint) {
            (Some(p), _) => parse_embeddings(&read_text(p)?).map_err(|e| CliError::data(p, e))?,
            (None, Some((_, ck))) => StaticEmbeddings::from_model(&ck.vocab, &ck.params),
            (None, None) => return Err(CliError::usage("nearest-neighbor needs --embeddings or --checkpoint")),
        };
        let train = graph.filter_split(Split::Train).map_err(|e| CliError::data(&atlas, e))?;
        let index = NearestNeighborIndex::new(&train, &emb);
        let dims = pick_dimensions(&args.dimensions, &Dimension::ALL)?;
        let pairs: Vec<(&str, Dimension)> = events.iter().flat_map(|e| dims.iter().map(move |d| (*e, *d))).collect();
        pool.install(|| pairs.par_iter().map(|(e, d)| index.predict(e, *d, args.beam_width)).collect())
    } else {
        let Some((path, ck)) = &checkpoint else {
            return Err(CliError::usage("missing required setting --checkpoint"));
        };
        if let Some(v) = args.variant.filter(|v| *v != ck.config.variant) {
            return Err(CliError::usage(format!("checkpoint holds a {} model, not {v}", ck.config.variant)));
        }
        let available: Vec<Dimension> = ck.params.dimensions().collect();
        let dims = pick_dimensions(&args.dimensions, &available)?;
        let opts = DecodeOptions { beam_width: args.beam_width, max_len: args.max_len, suppress_unk: args.suppress_unk };
        let pairs: Vec<(&str, Dimension)> = events.iter().flat_map(|e| dims.iter().map(move |d| (*e, *d))).collect();
        pool.install(|| {
            pairs
                .par_iter()
                .map(|(e, d)| {
                    let res = if args.greedy {
                        generate_greedy(&ck.params, &ck.vocab, e, *d, &opts)
                    } else {
                        generate_beam(&ck.params, &ck.vocab, e, *d, &opts)
                    };
                    res.map_err(|err| CliError::data(path, format!("{e:?} / {d}: {err}")))
                })
                .collect::<CliResult<Vec<_>>>()
        })?
    };

    let file = File::create(&out).map_err(|e| CliError::data(&out, e))?;
    let mut w = BufWriter::new(file);
    write_generation_dump(&mut w, &lists).map_err(|e| CliError::data(&out, e))?;
    w.flush().map_err(|e| CliError::data(&out, e))?;
    write_resolved(&out, "generate", args)?;
    println!("{} generation lists for {} {} events", lists.len(), events.len(), args.split);
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradcheckArgs {
    /// Comma-separated variants; unset checks all four neural variants
    #[arg(long, value_delimiter = ',')]
    pub variants: Vec<Variant>,
    #[arg(long, default_value_t = 30)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 16)]
    pub embed_dim: usize,
    /// Encoder and decoder state width
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    /// Weights and biases start uniform in [-init_scale, init_scale]
    #[arg(long, default_value_t = 0.5)]
    pub init_scale: f64,
    /// Coordinates compared per dimension (at least 200)
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Central-difference step
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    /// Largest acceptable relative error
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write per-variant reports as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct VariantCheck {
    variant: Variant,
    max_relative_error: f64,
    checked: usize,
    worst_dimension: Dimension,
    worst_tensor: String,
    passed: bool,
}

pub fn gradcheck(args: &GradcheckArgs) -> CliResult<()> {
    let variants = if args.variants.is_empty() {
        vec![Variant::Single9, Variant::EventInvolEvent, Variant::EventPersonXY, Variant::EventPrePost]
    } else {
        args.variants.clone()
    };
    if variants.contains(&Variant::NearestNeighbor) {
        return Err(CliError::usage("nearest-neighbor has no gradients"));
    }
    let mut results = Vec::new();
    for variant in variants {
        let config = ModelConfig {
            variant,
            embed_dim: args.embed_dim,
            enc_hidden: args.hidden,
            dec_hidden: args.hidden,
            init_scale: args.init_scale,
            seed: args.seed,
            ..ModelConfig::default()
        };
        config.validate().map_err(|e| CliError::usage(e.to_string()))?;
        let usage = |e: ifthen_core::seq2seq::Seq2SeqError| CliError::usage(e.to_string());
        let mut params = ModelParams::init(&config, args.vocab_size).map_err(usage)?;
        perturb_biases(&mut params, args.init_scale, args.seed);
        let mut worst: Option<VariantCheck> = None;
        let mut checked = 0;
        for (i, dim) in variant.dimensions().into_iter().enumerate() {
            let seed = args.seed.wrapping_add(i as u64);
            let inst = random_instance(args.vocab_size, dim, 5, 4, seed).map_err(usage)?;
            let r = gradient_check(&params, &inst, args.epsilon, args.samples, seed, None).map_err(usage)?;
            checked += r.checked;
            if worst.as_ref().is_none_or(|w| r.max_relative_error > w.max_relative_error) {
                worst = Some(VariantCheck {
                    variant,
                    max_relative_error: r.max_relative_error,
                    checked: 0,
                    worst_dimension: dim,
                    worst_tensor: r.worst.0,
                    passed: false,
                });
            }
        }
        let mut w = worst.expect("every variant has dimensions");
        w.checked = checked;
        w.passed = w.max_relative_error < args.tolerance;
        println!(
            "{:<16} max relative error {:.3e} over {} coordinates (worst {} {}) {}",
            variant.name(),
            w.max_relative_error,
            w.checked,
            w.worst_dimension,
            w.worst_tensor,
            if w.passed { "ok" } else { "FAILED" }
        );
        results.push(w);
    }
    if let Some(out) = &args.out {
        write_json(out, &results)?;
        write_resolved(out, "gradcheck", args)?;
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.variant.name()).collect();
    if !failed.is_empty() {
        return Err(CliError::Numeric(format!("gradient check above {:e} for {}", args.tolerance, failed.join(", "))));
    }
    Ok(())
}
