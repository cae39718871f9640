use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use evrel_core::data::{
    ablation_corpus, annotate_partially, generate_corpus, split_corpus, AnnotationProtocol, CorpusRecord, Grammar, Split,
    SyntheticSpec,
};
use evrel_core::harness::{
    evaluate_problems, greedy_graph, run_ablation, score_records, train, Decoding, TrainConfig,
};
use evrel_core::inference::{global_decode_windowed, DEFAULT_MAX_EVENTS};
use evrel_core::relations::{algebra_self_check, count_violations, transitive_closure, RelationGraph};
use evrel::report::{ablation_rows, mean_table, AblationJson, DecodeStatsJson, MetricsJson, TrainingJson};
use evrel::{checkpoint, config, corpus, red};

#[derive(Parser)]
#[command(name = "evrel", version, about = "Joint temporal and subevent relation extraction with logical constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic corpus of event complexes.
    Generate(GenerateArgs),
    /// Train a pair scorer and write a checkpoint.
    Train(TrainArgs),
    /// Score a checkpoint on one split of a corpus.
    Eval(EvalArgs),
    /// Decode documents into relation graphs.
    Decode(DecodeArgs),
    /// Verify the relation algebra and, optionally, a corpus.
    Check(CheckArgs),
    /// Run the ablation ladder over several seeds.
    Ablate(AblateArgs),
    /// Convert a tab-separated RED relation export to a corpus file.
    ConvertRed(ConvertRedArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    docs: usize,
    #[arg(long, default_value_t = 5)]
    min_events: usize,
    #[arg(long, default_value_t = 9)]
    max_events: usize,
    #[arg(long, default_value_t = 1)]
    min_branching: usize,
    #[arg(long, default_value_t = 3)]
    max_branching: usize,
    /// Fraction of VG/NR noise.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0.1)]
    coref: f64,
    #[arg(long, default_value_t = 64)]
    vocab: usize,
    /// Template grammar id: 0 explicit, 1 narrative.
    #[arg(long, default_value_t = 0)]
    grammar: u32,
    /// Train/dev/test fractions, comma separated.
    #[arg(long, default_value = "0.7,0.1,0.2")]
    split: String,
    /// Drop training labels with the default partial-annotation protocol.
    #[arg(long)]
    partial: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Load gold graphs without closing and validating them.
    #[arg(long)]
    lenient: bool,
    /// Hash buckets for tokens stored without a vocabulary id.
    #[arg(long, default_value_t = 512)]
    hash_vocab: usize,
}

impl CorpusArgs {
    fn load(&self) -> Result<Vec<CorpusRecord>> {
        let opts = corpus::LoadOptions { strict: !self.lenient, vocab: self.hash_vocab };
        corpus::load_corpus(&self.corpus, &opts).with_context(|| format!("loading {}", self.corpus.display()))
    }
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Start from the tuned synthetic-ablation settings instead of the defaults.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    lambda_s: Option<f64>,
    #[arg(long)]
    lambda_c: Option<f64>,
    /// Probability floor applied before taking logs.
    #[arg(long)]
    prob_floor: Option<f64>,
    #[arg(long)]
    conjunction_hinge: Option<bool>,
    #[arg(long)]
    max_triples_per_doc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
}

impl ConfigArgs {
    fn build(&self) -> Result<TrainConfig> {
        let mut cfg = if self.desk { TrainConfig::desk_ablation() } else { TrainConfig::default() };
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            config::apply_all(&mut cfg, &config::parse(&text)?)?;
        }
        for kv in &self.overrides {
            let (k, v) = kv.split_once('=').with_context(|| format!("override {kv:?} is not key=value"))?;
            config::apply(&mut cfg, k.trim(), v.trim())?;
        }
        let flags: [(&str, Option<String>); 7] = [
            ("lambda_s", self.lambda_s.map(|x| x.to_string())),
            ("lambda_c", self.lambda_c.map(|x| x.to_string())),
            ("prob_floor", self.prob_floor.map(|x| x.to_string())),
            ("conjunction_hinge", self.conjunction_hinge.map(|x| x.to_string())),
            ("max_triples_per_doc", self.max_triples_per_doc.map(|x| x.to_string())),
            ("seed", self.seed.map(|x| x.to_string())),
            ("epochs", self.epochs.map(|x| x.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                config::apply(&mut cfg, k, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Checkpoint to write.
    #[arg(short, long)]
    output: PathBuf,
    /// JSON training log.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeChoice {
    /// Exact constrained decoding (the default).
    #[arg(long, conflicts_with = "greedy")]
    global: bool,
    /// Independent per-head argmax.
    #[arg(long)]
    greedy: bool,
    /// Largest document decoded in one exact search; longer ones use
    /// overlapping windows.
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, default_value = "test")]
    split: String,
    #[command(flatten)]
    decode: DecodeChoice,
    #[arg(long, default_value_t = evrel_core::losses::DEFAULT_PROB_FLOOR)]
    prob_floor: f64,
    /// JSON metrics report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    decode: DecodeChoice,
    #[arg(long, default_value_t = evrel_core::losses::DEFAULT_PROB_FLOOR)]
    prob_floor: f64,
    /// Per-document search statistics as a JSON array.
    #[arg(long)]
    stats_json: Option<PathBuf>,
    /// Corpus file holding the decoded graphs.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Corpus whose gold graphs should close without violations.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    /// Existing corpus; when absent a synthetic one is generated per seed.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long, default_value_t = 200)]
    docs: usize,
    /// JSON report with every ladder and the mean.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertRedArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 512)]
    hash_vocab: usize,
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad fraction {x:?}")))
        .collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn synthetic(seed: u64, docs: usize, vocab: usize) -> Result<Vec<CorpusRecord>> {
    Ok(ablation_corpus(seed, docs, vocab)?)
}

fn print_metrics(label: &str, m: &MetricsJson) {
    println!("{label}");
    println!(
        "  temporal  P {:.4}  R {:.4}  F1 {:.4}",
        m.temporal.precision, m.temporal.recall, m.temporal.f1
    );
    println!("  subevent  F1_PC {:.4}  F1_CP {:.4}  F1_micro {:.4}", m.f1_pc, m.f1_cp, m.f1_micro);
    println!("  violation rate {:.6}", m.violation_rate);
}

fn generate(a: &GenerateArgs) -> Result<ExitCode> {
    let grammar = Grammar::from_id(a.grammar).with_context(|| format!("unknown grammar {}", a.grammar))?;
    let spec = SyntheticSpec {
        seed: a.seed,
        docs: a.docs,
        events: (a.min_events, a.max_events),
        branching: (a.min_branching, a.max_branching),
        noise: a.noise,
        coref: a.coref,
        vocab_size: a.vocab,
        grammar,
    };
    let mut records = split_corpus(generate_corpus(&spec)?, &parse_fractions(&a.split)?, a.seed)?;
    if a.partial {
        annotate_partially(&mut records, &AnnotationProtocol::default(), a.seed);
    }
    corpus::save_corpus(&records, &a.output)?;
    for s in Split::ALL {
        println!("{}: {} documents", s.name(), records.iter().filter(|r| r.split == s).count());
    }
    Ok(ExitCode::SUCCESS)
}

fn train_cmd(a: &TrainArgs) -> Result<ExitCode> {
    let records = a.corpus.load()?;
    let cfg = a.config.build()?;
    log::info!("effective configuration:\n{}", config::render(&cfg));
    let (params, log) = train(&cfg, &records)?;
    checkpoint::save(&params, &a.output)?;
    let json = TrainingJson::from(&log);
    for e in &json.epochs {
        let dev = match (e.dev_temporal_f1, e.dev_subevent_f1) {
            (Some(t), Some(s)) => format!("  dev T-F1 {t:.4} S-F1 {s:.4}"),
            _ => String::new(),
        };
        println!(
            "epoch {:>3}  L {:.4}  L_A {:.4}  L_S {:.4}  L_C {:.4}{dev}",
            e.epoch, e.loss.total, e.loss.l_a, e.loss.l_s, e.loss.l_c
        );
    }
    if let Some(k) = json.selected_epoch {
        println!("selected epoch {k}");
    }
    if let Some(path) = &a.report {
        write_json(path, &json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn decoding(d: &DecodeChoice) -> Decoding {
    if d.greedy {
        Decoding::Local
    } else {
        Decoding::Global { max_events: d.max_events }
    }
}

fn eval_cmd(a: &EvalArgs) -> Result<ExitCode> {
    let split = Split::from_name(&a.split)?;
    let records: Vec<CorpusRecord> = a.corpus.load()?.into_iter().filter(|r| r.split == split).collect();
    if records.is_empty() {
        bail!("no {} documents in {}", a.split, a.corpus.corpus.display());
    }
    let params = checkpoint::load(&a.checkpoint)?;
    let problems = score_records(&params, &records, a.prob_floor)?;
    let gold: Vec<RelationGraph> = records.iter().map(|r| r.gold.clone()).collect();
    let mode = decoding(&a.decode);
    let m = evaluate_problems(&problems, &gold, mode)?;
    let json = MetricsJson::from(&m);
    print_metrics(&format!("{} split, {} documents", a.split, records.len()), &json);
    if let Some(path) = &a.report {
        write_json(path, &json)?;
    }
    if matches!(mode, Decoding::Global { .. }) && m.violation_rate != 0.0 {
        eprintln!("invariant failure: globally decoded graphs violate the induction table");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn decode_cmd(a: &DecodeArgs) -> Result<ExitCode> {
    let records = a.corpus.load()?;
    let params = checkpoint::load(&a.checkpoint)?;
    let problems = score_records(&params, &records, a.prob_floor)?;
    let mut out = Vec::with_capacity(records.len());
    let mut stats = Vec::new();
    let mut failures = 0;
    for (r, p) in records.iter().zip(&problems) {
        let graph = if a.decode.greedy {
            greedy_graph(p)
        } else {
            let (g, s) = global_decode_windowed(p, a.decode.max_events)?;
            failures += (s.violations > 0) as usize;
            stats.push(DecodeStatsJson::new(&r.document.id, p.n_events(), &s));
            g
        };
        out.push(CorpusRecord { document: r.document.clone(), gold: graph, split: r.split });
    }
    corpus::save_corpus(&out, &a.output)?;
    let violations: usize = out.iter().map(|r| count_violations(&r.gold).violating_triples).sum();
    println!("decoded {} documents, {violations} violating triples", out.len());
    if let Some(path) = &a.stats_json {
        write_json(path, &stats)?;
    }
    if failures > 0 {
        eprintln!("invariant failure: {failures} globally decoded documents violate the induction table");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn check_cmd(a: &CheckArgs) -> Result<ExitCode> {
    let issues = algebra_self_check();
    for i in &issues {
        println!("algebra: {i:?}");
    }
    println!("algebra: {} issues", issues.len());
    let mut bad = issues.len();
    if let Some(path) = &a.corpus {
        let lenient = corpus::LoadOptions { strict: false, ..corpus::LoadOptions::default() };
        let records = corpus::load_corpus(path, &lenient)?;
        for (k, r) in records.iter().enumerate() {
            match transitive_closure(&r.gold) {
                Err(e) => {
                    println!("record {k} ({}): {e}", r.document.id);
                    bad += 1;
                }
                Ok(closed) => {
                    let v = count_violations(&closed).violating_triples;
                    if v > 0 {
                        println!("record {k} ({}): {v} violating triples after closure", r.document.id);
                        bad += 1;
                    }
                }
            }
        }
        println!("corpus: {} records checked", records.len());
    }
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn ablate_cmd(a: &AblateArgs) -> Result<ExitCode> {
    let base = a.config.build()?;
    let fixed = match &a.corpus {
        Some(path) => Some(corpus::load_corpus(path, &corpus::LoadOptions::default())?),
        None => None,
    };
    let seeds: Vec<u64> = (0..a.seeds).map(|k| base.seed + k).collect();
    let mut tables = Vec::new();
    for &seed in &seeds {
        let records = match &fixed {
            Some(r) => r.clone(),
            None => synthetic(seed, a.docs, base.dims.vocab)?,
        };
        let table = run_ablation(&TrainConfig { seed, ..base.clone() }, &records)?;
        println!("seed {seed}\n{}", table.render());
        tables.push(table);
    }
    let mean = mean_table(&tables);
    println!("mean over {} seeds\n{}", seeds.len(), mean.render());
    if let Some(path) = &a.report {
        let json = AblationJson {
            seeds,
            runs: tables.iter().map(ablation_rows).collect(),
            mean: ablation_rows(&mean),
        };
        write_json(path, &json)?;
    }
    let global = mean.row(evrel_core::harness::ROW_GLOBAL).map_or(0.0, |m| m.violation_rate);
    if global != 0.0 {
        eprintln!("invariant failure: the +global row has violations");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn convert_red_cmd(a: &ConvertRedArgs) -> Result<ExitCode> {
    let file = fs::File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let c = red::convert_red(BufReader::new(file), a.hash_vocab)?;
    corpus::save_corpus(&c.records, &a.output)?;
    println!("converted {} documents", c.records.len());
    let mut err = std::io::stderr();
    for (raw, n) in &c.unlisted {
        writeln!(err, "unlisted relation {raw:?} ({n}x) mapped to a default class")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Train(a) => train_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::Ablate(a) => ablate_cmd(a),
        Command::ConvertRed(a) => convert_red_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
