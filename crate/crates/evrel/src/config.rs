//! `key = value` training configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key of
//! [`KEYS`] may appear at most once; later overrides (command-line flags)
//! go through [`apply`] as well.

use std::fmt::Write as _;

use evrel_core::harness::TrainConfig;
use evrel_core::model::{CellType, Dims};
use evrel_core::relations::Head;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("{0} given twice")]
    Duplicate(String),
}

pub const KEYS: [&str; 21] = [
    "seed",
    "epochs",
    "batch_pairs",
    "learning_rate",
    "lambda_s",
    "lambda_c",
    "prob_floor",
    "conjunction_hinge",
    "max_triples_per_doc",
    "balance_labels",
    "max_events",
    "joint",
    "task_constraints",
    "cross_task_constraints",
    "global_inference",
    "task",
    "vocab",
    "d_tok",
    "d_h",
    "cell_type",
    "paper_scale",
];

/// Parses the file into `(line, key, value)` triples without interpreting
/// values.
pub fn parse(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: "expected key = value".into() })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if out.iter().any(|(_, k, _)| *k == key) {
            return Err(ConfigError::Duplicate(key));
        }
        out.push((line, key, value));
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: v.into() })
}

/// Sets one key on `cfg`. `paper_scale = true` resets the batch size,
/// epoch count and widths to the published profile.
pub fn apply(cfg: &mut TrainConfig, key: &str, v: &str) -> Result<(), ConfigError> {
    match key {
        "seed" => cfg.seed = value(key, v)?,
        "epochs" => cfg.epochs = value(key, v)?,
        "batch_pairs" => cfg.batch_pairs = value(key, v)?,
        "learning_rate" => cfg.learning_rate = value(key, v)?,
        "lambda_s" => cfg.lambda_s = value(key, v)?,
        "lambda_c" => cfg.lambda_c = value(key, v)?,
        "prob_floor" => cfg.prob_floor = value(key, v)?,
        "conjunction_hinge" => cfg.conjunction_hinge = value(key, v)?,
        "max_triples_per_doc" => cfg.max_triples_per_doc = value(key, v)?,
        "balance_labels" => cfg.balance_labels = value(key, v)?,
        "max_events" => cfg.max_events = value(key, v)?,
        "joint" => cfg.flags.joint = value(key, v)?,
        "task_constraints" => cfg.flags.task_constraints = value(key, v)?,
        "cross_task_constraints" => cfg.flags.cross_task_constraints = value(key, v)?,
        "global_inference" => cfg.flags.global_inference = value(key, v)?,
        "task" => {
            cfg.task = match v {
                "temporal" => Head::Temporal,
                "subevent" => Head::Subevent,
                _ => return Err(ConfigError::BadValue { key: key.into(), value: v.into() }),
            }
        }
        "vocab" => cfg.dims.vocab = value(key, v)?,
        "d_tok" => cfg.dims.d_tok = value(key, v)?,
        "d_h" => cfg.dims.d_h = value(key, v)?,
        "cell_type" => {
            cfg.dims.cell = CellType::from_name(v)
                .ok_or_else(|| ConfigError::BadValue { key: key.into(), value: v.into() })?
        }
        "paper_scale" => {
            if value::<bool>(key, v)? {
                let p = TrainConfig::paper_scale();
                cfg.epochs = p.epochs;
                cfg.batch_pairs = p.batch_pairs;
                cfg.dims = Dims { vocab: cfg.dims.vocab, ..p.dims };
            }
        }
        _ => return Err(ConfigError::UnknownKey(key.into())),
    }
    Ok(())
}

/// Applies every entry of a parsed file in order.
pub fn apply_all(cfg: &mut TrainConfig, entries: &[(usize, String, String)]) -> Result<(), ConfigError> {
    for (line, k, v) in entries {
        apply(cfg, k, v).map_err(|e| ConfigError::Syntax { line: *line, message: e.to_string() })?;
    }
    Ok(())
}

/// The effective configuration in the same `key = value` form.
pub fn render(cfg: &TrainConfig) -> String {
    let mut out = String::new();
    let f = cfg.flags;
    let task = match cfg.task {
        Head::Temporal => "temporal",
        Head::Subevent => "subevent",
    };
    let entries: [(&str, String); 20] = [
        ("seed", cfg.seed.to_string()),
        ("epochs", cfg.epochs.to_string()),
        ("batch_pairs", cfg.batch_pairs.to_string()),
        ("learning_rate", cfg.learning_rate.to_string()),
        ("lambda_s", cfg.lambda_s.to_string()),
        ("lambda_c", cfg.lambda_c.to_string()),
        ("prob_floor", cfg.prob_floor.to_string()),
        ("conjunction_hinge", cfg.conjunction_hinge.to_string()),
        ("max_triples_per_doc", cfg.max_triples_per_doc.to_string()),
        ("balance_labels", cfg.balance_labels.to_string()),
        ("max_events", cfg.max_events.to_string()),
        ("joint", f.joint.to_string()),
        ("task_constraints", f.task_constraints.to_string()),
        ("cross_task_constraints", f.cross_task_constraints.to_string()),
        ("global_inference", f.global_inference.to_string()),
        ("task", task.to_string()),
        ("vocab", cfg.dims.vocab.to_string()),
        ("d_tok", cfg.dims.d_tok.to_string()),
        ("d_h", cfg.dims.d_h.to_string()),
        ("cell_type", cfg.dims.cell.name().to_string()),
    ];
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}
