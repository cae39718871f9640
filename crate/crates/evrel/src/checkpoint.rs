//! Plain-text parameter checkpoints.
//!
//! ```text
//! evrel-checkpoint 1
//! dims vocab=64 d_tok=16 d_pos=18 d_h=16 commonsense=0 cell=lstm
//! tensor embedding 64 16
//! <one line of space-separated values per row>
//! tensor rnn.fwd.wx 64 34
//! ...
//! end
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a saved
//! checkpoint reloads bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use evrel_core::autodiff::{ParamSet, Tensor};
use evrel_core::model::{CellType, Dims, EncoderParams, ModelError};

pub const MAGIC: &str = "evrel-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn to_text(params: &EncoderParams) -> String {
    let d = params.dims;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(
        out,
        "dims vocab={} d_tok={} d_pos={} d_h={} commonsense={} cell={}",
        d.vocab,
        d.d_tok,
        d.d_pos,
        d.d_h,
        d.commonsense,
        d.cell.name()
    );
    for (name, t) in params.set.iter() {
        let _ = writeln!(out, "tensor {name} {} {}", t.rows, t.cols);
        for r in 0..t.rows {
            let row: Vec<String> = t.row(r).iter().map(|x| format!("{x:e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, CheckpointError> {
        match self.inner.next() {
            Some((k, l)) => {
                self.line = k + 1;
                Ok(l)
            }
            None => Err(self.error("unexpected end of file")),
        }
    }

    fn error(&self, message: impl Into<String>) -> CheckpointError {
        CheckpointError::Parse { line: self.line, message: message.into() }
    }
}

fn parse_dims(line: &str, lines: &Lines<'_>) -> Result<Dims, CheckpointError> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some("dims") {
        return Err(lines.error("expected a dims line"));
    }
    let mut dims = Dims::default();
    let mut seen = 0;
    for kv in fields {
        let (k, v) = kv.split_once('=').ok_or_else(|| lines.error(format!("bad field {kv:?}")))?;
        let num = || v.parse::<usize>().map_err(|_| lines.error(format!("bad value for {k}")));
        match k {
            "vocab" => dims.vocab = num()?,
            "d_tok" => dims.d_tok = num()?,
            "d_pos" => dims.d_pos = num()?,
            "d_h" => dims.d_h = num()?,
            "commonsense" => dims.commonsense = num()?,
            "cell" => {
                dims.cell = CellType::from_name(v).ok_or_else(|| lines.error(format!("unknown cell {v:?}")))?
            }
            _ => return Err(lines.error(format!("unknown field {k:?}"))),
        }
        seen += 1;
    }
    if seen != 6 {
        return Err(lines.error("dims line needs vocab, d_tok, d_pos, d_h, commonsense and cell"));
    }
    Ok(dims)
}

pub fn from_text(text: &str) -> Result<EncoderParams, CheckpointError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let header = lines.next()?;
    let version = match header.split_whitespace().collect::<Vec<_>>()[..] {
        [MAGIC, v] => v.parse::<u32>().map_err(|_| lines.error("bad version"))?,
        _ => return Err(lines.error("not an evrel checkpoint")),
    };
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let dims = parse_dims(lines.next()?, &lines)?;
    let mut set = ParamSet::new();
    loop {
        let line = lines.next()?;
        if line == "end" {
            break;
        }
        let (name, rows, cols) = match line.split_whitespace().collect::<Vec<_>>()[..] {
            ["tensor", name, rows, cols] => {
                let n = |s: &str| s.parse::<usize>().map_err(|_| lines.error("bad tensor shape"));
                (name.to_string(), n(rows)?, n(cols)?)
            }
            _ => return Err(lines.error("expected a tensor header or end")),
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let row = lines.next()?;
            let before = data.len();
            for v in row.split_whitespace() {
                data.push(v.parse::<f64>().map_err(|_| lines.error(format!("bad value {v:?}")))?);
            }
            if data.len() - before != cols {
                return Err(lines.error(format!("expected {cols} values")));
            }
        }
        set.add(name, Tensor::from_vec(rows, cols, data));
    }
    Ok(EncoderParams::from_parts(dims, set)?)
}

pub fn save(params: &EncoderParams, path: &Path) -> Result<(), CheckpointError> {
    fs::write(path, to_text(params))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<EncoderParams, CheckpointError> {
    from_text(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use evrel_core::model::init_params;

    fn small() -> EncoderParams {
        let dims = Dims { vocab: 20, d_tok: 3, d_h: 2, commonsense: 2, cell: CellType::Tanh, ..Dims::default() };
        init_params(5, dims)
    }

    #[test]
    fn round_trip_is_bitwise() {
        for p in [small(), init_params(1, Dims { vocab: 30, d_tok: 4, d_h: 3, ..Dims::default() })] {
            let back = from_text(&to_text(&p)).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn rejects_wrong_version_and_truncation() {
        let text = to_text(&small());
        let bumped = text.replacen("evrel-checkpoint 1", "evrel-checkpoint 9", 1);
        assert!(matches!(from_text(&bumped), Err(CheckpointError::Version(9))));
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(from_text(&cut), Err(CheckpointError::Parse { line: 5, .. })));
    }

    #[test]
    fn rejects_shape_mismatch() {
        let text = to_text(&small()).replacen("d_h=2", "d_h=3", 1);
        assert!(matches!(from_text(&text), Err(CheckpointError::Model(_))));
    }
}
