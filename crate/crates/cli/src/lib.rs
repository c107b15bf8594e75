//! Command interpreter behind the `ctxcalc` binary.
//!
//! A [`Session`] holds the dimension registry, the named values, the stream
//! equations with their warehouse, the choice seed and the output mode. Each
//! command either succeeds and updates the session or fails and leaves it
//! as it was.
//!
//! ```
//! use ctxcalc_cli::Session;
//!
//! let mut s = Session::new(0);
//! s.run_command("dim d : int").unwrap();
//! s.run_command("dim e : int").unwrap();
//! s.run_command("dim f : int").unwrap();
//! s.run_command("let c = {(d,1),(e,4),(f,3)}").unwrap();
//! let reply = s.run_command("eval c ! {d,e}").unwrap();
//! assert_eq!(reply.lines, ["{(d,1),(e,4)}"]);
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ctxcalc::expr::{evaluate, parse_dimset_literal, parse_expression, Environment, ExprError, Value};
use ctxcalc::stream::{
    eval_prefix, parse_equations, parse_stream_prefix, EquationSet, StreamError, StreamValue, Warehouse,
    DEFAULT_BUDGET, TIME,
};
use ctxcalc::{Dim, DimensionRegistry, EnumDomain, TagKind, TagValue};
use serde_json::{json, Value as Json};
use thiserror::Error;

/// Number of positions `show` prints when no count is given.
pub const DEFAULT_SHOW_COUNT: u64 = 10;

/// `load` may nest this many files deep.
pub const MAX_LOAD_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Expr(ExprError),
    #[error("{0}")]
    Calc(#[from] ctxcalc::Error),
    #[error("{0}")]
    Stream(StreamError),
    #[error("column {pos}: {msg}")]
    Command { pos: usize, msg: String },
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("`load` nested deeper than {0} files")]
    LoadDepth(usize),
    #[error("{path}, line {line}: {source}")]
    Script {
        path: String,
        line: usize,
        source: Box<CliError>,
    },
}

impl CliError {
    /// 2 for unreadable files, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => 2,
            CliError::Script { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    /// Line of the innermost script the error comes from.
    pub fn line(&self) -> Option<usize> {
        match self {
            CliError::Script { line, source, .. } => source.line().or(Some(*line)),
            _ => None,
        }
    }

    fn command(pos: usize, msg: impl Into<String>) -> Self {
        CliError::Command { pos, msg: msg.into() }
    }
}

/// Shifts expression-relative columns so they count from the start of the
/// command line.
fn shift_expr(e: ExprError, offset: usize) -> CliError {
    CliError::Expr(match e {
        ExprError::UnknownToken { pos, found } => ExprError::UnknownToken {
            pos: pos + offset,
            found,
        },
        ExprError::Syntax { pos, msg } => ExprError::Syntax { pos: pos + offset, msg },
        ExprError::UnbalancedParens { pos } => ExprError::UnbalancedParens { pos: pos + offset },
        other => other,
    })
}

fn shift_stream(e: StreamError, offset: usize) -> CliError {
    CliError::Stream(match e {
        StreamError::Syntax { pos, msg } => StreamError::Syntax { pos: pos + offset, msg },
        other => other,
    })
}

/// Output of one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reply {
    pub lines: Vec<String>,
    pub quit: bool,
}

impl Reply {
    fn silent() -> Self {
        Reply::default()
    }

    fn line(text: String) -> Self {
        Reply {
            lines: vec![text],
            quit: false,
        }
    }
}

pub struct Session {
    env: Environment,
    eqs: EquationSet,
    warehouse: Warehouse,
    budget: u64,
    mode: Mode,
    dirs: Vec<PathBuf>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(0)
    }
}

impl Session {
    pub fn new(seed: u64) -> Self {
        Session {
            env: Environment::new(DimensionRegistry::new()).with_seed(seed),
            eqs: EquationSet::new(),
            warehouse: Warehouse::new(),
            budget: DEFAULT_BUDGET,
            mode: Mode::Plain,
            dirs: Vec::new(),
        }
    }

    /// Demand budget of each stream query.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn equations(&self) -> &EquationSet {
        &self.eqs
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.env.seed
    }

    /// Runs one command line. Blank lines and lines starting with `#` do
    /// nothing.
    pub fn run_command(&mut self, line: &str) -> Result<Reply, CliError> {
        let body = line.trim_start();
        if body.is_empty() || body.starts_with('#') {
            return Ok(Reply::silent());
        }
        let indent = line.chars().count() - body.chars().count();
        let (word, rest) = match body.find(char::is_whitespace) {
            Some(i) => (&body[..i], &body[i..]),
            None => (body, ""),
        };
        // 1-based column of the first character of `rest` after trimming.
        let arg_col = indent + word.chars().count() + (rest.chars().count() - rest.trim_start().chars().count()) + 1;
        let arg = rest.trim();
        match word {
            "dim" => self.dim(arg, arg_col),
            "let" => self.let_(arg, arg_col),
            "stream" => self.stream(arg, arg_col),
            "show" => self.show(arg, arg_col),
            "eval" => self.eval(arg, arg_col),
            "seed" => self.set_seed(arg, arg_col),
            "mode" => self.set_mode(arg, arg_col),
            "load" => self.load(arg, arg_col),
            "quit" | "exit" if arg.is_empty() => Ok(Reply {
                lines: Vec::new(),
                quit: true,
            }),
            _ => Err(CliError::command(indent + 1, format!("unknown command `{word}`"))),
        }
    }

    /// Runs every line of `text`, handing each output line to `out`. Stops
    /// at `quit` or at the first error, which names `origin` and the line.
    pub fn run_source(
        &mut self,
        text: &str,
        origin: &str,
        out: &mut dyn FnMut(&str) -> io::Result<()>,
    ) -> Result<bool, CliError> {
        for (i, line) in text.lines().enumerate() {
            let wrap = |source: CliError| CliError::Script {
                path: origin.to_string(),
                line: i + 1,
                source: Box::new(source),
            };
            let reply = self.run_command(line).map_err(wrap)?;
            for l in &reply.lines {
                out(l).map_err(|e| CliError::Output(e.to_string()))?;
            }
            if reply.quit {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Runs a script file, writing its transcript to `out`.
    pub fn run_script(&mut self, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
        let text = read(path)?;
        self.dirs.push(path.parent().map(Path::to_path_buf).unwrap_or_default());
        let result = self.run_source(&text, &path.display().to_string(), &mut |l| writeln!(out, "{l}"));
        self.dirs.pop();
        result.map(|_| ())
    }

    fn dim(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        let (name, spec) = arg
            .split_once(':')
            .ok_or_else(|| CliError::command(col, "expected `dim <name> : <type>`"))?;
        let name = name.trim();
        let spec = spec.trim();
        let spec_col = col + arg.find(':').map_or(0, |i| arg[..=i].chars().count()) + 1;
        let (kind, domain_text) = parse_kind(name, spec, spec_col)?;
        let domain = parse_domain(&kind, domain_text, spec_col)?;
        self.env.registry.register(name, kind, domain)?;
        Ok(Reply::silent())
    }

    fn let_(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        let (name, text) = arg
            .split_once('=')
            .ok_or_else(|| CliError::command(col, "expected `let <name> = <expression>`"))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(CliError::command(col, format!("`{name}` is not a valid name")));
        }
        let offset = col + text_offset(arg, text);
        let value = self.value_of(text.trim(), offset - 1)?;
        let reply = match self.mode {
            Mode::Plain => Reply::line(format!("{name} = {value}")),
            Mode::Json => {
                let mut record = record(&value);
                record["name"] = json!(name);
                Reply::line(record.to_string())
            }
        };
        self.env.bind(name, value);
        Ok(reply)
    }

    fn eval(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        if arg.is_empty() {
            return Err(CliError::command(col, "expected an expression"));
        }
        let value = self.value_of(arg, col - 1)?;
        Ok(Reply::line(match self.mode {
            Mode::Plain => value.to_string(),
            Mode::Json => record(&value).to_string(),
        }))
    }

    /// A dimension-set literal, or the value of a context or context-set
    /// expression. `offset` is the column before `text` starts.
    fn value_of(&self, text: &str, offset: usize) -> Result<Value, CliError> {
        if let Some(names) = parse_dimset_literal(text) {
            let dims = self.env.registry.make_dimset(names.iter().map(String::as_str))?;
            return Ok(Value::DimSet(dims));
        }
        let expr = parse_expression(text, &self.env).map_err(|e| shift_expr(e, offset))?;
        evaluate(&expr, &self.env).map_err(|e| shift_expr(e, offset))
    }

    fn stream(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        let equations = parse_equations(arg).map_err(|e| shift_stream(e, col - 1))?;
        if equations.is_empty() {
            return Err(CliError::command(col, "expected `stream <name> = <expression>`"));
        }
        self.eqs = self.eqs.extend(equations).map_err(|e| shift_stream(e, col - 1))?;
        Ok(Reply::silent())
    }

    fn show(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        let (expr, dim, count) = parse_stream_prefix(arg).map_err(|e| shift_stream(e, col - 1))?;
        let dim = dim.unwrap_or_else(|| Dim::new(TIME));
        let count = count.unwrap_or(DEFAULT_SHOW_COUNT);
        let values =
            eval_prefix(&expr, &dim, count, &self.eqs, &self.warehouse, self.budget).map_err(CliError::Stream)?;
        Ok(Reply::line(match self.mode {
            Mode::Plain => values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
            Mode::Json => json!({
                "kind": "stream_prefix",
                "stream": expr.to_string(),
                "dim": dim.as_str(),
                "value": values.iter().map(|v| stream_json(*v)).collect::<Vec<_>>(),
            })
            .to_string(),
        }))
    }

    fn set_seed(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        self.env.seed = arg
            .parse()
            .map_err(|_| CliError::command(col, format!("`{arg}` is not a seed")))?;
        Ok(Reply::silent())
    }

    fn set_mode(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        self.mode = match arg {
            "plain" => Mode::Plain,
            "json" => Mode::Json,
            _ => return Err(CliError::command(col, "expected `mode plain` or `mode json`")),
        };
        Ok(Reply::silent())
    }

    /// Runs a file as a single command: on failure every binding,
    /// dimension, equation and mode change it made is undone.
    fn load(&mut self, arg: &str, col: usize) -> Result<Reply, CliError> {
        if arg.is_empty() {
            return Err(CliError::command(col, "expected `load <file>`"));
        }
        if self.dirs.len() >= MAX_LOAD_DEPTH {
            return Err(CliError::LoadDepth(MAX_LOAD_DEPTH));
        }
        let path = match self.dirs.last() {
            Some(dir) if Path::new(arg).is_relative() => dir.join(arg),
            _ => PathBuf::from(arg),
        };
        let text = read(&path)?;
        let saved = (self.env.clone(), self.eqs.clone(), self.mode);
        self.dirs.push(path.parent().map(Path::to_path_buf).unwrap_or_default());
        let mut lines = Vec::new();
        let result = self.run_source(&text, &path.display().to_string(), &mut |l| {
            lines.push(l.to_string());
            Ok(())
        });
        self.dirs.pop();
        match result {
            Ok(quit) => Ok(Reply { lines, quit }),
            Err(e) => {
                (self.env, self.eqs, self.mode) = saved;
                // Cached values may belong to equations that were rolled back.
                self.warehouse.clear();
                Err(e)
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Character offset of the sub-slice `inner` within `outer`.
fn text_offset(outer: &str, inner: &str) -> usize {
    let start = inner.as_ptr() as usize - outer.as_ptr() as usize;
    let lead = inner.len() - inner.trim_start().len();
    outer[..start + lead].chars().count()
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `int`, `str`, `bool` or `enum{a,b,...}` from the domain text
/// that follows it.
fn parse_kind<'a>(name: &str, spec: &'a str, col: usize) -> Result<(TagKind, &'a str), CliError> {
    if let Some(rest) = spec.strip_prefix("enum") {
        let rest = rest.trim_start();
        let body = rest
            .strip_prefix('{')
            .and_then(|r| r.split_once('}'))
            .ok_or_else(|| CliError::command(col, "expected `enum{label, ...}`"))?;
        let labels: Vec<&str> = body.0.split(',').map(str::trim).collect();
        return Ok((TagKind::Enum(EnumDomain::new(name, &labels)?), body.1.trim()));
    }
    let (word, rest) = spec.split_at(spec.find(char::is_whitespace).unwrap_or(spec.len()));
    let kind = match word {
        "int" => TagKind::Int,
        "str" => TagKind::Str,
        "bool" => TagKind::Bool,
        _ => return Err(CliError::command(col, format!("unknown tag type `{word}`"))),
    };
    Ok((kind, rest.trim()))
}

/// An optional `domain` keyword followed by `[t1, t2, ...]` or, for
/// integers, `lo..hi`.
fn parse_domain(kind: &TagKind, text: &str, col: usize) -> Result<Option<Vec<TagValue>>, CliError> {
    let text = text.strip_prefix("domain").map_or(text, str::trim);
    if text.is_empty() {
        return Ok(None);
    }
    let bad = |msg: String| CliError::command(col, msg);
    if let (TagKind::Int, Some((lo, hi))) = (kind, text.split_once("..")) {
        let bound = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| bad(format!("bad range bound `{}`", s.trim())))
        };
        let (lo, hi) = (bound(lo)?, bound(hi)?);
        return Ok(Some((lo..=hi).map(TagValue::from).collect()));
    }
    if let TagKind::Str = kind {
        let labels: Vec<String> =
            serde_json::from_str(text).map_err(|_| bad(format!("expected a list of strings, got `{text}`")))?;
        return Ok(Some(labels.iter().map(|s| TagValue::str(s)).collect()));
    }
    let items = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| bad(format!("expected `[tag, ...]`, got `{text}`")))?;
    items
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let tag = match kind {
                TagKind::Int => item.parse::<i64>().ok().map(TagValue::from),
                TagKind::Bool => item.parse::<bool>().ok().map(TagValue::Bool),
                TagKind::Enum(domain) => domain.tag(item),
                TagKind::Str => None,
            };
            tag.ok_or_else(|| bad(format!("`{item}` is not a {kind} tag")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Structured form of a value: its kind and its canonical text, which
/// `let` reads back to an equal value.
fn record(value: &Value) -> Json {
    let canonical = match value {
        Value::Bool(b) => json!(b),
        other => json!(other.to_string()),
    };
    json!({ "kind": value.kind(), "value": canonical })
}

fn stream_json(v: StreamValue) -> Json {
    match v {
        StreamValue::Int(n) => json!(n),
        StreamValue::Bool(b) => json!(b),
        StreamValue::Nil => Json::Null,
    }
}
