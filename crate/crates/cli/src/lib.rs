//! Command-line front end for `abcalc-core`.

pub mod parse;
pub mod schema;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use abcalc_core::abalg::{
    divide_factored, divide_linear, invert_graded, AbOperator, GradedOperator,
};
use abcalc_core::abmod::{
    apply_op, bernstein_min, decompose_primitive, embed_in_xi, saturate, solve_shifted, tensor,
    BernsteinPolynomial, ModulePresentation, ModuleVector,
};
use abcalc_core::fresco::{
    annihilator_of, bernstein_fresco, higher_bernstein, is_semisimple_fresco, pole_report,
    principal_jh, FactoredFresco,
};
use abcalc_core::monodromy::semisimple_filtration;
use abcalc_core::series::DEFAULT_ORDER;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use parse::parse_element;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed input: {0}")]
    Schema(String),
    #[error(transparent)]
    Domain(#[from] abcalc_core::Error),
}

impl CliError {
    /// 1 for failures of the mathematics, 2 for bad invocations or inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "SyntaxError",
            CliError::Usage(_) => "UsageError",
            CliError::Io { .. } => "IoError",
            CliError::Schema(_) => "SchemaError",
            CliError::Domain(e) => e.kind(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("error".into(), json!(self.kind()));
        m.insert("message".into(), json!(self.to_string()));
        if let CliError::Syntax { offset, .. } = self {
            m.insert("offset".into(), json!(offset));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, ValueEnum)]
pub enum Verb {
    /// Print an expression in left normal form.
    Eval,
    /// Multiply two expressions.
    Mul,
    /// Divide by `a − λb` or by a fresco operator.
    Divide,
    /// Invert a unit modulo a total degree.
    Invert,
    /// Apply an expression to a vector of a module.
    ModuleApply,
    Saturate,
    Bernstein,
    /// Split a simple-pole module by classes modulo the integers.
    Decompose,
    /// Semi-simple filtration and nilpotent order.
    Filtration,
    /// Characteristic sequence of a fresco, or the fresco generated by a vector.
    Jh,
    HigherBernstein,
    Semisimple,
    /// Embed a simple-pole module into copies of Ξ.
    Embed,
    PoleReport,
    Tensor,
    /// Solve `(a − λb)x = by`.
    Solve,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "abcalc", version, about = "Exact calculus of (a,b)-modules")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Truncation order in `b` (total degree for `invert`).
    #[arg(long, global = true, env = "ABCALC_ORDER", value_parser = clap::value_parser!(u64).range(2..))]
    pub order: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub expr: Vec<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true)]
    pub module: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub fresco: Option<PathBuf>,
    /// Vector as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub vector: Option<String>,
    /// Full JSON document, including the order used.
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Plain text.
    #[arg(long, global = true)]
    pub text: bool,
}

/// Result of a command: a compact document and fields added in full mode.
struct Output {
    compact: Map<String, Value>,
    extra: Map<String, Value>,
}

impl Output {
    fn new() -> Self {
        Output {
            compact: Map::new(),
            extra: Map::new(),
        }
    }

    fn put(mut self, key: &str, v: Value) -> Self {
        self.compact.insert(key.into(), v);
        self
    }

    fn more(mut self, key: &str, v: Value) -> Self {
        self.extra.insert(key.into(), v);
        self
    }
}

impl Cli {
    fn order(&self) -> usize {
        self.order.map_or(DEFAULT_ORDER, |n| n as usize)
    }

    fn file_order(&self) -> Option<usize> {
        self.order.map(|n| n as usize)
    }

    fn one_expr(&self) -> Result<AbOperator, CliError> {
        match self.expr.as_slice() {
            [x] => parse_element(x, self.order()),
            _ => Err(CliError::Usage("exactly one --expr is required".into())),
        }
    }

    fn lambda(&self) -> Result<abcalc_core::Rational, CliError> {
        let text = self
            .lambda
            .as_deref()
            .ok_or_else(|| CliError::Usage("--lambda is required".into()))?;
        schema::rational(text)
            .map_err(|_| CliError::Usage(format!("--lambda: not a rational number: {text}")))
    }

    fn modules(&self) -> Result<Vec<ModulePresentation>, CliError> {
        self.module
            .iter()
            .map(|p| {
                let m: schema::ModuleJson = read_json(p)?;
                schema::module_from_json(&m, self.file_order())
            })
            .collect()
    }

    fn one_module(&self) -> Result<ModulePresentation, CliError> {
        let mut ms = self.modules()?;
        if ms.len() != 1 {
            return Err(CliError::Usage("exactly one --module is required".into()));
        }
        Ok(ms.remove(0))
    }

    fn fresco(&self) -> Result<Option<FactoredFresco>, CliError> {
        self.fresco
            .as_ref()
            .map(|p| {
                let f: schema::FrescoJson = read_json(p)?;
                schema::fresco_from_json(&f, self.file_order())
            })
            .transpose()
    }

    fn vector(&self, e: &ModulePresentation) -> Result<ModuleVector, CliError> {
        let text = self
            .vector
            .as_deref()
            .ok_or_else(|| CliError::Usage("--vector is required".into()))?;
        let value: Value = if text.trim_start().starts_with('[') {
            serde_json::from_str(text).map_err(|err| CliError::Schema(format!("vector: {err}")))?
        } else {
            read_json(Path::new(text))?
        };
        schema::vector_from_json(&value, e.rank(), e.b_order())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let data = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&data).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn roots_json(b: &BernsteinPolynomial) -> Value {
    json!(b
        .roots()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>())
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    json!(xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn execute(cli: &Cli) -> Result<(Output, usize), CliError> {
    let n = cli.order();
    Ok(match cli.verb {
        Verb::Eval => {
            let x = cli.one_expr()?;
            (
                Output::new()
                    .put("result", json!(x.to_string()))
                    .more("right", json!(abcalc_core::abalg::to_right(&x).to_string())),
                n,
            )
        }
        Verb::Mul => {
            let [x, y] = cli.expr.as_slice() else {
                return Err(CliError::Usage("mul needs two --expr".into()));
            };
            let p = &parse_element(x, n)? * &parse_element(y, n)?;
            (Output::new().put("result", json!(p.to_string())), n)
        }
        Verb::Divide => {
            if let Some(f) = cli.fresco()? {
                let m = f.b_order();
                let [x] = cli.expr.as_slice() else {
                    return Err(CliError::Usage("exactly one --expr is required".into()));
                };
                let (q, r) = divide_factored(&parse_element(x, m)?, f.factors())?;
                (
                    Output::new()
                        .put("Q", json!(q.to_string()))
                        .put("R", json!(r.to_string())),
                    m,
                )
            } else {
                let (q, r) = divide_linear(&cli.one_expr()?, &cli.lambda()?);
                (
                    Output::new()
                        .put("Q", json!(q.to_string()))
                        .put("R", json!(r.to_string())),
                    n,
                )
            }
        }
        Verb::Invert => {
            let x = GradedOperator::from_operator(&cli.one_expr()?, n);
            (
                Output::new().put("result", json!(invert_graded(&x)?.to_string())),
                n,
            )
        }
        Verb::ModuleApply => {
            let e = cli.one_module()?;
            let [x] = cli.expr.as_slice() else {
                return Err(CliError::Usage("exactly one --expr is required".into()));
            };
            let op = parse_element(x, e.b_order())?;
            let v = apply_op(&e, &op, &cli.vector(&e)?);
            (
                Output::new().put("vector", schema::vector_to_json(&v)),
                e.b_order(),
            )
        }
        Verb::Saturate => {
            let e = cli.one_module()?;
            let s = saturate(&e)?;
            let out = Output::new()
                .put("codim", json!(s.codim))
                .put("shift", json!(s.lattice.shift))
                .put("module", json!(schema::module_to_json(&s.module)))
                .more("inclusion", schema::matrix_to_json(&s.inclusion));
            (out, s.module.b_order())
        }
        Verb::Bernstein => {
            if let Some(f) = cli.fresco()? {
                let b = bernstein_fresco(&f);
                (
                    Output::new()
                        .put("roots", roots_json(&b))
                        .more("polynomial", json!(b.to_string())),
                    f.b_order(),
                )
            } else {
                let e = cli.one_module()?;
                let b = bernstein_min(&e)?;
                (
                    Output::new()
                        .put("roots", roots_json(&b))
                        .more("polynomial", json!(b.to_string())),
                    e.b_order(),
                )
            }
        }
        Verb::Decompose => {
            let e = cli.one_module()?;
            let parts: Vec<Value> = decompose_primitive(&e)?
                .into_iter()
                .map(|(alpha, p)| {
                    json!({
                        "class": alpha.to_string(),
                        "rank": p.module.rank(),
                        "module": schema::module_to_json(&p.module),
                    })
                })
                .collect();
            (Output::new().put("parts", json!(parts)), e.b_order())
        }
        Verb::Filtration => {
            let e = cli.one_module()?;
            let r = semisimple_filtration(&e)?;
            let out = Output::new()
                .put("ranks", json!(r.quotient_ranks))
                .put("d", json!(r.nilpotent_order))
                .more(
                    "steps",
                    json!(r
                        .steps
                        .iter()
                        .map(schema::lattice_to_json)
                        .collect::<Vec<_>>()),
                );
            (out, e.b_order())
        }
        Verb::Jh => {
            let f = match cli.fresco()? {
                Some(f) => f,
                None => {
                    let e = cli.one_module()?;
                    annihilator_of(&e, &cli.vector(&e)?)?
                }
            };
            let seq = principal_jh(&f);
            let out = Output::new()
                .put("lambdas", strings(f.lambdas()))
                .put("principal", strings(seq.values))
                .more("fresco", json!(schema::fresco_to_json(&f)));
            (out, f.b_order())
        }
        Verb::HigherBernstein => {
            let f = need_fresco(cli)?;
            let hs = higher_bernstein(&f)?;
            let out = Output::new()
                .put(
                    "polynomials",
                    json!(hs.iter().map(roots_json).collect::<Vec<_>>()),
                )
                .more("display", strings(&hs));
            (out, f.b_order())
        }
        Verb::Semisimple => match cli.fresco()? {
            Some(f) => (
                Output::new().put("semisimple", json!(is_semisimple_fresco(&f)?)),
                f.b_order(),
            ),
            None => {
                let e = cli.one_module()?;
                let d = semisimple_filtration(&e)?.nilpotent_order;
                (
                    Output::new()
                        .put("semisimple", json!(d == 1))
                        .more("d", json!(d)),
                    e.b_order(),
                )
            }
        },
        Verb::Embed => {
            let e = cli.one_module()?;
            let emb = embed_in_xi(&e)?;
            let out = Output::new()
                .put("log_depth", json!(emb.log_depth))
                .put("alphas", strings(&emb.alphas))
                .put("valid_order", json!(emb.order()))
                .more("map", schema::matrix_to_json(&emb.map))
                .more("target", json!(schema::module_to_json(&emb.target)));
            (out, e.b_order())
        }
        Verb::PoleReport => {
            let f = need_fresco(cli)?;
            let report = pole_report(&f)?;
            let classes: Vec<Value> = report
                .classes
                .iter()
                .map(|c| {
                    let predicted: Vec<Value> = c
                        .predicted
                        .iter()
                        .enumerate()
                        .map(|(j, pts)| json!({ "order": j + 1, "points": strings(pts) }))
                        .collect();
                    json!({
                        "alpha": c.alpha.to_string(),
                        "d": c.nilpotent_order,
                        "higher": c.higher.iter().map(roots_json).collect::<Vec<_>>(),
                        "top_pole": c.top_pole.to_string(),
                        "first_pole": c.first_pole.to_string(),
                        "predicted": predicted,
                    })
                })
                .collect();
            let out = Output::new()
                .put("label", json!("prediction under hypothesis H(α,1)"))
                .put("classes", json!(classes));
            (out, f.b_order())
        }
        Verb::Tensor => {
            let ms = cli.modules()?;
            let [e, f] = ms.as_slice() else {
                return Err(CliError::Usage("tensor needs two --module".into()));
            };
            let t = tensor(e, f)?;
            (
                Output::new().put("module", json!(schema::module_to_json(&t))),
                t.b_order(),
            )
        }
        Verb::Solve => {
            let e = cli.one_module()?;
            let x = solve_shifted(&e, &cli.lambda()?, &cli.vector(&e)?)?;
            (
                Output::new().put("vector", schema::vector_to_json(&x)),
                e.b_order(),
            )
        }
    })
}

fn need_fresco(cli: &Cli) -> Result<FactoredFresco, CliError> {
    cli.fresco()?
        .ok_or_else(|| CliError::Usage("--fresco is required".into()))
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!(
            "[{}]",
            xs.iter().map(text_value).collect::<Vec<_>>().join(", ")
        ),
        Value::Object(m) => {
            let parts: Vec<String> = m
                .iter()
                .map(|(k, v)| format!("{k}: {}", text_value(v)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

/// Runs a command and returns the text to print on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let (out, order) = execute(cli)?;
    if cli.text {
        let lines: Vec<String> = out
            .compact
            .iter()
            .map(|(k, v)| format!("{k}: {}", text_value(v)))
            .collect();
        return Ok(lines.join("\n"));
    }
    let doc = if cli.json {
        let mut full = BTreeMap::new();
        full.insert("b_order", json!(order));
        let mut m = Map::new();
        m.insert(
            "verb".into(),
            json!(format!("{:?}", cli.verb).to_lowercase()),
        );
        for (k, v) in full {
            m.insert(k.into(), v);
        }
        m.extend(out.compact);
        m.extend(out.extra);
        Value::Object(m)
    } else {
        Value::Object(out.compact)
    };
    Ok(doc.to_string())
}
