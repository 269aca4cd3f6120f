//! Command-line front end. Every subcommand prints a JSON envelope
//! `{"command", "config", "result"}` (or CSV / plain text with `--format`).

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::contextuality::{
    closed_form_theta, is_qcg, strength, table2, theta_cycle, theta_cycle_complement, theta_paley, ThetaValue,
};
use crate::entanglement::{lee_upper_bound, table1, LeeOptions, DEFAULT_SEED};
use crate::error::Error;
use crate::families::{orthogonality_graph, FamilySpec, VectorFamily, TILES_THETA};
use crate::graphs::{complement, complete, cycle, maximum_independent_set, paley, Graph};
use crate::io::{fmt_float, pairs_to_vector, to_canonical_json, vectors_to_csv};
use crate::linalg::{ComplexVector, Tolerances};
use crate::upb::{
    bound_entangled_state, gencontextual_upb, genpyramid_upb, is_minimal, min_pt_eigenvalue, one_param_upb,
    pyramid_upb, quadres_upb, upb_graph_equivalent, verify_upb, DensityMatrix, ProductSet, VerifyMethod,
};

#[derive(Debug, Parser)]
#[command(name = "ctxupb", version, about = "Contextuality, orthogonality graphs and unextendible product bases")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Bound,
    Auto,
}

impl From<Method> for VerifyMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Exact => VerifyMethod::Exact,
            Method::Bound => VerifyMethod::Bound,
            Method::Auto => VerifyMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Orthogonality, rank and PSD tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Master seed for the LEE restarts.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,
    /// Decomposition size for `lee` (default: rank squared).
    #[arg(long = "L", global = true)]
    #[serde(rename = "L")]
    pub size: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
}

/// Construction parameters shared by the family and UPB builders.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Params {
    /// Angle expression, e.g. `3pi/4` or `(pi - 1)/2`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[arg(long, visible_alias = "q")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    OneParam,
    Pyramid,
    Kcbs,
    TilesRep,
    Genpyramid,
    Genkcbs,
    LoorComplement,
    Quadres,
    Gencontextual,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Emit a built-in vector family.
    Family {
        #[arg(value_enum)]
        family: FamilyName,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Orthogonality graph of a family (name, JSON file, or stdin).
    Graph {
        source: Option<String>,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Verify unextendibility of a built-in set or a ProductSet file.
    VerifyUpb {
        source: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Contextual strength of a family.
    Strength {
        source: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Closed-form Lovász number: cycle, cycle-complement, paley, or a graph file.
    Theta {
        kind: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Independence number: cycle, cycle-complement, paley, complete, or a graph file.
    Alpha {
        kind: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Bound entangled state of a UPB with its PPT report.
    Bes {
        source: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Upper bound on the linear entropy of entanglement.
    Lee {
        source: String,
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
    },
    /// Graph equivalence of two UPBs, each `name[:args]` or a file.
    Equiv { a: String, b: String },
    /// Strength and LEE for the five one-parameter representatives.
    Table1,
    /// Lovász and independence numbers of Paley graphs.
    Table2,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Family { .. } => "family",
            Command::Graph { .. } => "graph",
            Command::VerifyUpb { .. } => "verify-upb",
            Command::Strength { .. } => "strength",
            Command::Theta { .. } => "theta",
            Command::Alpha { .. } => "alpha",
            Command::Bes { .. } => "bes",
            Command::Lee { .. } => "lee",
            Command::Equiv { .. } => "equiv",
            Command::Table1 => "table1",
            Command::Table2 => "table2",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Domain(e) => e.name(),
            CliError::Io(_) => "Io",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string()}})
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------- angles

/// Evaluates an angle expression over `pi`: numbers, `pi`, `+ - * /`,
/// parentheses, and juxtaposition as multiplication (`3pi/4`).
pub fn parse_angle(expr: &str) -> std::result::Result<f64, String> {
    let tokens = tokenize(expr)?;
    let mut parser = AngleParser { tokens, pos: 0 };
    let v = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(format!("unexpected trailing input in angle `{expr}`"));
    }
    if !v.is_finite() {
        return Err(format!("angle `{expr}` is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Op(char),
    Open,
    Close,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            ' ' | '\t' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Tok::Num(text.parse().map_err(|_| format!("bad number `{text}`"))?));
            }
            'p' | 'P' if chars.get(i + 1).is_some_and(|c| *c == 'i' || *c == 'I') => {
                out.push(Tok::Pi);
                i += 2;
            }
            'π' => {
                out.push(Tok::Pi);
                i += 1;
            }
            '+' | '-' | '*' | '/' => {
                out.push(Tok::Op(ch));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            _ => return Err(format!("unexpected character `{ch}` in angle `{s}`")),
        }
    }
    Ok(out)
}

struct AngleParser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl AngleParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op(op @ ('*' | '/'))) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if op == '/' && rhs == 0.0 {
                        return Err("division by zero in angle".into());
                    }
                    v = if op == '*' { v * rhs } else { v / rhs };
                }
                Some(Tok::Pi | Tok::Open | Tok::Num(_)) => v *= self.unary()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        let tok = self.peek().cloned().ok_or("angle expression ended early")?;
        self.pos += 1;
        match tok {
            Tok::Num(x) => Ok(x),
            Tok::Pi => Ok(std::f64::consts::PI),
            Tok::Open => {
                let v = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err("missing `)` in angle".into());
                }
                self.pos += 1;
                Ok(v)
            }
            other => Err(format!("unexpected token {other:?} in angle")),
        }
    }
}

// --------------------------------------------------------------- sources

const FAMILY_NAMES: &str = "one-param, pyramid, kcbs, tiles-rep, genpyramid, genkcbs, loor-complement, quadres";
const UPB_NAMES: &str = "pyramid, tiles-rep, one-param, genpyramid, gencontextual, quadres";

fn need<T: Copy>(value: Option<T>, flag: &str, what: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("{what} needs --{flag}")))
}

fn theta_param(params: &Params, what: &str) -> CliResult<f64> {
    let text = params
        .theta
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("{what} needs --theta")))?;
    parse_angle(text).map_err(CliError::Usage)
}

/// Splits `name:a,b` into the name and positional parameters merged over
/// `params`.
fn split_source(source: &str, params: &Params) -> CliResult<(String, Params)> {
    let Some((name, args)) = source.split_once(':') else {
        return Ok((source.to_string(), params.clone()));
    };
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let int = |s: &str| -> CliResult<u64> { s.parse().map_err(|_| CliError::Usage(format!("bad integer `{s}`"))) };
    let mut p = params.clone();
    match (name, args.as_slice()) {
        ("one-param", [theta]) => p.theta = Some(theta.to_string()),
        ("genpyramid", [m, t]) => {
            p.m = Some(int(m)?);
            p.t = Some(t.parse().map_err(|_| CliError::Usage(format!("bad integer `{t}`")))?);
        }
        ("gencontextual" | "genkcbs" | "loor-complement" | "cycle" | "cycle-complement" | "complete", [n]) => {
            p.n = Some(int(n)?)
        }
        ("quadres" | "paley", [q]) => p.p = Some(int(q)?),
        _ => return Err(CliError::Usage(format!("cannot read parameters of `{source}`"))),
    }
    Ok((name.to_string(), p))
}

fn family_spec(name: &str, params: &Params) -> CliResult<Option<FamilySpec>> {
    Ok(Some(match name {
        "one-param" => FamilySpec::OneParam {
            theta: theta_param(params, "one-param")?,
        },
        "pyramid" => FamilySpec::Pyramid,
        "kcbs" => FamilySpec::Kcbs,
        "tiles-rep" => FamilySpec::TilesRep,
        "genpyramid" => FamilySpec::GenPyramid {
            m: need(params.m, "m", "genpyramid")?,
            t: need(params.t, "t", "genpyramid")?,
        },
        "genkcbs" => FamilySpec::GenKcbs {
            n: need(params.n, "n", "genkcbs")?,
        },
        "loor-complement" => FamilySpec::LoorComplement {
            n: need(params.n, "n", "loor-complement")?,
        },
        "quadres" => FamilySpec::QuadRes {
            p: need(params.p, "p", "quadres")?,
        },
        _ => return Ok(None),
    }))
}

fn read_json(source: &str, stdin: &mut dyn Read) -> CliResult<Value> {
    let text = if source == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(source).map_err(|e| CliError::Io(format!("{source}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{source}: {e}")))?;
    // accept the output envelope of another invocation
    Ok(match v {
        Value::Object(mut map) if map.contains_key("result") && map.contains_key("command") => {
            map.remove("result").unwrap_or(Value::Null)
        }
        other => other,
    })
}

fn is_file_like(source: &str) -> bool {
    source == "-" || Path::new(source).exists()
}

fn parse_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Domain(Error::Invalid(format!("not a {what}: {e}"))))
}

fn load_vectors(source: &str, params: &Params, stdin: &mut dyn Read) -> CliResult<(Option<String>, Vec<ComplexVector>)> {
    let (name, p) = split_source(source, params)?;
    if let Some(spec) = family_spec(&name, &p)? {
        let fam = spec.build()?;
        return Ok((Some(fam.label), fam.vectors));
    }
    if !is_file_like(source) {
        return Err(CliError::Usage(format!(
            "unknown family `{source}`; expected one of {FAMILY_NAMES} or a JSON file"
        )));
    }
    let v = read_json(source, stdin)?;
    if v.is_array() {
        let pairs: Vec<Vec<[f64; 2]>> = parse_value(v, "vector list")?;
        return Ok((None, pairs.iter().map(|p| pairs_to_vector(p)).collect()));
    }
    let fam: VectorFamily = parse_value(v, "VectorFamily")?;
    fam.validate()?;
    Ok((Some(fam.label), fam.vectors))
}

fn load_upb(source: &str, params: &Params, stdin: &mut dyn Read) -> CliResult<(String, ProductSet)> {
    let (name, p) = split_source(source, params)?;
    let ps = match name.as_str() {
        "pyramid" => pyramid_upb()?,
        "tiles-rep" => one_param_upb(TILES_THETA)?,
        "one-param" => one_param_upb(theta_param(&p, "one-param")?)?,
        "genpyramid" => genpyramid_upb(need(p.m, "m", "genpyramid")?, need(p.t, "t", "genpyramid")?)?,
        "gencontextual" => gencontextual_upb(need(p.n, "n", "gencontextual")?)?,
        "quadres" => quadres_upb(need(p.p, "p", "quadres")?)?,
        _ if is_file_like(source) => {
            let ps: ProductSet = parse_value(read_json(source, stdin)?, "ProductSet")?;
            return Ok((source.to_string(), ps));
        }
        _ => {
            return Err(CliError::Usage(format!(
                "unknown product set `{source}`; expected one of {UPB_NAMES} or a JSON file"
            )))
        }
    };
    Ok((name, ps))
}

fn load_graph(kind: &str, params: &Params, stdin: &mut dyn Read) -> CliResult<Graph> {
    let (name, p) = split_source(kind, params)?;
    Ok(match name.as_str() {
        "cycle" => cycle(need(p.n, "n", "cycle")? as usize)?,
        "cycle-complement" => complement(&cycle(need(p.n, "n", "cycle-complement")? as usize)?),
        "complete" => complete(need(p.n, "n", "complete")? as usize),
        "paley" => paley(need(p.p, "p", "paley")?)?,
        _ if is_file_like(kind) => {
            let v = read_json(kind, stdin)?;
            let v = match v {
                Value::Object(mut map) if map.contains_key("graph") => map.remove("graph").unwrap_or(Value::Null),
                other => other,
            };
            parse_value(v, "graph")?
        }
        _ => {
            return Err(CliError::Usage(format!(
                "unknown graph `{kind}`; expected cycle, cycle-complement, paley, complete or a JSON file"
            )))
        }
    })
}

// --------------------------------------------------------------- running

struct Output {
    result: Value,
    csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

fn kv_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

fn graph_csv(g: &Graph) -> String {
    let mut s = String::from("i,j\n");
    for (i, j) in g.edges() {
        s.push_str(&format!("{i},{j}\n"));
    }
    s
}

fn theta_for(kind: &str, params: &Params, stdin: &mut dyn Read) -> CliResult<ThetaValue> {
    let (name, p) = split_source(kind, params)?;
    Ok(match name.as_str() {
        "cycle" => theta_cycle(need(p.n, "n", "cycle")?)?,
        "cycle-complement" => theta_cycle_complement(need(p.n, "n", "cycle-complement")?)?,
        "paley" => theta_paley(need(p.p, "p", "paley")?)?,
        _ => {
            let g = load_graph(kind, params, stdin)?;
            closed_form_theta(&g)?
                .ok_or_else(|| Error::Invalid("no closed form for this graph".into()))?
        }
    })
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> CliResult<Output> {
    let tol = Tolerances::uniform(cli.global.tol)?;
    let method: VerifyMethod = cli.global.method.into();
    match &cli.command {
        Command::Family { family, params } => {
            if *family == FamilyName::Gencontextual {
                let ps = gencontextual_upb(need(params.n, "n", "gencontextual")?)?;
                return Ok(Output {
                    result: to_value(&ps)?,
                    csv: None,
                });
            }
            let name = to_value(family)?.as_str().unwrap_or_default().to_string();
            let fam = family_spec(&name, params)?
                .ok_or_else(|| CliError::Usage(format!("unknown family {name}")))?
                .build()?;
            Ok(Output {
                csv: Some(vectors_to_csv(&fam.vectors)),
                result: to_value(&fam)?,
            })
        }
        Command::Graph { source, params } => {
            let source = source.as_deref().unwrap_or("-");
            let (label, vectors) = load_vectors(source, params, stdin)?;
            let g = orthogonality_graph(&vectors, &tol)?;
            Ok(Output {
                csv: Some(graph_csv(&g)),
                result: json!({"label": label, "graph": to_value(&g)?}),
            })
        }
        Command::VerifyUpb { source, params } => {
            let (label, ps) = load_upb(source, params, stdin)?;
            let verdict = verify_upb(&ps, &tol, method)?;
            let mut result = to_value(&verdict)?;
            if let Value::Object(map) = &mut result {
                map.insert("label".into(), json!(label));
                map.insert("minimal".into(), json!(is_minimal(&ps)));
            }
            let mut rows = vec![
                ("status", to_value(&verdict.status)?.as_str().unwrap_or_default().to_string()),
                ("k", verdict.k.to_string()),
                ("condition1", verdict.condition1.to_string()),
                ("minimal", is_minimal(&ps).to_string()),
            ];
            if let Some(c) = &verdict.certificate {
                rows.push(("certificate", c.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")));
            }
            Ok(Output {
                result,
                csv: Some(kv_csv(&rows)),
            })
        }
        Command::Strength { source, params } => {
            let (label, vectors) = load_vectors(source, params, stdin)?;
            let mut report = strength(&vectors)?;
            report.label = label;
            Ok(Output {
                csv: Some(kv_csv(&[("strength", fmt_float(report.value))])),
                result: to_value(&report)?,
            })
        }
        Command::Theta { kind, params } => {
            let t = theta_for(kind, params, stdin)?;
            Ok(Output {
                csv: Some(kv_csv(&[("theta", fmt_float(t.value))])),
                result: to_value(&t)?,
            })
        }
        Command::Alpha { kind, params } => {
            let g = load_graph(kind, params, stdin)?;
            let set = maximum_independent_set(&g)?;
            let qcg = is_qcg(&g, None)?;
            Ok(Output {
                csv: Some(kv_csv(&[("alpha", set.len().to_string())])),
                result: json!({"n": g.n(), "alpha": set.len(), "set": set, "qcg": to_value(&qcg)?}),
            })
        }
        Command::Bes { source, params } => {
            let (label, ps) = load_upb(source, params, stdin)?;
            let verdict = verify_upb(&ps, &tol, method)?;
            let rho = bound_entangled_state(&ps, &verdict)?;
            let eig = rho.eigenvalues()?;
            let ppt: Vec<Value> = (0..ps.parties())
                .map(|party| {
                    let min = min_pt_eigenvalue(&rho, party)?;
                    Ok(json!({"party": party, "min_pt_eigenvalue": min, "ppt": min >= -tol.psd_tol}))
                })
                .collect::<CliResult<_>>()?;
            let max_member: f64 = (0..ps.k())
                .map(|j| rho.expectation(&ps.state_vector(j)).abs())
                .fold(0.0, f64::max);
            let rank = eig.iter().filter(|&&e| e > tol.psd_tol).count();
            let mut csv = String::from("party,min_pt_eigenvalue,ppt\n");
            for p in &ppt {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    p["party"],
                    fmt_float(p["min_pt_eigenvalue"].as_f64().unwrap_or(f64::NAN)),
                    p["ppt"]
                ));
            }
            Ok(Output {
                result: json!({
                    "label": label,
                    "status": to_value(&verdict.status)?,
                    "state": to_value(&rho)?,
                    "trace": rho.trace().re,
                    "rank": rank,
                    "expected_rank": ps.total_dim() - ps.k(),
                    "min_eigenvalue": eig.first().copied().unwrap_or(0.0),
                    "max_member_overlap": max_member,
                    "ppt": ppt,
                }),
                csv: Some(csv),
            })
        }
        Command::Lee { source, params } => {
            let (label, rho) = if is_file_like(source) && family_spec(source, params)?.is_none() {
                let v = read_json(source, stdin)?;
                if v.get("matrix").is_some() {
                    (source.clone(), parse_value::<DensityMatrix>(v, "DensityMatrix")?)
                } else {
                    let ps: ProductSet = parse_value(v, "ProductSet")?;
                    let verdict = verify_upb(&ps, &tol, method)?;
                    (source.clone(), bound_entangled_state(&ps, &verdict)?)
                }
            } else {
                let (label, ps) = load_upb(source, params, stdin)?;
                let verdict = verify_upb(&ps, &tol, method)?;
                (label, bound_entangled_state(&ps, &verdict)?)
            };
            let opts = LeeOptions {
                size: cli.global.size,
                restarts: cli.global.restarts,
                seed: cli.global.seed,
                ..LeeOptions::default()
            };
            let r = lee_upper_bound(&rho, &opts)?;
            let mut result = to_value(&r)?;
            if let Value::Object(map) = &mut result {
                map.insert("label".into(), json!(label));
                map.insert("kind".into(), json!("upper-bound"));
            }
            Ok(Output {
                csv: Some(kv_csv(&[
                    ("lee_upper_bound", fmt_float(r.value)),
                    ("converged", r.converged.to_string()),
                ])),
                result,
            })
        }
        Command::Equiv { a, b } => {
            let empty = Params::default();
            let (la, pa) = load_upb(a, &empty, stdin)?;
            let (lb, pb) = load_upb(b, &empty, stdin)?;
            let perm = upb_graph_equivalent(&pa, &pb, &tol)?;
            Ok(Output {
                csv: Some(kv_csv(&[
                    ("equivalent", perm.is_some().to_string()),
                    (
                        "permutation",
                        perm.as_ref()
                            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                            .unwrap_or_default(),
                    ),
                ])),
                result: json!({"a": la, "b": lb, "equivalent": perm.is_some(), "permutation": perm}),
            })
        }
        Command::Table1 => {
            let opts = LeeOptions {
                size: cli.global.size,
                restarts: cli.global.restarts,
                seed: cli.global.seed,
                ..LeeOptions::default()
            };
            let rows = table1(&opts)?;
            let mut csv = String::from("theta_label,strength,strength_ref,lee,lee_ref,abs_delta\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.label,
                    fmt_float(r.strength),
                    fmt_float(r.strength_ref),
                    fmt_float(r.lee),
                    fmt_float(r.lee_ref),
                    fmt_float(r.lee_delta)
                ));
            }
            Ok(Output {
                result: json!({"rows": to_value(&rows)?, "lee_kind": "upper-bound"}),
                csv: Some(csv),
            })
        }
        Command::Table2 => {
            let rows = table2()?;
            let mut csv = String::from("q,theta,theta_exact,alpha,ratio\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.q,
                    fmt_float(r.theta),
                    r.theta_exact,
                    r.alpha,
                    fmt_float(r.ratio)
                ));
            }
            Ok(Output {
                result: json!({"rows": to_value(&rows)?}),
                csv: Some(csv),
            })
        }
    }
}

fn envelope(cli: &Cli, result: Value) -> CliResult<Value> {
    let mut config = Map::new();
    config.insert("global".into(), to_value(&cli.global)?);
    config.insert("command".into(), to_value(&cli.command)?);
    Ok(json!({"command": cli.command.name(), "config": config, "result": result}))
}

fn pretty(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if v.is_object() || (v.is_array() && v.as_array().is_some_and(|a| a.iter().any(|x| x.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    pretty(v, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", compact(v)));
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                pretty(v, indent + 2, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", compact(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_float).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(cli: &Cli, out: Output) -> CliResult<String> {
    match cli.global.format {
        Format::Json => Ok(to_canonical_json(&envelope(cli, out.result)?)?),
        Format::Csv => out
            .csv
            .ok_or_else(|| CliError::Usage(format!("`{}` has no CSV form; use --format json", cli.command.name()))),
        Format::Pretty => {
            let mut s = format!("{}\n", cli.command.name());
            pretty(&out.result, 2, &mut s);
            Ok(s)
        }
    }
}

/// Runs one invocation; returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = execute(&cli, stdin).and_then(|out| render(&cli, out));
    match outcome {
        Ok(text) => {
            if let Some(path) = &cli.global.out {
                if let Err(e) = std::fs::write(path, &text) {
                    let err = CliError::Io(format!("{}: {e}", path.display()));
                    let _ = writeln!(stderr, "{err}");
                    return err.exit_code();
                }
                0
            } else {
                match stdout.write_all(text.as_bytes()) {
                    Ok(()) => 0,
                    Err(_) => 1,
                }
            }
        }
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            if err.exit_code() == 1 {
                let body = to_canonical_json(&err.to_json()).unwrap_or_default();
                let _ = stdout.write_all(body.as_bytes());
            }
            err.exit_code()
        }
    }
}
