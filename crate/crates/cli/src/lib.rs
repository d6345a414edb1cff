//! File handling, command dispatch and report formatting for `matpoly`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use matpoly_core::factor::{factor_atlas, verify_right_factor, Factorization};
use matpoly_core::io::{
    decode_matrix, encode_matrix, parse_companion, MatrixData, parse_polynomial, CompanionFile,
    PolynomialFile,
};
use matpoly_core::linearize::Pencil;
use matpoly_core::poly::RegularityReport;
use matpoly_core::solvents::{
    bisolvents_limited, cosolvent_residual, cosolvents_limited, reduce_bisolvent,
    solvent_residual, solvents_limited, verify_bisolvent, Bisolvent, EnumerationResult, Solvent,
    SubspaceSelection,
};
use matpoly_core::spectral::{
    maximal_standard_pair, reconstruct_from_pair, spectral_inversion, verify_standard_pair,
    BlockInfo, InversionDirection, StandardPair, WeierstrassData,
};
use matpoly_core::{ComplexMatrix, Error, MatrixPolynomial, Tolerance, C64};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Pair,
    Solvents,
    Cosolvents,
    Bisolvents,
    Factor,
    Verify,
    Reconstruct,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Pair => "pair",
            Command::Solvents => "solvents",
            Command::Cosolvents => "cosolvents",
            Command::Bisolvents => "bisolvents",
            Command::Factor => "factor",
            Command::Verify => "verify",
            Command::Reconstruct => "reconstruct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flags {
    pub tol: Tolerance,
    pub format: Format,
    /// Eigenvalues to move from `T` to `Z` for the `pair` command.
    pub invert: Vec<C64>,
    pub max_enum: usize,
    /// Companion file for `verify`.
    pub companion: Option<String>,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            format: Format::Text,
            invert: Vec::new(),
            max_enum: matpoly_core::solvents::DEFAULT_MAX_SELECTIONS,
            companion: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub tolerance: Tolerance,
    pub regularity: Option<Value>,
    pub payload: Value,
    pub warnings: Vec<String>,
}

/// A report together with the process exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 1 for bad input, 2 for a singular polynomial, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::DimensionMismatch(_)
                | Error::ZeroPolynomialInput
                | Error::NotSquare { .. }
                | Error::PlanInfeasible(_) => 1,
                Error::NotRegular | Error::SingularPencil => 2,
                _ => 3,
            },
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_input(path: &Path) -> Result<MatrixPolynomial, CliError> {
    Ok(parse_polynomial(&read(path)?)?)
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix(m: &ComplexMatrix) -> Value {
    json!(encode_matrix(m))
}

fn blocks(b: &Option<Vec<BlockInfo>>) -> Value {
    match b {
        Some(list) => Value::Array(
            list.iter()
                .map(|b| json!({"eigenvalue": complex(b.eigenvalue), "size": b.size}))
                .collect(),
        ),
        None => Value::Null,
    }
}

fn regularity_json(r: &RegularityReport) -> Value {
    json!({
        "regular": r.regular,
        "det_degree": r.det_degree,
        "infinite_mult_total": r.infinite_mult_total,
        "det_coefficients": r.det_poly.coeffs().iter().map(|&z| complex(z)).collect::<Vec<_>>(),
    })
}

fn weierstrass_json(w: &WeierstrassData) -> Value {
    json!({
        "finite": w.finite.iter().map(|(e, mults)| json!({
            "eigenvalue": complex(*e),
            "partial_multiplicities": mults,
        })).collect::<Vec<_>>(),
        "infinite": w.infinite,
        "finite_total": w.finite_total(),
        "infinite_total": w.infinite_total(),
    })
}

fn pair_json(pair: &StandardPair) -> Value {
    json!({
        "x": matrix(&pair.x),
        "y": matrix(&pair.y),
        "t": matrix(&pair.t),
        "z": matrix(&pair.z),
        "t_blocks": blocks(&pair.t_blocks),
        "z_blocks": blocks(&pair.z_blocks),
    })
}

fn enumeration_json<T>(r: &EnumerationResult<T>, item: impl Fn(&T) -> Value) -> Value {
    json!({
        "count": r.items.len(),
        "items": r.items.iter().map(item).collect::<Vec<_>>(),
        "infinite_family": r.infinite_family,
        "bound": r.bound,
        "truncated": r.truncated,
    })
}

fn selection_json(sel: &SubspaceSelection) -> Value {
    let side = |v: &[(usize, usize)]| {
        v.iter()
            .map(|&(block, length)| json!({"block": block, "length": length}))
            .collect::<Vec<_>>()
    };
    json!({"t_prefixes": side(&sel.t_prefixes), "z_prefixes": side(&sel.z_prefixes)})
}

fn solvent_json(s: &Solvent, cosolvent: bool) -> Value {
    let mut v = json!({
        "matrix": matrix(&s.matrix),
        "residual": s.residual,
        "selection": selection_json(&s.selection),
    });
    if cosolvent {
        v["nilpotent"] = json!(s.nilpotent);
    }
    v
}

fn bisolvent_json(b: &Bisolvent) -> Value {
    json!({
        "s1": matrix(&b.s1),
        "s2": matrix(&b.s2),
        "pi": matrix(&b.pi),
        "alternatives": b.alternatives.iter().map(matrix).collect::<Vec<_>>(),
        "selection": b.selection.as_ref().map_or(Value::Null, selection_json),
    })
}

fn factorization_json(f: &Factorization) -> Value {
    json!({
        "lambda_coeff": matrix(f.factor.lambda_coeff()),
        "constant": matrix(f.factor.constant()),
        "quotient": PolynomialFile::from_polynomial(&f.quotient),
        "max_rel_residual": f.max_rel_residual,
        "source": bisolvent_json(&f.source),
    })
}

fn companion_pair(x: &MatrixData, y: &MatrixData, t: &MatrixData, z: &MatrixData) -> Result<StandardPair, Error> {
    let pair = StandardPair::new(
        decode_matrix(x, "x")?,
        decode_matrix(y, "y")?,
        decode_matrix(t, "t")?,
        decode_matrix(z, "z")?,
    );
    pair.check_dimensions()?;
    Ok(pair)
}

/// Executes one command against the polynomial (or, for `reconstruct`, the
/// pair file) at `path`.
pub fn run(command: Command, path: &Path, flags: &Flags) -> Result<Outcome, CliError> {
    let tol = flags.tol;
    let mut warnings = Vec::new();
    let input = path.display().to_string();
    let finish = |regularity: Option<Value>, payload: Value, warnings: Vec<String>, exit_code| Outcome {
        report: Report {
            schema_version: SCHEMA_VERSION,
            command: command.name(),
            input: input.clone(),
            tolerance: tol,
            regularity,
            payload,
            warnings,
        },
        exit_code,
    };

    if command == Command::Reconstruct {
        let CompanionFile::Pair { x, y, t, z } = parse_companion(&read(path)?)? else {
            return Err(Error::Parse("reconstruct expects a pair file".into()).into());
        };
        let pair = companion_pair(&x, &y, &t, &z)?;
        let m = pair.m();
        let size = pair.p() + pair.q();
        if m == 0 || size % m != 0 {
            return Err(Error::DimensionMismatch(format!(
                "pair size {size} is not a multiple of m = {m}"
            ))
            .into());
        }
        let p = reconstruct_from_pair(&pair, size / m, &tol)?;
        let reg = p.regularity()?;
        let payload = json!({ "polynomial": PolynomialFile::from_polynomial(&p) });
        return Ok(finish(Some(regularity_json(&reg)), payload, warnings, 0));
    }

    let p = parse_input(path)?;
    let reg = if p.is_square() {
        p.regularity()?
    } else {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        }
        .into());
    };
    let regularity = Some(regularity_json(&reg));
    if !reg.regular {
        if command == Command::Analyze {
            return Ok(finish(regularity, Value::Null, warnings, 2));
        }
        return Err(Error::NotRegular.into());
    }

    let payload = match command {
        Command::Analyze => {
            let pair = maximal_standard_pair(&p, &tol)?;
            json!({ "weierstrass": weierstrass_json(&pair.weierstrass_data(&tol)?) })
        }
        Command::Pair => {
            let mut pair = maximal_standard_pair(&p, &tol)?;
            if !flags.invert.is_empty() {
                pair = spectral_inversion(
                    &pair,
                    &flags.invert,
                    InversionDirection::FiniteToInfinite,
                    &tol,
                )?;
            }
            let check = verify_standard_pair(&p, &pair, &tol)?;
            if !check.passes(&tol) {
                warnings.push("pair fails its own residual or rank check".into());
            }
            json!({ "pair": pair_json(&pair), "check": check })
        }
        Command::Solvents => {
            let r = solvents_limited(&p, &tol, flags.max_enum)?;
            warnings.extend(r.warnings.iter().cloned());
            enumeration_json(&r, |s| solvent_json(s, false))
        }
        Command::Cosolvents => {
            let r = cosolvents_limited(&p, &tol, flags.max_enum)?;
            warnings.extend(r.warnings.iter().cloned());
            enumeration_json(&r, |s| solvent_json(s, true))
        }
        Command::Bisolvents => {
            let r = bisolvents_limited(&p, &tol, flags.max_enum)?;
            warnings.extend(r.warnings.iter().cloned());
            enumeration_json(&r, bisolvent_json)
        }
        Command::Factor => {
            let atlas = factor_atlas(&p, &tol)?;
            json!({
                "count": atlas.len(),
                "items": atlas.iter().map(factorization_json).collect::<Vec<_>>(),
            })
        }
        Command::Verify => {
            let companion = flags
                .companion
                .as_ref()
                .ok_or_else(|| CliError::Io("verify needs a companion file".into()))?;
            verify_companion(&p, &read(Path::new(companion))?, &tol)?
        }
        Command::Reconstruct => unreachable!("handled above"),
    };
    Ok(finish(regularity, payload, warnings, 0))
}

fn verify_companion(p: &MatrixPolynomial, text: &str, tol: &Tolerance) -> Result<Value, CliError> {
    Ok(match parse_companion(text)? {
        CompanionFile::Pair { x, y, t, z } => {
            let pair = companion_pair(&x, &y, &t, &z)?;
            let check = verify_standard_pair(p, &pair, tol)?;
            json!({ "kind": "pair", "pass": check.passes(tol), "check": check })
        }
        CompanionFile::Solvent { matrix, cosolvent } => {
            let s = decode_matrix(&matrix, "matrix")?;
            if s.shape() != (p.rows(), p.rows()) {
                return Err(Error::DimensionMismatch(format!("solvent is {:?}", s.shape())).into());
            }
            let residual = if cosolvent {
                cosolvent_residual(p, &s)
            } else {
                solvent_residual(p, &s)
            };
            json!({
                "kind": "solvent",
                "cosolvent": cosolvent,
                "residual": residual,
                "pass": residual <= tol.residual_tol,
            })
        }
        CompanionFile::Bisolvent { s1, s2, pi } => {
            let b = Bisolvent::new(
                decode_matrix(&s1, "s1")?,
                decode_matrix(&s2, "s2")?,
                decode_matrix(&pi, "pi")?,
            );
            let check = verify_bisolvent(p, &b, tol)?;
            let mut v = json!({ "kind": "bisolvent", "pass": check.all_pass(), "check": check });
            if check.all_pass() {
                let r = reduce_bisolvent(p, &b, tol)?;
                v["solvent"] = r.solvent.as_ref().map_or(Value::Null, matrix);
                v["cosolvent"] = r.cosolvent.as_ref().map_or(Value::Null, matrix);
            }
            v
        }
        CompanionFile::Factor { coefficients } => {
            if coefficients.len() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "a factor has 2 coefficients, found {}",
                    coefficients.len()
                ))
                .into());
            }
            let f = Pencil::new(
                decode_matrix(&coefficients[1], "coefficients[1]")?,
                decode_matrix(&coefficients[0], "coefficients[0]")?,
            )?;
            let report = verify_right_factor(p, &f, tol)?;
            json!({ "kind": "factor", "pass": report.is_factor(), "check": report })
        }
    })
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn complex_text(re: f64, im: f64) -> String {
    if im == 0.0 {
        sig6(re)
    } else if re == 0.0 {
        format!("{}i", sig6(im))
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", sig6(re), sig6(im.abs()))
    }
}

fn as_complex(v: &Value) -> Option<(f64, f64)> {
    match v.as_array()?.as_slice() {
        [re, im] => Some((re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn as_matrix(v: &Value) -> Option<Vec<Vec<String>>> {
    let rows = v.as_array()?;
    if rows.is_empty() {
        return None;
    }
    rows.iter()
        .map(|r| {
            let entries = r.as_array()?;
            if entries.is_empty() {
                return None;
            }
            entries
                .iter()
                .map(|e| as_complex(e).map(|(re, im)| complex_text(re, im)))
                .collect()
        })
        .collect()
}

fn render(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    if let Some(rows) = as_matrix(v) {
        let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
        let _ = writeln!(out, "{pad}{key}:");
        for r in rows {
            let cells: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
            let _ = writeln!(out, "{pad}  [{}]", cells.join("  "));
        }
        return;
    }
    if let Some((re, im)) = as_complex(v) {
        let _ = writeln!(out, "{pad}{key}: {}", complex_text(re, im));
        return;
    }
    match v {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in map {
                render(out, k, x, indent + 1);
            }
        }
        Value::Array(items) if items.iter().all(|x| x.is_number()) => {
            let cells: Vec<String> = items
                .iter()
                .map(|x| x.as_f64().map_or_else(|| x.to_string(), sig6))
                .collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", cells.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}: {} item(s)", items.len());
            for (i, x) in items.iter().enumerate() {
                render(out, &format!("[{i}]"), x, indent + 1);
            }
        }
        Value::Number(n) => {
            let text = if n.is_f64() {
                sig6(n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            };
            let _ = writeln!(out, "{pad}{key}: {text}");
        }
        Value::String(s) => {
            let _ = writeln!(out, "{pad}{key}: {s}");
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {other}");
        }
    }
}

/// Human-readable rendering with six significant digits.
pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", report.command, report.input);
    let value = serde_json::to_value(report).expect("report serializes");
    for key in ["tolerance", "regularity", "payload", "warnings"] {
        if let Some(v) = value.get(key) {
            if !v.is_null() && v.as_array().is_none_or(|a| !a.is_empty()) {
                render(&mut out, key, v, 0);
            }
        }
    }
    out
}

pub fn format_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Text => to_text(report),
    }
}
