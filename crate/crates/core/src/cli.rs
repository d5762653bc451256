//! The `genusforge` command line.
//!
//! Exit codes: `0` success, `1` validation or usage error, `2` no witness
//! (or no representation), `3` certification failed. Every JSON document is
//! produced from a struct, so keys come out in a fixed order, and every
//! integer is written as a decimal string.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ampleness::{ReiderReport, SURROGATE_CAVEAT};
use crate::error::{Error, Result};
use crate::lattice::{validate_model, DivisorClass, IntersectionModel};
use crate::nodal::{
    check_nodal_witness, default_nodal_m_min, empirical_nodal_g0_with, nodal_witness, NodalWitness,
};
use crate::planner::{
    check_witness, default_m_min, empirical_g0_with, GenusWitness, Planner, DEFAULT_SCAN_CAP,
};
use crate::quadform::{
    m0_bound, m0_exact, represent_even, representable_up_to, MixedQuadForm, ORACLE_MAX_LIMIT,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Caps the exhaustive oracle limit in `sweep` and the genus scan in `g0`.
pub const MAX_SEARCH_ENV: &str = "GENUSFORGE_MAX_SEARCH";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NO_WITNESS: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::InvalidModel(_) | Error::OutOfRange(_) => EXIT_INVALID,
        Error::NoRepresentation(_) | Error::NoWitness(_) | Error::NotFound(_) => EXIT_NO_WITNESS,
        Error::CertificationFailed(_) | Error::WitnessInvariant(_) => EXIT_CERTIFICATION,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "genusforge",
    version,
    about = "Exact genus witnesses on intersection lattices"
)]
struct Cli {
    /// Print JSON instead of a human-readable report.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model file.
    CheckModel { path: PathBuf },
    /// Represent an even integer by the 18-variable mixed form.
    Represent {
        #[arg(long, allow_hyphen_values = true)]
        a: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        b: BigInt,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        c: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        m: BigInt,
    },
    /// Certify a smooth curve class of the given genus.
    Witness {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        genus: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        m_min: Option<BigInt>,
    },
    /// Certify a nodal curve class of the given geometric genus.
    Nodal {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        genus: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        m_min: Option<BigInt>,
    },
    /// Run the construction over every even m in a range.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        a: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        b: BigInt,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        c: BigInt,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Empirical genus threshold: the first run of span + 1 certified genera.
    G0 {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 2000)]
        span: u64,
        #[arg(long, allow_hyphen_values = true)]
        m_min: Option<BigInt>,
        /// Scan nodal witnesses instead of smooth ones.
        #[arg(long)]
        nodal: bool,
    },
    /// Recheck a witness record against its model file.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        record: PathBuf,
    },
}

/// Runs the tool on the process arguments and returns the exit code.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INVALID,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::CheckModel { path } => cmd_check_model(path, json, out),
        Command::Represent { a, b, c, m } => {
            let form = MixedQuadForm::new(a.clone(), b.clone(), c.clone())?;
            let rep = represent_even(m, &form)?;
            let doc = RepresentationDoc {
                form: FormDoc::of(&form),
                m: m.to_string(),
                pattern: rep.pattern().to_string(),
                x: decimals(rep.entries()),
                value: form.evaluate(rep.entries())?.to_string(),
            };
            if json {
                emit_json(out, &doc)?;
            } else {
                emit(
                    out,
                    format!(
                        "{form}\nm = {m}\npattern: {}\nx = [{}]",
                        doc.pattern,
                        doc.x.join(", ")
                    ),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Witness {
            model,
            genus,
            m_min,
        } => {
            let loaded = load_model(model)?;
            let m_min = match m_min {
                Some(m) => m.clone(),
                None => default_m_min(&loaded.model)?,
            };
            let w = Planner::new(&loaded.model, &m_min)?.witness(genus)?;
            let record = WitnessRecord::genus(&loaded.model, &w, &loaded.sha256);
            print_record(out, &record, json)?;
            Ok(EXIT_OK)
        }
        Command::Nodal {
            model,
            genus,
            m_min,
        } => {
            let loaded = load_model(model)?;
            let m_min = match m_min {
                Some(m) => m.clone(),
                None => default_nodal_m_min(&loaded.model)?,
            };
            let w = nodal_witness(&loaded.model, genus, &m_min)?;
            let record = WitnessRecord::nodal(&w, &loaded.sha256);
            print_record(out, &record, json)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { a, b, c, from, to } => {
            let form = MixedQuadForm::new(a.clone(), b.clone(), c.clone())?;
            let report = sweep(&form, *from, *to, max_search()?)?;
            if json {
                emit_json(out, &report)?;
            } else {
                emit(out, report.to_table())?;
            }
            Ok(EXIT_OK)
        }
        Command::G0 {
            model,
            span,
            m_min,
            nodal,
        } => {
            let loaded = load_model(model)?;
            let cap = max_search()?.map_or(DEFAULT_SCAN_CAP, |c| c.min(DEFAULT_SCAN_CAP));
            let doc = if *nodal {
                let m_min = match m_min {
                    Some(m) => m.clone(),
                    None => default_nodal_m_min(&loaded.model)?,
                };
                let r = empirical_nodal_g0_with(&loaded.model, *span, &m_min, cap)?;
                G0Doc {
                    kind: "nodal",
                    model_sha256: loaded.sha256.clone(),
                    g0: r.g0.to_string(),
                    span: r.span.to_string(),
                    m_min: r.m_min.to_string(),
                    witnesses: r.witnesses.len().to_string(),
                    largest_m: r.witnesses.iter().map(|w| &w.m).max().map(|m| m.to_string()),
                    note: "empirical: every genus in [g0, g0 + span] was certified; larger genera were not scanned",
                }
            } else {
                let m_min = match m_min {
                    Some(m) => m.clone(),
                    None => default_m_min(&loaded.model)?,
                };
                let planner = Planner::new(&loaded.model, &m_min)?;
                let r = empirical_g0_with(&planner, *span, cap)?;
                G0Doc {
                    kind: "genus",
                    model_sha256: loaded.sha256.clone(),
                    g0: r.g0.to_string(),
                    span: r.span.to_string(),
                    m_min: r.m_min.to_string(),
                    witnesses: r.witnesses.len().to_string(),
                    largest_m: r.witnesses.iter().map(|w| &w.m).max().map(|m| m.to_string()),
                    note: "empirical: every genus in [g0, g0 + span] was certified; larger genera were not scanned",
                }
            };
            if json {
                emit_json(out, &doc)?;
            } else {
                emit(
                    out,
                    format!(
                        "{} threshold g0 = {} (span {}, m_min = {}, largest m = {})\n{}",
                        doc.kind,
                        doc.g0,
                        doc.span,
                        doc.m_min,
                        doc.largest_m.as_deref().unwrap_or("-"),
                        doc.note
                    ),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { model, record } => {
            let loaded = load_model(model)?;
            let text = fs::read_to_string(record)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", record.display())))?;
            let record: WitnessRecord = serde_json::from_str(&text)
                .map_err(|e| Error::invalid(format!("malformed record: {e}")))?;
            verify_record(&loaded, &record)?;
            let doc = VerifyDoc {
                sound: true,
                kind: record.kind(),
                genus: record.genus_value().to_string(),
            };
            if json {
                emit_json(out, &doc)?;
            } else {
                emit(
                    out,
                    format!("record for {} genus {} reproduces", doc.kind, doc.genus),
                )?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_check_model(path: &Path, json: bool, out: &mut dyn Write) -> Result<i32> {
    let parsed = fs::read(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
        .and_then(|bytes| {
            ModelFile::parse(&bytes)
                .and_then(|f| f.into_model())
                .map(|m| (m, sha256_hex(&bytes)))
        });
    let (doc, code) = match parsed {
        Ok((model, sha)) => {
            let violations: Vec<ViolationDoc> = validate_model(&model)
                .iter()
                .map(|v| ViolationDoc {
                    code: v.code().to_string(),
                    message: v.to_string(),
                })
                .collect();
            let valid = violations.is_empty();
            let doc = CheckDoc {
                valid,
                model_sha256: Some(sha),
                violations,
            };
            (doc, if valid { EXIT_OK } else { EXIT_INVALID })
        }
        Err(e) => {
            let doc = CheckDoc {
                valid: false,
                model_sha256: None,
                violations: vec![ViolationDoc {
                    code: "schema".into(),
                    message: e.to_string(),
                }],
            };
            (doc, EXIT_INVALID)
        }
    };
    if json {
        emit_json(out, &doc)?;
    } else if doc.valid {
        emit(out, "valid".to_string())?;
    } else {
        let lines: Vec<String> = doc.violations.iter().map(|v| v.message.clone()).collect();
        emit(out, lines.join("\n"))?;
    }
    Ok(code)
}

fn emit(out: &mut dyn Write, text: String) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::invalid(format!("cannot write output: {e}")))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    emit(out, to_json(value))
}

/// Pretty JSON; identical values give identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

fn print_record(out: &mut dyn Write, record: &WitnessRecord, json: bool) -> Result<()> {
    if json {
        return emit_json(out, record);
    }
    let text = match record {
        WitnessRecord::Genus(r) => format!(
            "genus {} at m = {}\nx = [{}]\ne = {}\n{}",
            r.genus,
            r.m,
            r.x.join(", "),
            r.e_used,
            r.reider
        ),
        WitnessRecord::Nodal(r) => format!(
            "geometric genus {} at m = {} with {} nodes\n{}",
            r.genus, r.m, r.nodes, r.reider
        ),
    };
    emit(out, text)
}

fn decimals(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn parse_decimal(s: &str, what: &str) -> Result<BigInt> {
    BigInt::from_str(s)
        .map_err(|_| Error::invalid(format!("{what}: {s:?} is not a decimal integer")))
}

fn parse_decimals(v: &[String], what: &str) -> Result<Vec<BigInt>> {
    v.iter().map(|s| parse_decimal(s, what)).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads [`MAX_SEARCH_ENV`]; unset means no extra cap.
pub fn max_search() -> Result<Option<u64>> {
    match std::env::var(MAX_SEARCH_ENV) {
        Ok(v) => v.trim().parse::<u64>().map(Some).map_err(|_| {
            Error::invalid(format!(
                "{MAX_SEARCH_ENV} must be a nonnegative integer, got {v:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::invalid(format!("{MAX_SEARCH_ENV}: {e}"))),
    }
}

/// A JSON integer written either as a number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Number(i64),
    Text(String),
}

impl JsonInt {
    fn of(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| JsonInt::Text(v.to_string()), JsonInt::Number)
    }

    fn value(&self) -> Result<BigInt> {
        match self {
            JsonInt::Number(n) => Ok(BigInt::from(*n)),
            JsonInt::Text(s) => parse_decimal(s, "gram entry"),
        }
    }
}

/// On-disk model description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub generators: Vec<String>,
    pub gram: Vec<Vec<JsonInt>>,
    pub effective_tests: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_block: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_block: Option<Vec<String>>,
}

impl ModelFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| Error::invalid(format!("malformed model file: {e}")))
    }

    pub fn from_model(model: &IntersectionModel) -> Self {
        let names = |idx: &[usize]| idx.iter().map(|&i| model.generators()[i].clone()).collect();
        let blocks = model.curve_blocks();
        ModelFile {
            generators: model.generators().to_vec(),
            gram: model
                .gram()
                .iter()
                .map(|row| row.iter().map(JsonInt::of).collect())
                .collect(),
            effective_tests: model
                .effective_tests()
                .iter()
                .map(|t| t.name.clone())
                .collect(),
            a_block: blocks.map(|b| names(&b.a_block)),
            b_block: blocks.map(|b| names(&b.b_block)),
        }
    }

    /// Builds the model without checking the axioms.
    pub fn into_model(self) -> Result<IntersectionModel> {
        let gram = self
            .gram
            .iter()
            .map(|row| row.iter().map(JsonInt::value).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let blocks = match (self.a_block, self.b_block) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(Error::invalid("a_block and b_block must be given together")),
        };
        IntersectionModel::new(self.generators, gram, &self.effective_tests, blocks)
    }
}

/// A validated model together with the hash of the file it came from.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: IntersectionModel,
    pub sha256: String,
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let bytes = fs::read(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    load_model_bytes(&bytes)
}

pub fn load_model_bytes(bytes: &[u8]) -> Result<LoadedModel> {
    let model = ModelFile::parse(bytes)?.into_model()?;
    model.ensure_valid()?;
    Ok(LoadedModel {
        model,
        sha256: sha256_hex(bytes),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorstTestDoc {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReiderDoc {
    pub passed: bool,
    pub square_value: String,
    pub worst_test: Option<WorstTestDoc>,
    pub caveat: String,
}

impl ReiderDoc {
    fn of(r: &ReiderReport) -> Self {
        ReiderDoc {
            passed: r.passed,
            square_value: r.square_value.to_string(),
            worst_test: r.worst_test.as_ref().map(|(name, v)| WorstTestDoc {
                name: name.clone(),
                value: v.to_string(),
            }),
            caveat: r.caveat.to_string(),
        }
    }

    fn report(&self) -> Result<ReiderReport> {
        if self.caveat != SURROGATE_CAVEAT {
            return Err(Error::invalid("record carries an unknown Reider caveat"));
        }
        Ok(ReiderReport {
            passed: self.passed,
            square_value: parse_decimal(&self.square_value, "square_value")?,
            worst_test: match &self.worst_test {
                Some(w) => Some((w.name.clone(), parse_decimal(&w.value, "worst_test")?)),
                None => None,
            },
            caveat: SURROGATE_CAVEAT,
        })
    }
}

impl std::fmt::Display for ReiderDoc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "passed" } else { "failed" };
        write!(
            f,
            "Reider check {verdict}: (D − K)² = {}",
            self.square_value
        )?;
        if let Some(w) = &self.worst_test {
            write!(f, ", least (D − K)·Γ = {} at {}", w.value, w.name)?;
        }
        write!(f, "\nnote: {}", self.caveat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusRecord {
    pub tool_version: String,
    pub model_sha256: String,
    pub genus: String,
    pub m: String,
    pub x: Vec<String>,
    /// Coefficients of `K + mH + Σ x_i C_i` in generator order.
    pub divisor: Vec<String>,
    pub generators: Vec<String>,
    pub e_used: String,
    pub reider: ReiderDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalRecord {
    pub tool_version: String,
    pub model_sha256: String,
    pub genus: String,
    pub m: String,
    pub nodes: String,
    /// Coefficients on the base generators followed by `E1..Er`.
    pub l_class: Vec<String>,
    pub adjoint: Vec<String>,
    pub reider: ReiderDoc,
}

/// Serialized witness; `kind` is `"genus"` or `"nodal"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRecord {
    Genus(GenusRecord),
    Nodal(NodalRecord),
}

impl WitnessRecord {
    pub fn genus(model: &IntersectionModel, w: &GenusWitness, model_sha256: &str) -> Self {
        WitnessRecord::Genus(GenusRecord {
            tool_version: TOOL_VERSION.to_string(),
            model_sha256: model_sha256.to_string(),
            genus: w.g.to_string(),
            m: w.m.to_string(),
            x: decimals(&w.x),
            divisor: decimals(w.divisor.coeffs()),
            generators: model.generators().to_vec(),
            e_used: w.e_used.to_string(),
            reider: ReiderDoc::of(&w.reider),
        })
    }

    pub fn nodal(w: &NodalWitness, model_sha256: &str) -> Self {
        WitnessRecord::Nodal(NodalRecord {
            tool_version: TOOL_VERSION.to_string(),
            model_sha256: model_sha256.to_string(),
            genus: w.g.to_string(),
            m: w.m.to_string(),
            nodes: w.r.to_string(),
            l_class: decimals(w.l_class.coeffs()),
            adjoint: decimals(w.adjoint.coeffs()),
            reider: ReiderDoc::of(&w.reider),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WitnessRecord::Genus(_) => "genus",
            WitnessRecord::Nodal(_) => "nodal",
        }
    }

    pub fn genus_value(&self) -> &str {
        match self {
            WitnessRecord::Genus(r) => &r.genus,
            WitnessRecord::Nodal(r) => &r.genus,
        }
    }

    pub fn model_sha256(&self) -> &str {
        match self {
            WitnessRecord::Genus(r) => &r.model_sha256,
            WitnessRecord::Nodal(r) => &r.model_sha256,
        }
    }
}

/// Rebuilds the witness in `record` and reruns every invariant check.
///
/// Fails with [`Error::InvalidInput`] when the record does not belong to the
/// model and with [`Error::WitnessInvariant`] when a check breaks.
pub fn verify_record(loaded: &LoadedModel, record: &WitnessRecord) -> Result<()> {
    if record.model_sha256() != loaded.sha256 {
        return Err(Error::invalid(format!(
            "record was made for model {} but this file hashes to {}",
            record.model_sha256(),
            loaded.sha256
        )));
    }
    let model = &loaded.model;
    let problems = match record {
        WitnessRecord::Genus(r) => {
            if r.generators != model.generators() {
                return Err(Error::invalid("record generators differ from the model"));
            }
            let e_used = parse_decimal(&r.e_used, "e_used")?;
            let w = GenusWitness {
                g: parse_decimal(&r.genus, "genus")?,
                m: parse_decimal(&r.m, "m")?,
                x: parse_decimals(&r.x, "x")?,
                divisor: DivisorClass::new(parse_decimals(&r.divisor, "divisor")?),
                e_used: e_used.into(),
                reider: r.reider.report()?,
            };
            if w.x.len() != 18 || w.divisor.dim() != model.dim() {
                return Err(Error::invalid("record vectors have the wrong length"));
            }
            check_witness(model, &w)
        }
        WitnessRecord::Nodal(r) => {
            let w = NodalWitness {
                g: parse_decimal(&r.genus, "genus")?,
                m: parse_decimal(&r.m, "m")?,
                r: parse_decimal(&r.nodes, "nodes")?,
                l_class: DivisorClass::new(parse_decimals(&r.l_class, "l_class")?),
                adjoint: DivisorClass::new(parse_decimals(&r.adjoint, "adjoint")?),
                reider: r.reider.report()?,
            };
            let dim = BigInt::from(model.dim()) + &w.r;
            if BigInt::from(w.l_class.dim()) != dim || BigInt::from(w.adjoint.dim()) != dim {
                return Err(Error::invalid("record vectors have the wrong length"));
            }
            check_nodal_witness(model, &w)
        }
    };
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::WitnessInvariant(problems.join("; ")))
    }
}

#[derive(Debug, Serialize)]
struct ViolationDoc {
    code: String,
    message: String,
}

#[derive(Debug, Serialize)]
struct CheckDoc {
    valid: bool,
    model_sha256: Option<String>,
    violations: Vec<ViolationDoc>,
}

#[derive(Debug, Serialize)]
pub struct FormDoc {
    pub a: String,
    pub b: String,
    pub c: String,
}

impl FormDoc {
    fn of(form: &MixedQuadForm) -> Self {
        FormDoc {
            a: form.a().to_string(),
            b: form.b().to_string(),
            c: form.c().to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RepresentationDoc {
    form: FormDoc,
    m: String,
    pattern: String,
    x: Vec<String>,
    value: String,
}

#[derive(Debug, Serialize)]
struct G0Doc {
    kind: &'static str,
    model_sha256: String,
    g0: String,
    span: String,
    m_min: String,
    witnesses: String,
    largest_m: Option<String>,
    note: &'static str,
}

#[derive(Debug, Serialize)]
struct VerifyDoc {
    sound: bool,
    kind: &'static str,
    genus: String,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub m: String,
    pub constructed: bool,
    pub pattern: Option<String>,
    pub max_abs: Option<String>,
    /// `max|x_i|² ≤ m`.
    pub within_sqrt_m: Option<bool>,
    /// Exhaustive verdict, when `m` lies within the oracle limit.
    pub oracle: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct OracleDoc {
    pub limit: String,
    /// Least even `m*` with every even `m ∈ [m*, limit]` represented.
    pub m0_exact: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub form: FormDoc,
    pub from: String,
    pub to: String,
    pub rows: Vec<SweepRow>,
    pub constructed: String,
    pub m0_bound: String,
    /// Least even `m*` with the construction succeeding on every even `m ∈ [m*, to]`.
    pub construction_threshold: Option<String>,
    pub oracle: Option<OracleDoc>,
}

impl SweepReport {
    fn to_table(&self) -> String {
        let mut lines = vec![format!(
            "form a = {}, b = {}, c = {}; even m in [{}, {}]",
            self.form.a, self.form.b, self.form.c, self.from, self.to
        )];
        lines.push(format!(
            "{:>8}  {:<5}  {:<22}  {:>8}  {}",
            "m", "built", "pattern", "max|x|", "oracle"
        ));
        let flag = |b: Option<bool>| b.map_or("-", |b| if b { "yes" } else { "no" });
        for r in &self.rows {
            lines.push(
                format!(
                    "{:>8}  {:<5}  {:<22}  {:>8}  {:<6}",
                    r.m,
                    flag(Some(r.constructed)),
                    r.pattern.as_deref().unwrap_or("-"),
                    r.max_abs.as_deref().unwrap_or("-"),
                    flag(r.oracle)
                )
                .trim_end()
                .to_string(),
            );
        }
        lines.push(format!(
            "constructed: {} of {}",
            self.constructed,
            self.rows.len()
        ));
        lines.push(format!("constructive bound m0: {}", self.m0_bound));
        lines.push(format!(
            "construction threshold: {}",
            self.construction_threshold
                .as_deref()
                .unwrap_or("none in range")
        ));
        match &self.oracle {
            Some(o) => lines.push(format!(
                "oracle m* (exhaustive up to {}): {}",
                o.limit,
                o.m0_exact.as_deref().unwrap_or("not reached")
            )),
            None => lines.push("oracle: skipped (limit below the constructive bound)".to_string()),
        }
        lines.join("\n")
    }
}

/// Runs [`represent_even`] on every even `m ∈ [from, to]` and, when the
/// range reaches [`m0_bound`], the exhaustive oracle up to `min(to, cap)`.
pub fn sweep(form: &MixedQuadForm, from: u64, to: u64, cap: Option<u64>) -> Result<SweepReport> {
    if from > to {
        return Err(Error::invalid(format!("empty range [{from}, {to}]")));
    }
    let bound = m0_bound(form);
    let limit = cap.map_or(to, |c| c.min(to)).min(ORACLE_MAX_LIMIT as u64) & !1;
    let (oracle_flags, oracle) = if BigInt::from(limit) >= bound {
        let limit_big = BigInt::from(limit);
        let flags = representable_up_to(form, &limit_big)?;
        let exact = match m0_exact(form, &limit_big) {
            Ok(m) => Some(m.to_string()),
            Err(Error::NotFound(_)) => None,
            Err(e) => return Err(e),
        };
        (
            Some(flags),
            Some(OracleDoc {
                limit: limit.to_string(),
                m0_exact: exact,
            }),
        )
    } else {
        (None, None)
    };

    let mut rows = Vec::new();
    let mut built = 0u64;
    let mut threshold: Option<u64> = None;
    let first = from + (from & 1);
    for m in (first..=to).step_by(2) {
        let mb = BigInt::from(m);
        let row = match represent_even(&mb, form) {
            Ok(rep) => {
                let max = rep.max_abs();
                built += 1;
                threshold.get_or_insert(m);
                SweepRow {
                    m: m.to_string(),
                    constructed: true,
                    pattern: Some(rep.pattern().to_string()),
                    within_sqrt_m: Some(&max * &max <= mb),
                    max_abs: Some(max.to_string()),
                    oracle: None,
                }
            }
            Err(Error::NoRepresentation(_)) => {
                threshold = None;
                SweepRow {
                    m: m.to_string(),
                    constructed: false,
                    pattern: None,
                    max_abs: None,
                    within_sqrt_m: None,
                    oracle: None,
                }
            }
            Err(e) => return Err(e),
        };
        let oracle_flag = oracle_flags
            .as_ref()
            .and_then(|f| usize::try_from(m).ok().and_then(|i| f.get(i).copied()));
        rows.push(SweepRow {
            oracle: oracle_flag,
            ..row
        });
    }
    Ok(SweepReport {
        form: FormDoc::of(form),
        from: from.to_string(),
        to: to.to_string(),
        constructed: built.to_string(),
        rows,
        m0_bound: bound.to_string(),
        construction_threshold: threshold.map(|m| m.to_string()),
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{plane_model, reference_model};

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("genusforge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn model_file_round_trip() {
        for model in [plane_model(), reference_model()] {
            let file = ModelFile::from_model(&model);
            let bytes = to_json(&file);
            assert_eq!(
                ModelFile::parse(bytes.as_bytes())
                    .unwrap()
                    .into_model()
                    .unwrap(),
                model
            );
        }
    }

    #[test]
    fn string_and_number_entries_agree() {
        let a = br#"{"generators":["K","H"],"gram":[[9,-3],[-3,1]],"effective_tests":["H"]}"#;
        let b =
            br#"{"generators":["K","H"],"gram":[["9","-3"],["-3","1"]],"effective_tests":["H"]}"#;
        let ma = load_model_bytes(a).unwrap();
        let mb = load_model_bytes(b).unwrap();
        assert_eq!(ma.model, mb.model);
        assert_ne!(ma.sha256, mb.sha256);
    }

    #[test]
    fn unknown_keys_and_half_blocks_are_rejected() {
        let extra =
            br#"{"generators":["K","H"],"gram":[[9,-3],[-3,1]],"effective_tests":["H"],"x":1}"#;
        assert!(ModelFile::parse(extra).is_err());
        let half = br#"{"generators":["K","H"],"gram":[[9,-3],[-3,1]],"effective_tests":["H"],"a_block":[]}"#;
        assert!(ModelFile::parse(half).unwrap().into_model().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invalid("x")), 1);
        assert_eq!(exit_code(&Error::OutOfRange("x".into())), 1);
        assert_eq!(exit_code(&Error::NoWitness("x".into())), 2);
        assert_eq!(exit_code(&Error::NoRepresentation("x".into())), 2);
        assert_eq!(exit_code(&Error::CertificationFailed("x".into())), 3);
    }

    #[test]
    fn represent_command() {
        let (code, out, _) = run(&["--json", "represent", "--a", "3", "--b", "5", "--m", "40"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], "40");
        assert_eq!(v["x"].as_array().unwrap().len(), 18);

        let (code, _, err) = run(&["represent", "--a", "2", "--b", "4", "--m", "2"]);
        assert_eq!(code, 2, "{err}");
        let (code, _, _) = run(&["represent", "--a", "1", "--b", "1", "--m", "2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn usage_errors_exit_one_and_help_exits_zero() {
        assert_eq!(run(&["bogus"]).0, 1);
        assert_eq!(run(&["represent", "--a", "3"]).0, 1);
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("check-model"));
        assert_eq!(run(&["--version"]).0, 0);
    }

    #[test]
    fn sweep_example() {
        let form = MixedQuadForm::new(3, 5, 0).unwrap();
        let r = sweep(&form, 0, 400, None).unwrap();
        let m_star: u64 = r
            .oracle
            .as_ref()
            .unwrap()
            .m0_exact
            .as_ref()
            .unwrap()
            .parse()
            .unwrap();
        assert!(m_star <= 16);
        assert!(r.rows.iter().all(|row| row.within_sqrt_m != Some(false)));
    }

    #[test]
    fn sweep_success_set_ignores_c() {
        let set = |c: i64| {
            let r = sweep(&MixedQuadForm::new(2, 4, c).unwrap(), 0, 400, None).unwrap();
            r.rows.iter().map(|row| row.constructed).collect::<Vec<_>>()
        };
        assert_eq!(set(0), set(9));
    }

    #[test]
    fn sweep_cap_limits_the_oracle() {
        let form = MixedQuadForm::new(3, 5, 0).unwrap();
        let r = sweep(&form, 0, 400, Some(100)).unwrap();
        assert_eq!(r.oracle.unwrap().limit, "100");
        assert!(r.rows.iter().filter(|row| row.oracle.is_some()).count() == 51);
        assert!(sweep(&form, 10, 4, None).is_err());
    }

    #[test]
    fn genus_record_verifies_and_detects_tampering() {
        let bytes = to_json(&ModelFile::from_model(&reference_model()));
        let loaded = load_model_bytes(bytes.as_bytes()).unwrap();
        let w = Planner::with_default_start(&loaded.model)
            .unwrap()
            .witness(&BigInt::from(60))
            .unwrap();
        let record = WitnessRecord::genus(&loaded.model, &w, &loaded.sha256);
        verify_record(&loaded, &record).unwrap();

        let text = to_json(&record);
        let back: WitnessRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);

        let WitnessRecord::Genus(mut bad) = record.clone() else {
            unreachable!()
        };
        bad.genus = "61".into();
        let err = verify_record(&loaded, &WitnessRecord::Genus(bad)).unwrap_err();
        assert!(matches!(err, Error::WitnessInvariant(_)));

        let WitnessRecord::Genus(mut moved) = record else {
            unreachable!()
        };
        moved.model_sha256 = "00".into();
        assert!(matches!(
            verify_record(&loaded, &WitnessRecord::Genus(moved)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn nodal_record_verifies() {
        let bytes = to_json(&ModelFile::from_model(&plane_model()));
        let loaded = load_model_bytes(bytes.as_bytes()).unwrap();
        let w = nodal_witness(&loaded.model, &BigInt::from(40), &BigInt::from(6)).unwrap();
        let record = WitnessRecord::nodal(&w, &loaded.sha256);
        verify_record(&loaded, &record).unwrap();
        let WitnessRecord::Nodal(mut bad) = record else {
            unreachable!()
        };
        bad.nodes = "2".into();
        assert!(verify_record(&loaded, &WitnessRecord::Nodal(bad)).is_err());
    }
}
