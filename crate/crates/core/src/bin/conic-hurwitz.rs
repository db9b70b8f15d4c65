use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use conic_hurwitz_core::catalog::{classify, CatalogSummary};
use conic_hurwitz_core::{
    all_instances, certify_exceptional, decide_admissible, enumerate_data, family_2k, family_3k,
    family_rk, find_witness, nonprime_witness, parse_angles, parse_datum, search_certificate,
    verify_certificate, verify_witness, BranchDatum, Certification, ExceptionalityCertificate,
    FamilyId, FamilyInstance, MonodromyWitness, OracleResult, SearchConfig, Variant,
};

const EXIT_INPUT_ERROR: u8 = 3;
const DEFAULT_BUDGET: u64 = 100_000_000;

/// Cone-angle admissibility and exceptional branching data for covers of the
/// sphere.
///
/// Exit codes: 0 positive verdict, 1 negative verdict, 2 undecided,
/// 3 malformed input.
#[derive(Parser)]
#[command(name = "conic-hurwitz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchFlags {
    /// Largest denominator in the fallback grid of candidate angles.
    #[arg(long, default_value_t = 6)]
    max_den: u32,
    /// Largest numerator in the fallback grid of candidate angles.
    #[arg(long, default_value_t = 6)]
    max_num: u32,
}

impl SearchFlags {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            max_denominator: self.max_den,
            max_numerator: self.max_num,
            extra_candidates: Vec::new(),
        }
    }
}

#[derive(Args)]
struct BudgetFlag {
    /// Node budget for the monodromy search; 0 means unlimited.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl BudgetFlag {
    fn get(&self) -> Option<u64> {
        (self.budget > 0).then_some(self.budget)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the degree-sum and Riemann-Hurwitz constraints of a datum.
    Validate { datum: String },
    /// Decide whether a cone-angle vector is admissible.
    Admissible { beta: String },
    /// Certify a datum as exceptional, with a given angle vector or by search.
    Certify {
        datum: String,
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Search for permutations realizing a datum.
    Realize {
        datum: String,
        #[command(flatten)]
        budget: BudgetFlag,
    },
    /// List every valid datum of a degree with a given number of branch points.
    Enumerate {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        branch_points: usize,
    },
    /// Classify every datum up to a degree with both the certifier and the oracle.
    Catalog {
        #[arg(long)]
        max_degree: u32,
        #[arg(long, default_value_t = 3)]
        branch_points: usize,
        #[command(flatten)]
        budget: BudgetFlag,
        #[command(flatten)]
        search: SearchFlags,
        /// Include per-stage wall-clock timings (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
        /// Human-readable table instead of JSON lines.
        #[arg(long)]
        table: bool,
    },
    /// Generate the exceptional family instances.
    Families {
        /// Every family instance of this degree.
        #[arg(long, conflicts_with_all = ["family", "nonprime"])]
        degree: Option<u32>,
        /// One instance: P2K_A, P2K_B, P3K, PRK_A or PRK_B, with --params.
        #[arg(long, requires = "params")]
        family: Option<String>,
        /// Comma-separated parameters: P2K_A/B k,a,b; P3K k; PRK_A r,k; PRK_B r,k,j1,j2.
        #[arg(long)]
        params: Option<String>,
        /// The instance used for a composite degree.
        #[arg(long)]
        nonprime: Option<u32>,
        #[arg(long)]
        table: bool,
    },
    /// Re-check a certificate JSON (file path or `-` for stdin) from scratch.
    VerifyCertificate {
        #[arg(default_value = "-")]
        path: String,
    },
    /// Re-check a witness JSON `{"datum": ..., "witness": [...]}` (file or `-`).
    VerifyWitness {
        #[arg(default_value = "-")]
        path: String,
    },
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<u8, InputError>;

fn emit<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("serializable output")
    );
}

fn read_source(path: &str) -> Result<String, InputError> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read {path}: {e}")))?;
    }
    Ok(text)
}

fn cmd_validate(text: &str) -> CmdResult {
    let datum = parse_datum(text)?;
    let report = datum.validate();
    emit(&json!({ "datum": datum, "ok": report.ok, "violations": report.violations }));
    Ok(if report.ok { 0 } else { 1 })
}

fn cmd_admissible(text: &str) -> CmdResult {
    let beta = parse_angles(text)?;
    let verdict = decide_admissible(&beta);
    let mut value = serde_json::to_value(&verdict)?;
    value["beta"] = serde_json::to_value(&beta)?;
    emit(&value);
    Ok(if verdict.admissible { 0 } else { 1 })
}

fn cmd_certify(text: &str, beta: Option<&str>, search: &SearchFlags) -> CmdResult {
    let datum = parse_datum(text)?;
    match beta {
        Some(b) => {
            let beta = parse_angles(b)?;
            match certify_exceptional(&datum, &beta)? {
                Certification::Certified(cert) => {
                    emit(&cert);
                    Ok(0)
                }
                Certification::Refused(refusal) => {
                    emit(&json!({
                        "certified": false,
                        "datum": datum,
                        "beta": beta,
                        "reason": refusal.reason(),
                    }));
                    Ok(1)
                }
            }
        }
        None => {
            let report = datum.validate();
            if !report.ok {
                return Err(InputError(format!(
                    "datum is not valid: {}",
                    serde_json::to_string(&report.violations)?
                )));
            }
            match search_certificate(&datum, &search.config()) {
                Some(cert) => {
                    emit(&cert);
                    Ok(0)
                }
                None => {
                    emit(&json!({
                        "certified": false,
                        "datum": datum,
                        "reason": "no witness found",
                    }));
                    Ok(1)
                }
            }
        }
    }
}

fn cmd_realize(text: &str, budget: Option<u64>) -> CmdResult {
    let datum = parse_datum(text)?;
    let result = find_witness(&datum, budget);
    let mut value = json!({ "result": result.label(), "datum": datum });
    match &result {
        OracleResult::Realizable(w) => value["witness"] = serde_json::to_value(w)?,
        OracleResult::Unknown { nodes } => value["nodes"] = json!(nodes),
        OracleResult::Unrealizable => {}
    }
    emit(&value);
    Ok(match result {
        OracleResult::Realizable(_) => 0,
        OracleResult::Unrealizable => 1,
        OracleResult::Unknown { .. } => 2,
    })
}

fn cmd_enumerate(degree: u32, n: usize) -> CmdResult {
    let mut out = BufWriter::new(io::stdout().lock());
    for datum in enumerate_data(degree, n) {
        writeln!(out, "{}", serde_json::to_string(&datum)?)?;
    }
    out.flush()?;
    Ok(0)
}

struct CatalogArgs<'a> {
    max_degree: u32,
    n: usize,
    budget: Option<u64>,
    search: &'a SearchFlags,
    timings: bool,
    table: bool,
}

fn cmd_catalog(args: CatalogArgs<'_>) -> CmdResult {
    let config = args.search.config();
    let mut summary = CatalogSummary::default();
    let mut out = BufWriter::new(io::stdout().lock());
    for d in 2..=args.max_degree {
        for datum in enumerate_data(d, args.n) {
            match classify(&datum, &config, args.budget) {
                Ok(mut row) => {
                    if !args.timings {
                        row.timings = None;
                    }
                    summary.record(&row);
                    if args.table {
                        writeln!(out, "{:<40} {}", row.datum.to_string(), row.verdict.label())?;
                    } else {
                        writeln!(out, "{}", serde_json::to_string(&row)?)?;
                    }
                }
                Err(contradiction) => {
                    summary.contradictions += 1;
                    eprintln!("CONTRADICTION: {}", serde_json::to_string(&contradiction)?);
                }
            }
            out.flush()?;
        }
    }
    if args.table {
        writeln!(out)?;
        write!(out, "{}", summary.render_table())?;
    } else {
        writeln!(out, "{}", json!({ "summary": summary }))?;
    }
    out.flush()?;
    Ok(if summary.contradictions == 0 { 0 } else { 1 })
}

fn parse_params(text: &str) -> Result<Vec<u32>, InputError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| InputError(format!("parameter `{t}`: {e}")))
        })
        .collect()
}

fn single_family(family: &str, params: &[u32]) -> Result<FamilyInstance, InputError> {
    let id: FamilyId = family.parse()?;
    let need = |n: usize| -> Result<(), InputError> {
        if params.len() == n {
            Ok(())
        } else {
            Err(InputError(format!(
                "{id} takes {n} parameters, got {}",
                params.len()
            )))
        }
    };
    let inst = match id {
        FamilyId::P2K_A | FamilyId::P2K_B => {
            need(3)?;
            let variant = if id == FamilyId::P2K_A {
                Variant::A
            } else {
                Variant::B
            };
            family_2k(params[0], variant, (params[1], params[2]))?
        }
        FamilyId::P3K => {
            need(1)?;
            family_3k(params[0])?
        }
        FamilyId::PRK_A => {
            need(2)?;
            family_rk(params[0], params[1], Variant::A, None)?
        }
        FamilyId::PRK_B => {
            need(4)?;
            family_rk(
                params[0],
                params[1],
                Variant::B,
                Some((params[2], params[3])),
            )?
        }
    };
    Ok(inst)
}

fn cmd_families(
    degree: Option<u32>,
    family: Option<&str>,
    params: Option<&str>,
    nonprime: Option<u32>,
    table: bool,
) -> CmdResult {
    let instances = match (degree, family, nonprime) {
        (Some(d), None, None) => all_instances(d),
        (None, Some(f), None) => vec![single_family(f, &parse_params(params.unwrap_or(""))?)?],
        (None, None, Some(d)) => vec![nonprime_witness(d)?],
        _ => {
            return Err(InputError(
                "give exactly one of --degree, --family with --params, or --nonprime".into(),
            ))
        }
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for inst in &instances {
        if table {
            writeln!(
                out,
                "{:<6} {:<14} {:<40} beta={}",
                inst.family_id.to_string(),
                format!("{:?}", inst.params),
                inst.datum.to_string(),
                inst.recommended_beta
            )?;
        } else {
            writeln!(out, "{}", serde_json::to_string(inst)?)?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn cmd_verify_certificate(path: &str) -> CmdResult {
    let text = read_source(path)?;
    let cert: ExceptionalityCertificate = serde_json::from_str(&text)?;
    let ok = verify_certificate(&cert);
    emit(&json!({ "valid": ok }));
    Ok(if ok { 0 } else { 1 })
}

#[derive(Deserialize)]
struct WitnessFile {
    datum: BranchDatum,
    witness: Vec<String>,
}

fn cmd_verify_witness(path: &str) -> CmdResult {
    let text = read_source(path)?;
    let file: WitnessFile = serde_json::from_str(&text)?;
    let witness = MonodromyWitness::from_notation(file.datum.degree() as usize, &file.witness)?;
    let ok = verify_witness(&file.datum, &witness.perms);
    emit(&json!({ "valid": ok }));
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { datum } => cmd_validate(&datum),
        Command::Admissible { beta } => cmd_admissible(&beta),
        Command::Certify {
            datum,
            beta,
            search,
        } => cmd_certify(&datum, beta.as_deref(), &search),
        Command::Realize { datum, budget } => cmd_realize(&datum, budget.get()),
        Command::Enumerate {
            degree,
            branch_points,
        } => cmd_enumerate(degree, branch_points),
        Command::Catalog {
            max_degree,
            branch_points,
            budget,
            search,
            timings,
            table,
        } => cmd_catalog(CatalogArgs {
            max_degree,
            n: branch_points,
            budget: budget.get(),
            search: &search,
            timings,
            table,
        }),
        Command::Families {
            degree,
            family,
            params,
            nonprime,
            table,
        } => cmd_families(
            degree,
            family.as_deref(),
            params.as_deref(),
            nonprime,
            table,
        ),
        Command::VerifyCertificate { path } => cmd_verify_certificate(&path),
        Command::VerifyWitness { path } => cmd_verify_witness(&path),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
