//! Command-line front end: exact group, character-table, cocycle, counting
//! and Gromov-Witten computations, plus the verification report pipelines.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 resource cap exceeded.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gerbe_gw::cocycle::{extract_cocycle, AnyCocycle, CocycleSpec, CoeffSpec, U1Cocycle};
use gerbe_gw::counting::{Counter, SurfaceGroupInstance, DEFAULT_ENUMERATION_CAP};
use gerbe_gw::group::GroupSpec;
use gerbe_gw::gw::{
    gw_bg, verify_decomposition, verify_product, DecompositionOptions, GwQuery, RowCollection,
};
use gerbe_gw::psi::{psi_integral, PsiSpec};
use gerbe_gw::rational::rat_to_string;
use gerbe_gw::twisted::TwistedAlgebra;
use gerbe_gw::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gerbe-gw",
    version,
    about = "Exact Gromov-Witten invariants of classifying stacks and gerbe decomposition checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArg {
    /// Output path; `-` streams to standard output.
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a group and print its canonical JSON with structure data.
    Group {
        /// `builtin:<name>` or a path to a group JSON file.
        #[arg(long)]
        group: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Compute the exact character table, or verify an external one.
    Chartable {
        #[arg(long)]
        group: String,
        /// Verify the table in this JSON file against the group instead of
        /// computing one.
        #[arg(long)]
        verify: Option<String>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Cocycle operations.
    Cocycle {
        #[command(subcommand)]
        action: CocycleAction,
    },
    /// The normalized surface-group count Ω_{g,c}((g_1),…,(g_n)).
    Omega {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genus: usize,
        /// Comma-separated conjugacy class indices.
        #[arg(long)]
        classes: String,
        /// Central twist element index.
        #[arg(long, default_value_t = 0)]
        central: usize,
        /// Also run the brute-force enumeration and require equality.
        #[arg(long)]
        check_brute_force: bool,
        /// Tuple cap for the enumeration.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        enum_cap: u64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// The aggregated degree Σ over class selections of Ω_{g,c}.
    Degree {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genus: usize,
        /// Selections, one per marked point: class indices separated by
        /// commas, points separated by semicolons, e.g. `0,1;2`.
        #[arg(long)]
        selections: String,
        #[arg(long, default_value_t = 0)]
        central: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Witten-Kontsevich descendant integral ⟨τ_{a_1}⋯τ_{a_n}⟩_g.
    Psi {
        #[arg(long)]
        g: usize,
        /// Comma-separated exponents.
        #[arg(long)]
        a: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// A twisted Gromov-Witten invariant of BG with class-sum insertions.
    Gw {
        /// Untwisted: `builtin:<name>` or a group JSON path.
        #[arg(long, conflicts_with = "cocycle")]
        group: Option<String>,
        /// Twisted: path to a u1 cocycle JSON (the base group comes with it).
        #[arg(long)]
        cocycle: Option<String>,
        #[arg(long)]
        genus: usize,
        /// Comma-separated class indices; each inserts the class sum.
        #[arg(long)]
        classes: String,
        /// Comma-separated descendant exponents, one per insertion.
        #[arg(long)]
        a: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Verify the decomposition identity over class-sum insertions.
    Decompose {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        max_genus: usize,
        #[arg(long, default_value_t = 3)]
        max_points: usize,
        /// Optional cap on 2g+n.
        #[arg(long)]
        sum_cap: Option<usize>,
        /// Cap on descendant tuples per (g,n).
        #[arg(long)]
        budget: Option<usize>,
        /// Emit only failing rows.
        #[arg(long)]
        failures_only: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Verify the product identities for (K1,c1) × (K2,c2).
    ProductCheck {
        #[arg(long, conflicts_with = "cocycle1")]
        group1: Option<String>,
        #[arg(long)]
        cocycle1: Option<String>,
        #[arg(long, conflicts_with = "cocycle2")]
        group2: Option<String>,
        #[arg(long)]
        cocycle2: Option<String>,
        #[arg(long, default_value_t = 1)]
        max_genus: usize,
        #[arg(long, default_value_t = 2)]
        max_points: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        failures_only: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Run the full acceptance matrix.
    Selftest {
        /// Run a single criterion (1-9).
        #[arg(long)]
        criterion: Option<usize>,
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Subcommand)]
enum CocycleAction {
    /// Extract the center cocycle ν of 1 → Z(G) → G → K → 1.
    Extract {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Validate a cocycle file: identity and normalization report.
    Validate {
        #[arg(long)]
        cocycle: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Decide whether a cocycle is a coboundary, with a witness.
    Coboundary {
        #[arg(long)]
        cocycle: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Push the center cocycle forward along a character of Z(G).
    Push {
        #[arg(long)]
        group: String,
        /// Comma-separated dual exponents against the cyclic factors of Z(G).
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn parse_csv(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidInput(format!("bad index {t:?}"))))
        .collect()
}

fn parse_csv_u64(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidInput(format!("bad value {t:?}"))))
        .collect()
}

fn parse_selections(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';').map(parse_csv).collect()
}

struct Sink {
    target: String,
    buffer: String,
}

impl Sink {
    fn new(out: &OutputArg) -> Sink {
        Sink { target: out.output.clone(), buffer: String::new() }
    }

    fn line(&mut self, text: &str) {
        self.buffer.push_str(text);
        self.buffer.push('\n');
    }

    fn json(&mut self, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string(value)
            .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
        self.line(&text);
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.target == "-" {
            print!("{}", self.buffer);
            Ok(())
        } else {
            std::fs::write(&self.target, self.buffer)
                .map_err(|e| Error::InvalidInput(format!("cannot write {:?}: {e}", self.target)))
        }
    }
}

fn load_cocycle_file(path: &str) -> Result<AnyCocycle> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read cocycle file {path:?}: {e}")))?;
    let spec: CocycleSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("bad cocycle JSON: {e}")))?;
    spec.build()
}

fn load_u1_cocycle(path: &str) -> Result<U1Cocycle> {
    match load_cocycle_file(path)? {
        AnyCocycle::U1(c) => Ok(c),
        AnyCocycle::Abelian(_) => Err(Error::InvalidInput(
            "expected a u1 cocycle; push an abelian one through a character first".into(),
        )),
    }
}

fn load_algebra(group: &Option<String>, cocycle: &Option<String>) -> Result<TwistedAlgebra> {
    match (group, cocycle) {
        (Some(g), None) => TwistedAlgebra::untwisted(GroupSpec::parse_cli(g)?.build()?),
        (None, Some(path)) => TwistedAlgebra::new(load_u1_cocycle(path)?),
        _ => Err(Error::InvalidInput("provide exactly one of --group / --cocycle".into())),
    }
}

/// A verification failure maps to exit 1, bad input to 2, caps to 3.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::CapExceeded(_) => 3,
        Error::Defect(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Group { group, out } => {
            let spec = GroupSpec::parse_cli(&group)?;
            let g = spec.build()?;
            let classes = g.conjugacy_classes();
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct GroupOut {
                group: GroupSpec,
                order: usize,
                class_sizes: Vec<usize>,
                center_size: usize,
                exponent: u64,
                abelian: bool,
            }
            let mut sink = Sink::new(&out);
            sink.json(&GroupOut {
                order: g.order(),
                class_sizes: classes.iter().map(|c| c.size()).collect(),
                center_size: g.center().len(),
                exponent: g.exponent(),
                abelian: g.is_abelian(),
                group: spec,
            })?;
            sink.finish()?;
            Ok(0)
        }
        Command::Chartable { group, verify, out } => {
            let spec = GroupSpec::parse_cli(&group)?;
            let g = spec.build()?;
            let mut sink = Sink::new(&out);
            let table = match verify {
                None => gerbe_gw::chartab::CharacterTable::compute(&g)?,
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::InvalidInput(format!("cannot read table file {path:?}: {e}"))
                    })?;
                    let value: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("bad table JSON: {e}")))?;
                    let rows: Vec<gerbe_gw::chartab::Irrep> =
                        serde_json::from_value(value["irreps"].clone())
                            .map_err(|e| Error::InvalidInput(format!("bad irrep rows: {e}")))?;
                    gerbe_gw::chartab::CharacterTable::from_rows(&g, rows)?
                }
            };
            #[derive(Serialize)]
            struct TableOut<'a> {
                group: &'a GroupSpec,
                #[serde(flatten)]
                table: &'a gerbe_gw::chartab::CharacterTable,
            }
            sink.json(&TableOut { group: &spec, table: &table })?;
            sink.finish()?;
            Ok(0)
        }
        Command::Cocycle { action } => run_cocycle(action),
        Command::Omega { group, genus, classes, central, check_brute_force, enum_cap, out } => {
            let g = GroupSpec::parse_cli(&group)?.build()?;
            let counter = Counter::new(&g)?;
            let inst = SurfaceGroupInstance {
                genus,
                class_indices: parse_csv(&classes)?,
                central_twist: central,
            };
            let value = counter.omega(&inst)?;
            let mut sink = Sink::new(&out);
            let mut code = 0;
            if check_brute_force {
                let slow = counter.omega_brute_force(&inst, enum_cap)?;
                if slow != value {
                    sink.line(&format!(
                        "MISMATCH formula={} brute-force={}",
                        rat_to_string(&value),
                        rat_to_string(&slow)
                    ));
                    code = 1;
                } else {
                    sink.line(&rat_to_string(&value));
                }
            } else {
                sink.line(&rat_to_string(&value));
            }
            sink.finish()?;
            Ok(code)
        }
        Command::Degree { group, genus, selections, central, out } => {
            let g = GroupSpec::parse_cli(&group)?.build()?;
            let counter = Counter::new(&g)?;
            let value = counter.degree(genus, &parse_selections(&selections)?, central)?;
            let mut sink = Sink::new(&out);
            sink.line(&rat_to_string(&value));
            sink.finish()?;
            Ok(0)
        }
        Command::Psi { g, a, out } => {
            let value = psi_integral(&PsiSpec::new(g, parse_csv(&a)?))?;
            let mut sink = Sink::new(&out);
            sink.line(&rat_to_string(&value));
            sink.finish()?;
            Ok(0)
        }
        Command::Gw { group, cocycle, genus, classes, a, out } => {
            let algebra = load_algebra(&group, &cocycle)?;
            let class_indices = parse_csv(&classes)?;
            if class_indices.iter().any(|&c| c >= algebra.classes().len()) {
                return Err(Error::InvalidInput("class index out of range".into()));
            }
            let insertions = class_indices.iter().map(|&c| algebra.class_sum(c)).collect();
            let query = GwQuery { genus, insertions, exponents: parse_csv(&a)? };
            let value = gw_bg(&algebra, &query)?;
            let mut sink = Sink::new(&out);
            match value.to_rational() {
                Some(r) => sink.line(&rat_to_string(&r)),
                None => sink.json(&value)?,
            }
            sink.finish()?;
            Ok(0)
        }
        Command::Decompose { group, max_genus, max_points, sum_cap, budget, failures_only, out } => {
            let g = GroupSpec::parse_cli(&group)?.build()?;
            let opts = DecompositionOptions {
                max_genus,
                max_points,
                sum_cap,
                descendant_budget: budget.unwrap_or(usize::MAX),
                collect: if failures_only {
                    RowCollection::FailuresOnly
                } else {
                    RowCollection::All
                },
            };
            let report = verify_decomposition(&g, &opts)?;
            let mut sink = Sink::new(&out);
            for row in &report.rows {
                sink.json(row)?;
            }
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Summary {
                group_order: usize,
                center_order: usize,
                sector_count: usize,
                total_rows: usize,
                failures: usize,
            }
            sink.json(&Summary {
                group_order: report.group_order,
                center_order: report.center_order,
                sector_count: report.sector_count,
                total_rows: report.total_rows,
                failures: report.failures,
            })?;
            sink.finish()?;
            Ok(if report.failures == 0 { 0 } else { 1 })
        }
        Command::ProductCheck {
            group1,
            cocycle1,
            group2,
            cocycle2,
            max_genus,
            max_points,
            budget,
            failures_only,
            out,
        } => {
            let left = load_algebra(&group1, &cocycle1)?;
            let right = load_algebra(&group2, &cocycle2)?;
            let report = verify_product(
                &left,
                &right,
                max_genus,
                max_points,
                budget.unwrap_or(usize::MAX),
                if failures_only { RowCollection::FailuresOnly } else { RowCollection::All },
            )?;
            let mut sink = Sink::new(&out);
            for row in &report.rows {
                sink.json(row)?;
            }
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Summary {
                total_rows: usize,
                failures: usize,
            }
            sink.json(&Summary { total_rows: report.total_rows, failures: report.failures })?;
            sink.finish()?;
            Ok(if report.failures == 0 { 0 } else { 1 })
        }
        Command::Selftest { criterion, out } => {
            let results = match criterion {
                Some(id) => {
                    if !(1..=gerbe_gw::selftest::CRITERION_COUNT).contains(&id) {
                        return Err(Error::InvalidInput("criterion ids run from 1 to 9".into()));
                    }
                    vec![gerbe_gw::selftest::run_criterion(id)]
                }
                None => gerbe_gw::selftest::run_all(),
            };
            let mut sink = Sink::new(&out);
            let mut failures = 0usize;
            for r in &results {
                #[derive(Serialize)]
                struct Row<'a> {
                    criterion: usize,
                    name: &'a str,
                    passed: bool,
                    detail: &'a str,
                }
                sink.json(&Row { criterion: r.id, name: &r.name, passed: r.passed, detail: &r.detail })?;
                if !r.passed {
                    failures += 1;
                }
            }
            #[derive(Serialize)]
            struct Summary {
                criteria: usize,
                failures: usize,
            }
            sink.json(&Summary { criteria: results.len(), failures })?;
            sink.finish()?;
            Ok(if failures == 0 { 0 } else { 1 })
        }
    }
}

fn run_cocycle(action: CocycleAction) -> Result<u8> {
    match action {
        CocycleAction::Extract { group, out } => {
            let g = GroupSpec::parse_cli(&group)?.build()?;
            let (ext, nu) = extract_cocycle(&g, &g.center())?;
            let spec = CocycleSpec {
                group: GroupSpec::Table { name: None, mul: ext.quotient.table().to_vec() },
                coeff: CoeffSpec::Cyclic(nu.factors().to_vec()),
                exponents: nu.values().to_vec(),
            };
            let mut sink = Sink::new(&out);
            sink.json(&spec)?;
            sink.finish()?;
            Ok(0)
        }
        CocycleAction::Validate { cocycle, out } => {
            let report = match load_cocycle_file(&cocycle) {
                Ok(AnyCocycle::Abelian(nu)) => nu.validate(),
                Ok(AnyCocycle::U1(c)) => c.validate(),
                Err(Error::InvalidCocycle(msg)) => {
                    // Constructors reject invalid tables; surface the verdict
                    // as a failed validation rather than bad input.
                    #[derive(Serialize)]
                    #[serde(rename_all = "camelCase")]
                    struct Rejected {
                        is_cocycle: bool,
                        error: String,
                    }
                    let mut sink = Sink::new(&out);
                    sink.json(&Rejected { is_cocycle: false, error: msg })?;
                    sink.finish()?;
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Out {
                is_cocycle: bool,
                is_normalized: bool,
                violations: Vec<[usize; 3]>,
            }
            let ok = report.is_cocycle();
            let mut sink = Sink::new(&out);
            sink.json(&Out {
                is_cocycle: ok,
                is_normalized: report.is_normalized(),
                violations: report.violations.clone(),
            })?;
            sink.finish()?;
            Ok(if ok { 0 } else { 1 })
        }
        CocycleAction::Coboundary { cocycle, out } => {
            let witness = match load_cocycle_file(&cocycle)? {
                AnyCocycle::Abelian(nu) => nu.coboundary_witness(),
                AnyCocycle::U1(c) => c.coboundary_witness(),
            };
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Out {
                is_coboundary: bool,
                witness: Option<Vec<u64>>,
            }
            let mut sink = Sink::new(&out);
            sink.json(&Out { is_coboundary: witness.is_some(), witness })?;
            sink.finish()?;
            Ok(0)
        }
        CocycleAction::Push { group, lambda, out } => {
            let g = GroupSpec::parse_cli(&group)?.build()?;
            let (ext, nu) = extract_cocycle(&g, &g.center())?;
            let pushed = nu.push_by_character(&parse_csv_u64(&lambda)?)?;
            let spec = CocycleSpec {
                group: GroupSpec::Table { name: None, mul: ext.quotient.table().to_vec() },
                coeff: CoeffSpec::U1(pushed.modulus()),
                exponents: (0..pushed.base().order())
                    .map(|a| (0..pushed.base().order()).map(|b| pushed.exponent(a, b)).collect())
                    .collect(),
            };
            let mut sink = Sink::new(&out);
            sink.json(&spec)?;
            sink.finish()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code_for(&e);
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
