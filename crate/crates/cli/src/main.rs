//! Command-line front end: per-field reports, range scans, pairing tables
//! and reciprocity fuzzing.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! usage errors, 3 when inconclusive verdicts are present (and nothing
//! failed).

use clap::{Args, Parser, Subcommand, ValueEnum};
use selmer::error::Error;
use selmer::field::QuadField;
use selmer::symbols::{pairing_matrix, reciprocity_check, PairingKind, ReciprocityOutcome};
use selmer::verify::{csv_header, csv_row, scan, verify_field, Config, FieldReport};

const EXIT_PASS: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser)]
#[command(name = "selmer", version, about = "2-Selmer groups of quadratic fields: invariants, pairings and theorem scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit JSON instead of text.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV instead of text.
    #[arg(long, global = true)]
    csv: bool,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Text
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    /// Prime norm bound for pairing streams (default 200 * |Delta|).
    #[arg(long)]
    bound: Option<u64>,
    /// Norm bound for membership witness searches.
    #[arg(long, default_value_t = 4000)]
    membership_bound: u64,
    /// Norm bound for the supplementary-law prime stream.
    #[arg(long, default_value_t = 500)]
    supplementary_bound: u64,
    /// Accepted reciprocity pairs per field.
    #[arg(long, default_value_t = 64)]
    trials: u32,
    /// Coefficient height for reciprocity samples.
    #[arg(long, default_value_t = 50)]
    height: i64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker count for scans.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BoundArgs {
    fn config(&self) -> Config {
        Config {
            prime_norm_bound: self.bound.map(|b| b.max(1)),
            membership_search_bound: self.membership_bound.max(1),
            supplementary_norm_bound: self.supplementary_bound.max(1),
            fuzz_trials: self.trials,
            fuzz_height: self.height.max(1),
            seed: self.seed,
            parallelism: self.jobs.max(1),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report for a single field.
    Report {
        /// Squarefree d of the field Q(sqrt(d)).
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify all theorems for one field; exit 0 iff everything passes.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify every squarefree d in a range.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        min: i64,
        #[arg(long, allow_hyphen_values = true)]
        max: i64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Symbol matrix of one of the four residue pairings.
    Pairing {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, value_enum)]
        kind: PairingArg,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized quadratic-reciprocity checks on one field.
    FuzzReciprocity {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 500)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        height: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Ep1,
    Ep2,
    Ep3,
    Ep4,
}

impl From<PairingArg> for PairingKind {
    fn from(value: PairingArg) -> Self {
        match value {
            PairingArg::Ep1 => PairingKind::EP1,
            PairingArg::Ep2 => PairingKind::EP2,
            PairingArg::Ep3 => PairingKind::EP3,
            PairingArg::Ep4 => PairingKind::EP4,
        }
    }
}

fn exit_code_of(error: &Error) -> i32 {
    match error {
        Error::Domain(_) => EXIT_USAGE,
        Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        Error::TheoremViolation(_) => EXIT_FAIL,
    }
}

fn report_exit(report: &FieldReport) -> i32 {
    if report.any_fail() {
        EXIT_FAIL
    } else if report.any_inconclusive() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    }
}

fn print_report_text(report: &FieldReport) {
    println!(
        "F = Q(sqrt({}))   Delta = {}   (r, s) = ({}, {})",
        report.d, report.delta, report.r, report.s
    );
    println!(
        "h = {}   h+ = {}   u = {}   rho = {}   rho+ = {}",
        report.h, report.h_plus, report.u, report.rho, report.rho_plus
    );
    println!(
        "Cl divisors: {:?}   Cl+ divisors: {:?}",
        report.cl_divisors, report.cl_plus_divisors
    );
    println!();
    println!("           A | Sel    Sel+   Sel4   Sel4+");
    println!(
        "       dim A | {:<6} {:<6} {:<6} {:<6}",
        report.dim_sel, report.dim_sel_plus, report.dim_sel4, report.dim_sel4_plus
    );
    println!("           A | Cl     Cl+    Cl{{4}}  Cl+{{4}}");
    println!(
        "   dim A/A^2 | {:<6} {:<6} {:<6} {:<6}",
        report.rho, report.rho_plus, report.rho4, report.rho4_plus
    );
    println!();
    println!(
        "unit subgroup dims: E+/E^2 = {}, E4/E^2 = {}, E4+/E^2 = {}, Clp rank = {}",
        report.dim_e_plus, report.dim_e4, report.dim_e4_plus, report.clp_rank
    );
    println!("lagarias conditions: {:?}", report.lagarias);
    println!("selmer basis:");
    for entry in &report.selmer_basis {
        println!("  {}   conductor {}", entry.element, entry.conductor);
    }
    println!("checks:");
    for (name, verdict) in &report.checks {
        println!("  {name:<22} {verdict:?}");
    }
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Report { d, bounds, output } => {
            let report = verify_field(d, &bounds.config())?;
            match output.format() {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Csv => {
                    println!("{}", csv_header());
                    println!("{}", csv_row(&report));
                }
                Format::Text => print_report_text(&report),
            }
            Ok(report_exit(&report))
        }
        Command::Verify { d, bounds, output } => {
            let report = verify_field(d, &bounds.config())?;
            match output.format() {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.checks).unwrap()),
                _ => {
                    for (name, verdict) in &report.checks {
                        println!("{name:<22} {verdict:?}");
                    }
                }
            }
            Ok(report_exit(&report))
        }
        Command::Scan {
            min,
            max,
            bounds,
            output,
        } => {
            let summary = scan(min, max, &bounds.config())?;
            match output.format() {
                // one object per field, as an array ordered by d
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary.fields).unwrap()),
                Format::Csv => {
                    println!("{}", csv_header());
                    for field in &summary.fields {
                        println!("{}", csv_row(field));
                    }
                }
                Format::Text => {
                    for field in &summary.fields {
                        let status = if field.all_pass() {
                            "pass"
                        } else if field.any_fail() {
                            "FAIL"
                        } else {
                            "inconclusive"
                        };
                        println!(
                            "d = {:<6} dims ({}, {}, {}, {})  h = {:<4} h+ = {:<4} {status}",
                            field.d,
                            field.dim_sel,
                            field.dim_sel_plus,
                            field.dim_sel4,
                            field.dim_sel4_plus,
                            field.h,
                            field.h_plus
                        );
                    }
                    println!();
                    println!("{} fields scanned", summary.field_count);
                    for (name, counts) in &summary.counts {
                        println!(
                            "  {name:<22} pass {:<5} fail {:<5} inconclusive {}",
                            counts.pass, counts.fail, counts.inconclusive
                        );
                    }
                }
            }
            if summary.fields.iter().any(FieldReport::any_fail) {
                Ok(EXIT_FAIL)
            } else if summary.any_inconclusive {
                Ok(EXIT_INCONCLUSIVE)
            } else {
                Ok(EXIT_PASS)
            }
        }
        Command::Pairing {
            d,
            kind,
            bounds,
            output,
        } => {
            let field = QuadField::new(d)?;
            let report = pairing_matrix(&field, kind.into(), bounds.bound)?;
            match output.format() {
                Format::Json => {
                    let summary = serde_json::json!({
                        "d": d,
                        "kind": report.kind,
                        "expected_rank": report.expected_rank,
                        "achieved_rank": report.achieved_rank,
                        "verdict": report.verdict,
                        "selmer_basis": report.selmer_basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                        "row_ideals": report.row_ideals.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                        "matrix": (0..report.row_ideals.len()).map(|i| {
                            (0..report.matrix.cols()).map(|j| if report.matrix.get(i, j) { -1 } else { 1 }).collect::<Vec<i32>>()
                        }).collect::<Vec<_>>(),
                    });
                    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
                }
                _ => {
                    println!(
                        "{:?} pairing over Q(sqrt({d})): rank {}/{} -> {:?}",
                        report.kind, report.achieved_rank, report.expected_rank, report.verdict
                    );
                    println!("selmer side:");
                    for b in &report.selmer_basis {
                        println!("  {b}");
                    }
                    for (i, prime) in report.row_ideals.iter().enumerate() {
                        let row: Vec<&str> = (0..report.matrix.cols())
                            .map(|j| if report.matrix.get(i, j) { "-1" } else { "+1" })
                            .collect();
                        println!("  {prime:<16} [{}]", row.join(", "));
                    }
                }
            }
            use selmer::symbols::PairingVerdict;
            Ok(match report.verdict {
                PairingVerdict::Perfect => EXIT_PASS,
                PairingVerdict::RankDeficit => EXIT_FAIL,
                PairingVerdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Command::FuzzReciprocity {
            d,
            trials,
            seed,
            height,
            output,
        } => {
            let field = QuadField::new(d)?;
            let cfg = Config {
                fuzz_trials: trials,
                fuzz_height: height,
                seed,
                ..Config::default()
            };
            let mut rng = selmer::verify::reciprocity_rng(&cfg, d);
            let mut accepted = 0u32;
            let mut failed = 0u32;
            let mut attempts = 0u64;
            let max_attempts = trials as u64 * 20_000;
            while accepted < trials && attempts < max_attempts {
                attempts += 1;
                let (alpha, beta) = selmer::verify::sample_pair(&mut rng, height);
                match reciprocity_check(&field, &alpha, &beta)? {
                    ReciprocityOutcome::Pass => accepted += 1,
                    ReciprocityOutcome::Fail => {
                        accepted += 1;
                        failed += 1;
                    }
                    ReciprocityOutcome::Skipped => {}
                }
            }
            match output.format() {
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::json!({
                            "d": d, "seed": seed, "trials": trials,
                            "accepted": accepted, "failed": failed, "attempts": attempts,
                        })
                    );
                }
                _ => println!(
                    "d = {d}: {accepted}/{trials} hypothesis-satisfying pairs checked, {failed} mismatches ({attempts} samples)"
                ),
            }
            Ok(if failed > 0 {
                EXIT_FAIL
            } else if accepted < trials {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_PASS
            })
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_of(&e));
        }
    }
}
