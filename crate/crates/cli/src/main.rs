//! `rvb`: dimer counts, RVB entanglement and hole-density sweeps from the
//! command line.
//!
//! Lattices are given as `RxC:open` or `RxC:periodic`; sites are numbered
//! row-major (`site = row * C + col`) and holes are passed as comma-separated
//! site indices. Exit codes: 0 success, 1 usage, 2 validation or cross-check
//! failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rvb_core::entanglement::{separable_maximizer_probe, ExclusionPolicy, SweepGuard, SweepOptions};
use rvb_core::lattice::{HoleConfig, Lattice, LatticeSpec};
use rvb_core::matching::{closed_form_count, count_coverings, enumerate_coverings, periodic_entropy_estimate};
use rvb_core::norm::format_matrix;
use rvb_core::{geometric_entanglement, oracle_check, sweep};

#[derive(Parser, Debug)]
#[command(name = "rvb", version, about = "Exact dimer and RVB entanglement computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count nearest-neighbour dimer coverings.
    Count {
        /// One or more lattice specs, e.g. 4x4:open.
        #[arg(required = true)]
        lattices: Vec<LatticeSpec>,
        /// Comma-separated hole sites.
        #[arg(long, value_delimiter = ',')]
        holes: Vec<usize>,
        /// Also emit the closed-form open-boundary count and the periodic estimate.
        #[arg(long)]
        reference: bool,
        /// Print every covering and its 0/1 adjacency matrix after the record.
        #[arg(long)]
        adjacency: bool,
    },
    /// Geometric entanglement of a single hole configuration.
    Entangle {
        lattice: LatticeSpec,
        #[arg(long, value_delimiter = ',')]
        holes: Vec<usize>,
        /// Include the 2^dl*4^ndl norm alongside the loop-weight norm.
        #[arg(long)]
        emit_paper_variant_norm: bool,
        /// Run the product-state probe with this many starts (12 sites max).
        #[arg(long)]
        probe: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Average entanglement against hole count.
    Sweep {
        lattice: LatticeSpec,
        /// Largest even hole count; defaults to every site.
        #[arg(long)]
        max_holes: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the curve here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "RVB_WORKERS")]
        workers: Option<usize>,
        /// Average uncoverable configurations in as zero instead of dropping them.
        #[arg(long)]
        include_pathological_as_zero: bool,
        /// Per-configuration detail in JSON output.
        #[arg(long)]
        verbose: bool,
        #[arg(long, default_value_t = SweepGuard::default().max_configs)]
        max_configs: u128,
        #[arg(long, default_value_t = SweepGuard::default().max_hole_free_coverings)]
        max_coverings: u128,
    },
    /// Compare the loop formulas against explicit state vectors.
    OracleCheck {
        lattice: LatticeSpec,
        /// Largest number of hole pairs to check.
        #[arg(long, default_value_t = 2)]
        max_pairs: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Json,
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn build(spec: &LatticeSpec) -> Result<Lattice, Failure> {
    spec.build().map_err(Failure::validation)
}

fn holes_for(lat: &Lattice, sites: &[usize]) -> Result<HoleConfig, Failure> {
    HoleConfig::from_sites(lat, sites).map_err(Failure::validation)
}

fn run(command: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Count { lattices, holes, reference, adjacency } => {
            for spec in &lattices {
                let lat = build(spec)?;
                let h = holes_for(&lat, &holes)?;
                let count = count_coverings(&lat, &h).map_err(Failure::validation)?;
                let mut record = json!({
                    "rows": lat.rows(),
                    "cols": lat.cols(),
                    "boundary": lat.boundary(),
                    "holes": h.sites(),
                    "count": count,
                });
                if reference && h.pairs() == 0 {
                    if let Some(closed) = closed_form_count(&lat) {
                        let closed = closed.map_err(Failure::validation)?;
                        if closed != count {
                            return Err(Failure::validation(format!(
                                "{spec}: enumeration gives {count}, closed form gives {closed}"
                            )));
                        }
                        record["fisher"] = json!(closed);
                    }
                    record["periodic_estimate"] = json!(periodic_entropy_estimate(lat.half_sites()));
                }
                writeln!(out, "{record}")?;
                if adjacency {
                    for (i, covering) in enumerate_coverings(&lat, &h).iter().enumerate() {
                        writeln!(out, "# covering {i}: {covering}")?;
                        write!(out, "{}", format_matrix(&covering.adjacency_matrix()))?;
                    }
                }
            }
        }
        Command::Entangle { lattice, holes, emit_paper_variant_norm, probe, seed } => {
            let lat = build(&lattice)?;
            let h = holes_for(&lat, &holes)?;
            let e = geometric_entanglement(&lat, &h).map_err(Failure::validation)?;
            let mut record = json!({
                "rows": lat.rows(),
                "cols": lat.cols(),
                "boundary": lat.boundary(),
                "holes": h.sites(),
                "coverings": e.coverings,
                "kohmoto_sum": e.kohmoto_sum,
                "entanglement": e.value,
            });
            if emit_paper_variant_norm {
                record["paper_variant"] = json!(e.paper_variant);
            }
            if let Some(restarts) = probe {
                let p = separable_maximizer_probe(&lat, &h, restarts, seed).map_err(Failure::validation)?;
                record["probe"] = json!({
                    "best_overlap": p.best_overlap,
                    "af_overlap": p.af_overlap,
                    "excess": p.excess(),
                });
            }
            writeln!(out, "{record}")?;
        }
        Command::Sweep {
            lattice,
            max_holes,
            format,
            output,
            workers,
            include_pathological_as_zero,
            verbose,
            max_configs,
            max_coverings,
        } => {
            let lat = build(&lattice)?;
            let opts = SweepOptions {
                exclusion: if include_pathological_as_zero {
                    ExclusionPolicy::IncludeAsZero
                } else {
                    ExclusionPolicy::Drop
                },
                keep_details: verbose && format == Format::Json,
                guard: SweepGuard { max_configs, max_hole_free_coverings: max_coverings },
            };
            let max_holes = max_holes.unwrap_or(lat.num_sites());
            if workers == Some(0) {
                return Err(Failure { code: 1, message: "worker count must be at least 1".into() });
            }
            // 0 lets rayon pick the machine's parallelism.
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.unwrap_or(0))
                .build()
                .map_err(Failure::validation)?;
            let curve = pool.install(|| sweep(&lat, max_holes, &opts)).map_err(Failure::validation)?;
            let text = match format {
                Format::Csv => curve.to_csv(),
                Format::Json => curve.to_json() + "\n",
            };
            match output {
                Some(path) => fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            if let Some(peak) = curve.peak() {
                eprintln!(
                    "peak {}: {} holes, density {}, average entanglement {}",
                    lattice, peak.num_holes, peak.density, peak.avg_entanglement
                );
            }
        }
        Command::OracleCheck { lattice, max_pairs, format } => {
            let lat = build(&lattice)?;
            let report = oracle_check(&lat, max_pairs).map_err(Failure::validation)?;
            match format {
                ReportFormat::Text => write!(out, "{}", report.render())?,
                ReportFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?
                }
            }
            if !report.passed() {
                return Err(Failure::validation("oracle deviation above tolerance"));
            }
        }
    }
    Ok(())
}
