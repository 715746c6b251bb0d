//! `rank2-spectra`: build fusion graphs, S-matrices, measures and weights, and run
//! the acceptance suites.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use rank2_spectra::fusion::{a_graph, Group};
use rank2_spectra::measures::{measure_for, measure_to_json, pushforward, pushforward_csv, Measure, DEFAULT_GRID};
use rank2_spectra::modular::{smatrix, Model};
use rank2_spectra::torus::Generator;
use rank2_spectra::verify::{moment_table, resolve_tolerance, verify, Status, Suite, VerifyConfig};
use rank2_spectra::weights1d::{weight, Family};
use rank2_spectra::weyl::Pair;

#[derive(Parser)]
#[command(name = "rank2-spectra", version, about = "Spectral measures of Sp(2) and SO(5) fusion graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Export the level-k fusion graph of one generator.
    Graph {
        #[arg(long, default_value = "Sp2")]
        group: Group,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        generator: Generator,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moments by every oracle: multinomial, walk DP, constant term, measures.
    Moments {
        /// Generator pair (`xy` or `yz`); omit to use `--generator` alone.
        #[arg(long, conflicts_with = "generator")]
        pair: Option<Pair>,
        #[arg(long)]
        generator: Option<Generator>,
        #[arg(long, default_value_t = 6)]
        max_order: u32,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The level-k S-matrix.
    Smatrix {
        #[arg(long)]
        level: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A model's joint spectral measure, or its pushforward under one character.
    Measure {
        /// e.g. `A_Sp2(3)`, `A_SO5(4)`, `D(5)`, `E7`, `A_infty`.
        #[arg(long)]
        model: Model,
        /// Defaults to the model's natural pair.
        #[arg(long)]
        pair: Option<Pair>,
        /// Push forward under this character (CSV of value, weight).
        #[arg(long)]
        generator: Option<Generator>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled one-dimensional weight as CSV.
    Weights {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        generator: Generator,
        #[arg(long, default_value_t = 801)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an acceptance suite; exits nonzero if any check fails.
    Verify {
        #[arg(default_value = "all")]
        suite: Suite,
        /// Overrides every stated tolerance (else RANK2_SPECTRA_TOL, else defaults).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Graph {
            group,
            level,
            generator,
            out,
        } => {
            let g = a_graph(group, level, generator)?;
            emit(&out, &g.to_json()?)?;
        }
        Command::Moments {
            pair,
            generator,
            max_order,
            grid,
            format,
            out,
        } => {
            let (u1, u2) = match (pair, generator) {
                (Some(p), _) => {
                    let (a, b) = p.generators();
                    (a, Some(b))
                }
                (None, Some(u)) => (u, None),
                (None, None) => bail!("give --pair or --generator"),
            };
            let rows = moment_table(u1, u2, max_order, grid)?;
            match format {
                Format::Json => emit(&out, &serde_json::to_string_pretty(&rows)?)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(sink(&out)?);
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                }
            }
            if rows.iter().any(|r| !r.agree) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Smatrix { level, format, out } => {
            let s = smatrix(level);
            match format {
                Format::Json => emit(&out, &s.to_json()?)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(sink(&out)?);
                    let labels: Vec<String> = s.weights.iter().map(|w| format!("({} {})", w.l1, w.l2)).collect();
                    let mut header = vec!["label".to_string()];
                    header.extend(labels.iter().cloned());
                    w.write_record(&header)?;
                    for (i, label) in labels.iter().enumerate() {
                        let mut rec = vec![label.clone()];
                        rec.extend(s.row(i).iter().map(|v| format!("{v:.17e}")));
                        w.write_record(&rec)?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Measure {
            model,
            pair,
            generator,
            grid,
            format,
            out,
        } => {
            let pair = pair.unwrap_or(model.pair());
            let mut mu = measure_for(model, pair)?;
            if let Measure::Density(d) = mu {
                mu = Measure::Density(d.with_grid(grid));
            }
            match (generator, format) {
                (Some(u), _) => pushforward_csv(&pushforward(&mu, u, grid), u, sink(&out)?)?,
                (None, Format::Json) => emit(&out, &measure_to_json(model, pair, &mu)?)?,
                (None, Format::Csv) => {
                    let Some(atoms) = mu.as_atomic() else {
                        bail!("{model} has a density; use --format json or --generator");
                    };
                    let mut w = csv::Writer::from_writer(sink(&out)?);
                    w.write_record(["p1", "q1", "p2", "q2", "weight"])?;
                    for a in atoms.atoms() {
                        let [[p1, q1], [p2, q2]] = a.point.as_pairs();
                        w.write_record([p1, q1, p2, q2].map(|v| v.to_string()).iter().chain([&format!("{:.17e}", a.weight)]))?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Weights {
            family,
            generator,
            samples,
            out,
        } => {
            weight(family, generator).write_csv(samples, sink(&out)?)?;
        }
        Command::Verify {
            suite,
            tol,
            grid,
            format,
            out,
        } => {
            let cfg = VerifyConfig {
                tol: resolve_tolerance(tol)?,
                grid,
            };
            let report = verify(suite, &cfg);
            match format {
                Format::Json => emit(&out, &report.to_json()?)?,
                Format::Csv => report.write_csv(sink(&out)?)?,
            }
            eprintln!(
                "{suite}: {} pass, {} fail, {} discrepancy-documented",
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::DiscrepancyDocumented)
            );
            if report.any_fail() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        // a closed downstream pipe (`| head`) is not an error
        Err(e) if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
