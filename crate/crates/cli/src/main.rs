use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use apx_core::incidence::{is_incident, Incidence, PointTuple};
use apx_core::io::{format_points, format_provenance, parse_points, parse_provenance};
use apx_core::lemmas::{run_lemma_check, Lemma};
use apx_core::monomial::FamilySpec;
use apx_core::removal::{cube_construction, grid_construction, ConstructedSet, Construction, RemovalOptions};
use apx_core::sets::{nullity, SetFamily};
use apx_core::verify::{max_general_position_subset, scan_cohyperplanar, verify_structure};
use apx_core::Error;

#[derive(Parser)]
#[command(name = "apx", version, about = "Exact constructions and checks for point sets in almost general position")]
struct Cli {
    /// Worker threads for subset scans; results do not depend on it
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Also write the one-line summary record to this file
    #[arg(long, global = true)]
    summary: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Grid,
    Cube,
}

#[derive(Subcommand)]
enum Command {
    /// Map the grid [m+2]^N into R^(m+1) by a verified incidence removal
    /// function: no m+3 image points share a hyperplane, yet every
    /// combinatorial line lands on one.
    GenGrid {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        attempts: usize,
        #[arg(long, default_value_t = 1 << 20)]
        bound: i64,
    },
    /// Map the cube {0,1}^N into R^d (2^(m+1) - 1 <= d <= 3*2^m - 3) by a
    /// verified incidence removal function: no d+2 image points share a
    /// hyperplane, yet every (m+1)-dimensional combinatorial subspace is dependent.
    GenCube {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        attempts: usize,
        #[arg(long, default_value_t = 1 << 20)]
        bound: i64,
    },
    /// Scan every k-subset for points on a common hyperplane (exact
    /// arithmetic). With --structure, also check that lines or combinatorial
    /// subspaces of the source lattice map to dependent sets with the
    /// alternating witness (reads the provenance sidecar).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        structure: Option<Structure>,
        #[arg(long)]
        m: Option<usize>,
        /// Provenance sidecar (default: <in>.prov)
        #[arg(long)]
        prov: Option<PathBuf>,
    },
    /// Largest subset in general position (no d+1 points on a hyperplane), by branch and bound.
    Alpha {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide whether the tuple in the file is incident for the family of
    /// coordinate-wise powers (degree <= m) of affine forms into R^d; print a
    /// monomial certificate when it is not.
    Incidence {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
    },
    /// Nullity of the containment matrix I(A; B). The file holds family A on
    /// the first line and B on the second, sets written as {1,2} separated by ';'.
    Nullity {
        #[arg(long)]
        families: PathBuf,
    },
    /// Run randomized or exhaustive checks of a constructive lemma: witness,
    /// witness-collinear, compression, compression-nonempty, extension,
    /// row-removal, cube-identity, line-identity, cube-sum, finite-difference,
    /// incidence-sampling, union-bound.
    LemmaCheck {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outcome of a command: the one-line summary record, any extra report lines
/// printed after it, and whether the property held.
struct Outcome {
    summary: String,
    body: String,
    holds: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Precondition(_) | Error::DimensionMismatch { .. } => 2,
        Error::AttemptsExhausted { .. } => 1,
        Error::Internal(_) => 3,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn prov_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".prov");
    PathBuf::from(s)
}

fn save(c: &ConstructedSet, out: &Path, label: String) -> Result<Outcome, Error> {
    write(out, &format_points(&c.points, std::slice::from_ref(&label)))?;
    let prov = prov_path(out);
    write(&prov, &format_provenance(&c.provenance))?;
    let summary = format!(
        "{label} points={} dim={} out={} prov={}",
        c.points.len(),
        c.spec.d,
        out.display(),
        prov.display()
    );
    Ok(Outcome {
        summary,
        body: String::new(),
        holds: true,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let workers = cli.workers.max(1);
    match &cli.command {
        Command::GenGrid {
            m,
            n,
            seed,
            out,
            attempts,
            bound,
        } => {
            let opts = RemovalOptions {
                attempts: *attempts,
                seed: *seed,
                bound: *bound,
                workers,
                ..RemovalOptions::default()
            };
            let c = grid_construction(*m, *n, &opts)?;
            save(&c, out, format!("construction=grid m={m} N={n} d={} seed={seed}", m + 1))
        }
        Command::GenCube {
            m,
            d,
            n,
            seed,
            out,
            attempts,
            bound,
        } => {
            if !apx_core::removal::cube_band_admits(*m, *d) {
                return Err(Error::Precondition(format!(
                    "d = {d} is outside 2^(m+1) - 1 <= d <= 3*2^m - 3 for m = {m}"
                )));
            }
            let n = n.ok_or_else(|| Error::Precondition("--N is required".into()))?;
            let opts = RemovalOptions {
                attempts: *attempts,
                seed: *seed,
                bound: *bound,
                workers,
                ..RemovalOptions::default()
            };
            let c = cube_construction(*m, *d, n, &opts)?;
            save(&c, out, format!("construction=cube m={m} N={n} d={d} seed={seed}"))
        }
        Command::Verify {
            input,
            k,
            structure,
            m,
            prov,
        } => {
            let points = parse_points(&read(input)?)?;
            let report = scan_cohyperplanar(&points, *k, workers)?;
            let mut body: String = report.render().lines().skip(1).map(|l| format!("{l}\n")).collect();
            let mut summary = report.summary();
            let mut holds = report.holds();
            if let Some(structure) = structure {
                let m = m.ok_or_else(|| Error::Precondition("--structure needs --m".into()))?;
                let prov = prov.clone().unwrap_or_else(|| prov_path(input));
                let source = parse_provenance(&read(&prov)?)?;
                let n = source.first().map_or(0, Vec::len);
                let d = points.first().map_or(0, |p| p.dim());
                let kind = match structure {
                    Structure::Grid => Construction::Grid { m, n },
                    Structure::Cube => Construction::Cube { m, d, n },
                };
                let s = verify_structure(&points, &source, kind)?;
                for line in s.render().lines().skip(1) {
                    body.push_str(&format!("structure_{line}\n"));
                }
                summary.push_str(&format!(" structure_{}", s.summary().replace(' ', " structure_")));
                holds &= s.holds();
            }
            Ok(Outcome { summary, body, holds })
        }
        Command::Alpha { input } => {
            let points = parse_points(&read(input)?)?;
            let (size, subset) = max_general_position_subset(&points)?;
            let idx: Vec<String> = subset.iter().map(ToString::to_string).collect();
            Ok(Outcome {
                summary: format!("alpha={size} points={} subset={}", points.len(), idx.join(",")),
                body: String::new(),
                holds: true,
            })
        }
        Command::Incidence { input, d, m } => {
            let points = parse_points(&read(input)?)?;
            let tuple = PointTuple::new(points)?;
            let spec = FamilySpec::new(tuple.dim(), *d, *m)?;
            let summary = match is_incident(&tuple, &spec)? {
                Incidence::Incident => format!("incident=true spec={spec}"),
                Incidence::NotIncident(w) => format!("incident=false spec={spec} witness={}", w.to_text()),
            };
            Ok(Outcome {
                summary,
                body: String::new(),
                holds: true,
            })
        }
        Command::Nullity { families } => {
            let text = read(families)?;
            let lines: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim_start().starts_with('#'))
                .collect();
            if lines.len() != 2 {
                return Err(Error::Parse {
                    line: lines.get(2).map_or(text.lines().count().max(1), |l| l.0 + 1),
                    message: format!("expected two family lines, found {}", lines.len()),
                });
            }
            let parse = |(i, l): (usize, &str)| {
                l.parse::<SetFamily>().map_err(|e| match e {
                    Error::Parse { message, .. } => Error::Parse { line: i + 1, message },
                    other => other,
                })
            };
            let a = parse(lines[0])?;
            let b = parse(lines[1])?;
            Ok(Outcome {
                summary: format!("nullity={} rows={} cols={}", nullity(&a, &b), b.len(), a.len()),
                body: String::new(),
                holds: true,
            })
        }
        Command::LemmaCheck { name, trials, seed } => {
            let lemma: Lemma = name.parse()?;
            let report = run_lemma_check(lemma, *trials, *seed)?;
            let body = report
                .first_failure
                .as_ref()
                .map(|f| format!("first_failure {f}\n"))
                .unwrap_or_default();
            Ok(Outcome {
                summary: format!("{} seed={seed}", report.summary()),
                body,
                holds: report.passed(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            print!("{}", outcome.body);
            eprintln!("elapsed_ms={}", start.elapsed().as_millis());
            if let Some(path) = &cli.summary {
                if let Err(e) = write(path, &format!("{}\n", outcome.summary)) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            if outcome.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::AttemptsExhausted { subset, .. } = &e {
                let idx: Vec<String> = subset.iter().map(ToString::to_string).collect();
                eprintln!("first_violating_subset={}", idx.join(","));
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
