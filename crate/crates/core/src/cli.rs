//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::droplet::droplet_of;
use crate::equilibrium::Equilibrium;
use crate::error::Error;
use crate::format::g17;
use crate::norms::{log_norm, NormMethod, NormQuery};
use crate::oracles::{closed_form_log_z, OracleModel};
use crate::partition::{
    convergence_study_with, expansion_terms_with, lemma_sum, log_z_exact_with, Convention,
    ConvergenceTable, LemmaSum, PartitionOptions,
};
use crate::potential::{Ensemble, RadialPotential};
use crate::quadrature::Quadrature;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "radial-coulomb",
    version,
    about = "Log-partition functions of radially symmetric 2D Coulomb gases at β = 2"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Relative tolerance for every adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = positive_f64)]
    pub quad_rel_tol: f64,
    /// Worker threads (default: all available).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialKind {
    Ginibre,
    Ml,
    Tu,
}

#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    #[arg(long, value_parser = positive_f64)]
    pub scale: Option<f64>,
    #[arg(long, value_parser = positive_f64)]
    pub lambda: Option<f64>,
    #[arg(long, value_parser = nonnegative_f64)]
    pub c: Option<f64>,
    #[arg(long, value_parser = positive_f64)]
    pub alpha: Option<f64>,
    #[arg(long = "R", value_parser = positive_f64)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Ml,
    Tu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactSource {
    Quadrature,
    Oracle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Droplet radii and disc/annulus classification.
    Droplet {
        #[command(flatten)]
        pot: PotentialArgs,
    },
    /// Energy, entropy, logarithmic potential at 0 and F_Q.
    Equilibrium {
        #[command(flatten)]
        pot: PotentialArgs,
    },
    /// Zabrodin–Wiegmann coefficients and their identification residuals.
    Zw {
        #[command(flatten)]
        pot: PotentialArgs,
    },
    /// A single orthogonal norm log h_j.
    Norm {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long, value_enum, default_value_t = NormMethod::Exact)]
        method: NormMethod,
    },
    /// log Z_N from the norms.
    Exact {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long, value_enum, default_value_t = Convention::Physics)]
        convention: Convention,
    },
    /// The large-N expansion of log Z_N.
    Expand {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long, value_enum, default_value_t = Convention::Physics)]
        convention: Convention,
        /// Also print the five coefficients.
        #[arg(long)]
        terms: bool,
    },
    /// Closed-form log Z_N for the Mittag-Leffler and truncated-unitary models.
    Oracle {
        #[arg(long, value_enum)]
        model: OracleKind,
        #[arg(long, value_parser = positive_f64)]
        lambda: Option<f64>,
        #[arg(long, value_parser = nonnegative_f64)]
        c: Option<f64>,
        #[arg(long, value_parser = positive_f64)]
        alpha: Option<f64>,
        #[arg(long = "R", value_parser = positive_f64)]
        radius: Option<f64>,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        /// Also compute log Z_N by quadrature and report the difference.
        #[arg(long)]
        compare: bool,
    },
    /// Partial sums over the degree grid against their predicted asymptotics.
    Lemmas {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Which sum; all six when omitted.
        #[arg(long, value_enum)]
        which: Option<LemmaSum>,
    },
    /// Exact vs asymptotic log Z_N over several N, with a fitted error exponent.
    Converge {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long, value_enum, default_value_t = Convention::Physics)]
        convention: Convention,
        /// CSV destination; the table goes to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// How the exact values are obtained.
        #[arg(long, value_enum, default_value_t = ExactSource::Quadrature)]
        source: ExactSource,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(v) => Err(format!("must be nonnegative and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Lib(e) => match e {
                Error::Domain(_) | Error::UnsupportedOrder(_) | Error::InvalidPotential(_) => {
                    EXIT_DOMAIN
                }
                Error::Solver(_) | Error::Integration(_) => EXIT_NUMERICAL,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn missing(flag: &str, potential: &str) -> Failure {
    Failure::Usage(format!("--{flag} is required for --potential {potential}"))
}

impl PotentialArgs {
    fn build(&self) -> Result<RadialPotential, Failure> {
        let stray = |flags: &[(&str, bool)]| -> Result<(), Failure> {
            match flags.iter().find(|(_, set)| *set) {
                Some((name, _)) => Err(Failure::Usage(format!(
                    "--{name} does not apply to --potential {}",
                    self.potential
                        .to_possible_value()
                        .expect("named")
                        .get_name()
                ))),
                None => Ok(()),
            }
        };
        Ok(match self.potential {
            PotentialKind::Ginibre => {
                stray(&[
                    ("lambda", self.lambda.is_some()),
                    ("c", self.c.is_some()),
                    ("alpha", self.alpha.is_some()),
                    ("R", self.radius.is_some()),
                ])?;
                RadialPotential::ginibre(self.scale.unwrap_or(1.0))?
            }
            PotentialKind::Ml => {
                stray(&[
                    ("scale", self.scale.is_some()),
                    ("alpha", self.alpha.is_some()),
                    ("R", self.radius.is_some()),
                ])?;
                RadialPotential::mittag_leffler(
                    self.lambda.ok_or_else(|| missing("lambda", "ml"))?,
                    self.c.ok_or_else(|| missing("c", "ml"))?,
                )?
            }
            PotentialKind::Tu => {
                stray(&[
                    ("scale", self.scale.is_some()),
                    ("lambda", self.lambda.is_some()),
                    ("c", self.c.is_some()),
                ])?;
                RadialPotential::truncated_unitary(
                    self.alpha.ok_or_else(|| missing("alpha", "tu"))?,
                    self.radius.ok_or_else(|| missing("R", "tu"))?,
                )?
            }
        })
    }
}

#[derive(Debug, Clone)]
enum Value {
    Num(f64),
    Int(u64),
    Str(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Num(x) => g17(*x),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => s.clone(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Num(x) => shortest(*x),
            other => other.text(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Num(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Str(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

/// Shortest decimal that round-trips.
fn shortest(x: f64) -> String {
    format!("{x}")
}

type Record = Vec<(&'static str, Value)>;

fn render_records(records: &[Record], format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            for rec in records {
                let line: Vec<String> = rec
                    .iter()
                    .map(|(k, v)| format!("{k}={}", v.text()))
                    .collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        OutputFormat::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<&str> = first.iter().map(|(k, _)| *k).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            for rec in records {
                let row: Vec<String> = rec.iter().map(|(_, v)| v.csv()).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        OutputFormat::Json => {
            let objs: Vec<serde_json::Value> = records.iter().map(record_json).collect();
            let doc = if objs.len() == 1 {
                objs.into_iter().next().expect("one record")
            } else {
                serde_json::Value::Array(objs)
            };
            let _ = writeln!(out, "{doc}");
        }
    }
    out
}

fn record_json(rec: &Record) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (k, v) in rec {
        map.insert((*k).to_string(), v.json());
    }
    serde_json::Value::Object(map)
}

fn ensemble_name(e: Ensemble) -> &'static str {
    match e {
        Ensemble::Normal => "normal",
        Ensemble::Symplectic => "symplectic",
    }
}

fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::Physics => "physics",
        Convention::Canonical => "canonical",
    }
}

fn table_csv(table: &ConvergenceTable) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "log_z_exact", "log_z_asymptotic", "residual"])?;
    for r in &table.rows {
        w.write_record([
            r.n.to_string(),
            shortest(r.exact),
            shortest(r.asymptotic),
            shortest(r.residual),
        ])?;
    }
    let mut bytes = w
        .into_inner()
        .map_err(|e| io::Error::other(e.to_string()))?;
    writeln!(
        bytes,
        "# fitted_exponent={} r2={}",
        shortest(table.fitted_exponent),
        shortest(table.fit_r2)
    )?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let quad = Quadrature::with_rel_tol(cli.quad_rel_tol);
    let default_tol = cli.quad_rel_tol == Quadrature::default().rel_tol;
    // The per-norm tolerance is chosen from N unless the flag was changed.
    let opts = if default_tol {
        PartitionOptions::default()
    } else {
        PartitionOptions::with_rel_tol(cli.quad_rel_tol)
    };
    let fmt = cli.format;
    let records: Vec<Record> = match &cli.command {
        Command::Droplet { pot } => {
            let d = droplet_of(&pot.build()?)?;
            vec![vec![
                ("r0", d.r0.into()),
                ("r1", d.r1.into()),
                ("kind", d.kind.to_string().as_str().into()),
            ]]
        }
        Command::Equilibrium { pot } => {
            let p = pot.build()?;
            let rep = Equilibrium::with_quadrature(&p, quad)?.report()?;
            vec![vec![
                ("energy", rep.energy.into()),
                ("entropy", rep.entropy.into()),
                ("log_potential_origin", rep.log_potential_origin.into()),
                ("f_term", rep.f_term.into()),
                ("mass", rep.mass.into()),
                ("r0", rep.droplet.r0.into()),
                ("r1", rep.droplet.r1.into()),
                ("kind", rep.droplet.kind.to_string().as_str().into()),
            ]]
        }
        Command::Zw { pot } => {
            let p = pot.build()?;
            let eq = Equilibrium::with_quadrature(&p, quad)?;
            let z = eq.zw_coefficients()?;
            vec![vec![
                ("f0", z.f0.into()),
                ("f_half", z.f_half.into()),
                ("f1", z.f1.into()),
                ("residual_f0", (z.f0 + eq.energy()?).into()),
                ("residual_f_half", (z.f_half + 0.5 * eq.entropy()?).into()),
                ("residual_f1", (z.f1 - eq.f_disc()?).into()),
            ]]
        }
        Command::Norm {
            pot,
            n,
            j,
            ensemble,
            method,
        } => {
            let p = pot.build()?;
            let nq = NormQuery::new(*n as usize, *j as usize, *ensemble)?;
            let v = match (method, opts.norm_quadrature) {
                (NormMethod::Exact, Some(q)) => crate::norms::log_norm_exact_with(&p, nq, &q)?,
                _ => log_norm(&p, nq, *method)?,
            };
            vec![vec![("log_norm", v.into())]]
        }
        Command::Exact {
            pot,
            n,
            ensemble,
            convention,
        } => {
            let p = pot.build()?;
            let v = log_z_exact_with(&p, *n as usize, *ensemble, *convention, &opts)?;
            vec![vec![
                ("N", (*n).into()),
                ("ensemble", ensemble_name(*ensemble).into()),
                ("convention", convention_name(*convention).into()),
                ("log_z", v.into()),
            ]]
        }
        Command::Expand {
            pot,
            n,
            ensemble,
            convention,
            terms,
        } => {
            let p = pot.build()?;
            let t = expansion_terms_with(&p, *ensemble, *convention, &quad)?;
            let mut rec: Record = vec![
                ("N", (*n).into()),
                ("ensemble", ensemble_name(*ensemble).into()),
                ("convention", convention_name(*convention).into()),
                ("log_z_asymptotic", t.evaluate(*n as usize).into()),
            ];
            if *terms {
                rec.extend([
                    ("c_n2", t.c_n2.into()),
                    ("c_nlogn", t.c_nlogn.into()),
                    ("c_n", t.c_n.into()),
                    ("c_logn", t.c_logn.into()),
                    ("c_1", t.c_1.into()),
                ]);
            }
            vec![rec]
        }
        Command::Oracle {
            model,
            lambda,
            c,
            alpha,
            radius,
            n,
            ensemble,
            compare,
        } => {
            let m = match model {
                OracleKind::Ml => OracleModel::MittagLeffler {
                    lambda: lambda.ok_or_else(|| {
                        Failure::Usage("--lambda is required for --model ml".into())
                    })?,
                    c: c.ok_or_else(|| Failure::Usage("--c is required for --model ml".into()))?,
                },
                OracleKind::Tu => OracleModel::TruncatedUnitary {
                    alpha: alpha.ok_or_else(|| {
                        Failure::Usage("--alpha is required for --model tu".into())
                    })?,
                    radius: radius
                        .ok_or_else(|| Failure::Usage("--R is required for --model tu".into()))?,
                },
            };
            let n = *n as usize;
            let closed = m.log_z(n, *ensemble)?;
            let mut rec: Record = vec![
                ("N", (n as u64).into()),
                ("ensemble", ensemble_name(*ensemble).into()),
                ("log_z_closed_form", closed.into()),
            ];
            if *compare {
                let p = m.potential()?;
                let q = log_z_exact_with(&p, n, *ensemble, Convention::Physics, &opts)?;
                rec.push(("log_z_quadrature", q.into()));
                rec.push(("difference", (q - closed).into()));
            }
            vec![rec]
        }
        Command::Lemmas { pot, n, which } => {
            let p = pot.build()?;
            let list: Vec<LemmaSum> = match which {
                Some(w) => vec![*w],
                None => LemmaSum::ALL.to_vec(),
            };
            let mut out = Vec::new();
            for w in list {
                let v = lemma_sum(&p, *n as usize, w)?;
                out.push(vec![
                    ("which", w.name().into()),
                    ("direct", v.direct.into()),
                    ("predicted", v.predicted.into()),
                    ("gap", v.gap().into()),
                ]);
            }
            out
        }
        Command::Converge {
            pot,
            ns,
            ensemble,
            convention,
            out,
            source,
        } => {
            let p = pot.build()?;
            let table = match source {
                ExactSource::Quadrature => {
                    convergence_study_with(&p, ns, *ensemble, *convention, &opts, |n| {
                        log_z_exact_with(&p, n, *ensemble, *convention, &opts)
                    })?
                }
                ExactSource::Oracle => {
                    convergence_study_with(&p, ns, *ensemble, *convention, &opts, |n| {
                        let v = closed_form_log_z(&p, n, *ensemble)?;
                        Ok(match convention {
                            Convention::Physics => v,
                            Convention::Canonical => v - crate::special_fn::ln_factorial(n as u64),
                        })
                    })?
                }
            };
            let csv_text = table_csv(&table)?;
            if let Some(path) = out {
                File::create(path)?.write_all(csv_text.as_bytes())?;
            }
            match (fmt, out) {
                (OutputFormat::Json, _) => {
                    return Ok(format!(
                        "{}\n",
                        serde_json::to_string(&table).expect("serializable")
                    ));
                }
                (_, None) => return Ok(csv_text),
                (OutputFormat::Csv, Some(_)) => return Ok(csv_text),
                (OutputFormat::Text, Some(_)) => {
                    let mut recs: Vec<Record> = table
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                ("N", (r.n as u64).into()),
                                ("log_z_exact", r.exact.into()),
                                ("log_z_asymptotic", r.asymptotic.into()),
                                ("residual", r.residual.into()),
                            ]
                        })
                        .collect();
                    recs.push(vec![
                        ("fitted_exponent", table.fitted_exponent.into()),
                        ("r2", table.fit_r2.into()),
                    ]);
                    recs
                }
            }
        }
    };
    Ok(render_records(&records, fmt))
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Output goes to stdout, diagnostics to stderr.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build()
        {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Io(io::Error::other(e))),
        },
        None => run(&cli),
    };
    match result {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return EXIT_IO;
            }
            EXIT_OK
        }
        Err(f) => {
            eprintln!("radial-coulomb: {f}");
            f.exit_code()
        }
    }
}
