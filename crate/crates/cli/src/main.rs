mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nbbd_core::exact::{format_rational, int, max_abs, to_f64, Rational};
use nbbd_core::hilbert::WeightedSpace;
use nbbd_core::linalg::{
    op_norm_2, penrose_check, projection, projection_float, projection_norm_inf_exact,
    pseudoinverse, DEFAULT_POWER_ITERATIONS,
};
use nbbd_core::probes::{
    decomposition_report, dn_scan, minimax_gap_report, monotone_map_property, pn_norm_report,
    pn_norm_scan, positive_image_check, rank_scan, strong_convergence_report, LabOptions,
    ProbeReport, Verdict,
};
use nbbd_core::sequences::{build_matrix, constant_vector, Convention, ResidueSpec};
use nbbd_core::solvers::{
    chebyshev_fit, distance, lsq_unweighted, optimality_probe, MinimaxOptions, Objective,
    WeightedOptions,
};
use nbbd_core::{Error, DEFAULT_SEED, DEFAULT_TOL};
use serde_json::{json, Value};

use crate::output::{csv_table, matrix_json, rationals_json, write_output};

/// Residue-matrix experiments in exact arithmetic.
#[derive(Debug, Parser)]
#[command(name = "nbbd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build A(n, M).
    Matrix(Opts),
    /// Exact rank of A(n, L_n - 1) for n = 2..=n-max.
    Rank(Opts),
    /// Pseudoinverse of A(n, M) and the Penrose identities.
    Pinv(Opts),
    /// Orthogonal projection onto the column space and its image of c.
    Project(Opts),
    /// Operator norms of the projection, for one n or a range.
    Norms(Opts),
    /// Best uniform approximation of c (or A A⁺ c) by the columns.
    Minimax(Opts),
    /// Least-squares approximation of c with an optimality probe.
    Lsq(Opts),
    /// Weighted distance d_n² from c to the span on the full period.
    Distance(Opts),
    /// Split the weighted error into minimax, projection and tail terms.
    Decompose(Opts),
    /// One row per n: eps_star, d_n², tail, projection norms.
    Scan(Opts),
    /// Run one structural claim probe.
    Probe(Opts),
    /// Convert a scan or norms CSV into whitespace-separated columns.
    Plot(PlotOpts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// The constant sequence.
    C,
    /// Its least-squares projection A A⁺ c.
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Claim {
    Rank,
    Monotone,
    PositiveImage,
    MinimaxGap,
    ProjectionNorm,
    StrongConvergence,
    Decomposition,
}

#[derive(Debug, Args)]
struct Opts {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    n_min: u64,
    #[arg(long)]
    n_max: Option<u64>,
    /// Row count; defaults to L_n - 1.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value_t = ConventionArg::Residue)]
    convention: ConventionArg,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest row count handled in exact arithmetic.
    #[arg(long, default_value_t = 1000)]
    exact_threshold: usize,
    #[arg(long, value_enum, default_value_t = Target::C)]
    target: Target,
    #[arg(long, value_enum)]
    claim: Option<Claim>,
    /// Trials for seeded probes.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct PlotOpts {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Residue,
    Fractional,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Residue => Convention::Residue,
            ConventionArg::Fractional => Convention::Fractional,
        }
    }
}

/// Command output plus whether a probed claim failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            failed: false,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl Opts {
    fn convention(&self) -> Convention {
        self.convention.into()
    }

    fn require_n(&self) -> CliResult<u64> {
        self.n
            .ok_or_else(|| CliError::Usage("--n is required".into()))
    }

    fn spec(&self) -> CliResult<ResidueSpec> {
        let n = self.require_n()?;
        Ok(match self.m {
            Some(m) => ResidueSpec::new(n, m, self.convention())?,
            None => ResidueSpec::full_period(n, self.convention())?,
        })
    }

    /// `--n` alone, or `--n-min..=--n-max`.
    fn range(&self, default_max: Option<u64>) -> CliResult<Vec<u64>> {
        match (self.n, self.n_max.or(default_max)) {
            (Some(n), None) => Ok(vec![n]),
            (None, Some(max)) if max >= self.n_min => Ok((self.n_min..=max).collect()),
            (None, Some(max)) => Err(CliError::Usage(format!(
                "--n-max {max} is below --n-min {}",
                self.n_min
            ))),
            (Some(_), Some(_)) => Err(CliError::Usage("give either --n or --n-max".into())),
            (None, None) => Err(CliError::Usage("--n or --n-max is required".into())),
        }
    }

    fn lab(&self) -> CliResult<LabOptions> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(LabOptions {
            tol: self.tol,
            minimax: MinimaxOptions {
                exact_threshold: self.exact_threshold,
                ..MinimaxOptions::default()
            },
            weighted: WeightedOptions {
                exact_threshold: self.exact_threshold,
                ..WeightedOptions::default()
            },
            exact_norm_rows: self.exact_threshold,
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn header(&self, spec: &ResidueSpec) -> serde_json::Map<String, Value> {
        let mut map = serde_json::Map::new();
        map.insert("n".into(), json!(spec.n()));
        map.insert("M".into(), json!(spec.rows()));
        map.insert("convention".into(), json!(spec.convention().to_string()));
        map
    }
}

fn json_text(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text
}

fn report_outcome(report: ProbeReport) -> Outcome {
    Outcome {
        failed: report.verdict == Verdict::Fails,
        text: json_text(&report),
    }
}

fn cmd_matrix(o: &Opts) -> CliResult<Outcome> {
    let spec = o.spec()?;
    let a = build_matrix(&spec)?;
    Ok(Outcome::ok(match o.format_or(Format::Csv) {
        Format::Csv => a.to_text(),
        Format::Json => {
            let mut map = o.header(&spec);
            map.insert("matrix".into(), matrix_json(&a));
            json_text(&map)
        }
    }))
}

fn cmd_rank(o: &Opts) -> CliResult<Outcome> {
    let range = o.range(Some(10))?;
    let rows = rank_scan(&range)?;
    let failed = rows.iter().any(|r| !r.holds());
    let text = match o.format_or(Format::Csv) {
        Format::Csv => csv_table(
            &["n", "rank", "expected", "verdict"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.rank.to_string(),
                    r.expected.to_string(),
                    if r.holds() { "holds" } else { "fails" }.to_string(),
                ]
            }),
        ),
        Format::Json => json_text(&rows),
    };
    Ok(Outcome { text, failed })
}

fn cmd_pinv(o: &Opts) -> CliResult<Outcome> {
    let spec = o.spec()?;
    let a = build_matrix(&spec)?;
    let x = pseudoinverse(&a)?;
    let penrose = penrose_check(&a, &x)?;
    let text = match o.format_or(Format::Json) {
        Format::Csv => x.to_text(),
        Format::Json => {
            let mut map = o.header(&spec);
            map.insert("pinv".into(), matrix_json(&x));
            map.insert("penrose".into(), json!(penrose.identities));
            json_text(&map)
        }
    };
    Ok(Outcome {
        text,
        failed: !penrose.all_hold(),
    })
}

fn cmd_project(o: &Opts) -> CliResult<Outcome> {
    let spec = o.spec()?;
    let a = build_matrix(&spec)?;
    let p = projection(&a)?;
    Ok(Outcome::ok(match o.format_or(Format::Json) {
        Format::Csv => p.to_text(),
        Format::Json => {
            let pc = p.mul_vec(&constant_vector(spec.rows()))?;
            let mut map = o.header(&spec);
            map.insert("projection".into(), matrix_json(&p));
            map.insert("projected_c".into(), rationals_json(&pc));
            json_text(&map)
        }
    }))
}

fn cmd_norms(o: &Opts) -> CliResult<Outcome> {
    let columns = ["n", "M", "pn_inf_norm", "pn_inf_decimal", "pn_2_norm"];
    let rows: Vec<Vec<String>> = if o.n.is_some() && o.m.is_some() {
        let spec = o.spec()?;
        let a = build_matrix(&spec)?;
        let inf = projection_norm_inf_exact(&a)?;
        let two = op_norm_2(&projection_float(&a)?, 1e-12, DEFAULT_POWER_ITERATIONS)?;
        vec![vec![
            spec.n().to_string(),
            spec.rows().to_string(),
            format_rational(&inf),
            nbbd_core::exact::format_decimal(to_f64(&inf)),
            two.to_string(),
        ]]
    } else {
        pn_norm_scan(&o.range(None)?, &o.lab()?)?
            .into_iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.rows.to_string(),
                    r.inf_norm
                        .as_ref()
                        .map_or_else(|| r.inf_norm_float.to_string(), format_rational),
                    nbbd_core::exact::format_decimal(r.inf_norm_float),
                    r.two_norm.to_string(),
                ]
            })
            .collect()
    };
    Ok(Outcome::ok(match o.format_or(Format::Csv) {
        Format::Csv => csv_table(&columns, rows.into_iter()),
        Format::Json => {
            let records: Vec<serde_json::Map<String, Value>> = rows
                .into_iter()
                .map(|r| {
                    columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(r.into_iter().map(Value::String))
                        .collect()
                })
                .collect();
            json_text(&records)
        }
    }))
}

fn cmd_minimax(o: &Opts) -> CliResult<Outcome> {
    let spec = o.spec()?;
    let a = build_matrix(&spec)?;
    let c = constant_vector(spec.rows());
    let target: Vec<Rational> = match o.target {
        Target::C => c,
        Target::Projected => {
            let fit = lsq_unweighted(&a, &c)?;
            fit.residual.iter().map(|r| r + int(1)).collect()
        }
    };
    let fit = chebyshev_fit(&a, &target, &o.lab()?.minimax)?;
    let mut map = o.header(&spec);
    map.insert(
        "target".into(),
        json!(match o.target {
            Target::C => "c",
            Target::Projected => "projected",
        }),
    );
    map.insert("eps_star".into(), json!(format_rational(&fit.eps_star)));
    map.insert("coefficients".into(), rationals_json(&fit.coefficients));
    map.insert("active_rows".into(), json!(fit.active_rows));
    map.insert("iterations".into(), json!(fit.iterations));
    map.insert("path".into(), json!(fit.path));
    Ok(Outcome::ok(json_text(&map)))
}

fn cmd_lsq(o: &Opts) -> CliResult<Outcome> {
    let spec = o.spec()?;
    let a = build_matrix(&spec)?;
    let c = constant_vector(spec.rows());
    let fit = lsq_unweighted(&a, &c)?;
    let probe = optimality_probe(
        &Objective::Unweighted { a, target: c },
        &fit.coefficients,
        100,
        o.seed,
    )?;
    let mut map = o.header(&spec);
    map.insert("coefficients".into(), rationals_json(&fit.coefficients));
    map.insert("residual".into(), rationals_json(&fit.residual));
    map.insert(
        "residual_sup".into(),
        json!(format_rational(&max_abs(&fit.residual))),
    );
    map.insert(
        "optimality_probe".into(),
        json!({ "trials": probe.trials, "optimal": probe.optimal, "seed": o.seed }),
    );
    Ok(Outcome {
        text: json_text(&map),
        failed: !probe.optimal,
    })
}

fn cmd_distance(o: &Opts) -> CliResult<Outcome> {
    let n = o.require_n()?;
    let lab = o.lab()?;
    let space = WeightedSpace::new();
    let spec = ResidueSpec::full_period(n, o.convention())?;
    let d = distance(n, o.convention(), &space, lab.tol, &lab.weighted)?;
    let mut map = o.header(&spec);
    map.insert("coefficients".into(), rationals_json(&d.coefficients));
    map.insert(
        "d_sq".into(),
        json!({ "mid": d.d_sq.mid(), "width": d.d_sq.width(), "lo": d.d_sq.lo, "hi": d.d_sq.hi }),
    );
    map.insert("exact".into(), json!(d.exact));
    map.insert("condition_estimate".into(), json!(d.condition_estimate));
    map.insert("ill_conditioned".into(), json!(d.ill_conditioned));
    Ok(Outcome::ok(json_text(&map)))
}

fn cmd_decompose(o: &Opts) -> CliResult<Outcome> {
    let range = o.range(None)?;
    let space = WeightedSpace::new();
    Ok(report_outcome(decomposition_report(
        &range,
        &space,
        &o.lab()?,
    )?))
}

fn cmd_scan(o: &Opts) -> CliResult<Outcome> {
    let range = o.range(None)?;
    let space = WeightedSpace::new();
    let rows = dn_scan(&range, &space, &o.lab()?)?;
    Ok(Outcome::ok(match o.format_or(Format::Csv) {
        Format::Csv => csv_table(
            &[
                "n",
                "eps_star",
                "d_sq_mid",
                "d_sq_width",
                "tail_mid",
                "pn_inf_norm",
                "pn_2_norm",
            ],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    format_rational(&r.eps_star),
                    r.d_sq.mid().to_string(),
                    r.d_sq.width().to_string(),
                    r.tail.mid().to_string(),
                    r.pn_inf_norm_text(),
                    r.pn.two_norm.to_string(),
                ]
            }),
        ),
        Format::Json => json_text(&rows),
    }))
}

fn cmd_probe(o: &Opts) -> CliResult<Outcome> {
    let claim = o
        .claim
        .ok_or_else(|| CliError::Usage("--claim is required".into()))?;
    let lab = o.lab()?;
    let report = match claim {
        Claim::Rank => {
            let max = o.n_max.or(o.n).unwrap_or(10);
            nbbd_core::probes::verify_rank_claim(max)?
        }
        Claim::Monotone => monotone_map_property(o.trials, o.n_max.unwrap_or(6), o.seed)?,
        Claim::PositiveImage => {
            let spec = o.spec()?;
            let v = vec![int(1); spec.cols()];
            positive_image_check(spec.n(), spec.rows(), &v)?
        }
        Claim::MinimaxGap => minimax_gap_report(&o.range(None)?, &lab)?,
        Claim::ProjectionNorm => pn_norm_report(&o.range(None)?, &lab)?,
        Claim::StrongConvergence => strong_convergence_report(&o.range(None)?)?,
        Claim::Decomposition => decomposition_report(&o.range(None)?, &WeightedSpace::new(), &lab)?,
    };
    Ok(report_outcome(report))
}

fn run(cli: Cli) -> CliResult<(Outcome, Option<PathBuf>)> {
    let (outcome, out) = match &cli.command {
        Command::Matrix(o) => (cmd_matrix(o)?, &o.out),
        Command::Rank(o) => (cmd_rank(o)?, &o.out),
        Command::Pinv(o) => (cmd_pinv(o)?, &o.out),
        Command::Project(o) => (cmd_project(o)?, &o.out),
        Command::Norms(o) => (cmd_norms(o)?, &o.out),
        Command::Minimax(o) => (cmd_minimax(o)?, &o.out),
        Command::Lsq(o) => (cmd_lsq(o)?, &o.out),
        Command::Distance(o) => (cmd_distance(o)?, &o.out),
        Command::Decompose(o) => (cmd_decompose(o)?, &o.out),
        Command::Scan(o) => (cmd_scan(o)?, &o.out),
        Command::Probe(o) => (cmd_probe(o)?, &o.out),
        Command::Plot(p) => (Outcome::ok(output::plot_columns(&p.input)?), &p.out),
    };
    Ok((outcome, out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, out)) => {
            if let Err(e) = write_output(out.as_deref(), &outcome.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed {
                eprintln!("claim failed; see evidence in the output");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
