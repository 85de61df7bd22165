//! `voting-power`: exact and approximate state influences for weighted councils.

mod report;

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use voting_power::council::{self, EXACT_STATE_LIMIT};
use voting_power::gaussian::certificates;
use voting_power::{asymptotic_voter_influence, MixingLaw, QuotaSpec, Union, VoteModel};

use report::{csv_rows, csv_text, fixed, fixed_opt, lossless, scientific_opt, Format, ReportRow, Table};

#[derive(Parser)]
#[command(name = "voting-power", version, about = "Voting power in two-tier councils")]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for exact enumeration (0 = one per core).
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
    /// Clip Berry-Esseen interval ends to [0, 1].
    #[arg(long, global = true)]
    clip: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact state influences, normalised shares and their ratios.
    Analyze {
        dataset: PathBuf,
        /// `zero`, `star` or a real number in (-1, 1).
        #[arg(long, default_value = "star", allow_hyphen_values = true)]
        quota: String,
    },
    /// Gaussian approximations with Berry-Esseen intervals.
    Approx {
        dataset: PathBuf,
        #[arg(long, default_value = "star", allow_hyphen_values = true)]
        quota: String,
    },
    /// Objective Q and total influence B over a grid of quotas.
    QuotaSweep {
        dataset: PathBuf,
        /// `paper` or a comma list of `zero`, `star` and reals.
        #[arg(long, default_value = "paper", allow_hyphen_values = true)]
        grid: String,
    },
    /// Influence of a single voter under a vote model.
    Influence {
        /// `fair`, `uniform-bias`, `two-atoms:A,B` or `circular`.
        #[arg(long)]
        model: String,
        /// Electorate size.
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Library(voting_power::Error),
}

impl From<voting_power::Error> for Failure {
    fn from(e: voting_power::Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Library(e) if e.is_size_limit() => 3,
            _ => 2,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Library(e) => eprintln!("error: {e}"),
            }
            if let (Failure::Library(e), Command::Analyze { .. } | Command::QuotaSweep { .. }) = (&f, &cli.command) {
                if e.is_size_limit() {
                    eprintln!("hint: the `approx` subcommand handles unions of any size");
                }
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    let text = match &cli.command {
        Command::Analyze { dataset, quota } => {
            let union = load(dataset)?;
            let q = parse_quota(&union, quota)?;
            analyze(&union, &q, cli.format)?
        }
        Command::Approx { dataset, quota } => {
            let union = load(dataset)?;
            let q = parse_quota(&union, quota)?;
            approx(&union, &q, cli.format, cli.clip)?
        }
        Command::QuotaSweep { dataset, grid } => {
            let union = load(dataset)?;
            let grid = parse_grid(&union, grid)?;
            sweep(&union, &grid, cli.format)?
        }
        Command::Influence { model, m } => influence(&parse_model(model)?, model, *m, cli.format)?,
    };
    print!("{text}");
    if let Some(path) = &cli.output {
        File::create(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn load(path: &Path) -> Outcome<Union> {
    let file = File::open(path).map_err(|e| Failure::Input(format!("cannot open {}: {e}", path.display())))?;
    Union::from_csv(file).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// A quota together with the label it is printed under.
#[derive(Debug, Clone)]
struct Labelled {
    label: String,
    quota: QuotaSpec,
}

fn quota_item(union: &Union, item: &str) -> Outcome<Labelled> {
    let item = item.trim();
    let quota = match item {
        "zero" => QuotaSpec::zero(),
        "star" => union.jagcom_quota(),
        _ => {
            let q: f64 = item.parse().map_err(|_| Failure::Input(format!("invalid quota `{item}`")))?;
            if q == 0.0 {
                QuotaSpec::zero()
            } else {
                QuotaSpec::explicit(q)
            }
        }
    };
    quota.check_for_analysis()?;
    let label = match item {
        "zero" => "0".to_string(),
        "star" => "q*".to_string(),
        _ => item.to_string(),
    };
    Ok(Labelled { label, quota })
}

fn parse_quota(union: &Union, flag: &str) -> Outcome<QuotaSpec> {
    Ok(quota_item(union, flag)?.quota)
}

fn parse_grid(union: &Union, flag: &str) -> Outcome<Vec<Labelled>> {
    if flag.trim() == "paper" {
        let star = union.jagcom_quota();
        return Ok(vec![
            Labelled { label: "0".into(), quota: QuotaSpec::zero() },
            Labelled { label: "q*/2".into(), quota: star.scaled(0.5) },
            Labelled { label: "q*".into(), quota: star },
            Labelled { label: "3q*/2".into(), quota: star.scaled(1.5) },
        ]);
    }
    if flag.trim().is_empty() {
        return Err(Failure::Input("quota grid is empty".into()));
    }
    flag.split(',').map(|item| quota_item(union, item)).collect()
}

fn parse_model(flag: &str) -> Outcome<VoteModel> {
    let model = match flag {
        "fair" => VoteModel::IndependentFair,
        "uniform-bias" => VoteModel::CollectiveBias(MixingLaw::UniformOn01),
        "circular" => VoteModel::CircularMajority,
        _ => {
            let atoms = flag
                .strip_prefix("two-atoms:")
                .and_then(|rest| rest.split_once(','))
                .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)));
            match atoms {
                Some((a, b)) => VoteModel::CollectiveBias(MixingLaw::TwoAtoms(a, b)),
                None => return Err(Failure::Input(format!("unknown model `{flag}`"))),
            }
        }
    };
    Ok(model)
}

fn quota_caption(union: &Union, q: &QuotaSpec) -> String {
    let tag = match q.source {
        voting_power::QuotaSource::Zero => "zero",
        voting_power::QuotaSource::JagcomStar => "q*",
        voting_power::QuotaSource::Explicit => "explicit",
    };
    format!("quota q = {} ({tag}), {} states", fixed(q.q), union.len())
}

#[derive(Serialize)]
struct AnalysisJson<'a> {
    quota: f64,
    rows: &'a [ReportRow],
    totals: &'a ReportRow,
    objective: f64,
}

fn analyze(union: &Union, q: &QuotaSpec, format: Format) -> Outcome<String> {
    let w = union.sqrt_weights();
    let alpha: Vec<f64> = union.states().iter().map(|s| asymptotic_voter_influence(s.population)).collect();
    let a = council::analyze(&w, q, &alpha)?;
    let rows: Vec<ReportRow> = union
        .states()
        .iter()
        .enumerate()
        .map(|(j, s)| ReportRow {
            j: Some(j + 1),
            state: s.name.clone(),
            weight: w.as_slice()[j],
            weight_normalised: a.weight_normalised[j],
            beta: Some(a.beta[j]),
            beta_normalised: Some(a.beta_normalised[j]),
            ratio: Some(a.ratios[j]),
            total_influence: Some(a.total_influence[j]),
            ..Default::default()
        })
        .collect();
    let totals = ReportRow {
        state: "total".into(),
        weight: w.total(),
        weight_normalised: voting_power::sum::compensated_sum(a.weight_normalised.iter().copied()),
        beta: Some(a.beta_total),
        beta_normalised: Some(voting_power::sum::compensated_sum(a.beta_normalised.iter().copied())),
        total_influence: Some(voting_power::sum::compensated_sum(a.total_influence.iter().copied())),
        ..Default::default()
    };
    Ok(match format {
        Format::Json => json(&AnalysisJson { quota: q.q, rows: &rows, totals: &totals, objective: a.objective })?,
        Format::Csv => csv_rows(&with_totals(rows, totals)),
        Format::Table => {
            let mut t = Table::new(["j", "state", "w", "ol_w", "beta", "ol_beta", "ratio", "I"]);
            for r in with_totals(rows, totals) {
                t.push(vec![
                    r.j.map(|j| j.to_string()).unwrap_or_default(),
                    r.state.clone(),
                    fixed(r.weight),
                    fixed(r.weight_normalised),
                    fixed_opt(r.beta),
                    fixed_opt(r.beta_normalised),
                    fixed_opt(r.ratio),
                    scientific_opt(r.total_influence),
                ]);
            }
            format!("{}\n{}objective Q = {}\n", quota_caption(union, q), t.render(), fixed(a.objective))
        }
    })
}

#[derive(Serialize)]
struct ApproxJson<'a> {
    quota: f64,
    exact: bool,
    rows: &'a [ReportRow],
}

fn approx(union: &Union, q: &QuotaSpec, format: Format, clip: bool) -> Outcome<String> {
    let w = union.sqrt_weights();
    let certs = certificates(&w, q)?;
    let exact = if union.len() <= EXACT_STATE_LIMIT {
        Some(council::state_influences(&w, q)?)
    } else {
        eprintln!(
            "notice: {} states exceed the exact limit of {EXACT_STATE_LIMIT}; exact column omitted",
            union.len()
        );
        None
    };
    let total = w.total();
    let rows: Vec<ReportRow> = certs
        .iter()
        .zip(union.states())
        .map(|(c, s)| {
            let (lo, hi) = if clip { c.clipped() } else { (c.interval_lo, c.interval_hi) };
            ReportRow {
                j: Some(c.j + 1),
                state: s.name.clone(),
                weight: w.as_slice()[c.j],
                weight_normalised: 100.0 * w.as_slice()[c.j] / total,
                beta: exact.as_ref().map(|b| b[c.j]),
                gauss_integral: Some(c.gauss_integral),
                jagcom: Some(c.jagcom_density_approx),
                be_bound: Some(c.be_bound),
                interval_lo: Some(lo),
                interval_hi: Some(hi),
                ..Default::default()
            }
        })
        .collect();
    Ok(match format {
        Format::Json => json(&ApproxJson { quota: q.q, exact: exact.is_some(), rows: &rows })?,
        Format::Csv => csv_rows(&rows),
        Format::Table => {
            let mut headers = vec!["j", "state", "w"];
            if exact.is_some() {
                headers.push("exact");
            }
            headers.extend(["gauss", "JagCom", "BE", "lower", "upper"]);
            let mut t = Table::new(headers);
            for r in &rows {
                let mut cells = vec![r.j.map(|j| j.to_string()).unwrap_or_default(), r.state.clone(), fixed(r.weight)];
                if exact.is_some() {
                    cells.push(fixed_opt(r.beta));
                }
                cells.extend(
                    [r.gauss_integral, r.jagcom, r.be_bound, r.interval_lo, r.interval_hi].map(fixed_opt),
                );
                t.push(cells);
            }
            format!("{}\n{}", quota_caption(union, q), t.render())
        }
    })
}

#[derive(Serialize)]
struct SweepRow {
    quota: String,
    q: f64,
    objective: f64,
    beta_total: f64,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    points: &'a [SweepRow],
    argmin: &'a SweepRow,
}

fn sweep(union: &Union, grid: &[Labelled], format: Format) -> Outcome<String> {
    let w = union.sqrt_weights();
    let quotas: Vec<QuotaSpec> = grid.iter().map(|g| g.quota).collect();
    let s = council::quota_sweep(&w, &quotas)?;
    let rows: Vec<SweepRow> = grid
        .iter()
        .zip(&s.points)
        .map(|(g, p)| SweepRow { quota: g.label.clone(), q: p.quota.q, objective: p.objective, beta_total: p.beta_total })
        .collect();
    let best = &rows[s.argmin];
    Ok(match format {
        Format::Json => json(&SweepJson { points: &rows, argmin: best })?,
        Format::Csv => {
            let mut out = String::from("quota,q,objective,beta_total,argmin\n");
            for (i, r) in rows.iter().enumerate() {
                out += &format!(
                    "{},{},{},{},{}\n",
                    csv_text(&r.quota),
                    lossless(r.q),
                    lossless(r.objective),
                    lossless(r.beta_total),
                    u8::from(i == s.argmin)
                );
            }
            out
        }
        Format::Table => {
            let mut t = Table::new(["quota", "q", "Q", "B"]).left_align(0);
            for r in &rows {
                t.push(vec![r.quota.clone(), fixed(r.q), fixed(r.objective), fixed(r.beta_total)]);
            }
            format!("{}argmin {} (q = {})\n", t.render(), best.quota, fixed(best.q))
        }
    })
}

#[derive(Serialize)]
struct InfluenceJson<'a> {
    model: &'a str,
    m: usize,
    route: String,
    alpha: f64,
    kappa: f64,
    eta: f64,
    mean_abs_margin: f64,
}

fn influence(model: &VoteModel, label: &str, m: usize, format: Format) -> Outcome<String> {
    let r = model.report(m)?;
    let out = InfluenceJson {
        model: label,
        m,
        route: model.route().to_string(),
        alpha: r.alpha,
        kappa: r.kappa,
        eta: r.eta,
        mean_abs_margin: r.mean_abs_margin,
    };
    Ok(match format {
        Format::Json => json(&out)?,
        Format::Csv => format!(
            "model,m,route,alpha,kappa,eta,mean_abs_margin\n{},{},{},{},{},{},{}\n",
            csv_text(out.model),
            out.m,
            csv_text(&out.route),
            lossless(out.alpha),
            lossless(out.kappa),
            lossless(out.eta),
            lossless(out.mean_abs_margin)
        ),
        Format::Table => format!(
            "model  {}\nm      {}\nroute  {}\nalpha  {:.6}\nkappa  {:.6}\neta    {:.6}\nE|S|   {:.6}\n",
            out.model, out.m, out.route, out.alpha, out.kappa, out.eta, out.mean_abs_margin
        ),
    })
}

fn with_totals(mut rows: Vec<ReportRow>, totals: ReportRow) -> Vec<ReportRow> {
    rows.push(totals);
    rows
}

fn json<T: Serialize>(value: &T) -> Outcome<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Input(format!("cannot encode output: {e}")))
}
