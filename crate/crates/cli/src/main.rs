mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qhj_core::action::classify_residuals;
use qhj_core::eigensolver::{eigenstate_with, EigenConfig, EigenState, DEFAULT_POINTS};
use qhj_core::formulas::{corrected_energy_closed, exact_energy, residual_closed, wkb_energy_closed};
use qhj_core::potentials::parse_params;
use qhj_core::qhje::{qhj_fields_with, reconstruct_wavefunction, DEFAULT_PANELS};
use qhj_core::tables::{hydrogen_table, quartic_table};
use qhj_core::{Family, PotentialModel, ResidualReport};

use output::{Cell, Format, Table};

#[derive(Parser)]
#[command(name = "qhj", version, about = "Bound-state energies, quantum Hamilton-Jacobi fields and WKB residuals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numerov, WKB and exact energies per level
    Eigen {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        levels: LevelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Classical action and residual R per level
    Residual {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// also solve the phase-amplitude fields and report the quantum integral
        #[arg(long)]
        with_fields: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Published residual tables beside recomputed values
    Table {
        which: TableName,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Field dump for one level, one row per grid node
    Fields {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        levels: LevelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Energies from the WKB formula shifted by R
    Correct {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        levels: LevelArgs,
        /// `auto`, a number applied to every level, or a CSV file with columns n,R
        #[arg(long)]
        r: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableName {
    Table1,
    Table2,
}

#[derive(Args)]
struct ModelArgs {
    /// harmonic, morse, hydrogen, cot2 or quartic
    #[arg(long)]
    family: String,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "V0", alias = "v0")]
    v0: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    e2: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long, alias = "m")]
    mass: Option<f64>,
    /// extra key=value pairs, e.g. "V0=32,a=1"
    #[arg(long)]
    params: Option<String>,
    /// Numerov grid points
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Simpson panels of the field grid
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    panels: usize,
}

#[derive(Args)]
struct LevelArgs {
    /// level or inclusive range `a..b`; principal number for hydrogen
    #[arg(long)]
    n: Option<String>,
    /// hydrogen radial number or range
    #[arg(long)]
    nr: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// print every digit instead of six significant ones
    #[arg(long)]
    full: bool,
    /// write to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{stage} failed ({context}): {source}")]
    Numerical { stage: &'static str, context: String, source: qhj_core::Error },
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical { .. } | CliError::Io(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

trait Stage<T> {
    fn stage(self, stage: &'static str, context: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Stage<T> for qhj_core::Result<T> {
    fn stage(self, stage: &'static str, context: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Numerical { stage, context: context(), source })
    }
}

/// One requested level: the index the user typed and the node count.
#[derive(Clone, Copy, Debug)]
struct Level {
    label: u32,
    nodes: u32,
}

struct Setup {
    model: PotentialModel,
    config: EigenConfig,
    panels: usize,
}

fn tolerance_scale() -> CliResult<f64> {
    match std::env::var("QHJ_TOL_OVERRIDE") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(CliError::Usage(format!("QHJ_TOL_OVERRIDE must be a positive number, got '{s}'"))),
        },
        Err(_) => Ok(1.0),
    }
}

fn build_model(args: &ModelArgs) -> CliResult<Setup> {
    let mut params = match &args.params {
        Some(s) => parse_params(s).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Vec::new(),
    };
    let flags = [
        ("omega", args.omega),
        ("V0", args.v0),
        ("a", args.a),
        ("e2", args.e2),
        ("l", args.l.map(f64::from)),
        ("hbar", args.hbar),
        ("mass", args.mass),
    ];
    params.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
    let model = PotentialModel::from_name(&args.family, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.points < 5 || args.panels < 2 {
        return Err(CliError::Usage("--points and --panels are too small".into()));
    }
    let config =
        EigenConfig { n_points: args.points, energy_rtol: EigenConfig::default().energy_rtol * tolerance_scale()? };
    Ok(Setup { model, config, panels: args.panels })
}

fn parse_range(s: &str, flag: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::Usage(format!("--{flag} expects N or A..B, got '{s}'"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let values: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (num(a)?..=num(b)?).collect()
    } else {
        vec![num(s)?]
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("--{flag} range '{s}' is empty")));
    }
    Ok(values)
}

fn resolve_levels(model: &PotentialModel, args: &LevelArgs) -> CliResult<Vec<Level>> {
    let hydrogen_l = match model.family {
        Family::CoulombCentrifugal { l, .. } => Some(l),
        _ => None,
    };
    match (&args.n, &args.nr, hydrogen_l) {
        (Some(_), Some(_), _) => Err(CliError::Usage("give either --n or --nr, not both".into())),
        (None, Some(_), None) => Err(CliError::Usage("--nr applies to the hydrogen family only".into())),
        (None, Some(nr), Some(l)) => {
            Ok(parse_range(nr, "nr")?.into_iter().map(|n| Level { label: n + l + 1, nodes: n }).collect())
        }
        (Some(n), None, Some(l)) => parse_range(n, "n")?
            .into_iter()
            .map(|p| {
                if p > l {
                    Ok(Level { label: p, nodes: p - l - 1 })
                } else {
                    Err(CliError::Usage(format!("hydrogen principal number {p} must exceed l = {l}")))
                }
            })
            .collect(),
        (Some(n), None, None) => Ok(parse_range(n, "n")?.into_iter().map(|n| Level { label: n, nodes: n }).collect()),
        (None, None, Some(l)) => Ok(vec![Level { label: l + 1, nodes: 0 }]),
        (None, None, None) => Ok(vec![Level { label: 0, nodes: 0 }]),
    }
}

fn context(model: &PotentialModel, level: Level) -> String {
    format!("{model}, n = {}", level.label)
}

fn numerov(setup: &Setup, level: Level) -> CliResult<EigenState> {
    eigenstate_with(&setup.model, level.nodes, &setup.config).stage("eigensolver", || context(&setup.model, level))
}

/// Closed-form exact level where one exists, otherwise Numerov.
fn reference_energy(setup: &Setup, level: Level) -> CliResult<f64> {
    match exact_energy(&setup.model, level.nodes) {
        Some(e) => Ok(e),
        None => Ok(numerov(setup, level)?.energy),
    }
}

fn model_cells(model: &PotentialModel, label: u32) -> Vec<Cell> {
    vec![model.name().into(), model.params_string().into(), label.into()]
}

fn cmd_eigen(setup: &Setup, levels: &[Level]) -> CliResult<Table> {
    let model = &setup.model;
    let rows = levels
        .par_iter()
        .map(|&level| {
            let e = numerov(setup, level)?.energy;
            let e_wkb = wkb_energy_closed(model, level.nodes).stage("wkb", || context(model, level))?;
            let e_exact = exact_energy(model, level.nodes);
            let mut row = model_cells(model, level.label);
            row.extend([
                level.nodes.into(),
                e.into(),
                e_wkb.into(),
                e_exact.into(),
                (e_wkb - e).into(),
                e_exact.map(|x| x - e).into(),
            ]);
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table =
        Table::new(vec!["family", "params", "n", "nodes", "E", "E_wkb", "E_exact", "wkb_minus_E", "exact_minus_E"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn cmd_residual(setup: &Setup, levels: &[Level], with_fields: bool) -> CliResult<Table> {
    let model = &setup.model;
    let mut reports = levels
        .par_iter()
        .map(|&level| {
            let energy = reference_energy(setup, level)?;
            let mut report =
                ResidualReport::at_level(model, level.nodes, energy).stage("action", || context(model, level))?;
            if with_fields {
                let fields = qhj_fields_with(model, energy, setup.panels).stage("fields", || context(model, level))?;
                report.quantum_integral = Some(fields.quantum_action_integral());
                report.r_a = Some(fields.residual_route_a().stage("fields", || context(model, level))?);
            }
            report.n = level.label;
            Ok(report)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let tag = classify_residuals(&reports.iter().map(|r| r.r_b).collect::<Vec<_>>());
    let mut table = Table::new(vec![
        "family",
        "params",
        "n",
        "E",
        "I_classical",
        "quantum_integral",
        "R_A",
        "R_B",
        "R_closed",
        "case",
    ]);
    for r in &mut reports {
        r.case = Some(tag);
        table.push(vec![
            r.family.clone().into(),
            r.params.clone().into(),
            r.n.into(),
            r.energy.into(),
            r.i_classical.into(),
            r.quantum_integral.into(),
            r.r_a.into(),
            r.r_b.into(),
            r.r_closed.into(),
            tag.as_str().into(),
        ]);
    }
    Ok(table)
}

fn cmd_table(which: TableName) -> CliResult<Table> {
    match which {
        TableName::Table1 => {
            let rows = hydrogen_table().stage("table1", || "hydrogen, e2=1".into())?;
            let mut t = Table::new(vec!["n", "l", "R_computed", "R_closed", "R_published", "diff"]);
            for r in rows {
                t.push(vec![
                    r.n.into(),
                    r.l.into(),
                    r.r_computed.into(),
                    r.r_closed.into(),
                    r.r_published.into(),
                    r.diff.into(),
                ]);
            }
            Ok(t)
        }
        TableName::Table2 => {
            let rows = quartic_table().stage("table2", || "quartic, a=1".into())?;
            let mut t =
                Table::new(vec!["n", "E_computed", "E_published", "E_diff", "R_computed", "R_published", "R_diff"]);
            for r in rows {
                t.push(vec![
                    r.n.into(),
                    r.e_computed.into(),
                    r.e_published.into(),
                    r.e_diff.into(),
                    r.r_computed.into(),
                    r.r_published.into(),
                    r.r_diff.into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn cmd_fields(setup: &Setup, levels: &[Level]) -> CliResult<Table> {
    let &[level] = levels else {
        return Err(CliError::Usage("fields takes a single level".into()));
    };
    let model = &setup.model;
    let state = numerov(setup, level)?;
    let fields = qhj_fields_with(model, state.energy, setup.panels).stage("fields", || context(model, level))?;
    let rec = reconstruct_wavefunction(&fields, &state);
    let mut t = Table::new(vec![
        "x",
        "X",
        "W_classical",
        "Xp",
        "p_classical",
        "Y",
        "F",
        "G",
        "psi_reconstructed",
        "psi_numerov",
    ]);
    for i in 0..fields.grid.len() {
        t.push(vec![
            fields.grid.x[i].into(),
            fields.x_action[i].into(),
            fields.w_classical[i].into(),
            fields.xp[i].into(),
            fields.p_c[i].into(),
            fields.y[i].into(),
            fields.f[i].into(),
            fields.g[i].into(),
            rec.psi[i].into(),
            rec.reference[i].into(),
        ]);
    }
    Ok(t)
}

enum RSource {
    Auto,
    Value(f64),
    PerLevel(Vec<(u32, f64)>),
}

fn read_r_file(path: &str) -> CliResult<Vec<(u32, f64)>> {
    let usage = |msg: String| CliError::Usage(format!("--r {path}: {msg}"));
    let mut reader = csv::Reader::from_path(path).map_err(|e| usage(e.to_string()))?;
    let headers = reader.headers().map_err(|e| usage(e.to_string()))?.clone();
    let col =
        |name: &str| headers.iter().position(|h| h.trim() == name).ok_or_else(|| usage(format!("no '{name}' column")));
    let (ni, ri) = (col("n")?, col("R")?);
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| usage(e.to_string()))?;
            let n = rec[ni].trim().parse::<u32>().map_err(|_| usage(format!("bad n '{}'", &rec[ni])))?;
            let r = rec[ri].trim().parse::<f64>().map_err(|_| usage(format!("bad R '{}'", &rec[ri])))?;
            Ok((n, r))
        })
        .collect()
}

fn r_source(arg: Option<&str>, model: &PotentialModel, levels: &[Level]) -> CliResult<RSource> {
    let level_dependent = residual_closed(model).is_none();
    match arg {
        Some("auto") => Ok(RSource::Auto),
        Some(s) => match s.parse::<f64>() {
            Ok(v) if level_dependent && levels.len() > 1 => Err(CliError::Usage(format!(
                "R of the {} family changes with n; a single --r {v} cannot serve {} levels (use --r auto or a file)",
                model.name(),
                levels.len()
            ))),
            Ok(v) => Ok(RSource::Value(v)),
            Err(_) => Ok(RSource::PerLevel(read_r_file(s)?)),
        },
        None => match residual_closed(model) {
            Some(r) => Ok(RSource::Value(r)),
            None => Err(CliError::Usage(format!(
                "R of the {} family changes with n and has no closed form; pass --r auto, --r VALUE for one level, or --r FILE",
                model.name()
            ))),
        },
    }
}

fn cmd_correct(setup: &Setup, levels: &[Level], r_arg: Option<&str>) -> CliResult<Table> {
    let model = &setup.model;
    let source = r_source(r_arg, model, levels)?;
    let per_level = |level: Level| -> CliResult<(f64, &'static str)> {
        match &source {
            RSource::Auto => {
                let e = reference_energy(setup, level)?;
                let r = ResidualReport::at_level(model, level.nodes, e).stage("action", || context(model, level))?.r_b;
                Ok((r, "auto"))
            }
            RSource::Value(v) => Ok((*v, "value")),
            RSource::PerLevel(rows) => rows
                .iter()
                .find(|(n, _)| *n == level.label)
                .map(|(_, r)| (*r, "file"))
                .ok_or_else(|| CliError::Usage(format!("no R for n = {} in the --r file", level.label))),
        }
    };
    // usage errors first, before any numerics
    let rs = levels.iter().map(|&l| match &source {
        RSource::Auto => Ok(None),
        _ => per_level(l).map(Some),
    });
    let rs = rs.collect::<CliResult<Vec<_>>>()?;
    let rows = levels
        .par_iter()
        .zip(rs)
        .map(|(&level, r)| {
            let (r, how) = match r {
                Some(x) => x,
                None => per_level(level)?,
            };
            let e =
                corrected_energy_closed(model, level.nodes, r).stage("corrected formula", || context(model, level))?;
            let e_ref = reference_energy(setup, level)?;
            let mut row = model_cells(model, level.label);
            row.extend([r.into(), how.into(), e.into(), e_ref.into(), (e - e_ref).into()]);
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut t =
        Table::new(vec!["family", "params", "n", "R", "R_source", "E_corrected", "E_reference", "round_trip_error"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn emit(table: &Table, out: &OutputArgs) -> CliResult<()> {
    match &out.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(&mut w, out.format, out.full)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            let written = table.write(&mut w, out.format, out.full).and_then(|_| w.flush());
            // a closed pipe downstream (e.g. `| head`) is not a failure
            match written {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eigen { model, levels, out } => {
            let setup = build_model(&model)?;
            let levels = resolve_levels(&setup.model, &levels)?;
            emit(&cmd_eigen(&setup, &levels)?, &out)
        }
        Command::Residual { model, levels, with_fields, out } => {
            let setup = build_model(&model)?;
            let levels = resolve_levels(&setup.model, &levels)?;
            emit(&cmd_residual(&setup, &levels, with_fields)?, &out)
        }
        Command::Table { which, out } => {
            tolerance_scale()?;
            emit(&cmd_table(which)?, &out)
        }
        Command::Fields { model, levels, out } => {
            let setup = build_model(&model)?;
            let levels = resolve_levels(&setup.model, &levels)?;
            emit(&cmd_fields(&setup, &levels)?, &out)
        }
        Command::Correct { model, levels, r, out } => {
            let setup = build_model(&model)?;
            let levels = resolve_levels(&setup.model, &levels)?;
            emit(&cmd_correct(&setup, &levels, r.as_deref())?, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qhj: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        assert_eq!(parse_range("0..4", "n").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_range("2..=3", "n").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("7", "n").unwrap(), vec![7]);
        assert!(parse_range("4..2", "n").is_err());
        assert!(parse_range("x", "n").is_err());
    }

    #[test]
    fn hydrogen_n_is_principal() {
        let model = PotentialModel::hydrogen(1.0, 1).unwrap();
        let lv = resolve_levels(&model, &LevelArgs { n: Some("2..3".into()), nr: None }).unwrap();
        assert_eq!(lv.iter().map(|l| l.nodes).collect::<Vec<_>>(), vec![0, 1]);
        assert!(resolve_levels(&model, &LevelArgs { n: Some("1".into()), nr: None }).is_err());
        let lv = resolve_levels(&model, &LevelArgs { n: None, nr: Some("2".into()) }).unwrap();
        assert_eq!(lv[0].nodes, 2);
    }
}
