use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crfsim::plot::{emit_plot, PlotSpec, PlotStyle, ReferenceCurve};
use crfsim::runner::{
    apply_override, run_oracle_check, run_sweep, run_table, run_trace, OracleSuite, SweepSpec, TableSpec, TraceSpec,
};
use crfsim::table::ResultTable;

const EXIT_SPEC: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_ORACLE: u8 = 3;

/// Mean-field sweeps, traces, critical-drive tables and exact-oracle checks.
///
/// Any other `--a.b.c VALUE` (or `--a.b.c=VALUE`) flag overrides the field
/// at that path in the JSON manifest, e.g. `--params.kappa_2pi_hz 160000`.
#[derive(Parser, Debug)]
#[command(name = "crfsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a one-dimensional sweep and write one CSV row per value.
    Sweep {
        manifest: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Directory for per-point trajectory CSVs, when the manifest asks for them.
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
    /// Integrate one drive protocol and write the trajectory CSV.
    Trace {
        manifest: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Critical drives for every stationary regime (and optionally the finite-time one).
    Table {
        manifest: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Run the exact-oracle self checks and print a JSON verdict.
    Oracle {
        /// Suites to run; all when omitted.
        #[arg(long = "suite", value_enum)]
        suites: Vec<SuiteArg>,
    },
    /// Render columns of a result CSV as an SVG plot.
    Plot {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, required = true)]
        y: Vec<String>,
        #[arg(long, value_enum, default_value_t = StyleArg::Scatter)]
        style: StyleArg,
        #[arg(long, value_enum)]
        reference: Option<ReferenceArg>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    GeneratorResidual,
    AdiabaticEquivalence,
    MeanfieldConvergence,
    HpSqueezing,
}

impl From<SuiteArg> for OracleSuite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::GeneratorResidual => OracleSuite::GeneratorResidual,
            SuiteArg::AdiabaticEquivalence => OracleSuite::AdiabaticEquivalence,
            SuiteArg::MeanfieldConvergence => OracleSuite::MeanfieldConvergence,
            SuiteArg::HpSqueezing => OracleSuite::HpSqueezing,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StyleArg {
    Line,
    Scatter,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReferenceArg {
    IdealHomog,
    IdealInhomog,
}

const CLI_FLAGS: [&str; 12] =
    ["jobs", "out", "trajectories", "format", "suite", "x", "y", "style", "reference", "title", "help", "version"];

/// Any long flag that is not one of ours names a manifest field.
fn is_override(name: &str) -> bool {
    !name.is_empty() && !CLI_FLAGS.contains(&name)
}

type Overrides = Vec<(String, String)>;

/// Splits `--a.b=v` / `--a.b v` manifest overrides from the rest of argv.
fn split_overrides(args: Vec<String>) -> anyhow::Result<(Vec<String>, Overrides)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--").filter(|f| is_override(f.split('=').next().unwrap_or(""))) else {
            rest.push(a);
            continue;
        };
        match flag.split_once('=') {
            Some((path, value)) => overrides.push((path.to_string(), value.to_string())),
            None => {
                let value = it.next().ok_or_else(|| anyhow!("override --{flag} needs a value"))?;
                overrides.push((flag.to_string(), value));
            }
        }
    }
    Ok((rest, overrides))
}

fn load_manifest(path: &Path, overrides: &[(String, String)]) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc: Value = serde_json::from_str(&text).map_err(crfsim::Error::from)?;
    for (p, v) in overrides {
        apply_override(&mut doc, p, v)?;
    }
    Ok(doc)
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli, overrides: &[(String, String)]) -> anyhow::Result<u8> {
    if !overrides.is_empty() && matches!(cli.command, Command::Oracle { .. } | Command::Plot { .. }) {
        return Err(crfsim::Error::Spec("manifest overrides only apply to sweep, trace and table".into()).into());
    }
    match cli.command {
        Command::Sweep { manifest, jobs, out, trajectories } => {
            let spec = SweepSpec::from_value(load_manifest(&manifest, overrides)?)?;
            let res = run_sweep(&spec, jobs)?;
            res.table.write_csv(output(out.as_deref())?)?;
            if let Some(dir) = trajectories {
                fs::create_dir_all(&dir)?;
                for (i, pt) in res.points.iter().enumerate() {
                    if let Some(t) = &pt.trajectory {
                        t.write_csv(fs::File::create(dir.join(format!("point_{i:04}.csv")))?)?;
                    }
                }
            }
            let failed = res.points.iter().filter(|p| p.error.is_some()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} sweep points failed; see the error column", res.points.len());
            }
            Ok(0)
        }
        Command::Trace { manifest, out } => {
            let spec = TraceSpec::from_value(load_manifest(&manifest, overrides)?)?;
            run_trace(&spec)?.write_csv(output(out.as_deref())?)?;
            Ok(0)
        }
        Command::Table { manifest, out, format } => {
            let spec = TableSpec::from_value(load_manifest(&manifest, overrides)?)?;
            let table = run_table(&spec)?;
            let mut w = output(out.as_deref())?;
            match format {
                TableFormat::Csv => table.write_csv(w)?,
                TableFormat::Text => w.write_all(table.to_text().as_bytes())?,
            }
            Ok(0)
        }
        Command::Oracle { suites } => {
            let suites: Vec<OracleSuite> =
                if suites.is_empty() { OracleSuite::ALL.to_vec() } else { suites.into_iter().map(Into::into).collect() };
            let report = run_oracle_check(&suites);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass { 0 } else { EXIT_ORACLE })
        }
        Command::Plot { input, x, y, style, reference, title, out } => {
            let table = ResultTable::from_reader(
                fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?,
            )?;
            let spec = PlotSpec {
                x,
                y,
                style: match style {
                    StyleArg::Line => PlotStyle::Line,
                    StyleArg::Scatter => PlotStyle::Scatter,
                },
                reference: reference.map(|r| match r {
                    ReferenceArg::IdealHomog => ReferenceCurve::IdealHomog,
                    ReferenceArg::IdealInhomog => ReferenceCurve::IdealInhomog,
                }),
                title,
            };
            output(out.as_deref())?.write_all(emit_plot(&table, &spec)?.as_bytes())?;
            Ok(0)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<crfsim::Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_SPEC,
    }
}

fn main() -> ExitCode {
    let (args, overrides) = match split_overrides(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_SPEC);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SPEC } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &overrides) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_are_split_from_argv() {
        let args = ["crfsim", "sweep", "m.json", "--params.kappa_2pi_hz", "1", "--grid.n_phi=3", "--jobs", "2"]
            .map(String::from)
            .to_vec();
        let (rest, ov) = split_overrides(args).unwrap();
        assert_eq!(rest, ["crfsim", "sweep", "m.json", "--jobs", "2"]);
        assert_eq!(ov, [("params.kappa_2pi_hz".into(), "1".into()), ("grid.n_phi".into(), "3".into())]);
        assert!(split_overrides(vec!["--a.b".into()]).is_err());
        let (rest, ov) = split_overrides(["x", "--dynamic=true", "--help"].map(String::from).to_vec()).unwrap();
        assert_eq!(rest, ["x", "--help"]);
        assert_eq!(ov, [("dynamic".into(), "true".into())]);
    }
}
