//! The `duetdyn` command line.
//!
//! Exit codes: 0 success, 1 physics-guard or validation failure (including
//! I/O failures while writing results), 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{
    export, figure_preset, run_sweep, write_csv, write_json, Cell, CellSample, FigureName,
    RunConfig, SweepResult,
};
use crate::integrator::{evolve, IntegratorConfig, Method, TimeGrid};
use crate::model::{density_from_initial, InitialState, LindbladSpec, ModelParams, C64};
use crate::validate::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "duetdyn",
    version,
    about = "Two-mode condensate dynamics under decoherence",
    after_help = "Couplings and rates are in units of V, times in units of 1/V.\n\
                  DUETDYN_THREADS caps the sweep worker pool."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write it as CSV.
    Evolve(EvolveArgs),
    /// Run a sweep described by a JSON run-config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate the datasets behind the figure presets.
    Figures {
        #[arg(required = true, value_parser = parse_figure)]
        names: Vec<FigureName>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write the full sweep result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suite and print one verdict per property.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum OpArg {
    SigmaPlus,
    SigmaX,
    SigmaZ,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rk4,
    Rk45,
}

#[derive(Debug, clap::Args)]
struct EvolveArgs {
    /// Nonlinear interaction c.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Decoherence rate Γ.
    #[arg(long, default_value_t = 0.0)]
    gamma_rate: f64,
    /// Energy bias γ between the wells.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    bias: f64,
    /// Condensate operator A.
    #[arg(long, value_enum, default_value_t = OpArg::SigmaX)]
    op: OpArg,
    /// λx,λy,λz for `--op custom`, e.g. `1,i,0` or `0.5-2i,0,1`.
    #[arg(long, value_parser = parse_lambdas, allow_hyphen_values = true)]
    lambdas: Option<Lambdas>,
    /// Multiplier on A.
    #[arg(long, default_value_t = 1.0)]
    op_scale: f64,
    /// Initial population imbalance.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    z0: f64,
    /// Initial relative phase in [0, 2π).
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    #[arg(long, default_value_t = 50.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    record_stride: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    method: MethodArg,
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Dimensional coupling V; rates are rescaled by V and times by 1/V.
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Lambdas([C64; 3]);

fn parse_figure(s: &str) -> std::result::Result<FigureName, String> {
    FigureName::from_str(s).map_err(|e| e.to_string())
}

/// Parses a complex literal such as `1`, `-i`, `2.5i`, `0.5-2i` or `1e-3+4i`.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    // num-complex wants an explicit coefficient before a bare `i`
    let mut normalized = String::with_capacity(t.len() + 2);
    let mut prev: Option<char> = None;
    for ch in t.chars() {
        if ch == 'i' && matches!(prev, None | Some('+') | Some('-')) {
            normalized.push('1');
        }
        normalized.push(ch);
        prev = Some(ch);
    }
    C64::from_str(&normalized).map_err(|_| format!("invalid complex literal '{s}'"))
}

fn parse_lambdas(s: &str) -> std::result::Result<Lambdas, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got '{s}'"));
    }
    let mut out = [C64::new(0.0, 0.0); 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_complex(part)?;
    }
    Ok(Lambdas(out))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> i32
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
    match cli.command {
        Command::Evolve(args) => run_evolve(&args),
        Command::Sweep { config } => report(run_sweep_config(&config)),
        Command::Figures {
            names,
            out_dir,
            json,
        } => report(run_figures(&names, &out_dir, json)),
        Command::Validate => run_validate(),
    }
}

fn report(outcome: Result<bool>) -> i32 {
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn usage_error(message: &str) -> i32 {
    let _ = Cli::command()
        .error(clap::error::ErrorKind::ArgumentConflict, message)
        .print();
    EXIT_USAGE
}

fn evolve_inputs(
    args: &EvolveArgs,
) -> std::result::Result<(ModelParams, TimeGrid, IntegratorConfig), String> {
    let lindblad = match (args.op, args.lambdas) {
        (OpArg::Custom, Some(Lambdas(l))) => LindbladSpec::custom(l),
        (OpArg::Custom, None) => return Err("--op custom requires --lambdas".into()),
        (_, Some(_)) => return Err("--lambdas is only valid with --op custom".into()),
        (OpArg::SigmaPlus, None) => LindbladSpec::sigma_plus(),
        (OpArg::SigmaX, None) => LindbladSpec::sigma_x(),
        (OpArg::SigmaZ, None) => LindbladSpec::sigma_z(),
    }
    .with_scale(args.op_scale);
    let v = args.v;
    let params = ModelParams {
        bias: args.bias * v,
        c: args.c * v,
        v,
        decoherence_rate: args.gamma_rate * v,
        lindblad,
    };
    let grid = TimeGrid {
        t_final: args.t_final / v,
        dt: args.dt / v,
        record_stride: args.record_stride,
    };
    let cfg = IntegratorConfig {
        method: match args.method {
            MethodArg::Rk4 => Method::Rk4Fixed,
            MethodArg::Rk45 => Method::Rk45Adaptive,
        },
        abs_tol: args.abs_tol,
        rel_tol: args.rel_tol,
        ..Default::default()
    };
    Ok((params, grid, cfg))
}

fn run_evolve(args: &EvolveArgs) -> i32 {
    let (params, grid, cfg) = match evolve_inputs(args) {
        Ok(inputs) => inputs,
        Err(msg) => return usage_error(&msg),
    };
    let outcome = (|| -> Result<usize> {
        let init = InitialState::new(args.z0, args.theta0)?;
        let rho0 = density_from_initial(&init)?;
        let traj = evolve(&rho0, &params, &grid, &cfg)?;
        let cell = Cell {
            c_index: 0,
            gamma_index: 0,
            c: params.c,
            gamma_rate: params.decoherence_rate,
            samples: traj
                .samples()
                .iter()
                .map(|s| CellSample {
                    t: s.t,
                    rho_rr: s.rho.rr.re,
                    rho_ll: s.rho.ll.re,
                    re_rho_rl: s.rho.rl.re,
                    im_rho_rl: s.rho.rl.im,
                    z: Some(s.z),
                    coherence: Some(s.coherence),
                    purity: Some(s.purity),
                })
                .collect(),
            summary: None,
            error: None,
        };
        write_csv([&cell], &args.out)
    })();
    match outcome {
        Ok(rows) => {
            println!("wrote {rows} samples to {}", args.out.display());
            EXIT_OK
        }
        Err(e) => {
            match e.time() {
                Some(t) => eprintln!(
                    "error: {e}\n  at t = {t} with c = {}, gamma_rate = {}, v = {}, op = {:?}",
                    params.c, params.decoherence_rate, params.v, params.lindblad.preset
                ),
                None => eprintln!("error: {e}"),
            }
            EXIT_FAILURE
        }
    }
}

fn report_failed_cells(result: &SweepResult) -> bool {
    let mut ok = true;
    for cell in result.failed_cells() {
        ok = false;
        let err = cell.error.as_ref().expect("failed cell has an error");
        eprintln!(
            "cell (c = {}, gamma_rate = {}) failed: {}",
            cell.c, cell.gamma_rate, err.message
        );
    }
    ok
}

fn run_sweep_config(path: &Path) -> Result<bool> {
    let config = RunConfig::load(path)?;
    let result = run_sweep(&config.spec)?;
    export(&result, config.output.format, &config.output.path)?;
    println!(
        "wrote {} cells to {}",
        result.cells.len(),
        config.output.path.display()
    );
    Ok(report_failed_cells(&result))
}

/// File name of the CSV holding one decoherence rate of a figure preset.
pub fn figure_csv_name(name: FigureName, gamma_rate: f64) -> String {
    format!("{name}_gamma{gamma_rate}.csv")
}

fn run_figures(names: &[FigureName], out_dir: &Path, json: bool) -> Result<bool> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        context: "creating output directory".into(),
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let mut ok = true;
    for &name in names {
        let result = run_sweep(&figure_preset(name))?;
        for (gi, &rate) in result.gamma_values.iter().enumerate() {
            let path = out_dir.join(figure_csv_name(name, rate));
            write_csv(result.gamma_slice(gi), &path)?;
            println!("{name}: wrote {}", path.display());
        }
        if json {
            let path = out_dir.join(format!("{name}.json"));
            write_json(&result, &path)?;
            println!("{name}: wrote {}", path.display());
        }
        ok &= report_failed_cells(&result);
    }
    Ok(ok)
}

fn run_validate() -> i32 {
    let checks = run_suite();
    let mut all = true;
    for check in &checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict}  {:<32} {}", check.name, check.detail);
        all &= check.passed;
    }
    if all {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = |re, im| C64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("0.5-2i").unwrap(), c(0.5, -2.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex(" -3 ").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("1e-3+4i").unwrap(), c(1e-3, 4.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn lambda_triples() {
        let Lambdas(l) = parse_lambdas("1,i,0").unwrap();
        assert_eq!(
            l,
            [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
        );
        assert!(parse_lambdas("1,i").is_err());
        assert!(parse_lambdas("1,i,0,0").is_err());
    }

    #[test]
    fn figure_csv_names() {
        assert_eq!(
            figure_csv_name(FigureName::Fig6, 0.01),
            "fig6_gamma0.01.csv"
        );
        assert_eq!(figure_csv_name(FigureName::Fig6, 0.0), "fig6_gamma0.csv");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_command(["duetdyn", "bogus"]), EXIT_USAGE);
        assert_eq!(
            run_command(["duetdyn", "evolve", "--nope", "1"]),
            EXIT_USAGE
        );
        assert_eq!(
            run_command(["duetdyn", "figures", "fig9", "--out-dir", "x"]),
            EXIT_USAGE
        );
        assert_eq!(run_command(["duetdyn"]), EXIT_USAGE);
        assert_eq!(run_command(["duetdyn", "--version"]), EXIT_OK);
    }
}
