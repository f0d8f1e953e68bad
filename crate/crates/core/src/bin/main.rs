use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tao_memristor::bifurcation::{nst_map, sign_map, trace_boundary};
use tao_memristor::checks::run_validation;
use tao_memristor::config::{ConfigError, RunConfig};
use tao_memristor::curves::{self, PulseTiming};
use tao_memristor::fixedpoints::find_fixed_points;
use tao_memristor::numerics::logspace;
use tao_memristor::output::{self, num, output_path, Table};
use tao_memristor::simulate::{detect_attractor, simulate};

/// Thread count for parameter sweeps; unset means single-threaded.
const THREADS_ENV: &str = "TAO_MEMRISTOR_THREADS";

#[derive(Parser)]
#[command(
    name = "tao-memristor",
    version,
    about = "Bifurcation analysis of a pulse-driven TaO memristor"
)]
struct Cli {
    /// Config file with `section.key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Prefix prepended to every output file name
    #[arg(long, global = true)]
    out: Option<String>,
    /// Override a single config key, e.g. `--set drive.v_plus=0.6`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Also write a matplotlib script that plots the produced CSVs
    #[arg(long, global = true)]
    plot_script: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sign of g over (x, V−) at fixed V+
    SignMap,
    /// Number of stable fixed points over (V+, V−)
    NstMap,
    /// Closed-form bifurcation curves A–D and the cusp
    Curves,
    /// Fixed points of g at the configured drive
    FixedPoints,
    /// Time-domain pulse-train integration
    Simulate,
    /// Cross-module consistency report
    Validate {
        /// Multiplies every tolerance of the report
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SignMap => "sign-map",
            Command::NstMap => "nst-map",
            Command::Curves => "curves",
            Command::FixedPoints => "fixed-points",
            Command::Simulate => "simulate",
            Command::Validate { .. } => "validate",
        }
    }
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<tao_memristor::Error> for Failure {
    fn from(e: tao_memristor::Error) -> Self {
        match e {
            tao_memristor::Error::InvalidParameter(_) => Failure::Config(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(prefix) = &cli.out {
        cfg.output_prefix = prefix.clone();
    }
    if let Command::Validate {
        tolerance_scale: Some(s),
    } = cli.command
    {
        cfg.validate.tolerance_scale = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(
    cfg: &RunConfig,
    name: &str,
    table: &Table,
    written: &mut Vec<String>,
) -> Result<(), Failure> {
    let path = output_path(&cfg.output_prefix, name);
    table
        .write_file(&path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    written.push(name.to_string());
    Ok(())
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Vec<String>, Failure> {
    let header = cfg.header(cli.command.name());
    let p = &cfg.model;
    let mut written = Vec::new();
    match cli.command {
        Command::SignMap => {
            let sm = &cfg.sign_map;
            let grid = sign_map(p, &cfg.drive, sm.v_plus, sm.v_minus, sm.x)?;
            write(
                cfg,
                "sign_map.csv",
                &output::grid_table(header, &grid, "sign"),
                &mut written,
            )?;
        }
        Command::NstMap => {
            let (vp, vm) = cfg.nst_map;
            let grid = nst_map(p, &cfg.drive, vp, vm, &cfg.scan)?;
            write(
                cfg,
                "nst_map.csv",
                &output::grid_table(header.clone(), &grid, "n_st"),
                &mut written,
            )?;
            let lines = trace_boundary(&grid);
            write(
                cfg,
                "nst_boundaries.csv",
                &output::boundary_table(header, &lines),
                &mut written,
            )?;
        }
        Command::Curves => {
            let timing = PulseTiming::from(&cfg.drive);
            let c = &cfg.curves;
            let xs = logspace(c.x.min, c.x.max, c.x.n);
            let vps = c.v_plus.samples();
            let a = curves::curve_a(p, &timing, &xs, c.correction)?;
            write(
                cfg,
                "curve_a.csv",
                &output::curve_a_table(header.clone(), &a),
                &mut written,
            )?;
            let b = curves::curve_b(p, &timing, &vps)?;
            write(
                cfg,
                "curve_b.csv",
                &output::curve_table(header.clone(), &b),
                &mut written,
            )?;
            let cc = curves::curve_c(p, &timing, &vps)?;
            write(
                cfg,
                "curve_c.csv",
                &output::curve_table(header.clone(), &cc),
                &mut written,
            )?;
            let d = curves::curve_d(p, &timing, &vps)?;
            write(
                cfg,
                "curve_d.csv",
                &output::curve_d_table(header.clone(), &d),
                &mut written,
            )?;
            let cusp = curves::cusp(p, &timing)?;
            write(
                cfg,
                "cusp.csv",
                &output::cusp_table(header, &cusp),
                &mut written,
            )?;
        }
        Command::FixedPoints => {
            let fps = find_fixed_points(p, &cfg.drive, &cfg.scan)?;
            println!("{:>24}  {:<9}  {:>24}", "x", "stability", "residual_log");
            for f in &fps {
                println!(
                    "{:>24}  {:<9}  {:>24}",
                    num(f.x),
                    f.stability.as_str(),
                    num(f.residual_log)
                );
            }
            write(
                cfg,
                "fixed_points.csv",
                &output::fixed_point_table(header, &fps),
                &mut written,
            )?;
        }
        Command::Simulate => {
            let s = &cfg.simulate;
            let traj = simulate(p, &cfg.drive, s.x0, s.n_periods, &cfg.integrator)?;
            let mut table = output::trajectory_table(header, &traj);
            table
                .trailer
                .push(format!("boundary_hit = {}", traj.boundary_hit.as_str()));
            for f in find_fixed_points(p, &cfg.drive, &cfg.scan)? {
                table.trailer.push(format!(
                    "fixed_point x = {} stability = {}",
                    num(f.x),
                    f.stability.as_str()
                ));
            }
            if let Ok(att) = detect_attractor(&traj, s.tail_fraction) {
                table.trailer.push(format!(
                    "attractor mean = {} amplitude = {}",
                    num(att.mean),
                    num(att.amplitude)
                ));
                println!(
                    "tail mean x = {:.6}, peak-to-peak = {:.6}",
                    att.mean, att.amplitude
                );
            }
            write(cfg, "trajectory.csv", &table, &mut written)?;
        }
        Command::Validate { .. } => {
            let v = &cfg.validate;
            let report = run_validation(p, &cfg.drive, &cfg.scan, &v.window, v.tolerance_scale)?;
            let mut table = Table::new(header, vec!["check", "passed", "measured", "tolerance"]);
            for c in &report.checks {
                println!("{c}");
                table.rows.push(vec![
                    format!("\"{}\"", c.name),
                    c.passed.to_string(),
                    num(c.measured),
                    num(c.tolerance),
                ]);
            }
            write(cfg, "validate.csv", &table, &mut written)?;
            if !report.all_passed() {
                return Err(Failure::Numeric(
                    "validation report contains FAIL entries".into(),
                ));
            }
        }
    }
    if cli.plot_script {
        let script = tao_memristor::output::plot_script(cli.command.name(), &cfg.output_prefix);
        let name = format!("plot_{}.py", cli.command.name().replace('-', "_"));
        let path = output_path(&cfg.output_prefix, &name);
        std::fs::write(&path, script)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        written.push(name);
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        },
        Err(_) => 1,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let result = load_config(&cli).and_then(|cfg| pool.install(|| run(&cli, &cfg)));
    match result {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {f}");
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
