use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use toric_zeta::{
    default_prime, parse_int_list, parse_rational, run, CliError, Command, JobConfig, OutputFormat, VarietySource,
};

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Csv,
    Text,
}

#[derive(Parser)]
#[command(name = "toric-zeta", version, about = "Zeta functions of effective divisor classes on toric varieties")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Builtin variety: p1, p2, p1xp1, hirzebruch:a, wp112
    #[arg(long, global = true, conflicts_with = "fan_file")]
    variety: Option<String>,
    /// Fan file (JSON with dim, rays, max_cones, complete)
    #[arg(long, global = true)]
    fan_file: Option<PathBuf>,
    /// Degree of each free class-group generator, comma separated
    #[arg(long, global = true)]
    grading: Option<String>,
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,
    /// Defaults to the prime under q
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true, default_value_t = 10)]
    dmax: u64,
    /// p-adic precision N
    #[arg(long, global = true, default_value_t = 8)]
    prec: i64,
    /// csv, or text (structured JSON)
    #[arg(long, global = true, value_enum, default_value_t = Out::Text)]
    out: Out,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the fan in fan-file format
    Fan,
    /// Rank and torsion of the class group
    ClassGroup,
    /// Dimension of global sections of a torus-invariant divisor
    Sections {
        /// Coefficients by ray index, e.g. 2,0,0
        #[arg(allow_hyphen_values = true)]
        divisor: String,
    },
    /// Fit n -> l(nD) and validate it on held-out n
    Ehrhart {
        #[arg(allow_hyphen_values = true)]
        divisor: Option<String>,
    },
    /// Table of M_d for d <= dmax
    ZetaCoeffs,
    /// Pole order and special value at T = 1
    Pole,
    /// Decompose sum q^f(x) T^(d.x) and evaluate it at t
    MeroEval {
        /// e.g. "x1*x2 + x2^2"
        polynomial: String,
        /// rational, e.g. 1/2
        t: String,
        /// grading weights of the variables, comma separated (default all 1)
        degrees: Option<String>,
    },
}

fn config(cli: &Cli) -> Result<(Command, JobConfig), CliError> {
    let variety = match (&cli.variety, &cli.fan_file) {
        (Some(v), None) => VarietySource::Builtin(v.clone()),
        (None, Some(f)) => VarietySource::File(f.clone()),
        (None, None) if matches!(cli.command, Cmd::MeroEval { .. }) => VarietySource::Builtin("p1".into()),
        _ => return Err(CliError::usage("give exactly one of --variety or --fan-file")),
    };
    let cfg = JobConfig {
        variety,
        grading: cli.grading.as_deref().map(parse_int_list).transpose()?,
        q: cli.q,
        p: match cli.p {
            Some(p) => p,
            None => default_prime(cli.q)?,
        },
        dmax: cli.dmax,
        precision: cli.prec,
        out: match cli.out {
            Out::Csv => OutputFormat::Csv,
            Out::Text => OutputFormat::Text,
        },
    };
    let cmd = match &cli.command {
        Cmd::Fan => Command::Fan,
        Cmd::ClassGroup => Command::ClassGroup,
        Cmd::Sections { divisor } => Command::Sections { divisor: parse_int_list(divisor)? },
        Cmd::Ehrhart { divisor } => Command::Ehrhart {
            divisor: divisor.as_deref().map(parse_int_list).transpose()?,
            max_period: 12,
            validate_to: 50,
        },
        Cmd::ZetaCoeffs => Command::ZetaCoeffs,
        Cmd::Pole => Command::Pole,
        Cmd::MeroEval { polynomial, t, degrees } => Command::MeroEval {
            polynomial: polynomial.clone(),
            t: parse_rational(t)?,
            degrees: degrees.as_deref().map(parse_int_list).transpose()?,
        },
    };
    Ok((cmd, cfg))
}

fn fail(e: &CliError) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("serializable"));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => return fail(&CliError::usage(e.to_string().trim().to_string())),
    };
    let result = config(&cli).and_then(|(cmd, cfg)| run(&cmd, &cfg).map(|r| r.render(cfg.out)));
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
