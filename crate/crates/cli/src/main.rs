//! Command-line surface over the `krein-strings` library: spectra, sum-rule
//! validation, resonance design, and feasibility queries, emitting JSON/CSV.
//!
//! Output is deterministic (byte-identical for identical inputs) and all
//! numbers are printed with 17 significant digits so results diff cleanly.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use krein_strings::{
    feasible, optimal_string, optimizing_sequence, report, spectrum, spectrum_in_box, Complex64,
    Constraints, Error, SearchBox, Spectrum, StringSpec, ValidatedString, DEFAULT_CLUSTER_TOL,
};

const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "krein-strings",
    version,
    about = "Quasi-normal eigenvalues and resonance optimization for Krein strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the quasi-eigenvalues of a string described in a JSON file
    Spectrum {
        /// Path to a string description: {"atoms": [...], "segments": [...]}
        file: PathBuf,
        /// Restrict the search to a box re0,re1,im0,im1 (forces the contour
        /// method; the result may then be incomplete)
        #[arg(long = "box", value_name = "RE0,RE1,IM0,IM1")]
        search_box: Option<String>,
        /// Residual tolerance for the contour search
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Minimal decay rate and optimal string for one frequency
    Design {
        #[arg(long)]
        alpha: f64,
        /// Total-mass bound m
        #[arg(long)]
        mass: f64,
        /// Statical-moment bound S
        #[arg(long)]
        moment: f64,
    },
    /// Tabulate the decay-rate curve I(alpha) over a frequency range
    Sweep {
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        moment: f64,
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        /// Number of uniformly spaced samples (at least 2)
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check the spectral sum rules for a string file
    Validate {
        file: PathBuf,
        #[arg(long = "box", value_name = "RE0,RE1,IM0,IM1")]
        search_box: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Can any admissible string have a quasi-eigenvalue at re + i im?
    Feasible {
        #[arg(long)]
        re: f64,
        #[arg(long)]
        im: f64,
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        moment: f64,
    },
    /// Optimizing single-atom strings for a frequency where the infimum
    /// is not attained, one per requested decay rate
    Sequence {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        moment: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: message.into(),
        }
    }
}

/// 17 significant digits; enough to round-trip any f64 and keep output
/// byte-identical across runs.
fn fmt(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{:.16e}", x)
}

fn json_string_spec(spec: &StringSpec) -> String {
    let atoms: Vec<String> = spec
        .atoms
        .iter()
        .map(|a| format!("{{\"x\":{},\"mass\":{}}}", fmt(a.x), fmt(a.mass)))
        .collect();
    let segments: Vec<String> = spec
        .segments
        .iter()
        .map(|s| {
            format!(
                "{{\"left\":{},\"right\":{},\"density\":{}}}",
                fmt(s.left),
                fmt(s.right),
                fmt(s.density)
            )
        })
        .collect();
    format!(
        "{{\"atoms\":[{}],\"segments\":[{}]}}",
        atoms.join(","),
        segments.join(",")
    )
}

fn load_string(path: &PathBuf) -> Result<ValidatedString, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: StringSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("malformed string file: {e}")))?;
    spec.validate()
        .map_err(|e| Failure::usage(format!("invalid string: {e}")))
}

fn parse_box(text: &str) -> Result<SearchBox, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::usage(format!("bad --box value: {e}")))?;
    if parts.len() != 4 {
        return Err(Failure::usage(
            "--box needs exactly four numbers: re0,re1,im0,im1",
        ));
    }
    SearchBox::new(parts[0], parts[1], parts[2], parts[3])
        .map_err(|e| Failure::usage(format!("bad --box value: {e}")))
}

/// Spectrum of `string`: the complete polynomial path when the string (or its
/// reduction, which has the same quasi-eigenvalues) is purely atomic, the
/// contour method inside `search_box` otherwise.
fn resolve_spectrum(
    string: &ValidatedString,
    search_box: Option<&SearchBox>,
    tol: f64,
) -> Result<Spectrum, Failure> {
    if let Some(bx) = search_box {
        return spectrum_in_box(string, bx, tol)
            .map_err(|e| Failure::solver(format!("contour search failed: {e}")));
    }
    let reduced;
    let atomic = if string.is_atomic() {
        string
    } else {
        reduced = string.reduce();
        if !reduced.is_atomic() {
            return Err(Failure::solver(
                "string has density segments other than a unit tail; \
                 supply --box to search a bounded region",
            ));
        }
        &reduced
    };
    spectrum(atomic, DEFAULT_CLUSTER_TOL)
        .map_err(|e| Failure::solver(format!("root search failed: {e}")))
}

fn print_spectrum(sp: &Spectrum, format: Format) {
    match format {
        Format::Json => {
            let entries: Vec<String> = sp
                .entries
                .iter()
                .map(|e| {
                    format!(
                        "{{\"re\":{},\"im\":{},\"mult\":{}}}",
                        fmt(e.kappa.re),
                        fmt(e.kappa.im),
                        e.multiplicity
                    )
                })
                .collect();
            println!("[{}]", entries.join(","));
        }
        Format::Csv => {
            println!("re,im,mult");
            for e in &sp.entries {
                println!("{},{},{}", fmt(e.kappa.re), fmt(e.kappa.im), e.multiplicity);
            }
        }
    }
}

fn constraints(mass: f64, moment: f64) -> Result<Constraints, Failure> {
    Constraints::new(mass, moment).map_err(|e| Failure::usage(format!("bad constraints: {e}")))
}

/// Decay rates for a suggested optimizing schedule: a decade ladder, kept to
/// the values admissible under the constraints.
fn suggested_betas(alpha: f64, c: &Constraints) -> Vec<f64> {
    [1e-1, 1e-2, 1e-3]
        .into_iter()
        .filter(|&beta| optimizing_sequence(alpha, c, &[beta]).is_ok())
        .collect()
}

fn cmd_design(alpha: f64, mass: f64, moment: f64) -> Result<(), Failure> {
    if !alpha.is_finite() {
        return Err(Failure::usage("alpha must be finite"));
    }
    let c = constraints(mass, moment)?;
    let d = optimal_string(alpha, &c);
    let kappa = match d.kappa {
        Some(k) => format!("{{\"re\":{},\"im\":{}}}", fmt(k.re), fmt(k.im)),
        None => "null".into(),
    };
    let string = match &d.string {
        Some(s) => json_string_spec(s),
        None => "null".into(),
    };
    let active: Vec<String> = d
        .active_constraints
        .iter()
        .map(|a| {
            format!(
                "\"{}\"",
                match a {
                    krein_strings::ActiveConstraint::Mass => "mass",
                    krein_strings::ActiveConstraint::Moment => "moment",
                }
            )
        })
        .collect();
    let tail = if d.attained {
        String::new()
    } else {
        let betas: Vec<String> = suggested_betas(alpha, &c).iter().map(|&b| fmt(b)).collect();
        format!(",\"suggested_betas\":[{}]", betas.join(","))
    };
    println!(
        "{{\"alpha\":{},\"i\":{},\"attained\":{},\"kappa\":{},\"string\":{},\
         \"active_constraints\":[{}],\"branch\":\"{}\"{}}}",
        fmt(d.alpha),
        fmt(d.decay),
        d.attained,
        kappa,
        string,
        active.join(","),
        d.branch.as_str(),
        tail
    );
    Ok(())
}

// negated comparison is deliberate: NaN bounds must be rejected
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn cmd_sweep(
    mass: f64,
    moment: f64,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    format: Format,
) -> Result<(), Failure> {
    if steps < 2 {
        return Err(Failure::usage("--steps must be at least 2"));
    }
    if !(alpha_min < alpha_max) || !alpha_min.is_finite() || !alpha_max.is_finite() {
        return Err(Failure::usage("need alpha_min < alpha_max, both finite"));
    }
    let c = constraints(mass, moment)?;
    let rows: Vec<(f64, krein_strings::DesignResult)> = (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            let alpha = alpha_min + t * (alpha_max - alpha_min);
            (alpha, optimal_string(alpha, &c))
        })
        .collect();
    match format {
        Format::Csv => {
            println!("alpha,I,attained,branch");
            for (alpha, d) in &rows {
                println!(
                    "{},{},{},{}",
                    fmt(*alpha),
                    fmt(d.decay),
                    d.attained,
                    d.branch.as_str()
                );
            }
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|(alpha, d)| {
                    format!(
                        "{{\"alpha\":{},\"i\":{},\"attained\":{},\"branch\":\"{}\"}}",
                        fmt(*alpha),
                        fmt(d.decay),
                        d.attained,
                        d.branch.as_str()
                    )
                })
                .collect();
            println!("[{}]", items.join(","));
        }
    }
    Ok(())
}

fn cmd_validate(file: &PathBuf, search_box: Option<&SearchBox>, tol: f64) -> Result<(), Failure> {
    let string = load_string(file)?;
    let sp = resolve_spectrum(&string, search_box, tol)?;
    // fixed sample points for the product formula: two circles well inside
    // the region where the entire-function data is well scaled
    let samples: Vec<Complex64> = (0..10)
        .flat_map(|k| {
            let theta = 0.1 + 2.0 * std::f64::consts::PI * f64::from(k) / 10.0;
            [1.5, 3.0].map(|r| Complex64::new(r * theta.cos(), r * theta.sin()))
        })
        .collect();
    let rep = report(&string, &sp, &samples);
    println!(
        "{{\"mass_residual\":{},\"moment_residual_long\":{},\
         \"moment_residual_compact\":{},\"product_residual\":{},\"complete\":{}}}",
        fmt(rep.mass_residual),
        fmt(rep.moment_residual_long),
        fmt(rep.moment_residual_compact),
        fmt(rep.product_residual),
        rep.complete
    );
    Ok(())
}

fn cmd_feasible(re: f64, im: f64, mass: f64, moment: f64) -> Result<(), Failure> {
    let c = constraints(mass, moment)?;
    let ok = feasible(Complex64::new(re, im), &c).map_err(|e| match e {
        Error::ImKappaNotPositive => Failure::usage("im must be positive"),
        other => Failure::usage(format!("{other}")),
    })?;
    println!("{{\"feasible\":{ok}}}");
    Ok(())
}

fn cmd_sequence(alpha: f64, mass: f64, moment: f64, betas: &[f64]) -> Result<(), Failure> {
    let c = constraints(mass, moment)?;
    let strings =
        optimizing_sequence(alpha, &c, betas).map_err(|e| Failure::usage(format!("{e}")))?;
    let items: Vec<String> = strings.iter().map(json_string_spec).collect();
    println!("[{}]", items.join(","));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum {
            file,
            search_box,
            tol,
            format,
        } => {
            let string = load_string(&file)?;
            let bx = search_box.as_deref().map(parse_box).transpose()?;
            let sp = resolve_spectrum(&string, bx.as_ref(), tol)?;
            print_spectrum(&sp, format);
            Ok(())
        }
        Command::Design {
            alpha,
            mass,
            moment,
        } => cmd_design(alpha, mass, moment),
        Command::Sweep {
            mass,
            moment,
            alpha_min,
            alpha_max,
            steps,
            format,
        } => cmd_sweep(mass, moment, alpha_min, alpha_max, steps, format),
        Command::Validate {
            file,
            search_box,
            tol,
        } => {
            let bx = search_box.as_deref().map(parse_box).transpose()?;
            cmd_validate(&file, bx.as_ref(), tol)
        }
        Command::Feasible {
            re,
            im,
            mass,
            moment,
        } => cmd_feasible(re, im, mass, moment),
        Command::Sequence {
            alpha,
            mass,
            moment,
            betas,
        } => cmd_sequence(alpha, mass, moment, &betas),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
