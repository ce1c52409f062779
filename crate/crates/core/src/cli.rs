//! Command-line front end: `check`, `examples`, `orlicz`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cone::TruncationSpec;
use crate::domination::{truncation_sweep, SweepQuantity};
use crate::error::{Error, Result};
use crate::market_file::{load_market, Market, MarketFile};
use crate::markets::{self, DensityRule, FamilyKind};
use crate::orlicz::{self, EpsSequence, NFunction};
use crate::prob::{int, parse_rational, FiniteProbSpace, RandomVariable, Rational};
use crate::report::{self, analyze, scalar, scalar_json, INPUT_ERROR_EXIT};

#[derive(Debug, Parser)]
#[command(name = "mfloor", version, about = "Martingale densities bounded below by a floor")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Trace every simplex tableau to standard error.
    #[arg(long, global = true)]
    pub debug_lp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    #[value(alias = "machine-readable")]
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a market file. Exit 0: dominating g found, 1: none, 2: arbitrage, 3: bad input.
    Check { path: PathBuf },
    /// Build a truncated example market and analyze it.
    Examples(ExamplesArgs),
    /// N-function constructions and Luxemburg norms.
    #[command(subcommand)]
    Orlicz(OrliczCommand),
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    /// example1, example2 or example3.
    #[arg(value_parser = parse_kind)]
    pub kind: FamilyKind,
    /// Truncation level N.
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    /// Floor on the paired states of example2: ones, ones-odd, geometric-odd.
    #[arg(long = "f", default_value = "ones-odd", value_parser = parse_rule)]
    pub rule: DensityRule,
    /// Truncation of the negative part (example1 defaults to eps-dyadic).
    #[arg(long, value_enum)]
    pub truncation: Option<TruncationChoice>,
    /// Sweep levels L1..=L2.
    #[arg(long, num_args = 2, value_names = ["L1", "L2"])]
    pub sweep: Option<Vec<usize>>,
    /// Sweep column judged for divergence.
    #[arg(long, value_enum)]
    pub watch: Option<Watch>,
    /// Divergence threshold at the last sweep level.
    #[arg(long, default_value = "0", value_parser = parse_rat)]
    pub threshold: Rational,
    /// Write the built market file here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TruncationChoice {
    UnitBall,
    /// `eps_k = 2^-k` for `k = 1..level`.
    EpsDyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Watch {
    Sup,
    MinL1,
}

#[derive(Debug, Subcommand)]
pub enum OrliczCommand {
    /// N-function whose unit ball forces P(|x| >= k) <= eps_k.
    EpsToPhi {
        #[arg(required = true, value_parser = parse_rat)]
        eps: Vec<Rational>,
    },
    /// eps_k = k^-2 / phi(k + 1) for k = 1..K.
    PhiToEps {
        #[command(flatten)]
        phi: PhiArg,
        #[arg(long = "k")]
        k: usize,
    },
    /// Bracket for the Luxemburg norm of a vector.
    Norm {
        #[command(flatten)]
        phi: PhiArg,
        /// Atom values.
        #[arg(long, required = true, num_args = 1.., value_parser = parse_rat)]
        values: Vec<Rational>,
        /// Atom probabilities (uniform when omitted).
        #[arg(long, num_args = 1.., value_parser = parse_rat)]
        probs: Option<Vec<Rational>>,
        #[arg(long, default_value = "1/1000", value_parser = parse_rat)]
        tol: Rational,
    },
}

#[derive(Debug, Args)]
pub struct PhiArg {
    /// N-function as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub phi: String,
}

fn parse_kind(s: &str) -> std::result::Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rule(s: &str) -> std::result::Result<DensityRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rat(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR_EXIT } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    if cli.debug_lp {
        let _ = env_logger::Builder::new()
            .filter_module("mfloor::lp", log::LevelFilter::Trace)
            .target(env_logger::Target::Stderr)
            .try_init();
    }
    let result = match &cli.command {
        Command::Check { path } => cmd_check(path, cli.format, out),
        Command::Examples(a) => cmd_examples(a, cli.format, out, err),
        Command::Orlicz(c) => cmd_orlicz(c, cli.format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            INPUT_ERROR_EXIT
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("{}: {e}", path.display()))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
}

fn emit_report(market: &Market, format: Format, out: &mut dyn Write) -> Result<i32> {
    let r = analyze(market)?;
    let text = match format {
        Format::Text => r.to_text(),
        Format::Json => format!("{}\n", r.to_json()),
    };
    write_out(out, &text)?;
    Ok(r.verdict().exit_code())
}

fn cmd_check(path: &Path, format: Format, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    emit_report(&load_market(&text)?, format, out)
}

fn eps_dyadic(level: usize) -> Result<TruncationSpec> {
    Ok(TruncationSpec::EpsSequence(EpsSequence::new(
        markets::dyadic_eps(level),
    )?))
}

fn build_market(a: &ExamplesArgs) -> Result<Market> {
    let choice = a.truncation.unwrap_or(match a.kind {
        FamilyKind::Example1 => TruncationChoice::EpsDyadic,
        _ => TruncationChoice::UnitBall,
    });
    let truncation = match choice {
        TruncationChoice::UnitBall => TruncationSpec::UnitBall,
        TruncationChoice::EpsDyadic => eps_dyadic(a.level)?,
    };
    let market = match a.kind {
        FamilyKind::Example1 => {
            let seq = markets::build_example1(markets::dyadic_eps(a.level))?;
            Market {
                cone: seq.point_mass_cone()?,
                f: RandomVariable::constant(&seq.space, int(1)),
                truncation,
                candidates: seq.xs,
            }
        }
        FamilyKind::Example2 => {
            let m = markets::build_example2(a.level)?;
            Market {
                f: m.density(&a.rule, Rational::default()),
                cone: m.cone,
                truncation,
                candidates: Vec::new(),
            }
        }
        FamilyKind::Example3 => {
            let m = markets::build_example3(a.level)?;
            Market {
                cone: m.cone,
                f: m.f,
                truncation,
                candidates: Vec::new(),
            }
        }
    };
    Ok(market)
}

fn cmd_examples(
    a: &ExamplesArgs,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    // Route through the file format so the report equals `check` on the dump.
    let dump = MarketFile::from_market(&build_market(a)?).to_json();
    if let Some(path) = &a.dump {
        std::fs::write(path, &dump).map_err(|e| io_err(path, e))?;
        let _ = writeln!(err, "wrote {}", path.display());
    }
    let code = emit_report(&load_market(&dump)?, format, out)?;

    if a.kind == FamilyKind::Example1 {
        let seq = markets::build_example1(markets::dyadic_eps(a.level))?;
        let rows = report::example1_rows(&seq)?;
        let text = match format {
            Format::Text => format!("\n{}", report::example1_text(&rows)),
            Format::Json => format!("{}\n", json!({ "example1": report::example1_json(&rows) })),
        };
        write_out(out, &text)?;
    }

    if let Some(levels) = &a.sweep {
        let (lo, hi) = (levels[0], levels[1]);
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!("bad sweep range {lo}..{hi}")));
        }
        let trunc = match a.truncation {
            Some(TruncationChoice::EpsDyadic) => eps_dyadic(hi)?,
            Some(TruncationChoice::UnitBall) => TruncationSpec::UnitBall,
            None if a.kind == FamilyKind::Example1 => eps_dyadic(hi)?,
            None => TruncationSpec::UnitBall,
        };
        let watch = match a.watch.unwrap_or(match a.kind {
            FamilyKind::Example2 => Watch::MinL1,
            _ => Watch::Sup,
        }) {
            Watch::Sup => SweepQuantity::Sup,
            Watch::MinL1 => SweepQuantity::MinL1,
        };
        let levels: Vec<usize> = (lo..=hi).collect();
        let sweep = truncation_sweep(a.kind, &a.rule, &trunc, &levels, watch, &a.threshold)?;
        let text = match format {
            Format::Text => format!("\n{}", report::sweep_text(&sweep)),
            Format::Json => format!("{}\n", json!({ "sweep": report::sweep_json(&sweep) })),
        };
        write_out(out, &text)?;
    }
    Ok(code)
}

fn load_phi(arg: &PhiArg) -> Result<NFunction> {
    let text = if arg.phi.trim_start().starts_with('{') {
        arg.phi.clone()
    } else {
        let path = Path::new(&arg.phi);
        std::fs::read_to_string(path).map_err(|e| io_err(path, e))?
    };
    serde_json::from_str(&text).map_err(|e| Error::InvalidNFunction(e.to_string()))
}

fn cmd_orlicz(c: &OrliczCommand, format: Format, out: &mut dyn Write) -> Result<i32> {
    let text = match c {
        OrliczCommand::EpsToPhi { eps } => {
            let phi = orlicz::eps_to_nfunction(&EpsSequence::new(eps.clone())?);
            let checks: Vec<(usize, Rational, Rational)> = (1..=eps.len())
                .map(|k| {
                    let need = eps[..k].iter().map(|e| e.recip()).max().expect("k >= 1");
                    let at = phi.evaluate(&int(k as i64))?;
                    Ok((k, at, need))
                })
                .collect::<Result<_>>()?;
            match format {
                Format::Text => {
                    let mut s = phi_text(&phi);
                    s.push_str(&format!("{:>3}  {:<28}{}\n", "k", "phi(k)", "max_{i<=k} 1/eps_i"));
                    for (k, at, need) in &checks {
                        s.push_str(&format!("{k:>3}  {:<28}{need}\n", scalar(at)));
                    }
                    s
                }
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "phi": serde_json::to_value(&phi).expect("serializable"),
                        "checks": checks.iter().map(|(k, at, need)| json!({
                            "k": k, "phi": scalar_json(at), "required": need.to_string(),
                        })).collect::<Vec<_>>(),
                    })
                ),
            }
        }
        OrliczCommand::PhiToEps { phi, k } => {
            let phi = load_phi(phi)?;
            let eps = orlicz::nfunction_to_eps(&phi, *k)?;
            let bound = orlicz::modular_bound(&phi, *k);
            match format {
                Format::Text => {
                    let mut s = format!("{:>3}  {}\n", "k", "eps_k");
                    for (i, e) in eps.values().iter().enumerate() {
                        s.push_str(&format!("{:>3}  {}\n", i + 1, scalar(e)));
                    }
                    s.push_str(&format!("modular bound  {}\n", scalar(&bound)));
                    s
                }
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "eps": eps.values().iter().map(scalar_json).collect::<Vec<_>>(),
                        "modular_bound": scalar_json(&bound),
                    })
                ),
            }
        }
        OrliczCommand::Norm {
            phi,
            values,
            probs,
            tol,
        } => {
            let phi = load_phi(phi)?;
            let space = match probs {
                Some(p) => FiniteProbSpace::from_probs(p.clone())?,
                None => FiniteProbSpace::uniform(values.len())?,
            };
            let x = RandomVariable::new(&space, values.clone())?;
            let b = orlicz::luxemburg_norm(&x, &phi, tol)?;
            let inside = orlicz::in_unit_ball(&x, &phi);
            match format {
                Format::Text => format!(
                    "norm in  [{}, {}]\nlo       {}\nhi       {}\nunit ball  {}\n",
                    b.lo,
                    b.hi,
                    scalar(&b.lo),
                    scalar(&b.hi),
                    if inside { "inside" } else { "outside" }
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "lo": scalar_json(&b.lo),
                        "hi": scalar_json(&b.hi),
                        "in_unit_ball": inside,
                    })
                ),
            }
        }
    };
    write_out(out, &text)?;
    Ok(0)
}

fn phi_text(phi: &NFunction) -> String {
    let mut s = format!("{:<12}{}\n", "t", "phi(t)");
    for (t, v) in phi.knots() {
        s.push_str(&format!("{:<12}{}\n", t.to_string(), v));
    }
    s.push_str(&format!(
        "tail: phi(t_last) + {} (t - t_last) + {} (t - t_last)^2\n",
        phi.tail_slope(),
        phi.tail_quad()
    ));
    s
}

