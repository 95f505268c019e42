mod commands;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermat_cubic::search::{DEFAULT_MAX_DENOMINATOR, DEFAULT_MAX_HEIGHT};
use num_bigint::BigInt;

use crate::output::{CliError, Report};

/// Nontrivial solutions of x^3 + y^3 = k z^3 over Q(sqrt(d)).
#[derive(Debug, Parser)]
#[command(name = "fermat-cubic", version)]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Work over Q(sqrt(d)); square factors are removed.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_integer)]
    d: Option<BigInt>,

    /// Coefficient in x^3 + y^3 = k z^3.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_integer)]
    k: Option<BigInt>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Torsion, root numbers and the vanishing criterion for (d, k).
    Classify,
    /// Search for a nontrivial solution and report a verdict.
    Solve(SolveArgs),
    /// Apply one of the maps between solutions, K-points and Q-points.
    Transform(TransformArgs),
    /// Check a solution triple or a curve point.
    Verify(VerifyArgs),
    /// Scale a solution into the ring of integers.
    ClearDenominators(TripleArgs),
    /// Embedded facts about the curves with only trivial solutions.
    Reference(ReferenceArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Largest denominator e of x = m/e^2 to try.
    #[arg(long = "max-denom", default_value_t = DEFAULT_MAX_DENOMINATOR,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_denom: u64,

    /// Bound H on |m| / e^2.
    #[arg(long = "max-height", default_value_t = DEFAULT_MAX_HEIGHT,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_height: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    SolToKpoint,
    KpointToSol,
    KpointToQpoint,
    QpointToKpoint,
    QpointToSol,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(value_enum)]
    direction: Direction,

    #[command(flatten)]
    operands: Operands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// y^2 = x^3 - 432 d^3 k^2 over Q
    Q,
    /// y^2 = x^3 - 432 k^2 over Q(sqrt(d))
    K,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    operands: Operands,

    /// Curve a point is checked against.
    #[arg(long, value_enum, default_value_t = CurveKind::Q)]
    curve: CurveKind,
}

/// Either a triple `x y z` or a point given as `x y` / `--x --y`.
#[derive(Debug, Args)]
struct Operands {
    #[arg(allow_hyphen_values = true, num_args = 0..=3)]
    values: Vec<String>,

    #[arg(long, allow_hyphen_values = true, requires = "y")]
    x: Option<String>,

    #[arg(long, allow_hyphen_values = true, requires = "x")]
    y: Option<String>,
}

#[derive(Debug, Args)]
struct TripleArgs {
    #[arg(allow_hyphen_values = true, num_args = 3, required = true)]
    values: Vec<String>,
}

#[derive(Debug, Args)]
struct ReferenceArgs {
    /// Curve label, e.g. 27.a3.
    #[arg(long)]
    label: Option<String>,

    /// Compare against the LMFDB API.
    #[arg(long)]
    online: bool,

    /// Cache file for remote records.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn parse_integer(s: &str) -> Result<BigInt, String> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| format!("'{s}' is not an integer"))
}

fn main() -> ExitCode {
    let args = hoist_json(std::env::args_os());
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() && args.iter().any(|a| a == "--json") => {
            let err = CliError::usage(clap_message(&e));
            println!("{}", output::pretty(&err.to_json(subcommand_in(&args).as_deref())));
            return ExitCode::from(err.code);
        }
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let name = command_name(&cli.command);
    let result = fermat_cubic::reference::check_embedded_table()
        .map_err(|e| CliError::verification(e.to_string()))
        .and_then(|()| dispatch(cli));

    let code = match result {
        Ok(report) => {
            emit(&report, json, name);
            report.code
        }
        Err(err) => {
            if json {
                println!("{}", output::pretty(&err.to_json(Some(name))));
            } else {
                eprintln!("error: {}", err.message);
            }
            err.code
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(code)
}

/// Operands may start with '-', so a trailing `--json` would be read as one.
/// The flag is global and takes no value, so it can always move to the front.
fn hoist_json<I: IntoIterator<Item = std::ffi::OsString>>(args: I) -> Vec<std::ffi::OsString> {
    let mut args: Vec<_> = args.into_iter().collect();
    let end = args.iter().position(|a| a == "--").unwrap_or(args.len());
    if let Some(i) = args[..end].iter().skip(1).position(|a| a == "--json") {
        let flag = args.remove(i + 1);
        args.insert(1, flag);
    }
    args
}

/// First line of clap's rendered error, without the `error: ` prefix.
fn clap_message(e: &clap::Error) -> String {
    let text = e.render().to_string();
    let line = text.lines().next().unwrap_or_default();
    line.trim_start_matches("error: ").to_string()
}

fn subcommand_in(args: &[std::ffi::OsString]) -> Option<String> {
    use clap::CommandFactory;
    let known = Cli::command();
    args.iter()
        .skip(1)
        .find_map(|a| known.find_subcommand(a.to_str()?).map(|c| c.get_name().to_string()))
}

fn emit(report: &Report, json: bool, name: &str) {
    if json {
        println!("{}", output::pretty(&report.to_json(name)));
    } else {
        print!("{}", report.text);
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Classify => "classify",
        Command::Solve(_) => "solve",
        Command::Transform(_) => "transform",
        Command::Verify(_) => "verify",
        Command::ClearDenominators(_) => "clear-denominators",
        Command::Reference(_) => "reference",
    }
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    let k = cli.k.clone().unwrap_or_else(|| BigInt::from(1));
    let require_d = || cli.d.clone().ok_or_else(|| CliError::usage("--d is required for this command"));
    match cli.command {
        Command::Classify => commands::classify(&require_d()?, &k),
        Command::Solve(args) => commands::solve(&require_d()?, &k, args.max_denom, args.max_height),
        Command::Transform(args) => {
            let operands = args.operands.resolve()?;
            commands::transform(&require_d()?, &k, args.direction, &operands)
        }
        Command::Verify(args) => {
            let operands = args.operands.resolve()?;
            commands::verify(&require_d()?, &k, &operands, args.curve)
        }
        Command::ClearDenominators(args) => {
            commands::clear_denominators(&require_d()?, &k, &args.values)
        }
        Command::Reference(args) => commands::reference(
            cli.d.as_ref(),
            cli.k.as_ref(),
            args.label.as_deref(),
            args.online,
            args.cache,
        ),
    }
}

/// Operands after resolving `--x/--y` against positional values.
#[derive(Debug, Clone, PartialEq, Eq)]
enum OperandList {
    Triple([String; 3]),
    Point(String, String),
}

impl Operands {
    fn resolve(self) -> Result<OperandList, CliError> {
        match (self.x, self.y, self.values.len()) {
            (Some(x), Some(y), 0) => Ok(OperandList::Point(x, y)),
            (Some(_), Some(_), _) => Err(CliError::usage("give either --x/--y or positional operands, not both")),
            (None, None, 2) => {
                let [x, y]: [String; 2] = self.values.try_into().expect("length checked");
                Ok(OperandList::Point(x, y))
            }
            (None, None, 3) => {
                let triple: [String; 3] = self.values.try_into().expect("length checked");
                Ok(OperandList::Triple(triple))
            }
            _ => Err(CliError::usage("expected a triple `x y z` or a point `x y` (or --x/--y)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from(["fermat-cubic", "verify", "--d", "-2", "1", "-1", "0"]).unwrap();
        assert_eq!(cli.d, Some(BigInt::from(-2)));
        let Command::Verify(args) = cli.command else { panic!() };
        assert_eq!(args.operands.values, ["1", "-1", "0"]);
    }

    #[test]
    fn trailing_json_flag_is_not_an_operand() {
        let argv = ["fermat-cubic", "verify", "--d", "2", "28", "-136", "--json"].map(Into::into);
        let cli = Cli::try_parse_from(hoist_json(argv)).unwrap();
        assert!(cli.json);
        let Command::Verify(args) = cli.command else { panic!() };
        assert_eq!(args.operands.values, ["28", "-136"]);
    }

    #[test]
    fn operands_resolve() {
        let ops = |values: &[&str], x: Option<&str>, y: Option<&str>| Operands {
            values: values.iter().map(|s| s.to_string()).collect(),
            x: x.map(str::to_string),
            y: y.map(str::to_string),
        };
        assert_eq!(
            ops(&[], Some("28"), Some("136")).resolve().unwrap(),
            OperandList::Point("28".into(), "136".into())
        );
        assert!(matches!(ops(&["1", "2", "3"], None, None).resolve(), Ok(OperandList::Triple(_))));
        assert!(ops(&["1"], None, None).resolve().is_err());
        assert!(ops(&["1", "2"], Some("1"), Some("2")).resolve().is_err());
    }
}
