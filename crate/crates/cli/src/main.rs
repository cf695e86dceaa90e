use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pcpnet::aggregate::{aggregate, condorcet_winners, find_condorcet, is_condorcet};
use pcpnet::io::generate::{generate, Kind, Shape};
use pcpnet::io::{parse_net, parse_outcome, serialize, NetDocument};
use pcpnet::optimize::{det_optimal, map_optimal, optimal_prob};
use pcpnet::oracle::{completion_dominance_oracle, dominance_prob_oracle, entails_oracle};
use pcpnet::tree::{completion_dominance_exists, det_dominance, dominance_prob_fpt};
use pcpnet::{Error, Outcome, PcpNet, Structure};

/// Dominance and optimality queries on (probabilistic) CP-nets.
///
/// Net files start with `pcpnet`, `cpnet` or `cpnet incomplete`, declare
/// variables with `var NAME [<- PARENT, ...]` and give one rule per line,
/// e.g. `B | A=1 : 1>0 (0.2)`. Use `-` to read a file from stdin.
#[derive(Parser)]
#[command(name = "pcpnet", version)]
struct Cli {
    /// Worker threads for exhaustive enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a net file and summarise its structure.
    Validate { file: PathBuf },
    /// Probability (or truth) that FROM is preferred to TO.
    Dominance {
        file: PathBuf,
        /// Outcome such as `A=1,B=0`.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        json: bool,
    },
    /// Most probably optimal outcome, or the probability that OUTCOME is optimal.
    Optimal {
        file: PathBuf,
        #[arg(long)]
        outcome: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Summarise deterministic nets into one probabilistic net.
    Aggregate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output file, `-` for stdout.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hypercube-wise Condorcet winners.
    Condorcet {
        file: PathBuf,
        /// Test this outcome instead of searching.
        #[arg(long)]
        outcome: Option<String>,
        /// List every winner rather than the least one.
        #[arg(long, conflicts_with = "outcome")]
        all: bool,
    },
    /// Draw deterministic nets from a probabilistic one.
    Sample {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Print a seeded random net.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fpt,
    Linear,
    Oracle,
    Completion,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Fpt => "fpt",
            Method::Linear => "linear",
            Method::Oracle => "oracle",
            Method::Completion => "completion",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Chain,
    Star,
    Balanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Det,
    Pcp,
}

enum Failure {
    Usage(String),
    Input(String),
    Guard(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Guard(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_guard() {
            Failure::Guard(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// `%g`-style with 12 significant digits.
fn fmt_prob(p: f64) -> String {
    if p == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", p);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-5..12).contains(&exp) {
        format!("{}e{exp}", trim(mantissa.to_string()))
    } else {
        trim(format!("{:.*}", (11 - exp) as usize, p))
    }
}

fn read_source(path: &PathBuf) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn load(path: &PathBuf) -> CliResult<NetDocument> {
    let text = read_source(path)?;
    parse_net(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn outcome_arg(s: &Structure, flag: &str, text: &str) -> CliResult<Outcome> {
    parse_outcome(s, text).map_err(|e| match e {
        Error::Parse(p) => Failure::Usage(format!("{flag}: column {}: {}", p.column, p.message)),
        other => Failure::Usage(format!("{flag}: {other}")),
    })
}

fn emit(json: bool, text: String, value: Value) -> String {
    if json {
        value.to_string()
    } else {
        text
    }
}

fn dominance(doc: &NetDocument, from: &str, to: &str, method: Option<Method>, json: bool) -> CliResult<String> {
    let s = doc.structure();
    let o = outcome_arg(s, "--from", from)?;
    let o2 = outcome_arg(s, "--to", to)?;
    let slots = s.num_slots();
    let unsupported =
        |m: Method, kind: &str| Failure::Usage(format!("method `{}` does not apply to {kind} nets", m.name()));
    let boolean = |m: Method, b: bool| {
        emit(
            json,
            b.to_string(),
            json!({"query": "dominance", "result": b, "method": m.name(), "slots": slots}),
        )
    };
    match doc {
        NetDocument::Pcp(pn) => {
            let m = method.unwrap_or(Method::Fpt);
            let p = match m {
                Method::Fpt => dominance_prob_fpt(pn, &o, &o2)?,
                Method::Oracle => dominance_prob_oracle(pn, &o, &o2)?,
                _ => return Err(unsupported(m, "probabilistic")),
            };
            Ok(emit(
                json,
                fmt_prob(p),
                json!({"query": "dominance", "result": p, "method": m.name(), "slots": slots}),
            ))
        }
        NetDocument::Det(n) => {
            let m = method.unwrap_or(Method::Linear);
            let b = match m {
                Method::Linear => det_dominance(n, &o, &o2)?,
                Method::Oracle => entails_oracle(n, &o, &o2)?,
                Method::Fpt => dominance_prob_fpt(&PcpNet::degenerate(n), &o, &o2)? == 1.0,
                Method::Completion => completion_dominance_exists(&n.clone().into(), &o, &o2)?,
            };
            Ok(boolean(m, b))
        }
        NetDocument::Incomplete(n) => {
            let m = method.unwrap_or(Method::Completion);
            let b = match m {
                Method::Completion | Method::Linear => completion_dominance_exists(n, &o, &o2)?,
                Method::Oracle => completion_dominance_oracle(n, &o, &o2)?,
                Method::Fpt => return Err(unsupported(m, "incomplete")),
            };
            Ok(boolean(m, b))
        }
    }
}

fn optimal(doc: &NetDocument, outcome: Option<&str>, json: bool) -> CliResult<String> {
    let s = doc.structure();
    let slots = s.num_slots();
    let given = outcome.map(|t| outcome_arg(s, "--outcome", t)).transpose()?;
    match (doc, given) {
        (NetDocument::Pcp(pn), Some(o)) => {
            let p = optimal_prob(pn, &o)?;
            Ok(emit(
                json,
                fmt_prob(p),
                json!({"query": "optimal", "result": p, "method": "product", "slots": slots}),
            ))
        }
        (NetDocument::Pcp(pn), None) => {
            let (o, p) = map_optimal(pn)?;
            let shown = o.display(s).to_string();
            Ok(emit(
                json,
                format!("{shown}\n{}", fmt_prob(p)),
                json!({"query": "optimal", "result": shown, "probability": p, "method": "map", "slots": slots}),
            ))
        }
        (NetDocument::Det(n), Some(o)) => {
            let b = det_optimal(n) == o;
            Ok(emit(
                json,
                b.to_string(),
                json!({"query": "optimal", "result": b, "method": "sweep", "slots": slots}),
            ))
        }
        (NetDocument::Det(n), None) => {
            let shown = det_optimal(n).display(s).to_string();
            Ok(emit(
                json,
                shown.clone(),
                json!({"query": "optimal", "result": shown, "method": "sweep", "slots": slots}),
            ))
        }
        (NetDocument::Incomplete(_), _) => Err(Failure::Usage("optimal needs a complete or probabilistic net".into())),
    }
}

fn as_pcp(doc: NetDocument) -> CliResult<PcpNet> {
    match doc {
        NetDocument::Pcp(pn) => Ok(pn),
        NetDocument::Det(n) => Ok(PcpNet::degenerate(&n)),
        NetDocument::Incomplete(_) => Err(Failure::Usage(
            "this command needs a complete or probabilistic net".into(),
        )),
    }
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            let r = doc.structure().report();
            let absent = match &doc {
                NetDocument::Incomplete(n) => format!(", {} absent", n.absent_slots().len()),
                _ => String::new(),
            };
            Ok(format!(
                "ok: {}, {} variables, {} slots{absent}, {}",
                doc.kind().header(),
                r.variables,
                r.slots,
                r.shape
            ))
        }
        Command::Dominance {
            file,
            from,
            to,
            method,
            json,
        } => dominance(&load(&file)?, &from, &to, method, json),
        Command::Optimal { file, outcome, json } => optimal(&load(&file)?, outcome.as_deref(), json),
        Command::Aggregate { files, output } => {
            let nets = files
                .iter()
                .map(|f| match load(f)? {
                    NetDocument::Det(n) => Ok(n),
                    _ => Err(Failure::Input(format!(
                        "{}: aggregation takes `cpnet` files",
                        f.display()
                    ))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            let text = serialize(&NetDocument::Pcp(aggregate(&nets)?));
            if output.as_os_str() == "-" {
                Ok(text.trim_end().to_string())
            } else {
                fs::write(&output, text).map_err(|e| Failure::Input(format!("{}: {e}", output.display())))?;
                Ok(String::new())
            }
        }
        Command::Condorcet { file, outcome, all } => {
            let pn = as_pcp(load(&file)?)?;
            let s = pn.structure();
            if let Some(t) = outcome {
                let o = outcome_arg(s, "--outcome", &t)?;
                return Ok(is_condorcet(&pn, &o)?.to_string());
            }
            let winners = if all {
                condorcet_winners(&pn)?
            } else {
                find_condorcet(&pn)?.into_iter().collect()
            };
            if winners.is_empty() {
                Ok("none".into())
            } else {
                Ok(winners
                    .iter()
                    .map(|o| o.display(s).to_string())
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        }
        Command::Sample { file, seed, count } => {
            let pn = as_pcp(load(&file)?)?;
            Ok(pn
                .sample_nets(seed, count)
                .into_iter()
                .map(|n| serialize(&NetDocument::Det(n)))
                .collect::<Vec<_>>()
                .join("\n")
                .trim_end()
                .to_string())
        }
        Command::Gen {
            vars,
            shape,
            kind,
            seed,
        } => {
            let shape = match shape {
                ShapeArg::Chain => Shape::Chain,
                ShapeArg::Star => Shape::Star,
                ShapeArg::Balanced => Shape::Balanced,
            };
            let kind = match kind {
                KindArg::Det => Kind::Det,
                KindArg::Pcp => Kind::Pcp,
            };
            Ok(serialize(&generate(vars, shape, kind, seed)).trim_end().to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    // Formula construction recurses along root-to-leaf paths.
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    let result = worker
        .join()
        .unwrap_or_else(|_| Err(Failure::Input("internal error".into())));
    match result {
        Ok(out) => {
            if !out.is_empty() {
                let mut stdout = io::stdout().lock();
                let _ = writeln!(stdout, "{out}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_prob;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_prob(0.0), "0");
        assert_eq!(fmt_prob(1.0), "1");
        assert_eq!(fmt_prob(0.06), "0.06");
        assert_eq!(fmt_prob(0.2 * 0.3), "0.06");
        assert_eq!(fmt_prob(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_prob(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_prob(1.5e-7), "1.5e-7");
        assert_eq!(fmt_prob(0.000123), "0.000123");
    }
}
