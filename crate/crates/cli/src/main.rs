use std::ffi::OsString;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use trianglecf::input::{parse_coordinates, parse_interval, root_powers};
use trianglecf::matrices::{convergent, recover_pair, recover_terminated};
use trianglecf::periodicity::{derive_cubic, eigen_eliminant, eliminant_report, transfer_matrix};
use trianglecf::realization::{parse_symbols, realize};
use trianglecf::simplex::{
    classify_nd, convergent_nd, decomposition_check, parse_symbol_list, recover_nd, sequence_nd, PointN,
};
use trianglecf::triangle::{classify, sequence, Point2, SequenceStatus};
use trianglecf::verify::{run_suite, SuiteParams};
use trianglecf::{Error, ExactNumber, IntPolynomial, RootSpec, Sign};

const EXIT_USAGE: u8 = 1;
const EXIT_PRECISION: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "trianglecf", version, about = "Triangle and simplex continued-fraction maps in exact arithmetic")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Jsonl, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct PointArgs {
    /// Point as `p/q,r/s,...`, `dec:<x>:<bits>` coordinates, or `root:<poly>:<lo>,<hi>:<powers>`
    #[arg(long, conflicts_with = "root")]
    point: Option<String>,
    /// Polynomial coefficients, constant term first, whose isolated root builds the point
    #[arg(long, allow_hyphen_values = true, requires = "interval")]
    root: Option<String>,
    /// Isolating interval `lo,hi` for --root
    #[arg(long)]
    interval: Option<String>,
    /// Number of powers (a, a^2, ...) taken from the root
    #[arg(long, default_value_t = 2)]
    powers: usize,
    /// Dimension of the point (defaults to the number of coordinates)
    #[arg(long)]
    n: Option<usize>,
    /// Working precision in bits for irrational inputs
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..))]
    bits: u32,
}

impl PointArgs {
    fn coordinates(&self) -> Result<Vec<ExactNumber>, Error> {
        let coords = match (&self.point, &self.root) {
            (Some(p), _) => parse_coordinates(p, self.n, self.bits)?,
            (None, Some(poly)) => {
                let (lo, hi) = parse_interval(self.interval.as_deref().unwrap_or_default())?;
                let count = self.n.unwrap_or(self.powers);
                root_powers(poly.parse()?, lo, hi, count, self.bits)?.coords().to_vec()
            }
            (None, None) => return Err(Error::Parse("give --point or --root".into())),
        };
        if let Some(n) = self.n {
            if coords.len() != n {
                return Err(Error::Parse(format!("expected {n} coordinates, got {}", coords.len())));
            }
        }
        if coords.last().map(|x| x.sign()) == Some(Sign::Zero) {
            return Err(Error::DegenerateInput("last coordinate is 0, a terminal state".into()));
        }
        Ok(coords)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Symbol sequence of a point, one record per step
    Seq {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long = "max", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        max_len: u64,
        /// Include the d-values of every step
        #[arg(long)]
        with_d: bool,
    },
    /// Estimate the point back from its convergent matrix
    Recover {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        /// Exit nonzero when no estimate is available
        #[arg(long)]
        strict: bool,
    },
    /// Nested triangle and centroid witness of a symbol prefix
    Realize {
        #[arg(long)]
        symbols: String,
    },
    /// Region of a point
    Classify {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Eliminant polynomial from `M_n M_m^-1`
    DerivePoly {
        /// Symbol stream, e.g. `1,1,1` or `0,(1,3),2` for dimension >= 3
        #[arg(long)]
        symbols: String,
        #[arg(long = "to")]
        n: usize,
        #[arg(long = "from")]
        m: usize,
        /// Dimension of the symbols
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Eliminate alpha instead of beta (pairs), or select coordinate j (dimension >= 3)
        #[arg(long)]
        swap: bool,
        #[arg(long, default_value_t = 1)]
        coordinate: usize,
        /// Expected factor, checked for exact divisibility
        #[arg(long, allow_hyphen_values = true)]
        factor: Option<String>,
        /// Interval isolating a root of --factor, for the residual
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..))]
        bits: u32,
    },
    /// Run a named verification suite
    Verify {
        suite: String,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        kmin: Option<u64>,
        #[arg(long)]
        kmax: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(64..))]
        bits: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_den: Option<u64>,
    },
    /// Sample the simplex and check the region decomposition
    DecompCheck {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

struct Output {
    format: Format,
    records: Vec<Value>,
}

impl Output {
    fn push(&mut self, v: Value) {
        self.records.push(v);
    }

    fn write_to(&self, mut out: impl Write) -> io::Result<()> {
        match self.format {
            Format::Jsonl => {
                for r in &self.records {
                    writeln!(out, "{r}")?;
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let header: Vec<String> = match self.records.first() {
                    Some(Value::Object(m)) => m.keys().cloned().collect(),
                    _ => Vec::new(),
                };
                w.write_record(&header)?;
                for r in &self.records {
                    let row: Vec<String> = header.iter().map(|h| cell(r.get(h))).collect();
                    w.write_record(&row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted => EXIT_PRECISION,
        Error::NotConverged(_) | Error::InconsistentInput(_) | Error::DecompositionViolation { .. } => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

fn num(x: &ExactNumber) -> Value {
    Value::String(x.to_display_string(40))
}

fn rat(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn status_code(s: SequenceStatus) -> u8 {
    match s {
        SequenceStatus::PrecisionExhausted => EXIT_PRECISION,
        _ => 0,
    }
}

fn cmd_seq(point: &PointArgs, max_len: usize, with_d: bool, out: &mut Output) -> Result<u8, Error> {
    let coords = point.coordinates()?;
    let mut rows: Vec<(String, Value)> = Vec::new();
    let status = if coords.len() == 2 {
        let rec = sequence(&Point2::new(coords[0].clone(), coords[1].clone())?, max_len);
        for (i, s) in rec.symbols.iter().enumerate() {
            rows.push((s.to_string(), json!([num(&rec.d_history[i + 3])])));
        }
        rec.status
    } else {
        let rec = sequence_nd(&PointN::new(coords)?, max_len);
        for (i, s) in rec.symbols.iter().enumerate() {
            rows.push((s.to_string(), Value::Array(rec.d_history[i + 1].iter().map(num).collect())));
        }
        rec.status
    };
    let last = rows.len();
    for (i, (symbol, d)) in rows.into_iter().enumerate() {
        let at_end = i + 1 == last && status != SequenceStatus::PrecisionExhausted;
        let mut r = Map::new();
        r.insert("k".into(), json!(i + 1));
        r.insert("symbol".into(), json!(symbol));
        r.insert("status".into(), json!(if at_end { status.as_str() } else { "ok" }));
        if with_d {
            r.insert("d".into(), d);
        }
        out.push(Value::Object(r));
    }
    if status == SequenceStatus::PrecisionExhausted || last == 0 {
        out.push(json!({"k": last + 1, "symbol": null, "status": status.as_str()}));
    }
    Ok(status_code(status))
}

fn residual(coords: &[ExactNumber], est: &[BigRational]) -> f64 {
    coords
        .iter()
        .zip(est)
        .map(|(x, e)| {
            let bound = match x {
                ExactNumber::Rational(r) => (r - e).abs(),
                ExactNumber::Float(f) => (f.midpoint() - e).abs() + f.radius(),
            };
            ExactNumber::Rational(bound).to_f64()
        })
        .fold(0.0, f64::max)
}

fn cmd_recover(point: &PointArgs, steps: usize, strict: bool, out: &mut Output) -> Result<u8, Error> {
    let coords = point.coordinates()?;
    let n = coords.len();
    let (estimate, used, status, method) = if n == 2 {
        let rec = sequence(&Point2::new(coords[0].clone(), coords[1].clone())?, steps);
        let k = rec.symbols.len();
        let terminal = (rec.d_history[k].as_rational(), rec.d_history[k + 1].as_rational());
        match (rec.status, terminal) {
            (SequenceStatus::Terminated, (Some(a), Some(b))) => {
                let (x, y) = recover_terminated(&rec.symbols, (a, b))?;
                (Some(vec![x, y]), k, rec.status, "terminal-state")
            }
            _ => match recover_pair(&convergent(&rec.symbols)) {
                Ok((x, y)) => (Some(vec![x, y]), k, rec.status, "cross-product"),
                Err(Error::NotConverged(_)) => (None, k, rec.status, "cross-product"),
                Err(e) => return Err(e),
            },
        }
    } else {
        let rec = sequence_nd(&PointN::new(coords.clone())?, steps);
        let m = convergent_nd(&rec.symbols, n)?;
        match recover_nd(&m, n) {
            Ok(v) => (Some(v), rec.symbols.len(), rec.status, "minors"),
            Err(Error::NotConverged(_)) => (None, rec.symbols.len(), rec.status, "minors"),
            Err(e) => return Err(e),
        }
    };
    let mut r = Map::new();
    r.insert("method".into(), json!(method));
    r.insert("steps_used".into(), json!(used));
    r.insert("sequence_status".into(), json!(status.as_str()));
    match &estimate {
        Some(est) => {
            r.insert("status".into(), json!("ok"));
            r.insert("estimate".into(), Value::Array(est.iter().map(rat).collect()));
            r.insert(
                "estimate_approx".into(),
                est.iter().map(|e| ExactNumber::Rational(e.clone()).to_f64()).collect::<Vec<_>>().into(),
            );
            r.insert("residual".into(), json!(residual(&coords, est)));
        }
        None => {
            r.insert("status".into(), json!("not-converged"));
        }
    }
    out.push(Value::Object(r));
    Ok(if estimate.is_none() && strict { EXIT_VERIFY } else { 0 })
}

fn cmd_realize(symbols: &str, out: &mut Output) -> Result<u8, Error> {
    let symbols = parse_symbols(symbols)?;
    if symbols.is_empty() {
        return Err(Error::Parse("need at least one symbol".into()));
    }
    let r = realize(&symbols);
    let vertices: Vec<Value> = r.region.vertices.iter().map(|(x, y)| json!([rat(x), rat(y)])).collect();
    out.push(json!({
        "symbols": symbols.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "vertices": vertices,
        "witness": [rat(&r.witness.0), rat(&r.witness.1)],
        "doubled_area": rat(&r.region.doubled_area()),
        "diameter_squared": rat(&r.region.diameter_squared()),
    }));
    Ok(0)
}

fn cmd_classify(point: &PointArgs, out: &mut Output) -> Result<u8, Error> {
    let coords = point.coordinates()?;
    let symbol = if coords.len() == 2 {
        classify(&Point2::new(coords[0].clone(), coords[1].clone())?)?.to_string()
    } else {
        classify_nd(&PointN::new(coords)?)?.to_string()
    };
    out.push(json!({ "symbol": symbol }));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_derive(
    symbols: &str,
    n: usize,
    m: usize,
    dim: usize,
    swap: bool,
    coordinate: usize,
    factor: Option<&str>,
    interval: Option<&str>,
    bits: u32,
    out: &mut Output,
) -> Result<u8, Error> {
    let poly = if dim == 2 {
        derive_cubic(&parse_symbols(symbols)?, n, m, swap)?
    } else {
        let s = parse_symbol_list(symbols)?;
        if m >= n || n > s.len() {
            return Err(Error::ContractViolation(format!("need m < n <= {}", s.len())));
        }
        let mn = convergent_nd(&s[..n], dim)?;
        let mm = convergent_nd(&s[..m], dim)?
            .inverse_unimodular()
            .ok_or_else(|| Error::ContractViolation("M_m is not unimodular".into()))?;
        eigen_eliminant(&mn.mul(&mm), coordinate)?
    };
    let factor: Option<IntPolynomial> = factor.map(str::parse).transpose()?;
    let root = match (&factor, interval) {
        (Some(f), Some(iv)) => {
            let (lo, hi) = parse_interval(iv)?;
            Some(trianglecf::numeric::refine_root(&RootSpec::new(f.clone(), lo, hi)?, bits))
        }
        _ => None,
    };
    let report = eliminant_report(&poly, factor.as_ref(), root.as_ref());
    let mut v = serde_json::to_value(&report).expect("serializable report");
    if dim == 2 {
        let q = transfer_matrix(&parse_symbols(symbols)?, n, m)?;
        v["transfer_matrix"] = q.to_json();
    }
    out.push(v);
    Ok(if report.factor_checked == Some(false) { EXIT_VERIFY } else { 0 })
}

fn run(cli: Cli, out: &mut Output) -> Result<u8, Error> {
    match cli.command {
        Command::Seq { point, max_len, with_d } => cmd_seq(&point, max_len as usize, with_d, out),
        Command::Recover { point, steps, strict } => cmd_recover(&point, steps as usize, strict, out),
        Command::Realize { symbols } => cmd_realize(&symbols, out),
        Command::Classify { point } => cmd_classify(&point, out),
        Command::DerivePoly { symbols, n, m, dim, swap, coordinate, factor, interval, bits } => cmd_derive(
            &symbols,
            n,
            m,
            dim,
            swap,
            coordinate,
            factor.as_deref(),
            interval.as_deref(),
            bits,
            out,
        ),
        Command::Verify { suite, k, kmin, kmax, steps, bits, n, samples, seed, max_den } => {
            let params = SuiteParams { kmin: k.or(kmin), kmax: k.or(kmax), steps, bits, n, samples, seed, max_den };
            let report = run_suite(&suite, &params)?;
            out.push(serde_json::to_value(&report).expect("serializable report"));
            Ok(if report.passed() { 0 } else { EXIT_VERIFY })
        }
        Command::DecompCheck { n, samples, seed } => {
            let report = decomposition_check(n, samples, seed)?;
            out.push(serde_json::to_value(&report).expect("serializable report"));
            Ok(if report.passed() { 0 } else { EXIT_VERIFY })
        }
    }
}

/// Parse `args` and run the command; the exit code and the records to print.
fn execute<I, T>(args: I) -> Result<(u8, Output), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let mut out = Output { format: cli.format, records: Vec::new() };
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    Ok((code, out))
}

fn main() -> ExitCode {
    let (code, out) = match execute(std::env::args_os()) {
        Ok(r) => r,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = out.write_to(io::stdout().lock()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn cli(args: &[&str]) -> (u8, Vec<Value>) {
        match execute(std::iter::once("trianglecf").chain(args.iter().copied())) {
            Ok((code, out)) => (code, out.records),
            Err(e) => (if e.use_stderr() { EXIT_USAGE } else { 0 }, Vec::new()),
        }
    }

    fn rat(s: &str) -> BigRational {
        s.parse().unwrap()
    }

    #[test]
    fn seq_matches_library() {
        for (a, b) in [("1/2", "1/3"), ("5/7", "2/9"), ("9973/10000", "1/10000")] {
            let (code, recs) = cli(&["seq", "--point", &format!("{a},{b}")]);
            assert_eq!(code, 0);
            let rec = sequence(&Point2::new(rat(a).into(), rat(b).into()).unwrap(), 1000);
            let got: Vec<&str> = recs.iter().map(|r| r["symbol"].as_str().unwrap()).collect();
            let want: Vec<String> = rec.symbols.iter().map(|s| s.to_string()).collect();
            assert_eq!(got, want);
            assert_eq!(recs.last().unwrap()["status"], "terminated");
        }
        assert_eq!(cli(&["seq", "--point", "1/2,1/3"]).1.len(), 2);
    }

    #[test]
    fn seq_on_period_one_root() {
        let (code, recs) = cli(&["seq", "--root", "-1,1,1,1", "--interval", "0,1", "--max", "50"]);
        assert_eq!(code, 0);
        assert_eq!(recs.len(), 50);
        assert!(recs.iter().all(|r| r["symbol"] == "1"));
        assert_eq!(recs[49]["status"], "truncated-at-max-length");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (_, out) = execute(["trianglecf", "--format", "csv", "seq", "--point", "1/2,1/3"]).unwrap();
        let mut buf = Vec::new();
        out.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["k,status,symbol", "1,ok,1", "2,terminated,1"]);
    }

    #[test]
    fn classify_and_realize_match_library() {
        let (_, recs) = cli(&["classify", "--point", "9/10,9/10,1/10"]);
        let p = PointN::from_rationals(&[rat("9/10"), rat("9/10"), rat("1/10")]).unwrap();
        assert_eq!(recs[0]["symbol"], classify_nd(&p).unwrap().to_string());
        assert_eq!(recs[0]["symbol"], "(1,3)");

        let (_, recs) = cli(&["realize", "--symbols", "2,0,1"]);
        let r = realize(&[2u32, 0, 1].map(BigUint::from));
        assert_eq!(recs[0]["witness"], json!([r.witness.0.to_string(), r.witness.1.to_string()]));
    }

    #[test]
    fn recover_is_exact_on_terminated_input() {
        let (code, recs) = cli(&["recover", "--point", "5/7,2/9"]);
        assert_eq!(code, 0);
        assert_eq!(recs[0]["estimate"], json!(["5/7", "2/9"]));
        assert_eq!(recs[0]["sequence_status"], "terminated");
    }

    #[test]
    fn derive_poly_matches_library() {
        let (code, recs) = cli(&["derive-poly", "--symbols", "2,2,2", "--to", "3", "--from", "2", "--factor", "-1,1,2,1"]);
        assert_eq!(code, 0);
        let lib = derive_cubic(&[2u32, 2, 2].map(BigUint::from), 3, 2, false).unwrap();
        assert_eq!(recs[0]["polynomial"], lib.to_string());
        assert_eq!(recs[0]["factor_checked"], true);
        let (code, _) = cli(&["derive-poly", "--symbols", "2,2,2", "--to", "3", "--from", "2", "--factor", "-1,1,3,1"]);
        assert_eq!(code, EXIT_VERIFY);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["seq", "--point", "1,0"]).0, EXIT_USAGE);
        assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(cli(&["verify", "nope"]).0, EXIT_USAGE);
        assert_eq!(cli(&["seq"]).0, EXIT_USAGE);
        assert_eq!(cli(&["seq", "--point", "1/2,1/3", "--max", "0"]).0, EXIT_USAGE);
        // a 64-bit root cannot carry 100 steps at k = 20
        let (code, recs) = cli(&["seq", "--root", "-1,1,20,1", "--interval", "0,1", "--bits", "64", "--max", "100"]);
        assert_eq!(code, EXIT_PRECISION);
        assert_eq!(recs.last().unwrap()["status"], "precision-exhausted");
        assert_eq!(cli(&["verify", "period1", "--k", "20", "--bits", "64"]).0, EXIT_VERIFY);
        assert_eq!(cli(&["verify", "derive", "--k", "3"]).0, 0);
    }
}
