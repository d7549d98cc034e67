//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage or parameter error, 3 infeasible parameters.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qarith::adders::{build_adder, route_vbe_ntc, vbe_line_order, AdderKind};
use qarith::arch::{route_ntc_greedy, Arch, LineOrder};
use qarith::cost::{self, Algo, ArchKind, ModelParams, Params, SweepSpec, SweepVar};
use qarith::modarith::{build_deferred_accumulator, build_modadd_const, IndirectionParams, ModMode};
use qarith::pipeline::{build_modexp, AlgoParams, ModuloChoice};
use qarith::report::{self, CostRow, Format};
use qarith::sched::schedule_asap;
use qarith::{resolve_seed, Error};

#[derive(Parser)]
#[command(name = "qarith", version, about = "Reversible arithmetic for modular exponentiation")]
struct Cli {
    /// Output format for tables.
    #[arg(long, global = true, default_value = "csv")]
    format: FormatArg,
    /// Seed for sampled checks; QARITH_SEED takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArchArg {
    Ac,
    Ntc,
}

impl From<ArchArg> for ArchKind {
    fn from(a: ArchArg) -> ArchKind {
        match a {
            ArchArg::Ac => ArchKind::Ac,
            ArchArg::Ntc => ArchKind::Ntc,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a circuit and print it as JSON.
    Build {
        #[command(subcommand)]
        what: BuildCmd,
    },
    /// Run the exhaustive battery, or check one exponentiation circuit.
    Verify {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Delete one gate from every circuit first; the run must fail.
        #[arg(long)]
        mutate: bool,
        #[command(flatten)]
        modexp: Option<ModexpArgs>,
    },
    /// Schedule an adder and print its slots as JSON.
    Schedule {
        #[arg(long)]
        adder: AdderKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "ac")]
        arch: ArchArg,
        /// JSON array of qubit indices giving the line order.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Evaluate a named formula or an algorithm's cost.
    Cost {
        #[arg(long, conflicts_with = "algo")]
        formula: Option<String>,
        /// Formula parameters as `name=value`.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, i64)>,
        #[arg(long)]
        algo: Option<Algo>,
        #[arg(long, default_value = "ac")]
        arch: ArchArg,
        #[command(flatten)]
        over: ModelArgs,
    },
    /// Best parameters for an algorithm under a space budget.
    Optimize {
        #[arg(long)]
        algo: Algo,
        #[arg(long, default_value = "ac")]
        arch: ArchArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        space_multiple: usize,
    },
    /// Optimize over a range of sizes or space budgets.
    Sweep {
        #[arg(long)]
        algo: Algo,
        #[arg(long, default_value = "ac")]
        arch: ArchArg,
        #[arg(long, value_enum)]
        var: VarArg,
        /// `a,b,c` or `lo..hi:step` (inclusive).
        #[arg(long, value_parser = parse_range)]
        range: List,
        /// The fixed space multiple (size sweeps) or `n` (space sweeps).
        #[arg(long)]
        fixed: usize,
    },
    /// Regenerate a results table.
    Report {
        #[command(subcommand)]
        what: ReportCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VarArg {
    N,
    Space,
}

#[derive(Args, Default)]
struct ModelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args, Clone)]
#[group(requires_all = ["algo", "n", "modulus", "x"], multiple = true)]
struct ModexpArgs {
    #[arg(long, required = false)]
    algo: Algo,
    #[arg(long, required = false)]
    n: usize,
    #[arg(long, required = false)]
    modulus: u64,
    #[arg(long, required = false)]
    x: u64,
    /// Override the adder family (marks the run custom).
    #[arg(long)]
    adder: Option<AdderKind>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    /// Deferred-modulo width; 0 selects the three-adder modulo.
    #[arg(long)]
    p: Option<usize>,
    /// Fail with exit code 3 if the model space exceeds this multiple of n.
    #[arg(long)]
    space_multiple: Option<usize>,
}

impl ModexpArgs {
    fn params(&self) -> qarith::Result<AlgoParams> {
        let mut ap = AlgoParams::preset(self.algo, self.n, self.modulus, self.x)?;
        let preset = ap.clone();
        if let Some(a) = self.adder {
            ap.adder = a;
        }
        if let Some(s) = self.s {
            ap.s = s;
        }
        if let Some(w) = self.w {
            ap.w = w;
        }
        if let Some(p) = self.p {
            ap.modulo = if p == 0 { ModuloChoice::ThreeAdder } else { ModuloChoice::Deferred { p } };
        }
        ap.space_multiple = self.space_multiple;
        ap.custom = ap.adder != preset.adder || ap.s != preset.s || ap.w != preset.w || ap.modulo != preset.modulo;
        Ok(ap)
    }
}

#[derive(Subcommand)]
enum BuildCmd {
    Adder {
        #[arg(long)]
        adder: AdderKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// `|u> -> |u + addend mod N>`.
    Modadd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        addend: u64,
        #[arg(long, default_value = "cuccaro")]
        adder: AdderKind,
        /// Use the five-call form instead of three calls.
        #[arg(long)]
        five: bool,
    },
    /// Accumulate constants with deferred reduction.
    Deferred {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        p: usize,
        #[arg(long, value_delimiter = ',')]
        addends: Vec<u64>,
        #[arg(long, default_value = "cuccaro")]
        adder: AdderKind,
    },
    Modexp(ModexpArgs),
    /// The indirection table for one window, as decimal strings.
    Table {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        w: usize,
        /// Exponent bit where the window starts.
        #[arg(long, default_value_t = 0)]
        shift: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// 128-bit latency of every algorithm on both architectures.
    Latency {
        #[arg(long, default_value_t = 100)]
        space_multiple: usize,
    },
    /// Optimized latency against problem size.
    Sizes {
        #[arg(long, default_value_t = 100)]
        space_multiple: usize,
        #[arg(long, value_parser = parse_range, default_value = "8,16,32,64,128")]
        n: List,
    },
    /// Optimized latency against the space budget.
    Space {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, value_parser = parse_range, default_value = "20..400:20")]
        multiples: List,
    },
    /// The parameter sets.
    Params,
    /// Measured adder depths next to their closed forms.
    Adders {
        #[arg(long, value_parser = parse_range, default_value = "4,8,16,32,64")]
        n: List,
    },
    /// The VBE adder routed onto a line.
    Line {
        #[arg(long, value_parser = parse_range, default_value = "3..16:1")]
        n: List,
    },
}

fn parse_kv(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|e| format!("{k}: {e}"))?))
}

#[derive(Clone)]
struct List(Vec<usize>);

fn parse_range(s: &str) -> Result<List, String> {
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step == 0 || lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        return Ok(List((lo..=hi).step_by(step).collect()));
    }
    s.split(',').map(|x| x.trim().parse().map_err(|e| format!("`{x}`: {e}"))).collect::<Result<_, _>>().map(List)
}

enum Fail {
    Verify(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Fail {
        Fail::Lib(e.into())
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn run(cli: Cli) -> Result<String, Fail> {
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let seed = resolve_seed(cli.seed);
    Ok(match cli.cmd {
        Cmd::Build { what } => build(what)?,
        Cmd::Verify { max_n, mutate, modexp } => {
            let (pass, text) = match modexp {
                Some(args) => {
                    let b = build_modexp(&args.params()?)?;
                    let r = report::verify_modexp_build(&b, seed)?;
                    (r.pass, json(&r))
                }
                None => {
                    let r = report::verify_suite(max_n, mutate, seed)?;
                    (r.pass, json(&r))
                }
            };
            if !pass {
                return Err(Fail::Verify(text));
            }
            text
        }
        Cmd::Schedule { adder, n, m, arch, layout } => {
            let sc = match arch {
                ArchArg::Ac => schedule_asap(&build_adder(adder, n, m)?.circuit, &Arch::Ac)?,
                ArchArg::Ntc => {
                    let r = match (&layout, adder) {
                        (None, AdderKind::Vbe) => route_vbe_ntc(n)?.1,
                        _ => {
                            let blk = build_adder(adder, n, m)?;
                            let order = match &layout {
                                Some(path) => {
                                    let v: Vec<usize> = serde_json::from_str(&std::fs::read_to_string(path)?)
                                        .map_err(|e| Error::Parse(format!("layout: {e}")))?;
                                    LineOrder::new(v)?
                                }
                                None if adder == AdderKind::Vbe => vbe_line_order(&blk)?,
                                None => LineOrder::identity(blk.circuit.num_qubits()),
                            };
                            route_ntc_greedy(&blk.circuit, &order)?
                        }
                    };
                    schedule_asap(&r.circuit, &Arch::ntc_identity(r.circuit.num_qubits()))?
                }
            };
            eprintln!("slots {} depth {} peak concurrency {}", sc.num_slots(), sc.depth(), sc.max_concurrency());
            sc.to_json() + "\n"
        }
        Cmd::Cost { formula, params, algo, arch, over } => match (formula, algo) {
            (Some(name), _) => {
                let p: Params = params.into_iter().collect();
                json(&serde_json::json!({ "formula": name, "value": cost::eval(&name, &p)? }))
            }
            (None, Some(algo)) => {
                let n = over.n.unwrap_or(128);
                let base = AlgoParams::preset(algo, n, 0, 0)?.model();
                let mp = ModelParams {
                    n,
                    s: over.s.unwrap_or(base.s),
                    w: over.w.unwrap_or(base.w),
                    p: over.p.unwrap_or(base.p),
                    m: over.m.unwrap_or(base.m),
                };
                let e = cost::algo_eval(algo, arch.into(), &mp)?;
                report::rows_to_string(&[CostRow::from_eval(&e, mp != base)], format)?
            }
            (None, None) => return Err(Error::Param("cost needs --formula or --algo".into()).into()),
        },
        Cmd::Optimize { algo, arch, n, space_multiple } => {
            let e = cost::optimize(algo, arch.into(), n, space_multiple * n)?;
            report::rows_to_string(&[CostRow::from_eval(&e, false)], format)?
        }
        Cmd::Sweep { algo, arch, var, range, fixed } => {
            let var = match var {
                VarArg::N => SweepVar::N,
                VarArg::Space => SweepVar::SpaceMultiple,
            };
            let range = range.0;
            let rows = cost::sweep(&SweepSpec { algo, arch: arch.into(), var, range, fixed })?;
            let rows: Vec<CostRow> = rows.iter().map(|r| CostRow::from_eval(&r.eval, false)).collect();
            report::rows_to_string(&rows, format)?
        }
        Cmd::Report { what } => match what {
            ReportCmd::Latency { space_multiple } => {
                report::latency_rows_to_string(&report::latency_table(space_multiple)?, format)?
            }
            ReportCmd::Sizes { space_multiple, n } => {
                                report::rows_to_string(&report::sizes_table(&n.0, space_multiple)?, format)?
            }
            ReportCmd::Space { n, multiples } => {
                let rows = report::space_table(n, &multiples.0)?;
                for (algo, f) in report::flatness(&rows, 240) {
                    eprintln!("{algo}: largest change beyond 240n is {:.2}%", 100.0 * f);
                }
                report::rows_to_string(&rows, format)?
            }
            ReportCmd::Params => report::rows_to_string(&report::params_table()?, format)?,
            ReportCmd::Adders { n } => {
                                report::rows_to_string(&report::adders_table(&n.0)?, format)?
            }
            ReportCmd::Line { n } => {
                                report::rows_to_string(&report::line_adder_table(&n.0)?, format)?
            }
        },
    })
}

fn build(what: BuildCmd) -> Result<String, Fail> {
    let c = match what {
        BuildCmd::Adder { adder, n, m } => build_adder(adder, n, m)?.circuit,
        BuildCmd::Modadd { n, modulus, addend, adder, five } => {
            let mode = if five { ModMode::Vbe } else { ModMode::ThreeAdder };
            build_modadd_const(n, modulus, addend, mode, adder)?.circuit
        }
        BuildCmd::Deferred { n, modulus, p, addends, adder } => {
            build_deferred_accumulator(n, modulus, p, &addends, adder, None)?.circuit
        }
        BuildCmd::Modexp(args) => {
            let b = build_modexp(&args.params()?)?;
            eprintln!(
                "{} qubits, {} gates, {} adder calls (plan {})",
                b.circuit.num_qubits(),
                b.circuit.gates.len(),
                b.adder_calls,
                b.predicted_adder_calls
            );
            b.circuit
        }
        BuildCmd::Table { x, modulus, w, shift } => {
            let t = IndirectionParams::powers(x, modulus, w, shift)?;
            return Ok(json(&t.table.iter().map(u64::to_string).collect::<Vec<_>>()));
        }
    };
    eprintln!("{} qubits, totals {}", c.num_qubits(), c.totals());
    Ok(c.to_json() + "\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let emit = |text: &str| -> std::io::Result<()> {
        match &out {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    };
    let code = match run(cli) {
        Ok(text) => emit(&text).map(|_| 0).unwrap_or(2),
        Err(Fail::Verify(text)) => {
            let _ = emit(&text);
            eprintln!("verification failed");
            1
        }
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => 3,
                _ => 2,
            }
        }
    };
    ExitCode::from(code)
}
