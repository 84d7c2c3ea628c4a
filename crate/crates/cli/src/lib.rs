//! `densikit` command-line front end.
//!
//! Exit codes: 0 success, 2 malformed input, 3 mathematical domain error,
//! 4 exhausted budget.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use densikit::engine::EngineConfig;
use densikit::exact::FactoredInt;
use densikit::group::{catalog, GroupSpec, SpecFile};
use densikit::level::{DeltaOracle, LevelConfig};
use densikit::scan::{has_transvection_generator, scan_pi_with};
use densikit::Error;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "densikit", version, about = "Levels and congruence quotients of dense S-integral groups")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in group, e.g. G1, G_s:11/3, H4sp:27/2:29/3
    #[arg(long)]
    catalog: Option<String>,
    /// JSON group file
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Largest orbit a stabilizer-chain level may hold
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct PiArgs {
    /// Nonsurjective primes, comma separated ("none" for the empty set);
    /// overrides the group's own set
    #[arg(long)]
    pi: Option<String>,
    /// Scan bound used when no prime set is known
    #[arg(long, default_value_t = 200)]
    pi_bound: u64,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Coefficient ring Z[1/mu]
    Ring(Common),
    /// Generators reduced modulo m
    Reduce {
        #[command(flatten)]
        common: Common,
        /// Modulus, plain or factored: 36 or 2^2*3^2
        #[arg(short = 'm')]
        modulus: String,
    },
    /// Index of the image modulo m
    Delta {
        #[command(flatten)]
        common: Common,
        /// Modulus, plain or factored: 36 or 2^2*3^2
        #[arg(short = 'm')]
        modulus: String,
    },
    /// Primes up to a bound where the image is not the full group
    PiScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        pi_bound: u64,
    },
    /// Prime support of the level
    PiTilde {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pi: PiArgs,
    },
    /// Full level report with the evaluation trace
    Level {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pi: PiArgs,
    },
    /// Level and index of the congruence closure
    Closure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pi: PiArgs,
    },
    /// Structure of the image modulo m
    Quotient {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pi: PiArgs,
        /// Modulus, plain or factored: 36 or 2^2*3^2
        #[arg(short = 'm')]
        modulus: String,
    },
    /// Whether the group surjects onto every congruence quotient
    Profinite {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pi: PiArgs,
    },
    /// List catalog ids, or export one as a group file
    Catalog {
        #[arg(long)]
        export: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_parse() {
        EXIT_PARSE
    } else if e.is_resource() {
        EXIT_RESOURCE
    } else {
        EXIT_DOMAIN
    }
}

fn load(source: &Source) -> Result<GroupSpec, Error> {
    match (&source.catalog, &source.file) {
        (Some(id), _) => catalog::lookup(id),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            SpecFile::from_json(&text)?.to_spec()
        }
        (None, None) => Err(Error::Parse("no group given".into())),
    }
}

fn parse_pi(text: &str) -> Result<BTreeSet<u64>, Error> {
    let t = text.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("none") {
        return Ok(BTreeSet::new());
    }
    t.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad prime {p:?} in --pi")))
        })
        .collect()
}

fn config(common: &Common, scan_bound: u64) -> LevelConfig {
    let mut engine = EngineConfig::default();
    if let Some(b) = common.budget {
        engine.chain.orbit_budget = b;
    }
    LevelConfig {
        engine,
        scan_bound,
        ..LevelConfig::default()
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            let s = serde_json::to_string_pretty(value).expect("reports serialize");
            writeln!(self.out, "{s}").ok();
        } else {
            writeln!(self.out, "{}", text()).ok();
        }
    }

    fn warn(&mut self, msg: &str) {
        writeln!(self.err, "warning: {msg}").ok();
    }
}

/// The prime set to use and whether it is certified.
fn resolve_pi(oracle: &DeltaOracle<'_>, pi: &PiArgs, ctx: &mut Ctx<'_>) -> Result<(BTreeSet<u64>, bool), Error> {
    if let Some(text) = &pi.pi {
        return Ok((parse_pi(text)?, true));
    }
    if let Some(p) = oracle.spec().pi() {
        return Ok((p.clone(), true));
    }
    let scan = scan_pi_with(oracle, pi.pi_bound)?;
    for failure in scan.failures() {
        ctx.warn(&format!(
            "prime {} not tested: {}",
            failure.prime,
            failure.error.as_deref().unwrap_or("")
        ));
    }
    ctx.warn(&format!(
        "using primes {:?} from an uncertified scan up to {}",
        scan.nonsurjective, pi.pi_bound
    ));
    Ok((scan.nonsurjective, false))
}

fn list(v: impl IntoIterator<Item = u64>) -> String {
    let items: Vec<String> = v.into_iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn label(spec: &GroupSpec) -> String {
    spec.name().unwrap_or("group").to_owned()
}

fn execute(verb: Verb, ctx: &mut Ctx<'_>) -> Result<(), Error> {
    match verb {
        Verb::Catalog { export, .. } => match export {
            Some(id) => {
                let file = SpecFile::from_spec(&catalog::lookup(&id)?);
                writeln!(ctx.out, "{}", file.to_json()).ok();
            }
            None => {
                let ids = catalog::CATALOG_IDS;
                ctx.emit(&json!({ "ids": ids }), || ids.join("\n"));
            }
        },
        Verb::Ring(common) => {
            let spec = load(&common.source)?;
            let report = json!({
                "kind": spec.kind(),
                "degree": spec.degree(),
                "mu": spec.mu(),
                "s": spec.s_set(),
                "has_transvection_generator": has_transvection_generator(&spec),
            });
            ctx.emit(&report, || {
                format!("mu = {}\nS = {{{}}}", spec.mu(), spec.s_set().join(", "))
            });
        }
        Verb::Reduce { common, modulus } => {
            let spec = load(&common.source)?;
            let m = FactoredInt::parse(&modulus)?;
            let img = spec.reduce_mod(&m)?;
            let gens: Vec<Vec<Vec<u64>>> = (0..img.generators().len()).map(|i| img.generator_rows(i)).collect();
            ctx.emit(&json!({ "modulus": m, "generators": gens }), || {
                gens.iter()
                    .map(|g| {
                        g.iter()
                            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                            .collect::<Vec<_>>()
                            .join("\n")
                    })
                    .collect::<Vec<_>>()
                    .join("\n\n")
            });
        }
        Verb::Delta { common, modulus } => {
            let spec = load(&common.source)?;
            let m = FactoredInt::parse(&modulus)?;
            let oracle = DeltaOracle::new(&spec, config(&common, 200));
            let d = oracle.delta(&m)?;
            ctx.emit(&json!({ "modulus": m, "delta": d }), || d.to_string());
        }
        Verb::PiScan { common, pi_bound } => {
            let spec = load(&common.source)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi_bound));
            let scan = scan_pi_with(&oracle, pi_bound)?;
            ctx.emit(&scan, || {
                let mut lines = vec![format!(
                    "nonsurjective primes up to {}: {} (heuristic)",
                    scan.bound,
                    list(scan.nonsurjective.iter().copied())
                )];
                for c in &scan.checks {
                    match (&c.delta, &c.error) {
                        (Some(d), _) if !d.is_one() => lines.push(format!("delta({}) = {d}", c.prime)),
                        (_, Some(e)) => lines.push(format!("{}: {e}", c.prime)),
                        _ => {}
                    }
                }
                lines.join("\n")
            });
        }
        Verb::PiTilde { common, pi } => {
            let spec = load(&common.source)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi.pi_bound));
            let (set, certified) = resolve_pi(&oracle, &pi, ctx)?;
            let tilde = oracle.pi_tilde(&set)?;
            let report = json!({ "pi": set, "pi_certified": certified, "pi_tilde": tilde, "trace": oracle.trace() });
            ctx.emit(&report, || list(tilde.iter().copied()));
        }
        Verb::Level { common, pi } => {
            let spec = load(&common.source)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi.pi_bound));
            let (set, certified) = resolve_pi(&oracle, &pi, ctx)?;
            let report = oracle.report(&set, certified)?;
            ctx.emit(&report, || {
                let mut lines = vec![
                    format!("group: {}", label(&spec)),
                    format!("mu: {}", report.mu),
                    format!("pi: {}{}", list(report.pi.iter().copied()), if certified { "" } else { " (scanned)" }),
                    format!("pi_tilde: {}", list(report.pi_tilde.iter().copied())),
                    format!("level: {}", report.level),
                    format!("closure index: {}", report.closure_index),
                    "trace:".to_owned(),
                ];
                lines.extend(report.trace.iter().map(|t| format!("  delta({}) = {}", t.modulus, t.delta)));
                lines.extend(report.warnings.iter().map(|w| format!("warning: {w}")));
                lines.join("\n")
            });
        }
        Verb::Closure { common, pi } => {
            let spec = load(&common.source)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi.pi_bound));
            let (set, certified) = resolve_pi(&oracle, &pi, ctx)?;
            let r = oracle.report(&set, certified)?;
            let body = json!({ "group": label(&spec), "level": r.level, "index": r.closure_index, "pi_certified": certified });
            ctx.emit(&body, || format!("{} | {} | {}", label(&spec), r.level, r.closure_index));
        }
        Verb::Quotient { common, pi, modulus } => {
            let spec = load(&common.source)?;
            let m = FactoredInt::parse(&modulus)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi.pi_bound));
            let (set, certified) = resolve_pi(&oracle, &pi, ctx)?;
            let report = oracle.report(&set, certified)?;
            let q = oracle.quotient_descriptor(&report, &m)?;
            ctx.emit(&q, || {
                format!(
                    "m = {} = a*b*c with a = {}, b = {}, c = {}\nlevel {}\n|phi_m(H)| = {}\ndelta(m) = {}",
                    q.m, q.a, q.b, q.c, report.level, q.order_phi_m, q.delta
                )
            });
        }
        Verb::Profinite { common, pi } => {
            let spec = load(&common.source)?;
            let oracle = DeltaOracle::new(&spec, config(&common, pi.pi_bound));
            let (set, certified) = resolve_pi(&oracle, &pi, ctx)?;
            let dense = oracle.profinite_certificate(&set)?;
            let body = json!({ "pi": set, "pi_certified": certified, "profinitely_dense": dense });
            ctx.emit(&body, || dense.to_string());
        }
    }
    Ok(())
}

fn init_threads() {
    if let Some(n) = std::env::var("DENSIKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().ok();
    }
}

/// Run one command; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            write!(target, "{}", e.render()).ok();
            return code;
        }
    };
    init_threads();
    let json = match &cli.verb {
        Verb::Catalog { json, .. } => *json,
        Verb::Ring(c) => c.json,
        Verb::Reduce { common, .. }
        | Verb::Delta { common, .. }
        | Verb::PiScan { common, .. }
        | Verb::PiTilde { common, .. }
        | Verb::Level { common, .. }
        | Verb::Closure { common, .. }
        | Verb::Quotient { common, .. }
        | Verb::Profinite { common, .. } => common.json,
    };
    let mut ctx = Ctx { out, err, json };
    match execute(cli.verb, &mut ctx) {
        Ok(()) => 0,
        Err(e) => {
            writeln!(ctx.err, "error: {e}").ok();
            exit_code(&e)
        }
    }
}
