//! `singcount`: point counts, normalized-count diagnostics, local and global
//! zeta data of affine schemes, and representation zeta data of finite groups.

mod cache;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use singcount_core::counting::{self, Budgets, Engine};
use singcount_core::diagnostics::{self, Thresholds};
use singcount_core::exact::format_rational;
use singcount_core::groups::{self, FiniteGroup, GroupBudgets, GroupData};
use singcount_core::rings::{LocalRingSpec, PrimePower, RingKind};
use singcount_core::schemes::{self, AffineScheme, SchemeDocument};
use singcount_core::zeta::{self, Normalization};
use singcount_core::Error;

use cache::{Cache, CacheKey};

#[derive(Parser, Debug)]
#[command(name = "singcount", version, about = "Exact point counts over finite local rings and related zeta data")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Enumeration budget (points or residue-field search nodes).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory of the count cache.
    #[arg(long, env = "SINGCOUNT_CACHE", global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |X(R)| for one finite local ring.
    Count {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        ring: LocalRingSpec,
        #[arg(long)]
        engine: Option<Engine>,
    },
    /// Normalized count |X(R)| / |R|^dim.
    H {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        ring: LocalRingSpec,
    },
    /// The m-th jet scheme, optionally counted over a ring.
    Jet {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ring: Option<LocalRingSpec>,
    },
    /// Normalized-count sweep and the rational-singularity report.
    Diagnose {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        q_list: Vec<PrimePower>,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "mixed,equal")]
        kinds: Vec<RingKind>,
        #[arg(long, default_value_t = Thresholds::default().s3_max)]
        s3_max: f64,
        #[arg(long, default_value_t = Thresholds::default().s3_growth_max)]
        s3_growth_max: f64,
    },
    /// Coefficients |X(Z/p^n)| of the local point-count series.
    ZetaLocal {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        m_max: u32,
        /// Also fit a rational function of at most this degree.
        #[arg(long)]
        fit: Option<usize>,
    },
    /// Igusa series coefficients, optionally with a rational fit.
    Igusa {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        m_max: u32,
        #[arg(long)]
        fit: Option<usize>,
    },
    /// Truncated Euler product of the local series at real s.
    ZetaGlobal {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 100)]
        p_max: u64,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(long, value_enum, default_value_t = NormArg::P)]
        normalization: NormArg,
    },
    /// Growth exponent of sum_(n <= N) |X(Z/n)|.
    Abscissa {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long = "n-max")]
        n_max: u64,
    },
    /// Running means (1/N) sum_(n <= N) |X(Z/n)| / n^dim.
    Cesaro {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long = "n-max")]
        n_max: u64,
    },
    /// Character degrees and zeta_G(s); with --p, the compact SL_d table.
    Repzeta {
        #[command(flatten)]
        group: GroupArg,
        /// Evaluation point.
        #[arg(long)]
        s: Option<f64>,
        /// Residue characteristic for the SL_d(Z/p^m) table.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        m_list: Vec<u32>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Genus for the table (zeta evaluated at 2n - 2).
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Number of 2n-tuples whose product of commutators is the identity.
    DefCount {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
    },
    /// Distribution of a product of n uniform commutators over classes.
    WordProb {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
    },
    /// Finite-level product of zeta_(SL_d(Z/p^m))(2n - 2) over p <= p_max.
    Adelic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        p_max: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Genus threshold by root system type.
    RsThreshold {
        #[arg(long = "type")]
        root_type: String,
        /// Dimension, required for exceptional types.
        #[arg(long)]
        dim: Option<u64>,
    },
    /// Compares counts over Z_q/p^m and F_q[t]/t^m.
    CrossCheck {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        q_list: Vec<PrimePower>,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
    },
}

#[derive(Args, Debug)]
struct SchemeArg {
    /// Scheme JSON file.
    #[arg(long)]
    scheme: PathBuf,
}

#[derive(Args, Debug)]
struct GroupArg {
    /// S3..S6, Q8, or SL<d>:<ring spec> such as SL2:mixed:3^1:1.
    #[arg(long, conflicts_with = "table")]
    group: Option<String>,
    /// Multiplication table file.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    P,
    Z,
}

/// A rendered result: every command supplies a JSON value and a text form,
/// and a CSV form where a table makes sense.
struct Report {
    text: String,
    json: Value,
    csv: Option<String>,
}

impl Report {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Report {
            text: text.into(),
            json,
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Budget(_)) => 3,
            CliError::Core(Error::Computation(_)) => 1,
            CliError::Core(_) | CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Context {
    budgets: Budgets,
    group_budgets: GroupBudgets,
    cache: Option<Cache>,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_scheme(path: &Path) -> CliResult<AffineScheme> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(schemes::load_scheme_json(&text)?)
}

fn load_group(arg: &GroupArg, budgets: &GroupBudgets) -> CliResult<FiniteGroup> {
    if let Some(path) = &arg.table {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(FiniteGroup::parse_table(name, &text)?);
    }
    let name = arg
        .group
        .as_deref()
        .ok_or_else(|| CliError::Usage("one of --group or --table is required".into()))?
        .trim();
    let upper = name.to_ascii_uppercase();
    if upper == "Q8" {
        return Ok(FiniteGroup::quaternion());
    }
    if let Some(n) = upper.strip_prefix('S').and_then(|r| r.parse::<usize>().ok()) {
        return Ok(FiniteGroup::symmetric(n)?);
    }
    if let Some((d, spec)) = upper.starts_with("SL").then(|| name[2..].split_once(':')).flatten() {
        let d: usize = d
            .parse()
            .map_err(|_| CliError::Usage(format!("bad matrix size in {name:?}")))?;
        let spec: LocalRingSpec = spec.to_ascii_lowercase().parse()?;
        return Ok(FiniteGroup::special_linear_over(d, spec, budgets.order)?);
    }
    Err(CliError::Usage(format!(
        "unknown group {name:?}; expected S3..S6, Q8 or SL<d>:<ring spec>"
    )))
}

/// Counts through the cache when one is configured.
fn cached_count(ctx: &Context, x: &AffineScheme, spec: LocalRingSpec, engine: Engine) -> CliResult<num_bigint::BigUint> {
    let key = CacheKey::new(&x.canonical_form(), &spec.to_string(), &engine.to_string());
    if let Some(cache) = &ctx.cache {
        if let Some(hit) = cache.get(&key) {
            if let Ok(n) = hit.parse() {
                return Ok(n);
            }
            eprintln!("warning: unparsable cached count {hit:?} ignored");
        }
    }
    let count = counting::count(x, spec, Some(engine), &ctx.budgets)?.count;
    if let Some(cache) = &ctx.cache {
        if let Err(e) = cache.put(&key, &count.to_string()) {
            eprintln!("warning: cache write failed: {e}");
        }
    }
    Ok(count)
}

fn rationals_csv(header: &str, rows: impl IntoIterator<Item = (String, BigRational)>) -> String {
    let mut out = format!("{header}\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", format_rational(&v));
    }
    out
}

fn run(cli: &Cli, ctx: &Context) -> CliResult<Report> {
    match &cli.command {
        Command::Count { scheme, ring, engine } => {
            let x = load_scheme(&scheme.scheme)?;
            let engine = engine.unwrap_or(Engine::Lift);
            let count = cached_count(ctx, &x, *ring, engine)?;
            let j = json!({"scheme": x.name, "ring": ring.to_string(), "engine": engine, "count": count.to_string()});
            Ok(Report::new(count.to_string(), j)
                .with_csv(format!("scheme,ring,engine,count\n{},{ring},{engine},{count}\n", x.name)))
        }
        Command::H { scheme, ring } => {
            let x = load_scheme(&scheme.scheme)?;
            let count = cached_count(ctx, &x, *ring, Engine::Lift)?;
            let e = counting::normalize(&x, *ring, &count);
            let h = format_rational(&e.h);
            Ok(Report::new(h.clone(), json!({"scheme": x.name, "ring": ring.to_string(), "entry": to_json(&e)}))
                .with_csv(format!(
                    "scheme,q,m,kind,count,h_num,h_den\n{},{},{},{},{},{},{}\n",
                    x.name,
                    e.q,
                    e.m,
                    e.kind,
                    e.count,
                    e.h.numer(),
                    e.h.denom()
                )))
        }
        Command::Jet { scheme, m, ring } => {
            let x = load_scheme(&scheme.scheme)?;
            let jet = schemes::jet_scheme(&x, *m);
            let doc = SchemeDocument::from_scheme(&jet);
            match ring {
                None => Ok(Report::new(jet.to_string(), to_json(&doc))),
                Some(spec) => {
                    let count = cached_count(ctx, &jet, *spec, Engine::Lift)?;
                    Ok(Report::new(count.to_string(), json!({"jet": to_json(&doc), "ring": spec.to_string(), "count": count.to_string()}))
                        .with_csv(format!("scheme,ring,count\n{},{spec},{count}\n", jet.name)))
                }
            }
        }
        Command::Diagnose {
            scheme,
            q_list,
            m_max,
            kinds,
            s3_max,
            s3_growth_max,
        } => {
            let x = load_scheme(&scheme.scheme)?;
            let table = diagnostics::h_sweep(&x, q_list, *m_max, kinds, &ctx.budgets);
            let report = diagnostics::rs_report(
                &table,
                Thresholds {
                    s3_max: *s3_max,
                    s3_growth_max: *s3_growth_max,
                },
            );
            let verdict = to_json(&report.verdict);
            let mut text = format!("{}: {} ({})\n", report.scheme, verdict.as_str().unwrap_or_default(), report.label);
            for r in &report.reasons {
                let _ = writeln!(text, "  {r}");
            }
            for s in &report.stats {
                let _ = writeln!(text, "  q={} {}: s3={} c={}", s.q, s.kind, format_rational(&s.s3), s.lang_weil.c);
            }
            for f in &table.failures {
                let _ = writeln!(text, "  failed: {f:?}");
            }
            Ok(Report::new(text.trim_end(), json!({"table": to_json(&table), "report": to_json(&report)}))
                .with_csv(table.to_csv()))
        }
        Command::ZetaLocal { scheme, p, m_max, fit } => {
            let x = load_scheme(&scheme.scheme)?;
            let series = zeta::local_p_series(&x, *p, *m_max, &ctx.budgets)?;
            series_report(series, *fit)
        }
        Command::Igusa { scheme, p, m_max, fit } => {
            let x = load_scheme(&scheme.scheme)?;
            let series = zeta::igusa_z_series(&x, *p, *m_max, &ctx.budgets)?;
            series_report(series, *fit)
        }
        Command::ZetaGlobal {
            scheme,
            s,
            p_max,
            m_max,
            normalization,
        } => {
            let x = load_scheme(&scheme.scheme)?;
            let norm = match normalization {
                NormArg::P => Normalization::P,
                NormArg::Z => Normalization::Z,
            };
            let e = zeta::global_euler_product(&x, *s, *p_max, *m_max, norm, &ctx.budgets)?;
            let mut csv = String::from("p,level,factor\n");
            for ((p, l), f) in e.primes.iter().zip(&e.levels).zip(&e.factors) {
                let _ = writeln!(csv, "{p},{l},{f}");
            }
            Ok(Report::new(format!("{}", e.value), to_json(&e)).with_csv(csv))
        }
        Command::Abscissa { scheme, n_max } => {
            let x = load_scheme(&scheme.scheme)?;
            let a = zeta::abscissa_estimate(&x, *n_max, &ctx.budgets)?;
            let mut csv = String::from("n,exponent\n");
            for (n, e) in &a.partial_exponents {
                let _ = writeln!(csv, "{n},{e}");
            }
            Ok(Report::new(format!("{}", a.slope), to_json(&a)).with_csv(csv))
        }
        Command::Cesaro { scheme, n_max } => {
            let x = load_scheme(&scheme.scheme)?;
            let means = zeta::cesaro_mean(&x, *n_max, &ctx.budgets)?;
            let last = means.last().map(format_rational).unwrap_or_default();
            let j = json!({"scheme": x.name, "means": means.iter().map(format_rational).collect::<Vec<_>>()});
            let csv = rationals_csv("n,mean", means.into_iter().enumerate().map(|(i, v)| ((i + 1).to_string(), v)));
            Ok(Report::new(last, j).with_csv(csv))
        }
        Command::Repzeta {
            group,
            s,
            p,
            m_list,
            d,
            n,
        } => {
            if let Some(p) = p {
                let rows = groups::compact_zeta_table(*d, *p, m_list, *n, &ctx.group_budgets)?;
                let mut text = String::new();
                for r in &rows {
                    let _ = writeln!(
                        text,
                        "SL{d}(Z/{p}^{}) n={}: zeta={} characters={} agree={} q(zeta-1)={}",
                        r.m,
                        r.n,
                        format_rational(&r.zeta_frobenius),
                        format_rational(&r.zeta_characters),
                        r.agree,
                        format_rational(&r.q_times_zeta_minus_1)
                    );
                }
                return Ok(Report::new(text.trim_end(), to_json(&rows)).with_csv(groups::zeta_table_csv(&rows)));
            }
            let g = load_group(group, &ctx.group_budgets)?;
            let classes = groups::conj_classes(&g);
            let degrees = groups::character_degrees(&g, &classes)?;
            let mut j = json!({"group": g.name(), "order": g.order(), "classes": classes.len(), "degrees": degrees.degrees});
            let mut text = format!("degrees {:?}", degrees.degrees);
            if let Some(s) = s {
                if s.fract() == 0.0 && s.abs() < 1e9 {
                    let v = groups::rep_zeta_eval(&degrees.degrees, *s as i64);
                    j["zeta"] = json!(format_rational(&v));
                    let _ = write!(text, "\nzeta({s}) = {}", format_rational(&v));
                } else {
                    let v = groups::rep_zeta_eval_f64(&degrees.degrees, *s);
                    j["zeta"] = json!(v);
                    let _ = write!(text, "\nzeta({s}) = {v}");
                }
            }
            let mut csv = String::from("dimension,count\n");
            let mut distinct = degrees.degrees.clone();
            distinct.dedup();
            for dim in distinct {
                let _ = writeln!(csv, "{dim},{}", groups::r_n(&degrees.degrees, dim));
            }
            Ok(Report::new(text, j).with_csv(csv))
        }
        Command::DefCount { group, n } => {
            let g = load_group(group, &ctx.group_budgets)?;
            let data = GroupData::new(g, &ctx.group_budgets)?;
            let count = data.def_count(*n)?;
            let zeta = groups::frobenius_zeta(data.group.order(), &count, *n);
            let j = json!({
                "group": data.group.name(),
                "order": data.group.order(),
                "n": n,
                "count": count.to_string(),
                "zeta": format_rational(&zeta),
            });
            Ok(Report::new(count.to_string(), j)
                .with_csv(format!("group,n,count\n{},{n},{count}\n", data.group.name())))
        }
        Command::WordProb { group, n } => {
            let g = load_group(group, &ctx.group_budgets)?;
            let data = GroupData::new(g, &ctx.group_budgets)?;
            let probs = groups::word_prob(&data.group, &data.classes, &data.commutators, *n)?;
            let mut text = String::new();
            let mut csv = String::from("class,representative,class_size,count,probability,ratio\n");
            for w in &probs {
                let _ = writeln!(
                    text,
                    "class {} (size {}): {}",
                    w.class,
                    w.class_size,
                    format_rational(&w.probability)
                );
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    w.class,
                    w.representative,
                    w.class_size,
                    w.count,
                    format_rational(&w.probability),
                    format_rational(&w.ratio)
                );
            }
            Ok(Report::new(text.trim_end(), to_json(&probs)).with_csv(csv))
        }
        Command::Adelic { n, p_max, m, d } => {
            let a = groups::adelic_product(*d, *n, *p_max, *m, &ctx.group_budgets)?;
            let csv = rationals_csv("p,factor", a.primes.iter().map(|p| p.to_string()).zip(a.factors.iter().cloned()));
            Ok(Report::new(format!("{}", a.value), to_json(&a)).with_csv(csv))
        }
        Command::RsThreshold { root_type, dim } => {
            let c = groups::rs_threshold(root_type, *dim)?;
            Ok(Report::new(c.to_string(), json!({"type": root_type, "threshold": c}))
                .with_csv(format!("type,threshold\n{root_type},{c}\n")))
        }
        Command::CrossCheck { scheme, q_list, m_max } => {
            let x = load_scheme(&scheme.scheme)?;
            let mut rows = Vec::new();
            for &q in q_list {
                for m in 1..=*m_max {
                    rows.push(counting::cross_check_rings(&x, q, m, &ctx.budgets)?);
                }
            }
            let mut text = String::new();
            let mut csv = String::from("q,m,mixed_count,equal_count,equal\n");
            for r in &rows {
                let _ = writeln!(text, "q={} m={}: {} vs {} {}", r.q, r.m, r.mixed_count, r.equal_count, if r.equal { "equal" } else { "DIFFERENT" });
                let _ = writeln!(csv, "{},{},{},{},{}", r.q, r.m, r.mixed_count, r.equal_count, r.equal);
            }
            Ok(Report::new(text.trim_end(), to_json(&rows)).with_csv(csv))
        }
    }
}

fn series_report(series: zeta::LocalSeries, fit: Option<usize>) -> CliResult<Report> {
    let mut text = series.coeffs.iter().map(format_rational).collect::<Vec<_>>().join(" ");
    let mut j = json!({"series": to_json(&series)});
    if let Some(deg) = fit {
        let f = zeta::pade_fit(&series.coeffs, deg)?;
        match &f {
            Some(f) => {
                let show = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
                let _ = write!(
                    text,
                    "\nnumerator: {}\ndenominator: {}\nstable: {}",
                    show(&f.numerator),
                    show(&f.denominator),
                    f.stable
                );
            }
            None => text.push_str("\nno rational fit"),
        }
        j["fit"] = to_json(&f);
    }
    let csv = series.to_csv();
    Ok(Report::new(text, j).with_csv(csv))
}

fn render(report: &Report, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Text => format!("{}\n", report.text),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("json values print")),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("this command has no CSV form; use --format json".into()))?,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut budgets = Budgets::default();
    let mut group_budgets = GroupBudgets::default();
    if let Some(b) = cli.budget {
        budgets.enumeration = b;
        group_budgets.pairs = b;
    }
    let cache = match &cli.cache {
        Some(dir) => match Cache::open(dir) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("warning: cache disabled, {}: {e}", dir.display());
                None
            }
        },
        None => None,
    };
    let ctx = Context {
        budgets,
        group_budgets,
        cache,
    };
    let threads = cli.threads.unwrap_or_else(singcount_core::par::current_threads);
    let result = singcount_core::par::with_threads(threads, || run(&cli, &ctx).and_then(|r| render(&r, cli.format)));
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
