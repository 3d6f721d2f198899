use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use affhecke::checks::{self, CheckOutcome};
use affhecke::kl::CACHE_ENV;
use affhecke::wakimoto::tilde_coefficients;
use affhecke::{
    aw_adm, c_kottwitz, c_theta, c_theta_split, c_z, m_compute, wk_function, AffineWeylElement,
    DatumId, Error, HeckeElement, KlStore, RootDatum,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Kazhdan-Lusztig data, Bernstein and central functions, and nearby-cycles
/// multiplicity tables for extended affine Weyl groups.
#[derive(Parser, Debug)]
#[command(name = "affhecke", version)]
struct Cli {
    /// Directory holding the persistent KL cache.
    #[arg(long, global = true, env = CACHE_ENV, default_value = ".klcache")]
    cache_dir: PathBuf,

    /// Neither read nor write the KL cache.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Worker threads (0 = one per core).
    #[arg(long, short = 'j', global = true, default_value_t = 0)]
    jobs: usize,

    #[arg(long, short = 'f', global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplicity table of nearby cycles for a group and dominant coweight.
    Table(GroupMu),
    /// Single objects: polynomials, Hecke algebra elements, admissible sets.
    #[command(subcommand)]
    Query(Query),
    /// Run a suite of consistency checks; exit status 3 if any fails.
    #[command(subcommand)]
    Check(Check),
}

#[derive(Args, Debug)]
struct GroupMu {
    /// GL1..GL8, GSp4, GSp6, GSp8 or G2.
    group: DatumId,
    /// Dominant coweight, e.g. 1,1,0,0.
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
}

#[derive(Args, Debug)]
struct Pair {
    group: DatumId,
    /// Element, as `t[..]*w[s1.s2]`, a word `0.1.2` in simple reflections, or `e`.
    x: String,
    y: String,
}

#[derive(Args, Debug)]
struct GroupLam {
    group: DatumId,
    #[arg(long, allow_hyphen_values = true)]
    lam: String,
}

#[derive(Subcommand, Debug)]
enum Query {
    /// Kazhdan-Lusztig polynomial P_{x,w}.
    Kl(Pair),
    /// Inverse Kazhdan-Lusztig polynomial Q_{x,w}.
    Invkl(Pair),
    /// R-polynomial R_{x,y}.
    Rpoly(Pair),
    /// Bernstein function Theta_lam.
    Theta {
        #[command(flatten)]
        args: GroupLam,
        /// Compute from the split (lam1 + nu, lam2 + nu) for this dominant nu.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
    },
    /// Central element z_lam for dominant lam.
    Z(GroupLam),
    /// Nearby-cycles trace function for dominant mu.
    Kottwitz(GroupMu),
    /// Admissible set Adm(mu), one element per line.
    Adm(GroupMu),
    /// T~_v T~_{w^-1}^{-1} in the T~ basis, coefficients as polynomials in Q.
    Wakimoto {
        #[command(flatten)]
        pair: Pair,
        /// Print the normalized function in the T basis instead.
        #[arg(long)]
        normalized: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Structural properties of one multiplicity table.
    Properties(GroupMu),
    /// Cross-oracle suites on small groups.
    Oracles {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Compare against the reference tables.
    Golden {
        group: Option<String>,
        #[arg(long)]
        mu: Option<String>,
    },
}

/// Everything that determines the output. Serialized at the head of JSON output.
/// The thread count is omitted: output does not depend on it.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    group: Option<String>,
    mu: Option<String>,
    args: Vec<String>,
    format: Format,
    cache_dir: Option<String>,
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

struct Ctx {
    format: Format,
    cache_dir: Option<PathBuf>,
}

impl Ctx {
    fn store(&self, datum: &Arc<RootDatum>) -> KlStore {
        match &self.cache_dir {
            Some(dir) => KlStore::with_cache_dir(datum, dir),
            None => KlStore::new(datum),
        }
    }

    fn finish(&self, store: &KlStore) {
        if let Err(e) = store.save() {
            eprintln!("warning: could not write KL cache: {e}");
        }
    }

    fn config(
        &self,
        command: &str,
        group: Option<&DatumId>,
        mu: Option<&str>,
        args: &[&str],
        seed: Option<u64>,
    ) -> RunConfig {
        RunConfig {
            command: command.into(),
            group: group.map(|g| g.to_string()),
            mu: mu.map(str::to_string),
            args: args.iter().map(|s| s.to_string()).collect(),
            format: self.format,
            cache_dir: self.cache_dir.as_ref().map(|p| p.display().to_string()),
            seed,
        }
    }

    fn json(&self, config: RunConfig, result: serde_json::Value) -> String {
        let v = serde_json::json!({ "config": config, "result": result });
        serde_json::to_string_pretty(&v).expect("serializable") + "\n"
    }
}

fn datum(id: &DatumId) -> Result<Arc<RootDatum>, Failure> {
    Ok(Arc::new(RootDatum::new(id.family, id.rank)?))
}

fn parse_element(datum: &Arc<RootDatum>, s: &str) -> Result<AffineWeylElement, Failure> {
    let s = s.trim();
    if s.starts_with("t[") {
        return Ok(AffineWeylElement::decode(datum, s)?);
    }
    let id = AffineWeylElement::identity(datum);
    if s == "e" || s.is_empty() {
        return Ok(id);
    }
    let n = AffineWeylElement::num_simple(datum);
    let word = s
        .split(['.', ','])
        .map(|t| {
            t.trim()
                .trim_start_matches('s')
                .parse::<usize>()
                .ok()
                .filter(|&i| i < n)
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            Failure::Usage(format!(
                "bad element {s:?}: expected t[..]*w[..] or a word in 0..{}",
                n - 1
            ))
        })?;
    Ok(AffineWeylElement::from_word(&id, &word))
}

fn hecke_text(h: &HeckeElement) -> String {
    let mut s = String::new();
    for (x, c) in h.terms() {
        s.push_str(&format!("{}  {}\n", x.encode(), c.to_q_string()));
    }
    s
}

fn hecke_csv(h: &HeckeElement) -> String {
    let mut s = String::from("element,length,coefficient\n");
    for (x, c) in h.terms() {
        s.push_str(&format!("{},{},{}\n", x.encode(), x.length(), c.encode()));
    }
    s
}

fn emit_hecke(ctx: &Ctx, config: RunConfig, h: &HeckeElement) -> String {
    match ctx.format {
        Format::Text => hecke_text(h),
        Format::Csv => hecke_csv(h),
        Format::Json => ctx.json(config, h.to_json()),
    }
}

fn cmd_table(ctx: &Ctx, a: &GroupMu) -> Outcome {
    let d = datum(&a.group)?;
    let mu = d.parse_coweight(&a.mu)?;
    let store = ctx.store(&d);
    let table = m_compute(&store, &mu)?;
    ctx.finish(&store);
    Ok(match ctx.format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Json => ctx.json(
            ctx.config("table", Some(&a.group), Some(&a.mu), &[], None),
            table.to_json(),
        ),
    })
}

fn cmd_poly(ctx: &Ctx, kind: &str, p: &Pair) -> Outcome {
    let d = datum(&p.group)?;
    let x = parse_element(&d, &p.x)?;
    let y = parse_element(&d, &p.y)?;
    let store = ctx.store(&d);
    let poly = match kind {
        "kl" => store.kl(&x, &y)?,
        "invkl" => store.inv_kl(&x, &y)?,
        _ => store.rpoly(&x, &y)?,
    };
    if kind != "rpoly" {
        ctx.finish(&store);
    }
    Ok(match ctx.format {
        Format::Text => poly.to_q_string() + "\n",
        Format::Csv => format!("x,y,polynomial\n{},{},{}\n", x.encode(), y.encode(), poly.encode()),
        Format::Json => ctx.json(
            ctx.config(kind, Some(&p.group), None, &[&p.x, &p.y], None),
            serde_json::json!({ "x": x.encode(), "y": y.encode(), "polynomial": poly.encode(), "display": poly.to_q_string() }),
        ),
    })
}

fn cmd_query(ctx: &Ctx, q: &Query) -> Outcome {
    match q {
        Query::Kl(p) => cmd_poly(ctx, "kl", p),
        Query::Invkl(p) => cmd_poly(ctx, "invkl", p),
        Query::Rpoly(p) => cmd_poly(ctx, "rpoly", p),
        Query::Theta { args, shift } => {
            let d = datum(&args.group)?;
            let lam = d.parse_coweight(&args.lam)?;
            let h = match shift {
                None => c_theta(&d, &lam)?,
                Some(nu) => {
                    let nu = d.parse_coweight(nu)?;
                    let (l1, l2) = d.dominant_split(&lam);
                    c_theta_split(&d, &l1.add(&nu), &l2.add(&nu))?
                }
            };
            let extra: Vec<&str> = shift.iter().map(String::as_str).collect();
            Ok(emit_hecke(
                ctx,
                ctx.config("theta", Some(&args.group), Some(&args.lam), &extra, None),
                &h,
            ))
        }
        Query::Z(a) => {
            let d = datum(&a.group)?;
            let h = c_z(&d, &d.parse_coweight(&a.lam)?)?;
            Ok(emit_hecke(
                ctx,
                ctx.config("z", Some(&a.group), Some(&a.lam), &[], None),
                &h,
            ))
        }
        Query::Kottwitz(a) => {
            let d = datum(&a.group)?;
            let h = c_kottwitz(&d, &d.parse_coweight(&a.mu)?)?;
            Ok(emit_hecke(
                ctx,
                ctx.config("kottwitz", Some(&a.group), Some(&a.mu), &[], None),
                &h,
            ))
        }
        Query::Adm(a) => {
            let d = datum(&a.group)?;
            let adm = aw_adm(&d, &d.parse_coweight(&a.mu)?)?;
            Ok(match ctx.format {
                Format::Text => adm.iter().map(|x| x.encode() + "\n").collect(),
                Format::Csv => {
                    let mut s = String::from("element,length,word\n");
                    for x in &adm {
                        s.push_str(&format!(
                            "{},{},{}\n",
                            x.encode(),
                            x.length(),
                            x.word_string()
                        ));
                    }
                    s
                }
                Format::Json => ctx.json(
                    ctx.config("adm", Some(&a.group), Some(&a.mu), &[], None),
                    serde_json::json!(adm.iter().map(|x| x.encode()).collect::<Vec<_>>()),
                ),
            })
        }
        Query::Wakimoto { pair, normalized } => {
            let d = datum(&pair.group)?;
            let v = parse_element(&d, &pair.x)?;
            let w = parse_element(&d, &pair.y)?;
            let f = wk_function(&v, &w)?;
            let mut extra = vec![pair.x.as_str(), pair.y.as_str()];
            if *normalized {
                extra.push("normalized");
                return Ok(emit_hecke(
                    ctx,
                    ctx.config("wakimoto", Some(&pair.group), None, &extra, None),
                    &f.normalized,
                ));
            }
            let coeffs = tilde_coefficients(&f.product)?;
            Ok(match ctx.format {
                Format::Text => coeffs
                    .iter()
                    .map(|(x, p)| format!("{}  {}\n", x.encode(), p))
                    .collect(),
                Format::Csv => {
                    let mut s = String::from("element,length,q_coefficients\n");
                    for (x, p) in &coeffs {
                        let c: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                        s.push_str(&format!("{},{},{}\n", x.encode(), x.length(), c.join(";")));
                    }
                    s
                }
                Format::Json => {
                    let m: serde_json::Map<String, serde_json::Value> = coeffs
                        .iter()
                        .map(|(x, p)| {
                            let c: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                            (x.encode(), serde_json::json!(c))
                        })
                        .collect();
                    ctx.json(
                        ctx.config("wakimoto", Some(&pair.group), None, &extra, None),
                        serde_json::Value::Object(m),
                    )
                }
            })
        }
    }
}

fn emit_checks(ctx: &Ctx, config: RunConfig, outcomes: &[CheckOutcome]) -> Outcome {
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let body = match ctx.format {
        Format::Text => {
            let mut s = String::new();
            for o in outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                if o.detail.is_empty() {
                    s.push_str(&format!("{status} {}\n", o.name));
                } else {
                    s.push_str(&format!(
                        "{status} {}: {}\n",
                        o.name,
                        o.detail.trim_end().replace('\n', "; ")
                    ));
                }
            }
            s.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
            s
        }
        Format::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for o in outcomes {
                s.push_str(&format!(
                    "\"{}\",{},\"{}\"\n",
                    o.name,
                    o.passed,
                    o.detail.trim_end().replace('"', "'").replace('\n', "; ")
                ));
            }
            s
        }
        Format::Json => ctx.json(config, serde_json::json!(outcomes)),
    };
    if checks::all_passed(outcomes) {
        Ok(body)
    } else {
        print!("{body}");
        Err(Failure::Invariant(format!(
            "{} of {} checks failed",
            outcomes.len() - passed,
            outcomes.len()
        )))
    }
}

fn cmd_check(ctx: &Ctx, c: &Check) -> Outcome {
    match c {
        Check::Properties(a) => {
            let d = datum(&a.group)?;
            let store = ctx.store(&d);
            let outcomes = checks::suite_properties(&store, &d.parse_coweight(&a.mu)?)?;
            ctx.finish(&store);
            emit_checks(
                ctx,
                ctx.config("check properties", Some(&a.group), Some(&a.mu), &[], None),
                &outcomes,
            )
        }
        Check::Oracles { seed } => {
            let outcomes = checks::suite_oracles(*seed)?;
            emit_checks(
                ctx,
                ctx.config("check oracles", None, None, &[], Some(*seed)),
                &outcomes,
            )
        }
        Check::Golden { group, mu } => {
            if let Some(g) = group {
                g.parse::<DatumId>().map_err(Failure::from)?;
            }
            let outcomes = checks::suite_golden(group.as_deref(), mu.as_deref())?;
            if outcomes.is_empty() {
                return Err(Failure::Usage("no reference table matches".into()));
            }
            let cfg = ctx.config(
                "check golden",
                None,
                mu.as_deref(),
                &group.iter().map(String::as_str).collect::<Vec<_>>(),
                None,
            );
            emit_checks(ctx, cfg, &outcomes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx {
        format: cli.format,
        cache_dir: (!cli.no_cache).then(|| cli.cache_dir.clone()),
    };
    let result = match &cli.command {
        Command::Table(a) => cmd_table(&ctx, a),
        Command::Query(q) => cmd_query(&ctx, q),
        Command::Check(c) => cmd_check(&ctx, c),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(3)
        }
    }
}
