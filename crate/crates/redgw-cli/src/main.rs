//! `redgw`: compute invariants, list boundary strata, dump recursion traces.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use redgw::key::{parse_insertions, parse_int_list, InsertionSpec};
use redgw::multiplicities::MultiplicityData;
use redgw::tropical::{enumerate_boundary_divisors, BoundaryDivisor, DivisorKind, StrataQuery};
use redgw::{normalize_key, Engine, EngineOptions, Error, Insertion, InvariantKey, Store, TangencyVector, Theory};

#[derive(Parser)]
#[command(name = "redgw", version, about = "Reduced genus-one relative invariants of (P^m, H)")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Cache file; falls back to $REDGW_CACHE.
    #[arg(long, global = true, env = "REDGW_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one invariant as p/q.
    Compute {
        #[command(flatten)]
        key: KeyArgs,
        /// Derive the value even when cached and check it against fixtures.
        #[arg(long)]
        recompute: bool,
    },
    /// List the boundary divisors that drive one recursion step.
    Strata(StrataArgs),
    /// Write the derivation of one invariant as indented text.
    Trace {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relative invariants of (P^2, H) for every contact profile up to a degree.
    Table {
        #[arg(long, default_value_t = 1)]
        genus: u8,
        #[arg(long)]
        max_degree: u32,
    },
    /// Run the built-in checks, plus every fixture of the cache.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct KeyArgs {
    /// Dimension m of the target P^m.
    #[arg(long, default_value_t = 2)]
    target: u32,
    /// absolute-X-g0, absolute-X, absolute-Y, relative or rubber.
    #[arg(long)]
    theory: String,
    /// Defaults to 0 for absolute-X-g0 and 1 otherwise.
    #[arg(long)]
    genus: Option<u8>,
    #[arg(long)]
    degree: u32,
    /// Contact orders of the contact markings, which come first.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    tangency: String,
    /// Insertions at the contact markings; missing ones are trivial.
    #[arg(long, default_value = "")]
    contact_insertions: String,
    /// Insertions at the interior markings, after the contact markings.
    #[arg(long, default_value = "")]
    insertions: String,
}

#[derive(Args)]
struct StrataArgs {
    #[arg(long, default_value_t = 1)]
    genus: u8,
    #[arg(long)]
    degree: u32,
    /// Contact orders of all markings, 0 for interior ones.
    #[arg(long)]
    tangency: String,
    /// 1-based recursion marking; defaults to the first interior marking.
    #[arg(long)]
    mark: Option<usize>,
    /// Keep only these kinds (rational, I, II, III, dagger); repeatable.
    #[arg(long)]
    kind: Vec<String>,
    /// Also list rays whose contribution vanishes.
    #[arg(long)]
    unpruned: bool,
    #[arg(long)]
    max_vertices: Option<usize>,
    /// Write the dual graphs in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::CacheLine { .. } | Error::VersionMismatch { .. } => 2,
        Error::Validation(_) => 3,
        Error::FixtureConflict { .. } => 4,
        Error::Io(_) => 5,
        _ => 1,
    }
}

fn expand(specs: Vec<InsertionSpec>) -> Vec<InsertionSpec> {
    specs.into_iter().flat_map(|s| std::iter::repeat(InsertionSpec { repeat: 1, ..s }).take(s.repeat)).collect()
}

fn build_key(a: &KeyArgs) -> Result<InvariantKey, Error> {
    let theory: Theory = a.theory.parse()?;
    let genus = a.genus.unwrap_or(if a.theory == "absolute-X-g0" { 0 } else { 1 });
    if a.theory == "absolute-X-g0" && genus != 0 {
        return Err(Error::Validation("absolute-X-g0 is the genus-0 theory".into()));
    }
    let contacts = parse_int_list(&a.tangency)?;
    let mut on_contacts = expand(parse_insertions(&a.contact_insertions)?);
    if on_contacts.len() > contacts.len() {
        return Err(Error::Validation(format!(
            "{} contact insertions for {} contact markings",
            on_contacts.len(),
            contacts.len()
        )));
    }
    let trivial = InsertionSpec { class: 0, psi: 0, forget: BTreeSet::new(), repeat: 1 };
    on_contacts.resize(contacts.len(), trivial);
    let interior = expand(parse_insertions(&a.insertions)?);
    let mut entries = contacts;
    entries.resize(entries.len() + interior.len(), 0);
    let insertions = on_contacts
        .into_iter()
        .chain(interior)
        .enumerate()
        .map(|(mark, s)| Insertion { mark, class: s.class, psi: s.psi, forget: s.forget })
        .collect();
    let key = InvariantKey {
        theory,
        genus,
        m: a.target,
        degree: a.degree,
        tangency: TangencyVector { entries, fictitious: BTreeSet::new(), degree: a.degree },
        insertions,
    };
    normalize_key(&key)
}

fn open_store(cache: Option<&Path>) -> Result<Store, Error> {
    match cache {
        Some(p) => Store::open(p),
        None => Ok(Store::new()),
    }
}

fn engine(cli: &Cli, store: Arc<Store>, trace: bool) -> Engine {
    let opts = EngineOptions { jobs: cli.jobs.max(1), trace, ..EngineOptions::default() };
    Engine::with_options(store, opts)
}

fn warn_dimension(key: &InvariantKey) {
    if !key.dimension_matches() {
        eprintln!(
            "warning: insertions have codimension {} but the moduli space has dimension {}; the invariant is 0",
            key.insertion_codim(),
            key.virtual_dim()
        );
    }
}

fn save(store: &Store, cache: Option<&Path>) -> Result<(), Error> {
    match cache {
        Some(p) => store.save(p),
        None => Ok(()),
    }
}

fn compute(cli: &Cli, a: &KeyArgs, recompute: bool) -> Result<String, Error> {
    let key = build_key(a)?;
    warn_dimension(&key);
    let store = Arc::new(open_store(cli.cache.as_deref())?);
    let e = engine(cli, store.clone(), false);
    let v = if recompute { e.recompute(&key)? } else { e.compute(&key)? };
    save(&store, cli.cache.as_deref())?;
    Ok(format!("{v}\n"))
}

fn trace(cli: &Cli, a: &KeyArgs, out: &Path) -> Result<String, Error> {
    let key = build_key(a)?;
    warn_dimension(&key);
    let store = Arc::new(open_store(cli.cache.as_deref())?);
    let t = engine(cli, store.clone(), true).trace(&key)?;
    t.replay()?;
    std::fs::write(out, t.render()).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    save(&store, cli.cache.as_deref())?;
    Ok(format!("{}\n", t.value()))
}

fn parse_kind(s: &str) -> Result<DivisorKind, Error> {
    DivisorKind::ALL
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(s) || (s == "†" && *k == DivisorKind::Dagger))
        .ok_or_else(|| Error::Parse(format!("unknown divisor kind {s:?}")))
}

fn strata_row(b: &BoundaryDivisor) -> Result<String, Error> {
    let slopes = b.slopes();
    let (lambda, rho, factor) = if slopes.is_empty() {
        ("-".to_string(), "-".to_string(), "1".to_string())
    } else {
        let m: Vec<u64> = slopes.iter().map(|&x| x as u64).collect();
        let data = MultiplicityData::of(&m)?;
        (data.vanishing_order.to_string(), data.splitting_degree.to_string(), data.contribution_factor.to_string())
    };
    let slopes: Vec<String> = slopes.iter().map(u32::to_string).collect();
    let mut row = format!(
        "{}\tslopes=({})\tlambda={lambda}\tdeg_rho={rho}\tfactor={factor}\t{}",
        b.kind,
        slopes.join(","),
        b.ctype.to_text()
    );
    if let Some(r) = b.prune_reason() {
        write!(row, "\tvanishes: {r}").unwrap();
    }
    Ok(row)
}

fn strata(a: &StrataArgs) -> Result<String, Error> {
    let tangency: Vec<u32> = parse_int_list(&a.tangency)?
        .into_iter()
        .map(|x| u32::try_from(x).map_err(|_| Error::Validation(format!("contact order {x} is negative"))))
        .collect::<Result<_, _>>()?;
    let mark = match a.mark {
        Some(0) => return Err(Error::Validation("markings are numbered from 1".into())),
        Some(i) => i - 1,
        None => tangency.iter().position(|&t| t == 0).unwrap_or(0),
    };
    let mut q = StrataQuery::new(a.genus, a.degree, tangency, mark);
    q.prune = !a.unpruned;
    if let Some(v) = a.max_vertices {
        q.max_vertices = v;
    }
    if !a.kind.is_empty() {
        q.kinds = Some(a.kind.iter().map(|s| parse_kind(s)).collect::<Result<_, _>>()?);
    }
    let rays = enumerate_boundary_divisors(&q)?;
    let mut out = String::new();
    for b in &rays {
        writeln!(out, "{}", strata_row(b)?).unwrap();
    }
    if let Some(path) = &a.dot {
        let dot: String = rays.iter().enumerate().map(|(i, b)| b.ctype.to_dot(&format!("ray{i}"))).collect();
        std::fs::write(path, dot).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}

/// Multisets of contact orders with weighted sum `d`, as count vectors.
fn profiles(d: u32) -> Vec<Vec<u32>> {
    fn go(k: u32, d: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k > d {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=left / k {
            cur.push(c);
            go(k + 1, d, left - c * k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, d, d, &mut Vec::new(), &mut out);
    out
}

fn orders(counts: &[u32]) -> Vec<i64> {
    counts.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat(k as i64 + 1).take(c as usize)).collect()
}

fn fmt_orders(v: &[i64]) -> String {
    format!("({})", v.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

/// Fixed contact points (class of a point of H) come first, then free
/// contact markings, then interior points.
fn table(cli: &Cli, genus: u8, max_degree: u32) -> Result<String, Error> {
    if genus > 1 {
        return Err(Error::Validation(format!("genus {genus} unsupported")));
    }
    let store = Arc::new(open_store(cli.cache.as_deref())?);
    let e = engine(cli, store.clone(), false);
    let mut out = String::from("d\tfixed\tfree\tpoints\tvalue\n");
    for d in 1..=max_degree {
        for total in profiles(d) {
            // Split the profile between fixed and free contact points.
            let ranges: Vec<Vec<u32>> = total.iter().map(|&c| (0..=c).collect()).collect();
            let mut fixed_choices = vec![Vec::new()];
            for r in ranges {
                fixed_choices = fixed_choices
                    .into_iter()
                    .flat_map(|f: Vec<u32>| {
                        r.iter().map(move |&x| {
                            let mut f = f.clone();
                            f.push(x);
                            f
                        })
                    })
                    .collect();
            }
            for fixed in fixed_choices {
                let free: Vec<u32> = total.iter().zip(&fixed).map(|(t, f)| t - f).collect();
                let (a, b) = (orders(&fixed), orders(&free));
                let points = 2 * d as i64 - 1 + genus as i64 + b.len() as i64 - a.len() as i64;
                if points < 0 {
                    continue;
                }
                let mut marks: Vec<(i64, u32)> = a.iter().map(|&x| (x, 1)).collect();
                marks.extend(b.iter().map(|&x| (x, 0)));
                marks.extend(std::iter::repeat((0, 2)).take(points as usize));
                let key = redgw::primary_key(Theory::Relative, genus, 2, d, &marks);
                let v = e.compute(&key)?;
                writeln!(out, "{d}\t{}\t{}\t{points}\t{v}", fmt_orders(&a), fmt_orders(&b)).unwrap();
            }
        }
    }
    save(&store, cli.cache.as_deref())?;
    Ok(out)
}

fn selftest(cli: &Cli, quick: bool) -> Result<(String, bool), Error> {
    let store = match cli.cache.as_deref() {
        Some(p) => Some(open_store(Some(p))?),
        None => None,
    };
    let checks = redgw::selftest::run(quick, store.as_ref());
    let mut out = String::new();
    for c in &checks {
        writeln!(out, "{}", c.line()).unwrap();
    }
    Ok((out, checks.iter().all(|c| c.passed())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Compute { key, recompute } => compute(&cli, key, *recompute).map(|s| (s, true)),
        Command::Strata(a) => strata(a).map(|s| (s, true)),
        Command::Trace { key, out } => trace(&cli, key, out).map(|s| (s, true)),
        Command::Table { genus, max_degree } => table(&cli, *genus, *max_degree).map(|s| (s, true)),
        Command::Selftest { quick } => selftest(&cli, *quick),
    };
    match result {
        Ok((s, ok)) => {
            print!("{s}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
