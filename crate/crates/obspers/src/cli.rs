//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 negative decision
//! (`iso`, `interleave`), 3 search budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{ArgAction, Args, Parser, Subcommand};
use log::info;
use obspers_core::calculus::{discretize, persistent_rank, smooth};
use obspers_core::decompose::{decompose, iso_test};
use obspers_core::grid::Grid;
use obspers_core::limits::{
    cauchy_limit, pair_outcome, partition, probe_grid, probe_normalize, probe_pairs, CauchyChain,
};
use obspers_core::metric::{decide, distance_bracket, verify, Bound, DistanceBracket, Interleaving, LowerWitness, Side};
use obspers_core::pipelines::{degree_rips, homology_module, sublevel_bifiltration};
use obspers_core::rational::{format_rat, parse_rat};
use obspers_core::stability::{perturbation_experiment, strictly_trivial, tau_indecomposable, SampleKind};
use obspers_core::{Fp, Rat, SearchBudget, StepModule};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format::{self, kind, FormatError};

#[derive(Parser, Debug)]
#[command(name = "obspers", version, about = "Exact multiparameter persistence modules over prime fields")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Field prime. Required to match input modules when given; used for
    /// modules built from complexes (default 2).
    #[arg(long = "field-p", global = true)]
    pub field_p: Option<u32>,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest Hom dimension searched exhaustively. Default: the largest d
    /// with p^d ≤ 65536.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Worker threads for pairwise work. Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// More logging on standard error (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check any obspers/1 file.
    Validate { file: PathBuf },
    /// Direct sum of modules.
    Sum {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// The smoothing S_εV, optionally with its ε-interleaving.
    Smooth {
        #[arg(long)]
        epsilon: String,
        file: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Restriction-extension to εZ^n over the bounding box.
    Discretize {
        #[arg(long)]
        epsilon: String,
        file: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Persistent rank at ε.
    Rank {
        #[arg(long)]
        epsilon: String,
        file: PathBuf,
    },
    /// Indecomposable summands and their signature.
    Decompose {
        file: PathBuf,
        /// Directory for one module file per summand.
        #[arg(long)]
        summands: Option<PathBuf>,
    },
    /// Isomorphism test; exit 2 when not isomorphic.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide an ε-interleaving; exit 2 when none exists.
    Interleave {
        #[arg(long)]
        epsilon: String,
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Bracket on the interleaving distance.
    Distance {
        a: PathBuf,
        b: PathBuf,
        /// Where to write the upper-bound interleaving.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Limit of a finite Cauchy chain with certificates.
    Limit {
        chain: PathBuf,
        /// Where to write the limit module.
        #[arg(long)]
        limit: Option<PathBuf>,
        /// Directory for one certificate interleaving per term.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Isomorphism classes of a directory of modules after smoothing and
    /// restriction to δZ^n.
    Probe {
        #[arg(long)]
        delta: String,
        dir: PathBuf,
    },
    /// Strict σ-triviality.
    Trivial {
        #[arg(long)]
        sigma: String,
        file: PathBuf,
    },
    /// τ-indecomposability.
    NearIndec {
        #[arg(long)]
        tau: String,
        file: PathBuf,
    },
    /// Perturbation experiment around an indecomposable module.
    Genericity {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value = "1")]
        epsilon: String,
        #[arg(long, default_value = "6")]
        c: String,
        #[arg(long, default_value_t = 400)]
        max_samples: usize,
        file: PathBuf,
    },
    /// Lower-star bifiltration of a complex with vertex values.
    Sublevel { complex: PathBuf },
    /// Degree-Rips bifiltration; axis 2 is −degree.
    DegreeRips {
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        metric: PathBuf,
    },
    /// H_k of a bifiltration as a module.
    Homology {
        #[arg(long)]
        dim: usize,
        /// Same as --field-p.
        #[arg(long)]
        prime: Option<u32>,
        /// Axes separated by ';', coordinates by ','. Default: the grade grid.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        bifiltration: PathBuf,
    },
}

/// Result of a successful run.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Negative,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let level = match cli.config.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match execute(&cli) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Negative) => EXIT_NEGATIVE,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_budget(&e) {
                EXIT_BUDGET
            } else {
                EXIT_ERROR
            }
        }
    }
}

fn is_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<obspers_core::Error>(), Some(obspers_core::Error::BudgetExceeded { .. }))
            || matches!(
                c.downcast_ref::<FormatError>(),
                Some(FormatError::Core(obspers_core::Error::BudgetExceeded { .. }))
            )
    })
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
}

impl Ctx<'_> {
    fn budget(&self, p: u32) -> SearchBudget {
        let b = SearchBudget::for_prime(p).with_seed(self.cfg.seed);
        match self.cfg.budget {
            Some(d) => b.with_max_dim(d),
            None => b,
        }
    }

    fn module(&self, path: &Path) -> anyhow::Result<StepModule> {
        let v = format::read_module(path).with_context(|| format!("reading {}", path.display()))?;
        if let Some(p) = self.cfg.field_p {
            if v.field().p() != p {
                bail!("{} is over F_{}, but --field-p is {p}", path.display(), v.field().p());
            }
        }
        info!("{}: {}", path.display(), v.summary());
        Ok(v)
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.cfg.out {
            Some(p) => format::write_text(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_report(&self, kind: &str, body: Value) -> anyhow::Result<()> {
        let mut map = serde_json::Map::new();
        map.insert("format".into(), json!(format::FORMAT));
        map.insert("kind".into(), json!(kind));
        if let Value::Object(b) = body {
            map.extend(b);
        }
        self.emit(&format::to_canonical(&Value::Object(map)))
    }
}

fn rat_arg(name: &str, s: &str) -> anyhow::Result<Rat> {
    parse_rat(s).map_err(|e| anyhow!("--{name}: {e}"))
}

fn nonneg_arg(name: &str, s: &str) -> anyhow::Result<Rat> {
    let r = rat_arg(name, s)?;
    if r < Rat::from_integer(0) {
        bail!("--{name} must be nonnegative");
    }
    Ok(r)
}

fn bound(b: &Bound) -> Value {
    match b {
        Bound::Finite(r) => json!(format_rat(r)),
        Bound::Infinite => json!("inf"),
    }
}

fn point(p: &[Rat]) -> Value {
    json!(p.iter().map(format_rat).collect::<Vec<_>>())
}

fn side(s: Side) -> &'static str {
    match s {
        Side::F => "f",
        Side::G => "g",
    }
}

fn bracket_json(b: &DistanceBracket) -> Value {
    let lower_witness = match &b.lower_witness {
        LowerWitness::Trivial => json!({"kind": "trivial"}),
        LowerWitness::Rank(r) => json!({
            "kind": "rank",
            "eps": format_rat(&r.eps),
            "side": side(r.side),
            "s": point(&r.s),
            "t": point(&r.t),
            "lhs": r.lhs,
            "rhs": r.rhs,
        }),
        LowerWitness::NoneAt(e) => json!({"kind": "none-at", "eps": format_rat(e)}),
    };
    json!({
        "lower": bound(&b.lower),
        "lower_strict": b.lower_strict,
        "upper": bound(&b.upper),
        "exact": b.exact,
        "distance": b.distance().map(|d| bound(&d)),
        "undecided": b.undecided.iter().map(format_rat).collect::<Vec<_>>(),
        "lower_witness": lower_witness,
        "upper_witness_eps": b.upper_witness.as_ref().map(|w| format_rat(&w.eps)),
    })
}

fn sample_kind(k: SampleKind) -> &'static str {
    match k {
        SampleKind::RankOne => "rank-one",
        SampleKind::SmallCell => "small-cell",
        SampleKind::Shift => "shift",
        SampleKind::Refine => "refine",
    }
}

/// Persistent ranks at these shifts form the fingerprint in
/// decomposition signatures.
const FINGERPRINT_EPS: [(i64, i64); 6] = [(0, 1), (1, 4), (1, 2), (1, 1), (2, 1), (4, 1)];

fn fingerprint(v: &StepModule) -> anyhow::Result<Vec<usize>> {
    FINGERPRINT_EPS
        .iter()
        .map(|&(n, d)| Ok(persistent_rank(v, Rat::new(n, d))?))
        .collect()
}

fn parse_grid(s: &str) -> anyhow::Result<Grid> {
    let axes = s
        .split(';')
        .map(|axis| {
            let mut coords = axis
                .split(',')
                .map(|c| parse_rat(c.trim()).map_err(|e| anyhow!("--grid: {e}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            coords.sort();
            coords.dedup();
            Ok(coords)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Grid::new(axes)?)
}

fn write_witness(path: &Path, il: &Interleaving) -> anyhow::Result<()> {
    format::write_text(path, &format::interleaving_to_string(il))?;
    Ok(())
}

fn ensure_dir(path: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn validate(ctx: &Ctx, file: &Path) -> anyhow::Result<Outcome> {
    let text = format::read_text(file)?;
    let k = format::peek_kind(&text)?;
    let details = match k.as_str() {
        kind::MODULE => {
            let v = ctx.module(file)?;
            json!({"grid_shape": v.grid().shape(), "total_dim": v.total_dim()})
        }
        kind::MORPHISM => {
            let m = format::morphism_from_data(&format::parse_tagged(&text, kind::MORPHISM)?)?;
            json!({"grid_shape": m.grid().shape(), "is_iso": m.is_iso()})
        }
        kind::INTERLEAVING => {
            let il = format::interleaving_from_data(&format::parse_tagged(&text, kind::INTERLEAVING)?)?;
            if let Err(v) = verify(il.f.source(), il.g.source(), il.eps, &il.f, &il.g)? {
                bail!("interleaving does not verify: {v}");
            }
            json!({"eps": format_rat(&il.eps)})
        }
        kind::CHAIN => {
            let (terms, links) = format::read_chain(file)?;
            let chain = CauchyChain::new(terms, links)?;
            chain.check()?;
            json!({"terms": chain.terms.len(), "tails": chain.tails().iter().map(format_rat).collect::<Vec<_>>()})
        }
        kind::COMPLEX => {
            let (k, values) = format::complex_from_data(&format::parse_tagged(&text, kind::COMPLEX)?)?;
            if let Some(v) = &values {
                sublevel_bifiltration(&k, v)?;
            }
            json!({"vertices": k.n_vertices(), "simplices": k.simplices().len()})
        }
        kind::METRIC => {
            let m = format::metric_from_data(&format::parse_tagged(&text, kind::METRIC)?)?;
            json!({"points": m.len(), "triangle_violations": m.triangle_violations()})
        }
        kind::BIFILTRATION => {
            let b = format::bifiltration_from_data(&format::parse_tagged(&text, kind::BIFILTRATION)?)?;
            json!({"simplices": b.complex.simplices().len(), "n_params": b.n_params})
        }
        other => bail!("cannot validate files of kind {other:?}"),
    };
    let mut body = json!({"file_kind": k, "valid": true});
    if let (Value::Object(b), Value::Object(d)) = (&mut body, details) {
        b.extend(d);
    }
    ctx.emit_report("validation", body)?;
    Ok(Outcome::Done)
}

fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let ctx = Ctx { cfg: &cli.config };
    if cli.config.threads == 0 {
        bail!("--threads must be positive");
    }
    match &cli.command {
        Command::Validate { file } => validate(&ctx, file),
        Command::Sum { files } => {
            let ms = files.iter().map(|f| ctx.module(f)).collect::<anyhow::Result<Vec<_>>>()?;
            let s = StepModule::direct_sum_all(ms.iter())?;
            ctx.emit(&format::module_to_string(&s))?;
            Ok(Outcome::Done)
        }
        Command::Smooth { epsilon, file, witness } => {
            let eps = nonneg_arg("epsilon", epsilon)?;
            let v = ctx.module(file)?;
            let s = smooth(&v, eps)?;
            if let Some(w) = witness {
                let il = Interleaving {
                    eps,
                    f: s.quotient_shift.clone(),
                    g: s.inclusion.clone(),
                    verified: true,
                };
                write_witness(w, &il)?;
            }
            ctx.emit(&format::module_to_string(&s.module))?;
            Ok(Outcome::Done)
        }
        Command::Discretize { epsilon, file, witness } => {
            let eps = rat_arg("epsilon", epsilon)?;
            let v = ctx.module(file)?;
            let d = discretize(&v, eps)?;
            if let Some(w) = witness {
                let il = Interleaving {
                    eps,
                    f: d.from_discrete.clone(),
                    g: d.to_discrete.clone(),
                    verified: true,
                };
                write_witness(w, &il)?;
            }
            ctx.emit(&format::module_to_string(&d.module))?;
            Ok(Outcome::Done)
        }
        Command::Rank { epsilon, file } => {
            let eps = nonneg_arg("epsilon", epsilon)?;
            let v = ctx.module(file)?;
            let r = persistent_rank(&v, eps)?;
            ctx.emit_report("rank-report", json!({"epsilon": format_rat(&eps), "rank": r}))?;
            Ok(Outcome::Done)
        }
        Command::Decompose { file, summands } => {
            let v = ctx.module(file)?;
            let d = decompose(&v, &ctx.budget(v.field().p()))?;
            if !d.verify()? {
                bail!("decomposition maps failed verification");
            }
            let mut order: Vec<usize> = (0..d.summands.len()).collect();
            let prints = d.summands.iter().map(fingerprint).collect::<anyhow::Result<Vec<_>>>()?;
            order.sort_by_key(|&i| (d.summands[i].total_dim(), prints[i].clone()));
            let mut entries = Vec::new();
            for (n, &i) in order.iter().enumerate() {
                let mut e = json!({"total_dim": d.summands[i].total_dim(), "ranks": prints[i]});
                if let Some(dir) = summands {
                    ensure_dir(dir)?;
                    let name = format!("summand_{n}.json");
                    format::write_module(&dir.join(&name), &d.summands[i])?;
                    e["file"] = json!(name);
                }
                entries.push(e);
            }
            let eps: Vec<String> = FINGERPRINT_EPS.iter().map(|&(n, d)| format_rat(&Rat::new(n, d))).collect();
            ctx.emit_report(
                "decomposition",
                json!({"summand_count": d.summands.len(), "rank_eps": eps, "signature": entries}),
            )?;
            Ok(Outcome::Done)
        }
        Command::Iso { a, b, witness } => {
            let (v, w) = (ctx.module(a)?, ctx.module(b)?);
            if v.field() != w.field() {
                bail!("modules are over different fields");
            }
            let iso = iso_test(&v, &w, &ctx.budget(v.field().p()))?;
            if let (Some(m), Some(path)) = (&iso, witness) {
                format::write_text(path, &format::morphism_to_string(m))?;
            }
            ctx.emit_report("iso-report", json!({"isomorphic": iso.is_some()}))?;
            Ok(if iso.is_some() { Outcome::Done } else { Outcome::Negative })
        }
        Command::Interleave { epsilon, a, b, witness } => {
            let eps = nonneg_arg("epsilon", epsilon)?;
            let (v, w) = (ctx.module(a)?, ctx.module(b)?);
            let il = decide(&v, &w, eps, &ctx.budget(v.field().p()))?;
            if let (Some(il), Some(path)) = (&il, witness) {
                write_witness(path, il)?;
            }
            ctx.emit_report(
                "interleave-report",
                json!({"epsilon": format_rat(&eps), "interleaved": il.is_some()}),
            )?;
            Ok(if il.is_some() { Outcome::Done } else { Outcome::Negative })
        }
        Command::Distance { a, b, witness } => {
            let (v, w) = (ctx.module(a)?, ctx.module(b)?);
            let br = distance_bracket(&v, &w, &ctx.budget(v.field().p()))?;
            if let (Some(il), Some(path)) = (&br.upper_witness, witness) {
                write_witness(path, il)?;
            }
            ctx.emit_report("distance-bracket", bracket_json(&br))?;
            Ok(Outcome::Done)
        }
        Command::Limit { chain, limit, certificates } => {
            let (terms, links) = format::read_chain(chain)?;
            let c = CauchyChain::new(terms, links)?;
            let lim = cauchy_limit(&c)?;
            if let Some(p) = limit {
                format::write_module(p, &lim.limit)?;
            }
            let mut certs = Vec::new();
            for (k, cert) in lim.certificates.iter().enumerate() {
                let mut e = json!({"term": k, "eps": format_rat(&cert.eps), "verified": cert.verified});
                if let Some(dir) = certificates {
                    ensure_dir(dir)?;
                    let name = format!("certificate_{k}.json");
                    write_witness(&dir.join(&name), cert)?;
                    e["file"] = json!(name);
                }
                certs.push(e);
            }
            ctx.emit_report(
                "limit-report",
                json!({
                    "terms": c.terms.len(),
                    "tails": lim.tails.iter().map(format_rat).collect::<Vec<_>>(),
                    "certificates": certs,
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Probe { delta, dir } => probe(&ctx, delta, dir),
        Command::Trivial { sigma, file } => {
            let sigma = nonneg_arg("sigma", sigma)?;
            let v = ctx.module(file)?;
            let r = strictly_trivial(&v, sigma)?;
            ctx.emit_report(
                "triviality-report",
                json!({"sigma": format_rat(&r.sigma), "strict": r.strict, "witness": r.witness.as_deref().map(point)}),
            )?;
            Ok(Outcome::Done)
        }
        Command::NearIndec { tau, file } => {
            let tau = nonneg_arg("tau", tau)?;
            let v = ctx.module(file)?;
            let r = tau_indecomposable(&v, tau, &ctx.budget(v.field().p()))?;
            let summands: Vec<Value> = r
                .summands
                .iter()
                .enumerate()
                .map(|(i, s)| json!({"total_dim": s.total_dim(), "strictly_trivial": !r.nontrivial.contains(&i)}))
                .collect();
            ctx.emit_report(
                "near-indecomposability-report",
                json!({"tau": format_rat(&r.tau), "holds": r.holds, "summands": summands, "nontrivial": r.nontrivial}),
            )?;
            Ok(Outcome::Done)
        }
        Command::Genericity { trials, epsilon, c, max_samples, file } => {
            let eps = rat_arg("epsilon", epsilon)?;
            let c = rat_arg("c", c)?;
            if eps <= Rat::from_integer(0) || c <= Rat::from_integer(0) {
                bail!("--epsilon and --c must be positive");
            }
            let v = ctx.module(file)?;
            let b = ctx.budget(v.field().p());
            let r = perturbation_experiment(&v, eps, c, *trials, *max_samples, ctx.cfg.seed, &b)?;
            let list: Vec<Value> = r
                .accepted
                .iter()
                .map(|t| {
                    json!({
                        "sample": sample_kind(t.kind),
                        "total_dim": t.module.total_dim(),
                        "witness_eps": format_rat(&t.witness.eps),
                        "tau_indecomposable": t.tau_indecomposable,
                    })
                })
                .collect();
            ctx.emit_report(
                "genericity-report",
                json!({
                    "eps": format_rat(&r.eps),
                    "mu": format_rat(&r.mu),
                    "tau": format_rat(&r.tau),
                    "seed": ctx.cfg.seed,
                    "sampled": r.sampled,
                    "rejected_invalid": r.rejected_invalid,
                    "rejected_far": r.rejected_far,
                    "budget_skipped": r.budget_skipped,
                    "accepted": r.accepted.len(),
                    "passed": r.passed(),
                    "trials": list,
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Sublevel { complex } => {
            let data = format::parse_tagged(&format::read_text(complex)?, kind::COMPLEX)?;
            let (k, values) = format::complex_from_data(&data)?;
            let values = values.ok_or_else(|| anyhow!("{} has no vertex values", complex.display()))?;
            let b = sublevel_bifiltration(&k, &values)?;
            ctx.emit(&format::bifiltration_to_string(&b, None))?;
            Ok(Outcome::Done)
        }
        Command::DegreeRips { radii, degrees, max_dim, metric } => {
            let m = format::metric_from_data(&format::parse_tagged(&format::read_text(metric)?, kind::METRIC)?)?;
            let radii = radii.iter().map(|r| nonneg_arg("radii", r)).collect::<anyhow::Result<Vec<_>>>()?;
            let b = degree_rips(&m, &radii, degrees, *max_dim)?;
            ctx.emit(&format::bifiltration_to_string(&b, Some(vec!["radius".into(), "-degree".into()])))?;
            Ok(Outcome::Done)
        }
        Command::Homology { dim, prime, grid, bifiltration } => {
            let p = match (prime, ctx.cfg.field_p) {
                (Some(a), Some(b)) if *a != b => bail!("--prime {a} conflicts with --field-p {b}"),
                (Some(a), _) => *a,
                (None, Some(b)) => b,
                (None, None) => 2,
            };
            let field = Fp::new(p)?;
            let text = format::read_text(bifiltration)?;
            let b = format::bifiltration_from_data(&format::parse_tagged(&text, kind::BIFILTRATION)?)?;
            let g = match grid {
                Some(s) => parse_grid(s)?,
                None => b.grade_grid()?,
            };
            if !b.covered_by(&g) {
                log::warn!("the grid does not resolve every grade; the module is truncated to it");
            }
            let h = homology_module(&b, *dim, &g, field)?;
            ctx.emit(&format::module_to_string(&h))?;
            Ok(Outcome::Done)
        }
    }
}

fn probe(ctx: &Ctx, delta: &str, dir: &Path) -> anyhow::Result<Outcome> {
    let delta = rat_arg("delta", delta)?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .json modules in {}", dir.display());
    }
    let family = files.iter().map(|f| ctx.module(f)).collect::<anyhow::Result<Vec<_>>>()?;
    let p = family[0].field().p();
    if family.iter().any(|m| m.field().p() != p) {
        bail!("probe members must share a field");
    }
    let grid = probe_grid(&family, delta)?;
    let normal = family
        .iter()
        .map(|v| probe_normalize(v, delta, &grid))
        .collect::<obspers_core::Result<Vec<_>>>()?;
    let budget = ctx.budget(p);
    let pairs = probe_pairs(family.len());
    info!("probe: {} members, {} pairs on {} threads", family.len(), pairs.len(), ctx.cfg.threads);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(ctx.cfg.threads).build()?;
    let outcomes = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| pair_outcome(&normal[i], &normal[j], &budget).map(|o| ((i, j), o)))
            .collect::<obspers_core::Result<Vec<_>>>()
    })?;
    let r = partition(family.len(), &outcomes);
    let name = |i: usize| files[i].file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    ctx.emit_report(
        "probe-report",
        json!({
            "delta": format_rat(&delta),
            "grid_shape": grid.shape(),
            "class_count": r.class_count(),
            "class_count_min": r.class_count_min,
            "class_count_max": r.class_count_max,
            "members": (0..family.len()).map(name).collect::<Vec<_>>(),
            "labels": r.labels,
            "representatives": r.representatives.iter().map(|&i| name(i)).collect::<Vec<_>>(),
            "undecided_pairs": r.undecided_pairs,
        }),
    )?;
    Ok(Outcome::Done)
}
