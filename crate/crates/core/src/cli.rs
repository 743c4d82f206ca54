//! Command-line surface: problem files, invariant suites, spectra, monodromy,
//! moduli utilities and ε → 0 limits.

use std::fmt::Debug;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::arith::{fmt_rational, parse_rational, random_distinct, random_nonzero, to_f64, Rational, Tolerance};
use crate::envelope::Envelope;
use crate::gaudin::{
    degeneration_family, dynamical, homogeneous, inhomogeneous, interior_span, rtilde_family, span_limit_eps0, trig_by_reduction, trigonometric,
    verma_matching, DegenerationPoints, GaudinError, HamiltonianSet, QuadraticSpan, SpanParams,
};
use crate::holonomy::{coordinates_match, q_of_point, reconstruct_coordinates};
use crate::liealg::{build_from_type, is_regular, CartanRole, CartanVector};
use crate::moduli::{boundary_from_components, Assembly, Child, MNode, ModuliPoint, Petal, Space};
use crate::reps::{build_irrep, TensorRep};
use crate::spectra::{
    compact_theta, compact_trig_check, exchange_loop, monodromy_permutation, there_and_back, to_complex, trig_matrices, CMat, CVec, CommutingFamily,
    CompactConvention, JointSpectrum,
};

#[derive(Parser, Debug)]
#[command(name = "gaudin", version, about = "Quadratic Gaudin models: exact checks, spectra and moduli utilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// problem file (JSON)
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "tol-abs", global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long = "tol-rel", global = true)]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// Joint spectrum of a Hamiltonian family on a tensor product.
    Spectrum,
    /// Eigenline permutation along a loop.
    Monodromy(MonodromyArgs),
    /// Validate, assemble or decompose points of the compactified spaces.
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Exact ε → 0 limit of a quadratic span family.
    Limit,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// A1..A4
    #[arg(long)]
    pub lie: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// `h` (all h-coordinates 1) or comma-separated rationals
    #[arg(long)]
    pub chi: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Commutativity,
    Moduli,
    Holonomy,
    Psi,
    Degeneration,
    Verma,
    Spectra,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct MonodromyArgs {
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "loop", value_enum)]
    pub loop_kind: Option<LoopKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Exchange,
    Constant,
    ThereAndBack,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum ModuliCmd {
    /// Check the defining relations of `point`.
    Validate,
    /// Build the boundary point of `assembly` in `space`.
    Assemble,
    /// Components of `point`.
    Decompose,
}

/// Problem file. Rationals are strings `"p/q"`.
#[derive(Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub lie_type: Option<String>,
    /// highest weights, fundamental coordinates
    pub weights: Option<Vec<Vec<String>>>,
    pub model: Option<String>,
    pub points: Option<Vec<String>>,
    /// unit-circle points `((1 − t²) + 2it)/(1 + t²)`
    pub circle: Option<Vec<String>>,
    pub theta: Option<Vec<String>>,
    /// h-coordinates; `["h"]` sets every coordinate to 1
    pub chi: Option<Vec<String>>,
    pub epsilon: Option<String>,
    pub space: Option<String>,
    pub point: Option<Value>,
    pub assembly: Option<Value>,
    pub family: Option<String>,
    pub compact: Option<CompactSpec>,
    pub whole_space: Option<bool>,
    pub checks: Option<Vec<String>>,
    #[serde(rename = "loop")]
    pub loop_kind: Option<LoopKind>,
    pub steps: Option<usize>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: Option<TolSpec>,
    pub seed: Option<u64>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CompactSpec {
    /// `minus_half_mu` | `plus_half_mu` | `rho_plus_half_mu`
    pub convention: String,
    pub imag: Vec<f64>,
}

#[derive(Deserialize, Debug, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    pub absolute: f64,
    pub relative: f64,
}

#[derive(Debug)]
pub enum CliError {
    /// exit 2
    Input(String),
    /// exit 1
    Failed(String),
}

fn kind_of<E: Debug + std::fmt::Display>(e: &E) -> String {
    let d = format!("{e:?}");
    let name = d.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
    format!("{name}: {e}")
}

fn input<E: Debug + std::fmt::Display>(e: E) -> CliError {
    CliError::Input(kind_of(&e))
}

fn failed<E: Debug + std::fmt::Display>(e: E) -> CliError {
    CliError::Failed(kind_of(&e))
}

struct Outcome {
    json: Value,
    csv: Option<String>,
    pass: bool,
}

/// Resolved run parameters (flags override the problem file).
#[derive(Clone, Debug)]
struct Ctx {
    spec: ProblemSpec,
    seed: u64,
    tol: Tolerance,
}

pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let spec: ProblemSpec = match &cli.common.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("SchemaError: {e}")))?
        }
        None => ProblemSpec::default(),
    };
    let t = spec
        .tolerance
        .map(|t| (t.absolute, t.relative))
        .unwrap_or((Tolerance::default().absolute, Tolerance::default().relative));
    let tol = Tolerance::new(cli.common.tol_abs.unwrap_or(t.0), cli.common.tol_rel.unwrap_or(t.1)).map_err(input)?;
    let seed = cli.common.seed.or(spec.seed).unwrap_or(0);
    let ctx = Ctx { spec, seed, tol };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.common.threads {
            if n == 0 {
                return Err(CliError::Input("--threads must be positive".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Input(e.to_string()))?
    };
    let out = pool.install(|| match &cli.command {
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::Spectrum => cmd_spectrum(&ctx),
        Command::Monodromy(a) => cmd_monodromy(&ctx, a),
        Command::Moduli(m) => cmd_moduli(&ctx, *m),
        Command::Limit => cmd_limit(&ctx),
    })?;
    let text = match cli.common.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
        Format::Csv => out.csv.ok_or_else(|| CliError::Input("csv output is not available for this command".into()))?,
    };
    match &cli.common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(if out.pass { 0 } else { 1 })
}

// ---------- parsing ----------

fn rationals(v: &[String]) -> Result<Vec<Rational>, CliError> {
    v.iter().map(|s| parse_rational(s).map_err(input)).collect()
}

fn env_of(ctx: &Ctx, lie: Option<&str>) -> Result<Envelope, CliError> {
    let t = lie.or(ctx.spec.lie_type.as_deref()).unwrap_or("A1");
    Ok(Envelope::new(build_from_type(t).map_err(input)?))
}

/// `"h"` is the Cartan element with all h-coordinates 1 (regular for every rank).
fn parse_chi(s: &str, rank: usize) -> Result<Vec<Rational>, CliError> {
    if s.trim() == "h" {
        return Ok(vec![Rational::from_integer(1.into()); rank]);
    }
    let v: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
    rationals(&v)
}

fn cartan_param(env: &Envelope, v: Option<&Vec<String>>, what: &str) -> Result<Vec<Rational>, CliError> {
    let v = v.ok_or_else(|| CliError::Input(format!("MissingField: {what}")))?;
    let v = match v.as_slice() {
        [h] if h == "h" => parse_chi("h", env.lie().rank())?,
        _ => rationals(v)?,
    };
    if v.len() != env.lie().rank() {
        return Err(CliError::Input(format!(
            "WrongLength: {what} has {} entries, rank is {}",
            v.len(),
            env.lie().rank()
        )));
    }
    Ok(v)
}

fn tensor_rep(env: &Envelope, weights: &[Vec<String>]) -> Result<TensorRep, CliError> {
    let irreps = weights
        .iter()
        .map(|w| Ok(Arc::new(build_irrep(env.lie(), &rationals(w)?).map_err(input)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(TensorRep::of_irreps(&irreps))
}

fn weight_json(w: &[Rational]) -> Value {
    json!(w.iter().map(fmt_rational).collect::<Vec<_>>())
}

// ---------- verify ----------

#[derive(Clone, Debug)]
struct Assertion {
    name: String,
    /// `None`: informational, not counted
    pass: Option<bool>,
    ms: f64,
    detail: String,
}

impl Assertion {
    fn status(&self) -> &'static str {
        match self.pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "info",
        }
    }
}

struct VerifyCtx<'a> {
    ctx: &'a Ctx,
    lie: String,
    n: usize,
    samples: usize,
    chi: Option<String>,
}

impl VerifyCtx<'_> {
    fn env(&self) -> Result<Envelope, CliError> {
        env_of(self.ctx, Some(&self.lie))
    }

    fn rng(&self, name: &str, k: usize) -> ChaCha8Rng {
        let h = name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
        ChaCha8Rng::seed_from_u64(self.ctx.seed ^ h ^ (k as u64).wrapping_mul(0x9e3779b97f4a7c15))
    }

    fn chi(&self, env: &Envelope) -> Result<Vec<Rational>, CliError> {
        let r = env.lie().rank();
        let c = match (&self.chi, &self.ctx.spec.chi) {
            (Some(s), _) => parse_chi(s, r)?,
            (None, Some(v)) if v.len() == 1 && v[0] == "h" => parse_chi("h", r)?,
            (None, Some(v)) => rationals(v)?,
            (None, None) => parse_chi("h", r)?,
        };
        if c.len() != r || !is_regular(&CartanVector::new(c.clone(), CartanRole::Chi), env.lie()) {
            return Err(CliError::Input("NonRegularChi: chi must be regular with one entry per h-coordinate".into()));
        }
        Ok(c)
    }

    /// Runs `f` on each sample in parallel; one assertion.
    fn sampled<F>(&self, name: &str, samples: usize, f: F) -> Assertion
    where
        F: Fn(&mut ChaCha8Rng) -> Result<bool, String> + Sync,
    {
        let t = Instant::now();
        let res: Vec<Result<bool, String>> = (0..samples).into_par_iter().map(|k| f(&mut self.rng(name, k))).collect();
        let ok = res.iter().filter(|r| matches!(r, Ok(true))).count();
        let first_err = res.iter().find_map(|r| r.as_ref().err().cloned());
        let mut detail = format!("{ok}/{samples}");
        if let Some(e) = first_err {
            detail.push_str(&format!("; {e}"));
        }
        Assertion {
            name: name.to_string(),
            pass: Some(ok == samples),
            ms: t.elapsed().as_secs_f64() * 1e3,
            detail,
        }
    }
}

fn err_s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_nonzero_distinct(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let z = random_distinct(rng, n, 5, 4);
        if z.iter().all(|x| *x != Rational::from_integer(0.into())) {
            return z;
        }
    }
}

fn commuting_union(env: &Envelope, a: HamiltonianSet<Rational>, b: HamiltonianSet<Rational>) -> Result<bool, String> {
    let mut all = a;
    all.elements.extend(b.elements);
    Ok(all.commutator_failure(env).is_none())
}

fn suite_commutativity(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let env = v.env()?;
    let r = env.lie().rank();
    let n = v.n;
    let rand_cartan = |rng: &mut ChaCha8Rng| (0..r).map(|_| random_nonzero(rng, 4, 3)).collect::<Vec<_>>();
    let regular = |rng: &mut ChaCha8Rng| loop {
        let c = rand_cartan(rng);
        if is_regular(&CartanVector::new(c.clone(), CartanRole::Chi), env.lie()) {
            return c;
        }
    };
    Ok(vec![
        v.sampled("commute(H_i) homogeneous", v.samples, |rng| {
            let h = homogeneous(&env, &random_distinct(rng, n, 5, 4)).map_err(err_s)?;
            Ok(h.commutator_failure(&env).is_none())
        }),
        v.sampled("commute(H_trig_i) trigonometric", v.samples, |rng| {
            let h = trigonometric(&env, &random_nonzero_distinct(rng, n), &rand_cartan(rng)).map_err(err_s)?;
            Ok(h.commutator_failure(&env).is_none())
        }),
        v.sampled("commute(H_i_chi, G_k) inhomogeneous + dynamical", v.samples, |rng| {
            let z = random_distinct(rng, n, 5, 4);
            let chi = regular(rng);
            commuting_union(&env, inhomogeneous(&env, &z, &chi).map_err(err_s)?, dynamical(&env, &z, &chi).map_err(err_s)?)
        }),
    ])
}

fn suite_moduli(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let n = v.n;
    if n < 2 {
        return Err(CliError::Input("moduli suite needs n >= 2".into()));
    }
    let labels: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for space in [Space::M, Space::F, Space::T, Space::CalF] {
        out.push(v.sampled(&format!("interior points validate [{space}]"), v.samples, |rng| {
            let z = random_distinct(rng, n, 8, 5);
            let eps = (space == Space::CalF).then(|| random_nonzero(rng, 2, 7));
            match ModuliPoint::from_marked_points(space, &z, eps) {
                Ok(p) => Ok(p.validate().ok()),
                // 1 − εz_i = 0: not a point of the chart, skip
                Err(crate::moduli::ModuliError::PoleAtParameter(_)) => Ok(true),
                Err(e) => Err(e.to_string()),
            }
        }));
    }
    let k = (v.samples / 10).max(5);
    out.push(v.sampled("assembled boundary points validate and decompose", k, |rng| {
        let flower = rand::Rng::random_bool(rng, 0.5);
        let a = Assembly::random(rng, &labels, flower);
        let space = if flower { Space::F } else { Space::M };
        let p = boundary_from_components(&a, space).map_err(err_s)?;
        Ok(p.validate().ok() && p.decompose().map_err(err_s)? == a.canonical())
    }));
    Ok(out)
}

/// Boundary test points: maximal flower, one petal holding everything in one bubble, then random flowers.
fn boundary_points(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Vec<ModuliPoint>, String> {
    let labels: Vec<usize> = (1..=n).collect();
    let leaf = |p: i64, i: usize| (Rational::from_integer(p.into()), Child::Leaf(i));
    let mut out = Vec::new();
    let max = Assembly::F(labels.iter().map(|&i| Petal { slots: vec![leaf(0, i)] }).collect());
    out.push(boundary_from_components(&max, Space::F).map_err(err_s)?);
    let bubble = MNode {
        children: labels.iter().map(|&i| leaf(i as i64 * i as i64, i)).collect(),
    };
    let one = Assembly::F(vec![Petal {
        slots: vec![(Rational::from_integer(0.into()), Child::Node(bubble))],
    }]);
    out.push(boundary_from_components(&one, Space::F).map_err(err_s)?);
    while out.len() < k {
        let a = Assembly::random(rng, &labels, true);
        let p = boundary_from_components(&a, Space::F).map_err(err_s)?;
        if p.interior_marked_points().is_none() {
            out.push(p);
        }
    }
    Ok(out)
}

fn holonomy_check(p: &ModuliPoint) -> Result<bool, String> {
    let (h, q) = q_of_point(p).map_err(err_s)?;
    let rec = reconstruct_coordinates(&h, &q).map_err(err_s)?;
    let want_rank = if p.space() == Space::M { p.n() - 1 } else { p.n() };
    Ok(h.is_commutative(&q) && q.rank() == want_rank && coordinates_match(&rec, p.nu_map(), p.mu_map()))
}

fn suite_holonomy(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let n = v.n;
    Ok(vec![
        v.sampled("reconstruct(Q(z)) == (nu, mu) interior", v.samples, |rng| {
            let p = ModuliPoint::from_marked_points(Space::F, &random_distinct(rng, n, 8, 5), None).map_err(err_s)?;
            holonomy_check(&p)
        }),
        v.sampled("Q(C) commutative, rank n, reconstructs boundary point", 1, |rng| {
            let pts = boundary_points(rng, n, (v.samples / 2).max(3))?;
            for p in &pts {
                if !holonomy_check(p)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
    ])
}

fn suite_psi(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let env = v.env()?;
    let r = env.lie().rank();
    Ok(vec![v.sampled("psi_reduce(H_i) == H_trig", v.samples, |rng| {
        let z = random_nonzero_distinct(rng, v.n);
        let theta: Vec<Rational> = (0..r).map(|_| random_nonzero(rng, 4, 3)).collect();
        let got = trig_by_reduction(&env, &z, &theta).map_err(err_s)?;
        Ok(got == trigonometric(&env, &z, &theta).map_err(err_s)?.elements)
    })])
}

fn degeneration_limit(env: &Envelope, z: &[Rational], chi: &[Rational], pts: DegenerationPoints) -> Result<QuadraticSpan<Rational>, String> {
    span_limit_eps0(&degeneration_family(env, z, chi, pts).map_err(err_s)?).map_err(err_s)
}

fn suite_degeneration(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let env = v.env()?;
    let chi = v.chi(&env)?;
    let n = v.n;
    let target = |z: &[Rational]| interior_span(&env, z, &SpanParams::Inhomogeneous(chi.clone())).map_err(err_s);
    let neg = |z: &[Rational]| z.iter().map(|x| -x.clone()).collect::<Vec<_>>();
    let mut out = vec![
        v.sampled("lim span{H_trig(chi/eps; 1 - eps z), omega} == span{H_chi(-z), omega}", v.samples, |rng| {
            let z = random_distinct(rng, n, 5, 4);
            Ok(degeneration_limit(&env, &z, &chi, DegenerationPoints::Literal)?.same_as(&target(&neg(&z))?))
        }),
        v.sampled("lim span{H_trig(chi/eps; (1 - eps z)^-1), omega} == span{H_chi(z), omega}", v.samples, |rng| {
            let z = random_distinct(rng, n, 5, 4);
            Ok(degeneration_limit(&env, &z, &chi, DegenerationPoints::Inverse)?.same_as(&target(&z)?))
        }),
        v.sampled("lim span{H_trig(chi/eps; 1 + eps z), omega} == span{H_chi(z), omega}", v.samples, |rng| {
            let z = random_distinct(rng, n, 5, 4);
            Ok(degeneration_limit(&env, &z, &chi, DegenerationPoints::Plus)?.same_as(&target(&z)?))
        }),
        v.sampled("lim span{gamma_chi(h^eps(z)), omega} == span{H_chi(z), omega}", v.samples, |rng| {
            let z = random_distinct(rng, n, 5, 4);
            let lim = span_limit_eps0(&rtilde_family(&env, &z, &chi).map_err(err_s)?).map_err(err_s)?;
            Ok(lim.same_as(&target(&z)?))
        }),
    ];
    // the literal statement with points 1 − εz and target at z: reported, not asserted
    let mut lit = v.sampled("lim span{H_trig(chi/eps; 1 - eps z), omega} == span{H_chi(z), omega}", v.samples, |rng| {
        let z = random_distinct(rng, n, 5, 4);
        Ok(degeneration_limit(&env, &z, &chi, DegenerationPoints::Literal)?.same_as(&target(&z)?))
    });
    lit.pass = None;
    out.push(lit);
    Ok(out)
}

fn suite_verma(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let env = v.env()?;
    let r = env.lie().rank();
    let one = Rational::from_integer(1.into());
    let mut fund = vec![Rational::from_integer(0.into()); r];
    fund[0] = one;
    let lambdas = vec![fund; v.n];
    let weights = {
        let irr = Arc::new(build_irrep(env.lie(), &lambdas[0]).map_err(input)?);
        TensorRep::of_irreps(&vec![irr; v.n]).weights()
    };
    Ok(vec![v.sampled(
        "pi_theta(H_i on singular vectors) == H_trig on V(lambda)_mu",
        v.samples,
        |rng| {
            let z = random_nonzero_distinct(rng, v.n);
            loop {
                let theta: Vec<Rational> = (0..r).map(|_| random_nonzero(rng, 6, 7)).collect();
                let mut all = true;
                for mu in &weights {
                    match verma_matching(&env, &lambdas, &z, &theta, mu) {
                        Ok(pairs) => all &= pairs.iter().all(|(a, b)| a == b),
                        Err(GaudinError::NonGenericTheta(_)) => {
                            all = false;
                            break;
                        }
                        Err(e) => return Err(e.to_string()),
                    }
                }
                if all || verma_generic(&env, &lambdas, &z, &theta) {
                    return Ok(all);
                }
            }
        },
    )])
}

fn verma_generic(env: &Envelope, lambdas: &[Vec<Rational>], z: &[Rational], theta: &[Rational]) -> bool {
    let mu = lambdas.iter().fold(vec![Rational::from_integer(0.into()); theta.len()], |mut acc, l| {
        for (a, b) in acc.iter_mut().zip(l) {
            *a += b;
        }
        acc
    });
    !matches!(verma_matching(env, lambdas, z, theta, &mu), Err(GaudinError::NonGenericTheta(_)))
}

fn circle(t: f64) -> Complex64 {
    Complex64::new((1.0 - t * t) / (1.0 + t * t), 2.0 * t / (1.0 + t * t))
}

fn sub_form(g: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), rows.len(), |a, b| g[(rows[a], rows[b])])
}

fn suite_spectra(v: &VerifyCtx) -> Result<Vec<Assertion>, CliError> {
    let env = v.env()?;
    if env.lie().rank() != 1 {
        return Err(CliError::Input("spectra suite runs on A1".into()));
    }
    let n = v.n;
    let tol = v.ctx.tol;
    let v1 = Arc::new(build_irrep(env.lie(), &[Rational::from_integer(1.into())]).map_err(input)?);
    let rep = TensorRep::of_irreps(&vec![v1.clone(); n]);
    let g = to_complex(&rep.hermitian_gram());
    let seed = v.ctx.seed;
    let mut out = vec![v.sampled("inhomogeneous: normal, simple per weight space, cyclic", v.samples, |rng| {
        let z = random_distinct(rng, n, 5, 4);
        let chi = vec![random_nonzero(rng, 3, 4)];
        let h = inhomogeneous(&env, &z, &chi).map_err(err_s)?;
        let labels: Vec<String> = (1..=n).map(|i| format!("H{i}")).collect();
        let f = CommutingFamily::from_elements(&rep, &h.elements, labels, None, tol).map_err(err_s)?;
        let mut ok = f.is_normal_family(&g).map_err(err_s)?;
        for w in rep.weights() {
            let sp = f.restrict(&rep.weight_space(&w)).map_err(err_s)?.joint_eigenbasis(seed).map_err(err_s)?;
            ok &= sp.simple && sp.residual_max <= 1e-9;
        }
        ok &= f.is_cyclic(&CVec::from_element(rep.dim(), Complex64::new(1.0, 0.0)), None);
        Ok(ok)
    })];
    if n == 2 {
        for conv in CompactConvention::ALL {
            let mut a = v.sampled(
                &format!("compact trig ({}): normal and simple on each weight space", conv.describe()),
                v.samples,
                |rng| {
                    let ts = random_distinct(rng, n, 4, 5);
                    let z: Vec<Complex64> = ts.iter().map(|t| circle(to_f64(t))).collect();
                    let imag = vec![to_f64(&random_nonzero(rng, 2, 5))];
                    let (normal, simple) = compact_trig_check(&env, &rep, &z, &imag, conv, tol, seed).map_err(err_s)?;
                    Ok(normal && simple)
                },
            );
            if conv != CompactConvention::RhoPlusHalfMu {
                a.pass = None;
            }
            out.push(a);
        }
        out.push(v.sampled(
            "monodromy: constant, there-and-back identity; exchange involution, stable under doubling",
            1,
            |_| {
                let ex = exchange_loop(&env, &rep, &[Rational::from_integer(1.into())], tol).map_err(err_s)?;
                let m = monodromy_permutation(&ex, 16, seed).map_err(err_s)?;
                let m2 = monodromy_permutation(&ex, 32, seed).map_err(err_s)?;
                let back = monodromy_permutation(there_and_back(&ex), 32, seed).map_err(err_s)?;
                let constant = monodromy_permutation(|_| ex(0.3), 8, seed).map_err(err_s)?;
                let inv = m.compose(&m).iter().enumerate().all(|(a, &b)| a == b);
                Ok(inv && m.permutation == m2.permutation && back.is_identity() && constant.is_identity())
            },
        ));
    }
    Ok(out)
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let v = VerifyCtx {
        ctx,
        lie: a.lie.clone().or(ctx.spec.lie_type.clone()).unwrap_or_else(|| "A1".into()),
        n: a.n.or(ctx.spec.n).unwrap_or(2),
        samples: a.samples.or(ctx.spec.samples).unwrap_or(10),
        chi: a.chi.clone(),
    };
    if v.n == 0 || v.samples == 0 {
        return Err(CliError::Input("n and samples must be positive".into()));
    }
    let suites: Vec<Suite> = match a.suite {
        Suite::All => vec![
            Suite::Commutativity,
            Suite::Moduli,
            Suite::Holonomy,
            Suite::Psi,
            Suite::Degeneration,
            Suite::Verma,
            Suite::Spectra,
        ],
        s => vec![s],
    };
    let mut rows = Vec::new();
    for s in suites {
        let name = format!("{s:?}").to_lowercase();
        let got = match s {
            Suite::Commutativity => suite_commutativity(&v),
            Suite::Moduli => suite_moduli(&v),
            Suite::Holonomy => suite_holonomy(&v),
            Suite::Psi => suite_psi(&v),
            Suite::Degeneration => suite_degeneration(&v),
            Suite::Verma => suite_verma(&v),
            Suite::Spectra => suite_spectra(&v),
            Suite::All => unreachable!(),
        };
        match got {
            Ok(list) => rows.extend(list.into_iter().map(|x| (name.clone(), x))),
            // a suite that does not apply to these parameters under `all` is skipped
            Err(CliError::Input(m)) if a.suite == Suite::All => rows.push((
                name.clone(),
                Assertion {
                    name: "skipped".into(),
                    pass: None,
                    ms: 0.0,
                    detail: m,
                },
            )),
            Err(e) => return Err(e),
        }
    }
    let pass = rows.iter().all(|(_, x)| x.pass != Some(false));
    let lines: Vec<String> = rows.iter().map(|(_, x)| format!("{}: {}", x.name, x.status())).collect();
    let assertions: Vec<Value> = rows
        .iter()
        .map(|(s, x)| json!({"suite": s, "name": x.name, "status": x.status(), "ms": (x.ms * 1000.0).round() / 1000.0, "detail": x.detail}))
        .collect();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["suite", "name", "status", "ms", "detail"]).map_err(failed)?;
    for (s, x) in &rows {
        csv.write_record([s.as_str(), &x.name, x.status(), &format!("{:.3}", x.ms), &x.detail])
            .map_err(failed)?;
    }
    let csv = String::from_utf8(csv.into_inner().map_err(|e| CliError::Failed(e.to_string()))?).expect("utf8");
    Ok(Outcome {
        json: json!({"lie_type": v.lie, "n": v.n, "samples": v.samples, "seed": ctx.seed, "pass": pass, "lines": lines, "assertions": assertions}),
        csv: Some(csv),
        pass,
    })
}

// ---------- spectrum ----------

fn cmd_spectrum(ctx: &Ctx) -> Result<Outcome, CliError> {
    let spec = &ctx.spec;
    let env = env_of(ctx, None)?;
    let weights = spec.weights.as_ref().ok_or_else(|| CliError::Input("MissingField: weights".into()))?;
    let rep = tensor_rep(&env, weights)?;
    let n = rep.n_factors();
    let model = spec.model.as_deref().unwrap_or("inhomogeneous");
    let checks = spec.checks.clone().unwrap_or_default();
    for c in &checks {
        if c != "normal" && c != "cyclic" {
            return Err(CliError::Input(format!("UnknownCheck: {c}")));
        }
    }
    let g = to_complex(&rep.hermitian_gram());
    let tol = ctx.tol;
    let mut blocks = Vec::new();
    let mut csv_blocks: Vec<(String, JointSpectrum)> = Vec::new();
    let mut all_simple = true;

    let mut finish = |tag: Value, f: &CommutingFamily, rows: &[usize]| -> Result<(), CliError> {
        let sp: JointSpectrum = f.joint_eigenbasis(ctx.seed).map_err(failed)?;
        all_simple &= sp.simple;
        let mut o = sp.to_json();
        o["weight"] = tag.clone();
        o["dim"] = json!(rows.len());
        if checks.iter().any(|c| c == "normal") {
            o["normal"] = json!(f.is_normal_family(&sub_form(&g, rows)).map_err(failed)?);
        }
        if checks.iter().any(|c| c == "cyclic") {
            o["cyclic"] = json!(f.is_cyclic(&CVec::from_element(rows.len(), Complex64::new(1.0, 0.0)), None));
        }
        let label = match &tag {
            Value::Array(a) => a.iter().map(|x| x.as_str().unwrap_or("").to_string()).collect::<Vec<_>>().join(" "),
            _ => "all".into(),
        };
        csv_blocks.push((label, sp));
        blocks.push(o);
        Ok(())
    };

    if let Some(ts) = &spec.circle {
        // compact trig on the unit circle, one block per weight space
        if model != "trig" {
            return Err(CliError::Input("circle points need model \"trig\"".into()));
        }
        let c = spec.compact.as_ref().ok_or_else(|| CliError::Input("MissingField: compact".into()))?;
        let conv = match c.convention.as_str() {
            "minus_half_mu" => CompactConvention::MinusHalfMu,
            "plus_half_mu" => CompactConvention::PlusHalfMu,
            "rho_plus_half_mu" => CompactConvention::RhoPlusHalfMu,
            o => return Err(CliError::Input(format!("UnknownConvention: {o}"))),
        };
        let t = rationals(ts)?;
        if t.len() != n {
            return Err(CliError::Input(format!("WrongLength: {} circle points for {n} factors", t.len())));
        }
        let z: Vec<Complex64> = t.iter().map(|x| circle(to_f64(x))).collect();
        for a in 0..n {
            for b in a + 1..n {
                if t[a] == t[b] {
                    return Err(CliError::Input(kind_of(&GaudinError::CoincidentPoints(a + 1, b + 1))));
                }
            }
        }
        for w in rep.weights() {
            let rows = rep.weight_space(&w);
            let theta = compact_theta(&env, &w, &c.imag, conv).map_err(input)?;
            let mats = trig_matrices(&env, &rep, &z, &theta, &rows).map_err(input)?;
            let labels = (1..=n).map(|i| format!("H{i}")).collect();
            let f = CommutingFamily::new(mats, labels, tol).map_err(failed)?;
            finish(weight_json(&w), &f, &rows)?;
        }
    } else {
        let z = rationals(spec.points.as_ref().ok_or_else(|| CliError::Input("MissingField: points".into()))?)?;
        if z.len() != n {
            return Err(CliError::Input(format!("WrongLength: {} points for {n} factors", z.len())));
        }
        let h = match model {
            "homogeneous" => homogeneous(&env, &z),
            "trig" => trigonometric(&env, &z, &cartan_param(&env, spec.theta.as_ref(), "theta")?),
            "inhomogeneous" => inhomogeneous(&env, &z, &cartan_param(&env, spec.chi.as_ref(), "chi")?),
            "dynamical" => dynamical(&env, &z, &cartan_param(&env, spec.chi.as_ref(), "chi")?),
            o => return Err(CliError::Input(format!("UnknownModel: {o}"))),
        }
        .map_err(input)?;
        let mut elems = h.elements.clone();
        let mut labels: Vec<String> = (1..=elems.len())
            .map(|i| if model == "dynamical" { format!("G{i}") } else { format!("H{i}") })
            .collect();
        if spec.whole_space.unwrap_or(false) {
            // diagonal Cartan elements split the weight spaces
            let all: Vec<usize> = (0..n).collect();
            for k in 0..env.lie().rank() {
                elems.push(env.diagonal(n, &all, env.lie().h_index(k)));
                labels.push(format!("dh{}", k + 1));
            }
            let f = CommutingFamily::from_elements(&rep, &elems, labels, None, tol).map_err(failed)?;
            let rows: Vec<usize> = (0..rep.dim()).collect();
            finish(Value::Null, &f, &rows)?;
        } else {
            for w in rep.weights() {
                let rows = rep.weight_space(&w);
                let f = CommutingFamily::from_elements(&rep, &elems, labels.clone(), Some(&rows), tol).map_err(failed)?;
                finish(weight_json(&w), &f, &rows)?;
            }
        }
    }
    let json = json!({"model": model, "seed": ctx.seed, "simple": all_simple, "blocks": blocks});
    let complex = csv_blocks.iter().any(|(_, sp)| sp.is_complex());
    let mut wr = csv::Writer::from_writer(Vec::new());
    if let Some((_, sp)) = csv_blocks.first() {
        wr.write_record(sp.csv_header(complex)).map_err(failed)?;
    }
    for (label, sp) in &csv_blocks {
        for r in sp.csv_rows(label, complex) {
            wr.write_record(&r).map_err(failed)?;
        }
    }
    let csv = String::from_utf8(wr.into_inner().map_err(|e| CliError::Failed(e.to_string()))?).expect("utf8");
    Ok(Outcome {
        json,
        csv: Some(csv),
        pass: true,
    })
}

// ---------- monodromy ----------

fn cmd_monodromy(ctx: &Ctx, a: &MonodromyArgs) -> Result<Outcome, CliError> {
    let spec = &ctx.spec;
    let env = env_of(ctx, None)?;
    let default_w = vec![vec!["1".to_string()], vec!["1".to_string()]];
    let rep = tensor_rep(&env, spec.weights.as_ref().unwrap_or(&default_w))?;
    let chi = match &spec.chi {
        Some(c) => cartan_param(&env, Some(c), "chi")?,
        None => parse_chi("h", env.lie().rank())?,
    };
    let steps = a.steps.or(spec.steps).unwrap_or(32);
    let kind = a.loop_kind.or(spec.loop_kind).unwrap_or(LoopKind::Exchange);
    let ex = exchange_loop(&env, &rep, &chi, ctx.tol).map_err(input)?;
    let m = match kind {
        LoopKind::Exchange => monodromy_permutation(&ex, steps, ctx.seed),
        LoopKind::ThereAndBack => monodromy_permutation(there_and_back(&ex), steps, ctx.seed),
        LoopKind::Constant => monodromy_permutation(|_| ex(0.0), steps, ctx.seed),
    }
    .map_err(failed)?;
    let mut csv = String::from("line,image\n");
    for (i, p) in m.permutation.iter().enumerate() {
        csv.push_str(&format!("{i},{p}\n"));
    }
    let json =
        json!({"loop": format!("{kind:?}").to_lowercase(), "steps": steps, "permutation": m.permutation, "samples": m.samples, "identity": m.is_identity()});
    Ok(Outcome {
        json,
        csv: Some(csv),
        pass: true,
    })
}

// ---------- moduli ----------

fn cmd_moduli(ctx: &Ctx, m: ModuliCmd) -> Result<Outcome, CliError> {
    let spec = &ctx.spec;
    let point = || -> Result<ModuliPoint, CliError> {
        ModuliPoint::from_json(spec.point.as_ref().ok_or_else(|| CliError::Input("MissingField: point".into()))?).map_err(input)
    };
    match m {
        ModuliCmd::Validate => {
            let p = point()?;
            let r = p.validate();
            Ok(Outcome {
                json: json!({"valid": r.ok(), "checked": r.checked, "violation": r.violation}),
                csv: None,
                pass: r.ok(),
            })
        }
        ModuliCmd::Assemble => {
            let a = Assembly::from_json(spec.assembly.as_ref().ok_or_else(|| CliError::Input("MissingField: assembly".into()))?).map_err(input)?;
            let space = Space::parse(spec.space.as_deref().unwrap_or(if matches!(a, Assembly::M(_)) { "M" } else { "F" })).map_err(input)?;
            let p = boundary_from_components(&a, space).map_err(input)?;
            let r = p.validate();
            Ok(Outcome {
                json: json!({"point": p.to_json(), "valid": r.ok()}),
                csv: None,
                pass: r.ok(),
            })
        }
        ModuliCmd::Decompose => {
            let p = point()?;
            let a = p.decompose().map_err(input)?;
            let st = p.stratum();
            let forest = a.forest().to_string();
            Ok(Outcome {
                json: json!({"assembly": a.to_json(), "forest": forest, "interior": st.interior, "petals": st.petals, "clusters": st.clusters}),
                csv: None,
                pass: true,
            })
        }
    }
}

// ---------- limit ----------

fn cmd_limit(ctx: &Ctx) -> Result<Outcome, CliError> {
    let spec = &ctx.spec;
    let env = env_of(ctx, None)?;
    let family = spec.family.as_deref().unwrap_or("degeneration");
    let z = rationals(spec.points.as_ref().ok_or_else(|| CliError::Input("MissingField: points".into()))?)?;
    let chi = cartan_param(&env, spec.chi.as_ref(), "chi")?;
    if !is_regular(&CartanVector::new(chi.clone(), CartanRole::Chi), env.lie()) {
        return Err(input(GaudinError::NonRegularChi));
    }
    let fam = match family {
        "degeneration" => degeneration_family(&env, &z, &chi, DegenerationPoints::Literal),
        "degeneration_inverse" => degeneration_family(&env, &z, &chi, DegenerationPoints::Inverse),
        "degeneration_plus" => degeneration_family(&env, &z, &chi, DegenerationPoints::Plus),
        "rtilde" => rtilde_family(&env, &z, &chi),
        o => return Err(CliError::Input(format!("UnknownFamily: {o}"))),
    }
    .map_err(input)?;
    let lim = span_limit_eps0(&fam).map_err(failed)?;
    let target = interior_span(&env, &z, &SpanParams::Inhomogeneous(chi.clone())).map_err(input)?;
    let neg: Vec<Rational> = z.iter().map(|x| -x.clone()).collect();
    let flipped = interior_span(&env, &neg, &SpanParams::Inhomogeneous(chi)).map_err(input)?;
    let json = json!({
        "family": family,
        "dim": lim.dim(),
        "equals_inhomogeneous_at_z": lim.same_as(&target),
        "equals_inhomogeneous_at_minus_z": lim.same_as(&flipped),
        "limit": lim.to_json(&env),
    });
    Ok(Outcome { json, csv: None, pass: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        main_with(std::iter::once("gaudin").chain(args.iter().copied()))
    }

    fn write_spec(name: &str, v: Value) -> PathBuf {
        let p = std::env::temp_dir().join(format!("gaudin-cli-{}-{name}.json", std::process::id()));
        std::fs::write(&p, v.to_string()).unwrap();
        p
    }

    fn output(args: &[&str]) -> (i32, Value) {
        let out = std::env::temp_dir().join(format!("gaudin-cli-out-{}-{}.json", std::process::id(), args.join("_").replace(['/', ' '], "")));
        let mut a: Vec<&str> = args.to_vec();
        let s = out.to_string_lossy().to_string();
        a.extend(["--out", &s]);
        let code = run_args(&a);
        let v = std::fs::read_to_string(&out)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or(Value::Null);
        (code, v)
    }

    #[test]
    fn verify_suites() {
        let (code, v) = output(&["verify", "--suite", "psi", "--lie", "A1", "--n", "2", "--samples", "3"]);
        assert_eq!(code, 0);
        assert!(v["lines"].as_array().unwrap().iter().any(|l| l == "psi_reduce(H_i) == H_trig: pass"));
        let (code, _) = output(&["verify", "--suite", "moduli", "--n", "4", "--samples", "50"]);
        assert_eq!(code, 0);
        let (code, v) = output(&["verify", "--suite", "degeneration", "--lie", "A1", "--n", "2", "--chi", "h", "--samples", "2"]);
        assert_eq!(code, 0);
        let lines = v["lines"].as_array().unwrap();
        assert!(lines.iter().any(|l| l
            .as_str()
            .unwrap()
            .starts_with("lim span{H_trig(chi/eps; 1 - eps z), omega} == span{H_chi(z), omega}: info")));
        assert_eq!(run_args(&["verify", "--suite", "nonsense"]), 2);
    }

    #[test]
    fn spectrum_runs() {
        let p = write_spec(
            "inh",
            json!({"lie_type": "A1", "weights": [["1"], ["1"]], "model": "inhomogeneous", "points": ["0", "1"], "chi": ["1"], "checks": ["normal", "cyclic"]}),
        );
        let (code, v) = output(&["spectrum", "--spec", p.to_str().unwrap(), "--seed", "3"]);
        assert_eq!(code, 0);
        assert_eq!(v["simple"], json!(true));
        assert_eq!(v["blocks"].as_array().unwrap().len(), 3);
        // byte-stable
        let (_, w) = output(&["spectrum", "--spec", p.to_str().unwrap(), "--seed", "3"]);
        assert_eq!(v, w);
        let bad = write_spec(
            "coinc",
            json!({"weights": [["1"], ["1"]], "model": "inhomogeneous", "points": ["1", "1"], "chi": ["1"]}),
        );
        assert_eq!(run_args(&["spectrum", "--spec", bad.to_str().unwrap()]), 2);
        let compact = write_spec(
            "compact",
            json!({"weights": [["1"], ["2"]], "model": "trig", "circle": ["1/2", "-2"], "compact": {"convention": "rho_plus_half_mu", "imag": [0.7]}, "checks": ["normal"]}),
        );
        let (code, v) = output(&["spectrum", "--spec", compact.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(v["blocks"].as_array().unwrap().iter().all(|b| b["normal"] == json!(true)));
        let unknown = write_spec("unknown", json!({"weights": [["1"]], "colour": "red"}));
        assert_eq!(run_args(&["spectrum", "--spec", unknown.to_str().unwrap()]), 2);
    }

    #[test]
    fn monodromy_and_moduli() {
        let (code, v) = output(&["monodromy", "--loop", "exchange", "--steps", "16"]);
        assert_eq!(code, 0);
        assert_eq!(v["identity"], json!(false));
        let (_, v) = output(&["monodromy", "--loop", "there-and-back"]);
        assert_eq!(v["identity"], json!(true));
        let a = json!({"kind": "F", "petals": [[{"pos": "0", "leaf": 1}, {"pos": "2", "leaf": 3}], [{"pos": "0", "leaf": 2}]]});
        let p = write_spec("asm", json!({"assembly": a, "space": "F"}));
        let (code, v) = output(&["moduli", "assemble", "--spec", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{v}");
        let q = write_spec("pt", json!({"point": v["point"]}));
        let (code, d) = output(&["moduli", "decompose", "--spec", q.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(d["forest"], json!("(1 3)(2)"));
        let (code, _) = output(&["moduli", "validate", "--spec", q.to_str().unwrap()]);
        assert_eq!(code, 0);
    }

    #[test]
    fn limit_runs() {
        let p = write_spec("lim", json!({"family": "degeneration_plus", "points": ["0", "1"], "chi": ["1"]}));
        let (code, v) = output(&["limit", "--spec", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(v["equals_inhomogeneous_at_z"], json!(true));
    }
}
