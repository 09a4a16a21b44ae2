use std::fmt::Write as _;
use std::path::Path;

use clap::Args;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use diophant_core::cfrac::{convergents, denominators_to_cf, expand_real};
use diophant_core::dataprog::{classify_periodic_geometric, cost, periodic_geometric, states_csv, XiKind};
use diophant_core::dirichlet::{
    build_bad_point_for_max, dirichlet_decide, dirichlet_decide_family, dirichlet_decide_scaled, estimate_c,
    estimate_omega, gamma_optimum_check, minprod_uniform_check, DirichletOutcome,
};
use diophant_core::funexpr::parse_expr;
use diophant_core::heights::alpha_d;
use diophant_core::recint::{decide_rr, decide_rr_both, Method, RecIntDecision, Verdict};
use diophant_core::{HeightKind, PsiSpec, Real};

use crate::config::{Format, RunConfig};
use crate::Command;

#[derive(Debug, Args, Serialize)]
pub struct CfracArgs {
    /// Number to expand: p/q, a decimal, pi, e, phi or a surd such as sqrt2-1
    #[arg(long, conflicts_with = "from_denoms", required_unless_present = "from_denoms")]
    expand: Option<String>,
    /// Target denominators 1,q1,q2,... as a comma list or a file
    #[arg(long)]
    from_denoms: Option<String>,
    /// Number of terms for irrational inputs
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct RecintArgs {
    /// Expression in x, e.g. "0.2/x^2" or "fNC(1,0.3)"
    #[arg(long)]
    func: String,
    /// ode, recurrence or both
    #[arg(long, default_value = "both")]
    method: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DirichletArgs {
    #[arg(long)]
    d: usize,
    /// power:A, nc:D,N,C or custom:EXPR (in q)
    #[arg(long, required_unless_present = "family", conflicts_with = "family")]
    psi: Option<String>,
    /// N,C for the family member psi_{N,C}
    #[arg(long)]
    family: Option<String>,
    /// Decide c·psi instead of psi
    #[arg(long, requires = "psi")]
    scale: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OmegaArgs {
    /// Comma-separated coordinates
    #[arg(long)]
    point: String,
    /// max, min, prod or lcm
    #[arg(long, default_value = "max")]
    height: String,
    #[arg(long)]
    qmax: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantArgs {
    #[arg(long)]
    point: String,
    #[arg(long, default_value = "max")]
    height: String,
    #[arg(long)]
    psi: String,
    #[arg(long)]
    qmax: Option<f64>,
    /// Smallest height considered; defaults to sqrt(qmax)
    #[arg(long)]
    h_lo: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DataprogArgs {
    /// D GAMMA: A_k = GAMMA^k, i_k cycling through 1..D
    #[arg(long, num_args = 2, value_names = ["D", "GAMMA"], required = true)]
    periodic_geometric: Vec<String>,
    /// XI ALPHA: cost with Xi in {max,min,sum} and Psi(b) = ALPHA b
    #[arg(long, num_args = 2, value_names = ["XI", "ALPHA"], required = true)]
    cost: Vec<String>,
    /// Number of progression terms
    #[arg(long, default_value_t = 40)]
    k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AdversaryArgs {
    #[arg(long)]
    height: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    grid: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BadPointArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Defaults to the critical power law q^(-alpha_d)
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    terms: Option<usize>,
}

pub struct Output {
    pub text: String,
    pub undetermined: bool,
}

#[derive(Serialize, Deserialize)]
struct Cached {
    text: String,
    undetermined: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    artifact: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    args: &'a Command,
    config: &'a RunConfig,
    result: Value,
}

/// What a command produced, before formatting.
struct Product {
    result: Value,
    human: String,
    csv: Option<String>,
    default: Format,
    undetermined: bool,
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn to_value<T: Serialize>(v: &T) -> Res<Value> {
    serde_json::to_value(v).map_err(err)
}

pub fn run(name: &str, cmd: &Command, cfg: &RunConfig) -> Res<Output> {
    let key = cache_key(name, cmd, cfg)?;
    if let Some(dir) = &cfg.cache_dir {
        if let Ok(text) = std::fs::read_to_string(dir.join(format!("{key}.json"))) {
            if let Ok(c) = serde_json::from_str::<Cached>(&text) {
                return Ok(Output { text: c.text, undetermined: c.undetermined });
            }
        }
    }
    let p = match cmd {
        Command::Cfrac(a) => cfrac(a, cfg)?,
        Command::Recint(a) => recint(a, cfg)?,
        Command::Dirichlet(a) => dirichlet(a, cfg)?,
        Command::Omega(a) => omega(a, cfg)?,
        Command::Constant(a) => constant(a, cfg)?,
        Command::Dataprog(a) => dataprog(a)?,
        Command::Adversary(a) => adversary(a, cfg)?,
        Command::Gamma(a) => gamma(a, cfg)?,
        Command::BadPoint(a) => bad_point(a, cfg)?,
    };
    let text = match cfg.format.unwrap_or(p.default) {
        Format::Json => {
            let env = Envelope {
                artifact: "diophant",
                version: env!("CARGO_PKG_VERSION"),
                command: name,
                seed: cfg.seed,
                args: cmd,
                config: cfg,
                result: p.result,
            };
            serde_json::to_string_pretty(&env).map_err(err)? + "\n"
        }
        Format::Csv => p.csv.ok_or_else(|| format!("{name} has no CSV output"))?,
        Format::Human => p.human,
    };
    if let Some(dir) = &cfg.cache_dir {
        std::fs::create_dir_all(dir).map_err(err)?;
        let c = Cached { text: text.clone(), undetermined: p.undetermined };
        std::fs::write(dir.join(format!("{key}.json")), serde_json::to_string(&c).map_err(err)?).map_err(err)?;
    }
    Ok(Output { text, undetermined: p.undetermined })
}

fn cache_key(name: &str, cmd: &Command, cfg: &RunConfig) -> Res<String> {
    let v = json!({ "version": env!("CARGO_PKG_VERSION"), "command": name, "args": cmd, "config": cfg });
    let digest = Sha256::digest(serde_json::to_vec(&v).map_err(err)?);
    Ok(digest.iter().take(16).map(|b| format!("{b:02x}")).collect())
}

fn json_product(result: Value, human: String, undetermined: bool) -> Product {
    Product { result, human, csv: None, default: Format::Json, undetermined }
}

fn parse_point(s: &str) -> Res<Vec<Real>> {
    s.split(',').map(|t| Real::parse(t.trim()).map_err(err)).collect()
}

fn parse_height(s: &str) -> Res<HeightKind> {
    s.parse().map_err(err)
}

fn int_list<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|a| a.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn cfrac(a: &CfracArgs, cfg: &RunConfig) -> Res<Product> {
    if let Some(x) = &a.expand {
        let real = Real::parse(x).map_err(err)?;
        let cf = expand_real(&real, a.depth.unwrap_or(cfg.depth), cfg.bits).map_err(err)?;
        let convs: Vec<(String, String)> =
            convergents(&cf, cf.last_index()).iter().map(|c| (c.p.to_string(), c.q.to_string())).collect();
        let human = int_list(&cf.terms()) + "\n";
        let result =
            json!({ "input": x, "terms": to_value(&cf)?, "rational": real.is_rational(), "convergents": convs });
        return Ok(Product { result, human, csv: None, default: Format::Human, undetermined: false });
    }
    let spec = a.from_denoms.as_deref().ok_or("either --expand or --from-denoms is required")?;
    let text = if Path::new(spec).is_file() { std::fs::read_to_string(spec).map_err(err)? } else { spec.to_string() };
    let targets = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| format!("bad denominator '{t}'")))
        .collect::<Res<Vec<_>>>()?;
    let cf = denominators_to_cf(&targets).map_err(err)?;
    let qs: Vec<_> = convergents(&cf, cf.last_index()).into_iter().map(|c| c.q).collect();
    let two = BigInt::from(2);
    let sandwich = qs.iter().zip(&targets).all(|(q, t)| q <= t && &(&two * q) >= t);
    let human = format!(
        "quotients: {}\nq: {}\nsandwich: {}\n",
        int_list(&cf.partial_quotients),
        int_list(&qs),
        if sandwich { "ok" } else { "FAILED" }
    );
    let result = json!({
        "targets": targets.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "terms": to_value(&cf)?,
        "q": qs.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "sandwich": sandwich,
    });
    Ok(Product { result, human, csv: None, default: Format::Human, undetermined: false })
}

fn recint(a: &RecintArgs, cfg: &RunConfig) -> Res<Product> {
    let f = parse_expr(&a.func).map_err(err)?;
    let rr = cfg.rr();
    let (verdict, decisions, notes): (Verdict, Vec<RecIntDecision>, Vec<String>) = match a.method.as_str() {
        "both" => {
            let c = decide_rr_both(&f, &rr).map_err(err)?;
            (c.verdict, c.decisions, c.notes)
        }
        m => {
            let method: Method = m.parse().map_err(err)?;
            let d = decide_rr(&f, method, &rr).map_err(err)?;
            (d.verdict, vec![d], vec![])
        }
    };
    let csv = decisions
        .iter()
        .filter_map(|d| d.witness.as_ref().and_then(|w| w.ode.as_ref()))
        .map(|w| w.trace.to_csv())
        .next();
    let human = format!("{verdict:?}\n");
    let result = json!({ "function": f.to_string(), "verdict": verdict, "decisions": decisions, "notes": notes });
    Ok(Product { result, human, csv, default: Format::Json, undetermined: verdict == Verdict::Undetermined })
}

fn dirichlet(a: &DirichletArgs, cfg: &RunConfig) -> Res<Product> {
    let rr = cfg.rr();
    let v = match (&a.psi, &a.family) {
        (_, Some(fam)) => {
            let (n, c) = fam.split_once(',').ok_or("--family expects N,C")?;
            let n: u32 = n.trim().parse().map_err(|_| format!("bad N '{n}'"))?;
            let c: f64 = c.trim().parse().map_err(|_| format!("bad C '{c}'"))?;
            dirichlet_decide_family(a.d, n, c, &rr).map_err(err)?
        }
        (Some(psi), None) => {
            let psi: PsiSpec = psi.parse().map_err(err)?;
            match a.scale {
                Some(c) => dirichlet_decide_scaled(&psi, c, a.d, &rr).map_err(err)?,
                None => dirichlet_decide(&psi, a.d, &rr).map_err(err)?,
            }
        }
        (None, None) => return Err("either --psi or --family is required".into()),
    };
    let human = format!("{:?}\n", v.verdict);
    let undetermined = v.verdict == DirichletOutcome::Undetermined;
    Ok(json_product(to_value(&v)?, human, undetermined))
}

fn omega(a: &OmegaArgs, cfg: &RunConfig) -> Res<Product> {
    let x = parse_point(&a.point)?;
    let kind = parse_height(&a.height)?;
    let e = estimate_omega(&x, kind, a.qmax.unwrap_or(cfg.qmax)).map_err(err)?;
    let human = format!("omega ≈ {:.4} ({}, window max {:.4})\n", e.omega, e.method, e.window_max);
    Ok(json_product(to_value(&e)?, human, false))
}

fn constant(a: &ConstantArgs, cfg: &RunConfig) -> Res<Product> {
    let x = parse_point(&a.point)?;
    let kind = parse_height(&a.height)?;
    let psi: PsiSpec = a.psi.parse().map_err(err)?;
    let e = estimate_c(&x, kind, &psi, a.qmax.unwrap_or(cfg.qmax), a.h_lo).map_err(err)?;
    let mut csv = String::from("ln_height,min_ratio\n");
    for r in &e.running {
        let _ = writeln!(csv, "{},{}", r.ln_height, r.min_ratio);
    }
    let human = format!("C ≈ {:.6} over {} candidates\n", e.min_ratio, e.candidates);
    Ok(Product { result: to_value(&e)?, human, csv: Some(csv), default: Format::Json, undetermined: false })
}

fn dataprog(a: &DataprogArgs) -> Res<Product> {
    let d: usize = a.periodic_geometric[0].parse().map_err(|_| "bad D".to_string())?;
    let gamma: f64 = a.periodic_geometric[1].parse().map_err(|_| "bad GAMMA".to_string())?;
    let xi: XiKind = a.cost[0].parse().map_err(err)?;
    let alpha: f64 = a.cost[1].parse().map_err(|_| "bad ALPHA".to_string())?;
    let p = periodic_geometric(d, gamma, a.k).map_err(err)?;
    let report = cost(&p, xi, |b| Ok(alpha * b), usize::MAX).map_err(err)?;
    let csv = states_csv(&p, &report).map_err(err)?;
    let closed =
        if xi == XiKind::Max { Some(classify_periodic_geometric(d, gamma, alpha).map_err(err)?) } else { None };
    let human = format!("trend {:?}, closed form {:?}, running min {:.6e}\n", report.trend, closed, report.running_min);
    let result = json!({ "progression": p, "cost": report, "closed_form": closed });
    Ok(Product { result, human, csv: Some(csv), default: Format::Csv, undetermined: false })
}

fn adversary(a: &AdversaryArgs, cfg: &RunConfig) -> Res<Product> {
    let kind = parse_height(&a.height)?;
    let r = minprod_uniform_check(kind, a.d, a.trials.unwrap_or(cfg.trials), cfg.seed).map_err(err)?;
    let human = format!(
        "{} plays terminated; max K-steps {}, max budget {}, longest play {} moves\n",
        r.terminated, r.max_k_steps, r.max_budget, r.max_moves
    );
    Ok(json_product(to_value(&r)?, human, false))
}

fn gamma(a: &GammaArgs, cfg: &RunConfig) -> Res<Product> {
    let r = gamma_optimum_check(a.d, a.grid.unwrap_or(cfg.grid_step)).map_err(err)?;
    let human = format!(
        "argmax {:.6} (gamma_d {:.6}), max {:.12}, min of g + g^(1-d) {:.6} (alpha_d {:.6})\n",
        r.argmax, r.gamma_d, r.max_value, r.min_value, r.alpha_d
    );
    Ok(json_product(to_value(&r)?, human, false))
}

fn bad_point(a: &BadPointArgs, cfg: &RunConfig) -> Res<Product> {
    let psi = match &a.psi {
        Some(s) => s.parse().map_err(err)?,
        None => PsiSpec::PowerLaw(alpha_d(a.d)),
    };
    let p = build_bad_point_for_max(a.d, &psi, a.terms.unwrap_or(cfg.terms), &cfg.rr()).map_err(err)?;
    let w = p.estimate_omega().map_err(err)?;
    let human = format!(
        "k0 = {}, C1 = {}, largest denominator ~ 10^{:.0}, omega(max) ≈ {:.4} (alpha_d = {:.4})\n",
        p.k0,
        p.c1,
        p.ln_q_max / std::f64::consts::LN_10,
        w.omega,
        alpha_d(a.d)
    );
    let result = json!({ "point": p, "omega": w });
    Ok(json_product(result, human, false))
}
