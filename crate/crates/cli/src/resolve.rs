//! Turns a parsed config into runnable problems and optimizer settings.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hcopt_core::optimizers::{
    LambdaSchedule, Method, OutputRule, RunConfig, StepSchedule, StopRule,
};
use hcopt_core::{BoxDomain, Dist, PhiFamily, PhiKind, Problem, Quadratic, XiSampler};
use hcopt_nrm::{
    build_instance, nrm_problem, parse_class_table, AirCargoSpec, DemandTotals, GradientMode,
    HubSpokeSpec, InstanceSpec, NrmError, NrmInstance, TinySpec,
};
use sha2::{Digest, Sha256};

use crate::config::*;
use crate::diag::{locate, position, ConfigError};

#[derive(Debug)]
pub enum Target {
    Synthetic(Problem),
    Nrm {
        instance: Arc<NrmInstance>,
        problem: Problem,
    },
}

impl Target {
    pub fn problem(&self) -> &Problem {
        match self {
            Target::Synthetic(p) | Target::Nrm { problem: p, .. } => p,
        }
    }
}

#[derive(Debug)]
pub struct ResolvedMethod {
    pub label: String,
    /// Seed is the experiment seed; repeat `r` adds `r`.
    pub config: RunConfig,
}

#[derive(Debug)]
pub struct Resolved {
    pub source: PathBuf,
    pub config: ExperimentConfig,
    /// Canonical TOML of `config`; hashed for provenance.
    pub text: String,
    pub hash: String,
    pub target: Target,
    pub methods: Vec<ResolvedMethod>,
}

impl Resolved {
    pub fn nrm(&self) -> Result<&Arc<NrmInstance>, ConfigError> {
        match &self.target {
            Target::Nrm { instance, .. } => Ok(instance),
            Target::Synthetic(_) => Err(ConfigError {
                file: self.source.clone(),
                location: None,
                message: "this command needs a problem of kind \"nrm\"".into(),
            }),
        }
    }
}

struct Ctx<'a> {
    file: &'a Path,
    src: &'a str,
}

impl Ctx<'_> {
    fn err(
        &self,
        table: &str,
        index: usize,
        key: Option<&str>,
        message: impl Into<String>,
    ) -> ConfigError {
        ConfigError {
            file: self.file.to_path_buf(),
            location: locate(self.src, table, index, key),
            message: message.into(),
        }
    }
}

pub fn load(path: &Path) -> Result<Resolved, ConfigError> {
    let src = fs::read_to_string(path).map_err(|e| ConfigError {
        file: path.to_path_buf(),
        location: None,
        message: format!("cannot read config: {e}"),
    })?;
    resolve_str(&src, path)
}

pub fn resolve_str(src: &str, path: &Path) -> Result<Resolved, ConfigError> {
    let mut cfg: ExperimentConfig = toml::from_str(src).map_err(|e| ConfigError {
        file: path.to_path_buf(),
        location: e.span().map(|s| position(src, s.start)),
        message: e.message().to_string(),
    })?;
    let cx = Ctx { file: path, src };
    check_experiment(&cx, &cfg)?;
    let target = match &mut cfg.problem {
        ProblemSpec::Synthetic(s) => Target::Synthetic(synthetic(&cx, s)?),
        ProblemSpec::Nrm(n) => {
            let base = path.parent().unwrap_or(Path::new("."));
            let instance = Arc::new(nrm_instance(&cx, &mut n.instance, base)?);
            let mode = match n.gradient_mode {
                ModeName::DualApprox => GradientMode::DualApprox,
                ModeName::ExactDiff => GradientMode::ExactDiff,
            };
            let problem = nrm_problem(instance.clone(), mode)
                .map_err(|e| cx.err("problem", 0, None, e.to_string()))?;
            Target::Nrm { instance, problem }
        }
    };
    let mut methods = Vec::with_capacity(cfg.methods.len());
    for (i, m) in cfg.methods.iter_mut().enumerate() {
        let r = method(&cx, i, m, target.problem(), &cfg.experiment)?;
        if methods.iter().any(|o: &ResolvedMethod| o.label == r.label) {
            return Err(cx.err(
                "method",
                i,
                Some("label"),
                format!("duplicate method label `{}`", r.label),
            ));
        }
        methods.push(r);
    }
    for (i, p) in cfg.policies.iter().enumerate() {
        let label = p.label();
        check_label(&cx, "policy", i, &label)?;
        if methods.iter().any(|m| m.label == label)
            || cfg.policies[..i].iter().any(|q| q.label() == label)
        {
            return Err(cx.err(
                "policy",
                i,
                Some("label"),
                format!("duplicate policy label `{label}`"),
            ));
        }
        if let PolicySpec::Fixed { x, .. } = p {
            if x.len() != target.problem().dim() {
                return Err(cx.err(
                    "policy",
                    i,
                    Some("x"),
                    format!(
                        "expected {} limits, got {}",
                        target.problem().dim(),
                        x.len()
                    ),
                ));
            }
        }
    }
    let text = toml::to_string(&cfg).map_err(|e| ConfigError {
        file: path.to_path_buf(),
        location: None,
        message: format!("cannot echo resolved config: {e}"),
    })?;
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(Resolved {
        source: path.to_path_buf(),
        config: cfg,
        text,
        hash,
        target,
        methods,
    })
}

fn check_label(cx: &Ctx, table: &str, i: usize, label: &str) -> Result<(), ConfigError> {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_-.+".contains(c));
    if ok {
        Ok(())
    } else {
        Err(cx.err(
            table,
            i,
            Some("label"),
            format!("label `{label}` may only use letters, digits, `_`, `-`, `.`, `+`"),
        ))
    }
}

fn check_experiment(cx: &Ctx, cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    let e = &cfg.experiment;
    if e.name.is_empty() || e.name.contains(['/', '\\']) {
        return Err(cx.err(
            "experiment",
            0,
            Some("name"),
            "name must be nonempty and contain no path separators",
        ));
    }
    if e.repeat == 0 {
        return Err(cx.err("experiment", 0, Some("repeat"), "repeat must be at least 1"));
    }
    if cfg.methods.is_empty() {
        return Err(cx.err("experiment", 0, None, "at least one [[method]] is required"));
    }
    if cfg.evaluation.n_scenarios == 0 {
        return Err(cx.err(
            "evaluation",
            0,
            Some("n_scenarios"),
            "n_scenarios must be at least 1",
        ));
    }
    Ok(())
}

fn dist(d: &DistSpec) -> Dist {
    match d.clone() {
        DistSpec::Uniform { a, b } => Dist::Uniform { a, b },
        DistSpec::TruncatedNormal { mu, sigma } => Dist::TruncatedNormal { mu, sigma },
        DistSpec::Discrete { support, weights } => Dist::Discrete { support, weights },
        DistSpec::Poisson { mean } => Dist::Poisson { mean },
        DistSpec::Binomial { n, p } => Dist::Binomial { n, p },
    }
}

fn synthetic(cx: &Ctx, s: &mut SyntheticSpec) -> Result<Problem, ConfigError> {
    let e = |key: &str, m: String| cx.err("problem", 0, Some(key), m);
    let d = s.lower.len();
    let domain =
        BoxDomain::new(s.lower.clone(), s.upper.clone()).map_err(|x| e("upper", x.to_string()))?;
    if s.xi.len() == 1 && d > 1 {
        s.xi = vec![s.xi[0].clone(); d];
    }
    if s.xi.len() != d {
        return Err(e(
            "xi",
            format!("expected 1 or {d} distributions, got {}", s.xi.len()),
        ));
    }
    let sampler =
        XiSampler::new(s.xi.iter().map(dist).collect()).map_err(|x| e("xi", x.to_string()))?;
    let phi = match s.phi {
        PhiSpec::TruncMin => Ok(PhiFamily::trunc_min()),
        PhiSpec::Product { lipschitz } => PhiFamily::new(PhiKind::Product, lipschitz),
        PhiSpec::Saturating {
            alpha,
            kappa,
            lipschitz,
        } => PhiFamily::new(PhiKind::Saturating { alpha, kappa }, lipschitz),
        PhiSpec::Share { k, lipschitz } => PhiFamily::new(PhiKind::Share { k }, lipschitz),
    }
    .map_err(|x| e("phi", x.to_string()))?;
    let weights = s.weights.clone().unwrap_or_else(|| vec![1.0; d]);
    if s.center.len() != d {
        return Err(e(
            "center",
            format!("expected {d} entries, got {}", s.center.len()),
        ));
    }
    let outer = Quadratic::new(s.center.clone(), weights.clone())
        .map_err(|x| e("weights", x.to_string()))?;
    s.weights = Some(weights);
    let lipschitz = match s.outer_lipschitz {
        Some(l) => l,
        None => {
            let lo: Vec<f64> = s.lower.iter().map(|v| v.min(0.0)).collect();
            let hi: Vec<f64> = s
                .upper
                .iter()
                .zip(sampler.dists())
                .map(|(u, dd)| {
                    if dd.sup().is_finite() {
                        u.max(dd.sup())
                    } else {
                        *u
                    }
                })
                .collect();
            outer.lipschitz_on(&lo, &hi).max(f64::MIN_POSITIVE)
        }
    };
    s.outer_lipschitz = Some(lipschitz);
    let mut p = Problem::new(domain, phi, sampler, Arc::new(outer), lipschitz)
        .map_err(|x| e("outer_lipschitz", x.to_string()))?;
    if let Some(mu) = s.mu_g {
        p = p.with_mu_g(mu);
    }
    Ok(p)
}

fn totals(t: TotalsName) -> DemandTotals {
    match t {
        TotalsName::Poisson => DemandTotals::Poisson,
        TotalsName::Binomial => DemandTotals::Binomial,
    }
}

fn totals_name(t: DemandTotals) -> TotalsName {
    match t {
        DemandTotals::Poisson => TotalsName::Poisson,
        DemandTotals::Binomial => TotalsName::Binomial,
    }
}

/// Parses `(N, kappa, delta, sigma, p, rho, gamma)`.
pub fn parse_label(label: &str) -> Result<(usize, [f64; 6]), String> {
    let inner = label.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 7 {
        return Err(format!(
            "label `{label}` must have 7 entries (N,kappa,delta,sigma,p,rho,gamma)"
        ));
    }
    let n = parts[0]
        .parse::<usize>()
        .map_err(|_| format!("label entry N `{}` is not an integer", parts[0]))?;
    let mut rest = [0.0; 6];
    for (slot, s) in rest.iter_mut().zip(&parts[1..]) {
        *slot = s
            .parse::<f64>()
            .map_err(|_| format!("label entry `{s}` is not a number"))?;
    }
    Ok((n, rest))
}

fn merge<T: PartialEq + Copy + std::fmt::Debug>(
    slot: &mut Option<T>,
    from_label: T,
    name: &str,
) -> Result<(), String> {
    match *slot {
        Some(v) if v != from_label => Err(format!(
            "{name} = {v:?} contradicts the label value {from_label:?}"
        )),
        _ => {
            *slot = Some(from_label);
            Ok(())
        }
    }
}

fn nrm_instance(
    cx: &Ctx,
    inst: &mut InstanceConfig,
    base: &Path,
) -> Result<NrmInstance, ConfigError> {
    let e = |key: Option<&str>, m: String| cx.err("problem.instance", 0, key, m);
    let spec = match inst {
        InstanceConfig::Tiny(t) => InstanceSpec::Tiny(TinySpec {
            capacity_cv: t.capacity_cv,
        }),
        InstanceConfig::HubSpoke(h) => {
            if let Some(label) = h.label.clone() {
                let (n, [kappa, delta, sigma, p, rho, gamma]) =
                    parse_label(&label).map_err(|m| e(Some("label"), m))?;
                let merged = merge(&mut h.spokes, n, "spokes")
                    .and_then(|_| merge(&mut h.kappa, kappa, "kappa"))
                    .and_then(|_| merge(&mut h.delta, delta, "delta"))
                    .and_then(|_| merge(&mut h.sigma, sigma, "sigma"))
                    .and_then(|_| merge(&mut h.show_up_prob, p, "show_up_prob"))
                    .and_then(|_| merge(&mut h.load_factor, rho, "load_factor"))
                    .and_then(|_| merge(&mut h.capacity_cv, gamma, "capacity_cv"));
                merged.map_err(|m| e(Some("label"), m))?;
            }
            let d = HubSpokeSpec::default();
            let s = HubSpokeSpec {
                spokes: *h.spokes.get_or_insert(d.spokes),
                kappa: *h.kappa.get_or_insert(d.kappa),
                delta: *h.delta.get_or_insert(d.delta),
                sigma: *h.sigma.get_or_insert(d.sigma),
                show_up_prob: *h.show_up_prob.get_or_insert(d.show_up_prob),
                load_factor: *h.load_factor.get_or_insert(d.load_factor),
                capacity_cv: *h.capacity_cv.get_or_insert(d.capacity_cv),
                leg_capacity: *h.leg_capacity.get_or_insert(d.leg_capacity),
                periods: *h.periods.get_or_insert(d.periods),
                demand_totals: totals(*h.demand_totals.get_or_insert(totals_name(d.demand_totals))),
                upper: *h.upper.get_or_insert(d.upper),
                seed: *h.seed.get_or_insert(d.seed),
            };
            InstanceSpec::HubSpoke(s)
        }
        InstanceConfig::AirCargo(a) => {
            let d = AirCargoSpec::default();
            let classes = match &a.table {
                None => d.classes.clone(),
                Some(t) => {
                    let p = base.join(t);
                    let text = fs::read_to_string(&p).map_err(|x| {
                        e(Some("table"), format!("cannot read {}: {x}", p.display()))
                    })?;
                    parse_class_table(&text)
                        .map_err(|x| e(Some("table"), format!("{}: {x}", p.display())))?
                }
            };
            InstanceSpec::AirCargo(AirCargoSpec {
                classes,
                routing: *a.routing.get_or_insert(d.routing),
                consumption_cv: *a.consumption_cv.get_or_insert(d.consumption_cv),
                capacity_cv: *a.capacity_cv.get_or_insert(d.capacity_cv),
                load_factor: *a.load_factor.get_or_insert(d.load_factor),
                theta2: *a.theta2.get_or_insert(d.theta2),
                penalty_mult: *a.penalty_mult.get_or_insert(d.penalty_mult),
                correlation: *a.correlation.get_or_insert(d.correlation),
                periods: *a.periods.get_or_insert(d.periods),
                arrival_prob: *a.arrival_prob.get_or_insert(d.arrival_prob),
                demand_totals: totals(*a.demand_totals.get_or_insert(totals_name(d.demand_totals))),
                upper: *a.upper.get_or_insert(d.upper),
            })
        }
    };
    build_instance(&spec).map_err(|x| match x {
        NrmError::Invalid(list) => e(None, format!("invalid instance: {}", list.join("; "))),
        other => e(None, other.to_string()),
    })
}

fn parse_output(s: &str) -> Result<OutputRule, String> {
    match s {
        "uniform" => Ok(OutputRule::UniformRandomIterate),
        "last" => Ok(OutputRule::Last),
        _ => s
            .strip_prefix("tail:")
            .and_then(|w| w.parse().ok())
            .map(OutputRule::TailAverage)
            .ok_or_else(|| {
                format!("output `{s}` must be \"uniform\", \"last\" or \"tail:<window>\"")
            }),
    }
}

fn output_name(r: OutputRule) -> String {
    match r {
        OutputRule::UniformRandomIterate => "uniform".into(),
        OutputRule::Last => "last".into(),
        OutputRule::TailAverage(w) => format!("tail:{w}"),
    }
}

fn parse_stop(s: &str) -> Result<StopRule, String> {
    if s == "fixed" {
        return Ok(StopRule::FixedT);
    }
    let bad = || format!("stop `{s}` must be \"fixed\" or \"drift:<window>:<tol>\"");
    let rest = s.strip_prefix("drift:").ok_or_else(bad)?;
    let (w, t) = rest.split_once(':').ok_or_else(bad)?;
    Ok(StopRule::AvgDrift {
        window: w.parse().map_err(|_| bad())?,
        tol: t.parse().map_err(|_| bad())?,
    })
}

fn stop_name(r: StopRule) -> String {
    match r {
        StopRule::FixedT => "fixed".into(),
        StopRule::AvgDrift { window, tol } => format!("drift:{window}:{tol}"),
    }
}

fn method(
    cx: &Ctx,
    i: usize,
    m: &mut MethodSpec,
    problem: &Problem,
    exp: &ExperimentSection,
) -> Result<ResolvedMethod, ConfigError> {
    let e = |key: Option<&str>, msg: String| cx.err("method", i, key, msg);
    let kind: Method = m
        .method
        .parse()
        .map_err(|x: hcopt_core::Error| e(Some("method"), x.to_string()))?;
    let label = m
        .label
        .get_or_insert_with(|| kind.name().to_string())
        .clone();
    check_label(cx, "method", i, &label)?;
    if m.max_iters == 0 {
        return Err(e(Some("max_iters"), "max_iters must be at least 1".into()));
    }
    let t = m.max_iters;
    let radius = problem.domain.radius();
    let mut cfg = match m.preset.as_deref() {
        None => RunConfig::new(kind, t, exp.seed),
        Some("theory") => match kind {
            Method::Rsg => RunConfig::theory_rsg(t, radius, exp.seed),
            Method::Msg => {
                let mu = problem.mu_g.ok_or_else(|| {
                    e(
                        Some("preset"),
                        "the theory MSG preset needs problem.mu_g".into(),
                    )
                })?;
                let eps = *m.epsilon.get_or_insert(1e-3);
                RunConfig::theory_msg(t, radius, eps, mu, problem.phi.lipschitz(), exp.seed)
            }
            Method::SaaSg => RunConfig::theory_saa(t, problem.dim(), m.n.unwrap_or(1000), exp.seed),
            Method::Sg => return Err(e(Some("preset"), "SG has no theory preset".into())),
        },
        Some(other) => {
            return Err(e(
                Some("preset"),
                format!("unknown preset `{other}` (expected \"theory\")"),
            ))
        }
    };
    if let Some(s) = &m.step {
        cfg.step = match *s {
            StepSpec::Constant { a } => StepSchedule::Constant(a),
            StepSpec::InvSqrt { a } => StepSchedule::InvSqrt(a),
        };
    }
    if let Some(l) = &m.lambda {
        cfg.lambda = match *l {
            LambdaSpec::Zero => LambdaSchedule::Zero,
            LambdaSpec::Inverse => LambdaSchedule::Inverse,
            LambdaSpec::Constant { value } => LambdaSchedule::Constant(value),
        };
    }
    cfg.big_k = m.big_k.unwrap_or(cfg.big_k);
    cfg.n = m.n.unwrap_or(cfg.n);
    cfg.delta0 = m.delta0.or(cfg.delta0);
    if let Some(x) = &m.init {
        if x.len() != problem.dim() {
            return Err(e(
                Some("init"),
                format!("expected {} entries, got {}", problem.dim(), x.len()),
            ));
        }
        cfg.init = Some(x.clone());
    }
    if let Some(o) = &m.output {
        cfg.output_rule = parse_output(o).map_err(|x| e(Some("output"), x))?;
    }
    if let Some(s) = &m.stop {
        cfg.stop_rule = parse_stop(s).map_err(|x| e(Some("stop"), x))?;
    }
    cfg.eval_every = m.eval_every.unwrap_or(cfg.eval_every);
    cfg.eval_samples = m.eval_samples.unwrap_or(cfg.eval_samples);
    cfg.thin = m.thin.unwrap_or(cfg.thin);
    cfg.coord_estimator = m.coord_estimator.unwrap_or(cfg.coord_estimator);
    cfg.record_timing = exp.record_timing;
    cfg.validate().map_err(|x| e(None, x.to_string()))?;

    m.step = Some(match cfg.step {
        StepSchedule::Constant(a) => StepSpec::Constant { a },
        StepSchedule::InvSqrt(a) => StepSpec::InvSqrt { a },
    });
    m.lambda = Some(match cfg.lambda {
        LambdaSchedule::Zero => LambdaSpec::Zero,
        LambdaSchedule::Inverse => LambdaSpec::Inverse,
        LambdaSchedule::Constant(value) => LambdaSpec::Constant { value },
    });
    m.big_k = Some(cfg.big_k);
    m.n = Some(cfg.n);
    m.delta0 = cfg.delta0;
    m.output = Some(output_name(cfg.output_rule));
    m.stop = Some(stop_name(cfg.stop_rule));
    m.eval_every = Some(cfg.eval_every);
    m.eval_samples = Some(cfg.eval_samples);
    m.thin = Some(cfg.thin);
    m.coord_estimator = Some(cfg.coord_estimator);
    Ok(ResolvedMethod { label, config: cfg })
}
