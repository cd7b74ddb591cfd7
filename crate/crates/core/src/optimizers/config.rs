use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Sg,
    Rsg,
    Msg,
    SaaSg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sg => "SG",
            Method::Rsg => "RSG",
            Method::Msg => "MSG",
            Method::SaaSg => "SAA_SG",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['-', '+'], "_").as_str() {
            "SG" => Ok(Method::Sg),
            "RSG" => Ok(Method::Rsg),
            "MSG" => Ok(Method::Msg),
            "SAA_SG" | "SAASG" => Ok(Method::SaaSg),
            _ => Err(Error::Argument(format!(
                "unknown method `{s}` (expected SG, RSG, MSG or SAA_SG)"
            ))),
        }
    }
}

/// Stepsize `gamma_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `a / sqrt(t)`
    InvSqrt(f64),
}

impl StepSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant(g) => g,
            StepSchedule::InvSqrt(a) => a / (t as f64).sqrt(),
        }
    }
}

/// Regularization weight `lambda_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    Zero,
    Constant(f64),
    /// `1 / t`
    Inverse,
}

impl LambdaSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            LambdaSchedule::Zero => 0.0,
            LambdaSchedule::Constant(l) => l,
            LambdaSchedule::Inverse => 1.0 / t as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputRule {
    /// One of `x^1..x^T` chosen uniformly at random.
    UniformRandomIterate,
    /// Mean of the last `window` iterates.
    TailAverage(usize),
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    FixedT,
    /// Stop when consecutive `window`-iterate means move less than `tol`.
    AvgDrift {
        window: usize,
        tol: f64,
    },
}

impl StopRule {
    pub fn practical() -> Self {
        StopRule::AvgDrift {
            window: 100,
            tol: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub max_iters: usize,
    pub step: StepSchedule,
    pub lambda: LambdaSchedule,
    /// Neumann truncation level for MSG.
    pub big_k: usize,
    /// Frozen sample size for SAA+SG.
    pub n: usize,
    /// Cap on the shrinking radius; `None` means `1/sqrt(dT)`.
    pub delta0: Option<f64>,
    pub seed: u64,
    /// Starting point; `None` means the projection of the origin.
    pub init: Option<Vec<f64>>,
    pub output_rule: OutputRule,
    pub stop_rule: StopRule,
    /// Evaluate the objective every this many iterations (0 disables).
    pub eval_every: usize,
    pub eval_samples: usize,
    /// Keep every `thin`-th iterate in the trace (0 keeps none).
    pub thin: usize,
    /// Use the coordinate estimator inside SAA+SG.
    pub coord_estimator: bool,
    pub record_timing: bool,
}

impl RunConfig {
    /// Practical defaults: `gamma_t = a/sqrt(t)`, `lambda_t = 1/t`, `K = 10`, `n = 1000`.
    pub fn new(method: Method, max_iters: usize, seed: u64) -> Self {
        Self {
            method,
            max_iters,
            step: StepSchedule::InvSqrt(1.0),
            lambda: if method == Method::Sg {
                LambdaSchedule::Zero
            } else {
                LambdaSchedule::Inverse
            },
            big_k: 10,
            n: 1000,
            delta0: None,
            seed,
            init: None,
            output_rule: OutputRule::TailAverage(100),
            stop_rule: StopRule::FixedT,
            eval_every: 50,
            eval_samples: 5000,
            thin: 1,
            coord_estimator: false,
            record_timing: false,
        }
    }

    /// `gamma = T^{-1/2}`, `lambda = D_X^{-1} T^{-1/4}`, uniform random output.
    pub fn theory_rsg(max_iters: usize, radius: f64, seed: u64) -> Self {
        let t = max_iters as f64;
        Self {
            step: StepSchedule::Constant(t.powf(-0.5)),
            lambda: LambdaSchedule::Constant(t.powf(-0.25) / radius.max(f64::MIN_POSITIVE)),
            output_rule: OutputRule::UniformRandomIterate,
            ..Self::new(Method::Rsg, max_iters, seed)
        }
    }

    /// `gamma = lambda = (D_X T)^{-1/2}` and `K` large enough that the inverse bias
    /// `(1 - mu_g / 2L)^K` falls below `eps / D_X`.
    pub fn theory_msg(
        max_iters: usize,
        radius: f64,
        eps: f64,
        mu_g: f64,
        lipschitz: f64,
        seed: u64,
    ) -> Self {
        let g = (radius * max_iters as f64).powf(-0.5);
        let q = 1.0 - mu_g / (2.0 * lipschitz);
        let k = if q <= 0.0 {
            1.0
        } else {
            ((eps / radius).ln() / q.ln()).ceil().max(1.0)
        };
        Self {
            step: StepSchedule::Constant(g),
            lambda: LambdaSchedule::Constant(g),
            big_k: k as usize,
            output_rule: OutputRule::UniformRandomIterate,
            ..Self::new(Method::Msg, max_iters, seed)
        }
    }

    /// `gamma = (n d T)^{-1/2}`, `delta0 = (d T)^{-1/2}`.
    pub fn theory_saa(max_iters: usize, dim: usize, n: usize, seed: u64) -> Self {
        let t = max_iters as f64;
        Self {
            step: StepSchedule::Constant((n as f64 * dim as f64 * t).powf(-0.5)),
            lambda: LambdaSchedule::Zero,
            n,
            delta0: Some((dim as f64 * t).powf(-0.5)),
            output_rule: OutputRule::TailAverage(max_iters),
            ..Self::new(Method::SaaSg, max_iters, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Argument(m.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        match self.step {
            StepSchedule::Constant(g) | StepSchedule::InvSqrt(g) if !(g > 0.0 && g.is_finite()) => {
                return bad("stepsize must be positive");
            }
            _ => {}
        }
        if let LambdaSchedule::Constant(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return bad("lambda must be nonnegative");
            }
        }
        if self.method == Method::Sg && self.lambda != LambdaSchedule::Zero {
            return bad("SG runs without regularization; use RSG for lambda > 0");
        }
        if self.big_k == 0 {
            return bad("K must be at least 1");
        }
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if let Some(d) = self.delta0 {
            if !(d > 0.0) {
                return bad("delta0 must be positive");
            }
        }
        match self.output_rule {
            OutputRule::TailAverage(0) => return bad("tail-average window must be at least 1"),
            _ => {}
        }
        if let StopRule::AvgDrift { window, tol } = self.stop_rule {
            if window == 0 || !(tol >= 0.0) {
                return bad("drift window must be at least 1 and tolerance nonnegative");
            }
        }
        if self.eval_every > 0 && self.eval_samples == 0 {
            return bad("eval_samples must be positive when evaluation is enabled");
        }
        Ok(())
    }
}
