//! Deterministic instance builders.

use hcopt_core::rng::stream;
use hcopt_core::Dist;
use rand::Rng;

use crate::error::{Issues, NrmError, Result};
use crate::instance::{CargoNetwork, Network, NrmInstance, PassengerNetwork, ShowUp};
use crate::marginal::Marginal;

/// Bundled air-cargo class parameters.
pub const DEFAULT_CARGO_TABLE: &str = include_str!("../data/cargo_classes.csv");

/// Distribution of a class's total demand over the booking horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemandTotals {
    #[default]
    Poisson,
    /// One Bernoulli arrival chance per period.
    Binomial,
}

impl DemandTotals {
    fn dist(self, mean: f64, periods: u64) -> Dist {
        match self {
            DemandTotals::Poisson => Dist::Poisson { mean },
            DemandTotals::Binomial => Dist::Binomial {
                n: periods,
                p: (mean / periods as f64).min(1.0),
            },
        }
    }
}

/// Hub-and-spoke passenger network labelled by `(N, kappa, delta, sigma, p, rho, gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HubSpokeSpec {
    pub spokes: usize,
    pub kappa: f64,
    pub delta: f64,
    pub sigma: f64,
    pub show_up_prob: f64,
    pub load_factor: f64,
    pub capacity_cv: f64,
    pub leg_capacity: f64,
    pub periods: u64,
    pub demand_totals: DemandTotals,
    pub upper: f64,
    pub seed: u64,
}

impl Default for HubSpokeSpec {
    fn default() -> Self {
        Self {
            spokes: 4,
            kappa: 4.0,
            delta: 4.0,
            sigma: 0.0,
            show_up_prob: 0.9,
            load_factor: 1.2,
            capacity_cv: 0.1,
            leg_capacity: 40.0,
            periods: 240,
            demand_totals: DemandTotals::Poisson,
            upper: 100.0,
            seed: 0,
        }
    }
}

impl HubSpokeSpec {
    pub fn validate(&self) -> Result<()> {
        let mut is = Issues::default();
        is.check(self.spokes >= 1, || "spokes: must be at least 1".into());
        is.check(self.kappa >= 1.0, || {
            format!("kappa: {} must be at least 1", self.kappa)
        });
        is.check(self.delta >= 0.0, || {
            format!("delta: {} must be nonnegative", self.delta)
        });
        is.check(self.sigma >= 0.0, || {
            format!("sigma: {} must be nonnegative", self.sigma)
        });
        is.check(self.show_up_prob > 0.0 && self.show_up_prob <= 1.0, || {
            format!("show_up_prob: {} outside (0, 1]", self.show_up_prob)
        });
        is.check(self.load_factor > 0.0, || {
            format!("load_factor: {} must be positive", self.load_factor)
        });
        is.check(self.capacity_cv >= 0.0, || {
            format!("capacity_cv: {} must be nonnegative", self.capacity_cv)
        });
        is.check(self.leg_capacity > 0.0, || {
            format!("leg_capacity: {} must be positive", self.leg_capacity)
        });
        is.check(self.periods >= 1, || "periods: must be at least 1".into());
        is.check(self.upper > 0.0, || {
            format!("upper: {} must be positive", self.upper)
        });
        is.finish()
    }
}

/// Air-cargo spoke-hub network with nodes 1..=4 as spokes and node 5 as the hub.
/// Legs 1..=4 fly spoke to hub, legs 5..=8 hub to spoke, optional leg 9 flies 1 to 3.
#[derive(Debug, Clone, PartialEq)]
pub struct AirCargoSpec {
    pub classes: Vec<CargoClass>,
    pub routing: bool,
    pub consumption_cv: f64,
    pub capacity_cv: f64,
    pub load_factor: f64,
    pub theta2: f64,
    pub penalty_mult: f64,
    pub correlation: f64,
    pub periods: u64,
    /// Probability that some request arrives in a period, split evenly across classes.
    pub arrival_prob: f64,
    pub demand_totals: DemandTotals,
    pub upper: f64,
}

impl Default for AirCargoSpec {
    fn default() -> Self {
        Self {
            classes: parse_class_table(DEFAULT_CARGO_TABLE).expect("bundled table parses"),
            routing: false,
            consumption_cv: 0.1,
            capacity_cv: 0.1,
            load_factor: 1.0,
            theta2: 0.6,
            penalty_mult: 2.4,
            correlation: 0.8,
            periods: 240,
            arrival_prob: 0.9,
            demand_totals: DemandTotals::Poisson,
            upper: 100.0,
        }
    }
}

/// Small passenger network: class 0 on leg 0, class 1 on leg 1, class 2 on both.
#[derive(Debug, Clone, PartialEq)]
pub struct TinySpec {
    pub capacity_cv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    HubSpoke(HubSpokeSpec),
    AirCargo(AirCargoSpec),
    Tiny(TinySpec),
}

pub fn build_instance(spec: &InstanceSpec) -> Result<NrmInstance> {
    match spec {
        InstanceSpec::HubSpoke(s) => hub_spoke(s),
        InstanceSpec::AirCargo(s) => air_cargo(s),
        InstanceSpec::Tiny(s) => tiny_instance(s.capacity_cv),
    }
}

fn hub_spoke(s: &HubSpokeSpec) -> Result<NrmInstance> {
    s.validate()?;
    let n = s.spokes;
    let legs = 2 * n;
    let mut rng = stream(s.seed, &[0x4855_4253]);
    let base: Vec<f64> = (0..legs).map(|_| rng.random_range(50.0..150.0)).collect();
    // itineraries as leg lists: spoke->hub, hub->spoke, spoke->spoke via the hub
    let mut itineraries: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
    itineraries.extend((0..n).map(|b| vec![n + b]));
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            itineraries.push(vec![a, n + b]);
        }
    }
    let d = 2 * itineraries.len();
    let mut consumption = vec![vec![0.0; d]; legs];
    let mut revenue = Vec::with_capacity(d);
    let mut weight = Vec::with_capacity(d);
    for (k, legs_used) in itineraries.iter().enumerate() {
        let low: f64 = legs_used.iter().map(|&j| base[j]).sum();
        let popularity = rng.random_range(0.5..1.5);
        for (c, (fare, w)) in [(low, 3.0 * popularity), (s.kappa * low, popularity)]
            .into_iter()
            .enumerate()
        {
            let i = 2 * k + c;
            for &j in legs_used {
                consumption[j][i] = 1.0;
            }
            revenue.push(fare);
            weight.push(w);
        }
    }
    // scale demand so consumption-weighted expected demand is load_factor times capacity
    let load: f64 = (0..d)
        .map(|i| weight[i] * consumption.iter().map(|row| row[i]).sum::<f64>())
        .sum();
    let scale = s.load_factor * s.leg_capacity * legs as f64 / load;
    let demand = weight
        .iter()
        .map(|w| s.demand_totals.dist(w * scale, s.periods))
        .collect();
    let max_r = revenue.iter().cloned().fold(0.0, f64::max);
    let penalty = revenue
        .iter()
        .map(|r| s.delta * r + s.sigma * max_r)
        .collect();
    let network = Network::Passenger(PassengerNetwork {
        consumption,
        capacity: vec![Marginal::with_cv(s.leg_capacity, s.capacity_cv); legs],
        revenue,
        penalty,
    });
    NrmInstance::new(
        demand,
        ShowUp::Binomial(vec![s.show_up_prob; d]),
        network,
        s.upper,
    )
}

/// One row of the air-cargo class table.
#[derive(Debug, Clone, PartialEq)]
pub struct CargoClass {
    pub id: usize,
    pub mean_weight: f64,
    pub mean_volume: f64,
    pub origin: usize,
    pub destination: usize,
    pub per_unit_revenue: f64,
}

/// Parses `class, mean_weight, mean_volume, origin, destination, per_unit_revenue` rows.
/// Fields may be separated by commas, tabs, `&` or spaces; `#` starts a comment and a
/// non-numeric first row is taken as a header.
pub fn parse_class_table(text: &str) -> Result<Vec<CargoClass>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == '&' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let err = |message: String| NrmError::Table {
            line: k + 1,
            message,
        };
        if out.is_empty() && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", fields.len())));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| err(format!("field {} ({:?}) is not a number", i + 1, fields[i])))
        };
        let node = |i: usize| -> Result<usize> {
            let v = num(i)?;
            if v.fract() != 0.0 || !(1.0..=5.0).contains(&v) {
                return Err(err(format!("field {} must be a node in 1..=5", i + 1)));
            }
            Ok(v as usize)
        };
        let class = CargoClass {
            id: num(0)? as usize,
            mean_weight: num(1)?,
            mean_volume: num(2)?,
            origin: node(3)?,
            destination: node(4)?,
            per_unit_revenue: num(5)?,
        };
        if class.origin == class.destination {
            return Err(err("origin equals destination".into()));
        }
        if class.mean_weight < 0.0 || class.mean_volume < 0.0 || class.per_unit_revenue < 0.0 {
            return Err(err(
                "weights, volumes and revenues must be nonnegative".into()
            ));
        }
        out.push(class);
    }
    if out.is_empty() {
        return Err(NrmError::Table {
            line: 0,
            message: "no class rows".into(),
        });
    }
    Ok(out)
}

const HUB: usize = 5;

fn cargo_routes(c: &CargoClass, routing: bool) -> Vec<Vec<usize>> {
    let inbound = |o: usize| o - 1;
    let outbound = |t: usize| 3 + t;
    let main = if c.destination == HUB {
        vec![inbound(c.origin)]
    } else if c.origin == HUB {
        vec![outbound(c.destination)]
    } else {
        vec![inbound(c.origin), outbound(c.destination)]
    };
    if routing && c.origin == 1 && c.destination == 3 {
        vec![vec![8], main]
    } else {
        vec![main]
    }
}

fn air_cargo(s: &AirCargoSpec) -> Result<NrmInstance> {
    let mut is = Issues::default();
    is.check(!s.classes.is_empty(), || "classes: table is empty".into());
    is.check(s.consumption_cv >= 0.0, || {
        format!("consumption_cv: {} must be nonnegative", s.consumption_cv)
    });
    is.check(s.capacity_cv >= 0.0, || {
        format!("capacity_cv: {} must be nonnegative", s.capacity_cv)
    });
    is.check(s.load_factor > 0.0, || {
        format!("load_factor: {} must be positive", s.load_factor)
    });
    is.check(s.theta2 > 0.0, || {
        format!("theta2: {} must be positive", s.theta2)
    });
    is.check(s.arrival_prob > 0.0 && s.arrival_prob <= 1.0, || {
        format!("arrival_prob: {} outside (0, 1]", s.arrival_prob)
    });
    is.check(s.periods >= 1, || "periods: must be at least 1".into());
    is.finish()?;
    let d = s.classes.len();
    let mean_demand = s.periods as f64 * s.arrival_prob / d as f64;
    let mut load_w = [0.0; 8];
    let mut load_v = [0.0; 8];
    for c in &s.classes {
        for &j in &cargo_routes(c, false)[0] {
            load_w[j] += mean_demand * c.mean_weight;
            load_v[j] += mean_demand * c.mean_volume;
        }
    }
    let (mut cap_w, mut cap_v): (Vec<f64>, Vec<f64>) = load_w
        .iter()
        .zip(&load_v)
        .map(|(w, v)| (w / s.load_factor, v / s.load_factor))
        .unzip();
    if s.routing {
        let (tw, tv) = (cap_w.iter().sum::<f64>(), cap_v.iter().sum::<f64>());
        cap_w
            .iter_mut()
            .chain(cap_v.iter_mut())
            .for_each(|c| *c *= 8.0 / 9.0);
        cap_w.push(tw / 9.0);
        cap_v.push(tv / 9.0);
    }
    let legs = cap_w.len();
    let network = Network::AirCargo(CargoNetwork {
        legs,
        routes: s
            .classes
            .iter()
            .map(|c| cargo_routes(c, s.routing))
            .collect(),
        weight: s
            .classes
            .iter()
            .map(|c| Marginal::with_cv(c.mean_weight, s.consumption_cv))
            .collect(),
        volume: s
            .classes
            .iter()
            .map(|c| Marginal::with_cv(c.mean_volume, s.consumption_cv))
            .collect(),
        consumption_corr: s.correlation,
        cap_weight: cap_w
            .iter()
            .map(|&c| Marginal::with_cv(c, s.capacity_cv))
            .collect(),
        cap_volume: cap_v
            .iter()
            .map(|&c| Marginal::with_cv(c, s.capacity_cv))
            .collect(),
        capacity_corr: s.correlation,
        theta1: s.classes.iter().map(|c| c.per_unit_revenue).collect(),
        theta2: s.theta2,
        penalty_mult: s.penalty_mult,
    });
    let demand = vec![s.demand_totals.dist(mean_demand, s.periods); d];
    NrmInstance::new(demand, ShowUp::AllShowUp, network, s.upper)
}

/// Two legs, three classes, all customers show up; small enough to enumerate `{0..10}^3`.
pub fn tiny_instance(capacity_cv: f64) -> Result<NrmInstance> {
    let revenue = vec![100.0, 150.0, 220.0];
    let network = Network::Passenger(PassengerNetwork {
        consumption: vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]],
        capacity: vec![
            Marginal::with_cv(8.0, capacity_cv),
            Marginal::with_cv(7.0, capacity_cv),
        ],
        penalty: revenue.iter().map(|r| 4.0 * r).collect(),
        revenue,
    });
    let demand = [10.0, 9.0, 6.0]
        .iter()
        .map(|&mean| Dist::Poisson { mean })
        .collect();
    NrmInstance::new(demand, ShowUp::AllShowUp, network, 20.0)
}
