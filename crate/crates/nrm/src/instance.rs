//! Instance data and scenario sampling.

use hcopt_core::sampler::{binomial, poisson};
use hcopt_core::Dist;
use rand::{Rng, RngCore};

use crate::error::{Issues, Result};
use crate::marginal::{correlated, Marginal};

/// How accepted reservations turn into show-ups at service time.
#[derive(Debug, Clone, PartialEq)]
pub enum ShowUp {
    AllShowUp,
    /// `Z_i ~ Poisson(p_i * accepted_i)`.
    Poisson(Vec<f64>),
    /// `Z_i ~ Binomial(accepted_i, p_i)` with floor randomization for fractional counts.
    Binomial(Vec<f64>),
}

impl ShowUp {
    pub fn prob(&self, i: usize) -> f64 {
        match self {
            ShowUp::AllShowUp => 1.0,
            ShowUp::Poisson(p) | ShowUp::Binomial(p) => p[i],
        }
    }

    /// The continuous surrogate used while optimizing: binomial show-ups become Poisson.
    pub fn for_optimizer(&self) -> ShowUp {
        match self {
            ShowUp::Binomial(p) => ShowUp::Poisson(p.clone()),
            other => other.clone(),
        }
    }
}

/// Single-resource network with fixed consumption.
#[derive(Debug, Clone, PartialEq)]
pub struct PassengerNetwork {
    /// `m x d` consumption matrix; row `j` is leg `j`.
    pub consumption: Vec<Vec<f64>>,
    pub capacity: Vec<Marginal>,
    pub revenue: Vec<f64>,
    pub penalty: Vec<f64>,
}

/// Weight/volume network with random consumption and optional alternative routes.
#[derive(Debug, Clone, PartialEq)]
pub struct CargoNetwork {
    pub legs: usize,
    /// `routes[i][k]` lists the legs used by route `k` of class `i`.
    pub routes: Vec<Vec<Vec<usize>>>,
    pub weight: Vec<Marginal>,
    pub volume: Vec<Marginal>,
    pub consumption_corr: f64,
    pub cap_weight: Vec<Marginal>,
    pub cap_volume: Vec<Marginal>,
    pub capacity_corr: f64,
    /// Per-unit revenue `theta_1` per class.
    pub theta1: Vec<f64>,
    pub theta2: f64,
    /// `l_i = penalty_mult * r_i`.
    pub penalty_mult: f64,
}

impl CargoNetwork {
    pub fn unit_revenue(&self, i: usize, w: f64, v: f64) -> f64 {
        self.theta1[i] * w.max(v / self.theta2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Passenger(PassengerNetwork),
    AirCargo(CargoNetwork),
}

/// Realized service-stage randomness other than show-ups.
#[derive(Debug, Clone, PartialEq)]
pub enum Service {
    Passenger {
        capacity: Vec<f64>,
    },
    AirCargo {
        weight: Vec<f64>,
        volume: Vec<f64>,
        cap_weight: Vec<f64>,
        cap_volume: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceScenario {
    pub show_ups: Vec<f64>,
    pub service: Service,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrmInstance {
    pub demand: Vec<Dist>,
    pub show_up: ShowUp,
    pub network: Network,
    /// Redundant upper bound on every booking limit.
    pub upper: f64,
}

impl NrmInstance {
    pub fn new(demand: Vec<Dist>, show_up: ShowUp, network: Network, upper: f64) -> Result<Self> {
        let inst = Self {
            demand,
            show_up,
            network,
            upper,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn classes(&self) -> usize {
        self.demand.len()
    }

    pub fn legs(&self) -> usize {
        match &self.network {
            Network::Passenger(p) => p.consumption.len(),
            Network::AirCargo(c) => c.legs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.classes();
        let mut is = Issues::default();
        is.check(d > 0, || "at least one demand class is required".into());
        for (i, dist) in self.demand.iter().enumerate() {
            is.check(dist.validate().is_ok(), || {
                format!("demand[{i}]: invalid distribution {dist:?}")
            });
        }
        match &self.show_up {
            ShowUp::AllShowUp => {}
            ShowUp::Poisson(p) | ShowUp::Binomial(p) => {
                is.check(p.len() == d, || {
                    format!("show_up: expected {d} probabilities, got {}", p.len())
                });
                for (i, v) in p.iter().enumerate() {
                    is.check(*v > 0.0 && *v <= 1.0, || {
                        format!("show_up[{i}]: probability {v} outside (0, 1]")
                    });
                }
            }
        }
        is.check(self.upper.is_finite() && self.upper > 0.0, || {
            format!("upper: {} must be positive", self.upper)
        });
        match &self.network {
            Network::Passenger(p) => {
                is.check(!p.consumption.is_empty(), || {
                    "consumption: at least one leg is required".into()
                });
                for (j, row) in p.consumption.iter().enumerate() {
                    is.check(row.len() == d, || {
                        format!("consumption[{j}]: expected {d} entries, got {}", row.len())
                    });
                    is.check(row.iter().all(|a| *a >= 0.0 && a.fract() == 0.0), || {
                        format!("consumption[{j}]: entries must be nonnegative integers")
                    });
                }
                is.check(p.capacity.len() == p.consumption.len(), || {
                    format!(
                        "capacity: expected {} legs, got {}",
                        p.consumption.len(),
                        p.capacity.len()
                    )
                });
                for (j, c) in p.capacity.iter().enumerate() {
                    is.check(c.is_valid(), || format!("capacity[{j}]: invalid {c:?}"));
                }
                is.check(p.revenue.len() == d, || {
                    format!("revenue: expected {d} entries, got {}", p.revenue.len())
                });
                is.check(p.penalty.len() == d, || {
                    format!("penalty: expected {d} entries, got {}", p.penalty.len())
                });
                is.check(
                    p.revenue
                        .iter()
                        .chain(&p.penalty)
                        .all(|v| v.is_finite() && *v >= 0.0),
                    || "revenue/penalty: entries must be finite and nonnegative".into(),
                );
            }
            Network::AirCargo(c) => {
                is.check(c.routes.len() == d, || {
                    format!("routes: expected {d} classes, got {}", c.routes.len())
                });
                for (i, rs) in c.routes.iter().enumerate() {
                    is.check(!rs.is_empty(), || {
                        format!("routes[{i}]: at least one route is required")
                    });
                    is.check(rs.iter().flatten().all(|&j| j < c.legs), || {
                        format!("routes[{i}]: leg index out of range 0..{}", c.legs)
                    });
                }
                for (name, v, n) in [
                    ("weight", &c.weight, d),
                    ("volume", &c.volume, d),
                    ("cap_weight", &c.cap_weight, c.legs),
                    ("cap_volume", &c.cap_volume, c.legs),
                ] {
                    is.check(v.len() == n, || {
                        format!("{name}: expected {n} entries, got {}", v.len())
                    });
                    is.check(v.iter().all(Marginal::is_valid), || {
                        format!("{name}: invalid marginal")
                    });
                }
                is.check(c.theta1.len() == d, || {
                    format!("theta1: expected {d} entries, got {}", c.theta1.len())
                });
                is.check(c.theta2 > 0.0, || {
                    format!("theta2: {} must be positive", c.theta2)
                });
                is.check(c.penalty_mult >= 0.0, || {
                    format!("penalty_mult: {} must be nonnegative", c.penalty_mult)
                });
                for (name, rho) in [
                    ("consumption_corr", c.consumption_corr),
                    ("capacity_corr", c.capacity_corr),
                ] {
                    is.check((-1.0..=1.0).contains(&rho), || {
                        format!("{name}: {rho} outside [-1, 1]")
                    });
                }
            }
        }
        is.finish()
    }

    pub fn sample_demand<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.demand.iter().map(|d| d.sample(rng)).collect()
    }

    pub fn sample_service<R: RngCore + ?Sized>(&self, rng: &mut R) -> Service {
        match &self.network {
            Network::Passenger(p) => Service::Passenger {
                capacity: p.capacity.iter().map(|c| c.sample(rng)).collect(),
            },
            Network::AirCargo(c) => {
                let (weight, volume) = c
                    .weight
                    .iter()
                    .zip(&c.volume)
                    .map(|(w, v)| correlated(w, v, c.consumption_corr, rng))
                    .unzip();
                let (cap_weight, cap_volume) = c
                    .cap_weight
                    .iter()
                    .zip(&c.cap_volume)
                    .map(|(w, v)| correlated(w, v, c.capacity_corr, rng))
                    .unzip();
                Service::AirCargo {
                    weight,
                    volume,
                    cap_weight,
                    cap_volume,
                }
            }
        }
    }

    /// Per-unit revenue under a realized service scenario.
    pub fn revenue(&self, service: &Service) -> Vec<f64> {
        match (&self.network, service) {
            (Network::Passenger(p), _) => p.revenue.clone(),
            (Network::AirCargo(c), Service::AirCargo { weight, volume, .. }) => (0..self.classes())
                .map(|i| c.unit_revenue(i, weight[i], volume[i]))
                .collect(),
            (Network::AirCargo(c), Service::Passenger { .. }) => (0..self.classes())
                .map(|i| c.unit_revenue(i, c.weight[i].mean(), c.volume[i].mean()))
                .collect(),
        }
    }

    /// Per-unit rejection penalty under a realized service scenario.
    pub fn penalty(&self, service: &Service) -> Vec<f64> {
        match &self.network {
            Network::Passenger(p) => p.penalty.clone(),
            Network::AirCargo(c) => self
                .revenue(service)
                .into_iter()
                .map(|r| c.penalty_mult * r)
                .collect(),
        }
    }

    /// Service scenario whose random quantities sit at their means.
    pub fn mean_service(&self) -> Service {
        match &self.network {
            Network::Passenger(p) => Service::Passenger {
                capacity: p.capacity.iter().map(Marginal::mean).collect(),
            },
            Network::AirCargo(c) => Service::AirCargo {
                weight: c.weight.iter().map(Marginal::mean).collect(),
                volume: c.volume.iter().map(Marginal::mean).collect(),
                cap_weight: c.cap_weight.iter().map(Marginal::mean).collect(),
                cap_volume: c.cap_volume.iter().map(Marginal::mean).collect(),
            },
        }
    }

    /// `||E r|| + ||p * E l||`, a bound on the outer gradient used for step presets.
    pub fn gradient_scale(&self) -> f64 {
        let s = self.mean_service();
        let (r, l) = (self.revenue(&s), self.penalty(&s));
        let norm = |v: Vec<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let pl = l
            .iter()
            .enumerate()
            .map(|(i, l)| self.show_up.prob(i) * l)
            .collect();
        (norm(r) + norm(pl)).max(f64::MIN_POSITIVE)
    }
}

/// Draws show-ups for `accepted` reservations.
pub fn sample_show_ups<R: RngCore + ?Sized>(
    model: &ShowUp,
    accepted: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    match model {
        ShowUp::AllShowUp => accepted.to_vec(),
        ShowUp::Poisson(p) => accepted
            .iter()
            .zip(p)
            .map(|(a, p)| poisson(p * a.max(0.0), rng))
            .collect(),
        ShowUp::Binomial(p) => accepted
            .iter()
            .zip(p)
            .map(|(a, p)| {
                let a = a.max(0.0);
                let fl = a.floor();
                let n = if rng.random::<f64>() < fl + 1.0 - a {
                    fl
                } else {
                    fl + 1.0
                };
                binomial(n as u64, *p, rng)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hcopt_core::rng::stream;
    use hcopt_core::Moments;

    #[test]
    fn all_show_up_is_identity() {
        assert_eq!(
            sample_show_ups(&ShowUp::AllShowUp, &[3.0], &mut stream(0, &[])),
            vec![3.0]
        );
    }

    #[test]
    fn poisson_of_zero() {
        assert_eq!(
            sample_show_ups(&ShowUp::Poisson(vec![1.0]), &[0.0], &mut stream(0, &[])),
            vec![0.0]
        );
    }

    #[test]
    fn binomial_floor_convention_keeps_mean() {
        let mut r = stream(3, &[]);
        let mut m = Moments::default();
        let model = ShowUp::Binomial(vec![0.9]);
        for _ in 0..1_000_000 {
            let z = sample_show_ups(&model, &[3.4], &mut r)[0];
            assert!(z == z.floor() && z <= 4.0);
            m.push(z);
        }
        let exact = 0.6 * 3.0 * 0.9 + 0.4 * 4.0 * 0.9;
        assert!(
            (m.mean - exact).abs() <= 4.0 * m.stderr(),
            "{} vs {exact}",
            m.mean
        );
    }

    #[test]
    fn validation_lists_every_field() {
        let bad = NrmInstance::new(
            vec![Dist::Poisson { mean: 1.0 }],
            ShowUp::Binomial(vec![1.5]),
            Network::Passenger(PassengerNetwork {
                consumption: vec![vec![1.0, 2.0]],
                capacity: vec![],
                revenue: vec![1.0],
                penalty: vec![1.0],
            }),
            100.0,
        );
        let crate::NrmError::Invalid(list) = bad.unwrap_err() else {
            panic!()
        };
        assert!(list.len() >= 3, "{list:?}");
        assert!(list.iter().any(|m| m.starts_with("show_up[0]")));
        assert!(list.iter().any(|m| m.starts_with("capacity")));
    }
}
