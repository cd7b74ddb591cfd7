//! Service-stage penalty `Gamma`: the minimal rejection cost of serving show-ups `z`.

use hcopt_lp::{solve_lp, Constraint, LpProblem, LpStatus};

use crate::error::{NrmError, Result};
use crate::instance::{Network, NrmInstance, Service};

/// Optimal penalty together with nonnegative dual multipliers.
///
/// `capacity_duals` are the `v1` prices of capacity rows (weight rows then volume rows for
/// cargo) and `class_duals` the `v2` prices of the `w <= z` rows, so `dGamma/dz_i = l_i - v2_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recourse {
    pub penalty: f64,
    pub served: Vec<f64>,
    pub capacity_duals: Vec<f64>,
    pub class_duals: Vec<f64>,
}

fn solve(lp: &LpProblem) -> Result<hcopt_lp::LpSolution> {
    let sol = solve_lp(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        s => Err(NrmError::Solver(s)),
    }
}

fn unit_row(n: usize, i: usize) -> Vec<f64> {
    let mut r = vec![0.0; n];
    r[i] = 1.0;
    r
}

fn price(shadow: f64) -> f64 {
    -shadow + 0.0
}

/// `min_w { l'(z - w) : A w <= c, 0 <= w <= z }` with `A` given row per leg.
pub fn gamma_passenger(z: &[f64], c: &[f64], a: &[Vec<f64>], l: &[f64]) -> Result<Recourse> {
    let d = z.len();
    let mut lp = LpProblem::minimize(l.iter().map(|v| -v).collect());
    for (row, cap) in a.iter().zip(c) {
        lp.push(Constraint::le(row.clone(), *cap));
    }
    for (i, zi) in z.iter().enumerate() {
        lp.push(Constraint::le(unit_row(d, i), *zi));
    }
    let sol = solve(&lp)?;
    let m = a.len();
    let lz: f64 = l.iter().zip(z).map(|(l, z)| l * z).sum();
    Ok(Recourse {
        penalty: lz + sol.objective,
        served: sol.primal,
        capacity_duals: sol.dual[..m].iter().map(|s| price(*s)).collect(),
        class_duals: sol.dual[m..].iter().map(|s| price(*s)).collect(),
    })
}

/// Routing recourse over `(y, w)`: weight and volume rows per leg, `w_i = sum_k y_ik`, `w <= z`.
pub fn gamma_aircargo(
    z: &[f64],
    weight: &[f64],
    volume: &[f64],
    cap_weight: &[f64],
    cap_volume: &[f64],
    routes: &[Vec<Vec<usize>>],
    l: &[f64],
) -> Result<Recourse> {
    let d = z.len();
    let legs = cap_weight.len();
    let ny: usize = routes.iter().map(Vec::len).sum();
    let n = ny + d;
    let mut cost = vec![0.0; n];
    for i in 0..d {
        cost[ny + i] = -l[i];
    }
    let mut wrow = vec![vec![0.0; n]; legs];
    let mut vrow = vec![vec![0.0; n]; legs];
    let mut link = vec![vec![0.0; n]; d];
    let mut col = 0;
    for (i, rs) in routes.iter().enumerate() {
        link[i][ny + i] = 1.0;
        for route in rs {
            for &j in route {
                wrow[j][col] += weight[i];
                vrow[j][col] += volume[i];
            }
            link[i][col] = -1.0;
            col += 1;
        }
    }
    let mut lp = LpProblem::minimize(cost);
    for (row, cap) in wrow.into_iter().zip(cap_weight) {
        lp.push(Constraint::le(row, *cap));
    }
    for (row, cap) in vrow.into_iter().zip(cap_volume) {
        lp.push(Constraint::le(row, *cap));
    }
    for row in link {
        lp.push(Constraint::eq(row, 0.0));
    }
    for (i, zi) in z.iter().enumerate() {
        lp.push(Constraint::le(unit_row(n, ny + i), *zi));
    }
    let sol = solve(&lp)?;
    let lz: f64 = l.iter().zip(z).map(|(l, z)| l * z).sum();
    let k = 2 * legs + d;
    Ok(Recourse {
        penalty: lz + sol.objective,
        served: sol.primal[ny..].to_vec(),
        capacity_duals: sol.dual[..2 * legs].iter().map(|s| price(*s)).collect(),
        class_duals: sol.dual[k..].iter().map(|s| price(*s)).collect(),
    })
}

impl NrmInstance {
    /// `Gamma(z, service)` with the penalty vector `l` implied by the service scenario.
    pub fn recourse(&self, z: &[f64], service: &Service, l: &[f64]) -> Result<Recourse> {
        match (&self.network, service) {
            (Network::Passenger(p), Service::Passenger { capacity }) => {
                gamma_passenger(z, capacity, &p.consumption, l)
            }
            (
                Network::AirCargo(c),
                Service::AirCargo {
                    weight,
                    volume,
                    cap_weight,
                    cap_volume,
                },
            ) => gamma_aircargo(z, weight, volume, cap_weight, cap_volume, &c.routes, l),
            _ => Err(NrmError::Invalid(vec![
                "service scenario does not match the network kind".into(),
            ])),
        }
    }
}
