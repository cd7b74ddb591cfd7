//! Deterministic LP baseline: all random quantities replaced by their expectations.

use hcopt_lp::{solve_lp, Constraint, LpProblem, LpStatus};

use crate::error::{NrmError, Result};
use crate::instance::{Network, NrmInstance, Service};

#[derive(Debug, Clone, PartialEq)]
pub struct DlpSolution {
    /// Booking limits.
    pub x: Vec<f64>,
    pub served: Vec<f64>,
    /// Capacity-row duals (weight rows then volume rows for cargo).
    pub bid_prices: Vec<f64>,
    pub objective: f64,
}

/// `max r'x - l'(p x - w)` subject to expected capacity, `x <= E[D]`, `w <= p x`.
pub fn dlp_booking_limits(inst: &NrmInstance) -> Result<DlpSolution> {
    let d = inst.classes();
    let mean = inst.mean_service();
    let r = inst.revenue(&mean);
    let l = inst.penalty(&mean);
    let p: Vec<f64> = (0..d).map(|i| inst.show_up.prob(i)).collect();
    let ny = match &inst.network {
        Network::Passenger(_) => 0,
        Network::AirCargo(c) => c.routes.iter().map(Vec::len).sum(),
    };
    // columns: x (d), y (ny), w (d)
    let n = 2 * d + ny;
    let wcol = d + ny;
    let mut cost = vec![0.0; n];
    for i in 0..d {
        cost[i] = r[i] - l[i] * p[i];
        cost[wcol + i] = l[i];
    }
    let mut lp = LpProblem::maximize(cost);
    let capacity_rows = match (&inst.network, &mean) {
        (Network::Passenger(net), Service::Passenger { capacity }) => {
            for (a, c) in net.consumption.iter().zip(capacity) {
                let mut row = vec![0.0; n];
                row[wcol..].copy_from_slice(a);
                lp.push(Constraint::le(row, *c));
            }
            capacity.len()
        }
        (
            Network::AirCargo(net),
            Service::AirCargo {
                weight,
                volume,
                cap_weight,
                cap_volume,
            },
        ) => {
            let mut wrow = vec![vec![0.0; n]; net.legs];
            let mut vrow = vec![vec![0.0; n]; net.legs];
            let mut col = d;
            for (i, rs) in net.routes.iter().enumerate() {
                let mut link = vec![0.0; n];
                link[wcol + i] = 1.0;
                for route in rs {
                    for &j in route {
                        wrow[j][col] += weight[i];
                        vrow[j][col] += volume[i];
                    }
                    link[col] = -1.0;
                    col += 1;
                }
                lp.push(Constraint::eq(link, 0.0));
            }
            // capacity rows go first so their duals are easy to find
            let links = std::mem::take(&mut lp.rows);
            for (row, c) in wrow.into_iter().zip(cap_weight) {
                lp.push(Constraint::le(row, *c));
            }
            for (row, c) in vrow.into_iter().zip(cap_volume) {
                lp.push(Constraint::le(row, *c));
            }
            lp.rows.extend(links);
            2 * net.legs
        }
        _ => unreachable!("mean_service matches the network kind"),
    };
    for i in 0..d {
        let mut row = vec![0.0; n];
        row[wcol + i] = 1.0;
        row[i] = -p[i];
        lp.push(Constraint::le(row, 0.0));
        lp = lp.with_bounds(i, 0.0, inst.demand[i].mean());
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(NrmError::Solver(sol.status));
    }
    Ok(DlpSolution {
        x: sol.primal[..d].to_vec(),
        served: sol.primal[wcol..].to_vec(),
        bid_prices: sol.dual[..capacity_rows].iter().map(|v| v + 0.0).collect(),
        objective: sol.objective,
    })
}
