//! Booking-limit network revenue management: passenger and air-cargo two-stage models with
//! LP recourse, show-up models, revenue gradients, a deterministic LP baseline and Monte-Carlo
//! policy evaluation.

pub mod dlp;
pub mod error;
pub mod evaluate;
pub mod generator;
pub mod gradient;
pub mod instance;
pub mod marginal;
pub mod objective;
pub mod recourse;

pub use dlp::{dlp_booking_limits, DlpSolution};
pub use error::{NrmError, Result};
pub use evaluate::{evaluate_policy, policy_revenues, round_limits, scenario_revenue};
pub use generator::{
    build_instance, parse_class_table, tiny_instance, AirCargoSpec, CargoClass, DemandTotals,
    HubSpokeSpec, InstanceSpec, TinySpec,
};
pub use gradient::{nrm_outer_gradient, revenue_gradient_at, GradientMode};
pub use instance::{
    sample_show_ups, CargoNetwork, Network, NrmInstance, PassengerNetwork, Service,
    ServiceScenario, ShowUp,
};
pub use marginal::Marginal;
pub use objective::{nrm_problem, NrmObjective};
pub use recourse::{gamma_aircargo, gamma_passenger, Recourse};
