//! Bayesian equilibrium execution strategies for two firms with private
//! risk aversion and trade targets.

pub mod costs;
pub mod equilibrium;
pub mod error;
pub mod matode;
pub mod oracle;
pub mod scenario;

pub use costs::{
    cost_report, cumulative_curve, expected_cost, realized_cost, CostRow, CumulativeCurve,
    Quadrature,
};
pub use equilibrium::{
    complete_info_pair, sample, sample_profile, single_firm_vs_nonstrategic, solve, uniform_grid,
    EquilibriumSolution, Mode, PathRef, ProfileState, QuadraticStrategy, StrategyProfile,
    Trajectory,
};
pub use error::{Error, Result};
pub use matode::{mat_exp, phi1_apply, solve_least_squares, Matrix, Vector};
pub use oracle::{
    deviation_test, discrete_best_response, el_residual, DiscreteStrategy, VerificationReport,
};
pub use scenario::{Firm, FirmTypeSpec, Scenario};
