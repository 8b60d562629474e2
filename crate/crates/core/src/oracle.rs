//! Independent checks of equilibrium profiles.
//!
//! Three tools that do not share code with the solver's linear algebra:
//! a discretized best response (a tridiagonal quadratic program), the
//! pointwise Euler–Lagrange residual, and randomized deviation tests on the
//! expected-cost functional.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::costs::{expected_cost_with, sample_nodes, Quadrature};
use crate::equilibrium::{uniform_grid, ProfileState, StrategyProfile};
use crate::error::{Error, Result};
use crate::scenario::{Firm, Scenario};

/// Values of a strategy at `j / n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteStrategy {
    pub n: usize,
    pub values: Vec<f64>,
}

impl DiscreteStrategy {
    pub fn times(&self) -> Vec<f64> {
        uniform_grid(self.n + 1)
    }

    /// Rates on each panel, `(s_{j+1} - s_j) n`.
    pub fn midpoint_rates(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.values.windows(2).map(|w| (w[1] - w[0]) * n).collect()
    }

    /// `max_j |s_j - f(j/n)|`.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.times()
            .iter()
            .zip(&self.values)
            .map(|(&t, v)| (v - f(t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Best response on an `n`-panel grid.
///
/// Minimizes `Σ_m beliefs[m] · E_h(s; opponents[m])` where `E_h` uses
/// midpoint rates for the temporary term and trapezoidal positions for the
/// permanent term; each opponent is given by its values at `j / n`. The
/// non-strategic participant trades `b` per unit time.
pub fn discrete_best_response(
    opponents: &[&[f64]],
    beliefs: &[f64],
    kappa: f64,
    target: f64,
    b: f64,
    n: usize,
) -> Result<DiscreteStrategy> {
    if n < 4 {
        return Err(Error::Argument(format!("need at least 4 panels, got {n}")));
    }
    if opponents.len() != beliefs.len() {
        return Err(Error::Dimension(format!(
            "{} opponent paths but {} belief weights",
            opponents.len(),
            beliefs.len()
        )));
    }
    if let Some(o) = opponents.iter().find(|o| o.len() != n + 1) {
        return Err(Error::GridMismatch(format!(
            "opponent has {} samples, expected {}",
            o.len(),
            n + 1
        )));
    }
    let h = 1.0 / n as f64;

    // Gradient of the linear part at interior node j:
    //   Σ_m π_m [ (q_{j-1} - q_j) + κ/2 (O_{j-1} - O_{j+1}) ],  O = o + b t
    let mut rhs = vec![0.0; n - 1];
    for (o, &p) in opponents.iter().zip(beliefs) {
        if p == 0.0 {
            continue;
        }
        for j in 1..n {
            let q_prev = (o[j] - o[j - 1]) * n as f64;
            let q_next = (o[j + 1] - o[j]) * n as f64;
            let lag = o[j - 1] - o[j + 1] - 2.0 * b * h;
            rhs[j - 1] -= p * ((q_prev - q_next) + 0.5 * kappa * lag);
        }
    }
    let c = 2.0 / h;
    rhs[n - 2] += c * target;

    let interior = solve_second_difference(c, &rhs)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(interior);
    values.push(target);
    Ok(DiscreteStrategy { n, values })
}

// Solves c · tridiag(-1, 2, -1) x = rhs by a tridiagonal Cholesky
// factorization.
fn solve_second_difference(c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rhs.len();
    let (diag, off) = (2.0 * c, -c);
    let mut l = vec![0.0; m];
    let mut sub = vec![0.0; m];
    for i in 0..m {
        let d = diag - if i > 0 { sub[i] * sub[i] } else { 0.0 };
        if d.is_nan() || d <= 0.0 {
            return Err(Error::Formulation(i));
        }
        l[i] = d.sqrt();
        if i + 1 < m {
            sub[i + 1] = off / l[i];
        }
    }
    let mut y = vec![0.0; m];
    for i in 0..m {
        let acc = rhs[i] - if i > 0 { sub[i] * y[i - 1] } else { 0.0 };
        y[i] = acc / l[i];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let acc = y[i]
            - if i + 1 < m {
                sub[i + 1] * x[i + 1]
            } else {
                0.0
            };
        x[i] = acc / l[i];
    }
    Ok(x)
}

/// Discrete best response of `(firm, index)` to the opponents' strategies in
/// `profile`, sampled on `n` panels.
pub fn best_response_to<P: StrategyProfile + ?Sized>(
    profile: &P,
    scenario: &Scenario,
    firm: Firm,
    index: usize,
    n: usize,
) -> Result<DiscreteStrategy> {
    scenario.slot(firm, index)?;
    let spec = scenario.types(firm)[index];
    let beliefs = scenario.beliefs()?;
    let row = beliefs.row(firm, index).to_vec();
    let grid = uniform_grid(n + 1);
    let others: Vec<usize> = (0..row.len())
        .map(|j| scenario.slot(firm.other(), j))
        .collect::<Result<_>>()?;
    let mut paths = vec![Vec::with_capacity(n + 1); others.len()];
    for &t in &grid {
        let st = profile.state(t)?;
        for (path, &slot) in paths.iter_mut().zip(&others) {
            path.push(st.positions[slot]);
        }
    }
    let refs: Vec<&[f64]> = paths.iter().map(|p| p.as_slice()).collect();
    discrete_best_response(
        &refs,
        &row,
        spec.kappa,
        spec.target,
        spec.nonstrategic_size,
        n,
    )
}

/// Sup over types and interior grid points of
/// `|s̈ + ½ Σ_m π(m) (ö_m + κ ȯ_m) + ½ κ b|`.
pub fn el_residual<P: StrategyProfile + ?Sized>(
    profile: &P,
    scenario: &Scenario,
    grid: &[f64],
) -> Result<f64> {
    if profile.dim() != scenario.dim() {
        return Err(Error::Dimension(format!(
            "profile has {} strategies, scenario has {}",
            profile.dim(),
            scenario.dim()
        )));
    }
    let beliefs = scenario.beliefs()?;
    let mut worst: f64 = 0.0;
    for &t in grid.iter().filter(|&&t| t > 0.0 && t < 1.0) {
        let st = profile.state(t)?;
        for firm in [Firm::One, Firm::Two] {
            for (i, spec) in scenario.types(firm).iter().enumerate() {
                let me = scenario.slot(firm, i)?;
                let mut r = st.accelerations[me] + 0.5 * spec.kappa * spec.nonstrategic_size;
                for (j, &p) in beliefs.row(firm, i).iter().enumerate() {
                    let o = scenario.slot(firm.other(), j)?;
                    r += 0.5 * p * (st.accelerations[o] + spec.kappa * st.rates[o]);
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// A profile with one component shifted by a smooth path. `delta(t)`
/// returns the shift and its first two derivatives.
pub struct Perturbed<'a, P: ?Sized, F> {
    pub base: &'a P,
    pub slot: usize,
    pub delta: F,
}

impl<P, F> StrategyProfile for Perturbed<'_, P, F>
where
    P: StrategyProfile + ?Sized,
    F: Fn(f64) -> [f64; 3],
{
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn state(&self, t: f64) -> Result<ProfileState> {
        let mut st = self.base.state(t)?;
        let [d0, d1, d2] = (self.delta)(t);
        st.positions[self.slot] += d0;
        st.rates[self.slot] += d1;
        st.accelerations[self.slot] += d2;
        Ok(st)
    }
}

/// A profile whose component `i` is the base profile's component `perm[i]`.
pub struct Permuted<'a, P: ?Sized> {
    pub base: &'a P,
    pub perm: Vec<usize>,
}

impl<P: StrategyProfile + ?Sized> StrategyProfile for Permuted<'_, P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn state(&self, t: f64) -> Result<ProfileState> {
        let st = self.base.state(t)?;
        let pick = |v: &[f64]| self.perm.iter().map(|&p| v[p]).collect();
        Ok(ProfileState {
            positions: pick(&st.positions),
            rates: pick(&st.rates),
            accelerations: pick(&st.accelerations),
        })
    }
}

/// Number of sine modes in a deviation.
pub const DEVIATION_MODES: usize = 8;
/// Grid used for the residual part of a [`VerificationReport`].
pub const RESIDUAL_GRID_POINTS: usize = 1001;

/// Outcome of the deviation test for one firm type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeVerification {
    pub firm: u8,
    pub index: usize,
    /// Smallest `E(s + εη) - E(s)` over all trials.
    pub min_gain: f64,
    /// Largest `|ΔE(ε) / ΔE(ε/2) - 4|` over all trials.
    pub max_scaling_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub max_el_residual: f64,
    pub min_deviation_gain: f64,
    pub max_scaling_defect: f64,
    pub per_type: Vec<TypeVerification>,
}

impl VerificationReport {
    /// Residual at most `1e-6` and no trial lowered the expected cost by more
    /// than `1e-8`.
    pub fn certified(&self) -> bool {
        self.max_el_residual <= 1e-6 && self.min_deviation_gain >= -1e-8
    }
}

fn sine_path(coeffs: &[f64], scale: f64, t: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for (j, a) in coeffs.iter().enumerate() {
        let w = std::f64::consts::PI * (j + 1) as f64;
        v += a * (w * t).sin();
        d += a * w * (w * t).cos();
    }
    (scale * v, scale * d)
}

/// Random fixed-endpoint deviations of every firm type's strategy.
///
/// Each trial draws `η = Σ_{j≤8} a_j sin(πjt)` with unit `L²` norm and
/// records `ΔE = E(s + εη) - E(s)` for the type's expected cost with all
/// other strategies held fixed, along with how `ΔE` scales when `ε` halves.
pub fn deviation_test<P: StrategyProfile + ?Sized>(
    profile: &P,
    scenario: &Scenario,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::Argument("at least one trial is required".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let max_el_residual = el_residual(profile, scenario, &uniform_grid(RESIDUAL_GRID_POINTS))?;
    let samples = sample_nodes(profile, Quadrature::default())?;

    let mut per_type = Vec::with_capacity(scenario.dim());
    for firm in [Firm::One, Firm::Two] {
        for index in 0..scenario.types(firm).len() {
            let slot = scenario.slot(firm, index)?;
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (slot as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let (s, v) = (&samples.positions[slot], &samples.rates[slot]);
            let base = expected_cost_with(&samples, scenario, firm, index, s, v)?;
            let mut min_gain = f64::INFINITY;
            let mut max_defect: f64 = 0.0;
            for _ in 0..trials {
                let coeffs: Vec<f64> = (0..DEVIATION_MODES)
                    .map(|_| rng.gen_range(-1.0..=1.0))
                    .collect();
                let norm = (0.5 * coeffs.iter().map(|a| a * a).sum::<f64>()).sqrt();
                if norm == 0.0 {
                    continue;
                }
                let gain = |eps: f64| -> Result<f64> {
                    let mut ps = s.clone();
                    let mut pv = v.clone();
                    for (i, &t) in samples.nodes.iter().enumerate() {
                        let (d0, d1) = sine_path(&coeffs, eps / norm, t);
                        ps[i] += d0;
                        pv[i] += d1;
                    }
                    Ok(expected_cost_with(&samples, scenario, firm, index, &ps, &pv)? - base)
                };
                let full = gain(epsilon)?;
                let half = gain(0.5 * epsilon)?;
                min_gain = min_gain.min(full);
                max_defect = max_defect.max((full / half - 4.0).abs());
            }
            per_type.push(TypeVerification {
                firm: firm.number(),
                index,
                min_gain,
                max_scaling_defect: max_defect,
            });
        }
    }
    let min_deviation_gain = per_type
        .iter()
        .map(|r| r.min_gain)
        .fold(f64::INFINITY, f64::min);
    let max_scaling_defect = per_type
        .iter()
        .map(|r| r.max_scaling_defect)
        .fold(0.0, f64::max);
    Ok(VerificationReport {
        max_el_residual,
        min_deviation_gain,
        max_scaling_defect,
        per_type,
    })
}
