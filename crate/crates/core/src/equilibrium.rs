//! Equilibrium strategy profiles.
//!
//! Stacking every (firm, type) strategy into one vector `s = (s_1^1..s_1^K,
//! s_2^1..s_2^M)`, the first-order conditions of both firms' expected-cost
//! problems form the linear system
//!
//! ```text
//! A v' = -B v - ½ κ⋆b,     v = s',   s(0) = 0,   s(1) = f
//! ```
//!
//! with `A = [[I, Π1], [Π2, I]]` and `B = [[0, D1 Π1], [D2 Π2, 0]]`. Writing
//! `M = -A⁺B` and `c = -½ A⁺(κ⋆b)` gives `v' = M v + c`, which is solved in
//! closed form through the exponential of the augmented generator
//!
//! ```text
//!     | 0  I  0 |
//! L = | 0  M  c |      acting on (s, v, 1)
//!     | 0  0  0 |
//! ```
//!
//! so that `M` never has to be inverted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matode::{mat_exp, solve_least_squares, Lu, Matrix, Vector};
use crate::scenario::{FirmTypeSpec, Scenario};

/// Coefficient blocks of the coupled first-order system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub a: Matrix,
    pub b: Matrix,
    pub d1: Matrix,
    pub d2: Matrix,
}

/// How the system matrix is formed from `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `M = -A⁻¹B` through an LU solve.
    Direct,
    /// `M = -(AᵀA)⁺AᵀB` through a pivoted QR least-squares solve.
    #[default]
    NormalForm,
}

pub fn assemble_system(scenario: &Scenario) -> Result<SystemMatrices> {
    let report = scenario.validate();
    if !report.is_ok() {
        return Err(Error::InvalidScenario(report.violations));
    }
    let beliefs = scenario.beliefs()?;
    let (k, m) = (scenario.k(), scenario.m());
    let n = k + m;
    let d1 = Matrix::from_diag(
        &scenario
            .firm1_types
            .iter()
            .map(|t| t.kappa)
            .collect::<Vec<_>>(),
    );
    let d2 = Matrix::from_diag(
        &scenario
            .firm2_types
            .iter()
            .map(|t| t.kappa)
            .collect::<Vec<_>>(),
    );

    let mut a = Matrix::identity(n);
    a.set_block(0, k, &beliefs.pi1);
    a.set_block(k, 0, &beliefs.pi2);

    let mut b = Matrix::zeros(n, n);
    b.set_block(0, k, &(&d1 * &beliefs.pi1));
    b.set_block(k, 0, &(&d2 * &beliefs.pi2));
    Ok(SystemMatrices { a, b, d1, d2 })
}

/// The generator `M` of `v' = M v (+ c)`.
pub fn system_matrix(sm: &SystemMatrices, mode: Mode) -> Result<Matrix> {
    let x = match mode {
        Mode::Direct => {
            let lu = Lu::factor(&sm.a)?;
            if lu.is_singular() {
                return Err(Error::Singular(format!(
                    "A has min pivot {:e}",
                    lu.min_pivot()
                )));
            }
            lu.solve_mat(&sm.b)?
        }
        Mode::NormalForm => solve_least_squares(&sm.a, &sm.b)?.solution,
    };
    Ok(x.scale(-1.0))
}

/// `c = -½ (AᵀA)⁺Aᵀ (κ⋆b)`; exactly zero when no type believes in a
/// non-strategic participant (or every such type has `κ = 0`).
pub fn forcing_vector(scenario: &Scenario, sm: &SystemMatrices) -> Result<Vector> {
    let n = scenario.dim();
    if sm.a.rows() != n {
        return Err(Error::Dimension(format!(
            "system has {} rows, scenario has {n} types",
            sm.a.rows()
        )));
    }
    let source: Vector = scenario
        .stacked_types()
        .map(|t| t.kappa * t.nonstrategic_size)
        .collect();
    if source.iter().all(|&x| x == 0.0) {
        return Ok(vec![0.0; n]);
    }
    let ls = solve_least_squares(&sm.a, &Matrix::column(&source))?;
    Ok(ls.solution.as_slice().iter().map(|x| -0.5 * x).collect())
}

/// Positions, rates and accelerations of every stacked strategy at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileState {
    pub positions: Vector,
    pub rates: Vector,
    pub accelerations: Vector,
}

/// Anything that can report the stacked strategy vector and its first two
/// derivatives at a time in `[0, 1]`.
pub trait StrategyProfile {
    fn dim(&self) -> usize;
    fn state(&self, t: f64) -> Result<ProfileState>;
}

/// A solved equilibrium: `v' = M v + c`, `v(0) = v0`, `s(0) = 0`.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub m: Matrix,
    pub v0: Vector,
    pub c: Vector,
    pub targets: Vector,
    pub mode: Mode,
    pub scenario: Scenario,
    generator: Matrix,
}

impl EquilibriumSolution {
    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    /// Exponential of the augmented generator at `t`.
    fn propagator(&self, t: f64) -> Result<Matrix> {
        mat_exp(&self.generator, t)
    }

    pub fn positions(&self, t: f64) -> Result<Vector> {
        Ok(StrategyProfile::state(self, t)?.positions)
    }

    pub fn rates(&self, t: f64) -> Result<Vector> {
        Ok(StrategyProfile::state(self, t)?.rates)
    }

    /// `max_i |s_i(1) - f_i|`.
    pub fn boundary_error(&self) -> Result<f64> {
        let s1 = self.positions(1.0)?;
        Ok(s1
            .iter()
            .zip(&self.targets)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl StrategyProfile for EquilibriumSolution {
    fn dim(&self) -> usize {
        self.targets.len()
    }

    fn state(&self, t: f64) -> Result<ProfileState> {
        let n = self.dim();
        let e = self.propagator(t)?;
        let mut positions = vec![0.0; n];
        let mut rates = vec![0.0; n];
        for i in 0..n {
            let mut s = e[(i, 2 * n)];
            let mut v = e[(n + i, 2 * n)];
            for j in 0..n {
                s += e[(i, n + j)] * self.v0[j];
                v += e[(n + i, n + j)] * self.v0[j];
            }
            positions[i] = s;
            rates[i] = v;
        }
        let mut accelerations = self.m.mul_vec(&rates)?;
        for (a, c) in accelerations.iter_mut().zip(&self.c) {
            *a += c;
        }
        Ok(ProfileState {
            positions,
            rates,
            accelerations,
        })
    }
}

fn augmented_generator(m: &Matrix, c: &[f64]) -> Matrix {
    let n = m.rows();
    let mut l = Matrix::zeros(2 * n + 1, 2 * n + 1);
    for i in 0..n {
        l[(i, n + i)] = 1.0;
        l[(n + i, 2 * n)] = c[i];
    }
    l.set_block(n, n, m);
    l
}

/// Solves for the Bayesian equilibrium of `scenario`.
pub fn solve(scenario: &Scenario, mode: Mode) -> Result<EquilibriumSolution> {
    let sm = assemble_system(scenario)?;
    let m = system_matrix(&sm, mode)?;
    let c = forcing_vector(scenario, &sm)?;
    let targets = scenario.targets();
    let n = targets.len();
    let generator = augmented_generator(&m, &c);

    // s(1) = Φ v0 + g with Φ = ∫_0^1 e^{Mu} du and g the forced response.
    let e1 = mat_exp(&generator, 1.0)?;
    let phi = e1.block(0, n, n, n);
    let rhs: Vector = (0..n).map(|i| targets[i] - e1[(i, 2 * n)]).collect();
    let lu = Lu::factor(&phi)?;
    if lu.is_singular() {
        return Err(Error::BoundarySolve {
            min_pivot: lu.min_pivot(),
            max_pivot: lu.max_pivot(),
        });
    }
    let v0 = lu.solve_vec(&rhs)?;
    if v0.iter().any(|x| !x.is_finite()) {
        return Err(Error::BoundarySolve {
            min_pivot: lu.min_pivot(),
            max_pivot: lu.max_pivot(),
        });
    }
    Ok(EquilibriumSolution {
        m,
        v0,
        c,
        targets,
        mode,
        scenario: scenario.clone(),
        generator,
    })
}

/// Sampled strategies on a time grid. `positions[i][j]` is slot `i` at
/// `grid[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
}

/// One sampled strategy together with its grid.
#[derive(Debug, Clone, Copy)]
pub struct PathRef<'a> {
    pub grid: &'a [f64],
    pub positions: &'a [f64],
    pub rates: &'a [f64],
}

impl Trajectory {
    pub fn component(&self, slot: usize) -> PathRef<'_> {
        PathRef {
            grid: &self.grid,
            positions: &self.positions[slot],
            rates: &self.rates[slot],
        }
    }
}

/// `points` equally spaced times from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    let last = (points - 1) as f64;
    (0..points).map(|j| j as f64 / last).collect()
}

/// Samples any profile on `grid`.
pub fn sample_profile<P: StrategyProfile + ?Sized>(
    profile: &P,
    grid: &[f64],
) -> Result<Trajectory> {
    if grid.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::Argument("grid points must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("grid must be strictly increasing".into()));
    }
    let n = profile.dim();
    let mut positions = vec![Vec::with_capacity(grid.len()); n];
    let mut rates = vec![Vec::with_capacity(grid.len()); n];
    for &t in grid {
        let st = profile.state(t)?;
        for i in 0..n {
            positions[i].push(st.positions[i]);
            rates[i].push(st.rates[i]);
        }
    }
    Ok(Trajectory {
        grid: grid.to_vec(),
        positions,
        rates,
    })
}

pub fn sample(solution: &EquilibriumSolution, grid: &[f64]) -> Result<Trajectory> {
    sample_profile(solution, grid)
}

/// Equilibrium when both firms' types are common knowledge.
pub fn complete_info_pair(t1: FirmTypeSpec, t2: FirmTypeSpec) -> Result<EquilibriumSolution> {
    solve(&Scenario::degenerate(t1, t2), Mode::NormalForm)
}

/// `s(t) = quadratic·t² + linear·t + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticStrategy {
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
}

impl QuadraticStrategy {
    pub fn eval(&self, t: f64) -> f64 {
        (self.quadratic * t + self.linear) * t + self.constant
    }

    pub fn rate(&self, t: f64) -> f64 {
        2.0 * self.quadratic * t + self.linear
    }
}

/// Closed-form eager strategy of a lone firm trading against a
/// non-strategic participant buying `b` at a constant rate:
/// `s(t) = -½κb t² + (f + ½κb) t`.
pub fn single_firm_vs_nonstrategic(kappa: f64, target: f64, b: f64) -> QuadraticStrategy {
    let half = 0.5 * kappa * b;
    QuadraticStrategy {
        quadratic: -half,
        linear: target + half,
        constant: 0.0,
    }
}
