//! Implementation costs of strategy profiles.
//!
//! For a trader following `s` against an opponent following `o` the realized
//! cost under impact parameter `κ` is
//!
//! ```text
//! C = ∫₀¹ (ṡ + ȯ) ṡ dt + κ ∫₀¹ (s + o) ṡ dt
//! ```
//!
//! i.e. a temporary part plus `κ` times a permanent part, so costs are
//! affine in the evaluation `κ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{EquilibriumSolution, PathRef, StrategyProfile};
use crate::error::{Error, Result};
use crate::scenario::{Firm, Scenario};

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite rule on `[0, 1]` used to integrate cost functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "panels")]
pub enum Quadrature {
    /// Eight-point Gauss–Legendre on each panel.
    GaussLegendre { panels: usize },
    /// Trapezoid rule on `panels` equal panels.
    Trapezoid { panels: usize },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::GaussLegendre { panels: 64 }
    }
}

impl Quadrature {
    fn panels(&self) -> usize {
        match *self {
            Quadrature::GaussLegendre { panels } | Quadrature::Trapezoid { panels } => panels,
        }
    }

    /// Same rule with twice the panels.
    pub fn refined(&self) -> Quadrature {
        match *self {
            Quadrature::GaussLegendre { panels } => {
                Quadrature::GaussLegendre { panels: 2 * panels }
            }
            Quadrature::Trapezoid { panels } => Quadrature::Trapezoid { panels: 2 * panels },
        }
    }

    /// Nodes and weights on `[0, 1]`.
    pub fn rule(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.panels();
        if n == 0 {
            return Err(Error::Argument(
                "quadrature needs at least one panel".into(),
            ));
        }
        let h = 1.0 / n as f64;
        match self {
            Quadrature::GaussLegendre { .. } => {
                let mut nodes = Vec::with_capacity(8 * n);
                let mut weights = Vec::with_capacity(8 * n);
                for p in 0..n {
                    let mid = (p as f64 + 0.5) * h;
                    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
                        nodes.push(mid - 0.5 * h * x);
                        weights.push(0.5 * h * w);
                        nodes.push(mid + 0.5 * h * x);
                        weights.push(0.5 * h * w);
                    }
                }
                Ok((nodes, weights))
            }
            Quadrature::Trapezoid { .. } => {
                let nodes = (0..=n).map(|j| j as f64 * h).collect();
                let mut weights = vec![h; n + 1];
                weights[0] = 0.5 * h;
                weights[n] = 0.5 * h;
                Ok((nodes, weights))
            }
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quadrature::GaussLegendre { panels } => write!(f, "gl:{panels}"),
            Quadrature::Trapezoid { panels } => write!(f, "trapezoid:{panels}"),
        }
    }
}

impl FromStr for Quadrature {
    type Err = Error;

    /// `gl`, `gl:<panels>`, `trapezoid` or `trapezoid:<panels>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, panels) = match s.split_once(':') {
            Some((n, p)) => {
                let p: usize = p
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad panel count in {s:?}")))?;
                (n, Some(p))
            }
            None => (s, None),
        };
        let q = match name {
            "gl" | "gauss-legendre" => Quadrature::GaussLegendre {
                panels: panels.unwrap_or(64),
            },
            "trapezoid" | "trap" => Quadrature::Trapezoid {
                panels: panels.unwrap_or(100),
            },
            _ => return Err(Error::Argument(format!("unknown quadrature {s:?}"))),
        };
        if q.panels() == 0 {
            return Err(Error::Argument(
                "quadrature needs at least one panel".into(),
            ));
        }
        Ok(q)
    }
}

/// A profile evaluated at the nodes of a quadrature rule.
#[derive(Debug, Clone)]
pub struct NodeSamples {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `positions[slot][i]` at `nodes[i]`.
    pub positions: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
}

type PathValues = Vec<Vec<f64>>;

fn states_at<P: StrategyProfile + ?Sized>(
    profile: &P,
    nodes: &[f64],
) -> Result<(PathValues, PathValues)> {
    let n = profile.dim();
    let mut positions = vec![Vec::with_capacity(nodes.len()); n];
    let mut rates = vec![Vec::with_capacity(nodes.len()); n];
    for &t in nodes {
        let st = profile.state(t)?;
        for i in 0..n {
            positions[i].push(st.positions[i]);
            rates[i].push(st.rates[i]);
        }
    }
    Ok((positions, rates))
}

pub fn sample_nodes<P: StrategyProfile + ?Sized>(
    profile: &P,
    quadrature: Quadrature,
) -> Result<NodeSamples> {
    let (nodes, weights) = quadrature.rule()?;
    let (positions, rates) = states_at(profile, &nodes)?;
    Ok(NodeSamples {
        nodes,
        weights,
        positions,
        rates,
    })
}

/// Temporary and permanent parts of a cost integral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostParts {
    pub temporary: f64,
    pub permanent: f64,
}

impl CostParts {
    pub fn total(&self, kappa: f64) -> f64 {
        self.temporary + kappa * self.permanent
    }
}

/// Cost parts of slot `me` against slot `other`, with an optional
/// non-strategic participant trading at rate `b`.
pub fn pair_parts(samples: &NodeSamples, me: usize, other: usize, b: f64) -> CostParts {
    pair_parts_with(
        samples,
        &samples.positions[me],
        &samples.rates[me],
        other,
        b,
    )
}

pub(crate) fn pair_parts_with(
    samples: &NodeSamples,
    s: &[f64],
    v: &[f64],
    other: usize,
    b: f64,
) -> CostParts {
    let (o, w) = (&samples.positions[other], &samples.rates[other]);
    let mut parts = CostParts::default();
    for i in 0..samples.nodes.len() {
        let t = samples.nodes[i];
        let wt = samples.weights[i];
        parts.temporary += wt * (v[i] + w[i] + b) * v[i];
        parts.permanent += wt * (s[i] + o[i] + b * t) * v[i];
    }
    parts
}

fn check_grids(a: &PathRef<'_>, b: &PathRef<'_>) -> Result<()> {
    let n = a.grid.len();
    if n < 2 {
        return Err(Error::GridMismatch(
            "a path needs at least two samples".into(),
        ));
    }
    if b.grid.len() != n || a.positions.len() != n || a.rates.len() != n {
        return Err(Error::GridMismatch(format!(
            "lengths differ ({} vs {})",
            n,
            b.grid.len()
        )));
    }
    if b.positions.len() != n || b.rates.len() != n {
        return Err(Error::GridMismatch("path values do not match grid".into()));
    }
    if a.grid.iter().zip(b.grid).any(|(x, y)| x != y) {
        return Err(Error::GridMismatch("time grids differ".into()));
    }
    Ok(())
}

// Integral of the cost integrand over one grid interval. Both paths are
// replaced by the cubic Hermite interpolants of their (s, ṡ) samples; the
// interpolated integrand is a degree-5 polynomial, which three-point Gauss
// integrates exactly.
fn interval_cost(a: &PathRef<'_>, b: &PathRef<'_>, j: usize, kappa: f64) -> f64 {
    const X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let (t0, t1) = (a.grid[j], a.grid[j + 1]);
    let h = t1 - t0;
    let mut acc = 0.0;
    for (x, w) in X.iter().zip(W) {
        let u = 0.5 * (1.0 + x);
        let (s, sd) = hermite(a, j, h, u);
        let (o, od) = hermite(b, j, h, u);
        acc += w * ((sd + od) * sd + kappa * (s + o) * sd);
    }
    0.5 * h * acc
}

fn hermite(p: &PathRef<'_>, j: usize, h: f64, u: f64) -> (f64, f64) {
    let (y0, y1) = (p.positions[j], p.positions[j + 1]);
    let (d0, d1) = (p.rates[j] * h, p.rates[j + 1] * h);
    let u2 = u * u;
    let u3 = u2 * u;
    let val = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * d0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * d1;
    let der = (6.0 * u2 - 6.0 * u) * y0
        + (3.0 * u2 - 4.0 * u + 1.0) * d0
        + (-6.0 * u2 + 6.0 * u) * y1
        + (3.0 * u2 - 2.0 * u) * d1;
    (val, der / h)
}

/// Realized cost of `me` trading against `other` on their common grid.
///
/// Uses both the positions and the rates of the samples (cubic Hermite
/// reconstruction), so strategies that are polynomials of degree ≤ 3 are
/// integrated exactly.
pub fn realized_cost(me: PathRef<'_>, other: PathRef<'_>, eval_kappa: f64) -> Result<f64> {
    check_grids(&me, &other)?;
    Ok((0..me.grid.len() - 1)
        .map(|j| interval_cost(&me, &other, j, eval_kappa))
        .sum())
}

/// Cost-to-date on the grid of the paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn cumulative_curve(
    me: PathRef<'_>,
    other: PathRef<'_>,
    eval_kappa: f64,
) -> Result<CumulativeCurve> {
    check_grids(&me, &other)?;
    let mut values = Vec::with_capacity(me.grid.len());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..me.grid.len() - 1 {
        acc += interval_cost(&me, &other, j, eval_kappa);
        values.push(acc);
    }
    Ok(CumulativeCurve {
        grid: me.grid.to_vec(),
        values,
    })
}

/// A profile sampled at quadrature nodes inside every interval of a time
/// grid, so cost-to-date can be integrated from closed-form values.
#[derive(Debug, Clone)]
pub struct IntervalSamples {
    pub grid: Vec<f64>,
    pub samples: NodeSamples,
    // Nodes of interval j are offsets[j]..offsets[j + 1].
    offsets: Vec<usize>,
}

impl IntervalSamples {
    /// Cumulative cost of slot `me` against slot `other` at each grid time.
    pub fn cumulative(&self, me: usize, other: usize, eval_kappa: f64) -> CumulativeCurve {
        let s = &self.samples;
        let (x, v) = (&s.positions[me], &s.rates[me]);
        let (o, w) = (&s.positions[other], &s.rates[other]);
        let mut values = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        values.push(0.0);
        for j in 0..self.grid.len() - 1 {
            for i in self.offsets[j]..self.offsets[j + 1] {
                acc += s.weights[i] * ((v[i] + w[i]) * v[i] + eval_kappa * (x[i] + o[i]) * v[i]);
            }
            values.push(acc);
        }
        CumulativeCurve {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// Samples `profile` for cumulative costs on `grid`. Each grid interval of
/// width `Δ` gets `max(1, ⌈panels·Δ⌉)` panels of `quadrature`'s rule.
pub fn sample_intervals<P: StrategyProfile + ?Sized>(
    profile: &P,
    grid: &[f64],
    quadrature: Quadrature,
) -> Result<IntervalSamples> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridMismatch(
            "grid must have at least two strictly increasing times".into(),
        ));
    }
    let (unit_nodes, unit_weights) = match quadrature {
        Quadrature::GaussLegendre { .. } => Quadrature::GaussLegendre { panels: 1 }.rule()?,
        Quadrature::Trapezoid { .. } => Quadrature::Trapezoid { panels: 1 }.rule()?,
    };
    let density = quadrature.panels() as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut offsets = vec![0];
    for w in grid.windows(2) {
        let width = w[1] - w[0];
        let panels = ((density * width - 1e-9).ceil() as usize).max(1);
        let h = width / panels as f64;
        for p in 0..panels {
            let a = w[0] + p as f64 * h;
            for (x, wt) in unit_nodes.iter().zip(&unit_weights) {
                nodes.push(a + h * x);
                weights.push(h * wt);
            }
        }
        offsets.push(nodes.len());
    }
    let (positions, rates) = states_at(profile, &nodes)?;
    Ok(IntervalSamples {
        grid: grid.to_vec(),
        samples: NodeSamples {
            nodes,
            weights,
            positions,
            rates,
        },
        offsets,
    })
}

/// Expected cost of `(firm, index)` from pre-sampled strategies. Uses the
/// type's own κ and its belief about a non-strategic participant.
pub fn expected_cost_from_samples(
    samples: &NodeSamples,
    scenario: &Scenario,
    firm: Firm,
    index: usize,
) -> Result<f64> {
    let me = scenario.slot(firm, index)?;
    expected_cost_with(
        samples,
        scenario,
        firm,
        index,
        &samples.positions[me],
        &samples.rates[me],
    )
}

/// As [`expected_cost_from_samples`] but with the type's own strategy
/// replaced by `s`, `v` at the sample nodes.
pub fn expected_cost_with(
    samples: &NodeSamples,
    scenario: &Scenario,
    firm: Firm,
    index: usize,
    s: &[f64],
    v: &[f64],
) -> Result<f64> {
    let spec = scenario.types(firm)[index];
    let beliefs = scenario.beliefs()?;
    let row = beliefs.row(firm, index);
    let mut total = 0.0;
    for (j, &p) in row.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let other = scenario.slot(firm.other(), j)?;
        let parts = pair_parts_with(samples, s, v, other, spec.nonstrategic_size);
        total += p * parts.total(spec.kappa);
    }
    Ok(total)
}

/// Expected cost of `(firm, index)` in the equilibrium `solution`.
pub fn expected_cost(
    solution: &EquilibriumSolution,
    firm: Firm,
    index: usize,
    quadrature: Quadrature,
) -> Result<f64> {
    let samples = sample_nodes(solution, quadrature)?;
    expected_cost_from_samples(&samples, &solution.scenario, firm, index)
}

/// One row of a cost table: active pair `(firm1_type, firm2_type)` scored at
/// `eval_kappa`. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostRow {
    pub firm1_type: usize,
    pub firm2_type: usize,
    pub eval_kappa: f64,
    pub cost1: f64,
    pub cost2: f64,
    pub exp1: f64,
    pub exp2: f64,
    pub normalized: bool,
}

/// Costs for every active type pair and evaluation κ, pair-major.
pub fn cost_report(
    solution: &EquilibriumSolution,
    eval_kappas: &[f64],
    normalized: bool,
    quadrature: Quadrature,
) -> Result<Vec<CostRow>> {
    if eval_kappas.is_empty() {
        return Err(Error::Argument(
            "at least one evaluation kappa is required".into(),
        ));
    }
    let scenario = &solution.scenario;
    let (k, m) = (scenario.k(), scenario.m());
    if normalized {
        for firm in [Firm::One, Firm::Two] {
            if let Some(i) = scenario.types(firm).iter().position(|t| t.target == 0.0) {
                return Err(Error::Normalization {
                    firm: firm.number(),
                    index: i,
                });
            }
        }
    }
    let samples = sample_nodes(solution, quadrature)?;
    let exp1 = (0..k)
        .map(|i| expected_cost_from_samples(&samples, scenario, Firm::One, i))
        .collect::<Result<Vec<_>>>()?;
    let exp2 = (0..m)
        .map(|j| expected_cost_from_samples(&samples, scenario, Firm::Two, j))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(k * m * eval_kappas.len());
    for i in 0..k {
        for j in 0..m {
            let (s1, s2) = (i, k + j);
            let p1 = pair_parts(&samples, s1, s2, 0.0);
            let p2 = pair_parts(&samples, s2, s1, 0.0);
            let (n1, n2) = if normalized {
                (
                    scenario.firm1_types[i].target,
                    scenario.firm2_types[j].target,
                )
            } else {
                (1.0, 1.0)
            };
            for &kappa in eval_kappas {
                rows.push(CostRow {
                    firm1_type: i,
                    firm2_type: j,
                    eval_kappa: kappa,
                    cost1: p1.total(kappa) / n1,
                    cost2: p2.total(kappa) / n2,
                    exp1: exp1[i] / n1,
                    exp2: exp2[j] / n2,
                    normalized,
                });
            }
        }
    }
    Ok(rows)
}
