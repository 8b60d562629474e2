//! Firm types, the common prior and the conditional beliefs derived from it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matode::Matrix;

/// Tolerance on the total mass of the prior.
pub const PRIOR_SUM_TOL: f64 = 1e-9;

/// One type of a firm: believed impact coefficient, target quantity and the
/// target size it attributes to a non-strategic participant (0 = none).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmTypeSpec {
    pub kappa: f64,
    pub target: f64,
    #[serde(default)]
    pub nonstrategic_size: f64,
}

impl FirmTypeSpec {
    pub fn new(kappa: f64, target: f64) -> Self {
        FirmTypeSpec {
            kappa,
            target,
            nonstrategic_size: 0.0,
        }
    }

    pub fn with_nonstrategic(kappa: f64, target: f64, nonstrategic_size: f64) -> Self {
        FirmTypeSpec {
            kappa,
            target,
            nonstrategic_size,
        }
    }
}

/// Which of the two strategic firms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Firm {
    One,
    Two,
}

impl Firm {
    pub fn number(self) -> u8 {
        match self {
            Firm::One => 1,
            Firm::Two => 2,
        }
    }

    pub fn other(self) -> Firm {
        match self {
            Firm::One => Firm::Two,
            Firm::Two => Firm::One,
        }
    }
}

impl fmt::Display for Firm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "firm {}", self.number())
    }
}

/// A single failed scenario rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Outcome of [`Scenario::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Two firms' type lists plus the common prior over type profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub firm1_types: Vec<FirmTypeSpec>,
    pub firm2_types: Vec<FirmTypeSpec>,
    /// `prior[(k, m)]` is the joint probability that firm 1 is type `k`
    /// and firm 2 is type `m`.
    pub prior: Matrix,
}

impl Scenario {
    /// Builds a scenario and validates it. A prior whose mass is within
    /// [`PRIOR_SUM_TOL`] of one is rescaled to unit mass.
    pub fn new(
        firm1_types: Vec<FirmTypeSpec>,
        firm2_types: Vec<FirmTypeSpec>,
        prior: Matrix,
    ) -> Result<Self> {
        let mut s = Scenario {
            firm1_types,
            firm2_types,
            prior,
        };
        let report = s.validate();
        if !report.is_ok() {
            return Err(Error::InvalidScenario(report.violations));
        }
        s.renormalize();
        Ok(s)
    }

    /// Convenience constructor from nested rows for the prior.
    pub fn from_parts<R: AsRef<[f64]>>(
        firm1_types: Vec<FirmTypeSpec>,
        firm2_types: Vec<FirmTypeSpec>,
        prior: &[R],
    ) -> Result<Self> {
        Scenario::new(firm1_types, firm2_types, Matrix::from_rows(prior)?)
    }

    /// The complete-information game between two known types.
    pub fn degenerate(t1: FirmTypeSpec, t2: FirmTypeSpec) -> Self {
        Scenario {
            firm1_types: vec![t1],
            firm2_types: vec![t2],
            prior: Matrix::identity(1),
        }
    }

    pub fn k(&self) -> usize {
        self.firm1_types.len()
    }

    pub fn m(&self) -> usize {
        self.firm2_types.len()
    }

    /// Total number of (firm, type) slots, `K + M`.
    pub fn dim(&self) -> usize {
        self.k() + self.m()
    }

    pub fn types(&self, firm: Firm) -> &[FirmTypeSpec] {
        match firm {
            Firm::One => &self.firm1_types,
            Firm::Two => &self.firm2_types,
        }
    }

    /// Position of `(firm, index)` in the stacked strategy vector.
    pub fn slot(&self, firm: Firm, index: usize) -> Result<usize> {
        let n = self.types(firm).len();
        if index >= n {
            return Err(Error::Index(format!(
                "{firm} has {n} types, index {index} requested"
            )));
        }
        Ok(match firm {
            Firm::One => index,
            Firm::Two => self.k() + index,
        })
    }

    /// All types stacked firm 1 first, then firm 2.
    pub fn stacked_types(&self) -> impl Iterator<Item = &FirmTypeSpec> {
        self.firm1_types.iter().chain(&self.firm2_types)
    }

    pub fn targets(&self) -> Vec<f64> {
        self.stacked_types().map(|t| t.target).collect()
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.stacked_types().map(|t| t.kappa).collect()
    }

    pub fn nonstrategic_sizes(&self) -> Vec<f64> {
        self.stacked_types().map(|t| t.nonstrategic_size).collect()
    }

    pub fn has_nonstrategic_beliefs(&self) -> bool {
        self.stacked_types().any(|t| t.nonstrategic_size != 0.0)
    }

    /// Checks every scenario invariant and lists what fails.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let mut push = |field: String, rule: &str| {
            v.push(Violation {
                field,
                rule: rule.to_string(),
            })
        };
        let (k, m) = (self.k(), self.m());
        if k == 0 {
            push("firm1_types".into(), "at least one type required");
        }
        if m == 0 {
            push("firm2_types".into(), "at least one type required");
        }
        for (firm, types) in [(1, &self.firm1_types), (2, &self.firm2_types)] {
            for (i, t) in types.iter().enumerate() {
                if !t.kappa.is_finite() || t.kappa < 0.0 {
                    push(
                        format!("firm{firm}_types[{i}].kappa"),
                        "kappa must be finite and >= 0",
                    );
                }
                if !t.target.is_finite() {
                    push(
                        format!("firm{firm}_types[{i}].target"),
                        "target must be finite",
                    );
                }
                if !t.nonstrategic_size.is_finite() {
                    push(
                        format!("firm{firm}_types[{i}].nonstrategic_size"),
                        "nonstrategic_size must be finite",
                    );
                }
            }
        }
        if self.prior.rows() != k || self.prior.cols() != m {
            push(
                "prior".into(),
                &format!(
                    "prior must be {k}x{m}, got {}x{}",
                    self.prior.rows(),
                    self.prior.cols()
                ),
            );
            return ValidationReport { violations: v };
        }
        let mut bad_entry = false;
        for r in 0..k {
            for c in 0..m {
                let p = self.prior[(r, c)];
                if !p.is_finite() || p < 0.0 {
                    push(
                        format!("prior[{r}][{c}]"),
                        "entries must be finite and >= 0",
                    );
                    bad_entry = true;
                }
            }
        }
        if !bad_entry {
            let total: f64 = self.prior.as_slice().iter().sum();
            if (total - 1.0).abs() > PRIOR_SUM_TOL {
                push("prior".into(), &format!("prior sum ≠ 1 (sum = {total})"));
            }
            for r in 0..k {
                if self.prior.row(r).iter().sum::<f64>() <= 0.0 {
                    push(format!("prior[{r}]"), "zero marginal for firm-1 type");
                }
            }
            for c in 0..m {
                if (0..k).map(|r| self.prior[(r, c)]).sum::<f64>() <= 0.0 {
                    push(format!("prior[*][{c}]"), "zero marginal for firm-2 type");
                }
            }
        }
        ValidationReport { violations: v }
    }

    fn renormalize(&mut self) {
        // Skipped when already normalized to rounding, so this is idempotent.
        let total: f64 = self.prior.as_slice().iter().sum();
        let slack = self.prior.as_slice().len() as f64 * f64::EPSILON;
        if (total - 1.0).abs() > slack && total > 0.0 {
            self.prior = self.prior.scale(1.0 / total);
        }
    }

    /// Conditional beliefs of both firms.
    pub fn beliefs(&self) -> Result<BeliefMatrices> {
        conditionals(&self.prior)
    }
}

/// Conditional beliefs of each firm type about the other firm's type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefMatrices {
    /// `K x M`, row `k` is firm 1 type `k`'s distribution over firm 2 types.
    pub p1: Matrix,
    /// `M x K`, row `m` is firm 2 type `m`'s distribution over firm 1 types.
    pub p2: Matrix,
    /// Half of `p1`; the coupling block used in system assembly.
    pub pi1: Matrix,
    /// Half of `p2`.
    pub pi2: Matrix,
}

impl BeliefMatrices {
    /// Beliefs of `(firm, index)` over the opponent's types.
    pub fn row(&self, firm: Firm, index: usize) -> &[f64] {
        match firm {
            Firm::One => self.p1.row(index),
            Firm::Two => self.p2.row(index),
        }
    }
}

/// Derives conditional beliefs from a joint prior by Bayes' rule.
pub fn conditionals(prior: &Matrix) -> Result<BeliefMatrices> {
    let (k, m) = (prior.rows(), prior.cols());
    let row_sums: Vec<f64> = (0..k).map(|r| prior.row(r).iter().sum()).collect();
    let col_sums: Vec<f64> = (0..m)
        .map(|c| (0..k).map(|r| prior[(r, c)]).sum())
        .collect();
    if let Some(i) = row_sums.iter().position(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::ZeroMarginal { firm: 1, index: i });
    }
    if let Some(i) = col_sums.iter().position(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::ZeroMarginal { firm: 2, index: i });
    }
    let mut p1 = Matrix::zeros(k, m);
    let mut p2 = Matrix::zeros(m, k);
    for r in 0..k {
        for c in 0..m {
            p1[(r, c)] = prior[(r, c)] / row_sums[r];
            p2[(c, r)] = prior[(r, c)] / col_sums[c];
        }
    }
    let pi1 = p1.scale(0.5);
    let pi2 = p2.scale(0.5);
    Ok(BeliefMatrices { p1, p2, pi1, pi2 })
}
