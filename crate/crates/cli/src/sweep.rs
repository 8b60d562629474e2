//! Parameter paths addressed by the `sweep` command.
//!
//! * `prior[k][m]`: joint probability; the other entries are rescaled to
//!   keep unit mass.
//! * `firm1[i].kappa`, `firm2[i].target`, `firm1[i].nonstrategic_size`
//! * `conditional1[k][m]`: firm 1 type `k`'s belief that firm 2 is type `m`,
//!   reached by changing the joint entry `(k, m)` and renormalizing.
//! * `conditional2[m][k]`: the same for firm 2 type `m`.
//!
//! Indices are zero-based.

use std::fmt;
use std::str::FromStr;

use bayes_exec_core::{Error, Firm, Scenario};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeField {
    Kappa,
    Target,
    NonstrategicSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPath {
    Prior {
        row: usize,
        col: usize,
    },
    Type {
        firm: Firm,
        index: usize,
        field: TypeField,
    },
    Conditional {
        firm: Firm,
        believer: usize,
        about: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub path: SweepPath,
    pub values: Vec<f64>,
}

// Splits "name[1][2].rest" into ("name", [1, 2], Some("rest")).
fn split_path(s: &str) -> Option<(&str, Vec<usize>, Option<&str>)> {
    let open = s.find('[')?;
    let name = &s[..open];
    let mut rest = &s[open..];
    let mut idx = Vec::new();
    while let Some(r) = rest.strip_prefix('[') {
        let close = r.find(']')?;
        idx.push(r[..close].trim().parse().ok()?);
        rest = &r[close + 1..];
    }
    let field = match rest {
        "" => None,
        r => Some(r.strip_prefix('.')?),
    };
    Some((name, idx, field))
}

impl FromStr for SweepPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Argument(format!("unrecognized sweep path {s:?}"));
        let (name, idx, field) = split_path(s.trim()).ok_or_else(bad)?;
        let firm = |n: &str| match n {
            "firm1" | "conditional1" => Some(Firm::One),
            "firm2" | "conditional2" => Some(Firm::Two),
            _ => None,
        };
        match (name, idx.as_slice(), field) {
            ("prior", &[row, col], None) => Ok(SweepPath::Prior { row, col }),
            ("firm1" | "firm2", &[index], Some(f)) => {
                let field = match f {
                    "kappa" => TypeField::Kappa,
                    "target" => TypeField::Target,
                    "nonstrategic_size" | "b" => TypeField::NonstrategicSize,
                    _ => return Err(bad()),
                };
                Ok(SweepPath::Type {
                    firm: firm(name).ok_or_else(bad)?,
                    index,
                    field,
                })
            }
            ("conditional1" | "conditional2", &[believer, about], None) => {
                Ok(SweepPath::Conditional {
                    firm: firm(name).ok_or_else(bad)?,
                    believer,
                    about,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SweepPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SweepPath::Prior { row, col } => write!(f, "prior[{row}][{col}]"),
            SweepPath::Type { firm, index, field } => {
                let name = match field {
                    TypeField::Kappa => "kappa",
                    TypeField::Target => "target",
                    TypeField::NonstrategicSize => "nonstrategic_size",
                };
                write!(f, "firm{}[{index}].{name}", firm.number())
            }
            SweepPath::Conditional {
                firm,
                believer,
                about,
            } => write!(f, "conditional{}[{believer}][{about}]", firm.number()),
        }
    }
}

fn check_index(what: &str, i: usize, n: usize) -> Result<(), Error> {
    if i >= n {
        return Err(Error::Index(format!("{what} {i} out of range (have {n})")));
    }
    Ok(())
}

fn check_probability(v: f64, open: bool) -> Result<(), Error> {
    let ok = if open {
        v > 0.0 && v < 1.0
    } else {
        (0.0..=1.0).contains(&v)
    };
    if !ok {
        return Err(Error::Argument(format!("probability {v} out of range")));
    }
    Ok(())
}

impl SweepPath {
    /// The scenario with this parameter set to `value`.
    pub fn apply(&self, scenario: &Scenario, value: f64) -> Result<Scenario, Error> {
        let mut s = scenario.clone();
        let (k, m) = (s.k(), s.m());
        match *self {
            SweepPath::Prior { row, col } => {
                check_index("prior row", row, k)?;
                check_index("prior column", col, m)?;
                check_probability(value, false)?;
                let rest: f64 = s.prior.as_slice().iter().sum::<f64>() - s.prior[(row, col)];
                if rest <= 0.0 && value < 1.0 {
                    return Err(Error::Argument("no remaining prior mass to rescale".into()));
                }
                let scale = if rest > 0.0 {
                    (1.0 - value) / rest
                } else {
                    0.0
                };
                for r in 0..k {
                    for c in 0..m {
                        s.prior[(r, c)] = if (r, c) == (row, col) {
                            value
                        } else {
                            s.prior[(r, c)] * scale
                        };
                    }
                }
            }
            SweepPath::Type { firm, index, field } => {
                let types = match firm {
                    Firm::One => &mut s.firm1_types,
                    Firm::Two => &mut s.firm2_types,
                };
                check_index("type", index, types.len())?;
                let t = &mut types[index];
                match field {
                    TypeField::Kappa => t.kappa = value,
                    TypeField::Target => t.target = value,
                    TypeField::NonstrategicSize => t.nonstrategic_size = value,
                }
            }
            SweepPath::Conditional {
                firm,
                believer,
                about,
            } => {
                check_probability(value, true)?;
                let (row, col) = match firm {
                    Firm::One => (believer, about),
                    Firm::Two => (about, believer),
                };
                check_index("firm 1 type", row, k)?;
                check_index("firm 2 type", col, m)?;
                let rest: f64 = match firm {
                    Firm::One => (0..m)
                        .filter(|&c| c != col)
                        .map(|c| s.prior[(row, c)])
                        .sum(),
                    Firm::Two => (0..k)
                        .filter(|&r| r != row)
                        .map(|r| s.prior[(r, col)])
                        .sum(),
                };
                if rest <= 0.0 {
                    return Err(Error::Argument(format!(
                        "{self} is pinned at 1 by the prior"
                    )));
                }
                s.prior[(row, col)] = value * rest / (1.0 - value);
                let total: f64 = s.prior.as_slice().iter().sum();
                s.prior = s.prior.scale(1.0 / total);
            }
        }
        Scenario::new(s.firm1_types, s.firm2_types, s.prior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bayes_exec_core::FirmTypeSpec;

    fn base() -> Scenario {
        Scenario::from_parts(
            vec![FirmTypeSpec::new(1.0, 3.0), FirmTypeSpec::new(3.0, 5.0)],
            vec![FirmTypeSpec::new(2.0, 7.0), FirmTypeSpec::new(15.0, 5.0)],
            &[[0.40, 0.20], [0.15, 0.25]],
        )
        .unwrap()
    }

    #[test]
    fn parses_and_prints() {
        for p in [
            "prior[0][1]",
            "firm1[1].kappa",
            "firm2[0].target",
            "firm2[1].nonstrategic_size",
            "conditional1[0][0]",
            "conditional2[1][0]",
        ] {
            assert_eq!(p.parse::<SweepPath>().unwrap().to_string(), p);
        }
        for bad in [
            "prior[0]",
            "firm3[0].kappa",
            "firm1[0].color",
            "prior[a][0]",
            "x",
        ] {
            assert!(bad.parse::<SweepPath>().is_err(), "{bad}");
        }
    }

    #[test]
    fn prior_entry_keeps_value_and_mass() {
        let s = "prior[0][0]"
            .parse::<SweepPath>()
            .unwrap()
            .apply(&base(), 0.1)
            .unwrap();
        assert!((s.prior[(0, 0)] - 0.1).abs() < 1e-15);
        let total: f64 = s.prior.as_slice().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!((s.prior[(0, 1)] / s.prior[(1, 1)] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn conditional_hits_target() {
        let b = base();
        for v in [0.67, 0.45, 0.23, 0.02] {
            let s = "conditional1[0][0]"
                .parse::<SweepPath>()
                .unwrap()
                .apply(&b, v)
                .unwrap();
            let p = s.beliefs().unwrap();
            assert!((p.p1[(0, 0)] - v).abs() < 1e-12);
            assert!((p.p1[(1, 0)] - 0.375).abs() < 1e-12);
        }
        let s = "conditional2[1][0]"
            .parse::<SweepPath>()
            .unwrap()
            .apply(&b, 0.9)
            .unwrap();
        assert!((s.beliefs().unwrap().p2[(1, 0)] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn type_fields_and_errors() {
        let s = "firm2[1].target"
            .parse::<SweepPath>()
            .unwrap()
            .apply(&base(), 40.0)
            .unwrap();
        assert_eq!(s.firm2_types[1].target, 40.0);
        let p = "firm1[5].kappa".parse::<SweepPath>().unwrap();
        assert!(matches!(p.apply(&base(), 1.0), Err(Error::Index(_))));
        let p = "firm1[0].kappa".parse::<SweepPath>().unwrap();
        assert!(matches!(
            p.apply(&base(), -1.0),
            Err(Error::InvalidScenario(_))
        ));
        let p = "conditional1[0][0]".parse::<SweepPath>().unwrap();
        assert!(p.apply(&base(), 1.0).is_err());
    }
}
