#![allow(dead_code)]

use bayes_exec_core::{FirmTypeSpec, Scenario};

/// `(firm1 type, firm2 type, eval κ, cost1, exp1, cost2, exp2)`, one-based
/// type numbers as printed.
pub type TableRow = (usize, usize, f64, f64, f64, f64, f64);

pub fn two_type() -> Scenario {
    Scenario::from_parts(
        vec![FirmTypeSpec::new(1.0, 3.0), FirmTypeSpec::new(3.0, 5.0)],
        vec![FirmTypeSpec::new(2.0, 7.0), FirmTypeSpec::new(15.0, 5.0)],
        &[[0.40, 0.20], [0.15, 0.25]],
    )
    .unwrap()
}

pub fn three_type() -> Scenario {
    Scenario::from_parts(
        vec![
            FirmTypeSpec::new(20.0, 1.0),
            FirmTypeSpec::new(5.0, 2.0),
            FirmTypeSpec::new(1.0, 3.0),
        ],
        vec![
            FirmTypeSpec::new(5.0, 0.25),
            FirmTypeSpec::new(2.0, 1.5),
            FirmTypeSpec::new(1.0, 5.0),
        ],
        &[[0.15, 0.10, 0.10], [0.15, 0.20, 0.10], [0.05, 0.05, 0.10]],
    )
    .unwrap()
}

/// Two near-identical types per firm; firm 2 type 1 alone expects a
/// non-strategic buyer of size 5 and uses `kappa`.
pub fn nonstrategic(kappa: f64) -> Scenario {
    Scenario::from_parts(
        vec![FirmTypeSpec::new(1.0, 1.0), FirmTypeSpec::new(1.0, 1.0)],
        vec![
            FirmTypeSpec::with_nonstrategic(kappa, 1.0, 5.0),
            FirmTypeSpec::new(1.0, 1.0),
        ],
        &[[0.40, 0.20], [0.15, 0.25]],
    )
    .unwrap()
}

pub fn all_scenarios() -> Vec<(&'static str, Scenario)> {
    vec![
        ("two-type", two_type()),
        ("three-type", three_type()),
        ("non-strategic κ=1", nonstrategic(1.0)),
        ("non-strategic κ=3", nonstrategic(3.0)),
    ]
}

pub const TWO_TYPE_P1: [[f64; 2]; 2] = [[0.67, 0.33], [0.37, 0.62]];
pub const TWO_TYPE_P2: [[f64; 2]; 2] = [[0.73, 0.27], [0.44, 0.56]];

pub const TWO_TYPE_EVAL: [f64; 4] = [1.0, 2.0, 3.0, 15.0];
pub const THREE_TYPE_EVAL: [f64; 4] = [1.0, 2.0, 5.0, 20.0];

pub const TWO_TYPE_NORMALIZED: [TableRow; 16] = [
    (1, 1, 1.0, 15.81, 14.71, 14.68, 21.88),
    (1, 1, 2.0, 21.73, 14.71, 19.28, 21.88),
    (1, 1, 3.0, 27.65, 14.71, 23.89, 21.88),
    (1, 1, 15.0, 98.68, 14.71, 79.16, 21.88),
    (1, 2, 1.0, 12.49, 14.71, 22.64, 57.10),
    (1, 2, 2.0, 19.12, 14.71, 25.05, 57.10),
    (1, 2, 3.0, 25.76, 14.71, 27.47, 57.10),
    (1, 2, 15.0, 105.37, 14.71, 56.49, 57.10),
    (2, 1, 1.0, 18.62, 31.34, 17.85, 21.88),
    (2, 1, 2.0, 25.02, 31.34, 23.56, 21.88),
    (2, 1, 3.0, 31.42, 31.34, 29.28, 21.88),
    (2, 1, 15.0, 108.22, 31.34, 97.85, 21.88),
    (2, 2, 1.0, 16.98, 31.34, 25.98, 57.10),
    (2, 2, 2.0, 24.14, 31.34, 28.83, 57.10),
    (2, 2, 3.0, 31.29, 31.34, 31.67, 57.10),
    (2, 2, 15.0, 117.14, 31.34, 65.80, 57.10),
];

pub const TWO_TYPE_RAW: [TableRow; 16] = [
    (1, 1, 1.0, 47.4, 44.1, 102.7, 153.2),
    (1, 1, 2.0, 65.2, 44.1, 135.0, 153.2),
    (1, 1, 3.0, 83.0, 44.1, 167.2, 153.2),
    (1, 1, 15.0, 296.0, 44.1, 554.1, 153.2),
    (1, 2, 1.0, 37.5, 44.1, 113.2, 285.5),
    (1, 2, 2.0, 57.4, 44.1, 125.3, 285.5),
    (1, 2, 3.0, 77.3, 44.1, 137.4, 285.5),
    (1, 2, 15.0, 316.1, 44.1, 282.4, 285.5),
    (2, 1, 1.0, 93.1, 156.7, 124.9, 153.2),
    (2, 1, 2.0, 125.1, 156.7, 164.9, 153.2),
    (2, 1, 3.0, 157.1, 156.7, 204.9, 153.2),
    (2, 1, 15.0, 541.1, 156.7, 684.9, 153.2),
    (2, 2, 1.0, 84.9, 156.7, 129.9, 285.5),
    (2, 2, 2.0, 120.7, 156.7, 144.1, 285.5),
    (2, 2, 3.0, 156.4, 156.7, 158.3, 285.5),
    (2, 2, 15.0, 585.7, 156.7, 329.0, 285.5),
];

pub const THREE_TYPE_NORMALIZED: [TableRow; 36] = [
    (1, 1, 1.0, 26.73, 4.85, 2.09, 6.27),
    (1, 1, 2.0, 27.64, 4.85, 1.57, 6.27),
    (1, 1, 5.0, 30.37, 4.85, 0.01, 6.27),
    (1, 1, 20.0, 44.03, 4.85, -7.80, 6.27),
    (1, 2, 1.0, 24.01, 4.85, 3.40, 7.87),
    (1, 2, 2.0, 23.21, 4.85, 6.01, 7.87),
    (1, 2, 5.0, 20.83, 4.85, 13.84, 7.87),
    (1, 2, 20.0, 8.91, 4.85, 53.03, 7.87),
    (1, 3, 1.0, 22.67, 4.85, 9.71, 10.01),
    (1, 3, 2.0, 18.43, 4.85, 14.16, 10.01),
    (1, 3, 5.0, 5.70, 4.85, 27.51, 10.01),
    (1, 3, 20.0, -57.97, 4.85, 94.23, 10.01),
    (2, 1, 1.0, 4.18, 11.87, 5.95, 6.27),
    (2, 1, 2.0, 5.34, 11.87, 6.76, 6.27),
    (2, 1, 5.0, 8.83, 11.87, 9.18, 6.27),
    (2, 1, 20.0, 26.30, 11.87, 21.29, 6.27),
    (2, 2, 1.0, 5.35, 11.87, 5.54, 7.87),
    (2, 2, 2.0, 6.68, 11.87, 7.85, 7.87),
    (2, 2, 5.0, 10.67, 11.87, 14.78, 7.87),
    (2, 2, 20.0, 30.62, 11.87, 49.44, 7.87),
    (2, 3, 1.0, 9.65, 11.87, 10.89, 10.01),
    (2, 3, 2.0, 11.95, 11.87, 14.87, 10.01),
    (2, 3, 5.0, 18.83, 11.87, 26.82, 10.01),
    (2, 3, 20.0, 53.27, 11.87, 86.54, 10.01),
    (3, 1, 1.0, 4.95, 8.56, 8.18, 6.27),
    (3, 1, 2.0, 6.59, 8.56, 9.64, 6.27),
    (3, 1, 5.0, 11.51, 8.56, 14.00, 6.27),
    (3, 1, 20.0, 36.10, 8.56, 35.82, 6.27),
    (3, 2, 1.0, 6.51, 8.56, 7.27, 7.87),
    (3, 2, 2.0, 8.51, 8.56, 10.01, 7.87),
    (3, 2, 5.0, 14.53, 8.56, 18.24, 7.87),
    (3, 2, 20.0, 44.59, 8.56, 59.36, 7.87),
    (3, 3, 1.0, 11.39, 8.56, 12.37, 10.01),
    (3, 3, 2.0, 14.82, 8.56, 16.71, 10.01),
    (3, 3, 5.0, 25.13, 8.56, 29.73, 10.01),
    (3, 3, 20.0, 76.68, 8.56, 94.80, 10.01),
];
