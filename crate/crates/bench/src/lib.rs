//! Scenarios shared by the benchmarks in `benches/`.

use bayes_exec_core::{FirmTypeSpec, Scenario};

pub fn two_type() -> Scenario {
    Scenario::from_parts(
        vec![FirmTypeSpec::new(1.0, 3.0), FirmTypeSpec::new(3.0, 5.0)],
        vec![FirmTypeSpec::new(2.0, 7.0), FirmTypeSpec::new(15.0, 5.0)],
        &[[0.40, 0.20], [0.15, 0.25]],
    )
    .expect("valid two-type scenario")
}

/// `k` by `k` types with a diffuse prior.
pub fn square(k: usize) -> Scenario {
    let firm = |offset: f64| {
        (0..k)
            .map(|i| FirmTypeSpec::new(1.0 + offset + i as f64, 1.0 + i as f64))
            .collect()
    };
    let w = (0..k * k).map(|i| 1.0 + (i % 3) as f64).sum::<f64>();
    let prior: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (1.0 + ((i * k + j) % 3) as f64) / w)
                .collect()
        })
        .collect();
    Scenario::from_parts(firm(0.0), firm(0.5), &prior).expect("valid square scenario")
}
