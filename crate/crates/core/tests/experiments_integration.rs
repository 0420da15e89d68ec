//! Mid-scale integration checks of the experiment procedures: the searches
//! are pointed at grids large enough for the known reference values to show,
//! but small enough to stay in test-suite territory.

use navgrid::{
    derive_seed, estimate_edt, find_r_opt, find_threshold, sweep_over_r, value_grid,
    EstimateConfig, GridParams, Side,
};

fn mean_at(n: u32, r: f64, config: &EstimateConfig) -> f64 {
    estimate_edt(&GridParams::new(n, r, 1, 1).unwrap(), config)
        .unwrap()
        .mean_hops
}

/// At n = 2^14 the exponents keeping the delivery time within twice e_2(n)
/// range from about 0.85 to about 2.26.
#[test]
fn threshold_crossings_at_n_2_14() {
    let n = 1 << 14;
    let config = EstimateConfig::new(5_000, 314).with_workers(1);
    let budget = 2.0 * mean_at(n, 2.0, &config);
    // r = 1.9 sits inside the sub-budget valley, splitting the two crossings.
    let left = find_threshold(n, 1, 1, budget, Side::Left, (0.0, 1.9), 0.01, &config).unwrap();
    let right = find_threshold(n, 1, 1, budget, Side::Right, (1.9, 3.0), 0.01, &config).unwrap();
    assert!(
        (left - 0.85).abs() <= 0.1,
        "left crossing {left} not near 0.85"
    );
    assert!(
        (right - 2.26).abs() <= 0.1,
        "right crossing {right} not near 2.26"
    );
}

/// Golden-section search lands in the flat valley of e_r(2^10) and its value
/// is as good as the best point of a dense sweep at matched noise.
#[test]
fn r_opt_search_agrees_with_a_dense_sweep() {
    let n = 1 << 10;
    let tol = 0.02;
    let search_config = EstimateConfig::new(100_000, 2718).with_workers(1);
    let r_opt = find_r_opt(n, 1, 1, (0.5, 2.5), tol, &search_config).unwrap();
    assert!(
        (1.3..=2.0).contains(&r_opt),
        "r_opt = {r_opt} outside the valley"
    );

    let sweep_config = EstimateConfig::new(30_000, 2718).with_workers(1);
    let grid = value_grid(0.5, 2.5, 0.1);
    let rows = sweep_over_r(n, &grid, 1, 1, &sweep_config);
    let best = rows
        .iter()
        .map(|(_, row)| row.as_ref().unwrap())
        .min_by(|a, b| a.mean_hops.total_cmp(&b.mean_hops))
        .unwrap();

    let check_config = EstimateConfig {
        seed: derive_seed(sweep_config.seed, 777),
        ..sweep_config
    };
    let at_opt = estimate_edt(&GridParams::new(n, r_opt, 1, 1).unwrap(), &check_config).unwrap();
    let combined_se = (at_opt.std_error.powi(2) + best.std_error.powi(2)).sqrt();
    // allow three standard errors plus 2% of valley flatness
    let slack = 3.0 * combined_se + 0.02 * best.mean_hops;
    assert!(
        at_opt.mean_hops <= best.mean_hops + slack,
        "search value {:.2} worse than sweep minimum {:.2} (slack {:.2})",
        at_opt.mean_hops,
        best.mean_hops,
        slack
    );
}

/// e_2(n) grows with n (coarse monotonicity of the polylogarithmic regime).
#[test]
fn e2_increases_with_n() {
    let config = EstimateConfig::new(4_000, 16).with_workers(1);
    let sizes = [1 << 8, 1 << 10, 1 << 12];
    let means: Vec<f64> = sizes.iter().map(|&n| mean_at(n, 2.0, &config)).collect();
    assert!(
        means.windows(2).all(|w| w[1] > w[0]),
        "e_2 not increasing: {means:?}"
    );
}
