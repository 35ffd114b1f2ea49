use opdiff::{grid_stats, random_grid, uniform_grid, TimeGrid};
use proptest::prelude::*;

proptest! {
    #[test]
    fn random_levels_end_at_final_time(t in 1e-3f64..10.0, n in 1usize..5000, q in 0.0f64..1.99, seed in any::<u64>()) {
        let g = random_grid(t, n, q, seed).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g.levels()[0], 0.0);
        prop_assert!((g.final_time() - t).abs() <= 1e-14 * t);
        prop_assert!(g.levels().windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(g.seed(), Some(seed));
    }

    #[test]
    fn half_spread_keeps_ratio_below_five_thirds(n in 2usize..2000, seed in any::<u64>()) {
        let g = random_grid(0.1, n, 0.5, seed).unwrap();
        let s = grid_stats(&g);
        prop_assert!(s.max_adjacent_ratio <= 5.0 / 3.0 + 1e-12);
        prop_assert!(s.max_pairwise_ratio() <= 5.0 / 3.0 + 1e-12);
    }

    #[test]
    fn same_seed_same_grid(n in 1usize..500, seed in any::<u64>()) {
        let a = random_grid(0.1, n, 0.5, seed).unwrap();
        let b = random_grid(0.1, n, 0.5, seed).unwrap();
        prop_assert_eq!(a.steps(), b.steps());
        prop_assert_eq!(a.to_csv(), b.to_csv());
    }
}

#[test]
fn seeds_change_the_grid() {
    let a = random_grid(0.1, 100, 0.5, 1).unwrap();
    let b = random_grid(0.1, 100, 0.5, 2).unwrap();
    assert_ne!(a.steps(), b.steps());
    assert!(!a.is_uniform());
}

#[test]
fn zero_spread_is_uniform() {
    let g = random_grid(0.1, 50, 0.0, 9).unwrap();
    assert!(g.is_uniform());
    assert_eq!(g.steps(), uniform_grid(0.1, 50).unwrap().steps());
}

#[test]
fn long_uniform_grid_sums_exactly() {
    let g = uniform_grid(0.1, 1_000_000).unwrap();
    assert!((g.final_time() - 0.1).abs() <= 1e-14 * 0.1);
    assert!(g.is_uniform());
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(uniform_grid(0.1, 0).is_err());
    assert!(uniform_grid(-1.0, 10).is_err());
    assert!(uniform_grid(f64::NAN, 10).is_err());
    assert!(random_grid(0.1, 10, 2.0, 0).is_err());
    assert!(random_grid(0.1, 10, -0.1, 0).is_err());
    assert!(TimeGrid::from_steps(vec![]).is_err());
    assert!(TimeGrid::from_steps(vec![0.1, 0.0]).is_err());
    assert!(TimeGrid::from_steps(vec![0.1, f64::NAN]).is_err());
}

#[test]
fn csv_round_trips() {
    let g = random_grid(0.1, 7, 0.5, 42).unwrap();
    let csv = g.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,t_n,tau_n"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][2], "");
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), n);
        assert_eq!(row[1].parse::<f64>().unwrap(), g.levels()[n]);
        if n > 0 {
            assert_eq!(row[2].parse::<f64>().unwrap(), g.steps()[n - 1]);
        }
    }
}
