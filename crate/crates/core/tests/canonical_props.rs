mod common;

use common::random_connected;
use contig::canonical::{build_path, check_path, path_intervals, PathConfig, Slack};
use contig::diagnostics::{enumerate_states, DEFAULT_STATE_CAP};
use contig::graph::{bandwidth_exact, make_grid};
use contig::partition::StateParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// With q = n every pair has a path; it is legal, ends at the target,
    /// stays within the length bound and passes every checkpoint.
    #[test]
    fn random_pairs_give_checked_paths(seed in any::<u64>(), n in 2usize..9, b in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(n, n / 3, &mut rng);
        let params = StateParams::new(n, b, 0).unwrap();
        let space = enumerate_states(&g, &params, DEFAULT_STATE_CAP).unwrap();
        let ord = bandwidth_exact(&g, 12).unwrap();
        let iv = path_intervals(&g, &ord, b).unwrap();
        let cfg = PathConfig::default();
        for _ in 0..6 {
            let w = space.state(rng.gen_range(0..space.len()));
            let w2 = space.state(rng.gen_range(0..space.len()));
            let path = build_path(&g, w, w2, &params, &iv, &cfg).unwrap();
            let check = check_path(&g, &path, &params, w, w2);
            prop_assert!(check.ok(), "{:?}", check);
            prop_assert!(check.max_kappa <= params.q);
            prop_assert!(path.within_length_bound());
            prop_assert!(path.checkpoints_hold());
            prop_assert_eq!(path.states().len(), path.len() + 1);
        }
    }
}

#[test]
fn identical_endpoints_need_no_detour_beyond_the_bound() {
    let g = make_grid(3, 3).unwrap();
    let params = StateParams::new(9, 3, 0).unwrap();
    let space = enumerate_states(&g, &params, DEFAULT_STATE_CAP).unwrap();
    let ord = bandwidth_exact(&g, 12).unwrap();
    let iv = path_intervals(&g, &ord, 3).unwrap();
    for w in space.states().iter().step_by(37) {
        let path = build_path(&g, w, w, &params, &iv, &PathConfig::default()).unwrap();
        assert!(check_path(&g, &path, &params, w, w).ok());
        assert!(path.within_length_bound());
    }
}

#[test]
fn strict_mode_refuses_when_the_slack_is_missing() {
    let g = make_grid(2, 4).unwrap();
    let params = StateParams::new(8, 2, 0).unwrap();
    let space = enumerate_states(&g, &params, DEFAULT_STATE_CAP).unwrap();
    let ord = bandwidth_exact(&g, 12).unwrap();
    let iv = path_intervals(&g, &ord, 2).unwrap();
    let cfg = PathConfig { slack: Slack::Strict, ..PathConfig::default() };
    assert!(build_path(&g, space.state(0), space.state(1), &params, &iv, &cfg).is_err());
}
