//! Property tests for the orbit samplers: chamber projections are always
//! weakly descending and nonnegative, transforms stay inside the unit disk
//! up to noise, and everything is reproducible from its seed.

use flatsym::haarmc::{empirical_transform, sample_orbit_sum, CalibrationScale, McSpace};
use flatsym::spaces::classify_point;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chamber_rows_are_descending_and_nonnegative(
        x1 in 0.2f64..3.0,
        frac in 0.0f64..1.0,
        q in 2u32..5,
        seed in 0u64..1000,
    ) {
        let x2 = x1 * frac;
        let factor = classify_point(&[x1, x2]).unwrap();
        let set = sample_orbit_sum(
            McSpace::Aiii { p: 2, q },
            &[factor.clone(), factor],
            50,
            seed,
        )
        .unwrap();
        for i in 0..set.len() {
            let row = set.chamber_row(i);
            prop_assert!(row[0] >= row[1] && row[1] >= 0.0, "row {row:?}");
        }
    }

    #[test]
    fn transform_modulus_bounded(lam1 in 0.1f64..6.0, seed in 0u64..50) {
        let t = classify_point(&[1.0]).unwrap();
        let set = sample_orbit_sum(McSpace::RankOneAi, &[t.clone(), t], 10_000, seed).unwrap();
        let est = empirical_transform(&set, CalibrationScale::identity(), &[lam1]).unwrap();
        let modulus = (est.re * est.re + est.im * est.im).sqrt();
        prop_assert!(modulus <= 1.0 + 5.0 * est.stderr.max(1e-4));
    }
}
