//! Property tests for the similarity kernel.

mod common;

use proptest::prelude::*;

use simdeg_core::{pair_similarity, spectrum, SimilarityConfig, WindowView};

fn window_strategy(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every index lies in (0, 1] for live windows, the identity pair is
    /// exactly all ones, and swapping the arguments changes nothing.
    #[test]
    fn indices_range_identity_symmetry(
        (a, b) in (60usize..=120).prop_flat_map(|len| {
            (window_strategy(len..=len), window_strategy(len..=len))
        }),
    ) {
        prop_assume!(a.iter().any(|&x| x != a[0]));
        prop_assume!(b.iter().any(|&x| x != b[0]));
        let cfg = SimilarityConfig::default();
        let wa = WindowView::new(&a, 60.0, "a").unwrap();
        let wb = WindowView::new(&b, 60.0, "b").unwrap();

        let pair = pair_similarity(&wa, &wb, &cfg).unwrap();
        for v in [
            pair.dynamic_change,
            pair.freq_magnitude,
            pair.freq_phase,
            pair.similarity_degree,
        ] {
            prop_assert!(v > 0.0 && v <= 1.0, "index {v} out of (0, 1]");
        }

        let identity = pair_similarity(&wa, &wa, &cfg).unwrap();
        prop_assert_eq!(identity.dynamic_change, 1.0);
        prop_assert_eq!(identity.freq_magnitude, 1.0);
        prop_assert_eq!(identity.freq_phase, 1.0);
        prop_assert!((identity.similarity_degree - 1.0).abs() < 1e-12);

        let swapped = pair_similarity(&wb, &wa, &cfg).unwrap();
        prop_assert!((pair.dynamic_change - swapped.dynamic_change).abs() < 1e-12);
        prop_assert!((pair.freq_magnitude - swapped.freq_magnitude).abs() < 1e-12);
        prop_assert!((pair.freq_phase - swapped.freq_phase).abs() < 1e-12);
        prop_assert!((pair.similarity_degree - swapped.similarity_degree).abs() < 1e-12);
    }

    /// The FFT path agrees with the O(L^2) oracle for any length up to
    /// 256.
    #[test]
    fn spectrum_matches_naive_dft(samples in window_strategy(2..=256)) {
        let w = WindowView::new(&samples, 60.0, "w").unwrap();
        let got = spectrum(&w);
        let want = common::naive_dft(&samples);
        prop_assert_eq!(got.magnitude.len(), want.len());
        for (k, &(mag, phase)) in want.iter().enumerate() {
            prop_assert!((got.magnitude[k] - mag).abs() < 1e-9);
            let dphi = common::oracle_wrap(got.phase[k] - phase).abs();
            prop_assert!(dphi < 1e-9, "bin {} phase off by {}", k, dphi);
        }
    }

    /// Scaling one window by c > 1 leaves the phase index untouched while
    /// strictly lowering the dispersion and magnitude indices.
    #[test]
    fn scaling_lowers_dynamic_and_magnitude(base in window_strategy(80..=80), scale in 1.5f64..20.0) {
        // Guard against degenerate all-equal draws.
        prop_assume!(base.iter().any(|&x| x != base[0]));
        let scaled: Vec<f64> = base.iter().map(|&x| scale * x).collect();
        let cfg = SimilarityConfig::default();
        let wa = WindowView::new(&base, 60.0, "a").unwrap();
        let wb = WindowView::new(&scaled, 60.0, "b").unwrap();
        let pair = pair_similarity(&wa, &wb, &cfg).unwrap();
        prop_assert!((pair.dynamic_change - (1.0 - scale).exp()).abs() < 1e-12);
        let want_fms = 1.0 - (20.0 * scale.log10() / cfg.lambda).tanh();
        prop_assert!((pair.freq_magnitude - want_fms).abs() < 1e-12);
        prop_assert!((pair.freq_phase - 1.0).abs() < 1e-12);
    }
}
