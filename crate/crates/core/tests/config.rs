use gevrey_nls::experiments::config::{ExperimentConfig, ExperimentKind, MethodKind};
use gevrey_nls::experiments::profiles::DataProfile;
use gevrey_nls::Error;
use proptest::prelude::*;

#[test]
fn canonical_form_is_a_fixed_point() {
    let text = "\
# radius decay on a random analytic profile
experiment = radius_decay
data_profile = random_gevrey(0.4, 17)
method = picard
T = 2.5
sigma_list = [0.001, 0.01]
";
    let cfg = ExperimentConfig::parse(text).unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::RadiusDecay);
    assert_eq!(cfg.method, MethodKind::Picard);
    assert_eq!(cfg.data_profile, DataProfile::RandomGevrey { sigma: 0.4, seed: 17 });
    let canonical = cfg.to_canonical();
    let again = ExperimentConfig::parse(&canonical).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_canonical(), canonical);
}

#[test]
fn validation_runs_at_load() {
    let unknown = ExperimentConfig::parse("experiment = radius_decay\nsigma = 0.1\n");
    assert!(matches!(unknown, Err(Error::UnknownKey(k)) if k == "sigma"));
    let narrow = ExperimentConfig::parse("experiment = conservation\nsigma_list = 1e-3, 2e-3, 5e-3\n");
    assert!(matches!(narrow, Err(Error::Config { .. })));
    let arity = ExperimentConfig::parse("experiment = estimate_suite\np = 3\nconj_pattern = 0, 1\n");
    assert!(matches!(arity, Err(Error::ArityMismatch { expected: 3, got: 2, .. })));
}

proptest! {
    #[test]
    fn roundtrip_preserves_values(
        n_exp in 4u32..11,
        box_len in 1.0f64..200.0,
        p in prop::sample::select(vec![3u32, 5, 7]),
        dt in 1e-6f64..1e-1,
        seed in any::<u64>(),
        sigma0 in 0.0f64..0.05,
    ) {
        let cfg = ExperimentConfig {
            n: 1 << n_exp,
            box_len,
            p,
            dt,
            seed,
            sigma0,
            ..ExperimentConfig::default()
        };
        let back = ExperimentConfig::parse(&cfg.to_canonical()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
