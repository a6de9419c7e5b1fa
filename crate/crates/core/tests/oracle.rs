use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use qdm::elements::single_mode_squeezer;
use qdm::fock::{compare_with_gaussian, simulate_fock, FockConfig, FockState};
use qdm::{CircuitSpec, Error, GaussianState, ModulationMode, PaGain};

fn exact(spec: CircuitSpec) -> CircuitSpec {
    spec.with_mode(ModulationMode::Exact)
}

#[test]
fn mzi_engines_agree() {
    let spec = exact(CircuitSpec::mzi(1.0, 0.9).with_modulation(0.01, 0.0));
    let r = compare_with_gaussian(&spec, &FockConfig::default(), 1e-5).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.entries.len(), 2);
}

#[test]
fn degenerate_sui_engines_agree() {
    let spec = exact(CircuitSpec::degenerate_sui(1.0, 0.9, 1.25, PI, 1.25, 0.0).with_modulation(0.0, 0.01));
    let r = compare_with_gaussian(&spec, &FockConfig::with_cutoff(40), 1e-4).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn identity_circuit_agrees_to_rounding() {
    let spec = exact(CircuitSpec::mzi(1.0, 1.0));
    let r = compare_with_gaussian(&spec, &FockConfig::default(), 1e-12).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn detection_loss_and_output_splitter_agree() {
    let spec = exact(CircuitSpec::mzi(1.0, 0.8).with_modulation(0.02, 0.0))
        .with_output_splitter(0.5)
        .unwrap();
    let r = compare_with_gaussian(&spec, &FockConfig::with_cutoff(20), 1e-5).unwrap();
    assert!(r.passed, "{r:?}");

    let spec = exact(CircuitSpec::direct_homodyne(1.0).with_modulation(0.05, 0.0)).with_detection_loss(0.7);
    let r = compare_with_gaussian(&spec, &FockConfig::with_cutoff(20), 1e-6).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn nested_sui_agrees() {
    let spec = exact(CircuitSpec::nested_sui(0.8, 0.7, 1.2, 1.25).with_modulation(0.03, 0.0));
    let out = simulate_fock(&spec, &FockConfig::with_cutoff(30)).unwrap();
    assert_eq!(out[0].name, "d1_y");
    let r = compare_with_gaussian(&spec, &FockConfig::with_cutoff(30), 1e-4).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn vacuum_variance_is_one_at_every_angle() {
    let psi = FockState::vacuum(3, &FockConfig::with_cutoff(10)).unwrap();
    for k in 0..24 {
        let angle = k as f64 * PI / 12.0;
        for m in 0..3 {
            let (mean, var) = psi.quadrature_stats(m, angle).unwrap();
            assert_eq!(mean, 0.0);
            assert!((var - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn norm_is_kept_through_a_sequence() {
    let mut psi = FockState::vacuum(2, &FockConfig::with_cutoff(30)).unwrap();
    psi.displace(0, Complex64::new(0.7, 0.3)).unwrap();
    psi.two_mode_squeeze(0, 1, 1.2, 0.5).unwrap();
    psi.beam_splitter(0, 1, 0.4).unwrap();
    psi.squeeze(1, 1.1, -0.4).unwrap();
    psi.phase(0, 2.0).unwrap();
    psi.loss(0, 1, 0.5).unwrap();
    assert!((psi.norm_sqr() - 1.0).abs() < 1e-9);
    assert!(psi.tail_mass() < 1e-6);
}

fn squeezer_deviation(cutoff: usize) -> f64 {
    let g = PaGain::new(1.25, 0.0).unwrap();
    let config = FockConfig {
        cutoff,
        tail_threshold: 1e-3,
    };
    let mut psi = FockState::vacuum(1, &config).unwrap();
    psi.squeeze(0, g.gain(), g.phase()).unwrap();
    let gauss = GaussianState::vacuum(1).unwrap().apply_map(&single_mode_squeezer(&g), &[0]).unwrap();
    [0.0, FRAC_PI_2]
        .iter()
        .map(|&a| (psi.quadrature_stats(0, a).unwrap().1 - gauss.quadrature_stats(0, a).unwrap().1).abs())
        .fold(0.0, f64::max)
}

#[test]
fn deviation_shrinks_with_cutoff() {
    let devs: Vec<f64> = [16, 32, 64].iter().map(|&c| squeezer_deviation(c)).collect();
    for w in devs.windows(2) {
        assert!(w[1] <= (w[0] / 10.0).max(1e-10), "{devs:?}");
    }
    assert!(devs[2] < 1e-4);
}

#[test]
fn truncation_reports_tail_mass() {
    let mut psi = FockState::vacuum(1, &FockConfig::with_cutoff(8)).unwrap();
    match psi.displace(0, Complex64::new(1.9, 0.0)) {
        Err(Error::Truncation { tail_mass, threshold }) => {
            assert!(tail_mass > threshold);
            assert_eq!(threshold, 1e-6);
        }
        other => panic!("expected truncation error, got {other:?}"),
    }
}

#[test]
fn guards_reject_out_of_regime_requests() {
    // dimension guard
    let big = FockConfig::with_cutoff(130);
    assert!(matches!(FockState::vacuum(3, &big), Err(Error::InvalidArgument(_))));
    // gain, amplitude and modulation-mode preconditions
    let cfg = FockConfig::with_cutoff(20);
    let strong = exact(CircuitSpec::degenerate_sui(1.0, 0.9, 1.7, PI, 1.2, 0.0));
    assert!(simulate_fock(&strong, &cfg).is_err());
    let bright = exact(CircuitSpec::mzi(2.5, 0.9));
    assert!(simulate_fock(&bright, &cfg).is_err());
    let linear = CircuitSpec::mzi(1.0, 0.9);
    assert!(simulate_fock(&linear, &cfg).is_err());
}
