use gmi_core::gmi::{
    antipodal_gmi, clipper_moments, gmi_from_moments, moments_by_panels, ChannelConfig,
    DistortionModel,
};
use gmi_core::quantizer::{
    antipodal_quantizer_gmi, binary_gmi, gmi_at_snr, optimize_t, quantizer_moments, QuantizerSpec,
    TDomainSpec,
};
use gmi_core::simlab::{estimate_moments, run_nn_decoding, DecodeMode, SimChannel, SimConfig};
use gmi_core::supernyq::{sinc_pulse_gmi, PulseSpec};
use gmi_core::Error;

#[test]
fn non_finite_model_is_reported() {
    let model = DistortionModel::input_side("log", vec![], |x: f64| x.ln());
    let config = ChannelConfig::new(1.0, 1.0).unwrap();
    let err = estimate_moments(&model, &config, 4096, 0).unwrap_err();
    assert!(matches!(err, Error::Evaluation(_)), "{err:?}");
    assert!(matches!(
        moments_by_panels(&model, &config),
        Err(Error::Evaluation(_))
    ));
}

#[test]
fn panel_moments_match_closed_forms() {
    let config = ChannelConfig::new(3.0, 0.7).unwrap();
    let clip = moments_by_panels(&DistortionModel::clipper(1.2), &config).unwrap();
    let exact = clipper_moments(1.2, &config).unwrap();
    assert!((clip.corr - exact.corr).abs() < 1e-12);
    assert!((clip.power - exact.power).abs() < 1e-12);

    let (ts, _) = optimize_t(3, 1e-10).unwrap();
    let ts = TDomainSpec::new(ts.interior().to_vec(), config.total_energy()).unwrap();
    let spec = QuantizerSpec::from_t(&ts, vec![0.5, 1.5, 2.5]).unwrap();
    let q = moments_by_panels(&DistortionModel::quantizer(&spec), &config).unwrap();
    let exact = quantizer_moments(&spec, &config).unwrap();
    assert!((q.corr - exact.corr).abs() < 1e-12);
    assert!((q.power - exact.power).abs() < 1e-12);
}

#[test]
fn optimal_quantizer_gmi_grows_with_levels() {
    let config = ChannelConfig::from_snr(10.0).unwrap();
    let mut prev = binary_gmi(&config).gmi_nats;
    for m in 2..=6 {
        let (_, k) = optimize_t(m, 1e-10).unwrap();
        let g = gmi_at_snr(&k, &config).unwrap().gmi_nats;
        assert!(g > prev, "M={m}: {g} after {prev}");
        prev = g;
    }
    // and stays below the undistorted capacity
    assert!(prev < 0.5 * 11f64.ln());
}

#[test]
fn antipodal_inputs_beat_gaussian_ensemble_for_binary_output() {
    for snr in [0.1, 1.0, 10.0] {
        let config = ChannelConfig::from_snr(snr).unwrap();
        let gauss = binary_gmi(&config).gmi_nats;
        let anti = antipodal_quantizer_gmi(&QuantizerSpec::binary(), &config).gmi_nats;
        let (via_metric, _) = antipodal_gmi(&DistortionModel::hard_limiter(), &config).unwrap();
        assert!((anti - via_metric).abs() < 1e-9, "{anti} vs {via_metric}");
        assert!(anti > gauss);
    }
}

#[test]
fn sinc_factor_one_is_nyquist_binary() {
    for snr in [0.01, 1.0, 100.0] {
        // E_s/(σ²/2) is the per-sample SNR, which is what the Nyquist model
        // calls SNR once its noise variance is the sample variance σ²/2
        let sn = sinc_pulse_gmi(1, snr).unwrap().gmi_nats;
        let ny = binary_gmi(&ChannelConfig::new(snr, 1.0).unwrap()).gmi_nats;
        assert!((sn - ny).abs() < 1e-12, "{snr}: {sn} vs {ny}");
    }
}

#[test]
fn decoding_far_above_gmi_fails() {
    let config = ChannelConfig::from_snr(1.0).unwrap();
    let channel = SimChannel::Memoryless {
        model: DistortionModel::hard_limiter(),
        config,
    };
    let gmi = channel.gmi().unwrap().gmi_nats;
    let r = run_nn_decoding(&SimConfig {
        n: 256,
        rate_nats: 2.0 * gmi,
        trials: 200,
        seed: 5,
        channel,
        scaling: None,
        mode: DecodeMode::Conditional,
    })
    .unwrap();
    assert!(r.error_rate > 0.9, "{r:?}");
}

#[test]
fn supernyq_decoding_below_gmi() {
    let channel = SimChannel::supernyq(PulseSpec::sinc(2).unwrap(), 1.0, 4.0);
    let gmi = channel.gmi().unwrap().gmi_nats;
    let r = run_nn_decoding(&SimConfig {
        n: 256,
        rate_nats: 0.6 * gmi,
        trials: 100,
        seed: 2,
        channel,
        scaling: None,
        mode: DecodeMode::Auto,
    })
    .unwrap();
    assert!(r.error_rate < 0.1, "{r:?}");
}
