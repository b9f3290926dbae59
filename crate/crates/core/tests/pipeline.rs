use cascade::irs::{IrsEvaluator, IrsModel, MetricMethod, ModulationSpec};
use cascade::nakagami::NakagamiParams;
use cascade::simkit::{mc_aser, mc_outage, mc_ser_bpsk_symbols, McConfig};

fn unit(m: f64) -> NakagamiParams {
    NakagamiParams::from_mean_power(m, 1.0).unwrap()
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

#[test]
fn outage_matches_simulation_across_snr() {
    let model = IrsModel::new(3, 1, unit(2.0), unit(1.0), None).unwrap();
    let ev = IrsEvaluator::with_defaults(&model).unwrap();
    let gth = db(5.0);
    for (k, r) in [-5.0, 0.0, 5.0, 10.0].into_iter().enumerate() {
        let exact = ev.outage(gth, db(r), MetricMethod::ExactNumeric).unwrap();
        let mc = mc_outage(&model, gth, db(r), &McConfig::new(3, 400_000, 10).unwrap().at_point(k as u32)).unwrap();
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_error.max(1e-9), "{r} dB: {exact} vs {mc:?}");
    }
}

#[test]
fn direct_link_outage_matches_simulation() {
    let model = IrsModel::new(2, 2, unit(2.0), unit(1.0), Some(unit(1.5))).unwrap();
    let ev = IrsEvaluator::with_defaults(&model).unwrap();
    let gth = db(5.0);
    let exact = ev.outage(gth, db(0.0), MetricMethod::ExactNumeric).unwrap();
    let mc = mc_outage(&model, gth, db(0.0), &McConfig::new(9, 400_000, 10).unwrap()).unwrap();
    assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_error, "{exact} vs {mc:?}");
}

#[test]
fn aser_matches_semi_analytic_and_symbol_simulation() {
    let model = IrsModel::new(2, 1, unit(2.0), unit(1.0), None).unwrap();
    let ev = IrsEvaluator::with_defaults(&model).unwrap();
    let bpsk = ModulationSpec::bpsk();
    let rho = db(0.0);
    let exact = ev.aser(&bpsk, rho, MetricMethod::ExactNumeric).unwrap();
    let cfg = McConfig::new(5, 200_000, 10).unwrap();
    let semi = mc_aser(&model, &bpsk, rho, &cfg).unwrap();
    let sym = mc_ser_bpsk_symbols(&model, rho, &cfg.at_point(1)).unwrap();
    assert!((semi.estimate - exact).abs() <= 4.0 * semi.std_error, "{exact} vs {semi:?}");
    assert!((sym.estimate - exact).abs() <= 4.0 * sym.std_error, "{exact} vs {sym:?}");
}

#[test]
fn bound_dominates_exact_at_high_snr() {
    let model = IrsModel::new(2, 1, unit(2.0), unit(1.0), None).unwrap();
    let ev = IrsEvaluator::with_defaults(&model).unwrap();
    let qpsk = ModulationSpec::qpsk();
    for r in [20.0, 30.0, 40.0] {
        let op_u = ev.outage(db(5.0), db(r), MetricMethod::UpperBound).unwrap();
        let op_x = ev.outage(db(5.0), db(r), MetricMethod::ExactNumeric).unwrap();
        assert!(op_u >= op_x, "{r} dB");
        let se_u = ev.aser(&qpsk, db(r), MetricMethod::UpperBound).unwrap();
        let se_x = ev.aser(&qpsk, db(r), MetricMethod::ExactNumeric).unwrap();
        assert!(se_u >= se_x, "{r} dB");
    }
}
