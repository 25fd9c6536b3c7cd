//! Temporary pilot harness (removed before release).

use voldecomp_core::decomposer::{deviation_metrics, ga_optimize, GaConfig};
use voldecomp_core::generators::{gen_noise, NoiseKind};
use voldecomp_core::series::demean;

#[test]
#[ignore]
fn pilot_paper_scale_gaussian() {
    let start = std::time::Instant::now();
    let series = gen_noise(NoiseKind::Gaussian, 12000, 555).unwrap();
    let r = demean(&series).unwrap();
    let cfg = GaConfig {
        seed: 99,
        ..GaConfig::default()
    };
    let out = ga_optimize(&r, &cfg).unwrap();
    println!(
        "paper-scale gaussian: delta_w = {:.4}, dln = {:?}, cost {:.4} -> {:.4}, gens = {}, elapsed = {:.1?}",
        out.report.delta_w,
        out.report.delta_dln_sigma,
        out.history[0],
        out.history.last().unwrap(),
        out.history.len() - 1,
        start.elapsed()
    );
}

#[test]
#[ignore]
fn pilot_desk_scale() {
    let step: f64 = std::env::var("PILOT_STEP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.05);
    let seed: u64 = std::env::var("PILOT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1234);
    for kind in [NoiseKind::Gaussian, NoiseKind::Rectangular, NoiseKind::Triangular] {
        let start = std::time::Instant::now();
        let series = gen_noise(kind, 4000, seed).unwrap();
        let r = demean(&series).unwrap();
        let cfg = GaConfig {
            population: 100,
            generations: 100,
            seed: 77,
            mutation_step: step,
            ..GaConfig::default()
        };
        let out = ga_optimize(&r, &cfg).unwrap();
        let truth_delta = {
            // Deviation of the raw standardized samples (sigma = 1 truth).
            use voldecomp_core::decomposer::Decomposition;
            let d = Decomposition::from_parts(vec![1.0; 4000], r.values().to_vec(), 0.0).unwrap();
            deviation_metrics(&d).unwrap().delta_w
        };
        println!(
            "{:?}: raw dW dev = {:.4}, GA delta_w = {:.4}, dln = {:?}, cost0 = {:.4}, cost_end = {:.4}, gens = {}, elapsed = {:.1?}",
            kind,
            truth_delta,
            out.report.delta_w,
            out.report.delta_dln_sigma,
            out.history[0],
            out.history.last().unwrap(),
            out.history.len() - 1,
            start.elapsed()
        );
    }
}
