//! Genetic search over per-step log-volatility chromosomes.
//!
//! Each generation: a fraction of the population is paired off for
//! single-point crossover, every chromosome spawns a mutated copy (sites
//! chosen at the per-site mutation rate, Gaussian steps in log volatility),
//! the pool of originals plus offspring is evaluated, and the best
//! `population` chromosomes survive. Originals are never modified in place,
//! so the best cost is non-increasing.
//!
//! Determinism contract: the randomness of offspring `j` of generation `g`
//! comes from a stream derived from `(seed, domain, g, j)`, and ties in
//! selection break toward the lower pool index. Results are therefore
//! identical for any evaluation order and worker count.

use super::{CostEvaluator, CostScratch, Decomposition, DeviationReport, GaConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_rng, domain};
use crate::series::ReturnSeries;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;

/// Result of a GA run: the best decomposition, its deviation report, and the
/// best cost per generation (index 0 is the initial population).
#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub decomposition: Decomposition,
    pub report: DeviationReport,
    pub history: Vec<f64>,
}

struct Chromosome {
    genes: Vec<f64>,
    cost: f64,
}

fn clamp_genes(genes: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((g, &l), &h) in genes.iter_mut().zip(lo).zip(hi) {
        *g = g.clamp(l, h);
    }
}

/// Run the genetic search on demeaned returns.
pub fn ga_optimize(returns: &ReturnSeries, config: &GaConfig) -> Result<GaOutcome> {
    config.validate()?;
    if !returns.mean_removed() {
        return Err(Error::NotDemeaned);
    }
    let r = returns.values();
    if r.len() < 2 * config.window {
        return Err(Error::TooShort {
            required: 2 * config.window,
            actual: r.len(),
        });
    }
    let rms = (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    if !(rms > 0.0) {
        return Err(Error::ZeroDispersion { context: "returns" });
    }
    let sigma_floor = config.sigma_floor_factor * rms;
    let (seed_genes, _floored) = super::seed_log_volatility(returns, config.window, sigma_floor)?;

    let n = r.len();
    let lo: Vec<f64> = seed_genes.iter().map(|g| g - config.clamp_half_width).collect();
    let hi: Vec<f64> = seed_genes.iter().map(|g| g + config.clamp_half_width).collect();

    let evaluator = CostEvaluator::new(r, config.cost_c, config.grid);
    let eval_all = |members: Vec<Vec<f64>>| -> Vec<Chromosome> {
        members
            .into_par_iter()
            .map_init(
                || CostScratch::new(n, config.grid.bins),
                |scratch, genes| {
                    let cost = evaluator.cost(&genes, scratch);
                    Chromosome { genes, cost }
                },
            )
            .collect()
    };

    // Chromosome 0 is the moving-window seed; the rest perturb it gene-wise.
    let mut initial: Vec<Vec<f64>> = Vec::with_capacity(config.population);
    initial.push(seed_genes.clone());
    for i in 1..config.population {
        let mut rng = derive_rng(config.seed, &[domain::GA_INIT, i as u64]);
        let normal = Normal::new(0.0, config.init_spread).expect("valid spread");
        let mut genes: Vec<f64> = seed_genes
            .iter()
            .map(|g| g + normal.sample(&mut rng))
            .collect();
        clamp_genes(&mut genes, &lo, &hi);
        initial.push(genes);
    }
    let mut population = eval_all(initial);
    sort_pool(&mut population);
    population.truncate(config.population);

    let mut history = vec![population[0].cost];

    let n_pairs = ((config.crossover_fraction * config.population as f64) / 2.0).round() as usize;
    let mutation_normal = Normal::new(0.0, config.mutation_step).expect("valid step");

    for generation in 0..config.generations {
        let mut offspring: Vec<Vec<f64>> = Vec::with_capacity(2 * n_pairs + config.population);

        for pair in 0..n_pairs {
            let mut rng = derive_rng(
                config.seed,
                &[domain::GA_CROSSOVER, generation as u64, pair as u64],
            );
            let a = rng.random_range(0..population.len());
            let mut b = rng.random_range(0..population.len() - 1);
            if b >= a {
                b += 1;
            }
            let cp = rng.random_range(1..n);
            let (pa, pb) = (&population[a].genes, &population[b].genes);
            let mut child_a = Vec::with_capacity(n);
            child_a.extend_from_slice(&pa[..cp]);
            child_a.extend_from_slice(&pb[cp..]);
            let mut child_b = Vec::with_capacity(n);
            child_b.extend_from_slice(&pb[..cp]);
            child_b.extend_from_slice(&pa[cp..]);
            offspring.push(child_a);
            offspring.push(child_b);
        }

        if config.mutation_rate > 0.0 {
            let binomial = Binomial::new(n as u64, config.mutation_rate)
                .map_err(|e| Error::invalid("mutation_rate", e.to_string()))?;
            for (i, parent) in population.iter().enumerate() {
                let mut rng = derive_rng(
                    config.seed,
                    &[domain::GA_MUTATION, generation as u64, i as u64],
                );
                let sites = binomial.sample(&mut rng) as usize;
                if sites == 0 {
                    continue;
                }
                let mut genes = parent.genes.clone();
                for idx in rand::seq::index::sample(&mut rng, n, sites.min(n)) {
                    genes[idx] = (genes[idx] + mutation_normal.sample(&mut rng))
                        .clamp(lo[idx], hi[idx]);
                }
                offspring.push(genes);
            }
        }

        let evaluated = eval_all(offspring);
        population.extend(evaluated);
        sort_pool(&mut population);
        population.truncate(config.population);
        history.push(population[0].cost);

        // Plateau stop: negligible improvement over a trailing window.
        if history.len() > config.plateau_generations {
            let before = history[history.len() - 1 - config.plateau_generations];
            let now = *history.last().unwrap();
            if before - now < config.plateau_tolerance {
                break;
            }
        }
    }

    let best = &population[0];
    if !best.cost.is_finite() {
        return Err(Error::Numerical(
            "no finite-cost chromosome survived the search".into(),
        ));
    }
    let decomposition = Decomposition::from_log_sigma(&best.genes, r, returns.mu())?;
    let mut report =
        super::deviation_metrics_with(&decomposition, config.grid, config.significance)?;
    report.final_cost = Some(best.cost);

    Ok(GaOutcome {
        decomposition,
        report,
        history,
    })
}

/// Sort by cost ascending; ties break toward the lower pool index, which a
/// stable sort on the pre-ordered pool provides.
fn sort_pool(pool: &mut [Chromosome]) {
    pool.sort_by(|a, b| a.cost.total_cmp(&b.cost));
}
