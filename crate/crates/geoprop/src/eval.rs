//! Accuracy and coverage quantification: leave-many-out cross-validation
//! of the solver, empirical discrepancy CDFs, coverage-vs-threshold
//! curves, and mean-error characteristic curves. All medians follow the
//! lower-middle convention used everywhere in this crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geodesy::{distance_m, GeoPoint};
use crate::graph::{GroundTruthLabels, SocialGraph};
use crate::propagation::{solve, SolverConfig};
use crate::robust::lower_median;
use crate::{Error, Result};

/// A predicted location paired with its reference annotation.
/// `discrepancy_km` is always the geodesic distance between the two;
/// `dispersion_km` is the prediction's uncertainty (MAD of the
/// contributing locations).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRecord {
    pub id: String,
    pub predicted: GeoPoint,
    pub reference: GeoPoint,
    pub discrepancy_km: f64,
    pub dispersion_km: f64,
}

impl DiscrepancyRecord {
    pub fn new(
        id: impl Into<String>,
        predicted: GeoPoint,
        reference: GeoPoint,
        dispersion_km: f64,
    ) -> Self {
        DiscrepancyRecord {
            id: id.into(),
            predicted,
            reference,
            discrepancy_km: distance_m(predicted, reference) / 1000.0,
            dispersion_km,
        }
    }
}

/// One point of a coverage/accuracy curve: records with dispersion at most
/// `threshold_km`, their share of the total, and their discrepancy
/// statistics (absent when nothing is retained).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub threshold_km: f64,
    pub coverage_fraction: f64,
    pub median_km: Option<f64>,
    pub mean_km: Option<f64>,
    pub n: usize,
}

/// Cross-validation result. The error statistics cover held-out users that
/// received an estimate; `located_fraction` reports how many did, so both
/// the located-only and the all-holdout readings can be derived.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSummary {
    pub holdout_size: usize,
    pub located_count: usize,
    pub located_fraction: f64,
    pub median_km: Option<f64>,
    pub mean_km: Option<f64>,
    pub stddev_km: Option<f64>,
}

/// Hides a seeded uniform sample of the labeled users (those present in
/// the graph), re-runs the solver without them, and measures the
/// discrepancy between inferred and true locations. Identical seeds give
/// identical summaries.
pub fn cross_validate(
    graph: &SocialGraph,
    labels: &GroundTruthLabels,
    config: &SolverConfig,
    holdout_fraction: f64,
    seed: u64,
) -> Result<CvSummary> {
    config.validate()?;
    if !holdout_fraction.is_finite() || holdout_fraction >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "holdout_fraction must be in (0, 1), got {holdout_fraction}"
        )));
    }
    let labeled_in_graph: Vec<&String> = labels
        .iter()
        .filter(|(user, _)| graph.contains_user(user))
        .map(|(user, _)| user)
        .collect();
    let holdout_size = (holdout_fraction * labeled_in_graph.len() as f64).floor() as usize;
    if holdout_fraction <= 0.0 || holdout_size == 0 {
        return Err(Error::InsufficientLabels);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, labeled_in_graph.len(), holdout_size);
    let held_out: Vec<String> = chosen.iter().map(|i| labeled_in_graph[i].clone()).collect();

    let mut training = labels.clone();
    for user in &held_out {
        training.remove(user);
    }
    let (estimates, _) = solve(graph, &training, config)?;

    let mut discrepancies: Vec<f64> = Vec::new();
    for user in &held_out {
        if let Some(est) = estimates.get(user) {
            let truth = labels.get(user).expect("held-out users are labeled");
            discrepancies.push(distance_m(est.location, truth.location) / 1000.0);
        }
    }
    let located_count = discrepancies.len();
    let located_fraction = located_count as f64 / holdout_size as f64;
    let (median_km, mean_km, stddev_km) = if discrepancies.is_empty() {
        (None, None, None)
    } else {
        let mean = discrepancies.iter().sum::<f64>() / located_count as f64;
        let variance = discrepancies
            .iter()
            .map(|d| (d - mean).powi(2))
            .sum::<f64>()
            / located_count as f64;
        let median = lower_median(&mut discrepancies);
        (Some(median), Some(mean), Some(variance.sqrt()))
    };
    Ok(CvSummary {
        holdout_size,
        located_count,
        located_fraction,
        median_km,
        mean_km,
        stddev_km,
    })
}

/// Empirical CDF of the discrepancies, evaluated at each grid threshold:
/// (threshold, fraction of records with discrepancy ≤ threshold).
pub fn discrepancy_cdf(records: &[DiscrepancyRecord], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = records.len() as f64;
    Ok(grid
        .iter()
        .map(|&threshold| {
            let below = records
                .iter()
                .filter(|r| r.discrepancy_km <= threshold)
                .count();
            (threshold, below as f64 / total)
        })
        .collect())
}

/// Coverage and accuracy as a function of the allowed dispersion: for each
/// threshold, restrict to records with dispersion ≤ threshold and report
/// their share and discrepancy statistics.
pub fn coverage_curve(
    records: &[DiscrepancyRecord],
    thresholds: &[f64],
) -> Result<Vec<CurvePoint>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = records.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&threshold_km| {
            let mut retained: Vec<f64> = records
                .iter()
                .filter(|r| r.dispersion_km <= threshold_km)
                .map(|r| r.discrepancy_km)
                .collect();
            let n = retained.len();
            let (median_km, mean_km) = if n == 0 {
                (None, None)
            } else {
                let mean = retained.iter().sum::<f64>() / n as f64;
                (Some(lower_median(&mut retained)), Some(mean))
            };
            CurvePoint {
                threshold_km,
                coverage_fraction: n as f64 / total,
                median_km,
                mean_km,
                n,
            }
        })
        .collect())
}

/// Mean-error characteristic curve: sweeping the dispersion ceiling over
/// every distinct observed dispersion, emits (mean discrepancy of retained
/// records, fraction retained). The final point covers everything.
pub fn error_characteristic(records: &[DiscrepancyRecord]) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut thresholds: Vec<f64> = records.iter().map(|r| r.dispersion_km).collect();
    thresholds.sort_unstable_by(f64::total_cmp);
    thresholds.dedup();
    let total = records.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let retained: Vec<f64> = records
                .iter()
                .filter(|r| r.dispersion_km <= t)
                .map(|r| r.discrepancy_km)
                .collect();
            let mean = retained.iter().sum::<f64>() / retained.len() as f64;
            (mean, retained.len() as f64 / total)
        })
        .collect())
}

/// The default sweep for coverage curves: 50 log-spaced thresholds from
/// 1 km to 20,000 km.
pub fn default_threshold_grid() -> Vec<f64> {
    let lo = 1.0_f64.log10();
    let hi = 20_000.0_f64.log10();
    (0..50)
        .map(|i| 10.0_f64.powf(lo + (hi - lo) * i as f64 / 49.0))
        .collect()
}
