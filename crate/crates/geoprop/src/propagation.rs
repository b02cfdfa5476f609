//! Location inference over the social graph: parallel coordinate descent
//! on dispersion-constrained graph total variation.
//!
//! Each iteration is a Jacobi sweep. Every unlabeled user with at least
//! one located neighbor recomputes the weighted geodesic median of the
//! neighbor locations *from the previous iteration*; the update is applied
//! only when the neighbors' MAD dispersion about that median stays within
//! γ, otherwise the user keeps its previous estimate (or none). Labeled
//! users are pinned to their ground truth in every iteration. Because all
//! reads go to the previous iteration's state and updates land in disjoint
//! slots, results are identical for any worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::geodesy::{distance_km, GeoPoint};
use crate::graph::{GroundTruthLabels, SocialGraph};
use crate::robust::{l1_median, mad_dispersion, WeightedPointSet};
use crate::{Error, Result};

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    GroundTruth,
    Inferred,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::GroundTruth => "GROUND_TRUTH",
            Provenance::Inferred => "INFERRED",
        }
    }

    pub fn parse(s: &str) -> Option<Provenance> {
        match s {
            "GROUND_TRUTH" => Some(Provenance::GroundTruth),
            "INFERRED" => Some(Provenance::Inferred),
            _ => None,
        }
    }
}

/// A located user. Ground-truth estimates carry dispersion 0 and iteration
/// 0 and never change; inferred estimates record the neighbor dispersion
/// and iteration of their last successful update.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationEstimate {
    pub location: GeoPoint,
    pub provenance: Provenance,
    pub neighbor_dispersion_km: f64,
    pub iteration_assigned: u32,
}

/// Solver parameters. `gamma_km` is the dispersion gate: an update is
/// applied only when the located neighbors' MAD about their median is at
/// most this many kilometers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gamma_km: f64,
    pub max_iterations: u32,
    /// An estimate "moved" in an iteration when it changed by more than
    /// this many kilometers (first assignments always count as moves).
    pub movement_epsilon_km: f64,
    /// Early stop: terminate when the moved fraction of on-graph estimates
    /// falls below this value. Zero disables the early stop.
    pub min_moved_fraction: f64,
    /// Run tangent-plane refinement inside each median computation.
    pub refine_median: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gamma_km: 100.0,
            max_iterations: 5,
            movement_epsilon_km: 1.0,
            min_moved_fraction: 0.001,
            refine_median: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_km.is_finite() && self.gamma_km > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma_km must be positive, got {}",
                self.gamma_km
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be ≥ 1".into()));
        }
        if !(self.movement_epsilon_km.is_finite() && self.movement_epsilon_km >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "movement_epsilon_km must be non-negative, got {}",
                self.movement_epsilon_km
            )));
        }
        if !(0.0..=1.0).contains(&self.min_moved_fraction) {
            return Err(Error::InvalidConfig(format!(
                "min_moved_fraction must be in [0, 1], got {}",
                self.min_moved_fraction
            )));
        }
        Ok(())
    }
}

/// Per-iteration solver measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: u32,
    /// Users holding an estimate after this iteration (including labels
    /// carried through for users absent from the graph).
    pub located_count: usize,
    /// Estimates that moved more than the movement epsilon, plus first
    /// assignments.
    pub moved_count: usize,
    /// Total distance moved by previously-located estimates, km.
    pub moved_distance_km: f64,
    /// Graph total variation Σ w·d over edges with both endpoints located,
    /// km.
    pub objective_km: f64,
}

/// What the solver did, iteration by iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverReport {
    pub iterations: Vec<IterationStats>,
}

impl SolverReport {
    pub fn iterations_run(&self) -> u32 {
        self.iterations.len() as u32
    }
}

fn ground_truth_estimate(location: GeoPoint) -> LocationEstimate {
    LocationEstimate {
        location,
        provenance: Provenance::GroundTruth,
        neighbor_dispersion_km: 0.0,
        iteration_assigned: 0,
    }
}

/// Runs the solver. Labeled users absent from the graph are carried
/// through to the output unchanged.
pub fn solve(
    graph: &SocialGraph,
    labels: &GroundTruthLabels,
    config: &SolverConfig,
) -> Result<(BTreeMap<String, LocationEstimate>, SolverReport)> {
    config.validate()?;
    if graph.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = graph.vertex_count();

    let mut pinned: Vec<Option<GeoPoint>> = vec![None; n];
    let mut carried_through = 0usize;
    for (user, label) in labels.iter() {
        match graph.user_index(user) {
            Some(i) => pinned[i] = Some(label.location),
            None => carried_through += 1,
        }
    }

    let mut current: Vec<Option<LocationEstimate>> = pinned
        .iter()
        .map(|slot| slot.map(ground_truth_estimate))
        .collect();

    let mut report = SolverReport::default();
    for iteration in 1..=config.max_iterations {
        let next: Vec<Option<LocationEstimate>> = (0..n)
            .into_par_iter()
            .map(|i| {
                if let Some(location) = pinned[i] {
                    return Some(ground_truth_estimate(location));
                }
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for &(j, w) in graph.neighbors(i) {
                    if let Some(est) = &current[j] {
                        points.push(est.location);
                        weights.push(w as f64);
                    }
                }
                if points.is_empty() {
                    // no located neighbor yet; may activate later
                    return current[i].clone();
                }
                let neighborhood =
                    WeightedPointSet::weighted(points, weights).expect("weights are positive");
                let center = l1_median(&neighborhood, config.refine_median)
                    .expect("neighborhood is non-empty");
                let dispersion =
                    mad_dispersion(&neighborhood, center).expect("neighborhood is non-empty");
                if dispersion <= config.gamma_km {
                    Some(LocationEstimate {
                        location: center,
                        provenance: Provenance::Inferred,
                        neighbor_dispersion_km: dispersion,
                        iteration_assigned: iteration,
                    })
                } else {
                    // dispersion gate failed: no update on this user
                    current[i].clone()
                }
            })
            .collect();

        let mut moved_count = 0usize;
        let mut moved_distance_km = 0.0;
        let mut located_on_graph = 0usize;
        for i in 0..n {
            match (&current[i], &next[i]) {
                (Some(prev), Some(new)) => {
                    let d = distance_km(prev.location, new.location);
                    if d > config.movement_epsilon_km {
                        moved_count += 1;
                        moved_distance_km += d;
                    }
                }
                (None, Some(_)) => moved_count += 1,
                _ => {}
            }
            if next[i].is_some() {
                located_on_graph += 1;
            }
        }
        current = next;
        let objective_km = objective_over_slots(graph, &current);
        report.iterations.push(IterationStats {
            iteration,
            located_count: located_on_graph + carried_through,
            moved_count,
            moved_distance_km,
            objective_km,
        });

        let moved_fraction = if located_on_graph > 0 {
            moved_count as f64 / located_on_graph as f64
        } else {
            0.0
        };
        if moved_fraction < config.min_moved_fraction {
            break;
        }
    }

    let mut estimates = BTreeMap::new();
    for (i, slot) in current.into_iter().enumerate() {
        if let Some(est) = slot {
            estimates.insert(graph.user(i).to_string(), est);
        }
    }
    for (user, label) in labels.iter() {
        if !graph.contains_user(user) {
            estimates.insert(user.clone(), ground_truth_estimate(label.location));
        }
    }
    Ok((estimates, report))
}

fn objective_over_slots(graph: &SocialGraph, slots: &[Option<LocationEstimate>]) -> f64 {
    graph
        .edges()
        .iter()
        .filter_map(|&(i, j, w)| match (&slots[i], &slots[j]) {
            (Some(a), Some(b)) => Some(w as f64 * distance_km(a.location, b.location)),
            _ => None,
        })
        .sum()
}

/// Graph total variation of an estimate map in kilometers: Σ w_ij ·
/// d(f_i, f_j) over edges with both endpoints located, each unordered edge
/// counted once.
pub fn objective(graph: &SocialGraph, estimates: &BTreeMap<String, LocationEstimate>) -> f64 {
    objective_with_counts(graph, estimates).0
}

/// As [`objective`], also returning how many edges contributed and how
/// many were skipped for lack of a located endpoint.
pub fn objective_with_counts(
    graph: &SocialGraph,
    estimates: &BTreeMap<String, LocationEstimate>,
) -> (f64, usize, usize) {
    let mut total = 0.0;
    let mut counted = 0;
    let mut skipped = 0;
    for &(i, j, w) in graph.edges() {
        match (estimates.get(graph.user(i)), estimates.get(graph.user(j))) {
            (Some(a), Some(b)) => {
                total += w as f64 * distance_km(a.location, b.location);
                counted += 1;
            }
            _ => skipped += 1,
        }
    }
    (total, counted, skipped)
}
