//! Robust center and spread of a set of locations.
//!
//! The center is the l1-multivariate (geometric) median under geodesic
//! distance. The default solver is the weighted medoid: the input point
//! minimizing the weighted sum of distances to all others. This is exact
//! over the input set, deterministic, and O(n²) — fine at per-document
//! scale. Optional refinement runs Weiszfeld iterations in an
//! azimuthal-equidistant tangent plane centered at the medoid to recover
//! the continuous optimum; the refined point is kept only when it does not
//! worsen the true geodesic objective.
//!
//! The spread is the median absolute deviation: the median of the
//! distances from each point to the center, in kilometers. Medians of
//! even-length lists take the lower-middle element, so a dispersion is
//! always an actually-observed distance.

use crate::geodesy::{self, distance_km, distance_m, GeoPoint};
use crate::{Error, Result};

const WEISZFELD_MAX_ITER: usize = 100;
const WEISZFELD_STEP_TOL_M: f64 = 1.0;
// One nano-degree of arc, in meters: the nudge applied when a Weiszfeld
// iterate lands exactly on a data point (Vardi-Zhang handling).
const SINGULARITY_NUDGE_M: f64 = 1e-9 * 111_194.926;
// Relative window within which two candidate objectives count as tied.
const TIE_REL_TOL: f64 = 1e-9;

/// A multiset of locations with positive weights.
#[derive(Debug, Clone)]
pub struct WeightedPointSet {
    points: Vec<GeoPoint>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    /// Unit-weighted set.
    pub fn unweighted(points: Vec<GeoPoint>) -> Self {
        let weights = vec![1.0; points.len()];
        WeightedPointSet { points, weights }
    }

    pub fn weighted(points: Vec<GeoPoint>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() || weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidWeights);
        }
        Ok(WeightedPointSet { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Robust center and spread of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustSummary {
    pub center: GeoPoint,
    pub dispersion_km: f64,
    pub n: usize,
    /// Whether tangent-plane refinement ran.
    pub refined: bool,
}

/// Weighted sum of geodesic distances from `candidate` to every point, in
/// meters. The objective minimized by [`l1_median`].
pub fn objective_m(set: &WeightedPointSet, candidate: GeoPoint) -> f64 {
    set.points
        .iter()
        .zip(&set.weights)
        .map(|(&p, &w)| w * distance_m(candidate, p))
        .sum()
}

/// The l1-multivariate median of a non-empty point set.
///
/// With `refine = false` this is the weighted geodesic medoid; objective
/// ties within 1e-9 relative are broken toward the smallest (lat, lon).
/// With `refine = true`, Weiszfeld iterations in the tangent plane at the
/// medoid polish the result (terminating when a step falls under 1 m or
/// after 100 iterations); the refined point never has a worse objective
/// than the medoid.
pub fn l1_median(set: &WeightedPointSet, refine: bool) -> Result<GeoPoint> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let medoid = weighted_medoid(set);
    if !refine {
        return Ok(medoid);
    }
    let polished = weiszfeld_refine(set, medoid);
    if objective_m(set, polished) <= objective_m(set, medoid) {
        Ok(polished)
    } else {
        Ok(medoid)
    }
}

fn weighted_medoid(set: &WeightedPointSet) -> GeoPoint {
    let objectives: Vec<f64> = set.points.iter().map(|&c| objective_m(set, c)).collect();
    let min = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    // the tie window is anchored at the global minimum so the winner does
    // not depend on input order
    let cutoff = min * (1.0 + TIE_REL_TOL);
    let mut best: Option<GeoPoint> = None;
    for (&candidate, &obj) in set.points.iter().zip(&objectives) {
        if obj <= cutoff && best.is_none_or(|b| candidate.lex_less(&b)) {
            best = Some(candidate);
        }
    }
    best.expect("non-empty set has a medoid")
}

fn weiszfeld_refine(set: &WeightedPointSet, start: GeoPoint) -> GeoPoint {
    let planar: Vec<(f64, f64)> = set
        .points
        .iter()
        .map(|&p| geodesy::to_tangent_plane(start, p))
        .collect();
    // start from the weighted planar centroid: data points (such as the
    // medoid at the origin) are fixed points of the iteration
    let total_w: f64 = set.weights.iter().sum();
    let mut cur = planar
        .iter()
        .zip(&set.weights)
        .fold((0.0_f64, 0.0_f64), |acc, (&(x, y), &w)| {
            (acc.0 + w * x / total_w, acc.1 + w * y / total_w)
        });
    for _ in 0..WEISZFELD_MAX_ITER {
        // nudge off any data point the iterate coincides with; the
        // weighted update below is singular there
        if planar
            .iter()
            .any(|&(x, y)| (cur.0 - x).hypot(cur.1 - y) == 0.0)
        {
            cur.0 += SINGULARITY_NUDGE_M;
            cur.1 += SINGULARITY_NUDGE_M;
        }
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut sw = 0.0;
        for (&(x, y), &w) in planar.iter().zip(&set.weights) {
            let d = (cur.0 - x).hypot(cur.1 - y);
            sx += w * x / d;
            sy += w * y / d;
            sw += w / d;
        }
        let next = (sx / sw, sy / sw);
        let step = (next.0 - cur.0).hypot(next.1 - cur.1);
        cur = next;
        if step < WEISZFELD_STEP_TOL_M {
            break;
        }
    }
    geodesy::from_tangent_plane(start, cur.0, cur.1)
}

/// Median of the sorted values, taking the lower-middle element for
/// even-length input. Callers guarantee non-empty input.
pub(crate) fn lower_median(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_unstable_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Median absolute deviation: median distance from the points to `center`,
/// in kilometers. Each point counts once; weights are ignored.
pub fn mad_dispersion(set: &WeightedPointSet, center: GeoPoint) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut dists: Vec<f64> = set.points.iter().map(|&p| distance_km(p, center)).collect();
    Ok(lower_median(&mut dists))
}

/// Center and spread in one call: `center = l1_median(set, refine)`,
/// `dispersion_km = mad_dispersion(set, center)`.
pub fn summarize(set: &WeightedPointSet, refine: bool) -> Result<RobustSummary> {
    let center = l1_median(set, refine)?;
    let dispersion_km = mad_dispersion(set, center)?;
    Ok(RobustSummary {
        center,
        dispersion_km,
        n: set.len(),
        refined: refine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn random_cluster(rng: &mut impl Rng, n: usize, spread_deg: f64) -> Vec<GeoPoint> {
        let clat = rng.gen_range(-60.0..60.0);
        let clon = rng.gen_range(-180.0..180.0);
        (0..n)
            .map(|_| {
                p(
                    clat + rng.gen_range(-spread_deg..spread_deg),
                    clon + rng.gen_range(-spread_deg..spread_deg),
                )
            })
            .collect()
    }

    /// Brute-force reference: evaluate the weighted objective at every
    /// input point, keep the minimum, break ties toward smaller (lat, lon).
    fn brute_force_medoid(points: &[GeoPoint], weights: &[f64]) -> GeoPoint {
        let obj = |c: GeoPoint| -> f64 {
            points
                .iter()
                .zip(weights)
                .map(|(&q, &w)| w * distance_m(c, q))
                .sum()
        };
        let min = points.iter().map(|&c| obj(c)).fold(f64::INFINITY, f64::min);
        let mut tied: Vec<GeoPoint> = points
            .iter()
            .copied()
            .filter(|&c| obj(c) <= min * (1.0 + 1e-9))
            .collect();
        tied.sort_by(|a, b| {
            a.lat()
                .total_cmp(&b.lat())
                .then(a.lon().total_cmp(&b.lon()))
        });
        tied[0]
    }

    #[test]
    fn empty_set_is_an_error() {
        let empty = WeightedPointSet::unweighted(vec![]);
        assert!(matches!(l1_median(&empty, false), Err(Error::EmptySet)));
        assert!(matches!(
            mad_dispersion(&empty, p(0.0, 0.0)),
            Err(Error::EmptySet)
        ));
        assert!(matches!(summarize(&empty, false), Err(Error::EmptySet)));
    }

    #[test]
    fn invalid_weights_rejected() {
        let pts = vec![p(0.0, 0.0), p(1.0, 1.0)];
        assert!(WeightedPointSet::weighted(pts.clone(), vec![1.0]).is_err());
        assert!(WeightedPointSet::weighted(pts.clone(), vec![1.0, 0.0]).is_err());
        assert!(WeightedPointSet::weighted(pts.clone(), vec![1.0, -2.0]).is_err());
        assert!(WeightedPointSet::weighted(pts, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn single_point_is_its_own_median() {
        let set = WeightedPointSet::unweighted(vec![p(12.5, -8.25)]);
        assert_eq!(l1_median(&set, false).unwrap(), p(12.5, -8.25));
        assert_eq!(l1_median(&set, true).unwrap(), p(12.5, -8.25));
        let s = summarize(&set, false).unwrap();
        assert_eq!(s.center, p(12.5, -8.25));
        assert_eq!(s.dispersion_km, 0.0);
        assert_eq!(s.n, 1);
    }

    #[test]
    fn coincident_points_collapse() {
        let set = WeightedPointSet::unweighted(vec![p(3.0, 4.0); 3]);
        assert_eq!(l1_median(&set, false).unwrap(), p(3.0, 4.0));
        assert_eq!(l1_median(&set, true).unwrap(), p(3.0, 4.0));
        let s = summarize(&set, true).unwrap();
        assert_eq!(s.center, p(3.0, 4.0));
        assert_eq!(s.dispersion_km, 0.0);
        assert_eq!(s.n, 3);
    }

    #[test]
    fn medoid_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..200 {
            let n = rng.gen_range(1..=10);
            let points = random_cluster(&mut rng, n, 2.0);
            let weights: Vec<f64> = if trial % 2 == 0 {
                vec![1.0; n]
            } else {
                (0..n).map(|_| rng.gen_range(0.5..5.0)).collect()
            };
            let expected = brute_force_medoid(&points, &weights);
            let set = WeightedPointSet::weighted(points, weights).unwrap();
            assert_eq!(l1_median(&set, false).unwrap(), expected, "trial {trial}");
        }
    }

    #[test]
    fn seven_point_example_matches_exhaustive_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let points = random_cluster(&mut rng, 7, 3.0);
        let expected = brute_force_medoid(&points, &[1.0; 7]);
        let set = WeightedPointSet::unweighted(points);
        assert_eq!(l1_median(&set, false).unwrap(), expected);
    }

    #[test]
    fn refinement_never_increases_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(2..=12);
            let points = random_cluster(&mut rng, n, 1.5);
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
            let set = WeightedPointSet::weighted(points, weights).unwrap();
            let medoid = l1_median(&set, false).unwrap();
            let refined = l1_median(&set, true).unwrap();
            assert!(
                objective_m(&set, refined) <= objective_m(&set, medoid) * (1.0 + 1e-9),
                "refinement worsened the objective"
            );
        }
    }

    #[test]
    fn refinement_beats_medoid_on_a_symmetric_cross() {
        // Four points at the corners of a cross: every input point has the
        // same objective, but the central continuous optimum is strictly
        // better. Refinement must find something near the center.
        let set = WeightedPointSet::unweighted(vec![
            p(1.0, 0.0),
            p(-1.0, 0.001),
            p(0.0, 1.0),
            p(0.002, -1.0),
        ]);
        let medoid = l1_median(&set, false).unwrap();
        let refined = l1_median(&set, true).unwrap();
        assert!(objective_m(&set, refined) < objective_m(&set, medoid));
        assert!(distance_km(refined, p(0.0, 0.0)) < 20.0);
    }

    #[test]
    fn median_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let points = random_cluster(&mut rng, 9, 2.0);
        let weights: Vec<f64> = (0..9).map(|_| rng.gen_range(0.5..4.0)).collect();
        let base = l1_median(
            &WeightedPointSet::weighted(points.clone(), weights.clone()).unwrap(),
            false,
        )
        .unwrap();
        for _ in 0..20 {
            let mut paired: Vec<(GeoPoint, f64)> = points
                .iter()
                .copied()
                .zip(weights.iter().copied())
                .collect();
            paired.shuffle(&mut rng);
            let (pts, ws): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
            let shuffled = l1_median(&WeightedPointSet::weighted(pts, ws).unwrap(), false).unwrap();
            assert_eq!(base, shuffled);
        }
    }

    #[test]
    fn far_outlier_barely_moves_the_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        // tight cluster: radius well under 10 km
        let center = p(40.0, -3.0);
        let cluster: Vec<GeoPoint> = (0..9)
            .map(|_| {
                p(
                    40.0 + rng.gen_range(-0.05..0.05),
                    -3.0 + rng.gen_range(-0.05..0.05),
                )
            })
            .collect();
        let radius_km = cluster
            .iter()
            .map(|&q| distance_km(center, q))
            .fold(0.0, f64::max);
        assert!(radius_km <= 10.0);

        let without = l1_median(&WeightedPointSet::unweighted(cluster.clone()), false).unwrap();
        let mut with_outlier = cluster;
        with_outlier.push(p(-40.0, 170.0)); // several thousand km away
        let with = l1_median(&WeightedPointSet::unweighted(with_outlier), false).unwrap();
        assert!(distance_km(without, with) <= radius_km.max(1.0));
    }

    #[test]
    fn mad_of_coincident_points_is_zero() {
        let set = WeightedPointSet::unweighted(vec![p(5.0, 5.0); 3]);
        assert_eq!(mad_dispersion(&set, p(5.0, 5.0)).unwrap(), 0.0);
    }

    #[test]
    fn mad_is_the_middle_distance_for_three_points() {
        // Points roughly 1, 5, 9 km north of the center: the MAD is the
        // middle distance.
        let center = p(0.0, 0.0);
        let deg_per_km = 1.0 / 110.574;
        let a = p(1.0 * deg_per_km, 0.0);
        let b = p(5.0 * deg_per_km, 0.0);
        let c = p(9.0 * deg_per_km, 0.0);
        let set = WeightedPointSet::unweighted(vec![c, a, b]);
        let mad = mad_dispersion(&set, center).unwrap();
        assert_eq!(mad, distance_km(b, center));
        assert!((mad - 5.0).abs() < 0.05);
    }

    #[test]
    fn mad_of_ten_points_is_the_lower_middle() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let points = random_cluster(&mut rng, 10, 3.0);
        let center = p(10.0, 10.0);
        let set = WeightedPointSet::unweighted(points.clone());
        let mad = mad_dispersion(&set, center).unwrap();
        // independent recomputation: sort the ten distances, take index 4
        let mut dists: Vec<f64> = points.iter().map(|&q| distance_km(q, center)).collect();
        dists.sort_by(f64::total_cmp);
        assert_eq!(mad, dists[4]);
    }

    #[test]
    fn mad_ignores_weights() {
        let pts = vec![p(0.0, 0.0), p(0.5, 0.0), p(2.0, 0.0)];
        let unit = WeightedPointSet::unweighted(pts.clone());
        let heavy = WeightedPointSet::weighted(pts, vec![100.0, 1.0, 1.0]).unwrap();
        let c = p(0.0, 0.0);
        assert_eq!(
            mad_dispersion(&unit, c).unwrap(),
            mad_dispersion(&heavy, c).unwrap()
        );
    }

    #[test]
    fn summarize_composes_median_and_mad() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let points = random_cluster(&mut rng, 9, 2.0);
        let set = WeightedPointSet::unweighted(points.clone());
        let s = summarize(&set, false).unwrap();
        // independent composition: brute-force medoid, then the sorted
        // lower-middle of the distances to it
        let center = brute_force_medoid(&points, &[1.0; 9]);
        let mut dists: Vec<f64> = points.iter().map(|&q| distance_km(q, center)).collect();
        dists.sort_by(f64::total_cmp);
        assert_eq!(s.center, center);
        assert_eq!(s.dispersion_km, dists[4]);
        assert_eq!(s.n, 9);
        assert!(!s.refined);
    }

    #[test]
    fn dispersion_is_translation_consistent() {
        // low latitudes: near the poles meridian convergence alone shifts
        // east-west distances by more than the bound checked here
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..10 {
            let clat = rng.gen_range(-30.0..30.0);
            let clon = rng.gen_range(-170.0..170.0);
            let points: Vec<GeoPoint> = (0..11)
                .map(|_| {
                    p(
                        clat + rng.gen_range(-0.5..0.5),
                        clon + rng.gen_range(-0.5..0.5),
                    )
                })
                .collect();
            let set = WeightedPointSet::unweighted(points.clone());
            let base = summarize(&set, false).unwrap().dispersion_km;
            let shifted: Vec<GeoPoint> = points
                .iter()
                .map(|&q| p(q.lat() + 0.05, q.lon() + 0.05))
                .collect();
            let shifted_disp = summarize(&WeightedPointSet::unweighted(shifted), false)
                .unwrap()
                .dispersion_km;
            assert!((shifted_disp - base).abs() / base < 0.001);
        }
    }
}
