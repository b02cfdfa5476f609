//! WGS-84 geodesic distances.
//!
//! [`vincenty_distance`] is the exact inverse solution on the ellipsoid and
//! the metric used throughout the crate. [`haversine_distance`] is the
//! spherical fallback for the rare near-antipodal pairs where Vincenty's
//! iteration does not converge; [`distance_m`] bundles the two behind the
//! default fallback policy.

use crate::{Error, Result};

/// WGS-84 semi-major axis in meters.
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS-84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// WGS-84 semi-minor axis in meters, derived from the axis and flattening.
pub const WGS84_B: f64 = WGS84_A * (1.0 - WGS84_F);
/// Mean Earth radius in meters, used by the spherical formulas.
pub const MEAN_EARTH_RADIUS_M: f64 = 6_371_008.8;

const VINCENTY_TOL_RAD: f64 = 1e-12;
const VINCENTY_MAX_ITER: usize = 200;

/// A WGS-84 latitude/longitude pair in decimal degrees.
///
/// Latitude lies in [-90, +90]; longitude is normalized into [-180, +180)
/// on construction (+180 maps to -180). Coordinates are never NaN or
/// infinite, and -0.0 is canonicalized to 0.0 so equal points compare and
/// sort identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidGeoPoint { lat, lon });
        }
        let mut lon = (lon + 180.0).rem_euclid(360.0) - 180.0;
        if lon >= 180.0 {
            // rem_euclid can round up to 360.0 for inputs just below a
            // multiple of 360
            lon = -180.0;
        }
        let lat = if lat == 0.0 { 0.0 } else { lat };
        let lon = if lon == 0.0 { 0.0 } else { lon };
        Ok(GeoPoint { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// True when `self` precedes `other` in (lat, lon) lexicographic order.
    /// Used as the deterministic tie-break rule for median candidates.
    pub(crate) fn lex_less(&self, other: &GeoPoint) -> bool {
        match self.lat.total_cmp(&other.lat) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.lon.total_cmp(&other.lon).is_lt(),
        }
    }
}

fn wrap_pi(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    if x > PI {
        x - TAU
    } else if x < -PI {
        x + TAU
    } else {
        x
    }
}

/// Inverse geodesic distance on the WGS-84 ellipsoid in meters (Vincenty's
/// iterative solution, |Δλ| tolerance 1e-12 rad, 200-iteration cap).
///
/// Returns [`Error::NonConvergence`] for near-antipodal pairs; see
/// [`distance_m`] for the fallback policy.
pub fn vincenty_distance(a: GeoPoint, b: GeoPoint) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let l = wrap_pi(b.lon.to_radians() - a.lon.to_radians());

    // reduced latitudes
    let u1 = ((1.0 - WGS84_F) * lat1.tan()).atan();
    let u2 = ((1.0 - WGS84_F) * lat2.tan()).atan();
    let (sin_u1, cos_u1) = u1.sin_cos();
    let (sin_u2, cos_u2) = u2.sin_cos();

    let mut lambda = l;
    for _ in 0..VINCENTY_MAX_ITER {
        let (sin_lambda, cos_lambda) = lambda.sin_cos();
        let sin_sigma = ((cos_u2 * sin_lambda).powi(2)
            + (cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda).powi(2))
        .sqrt();
        if sin_sigma == 0.0 {
            // coincident on the auxiliary sphere
            return Ok(0.0);
        }
        let cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
        let sigma = sin_sigma.atan2(cos_sigma);
        let sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
        let cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
        // equatorial lines have cos²α = 0; the 2σm term degenerates and C = 0
        let cos_2sigma_m = if cos_sq_alpha.abs() < 1e-15 {
            0.0
        } else {
            cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
        };
        let c = WGS84_F / 16.0 * cos_sq_alpha * (4.0 + WGS84_F * (4.0 - 3.0 * cos_sq_alpha));
        let lambda_prev = lambda;
        lambda = l
            + (1.0 - c)
                * WGS84_F
                * sin_alpha
                * (sigma
                    + c * sin_sigma
                        * (cos_2sigma_m
                            + c * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        if (lambda - lambda_prev).abs() < VINCENTY_TOL_RAD {
            let u_sq = cos_sq_alpha * (WGS84_A * WGS84_A - WGS84_B * WGS84_B) / (WGS84_B * WGS84_B);
            let big_a =
                1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
            let big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
            let delta_sigma = big_b
                * sin_sigma
                * (cos_2sigma_m
                    + big_b / 4.0
                        * (cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)
                            - big_b / 6.0
                                * cos_2sigma_m
                                * (-3.0 + 4.0 * sin_sigma * sin_sigma)
                                * (-3.0 + 4.0 * cos_2sigma_m * cos_2sigma_m)));
            return Ok(WGS84_B * big_a * (sigma - delta_sigma));
        }
    }
    Err(Error::NonConvergence)
}

/// Great-circle distance in meters on a sphere of radius
/// [`MEAN_EARTH_RADIUS_M`]. Always converges; within 0.6% of the geodesic
/// distance for non-antipodal pairs.
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = lat2 - lat1;
    let dlon = wrap_pi(b.lon.to_radians() - a.lon.to_radians());
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    let h = h.min(1.0);
    2.0 * MEAN_EARTH_RADIUS_M * h.sqrt().atan2((1.0 - h).sqrt())
}

/// Geodesic distance in meters under the default non-convergence policy:
/// Vincenty, falling back to the spherical distance when the iteration does
/// not converge. The flag reports whether the fallback was taken.
pub fn distance_with_fallback(a: GeoPoint, b: GeoPoint) -> (f64, bool) {
    match vincenty_distance(a, b) {
        Ok(d) => (d, false),
        Err(_) => (haversine_distance(a, b), true),
    }
}

/// Geodesic distance in meters, fallback policy.
pub fn distance_m(a: GeoPoint, b: GeoPoint) -> f64 {
    distance_with_fallback(a, b).0
}

/// Geodesic distance in kilometers, fallback policy.
pub fn distance_km(a: GeoPoint, b: GeoPoint) -> f64 {
    distance_m(a, b) / 1000.0
}

/// Azimuthal-equidistant coordinates of `p` about `center` in meters, on
/// the mean-radius sphere. x grows east, y north. Inverse of
/// [`from_tangent_plane`].
pub(crate) fn to_tangent_plane(center: GeoPoint, p: GeoPoint) -> (f64, f64) {
    let lat1 = center.lat.to_radians();
    let lat2 = p.lat.to_radians();
    let dlon = wrap_pi(p.lon.to_radians() - center.lon.to_radians());
    let d = haversine_distance(center, p);
    let y_num = dlon.sin() * lat2.cos();
    let x_num = lat1.cos() * lat2.sin() - lat1.sin() * lat2.cos() * dlon.cos();
    let bearing = y_num.atan2(x_num);
    (d * bearing.sin(), d * bearing.cos())
}

/// Point at planar offset (x, y) meters from `center` in the
/// azimuthal-equidistant plane.
pub(crate) fn from_tangent_plane(center: GeoPoint, x: f64, y: f64) -> GeoPoint {
    let d = x.hypot(y);
    if d == 0.0 {
        return center;
    }
    let bearing = x.atan2(y);
    let ang = d / MEAN_EARTH_RADIUS_M;
    let lat1 = center.lat.to_radians();
    let lon1 = center.lon.to_radians();
    let sin_lat2 =
        (lat1.sin() * ang.cos() + lat1.cos() * ang.sin() * bearing.cos()).clamp(-1.0, 1.0);
    let lat2 = sin_lat2.asin();
    let lon2 =
        lon1 + (bearing.sin() * ang.sin() * lat1.cos()).atan2(ang.cos() - lat1.sin() * sin_lat2);
    GeoPoint::new(lat2.to_degrees(), lon2.to_degrees())
        .expect("tangent-plane inverse produces valid coordinates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn random_point(rng: &mut impl Rng) -> GeoPoint {
        // uniform over the sphere so high latitudes are not oversampled
        let lon = rng.gen_range(-180.0..180.0);
        let z: f64 = rng.gen_range(-1.0..1.0);
        let lat = z.asin().to_degrees();
        p(lat, lon)
    }

    #[test]
    fn construction_validates_and_normalizes() {
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
        assert!(GeoPoint::new(0.0, f64::INFINITY).is_err());
        assert!(GeoPoint::new(90.5, 0.0).is_err());
        assert!(GeoPoint::new(-91.0, 0.0).is_err());

        assert_eq!(p(0.0, 180.0).lon(), -180.0);
        assert_eq!(p(0.0, -180.0).lon(), -180.0);
        assert_eq!(p(0.0, 540.0).lon(), -180.0);
        assert_eq!(p(0.0, 190.0).lon(), -170.0);
        assert_eq!(p(0.0, -190.0).lon(), 170.0);
        assert_eq!(p(-0.0, -0.0), p(0.0, 0.0));
    }

    #[test]
    fn identity_is_zero() {
        let a = p(47.3, 8.5);
        assert_eq!(vincenty_distance(a, a).unwrap(), 0.0);
        assert_eq!(haversine_distance(a, a), 0.0);
        // same point expressed with a wrapped longitude
        assert_eq!(
            vincenty_distance(p(10.0, 180.0), p(10.0, -180.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn one_degree_of_equator() {
        // WGS-84 equatorial arc: a * pi/180 = 111319.491 m (semi-major axis
        // times one degree in radians).
        let d = vincenty_distance(p(0.0, 0.0), p(0.0, 1.0)).unwrap();
        assert!((d - 111_319.491).abs() < 1e-3, "got {d}");
    }

    #[test]
    fn published_baseline_flinders_buninyong() {
        // Classic surveyed WGS-84 baseline: 54972.271 m.
        let flinders = p(-37.951_033_41, 144.424_867_88);
        let buninyong = p(-37.652_821_13, 143.926_495_52);
        let d = vincenty_distance(flinders, buninyong).unwrap();
        assert!((d - 54_972.271).abs() < 0.01, "got {d}");
    }

    #[test]
    fn haversine_pole_to_pole() {
        let d = haversine_distance(p(90.0, 12.0), p(-90.0, -77.0));
        assert!((d - std::f64::consts::PI * MEAN_EARTH_RADIUS_M).abs() < 1e-6);
    }

    #[test]
    fn symmetry_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let (dab, fab) = distance_with_fallback(a, b);
            let (dba, fba) = distance_with_fallback(b, a);
            assert_eq!(fab, fba);
            // symmetric up to rounding of reordered intermediates (~1 ulp)
            assert!(
                (dab - dba).abs() <= 1e-12 * dab.max(1.0),
                "{a:?} {b:?}: {dab} vs {dba}"
            );
        }
    }

    #[test]
    fn haversine_agrees_with_vincenty_within_point_six_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        for _ in 0..1000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let Ok(dv) = vincenty_distance(a, b) else {
                continue; // antipodal: haversine is the fallback, nothing to compare
            };
            if dv < 1.0 {
                continue;
            }
            let dh = haversine_distance(a, b);
            let rel = (dh - dv).abs() / dv;
            assert!(rel < 0.006, "{a:?} {b:?}: vincenty {dv}, haversine {dh}");
            checked += 1;
        }
        assert!(checked > 900);
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let c = random_point(&mut rng);
            let ab = distance_m(a, b);
            let bc = distance_m(b, c);
            let ac = distance_m(a, c);
            assert!(ac <= (ab + bc) * (1.0 + 1e-6), "{a:?} {b:?} {c:?}");
        }
    }

    #[test]
    fn distance_bounded_by_half_circumference() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let bound = std::f64::consts::PI * WGS84_A;
        for _ in 0..1000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            if let Ok(d) = vincenty_distance(a, b) {
                assert!(d >= 0.0 && d <= bound, "{a:?} {b:?}: {d}");
            }
        }
    }

    #[test]
    fn near_antipodal_falls_back_to_haversine() {
        // The classic non-convergent case for Vincenty's inverse iteration.
        let a = p(0.0, 0.0);
        let b = p(0.5, 179.7);
        assert!(matches!(
            vincenty_distance(a, b),
            Err(Error::NonConvergence)
        ));
        let (d, fell_back) = distance_with_fallback(a, b);
        assert!(fell_back);
        assert_eq!(d, haversine_distance(a, b));
        assert!(d > 19_000_000.0 && d < 21_000_000.0);
    }

    #[test]
    fn tangent_plane_round_trips_locally() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let center = p(rng.gen_range(-80.0..80.0), rng.gen_range(-180.0..180.0));
            let q = p(
                center.lat() + rng.gen_range(-0.5..0.5),
                center.lon() + rng.gen_range(-0.5..0.5),
            );
            let (x, y) = to_tangent_plane(center, q);
            let back = from_tangent_plane(center, x, y);
            assert!(distance_m(q, back) < 0.01, "{center:?} {q:?} -> {back:?}");
        }
    }
}
