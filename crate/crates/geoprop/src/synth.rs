//! Synthetic worlds for tests and demos: users clustered around a set of
//! well-separated cities, friendships drawn only between users of the same
//! city, and a seeded fraction of users labeled with their exact home.
//!
//! Because every friendship spans at most twice the city radius, the
//! generator doubles as a ground-truth oracle: any estimate assembled from
//! a user's friends lies within the city, bounding its error by the city
//! diameter.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::geodesy::{haversine_distance, GeoPoint};
use crate::graph::{GroundTruthLabel, GroundTruthLabels, LabelSource, SocialGraph};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_cities: usize,
    /// Homes fall within this many kilometers of their city center, so any
    /// two same-city users live within twice this distance.
    pub city_radius_km: f64,
    /// Random same-city friendships added per user on top of the chain
    /// that keeps each city connected.
    pub extra_edges_per_user: usize,
    pub label_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 1000,
            n_cities: 30,
            city_radius_km: 4.5,
            extra_edges_per_user: 2,
            label_fraction: 0.20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub graph: SocialGraph,
    pub labels: GroundTruthLabels,
    /// Every user's true home, labeled or not.
    pub homes: BTreeMap<String, GeoPoint>,
    pub city_centers: Vec<GeoPoint>,
}

pub fn generate(config: &SynthConfig) -> SynthWorld {
    assert!(config.n_users > 0 && config.n_cities > 0);
    assert!((0.0..=1.0).contains(&config.label_fraction));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // well-separated city centers: at least 1000 km apart
    let mut centers: Vec<GeoPoint> = Vec::with_capacity(config.n_cities);
    while centers.len() < config.n_cities {
        let candidate =
            GeoPoint::new(rng.gen_range(-55.0..65.0), rng.gen_range(-180.0..180.0)).unwrap();
        if centers
            .iter()
            .all(|&c| haversine_distance(c, candidate) > 1_000_000.0)
        {
            centers.push(candidate);
        }
    }

    let user_name = |i: usize| format!("u{i:06}");
    let mut homes = BTreeMap::new();
    let mut city_members: Vec<Vec<usize>> = vec![Vec::new(); config.n_cities];
    for i in 0..config.n_users {
        let city = i % config.n_cities; // uniform over cities
        city_members[city].push(i);
        let center = centers[city];
        // uniform over the disc of the city radius
        let r_km = config.city_radius_km * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let dlat = r_km * theta.cos() / 110.574;
        let dlon = r_km * theta.sin() / (111.320 * center.lat().to_radians().cos());
        let home = GeoPoint::new(center.lat() + dlat, center.lon() + dlon).unwrap();
        homes.insert(user_name(i), home);
    }

    // same-city edges: a chain for connectivity plus random extras
    let mut edge_map: BTreeMap<(String, String), u64> = BTreeMap::new();
    let add_edge = |a: usize, b: usize, w: u64, map: &mut BTreeMap<(String, String), u64>| {
        if a == b {
            return;
        }
        let (x, y) = (a.min(b), a.max(b));
        map.entry((user_name(x), user_name(y))).or_insert(w);
    };
    for members in &city_members {
        for pair in members.windows(2) {
            let w = rng.gen_range(1..4);
            add_edge(pair[0], pair[1], w, &mut edge_map);
        }
        if members.len() > 1 {
            for &i in members {
                for _ in 0..config.extra_edges_per_user {
                    let j = members[rng.gen_range(0..members.len())];
                    let w = rng.gen_range(1..4);
                    add_edge(i, j, w, &mut edge_map);
                }
            }
        }
    }
    let graph = SocialGraph::from_edge_map(edge_map);

    // label a seeded uniform sample of users with their exact home
    let n_labeled = (config.label_fraction * config.n_users as f64).floor() as usize;
    let mut labels = GroundTruthLabels::new();
    let chosen = rand::seq::index::sample(&mut rng, config.n_users, n_labeled);
    for i in chosen.iter() {
        let user = user_name(i);
        let location = homes[&user];
        labels.insert(
            user,
            GroundTruthLabel {
                location,
                source: LabelSource::GpsMedian,
                last_seen: None,
            },
        );
    }

    SynthWorld {
        graph,
        labels,
        homes,
        city_centers: centers,
    }
}
