//! The reciprocated mention graph and its ground-truth labels.
//!
//! Directed mention records are condensed into an undirected weighted
//! graph: an edge exists only when both directions were observed, and its
//! weight is the smaller of the two directed totals. Ground truth comes
//! from two sources — per-user GPS medians and gazetteer-matched
//! self-reported profile locations — with GPS preferred on conflict.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use regex::Regex;
use unicode_normalization::UnicodeNormalization;

use crate::geodesy::GeoPoint;
use crate::robust::{l1_median, WeightedPointSet};
use crate::toponym::{Gazetteer, NameLookup};

/// A pre-aggregated directed mention count. User IDs are opaque strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionRecord {
    pub src: String,
    pub dst: String,
    pub count: u64,
}

/// Undirected weighted graph of users. Vertices are sorted
/// lexicographically, so vertex indices, adjacency lists, and the edge
/// list are all deterministic for a given record multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    users: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, u64)>>,
    edges: Vec<(usize, usize, u64)>,
}

impl SocialGraph {
    /// Builds a graph from an already-reciprocated weighted edge map keyed
    /// by unordered (smaller, larger) user pairs.
    pub fn from_edge_map(edge_map: BTreeMap<(String, String), u64>) -> SocialGraph {
        let mut names: BTreeSet<String> = BTreeSet::new();
        for (a, b) in edge_map.keys() {
            names.insert(a.clone());
            names.insert(b.clone());
        }
        let users: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, usize> = users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), i))
            .collect();
        let mut adjacency = vec![Vec::new(); users.len()];
        let mut edges = Vec::with_capacity(edge_map.len());
        for ((a, b), w) in edge_map {
            let (i, j) = (index[&a], index[&b]);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
            edges.push((i.min(j), i.max(j), w));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        edges.sort_unstable();
        SocialGraph {
            users,
            index,
            adjacency,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.users.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn user(&self, idx: usize) -> &str {
        &self.users[idx]
    }

    pub fn user_index(&self, user: &str) -> Option<usize> {
        self.index.get(user).copied()
    }

    pub fn contains_user(&self, user: &str) -> bool {
        self.index.contains_key(user)
    }

    /// Neighbors of a vertex with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, idx: usize) -> &[(usize, u64)] {
        &self.adjacency[idx]
    }

    /// All undirected edges as (i, j, weight) with i < j, sorted.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }
}

/// Condenses directed mention records into the reciprocated graph.
/// Duplicate (src, dst) records are summed; self-mentions are ignored; a
/// pair keeps an edge only when both directions are present, with weight
/// min(count src→dst, count dst→src).
pub fn build_graph(records: impl IntoIterator<Item = MentionRecord>) -> SocialGraph {
    let mut directed: HashMap<(String, String), u64> = HashMap::new();
    for r in records {
        if r.src == r.dst || r.count == 0 {
            continue;
        }
        *directed.entry((r.src, r.dst)).or_insert(0) += r.count;
    }
    let mut edge_map: BTreeMap<(String, String), u64> = BTreeMap::new();
    for ((src, dst), count) in &directed {
        if src < dst {
            if let Some(back) = directed.get(&(dst.clone(), src.clone())) {
                edge_map.insert((src.clone(), dst.clone()), (*count).min(*back));
            }
        }
    }
    SocialGraph::from_edge_map(edge_map)
}

/// Where a ground-truth label came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSource {
    GpsMedian,
    SelfReport,
}

impl LabelSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelSource::GpsMedian => "GPS_MEDIAN",
            LabelSource::SelfReport => "SELF_REPORT",
        }
    }

    pub fn parse(s: &str) -> Option<LabelSource> {
        match s {
            "GPS_MEDIAN" => Some(LabelSource::GpsMedian),
            "SELF_REPORT" => Some(LabelSource::SelfReport),
            _ => None,
        }
    }
}

/// A user's ground-truth location. `last_seen` is an opaque timestamp
/// carried through from the label file when present; the core never
/// interprets it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthLabel {
    pub location: GeoPoint,
    pub source: LabelSource,
    pub last_seen: Option<String>,
}

/// One label per user, iterated in user order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruthLabels {
    map: BTreeMap<String, GroundTruthLabel>,
}

impl GroundTruthLabels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts, replacing any existing label for the user.
    pub fn insert(&mut self, user: String, label: GroundTruthLabel) {
        self.map.insert(user, label);
    }

    pub fn get(&self, user: &str) -> Option<&GroundTruthLabel> {
        self.map.get(user)
    }

    pub fn contains(&self, user: &str) -> bool {
        self.map.contains_key(user)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &GroundTruthLabel)> {
        self.map.iter()
    }

    pub fn remove(&mut self, user: &str) -> Option<GroundTruthLabel> {
        self.map.remove(user)
    }
}

/// Labels each user with the l1-median of their GPS observations.
pub fn gps_ground_truth(
    observations: impl IntoIterator<Item = (String, GeoPoint)>,
) -> GroundTruthLabels {
    let mut per_user: BTreeMap<String, Vec<GeoPoint>> = BTreeMap::new();
    for (user, point) in observations {
        per_user.entry(user).or_default().push(point);
    }
    let mut labels = GroundTruthLabels::new();
    for (user, points) in per_user {
        let set = WeightedPointSet::unweighted(points);
        let center = l1_median(&set, false).expect("per-user groups are non-empty");
        labels.insert(
            user,
            GroundTruthLabel {
                location: center,
                source: LabelSource::GpsMedian,
                last_seen: None,
            },
        );
    }
    labels
}

/// Canonical form used for exact matching of profile text against
/// gazetteer names: Unicode NFC, ASCII whitespace trimmed.
pub fn normalize_place_name(s: &str) -> String {
    s.trim_matches(|c: char| c.is_ascii_whitespace())
        .nfc()
        .collect()
}

/// Counters from a self-report labeling pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelfReportStats {
    pub matched: usize,
    pub unmatched: usize,
    /// Profile texts that matched a gazetteer name with several distinct
    /// coordinates; skipped.
    pub ambiguous_skipped: usize,
}

/// A profile row as ingested: user, free-text location field, optional
/// last-seen timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub user: String,
    pub text: String,
    pub last_seen: Option<String>,
}

/// Labels users whose profile location field exactly equals a gazetteer
/// name (byte equality after NFC normalization and ASCII-whitespace trim).
/// The first row wins when a user appears more than once.
pub fn self_report_ground_truth<'a>(
    profiles: impl IntoIterator<Item = &'a ProfileRow>,
    gazetteer: &Gazetteer,
) -> (GroundTruthLabels, SelfReportStats) {
    let mut labels = GroundTruthLabels::new();
    let mut stats = SelfReportStats::default();
    for row in profiles {
        match gazetteer.lookup(&row.text) {
            NameLookup::Unique(location) => {
                stats.matched += 1;
                if !labels.contains(&row.user) {
                    labels.insert(
                        row.user.clone(),
                        GroundTruthLabel {
                            location,
                            source: LabelSource::SelfReport,
                            last_seen: row.last_seen.clone(),
                        },
                    );
                }
            }
            NameLookup::Ambiguous => stats.ambiguous_skipped += 1,
            NameLookup::NotFound => stats.unmatched += 1,
        }
    }
    (labels, stats)
}

/// Union of the two label sets; GPS medians win conflicts.
pub fn merge_labels(gps: GroundTruthLabels, self_report: GroundTruthLabels) -> GroundTruthLabels {
    let mut merged = self_report;
    for (user, label) in gps.map {
        merged.map.insert(user, label);
    }
    merged
}

/// The built-in example pattern for external-account extraction: Tumblr
/// blog URLs in profile text. Capture group 1 is the account.
pub const TUMBLR_PROFILE_PATTERN: &str = r"https?://(?:www\.)?([A-Za-z0-9_-]+\.tumblr\.com)";

/// Scans free-text profiles for URLs matching the given patterns and emits
/// one (user, account) pair per match. When a pattern has a capture group
/// the account is group 1, otherwise the whole match.
pub fn extract_profile_links<'a>(
    profiles: impl IntoIterator<Item = (&'a str, &'a str)>,
    patterns: &[Regex],
) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (user, text) in profiles {
        for pattern in patterns {
            for caps in pattern.captures_iter(text) {
                let account = caps
                    .get(1)
                    .unwrap_or_else(|| caps.get(0).expect("match has group 0"))
                    .as_str();
                out.push((user.to_string(), account.to_string()));
            }
        }
    }
    out
}

/// Splits graph vertices into the labeled set L and unlabeled set U.
/// |L| + |U| = |V| by construction.
pub fn partition(graph: &SocialGraph, labels: &GroundTruthLabels) -> (Vec<usize>, Vec<usize>) {
    let mut labeled = Vec::new();
    let mut unlabeled = Vec::new();
    for idx in 0..graph.vertex_count() {
        if labels.contains(graph.user(idx)) {
            labeled.push(idx);
        } else {
            unlabeled.push(idx);
        }
    }
    (labeled, unlabeled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toponym::GazetteerEntry;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn rec(src: &str, dst: &str, count: u64) -> MentionRecord {
        MentionRecord {
            src: src.to_string(),
            dst: dst.to_string(),
            count,
        }
    }

    fn edge_weights(g: &SocialGraph) -> BTreeMap<(String, String), u64> {
        g.edges()
            .iter()
            .map(|&(i, j, w)| ((g.user(i).to_string(), g.user(j).to_string()), w))
            .collect()
    }

    #[test]
    fn min_rule_on_a_reciprocated_pair() {
        let g = build_graph(vec![rec("A", "B", 3), rec("B", "A", 1)]);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(
            edge_weights(&g),
            BTreeMap::from([(("A".into(), "B".into()), 1)])
        );
    }

    #[test]
    fn unreciprocated_mentions_produce_no_edge() {
        let g = build_graph(vec![rec("A", "B", 5)]);
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_records_are_summed_before_the_min() {
        let g = build_graph(vec![rec("A", "B", 2), rec("A", "B", 3), rec("B", "A", 4)]);
        assert_eq!(
            edge_weights(&g),
            BTreeMap::from([(("A".into(), "B".into()), 4)])
        );
    }

    #[test]
    fn self_mentions_are_dropped() {
        let g = build_graph(vec![rec("A", "A", 10), rec("A", "B", 1), rec("B", "A", 1)]);
        assert_eq!(
            edge_weights(&g),
            BTreeMap::from([(("A".into(), "B".into()), 1)])
        );
    }

    /// Independent two-pass oracle: dictionary of directed sums, then a
    /// scan pairing each (s, d) with its reverse.
    fn oracle_graph(records: &[MentionRecord]) -> BTreeMap<(String, String), u64> {
        let mut sums: BTreeMap<(String, String), u64> = BTreeMap::new();
        for r in records {
            if r.src != r.dst {
                *sums.entry((r.src.clone(), r.dst.clone())).or_insert(0) += r.count;
            }
        }
        let mut edges = BTreeMap::new();
        for ((s, d), c) in &sums {
            if let Some(back) = sums.get(&(d.clone(), s.clone())) {
                let key = if s < d {
                    (s.clone(), d.clone())
                } else {
                    (d.clone(), s.clone())
                };
                edges.insert(key, *c.min(back));
            }
        }
        edges
    }

    #[test]
    fn random_multigraph_matches_dictionary_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let users: Vec<String> = (0..20).map(|i| format!("u{i}")).collect();
        let records: Vec<MentionRecord> = (0..200)
            .map(|_| {
                let s = users.choose(&mut rng).unwrap().clone();
                let d = users.choose(&mut rng).unwrap().clone();
                MentionRecord {
                    src: s,
                    dst: d,
                    count: rng.gen_range(1..5),
                }
            })
            .collect();
        let g = build_graph(records.clone());
        assert_eq!(edge_weights(&g), oracle_graph(&records));
    }

    #[test]
    fn graph_is_independent_of_record_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let mut records: Vec<MentionRecord> = vec![
            rec("A", "B", 2),
            rec("B", "A", 7),
            rec("C", "A", 1),
            rec("A", "C", 3),
            rec("B", "C", 2),
            rec("A", "B", 5),
        ];
        let base = build_graph(records.clone());
        for _ in 0..10 {
            records.shuffle(&mut rng);
            assert_eq!(build_graph(records.clone()), base);
        }
    }

    #[test]
    fn gps_labels_take_the_per_user_medoid() {
        let single = gps_ground_truth(vec![("a".to_string(), p(10.0, 20.0))]);
        assert_eq!(single.get("a").unwrap().location, p(10.0, 20.0));
        assert_eq!(single.get("a").unwrap().source, LabelSource::GpsMedian);

        // two coincident points outvote a third 100 km away
        let q = p(40.0, -3.0);
        let far = p(40.9, -3.0);
        let labels = gps_ground_truth(vec![
            ("b".to_string(), q),
            ("b".to_string(), q),
            ("b".to_string(), far),
        ]);
        assert_eq!(labels.get("b").unwrap().location, q);
    }

    #[test]
    fn gps_labels_match_per_user_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut observations = Vec::new();
        let mut per_user: BTreeMap<String, Vec<GeoPoint>> = BTreeMap::new();
        for u in 0..50 {
            let user = format!("user{u:02}");
            let n = rng.gen_range(1..6);
            for _ in 0..n {
                let point = p(rng.gen_range(-60.0..60.0), rng.gen_range(-180.0..180.0));
                observations.push((user.clone(), point));
                per_user.entry(user.clone()).or_default().push(point);
            }
        }
        observations.shuffle(&mut rng);
        let labels = gps_ground_truth(observations);
        assert_eq!(labels.len(), 50);
        for (user, points) in per_user {
            let expected = l1_median(&WeightedPointSet::unweighted(points), false).unwrap();
            assert_eq!(labels.get(&user).unwrap().location, expected, "{user}");
        }
    }

    fn small_gazetteer() -> Gazetteer {
        Gazetteer::new(vec![
            GazetteerEntry {
                name: "Santiago, Chile".to_string(),
                location: p(-33.45694, -70.64827),
                population: Some(4_837_295),
            },
            GazetteerEntry {
                name: "Springfield".to_string(),
                location: p(39.80172, -89.64371),
                population: None,
            },
            GazetteerEntry {
                name: "Springfield".to_string(),
                location: p(37.21533, -93.29824),
                population: None,
            },
        ])
    }

    fn profile(user: &str, text: &str) -> ProfileRow {
        ProfileRow {
            user: user.to_string(),
            text: text.to_string(),
            last_seen: None,
        }
    }

    #[test]
    fn self_reports_require_exact_matches() {
        let gaz = small_gazetteer();
        let rows = vec![
            profile("u1", "Santiago, Chile"),
            profile("u2", "santiago, chile"),
            profile("u3", "  Santiago, Chile "),
            profile("u4", "Springfield"),
            profile("u5", "nowhere at all"),
        ];
        let (labels, stats) = self_report_ground_truth(&rows, &gaz);
        assert_eq!(labels.len(), 2); // u1 and u3 (trimmed)
        assert_eq!(labels.get("u1").unwrap().location, p(-33.45694, -70.64827));
        assert_eq!(labels.get("u1").unwrap().source, LabelSource::SelfReport);
        assert!(labels.get("u3").is_some());
        assert!(labels.get("u2").is_none()); // case mismatch
        assert!(labels.get("u4").is_none()); // ambiguous name
        assert_eq!(stats.ambiguous_skipped, 1);
        assert_eq!(stats.unmatched, 2);
        assert_eq!(stats.matched, 2);
    }

    #[test]
    fn self_reports_match_after_nfc_normalization() {
        let gaz = Gazetteer::new(vec![GazetteerEntry {
            name: "S\u{e3}o Paulo".to_string(), // precomposed ã
            location: p(-23.5475, -46.63611),
            population: None,
        }]);
        // decomposed "a" + combining tilde
        let rows = vec![profile("u1", "Sa\u{303}o Paulo")];
        let (labels, _) = self_report_ground_truth(&rows, &gaz);
        assert_eq!(labels.len(), 1);
    }

    #[test]
    fn self_report_fixture_matches_hand_table() {
        let gaz = Gazetteer::new(
            [
                ("Lima", -12.04318, -77.02824),
                ("Quito", -0.22985, -78.52495),
                ("Bogota", 4.60971, -74.08175),
                ("Caracas", 10.48801, -66.87919),
                ("La Paz", -16.5, -68.15),
                ("Asuncion", -25.28646, -57.647),
                ("Montevideo", -34.90328, -56.18816),
                ("Santiago", -33.45694, -70.64827),
                ("Brasilia", -15.77972, -47.92972),
                ("Georgetown", 6.80448, -58.15527),
            ]
            .iter()
            .map(|&(name, lat, lon)| GazetteerEntry {
                name: name.to_string(),
                location: p(lat, lon),
                population: None,
            })
            .collect(),
        );
        let rows: Vec<ProfileRow> = [
            ("p01", "Lima", true),
            ("p02", "lima", false),
            ("p03", "Lima, Peru", false),
            ("p04", " Quito ", true),
            ("p05", "QUITO", false),
            ("p06", "Bogota", true),
            ("p07", "Bogotá", false), // accent differs from the entry
            ("p08", "Caracas", true),
            ("p09", "La Paz", true),
            ("p10", "La  Paz", false), // interior double space
            ("p11", "Asuncion", true),
            ("p12", "Montevideo", true),
            ("p13", "Santiago", true),
            ("p14", "Brasilia", true),
            ("p15", "Georgetown ", true),
            ("p16", "George town", false),
            ("p17", "", false),
            ("p18", "Montevideo Uruguay", false),
            ("p19", "Caracas, Venezuela", false),
            ("p20", "la paz", false),
        ]
        .iter()
        .map(|&(user, text, _)| profile(user, text))
        .collect();
        let expected: Vec<&str> = vec![
            "p01", "p04", "p06", "p08", "p09", "p11", "p12", "p13", "p14", "p15",
        ];
        let (labels, stats) = self_report_ground_truth(&rows, &gaz);
        let got: Vec<&str> = labels.iter().map(|(u, _)| u.as_str()).collect();
        assert_eq!(got, expected);
        assert_eq!(stats.matched, 10);
        assert_eq!(stats.unmatched, 10);
    }

    #[test]
    fn merge_prefers_gps_over_self_report() {
        let mut gps = GroundTruthLabels::new();
        gps.insert(
            "both".to_string(),
            GroundTruthLabel {
                location: p(1.0, 1.0),
                source: LabelSource::GpsMedian,
                last_seen: None,
            },
        );
        let mut sr = GroundTruthLabels::new();
        sr.insert(
            "both".to_string(),
            GroundTruthLabel {
                location: p(2.0, 2.0),
                source: LabelSource::SelfReport,
                last_seen: None,
            },
        );
        sr.insert(
            "only_self".to_string(),
            GroundTruthLabel {
                location: p(3.0, 3.0),
                source: LabelSource::SelfReport,
                last_seen: None,
            },
        );
        let merged = merge_labels(gps, sr);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.get("both").unwrap().source, LabelSource::GpsMedian);
        assert_eq!(merged.get("both").unwrap().location, p(1.0, 1.0));
        assert_eq!(merged.get("only_self").unwrap().location, p(3.0, 3.0));
    }

    #[test]
    fn merge_of_disjoint_sets_is_a_plain_union() {
        let gps = gps_ground_truth(vec![
            ("a".to_string(), p(0.0, 0.0)),
            ("b".to_string(), p(1.0, 1.0)),
        ]);
        let mut sr = GroundTruthLabels::new();
        sr.insert(
            "c".to_string(),
            GroundTruthLabel {
                location: p(2.0, 2.0),
                source: LabelSource::SelfReport,
                last_seen: None,
            },
        );
        let merged = merge_labels(gps, sr);
        assert_eq!(merged.len(), 3);
    }

    #[test]
    fn tumblr_pattern_extracts_the_account() {
        let patterns = vec![Regex::new(TUMBLR_PROFILE_PATTERN).unwrap()];
        let out = extract_profile_links(
            vec![
                ("u1", "my blog: http://alice.tumblr.com come visit"),
                ("u2", "no links here"),
                (
                    "u3",
                    "https://www.bob-99.tumblr.com and http://carol.tumblr.com",
                ),
            ],
            &patterns,
        );
        assert_eq!(
            out,
            vec![
                ("u1".to_string(), "alice.tumblr.com".to_string()),
                ("u3".to_string(), "bob-99.tumblr.com".to_string()),
                ("u3".to_string(), "carol.tumblr.com".to_string()),
            ]
        );
    }

    #[test]
    fn link_extraction_fixture_matches_hand_table() {
        let patterns = vec![
            Regex::new(TUMBLR_PROFILE_PATTERN).unwrap(),
            Regex::new(r"https?://(?:www\.)?flickr\.com/photos/([A-Za-z0-9_@-]+)").unwrap(),
        ];
        let profiles = vec![
            ("a01", "http://alpha.tumblr.com"),
            ("a02", "see https://flickr.com/photos/beta_99!"),
            ("a03", "tumblr.com without scheme"),
            ("a04", "mirror: http://www.gamma.tumblr.com"),
            ("a05", "two: http://d1.tumblr.com http://d2.tumblr.com"),
            ("a06", ""),
            ("a07", "http://flickr.com/photos/"),
            ("a08", "https://www.flickr.com/photos/epsilon"),
            ("a09", "not a url: zeta.tumblr.com"),
            ("a10", "http://ETA.tumblr.com"), // uppercase subdomain
            ("a11", "plain text"),
            ("a12", "http://theta.tumblr.com/post/123"),
            ("a13", "ftp://iota.tumblr.com"),
            ("a14", "http://kappa.tumblr.comx"), // still matches the host prefix
            ("a15", "email me at someone@example.com"),
        ];
        let expected = vec![
            ("a01", "alpha.tumblr.com"),
            ("a04", "gamma.tumblr.com"),
            ("a05", "d1.tumblr.com"),
            ("a05", "d2.tumblr.com"),
            ("a10", "ETA.tumblr.com"),
            ("a12", "theta.tumblr.com"),
            ("a14", "kappa.tumblr.com"),
            ("a02", "beta_99"),
            ("a08", "epsilon"),
        ];
        let got = extract_profile_links(profiles, &patterns);
        let got: Vec<(&str, &str)> = got.iter().map(|(u, a)| (u.as_str(), a.as_str())).collect();
        // same multiset; per-user ordering is pattern-major
        let mut got_sorted = got.clone();
        got_sorted.sort_unstable();
        let mut expected_sorted = expected.clone();
        expected_sorted.sort_unstable();
        assert_eq!(got_sorted, expected_sorted);
    }

    #[test]
    fn partition_covers_all_vertices() {
        let g = build_graph(vec![
            rec("A", "B", 1),
            rec("B", "A", 1),
            rec("B", "C", 2),
            rec("C", "B", 2),
        ]);
        let labels = gps_ground_truth(vec![
            ("A".to_string(), p(0.0, 0.0)),
            ("Z".to_string(), p(1.0, 1.0)), // not in the graph
        ]);
        let (labeled, unlabeled) = partition(&g, &labels);
        assert_eq!(labeled.len() + unlabeled.len(), g.vertex_count());
        assert_eq!(labeled, vec![g.user_index("A").unwrap()]);
    }
}
