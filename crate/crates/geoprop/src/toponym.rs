//! Gazetteer loading, unambiguous-toponym construction, and the
//! text-mention geotagging baseline.
//!
//! A toponym counts as unambiguous when enough distinct users list it as
//! their profile location, their GPS positions sit close to the gazetteer
//! coordinate (median discrepancy under a threshold), and the name is long
//! enough not to collide with abbreviations and slang.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::geodesy::{distance_km, GeoPoint};
use crate::graph::normalize_place_name;
use crate::robust::lower_median;

/// One gazetteer row.
#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    pub name: String,
    pub location: GeoPoint,
    pub population: Option<u64>,
}

/// Result of looking a place name up in the gazetteer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NameLookup {
    Unique(GeoPoint),
    /// The name maps to more than one distinct coordinate.
    Ambiguous,
    NotFound,
}

/// A name → location dictionary. Names are indexed in canonical form
/// (NFC, ASCII whitespace trimmed); a name listed at several distinct
/// coordinates resolves as [`NameLookup::Ambiguous`].
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    by_name: HashMap<String, NameLookup>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Gazetteer {
        let mut by_name: HashMap<String, NameLookup> = HashMap::new();
        for entry in &entries {
            let key = normalize_place_name(&entry.name);
            match by_name.get(&key) {
                None => {
                    by_name.insert(key, NameLookup::Unique(entry.location));
                }
                Some(NameLookup::Unique(existing)) if *existing != entry.location => {
                    by_name.insert(key, NameLookup::Ambiguous);
                }
                _ => {}
            }
        }
        Gazetteer { entries, by_name }
    }

    /// Looks up raw profile text; normalization is applied here.
    pub fn lookup(&self, raw: &str) -> NameLookup {
        self.by_name
            .get(&normalize_place_name(raw))
            .copied()
            .unwrap_or(NameLookup::NotFound)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Accumulated evidence for one toponym.
#[derive(Debug, Clone, PartialEq)]
pub struct ToponymStats {
    pub name: String,
    pub gazetteer_location: GeoPoint,
    /// Distinct users who listed this name as their profile location.
    pub n_users: usize,
    /// Median distance between the users' GPS points and the gazetteer
    /// coordinate.
    pub median_gps_discrepancy_km: f64,
}

/// The retained toponyms with their build-time statistics, keyed by
/// canonical name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnambiguousToponymSet {
    entries: BTreeMap<String, ToponymStats>,
}

impl UnambiguousToponymSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn location_of(&self, name: &str) -> Option<GeoPoint> {
        self.entries.get(name).map(|s| s.gazetteer_location)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ToponymStats)> {
        self.entries.iter()
    }

    pub fn insert(&mut self, stats: ToponymStats) {
        self.entries.insert(stats.name.clone(), stats);
    }
}

/// One (user, profile text, GPS point) observation feeding the toponym
/// filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ToponymObservation {
    pub user: String,
    pub text: String,
    pub gps: GeoPoint,
}

/// Builds the unambiguous-toponym set.
///
/// Every observation whose profile text exactly matches a gazetteer name
/// contributes its user to the distinct-user count and the distance from
/// its GPS point to the gazetteer coordinate to the discrepancy list. A
/// name is retained iff distinct users ≥ `min_users`, the median
/// discrepancy ≤ `max_median_km`, and the name has ≥ `min_chars` Unicode
/// scalars. Names the gazetteer itself holds at several coordinates are
/// skipped.
pub fn build_unambiguous(
    observations: impl IntoIterator<Item = ToponymObservation>,
    gazetteer: &Gazetteer,
    min_users: usize,
    max_median_km: f64,
    min_chars: usize,
) -> UnambiguousToponymSet {
    struct Acc {
        location: GeoPoint,
        users: BTreeSet<String>,
        discrepancies: Vec<f64>,
    }
    let mut by_name: BTreeMap<String, Acc> = BTreeMap::new();
    for obs in observations {
        let key = normalize_place_name(&obs.text);
        let NameLookup::Unique(location) = gazetteer.lookup(&key) else {
            continue;
        };
        let acc = by_name.entry(key).or_insert_with(|| Acc {
            location,
            users: BTreeSet::new(),
            discrepancies: Vec::new(),
        });
        acc.users.insert(obs.user);
        acc.discrepancies.push(distance_km(obs.gps, location));
    }
    let mut set = UnambiguousToponymSet::default();
    for (name, mut acc) in by_name {
        if name.chars().count() < min_chars || acc.users.len() < min_users {
            continue;
        }
        let median = lower_median(&mut acc.discrepancies);
        if median > max_median_km {
            continue;
        }
        set.insert(ToponymStats {
            name,
            gazetteer_location: acc.location,
            n_users: acc.users.len(),
            median_gps_discrepancy_km: median,
        });
    }
    set
}

fn occurs_on_word_boundary(text: &str, name: &str) -> bool {
    if name.is_empty() {
        return false;
    }
    let mut from = 0;
    while let Some(pos) = text[from..].find(name) {
        let start = from + pos;
        let end = start + name.len();
        let left_ok = start == 0
            || !text[..start]
                .chars()
                .next_back()
                .is_some_and(char::is_alphanumeric);
        let right_ok = end == text.len()
            || !text[end..]
                .chars()
                .next()
                .is_some_and(char::is_alphanumeric);
        if left_ok && right_ok {
            return true;
        }
        from = start + text[start..].chars().next().map_or(1, char::len_utf8);
    }
    false
}

/// The distinct unambiguous toponyms occurring in `text` as case-sensitive
/// substrings on word boundaries. Text is NFC-normalized to match the
/// canonical names.
pub fn matched_toponyms<'a>(text: &str, set: &'a UnambiguousToponymSet) -> Vec<&'a str> {
    let normalized: String = {
        use unicode_normalization::UnicodeNormalization;
        text.nfc().collect()
    };
    set.entries
        .keys()
        .filter(|name| occurs_on_word_boundary(&normalized, name))
        .map(|name| name.as_str())
        .collect()
}

/// Geotags a text snippet by toponym mention: returns the location when
/// exactly one distinct unambiguous toponym occurs, nothing for zero
/// matches, and nothing for multi-match (ambiguous) documents.
pub fn geotag_by_toponym(text: &str, set: &UnambiguousToponymSet) -> Option<GeoPoint> {
    let matches = matched_toponyms(text, set);
    match matches.as_slice() {
        [single] => set.location_of(single),
        _ => None,
    }
}
