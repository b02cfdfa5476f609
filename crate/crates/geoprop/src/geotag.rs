//! Document geotagging from share logs.
//!
//! A document's geotag is the robust center of the locations of the
//! distinct users who shared it, and its uncertainty is their MAD
//! dispersion. Documents shared by too few located users are rejected
//! outright; when a dispersion ceiling is configured, overly-dispersed
//! documents are rejected too, though their computed center and dispersion
//! are still reported so accuracy/coverage trade-off curves can be drawn
//! from a single pass.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;
use url::Url;

use crate::geodesy::GeoPoint;
use crate::propagation::LocationEstimate;
use crate::robust::{summarize, WeightedPointSet};
use crate::{Error, Result};

/// One share of a URL by a user. The URL is canonical (see
/// [`canonicalize_url`]); the timestamp is informational and uninterpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareEvent {
    pub url: String,
    pub user: String,
    pub timestamp: Option<String>,
}

impl ShareEvent {
    /// Builds an event, canonicalizing the raw URL.
    pub fn new(raw_url: &str, user: impl Into<String>, timestamp: Option<String>) -> Result<Self> {
        Ok(ShareEvent {
            url: canonicalize_url(raw_url)?,
            user: user.into(),
            timestamp,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeotagStatus {
    Geotagged,
    RejectedTooFewUsers,
    RejectedDispersion,
}

impl GeotagStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeotagStatus::Geotagged => "GEOTAGGED",
            GeotagStatus::RejectedTooFewUsers => "REJECTED_TOO_FEW_USERS",
            GeotagStatus::RejectedDispersion => "REJECTED_DISPERSION",
        }
    }

    pub fn parse(s: &str) -> Option<GeotagStatus> {
        match s {
            "GEOTAGGED" => Some(GeotagStatus::Geotagged),
            "REJECTED_TOO_FEW_USERS" => Some(GeotagStatus::RejectedTooFewUsers),
            "REJECTED_DISPERSION" => Some(GeotagStatus::RejectedDispersion),
            _ => None,
        }
    }
}

/// Geotagging outcome for one URL. `location` and `dispersion_km` are
/// absent only for `REJECTED_TOO_FEW_USERS`, where no median is computed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeotagResult {
    pub url: String,
    pub location: Option<GeoPoint>,
    pub dispersion_km: Option<f64>,
    pub distinct_located_users: usize,
    pub status: GeotagStatus,
}

/// Minimal URL canonicalization: lowercases scheme and host, strips the
/// fragment, drops the lone trailing slash of an empty path, preserves the
/// query string. Deterministic and idempotent.
pub fn canonicalize_url(raw: &str) -> Result<String> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(Error::UnparsableUrl("empty URL".into()));
    }
    let mut parsed =
        Url::parse(trimmed).map_err(|e| Error::UnparsableUrl(format!("{trimmed}: {e}")))?;
    parsed.set_fragment(None);
    let Some(host) = parsed.host_str() else {
        // no authority component (mailto: and friends): keep as serialized
        return Ok(parsed.into());
    };
    let mut out = String::with_capacity(trimmed.len());
    out.push_str(parsed.scheme());
    out.push_str("://");
    if !parsed.username().is_empty() {
        out.push_str(parsed.username());
        if let Some(password) = parsed.password() {
            out.push(':');
            out.push_str(password);
        }
        out.push('@');
    }
    out.push_str(host);
    if let Some(port) = parsed.port() {
        out.push(':');
        out.push_str(&port.to_string());
    }
    let path = parsed.path();
    if path != "/" {
        out.push_str(path);
    }
    if let Some(query) = parsed.query() {
        out.push('?');
        out.push_str(query);
    }
    Ok(out)
}

/// Keeps exactly the events whose canonical URL matches the pattern.
pub fn filter_by_pattern(
    shares: impl IntoIterator<Item = ShareEvent>,
    pattern: &Regex,
) -> Vec<ShareEvent> {
    shares
        .into_iter()
        .filter(|event| pattern.is_match(&event.url))
        .collect()
}

/// Geotags every URL in the share log.
///
/// Per URL, the sharer set is deduplicated by user and restricted to users
/// present in `locations` (one location per distinct user no matter how
/// often they shared). Fewer than `min_users` located sharers rejects the
/// document; otherwise the sharer locations are summarized and, when
/// `max_dispersion_km` is set and exceeded, the document is rejected for
/// dispersion with its computed values attached. Results come back sorted
/// by URL.
pub fn geotag_documents(
    shares: &[ShareEvent],
    locations: &BTreeMap<String, LocationEstimate>,
    min_users: usize,
    max_dispersion_km: Option<f64>,
) -> Result<Vec<GeotagResult>> {
    if min_users < 1 {
        return Err(Error::InvalidConfig("min_users must be ≥ 1".into()));
    }
    if let Some(limit) = max_dispersion_km {
        if !(limit.is_finite() && limit >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "max_dispersion_km must be non-negative, got {limit}"
            )));
        }
    }
    let mut sharers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for event in shares {
        sharers
            .entry(event.url.as_str())
            .or_default()
            .insert(event.user.as_str());
    }
    let mut results = Vec::with_capacity(sharers.len());
    for (url, users) in sharers {
        let located: Vec<GeoPoint> = users
            .iter()
            .filter_map(|user| locations.get(*user).map(|est| est.location))
            .collect();
        let n = located.len();
        if n < min_users {
            results.push(GeotagResult {
                url: url.to_string(),
                location: None,
                dispersion_km: None,
                distinct_located_users: n,
                status: GeotagStatus::RejectedTooFewUsers,
            });
            continue;
        }
        let summary = summarize(&WeightedPointSet::unweighted(located), false)
            .expect("located set is non-empty");
        let status = match max_dispersion_km {
            Some(limit) if summary.dispersion_km > limit => GeotagStatus::RejectedDispersion,
            _ => GeotagStatus::Geotagged,
        };
        results.push(GeotagResult {
            url: url.to_string(),
            location: Some(summary.center),
            dispersion_km: Some(summary.dispersion_km),
            distinct_located_users: n,
            status,
        });
    }
    Ok(results)
}
