//! Flat-file formats for every pipeline stage.
//!
//! All tabular files are UTF-8 TSV. Lines starting with `#` and blank
//! lines are ignored. Free-text fields (profile text, toponym observation
//! text) escape tabs, newlines, and backslashes so each record stays on
//! one line. Coordinates are serialized with six fractional digits and
//! kilometer quantities with three; evaluation outputs are CSV with a
//! header row. Writers are atomic: content lands in a sibling `.tmp` file
//! that is renamed into place.
//!
//! Readers run lenient by default — malformed lines are skipped and
//! reported with their line numbers — and fail on the first malformed
//! line in strict mode.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::eval::{CurvePoint, CvSummary, DiscrepancyRecord};
use crate::geodesy::GeoPoint;
use crate::geotag::{GeotagResult, ShareEvent};
use crate::graph::{
    GroundTruthLabel, GroundTruthLabels, LabelSource, MentionRecord, ProfileRow, SocialGraph,
};
use crate::propagation::{LocationEstimate, Provenance, SolverReport};
use crate::toponym::{
    Gazetteer, GazetteerEntry, ToponymObservation, ToponymStats, UnambiguousToponymSet,
};
use crate::{Error, Result};

/// What a reader skipped and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

/// Per-file ingestion summary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Total lines in the file, comments and blanks included.
    pub lines: usize,
    /// Records accepted.
    pub records: usize,
    /// Malformed or otherwise unusable lines (lenient mode only).
    pub skipped: Vec<SkippedLine>,
    /// Mention records with src == dst, dropped by definition.
    pub self_mentions_dropped: usize,
}

/// Degrees with six fractional digits; negative zero normalized away.
pub fn fmt_deg(value: f64) -> String {
    let rounded = (value * 1e6).round() / 1e6;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:.6}")
}

/// Kilometers with three fractional digits; negative zero normalized away.
pub fn fmt_km(value: f64) -> String {
    let rounded = (value * 1e3).round() / 1e3;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:.3}")
}

/// Escapes a free-text field for one-line TSV storage.
pub fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
    out
}

/// Inverse of [`escape_text`]. Unknown escapes are kept verbatim.
pub fn unescape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes via a sibling temp file renamed into place.
pub fn atomic_write(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let mut tmp_name = path
        .file_name()
        .ok_or_else(|| io_error(path, std::io::Error::other("path has no file name")))?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

/// Shared reader state: raw lines plus strict/lenient skip handling.
struct TsvFile {
    path: String,
    contents: String,
    strict: bool,
}

impl TsvFile {
    fn open(path: &Path, strict: bool) -> Result<TsvFile> {
        let contents = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Ok(TsvFile {
            path: path.display().to_string(),
            contents,
            strict,
        })
    }

    /// Data lines with 1-based numbers; comments and blanks skipped.
    fn data_lines(&self) -> impl Iterator<Item = (usize, &str)> {
        self.contents
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
    }

    fn reject(&self, report: &mut ParseReport, line: usize, reason: String) -> Result<()> {
        if self.strict {
            Err(Error::Malformed {
                path: self.path.clone(),
                line,
                reason,
            })
        } else {
            report.skipped.push(SkippedLine { line, reason });
            Ok(())
        }
    }
}

fn parse_count(field: &str) -> std::result::Result<u64, String> {
    match field.parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("count must be positive".into()),
        Err(_) => Err(format!("bad count {field:?}")),
    }
}

fn parse_point(lat: &str, lon: &str) -> std::result::Result<GeoPoint, String> {
    let lat: f64 = lat.parse().map_err(|_| format!("bad latitude {lat:?}"))?;
    let lon: f64 = lon.parse().map_err(|_| format!("bad longitude {lon:?}"))?;
    GeoPoint::new(lat, lon).map_err(|e| e.to_string())
}

fn parse_km(field: &str) -> std::result::Result<f64, String> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("bad kilometer value {field:?}")),
    }
}

macro_rules! accept_or_continue {
    ($file:expr, $report:expr, $line:expr, $parsed:expr) => {
        match $parsed {
            Ok(value) => value,
            Err(reason) => {
                $file.reject(&mut $report, $line, reason)?;
                continue;
            }
        }
    };
}

/// Mention file: `src<TAB>dst<TAB>count`.
pub fn read_mentions(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(Vec<MentionRecord>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut records = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            file.reject(
                &mut report,
                line,
                format!("expected 3 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        let count = accept_or_continue!(file, report, line, parse_count(fields[2]));
        if fields[0] == fields[1] {
            report.self_mentions_dropped += 1;
            continue;
        }
        records.push(MentionRecord {
            src: fields[0].to_string(),
            dst: fields[1].to_string(),
            count,
        });
        report.records += 1;
    }
    Ok((records, report))
}

/// Graph file: `user_a<TAB>user_b<TAB>weight`, one line per undirected
/// reciprocated edge.
pub fn write_graph(path: impl AsRef<Path>, graph: &SocialGraph) -> Result<()> {
    let mut out = String::from("# user_a\tuser_b\tweight\n");
    for &(i, j, w) in graph.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", graph.user(i), graph.user(j), w);
    }
    atomic_write(path, &out)
}

pub fn read_graph(path: impl AsRef<Path>, strict: bool) -> Result<(SocialGraph, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            file.reject(
                &mut report,
                line,
                format!("expected 3 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0] == fields[1] {
            file.reject(&mut report, line, "self-loop".into())?;
            continue;
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        let weight = accept_or_continue!(file, report, line, parse_count(fields[2]));
        let (a, b) = if fields[0] < fields[1] {
            (fields[0], fields[1])
        } else {
            (fields[1], fields[0])
        };
        if edges.contains_key(&(a.to_string(), b.to_string())) {
            file.reject(&mut report, line, format!("duplicate edge {a}--{b}"))?;
            continue;
        }
        edges.insert((a.to_string(), b.to_string()), weight);
        report.records += 1;
    }
    Ok((SocialGraph::from_edge_map(edges), report))
}

/// GPS observation file: `user<TAB>lat<TAB>lon`, one row per observation.
pub fn read_gps_observations(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(Vec<(String, GeoPoint)>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut observations = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            file.reject(
                &mut report,
                line,
                format!("expected 3 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        let point = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        observations.push((fields[0].to_string(), point));
        report.records += 1;
    }
    Ok((observations, report))
}

/// Profile file: `user<TAB>text[<TAB>last_seen_iso8601]`; text is escaped.
pub fn read_profiles(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(Vec<ProfileRow>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut rows = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            file.reject(
                &mut report,
                line,
                format!("expected 2-3 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        rows.push(ProfileRow {
            user: fields[0].to_string(),
            text: unescape_text(fields[1]),
            last_seen: fields.get(2).map(|s| s.to_string()),
        });
        report.records += 1;
    }
    Ok((rows, report))
}

/// Label file: `user<TAB>lat<TAB>lon<TAB>source[<TAB>last_seen_iso8601]`.
pub fn write_labels(path: impl AsRef<Path>, labels: &GroundTruthLabels) -> Result<()> {
    let mut out = String::from("# columns: user, lat, lon, source, [last_seen]\n");
    for (user, label) in labels.iter() {
        let _ = write!(
            out,
            "{user}\t{}\t{}\t{}",
            fmt_deg(label.location.lat()),
            fmt_deg(label.location.lon()),
            label.source.as_str()
        );
        if let Some(last_seen) = &label.last_seen {
            let _ = write!(out, "\t{last_seen}");
        }
        out.push('\n');
    }
    atomic_write(path, &out)
}

pub fn read_labels(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(GroundTruthLabels, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut labels = GroundTruthLabels::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(4..=5).contains(&fields.len()) {
            file.reject(
                &mut report,
                line,
                format!("expected 4-5 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        let location = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        let Some(source) = LabelSource::parse(fields[3]) else {
            file.reject(
                &mut report,
                line,
                format!("unknown label source {:?}", fields[3]),
            )?;
            continue;
        };
        if labels.contains(fields[0]) {
            file.reject(
                &mut report,
                line,
                format!("duplicate label for user {:?}", fields[0]),
            )?;
            continue;
        }
        labels.insert(
            fields[0].to_string(),
            GroundTruthLabel {
                location,
                source,
                last_seen: fields.get(4).map(|s| s.to_string()),
            },
        );
        report.records += 1;
    }
    Ok((labels, report))
}

/// Estimate file:
/// `user<TAB>lat<TAB>lon<TAB>provenance<TAB>dispersion_km<TAB>iteration`.
pub fn write_estimates(
    path: impl AsRef<Path>,
    estimates: &BTreeMap<String, LocationEstimate>,
) -> Result<()> {
    let mut out = String::from("# user\tlat\tlon\tprovenance\tdispersion_km\titeration\n");
    for (user, est) in estimates {
        let _ = writeln!(
            out,
            "{user}\t{}\t{}\t{}\t{}\t{}",
            fmt_deg(est.location.lat()),
            fmt_deg(est.location.lon()),
            est.provenance.as_str(),
            fmt_km(est.neighbor_dispersion_km),
            est.iteration_assigned
        );
    }
    atomic_write(path, &out)
}

pub fn read_estimates(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(BTreeMap<String, LocationEstimate>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut estimates = BTreeMap::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 6 {
            file.reject(
                &mut report,
                line,
                format!("expected 6 fields, got {}", fields.len()),
            )?;
            continue;
        }
        let location = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        let Some(provenance) = Provenance::parse(fields[3]) else {
            file.reject(
                &mut report,
                line,
                format!("unknown provenance {:?}", fields[3]),
            )?;
            continue;
        };
        let dispersion = accept_or_continue!(file, report, line, parse_km(fields[4]));
        let iteration = match fields[5].parse::<u32>() {
            Ok(i) => i,
            Err(_) => {
                file.reject(&mut report, line, format!("bad iteration {:?}", fields[5]))?;
                continue;
            }
        };
        if estimates.contains_key(fields[0]) {
            file.reject(
                &mut report,
                line,
                format!("duplicate estimate for user {:?}", fields[0]),
            )?;
            continue;
        }
        estimates.insert(
            fields[0].to_string(),
            LocationEstimate {
                location,
                provenance,
                neighbor_dispersion_km: dispersion,
                iteration_assigned: iteration,
            },
        );
        report.records += 1;
    }
    Ok((estimates, report))
}

/// Reads a user→location map from either an estimate file (6 columns) or a
/// label file (4-5 columns), sniffing on the first data line. Labels are
/// lifted to ground-truth estimates.
pub fn read_locations_any(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(BTreeMap<String, LocationEstimate>, ParseReport)> {
    let path = path.as_ref();
    let probe = TsvFile::open(path, strict)?;
    let Some((_, first)) = probe.data_lines().next() else {
        return Ok((BTreeMap::new(), ParseReport::default()));
    };
    if first.split('\t').count() == 6 {
        read_estimates(path, strict)
    } else {
        let (labels, report) = read_labels(path, strict)?;
        let mut estimates = BTreeMap::new();
        for (user, label) in labels.iter() {
            estimates.insert(
                user.clone(),
                LocationEstimate {
                    location: label.location,
                    provenance: Provenance::GroundTruth,
                    neighbor_dispersion_km: 0.0,
                    iteration_assigned: 0,
                },
            );
        }
        Ok((estimates, report))
    }
}

/// Solver report CSV: one row per iteration.
pub fn write_report_csv(path: impl AsRef<Path>, report: &SolverReport) -> Result<()> {
    let mut out = String::from("iteration,located_count,moved_count,objective_km\n");
    for stats in &report.iterations {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            stats.iteration,
            stats.located_count,
            stats.moved_count,
            fmt_km(stats.objective_km)
        );
    }
    atomic_write(path, &out)
}

/// Share file: `url<TAB>user[<TAB>timestamp]`. URLs are canonicalized on
/// read; events with unparsable URLs are always skipped and counted, never
/// fatal.
pub fn read_shares(path: impl AsRef<Path>, strict: bool) -> Result<(Vec<ShareEvent>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut events = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            file.reject(
                &mut report,
                line,
                format!("expected 2-3 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[1].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        match ShareEvent::new(fields[0], fields[1], fields.get(2).map(|s| s.to_string())) {
            Ok(event) => {
                events.push(event);
                report.records += 1;
            }
            Err(e) => {
                report.skipped.push(SkippedLine {
                    line,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok((events, report))
}

/// Geotag result file:
/// `url<TAB>status<TAB>lat<TAB>lon<TAB>dispersion_km<TAB>n_users`; the
/// location fields are empty for `REJECTED_TOO_FEW_USERS`.
pub fn write_geotag_results(path: impl AsRef<Path>, results: &[GeotagResult]) -> Result<()> {
    let mut out = String::from("# url\tstatus\tlat\tlon\tdispersion_km\tn_users\n");
    for r in results {
        let (lat, lon, disp) = match (r.location, r.dispersion_km) {
            (Some(location), Some(dispersion)) => (
                fmt_deg(location.lat()),
                fmt_deg(location.lon()),
                fmt_km(dispersion),
            ),
            _ => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.url,
            r.status.as_str(),
            lat,
            lon,
            disp,
            r.distinct_located_users
        );
    }
    atomic_write(path, &out)
}

/// Gazetteer file: `name<TAB>lat<TAB>lon[<TAB>population]`.
pub fn read_gazetteer(path: impl AsRef<Path>, strict: bool) -> Result<(Gazetteer, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut entries = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            file.reject(
                &mut report,
                line,
                format!("expected 3-4 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() {
            file.reject(&mut report, line, "empty name".into())?;
            continue;
        }
        let location = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        let population = match fields.get(3) {
            None => None,
            Some(f) => match f.parse::<u64>() {
                Ok(population) => Some(population),
                Err(_) => {
                    file.reject(&mut report, line, format!("bad population {f:?}"))?;
                    continue;
                }
            },
        };
        entries.push(GazetteerEntry {
            name: fields[0].to_string(),
            location,
            population,
        });
        report.records += 1;
    }
    Ok((Gazetteer::new(entries), report))
}

/// Toponym observation file: `user<TAB>text<TAB>lat<TAB>lon`; text is
/// escaped. The GPS point is the user's position, the text their profile
/// location field.
pub fn read_toponym_observations(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(Vec<ToponymObservation>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut observations = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            file.reject(
                &mut report,
                line,
                format!("expected 4 fields, got {}", fields.len()),
            )?;
            continue;
        }
        if fields[0].is_empty() {
            file.reject(&mut report, line, "empty user ID".into())?;
            continue;
        }
        let gps = accept_or_continue!(file, report, line, parse_point(fields[2], fields[3]));
        observations.push(ToponymObservation {
            user: fields[0].to_string(),
            text: unescape_text(fields[1]),
            gps,
        });
        report.records += 1;
    }
    Ok((observations, report))
}

/// Toponym set file: `name<TAB>lat<TAB>lon<TAB>n_users<TAB>median_km`.
pub fn write_toponyms(path: impl AsRef<Path>, set: &UnambiguousToponymSet) -> Result<()> {
    let mut out = String::from("# name\tlat\tlon\tn_users\tmedian_km\n");
    for (name, stats) in set.iter() {
        let _ = writeln!(
            out,
            "{name}\t{}\t{}\t{}\t{}",
            fmt_deg(stats.gazetteer_location.lat()),
            fmt_deg(stats.gazetteer_location.lon()),
            stats.n_users,
            fmt_km(stats.median_gps_discrepancy_km)
        );
    }
    atomic_write(path, &out)
}

pub fn read_toponyms(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(UnambiguousToponymSet, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut set = UnambiguousToponymSet::default();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 5 {
            file.reject(
                &mut report,
                line,
                format!("expected 5 fields, got {}", fields.len()),
            )?;
            continue;
        }
        let location = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        let n_users = match fields[3].parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                file.reject(&mut report, line, format!("bad user count {:?}", fields[3]))?;
                continue;
            }
        };
        let median = accept_or_continue!(file, report, line, parse_km(fields[4]));
        set.insert(ToponymStats {
            name: fields[0].to_string(),
            gazetteer_location: location,
            n_users,
            median_gps_discrepancy_km: median,
        });
        report.records += 1;
    }
    Ok((set, report))
}

/// Discrepancy record file:
/// `id<TAB>pred_lat<TAB>pred_lon<TAB>ref_lat<TAB>ref_lon<TAB>dispersion_km`.
/// The discrepancy column is not stored; it is recomputed from the points.
pub fn read_discrepancy_records(
    path: impl AsRef<Path>,
    strict: bool,
) -> Result<(Vec<DiscrepancyRecord>, ParseReport)> {
    let file = TsvFile::open(path.as_ref(), strict)?;
    let mut report = ParseReport::default();
    let mut records = Vec::new();
    for (line, raw) in file.data_lines() {
        report.lines = line;
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 6 {
            file.reject(
                &mut report,
                line,
                format!("expected 6 fields, got {}", fields.len()),
            )?;
            continue;
        }
        let predicted = accept_or_continue!(file, report, line, parse_point(fields[1], fields[2]));
        let reference = accept_or_continue!(file, report, line, parse_point(fields[3], fields[4]));
        let dispersion = accept_or_continue!(file, report, line, parse_km(fields[5]));
        records.push(DiscrepancyRecord::new(
            fields[0], predicted, reference, dispersion,
        ));
        report.records += 1;
    }
    Ok((records, report))
}

fn csv_cell_km(value: Option<f64>) -> String {
    value.map(fmt_km).unwrap_or_default()
}

/// CDF CSV: `threshold_km,fraction`.
pub fn write_cdf_csv(path: impl AsRef<Path>, cdf: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("threshold_km,fraction\n");
    for &(threshold, fraction) in cdf {
        let _ = writeln!(out, "{},{fraction:.6}", fmt_km(threshold));
    }
    atomic_write(path, &out)
}

/// Coverage CSV: `threshold_km,coverage_fraction,median_km,mean_km,n`;
/// statistic cells are empty when nothing is retained.
pub fn write_coverage_csv(path: impl AsRef<Path>, curve: &[CurvePoint]) -> Result<()> {
    let mut out = String::from("threshold_km,coverage_fraction,median_km,mean_km,n\n");
    for point in curve {
        let _ = writeln!(
            out,
            "{},{:.6},{},{},{}",
            fmt_km(point.threshold_km),
            point.coverage_fraction,
            csv_cell_km(point.median_km),
            csv_cell_km(point.mean_km),
            point.n
        );
    }
    atomic_write(path, &out)
}

/// Characteristic-curve CSV: `mean_km,coverage_fraction`.
pub fn write_characteristic_csv(path: impl AsRef<Path>, curve: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("mean_km,coverage_fraction\n");
    for &(mean, coverage) in curve {
        let _ = writeln!(out, "{},{coverage:.6}", fmt_km(mean));
    }
    atomic_write(path, &out)
}

/// Cross-validation CSV: a single data row.
pub fn write_cv_csv(path: impl AsRef<Path>, summary: &CvSummary) -> Result<()> {
    let mut out =
        String::from("median_km,mean_km,stddev_km,located_fraction,n_holdout,n_located\n");
    let _ = writeln!(
        out,
        "{},{},{},{:.6},{},{}",
        csv_cell_km(summary.median_km),
        csv_cell_km(summary.mean_km),
        csv_cell_km(summary.stddev_km),
        summary.located_fraction,
        summary.holdout_size,
        summary.located_count
    );
    atomic_write(path, &out)
}
