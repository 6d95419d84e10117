//! Loading and validation of multi-channel smart-meter CSV data.
//!
//! A meter file has one `timestamp` column followed by one column per
//! channel, values in kW. A channel-kind schema names the mains column and
//! any generator columns; everything else is a consumer. After loading, a
//! [`MeterSeries`] is guaranteed to be on a uniform time grid with no
//! missing values: single-row gaps are filled by linear interpolation,
//! longer gaps are rejected.
//!
//! The conservation relation ties the mains reading to the per-channel
//! readings: `mains = sum(consumers) - sum(generators)`. Real data never
//! satisfies it exactly, so [`check_conservation`] reports the residual and
//! [`synthesize_residual_channel`] folds the positive part of the residual
//! into an extra `unmetered` consumer channel.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator floor when expressing residuals relative to the mains value.
pub const EPSILON_DIV: f64 = 1e-9;

/// Name of the consumer channel synthesized from the conservation residual.
pub const UNMETERED_CHANNEL: &str = "unmetered";

/// What role a channel plays in the meter's energy balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Draws power from the meter.
    Consumer,
    /// Produces power (e.g. a solar panel); values store production magnitude.
    Generator,
    /// The meter's total; exactly one per series.
    Mains,
}

/// A named channel together with its role.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelId {
    name: String,
    kind: ChannelKind,
}

impl ChannelId {
    pub fn new(name: impl Into<String>, kind: ChannelKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }
}

/// Channel-kind mapping for a CSV file: which column is the mains and which
/// columns are generators. Unlisted columns default to consumers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSchema {
    pub mains: String,
    #[serde(default)]
    pub generators: Vec<String>,
}

impl ChannelSchema {
    /// Schema that maps the column literally named `mains` to the mains
    /// channel and everything else to consumers.
    pub fn default_mains() -> Self {
        Self {
            mains: "mains".to_string(),
            generators: Vec::new(),
        }
    }

    /// Parse the `{"mains": ..., "generators": [...]}` JSON document.
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    fn kind_of(&self, column: &str) -> ChannelKind {
        if column == self.mains {
            ChannelKind::Mains
        } else if self.generators.iter().any(|g| g == column) {
            ChannelKind::Generator
        } else {
            ChannelKind::Consumer
        }
    }
}

/// Aligned multi-channel time series for one node.
///
/// Values are stored column-major (one `Vec<f64>` per channel); all columns
/// share the `timestamps` grid, which is strictly increasing with a constant
/// `sample_interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterSeries {
    node_id: String,
    channels: Vec<ChannelId>,
    columns: Vec<Vec<f64>>,
    timestamps: Vec<i64>,
    sample_interval: u64,
}

impl MeterSeries {
    /// Build a series from parts, validating every invariant: exactly one
    /// mains channel, unique non-empty channel names, one value per channel
    /// per timestamp, strictly increasing uniform timestamps, and
    /// non-negative finite values.
    pub fn new(
        node_id: impl Into<String>,
        channels: Vec<ChannelId>,
        timestamps: Vec<i64>,
        columns: Vec<Vec<f64>>,
        sample_interval: u64,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::Config("a series needs at least one channel".into()));
        }
        let mut seen = HashSet::new();
        for ch in &channels {
            if ch.name.is_empty() {
                return Err(Error::Config("channel names must be non-empty".into()));
            }
            if !seen.insert(ch.name.as_str()) {
                return Err(Error::DuplicateChannel(ch.name.clone()));
            }
        }
        match channels
            .iter()
            .filter(|c| c.kind == ChannelKind::Mains)
            .count()
        {
            0 => return Err(Error::NoMainsColumn),
            1 => {}
            n => {
                return Err(Error::Config(format!(
                    "{n} channels are mapped to mains; exactly one is required"
                )))
            }
        }
        if columns.len() != channels.len() {
            return Err(Error::Config(format!(
                "{} channels but {} value columns",
                channels.len(),
                columns.len()
            )));
        }
        if timestamps.is_empty() {
            return Err(Error::Config("a series needs at least one row".into()));
        }
        for (ch, col) in channels.iter().zip(&columns) {
            if col.len() != timestamps.len() {
                return Err(Error::Config(format!(
                    "channel '{}' has {} values for {} timestamps",
                    ch.name,
                    col.len(),
                    timestamps.len()
                )));
            }
            for (row, &v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Config(format!(
                        "non-finite value in channel '{}' at row {row}",
                        ch.name
                    )));
                }
                if v < 0.0 {
                    return Err(Error::NegativeValue {
                        channel: ch.name.clone(),
                        row,
                        value: v,
                    });
                }
            }
        }
        if sample_interval == 0 {
            return Err(Error::Config("sample interval must be positive".into()));
        }
        for pair in timestamps.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                return Err(Error::DuplicateTimestamp {
                    timestamp: format_timestamp(a),
                });
            }
            if b - a != sample_interval as i64 {
                return Err(Error::NonUniformInterval {
                    reason: format!(
                        "gap of {} s between {} and {} (expected {} s)",
                        b - a,
                        format_timestamp(a),
                        format_timestamp(b),
                        sample_interval
                    ),
                });
            }
        }
        Ok(Self {
            node_id: node_id.into(),
            channels,
            columns,
            timestamps,
            sample_interval,
        })
    }

    pub fn node_id(&self) -> &str {
        &self.node_id
    }

    pub fn channels(&self) -> &[ChannelId] {
        &self.channels
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    /// Seconds between consecutive samples.
    pub fn sample_interval(&self) -> u64 {
        self.sample_interval
    }

    /// Number of rows (timestamps).
    pub fn n_samples(&self) -> usize {
        self.timestamps.len()
    }

    /// All values of one channel, aligned with `timestamps`.
    pub fn channel_values(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .position(|c| c.name == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn mains(&self) -> (&ChannelId, &[f64]) {
        let i = self
            .channels
            .iter()
            .position(|c| c.kind == ChannelKind::Mains)
            .expect("validated: exactly one mains channel");
        (&self.channels[i], &self.columns[i])
    }

    /// Non-mains channels with their values, in column order.
    pub fn appliance_channels(&self) -> impl Iterator<Item = (&ChannelId, &[f64])> {
        self.channels
            .iter()
            .zip(&self.columns)
            .filter(|(c, _)| c.kind != ChannelKind::Mains)
            .map(|(c, v)| (c, v.as_slice()))
    }

    /// Same series under a different node id.
    pub fn with_node_id(mut self, node_id: impl Into<String>) -> Self {
        self.node_id = node_id.into();
        self
    }

    /// Copy of this series with one extra channel appended.
    pub fn with_channel(&self, channel: ChannelId, values: Vec<f64>) -> Result<Self> {
        let mut channels = self.channels.clone();
        let mut columns = self.columns.clone();
        channels.push(channel);
        columns.push(values);
        Self::new(
            self.node_id.clone(),
            channels,
            self.timestamps.clone(),
            columns,
            self.sample_interval,
        )
    }
}

/// What happened while loading a file, beyond the series itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadReport {
    /// Data rows read from the file (before gap filling).
    pub rows_read: usize,
    /// Rows synthesized by linear interpolation to fill single-row gaps.
    pub gaps_filled: usize,
}

/// Load a meter CSV into a [`MeterSeries`].
///
/// The node id is the file stem. Rows are sorted by timestamp; a single
/// missing row is filled by linear interpolation, two or more consecutive
/// missing rows are an error. Timestamps may be ISO-8601 or integer epoch
/// seconds.
pub fn load_csv(path: impl AsRef<Path>, schema: &ChannelSchema) -> Result<MeterSeries> {
    load_csv_with_report(path, schema).map(|(series, _)| series)
}

/// Like [`load_csv`] but also reports row and gap-fill counts.
pub fn load_csv_with_report(
    path: impl AsRef<Path>,
    schema: &ChannelSchema,
) -> Result<(MeterSeries, LoadReport)> {
    let path = path.as_ref();
    let node_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("meter")
        .to_string();

    // Flexible so short/long rows reach our own length check, which knows
    // the line number.
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0).map(str::trim) != Some("timestamp") {
        return Err(Error::BadHeader(
            "first column must be named 'timestamp'".into(),
        ));
    }
    let channel_names: Vec<String> = headers
        .iter()
        .skip(1)
        .map(|h| h.trim().to_string())
        .collect();
    if channel_names.is_empty() {
        return Err(Error::BadHeader(
            "no channel columns after 'timestamp'".into(),
        ));
    }
    let channels: Vec<ChannelId> = channel_names
        .iter()
        .map(|name| ChannelId::new(name.clone(), schema.kind_of(name)))
        .collect();
    if !channels.iter().any(|c| c.kind == ChannelKind::Mains) {
        return Err(Error::NoMainsColumn);
    }
    for gen in &schema.generators {
        if !channel_names.iter().any(|n| n == gen) {
            return Err(Error::Config(format!(
                "schema lists generator column '{gen}' which is not in the file"
            )));
        }
    }

    let mut rows: Vec<(i64, Vec<f64>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let record = record?;
        if record.len() != channel_names.len() + 1 {
            return Err(Error::MalformedRow {
                line,
                reason: format!(
                    "expected {} fields, got {}",
                    channel_names.len() + 1,
                    record.len()
                ),
            });
        }
        let ts = parse_timestamp(&record[0]).ok_or_else(|| Error::MalformedRow {
            line,
            reason: format!("unparseable timestamp '{}'", &record[0]),
        })?;
        let mut values = Vec::with_capacity(channel_names.len());
        for (field, name) in record.iter().skip(1).zip(&channel_names) {
            let v: f64 = field.trim().parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("unparseable number '{field}' in column '{name}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("non-finite value in column '{name}'"),
                });
            }
            values.push(v);
        }
        rows.push((ts, values));
    }

    if rows.is_empty() {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "CSV contains no data rows".into(),
        });
    }
    let rows_read = rows.len();
    rows.sort_by_key(|(ts, _)| *ts);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateTimestamp {
                timestamp: format_timestamp(pair[0].0),
            });
        }
    }
    let rows = fill_single_gaps(rows)?;
    let gaps_filled = rows.len() - rows_read;

    let interval = (rows[1].0 - rows[0].0) as u64;
    let timestamps: Vec<i64> = rows.iter().map(|(ts, _)| *ts).collect();
    let mut columns = vec![Vec::with_capacity(rows.len()); channel_names.len()];
    for (_, values) in &rows {
        for (col, &v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }

    let series = MeterSeries::new(node_id, channels, timestamps, columns, interval)?;
    Ok((
        series,
        LoadReport {
            rows_read,
            gaps_filled,
        },
    ))
}

/// Infer the base interval (minimum gap) and fill gaps of exactly one
/// missing row with the midpoint of the neighbors. Anything else is a
/// `NonUniformInterval` error.
fn fill_single_gaps(rows: Vec<(i64, Vec<f64>)>) -> Result<Vec<(i64, Vec<f64>)>> {
    if rows.len() < 2 {
        return Err(Error::NonUniformInterval {
            reason: "need at least two rows to infer the sample interval".into(),
        });
    }
    let base = rows
        .windows(2)
        .map(|p| p[1].0 - p[0].0)
        .min()
        .expect("len >= 2");
    debug_assert!(base > 0, "duplicates were rejected before gap filling");

    let mut filled = Vec::with_capacity(rows.len());
    let mut iter = rows.into_iter();
    let mut prev = iter.next().expect("len >= 2");
    for next in iter {
        let gap = next.0 - prev.0;
        if gap % base != 0 {
            return Err(Error::NonUniformInterval {
                reason: format!(
                    "gap of {} s between {} and {} is not a multiple of the base interval ({} s)",
                    gap,
                    format_timestamp(prev.0),
                    format_timestamp(next.0),
                    base
                ),
            });
        }
        match gap / base {
            1 => {}
            2 => {
                let mid_ts = prev.0 + base;
                let mid_values: Vec<f64> = prev
                    .1
                    .iter()
                    .zip(&next.1)
                    .map(|(a, b)| (a + b) / 2.0)
                    .collect();
                let mid = (mid_ts, mid_values);
                filled.push(std::mem::replace(&mut prev, mid));
            }
            missing => {
                return Err(Error::NonUniformInterval {
                    reason: format!(
                        "{} consecutive rows missing between {} and {}; only single-row gaps are filled",
                        missing - 1,
                        format_timestamp(prev.0),
                        format_timestamp(next.0)
                    ),
                });
            }
        }
        filled.push(std::mem::replace(&mut prev, next));
    }
    filled.push(prev);
    Ok(filled)
}

/// Write a series back to CSV in the same format [`load_csv`] reads.
///
/// Values use Rust's shortest round-trip float formatting, so a
/// write/load cycle reproduces the series bit for bit.
pub fn write_csv(series: &MeterSeries, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(series.channels().iter().map(|c| c.name().to_string()));
    writer.write_record(&header)?;
    for (row, &ts) in series.timestamps().iter().enumerate() {
        let mut record = vec![format_timestamp(ts)];
        for col in 0..series.channels().len() {
            record.push(series.column(col)[row].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-timestamp slack in the conservation relation
/// `mains = sum(consumers) - sum(generators)`.
#[derive(Debug, Clone)]
pub struct Residual {
    values: Vec<f64>,
    max_relative_violation: f64,
}

impl Residual {
    /// `mains[i] - sum(consumers[i]) + sum(generators[i])` per timestamp.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `max_i |residual[i]| / max(mains[i], 1e-9)`.
    pub fn max_relative_violation(&self) -> f64 {
        self.max_relative_violation
    }
}

/// Report how far the series is from exact conservation. Never fails and
/// never mutates; the caller decides whether the violation is acceptable.
pub fn check_conservation(series: &MeterSeries) -> Residual {
    let (_, mains) = series.mains();
    let mut values = vec![0.0; series.n_samples()];
    for (row, value) in values.iter_mut().enumerate() {
        let mut acc = mains[row];
        for (ch, col) in series.appliance_channels() {
            match ch.kind() {
                ChannelKind::Consumer => acc -= col[row],
                ChannelKind::Generator => acc += col[row],
                ChannelKind::Mains => unreachable!(),
            }
        }
        *value = acc;
    }
    let max_relative_violation = values
        .iter()
        .zip(mains)
        .map(|(r, m)| r.abs() / m.max(EPSILON_DIV))
        .fold(0.0, f64::max);
    Residual {
        values,
        max_relative_violation,
    }
}

/// Fold the positive part of the conservation residual into a new consumer
/// channel named `unmetered`, leaving the input untouched.
///
/// A residual below `-tolerance * mains` at any timestamp means more power
/// is metered than the mains supplies, which usually signals a generator
/// mislabeled as a consumer; that is rejected rather than hidden.
pub fn synthesize_residual_channel(series: &MeterSeries, tolerance: f64) -> Result<MeterSeries> {
    let residual = check_conservation(series);
    let (_, mains) = series.mains();
    for (row, (&r, &m)) in residual.values().iter().zip(mains).enumerate() {
        let limit = -tolerance * m;
        if r < limit {
            return Err(Error::NegativeResidual {
                row,
                residual: r,
                limit,
            });
        }
    }
    let unmetered: Vec<f64> = residual.values().iter().map(|r| r.max(0.0)).collect();
    series.with_channel(
        ChannelId::new(UNMETERED_CHANNEL, ChannelKind::Consumer),
        unmetered,
    )
}

/// Parse an ISO-8601 timestamp (`2019-05-01T04:00:00Z`, with or without
/// zone, `T` or space) or integer epoch seconds.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(epoch) = s.parse::<i64>() {
        return Some(epoch);
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc().timestamp());
        }
    }
    None
}

/// Epoch seconds as `2019-05-01T04:00:00Z` (UTC).
pub fn format_timestamp(t: i64) -> String {
    chrono::DateTime::from_timestamp(t, 0)
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| t.to_string())
}
