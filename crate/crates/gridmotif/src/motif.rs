//! Star-motif construction: the static topology of a meter and its
//! channels, per-window frames of symbol-carrying edges, and temporal
//! motifs spanning runs of consecutive windows.
//!
//! A frame's edge encodes "this channel drew (or fed) power at this level
//! during this window"; a channel whose raw window mean stays at or below
//! `epsilon_on` is off and gets no edge. Consecutive frames are compared
//! edge-by-edge to annotate level trends.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::ingest::{ChannelId, ChannelKind, MeterSeries};
use crate::symbolize::{Alphabet, SymbolSeries};

/// How a series is cut into fixed-length windows.
///
/// `stride == length` tiles the series without overlap; `stride < length`
/// makes consecutive windows share `length - stride` samples. Trailing
/// samples that do not fill a final window are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPlan {
    window_length_samples: usize,
    stride_samples: usize,
    window_timestamps: Vec<i64>,
}

impl WindowPlan {
    /// Build a plan directly from sample counts and window start instants.
    /// Timestamps must be strictly increasing and evenly spaced.
    pub fn new(
        window_length_samples: usize,
        stride_samples: usize,
        window_timestamps: Vec<i64>,
    ) -> Result<Self> {
        if window_length_samples == 0 {
            return Err(Error::Config(
                "window length must be at least 1 sample".into(),
            ));
        }
        if stride_samples == 0 {
            return Err(Error::Config("stride must be at least 1 sample".into()));
        }
        if stride_samples > window_length_samples {
            return Err(Error::StrideExceedsWindow {
                stride: stride_samples,
                window: window_length_samples,
            });
        }
        if window_timestamps.is_empty() {
            return Err(Error::Config(
                "a window plan needs at least one window".into(),
            ));
        }
        let spacing: Vec<i64> = window_timestamps.windows(2).map(|p| p[1] - p[0]).collect();
        if spacing.iter().any(|&d| d <= 0) {
            return Err(Error::Config(
                "window timestamps must be strictly increasing".into(),
            ));
        }
        if spacing.windows(2).any(|p| p[0] != p[1]) {
            return Err(Error::Config(
                "window timestamps must be evenly spaced".into(),
            ));
        }
        Ok(Self {
            window_length_samples,
            stride_samples,
            window_timestamps,
        })
    }

    pub fn window_length_samples(&self) -> usize {
        self.window_length_samples
    }

    pub fn stride_samples(&self) -> usize {
        self.stride_samples
    }

    /// Start instant of each window, strictly increasing.
    pub fn window_timestamps(&self) -> &[i64] {
        &self.window_timestamps
    }

    /// Number of windows (`w`).
    pub fn window_count(&self) -> usize {
        self.window_timestamps.len()
    }

    /// Samples consumed by the last window's end: `(w-1)*stride + length`.
    pub fn required_samples(&self) -> usize {
        (self.window_count() - 1) * self.stride_samples + self.window_length_samples
    }

    /// Trailing samples of an `n`-sample series this plan leaves unused.
    pub fn dropped_samples(&self, n_samples: usize) -> usize {
        n_samples.saturating_sub(self.required_samples())
    }

    /// Mean of `values[k*stride .. k*stride + length)` for each window `k`.
    pub fn window_means(&self, values: &[f64]) -> Result<Vec<f64>> {
        let required = self.required_samples();
        if required > values.len() {
            return Err(Error::PlanTooLong {
                required,
                available: values.len(),
            });
        }
        Ok((0..self.window_count())
            .map(|k| {
                let start = k * self.stride_samples;
                let window = &values[start..start + self.window_length_samples];
                window.iter().sum::<f64>() / window.len() as f64
            })
            .collect())
    }
}

/// Cut a series into windows. Both durations must be positive exact
/// multiples of the sampling interval, and the window must fit the series.
pub fn plan_windows(
    series: &MeterSeries,
    window_length_secs: u64,
    stride_secs: u64,
) -> Result<WindowPlan> {
    let interval = series.sample_interval();
    for (what, value) in [
        ("window length", window_length_secs),
        ("stride", stride_secs),
    ] {
        if value == 0 {
            return Err(Error::Config(format!("{what} must be positive")));
        }
        if value % interval != 0 {
            return Err(Error::IncompatibleResolution {
                what,
                value,
                interval,
            });
        }
    }
    let length_samples = (window_length_secs / interval) as usize;
    let stride_samples = (stride_secs / interval) as usize;
    let n = series.n_samples();
    if length_samples > n {
        return Err(Error::WindowLongerThanSeries {
            window_samples: length_samples,
            n_samples: n,
        });
    }
    if stride_samples > length_samples {
        return Err(Error::StrideExceedsWindow {
            stride: stride_samples,
            window: length_samples,
        });
    }
    let w = (n - length_samples) / stride_samples + 1;
    let timestamps = (0..w)
        .map(|k| series.timestamps()[k * stride_samples])
        .collect();
    WindowPlan::new(length_samples, stride_samples, timestamps)
}

/// Which way power flows on a star edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowDirection {
    /// Meter supplies the leaf (consumption).
    CenterToLeaf,
    /// Leaf supplies the meter (generation).
    LeafToCenter,
}

/// Static topology of one meter: a center node and one leaf per channel,
/// leaves adjacent only to the center.
#[derive(Debug, Clone, PartialEq)]
pub struct StarMotif {
    center: String,
    leaves: Vec<(ChannelId, FlowDirection)>,
}

impl StarMotif {
    pub fn center(&self) -> &str {
        &self.center
    }

    /// Leaves in channel order, paired with their flow direction.
    pub fn leaves(&self) -> &[(ChannelId, FlowDirection)] {
        &self.leaves
    }

    /// Total node count `k`: the center plus one node per leaf.
    pub fn node_count(&self) -> usize {
        1 + self.leaves.len()
    }

    pub fn direction_of(&self, leaf_name: &str) -> Option<FlowDirection> {
        self.leaves
            .iter()
            .find(|(ch, _)| ch.name() == leaf_name)
            .map(|&(_, dir)| dir)
    }

    /// Directed endpoints (supplier, consumer) for a leaf's edge.
    pub fn endpoints_of(&self, leaf_name: &str) -> Option<(String, String)> {
        self.direction_of(leaf_name).map(|dir| match dir {
            FlowDirection::CenterToLeaf => (self.center.clone(), leaf_name.to_string()),
            FlowDirection::LeafToCenter => (leaf_name.to_string(), self.center.clone()),
        })
    }
}

/// Star for a meter series: center = the meter, one leaf per non-mains
/// channel. Consumers hang off edges center→leaf, generators leaf→center.
pub fn build_static_motif(series: &MeterSeries) -> Result<StarMotif> {
    let center = series.node_id().to_string();
    let mut leaves = Vec::new();
    for (channel, _) in series.appliance_channels() {
        let direction = match channel.kind() {
            ChannelKind::Consumer => FlowDirection::CenterToLeaf,
            ChannelKind::Generator => FlowDirection::LeafToCenter,
            ChannelKind::Mains => unreachable!("appliance_channels filters the mains"),
        };
        if channel.name() == center {
            return Err(Error::Config(format!(
                "channel \"{}\" collides with the meter's node id",
                channel.name()
            )));
        }
        leaves.push((channel.clone(), direction));
    }
    if leaves.is_empty() {
        return Err(Error::NoChannels);
    }
    Ok(StarMotif { center, leaves })
}

/// One directed, symbol-carrying edge active during window `t_w`:
/// supplier `u`, consumer `v`, level symbol `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalEdge {
    pub u: String,
    pub v: String,
    pub t_w: i64,
    pub x: char,
}

/// All edges active during one window.
#[derive(Debug, Clone, PartialEq)]
pub struct MotifFrame {
    pub t_w: i64,
    /// Node id of the star's center, so each edge's leaf endpoint can be
    /// recovered without the original series.
    pub center: String,
    pub edges: Vec<TemporalEdge>,
}

/// Level movement of one edge between two consecutive frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Up,
    Down,
    Flat,
    /// Edge absent in the earlier frame, present in the later.
    Appear,
    /// Edge present in the earlier frame, absent in the later.
    Disappear,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Up => "up",
            Trend::Down => "down",
            Trend::Flat => "flat",
            Trend::Appear => "appear",
            Trend::Disappear => "disappear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Trend::Up),
            "down" => Some(Trend::Down),
            "flat" => Some(Trend::Flat),
            "appear" => Some(Trend::Appear),
            "disappear" => Some(Trend::Disappear),
            _ => None,
        }
    }

    /// Trend of the same edge pair viewed in reverse frame order.
    pub fn reversed(self) -> Self {
        match self {
            Trend::Up => Trend::Down,
            Trend::Down => Trend::Up,
            Trend::Flat => Trend::Flat,
            Trend::Appear => Trend::Disappear,
            Trend::Disappear => Trend::Appear,
        }
    }
}

/// Identifies one edge across one consecutive frame pair. Ordering is
/// chronological, then by endpoints, so exports are stable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrendKey {
    pub from_t: i64,
    pub to_t: i64,
    pub u: String,
    pub v: String,
}

/// A run of consecutive frames plus the trend of every edge between each
/// adjacent frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMotif {
    pub frames: Vec<MotifFrame>,
    pub trends: BTreeMap<TrendKey, Trend>,
}

impl TemporalMotif {
    /// Number of windows this motif spans.
    pub fn delta(&self) -> usize {
        self.frames.len()
    }
}

/// Instantiate one frame per window: a channel appears iff its raw (not
/// normalized) window mean exceeds `epsilon_on`, carrying its symbol for
/// that window. Both maps are keyed by channel name and must cover every
/// star leaf with identical window grids.
pub fn build_frames(
    star: &StarMotif,
    symbol_series: &HashMap<String, SymbolSeries>,
    raw_window_means: &HashMap<String, Vec<f64>>,
    epsilon_on: f64,
) -> Result<Vec<MotifFrame>> {
    let mut reference: Option<&[i64]> = None;
    for (channel, _) in star.leaves() {
        let name = channel.name();
        let misaligned = |reason: String| Error::MisalignedWindows {
            channel: name.to_string(),
            reason,
        };
        let symbols = symbol_series
            .get(name)
            .ok_or_else(|| misaligned("no symbol series supplied".into()))?;
        let means = raw_window_means
            .get(name)
            .ok_or_else(|| misaligned("no raw window means supplied".into()))?;
        let timestamps = match reference {
            None => {
                reference = Some(symbols.window_timestamps());
                symbols.window_timestamps()
            }
            Some(t) => {
                if symbols.window_timestamps() != t {
                    return Err(misaligned(
                        "window timestamps differ between channels".into(),
                    ));
                }
                t
            }
        };
        if symbols.symbols().len() != timestamps.len() {
            return Err(misaligned(format!(
                "{} symbols for {} windows",
                symbols.symbols().len(),
                timestamps.len()
            )));
        }
        if means.len() != timestamps.len() {
            return Err(misaligned(format!(
                "{} raw means for {} windows",
                means.len(),
                timestamps.len()
            )));
        }
    }
    let timestamps = reference.expect("stars always have at least one leaf");

    let mut frames = Vec::with_capacity(timestamps.len());
    for (k, &t_w) in timestamps.iter().enumerate() {
        let mut edges = Vec::new();
        for (channel, _) in star.leaves() {
            let name = channel.name();
            if raw_window_means[name][k] > epsilon_on {
                let (u, v) = star.endpoints_of(name).expect("leaf comes from this star");
                edges.push(TemporalEdge {
                    u,
                    v,
                    t_w,
                    x: symbol_series[name].symbols()[k],
                });
            }
        }
        frames.push(MotifFrame {
            t_w,
            center: star.center().to_string(),
            edges,
        });
    }
    Ok(frames)
}

/// Compare two consecutive frames edge-by-edge: symbol rank rose → `Up`,
/// fell → `Down`, held → `Flat`; an edge present on only one side is
/// `Appear` (later only) or `Disappear` (earlier only).
pub fn annotate_trends(
    prev: &MotifFrame,
    next: &MotifFrame,
    alphabet: &Alphabet,
) -> BTreeMap<(String, String), Trend> {
    let rank = |x: char| {
        alphabet
            .rank_of(x)
            .expect("frame symbols must belong to the trend alphabet")
    };
    let key = |e: &TemporalEdge| (e.u.clone(), e.v.clone());
    let prev_syms: BTreeMap<(String, String), char> =
        prev.edges.iter().map(|e| (key(e), e.x)).collect();
    let next_syms: BTreeMap<(String, String), char> =
        next.edges.iter().map(|e| (key(e), e.x)).collect();

    let mut trends = BTreeMap::new();
    for (k, &p) in &prev_syms {
        let trend = match next_syms.get(k) {
            Some(&n) => match rank(n).cmp(&rank(p)) {
                std::cmp::Ordering::Greater => Trend::Up,
                std::cmp::Ordering::Less => Trend::Down,
                std::cmp::Ordering::Equal => Trend::Flat,
            },
            None => Trend::Disappear,
        };
        trends.insert(k.clone(), trend);
    }
    for k in next_syms.keys() {
        if !prev_syms.contains_key(k) {
            trends.insert(k.clone(), Trend::Appear);
        }
    }
    trends
}

/// Group frames into every run of `delta` consecutive windows (sliding by
/// one frame), annotating trends between each adjacent pair. `delta = 1`
/// makes each frame its own motif with no trends.
pub fn assemble_temporal_motifs(
    frames: &[MotifFrame],
    delta: usize,
    alphabet: &Alphabet,
) -> Result<Vec<TemporalMotif>> {
    if delta == 0 {
        return Err(Error::Config("delta must be at least 1".into()));
    }
    if delta > frames.len() {
        return Err(Error::DeltaTooLarge {
            delta,
            frames: frames.len(),
        });
    }
    let mut motifs = Vec::with_capacity(frames.len() - delta + 1);
    for start in 0..=frames.len() - delta {
        let group = frames[start..start + delta].to_vec();
        let mut trends = BTreeMap::new();
        for pair in group.windows(2) {
            for ((u, v), trend) in annotate_trends(&pair[0], &pair[1], alphabet) {
                trends.insert(
                    TrendKey {
                        from_t: pair[0].t_w,
                        to_t: pair[1].t_w,
                        u,
                        v,
                    },
                    trend,
                );
            }
        }
        motifs.push(TemporalMotif {
            frames: group,
            trends,
        });
    }
    Ok(motifs)
}
