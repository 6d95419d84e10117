//! Symbolic temporal star motifs for smart-meter time series.
//!
//! A household meter reading is modeled as a star: the meter at the
//! center, one leaf per appliance or generator channel, edges pointing
//! toward consumers and away from generators. Each channel's power trace
//! is normalized to [0, 1], averaged over fixed windows, and discretized
//! into alphabet symbols; a window then becomes a motif frame whose edges
//! carry one symbol each, and a run of `delta` consecutive frames forms a
//! temporal motif with per-edge trend annotations. Motifs canonicalize to
//! signature strings so recurring patterns can be counted exactly, and
//! the whole pipeline also runs on aggregated meters at every level of a
//! metering hierarchy (house, feeder, substation, ...).
//!
//! The `examples/` directory is the best starting point; each example is
//! runnable on the bundled data set and covers one capability:
//!
//! - `symbolize_house`: normalize, window, and discretize one meter CSV.
//! - `star_motif`: the static star and per-window frames.
//! - `temporal_motifs`: frames, trends, and JSON round-tripping.
//! - `overlapping_windows`: stride < window length and the window-count
//!   bookkeeping that goes with it.
//! - `hierarchy_rollup`: aggregate children into parents and run the
//!   pipeline per level.
//! - `mine_signatures`: canonical signatures, exact counts, top-k.
//! - `export_formats`: the JSON, DOT, and CSV output surfaces.
//!
//! The same functionality is scriptable through the bundled `gridmotif`
//! binary (`symbolize`, `motifs`, `hierarchy`, `mine`), which adds output
//! manifests and byte-deterministic file layouts on top of the library.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod hierarchy;
pub mod ingest;
pub mod mine;
pub mod motif;
pub mod pipeline;
pub mod symbolize;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use ingest::{ChannelId, ChannelKind, ChannelSchema, MeterSeries};
pub use motif::{MotifFrame, StarMotif, TemporalMotif, Trend};
pub use symbolize::Alphabet;
