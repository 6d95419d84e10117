//! End-to-end composition: validated series → window plan → per-channel
//! symbols → motif frames → temporal motifs.
//!
//! Channels are symbolized in parallel; results are collected in channel
//! order, so output is identical to a sequential run.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::config::{NormalizationScope, PipelineConfig};
use crate::error::{Error, Result};
use crate::ingest::{self, ChannelId, MeterSeries, UNMETERED_CHANNEL};
use crate::motif::{self, MotifFrame, StarMotif, TemporalMotif, WindowPlan};
use crate::symbolize::{self, Alphabet, SymbolSeries};

/// Symbols and raw window means for one channel.
#[derive(Debug, Clone)]
pub struct ChannelSymbols {
    pub symbols: SymbolSeries,
    /// Pre-normalization window means in kW, for on/off decisions.
    pub raw_window_means: Vec<f64>,
}

/// Every non-mains channel of a series symbolized under one window plan.
#[derive(Debug, Clone)]
pub struct SymbolizedSeries {
    pub plan: WindowPlan,
    pub alphabet: Alphabet,
    /// One entry per non-mains channel, in channel order.
    pub channels: Vec<ChannelSymbols>,
}

/// Everything the motif pipeline produces for one series.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub star: StarMotif,
    pub plan: WindowPlan,
    pub alphabet: Alphabet,
    pub frames: Vec<MotifFrame>,
    pub motifs: Vec<TemporalMotif>,
}

/// Check conservation and, when some draw is unexplained, fold it into an
/// `unmetered` consumer channel. Series that already balance (or only
/// over-meter within tolerance) pass through unchanged, so their star
/// keeps exactly one leaf per measured channel. A residual below
/// `-tolerance * mains` is rejected.
pub fn prepare_series(series: &MeterSeries, tolerance: f64) -> Result<MeterSeries> {
    let with_residual = ingest::synthesize_residual_channel(series, tolerance)?;
    // Summation order differs between the mains column and the residual,
    // so a balanced series still leaves ~1e-16 noise; only residuals above
    // the division guard count as real.
    let informative = with_residual
        .channel_values(UNMETERED_CHANNEL)
        .expect("channel was just added")
        .iter()
        .any(|&v| v > ingest::EPSILON_DIV);
    Ok(if informative {
        with_residual
    } else {
        series.clone()
    })
}

/// Plan windows and run normalize → window means → symbols for every
/// non-mains channel, in parallel across channels.
pub fn symbolize_series(series: &MeterSeries, config: &PipelineConfig) -> Result<SymbolizedSeries> {
    let plan = motif::plan_windows(
        series,
        config.window_length.seconds(),
        config.stride.seconds(),
    )?;
    let alphabet = config.alphabet.to_alphabet()?;

    let channel_data: Vec<(ChannelId, &[f64])> = series
        .appliance_channels()
        .map(|(c, v)| (c.clone(), v))
        .collect();
    if channel_data.is_empty() {
        return Err(Error::NoChannels);
    }

    // Global scope shares one min/max across all channels of the series.
    let bounds = match config.scope {
        NormalizationScope::PerChannel => None,
        NormalizationScope::Global => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (_, values) in &channel_data {
                for &v in *values {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            Some((lo, hi))
        }
    };

    let channels = channel_data
        .par_iter()
        .map(|(channel, values)| -> Result<ChannelSymbols> {
            let raw_window_means = plan.window_means(values)?;
            let normalized = match bounds {
                Some((lo, hi)) => symbolize::normalize_with_bounds(channel.clone(), values, lo, hi),
                None => symbolize::min_max_normalize(channel.clone(), values),
            };
            let paa = symbolize::paa(&normalized, &plan)?;
            let symbols = symbolize::assign_symbols(&paa, &alphabet)?;
            Ok(ChannelSymbols {
                symbols,
                raw_window_means,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SymbolizedSeries {
        plan,
        alphabet,
        channels,
    })
}

/// Full pipeline for one series: star, frames, temporal motifs.
///
/// Conservation handling is the caller's choice; run [`prepare_series`]
/// first to account for unmetered draw.
pub fn motifs_for_series(series: &MeterSeries, config: &PipelineConfig) -> Result<PipelineOutput> {
    let star = motif::build_static_motif(series)?;
    let symbolized = symbolize_series(series, config)?;

    let mut symbol_map = HashMap::new();
    let mut mean_map = HashMap::new();
    for cs in &symbolized.channels {
        let name = cs.symbols.channel().name().to_string();
        symbol_map.insert(name.clone(), cs.symbols.clone());
        mean_map.insert(name, cs.raw_window_means.clone());
    }

    let frames = motif::build_frames(&star, &symbol_map, &mean_map, config.epsilon_on)?;
    let motifs = motif::assemble_temporal_motifs(&frames, config.delta, &symbolized.alphabet)?;
    Ok(PipelineOutput {
        star,
        plan: symbolized.plan,
        alphabet: symbolized.alphabet,
        frames,
        motifs,
    })
}
