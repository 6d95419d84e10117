//! Overlapping windows: stride shorter than the window length.
//!
//! With stride s and length L the window count obeys
//! w = floor((n - L) / s) + 1, adjacent windows share L - s samples, and
//! up to s - 1 trailing samples can fall outside every window. This runs
//! the same series non-overlapping (1 h hop) and overlapping (15 min hop)
//! and prints the bookkeeping for both.
//!
//! Run with: cargo run --example overlapping_windows

use std::path::Path;

use gridmotif::config::DurationSpec;
use gridmotif::ingest::{self, ChannelSchema};
use gridmotif::motif::plan_windows;
use gridmotif::pipeline::motifs_for_series;
use gridmotif::PipelineConfig;

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let series = ingest::load_csv(
        data.join("27-synthetic.csv"),
        &ChannelSchema::default_mains(),
    )?;
    let n = series.n_samples();

    for stride_secs in [3600_u64, 900] {
        let plan = plan_windows(&series, 3600, stride_secs)?;
        let length = plan.window_length_samples();
        let stride = plan.stride_samples();
        println!("stride {stride_secs} s (every {stride} samples):");
        println!(
            "  w = floor(({n} - {length}) / {stride}) + 1 = {}",
            plan.window_count()
        );
        println!("  adjacent windows share {} sample(s)", length - stride);
        println!("  {} trailing sample(s) dropped", plan.dropped_samples(n));

        let config = PipelineConfig {
            stride: DurationSpec::from_secs(stride_secs),
            ..PipelineConfig::default()
        };
        let out = motifs_for_series(&series, &config)?;
        println!(
            "  -> {} frames, {} temporal motif(s) of delta {}\n",
            out.frames.len(),
            out.motifs.len(),
            config.delta
        );
    }
    Ok(())
}
