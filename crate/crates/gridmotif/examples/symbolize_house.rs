//! Discretize one house's channels into symbols.
//!
//! Loads the bundled 12-row meter CSV, normalizes each channel to [0, 1],
//! averages it over one-hour windows, and bins the window means into a
//! four-symbol alphabet. The intermediate values are printed so each
//! a..d label can be traced back to kW.
//!
//! Run with: cargo run --example symbolize_house

use std::path::Path;

use gridmotif::ingest::{self, ChannelSchema};
use gridmotif::motif::plan_windows;
use gridmotif::symbolize::{assign_symbols, min_max_normalize, paa, Alphabet};

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let series = ingest::load_csv(
        data.join("27-synthetic.csv"),
        &ChannelSchema::default_mains(),
    )?;
    let alphabet = Alphabet::uniform(4)?;
    let plan = plan_windows(&series, 3600, 3600)?;

    println!(
        "house {}: {} samples every {} s, {} windows of {} samples",
        series.node_id(),
        series.n_samples(),
        series.sample_interval(),
        plan.window_count(),
        plan.window_length_samples()
    );
    println!(
        "alphabet {:?} with bin edges {:?}\n",
        alphabet.labels(),
        alphabet.boundaries()
    );

    for (channel, values) in series.appliance_channels() {
        let normalized = min_max_normalize(channel.clone(), values);
        let reduced = paa(&normalized, &plan)?;
        let symbols = assign_symbols(&reduced, &alphabet)?;
        let means: Vec<String> = reduced
            .window_means()
            .iter()
            .map(|m| format!("{m:.3}"))
            .collect();
        println!(
            "{:<8} {:.3}..{:.3} kW  window means [{}]  symbols {:?}",
            channel.name(),
            normalized.source_min(),
            normalized.source_max(),
            means.join(", "),
            symbols.symbols()
        );
    }
    Ok(())
}
