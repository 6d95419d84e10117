//! The three output surfaces: motif JSON, per-frame DOT, counts JSON/CSV.
//!
//! All exports are byte-deterministic: keys and edges are emitted in a
//! fixed order and floats never appear (symbols and timestamps are
//! strings), so identical inputs always serialize identically.
//!
//! Run with: cargo run --example export_formats

use std::path::Path;

use gridmotif::export::{
    counts_to_csv_string, counts_to_json_string, frame_to_dot, motifs_to_json_string,
};
use gridmotif::ingest::{self, ChannelSchema};
use gridmotif::mine::count_signatures;
use gridmotif::motif::annotate_trends;
use gridmotif::pipeline::motifs_for_series;
use gridmotif::PipelineConfig;

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let series = ingest::load_csv(
        data.join("27-synthetic.csv"),
        &ChannelSchema::default_mains(),
    )?;
    let out = motifs_for_series(&series, &PipelineConfig::default())?;

    println!("--- motifs.json (first 12 lines) ---");
    let json = motifs_to_json_string(&out.motifs);
    for line in json.lines().take(12) {
        println!("{line}");
    }
    println!("...");

    println!("\n--- frame_001.dot (with trends since frame 0) ---");
    let trends = annotate_trends(&out.frames[0], &out.frames[1], &out.alphabet);
    print!(
        "{}",
        frame_to_dot(&out.frames[1], "frame_001", Some(&trends))
    );

    let counts = count_signatures(&out.motifs)?;
    println!("\n--- counts.json ---");
    print!("{}", counts_to_json_string(&counts));
    println!("\n--- counts.csv ---");
    print!("{}", counts_to_csv_string(&counts));
    Ok(())
}
