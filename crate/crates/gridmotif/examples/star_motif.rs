//! The static star and how window frames instantiate it.
//!
//! A meter is the center of a star; every appliance or generator channel
//! is a leaf. Consumer edges point center -> leaf (energy drawn through
//! the meter), generator edges leaf -> center. Per window, an edge is
//! present only while its channel's raw mean power exceeds the on
//! threshold, so frames show a waxing and waning subset of the star.
//!
//! Run with: cargo run --example star_motif

use std::path::Path;

use gridmotif::ingest::{self, format_timestamp, ChannelSchema};
use gridmotif::motif::{build_static_motif, FlowDirection};
use gridmotif::pipeline::motifs_for_series;
use gridmotif::PipelineConfig;

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let schema =
        ChannelSchema::from_json(&std::fs::read_to_string(data.join("31-solar.schema.json"))?)?;
    let series = ingest::load_csv(data.join("31-solar.csv"), &schema)?;

    let star = build_static_motif(&series)?;
    println!(
        "star of {} nodes, center \"{}\":",
        star.node_count(),
        star.center()
    );
    for (leaf, direction) in star.leaves() {
        let edge = match direction {
            FlowDirection::CenterToLeaf => format!("{} -> {}", star.center(), leaf.name()),
            FlowDirection::LeafToCenter => format!("{} -> {}", leaf.name(), star.center()),
        };
        println!("  {edge}  ({:?} {:?})", leaf.kind(), direction);
    }

    for epsilon_on in [0.0, 1.0] {
        let config = PipelineConfig {
            epsilon_on,
            ..PipelineConfig::default()
        };
        let out = motifs_for_series(&series, &config)?;
        println!("\nframes with on-threshold {epsilon_on} kW:");
        for frame in &out.frames {
            let edges: Vec<String> = frame
                .edges
                .iter()
                .map(|e| format!("{}->{}:{}", e.u, e.v, e.x))
                .collect();
            println!(
                "  t_w {}  [{}]",
                format_timestamp(frame.t_w),
                edges.join("  ")
            );
        }
    }
    Ok(())
}
