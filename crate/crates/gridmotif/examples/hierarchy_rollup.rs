//! Roll houses up into feeders and substations and rerun the pipeline.
//!
//! A parent meter sees each child as one channel carrying the child's net
//! draw (consumers minus generators); the parent mains is the sum of the
//! child nets, so energy conservation holds by construction at every
//! level. The identical symbolize-and-assemble pipeline then runs on the
//! aggregate exactly as it does on a single house.
//!
//! Run with: cargo run --example hierarchy_rollup

use std::path::Path;

use gridmotif::hierarchy::{aggregate_level, load_hierarchy, pipeline_at_level, HierarchyChild};
use gridmotif::ingest::{check_conservation, format_timestamp};
use gridmotif::PipelineConfig;

fn describe(child: &HierarchyChild, indent: usize) -> gridmotif::Result<()> {
    let pad = "  ".repeat(indent);
    match child {
        HierarchyChild::Leaf(series) => {
            println!(
                "{pad}{} (level 0, measured, {} channels)",
                series.node_id(),
                series.channels().len() - 1
            );
        }
        HierarchyChild::Node(node) => {
            let aggregate = aggregate_level(node)?;
            let residual = check_conservation(&aggregate);
            let worst = residual
                .values()
                .iter()
                .fold(0.0_f64, |acc, v| acc.max(v.abs()));
            println!(
                "{pad}{} (level {}, {} children, worst conservation residual {worst:.2e} kW)",
                node.node_id(),
                node.level(),
                node.branching()
            );
            for c in node.children() {
                describe(c, indent + 1)?;
            }
        }
    }
    Ok(())
}

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let root = load_hierarchy(data.join("hierarchy.json"))?;
    describe(&root, 0)?;

    let HierarchyChild::Node(node) = &root else {
        return Ok(());
    };
    let config = PipelineConfig::default();
    let motifs = pipeline_at_level(node, &config)?;
    println!("\n{} motif(s) at the top level:", motifs.len());
    for motif in &motifs {
        for frame in &motif.frames {
            let edges: Vec<String> = frame
                .edges
                .iter()
                .map(|e| format!("{}:{}", e.v, e.x))
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
