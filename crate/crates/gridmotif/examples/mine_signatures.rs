//! Canonical signatures and exact frequency counts.
//!
//! A motif's signature strips timestamps and serializes its per-frame
//! edge content in sorted order, so two motifs share a signature exactly
//! when the same channels show the same symbols in the same frame
//! positions. Counting signatures is therefore exact pattern counting;
//! the result is cross-checked against a brute-force pairwise oracle
//! that never looks at signature strings.
//!
//! Run with: cargo run --example mine_signatures

use std::path::Path;

use gridmotif::ingest::{self, ChannelSchema};
use gridmotif::mine::{count_signatures, naive_equivalence_classes, top_k, verify_counts};
use gridmotif::pipeline::motifs_for_series;
use gridmotif::PipelineConfig;

fn main() -> gridmotif::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    // This series repeats the same three-hour block twice, so the same
    // frame sequence (and therefore the same signature) recurs.
    let series = ingest::load_csv(data.join("27-repeat.csv"), &ChannelSchema::default_mains())?;
    let out = motifs_for_series(&series, &PipelineConfig::default())?;
    let counts = count_signatures(&out.motifs)?;
    verify_counts(&out.motifs, &counts)?;

    println!(
        "{} motifs, {} distinct signatures (oracle-verified)",
        counts.total(),
        counts.counts().len()
    );
    println!("top patterns:");
    for (sig, n) in top_k(&counts, 3) {
        println!("  {n} x {sig}");
    }

    let classes = naive_equivalence_classes(&out.motifs);
    println!(
        "\nbrute-force pairwise comparison finds {} classes with sizes {:?}",
        classes.len(),
        classes.iter().map(Vec::len).collect::<Vec<_>>()
    );
    Ok(())
}
