//! Serialized forms of motifs and counts: a JSON document per motif
//! collection, one DOT digraph per frame, and count tables as JSON or CSV.
//!
//! The JSON form is lossless: [`motifs_from_json_str`] reconstructs the
//! exact motifs [`motifs_to_json_string`] wrote, so mining can run on a
//! previously exported file.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, parse_timestamp};
use crate::mine::{top_k, SignatureCounts};
use crate::motif::{MotifFrame, TemporalEdge, TemporalMotif, Trend, TrendKey};

/// JSON form of one temporal motif.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotifJson {
    pub delta: usize,
    /// Center node id, kept so edge directions survive a round trip.
    pub center: String,
    pub frames: Vec<FrameJson>,
    pub trends: Vec<TrendJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameJson {
    pub t_w: String,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub u: String,
    pub v: String,
    pub x: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendJson {
    pub u: String,
    pub v: String,
    pub from_t: String,
    pub to_t: String,
    pub trend: String,
}

/// Map a motif into its JSON form (timestamps become ISO-8601 UTC).
pub fn motif_to_json(motif: &TemporalMotif) -> MotifJson {
    MotifJson {
        delta: motif.delta(),
        center: motif
            .frames
            .first()
            .map(|f| f.center.clone())
            .unwrap_or_default(),
        frames: motif
            .frames
            .iter()
            .map(|f| FrameJson {
                t_w: format_timestamp(f.t_w),
                edges: f
                    .edges
                    .iter()
                    .map(|e| EdgeJson {
                        u: e.u.clone(),
                        v: e.v.clone(),
                        x: e.x.to_string(),
                    })
                    .collect(),
            })
            .collect(),
        trends: motif
            .trends
            .iter()
            .map(|(k, &t)| TrendJson {
                u: k.u.clone(),
                v: k.v.clone(),
                from_t: format_timestamp(k.from_t),
                to_t: format_timestamp(k.to_t),
                trend: t.as_str().to_string(),
            })
            .collect(),
    }
}

fn parse_t(s: &str, what: &str) -> Result<i64> {
    parse_timestamp(s).ok_or_else(|| Error::Config(format!("unparseable {what} timestamp \"{s}\"")))
}

/// Rebuild a motif from its JSON form, validating that symbols are single
/// characters, every edge touches the center, the frame count matches
/// `delta`, and trend words are known.
pub fn motif_from_json(json: &MotifJson) -> Result<TemporalMotif> {
    if json.frames.len() != json.delta {
        return Err(Error::Config(format!(
            "motif declares delta {} but has {} frames",
            json.delta,
            json.frames.len()
        )));
    }
    let mut frames = Vec::with_capacity(json.frames.len());
    for frame in &json.frames {
        let t_w = parse_t(&frame.t_w, "window")?;
        let mut edges = Vec::with_capacity(frame.edges.len());
        for e in &frame.edges {
            let mut chars = e.x.chars();
            let x = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Config(format!(
                        "edge symbol \"{}\" must be a single character",
                        e.x
                    )))
                }
            };
            if e.u != json.center && e.v != json.center {
                return Err(Error::Config(format!(
                    "edge {} -> {} does not touch the center \"{}\"",
                    e.u, e.v, json.center
                )));
            }
            edges.push(TemporalEdge {
                u: e.u.clone(),
                v: e.v.clone(),
                t_w,
                x,
            });
        }
        frames.push(MotifFrame {
            t_w,
            center: json.center.clone(),
            edges,
        });
    }
    let mut trends = BTreeMap::new();
    for t in &json.trends {
        let trend = Trend::parse(&t.trend)
            .ok_or_else(|| Error::Config(format!("unknown trend \"{}\"", t.trend)))?;
        trends.insert(
            TrendKey {
                from_t: parse_t(&t.from_t, "trend")?,
                to_t: parse_t(&t.to_t, "trend")?,
                u: t.u.clone(),
                v: t.v.clone(),
            },
            trend,
        );
    }
    Ok(TemporalMotif { frames, trends })
}

/// Pretty-printed JSON array of motifs, trailing newline included.
pub fn motifs_to_json_string(motifs: &[TemporalMotif]) -> String {
    let docs: Vec<MotifJson> = motifs.iter().map(motif_to_json).collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("motif JSON always serializes");
    s.push('\n');
    s
}

/// Parse a JSON array of motifs as written by [`motifs_to_json_string`].
pub fn motifs_from_json_str(text: &str) -> Result<Vec<TemporalMotif>> {
    let docs: Vec<MotifJson> = serde_json::from_str(text)?;
    docs.iter().map(motif_from_json).collect()
}

fn dot_quote(s: &str) -> String {
    let escaped = s.replace('\\', "\\\\").replace('"', "\\\"");
    format!("\"{escaped}\"")
}

/// One frame as a DOT digraph. Edge labels are `x@t_w`; when the trend of
/// an edge since the previous frame is known, `^` (up) or `v` (down) is
/// appended. The center node is drawn as a double circle.
pub fn frame_to_dot(
    frame: &MotifFrame,
    graph_name: &str,
    trends_since_prev: Option<&BTreeMap<(String, String), Trend>>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph {graph_name} {{\n"));
    out.push_str(&format!(
        "  {} [shape=doublecircle];\n",
        dot_quote(&frame.center)
    ));
    for e in &frame.edges {
        let mut label = format!("{}@{}", e.x, format_timestamp(e.t_w));
        if let Some(trends) = trends_since_prev {
            match trends.get(&(e.u.clone(), e.v.clone())) {
                Some(Trend::Up) => label.push('^'),
                Some(Trend::Down) => label.push('v'),
                _ => {}
            }
        }
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            dot_quote(&e.u),
            dot_quote(&e.v),
            dot_quote(&label)
        ));
    }
    out.push_str("}\n");
    out
}

/// JSON form of a signature count table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsJson {
    pub delta: Option<usize>,
    pub total: usize,
    pub signatures: Vec<SignatureCountJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureCountJson {
    pub sig: String,
    pub count: usize,
}

fn ordered_entries(counts: &SignatureCounts) -> Vec<SignatureCountJson> {
    // Full ranking: descending count, ties by signature.
    top_k(counts, counts.counts().len())
        .into_iter()
        .map(|(sig, count)| SignatureCountJson {
            sig: sig.as_str().to_string(),
            count,
        })
        .collect()
}

/// Counts as pretty-printed JSON, most frequent signature first.
pub fn counts_to_json_string(counts: &SignatureCounts) -> String {
    let doc = CountsJson {
        delta: counts.delta(),
        total: counts.total(),
        signatures: ordered_entries(counts),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("counts JSON always serializes");
    s.push('\n');
    s
}

/// Counts as CSV (`sig,count` header), most frequent signature first.
/// Signatures containing commas are quoted by the writer.
pub fn counts_to_csv_string(counts: &SignatureCounts) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["sig", "count"])
        .expect("writing to memory cannot fail");
    for entry in ordered_entries(counts) {
        writer
            .write_record([entry.sig.as_str(), &entry.count.to_string()])
            .expect("writing to memory cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("flushed")).expect("CSV output is UTF-8")
}
