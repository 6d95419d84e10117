//! Grid hierarchy: appliances roll up into houses, houses into
//! communities, communities into larger supply areas. Aggregating child
//! series into a parent-level [`MeterSeries`] lets the identical
//! symbolize/motif pipeline run at every level, with children playing the
//! role appliances play one level down.
//!
//! Aggregation turns each child into a single net-supply channel: the
//! child's consumers minus its generators, floored at zero. Timestamps
//! where a child produces more than it consumes go into a separate
//! generator channel named `<child>/export`, so the parent's star keeps
//! one flow direction per edge. The parent's mains is the exact sum of
//! child nets, which keeps conservation exact at every level.

use std::collections::BTreeSet;
use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::ingest::{self, ChannelId, ChannelKind, ChannelSchema, MeterSeries};
use crate::motif::TemporalMotif;
use crate::pipeline;

/// Channel name given to the synthesized parent mains.
pub const PARENT_MAINS_CHANNEL: &str = "mains";

/// Suffix appended to a child's id for its surplus-production channel.
pub const EXPORT_SUFFIX: &str = "/export";

/// A child position in the tree: either a deeper grouping or a measured
/// meter (a house with its appliance channels).
#[derive(Debug, Clone)]
pub enum HierarchyChild {
    Node(HierarchyNode),
    Leaf(MeterSeries),
}

impl HierarchyChild {
    pub fn id(&self) -> &str {
        match self {
            HierarchyChild::Node(n) => n.node_id(),
            HierarchyChild::Leaf(s) => s.node_id(),
        }
    }

    /// Measured meters sit at level 0; groupings one above their deepest child.
    pub fn level(&self) -> usize {
        match self {
            HierarchyChild::Node(n) => n.level(),
            HierarchyChild::Leaf(_) => 0,
        }
    }
}

/// An internal grouping node with at least one child.
#[derive(Debug, Clone)]
pub struct HierarchyNode {
    node_id: String,
    children: Vec<HierarchyChild>,
}

impl HierarchyNode {
    pub fn new(node_id: impl Into<String>, children: Vec<HierarchyChild>) -> Result<Self> {
        let node_id = node_id.into();
        if children.is_empty() {
            return Err(Error::Config(format!(
                "hierarchy node \"{node_id}\" has no children"
            )));
        }
        Ok(Self { node_id, children })
    }

    pub fn node_id(&self) -> &str {
        &self.node_id
    }

    pub fn children(&self) -> &[HierarchyChild] {
        &self.children
    }

    /// Branching factor `b`: the number of direct children.
    pub fn branching(&self) -> usize {
        self.children.len()
    }

    /// One above the deepest child; a node over measured meters is level 1.
    pub fn level(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(HierarchyChild::level)
            .max()
            .expect("validated: at least one child")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeSpec {
    id: String,
    #[serde(default)]
    children: Vec<NodeSpec>,
    #[serde(default)]
    csv: Option<String>,
    #[serde(default)]
    schema: Option<ChannelSchema>,
}

/// Load a hierarchy description: nested `{"id", "children": [...]}` objects
/// whose leaves are `{"id", "csv", "schema"}`. CSV paths resolve relative
/// to the JSON file's directory; a missing leaf schema maps the column
/// named `mains` to the mains and the rest to consumers. Node ids must be
/// unique across the tree.
pub fn load_hierarchy(path: impl AsRef<Path>) -> Result<HierarchyChild> {
    let path = path.as_ref();
    let base_dir = path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let text = std::fs::read_to_string(path)?;
    let spec: NodeSpec = serde_json::from_str(&text)?;
    let mut seen_ids = HashSet::new();
    build_child(spec, &base_dir, &mut seen_ids)
}

fn build_child(
    spec: NodeSpec,
    base_dir: &PathBuf,
    seen_ids: &mut HashSet<String>,
) -> Result<HierarchyChild> {
    if spec.id.is_empty() {
        return Err(Error::Config("hierarchy node ids must be non-empty".into()));
    }
    if !seen_ids.insert(spec.id.clone()) {
        return Err(Error::Config(format!(
            "duplicate hierarchy node id \"{}\"",
            spec.id
        )));
    }
    match spec.csv {
        Some(csv) => {
            if !spec.children.is_empty() {
                return Err(Error::Config(format!(
                    "node \"{}\" has both a csv and children",
                    spec.id
                )));
            }
            let csv_path = if Path::new(&csv).is_absolute() {
                PathBuf::from(&csv)
            } else {
                base_dir.join(&csv)
            };
            let schema = spec.schema.unwrap_or_else(ChannelSchema::default_mains);
            let series = ingest::load_csv(&csv_path, &schema)?.with_node_id(spec.id);
            Ok(HierarchyChild::Leaf(series))
        }
        None => {
            if spec.children.is_empty() {
                return Err(Error::Config(format!(
                    "node \"{}\" needs either children or a csv",
                    spec.id
                )));
            }
            if spec.schema.is_some() {
                return Err(Error::Config(format!(
                    "node \"{}\" has a schema but no csv",
                    spec.id
                )));
            }
            let children = spec
                .children
                .into_iter()
                .map(|c| build_child(c, base_dir, seen_ids))
                .collect::<Result<Vec<_>>>()?;
            Ok(HierarchyChild::Node(HierarchyNode::new(spec.id, children)?))
        }
    }
}

/// A child's net supply draw on its own time grid.
struct ChildNet {
    id: String,
    first: i64,
    interval: u64,
    net: Vec<f64>,
}

fn child_net(child: &HierarchyChild) -> Result<ChildNet> {
    let series = match child {
        HierarchyChild::Leaf(s) => s.clone(),
        HierarchyChild::Node(n) => aggregate_level(n)?,
    };
    let mut net = vec![0.0; series.n_samples()];
    for (channel, values) in series.appliance_channels() {
        match channel.kind() {
            ChannelKind::Consumer => {
                for (acc, &v) in net.iter_mut().zip(values) {
                    *acc += v;
                }
            }
            ChannelKind::Generator => {
                for (acc, &v) in net.iter_mut().zip(values) {
                    *acc -= v;
                }
            }
            ChannelKind::Mains => unreachable!("appliance_channels filters the mains"),
        }
    }
    Ok(ChildNet {
        id: series.node_id().to_string(),
        first: series.timestamps()[0],
        interval: series.sample_interval(),
        net,
    })
}

/// Roll a node's children up into one parent-level series on their common
/// timestamp grid: one consumer channel per child carrying its net draw
/// (plus a `<child>/export` generator channel when the child net goes
/// negative), and a mains channel equal to the sum of child nets.
///
/// Grandchildren are aggregated recursively first, so the same operation
/// serves every level of the tree.
pub fn aggregate_level(node: &HierarchyNode) -> Result<MeterSeries> {
    let nets = node
        .children()
        .iter()
        .map(child_net)
        .collect::<Result<Vec<_>>>()?;

    let intervals: BTreeSet<u64> = nets.iter().map(|c| c.interval).collect();
    if intervals.len() > 1 {
        return Err(Error::MixedResolution {
            node: node.node_id().to_string(),
            intervals: intervals.into_iter().collect(),
        });
    }
    let interval = *intervals.iter().next().expect("at least one child");
    let step = interval as i64;

    let start = nets
        .iter()
        .map(|c| c.first)
        .max()
        .expect("at least one child");
    let end = nets
        .iter()
        .map(|c| c.first + (c.net.len() as i64 - 1) * step)
        .min()
        .expect("at least one child");
    if start > end {
        return Err(Error::NoCommonSpan {
            node: node.node_id().to_string(),
        });
    }
    // Same interval but offset grids never share an instant.
    if nets.iter().any(|c| (start - c.first) % step != 0) {
        return Err(Error::NoCommonSpan {
            node: node.node_id().to_string(),
        });
    }

    let n = ((end - start) / step + 1) as usize;
    let timestamps: Vec<i64> = (0..n as i64).map(|i| start + i * step).collect();

    let mut channels = vec![ChannelId::new(PARENT_MAINS_CHANNEL, ChannelKind::Mains)];
    let mut columns = vec![vec![0.0; n]];
    for child in &nets {
        let from = ((start - child.first) / step) as usize;
        let slice = &child.net[from..from + n];
        for (acc, &v) in columns[0].iter_mut().zip(slice) {
            *acc += v;
        }
        channels.push(ChannelId::new(child.id.clone(), ChannelKind::Consumer));
        columns.push(slice.iter().map(|&v| v.max(0.0)).collect());
        if slice.iter().any(|&v| v < 0.0) {
            channels.push(ChannelId::new(
                format!("{}{}", child.id, EXPORT_SUFFIX),
                ChannelKind::Generator,
            ));
            columns.push(slice.iter().map(|&v| (-v).max(0.0)).collect());
        }
    }

    MeterSeries::new(node.node_id(), channels, timestamps, columns, interval)
}

/// Aggregate a node and run the full symbol/motif pipeline on the result.
/// The semantics match running the pipeline on a measured meter; only the
/// channel set differs (children instead of appliances).
pub fn pipeline_at_level(
    node: &HierarchyNode,
    config: &PipelineConfig,
) -> Result<Vec<TemporalMotif>> {
    let series = aggregate_level(node)?;
    Ok(pipeline::motifs_for_series(&series, config)?.motifs)
}
