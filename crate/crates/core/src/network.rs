//! Industry-category co-classification graph and its GEXF export.
//!
//! Nodes are categories weighted by the number of records assigned to them.
//! Two categories are linked when a single record is assigned to both, and the
//! edge weight counts such records.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};

use quick_xml::events::{BytesStart, Event};

use crate::crosswalk::GbCategory;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndustryGraph {
    nodes: BTreeMap<GbCategory, u64>,
    /// Keyed by `(lower, higher)` in category order.
    edges: BTreeMap<(GbCategory, GbCategory), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop on `{0}`")]
    SelfLoop(GbCategory),
    #[error("weight must be at least 1")]
    ZeroWeight,
    #[error("malformed GEXF: {0}")]
    Malformed(String),
}

fn edge_key(a: GbCategory, b: GbCategory) -> (GbCategory, GbCategory) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl IndustryGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, category: GbCategory, count: u64) {
        self.nodes.insert(category, count);
    }

    /// Adds an undirected edge, creating missing endpoints with count 0.
    pub fn add_edge(
        &mut self,
        a: GbCategory,
        b: GbCategory,
        weight: u64,
    ) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if weight == 0 {
            return Err(GraphError::ZeroWeight);
        }
        self.nodes.entry(a).or_insert(0);
        self.nodes.entry(b).or_insert(0);
        *self.edges.entry(edge_key(a, b)).or_insert(0) += weight;
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeMap<GbCategory, u64> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(GbCategory, GbCategory), u64> {
        &self.edges
    }

    pub fn edge_weight(&self, a: GbCategory, b: GbCategory) -> Option<u64> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    /// Nodes sorted by name, the order used in every export.
    fn nodes_by_name(&self) -> Vec<(GbCategory, u64)> {
        let mut v: Vec<_> = self.nodes.iter().map(|(&c, &n)| (c, n)).collect();
        v.sort_by_key(|(c, _)| c.name());
        v
    }

    /// Edges as (source, target, weight) with source < target by name, sorted.
    fn edges_by_name(&self) -> Vec<(GbCategory, GbCategory, u64)> {
        let mut v: Vec<_> = self
            .edges
            .iter()
            .map(|(&(a, b), &w)| if a.name() <= b.name() { (a, b, w) } else { (b, a, w) })
            .collect();
        v.sort_by_key(|(a, b, _)| (a.name(), b.name()));
        v
    }
}

/// Builds the co-classification graph from per-record category sets.
pub fn build_cooperation_graph<'a, I>(records: I) -> IndustryGraph
where
    I: IntoIterator<Item = &'a BTreeSet<GbCategory>>,
{
    let mut graph = IndustryGraph::new();
    for set in records {
        for &cat in set {
            *graph.nodes.entry(cat).or_insert(0) += 1;
        }
        let cats: Vec<GbCategory> = set.iter().copied().collect();
        for (i, &a) in cats.iter().enumerate() {
            for &b in &cats[i + 1..] {
                *graph.edges.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
    }
    graph
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeStats {
    pub degree: usize,
    pub weighted_degree: u64,
}

pub fn graph_stats(graph: &IndustryGraph) -> BTreeMap<GbCategory, NodeStats> {
    let mut stats: BTreeMap<GbCategory, NodeStats> =
        graph.nodes.keys().map(|&c| (c, NodeStats::default())).collect();
    for (&(a, b), &w) in &graph.edges {
        for end in [a, b] {
            let s = stats.entry(end).or_default();
            s.degree += 1;
            s.weighted_degree += w;
        }
    }
    stats
}

fn escape_attr(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// Serializes the graph as GEXF 1.2. Output is byte-stable for equal graphs.
pub fn gexf_string(graph: &IndustryGraph) -> String {
    let nodes = graph.nodes_by_name();
    let ids: HashMap<GbCategory, usize> =
        nodes.iter().enumerate().map(|(i, &(c, _))| (c, i)).collect();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<gexf xmlns=\"http://gexf.net/1.2\" version=\"1.2\">\n");
    out.push_str("  <graph mode=\"static\" defaultedgetype=\"undirected\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    out.push_str("      <attribute id=\"0\" title=\"enterprise_count\" type=\"integer\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for (i, (cat, count)) in nodes.iter().enumerate() {
        out.push_str(&format!(
            "      <node id=\"n{i}\" label=\"{}\">\n        <attvalues>\n          <attvalue for=\"0\" value=\"{count}\"/>\n        </attvalues>\n      </node>\n",
            escape_attr(cat.name())
        ));
    }
    out.push_str("    </nodes>\n");
    out.push_str("    <edges>\n");
    for (i, (a, b, w)) in graph.edges_by_name().iter().enumerate() {
        out.push_str(&format!(
            "      <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\" weight=\"{w}\"/>\n",
            ids[a], ids[b]
        ));
    }
    out.push_str("    </edges>\n");
    out.push_str("  </graph>\n");
    out.push_str("</gexf>\n");
    out
}

/// Writes [`gexf_string`] to `sink`, returning the number of bytes written.
pub fn export_gexf<W: Write>(graph: &IndustryGraph, mut sink: W) -> io::Result<usize> {
    let doc = gexf_string(graph);
    sink.write_all(doc.as_bytes())?;
    sink.flush()?;
    Ok(doc.len())
}

/// `source,target,weight` edge list in export order.
pub fn edge_list_csv(graph: &IndustryGraph) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "target", "weight"]).expect("in-memory write");
    for (a, b, weight) in graph.edges_by_name() {
        w.write_record([a.name(), b.name(), &weight.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>, GraphError> {
    for a in e.attributes() {
        let a = a.map_err(|err| GraphError::Malformed(err.to_string()))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|err| GraphError::Malformed(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart<'_>, name: &str) -> Result<String, GraphError> {
    attr(e, name)?.ok_or_else(|| {
        GraphError::Malformed(format!(
            "<{}> without `{name}`",
            String::from_utf8_lossy(e.name().as_ref())
        ))
    })
}

/// Reads back a GEXF document produced by [`export_gexf`]. Node labels must be
/// category names; node counts come from the `enterprise_count` attribute.
pub fn parse_gexf(doc: &str) -> Result<IndustryGraph, GraphError> {
    let mut reader = quick_xml::Reader::from_str(doc);
    reader.config_mut().trim_text(true);

    let mut labels: HashMap<String, GbCategory> = HashMap::new();
    let mut graph = IndustryGraph::new();
    let mut current: Option<GbCategory> = None;
    let mut edges = Vec::new();

    loop {
        let event = reader.read_event().map_err(|e| GraphError::Malformed(e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => match e.name().as_ref() {
                b"node" => {
                    let id = required(e, "id")?;
                    let label = required(e, "label")?;
                    let cat: GbCategory =
                        label.parse().map_err(|e| GraphError::Malformed(format!("{e}")))?;
                    labels.insert(id, cat);
                    graph.nodes.insert(cat, 0);
                    current = Some(cat);
                }
                b"attvalue" => {
                    if let (Some(cat), Some("0")) = (current, attr(e, "for")?.as_deref()) {
                        let v = required(e, "value")?;
                        let n = v
                            .parse()
                            .map_err(|_| GraphError::Malformed(format!("bad count `{v}`")))?;
                        graph.nodes.insert(cat, n);
                    }
                }
                b"edge" => {
                    let source = required(e, "source")?;
                    let target = required(e, "target")?;
                    let weight = match attr(e, "weight")? {
                        Some(w) => w
                            .parse::<u64>()
                            .map_err(|_| GraphError::Malformed(format!("bad weight `{w}`")))?,
                        None => 1,
                    };
                    edges.push((source, target, weight));
                }
                _ => {}
            },
            Event::End(ref e) if e.name().as_ref() == b"node" => current = None,
            Event::Eof => break,
            _ => {}
        }
    }

    for (s, t, w) in edges {
        let lookup = |id: &str| {
            labels.get(id).copied().ok_or_else(|| {
                GraphError::Malformed(format!("edge references unknown node `{id}`"))
            })
        };
        graph.add_edge(lookup(&s)?, lookup(&t)?, w)?;
    }
    Ok(graph)
}
