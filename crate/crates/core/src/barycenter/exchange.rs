use std::cell::RefCell;

use ndarray::Array1;

use crate::error::{Error, Result};

use super::graph::NetworkGraph;

/// Per-round gradient exchange. Each agent posts its gradient once per
/// round and may read back only its own post and those of its graph
/// neighbors. Reads can be logged for auditing.
#[derive(Debug)]
pub struct GradientBoard<'g> {
    graph: &'g NetworkGraph,
    posts: Vec<Option<Array1<f64>>>,
    log: Option<RefCell<Vec<(usize, usize)>>>,
}

impl<'g> GradientBoard<'g> {
    pub fn new(graph: &'g NetworkGraph) -> Self {
        Self {
            graph,
            posts: vec![None; graph.node_count()],
            log: None,
        }
    }

    /// Records every `(reader, source)` pair passed to [`Self::read`].
    pub fn audited(graph: &'g NetworkGraph) -> Self {
        Self {
            log: Some(RefCell::new(Vec::new())),
            ..Self::new(graph)
        }
    }

    pub fn post(&mut self, agent: usize, gradient: Array1<f64>) {
        self.posts[agent] = Some(gradient);
    }

    pub fn read(&self, reader: usize, source: usize) -> Result<&Array1<f64>> {
        if reader != source && !self.graph.adjacent(reader, source) {
            return Err(Error::NotNeighbor {
                reader,
                source_agent: source,
            });
        }
        if let Some(log) = &self.log {
            log.borrow_mut().push((reader, source));
        }
        self.posts[source].as_ref().ok_or_else(|| {
            Error::InvalidParameter(format!("agent {source} has not posted this round"))
        })
    }

    pub fn take_log(&self) -> Vec<(usize, usize)> {
        self.log
            .as_ref()
            .map(|l| std::mem::take(&mut *l.borrow_mut()))
            .unwrap_or_default()
    }
}
