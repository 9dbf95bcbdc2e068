use super::union_find::DisjointSet;
use super::IndexAssignment;
use crate::embeddings::TokenMatrix;

/// Directed successor graph over tokens. Each retained vertex has at most one
/// out-edge; a self-edge marks the end of a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGraph {
    /// Token ids kept as vertices, ascending.
    pub vertices: Vec<usize>,
    /// Out-edge target per token id; `None` for dropped or dangling tokens.
    pub successor: Vec<Option<usize>>,
}

impl IndexGraph {
    pub fn from_edges(n_tokens: usize, vertices: Vec<usize>, edges: &[(usize, usize)]) -> Self {
        let mut successor = vec![None; n_tokens];
        for &(a, b) in edges {
            successor[a] = Some(b);
        }
        IndexGraph { vertices, successor }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.iter().filter_map(|&v| self.successor[v].map(|s| (v, s))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Ordered token sequences, one per weakly connected component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockPrediction {
    pub blocks: Vec<Vec<usize>>,
}

/// Drops "not a text" tokens and links each remaining token to the token whose
/// assigned index it predicted. Predictions naming no retained token leave the
/// vertex without an out-edge.
pub fn build_graph(assignment: &IndexAssignment, tokens: &TokenMatrix) -> IndexGraph {
    let n = assignment.classes.len();
    let kept: Vec<bool> = assignment.classes.iter().map(|&c| c != assignment.not_text()).collect();
    let vertices: Vec<usize> = (0..n).filter(|&i| kept[i]).collect();
    let mut successor = vec![None; n];
    for &i in &vertices {
        successor[i] = tokens.token_with_index(assignment.classes[i]).filter(|&j| kept[j]);
    }
    IndexGraph { vertices, successor }
}

/// Splits the graph into weakly connected components and orders each one.
///
/// Components come from union-find over the non-self edges. Each is walked
/// along successor edges starting from its vertices with no incoming non-self
/// edge, lowest id first, then from any still-unvisited vertex in id order (so
/// cycles start at their lowest id). A walk stops at a self-edge, a vertex
/// without an out-edge, or a vertex already emitted.
pub fn extract_blocks(g: &IndexGraph) -> BlockPrediction {
    let n = g.successor.len();
    let mut ds = DisjointSet::new(n);
    let mut has_pred = vec![false; n];
    for (a, b) in g.edges() {
        if a != b {
            ds.union(a, b);
            has_pred[b] = true;
        }
    }
    let labels = ds.labels();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &g.vertices {
        members[labels[v]].push(v);
    }
    let mut visited = vec![false; n];
    let mut blocks = Vec::new();
    for comp in members.iter_mut().filter(|m| !m.is_empty()) {
        comp.sort_unstable();
        let starts = comp.iter().filter(|&&v| !has_pred[v]).chain(comp.iter());
        let mut order = Vec::with_capacity(comp.len());
        for &start in starts {
            let mut cur = start;
            while !visited[cur] {
                visited[cur] = true;
                order.push(cur);
                match g.successor[cur] {
                    Some(next) if next != cur => cur = next,
                    _ => break,
                }
            }
        }
        blocks.push(order);
    }
    BlockPrediction { blocks }
}
