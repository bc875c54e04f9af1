use super::{BitString, IdError, IdOutcome, IdStatus, Query, Resolution, SortedHypothesisSet};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    children: [Option<usize>; 2],
    /// 1-based member index ending here.
    terminal: Option<usize>,
    /// Smallest member index in the subtree.
    first: usize,
}

/// Binary trie over the members of a sorted set; member indices follow the
/// set's order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextTree {
    nodes: Vec<Node>,
    members: usize,
}

pub fn build_context_tree(set: &SortedHypothesisSet) -> ContextTree {
    let mut nodes = vec![Node {
        children: [None, None],
        terminal: None,
        first: 0,
    }];
    // members arrive in sorted order, so the first visitor of a node owns its minimum
    for (idx, m) in set.members().iter().enumerate() {
        let j = idx + 1;
        let mut node = 0;
        if nodes[0].first == 0 {
            nodes[0].first = j;
        }
        for &b in m.bits() {
            let slot = b as usize;
            node = match nodes[node].children[slot] {
                Some(c) => c,
                None => {
                    nodes.push(Node {
                        children: [None, None],
                        terminal: None,
                        first: j,
                    });
                    let c = nodes.len() - 1;
                    nodes[node].children[slot] = Some(c);
                    c
                }
            };
        }
        nodes[node].terminal = Some(j);
    }
    ContextTree {
        nodes,
        members: set.len(),
    }
}

impl ContextTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn member_count(&self) -> usize {
        self.members
    }

    /// Root-to-terminal paths in member order.
    pub fn paths(&self) -> Vec<BitString> {
        let mut out = vec![BitString::default(); self.members];
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((node, path)) = stack.pop() {
            if let Some(j) = self.nodes[node].terminal {
                out[j - 1] = BitString::new(path.clone());
            }
            for b in [true, false] {
                if let Some(c) = self.nodes[node].children[b as usize] {
                    let mut p = path.clone();
                    p.push(b);
                    stack.push((c, p));
                }
            }
        }
        out
    }

    /// Member indices ending at or below `node`, in sorted order.
    fn subtree_members(&self, node: usize, include_self: bool) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(node, include_self)];
        while let Some((n, include)) = stack.pop() {
            if include {
                out.extend(self.nodes[n].terminal);
            }
            for c in self.nodes[n].children.iter().rev().flatten() {
                stack.push((*c, true));
            }
        }
        out
    }
}

/// Walks the trie along the query; `i` is the depth reached.
///
/// `h` mirrors the ordered scan: the first member below the node reached
/// before the last symbol examined, or the matched member when verified.
pub fn identify_tree(
    tree: &ContextTree,
    query: &Query,
    r: Resolution,
) -> Result<IdOutcome, IdError> {
    let view = query.view(r)?;
    if tree.members == 0 {
        return Ok(IdOutcome::empty_set());
    }
    let theta = view.bits;
    let mut node = 0;
    let mut h = 0;
    for (d, &b) in theta.iter().enumerate() {
        h = tree.nodes[node].first;
        match tree.nodes[node].children[b as usize] {
            Some(c) => node = c,
            None => {
                return Ok(IdOutcome {
                    status: IdStatus::Falsified,
                    h,
                    i: d + 1,
                    partial_subset: Vec::new(),
                })
            }
        }
    }
    let n = theta.len();
    if !view.truncated {
        if let Some(j) = tree.nodes[node].terminal {
            return Ok(IdOutcome {
                status: IdStatus::Verified,
                h: j,
                i: n,
                partial_subset: vec![j],
            });
        }
    }
    let partial_subset = tree.subtree_members(node, view.truncated);
    let status = if view.truncated && !partial_subset.is_empty() {
        IdStatus::Undetermined
    } else {
        IdStatus::Falsified
    };
    Ok(IdOutcome {
        status,
        h,
        i: n,
        partial_subset,
    })
}
