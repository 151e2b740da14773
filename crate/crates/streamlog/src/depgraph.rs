//! Predicate dependency graphs and stratification shared by both languages.
//!
//! Edges run from a body predicate to the head predicate that depends on it.
//! A `strict` edge demands a strictly lower stratum for the source (negated or
//! otherwise non-monotone dependencies); a lax edge allows an equal stratum.
//! Stratification fails exactly when some cycle contains a strict edge, and
//! the failure carries that cycle as a witness.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DepEdge {
    pub from: String,
    pub to: String,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    /// Predicates along the offending cycle; first and last entries match.
    pub cycle: Vec<String>,
    /// The strict edge that makes the cycle illegal.
    pub strict_edge: (String, String),
}

#[derive(Debug, Clone, Serialize)]
pub struct StratTable {
    /// Stratum index per predicate, starting at 0.
    pub level: BTreeMap<String, usize>,
    pub num_levels: usize,
}

/// Assigns strata so that every edge is non-decreasing and every strict edge
/// strictly increasing, or reports a cycle through a strict edge.
pub fn stratify(
    nodes: &BTreeSet<String>,
    edges: &[DepEdge],
) -> Result<StratTable, CycleWitness> {
    let ids: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let names: Vec<&str> = nodes.iter().map(|n| n.as_str()).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for e in edges {
        let (Some(&f), Some(&t)) = (ids.get(e.from.as_str()), ids.get(e.to.as_str())) else {
            continue;
        };
        if !succ[f].contains(&t) {
            succ[f].push(t);
        }
    }

    let comp = tarjan_scc(&succ);

    for e in edges {
        if !e.strict {
            continue;
        }
        let (Some(&f), Some(&t)) = (ids.get(e.from.as_str()), ids.get(e.to.as_str())) else {
            continue;
        };
        if comp.of[f] == comp.of[t] {
            let path = path_within_scc(&succ, &comp.of, t, f)
                .expect("strongly connected nodes are mutually reachable");
            let mut cycle: Vec<String> = vec![names[f].to_string()];
            cycle.extend(path.iter().map(|&i| names[i].to_string()));
            return Err(CycleWitness {
                cycle,
                strict_edge: (e.from.clone(), e.to.clone()),
            });
        }
    }

    // Components come out of Tarjan's algorithm in reverse topological
    // order, so numbering them backwards gives monotone levels.
    let mut level = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        level.insert(name.to_string(), comp.count - 1 - comp.of[i]);
    }
    Ok(StratTable { level, num_levels: comp.count })
}

struct SccResult {
    of: Vec<usize>,
    count: usize,
}

fn tarjan_scc(succ: &[Vec<usize>]) -> SccResult {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut of = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    // Iterative DFS: frames of (node, next-successor position).
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, pos)) = call.last() {
            if index[v] == usize::MAX {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if pos < succ[v].len() {
                let w = succ[v][pos];
                call.last_mut().unwrap().1 += 1;
                if index[w] == usize::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        of[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    SccResult { of, count: comp_count }
}

/// Shortest path from `start` to `goal` staying inside one component.
fn path_within_scc(
    succ: &[Vec<usize>],
    comp_of: &[usize],
    start: usize,
    goal: usize,
) -> Option<Vec<usize>> {
    let c = comp_of[start];
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(start);
    let mut seen = BTreeSet::new();
    seen.insert(start);
    while let Some(v) = queue.pop_front() {
        if v == goal {
            let mut path = vec![goal];
            let mut cur = goal;
            while cur != start {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &succ[v] {
            if comp_of[w] == c && seen.insert(w) {
                prev.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    None
}
