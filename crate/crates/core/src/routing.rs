//! Coupling graphs and greedy SWAP routing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Undirected, connected hardware graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

impl CouplingGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("coupling graph needs at least one qubit"));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut clean = Vec::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for {n} qubits")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop on qubit {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !clean.contains(&e) {
                clean.push(e);
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let g = CouplingGraph {
            n,
            edges: clean,
            adjacency,
        };
        if g.distances_from(0).iter().any(|d| d.is_none()) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Path `0 - 1 - … - (n-1)`.
    pub fn line(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    /// Heavy-hex lattice with `rows` rows and `cols` columns of cells.
    ///
    /// There are `rows + 1` horizontal lines of `4·cols + 1` qubits. Bridge
    /// qubits join line `r` to line `r + 1` at positions `p ≡ 0 (mod 4)` when
    /// `r` is even and `p ≡ 2 (mod 4)` when `r` is odd. Qubits are numbered
    /// line by line, each line followed by the bridges below it.
    pub fn heavy_hex(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("heavy-hex lattice needs at least one cell"));
        }
        let width = 4 * cols + 1;
        let mut next = 0usize;
        let mut edges = Vec::new();
        let mut line_start = Vec::with_capacity(rows + 1);
        let mut bridges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(rows);
        for r in 0..=rows {
            line_start.push(next);
            for p in 1..width {
                edges.push((next + p - 1, next + p));
            }
            next += width;
            if r < rows {
                let offset = if r % 2 == 0 { 0 } else { 2 };
                let mut row = Vec::new();
                for p in (offset..width).step_by(4) {
                    row.push((next, p));
                    next += 1;
                }
                bridges.push(row);
            }
        }
        for (r, row) in bridges.iter().enumerate() {
            for &(q, p) in row {
                edges.push((line_start[r] + p, q));
                edges.push((q, line_start[r + 1] + p));
            }
        }
        Self::new(next, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// BFS shortest path, neighbours explored in ascending order.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit on the graph's physical qubits.
    pub circuit: Circuit,
    /// `final_layout[l]` is the physical qubit holding logical qubit `l` at the end.
    pub final_layout: Vec<usize>,
}

/// Greedy router, no lookahead. Logical qubit `l` starts on physical qubit
/// `l`. A CNOT between non-adjacent qubits first SWAPs its control along a
/// BFS shortest path until it neighbours the target; each SWAP is three CNOTs.
pub fn route(c: &Circuit, g: &CouplingGraph) -> Result<RoutedCircuit> {
    if g.n < c.n() {
        return Err(Error::invalid(format!(
            "circuit needs {} qubits, graph has {}",
            c.n(),
            g.n
        )));
    }
    let mut layout: Vec<usize> = (0..g.n).collect();
    let mut occupant: Vec<usize> = (0..g.n).collect();
    let mut out = Circuit::new(g.n);
    out.add_global_phase(c.global_phase());
    for gate in c.gates() {
        match *gate {
            Gate::U { qubit, matrix } => out.push_u(layout[qubit], matrix)?,
            Gate::Cnot { control, target } => {
                let (pc, pt) = (layout[control], layout[target]);
                if !g.has_edge(pc, pt) {
                    let path = g.shortest_path(pc, pt);
                    for w in path[..path.len() - 1].windows(2) {
                        let (a, b) = (w[0], w[1]);
                        out.push_cnot(a, b)?;
                        out.push_cnot(b, a)?;
                        out.push_cnot(a, b)?;
                        let (la, lb) = (occupant[a], occupant[b]);
                        occupant.swap(a, b);
                        layout[la] = b;
                        layout[lb] = a;
                    }
                }
                out.push_cnot(layout[control], layout[target])?;
            }
        }
    }
    layout.truncate(c.n());
    Ok(RoutedCircuit {
        circuit: out,
        final_layout: layout,
    })
}
