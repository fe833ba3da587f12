//! Bipartite variable/factor adjacency derived from factor scopes.

use std::collections::BTreeSet;

use crate::dcop::Dcop;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    /// Factors adjacent to each variable, ascending.
    pub var_neighbors: Vec<Vec<usize>>,
    /// Scope of each factor, in scope order.
    pub factor_neighbors: Vec<Vec<usize>>,
    pub num_edges: usize,
}

impl FactorGraph {
    pub fn build(dcop: &Dcop) -> Self {
        let mut var_neighbors = vec![Vec::new(); dcop.num_variables()];
        let mut factor_neighbors = Vec::with_capacity(dcop.factors.len());
        let mut num_edges = 0;
        for (m, f) in dcop.factors.iter().enumerate() {
            for &v in &f.scope {
                var_neighbors[v].push(m);
            }
            num_edges += f.scope.len();
            factor_neighbors.push(f.scope.clone());
        }
        FactorGraph {
            var_neighbors,
            factor_neighbors,
            num_edges,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.var_neighbors.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factor_neighbors.len()
    }

    /// Variables sharing at least one factor with `var`, excluding itself.
    pub fn variable_neighbors(&self, var: usize) -> BTreeSet<usize> {
        self.var_neighbors[var]
            .iter()
            .flat_map(|&m| self.factor_neighbors[m].iter().copied())
            .filter(|&v| v != var)
            .collect()
    }

    /// True iff the graph has no cycle (a forest). Parallel factors over the
    /// same pair of variables count as a cycle.
    pub fn is_acyclic(&self) -> bool {
        // a forest has |E| = |V| - components
        let nodes = self.num_variables() + self.num_factors();
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let n = self.num_variables();
        for (m, scope) in self.factor_neighbors.iter().enumerate() {
            for &v in scope {
                let a = find(&mut parent, v);
                let b = find(&mut parent, n + m);
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
        }
        true
    }
}
