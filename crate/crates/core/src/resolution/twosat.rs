use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::cnf::{CnfFormula, Literal};
use crate::error::{Error, Result};

fn node(l: Literal) -> u32 {
    2 * (l.var - 1) + u32::from(!l.positive)
}

/// Satisfiability of a 2-CNF via strongly connected components of the
/// implication graph: unsatisfiable iff some `x` and `!x` share a component.
pub fn two_sat_oracle(f: &CnfFormula) -> Result<bool> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..2 * f.num_vars).map(|_| g.add_node(())).collect();
    for (ci, c) in f.clauses().iter().enumerate() {
        match c.literals() {
            [] => return Ok(false),
            [a] => {
                g.add_edge(nodes[node(a.negate()) as usize], nodes[node(*a) as usize], ());
            }
            [a, b] => {
                g.add_edge(nodes[node(a.negate()) as usize], nodes[node(*b) as usize], ());
                g.add_edge(nodes[node(b.negate()) as usize], nodes[node(*a) as usize], ());
            }
            _ => return Err(Error::InvalidInput(format!("clause {ci} has width {} > 2", c.width()))),
        }
    }
    let mut comp = vec![0usize; nodes.len()];
    for (i, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for n in scc {
            comp[n.index()] = i;
        }
    }
    Ok((0..f.num_vars as usize).all(|v| comp[2 * v] != comp[2 * v + 1]))
}
