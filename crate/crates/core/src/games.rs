//! Acyclic threshold games: a backward-induction solver and the degree-2
//! axiom system whose monomial-PC consequences decide the winner.
//!
//! Player 0 selects at least `theta(v)` successors, Player 1 moves to one of
//! them, and a player who cannot move loses.

use std::collections::BTreeMap;

use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Scalar};
use crate::error::{Error, Result};
use crate::pc::{Monomial, PolySystem, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdGame {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub theta: Vec<usize>,
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSolution {
    pub w0: Vec<usize>,
    pub w1: Vec<usize>,
    /// Number of successors won by Player 0, per node.
    pub ws: Vec<usize>,
}

impl GameSolution {
    pub fn player0_wins(&self, v: usize) -> bool {
        self.w0.binary_search(&v).is_ok()
    }
}

impl ThresholdGame {
    /// Successor lists, sorted.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        for s in &mut out {
            s.sort_unstable();
        }
        out
    }

    /// Checks ids, thresholds, duplicate edges and acyclicity; returns a
    /// topological order.
    pub fn validate(&self) -> Result<Vec<usize>> {
        if self.theta.len() != self.n {
            return Err(Error::InvalidInput(format!("theta has {} entries for {} nodes", self.theta.len(), self.n)));
        }
        if self.n > 0 && self.start >= self.n {
            return Err(Error::InvalidInput("start node out of range".into()));
        }
        let succ = self.successors();
        for (v, s) in succ.iter().enumerate() {
            if s.iter().any(|&u| u >= self.n) {
                return Err(Error::InvalidInput(format!("edge from {v} leaves the node set")));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("duplicate edge at node {v}")));
            }
            if self.theta[v] > s.len() + 1 {
                return Err(Error::InvalidInput(format!(
                    "theta({v}) = {} exceeds out-degree {} plus one",
                    self.theta[v],
                    s.len()
                )));
            }
        }
        let mut g = DiGraph::<(), ()>::new();
        let ids: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            g.add_edge(ids[a], ids[b], ());
        }
        petgraph::algo::toposort(&g, None)
            .map(|o| o.into_iter().map(|x| x.index()).collect())
            .map_err(|_| Error::InvalidInput("game graph has a cycle".into()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: ThresholdGame = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }
}

/// Winning regions by backward induction: `v` is won by Player 0 iff at
/// least `theta(v)` of its successors are.
pub fn solve_threshold_game(g: &ThresholdGame) -> Result<GameSolution> {
    let order = g.validate()?;
    let succ = g.successors();
    let mut win = vec![false; g.n];
    let mut ws = vec![0; g.n];
    for &v in order.iter().rev() {
        ws[v] = succ[v].iter().filter(|&&u| win[u]).count();
        win[v] = ws[v] >= g.theta[v];
    }
    let w0 = (0..g.n).filter(|&v| win[v]).collect();
    let w1 = (0..g.n).filter(|&v| !win[v]).collect();
    Ok(GameSolution { w0, w1, ws })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AxiomGroup {
    T,
    C,
    E,
    N,
}

/// The axiom system of a game with its variable layout.
#[derive(Clone, Debug)]
pub struct GameAxioms {
    pub system: PolySystem,
    pub groups: Vec<AxiomGroup>,
    pub var_map: BTreeMap<String, u32>,
    n: usize,
    y: BTreeMap<(usize, usize), u32>,
    z: BTreeMap<(usize, usize, usize, usize), u32>,
}

impl GameAxioms {
    pub fn x(&self, v: usize) -> u32 {
        v as u32
    }

    pub fn x_bar(&self, v: usize) -> u32 {
        (self.system.num_vars as usize - self.n + v) as u32
    }

    pub fn y(&self, v: usize, m: usize) -> Option<u32> {
        self.y.get(&(v, m)).copied()
    }

    pub fn z(&self, v: usize, m: usize, u: usize, j: usize) -> Option<u32> {
        self.z.get(&(v, m, u, j)).copied()
    }
}

/// Emits the (T), (C), (E) and (N) axiom families.
///
/// Variables: `X_v` for every node, `Y_v^m` for every node and
/// `0 <= m <= s(v)` (terminal nodes included, since (E) mentions `Y_v^0`
/// there), `Z_v^m[u->j]` for non-terminal `v`, `1 <= j <= m <= s(v)` and
/// successors `u`, then a dual `Xbar_v` per node. The m = 0 case of (C) is a
/// single summed axiom per node.
pub fn encode_threshold_axioms(g: &ThresholdGame, field: Field) -> Result<GameAxioms> {
    g.validate()?;
    field.validate()?;
    let succ = g.successors();
    let mut names = Vec::new();
    for v in 0..g.n {
        names.push(format!("X[{v}]"));
    }
    let mut y = BTreeMap::new();
    for (v, s) in succ.iter().enumerate() {
        for m in 0..=s.len() {
            y.insert((v, m), names.len() as u32);
            names.push(format!("Y[{v},{m}]"));
        }
    }
    let mut z = BTreeMap::new();
    for (v, s) in succ.iter().enumerate() {
        for m in 1..=s.len() {
            for &u in s {
                for j in 1..=m {
                    z.insert((v, m, u, j), names.len() as u32);
                    names.push(format!("Z[{v},{m},{u},{j}]"));
                }
            }
        }
    }
    let bar0 = names.len() as u32;
    for v in 0..g.n {
        names.push(format!("Xbar[{v}]"));
    }

    let one = field.one();
    let neg = field.int(-1);
    let mono = |vars: &[u32]| Monomial::from_vars(vars.iter().copied());
    let poly = |terms: Vec<(Scalar, Monomial)>| Polynomial::from_terms(field, terms);
    let mut sys = PolySystem::new(field, names.len() as u32);
    let mut groups = Vec::new();
    let mut push = |sys: &mut PolySystem, grp, p: Polynomial| {
        sys.axioms.push(p);
        groups.push(grp);
    };

    for (v, s) in succ.iter().enumerate() {
        let x = v as u32;
        if g.theta[v] == 0 {
            push(&mut sys, AxiomGroup::T, poly(vec![(one.clone(), mono(&[x])), (neg.clone(), Monomial::one())]));
        } else if s.len() < g.theta[v] {
            push(&mut sys, AxiomGroup::T, poly(vec![(one.clone(), mono(&[x]))]));
        }
    }
    for (v, s) in succ.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        for m in 1..=s.len() {
            let ym = (neg.clone(), mono(&[y[&(v, m)]]));
            for &u in s {
                let mut t: Vec<_> = (1..=m).map(|j| (one.clone(), mono(&[z[&(v, m, u, j)]]))).collect();
                t.push(ym.clone());
                push(&mut sys, AxiomGroup::C, poly(t));
            }
            for j in 1..=m {
                let mut t: Vec<_> = s.iter().map(|&u| (one.clone(), mono(&[u as u32, z[&(v, m, u, j)]]))).collect();
                t.push(ym.clone());
                push(&mut sys, AxiomGroup::C, poly(t));
            }
        }
        let y0 = y[&(v, 0)];
        push(&mut sys, AxiomGroup::C, poly(s.iter().map(|&u| (one.clone(), mono(&[u as u32, y0]))).collect()));
    }
    for (v, s) in succ.iter().enumerate() {
        let x = v as u32;
        let th = g.theta[v];
        let mut lose = vec![(one.clone(), Monomial::one()), (neg.clone(), mono(&[x]))];
        lose.extend((0..th.min(s.len() + 1)).map(|m| (neg.clone(), mono(&[y[&(v, m)]]))));
        push(&mut sys, AxiomGroup::E, poly(lose));
        let mut win = vec![(one.clone(), mono(&[x]))];
        win.extend((th..=s.len()).map(|m| (neg.clone(), mono(&[y[&(v, m)]]))));
        push(&mut sys, AxiomGroup::E, poly(win));
    }
    for v in 0..g.n {
        let t = vec![(one.clone(), Monomial::one()), (neg.clone(), mono(&[v as u32])), (neg.clone(), mono(&[bar0 + v as u32]))];
        push(&mut sys, AxiomGroup::N, poly(t));
    }

    sys.var_names = Some(names.clone());
    let var_map = names.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
    Ok(GameAxioms { system: sys, groups, var_map, n: g.n, y, z })
}

/// The intended model: `X_v = 1` iff `v` is won by Player 0, `Y_v^m = 1`
/// iff `ws(v) = m`, and for `m = ws(v) > 0` the winning successors
/// `u_1 < ... < u_m` get `Z[u_i -> i] = 1` while every losing successor `u`
/// gets `Z[u -> 1] = 1`. Indexed by variable id.
pub fn intended_model(g: &ThresholdGame, axioms: &GameAxioms) -> Result<Vec<bool>> {
    let sol = solve_threshold_game(g)?;
    let succ = g.successors();
    let mut a = vec![false; axioms.system.num_vars as usize];
    for v in 0..g.n {
        let w = sol.player0_wins(v);
        a[axioms.x(v) as usize] = w;
        a[axioms.x_bar(v) as usize] = !w;
        let ws = sol.ws[v];
        a[axioms.y(v, ws).expect("ws is at most s(v)") as usize] = true;
        if ws == 0 {
            continue;
        }
        let mut i = 0;
        for &u in &succ[v] {
            let j = if sol.player0_wins(u) {
                i += 1;
                i
            } else {
                1
            };
            a[axioms.z(v, ws, u, j).unwrap() as usize] = true;
        }
    }
    Ok(a)
}
