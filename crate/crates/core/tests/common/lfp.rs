//! Stage-table oracle and random generator for positive LFP sentences.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use prooflab::logic::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::rng;

// ------------------------------------------------------------- oracle ----

pub type Stages = HashMap<String, BTreeSet<Vec<u32>>>;

pub fn term(t: &Term, env: &BTreeMap<String, u32>) -> u32 {
    match t {
        Term::Const(c) => *c,
        Term::Var(v) => env[v],
    }
}

/// Evaluates by building the full stage table of every fixpoint it meets:
/// stage i + 1 is the set of tuples whose body holds with the relation read
/// as stage i, and the table stops when two stages coincide.
pub fn oracle(a: &RelStructure, f: &Formula, env: &BTreeMap<String, u32>, fix: &Stages) -> bool {
    match f {
        Formula::Rel { name, args, negated } => {
            a.holds(name, &args.iter().map(|t| term(t, env)).collect::<Vec<_>>()) != *negated
        }
        Formula::Eq { left, right, negated } => (term(left, env) == term(right, env)) != *negated,
        Formula::Fix { name, args } => fix[name].contains(&args.iter().map(|t| term(t, env)).collect::<Vec<_>>()),
        Formula::And(x, y) => oracle(a, x, env, fix) && oracle(a, y, env, fix),
        Formula::Or(x, y) => oracle(a, x, env, fix) || oracle(a, y, env, fix),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let mut results = (0..a.n).map(|x| {
                let mut e = env.clone();
                e.insert(v.clone(), x);
                oracle(a, body, &e, fix)
            });
            if matches!(f, Formula::Exists(..)) {
                results.any(|b| b)
            } else {
                results.all(|b| b)
            }
        }
        Formula::Lfp { name, params, body, args } => {
            let tuples: Vec<Vec<u32>> = (0..a.n.pow(params.len() as u32))
                .map(|mut code| {
                    (0..params.len())
                        .map(|_| {
                            let x = code % a.n;
                            code /= a.n;
                            x
                        })
                        .collect()
                })
                .collect();
            let mut table: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new()];
            loop {
                let mut f2 = fix.clone();
                f2.insert(name.clone(), table.last().unwrap().clone());
                let next: BTreeSet<Vec<u32>> = tuples
                    .iter()
                    .filter(|t| {
                        let e: BTreeMap<String, u32> = params.iter().cloned().zip(t.iter().copied()).collect();
                        oracle(a, body, &e, &f2)
                    })
                    .cloned()
                    .collect();
                assert!(table.last().unwrap().is_subset(&next), "stages must grow");
                if &next == table.last().unwrap() {
                    break;
                }
                table.push(next);
            }
            table.last().unwrap().contains(&args.iter().map(|t| term(t, env)).collect::<Vec<_>>())
        }
    }
}

// ---------------------------------------------------------- generator ----

pub struct Gen<'a> {
    pub r: &'a mut ChaCha8Rng,
    pub lfps: usize,
    pub efp0: bool,
}

impl Gen<'_> {
    fn term(&mut self, scope: &[String]) -> Term {
        if scope.is_empty() || self.r.gen_bool(0.15) {
            Term::Const(0)
        } else {
            Term::Var(scope[self.r.gen_range(0..scope.len())].clone())
        }
    }

    fn atom(&mut self, scope: &[String], fix: &[(String, usize)]) -> Formula {
        let neg = self.r.gen_bool(0.3);
        match self.r.gen_range(0..4) {
            0 => Formula::Rel { name: "P".into(), args: vec![self.term(scope)], negated: neg },
            1 => Formula::Eq { left: self.term(scope), right: self.term(scope), negated: neg },
            2 if !fix.is_empty() => {
                let (name, k) = fix[self.r.gen_range(0..fix.len())].clone();
                Formula::Fix { name, args: (0..k).map(|_| self.term(scope)).collect() }
            }
            _ => Formula::Rel { name: "E".into(), args: vec![self.term(scope), self.term(scope)], negated: neg },
        }
    }

    pub fn formula(&mut self, scope: &[String], fix: &[(String, usize)], depth: usize) -> Formula {
        if depth == 0 || self.r.gen_bool(0.2) {
            return self.atom(scope, fix);
        }
        let b = |f: Formula| Box::new(f);
        match self.r.gen_range(0..6) {
            0 => Formula::And(b(self.formula(scope, fix, depth - 1)), b(self.formula(scope, fix, depth - 1))),
            1 => Formula::Or(b(self.formula(scope, fix, depth - 1)), b(self.formula(scope, fix, depth - 1))),
            2 | 3 => {
                let v = format!("x{}", scope.len());
                let mut s = scope.to_vec();
                s.push(v.clone());
                let body = b(self.formula(&s, fix, depth - 1));
                if self.efp0 || self.r.gen_bool(0.6) {
                    Formula::Exists(v, body)
                } else {
                    Formula::Forall(v, body)
                }
            }
            _ => {
                let name = format!("R{}", self.lfps);
                self.lfps += 1;
                let k = self.r.gen_range(1..=2);
                let params: Vec<String> = (0..k).map(|i| format!("p{}_{i}", name)).collect();
                let mut fx = fix.to_vec();
                fx.push((name.clone(), k));
                // base case or a step through the fixpoint, so that stages grow
                let base = self.formula(&params, fix, depth - 1);
                let step = self.formula(&params, &fx, depth - 1);
                let body = Formula::Or(b(base), b(step));
                Formula::Lfp { name, params, body: b(body), args: (0..k).map(|_| self.term(scope)).collect() }
            }
        }
    }
}

pub fn lfp_structure(r: &mut ChaCha8Rng) -> RelStructure {
    let n = r.gen_range(1..=5);
    let mut a = RelStructure::new(n);
    a.add_relation("P", 1).unwrap();
    a.add_relation("E", 2).unwrap();
    for x in 0..n {
        if r.gen_bool(0.4) {
            a.add_tuple("P", &[x]).unwrap();
        }
        for y in 0..n {
            if r.gen_bool(0.3) {
                a.add_tuple("E", &[x, y]).unwrap();
            }
        }
    }
    a
}

pub fn corpus(seed: u64, count: usize, efp0: bool) -> Vec<(RelStructure, LfpFormula)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let a = lfp_structure(&mut r);
        let depth = r.gen_range(2..=5);
        let root = Gen { r: &mut r, lfps: 0, efp0 }.formula(&[], &[], depth);
        if let Ok(phi) = LfpFormula::new(root) {
            out.push((a, phi));
        }
    }
    out
}
