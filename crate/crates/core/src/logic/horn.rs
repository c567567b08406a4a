use std::collections::BTreeMap;

use super::eval::check_vocabulary;
use super::formula::{Env, Formula, LfpFormula};
use super::structure::RelStructure;
use crate::error::Result;
use crate::resolution::{Clause, CnfFormula, Literal};

/// Horn formula whose unsatisfiability is equivalent to `A |= phi`.
#[derive(Clone, Debug)]
pub struct HornEncoding {
    pub cnf: CnfFormula,
    /// Instantiated subformula, printed with its free variables replaced by
    /// elements, to its propositional variable.
    pub var_map: BTreeMap<String, u32>,
    /// Variable of the sentence itself.
    pub root: u32,
}

struct Builder<'a> {
    a: &'a RelStructure,
    phi: &'a LfpFormula,
    ids: BTreeMap<String, u32>,
    todo: Vec<(&'a Formula, Env, u32)>,
    clauses: Vec<Clause>,
}

impl<'a> Builder<'a> {
    fn var(&mut self, f: &'a Formula, env: Env) -> u32 {
        let key = f.instantiated(&env);
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.ids.len() as u32 + 1;
        self.ids.insert(key, id);
        self.todo.push((f, env, id));
        id
    }

    fn implies(&mut self, from: &[u32], to: u32) {
        self.clauses.push(Clause::new(from.iter().map(|&x| Literal::neg(x)).chain([Literal::pos(to)])));
    }

    fn unfold(&mut self, name: &str, args: Vec<u32>, target: u32) {
        let (params, body) = self.phi.binder(name).expect("checked binder");
        let env: Env = params.iter().cloned().zip(args).collect();
        let b = self.var(body, env);
        self.implies(&[b], target);
    }

    fn process(&mut self, f: &'a Formula, env: Env, id: u32) {
        match f {
            Formula::Rel { .. } | Formula::Eq { .. } => {
                let truth = literal_holds(self.a, f, &env);
                self.clauses.push(Clause::new([Literal { var: id, positive: truth }]));
            }
            Formula::Or(x, y) => {
                let (vx, vy) = (self.var(x, env.clone()), self.var(y, env));
                self.implies(&[vx], id);
                self.implies(&[vy], id);
            }
            Formula::And(x, y) => {
                let (vx, vy) = (self.var(x, env.clone()), self.var(y, env));
                self.implies(&[vx, vy], id);
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let mut kids = Vec::new();
                for x in 0..self.a.n {
                    let mut e = env.clone();
                    e.insert(v.clone(), x);
                    kids.push(self.var(g, e));
                }
                if matches!(f, Formula::Exists(..)) {
                    for k in kids {
                        self.implies(&[k], id);
                    }
                } else {
                    self.implies(&kids, id);
                }
            }
            Formula::Fix { name, args } | Formula::Lfp { name, args, .. } => {
                let vals = args.iter().map(|t| t.value(&env)).collect();
                self.unfold(name, vals, id);
            }
        }
    }
}

fn literal_holds(a: &RelStructure, f: &Formula, env: &Env) -> bool {
    match f {
        Formula::Rel { name, args, negated } => {
            let t: Vec<u32> = args.iter().map(|x| x.value(env)).collect();
            a.holds(name, &t) != *negated
        }
        Formula::Eq { left, right, negated } => (left.value(env) == right.value(env)) != *negated,
        _ => unreachable!("not a literal"),
    }
}

/// Compiles `A |= phi` into a Horn formula: one variable per instantiated
/// subformula, the clause rules for literals, connectives, quantifiers and
/// fixpoint unfolding, and the closing clause `not X_phi`.
pub fn horn_encode(a: &RelStructure, phi: &LfpFormula) -> Result<HornEncoding> {
    check_vocabulary(a, phi)?;
    let mut b = Builder { a, phi, ids: BTreeMap::new(), todo: Vec::new(), clauses: Vec::new() };
    let root = b.var(phi.root(), Env::new());
    while let Some((f, env, id)) = b.todo.pop() {
        b.process(f, env, id);
    }
    b.clauses.push(Clause::new([Literal::neg(root)]));
    let cnf = CnfFormula::from_clauses(b.ids.len() as u32, b.clauses);
    Ok(HornEncoding { cnf, var_map: b.ids, root })
}
