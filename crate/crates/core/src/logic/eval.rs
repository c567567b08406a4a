use std::collections::{BTreeSet, HashMap};

use super::formula::{Env, Formula, LfpFormula};
use super::structure::RelStructure;
use crate::error::{Error, Result};

pub(crate) fn check_vocabulary(a: &RelStructure, phi: &LfpFormula) -> Result<()> {
    for (name, arity) in phi.input_relations() {
        match a.arity(&name) {
            Some(k) if k == arity => {}
            Some(k) => return Err(Error::InvalidInput(format!("relation {name} has arity {k}, formula uses {arity}"))),
            None => return Err(Error::InvalidInput(format!("structure has no relation {name}"))),
        }
    }
    if let Some(c) = phi.constants().into_iter().find(|&c| c >= a.n) {
        return Err(Error::InvalidInput(format!("constant {c} outside universe of size {}", a.n)));
    }
    Ok(())
}

type Fix = HashMap<String, BTreeSet<Vec<u32>>>;

/// Model checking by direct recursion, computing each least fixed point by
/// Kleene iteration from the empty relation.
pub fn eval_poslfp(a: &RelStructure, phi: &LfpFormula) -> Result<bool> {
    check_vocabulary(a, phi)?;
    Ok(eval(a, phi.root(), &mut Env::new(), &Fix::new()))
}

fn eval(a: &RelStructure, f: &Formula, env: &mut Env, fix: &Fix) -> bool {
    match f {
        Formula::Rel { name, args, negated } => {
            let t: Vec<u32> = args.iter().map(|x| x.value(env)).collect();
            a.holds(name, &t) != *negated
        }
        Formula::Eq { left, right, negated } => (left.value(env) == right.value(env)) != *negated,
        Formula::Fix { name, args } => {
            let t: Vec<u32> = args.iter().map(|x| x.value(env)).collect();
            fix[name].contains(&t)
        }
        Formula::And(x, y) => eval(a, x, env, fix) && eval(a, y, env, fix),
        Formula::Or(x, y) => eval(a, x, env, fix) || eval(a, y, env, fix),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let want = matches!(f, Formula::Exists(..));
            let saved = env.get(v).copied();
            let mut hit = !want;
            for x in 0..a.n {
                env.insert(v.clone(), x);
                if eval(a, g, env, fix) == want {
                    hit = want;
                    break;
                }
            }
            match saved {
                Some(s) => env.insert(v.clone(), s),
                None => env.remove(v),
            };
            hit
        }
        Formula::Lfp { name, params, body, args } => {
            let t: Vec<u32> = args.iter().map(|x| x.value(env)).collect();
            let stage = least_fixed_point(a, name, params, body, fix);
            stage.contains(&t)
        }
    }
}

fn least_fixed_point(a: &RelStructure, name: &str, params: &[String], body: &Formula, fix: &Fix) -> BTreeSet<Vec<u32>> {
    let mut fix = fix.clone();
    fix.insert(name.to_string(), BTreeSet::new());
    let tuples = all_tuples(a.n, params.len());
    loop {
        let mut next = BTreeSet::new();
        for t in &tuples {
            let mut env: Env = params.iter().cloned().zip(t.iter().copied()).collect();
            if eval(a, body, &mut env, &fix) {
                next.insert(t.clone());
            }
        }
        if next == fix[name] {
            return next;
        }
        fix.insert(name.to_string(), next);
    }
}

pub(crate) fn all_tuples(n: u32, arity: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}
