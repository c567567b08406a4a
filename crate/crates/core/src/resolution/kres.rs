use std::collections::BTreeSet;
use std::time::Instant;

use rustc_hash::FxHashSet;
use smallvec::SmallVec;

use super::cnf::{Clause, CnfFormula, Literal};
use crate::error::{Error, Result};

/// How input clauses wider than the width bound are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WidePolicy {
    /// Wide input clauses are dropped.
    #[default]
    Strict,
    /// Wide input clauses may act as premises; only resolvents of width at
    /// most `k` are kept.
    Premise,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KresOptions {
    pub wide: WidePolicy,
    pub deadline: Option<Instant>,
    /// Stop as soon as the empty clause is derived. `clauses` is then only
    /// the part of the closure built so far.
    pub stop_on_empty: bool,
    /// Drop resolvents that contain an already derived clause, and skip
    /// selected clauses that have become subsumed. The verdict is the same
    /// as without; `clauses` is then a subset of the closure that subsumes
    /// every clause of it.
    pub subsumption: bool,
}

#[derive(Clone, Debug)]
pub struct KresResult {
    pub refuted: bool,
    /// Every clause of width at most `k` present at saturation, inputs included.
    pub clauses: BTreeSet<Clause>,
}

/// Literal code `2 * var + positive`, so codes sort like [`Literal`].
type Code = u32;
type Lits = SmallVec<[Code; 4]>;

/// Some clause of `known` is a subset of `c` (a proper one if `strict`).
fn subsumed(known: &FxHashSet<Lits>, c: &[Code], strict: bool) -> bool {
    let w = c.len();
    if w >= 32 {
        return known.contains(c) && !strict;
    }
    let full = (1u32 << w) - 1;
    (0..=full).filter(|&m| !(strict && m == full)).any(|mask| {
        let sub: Lits = (0..w).filter(|&i| mask >> i & 1 == 1).map(|i| c[i]).collect();
        known.contains(&sub)
    })
}

fn code(l: Literal) -> Code {
    l.var * 2 + l.positive as u32
}

fn decode(c: Code) -> Literal {
    Literal { var: c / 2, positive: c & 1 == 1 }
}

/// Resolvent of `a` and `b` on the variable of `pivot` (in `a`), or `None`
/// if it is wider than `k` or tautological.
fn resolve(a: &[Code], b: &[Code], pivot: Code, k: usize) -> Option<Lits> {
    let mut out = Lits::new();
    let (mut i, mut j) = (0, 0);
    let other = pivot ^ 1;
    loop {
        let x = match (a.get(i), b.get(j)) {
            (None, None) => break,
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), Some(&y)) => {
                if x <= y {
                    i += 1;
                    if x == y {
                        j += 1;
                    }
                    x
                } else {
                    j += 1;
                    y
                }
            }
        };
        if x == pivot || x == other {
            continue;
        }
        if out.last().is_some_and(|&l| l ^ 1 == x) {
            return None;
        }
        out.push(x);
        if out.len() > k {
            return None;
        }
    }
    Some(out)
}

/// Saturates under resolution restricted to clauses of width at most `k`.
/// Tautological resolvents are discarded.
pub fn kres_saturate(f: &CnfFormula, k: usize) -> Result<KresResult> {
    kres_saturate_with(f, k, KresOptions::default())
}

/// Whether width-`k` resolution refutes `f`, using subsumption and stopping
/// at the first empty clause.
pub fn kres_refutes(f: &CnfFormula, k: usize, deadline: Option<Instant>) -> Result<bool> {
    let opts = KresOptions { deadline, stop_on_empty: true, subsumption: true, ..Default::default() };
    Ok(kres_saturate_with(f, k, opts)?.refuted)
}

/// Given-clause saturation: clauses are selected narrowest first and
/// resolved against every previously selected clause.
pub fn kres_saturate_with(f: &CnfFormula, k: usize, opts: KresOptions) -> Result<KresResult> {
    if k < 1 {
        return Err(Error::InvalidInput("width bound must be at least 1".into()));
    }
    let num_codes = 2 * (f.clauses().iter().map(Clause::max_var).max().unwrap_or(0) as usize + 1);
    let mut store: Vec<Lits> = Vec::new();
    let mut known: FxHashSet<Lits> = FxHashSet::default();
    let mut occurs: Vec<Vec<u32>> = vec![Vec::new(); num_codes];
    let width_cap = f.max_width().max(k);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); width_cap + 1];
    let mut refuted = false;

    let mut inputs: Vec<&Clause> = f.clauses().iter().collect();
    inputs.sort();
    for c in inputs {
        if c.is_tautology() || (c.width() > k && opts.wide == WidePolicy::Strict) {
            continue;
        }
        let lits: Lits = c.literals().iter().map(|&l| code(l)).collect();
        if known.insert(lits.clone()) {
            refuted |= lits.is_empty();
            buckets[lits.len()].push(store.len() as u32);
            store.push(lits);
        }
    }

    let mut steps = 0u64;
    let mut next = 0;
    'outer: while !(refuted && opts.stop_on_empty) {
        while next < buckets.len() && buckets[next].is_empty() {
            next += 1;
        }
        let Some(id) = buckets.get_mut(next).and_then(Vec::pop) else { break };
        let c = store[id as usize].clone();
        if opts.subsumption && subsumed(&known, &c, true) {
            continue;
        }
        for &l in &c {
            let partners = occurs[(l ^ 1) as usize].len();
            for pi in 0..partners {
                steps += 1;
                if steps % 4096 == 0 {
                    if let Some(d) = opts.deadline {
                        if Instant::now() > d {
                            return Err(Error::Timeout);
                        }
                    }
                }
                let pid = occurs[(l ^ 1) as usize][pi];
                let Some(r) = resolve(&c, &store[pid as usize], l, k) else { continue };
                if (opts.subsumption && subsumed(&known, &r, false)) || known.contains(&r) {
                    continue;
                }
                known.insert(r.clone());
                let w = r.len();
                buckets[w].push(store.len() as u32);
                store.push(r);
                next = next.min(w);
                if w == 0 {
                    refuted = true;
                    if opts.stop_on_empty {
                        break 'outer;
                    }
                }
            }
        }
        for &l in &c {
            occurs[l as usize].push(id);
        }
    }
    let clauses: BTreeSet<Clause> = known
        .into_iter()
        .filter(|c| c.len() <= k)
        .map(|c| Clause::new(c.iter().map(|&x| decode(x))))
        .collect();
    Ok(KresResult { refuted, clauses })
}
