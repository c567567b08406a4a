use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::logic::RelStructure;
use crate::resolution::{Clause, CnfFormula, Literal};

/// A partial map from the instance universe to the template universe, as
/// `(element, value)` pairs sorted by element.
pub type PartialMap = Vec<(u32, u32)>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KConsistencyOptions {
    /// Check extensions to every domain `S` with `dom(p) ⊂ S`, `|S| <= k`,
    /// and every sub-map, instead of one-element steps only.
    pub full_subsets: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KConsistency {
    /// `T_inf` is non-empty.
    pub consistent: bool,
    pub part_size: usize,
    pub survivors: usize,
    pub rounds: usize,
}

/// `Part^k(A, T)` together with the extension and restriction obligations
/// of each member.
struct Instance {
    parts: Vec<PartialMap>,
    /// Per part: one group per required domain; some member must survive.
    ext: Vec<Vec<Vec<usize>>>,
    /// Per part: sub-maps that must survive.
    res: Vec<Vec<usize>>,
    empty: usize,
}

fn check_vocabulary(a: &RelStructure, t: &RelStructure) -> Result<()> {
    a.validate()?;
    t.validate()?;
    if a.vocabulary() != t.vocabulary() {
        return Err(Error::InvalidInput(format!(
            "vocabulary mismatch: {:?} vs {:?}",
            a.vocabulary(),
            t.vocabulary()
        )));
    }
    Ok(())
}

fn is_partial_hom(a: &RelStructure, t: &RelStructure, p: &PartialMap) -> bool {
    let value = |x: u32| p.binary_search_by_key(&x, |&(e, _)| e).ok().map(|i| p[i].1);
    a.relations.iter().all(|(name, rel)| {
        rel.tuples.iter().all(|tup| {
            let img: Option<Vec<u32>> = tup.iter().map(|&x| value(x)).collect();
            img.is_none_or(|img| t.holds(name, &img))
        })
    })
}

fn subsets_up_to(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&x: &u32| x + 1);
            for x in start..n {
                let mut s2: Vec<u32> = s.clone();
                s2.push(x);
                next.push(s2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn is_submap(p: &PartialMap, q: &PartialMap) -> bool {
    p.iter().all(|pair| q.binary_search(pair).is_ok())
}

fn build(a: &RelStructure, t: &RelStructure, k: usize, opts: KConsistencyOptions) -> Result<Instance> {
    check_vocabulary(a, t)?;
    let domains = subsets_up_to(a.n, k);
    let mut parts = Vec::new();
    let mut by_dom: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for dom in &domains {
        let mut vals = vec![0u32; dom.len()];
        loop {
            let p: PartialMap = dom.iter().copied().zip(vals.iter().copied()).collect();
            if is_partial_hom(a, t, &p) {
                by_dom.entry(dom.clone()).or_default().push(parts.len());
                parts.push(p);
            }
            let mut i = 0;
            while i < vals.len() && vals[i] + 1 == t.n {
                vals[i] = 0;
                i += 1;
            }
            if i == vals.len() || t.n == 0 {
                break;
            }
            vals[i] += 1;
        }
    }
    let index: HashMap<&PartialMap, usize> = parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let empty = index[&Vec::new()];
    let mut ext = Vec::with_capacity(parts.len());
    let mut res = Vec::with_capacity(parts.len());
    for p in &parts {
        let dom: Vec<u32> = p.iter().map(|&(x, _)| x).collect();
        let targets: Vec<Vec<u32>> = if opts.full_subsets {
            domains
                .iter()
                .filter(|s| s.len() > dom.len() && dom.iter().all(|x| s.binary_search(x).is_ok()))
                .cloned()
                .collect()
        } else if dom.len() < k {
            (0..a.n)
                .filter(|x| dom.binary_search(x).is_err())
                .map(|x| {
                    let mut s = dom.clone();
                    s.push(x);
                    s.sort_unstable();
                    s
                })
                .collect()
        } else {
            vec![]
        };
        ext.push(
            targets
                .iter()
                .map(|s| {
                    by_dom.get(s).map_or_else(Vec::new, |qs| {
                        qs.iter().copied().filter(|&q| is_submap(p, &parts[q])).collect()
                    })
                })
                .collect(),
        );
        let subs: Vec<usize> = if opts.full_subsets {
            (0..(1u32 << p.len()) - 1)
                .map(|mask| {
                    let q: PartialMap =
                        p.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
                    index[&q]
                })
                .collect()
        } else {
            (0..p.len())
                .map(|i| {
                    let mut q = p.clone();
                    q.remove(i);
                    index[&q]
                })
                .collect()
        };
        res.push(subs);
    }
    Ok(Instance { parts, ext, res, empty })
}

/// The k-consistency test: shrink `Part^k(A, T)` by the extension and
/// restriction conditions until stable. `false` certifies that no
/// homomorphism `A -> T` exists.
pub fn k_consistency(a: &RelStructure, t: &RelStructure, k: usize) -> Result<bool> {
    Ok(k_consistency_with(a, t, k, KConsistencyOptions::default())?.consistent)
}

pub fn k_consistency_with(
    a: &RelStructure,
    t: &RelStructure,
    k: usize,
    opts: KConsistencyOptions,
) -> Result<KConsistency> {
    let inst = build(a, t, k, opts)?;
    let mut alive = vec![true; inst.parts.len()];
    let mut rounds = 0;
    loop {
        let dead: Vec<usize> = (0..inst.parts.len())
            .filter(|&p| {
                alive[p]
                    && (inst.ext[p].iter().any(|g| !g.iter().any(|&q| alive[q]))
                        || inst.res[p].iter().any(|&q| !alive[q]))
            })
            .collect();
        if dead.is_empty() {
            break;
        }
        rounds += 1;
        for p in dead {
            alive[p] = false;
        }
    }
    let survivors = alive.iter().filter(|&&x| x).count();
    debug_assert_eq!(survivors > 0, alive[inst.empty]);
    Ok(KConsistency { consistent: survivors > 0, part_size: inst.parts.len(), survivors, rounds })
}

/// The dual-Horn CNF of the k-consistency test, with variable `i + 1` for the
/// i-th partial homomorphism. Unsatisfiable iff [`k_consistency`] is false.
pub fn encode_kconsistency_cnf(a: &RelStructure, t: &RelStructure, k: usize) -> Result<CnfFormula> {
    encode_kconsistency_cnf_with(a, t, k, KConsistencyOptions::default()).map(|(f, _)| f)
}

/// As [`encode_kconsistency_cnf`], also returning the partial map of each
/// variable.
pub fn encode_kconsistency_cnf_with(
    a: &RelStructure,
    t: &RelStructure,
    k: usize,
    opts: KConsistencyOptions,
) -> Result<(CnfFormula, Vec<PartialMap>)> {
    let inst = build(a, t, k, opts)?;
    let x = |i: usize| i as u32 + 1;
    let mut f = CnfFormula::new(inst.parts.len() as u32);
    f.add(Clause::new([Literal::pos(x(inst.empty))]));
    for p in 0..inst.parts.len() {
        for group in &inst.ext[p] {
            f.add(Clause::new(
                std::iter::once(Literal::neg(x(p))).chain(group.iter().map(|&q| Literal::pos(x(q)))),
            ));
        }
        for &q in &inst.res[p] {
            f.add(Clause::new([Literal::neg(x(p)), Literal::pos(x(q))]));
        }
    }
    Ok((f, inst.parts))
}
