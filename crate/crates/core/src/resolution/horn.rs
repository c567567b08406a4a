use std::collections::VecDeque;

use super::cnf::CnfFormula;
use crate::error::{Error, Result};

/// Outcome of Horn unit propagation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornResult {
    pub refuted: bool,
    /// Variables forced true, i.e. the least model of the definite part.
    pub derived: Vec<u32>,
}

/// Refutes a Horn formula by computing the least fixed point of its definite
/// clauses with unit propagation. The formula is refuted iff some clause
/// without positive literals has all its variables derived.
///
/// Runs in time linear in the total formula size.
pub fn horn_refute(f: &CnfFormula) -> Result<HornResult> {
    let n = f.num_vars as usize;
    let mut remaining = Vec::with_capacity(f.len());
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut head = Vec::with_capacity(f.len());
    let mut queue = VecDeque::new();
    let mut derived = vec![false; n + 1];
    let mut refuted = false;
    for (ci, c) in f.clauses().iter().enumerate() {
        let mut pos = c.positives();
        let h = pos.next();
        if pos.next().is_some() {
            return Err(Error::NotHorn(ci));
        }
        head.push(h);
        let negs: Vec<u32> = c.negatives().collect();
        remaining.push(negs.len());
        for &v in &negs {
            watchers[v as usize].push(ci);
        }
        if negs.is_empty() {
            match h {
                Some(v) => queue.push_back(v),
                None => refuted = true,
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        if std::mem::replace(&mut derived[v as usize], true) {
            continue;
        }
        for &ci in &watchers[v as usize] {
            remaining[ci] -= 1;
            if remaining[ci] == 0 {
                match head[ci] {
                    Some(h) if !derived[h as usize] => queue.push_back(h),
                    Some(_) => {}
                    None => refuted = true,
                }
            }
        }
    }
    let derived = (1..=n as u32).filter(|&v| derived[v as usize]).collect();
    Ok(HornResult { refuted, derived })
}
