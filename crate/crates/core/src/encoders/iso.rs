use std::collections::BTreeSet;

use crate::algebra::Field;
use crate::error::{Error, Result};
use crate::pc::{Monomial, PolySystem, Polynomial};
use crate::resolution::{Clause, CnfFormula, Literal};
use crate::wl::ColoredGraph;

/// What to do when the two graphs have different numbers of color classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClassMismatch {
    #[default]
    Error,
    /// Emit the single axiom `1 = 0`.
    Unsatisfiable,
}

struct Pair<'a> {
    g: &'a ColoredGraph,
    h: &'a ColoredGraph,
    rels: Vec<&'a str>,
}

impl<'a> Pair<'a> {
    fn new(g: &'a ColoredGraph, h: &'a ColoredGraph) -> Result<Self> {
        g.validate()?;
        h.validate()?;
        let rels: BTreeSet<&str> = g.relations.keys().chain(h.relations.keys()).map(String::as_str).collect();
        Ok(Pair { g, h, rels: rels.into_iter().collect() })
    }

    /// `v -> w` alone is a partial isomorphism (loops agree).
    fn unary_ok(&self, v: u32, w: u32) -> bool {
        self.rels.iter().all(|r| self.g.has_edge(r, v, v) == self.h.has_edge(r, w, w))
    }

    /// `{v1 -> w1, v2 -> w2}` is a partial isomorphism.
    fn binary_ok(&self, (v1, w1): (u32, u32), (v2, w2): (u32, u32)) -> bool {
        if (v1 == v2) != (w1 == w2) {
            return false;
        }
        if v1 == v2 {
            return true;
        }
        self.rels.iter().all(|r| {
            self.g.has_edge(r, v1, v2) == self.h.has_edge(r, w1, w2)
                && self.g.has_edge(r, v2, v1) == self.h.has_edge(r, w2, w1)
        })
    }
}

/// The isomorphism CNF over variables `X_vw = v * |H| + w + 1`: every `v` is
/// mapped somewhere, every `w` is hit, and no two assignments that together
/// fail to be a partial isomorphism are both true. Colors are ignored.
pub fn encode_iso_cnf(g: &ColoredGraph, h: &ColoredGraph) -> Result<CnfFormula> {
    let pair = Pair::new(g, h)?;
    let (ng, nh) = (g.n as u32, h.n as u32);
    let var = |v: u32, w: u32| v * nh + w + 1;
    let mut f = CnfFormula::new(ng * nh);
    for v in 0..ng {
        f.add(Clause::new((0..nh).map(|w| Literal::pos(var(v, w)))));
    }
    for w in 0..nh {
        f.add(Clause::new((0..ng).map(|v| Literal::pos(var(v, w)))));
    }
    let vars: Vec<(u32, u32)> = (0..ng).flat_map(|v| (0..nh).map(move |w| (v, w))).collect();
    for &(v, w) in &vars {
        if !pair.unary_ok(v, w) {
            f.add(Clause::new([Literal::neg(var(v, w))]));
        }
    }
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            if !pair.binary_ok(a, b) {
                f.add(Clause::new([Literal::neg(var(a.0, a.1)), Literal::neg(var(b.0, b.1))]));
            }
        }
    }
    Ok(f)
}

/// The isomorphism polynomial system with a variable for every `v -> w`,
/// colors ignored. Variable `v * |H| + w`.
pub fn encode_iso_poly(g: &ColoredGraph, h: &ColoredGraph, field: Field) -> Result<PolySystem> {
    let classes = vec![((0..g.n as u32).collect(), (0..h.n as u32).collect())];
    build_poly(&Pair::new(g, h)?, &classes, field)
}

/// As [`encode_iso_poly`], with variables only between the i-th color class
/// of `g` and the i-th color class of `h` (classes ordered by color value).
pub fn encode_iso_poly_colored(
    g: &ColoredGraph,
    h: &ColoredGraph,
    field: Field,
    mismatch: ClassMismatch,
) -> Result<PolySystem> {
    let pair = Pair::new(g, h)?;
    let (cg, ch) = (g.color_classes(), h.color_classes());
    if cg.len() != ch.len() {
        return match mismatch {
            ClassMismatch::Error => Err(Error::InvalidInput(format!(
                "color class counts differ: {} vs {}",
                cg.len(),
                ch.len()
            ))),
            ClassMismatch::Unsatisfiable => {
                let mut s = PolySystem::new(field.validate()?, 0);
                s.push(Polynomial::one(field));
                Ok(s)
            }
        };
    }
    let classes: Vec<(Vec<u32>, Vec<u32>)> = cg.into_iter().zip(ch).collect();
    build_poly(&pair, &classes, field)
}

fn build_poly(pair: &Pair, classes: &[(Vec<u32>, Vec<u32>)], field: Field) -> Result<PolySystem> {
    let field = field.validate()?;
    let mut vars = Vec::new();
    for (vs, ws) in classes {
        for &v in vs {
            for &w in ws {
                vars.push((v, w));
            }
        }
    }
    let mut sorted = vars;
    sorted.sort_unstable();
    let index = |v: u32, w: u32| sorted.binary_search(&(v, w)).expect("variable exists") as u32;
    let mut sys = PolySystem::new(field, sorted.len() as u32);
    sys.var_names = Some(sorted.iter().map(|(v, w)| format!("X[{v}->{w}]")).collect());
    let minus_one = field.int(-1);
    for (vs, ws) in classes {
        for &v in vs {
            let mut p = Polynomial::constant(field, minus_one.clone());
            for &w in ws {
                p.add_term(Monomial::var(index(v, w)), field.one());
            }
            sys.push(p);
        }
        for &w in ws {
            let mut p = Polynomial::constant(field, minus_one.clone());
            for &v in vs {
                p.add_term(Monomial::var(index(v, w)), field.one());
            }
            sys.push(p);
        }
    }
    for (i, &(v, w)) in sorted.iter().enumerate() {
        if !pair.unary_ok(v, w) {
            sys.push(Polynomial::var(field, i as u32));
        }
    }
    for (i, &a) in sorted.iter().enumerate() {
        for (j, &b) in sorted.iter().enumerate().skip(i + 1) {
            if !pair.binary_ok(a, b) {
                sys.push(Polynomial::monomial(field, field.one(), Monomial::from_vars([i as u32, j as u32])));
            }
        }
    }
    Ok(sys)
}
