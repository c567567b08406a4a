use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::algebra::{Field, Scalar};
use crate::error::{Error, Result};

/// Multilinear monomial: a strictly increasing list of variable ids.
///
/// Ordered graded-lexicographically: first by degree, then lexicographically
/// on the sorted id lists.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(x: u32) -> Self {
        Monomial(smallvec::smallvec![x])
    }

    /// Product of the given variables; repeated ids collapse.
    pub fn from_vars(vars: impl IntoIterator<Item = u32>) -> Self {
        let mut v: SmallVec<[u32; 4]> = vars.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub(crate) fn from_sorted(v: SmallVec<[u32; 4]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Monomial(v)
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Multilinear product (set union).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn is_subset_of(&self, other: &Monomial) -> bool {
        let mut j = 0;
        for &x in self.0.iter() {
            while j < other.0.len() && other.0[j] < x {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != x {
                return false;
            }
            j += 1;
        }
        true
    }

    /// Value under a 0/1 assignment.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().all(|&x| assignment[x as usize])
    }

    /// All sub-monomials, including `1` and `self`.
    pub fn subsets(&self) -> impl Iterator<Item = Monomial> + '_ {
        let d = self.0.len();
        (0u32..(1 << d)).map(move |mask| Monomial((0..d).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|x| format!("x{x}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Multilinear polynomial over a field.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(field: Field) -> Self {
        Polynomial { field, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, c: Scalar) -> Self {
        Polynomial::monomial(field, c, Monomial::one())
    }

    pub fn one(field: Field) -> Self {
        Polynomial::constant(field, field.one())
    }

    pub fn monomial(field: Field, c: Scalar, m: Monomial) -> Self {
        let mut p = Polynomial::zero(field);
        p.add_term(m, c);
        p
    }

    pub fn var(field: Field, x: u32) -> Self {
        Polynomial::monomial(field, field.one(), Monomial::var(x))
    }

    /// Sums the given terms, collapsing equal monomials.
    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (Scalar, Monomial)>) -> Self {
        let mut p = Polynomial::zero(field);
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Convenience constructor with integer coefficients.
    pub fn from_int_terms(field: Field, terms: &[(i64, &[u32])]) -> Self {
        Polynomial::from_terms(field, terms.iter().map(|(c, m)| (field.int(*c), Monomial::from_vars(m.iter().copied()))))
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        assert_eq!(c.field(), self.field, "coefficient from wrong field");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Largest term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.degree() == Some(0)
    }

    pub fn max_var(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.vars().last().copied()).max()
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flat_map(|m| m.vars().iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        Polynomial::from_terms(self.field, self.terms.iter().map(|(m, x)| (x * c, m.clone())))
    }

    /// Product followed by multilinearisation.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero(self.field);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                p.add_term(m.mul(n), c * d);
            }
        }
        p
    }

    /// `MultLin(m * self)`.
    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial::from_terms(self.field, self.terms.iter().map(|(t, c)| (c.clone(), t.mul(m))))
    }

    pub fn eval(&self, assignment: &[bool]) -> Scalar {
        let mut s = self.field.zero();
        for (m, c) in &self.terms {
            if m.eval(assignment) {
                s = &s + c;
            }
        }
        s
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| if m.is_one() { c.to_string() } else if c.is_one() { m.to_string() } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Polynomial whose monomials may repeat variables (exponents above one).
#[derive(Clone, Debug)]
pub struct RawPolynomial {
    pub field: Field,
    /// Each monomial lists its variables with multiplicity.
    pub terms: Vec<(Scalar, Vec<u32>)>,
}

/// Multilinearisation: every exponent above one drops to one and coefficients
/// of monomials that collapse together are summed.
pub fn multlin(p: &RawPolynomial) -> Polynomial {
    Polynomial::from_terms(p.field, p.terms.iter().map(|(c, vars)| (c.clone(), Monomial::from_vars(vars.iter().copied()))))
}

/// A system of polynomial equations `p = 0`, with the booleanity axioms
/// `x^2 - x` implicit.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub field: Field,
    pub num_vars: u32,
    pub booleanity: bool,
    pub axioms: Vec<Polynomial>,
    /// Optional human-readable variable names, indexed by id.
    pub var_names: Option<Vec<String>>,
}

impl PolySystem {
    pub fn new(field: Field, num_vars: u32) -> Self {
        PolySystem { field, num_vars, booleanity: true, axioms: Vec::new(), var_names: None }
    }

    pub fn push(&mut self, p: Polynomial) {
        assert_eq!(p.field(), self.field);
        if let Some(x) = p.max_var() {
            assert!(x < self.num_vars, "variable {x} out of range {}", self.num_vars);
        }
        self.axioms.push(p);
    }

    pub fn max_degree(&self) -> usize {
        self.axioms.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Whether every axiom vanishes under the 0/1 assignment.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.axioms.iter().all(|p| p.eval(assignment).is_zero())
    }

    /// Same axioms with coefficients mapped into another field.
    pub fn over_field(&self, field: Field) -> Result<PolySystem> {
        let mut out = PolySystem { field, axioms: Vec::new(), ..self.clone() };
        for p in &self.axioms {
            let mut q = Polynomial::zero(field);
            for (m, c) in p.terms() {
                let c = match c {
                    Scalar::Q(r) => field.from_rat(r)?,
                    Scalar::Fp { v, .. } => field.int(*v as i64),
                };
                q.add_term(m.clone(), c);
            }
            out.axioms.push(q);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let doc = SystemDoc {
            field: self.field,
            num_vars: self.num_vars,
            booleanity: self.booleanity,
            var_names: self.var_names.clone(),
            polys: self
                .axioms
                .iter()
                .map(|p| {
                    p.terms().map(|(m, c)| TermDoc { coef: c.to_string(), mono: m.vars().to_vec() }).collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text)?;
        let field = doc.field.validate()?;
        let mut sys = PolySystem::new(field, doc.num_vars);
        sys.booleanity = doc.booleanity;
        if let Some(names) = &doc.var_names {
            if names.len() != doc.num_vars as usize {
                return Err(Error::Parse("var_names length differs from num_vars".into()));
            }
        }
        sys.var_names = doc.var_names;
        for (i, poly) in doc.polys.iter().enumerate() {
            let mut p = Polynomial::zero(field);
            for t in poly {
                if let Some(&x) = t.mono.iter().find(|&&x| x >= doc.num_vars) {
                    return Err(Error::Parse(format!("polynomial {i}: variable {x} out of range")));
                }
                if !sys.booleanity && t.mono.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Unsupported("repeated variables require booleanity".into()));
                }
                p.add_term(Monomial::from_vars(t.mono.iter().copied()), field.parse_scalar(&t.coef)?);
            }
            sys.axioms.push(p);
        }
        Ok(sys)
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coef: String,
    mono: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    field: Field,
    num_vars: u32,
    #[serde(default = "default_true")]
    booleanity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var_names: Option<Vec<String>>,
    polys: Vec<Vec<TermDoc>>,
}

fn default_true() -> bool {
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn multlin_collapses_exponents() {
        // X^2 Y + Z with X=0, Y=1, Z=2
        let raw = RawPolynomial { field: q(), terms: vec![(q().one(), vec![0, 0, 1]), (q().one(), vec![2])] };
        assert_eq!(multlin(&raw), Polynomial::from_int_terms(q(), &[(1, &[0, 1]), (1, &[2])]));
        let boolean = RawPolynomial { field: q(), terms: vec![(q().one(), vec![0, 0]), (q().int(-1), vec![0])] };
        assert!(multlin(&boolean).is_zero());
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::from_vars([3]);
        let b = Monomial::from_vars([0, 1]);
        let c = Monomial::from_vars([0, 2]);
        assert!(Monomial::one() < a && a < b && b < c);
        let p = Polynomial::from_int_terms(q(), &[(1, &[3]), (2, &[0, 2]), (5, &[])]);
        assert_eq!(p.leading().unwrap().0, &c);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn multilinear_product() {
        let p = Polynomial::from_int_terms(q(), &[(1, &[0]), (1, &[1])]);
        let sq = p.mul(&p);
        assert_eq!(sq, Polynomial::from_int_terms(q(), &[(1, &[0]), (1, &[1]), (2, &[0, 1])]));
        assert_eq!(p.mul_monomial(&Monomial::from_vars([0, 1])), Polynomial::from_int_terms(q(), &[(2, &[0, 1])]));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"field":{"kind":"Fp","p":3},"num_vars":2,"booleanity":true,"polys":[[{"coef":"1","mono":[0,1]},{"coef":"-1","mono":[]}],[]]}"#;
        let s = PolySystem::from_json(text).unwrap();
        assert_eq!(s.axioms.len(), 2);
        assert_eq!(s.axioms[0].coefficient(&Monomial::one()), s.field.int(2));
        assert!(s.axioms[1].is_zero());
        let again = PolySystem::from_json(&s.to_json()).unwrap();
        assert_eq!(again.axioms, s.axioms);
        assert!(PolySystem::from_json(r#"{"field":{"kind":"Q"},"num_vars":1,"polys":[[{"coef":"1","mono":[1]}]]}"#).is_err());
        assert!(PolySystem::from_json(r#"{"field":{"kind":"Fp","p":4},"num_vars":1,"polys":[]}"#).is_err());
    }
}
