use std::fmt::Debug;
use std::hash::Hash;

use crate::algebra::{Field, Rat, Scalar};

/// Coefficient arithmetic specialised per field so the engine's rows stay
/// compact (`u32` residues for prime fields).
pub(crate) trait Arith: Clone + Send + Sync {
    type C: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn field(&self) -> Field;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn zero(&self) -> Self::C;
    fn one(&self) -> Self::C;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn inv(&self, a: &Self::C) -> Self::C;
    fn from_scalar(&self, s: &Scalar) -> Self::C;
    fn to_scalar(&self, a: &Self::C) -> Scalar;
}

#[derive(Clone, Copy)]
pub(crate) struct QArith;

impl Arith for QArith {
    type C = Rat;

    fn field(&self) -> Field {
        Field::Rationals
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn inv(&self, a: &Rat) -> Rat {
        a.recip()
    }
    fn from_scalar(&self, s: &Scalar) -> Rat {
        s.as_rat().expect("rational coefficient").clone()
    }
    fn to_scalar(&self, a: &Rat) -> Scalar {
        Scalar::Q(a.clone())
    }
}

#[derive(Clone, Copy)]
pub(crate) struct FpArith {
    pub p: u32,
}

impl Arith for FpArith {
    type C = u32;

    fn field(&self) -> Field {
        Field::Prime { p: self.p }
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        (*a as u64 * *b as u64 % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        (self.p - *a) % self.p
    }
    fn inv(&self, a: &u32) -> u32 {
        match self.to_scalar(a).inv() {
            Scalar::Fp { v, .. } => v,
            Scalar::Q(_) => unreachable!(),
        }
    }
    fn from_scalar(&self, s: &Scalar) -> u32 {
        match s {
            Scalar::Fp { v, p } if *p == self.p => *v,
            _ => panic!("coefficient {s} is not in F_{}", self.p),
        }
    }
    fn to_scalar(&self, a: &u32) -> Scalar {
        Scalar::Fp { v: *a, p: self.p }
    }
}
