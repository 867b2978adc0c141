//! The two cocartesian traced categories the engine works in.
//!
//! [`Traced`] is the small interface the `Int` construction, the operad and
//! the law suite are written against. Objects are coproducts of blocks and
//! `+` is strict, so reorderings are plain block permutations.

use std::fmt;

use crate::error::Result;
use crate::finset::{FinPartialMap, FinSet};
use crate::poly::{KleisliMap, Poly};
use crate::trace::{trace_poly, trace_set};

pub trait Traced: Copy + fmt::Debug + PartialEq + Eq + 'static {
    type Obj: Clone + fmt::Debug + fmt::Display;
    type Hom: Clone + fmt::Debug + fmt::Display + PartialEq;

    fn zero() -> Self::Obj;
    fn sum(a: &Self::Obj, b: &Self::Obj) -> Self::Obj;
    fn size(a: &Self::Obj) -> usize;
    fn slice(a: &Self::Obj, range: std::ops::Range<usize>) -> Self::Obj;
    fn same_obj(a: &Self::Obj, b: &Self::Obj) -> bool;

    fn dom(f: &Self::Hom) -> &Self::Obj;
    fn cod(f: &Self::Hom) -> &Self::Obj;
    fn identity(a: &Self::Obj) -> Self::Hom;
    fn compose(f: &Self::Hom, g: &Self::Hom) -> Result<Self::Hom>;
    fn coproduct(f: &Self::Hom, g: &Self::Hom) -> Self::Hom;
    fn permute(blocks: &[Self::Obj], order: &[usize]) -> Self::Hom;
    fn codiagonal(a: &Self::Obj) -> Self::Hom;
    /// `Tr^u` of `f : a + u -> b + u`.
    fn trace(f: &Self::Hom, u: &Self::Obj) -> Result<Self::Hom>;

    fn sum_all(parts: &[Self::Obj]) -> Self::Obj {
        parts.iter().fold(Self::zero(), |acc, p| Self::sum(&acc, p))
    }

    fn coproduct_all(maps: &[Self::Hom]) -> Self::Hom {
        maps.iter().fold(Self::identity(&Self::zero()), |acc, f| Self::coproduct(&acc, f))
    }
}

/// Pointed polynomial maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyStar;

/// Finite sets and partial maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetStar;

impl Traced for PolyStar {
    type Obj = Poly;
    type Hom = KleisliMap;

    fn zero() -> Poly {
        Poly::zero()
    }
    fn sum(a: &Poly, b: &Poly) -> Poly {
        a.sum(b)
    }
    fn size(a: &Poly) -> usize {
        a.len()
    }
    fn slice(a: &Poly, range: std::ops::Range<usize>) -> Poly {
        a.slice(range)
    }
    fn same_obj(a: &Poly, b: &Poly) -> bool {
        a.same_shape(b)
    }
    fn dom(f: &KleisliMap) -> &Poly {
        f.dom()
    }
    fn cod(f: &KleisliMap) -> &Poly {
        f.cod()
    }
    fn identity(a: &Poly) -> KleisliMap {
        KleisliMap::identity(a)
    }
    fn compose(f: &KleisliMap, g: &KleisliMap) -> Result<KleisliMap> {
        f.compose(g)
    }
    fn coproduct(f: &KleisliMap, g: &KleisliMap) -> KleisliMap {
        f.coproduct(g)
    }
    fn permute(blocks: &[Poly], order: &[usize]) -> KleisliMap {
        KleisliMap::permute_blocks(blocks, order)
    }
    fn codiagonal(a: &Poly) -> KleisliMap {
        KleisliMap::codiagonal(a)
    }
    fn trace(f: &KleisliMap, u: &Poly) -> Result<KleisliMap> {
        trace_poly(f, u)
    }
}

impl Traced for SetStar {
    type Obj = FinSet;
    type Hom = FinPartialMap;

    fn zero() -> FinSet {
        FinSet::empty()
    }
    fn sum(a: &FinSet, b: &FinSet) -> FinSet {
        a.sum(b)
    }
    fn size(a: &FinSet) -> usize {
        a.len()
    }
    fn slice(a: &FinSet, range: std::ops::Range<usize>) -> FinSet {
        a.slice(range)
    }
    fn same_obj(a: &FinSet, b: &FinSet) -> bool {
        a.len() == b.len()
    }
    fn dom(f: &FinPartialMap) -> &FinSet {
        f.dom()
    }
    fn cod(f: &FinPartialMap) -> &FinSet {
        f.cod()
    }
    fn identity(a: &FinSet) -> FinPartialMap {
        FinPartialMap::identity(a)
    }
    fn compose(f: &FinPartialMap, g: &FinPartialMap) -> Result<FinPartialMap> {
        f.compose(g)
    }
    fn coproduct(f: &FinPartialMap, g: &FinPartialMap) -> FinPartialMap {
        f.coproduct(g)
    }
    fn permute(blocks: &[FinSet], order: &[usize]) -> FinPartialMap {
        FinPartialMap::permute_blocks(blocks, order)
    }
    fn codiagonal(a: &FinSet) -> FinPartialMap {
        FinPartialMap::codiagonal(a)
    }
    fn trace(f: &FinPartialMap, u: &FinSet) -> Result<FinPartialMap> {
        trace_set(f, u)
    }
}
