//! Elements `p(X)` of a polynomial at a finite domain, and the partial maps
//! `p(X) ⇀ q(X)` induced by Kleisli maps.
//!
//! Elements of `p(X)` are enumerated summand-major; inside a summand the
//! assignments are ordered lexicographically with the first direction most
//! significant.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::finset::{FinPartialMap, FinSet};
use crate::poly::{KleisliMap, Label, Poly, Route};

pub type Value = i64;

/// Upper bound on `|p(X)|` accepted by the enumerating evaluators.
pub const DEFAULT_ELEMENT_BOUND: usize = 1 << 20;

/// An element of `p(X)`: a summand and one value per direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub position: usize,
    pub data: Vec<Value>,
}

impl Elem {
    pub fn new(position: usize, data: Vec<Value>) -> Self {
        Elem { position, data }
    }

    pub fn check(&self, p: &Poly) -> Result<()> {
        if self.position >= p.len() {
            return Err(Error::IllFormedElem(format!(
                "position {} out of range for {p}",
                self.position
            )));
        }
        let arity = p.summand(self.position).len();
        if self.data.len() != arity {
            return Err(Error::IllFormedElem(format!(
                "position {} expects {arity} values, got {}",
                self.position,
                self.data.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.position)?;
        for (i, v) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Finite value domain per label: label `l` ranges over `0..size(l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDomain {
    pub default_size: usize,
    pub by_label: BTreeMap<Label, usize>,
    pub bound: usize,
}

impl FiniteDomain {
    pub fn uniform(size: usize) -> Self {
        FiniteDomain { default_size: size, by_label: BTreeMap::new(), bound: DEFAULT_ELEMENT_BOUND }
    }

    pub fn with_label(mut self, label: Label, size: usize) -> Self {
        self.by_label.insert(label, size);
        self
    }

    pub fn size_of(&self, label: &Label) -> usize {
        self.by_label.get(label).copied().unwrap_or(self.default_size)
    }

    pub fn contains(&self, label: &Label, v: Value) -> bool {
        v >= 0 && (v as u128) < self.size_of(label) as u128
    }

    /// Check every value of `e` lies in the domain of its direction's label.
    pub fn check_elem(&self, p: &Poly, e: &Elem) -> Result<()> {
        e.check(p)?;
        for (d, v) in p.summand(e.position).dirs.iter().zip(&e.data) {
            if !self.contains(&d.label, *v) {
                return Err(Error::IllFormedElem(format!(
                    "value {v} of `{}` outside the domain of label {}",
                    d.name, d.label
                )));
            }
        }
        Ok(())
    }
}

/// Index arithmetic for `p(X)`.
#[derive(Debug, Clone)]
pub struct ElemIndex {
    offsets: Vec<usize>,
    radices: Vec<Vec<usize>>,
    len: usize,
}

impl ElemIndex {
    pub fn new(p: &Poly, dom: &FiniteDomain) -> Result<Self> {
        let mut offsets = Vec::with_capacity(p.len());
        let mut radices = Vec::with_capacity(p.len());
        let mut total: usize = 0;
        let too_large = || Error::DomainTooLarge { size: usize::MAX, bound: dom.bound };
        for s in p.summands() {
            offsets.push(total);
            let r: Vec<usize> = s.dirs.iter().map(|d| dom.size_of(&d.label)).collect();
            let count = r.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).ok_or_else(too_large)?;
            total = total.checked_add(count).ok_or_else(too_large)?;
            if total > dom.bound {
                return Err(Error::DomainTooLarge { size: total, bound: dom.bound });
            }
            radices.push(r);
        }
        Ok(ElemIndex { offsets, radices, len: total })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        let radix = self.radices.get(e.position)?;
        if radix.len() != e.data.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&v, &n) in e.data.iter().zip(radix) {
            if v < 0 || v as u128 >= n as u128 {
                return None;
            }
            idx = idx * n + v as usize;
        }
        Some(self.offsets[e.position] + idx)
    }

    pub fn elem_at(&self, index: usize) -> Elem {
        assert!(index < self.len, "element index {index} out of range");
        let position = self.offsets.partition_point(|&o| o <= index) - 1;
        // skip empty summands sharing the same offset
        let position = (position..self.offsets.len())
            .rev()
            .find(|&i| self.offsets[i] <= index && index < self.end_of(i))
            .expect("index lies in some summand");
        let mut rest = index - self.offsets[position];
        let radix = &self.radices[position];
        let mut data = vec![0; radix.len()];
        for k in (0..radix.len()).rev() {
            data[k] = (rest % radix[k]) as Value;
            rest /= radix[k];
        }
        Elem { position, data }
    }

    /// Summand of the element at `index`.
    pub fn position_of(&self, index: usize) -> usize {
        self.elem_at(index).position
    }

    fn end_of(&self, i: usize) -> usize {
        self.offsets.get(i + 1).copied().unwrap_or(self.len)
    }
}

/// `p(X)` as a named finite set.
pub fn eval_poly(p: &Poly, dom: &FiniteDomain) -> Result<FinSet> {
    let idx = ElemIndex::new(p, dom)?;
    Ok(FinSet::new((0..idx.len()).map(|i| idx.elem_at(i).to_string()).collect()))
}

/// All elements of `p(X)` in canonical order.
pub fn elements(p: &Poly, dom: &FiniteDomain) -> Result<Vec<Elem>> {
    let idx = ElemIndex::new(p, dom)?;
    Ok((0..idx.len()).map(|i| idx.elem_at(i)).collect())
}

/// The Yoneda action: route the element and pull its data backwards.
pub fn apply_kleisli(f: &KleisliMap, e: &Elem) -> Result<Option<Elem>> {
    e.check(f.dom())?;
    Ok(match f.route(e.position) {
        Route::Bot => None,
        Route::To { target, pull } => {
            Some(Elem::new(*target, pull.iter().map(|&d| e.data[d]).collect()))
        }
    })
}

/// The partial map `p(X) ⇀ q(X)` induced by `f : p -> q`.
pub fn eval_map(f: &KleisliMap, dom: &FiniteDomain) -> Result<FinPartialMap> {
    let src = ElemIndex::new(f.dom(), dom)?;
    let dst = ElemIndex::new(f.cod(), dom)?;
    let table = (0..src.len())
        .map(|i| {
            let e = src.elem_at(i);
            apply_kleisli(f, &e)
                .expect("enumerated elements are well formed")
                .map(|out| dst.index_of(&out).expect("label-preserving pulls stay in the domain"))
        })
        .collect();
    FinPartialMap::new(eval_poly(f.dom(), dom)?, eval_poly(f.cod(), dom)?, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Direction, Summand};

    #[test]
    fn enumeration_order_and_index_roundtrip() {
        let p = Poly::from_arities(&[0, 2, 0, 1]);
        let dom = FiniteDomain::uniform(2);
        let elems = elements(&p, &dom).unwrap();
        assert_eq!(elems.len(), 1 + 4 + 1 + 2);
        assert_eq!(elems[1], Elem::new(1, vec![0, 0]));
        assert_eq!(elems[2], Elem::new(1, vec![0, 1]));
        assert_eq!(elems[5], Elem::new(2, vec![]));
        let idx = ElemIndex::new(&p, &dom).unwrap();
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(idx.index_of(e), Some(i));
        }
    }

    #[test]
    fn empty_domain_keeps_only_constant_positions() {
        let p = Poly::from_arities(&[1, 0, 2, 0]);
        let elems = elements(&p, &FiniteDomain::uniform(0)).unwrap();
        assert_eq!(elems, vec![Elem::new(1, vec![]), Elem::new(3, vec![])]);
    }

    #[test]
    fn per_label_sizes() {
        let b = Label::new("bool").unwrap();
        let p = Poly::new(vec![Summand::new(vec![
            Direction::untyped("n"),
            Direction::new("flag", b.clone()),
        ])
        .unwrap()]);
        let dom = FiniteDomain::uniform(3).with_label(b, 2);
        assert_eq!(elements(&p, &dom).unwrap().len(), 6);
        assert!(dom.check_elem(&p, &Elem::new(0, vec![2, 1])).is_ok());
        assert!(dom.check_elem(&p, &Elem::new(0, vec![1, 2])).is_err());
    }

    #[test]
    fn apply_duplicating_pull() {
        let p = Poly::new(vec![Summand::named(&["x"]).unwrap()]);
        let r = Poly::new(vec![Summand::named(&["r", "s"]).unwrap()]);
        let f = KleisliMap::new(p, r, vec![Route::to(0, vec![0, 0])]).unwrap();
        assert_eq!(apply_kleisli(&f, &Elem::new(0, vec![7])).unwrap(), Some(Elem::new(0, vec![7, 7])));
        assert!(matches!(apply_kleisli(&f, &Elem::new(0, vec![])), Err(Error::IllFormedElem(_))));
    }

    #[test]
    fn data_transform_shape() {
        // (x1, x2, x3) |-> (x3, x2, x3)
        let y3 = Poly::monomial(3);
        let f = KleisliMap::new(y3.clone(), y3, vec![Route::to(0, vec![2, 1, 2])]).unwrap();
        let out = apply_kleisli(&f, &Elem::new(0, vec![10, 20, 30])).unwrap();
        assert_eq!(out, Some(Elem::new(0, vec![30, 20, 30])));
        assert_eq!(apply_kleisli(&KleisliMap::identity(f.dom()), &Elem::new(0, vec![1, 2, 3])).unwrap(),
            Some(Elem::new(0, vec![1, 2, 3])));
    }

    #[test]
    fn domain_bound_is_enforced() {
        let mut dom = FiniteDomain::uniform(10);
        dom.bound = 50;
        assert!(matches!(
            ElemIndex::new(&Poly::monomial(2), &dom),
            Err(Error::DomainTooLarge { size: 100, bound: 50 })
        ));
    }
}
