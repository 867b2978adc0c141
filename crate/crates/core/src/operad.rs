//! Wiring diagrams: loose maps out of a list of boxes, nested with `∘ₙ`.

use std::fmt;

use crate::category::Traced;
use crate::error::{Error, Result};
use crate::int::{IntMorphism, IntObject};

#[derive(Debug, Clone)]
pub struct WiringDiagram<C: Traced> {
    inner: Vec<IntObject<C>>,
    outer: IntObject<C>,
    body: IntMorphism<C>,
}

impl<C: Traced> PartialEq for WiringDiagram<C> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner && self.outer == other.outer && self.body == other.body
    }
}

impl<C: Traced> WiringDiagram<C> {
    pub fn new(inner: Vec<IntObject<C>>, outer: IntObject<C>, body: IntMorphism<C>) -> Result<Self> {
        if body.dom() != &IntObject::tensor_all(&inner) {
            return Err(Error::BoxMismatch(format!(
                "body domain {} is not the sum of the inner boxes",
                body.dom()
            )));
        }
        if body.cod() != &outer {
            return Err(Error::BoxMismatch(format!("body codomain {} is not {outer}", body.cod())));
        }
        Ok(WiringDiagram { inner, outer, body })
    }

    /// Wrap a loose map `(m, map)` given as a raw base-category map.
    pub fn from_map(inner: Vec<IntObject<C>>, outer: IntObject<C>, map: C::Hom) -> Result<Self> {
        let body = IntMorphism::new(IntObject::tensor_all(&inner), outer.clone(), map)?;
        WiringDiagram::new(inner, outer, body)
    }

    pub fn inner(&self) -> &[IntObject<C>] {
        &self.inner
    }

    pub fn outer(&self) -> &IntObject<C> {
        &self.outer
    }

    pub fn body(&self) -> &IntMorphism<C> {
        &self.body
    }

    /// The one-box diagram that passes everything straight through.
    pub fn identity(q: &IntObject<C>) -> Self {
        WiringDiagram { inner: vec![q.clone()], outer: q.clone(), body: IntMorphism::identity(q) }
    }

    /// `ι_a ∈ W(; (a, a))`.
    pub fn iota(a: &C::Obj) -> Self {
        let outer = IntObject::new(a.clone(), a.clone());
        Self::from_map(Vec::new(), outer, C::identity(a)).expect("a + 0 -> a + 0")
    }

    /// `κ_{a,b,c} ∈ W((a, b), (b, c); (a, c))`, the iso `a + (b + c) -> c + (a + b)`.
    pub fn kappa(a: &C::Obj, b: &C::Obj, c: &C::Obj) -> Self {
        let inner = vec![IntObject::new(a.clone(), b.clone()), IntObject::new(b.clone(), c.clone())];
        let outer = IntObject::new(a.clone(), c.clone());
        let map = C::permute(&[a.clone(), b.clone(), c.clone()], &[2, 0, 1]);
        Self::from_map(inner, outer, map).expect("kappa blocks line up")
    }

    /// `self ∘ₙ phi`: substitute `phi` into box `n`.
    pub fn compose_at(&self, n: usize, phi: &Self) -> Result<Self> {
        let qn = self
            .inner
            .get(n)
            .ok_or(Error::IndexOutOfRange { index: n, len: self.inner.len() })?;
        if &phi.outer != qn {
            return Err(Error::BoxMismatch(format!("box {n} is {qn}, inserted diagram has outer {}", phi.outer)));
        }
        let r = &self.outer;
        let before = IntObject::tensor_all(&self.inner[..n]);
        let after = IntObject::tensor_all(&self.inner[n + 1..]);
        let p = IntObject::tensor_all(&phi.inner);
        let blocks = |xs: &[&C::Obj]| xs.iter().map(|x| (*x).clone()).collect::<Vec<_>>();

        // R⁻ + Q<⁺ + P⁺ + Q>⁺ + Qₙ⁺  ->  R⁻ + Q<⁺ + Qₙ⁺ + Q>⁺ + P⁺
        let enter = C::permute(
            &blocks(&[&r.minus, &before.plus, &p.plus, &after.plus, &qn.plus]),
            &[0, 1, 4, 3, 2],
        );
        // ψ + P⁺  :  ... -> R⁺ + Q<⁻ + Qₙ⁻ + Q>⁻ + P⁺
        let outer_step = C::coproduct(self.body.map(), &C::identity(&p.plus));
        // -> R⁺ + Q<⁻ + Q>⁻ + Qₙ⁻ + P⁺
        let park = C::permute(
            &blocks(&[&r.plus, &before.minus, &qn.minus, &after.minus, &p.plus]),
            &[0, 1, 3, 2, 4],
        );
        // (R⁺ + Q<⁻ + Q>⁻) + φ  :  -> R⁺ + Q<⁻ + Q>⁻ + Qₙ⁺ + P⁻
        let kept = C::sum_all(&blocks(&[&r.plus, &before.minus, &after.minus]));
        let inner_step = C::coproduct(&C::identity(&kept), phi.body.map());
        // -> R⁺ + Q<⁻ + P⁻ + Q>⁻ + Qₙ⁺
        let exit = C::permute(
            &blocks(&[&r.plus, &before.minus, &after.minus, &qn.plus, &p.minus]),
            &[0, 1, 4, 2, 3],
        );
        let mut h = enter;
        for step in [&outer_step, &park, &inner_step, &exit] {
            h = C::compose(&h, step)?;
        }
        let map = C::trace(&h, &qn.plus)?;

        let mut inner = self.inner[..n].to_vec();
        inner.extend(phi.inner.iter().cloned());
        inner.extend(self.inner[n + 1..].iter().cloned());
        Self::from_map(inner, r.clone(), map)
    }

    /// The same composite computed in Int: `(Q< ⊗ φ ⊗ Q>) ; ψ`.
    pub fn compose_at_via_int(&self, n: usize, phi: &Self) -> Result<Self> {
        if n >= self.inner.len() {
            return Err(Error::IndexOutOfRange { index: n, len: self.inner.len() });
        }
        let mut parts: Vec<IntMorphism<C>> =
            self.inner[..n].iter().map(IntMorphism::identity).collect();
        parts.push(phi.body.clone());
        parts.extend(self.inner[n + 1..].iter().map(IntMorphism::identity));
        let body = IntMorphism::tensor_all(&parts).compose(&self.body)?;
        let mut inner = self.inner[..n].to_vec();
        inner.extend(phi.inner.iter().cloned());
        inner.extend(self.inner[n + 1..].iter().cloned());
        WiringDiagram::new(inner, self.outer.clone(), body)
    }
}

impl<C: Traced> fmt::Display for WiringDiagram<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.inner.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "] -> {}: {}", self.outer, self.body.map())
    }
}
