//! The Int construction over a cocartesian traced category.
//!
//! A loose map `P ⇸ Q` is stored as a map `Q⁻ + P⁺ -> Q⁺ + P⁻` of the base
//! category, with the `Q` block first on both sides.

use std::fmt;

use crate::category::{PolyStar, SetStar, Traced};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IntObject<C: Traced> {
    pub minus: C::Obj,
    pub plus: C::Obj,
}

impl<C: Traced> PartialEq for IntObject<C> {
    fn eq(&self, other: &Self) -> bool {
        C::same_obj(&self.minus, &other.minus) && C::same_obj(&self.plus, &other.plus)
    }
}

impl<C: Traced> IntObject<C> {
    pub fn new(minus: C::Obj, plus: C::Obj) -> Self {
        IntObject { minus, plus }
    }

    pub fn unit() -> Self {
        IntObject { minus: C::zero(), plus: C::zero() }
    }

    /// `(A⁻, A⁺)* = (A⁺, A⁻)`.
    pub fn dual(&self) -> Self {
        IntObject { minus: self.plus.clone(), plus: self.minus.clone() }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        IntObject {
            minus: C::sum(&self.minus, &other.minus),
            plus: C::sum(&self.plus, &other.plus),
        }
    }

    pub fn tensor_all(objs: &[Self]) -> Self {
        objs.iter().fold(Self::unit(), |acc, o| acc.tensor(o))
    }
}

impl<C: Traced> fmt::Display for IntObject<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.minus, self.plus)
    }
}

#[derive(Debug, Clone)]
pub struct IntMorphism<C: Traced> {
    dom: IntObject<C>,
    cod: IntObject<C>,
    map: C::Hom,
}

impl<C: Traced> PartialEq for IntMorphism<C> {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom && self.cod == other.cod && self.map == other.map
    }
}

pub type PolyInt = IntMorphism<PolyStar>;
pub type SetInt = IntMorphism<SetStar>;

/// Reorder `blocks` into `order`; a thin wrapper for readability.
fn arrange<C: Traced>(blocks: &[&C::Obj], order: &[usize]) -> C::Hom {
    let owned: Vec<C::Obj> = blocks.iter().map(|b| (*b).clone()).collect();
    C::permute(&owned, order)
}

fn then<C: Traced>(maps: &[C::Hom]) -> Result<C::Hom> {
    let mut it = maps.iter();
    let first = it.next().expect("at least one map").clone();
    it.try_fold(first, |acc, m| C::compose(&acc, m))
}

impl<C: Traced> IntMorphism<C> {
    pub fn new(dom: IntObject<C>, cod: IntObject<C>, map: C::Hom) -> Result<Self> {
        let want_dom = C::sum(&cod.minus, &dom.plus);
        let want_cod = C::sum(&cod.plus, &dom.minus);
        if !C::same_obj(C::dom(&map), &want_dom) || !C::same_obj(C::cod(&map), &want_cod) {
            return Err(Error::BlockMismatch(format!(
                "loose map {dom} ⇸ {cod} needs {want_dom} -> {want_cod}, got {} -> {}",
                C::dom(&map),
                C::cod(&map)
            )));
        }
        Ok(IntMorphism { dom, cod, map })
    }

    pub fn dom(&self) -> &IntObject<C> {
        &self.dom
    }

    pub fn cod(&self) -> &IntObject<C> {
        &self.cod
    }

    pub fn map(&self) -> &C::Hom {
        &self.map
    }

    pub fn identity(p: &IntObject<C>) -> Self {
        let map = C::permute(&[p.minus.clone(), p.plus.clone()], &[1, 0]);
        IntMorphism { dom: p.clone(), cod: p.clone(), map }
    }

    /// The embedding `g ↦ N(g) : (0, A) ⇸ (0, B)`.
    pub fn embed(g: &C::Hom) -> Self {
        IntMorphism {
            dom: IntObject::new(C::zero(), C::dom(g).clone()),
            cod: IntObject::new(C::zero(), C::cod(g).clone()),
            map: g.clone(),
        }
    }

    /// Loose map assembled from an iso `fwd : P⁺ -> Q⁺` and `bwd : Q⁻ -> P⁻`.
    pub fn from_isos(fwd: &C::Hom, bwd: &C::Hom) -> Result<Self> {
        let dom: IntObject<C> = IntObject::new(C::cod(bwd).clone(), C::dom(fwd).clone());
        let cod: IntObject<C> = IntObject::new(C::dom(bwd).clone(), C::cod(fwd).clone());
        // Q⁻ + P⁺ -> P⁻ + Q⁺ -> Q⁺ + P⁻
        let map = C::compose(
            &C::coproduct(bwd, fwd),
            &C::permute(&[dom.minus.clone(), cod.plus.clone()], &[1, 0]),
        )?;
        IntMorphism::new(dom, cod, map)
    }

    /// `self ; g`, tracing out the middle object's minus part.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check_composable(g)?;
        let (p, q, r) = (&self.dom, &self.cod, &g.cod);
        // R⁻ + P⁺ + Q⁻ -> R⁻ + Q⁻ + P⁺ -> R⁻ + Q⁺ + P⁻ -> R⁺ + Q⁻ + P⁻ -> R⁺ + P⁻ + Q⁻
        let h = then::<C>(&[
            arrange::<C>(&[&r.minus, &p.plus, &q.minus], &[0, 2, 1]),
            C::coproduct(&C::identity(&r.minus), &self.map),
            C::coproduct(&g.map, &C::identity(&p.minus)),
            arrange::<C>(&[&r.plus, &q.minus, &p.minus], &[0, 2, 1]),
        ])?;
        self.finish(g, C::trace(&h, &q.minus)?)
    }

    /// Composite tracing out the middle object's plus part.
    pub fn compose_via_plus(&self, g: &Self) -> Result<Self> {
        self.check_composable(g)?;
        let (p, q, r) = (&self.dom, &self.cod, &g.cod);
        // R⁻ + P⁺ + Q⁺ -> R⁻ + Q⁺ + P⁺ -> R⁺ + Q⁻ + P⁺ -> R⁺ + Q⁺ + P⁻ -> R⁺ + P⁻ + Q⁺
        let h = then::<C>(&[
            arrange::<C>(&[&r.minus, &p.plus, &q.plus], &[0, 2, 1]),
            C::coproduct(&g.map, &C::identity(&p.plus)),
            C::coproduct(&C::identity(&r.plus), &self.map),
            arrange::<C>(&[&r.plus, &q.plus, &p.minus], &[0, 2, 1]),
        ])?;
        self.finish(g, C::trace(&h, &q.plus)?)
    }

    /// Composite tracing out both parts of the middle object at once.
    pub fn compose_via_both(&self, g: &Self) -> Result<Self> {
        self.check_composable(g)?;
        let (p, q, r) = (&self.dom, &self.cod, &g.cod);
        // R⁻ + P⁺ + Q⁺ + Q⁻ -> (R⁻ + Q⁺) + (Q⁻ + P⁺) -> (R⁺ + Q⁻) + (Q⁺ + P⁻)
        //   -> R⁺ + P⁻ + Q⁺ + Q⁻
        let h = then::<C>(&[
            arrange::<C>(&[&r.minus, &p.plus, &q.plus, &q.minus], &[0, 2, 3, 1]),
            C::coproduct(&g.map, &self.map),
            arrange::<C>(&[&r.plus, &q.minus, &q.plus, &p.minus], &[0, 3, 2, 1]),
        ])?;
        self.finish(g, C::trace(&h, &C::sum(&q.plus, &q.minus))?)
    }

    fn check_composable(&self, g: &Self) -> Result<()> {
        if self.cod != g.dom {
            return Err(Error::CodMismatch(format!("{} vs {}", self.cod, g.dom)));
        }
        Ok(())
    }

    fn finish(&self, g: &Self, map: C::Hom) -> Result<Self> {
        IntMorphism::new(self.dom.clone(), g.cod.clone(), map)
    }

    pub fn tensor(&self, g: &Self) -> Self {
        let (p, q, p2, q2) = (&self.dom, &self.cod, &g.dom, &g.cod);
        // Q⁻ + Q'⁻ + P⁺ + P'⁺ -> Q⁻ + P⁺ + Q'⁻ + P'⁺ -> Q⁺ + P⁻ + Q'⁺ + P'⁻
        //   -> Q⁺ + Q'⁺ + P⁻ + P'⁻
        let map = then::<C>(&[
            arrange::<C>(&[&q.minus, &q2.minus, &p.plus, &p2.plus], &[0, 2, 1, 3]),
            C::coproduct(&self.map, &g.map),
            arrange::<C>(&[&q.plus, &p.minus, &q2.plus, &p2.minus], &[0, 2, 1, 3]),
        ])
        .expect("tensor blocks line up");
        IntMorphism { dom: p.tensor(p2), cod: q.tensor(q2), map }
    }

    pub fn tensor_all(maps: &[Self]) -> Self {
        maps.iter().fold(Self::identity(&IntObject::unit()), |acc, m| acc.tensor(m))
    }

    /// `f : P ⊗ Q ⇸ R` to `P ⇸ Q* ⊗ R`, given how `dom` splits.
    pub fn transpose(&self, p: &IntObject<C>, q: &IntObject<C>) -> Result<Self> {
        if p.tensor(q) != self.dom {
            return Err(Error::ShapeMismatch(format!("{} is not {p} ⊗ {q}", self.dom)));
        }
        let r = &self.cod;
        // (Q⁺ + R⁻) + P⁺ -> R⁻ + P⁺ + Q⁺ -> R⁺ + P⁻ + Q⁻ -> (Q⁻ + R⁺) + P⁻
        let map = then::<C>(&[
            arrange::<C>(&[&q.plus, &r.minus, &p.plus], &[1, 2, 0]),
            self.map.clone(),
            arrange::<C>(&[&r.plus, &p.minus, &q.minus], &[2, 0, 1]),
        ])?;
        IntMorphism::new(p.clone(), q.dual().tensor(r), map)
    }

    /// Inverse of [`IntMorphism::transpose`]: `P ⇸ Q* ⊗ R` back to `P ⊗ Q ⇸ R`.
    pub fn untranspose(&self, q: &IntObject<C>, r: &IntObject<C>) -> Result<Self> {
        if q.dual().tensor(r) != self.cod {
            return Err(Error::ShapeMismatch(format!("{} is not {q}* ⊗ {r}", self.cod)));
        }
        let p = &self.dom;
        // R⁻ + P⁺ + Q⁺ -> (Q⁺ + R⁻) + P⁺ -> (Q⁻ + R⁺) + P⁻ -> R⁺ + P⁻ + Q⁻
        let map = then::<C>(&[
            arrange::<C>(&[&r.minus, &p.plus, &q.plus], &[2, 0, 1]),
            self.map.clone(),
            arrange::<C>(&[&q.minus, &r.plus, &p.minus], &[1, 2, 0]),
        ])?;
        IntMorphism::new(p.tensor(q), r.clone(), map)
    }

    /// Unit `η_P : I ⇸ P ⊗ P*` and counit `ε_P : P* ⊗ P ⇸ I`.
    pub fn cup_cap(p: &IntObject<C>) -> (Self, Self) {
        let swap = C::permute(&[p.minus.clone(), p.plus.clone()], &[1, 0]);
        let eta = IntMorphism { dom: IntObject::unit(), cod: p.tensor(&p.dual()), map: swap.clone() };
        let eps = IntMorphism { dom: p.dual().tensor(p), cod: IntObject::unit(), map: swap };
        (eta, eps)
    }

    /// Trace of `f : A ⊗ U ⇸ B ⊗ U` built from the compact structure:
    /// `(A ⊗ η_U) ; (f ⊗ U*) ; (B ⊗ ε_{U*})`.
    pub fn compact_trace(&self, a: &IntObject<C>, b: &IntObject<C>, u: &IntObject<C>) -> Result<Self> {
        if a.tensor(u) != self.dom || b.tensor(u) != self.cod {
            return Err(Error::BlockMismatch(format!(
                "{} ⇸ {} does not split as {a} ⊗ {u} ⇸ {b} ⊗ {u}",
                self.dom, self.cod
            )));
        }
        let (eta, _) = Self::cup_cap(u);
        let (_, eps) = Self::cup_cap(&u.dual());
        Self::identity(a)
            .tensor(&eta)
            .compose(&self.tensor(&Self::identity(&u.dual())))?
            .compose(&Self::identity(b).tensor(&eps))
    }
}

impl<C: Traced> fmt::Display for IntMorphism<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⇸ {} via {}", self.dom, self.cod, self.map)
    }
}
