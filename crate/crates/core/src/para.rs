//! Wiring diagrams with bypass storage: box `k` is scaled by a bypass
//! polynomial `m_k` whose directions are carried across the box untouched.

use std::fmt;

use crate::category::PolyStar;
use crate::error::{Error, Result};
use crate::int::{IntMorphism, IntObject};
use crate::operad::WiringDiagram;
use crate::poly::{Direction, KleisliMap, Poly, Route, Summand};

pub type PolyBox = IntObject<PolyStar>;
pub type Loose = IntMorphism<PolyStar>;

/// `m • (P⁻, P⁺) = (m × P⁻, m × P⁺)`.
pub fn scale(m: &Poly, p: &PolyBox) -> PolyBox {
    PolyBox::new(Poly::product(m, &p.minus), Poly::product(m, &p.plus))
}

/// `m • f : m • P ⇸ m • Q`, threading the `m` directions.
pub fn scale_morphism(m: &Poly, f: &Loose) -> Loose {
    let (p, q) = (f.dom(), f.cod());
    let gather = KleisliMap::distribute(m, &[q.minus.clone(), p.plus.clone()])
        .inverse()
        .expect("distributor is an iso");
    let spread = KleisliMap::distribute(m, &[q.plus.clone(), p.minus.clone()]);
    let map = gather
        .compose(&KleisliMap::scale(m, f.map()))
        .and_then(|g| g.compose(&spread))
        .expect("scaled blocks line up");
    Loose::new(scale(m, p), scale(m, q), map).expect("scaled loose map")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParaMorphism {
    inner: Vec<PolyBox>,
    bypass: Vec<Poly>,
    outer: PolyBox,
    body: Loose,
}

impl ParaMorphism {
    pub fn new(inner: Vec<PolyBox>, bypass: Vec<Poly>, outer: PolyBox, body: Loose) -> Result<Self> {
        if inner.len() != bypass.len() {
            return Err(Error::BoxMismatch(format!(
                "{} boxes but {} bypass polynomials",
                inner.len(),
                bypass.len()
            )));
        }
        let scaled: Vec<PolyBox> = inner.iter().zip(&bypass).map(|(p, m)| scale(m, p)).collect();
        WiringDiagram::new(scaled, outer.clone(), body.clone())?;
        Ok(ParaMorphism { inner, bypass, outer, body })
    }

    pub fn from_map(inner: Vec<PolyBox>, bypass: Vec<Poly>, outer: PolyBox, map: KleisliMap) -> Result<Self> {
        let scaled: Vec<PolyBox> = inner.iter().zip(&bypass).map(|(p, m)| scale(m, p)).collect();
        let body = Loose::new(PolyBox::tensor_all(&scaled), outer.clone(), map)?;
        ParaMorphism::new(inner, bypass, outer, body)
    }

    /// A plain wiring diagram, with every bypass `1`.
    pub fn from_wiring(wd: &WiringDiagram<PolyStar>) -> Self {
        ParaMorphism {
            inner: wd.inner().to_vec(),
            bypass: vec![Poly::one(); wd.inner().len()],
            outer: wd.outer().clone(),
            body: wd.body().clone(),
        }
    }

    pub fn identity(q: &PolyBox) -> Self {
        ParaMorphism::from_wiring(&WiringDiagram::identity(q))
    }

    pub fn inner(&self) -> &[PolyBox] {
        &self.inner
    }

    pub fn bypass(&self) -> &[Poly] {
        &self.bypass
    }

    pub fn outer(&self) -> &PolyBox {
        &self.outer
    }

    pub fn body(&self) -> &Loose {
        &self.body
    }

    pub fn scaled_inner(&self) -> Vec<PolyBox> {
        self.inner.iter().zip(&self.bypass).map(|(p, m)| scale(m, p)).collect()
    }

    /// The underlying diagram in `W`, boxes replaced by their scaled forms.
    pub fn to_wiring(&self) -> WiringDiagram<PolyStar> {
        WiringDiagram::new(self.scaled_inner(), self.outer.clone(), self.body.clone())
            .expect("validated on construction")
    }

    /// `self ∘ₙ phi`: box `n` (bypass `mₙ`) is replaced by `phi`'s boxes, whose
    /// bypasses become `mₙ × ℓⱼ`.
    pub fn compose_at(&self, n: usize, phi: &ParaMorphism) -> Result<Self> {
        let qn = self
            .inner
            .get(n)
            .ok_or(Error::IndexOutOfRange { index: n, len: self.inner.len() })?;
        if &phi.outer != qn {
            return Err(Error::BoxMismatch(format!(
                "box {n} is {qn}, inserted diagram has outer {}",
                phi.outer
            )));
        }
        let m = &self.bypass[n];
        let bypass: Vec<Poly> = phi.bypass.iter().map(|l| Poly::product(m, l)).collect();
        let target: Vec<PolyBox> = phi.inner.iter().zip(&bypass).map(|(p, ml)| scale(ml, p)).collect();

        // Σ (m × ℓⱼ) • Pⱼ  ≅  m • Σ ℓⱼ • Pⱼ
        let phi_scaled = phi.scaled_inner();
        let plus: Vec<Poly> = phi_scaled.iter().map(|b| b.plus.clone()).collect();
        let minus: Vec<Poly> = phi_scaled.iter().map(|b| b.minus.clone()).collect();
        let target_all = PolyBox::tensor_all(&target);
        let fwd = KleisliMap::distribute(m, &plus).inverse()?;
        let fwd = fwd.retype(target_all.plus.clone(), fwd.cod().clone())?;
        let bwd = KleisliMap::distribute(m, &minus);
        let bwd = bwd.retype(bwd.dom().clone(), target_all.minus.clone())?;
        let iso = Loose::from_isos(&fwd, &bwd)?;
        let body = iso.compose(&scale_morphism(m, &phi.body))?;
        let phi_w = WiringDiagram::new(target, scale(m, qn), body)?;

        let nested = self.to_wiring().compose_at(n, &phi_w)?;
        let mut inner = self.inner[..n].to_vec();
        inner.extend(phi.inner.iter().cloned());
        inner.extend(self.inner[n + 1..].iter().cloned());
        let mut all_bypass = self.bypass[..n].to_vec();
        all_bypass.extend(bypass);
        all_bypass.extend(self.bypass[n + 1..].iter().cloned());
        ParaMorphism::new(inner, all_bypass, self.outer.clone(), nested.body().clone())
    }
}

impl fmt::Display for ParaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (b, m)) in self.inner.iter().zip(&self.bypass).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({m})•{b}")?;
        }
        write!(f, "] -> {}: {}", self.outer, self.body.map())
    }
}

fn named(dirs: &[&str]) -> Summand {
    Summand::new(dirs.iter().map(|d| Direction::untyped(*d)).collect()).expect("distinct names")
}

fn poly(summands: &[&[&str]]) -> Poly {
    Poly::new(summands.iter().map(|s| named(s)).collect())
}

/// Names of the factorial program's boxes, in slot order.
pub const FACTORIAL_BOXES: [&str; 4] = ["One", "If", "Mul", "Dec"];

/// The factorial diagram `(y One, y If, y Mul, y Dec) ⇸ Fac`.
///
/// Entering `Fac` with `N` stores `N` across `One`, which produces `T = 1`.
/// `If` tests `N` while storing `T`: on its first exit it passes `N` on to
/// `Mul` (storing `N`, multiplying `N·T`), on its second it returns `T`.
/// `Mul`'s product is stored across `Dec`, which decrements `N` and loops
/// back into `If`.
pub fn factorial_program() -> ParaMorphism {
    let one = PolyBox::new(poly(&[&[]]), poly(&[&["T"]]));
    let if_ = PolyBox::new(poly(&[&["N"]]), poly(&[&["N"], &[]]));
    let mul = PolyBox::new(poly(&[&["a", "b"]]), poly(&[&["P"]]));
    let dec = PolyBox::new(poly(&[&["N"]]), poly(&[&["N"]]));
    let fac = PolyBox::new(poly(&[&["N"]]), poly(&[&["res"]]));
    let store = poly(&[&["s"]]);
    let inner = vec![one, if_, mul, dec];
    let bypass = vec![store.clone(); 4];
    // dom: 0 Fac⁻[N] | 1 One⁺[s,T] | 2 If⁺₁[s,N] 3 If⁺₂[s] | 4 Mul⁺[s,P] | 5 Dec⁺[s,N]
    // cod: 0 Fac⁺[res] | 1 One⁻[s] | 2 If⁻[s,N] | 3 Mul⁻[s,a,b] | 4 Dec⁻[s,N]
    let routes = vec![
        Route::to(1, vec![0]),
        Route::to(2, vec![1, 0]),
        Route::to(3, vec![1, 1, 0]),
        Route::to(0, vec![0]),
        Route::to(4, vec![1, 0]),
        Route::to(2, vec![0, 1]),
    ];
    let scaled: Vec<PolyBox> = inner.iter().map(|p| scale(&store, p)).collect();
    let all = PolyBox::tensor_all(&scaled);
    let map = KleisliMap::new(fac.minus.sum(&all.plus), fac.plus.sum(&all.minus), routes)
        .expect("factorial wiring is well typed");
    ParaMorphism::from_map(inner, bypass, fac, map).expect("factorial shapes line up")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(m: &[usize], p: &[usize]) -> PolyBox {
        PolyBox::new(Poly::from_arities(m), Poly::from_arities(p))
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale(&Poly::one(), &obj(&[1, 0], &[2])), obj(&[1, 0], &[2]));
        assert_eq!(scale(&Poly::monomial(1), &obj(&[1], &[1])), obj(&[2], &[2]));
        assert_eq!(scale(&Poly::from_arities(&[1, 0]), &obj(&[0], &[1])), obj(&[1, 0], &[2, 1]));
    }

    #[test]
    fn scale_morphism_of_identity() {
        let m = Poly::from_arities(&[1, 0]);
        let p = obj(&[1, 2], &[0]);
        assert_eq!(scale_morphism(&m, &Loose::identity(&p)), Loose::identity(&scale(&m, &p)));
    }

    #[test]
    fn factorial_shape() {
        let fac = factorial_program();
        assert_eq!(fac.inner().len(), 4);
        assert_eq!(fac.body().map().dom().arities(), vec![1, 2, 2, 1, 2, 2]);
        assert_eq!(fac.body().map().cod().arities(), vec![1, 1, 2, 3, 2]);
        assert!(fac.bypass().iter().all(|m| m.same_shape(&Poly::monomial(1))));
    }

    #[test]
    fn unit_bypass_reduces_to_plain_nesting() {
        let y = Poly::monomial(1);
        let psi = WiringDiagram::<PolyStar>::kappa(&y, &y, &y);
        let phi = WiringDiagram::<PolyStar>::kappa(&y, &y, &y);
        let lhs = ParaMorphism::from_wiring(&psi).compose_at(0, &ParaMorphism::from_wiring(&phi)).unwrap();
        let rhs = ParaMorphism::from_wiring(&psi.compose_at(0, &phi).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bypasses_multiply() {
        let y = Poly::monomial(1);
        let b = obj(&[1], &[1]);
        let one_box = |m: &Poly| {
            let scaled = scale(m, &b);
            // the entrance value is both stored and passed in; the box result leaves
            let routes = vec![Route::to(1, vec![0, 0]), Route::to(0, vec![1])];
            let map =
                KleisliMap::new(b.minus.sum(&scaled.plus), b.plus.sum(&scaled.minus), routes).unwrap();
            ParaMorphism::from_map(vec![b.clone()], vec![m.clone()], b.clone(), map).unwrap()
        };
        let c = one_box(&y).compose_at(0, &one_box(&y)).unwrap();
        assert_eq!(c.bypass()[0].arities(), vec![2]);
        assert_eq!(c.scaled_inner()[0], obj(&[3], &[3]));
    }
}
