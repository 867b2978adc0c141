//! Seeded random instances for the law suites and property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{PolyStar, SetStar, Traced};
use crate::double::{SegmentProblem, TightMap};
use crate::error::Result;
use crate::finset::{FinMap, FinPartialMap, FinSet};
use crate::int::IntObject;
use crate::operad::WiringDiagram;
use crate::para::{ParaMorphism, PolyBox};
use crate::pointwise::{elements, FiniteDomain};
use crate::poly::{KleisliMap, Poly, Route};
use crate::semantics::{Filler, SetBox, SetLoose};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chance that a generated map sends an element or summand to `⊥`.
const BOT_RATE: f64 = 0.2;

/// Untyped polynomial with at most `summands` summands of arity `<= dirs`.
pub fn poly(rng: &mut SeededRng, summands: usize, dirs: usize) -> Poly {
    let n = rng.gen_range(0..=summands);
    let arities: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=dirs)).collect();
    Poly::from_arities(&arities)
}

/// Random pointed map of polynomials; summands with no compatible target go to `⊥`.
pub fn kleisli(rng: &mut SeededRng, dom: &Poly, cod: &Poly) -> KleisliMap {
    let routes = dom
        .summands()
        .iter()
        .map(|s| {
            let targets: Vec<usize> = (0..cod.len()).filter(|&t| !s.is_empty() || cod.summand(t).is_empty()).collect();
            if rng.gen_bool(BOT_RATE) || targets.is_empty() {
                return Route::Bot;
            }
            let t = *targets.choose(rng).expect("nonempty");
            let pull = (0..cod.summand(t).len()).map(|_| rng.gen_range(0..s.len())).collect();
            Route::to(t, pull)
        })
        .collect();
    KleisliMap::new(dom.clone(), cod.clone(), routes).expect("generated routes are valid")
}

pub fn finset(rng: &mut SeededRng, max: usize) -> FinSet {
    FinSet::anonymous(rng.gen_range(0..=max))
}

pub fn partial_map(rng: &mut SeededRng, dom: &FinSet, cod: &FinSet) -> FinPartialMap {
    let table = (0..dom.len())
        .map(|_| (!cod.is_empty() && !rng.gen_bool(BOT_RATE)).then(|| rng.gen_range(0..cod.len())))
        .collect();
    FinPartialMap::new(dom.clone(), cod.clone(), table).expect("indices in range")
}

/// Random total map; `cod` must be inhabited unless `dom` is empty.
pub fn total_map(rng: &mut SeededRng, dom: &FinSet, cod: &FinSet) -> FinMap {
    assert!(dom.is_empty() || !cod.is_empty(), "no total map into the empty set");
    let table = (0..dom.len()).map(|_| rng.gen_range(0..cod.len())).collect();
    FinMap::new(dom.clone(), cod.clone(), table).expect("indices in range")
}

/// Objects and maps of a base category that the law suites can sample.
pub trait Sample: Traced {
    fn obj(rng: &mut SeededRng) -> Self::Obj;
    fn hom(rng: &mut SeededRng, dom: &Self::Obj, cod: &Self::Obj) -> Self::Hom;
    /// The coproduct inclusion `a -> a + w`.
    fn inl(a: &Self::Obj, w: &Self::Obj) -> Self::Hom;
}

impl Sample for PolyStar {
    fn obj(rng: &mut SeededRng) -> Poly {
        poly(rng, 4, 3)
    }
    fn hom(rng: &mut SeededRng, dom: &Poly, cod: &Poly) -> KleisliMap {
        kleisli(rng, dom, cod)
    }
    fn inl(a: &Poly, w: &Poly) -> KleisliMap {
        KleisliMap::inl(a, w)
    }
}

impl Sample for SetStar {
    fn obj(rng: &mut SeededRng) -> FinSet {
        finset(rng, 5)
    }
    fn hom(rng: &mut SeededRng, dom: &FinSet, cod: &FinSet) -> FinPartialMap {
        partial_map(rng, dom, cod)
    }
    fn inl(a: &FinSet, w: &FinSet) -> FinPartialMap {
        FinPartialMap::inl(a, w)
    }
}

pub fn int_object<C: Sample>(rng: &mut SeededRng) -> IntObject<C> {
    IntObject::new(C::obj(rng), C::obj(rng))
}

/// Small polynomial box, for diagrams that get evaluated pointwise.
pub fn poly_box(rng: &mut SeededRng, summands: usize, dirs: usize) -> PolyBox {
    PolyBox::new(poly(rng, summands, dirs), poly(rng, summands, dirs))
}

pub fn wiring_into<C: Sample>(rng: &mut SeededRng, inner: Vec<IntObject<C>>, outer: IntObject<C>) -> WiringDiagram<C> {
    let x = IntObject::tensor_all(&inner);
    let map = C::hom(rng, &C::sum(&outer.minus, &x.plus), &C::sum(&outer.plus, &x.minus));
    WiringDiagram::from_map(inner, outer, map).expect("generated blocks line up")
}

/// A diagram with up to `max_boxes` boxes and random objects.
pub fn wiring<C: Sample>(rng: &mut SeededRng, max_boxes: usize) -> WiringDiagram<C> {
    let n = rng.gen_range(0..=max_boxes);
    let inner = (0..n).map(|_| int_object(rng)).collect();
    let outer = int_object(rng);
    wiring_into(rng, inner, outer)
}

/// A program with up to `max_boxes` small boxes and bypasses of arity `<= 1`.
pub fn program(rng: &mut SeededRng, max_boxes: usize) -> ParaMorphism {
    let n = rng.gen_range(0..=max_boxes);
    let inner: Vec<PolyBox> = (0..n).map(|_| poly_box(rng, 2, 2)).collect();
    let outer = poly_box(rng, 2, 2);
    program_into(rng, inner, outer)
}

pub fn program_into(rng: &mut SeededRng, inner: Vec<PolyBox>, outer: PolyBox) -> ParaMorphism {
    let bypass: Vec<Poly> = inner.iter().map(|_| poly(rng, 2, 1)).collect();
    let scaled: Vec<PolyBox> = inner.iter().zip(&bypass).map(|(p, m)| crate::para::scale(m, p)).collect();
    let x = PolyBox::tensor_all(&scaled);
    let map = kleisli(rng, &outer.minus.sum(&x.plus), &outer.plus.sum(&x.minus));
    ParaMorphism::from_map(inner, bypass, outer, map).expect("generated blocks line up")
}

/// A table filler defined on a random subset of `P⁻(X)`.
pub fn table_filler(rng: &mut SeededRng, sig: &PolyBox, dom: &FiniteDomain) -> Result<Filler> {
    let outs = elements(&sig.plus, dom)?;
    let entries: Vec<_> = elements(&sig.minus, dom)?
        .into_iter()
        .map(|e| {
            let out = (!outs.is_empty() && !rng.gen_bool(BOT_RATE)).then(|| outs.choose(rng).expect("nonempty").clone());
            (e, out)
        })
        .collect();
    Filler::table(sig.clone(), entries)
}

/// A commuting square whose legs start with an `I⁻` and an `I⁺` map, all
/// sets of size at most `max`. The top row is solved for from the rest;
/// draws without a solution are retried.
pub fn segment_problem(rng: &mut SeededRng, max: usize) -> SegmentProblem {
    loop {
        let pick = |rng: &mut SeededRng, fibres: &[Vec<Option<usize>>]| {
            vec![fibres.iter().map(|f| *f.choose(rng).expect("nonempty fibre")).collect()]
        };
        if let Some(p) = segment_problems_with(rng, max, pick).pop() {
            return p;
        }
    }
}

/// Every top row solving one random square skeleton, up to `cap` of them.
pub fn segment_family(rng: &mut SeededRng, max: usize, cap: usize) -> Vec<SegmentProblem> {
    loop {
        let all = |_: &mut SeededRng, fibres: &[Vec<Option<usize>>]| {
            let mut tables: Vec<Vec<Option<usize>>> = vec![Vec::new()];
            for f in fibres {
                tables = tables
                    .iter()
                    .flat_map(|t| {
                        f.iter().map(move |&w| {
                            let mut t = t.clone();
                            t.push(w);
                            t
                        })
                    })
                    .take(cap)
                    .collect();
            }
            tables
        };
        let family = segment_problems_with(rng, max, all);
        if !family.is_empty() {
            return family;
        }
    }
}

/// Draws the square without its top row, then builds one problem per top
/// table chosen by `pick` from the fibres of the admissible values.
fn segment_problems_with(
    rng: &mut SeededRng,
    max: usize,
    pick: impl FnOnce(&mut SeededRng, &[Vec<Option<usize>>]) -> Vec<Vec<Option<usize>>>,
) -> Vec<SegmentProblem> {
    let c = SetBox::new(finset(rng, max), finset(rng, max));
    let d = SetBox::new(finset(rng, max), finset(rng, max));
    // Total maps into an empty set force an empty domain.
    let a2p = if c.plus.is_empty() { FinSet::empty() } else { finset(rng, max) };
    let b2m = if d.minus.is_empty() { FinSet::empty() } else { finset(rng, max) };
    let a1m = if c.minus.is_empty() { FinSet::empty() } else { finset(rng, max) };
    let b1p = if d.plus.is_empty() { FinSet::empty() } else { finset(rng, max) };
    let a1p = if a2p.is_empty() { FinSet::empty() } else { finset(rng, max) };
    let b1m = if b2m.is_empty() { FinSet::empty() } else { finset(rng, max) };

    let bottom_map = partial_map(rng, &d.minus.sum(&c.plus), &d.plus.sum(&c.minus));
    let bottom = SetLoose::new(c.clone(), d.clone(), bottom_map).expect("blocks line up");
    let a_plus = total_map(rng, &a1p, &a2p);
    let b_minus = total_map(rng, &b1m, &b2m);
    let lower_left = TightMap::new(total_map(rng, &a1m, &c.minus), total_map(rng, &a2p, &c.plus));
    let lower_right = TightMap::new(total_map(rng, &b2m, &d.minus), total_map(rng, &b1p, &d.plus));

    // f must satisfy f ; (d⁺ + c⁻) = (b⁻;d⁻ + a⁺;c⁺) ; g.
    let h = b_minus
        .compose(&lower_right.minus)
        .expect("legs compose")
        .coproduct(&a_plus.compose(&lower_left.plus).expect("legs compose"))
        .to_partial()
        .compose(bottom.map())
        .expect("legs meet the bottom row");
    let boundary = lower_right.plus.coproduct(&lower_left.minus);
    let fibres: Vec<Vec<Option<usize>>> = (0..h.dom().len())
        .map(|z| match h.apply(z) {
            None => vec![None],
            Some(v) => (0..boundary.dom().len()).filter(|&w| boundary.apply(w) == v).map(Some).collect(),
        })
        .collect();
    if fibres.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let a1 = SetBox::new(a1m.clone(), a1p.clone());
    let b1 = SetBox::new(b1m.clone(), b1p.clone());
    pick(rng, &fibres)
        .into_iter()
        .map(|table| {
            let top_map = FinPartialMap::new(b1m.sum(&a1p), b1p.sum(&a1m), table).expect("fibre indices in range");
            SegmentProblem {
                top: SetLoose::new(a1.clone(), b1.clone(), top_map).expect("blocks line up"),
                bottom: bottom.clone(),
                upper_left: TightMap::new(FinMap::identity(&a1m), a_plus.clone()),
                lower_left: lower_left.clone(),
                upper_right: TightMap::new(b_minus.clone(), FinMap::identity(&b1p)),
                lower_right: lower_right.clone(),
            }
        })
        .collect()
}
