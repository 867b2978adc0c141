//! Seeded law suites. Every check draws its instances from its own stream,
//! derived from the suite seed and the check name, so a single check can be
//! replayed in isolation.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::category::{PolyStar, SetStar, Traced};
use crate::double::{
    check_cell, factor_rs, run_trajectory, segment_cell, universality_check, vertical_paste, AltFactorization,
    SegmentProblem, Segmentation, TrajOutcome, Universality,
};
use crate::error::Result;
use crate::finset::{FinMap, FinPartialMap, FinSet};
use crate::gen::{self, Sample, SeededRng};
use crate::int::{IntMorphism, IntObject, PolyInt};
use crate::operad::WiringDiagram;
use crate::pointwise::{elements, eval_map, eval_poly, ElemIndex, FiniteDomain};
use crate::poly::{KleisliMap, Poly, Route};
use crate::semantics::{eval_denot, eval_operational, eval_program, eval_wiring, Filler, Outcome, RunOptions};
use crate::trace::{trace_poly, trace_set};

#[derive(Debug, Clone, Serialize)]
pub struct LawCheck {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    /// The first few counterexamples, verbatim.
    pub examples: Vec<String>,
}

impl LawCheck {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }
}

const KEPT_EXAMPLES: usize = 3;

/// One case: `None` when the law holds, otherwise a description.
type Case = Result<Option<String>>;

fn stream(seed: u64, name: &str) -> u64 {
    name.bytes()
        .fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

pub fn run(name: &str, seed: u64, cases: usize, mut case: impl FnMut(&mut SeededRng) -> Case) -> LawCheck {
    let mut rng = gen::rng(stream(seed, name));
    let mut check = LawCheck { name: name.to_string(), cases, failed: 0, examples: Vec::new() };
    for i in 0..cases {
        let verdict = match case(&mut rng) {
            Ok(v) => v,
            Err(e) => Some(format!("error: {e}")),
        };
        if let Some(why) = verdict {
            check.failed += 1;
            if check.examples.len() < KEPT_EXAMPLES {
                check.examples.push(format!("case {i}: {why}"));
            }
        }
    }
    check
}

fn differ<T: PartialEq + fmt::Display>(what: &str, lhs: &T, rhs: &T) -> Option<String> {
    (lhs != rhs).then(|| format!("{what}: {lhs} vs {rhs}"))
}

fn then<C: Traced>(maps: &[&C::Hom]) -> Result<C::Hom> {
    let mut acc = maps[0].clone();
    for m in &maps[1..] {
        acc = C::compose(&acc, m)?;
    }
    Ok(acc)
}

/// The axioms of a traced cocartesian category, plus uniformity along
/// coproduct inclusions and the iteration fixed point.
pub fn trace_laws<C: Sample>(tag: &str, seed: u64, cases: usize) -> Vec<LawCheck> {
    let name = |law: &str| format!("{tag}.{law}");
    vec![
        run(&name("naturality"), seed, cases, |rng| {
            let (a2, a, b, b2, u) = (C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng));
            let f = C::hom(rng, &C::sum(&a, &u), &C::sum(&b, &u));
            let (h, k) = (C::hom(rng, &a2, &a), C::hom(rng, &b, &b2));
            let id_u = C::identity(&u);
            let inside = then::<C>(&[&C::coproduct(&h, &id_u), &f, &C::coproduct(&k, &id_u)])?;
            let lhs = C::trace(&inside, &u)?;
            let rhs = then::<C>(&[&h, &C::trace(&f, &u)?, &k])?;
            Ok(differ("Tr((h+U);f;(k+U)) vs h;Tr(f);k", &lhs, &rhs))
        }),
        run(&name("dinaturality"), seed, cases, |rng| {
            let (a, b, u, v) = (C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng));
            let f = C::hom(rng, &C::sum(&a, &u), &C::sum(&b, &v));
            let h = C::hom(rng, &v, &u);
            let lhs = C::trace(&C::compose(&f, &C::coproduct(&C::identity(&b), &h))?, &u)?;
            let rhs = C::trace(&C::compose(&C::coproduct(&C::identity(&a), &h), &f)?, &v)?;
            Ok(differ("Tr^U(f;(B+h)) vs Tr^V((A+h);f)", &lhs, &rhs))
        }),
        run(&name("vanishing_zero"), seed, cases, |rng| {
            let (a, b) = (C::obj(rng), C::obj(rng));
            let f = C::hom(rng, &a, &b);
            Ok(differ("Tr^0(f) vs f", &C::trace(&f, &C::zero())?, &f))
        }),
        run(&name("vanishing_sum"), seed, cases, |rng| {
            let (a, b, u, v) = (C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng));
            let uv = C::sum(&u, &v);
            let f = C::hom(rng, &C::sum(&a, &uv), &C::sum(&b, &uv));
            let lhs = C::trace(&f, &uv)?;
            let rhs = C::trace(&C::trace(&f, &v)?, &u)?;
            Ok(differ("Tr^{U+V}(f) vs Tr^U(Tr^V(f))", &lhs, &rhs))
        }),
        run(&name("superposing"), seed, cases, |rng| {
            let (a, b, c, d, u) = (C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng));
            let f = C::hom(rng, &C::sum(&a, &u), &C::sum(&b, &u));
            let g = C::hom(rng, &c, &d);
            let lhs = C::trace(&C::coproduct(&g, &f), &u)?;
            let rhs = C::coproduct(&g, &C::trace(&f, &u)?);
            Ok(differ("Tr(g+f) vs g+Tr(f)", &lhs, &rhs))
        }),
        run(&name("yanking"), seed, cases, |rng| {
            let u = C::obj(rng);
            let swap = C::permute(&[u.clone(), u.clone()], &[1, 0]);
            Ok(differ("Tr^U(σ) vs id", &C::trace(&swap, &u)?, &C::identity(&u)))
        }),
        run(&name("uniformity"), seed, cases, |rng| {
            // g agrees with f on A + U and never leaves B + U from there.
            let (a, b, u, w) = (C::obj(rng), C::obj(rng), C::obj(rng), C::obj(rng));
            let bu = C::sum(&b, &u);
            let f = C::hom(rng, &C::sum(&a, &u), &bu);
            let k = C::hom(rng, &w, &C::sum(&bu, &w));
            let widened = C::compose(&f, &C::inl(&bu, &w))?;
            let g = C::compose(&C::coproduct(&widened, &k), &C::codiagonal(&C::sum(&bu, &w)))?;
            let lhs = C::trace(&f, &u)?;
            let rhs = C::trace(&g, &C::sum(&u, &w))?;
            Ok(differ("Tr^U(f) vs Tr^{U+W}(g)", &lhs, &rhs))
        }),
        run(&name("iteration_fixed_point"), seed, cases, |rng| {
            let (a, b) = (C::obj(rng), C::obj(rng));
            let f = C::hom(rng, &a, &C::sum(&b, &a));
            let it = C::trace(&C::compose(&C::codiagonal(&a), &f)?, &a)?;
            let unrolled = then::<C>(&[&f, &C::coproduct(&C::identity(&b), &it), &C::codiagonal(&b)])?;
            Ok(differ("iter(f) vs f;[id, iter(f)]", &it, &unrolled))
        }),
    ]
}

/// Evaluating at a finite domain commutes with trace and composition.
pub fn pointwise_laws(seed: u64, cases: usize) -> Vec<LawCheck> {
    let small = |rng: &mut SeededRng| gen::poly(rng, 3, 3);
    vec![
        run("pointwise.trace", seed, cases, |rng| {
            let (a, b, u) = (small(rng), small(rng), small(rng));
            let f = gen::kleisli(rng, &a.sum(&u), &b.sum(&u));
            let dom = FiniteDomain::uniform(rng.gen_range(0..=3));
            let lhs = eval_map(&trace_poly(&f, &u)?, &dom)?;
            let rhs = trace_set(&eval_map(&f, &dom)?, &eval_poly(&u, &dom)?)?;
            Ok(differ("eval(Tr f) vs Tr(eval f)", &lhs, &rhs))
        }),
        run("pointwise.compose", seed, cases, |rng| {
            let (a, b, c) = (small(rng), small(rng), small(rng));
            let (f, g) = (gen::kleisli(rng, &a, &b), gen::kleisli(rng, &b, &c));
            let dom = FiniteDomain::uniform(rng.gen_range(0..=3));
            let lhs = eval_map(&f.compose(&g)?, &dom)?;
            let rhs = eval_map(&f, &dom)?.compose(&eval_map(&g, &dom)?)?;
            Ok(differ("eval(f;g) vs eval f;eval g", &lhs, &rhs))
        }),
    ]
}

fn loose<C: Sample>(rng: &mut SeededRng, p: &IntObject<C>, q: &IntObject<C>) -> IntMorphism<C> {
    let map = C::hom(rng, &C::sum(&q.minus, &p.plus), &C::sum(&q.plus, &p.minus));
    IntMorphism::new(p.clone(), q.clone(), map).expect("generated blocks line up")
}

/// Category, monoidal and compact-closed laws of `Int`.
pub fn int_laws<C: Sample>(tag: &str, seed: u64, cases: usize) -> Vec<LawCheck> {
    let name = |law: &str| format!("{tag}.{law}");
    let obj = |rng: &mut SeededRng| gen::int_object::<C>(rng);
    vec![
        run(&name("associativity"), seed, cases, |rng| {
            let (p, q, r, s) = (obj(rng), obj(rng), obj(rng), obj(rng));
            let (f, g, h) = (loose(rng, &p, &q), loose(rng, &q, &r), loose(rng, &r, &s));
            Ok(differ("(f;g);h vs f;(g;h)", &f.compose(&g)?.compose(&h)?, &f.compose(&g.compose(&h)?)?))
        }),
        run(&name("unit"), seed, cases, |rng| {
            let (p, q) = (obj(rng), obj(rng));
            let f = loose(rng, &p, &q);
            let left = IntMorphism::identity(&p).compose(&f)?;
            let right = f.compose(&IntMorphism::identity(&q))?;
            Ok(differ("id;f vs f", &left, &f).or_else(|| differ("f;id vs f", &right, &f)))
        }),
        run(&name("composite_variants"), seed, cases, |rng| {
            let (p, q, r) = (obj(rng), obj(rng), obj(rng));
            let (f, g) = (loose(rng, &p, &q), loose(rng, &q, &r));
            let minus = f.compose(&g)?;
            let plus = f.compose_via_plus(&g)?;
            let both = f.compose_via_both(&g)?;
            Ok(differ("trace Q⁻ vs trace Q⁺", &minus, &plus).or_else(|| differ("trace Q⁻ vs trace both", &minus, &both)))
        }),
        run(&name("interchange"), seed, cases, |rng| {
            let (p, q, r, p2, q2, r2) = (obj(rng), obj(rng), obj(rng), obj(rng), obj(rng), obj(rng));
            let (f, g) = (loose(rng, &p, &q), loose(rng, &q, &r));
            let (f2, g2) = (loose(rng, &p2, &q2), loose(rng, &q2, &r2));
            let lhs = f.tensor(&f2).compose(&g.tensor(&g2))?;
            let rhs = f.compose(&g)?.tensor(&f2.compose(&g2)?);
            Ok(differ("(f⊗f');(g⊗g') vs (f;g)⊗(f';g')", &lhs, &rhs))
        }),
        run(&name("snake_left"), seed, cases, |rng| {
            let p = obj(rng);
            let (eta, eps) = IntMorphism::cup_cap(&p);
            let id = IntMorphism::identity(&p);
            Ok(differ("(η⊗P);(P⊗ε) vs id", &eta.tensor(&id).compose(&id.tensor(&eps))?, &id))
        }),
        run(&name("snake_right"), seed, cases, |rng| {
            let p = obj(rng);
            let (eta, eps) = IntMorphism::cup_cap(&p);
            let id = IntMorphism::identity(&p.dual());
            Ok(differ("(P*⊗η);(ε⊗P*) vs id", &id.tensor(&eta).compose(&eps.tensor(&id))?, &id))
        }),
        run(&name("compact_trace"), seed, cases, |rng| {
            let (a, b, u) = (C::obj(rng), C::obj(rng), C::obj(rng));
            let g = C::hom(rng, &C::sum(&a, &u), &C::sum(&b, &u));
            let n = |x: &C::Obj| IntObject::<C>::new(C::zero(), x.clone());
            let via_compact = IntMorphism::<C>::embed(&g).compact_trace(&n(&a), &n(&b), &n(&u))?;
            Ok(differ("compact trace vs base trace", &via_compact, &IntMorphism::embed(&C::trace(&g, &u)?)))
        }),
        run(&name("transpose_roundtrip"), seed, cases, |rng| {
            let (p, q, r) = (obj(rng), obj(rng), obj(rng));
            let f = loose(rng, &p.tensor(&q), &r);
            Ok(differ("untranspose(transpose f) vs f", &f.transpose(&p, &q)?.untranspose(&q, &r)?, &f))
        }),
    ]
}

/// Every pointed map `dom -> cod` of untyped polynomials.
pub fn all_kleisli_maps(dom: &Poly, cod: &Poly) -> Vec<KleisliMap> {
    let options: Vec<Vec<Route>> = dom
        .summands()
        .iter()
        .map(|s| {
            let mut opts = vec![Route::Bot];
            for (t, target) in cod.summands().iter().enumerate() {
                let mut pulls: Vec<Vec<usize>> = vec![Vec::new()];
                for _ in 0..target.len() {
                    pulls = pulls
                        .into_iter()
                        .flat_map(|p| {
                            (0..s.len()).map(move |d| {
                                let mut q = p.clone();
                                q.push(d);
                                q
                            })
                        })
                        .collect();
                }
                opts.extend(pulls.into_iter().map(|pull| Route::to(t, pull)));
            }
            opts
        })
        .collect();
    let mut all: Vec<Vec<Route>> = vec![Vec::new()];
    for opts in &options {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect();
    }
    all.into_iter().filter_map(|routes| KleisliMap::new(dom.clone(), cod.clone(), routes).ok()).collect()
}

/// A map `h` out of `i₁.cod = i₂.cod` with `i₁;h = f` and `i₂;h = g`, by search.
pub fn find_copairing(i1: &PolyInt, i2: &PolyInt, f: &PolyInt, g: &PolyInt) -> Result<Option<PolyInt>> {
    let (s, r) = (i1.cod(), f.cod());
    for map in all_kleisli_maps(&r.minus.sum(&s.plus), &r.plus.sum(&s.minus)) {
        let h = IntMorphism::new(s.clone(), r.clone(), map)?;
        if &i1.compose(&h)? == f && &i2.compose(&h)? == g {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// `P ⊗ Q` with the injections built from `⊥ : I ⇸ Q` and `⊥ : I ⇸ P`.
pub fn tensor_injections(p: &IntObject<PolyStar>, q: &IntObject<PolyStar>) -> (PolyInt, PolyInt) {
    let bot = |x: &IntObject<PolyStar>| {
        IntMorphism::new(IntObject::unit(), x.clone(), KleisliMap::bottom(&x.minus, &x.plus)).expect("I ⇸ X")
    };
    (IntMorphism::identity(p).tensor(&bot(q)), bot(p).tensor(&IntMorphism::identity(q)))
}

/// `⊗` is not a coproduct in `Int(Poly⋆)`, although it is on objects `(0, A)`.
pub fn not_cocartesian() -> Result<Option<String>> {
    let c = IntObject::new(Poly::one(), Poly::zero());
    let (i1, i2) = tensor_injections(&c, &c);
    let id = IntMorphism::identity(&c);
    if let Some(h) = find_copairing(&i1, &i2, &id, &id)? {
        return Ok(Some(format!("unexpected copairing {h}")));
    }
    let n = IntObject::new(Poly::zero(), Poly::monomial(1));
    let (j1, j2) = tensor_injections(&n, &n);
    let id = IntMorphism::identity(&n);
    if find_copairing(&j1, &j2, &id, &id)?.is_none() {
        return Ok(Some("copairing missing on the cocartesian part".into()));
    }
    Ok(None)
}

/// `∘ₙ` associativity (sequential and parallel), units, and agreement with
/// composing in `Int`.
pub fn operad_laws<C: Sample>(tag: &str, seed: u64, cases: usize) -> Vec<LawCheck> {
    let name = |law: &str| format!("{tag}.{law}");
    let boxes = |rng: &mut SeededRng, lo: usize, hi: usize| {
        let n = rng.gen_range(lo..=hi);
        (0..n).map(|_| gen::int_object::<C>(rng)).collect::<Vec<_>>()
    };
    vec![
        run(&name("sequential_associativity"), seed, cases, |rng| {
            let inner = boxes(rng, 1, 3);
            let outer = gen::int_object::<C>(rng);
            let psi = gen::wiring_into(rng, inner, outer);
            let n = rng.gen_range(0..psi.inner().len());
            let inner = boxes(rng, 1, 2);
            let phi = gen::wiring_into(rng, inner, psi.inner()[n].clone());
            let m = rng.gen_range(0..phi.inner().len());
            let inner = boxes(rng, 0, 2);
            let chi = gen::wiring_into(rng, inner, phi.inner()[m].clone());
            let lhs = psi.compose_at(n, &phi.compose_at(m, &chi)?)?;
            let rhs = psi.compose_at(n, &phi)?.compose_at(n + m, &chi)?;
            Ok(differ("ψ∘(φ∘χ) vs (ψ∘φ)∘χ", &lhs, &rhs))
        }),
        run(&name("parallel_associativity"), seed, cases, |rng| {
            let inner = boxes(rng, 2, 3);
            let outer = gen::int_object::<C>(rng);
            let psi = gen::wiring_into(rng, inner, outer);
            let k = rng.gen_range(1..psi.inner().len());
            let n = rng.gen_range(0..k);
            let inner = boxes(rng, 0, 2);
            let phi = gen::wiring_into(rng, inner, psi.inner()[n].clone());
            let inner = boxes(rng, 0, 2);
            let chi = gen::wiring_into(rng, inner, psi.inner()[k].clone());
            let shift = phi.inner().len();
            let lhs = psi.compose_at(n, &phi)?.compose_at(k + shift - 1, &chi)?;
            let rhs = psi.compose_at(k, &chi)?.compose_at(n, &phi)?;
            Ok(differ("(ψ∘ₙφ)∘ₖχ vs (ψ∘ₖχ)∘ₙφ", &lhs, &rhs))
        }),
        run(&name("unit"), seed, cases, |rng| {
            let inner = boxes(rng, 1, 3);
            let outer = gen::int_object::<C>(rng);
            let phi = gen::wiring_into(rng, inner, outer);
            let k = rng.gen_range(0..phi.inner().len());
            let left = WiringDiagram::identity(phi.outer()).compose_at(0, &phi)?;
            let right = phi.compose_at(k, &WiringDiagram::identity(&phi.inner()[k]))?;
            Ok(differ("1∘φ vs φ", &left, &phi).or_else(|| differ("φ∘1 vs φ", &right, &phi)))
        }),
        run(&name("agrees_with_int"), seed, cases, |rng| {
            let inner = boxes(rng, 1, 3);
            let outer = gen::int_object::<C>(rng);
            let psi = gen::wiring_into(rng, inner, outer);
            let n = rng.gen_range(0..psi.inner().len());
            let inner = boxes(rng, 0, 3);
            let phi = gen::wiring_into(rng, inner, psi.inner()[n].clone());
            Ok(differ("∘ₙ vs (ids⊗φ);ψ", &psi.compose_at(n, &phi)?, &psi.compose_at_via_int(n, &phi)?))
        }),
    ]
}

/// Inclusion `a -> a + b` as a total map.
fn include(a: &FinSet, b: &FinSet) -> FinMap {
    FinMap::new(a.clone(), a.sum(b), (0..a.len()).collect()).expect("inclusion")
}

/// The canonical factorization with junk added to `C′⁻` and `D′⁺`.
fn padded_alternative(rng: &mut SeededRng, prob: &SegmentProblem, seg: &Segmentation) -> Result<AltFactorization> {
    let c_minus = &prob.bottom.dom().minus;
    let d_plus = &prob.bottom.cod().plus;
    let junk = |rng: &mut SeededRng, target: &FinSet, tag: &str| {
        let n = if target.is_empty() { 0 } else { rng.gen_range(1..=2) };
        FinSet::new((0..n).map(|i| format!("{tag}{i}")).collect())
    };
    let (jc, jd) = (junk(rng, c_minus, "jc"), junk(rng, d_plus, "jd"));
    let (a2m, b2p) = (&seg.a2_minus, &seg.b2_plus);
    let c2 = a2m.sum(&jc);
    let d2 = b2p.sum(&jd);
    // B₂⁺ + A₂⁻ -> (B₂⁺ + J_d) + (A₂⁻ + J_c)
    let widen = include(b2p, &jd).coproduct(&include(a2m, &jc)).to_partial();
    let middle = IntMorphism::new(
        IntObject::new(c2.clone(), seg.middle.dom().plus.clone()),
        IntObject::new(seg.middle.cod().minus.clone(), d2.clone()),
        seg.middle.map().compose(&widen)?,
    )?;
    let extend = |base: &FinMap, extra: &FinSet, rng: &mut SeededRng| {
        let mut table = base.table().to_vec();
        table.extend((0..extra.len()).map(|_| rng.gen_range(0..base.cod().len())));
        FinMap::new(base.dom().sum(extra), base.cod().clone(), table)
    };
    Ok(AltFactorization {
        middle,
        upper_left_minus: seg.upper.left.minus.compose(&include(a2m, &jc))?,
        upper_right_plus: seg.upper.right.plus.compose(&include(b2p, &jd))?,
        lower_left_minus: extend(&seg.lower.left.minus, &jc, rng)?,
        lower_right_plus: extend(&seg.lower.right.plus, &jd, rng)?,
    })
}

/// The factorization through the bottom row's own boundary.
fn terminal_alternative(prob: &SegmentProblem) -> Result<AltFactorization> {
    let (c, d) = (prob.bottom.dom(), prob.bottom.cod());
    let map = prob.lower_right.minus.coproduct(&prob.lower_left.plus).to_partial().compose(prob.bottom.map())?;
    let middle = IntMorphism::new(
        IntObject::new(c.minus.clone(), prob.upper_left.plus.cod().clone()),
        IntObject::new(prob.upper_right.minus.cod().clone(), d.plus.clone()),
        map,
    )?;
    Ok(AltFactorization {
        middle,
        upper_left_minus: prob.lower_left.minus.clone(),
        upper_right_plus: prob.lower_right.plus.clone(),
        lower_left_minus: FinMap::identity(&c.minus),
        lower_right_plus: FinMap::identity(&d.plus),
    })
}

fn bijections(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in bijections(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// Segmentation of random commuting squares with sets of size `<= max`.
pub fn segmentation_laws(seed: u64, cases: usize, max: usize) -> Vec<LawCheck> {
    vec![
        run("segment.paste_back", seed, cases, |rng| {
            let prob = gen::segment_problem(rng, max);
            let seg = segment_cell(&prob)?;
            if !check_cell(&seg.upper)? || !check_cell(&seg.lower)? {
                return Ok(Some("a returned cell does not commute".into()));
            }
            let pasted = vertical_paste(&seg.upper, &seg.lower)?;
            let cell = prob.cell()?;
            Ok((pasted != cell).then(|| "pasting does not reproduce the input".into()))
        }),
        run("segment.universality", seed, cases, |rng| {
            let prob = gen::segment_problem(rng, max);
            let seg = segment_cell(&prob)?;
            let alts = [
                AltFactorization::from_segmentation(&seg),
                padded_alternative(rng, &prob, &seg)?,
                terminal_alternative(&prob)?,
            ];
            for (i, alt) in alts.iter().enumerate() {
                if let Universality::CounterExample(why) = universality_check(&prob, &seg, alt)? {
                    return Ok(Some(format!("alternative {i}: {why}")));
                }
            }
            Ok(None)
        }),
        run("segment.rs_unique", seed, cases, |rng| {
            let p = gen::finset(rng, 5);
            let t = gen::finset(rng, 3);
            let h = gen::partial_map(rng, &p, &t);
            let rs = factor_rs(&h);
            let n = rs.x.len();
            if rs.r.compose(&rs.s.to_partial())? != h {
                return Ok(Some("r;s differs from h".into()));
            }
            // A relabelled copy of X, and every bijection that could compare them.
            let perm = {
                let all = bijections(n);
                all[rng.gen_range(0..all.len())].clone()
            };
            let r2 = FinPartialMap::new(p.clone(), rs.x.clone(), rs.r.table().iter().map(|x| x.map(|x| perm[x])).collect())?;
            let mut s2 = vec![0; n];
            for x in 0..n {
                s2[perm[x]] = rs.s.apply(x);
            }
            let s2 = FinMap::new(rs.x.clone(), t.clone(), s2)?;
            let comparisons = bijections(n)
                .into_iter()
                .filter(|phi| {
                    let phi = FinMap::new(rs.x.clone(), rs.x.clone(), phi.clone()).expect("bijection");
                    rs.r.compose(&phi.to_partial()).ok() == Some(r2.clone()) && phi.compose(&s2).ok() == Some(rs.s.clone())
                })
                .count();
            Ok((comparisons != 1).then(|| format!("{comparisons} comparison isos")))
        }),
    ]
}

fn segment_and_check(rng: &mut SeededRng, prob: &SegmentProblem) -> Case {
    let seg = segment_cell(prob)?;
    if !check_cell(&seg.upper)? || !check_cell(&seg.lower)? {
        return Ok(Some("a returned cell does not commute".into()));
    }
    if vertical_paste(&seg.upper, &seg.lower)? != prob.cell()? {
        return Ok(Some("pasting does not reproduce the input".into()));
    }
    let alts = [
        AltFactorization::from_segmentation(&seg),
        padded_alternative(rng, prob, &seg)?,
        terminal_alternative(prob)?,
    ];
    for (i, alt) in alts.iter().enumerate() {
        if let Universality::CounterExample(why) = universality_check(prob, &seg, alt)? {
            return Ok(Some(format!("alternative {i}: {why}")));
        }
    }
    Ok(None)
}

/// Every top row over `skeletons` random square skeletons (sets of size
/// `<= max`, at most `cap` tops each). Returns the check and the number of
/// cells it covered.
pub fn segmentation_family(seed: u64, skeletons: usize, max: usize, cap: usize) -> (LawCheck, usize) {
    let mut cells = 0;
    let check = run("segment.family", seed, skeletons, |rng| {
        let family = gen::segment_family(rng, max, cap);
        cells += family.len();
        for (i, prob) in family.iter().enumerate() {
            if let Some(why) = segment_and_check(rng, prob)? {
                return Ok(Some(format!("top {i}: {why}")));
            }
        }
        Ok(None)
    });
    (check, cells)
}

/// Segmentation-driven trajectories agree with the token interpreter.
pub fn trajectory_laws(seed: u64, cases: usize) -> Vec<LawCheck> {
    vec![run("trajectory.agreement", seed, cases, |rng| {
        let dom = FiniteDomain::uniform(rng.gen_range(0..=2));
        let (program, input) = loop {
            let program = gen::program(rng, 3);
            let ins = elements(&program.outer().minus, &dom)?;
            if !ins.is_empty() {
                let input = ins[rng.gen_range(0..ins.len())].clone();
                break (program, input);
            }
        };
        let fillers = program
            .inner()
            .iter()
            .map(|b| gen::table_filler(rng, b, &dom))
            .collect::<Result<Vec<Filler>>>()?;
        let run = eval_operational(&program, &fillers, &input, RunOptions::exact(u64::MAX))?;
        let (wd, boxes) = eval_program(&program, &fillers, &dom)?;
        let start = ElemIndex::new(&program.outer().minus, &dom)?.index_of(&input).expect("enumerated");
        let traj = run_trajectory(&wd, &boxes, start, usize::MAX)?;
        let visits = traj.visits(&program, &dom)?;
        if visits != run.trajectory {
            let show = |v: &[crate::semantics::Visit]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            return Ok(Some(format!("segmentation {} vs interpreter {}", show(&visits), show(&run.trajectory))));
        }
        let same_end = matches!(
            (&run.outcome, traj.outcome),
            (Outcome::Returned(_), TrajOutcome::Completed)
                | (Outcome::Undefined, TrajOutcome::Undefined)
                | (Outcome::Diverged, TrajOutcome::Diverged)
        );
        Ok((!same_end).then(|| format!("outcomes {:?} vs {:?}", run.outcome, traj.outcome)))
    })]
}

/// Evaluation is a map of operads: nesting then evaluating equals evaluating
/// then nesting.
pub fn evaluation_laws(seed: u64, cases: usize) -> Vec<LawCheck> {
    vec![
        run("eval.nesting", seed, cases, |rng| {
            let dom = FiniteDomain::uniform(rng.gen_range(0..=3));
            let psi = loop {
                let p = gen::program(rng, 3);
                if !p.inner().is_empty() {
                    break p;
                }
            };
            let n = rng.gen_range(0..psi.inner().len());
            let inner: Vec<_> = (0..rng.gen_range(0..=2)).map(|_| gen::poly_box(rng, 2, 2)).collect();
            let phi = gen::program_into(rng, inner, psi.inner()[n].clone());
            let mut fill = |boxes: &[crate::para::PolyBox]| {
                boxes.iter().map(|b| gen::table_filler(rng, b, &dom)).collect::<Result<Vec<_>>>()
            };
            let psi_fillers = fill(psi.inner())?;
            let phi_fillers = fill(phi.inner())?;

            let mut nested_fillers = psi_fillers[..n].to_vec();
            nested_fillers.extend(phi_fillers.iter().cloned());
            nested_fillers.extend(psi_fillers[n + 1..].iter().cloned());
            let lhs = eval_denot(&psi.compose_at(n, &phi)?, &nested_fillers, &dom)?;

            let phi_meaning = eval_denot(&phi, &phi_fillers, &dom)?;
            let mut outer_fillers = psi_fillers.clone();
            outer_fillers[n] = Filler::from_partial_map(psi.inner()[n].clone(), &phi_meaning, &dom)?;
            let rhs = eval_denot(&psi, &outer_fillers, &dom)?;
            Ok(differ("eval(ψ∘ₙφ) vs eval ψ with eval φ in slot n", &lhs, &rhs))
        }),
        run("eval.wiring", seed, cases, |rng| {
            let dom = FiniteDomain::uniform(rng.gen_range(0..=3));
            let small = |rng: &mut SeededRng, lo: usize, hi: usize| {
                (0..rng.gen_range(lo..=hi)).map(|_| gen::poly_box(rng, 2, 2)).collect::<Vec<_>>()
            };
            let inner = small(rng, 1, 3);
            let outer = gen::poly_box(rng, 2, 2);
            let psi = gen::wiring_into::<PolyStar>(rng, inner, outer);
            let n = rng.gen_range(0..psi.inner().len());
            let inner = small(rng, 0, 2);
            let phi = gen::wiring_into::<PolyStar>(rng, inner, psi.inner()[n].clone());
            let lhs = eval_wiring(&psi.compose_at(n, &phi)?, &dom)?;
            let rhs = eval_wiring(&psi, &dom)?.compose_at(n, &eval_wiring(&phi, &dom)?)?;
            Ok(differ("eval(ψ∘ₙφ) vs eval ψ ∘ₙ eval φ", &lhs, &rhs))
        }),
    ]
}

/// Everything the `laws` command runs.
pub fn law_suite(seed: u64, cases: usize) -> LawReport {
    let mut checks = Vec::new();
    checks.extend(trace_laws::<PolyStar>("trace.poly", seed, cases));
    checks.extend(trace_laws::<SetStar>("trace.set", seed, cases));
    checks.extend(pointwise_laws(seed, cases));
    checks.extend(int_laws::<PolyStar>("int.poly", seed, cases));
    checks.push(run("int.poly.not_cocartesian", seed, 1, |_| not_cocartesian()));
    checks.extend(operad_laws::<PolyStar>("operad.poly", seed, cases));
    LawReport { seed, cases, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all(checks: Vec<LawCheck>) {
        for c in checks {
            assert!(c.passed(), "{}: {:?}", c.name, c.examples);
        }
    }

    #[test]
    fn trace_axioms_small_runs() {
        assert_all(trace_laws::<PolyStar>("poly", 1, 60));
        assert_all(trace_laws::<SetStar>("set", 1, 60));
    }

    #[test]
    fn int_and_operad_small_runs() {
        assert_all(int_laws::<PolyStar>("int", 2, 40));
        assert_all(operad_laws::<SetStar>("operad", 2, 40));
    }

    #[test]
    fn tensor_is_not_a_coproduct() {
        assert_eq!(not_cocartesian().unwrap(), None);
    }

    #[test]
    fn enumeration_counts() {
        // y^2 -> y + 1: ⊥, two pulls into y, one map into 1
        assert_eq!(all_kleisli_maps(&Poly::monomial(2), &Poly::from_arities(&[1, 0])).len(), 4);
        assert_eq!(all_kleisli_maps(&Poly::zero(), &Poly::monomial(1)).len(), 1);
    }

    #[test]
    fn segmentation_and_trajectories_small_runs() {
        assert_all(segmentation_laws(3, 40, 3));
        let (family, cells) = segmentation_family(3, 10, 3, 16);
        assert!(family.passed(), "{:?}", family.examples);
        assert!(cells >= 10);
        assert_all(trajectory_laws(3, 40));
        assert_all(evaluation_laws(3, 30));
    }

    #[test]
    fn a_failing_law_is_reported() {
        let c = run("always.fails", 0, 5, |_| Ok(Some("nope".into())));
        assert_eq!((c.failed, c.examples.len()), (5, KEPT_EXAMPLES));
    }
}
