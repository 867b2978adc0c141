//! Running wiring diagrams: fillers for boxes, the denotation at a finite
//! domain, and the token-passing interpreter.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::category::{PolyStar, SetStar};
use crate::error::{Error, Result};
use crate::finset::FinPartialMap;
use crate::int::{IntMorphism, IntObject};
use crate::operad::WiringDiagram;
use crate::para::{ParaMorphism, PolyBox};
use crate::pointwise::{apply_kleisli, eval_map, eval_poly, Elem, ElemIndex, FiniteDomain, Value};
use crate::poly::Poly;

pub type SetBox = IntObject<SetStar>;
pub type SetLoose = IntMorphism<SetStar>;

#[derive(Clone)]
enum FillerKind {
    Table(BTreeMap<Elem, Option<Elem>>),
    Primitive { name: &'static str, apply: fn(&[Value]) -> Option<Elem> },
}

/// A partial function `P⁻(X) ⇀ P⁺(X)` filling a box of signature `P`.
#[derive(Clone)]
pub struct Filler {
    signature: PolyBox,
    kind: FillerKind,
}

impl fmt::Debug for Filler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FillerKind::Table(t) => write!(f, "Filler::Table({} entries on {})", t.len(), self.signature),
            FillerKind::Primitive { name, .. } => write!(f, "Filler::Primitive({name} on {})", self.signature),
        }
    }
}

impl Filler {
    /// A table filler; inputs missing from `entries` are undefined.
    pub fn table(signature: PolyBox, entries: impl IntoIterator<Item = (Elem, Option<Elem>)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (i, o) in entries {
            i.check(&signature.minus)?;
            if let Some(o) = &o {
                o.check(&signature.plus)?;
            }
            table.insert(i, o);
        }
        Ok(Filler { signature, kind: FillerKind::Table(table) })
    }

    /// Tabulate a base-category map `P⁻(X) ⇀ P⁺(X)` back into elements.
    pub fn from_partial_map(signature: PolyBox, f: &FinPartialMap, dom: &FiniteDomain) -> Result<Self> {
        let src = ElemIndex::new(&signature.minus, dom)?;
        let dst = ElemIndex::new(&signature.plus, dom)?;
        if f.dom().len() != src.len() || f.cod().len() != dst.len() {
            return Err(Error::ShapeMismatch("partial map does not match the box at this domain".into()));
        }
        let entries = (0..src.len()).map(|i| (src.elem_at(i), f.apply(i).map(|j| dst.elem_at(j))));
        Filler::table(signature, entries)
    }

    /// The same filler on a box of the same arities, e.g. one with other
    /// direction names or labels. Values are passed positionally.
    pub fn retyped(mut self, signature: PolyBox) -> Result<Self> {
        let same = |a: &Poly, b: &Poly| a.arities() == b.arities();
        if !same(&self.signature.minus, &signature.minus) || !same(&self.signature.plus, &signature.plus) {
            return Err(Error::BoxMismatch(format!("cannot retype {} as {signature}", self.signature)));
        }
        self.signature = signature;
        Ok(self)
    }

    pub fn signature(&self) -> &PolyBox {
        &self.signature
    }

    pub fn name(&self) -> Option<&'static str> {
        match self.kind {
            FillerKind::Primitive { name, .. } => Some(name),
            FillerKind::Table(_) => None,
        }
    }

    pub fn entries(&self) -> Option<&BTreeMap<Elem, Option<Elem>>> {
        match &self.kind {
            FillerKind::Table(t) => Some(t),
            FillerKind::Primitive { .. } => None,
        }
    }

    pub fn apply(&self, e: &Elem) -> Result<Option<Elem>> {
        e.check(&self.signature.minus)?;
        let out = match &self.kind {
            FillerKind::Table(t) => t.get(e).cloned().flatten(),
            FillerKind::Primitive { apply, .. } => apply(&e.data),
        };
        if let Some(o) = &out {
            o.check(&self.signature.plus)?;
        }
        Ok(out)
    }

    /// Run on the scaled box `m • P`: the `m` part of the element is stored
    /// and handed back unchanged alongside the result.
    pub fn apply_scaled(&self, m: &Poly, e: &Elem) -> Result<Option<Elem>> {
        let (pm, pp) = (self.signature.minus.len(), self.signature.plus.len());
        if pm == 0 || e.position >= m.len() * pm {
            return Err(Error::IllFormedElem(format!("position {} outside the scaled box", e.position)));
        }
        let (i, j) = (e.position / pm, e.position % pm);
        let k = m.summand(i).len();
        if e.data.len() < k {
            return Err(Error::IllFormedElem("missing stored values".into()));
        }
        let base = Elem::new(j, e.data[k..].to_vec());
        Ok(self.apply(&base)?.map(|out| {
            let mut data = e.data[..k].to_vec();
            data.extend(out.data);
            Elem::new(i * pp + out.position, data)
        }))
    }

    /// `m • P⁻(X) ⇀ m • P⁺(X)` as a table.
    pub fn eval_scaled(&self, m: &Poly, dom: &FiniteDomain) -> Result<FinPartialMap> {
        let minus = Poly::product(m, &self.signature.minus);
        let plus = Poly::product(m, &self.signature.plus);
        let src = ElemIndex::new(&minus, dom)?;
        let dst = ElemIndex::new(&plus, dom)?;
        let mut table = Vec::with_capacity(src.len());
        for i in 0..src.len() {
            let out = self.apply_scaled(m, &src.elem_at(i))?;
            table.push(match out {
                None => None,
                Some(o) => Some(dst.index_of(&o).ok_or_else(|| {
                    Error::IllFormedElem(format!("filler output {o} lies outside the domain"))
                })?),
            });
        }
        FinPartialMap::new(eval_poly(&minus, dom)?, eval_poly(&plus, dom)?, table)
    }
}

fn y_box(minus: &[usize], plus: &[usize]) -> PolyBox {
    PolyBox::new(Poly::from_arities(minus), Poly::from_arities(plus))
}

fn prim(name: &'static str, signature: PolyBox, apply: fn(&[Value]) -> Option<Elem>) -> Filler {
    Filler { signature, kind: FillerKind::Primitive { name, apply } }
}

/// Named primitive fillers over the integers.
pub fn primitives_registry() -> Vec<Filler> {
    vec![
        prim("const1", y_box(&[0], &[1]), |_| Some(Elem::new(0, vec![1]))),
        prim("if_le1", y_box(&[1], &[1, 0]), |d| {
            Some(if d[0] <= 1 { Elem::new(1, vec![]) } else { Elem::new(0, vec![d[0]]) })
        }),
        prim("mul", y_box(&[2], &[1]), |d| d[0].checked_mul(d[1]).map(|v| Elem::new(0, vec![v]))),
        prim("dec", y_box(&[1], &[1]), |d| d[0].checked_sub(1).map(|v| Elem::new(0, vec![v]))),
        prim("add", y_box(&[2], &[1]), |d| d[0].checked_add(d[1]).map(|v| Elem::new(0, vec![v]))),
        prim("dup", y_box(&[1], &[2]), |d| Some(Elem::new(0, vec![d[0], d[0]]))),
        prim("swap", y_box(&[2], &[2]), |d| Some(Elem::new(0, vec![d[1], d[0]]))),
        prim("discard", y_box(&[1], &[0]), |_| Some(Elem::new(0, vec![]))),
        prim("id", y_box(&[1], &[1]), |d| Some(Elem::new(0, vec![d[0]]))),
    ]
}

pub fn primitive(name: &str) -> Result<Filler> {
    primitives_registry()
        .into_iter()
        .find(|f| f.name() == Some(name))
        .ok_or_else(|| Error::UnknownPrimitive(name.to_string()))
}

/// Primitive fillers for the factorial program, in its box order.
pub fn factorial_fillers() -> Vec<Filler> {
    ["const1", "if_le1", "mul", "dec"].iter().map(|n| primitive(n).expect("registered")).collect()
}

fn check_fillers(program: &ParaMorphism, fillers: &[Filler]) -> Result<()> {
    if fillers.len() != program.inner().len() {
        return Err(Error::BoxMismatch(format!(
            "{} fillers for {} boxes",
            fillers.len(),
            program.inner().len()
        )));
    }
    for (k, (f, b)) in fillers.iter().zip(program.inner()).enumerate() {
        if f.signature() != b {
            return Err(Error::BoxMismatch(format!("filler {k} has signature {}, box is {b}", f.signature())));
        }
    }
    Ok(())
}

/// A loose map of polynomials evaluated at `X`.
pub fn eval_loose(f: &IntMorphism<PolyStar>, dom: &FiniteDomain) -> Result<SetLoose> {
    let at = |p: &PolyBox| -> Result<SetBox> { Ok(SetBox::new(eval_poly(&p.minus, dom)?, eval_poly(&p.plus, dom)?)) };
    SetLoose::new(at(f.dom())?, at(f.cod())?, eval_map(f.map(), dom)?)
}

pub fn eval_wiring(wd: &WiringDiagram<PolyStar>, dom: &FiniteDomain) -> Result<WiringDiagram<SetStar>> {
    let body = eval_loose(wd.body(), dom)?;
    let inner = wd
        .inner()
        .iter()
        .map(|p| Ok(SetBox::new(eval_poly(&p.minus, dom)?, eval_poly(&p.plus, dom)?)))
        .collect::<Result<Vec<_>>>()?;
    WiringDiagram::new(inner, body.cod().clone(), body)
}

/// The program and its fillers at `X`: a diagram of finite sets and one
/// loose map `I ⇸ m_k • P_k` per box.
pub fn eval_program(
    program: &ParaMorphism,
    fillers: &[Filler],
    dom: &FiniteDomain,
) -> Result<(WiringDiagram<SetStar>, Vec<SetLoose>)> {
    check_fillers(program, fillers)?;
    let wd = eval_wiring(&program.to_wiring(), dom)?;
    let boxes = fillers
        .iter()
        .zip(program.bypass())
        .map(|(f, m)| {
            let g = f.eval_scaled(m, dom)?;
            SetLoose::new(SetBox::unit(), SetBox::new(g.dom().clone(), g.cod().clone()), g)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((wd, boxes))
}

/// The denotation `Q⁻(X) ⇀ Q⁺(X)`: fillers tensored and fed into the body,
/// with the feedback resolved by the trace of finite pointed sets.
pub fn eval_denot(program: &ParaMorphism, fillers: &[Filler], dom: &FiniteDomain) -> Result<FinPartialMap> {
    let (wd, boxes) = eval_program(program, fillers, dom)?;
    let filled = SetLoose::tensor_all(&boxes).compose(wd.body())?;
    Ok(filled.map().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Locus {
    OuterIn,
    BoxIn(usize),
    BoxOut(usize),
    OuterOut,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::OuterIn => f.write_str("Outer.in"),
            Locus::BoxIn(k) => write!(f, "{k}.in"),
            Locus::BoxOut(k) => write!(f, "{k}.out"),
            Locus::OuterOut => f.write_str("Outer.out"),
        }
    }
}

/// One trajectory entry: a side of a box (or of the outer box) and the
/// summand, i.e. control region, on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Visit {
    pub locus: Locus,
    pub position: usize,
}

impl fmt::Display for Visit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.locus, self.position + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Returned(Elem),
    Undefined,
    FuelExhausted,
    /// A box was re-entered with identical data, so the run can never end.
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    pub trajectory: Vec<Visit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum number of routings through the body.
    pub fuel: u64,
    /// Stop with `Diverged` when a box is re-entered in a state seen before.
    pub detect_cycles: bool,
}

impl RunOptions {
    pub fn fuel(fuel: u64) -> Self {
        RunOptions { fuel, detect_cycles: false }
    }

    pub fn exact(fuel: u64) -> Self {
        RunOptions { fuel, detect_cycles: true }
    }
}

fn offsets(parts: impl IntoIterator<Item = usize>, first: usize) -> Vec<usize> {
    let mut acc = first;
    parts
        .into_iter()
        .map(|n| {
            let o = acc;
            acc += n;
            o
        })
        .collect()
}

/// Block and local index of `i`, given the block offsets.
fn locate(offs: &[usize], i: usize) -> (usize, usize) {
    let k = offs.partition_point(|&o| o <= i) - 1;
    (k, i - offs[k])
}

/// Pass a token through the diagram, one body routing per step.
pub fn eval_operational(
    program: &ParaMorphism,
    fillers: &[Filler],
    input: &Elem,
    opts: RunOptions,
) -> Result<RunResult> {
    check_fillers(program, fillers)?;
    let outer = program.outer();
    input.check(&outer.minus)?;
    let scaled = program.scaled_inner();
    let body = program.body().map();
    let dom_off = offsets(scaled.iter().map(|b| b.plus.len()), outer.minus.len());
    let cod_off = offsets(scaled.iter().map(|b| b.minus.len()), outer.plus.len());

    let mut trajectory = vec![Visit { locus: Locus::OuterIn, position: input.position }];
    let mut seen: HashSet<(usize, Elem)> = HashSet::new();
    let mut token = input.clone();
    let mut steps = 0;
    let done = |outcome, steps, trajectory| Ok(RunResult { outcome, steps, trajectory });
    while steps < opts.fuel {
        steps += 1;
        let Some(out) = apply_kleisli(body, &token)? else {
            return done(Outcome::Undefined, steps, trajectory);
        };
        if out.position < outer.plus.len() {
            trajectory.push(Visit { locus: Locus::OuterOut, position: out.position });
            return done(Outcome::Returned(out), steps, trajectory);
        }
        let (k, pos) = locate(&cod_off, out.position);
        trajectory.push(Visit { locus: Locus::BoxIn(k), position: pos });
        let entered = Elem::new(pos, out.data);
        if opts.detect_cycles && !seen.insert((k, entered.clone())) {
            return done(Outcome::Diverged, steps, trajectory);
        }
        let Some(result) = fillers[k].apply_scaled(&program.bypass()[k], &entered)? else {
            return done(Outcome::Undefined, steps, trajectory);
        };
        trajectory.push(Visit { locus: Locus::BoxOut(k), position: result.position });
        token = Elem::new(dom_off[k] + result.position, result.data);
    }
    done(Outcome::FuelExhausted, steps, trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::para::factorial_program;
    use crate::poly::{KleisliMap, Route};

    fn factorial_oracle(n: i64) -> i64 {
        (1..=n).product()
    }

    fn run_fac(n: i64, fillers: &[Filler], fuel: u64) -> RunResult {
        eval_operational(&factorial_program(), fillers, &Elem::new(0, vec![n]), RunOptions::fuel(fuel)).unwrap()
    }

    #[test]
    fn factorial_values() {
        for n in 0..=10 {
            let r = run_fac(n, &factorial_fillers(), 100_000);
            assert_eq!(r.outcome, Outcome::Returned(Elem::new(0, vec![factorial_oracle(n)])), "n = {n}");
            let ifs = r.trajectory.iter().filter(|v| v.locus == Locus::BoxIn(1)).count();
            assert_eq!(ifs as i64, n.max(1));
        }
    }

    #[test]
    fn broken_dec_runs_out_of_fuel() {
        let mut fillers = factorial_fillers();
        fillers[3] = primitive("id").unwrap();
        let r = run_fac(5, &fillers, 50);
        assert_eq!(r.outcome, Outcome::FuelExhausted);
        assert_eq!(r.steps, 50);
    }

    #[test]
    fn primitive_examples() {
        let if_le1 = primitive("if_le1").unwrap();
        assert_eq!(if_le1.apply(&Elem::new(0, vec![1])).unwrap(), Some(Elem::new(1, vec![])));
        assert_eq!(if_le1.apply(&Elem::new(0, vec![4])).unwrap(), Some(Elem::new(0, vec![4])));
        assert_eq!(primitive("mul").unwrap().apply(&Elem::new(0, vec![3, 4])).unwrap(), Some(Elem::new(0, vec![12])));
        assert_eq!(primitive("dec").unwrap().apply(&Elem::new(0, vec![5])).unwrap(), Some(Elem::new(0, vec![4])));
        assert!(matches!(primitive("nope"), Err(Error::UnknownPrimitive(_))));
    }

    #[test]
    fn scaled_filler_keeps_stored_values() {
        let dec = primitive("dec").unwrap();
        let m = Poly::from_arities(&[1, 0]);
        assert_eq!(dec.apply_scaled(&m, &Elem::new(0, vec![9, 5])).unwrap(), Some(Elem::new(0, vec![9, 4])));
        assert_eq!(dec.apply_scaled(&m, &Elem::new(1, vec![5])).unwrap(), Some(Elem::new(1, vec![4])));
    }

    fn single_box_program(fill_routes: Vec<Route>) -> ParaMorphism {
        let b = y_box(&[1], &[1]);
        let map = KleisliMap::new(b.minus.sum(&b.plus), b.plus.sum(&b.minus), fill_routes).unwrap();
        ParaMorphism::from_map(vec![b.clone()], vec![Poly::one()], b, map).unwrap()
    }

    #[test]
    fn undefined_filler_stops_at_box_entrance() {
        let prog = single_box_program(vec![Route::to(1, vec![0]), Route::to(0, vec![0])]);
        let empty = Filler::table(y_box(&[1], &[1]), []).unwrap();
        let r = eval_operational(&prog, &[empty], &Elem::new(0, vec![0]), RunOptions::fuel(10)).unwrap();
        assert_eq!(r.outcome, Outcome::Undefined);
        assert_eq!(r.trajectory.last().unwrap().locus, Locus::BoxIn(0));
    }

    #[test]
    fn closed_loop_exhausts_fuel_exactly() {
        // box output feeds straight back into the box
        let prog = single_box_program(vec![Route::to(1, vec![0]), Route::to(1, vec![0])]);
        let id = primitive("id").unwrap();
        let r = eval_operational(&prog, std::slice::from_ref(&id), &Elem::new(0, vec![3]), RunOptions::fuel(17)).unwrap();
        assert_eq!((r.outcome, r.steps), (Outcome::FuelExhausted, 17));
        let r = eval_operational(&prog, &[id], &Elem::new(0, vec![3]), RunOptions::exact(17)).unwrap();
        assert_eq!(r.outcome, Outcome::Diverged);
    }

    #[test]
    fn identity_wiring_denotes_the_filler() {
        let b = y_box(&[1], &[1, 0]);
        let prog = ParaMorphism::identity(&b);
        let dom = FiniteDomain::uniform(2);
        let f = Filler::table(
            b.clone(),
            [(Elem::new(0, vec![0]), Some(Elem::new(1, vec![]))), (Elem::new(0, vec![1]), Some(Elem::new(0, vec![0])))],
        )
        .unwrap();
        let denot = eval_denot(&prog, std::slice::from_ref(&f), &dom).unwrap();
        assert_eq!(denot, f.eval_scaled(&Poly::one(), &dom).unwrap());
    }

    #[test]
    fn empty_diagram_denotes_its_body() {
        let q = y_box(&[1, 0], &[1]);
        let map = KleisliMap::new(q.minus.clone(), q.plus.clone(), vec![Route::to(0, vec![0]), Route::Bot]).unwrap();
        let prog = ParaMorphism::from_map(vec![], vec![], q, map.clone()).unwrap();
        let dom = FiniteDomain::uniform(3);
        assert_eq!(eval_denot(&prog, &[], &dom).unwrap(), eval_map(&map, &dom).unwrap());
    }

    #[test]
    fn worked_bypass_diagram() {
        // Q = (y², y), P₁ = (y, y) with bypass y, P₂ = (y², y)
        let (y, y2) = (Poly::monomial(1), Poly::monomial(2));
        let q = PolyBox::new(y2.clone(), y.clone());
        let p1 = PolyBox::new(y.clone(), y.clone());
        let p2 = PolyBox::new(y2.clone(), y.clone());
        let scaled_p1 = crate::para::scale(&y, &p1);
        // {Q}y² -> {P₁}y×y, {P₁}y×y -> {P₂}y², {P₂}y -> {Q}y
        let map = KleisliMap::new(
            q.minus.sum(&scaled_p1.plus).sum(&p2.plus),
            q.plus.sum(&scaled_p1.minus).sum(&p2.minus),
            vec![Route::to(1, vec![0, 1]), Route::to(2, vec![0, 1]), Route::to(0, vec![0])],
        )
        .unwrap();
        let prog = ParaMorphism::from_map(vec![p1, p2], vec![y.clone(), Poly::one()], q, map).unwrap();
        let inc = Filler::table(
            PolyBox::new(y.clone(), y.clone()),
            (0..5).map(|b| (Elem::new(0, vec![b]), Some(Elem::new(0, vec![b + 1])))),
        )
        .unwrap();
        let r = eval_operational(&prog, &[inc, primitive("mul").unwrap()], &Elem::new(0, vec![3, 4]), RunOptions::fuel(10))
            .unwrap();
        // stored A = 3 rides across P₁ while B = 4 becomes C = 5; D = A·C
        assert_eq!(r.outcome, Outcome::Returned(Elem::new(0, vec![15])));
    }
}
