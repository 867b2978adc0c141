//! The double category of loose maps over finite pointed sets.
//!
//! Tight maps are pairs of total functions, cells are commuting squares, and
//! a cell whose legs start with an `I⁻` map on the left and an `I⁺` map on
//! the right can be segmented: pushout, factor off the undefined part, pull
//! back. Iterating segmentation walks a token through a wiring diagram and
//! records the control regions it crosses.

use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::category::SetStar;
use crate::error::{Error, Result};
use crate::finset::{FinMap, FinPartialMap, FinSet};
use crate::operad::WiringDiagram;
use crate::para::ParaMorphism;
use crate::pointwise::{ElemIndex, FiniteDomain};
use crate::semantics::{Locus, SetBox, SetLoose, Visit};

/// A tight map `(s⁻, s⁺) : A -> B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightMap {
    pub minus: FinMap,
    pub plus: FinMap,
}

impl TightMap {
    pub fn new(minus: FinMap, plus: FinMap) -> Self {
        TightMap { minus, plus }
    }

    pub fn identity(a: &SetBox) -> Self {
        TightMap::new(FinMap::identity(&a.minus), FinMap::identity(&a.plus))
    }

    pub fn dom(&self) -> SetBox {
        SetBox::new(self.minus.dom().clone(), self.plus.dom().clone())
    }

    pub fn cod(&self) -> SetBox {
        SetBox::new(self.minus.cod().clone(), self.plus.cod().clone())
    }

    pub fn compose(&self, g: &TightMap) -> Result<TightMap> {
        Ok(TightMap::new(self.minus.compose(&g.minus)?, self.plus.compose(&g.plus)?))
    }

    /// Member of `I⁻`: the minus component is an identity.
    pub fn in_i_minus(&self) -> bool {
        self.minus.is_identity()
    }

    /// Member of `I⁺`: the plus component is an identity.
    pub fn in_i_plus(&self) -> bool {
        self.plus.is_identity()
    }

    /// `s = (id, s⁺) ; (s⁻, id)`: an `I⁻` map, then an `I⁺` map.
    pub fn factor_minus_plus(&self) -> (TightMap, TightMap) {
        (
            TightMap::new(FinMap::identity(self.minus.dom()), self.plus.clone()),
            TightMap::new(self.minus.clone(), FinMap::identity(self.plus.cod())),
        )
    }

    /// `s = (s⁻, id) ; (id, s⁺)`: an `I⁺` map, then an `I⁻` map.
    pub fn factor_plus_minus(&self) -> (TightMap, TightMap) {
        (
            TightMap::new(self.minus.clone(), FinMap::identity(self.plus.dom())),
            TightMap::new(FinMap::identity(self.minus.cod()), self.plus.clone()),
        )
    }
}

/// A square with loose `top : A ⇸ B`, `bottom : C ⇸ D` and tight legs
/// `left : A -> C`, `right : B -> D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub top: SetLoose,
    pub bottom: SetLoose,
    pub left: TightMap,
    pub right: TightMap,
}

fn shape(what: &str, got: &SetBox, want: &SetBox) -> Result<()> {
    if got != want {
        return Err(Error::ShapeMismatch(format!("{what} is {got}, expected {want}")));
    }
    Ok(())
}

/// Whether `(t⁻ + s⁺) ; bottom = top ; (t⁺ + s⁻)`, with `⊥` compared too.
pub fn check_cell(c: &Cell) -> Result<bool> {
    shape("left leg domain", &c.left.dom(), c.top.dom())?;
    shape("left leg codomain", &c.left.cod(), c.bottom.dom())?;
    shape("right leg domain", &c.right.dom(), c.top.cod())?;
    shape("right leg codomain", &c.right.cod(), c.bottom.cod())?;
    let lhs = c.right.minus.coproduct(&c.left.plus).to_partial().compose(c.bottom.map())?;
    let rhs = c.top.map().compose(&c.right.plus.coproduct(&c.left.minus).to_partial())?;
    Ok(lhs == rhs)
}

/// Stack `upper` on top of `lower`.
pub fn vertical_paste(upper: &Cell, lower: &Cell) -> Result<Cell> {
    if upper.bottom != lower.top {
        return Err(Error::ShapeMismatch("bottom of the upper cell is not the top of the lower".into()));
    }
    Ok(Cell {
        top: upper.top.clone(),
        bottom: lower.bottom.clone(),
        left: upper.left.compose(&lower.left)?,
        right: upper.right.compose(&lower.right)?,
    })
}

/// Put `second` to the right of `first`; both rows compose in Int.
pub fn horizontal_paste(first: &Cell, second: &Cell) -> Result<Cell> {
    if first.right != second.left {
        return Err(Error::ShapeMismatch("shared tight leg differs".into()));
    }
    Ok(Cell {
        top: first.top.compose(&second.top)?,
        bottom: first.bottom.compose(&second.bottom)?,
        left: first.left.clone(),
        right: second.right.clone(),
    })
}

/// Pushout of a span `A <-f- Z -g-> B` with `f` partial: the quotient of
/// `A ⊎ B ⊎ {⊥}` by `f(z) ~ g(z)`, the class of `⊥` dropped.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub p: FinSet,
    pub in_a: FinPartialMap,
    pub in_b: FinPartialMap,
    /// Members of each class, as indices into `A ⊎ B`.
    pub classes: Vec<Vec<usize>>,
}

pub fn pushout_star(f: &FinPartialMap, g: &FinMap) -> Result<Pushout> {
    if f.dom().len() != g.dom().len() {
        return Err(Error::ShapeMismatch(format!(
            "span legs have domains of size {} and {}",
            f.dom().len(),
            g.dom().len()
        )));
    }
    let (na, nb) = (f.cod().len(), g.cod().len());
    let bot = na + nb;
    let mut uf = UnionFind::<usize>::new(bot + 1);
    for z in 0..f.dom().len() {
        uf.union(f.apply(z).unwrap_or(bot), na + g.apply(z));
    }
    let bot_root = uf.find(bot);
    let mut slot: Vec<Option<usize>> = vec![None; bot];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root: Vec<Option<usize>> = vec![None; bot + 1];
    for (i, s) in slot.iter_mut().enumerate() {
        let root = uf.find(i);
        if root == bot_root {
            continue;
        }
        let c = *class_of_root[root].get_or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(i);
        *s = Some(c);
    }
    let member_name = |i: usize| if i < na { f.cod().name(i) } else { g.cod().name(i - na) };
    let names = classes
        .iter()
        .map(|members| {
            let mut ns: Vec<&str> = members.iter().map(|&i| member_name(i)).collect();
            ns.sort_unstable();
            if ns.len() == 1 {
                ns[0].to_string()
            } else {
                format!("{{{}}}", ns.join(","))
            }
        })
        .collect();
    let p = FinSet::new(names);
    let in_a = FinPartialMap::new(f.cod().clone(), p.clone(), slot[..na].to_vec())?;
    let in_b = FinPartialMap::new(g.cod().clone(), p.clone(), slot[na..].to_vec())?;
    Ok(Pushout { p, in_a, in_b, classes })
}

impl Pushout {
    /// The map `P ⇀ T` induced by a cocone `ka : A ⇀ T`, `kb : B ⇀ T`.
    pub fn induced(&self, ka: &FinPartialMap, kb: &FinPartialMap) -> Result<FinPartialMap> {
        let na = self.in_a.dom().len();
        if ka.dom().len() != na || kb.dom().len() != self.in_b.dom().len() || ka.cod().len() != kb.cod().len() {
            return Err(Error::ShapeMismatch("cocone legs do not match the pushout".into()));
        }
        let value = |i: usize| if i < na { ka.apply(i) } else { kb.apply(i - na) };
        let at_bot = (0..na)
            .filter(|&i| self.in_a.apply(i).is_none())
            .chain((0..kb.dom().len()).filter(|&j| self.in_b.apply(j).is_none()).map(|j| na + j));
        for i in at_bot {
            if value(i).is_some() {
                return Err(Error::PreconditionViolated(format!("cocone is defined on a member of the ⊥ class ({i})")));
            }
        }
        let mut table = Vec::with_capacity(self.classes.len());
        for (c, members) in self.classes.iter().enumerate() {
            let v = value(members[0]);
            if members.iter().any(|&i| value(i) != v) {
                return Err(Error::PreconditionViolated(format!("cocone disagrees on class {}", self.p.name(c))));
            }
            table.push(v);
        }
        FinPartialMap::new(self.p.clone(), ka.cod().clone(), table)
    }
}

/// `h = r ; s` with `r` a restriction onto the defined part and `s` total.
#[derive(Debug, Clone)]
pub struct RsFactor {
    pub x: FinSet,
    pub r: FinPartialMap,
    pub s: FinMap,
    /// The inclusion `X ↪ P`, a section of `r`.
    pub section: FinMap,
}

pub fn factor_rs(h: &FinPartialMap) -> RsFactor {
    let defined: Vec<usize> = (0..h.dom().len()).filter(|&i| h.apply(i).is_some()).collect();
    let x = FinSet::new(defined.iter().map(|&i| h.dom().name(i).to_string()).collect());
    let mut r = vec![None; h.dom().len()];
    for (k, &i) in defined.iter().enumerate() {
        r[i] = Some(k);
    }
    let s = defined.iter().map(|&i| h.apply(i).expect("defined")).collect();
    RsFactor {
        r: FinPartialMap::new(h.dom().clone(), x.clone(), r).expect("indices in range"),
        s: FinMap::new(x.clone(), h.cod().clone(), s).expect("values in range"),
        section: FinMap::new(x.clone(), h.dom().clone(), defined).expect("indices in range"),
        x,
    }
}

/// A cell whose left leg is `I⁻ ; lower_left` and right leg `I⁺ ; lower_right`:
///
/// ```text
///   A₁ ───── top ─────⇸ B₁
///   │ upper_left        │ upper_right
///  (A₁⁻,A₂⁺)          (B₂⁻,B₁⁺)
///   │ lower_left        │ lower_right
///   C ──── bottom ────⇸ D
/// ```
#[derive(Debug, Clone)]
pub struct SegmentProblem {
    pub top: SetLoose,
    pub bottom: SetLoose,
    pub upper_left: TightMap,
    pub lower_left: TightMap,
    pub upper_right: TightMap,
    pub lower_right: TightMap,
}

impl SegmentProblem {
    /// The square with the legs composed.
    pub fn cell(&self) -> Result<Cell> {
        Ok(Cell {
            top: self.top.clone(),
            bottom: self.bottom.clone(),
            left: self.upper_left.compose(&self.lower_left)?,
            right: self.upper_right.compose(&self.lower_right)?,
        })
    }
}

/// The factorization of a cell through a middle loose map `A₂ ⇸ B₂`.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub upper: Cell,
    pub lower: Cell,
    pub middle: SetLoose,
    pub a2_minus: FinSet,
    pub b2_plus: FinSet,
    pushout: Pushout,
    factor: RsFactor,
    /// Position of each element of `X` inside `B₂⁺ + A₂⁻`.
    x_to_sum: Vec<usize>,
}

fn is_class_member(leg: &TightMap, minus: bool) -> bool {
    if minus {
        leg.in_i_minus()
    } else {
        leg.in_i_plus()
    }
}

pub fn segment_cell(prob: &SegmentProblem) -> Result<Segmentation> {
    if !is_class_member(&prob.upper_left, true) {
        return Err(Error::PreconditionViolated("upper left leg is not in I⁻".into()));
    }
    if !is_class_member(&prob.upper_right, false) {
        return Err(Error::PreconditionViolated("upper right leg is not in I⁺".into()));
    }
    if !check_cell(&prob.cell()?)? {
        return Err(Error::PreconditionViolated("the square does not commute".into()));
    }
    let (top, bottom) = (&prob.top, &prob.bottom);
    let a2_plus = prob.upper_left.plus.cod().clone();
    let b2_minus = prob.upper_right.minus.cod().clone();
    let (d_plus, b1_plus) = (bottom.cod().plus.len(), top.cod().plus.len());

    // B₂⁻ + A₂⁺ <- B₁⁻ + A₁⁺ -f-> B₁⁺ + A₁⁻
    let leg = prob.upper_right.minus.coproduct(&prob.upper_left.plus);
    let pushout = pushout_star(top.map(), &leg)?;
    let ka = prob.lower_right.plus.coproduct(&prob.lower_left.minus).to_partial();
    let kb = prob.lower_right.minus.coproduct(&prob.lower_left.plus).to_partial().compose(bottom.map())?;
    let k = pushout.induced(&ka, &kb)?;
    let factor = factor_rs(&k);

    // Pull back along D⁺ + C⁻: X splits into B₂⁺ and A₂⁻.
    let (over_d, over_c): (Vec<usize>, Vec<usize>) = (0..factor.x.len()).partition(|&x| factor.s.apply(x) < d_plus);
    let names = |xs: &[usize]| FinSet::new(xs.iter().map(|&x| factor.x.name(x).to_string()).collect());
    let (b2_plus, a2_minus) = (names(&over_d), names(&over_c));
    let mut x_to_sum = vec![0; factor.x.len()];
    for (i, &x) in over_d.iter().chain(&over_c).enumerate() {
        x_to_sum[x] = i;
    }
    let sum = b2_plus.sum(&a2_minus);
    let reorder = FinMap::new(factor.x.clone(), sum, x_to_sum.clone())?.to_partial();

    let a2 = SetBox::new(a2_minus.clone(), a2_plus);
    let b2 = SetBox::new(b2_minus, b2_plus.clone());
    let middle_map = pushout.in_b.compose(&factor.r)?.compose(&reorder)?;
    let middle = SetLoose::new(a2.clone(), b2.clone(), middle_map)?;

    // Where the codomain side of the top row lands: B₁⁺ + A₁⁻ -> B₂⁺ + A₂⁻.
    let landed = pushout.in_a.compose(&factor.r)?.compose(&reorder)?;
    let land = |i: usize, in_b: bool| -> Result<usize> {
        let missing = || Error::PreconditionViolated(format!("boundary element {i} is lost by the factorization"));
        let at = landed.apply(i).ok_or_else(missing)?;
        match (in_b, at < b2.plus.len()) {
            (true, true) => Ok(at),
            (false, false) => Ok(at - b2.plus.len()),
            _ => Err(missing()),
        }
    };
    let a_minus = (0..top.dom().minus.len()).map(|w| land(b1_plus + w, false)).collect::<Result<_>>()?;
    let b_plus = (0..b1_plus).map(|w| land(w, true)).collect::<Result<_>>()?;
    let a_minus = FinMap::new(top.dom().minus.clone(), a2_minus.clone(), a_minus)?;
    let b_plus = FinMap::new(top.cod().plus.clone(), b2_plus.clone(), b_plus)?;

    let s_c = over_c.iter().map(|&x| factor.s.apply(x) - d_plus).collect();
    let s_d = over_d.iter().map(|&x| factor.s.apply(x)).collect();
    let s_c = FinMap::new(a2_minus.clone(), bottom.dom().minus.clone(), s_c)?;
    let s_d = FinMap::new(b2_plus.clone(), bottom.cod().plus.clone(), s_d)?;

    let upper = Cell {
        top: top.clone(),
        bottom: middle.clone(),
        left: TightMap::new(a_minus, prob.upper_left.plus.clone()),
        right: TightMap::new(prob.upper_right.minus.clone(), b_plus),
    };
    let lower = Cell {
        top: middle.clone(),
        bottom: bottom.clone(),
        left: TightMap::new(s_c, prob.lower_left.plus.clone()),
        right: TightMap::new(prob.lower_right.minus.clone(), s_d),
    };
    Ok(Segmentation { upper, lower, middle, a2_minus, b2_plus, pushout, factor, x_to_sum })
}

/// Another factorization of the same cell through `f′ : (C′⁻, A₂⁺) ⇸ (B₂⁻, D′⁺)`.
#[derive(Debug, Clone)]
pub struct AltFactorization {
    pub middle: SetLoose,
    /// `A₁⁻ -> C′⁻`
    pub upper_left_minus: FinMap,
    /// `B₁⁺ -> D′⁺`
    pub upper_right_plus: FinMap,
    /// `C′⁻ -> C⁻`
    pub lower_left_minus: FinMap,
    /// `D′⁺ -> D⁺`
    pub lower_right_plus: FinMap,
}

impl AltFactorization {
    pub fn from_segmentation(seg: &Segmentation) -> Self {
        AltFactorization {
            middle: seg.middle.clone(),
            upper_left_minus: seg.upper.left.minus.clone(),
            upper_right_plus: seg.upper.right.plus.clone(),
            lower_left_minus: seg.lower.left.minus.clone(),
            lower_right_plus: seg.lower.right.plus.clone(),
        }
    }

    pub fn cells(&self, prob: &SegmentProblem) -> (Cell, Cell) {
        let upper = Cell {
            top: prob.top.clone(),
            bottom: self.middle.clone(),
            left: TightMap::new(self.upper_left_minus.clone(), prob.upper_left.plus.clone()),
            right: TightMap::new(prob.upper_right.minus.clone(), self.upper_right_plus.clone()),
        };
        let lower = Cell {
            top: self.middle.clone(),
            bottom: prob.bottom.clone(),
            left: TightMap::new(self.lower_left_minus.clone(), prob.lower_left.plus.clone()),
            right: TightMap::new(prob.lower_right.minus.clone(), self.lower_right_plus.clone()),
        };
        (upper, lower)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Universality {
    /// The comparison cell from the canonical middle row to the alternative one.
    Psi { left: TightMap, right: TightMap },
    CounterExample(String),
}

/// Build the comparison `ψ` from `seg` to `alt` and check both triangles.
pub fn universality_check(prob: &SegmentProblem, seg: &Segmentation, alt: &AltFactorization) -> Result<Universality> {
    let (alt_upper, alt_lower) = alt.cells(prob);
    if !check_cell(&alt_upper)? || !check_cell(&alt_lower)? {
        return Err(Error::PreconditionViolated("alternative factorization does not commute".into()));
    }
    let fail = |why: String| Ok(Universality::CounterExample(why));
    let ka = alt.upper_right_plus.coproduct(&alt.upper_left_minus).to_partial();
    let univ = match seg.pushout.induced(&ka, alt.middle.map()) {
        Ok(u) => u,
        Err(e) => return fail(e.to_string()),
    };
    let psi_x = seg.factor.section.to_partial().compose(&univ)?;
    let d_alt = alt.middle.cod().plus.len();
    let nb = seg.b2_plus.len();
    let (mut psi_b, mut psi_a) = (vec![0; nb], vec![0; seg.a2_minus.len()]);
    for x in 0..seg.factor.x.len() {
        let Some(v) = psi_x.apply(x) else {
            return fail(format!("ψ undefined at {}", seg.factor.x.name(x)));
        };
        let at = seg.x_to_sum[x];
        match (at < nb, v < d_alt) {
            (true, true) => psi_b[at] = v,
            (false, false) => psi_a[at - nb] = v - d_alt,
            _ => return fail(format!("ψ sends {} to the wrong side", seg.factor.x.name(x))),
        }
    }
    let left = TightMap::new(
        FinMap::new(seg.a2_minus.clone(), alt.middle.dom().minus.clone(), psi_a)?,
        FinMap::identity(&seg.middle.dom().plus),
    );
    let right = TightMap::new(
        FinMap::identity(&seg.middle.cod().minus),
        FinMap::new(seg.b2_plus.clone(), alt.middle.cod().plus.clone(), psi_b)?,
    );
    let psi = Cell { top: seg.middle.clone(), bottom: alt.middle.clone(), left: left.clone(), right: right.clone() };
    if !check_cell(&psi)? {
        return fail("ψ is not a cell".into());
    }
    if seg.upper.left.compose(&left)? != alt_upper.left || seg.upper.right.compose(&right)? != alt_upper.right {
        return fail("upper triangle fails".into());
    }
    if left.compose(&alt_lower.left)? != seg.lower.left || right.compose(&alt_lower.right)? != seg.lower.right {
        return fail("lower triangle fails".into());
    }
    Ok(Universality::Psi { left, right })
}

/// A control region: an element on one side of a box, or of the outer box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub locus: Locus,
    pub element: usize,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.locus, self.element + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajOutcome {
    Completed,
    Undefined,
    Diverged,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub regions: Vec<Region>,
    pub outcome: TrajOutcome,
    pub steps: usize,
}

impl Trajectory {
    /// Replace set elements by the summands they belong to, for a program
    /// evaluated at `dom`.
    pub fn visits(&self, program: &ParaMorphism, dom: &FiniteDomain) -> Result<Vec<Visit>> {
        let scaled = program.scaled_inner();
        let outer = program.outer();
        self.regions
            .iter()
            .map(|r| {
                let side = match r.locus {
                    Locus::OuterIn => &outer.minus,
                    Locus::OuterOut => &outer.plus,
                    Locus::BoxIn(k) => &scaled[k].minus,
                    Locus::BoxOut(k) => &scaled[k].plus,
                };
                Ok(Visit { locus: r.locus, position: ElemIndex::new(side, dom)?.position_of(r.element) })
            })
            .collect()
    }
}

fn renamed(f: &FinMap, dom: &FinSet, cod: &FinSet) -> FinMap {
    FinMap::new(dom.clone(), cod.clone(), f.table().to_vec()).expect("renaming keeps sizes")
}

fn renamed_loose(f: &SetLoose, dom: &SetBox, cod: &SetBox) -> SetLoose {
    let map = FinPartialMap::new(cod.minus.sum(&dom.plus), cod.plus.sum(&dom.minus), f.map().table().to_vec())
        .expect("renaming keeps sizes");
    SetLoose::new(dom.clone(), cod.clone(), map).expect("renaming keeps sizes")
}

fn names_via(leg: &FinMap) -> FinSet {
    FinSet::new(leg.table().iter().map(|&t| leg.cod().name(t).to_string()).collect())
}

fn block_of(sizes: impl Iterator<Item = usize>, mut i: usize) -> (usize, usize) {
    for (k, n) in sizes.enumerate() {
        if i < n {
            return (k, i);
        }
        i -= n;
    }
    unreachable!("element lies in some block")
}

fn image(f: &FinMap) -> Vec<bool> {
    let mut hit = vec![false; f.cod().len()];
    for &t in f.table() {
        hit[t] = true;
    }
    hit
}

/// The state of the trajectory fold. Two squares are kept: the outer body
/// on the right and the tensored fillers on the left. They share a column
/// object mapping into the inner boxes, which grows by one element per step.
#[derive(Debug, Clone)]
pub struct SegState<'a> {
    outer: &'a WiringDiagram<SetStar>,
    filled: SetLoose,
    col: SetBox,
    col_leg: TightMap,
    right_top: SetLoose,
    right_leg: TightMap,
    left_top: SetLoose,
    /// `R_A⁺ -> col⁺`, added by the last left step.
    pending_plus: FinMap,
    /// `L_E⁻ -> col⁻`, added by the last right step.
    pending_minus: FinMap,
    start: usize,
    right_turn: bool,
    started: bool,
    pub emitted: Vec<Region>,
}

enum Step {
    Emitted(Region),
    Finished(TrajOutcome),
}

impl<'a> SegState<'a> {
    pub fn new(outer: &'a WiringDiagram<SetStar>, fillers: &[SetLoose], start: usize) -> Result<Self> {
        let y = outer.outer();
        if start >= y.minus.len() {
            return Err(Error::IllFormedStart(format!("start {start} outside an outer entrance of size {}", y.minus.len())));
        }
        if fillers.len() != outer.inner().len() {
            return Err(Error::BoxMismatch(format!("{} fillers for {} boxes", fillers.len(), outer.inner().len())));
        }
        for (k, (f, b)) in fillers.iter().zip(outer.inner()).enumerate() {
            if f.dom() != &SetBox::unit() || f.cod() != b {
                return Err(Error::BoxMismatch(format!("filler {k} is {} ⇸ {}, box is {b}", f.dom(), f.cod())));
            }
        }
        let unit = SetBox::unit();
        let x = outer.body().dom().clone();
        let empty = FinSet::empty();
        Ok(SegState {
            outer,
            filled: SetLoose::tensor_all(fillers),
            col: unit.clone(),
            col_leg: TightMap::new(FinMap::from_empty(&x.minus), FinMap::from_empty(&x.plus)),
            right_top: SetLoose::identity(&unit),
            right_leg: TightMap::new(FinMap::from_empty(&y.minus), FinMap::from_empty(&y.plus)),
            left_top: SetLoose::identity(&unit),
            pending_plus: FinMap::identity(&empty),
            pending_minus: FinMap::identity(&empty),
            start,
            right_turn: true,
            started: false,
            emitted: vec![Region { locus: Locus::OuterIn, element: start }],
        })
    }

    fn step(&mut self) -> Result<Step> {
        let turn = self.right_turn;
        self.right_turn = !turn;
        if turn {
            self.step_right()
        } else {
            self.step_left()
        }
    }

    fn step_right(&mut self) -> Result<Step> {
        let y = self.outer.outer();
        let x = self.outer.body().dom();
        let (upper_right, lower_right) = if self.started {
            (TightMap::identity(self.right_top.cod()), self.right_leg.clone())
        } else {
            let point = FinSet::new(vec![y.minus.name(self.start).to_string()]);
            (
                TightMap::new(FinMap::from_empty(&point), FinMap::identity(&FinSet::empty())),
                TightMap::new(FinMap::new(point, y.minus.clone(), vec![self.start])?, FinMap::from_empty(&y.plus)),
            )
        };
        self.started = true;
        let prob = SegmentProblem {
            top: self.right_top.clone(),
            bottom: self.outer.body().clone(),
            upper_left: TightMap::new(FinMap::identity(&self.col.minus), self.pending_plus.clone()),
            lower_left: self.col_leg.clone(),
            upper_right,
            lower_right,
        };
        let seg = segment_cell(&prob)?;

        let a2m = names_via(&seg.lower.left.minus);
        let b2p = names_via(&seg.lower.right.plus);
        let col = SetBox::new(a2m.clone(), self.col.plus.clone());
        let b2 = SetBox::new(seg.middle.cod().minus.clone(), b2p.clone());
        self.right_top = renamed_loose(&seg.middle, &col, &b2);
        self.col_leg = TightMap::new(renamed(&seg.lower.left.minus, &a2m, &x.minus), seg.lower.left.plus.clone());
        self.right_leg = TightMap::new(seg.lower.right.minus.clone(), renamed(&seg.lower.right.plus, &b2p, &y.plus));
        self.pending_minus = renamed(&seg.upper.left.minus, &self.col.minus, &a2m);
        self.col = col;

        let old_out = image(&seg.upper.right.plus);
        if let Some(e) = (0..b2p.len()).find(|&e| !old_out[e]) {
            let element = self.right_leg.plus.apply(e);
            return Ok(Step::Emitted(Region { locus: Locus::OuterOut, element }));
        }
        let old_in = image(&seg.upper.left.minus);
        let Some(e) = (0..a2m.len()).find(|&e| !old_in[e]) else {
            return Ok(Step::Finished(TrajOutcome::Undefined));
        };
        let target = self.col_leg.minus.apply(e);
        let (k, element) = block_of(self.outer.inner().iter().map(|b| b.minus.len()), target);
        let region = Region { locus: Locus::BoxIn(k), element };
        let revisit = (0..a2m.len()).any(|o| old_in[o] && self.col_leg.minus.apply(o) == target);
        if revisit {
            self.emitted.push(region);
            return Ok(Step::Finished(TrajOutcome::Diverged));
        }
        Ok(Step::Emitted(region))
    }

    fn step_left(&mut self) -> Result<Step> {
        let x = self.outer.body().dom();
        let unit = SetBox::unit();
        let prob = SegmentProblem {
            top: self.left_top.clone(),
            bottom: self.filled.clone(),
            upper_left: TightMap::identity(&unit),
            lower_left: TightMap::identity(&unit),
            upper_right: TightMap::new(self.pending_minus.clone(), FinMap::identity(&self.col.plus)),
            lower_right: self.col_leg.clone(),
        };
        let seg = segment_cell(&prob)?;

        let e2p = names_via(&seg.lower.right.plus);
        let col = SetBox::new(self.col.minus.clone(), e2p.clone());
        self.left_top = renamed_loose(&seg.middle, &unit, &col);
        self.col_leg = TightMap::new(seg.lower.right.minus.clone(), renamed(&seg.lower.right.plus, &e2p, &x.plus));
        self.pending_plus = renamed(&seg.upper.right.plus, &self.col.plus, &e2p);
        self.col = col;

        let old = image(&seg.upper.right.plus);
        let Some(e) = (0..e2p.len()).find(|&e| !old[e]) else {
            return Ok(Step::Finished(TrajOutcome::Undefined));
        };
        let (k, element) = block_of(self.outer.inner().iter().map(|b| b.plus.len()), self.col_leg.plus.apply(e));
        Ok(Step::Emitted(Region { locus: Locus::BoxOut(k), element }))
    }
}

/// Follow control from `start ∈ Y⁻` by alternately segmenting the outer
/// square and the filler square, one region per step.
pub fn run_trajectory(
    outer: &WiringDiagram<SetStar>,
    fillers: &[SetLoose],
    start: usize,
    max_steps: usize,
) -> Result<Trajectory> {
    let mut state = SegState::new(outer, fillers, start)?;
    let mut steps = 0;
    let outcome = loop {
        if steps >= max_steps {
            break TrajOutcome::MaxSteps;
        }
        steps += 1;
        match state.step()? {
            Step::Emitted(region) => {
                state.emitted.push(region);
                if region.locus == Locus::OuterOut {
                    break TrajOutcome::Completed;
                }
            }
            Step::Finished(outcome) => break outcome,
        }
    };
    Ok(Trajectory { regions: state.emitted, outcome, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> FinSet {
        FinSet::from_names(names)
    }

    fn pmap(dom: &FinSet, cod: &FinSet, t: &[Option<usize>]) -> FinPartialMap {
        FinPartialMap::new(dom.clone(), cod.clone(), t.to_vec()).unwrap()
    }

    fn tmap(dom: &FinSet, cod: &FinSet, t: &[usize]) -> FinMap {
        FinMap::new(dom.clone(), cod.clone(), t.to_vec()).unwrap()
    }

    /// Closure of the relation generated by `f(z) ~ g(z)`, by repeated sweeps.
    fn closure_oracle(na: usize, nb: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let n = na + nb + 1;
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            rel[a][b] = true;
            rel[b][a] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        rel
    }

    #[test]
    fn pushout_of_empty_span_is_coproduct() {
        let (a, b) = (set(&["a0", "a1"]), set(&["b0"]));
        let z = FinSet::empty();
        let po = pushout_star(&pmap(&z, &a, &[]), &tmap(&z, &b, &[])).unwrap();
        assert_eq!(po.p.names(), &["a0", "a1", "b0"]);
        assert!(po.in_a.is_total() && po.in_b.is_total());
    }

    #[test]
    fn pushout_glues_to_basepoint() {
        let (a, b, z) = (set(&["a"]), set(&["b"]), set(&["z"]));
        let po = pushout_star(&pmap(&z, &a, &[None]), &tmap(&z, &b, &[0])).unwrap();
        assert_eq!(po.p.names(), &["a"]);
        assert_eq!(po.in_a.table(), &[Some(0)]);
        assert_eq!(po.in_b.table(), &[None]);
        let rel = closure_oracle(1, 1, &[(2, 1)]);
        assert!(rel[1][2] && !rel[0][2]);
    }

    #[test]
    fn pushout_along_iso_transports_f() {
        let (a, z) = (set(&["a0", "a1", "a2"]), set(&["z0", "z1"]));
        let b = set(&["b0", "b1"]);
        let f = pmap(&z, &a, &[Some(2), None]);
        let po = pushout_star(&f, &tmap(&z, &b, &[1, 0])).unwrap();
        // b1 ~ a2, b0 ~ ⊥
        assert_eq!(po.p.len(), 3);
        assert_eq!(po.in_b.table()[0], None);
        assert_eq!(po.in_b.table()[1], po.in_a.table()[2]);
        assert_eq!(po.p.name(2), "{a2,b1}");
    }

    #[test]
    fn pushout_classes_match_relation_closure() {
        let a = set(&["a0", "a1", "a2"]);
        let b = set(&["b0", "b1", "b2"]);
        let z = set(&["z0", "z1", "z2", "z3"]);
        let f = pmap(&z, &a, &[Some(0), Some(1), None, Some(1)]);
        let g = tmap(&z, &b, &[0, 0, 2, 1]);
        let po = pushout_star(&f, &g).unwrap();
        let pairs: Vec<_> = (0..4).map(|k| (f.apply(k).unwrap_or(6), 3 + g.apply(k))).collect();
        let rel = closure_oracle(3, 3, &pairs);
        let class = |i: usize| if i < 3 { po.in_a.apply(i) } else { po.in_b.apply(i - 3) };
        for i in 0..6 {
            assert_eq!(class(i).is_none(), rel[i][6]);
            for j in 0..6 {
                if !rel[i][6] && !rel[j][6] {
                    assert_eq!(class(i) == class(j), rel[i][j], "{i} {j}");
                }
            }
        }
    }

    #[test]
    fn rs_factorization() {
        let p = set(&["p0", "p1", "p2"]);
        let t = set(&["t0", "t1"]);
        let h = pmap(&p, &t, &[Some(1), None, Some(1)]);
        let rs = factor_rs(&h);
        assert_eq!(rs.x.len(), 2);
        assert_eq!(rs.r.compose(&rs.s.to_partial()).unwrap(), h);
        assert!(rs.section.to_partial().compose(&rs.r).unwrap() == FinPartialMap::identity(&rs.x));
        let total = factor_rs(&pmap(&p, &t, &[Some(0), Some(0), Some(1)]));
        assert!(total.r.is_total() && total.x.len() == 3);
        assert!(factor_rs(&FinPartialMap::bottom(&p, &t)).x.is_empty());
    }

    #[test]
    fn tight_factorizations() {
        let s = TightMap::new(tmap(&set(&["a"]), &set(&["c", "d"]), &[1]), tmap(&set(&["b", "e"]), &set(&["f"]), &[0, 0]));
        let (i, j) = s.factor_minus_plus();
        assert!(i.in_i_minus() && j.in_i_plus());
        assert_eq!(i.compose(&j).unwrap(), s);
        let (i, j) = s.factor_plus_minus();
        assert!(i.in_i_plus() && j.in_i_minus());
        assert_eq!(i.compose(&j).unwrap(), s);
    }

    fn identity_problem(f: &SetLoose) -> SegmentProblem {
        SegmentProblem {
            top: f.clone(),
            bottom: f.clone(),
            upper_left: TightMap::identity(f.dom()),
            lower_left: TightMap::identity(f.dom()),
            upper_right: TightMap::identity(f.cod()),
            lower_right: TightMap::identity(f.cod()),
        }
    }

    #[test]
    fn identity_square_is_a_cell() {
        let a = SetBox::new(set(&["a"]), set(&["b", "c"]));
        let b = SetBox::new(set(&["d", "e"]), set(&["f"]));
        let f = SetLoose::new(a, b, pmap(&set(&["d", "e", "b", "c"]), &set(&["f", "a"]), &[Some(0), None, Some(1), Some(0)])).unwrap();
        let c = identity_problem(&f).cell().unwrap();
        assert!(check_cell(&c).unwrap());
        let pasted = vertical_paste(&c, &c).unwrap();
        assert!(check_cell(&pasted).unwrap());
    }

    #[test]
    fn segmenting_a_total_identity_square() {
        let a = SetBox::new(set(&["a"]), set(&["b"]));
        let b = SetBox::new(set(&["c"]), set(&["d"]));
        let f = SetLoose::new(a, b, pmap(&set(&["c", "b"]), &set(&["d", "a"]), &[Some(1), Some(0)])).unwrap();
        let prob = identity_problem(&f);
        let seg = segment_cell(&prob).unwrap();
        assert_eq!(seg.middle.map(), f.map());
        assert!(check_cell(&seg.upper).unwrap() && check_cell(&seg.lower).unwrap());
        assert_eq!(seg.lower.left, TightMap::identity(f.dom()));
        assert_eq!(vertical_paste(&seg.upper, &seg.lower).unwrap(), prob.cell().unwrap());
        let psi = universality_check(&prob, &seg, &AltFactorization::from_segmentation(&seg)).unwrap();
        let Universality::Psi { left, right } = psi else { panic!("{psi:?}") };
        assert!(left.minus.is_identity() && right.plus.is_identity());
    }

    #[test]
    fn wrong_leg_classes_are_rejected() {
        let a = SetBox::new(set(&["a"]), FinSet::empty());
        let f = SetLoose::identity(&a);
        let mut prob = identity_problem(&f);
        let two = set(&["x", "y"]);
        prob.upper_left = TightMap::new(tmap(&set(&["a"]), &two, &[0]), FinMap::identity(&FinSet::empty()));
        assert!(matches!(segment_cell(&prob), Err(Error::PreconditionViolated(_))));
    }

    /// The diagram with boxes A = (1, 2), B = (2, 2) inside Y = (2, 2).
    fn figure_diagram(b_in1: usize, b_in2: usize) -> (WiringDiagram<SetStar>, Vec<SetLoose>) {
        let y = SetBox::new(set(&["in1", "in2"]), set(&["out1", "out2"]));
        let a = SetBox::new(set(&["A.in1"]), set(&["A.out1", "A.out2"]));
        let b = SetBox::new(set(&["B.in1", "B.in2"]), set(&["B.out1", "B.out2"]));
        let x = a.tensor(&b);
        // Y⁻ + X⁺ -> Y⁺ + X⁻
        let body = pmap(
            &y.minus.sum(&x.plus),
            &y.plus.sum(&x.minus),
            &[Some(3), Some(2), Some(4), Some(1), Some(0), Some(2)],
        );
        let outer = WiringDiagram::from_map(vec![a.clone(), b.clone()], y, body).unwrap();
        let fill = |bx: &SetBox, t: &[Option<usize>]| {
            SetLoose::new(SetBox::unit(), bx.clone(), pmap(&bx.minus, &bx.plus, t)).unwrap()
        };
        let fillers = vec![fill(&a, &[Some(0)]), fill(&b, &[Some(b_in1), Some(b_in2)])];
        (outer, fillers)
    }

    fn labelled(t: &Trajectory) -> Vec<String> {
        let name = |k: usize| ["A", "B"][k];
        t.regions
            .iter()
            .map(|r| match r.locus {
                Locus::OuterIn => format!("Outer.in{}", r.element + 1),
                Locus::OuterOut => format!("Outer.out{}", r.element + 1),
                Locus::BoxIn(k) => format!("{}.in{}", name(k), r.element + 1),
                Locus::BoxOut(k) => format!("{}.out{}", name(k), r.element + 1),
            })
            .collect()
    }

    #[test]
    fn figure_trajectory() {
        let (outer, fillers) = figure_diagram(1, 0);
        let t = run_trajectory(&outer, &fillers, 1, 100).unwrap();
        assert_eq!(labelled(&t), ["Outer.in2", "A.in1", "A.out1", "B.in2", "B.out1", "Outer.out1"]);
        assert_eq!(t.outcome, TrajOutcome::Completed);
    }

    #[test]
    fn first_step_marks_the_entrance_of_a() {
        let (outer, _) = figure_diagram(1, 0);
        let y = outer.outer().clone();
        let x = outer.body().dom().clone();
        let unit = SetBox::unit();
        let point = set(&["in2"]);
        let prob = SegmentProblem {
            top: SetLoose::identity(&unit),
            bottom: outer.body().clone(),
            upper_left: TightMap::identity(&unit),
            lower_left: TightMap::new(FinMap::from_empty(&x.minus), FinMap::from_empty(&x.plus)),
            upper_right: TightMap::new(FinMap::from_empty(&point), FinMap::identity(&FinSet::empty())),
            lower_right: TightMap::new(tmap(&point, &y.minus, &[1]), FinMap::from_empty(&y.plus)),
        };
        let seg = segment_cell(&prob).unwrap();
        assert_eq!((seg.a2_minus.len(), seg.b2_plus.len()), (1, 0));
        assert_eq!(seg.lower.left.minus.apply(0), 0);
        assert_eq!(seg.middle.map().table(), &[Some(0)]);
    }

    #[test]
    fn undefined_start_stops_immediately() {
        let (outer, fillers) = figure_diagram(1, 0);
        let x = outer.body().dom().clone();
        let y = outer.outer().clone();
        let mut table = outer.body().map().table().to_vec();
        table[0] = None;
        let body = pmap(&y.minus.sum(&x.plus), &y.plus.sum(&x.minus), &table);
        let outer = WiringDiagram::from_map(outer.inner().to_vec(), y, body).unwrap();
        let t = run_trajectory(&outer, &fillers, 0, 100).unwrap();
        assert_eq!(labelled(&t), ["Outer.in1"]);
        assert_eq!(t.outcome, TrajOutcome::Undefined);
    }

    #[test]
    fn back_tube_loops_forever() {
        let (outer, fillers) = figure_diagram(1, 1);
        let t = run_trajectory(&outer, &fillers, 1, 100).unwrap();
        assert_eq!(labelled(&t), ["Outer.in2", "A.in1", "A.out1", "B.in2", "B.out2", "A.in1"]);
        assert_eq!(t.outcome, TrajOutcome::Diverged);
        let short = run_trajectory(&outer, &fillers, 1, 3).unwrap();
        assert_eq!((short.outcome, short.regions.len()), (TrajOutcome::MaxSteps, 4));
    }

    #[test]
    fn bad_start() {
        let (outer, fillers) = figure_diagram(1, 0);
        assert!(matches!(run_trajectory(&outer, &fillers, 2, 10), Err(Error::IllFormedStart(_))));
    }
}
