//! Finite polynomial functors and pointed (Kleisli) maps between them.
//!
//! A [`Poly`] is an ordered list of summands (positions); each summand is an
//! ordered list of labelled directions. A [`KleisliMap`] `p -> q` sends every
//! summand of `p` either to `Bot` or to a summand of `q`, together with a
//! backwards direction function stored as an index array: entry `k` of the
//! pull names the direction of the source summand that feeds direction `k`
//! of the target summand.
//!
//! Summand order is canonical. Coproducts are strictly associative: the
//! summand `j` of `q` sits at index `|p| + j` in `p + q`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wire type tag. Untyped diagrams use the single label `y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::Validation {
                path: "label".into(),
                message: "labels must be nonempty".into(),
            });
        }
        Ok(Label(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for Label {
    fn default() -> Self {
        Label("y".to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    pub name: String,
    pub label: Label,
}

impl Direction {
    pub fn new(name: impl Into<String>, label: Label) -> Self {
        Direction { name: name.into(), label }
    }

    pub fn untyped(name: impl Into<String>) -> Self {
        Direction::new(name, Label::default())
    }
}

/// One position of a polynomial: the data slots available there.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Summand {
    pub dirs: Vec<Direction>,
}

impl Summand {
    pub fn new(dirs: Vec<Direction>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &dirs {
            if !seen.insert(d.name.as_str()) {
                return Err(Error::Validation {
                    path: format!("dir `{}`", d.name),
                    message: "direction names must be unique within a summand".into(),
                });
            }
        }
        Ok(Summand { dirs })
    }

    /// `y^n` with directions `d0..d{n-1}`.
    pub fn arity(n: usize) -> Self {
        Summand {
            dirs: (0..n).map(|k| Direction::untyped(format!("d{k}"))).collect(),
        }
    }

    /// Untyped summand with the given direction names.
    pub fn named(names: &[&str]) -> Result<Self> {
        Summand::new(names.iter().map(|n| Direction::untyped(*n)).collect())
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn position_of(&self, name: &str) -> Option<usize> {
        self.dirs.iter().position(|d| d.name == name)
    }

    fn same_shape(&self, other: &Summand) -> bool {
        self.dirs.len() == other.dirs.len()
            && self.dirs.iter().zip(&other.dirs).all(|(a, b)| a.label == b.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    summands: Vec<Summand>,
}

impl Poly {
    pub fn new(summands: Vec<Summand>) -> Self {
        Poly { summands }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::new(vec![Summand::default()])
    }

    /// `y^n`.
    pub fn monomial(n: usize) -> Self {
        Poly::new(vec![Summand::arity(n)])
    }

    /// `y^{a_0} + y^{a_1} + ...`
    pub fn from_arities(arities: &[usize]) -> Self {
        Poly::new(arities.iter().map(|&n| Summand::arity(n)).collect())
    }

    /// The constant polynomial `n` (n summands, no directions).
    pub fn constant(n: usize) -> Self {
        Poly::from_arities(&vec![0; n])
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn summand(&self, i: usize) -> &Summand {
        &self.summands[i]
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Poly {
        Poly { summands: self.summands[range].to_vec() }
    }

    pub fn arities(&self) -> Vec<usize> {
        self.summands.iter().map(Summand::len).collect()
    }

    /// Equality up to direction names: same summand count, arities and labels.
    pub fn same_shape(&self, other: &Poly) -> bool {
        self.summands.len() == other.summands.len()
            && self.summands.iter().zip(&other.summands).all(|(a, b)| a.same_shape(b))
    }

    pub fn sum(&self, other: &Poly) -> Poly {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Poly { summands }
    }

    pub fn sum_all<'a>(parts: impl IntoIterator<Item = &'a Poly>) -> Poly {
        let mut out = Poly::zero();
        for p in parts {
            out.summands.extend(p.summands.iter().cloned());
        }
        out
    }

    /// `m × p`: summand `(i, j)` sits at index `i * |p| + j` and carries the
    /// directions of `m_i` followed by those of `p_j`. The `m` directions are
    /// prefixed with `m.` (repeatedly, if needed) so names stay unique.
    pub fn product(m: &Poly, p: &Poly) -> Poly {
        let mut summands = Vec::with_capacity(m.len() * p.len());
        for ms in &m.summands {
            for ps in &p.summands {
                let taken: HashSet<&str> = ps.dirs.iter().map(|d| d.name.as_str()).collect();
                let mut dirs = Vec::with_capacity(ms.len() + ps.len());
                for d in &ms.dirs {
                    let mut name = format!("m.{}", d.name);
                    while taken.contains(name.as_str()) {
                        name = format!("m.{name}");
                    }
                    dirs.push(Direction::new(name, d.label.clone()));
                }
                dirs.extend(ps.dirs.iter().cloned());
                summands.push(Summand { dirs });
            }
        }
        Poly { summands }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return f.write_str("0");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match s.len() {
                0 => f.write_str("1")?,
                1 => f.write_str("y")?,
                n => write!(f, "y^{n}")?,
            }
        }
        Ok(())
    }
}

/// Where one summand of the domain goes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Route {
    Bot,
    To { target: usize, pull: Vec<usize> },
}

impl Route {
    pub fn to(target: usize, pull: Vec<usize>) -> Self {
        Route::To { target, pull }
    }

    pub fn target(&self) -> Option<usize> {
        match self {
            Route::Bot => None,
            Route::To { target, .. } => Some(*target),
        }
    }

    fn shifted(&self, dst: usize) -> Route {
        match self {
            Route::Bot => Route::Bot,
            Route::To { target, pull } => Route::To { target: target + dst, pull: pull.clone() },
        }
    }
}

/// A map `dom -> cod + 1` of polynomials.
#[derive(Debug, Clone)]
pub struct KleisliMap {
    dom: Poly,
    cod: Poly,
    routes: Vec<Route>,
}

impl PartialEq for KleisliMap {
    fn eq(&self, other: &Self) -> bool {
        self.routes == other.routes
            && self.dom.same_shape(&other.dom)
            && self.cod.same_shape(&other.cod)
    }
}

impl Eq for KleisliMap {}

impl KleisliMap {
    pub fn new(dom: Poly, cod: Poly, routes: Vec<Route>) -> Result<Self> {
        if routes.len() != dom.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} routes for a domain with {} summands",
                routes.len(),
                dom.len()
            )));
        }
        for (i, r) in routes.iter().enumerate() {
            let Route::To { target, pull } = r else { continue };
            let bad = |reason: String| Error::InvalidRoute { summand: i, reason };
            if *target >= cod.len() {
                return Err(bad(format!("target {target} >= {}", cod.len())));
            }
            let src = dom.summand(i);
            let dst = cod.summand(*target);
            if pull.len() != dst.len() {
                return Err(bad(format!(
                    "pull has {} entries, target summand has {} directions",
                    pull.len(),
                    dst.len()
                )));
            }
            for (k, &d) in pull.iter().enumerate() {
                if d >= src.len() {
                    return Err(bad(format!("pull[{k}] = {d} exceeds source arity {}", src.len())));
                }
                if src.dirs[d].label != dst.dirs[k].label {
                    return Err(bad(format!(
                        "label mismatch: target dir `{}`:{} pulls from `{}`:{}",
                        dst.dirs[k].name, dst.dirs[k].label, src.dirs[d].name, src.dirs[d].label
                    )));
                }
            }
        }
        Ok(KleisliMap { dom, cod, routes })
    }

    pub fn dom(&self) -> &Poly {
        &self.dom
    }

    pub fn cod(&self) -> &Poly {
        &self.cod
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn route(&self, i: usize) -> &Route {
        &self.routes[i]
    }

    /// Same routing, re-typed at shape-equal domain and codomain (e.g. to
    /// swap in different direction names).
    pub fn retype(&self, dom: Poly, cod: Poly) -> Result<Self> {
        if !dom.same_shape(&self.dom) || !cod.same_shape(&self.cod) {
            return Err(Error::ShapeMismatch("retype needs shape-equal polynomials".into()));
        }
        Ok(KleisliMap { dom, cod, routes: self.routes.clone() })
    }

    pub fn identity(p: &Poly) -> Self {
        let routes = p
            .summands()
            .iter()
            .enumerate()
            .map(|(i, s)| Route::to(i, (0..s.len()).collect()))
            .collect();
        KleisliMap { dom: p.clone(), cod: p.clone(), routes }
    }

    /// The map sending everything to `Bot`.
    pub fn bottom(dom: &Poly, cod: &Poly) -> Self {
        KleisliMap { dom: dom.clone(), cod: cod.clone(), routes: vec![Route::Bot; dom.len()] }
    }

    /// `self ; g`.
    pub fn compose(&self, g: &KleisliMap) -> Result<KleisliMap> {
        if !self.cod.same_shape(&g.dom) {
            return Err(Error::CodMismatch(format!("cod {} vs dom {}", self.cod, g.dom)));
        }
        let routes = self
            .routes
            .iter()
            .map(|r| match r {
                Route::Bot => Route::Bot,
                Route::To { target, pull: pf } => match &g.routes[*target] {
                    Route::Bot => Route::Bot,
                    Route::To { target: t2, pull: pg } => {
                        Route::to(*t2, pg.iter().map(|&d| pf[d]).collect())
                    }
                },
            })
            .collect();
        Ok(KleisliMap { dom: self.dom.clone(), cod: g.cod.clone(), routes })
    }

    /// `f + g : p + p' -> q + q'`.
    pub fn coproduct(&self, g: &KleisliMap) -> KleisliMap {
        let shift = self.cod.len();
        let mut routes = self.routes.clone();
        routes.extend(g.routes.iter().map(|r| r.shifted(shift)));
        KleisliMap { dom: self.dom.sum(&g.dom), cod: self.cod.sum(&g.cod), routes }
    }

    /// `[f, g] : p + p' -> q` for `f : p -> q`, `g : p' -> q`.
    pub fn copair(&self, g: &KleisliMap) -> Result<KleisliMap> {
        if !self.cod.same_shape(&g.cod) {
            return Err(Error::CodMismatch(format!("copair codomains {} vs {}", self.cod, g.cod)));
        }
        let mut routes = self.routes.clone();
        routes.extend(g.routes.iter().cloned());
        Ok(KleisliMap { dom: self.dom.sum(&g.dom), cod: self.cod.clone(), routes })
    }

    /// Braiding `p + q -> q + p`.
    pub fn sym(p: &Poly, q: &Poly) -> KleisliMap {
        KleisliMap::permute_blocks(&[p.clone(), q.clone()], &[1, 0])
    }

    /// The reordering iso `b_0 + ... + b_k -> b_{order[0]} + ... + b_{order[k]}`
    /// with identity pulls.
    pub fn permute_blocks(blocks: &[Poly], order: &[usize]) -> KleisliMap {
        assert_eq!(blocks.len(), order.len(), "order must be a permutation of the blocks");
        let mut cod_offset = vec![0; blocks.len()];
        let mut acc = 0;
        for &b in order {
            cod_offset[b] = acc;
            acc += blocks[b].len();
        }
        let mut routes = Vec::new();
        for (b, block) in blocks.iter().enumerate() {
            for (j, s) in block.summands().iter().enumerate() {
                routes.push(Route::to(cod_offset[b] + j, (0..s.len()).collect()));
            }
        }
        let dom = Poly::sum_all(blocks);
        let cod = Poly::sum_all(order.iter().map(|&b| &blocks[b]));
        KleisliMap { dom, cod, routes }
    }

    /// Left injection `p -> p + q`.
    pub fn inl(p: &Poly, q: &Poly) -> KleisliMap {
        let mut m = KleisliMap::identity(p);
        m.cod = p.sum(q);
        m
    }

    /// Right injection `q -> p + q`.
    pub fn inr(p: &Poly, q: &Poly) -> KleisliMap {
        let id = KleisliMap::identity(q);
        let routes = id.routes.iter().map(|r| r.shifted(p.len())).collect();
        KleisliMap { dom: q.clone(), cod: p.sum(q), routes }
    }

    /// The unique map out of `0`.
    pub fn from_zero(q: &Poly) -> KleisliMap {
        KleisliMap { dom: Poly::zero(), cod: q.clone(), routes: Vec::new() }
    }

    /// Fold `p + p -> p`.
    pub fn codiagonal(p: &Poly) -> KleisliMap {
        let id = KleisliMap::identity(p);
        id.copair(&id).expect("identical codomains")
    }

    /// `m × f : m × p -> m × q`, threading the `m` directions untouched.
    pub fn scale(m: &Poly, f: &KleisliMap) -> KleisliMap {
        let dom = Poly::product(m, &f.dom);
        let cod = Poly::product(m, &f.cod);
        let mut routes = Vec::with_capacity(dom.len());
        for (i, ms) in m.summands().iter().enumerate() {
            let k = ms.len();
            for r in &f.routes {
                routes.push(match r {
                    Route::Bot => Route::Bot,
                    Route::To { target, pull } => Route::to(
                        i * f.cod.len() + target,
                        (0..k).chain(pull.iter().map(|&d| d + k)).collect(),
                    ),
                });
            }
        }
        KleisliMap { dom, cod, routes }
    }

    /// Distributor `m × (b_0 + ... + b_k) -> m × b_0 + ... + m × b_k`.
    pub fn distribute(m: &Poly, blocks: &[Poly]) -> KleisliMap {
        let total: usize = blocks.iter().map(Poly::len).sum();
        let dom = Poly::product(m, &Poly::sum_all(blocks));
        let parts: Vec<Poly> = blocks.iter().map(|b| Poly::product(m, b)).collect();
        let cod = Poly::sum_all(&parts);
        let mut routes = vec![Route::Bot; dom.len()];
        for i in 0..m.len() {
            let mut dom_off = i * total;
            let mut cod_block = 0;
            for b in blocks {
                for jj in 0..b.len() {
                    let arity = dom.summand(dom_off + jj).len();
                    routes[dom_off + jj] =
                        Route::to(cod_block + i * b.len() + jj, (0..arity).collect());
                }
                dom_off += b.len();
                cod_block += m.len() * b.len();
            }
        }
        KleisliMap { dom, cod, routes }
    }

    /// Inverse of an iso whose routes are bijective with identity-like pulls.
    pub fn inverse(&self) -> Result<KleisliMap> {
        let not_iso = || Error::PreconditionViolated("map is not an isomorphism".into());
        if self.dom.len() != self.cod.len() {
            return Err(not_iso());
        }
        let mut routes = vec![None; self.cod.len()];
        for (i, r) in self.routes.iter().enumerate() {
            let Route::To { target, pull } = r else { return Err(not_iso()) };
            if routes[*target].is_some() || pull.len() != self.dom.summand(i).len() {
                return Err(not_iso());
            }
            let mut inv = vec![usize::MAX; pull.len()];
            for (k, &d) in pull.iter().enumerate() {
                if inv[d] != usize::MAX {
                    return Err(not_iso());
                }
                inv[d] = k;
            }
            routes[*target] = Some(Route::to(i, inv));
        }
        let routes = routes.into_iter().map(|r| r.expect("bijective")).collect();
        KleisliMap::new(self.cod.clone(), self.dom.clone(), routes)
    }
}

impl fmt::Display for KleisliMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: [", self.dom, self.cod)?;
        for (i, r) in self.routes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match r {
                Route::Bot => write!(f, "{i}->⊥")?,
                Route::To { target, pull } => write!(f, "{i}->{target}{pull:?}")?,
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_named(name: &str) -> Poly {
        Poly::new(vec![Summand::named(&[name]).unwrap()])
    }

    #[test]
    fn sum_concatenates_and_shifts() {
        let s = Poly::monomial(2).sum(&Poly::from_arities(&[1, 3]));
        assert_eq!(s.arities(), vec![2, 1, 3]);
        assert_eq!(Poly::zero().sum(&Poly::monomial(1)), Poly::monomial(1));
        assert_eq!(Poly::one().sum(&Poly::monomial(1)).arities(), vec![0, 1]);
    }

    #[test]
    fn product_is_lexicographic_with_m_dirs_first() {
        let p = Poly::product(&Poly::monomial(1), &Poly::from_arities(&[1, 0]));
        assert_eq!(p.arities(), vec![2, 1]);
        assert_eq!(p.summand(0).dirs[0].name, "m.d0");
        assert_eq!(p.summand(0).dirs[1].name, "d0");
        let unit = Poly::product(&Poly::one(), &Poly::from_arities(&[2, 0, 1]));
        assert!(unit.same_shape(&Poly::from_arities(&[2, 0, 1])));
        let cube = Poly::product(&Poly::monomial(1), &Poly::monomial(2));
        assert_eq!(cube.arities(), vec![3]);
    }

    #[test]
    fn product_names_stay_unique() {
        let p = Poly::new(vec![Summand::named(&["m.d0", "d0"]).unwrap()]);
        let prod = Poly::product(&Poly::monomial(1), &p);
        let names: Vec<_> = prod.summand(0).dirs.iter().map(|d| d.name.clone()).collect();
        assert_eq!(names, vec!["m.m.d0", "m.d0", "d0"]);
    }

    #[test]
    fn compose_applies_second_pull_first() {
        // p = y{x}, q = y{w}, r = y^2{r,s}; f: w <- x; g: r <- w, s <- w.
        let p = y_named("x");
        let q = y_named("w");
        let r = Poly::new(vec![Summand::named(&["r", "s"]).unwrap()]);
        let f = KleisliMap::new(p.clone(), q.clone(), vec![Route::to(0, vec![0])]).unwrap();
        let g = KleisliMap::new(q, r.clone(), vec![Route::to(0, vec![0, 0])]).unwrap();
        let h = f.compose(&g).unwrap();
        assert_eq!(h, KleisliMap::new(p, r, vec![Route::to(0, vec![0, 0])]).unwrap());
    }

    #[test]
    fn bot_absorbs() {
        let p = Poly::from_arities(&[1, 0]);
        let f = KleisliMap::new(p.clone(), p.clone(), vec![Route::Bot, Route::to(1, vec![])]).unwrap();
        let h = f.compose(&KleisliMap::identity(&p)).unwrap();
        assert_eq!(h.route(0), &Route::Bot);
    }

    #[test]
    fn cod_mismatch_is_reported() {
        let f = KleisliMap::identity(&Poly::monomial(1));
        let g = KleisliMap::identity(&Poly::monomial(2));
        assert!(matches!(f.compose(&g), Err(Error::CodMismatch(_))));
    }

    #[test]
    fn label_preservation_is_enforced() {
        let a = Label::new("a").unwrap();
        let b = Label::new("b").unwrap();
        let p = Poly::new(vec![Summand::new(vec![Direction::new("x", a)]).unwrap()]);
        let q = Poly::new(vec![Summand::new(vec![Direction::new("z", b)]).unwrap()]);
        assert!(matches!(
            KleisliMap::new(p, q, vec![Route::to(0, vec![0])]),
            Err(Error::InvalidRoute { .. })
        ));
    }

    #[test]
    fn sym_laws() {
        let p = Poly::monomial(1);
        let q = Poly::monomial(2);
        let s = KleisliMap::sym(&p, &q);
        assert_eq!(s.routes(), &[Route::to(1, vec![0]), Route::to(0, vec![0, 1])]);
        let back = s.compose(&KleisliMap::sym(&q, &p)).unwrap();
        assert_eq!(back, KleisliMap::identity(&p.sum(&q)));
        assert_eq!(KleisliMap::sym(&Poly::zero(), &q), KleisliMap::identity(&q));
        let id = KleisliMap::identity(&p);
        assert_eq!(id.coproduct(&KleisliMap::identity(&q)), KleisliMap::identity(&p.sum(&q)));
    }

    #[test]
    fn distributor_inverts() {
        let m = Poly::from_arities(&[1, 0]);
        let blocks = [Poly::from_arities(&[0, 2]), Poly::monomial(1)];
        let d = KleisliMap::distribute(&m, &blocks);
        let inv = d.inverse().unwrap();
        assert_eq!(d.compose(&inv).unwrap(), KleisliMap::identity(d.dom()));
        assert_eq!(inv.compose(&d).unwrap(), KleisliMap::identity(d.cod()));
    }

    #[test]
    fn duplicate_summand_names_rejected() {
        assert!(Summand::named(&["a", "a"]).is_err());
        assert!(Label::new("").is_err());
    }
}
