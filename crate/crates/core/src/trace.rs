//! Iteration and trace on `FinSet⋆` and `Poly⋆`.
//!
//! Both operators run a deterministic walk. On finite pointed sets the walk
//! follows elements; on polynomials it follows summands, since routing in
//! `Poly⋆` never depends on data. Revisiting a feedback element/summand means
//! the loop can never exit, so the result there is `⊥`. No fuel is needed.

use crate::error::{Error, Result};
use crate::finset::{FinPartialMap, FinSet};
use crate::poly::{KleisliMap, Poly, Route};

/// `iter(f) : A ⇀ B` for `f : A ⇀ B + A`. The codomain's trailing block of
/// size `|A|` is the feedback block.
pub fn iter_set(f: &FinPartialMap) -> Result<FinPartialMap> {
    let a_len = f.dom().len();
    let cod_len = f.cod().len();
    if cod_len < a_len {
        return Err(Error::BlockMismatch(format!(
            "codomain of size {cod_len} cannot contain a feedback block of size {a_len}"
        )));
    }
    let b_len = cod_len - a_len;
    let b = f.cod().slice(0..b_len);
    let mut visited = vec![false; a_len];
    let table = (0..a_len)
        .map(|start| {
            visited.iter_mut().for_each(|v| *v = false);
            visited[start] = true;
            let mut x = start;
            loop {
                let j = f.apply(x)?;
                if j < b_len {
                    return Some(j);
                }
                x = j - b_len;
                if std::mem::replace(&mut visited[x], true) {
                    return None;
                }
            }
        })
        .collect();
    FinPartialMap::new(f.dom().clone(), b, table)
}

/// `Tr^U(g) : A ⇀ B` for `g : A + U ⇀ B + U`, defined through iteration:
/// `(A + !_U) ; iter^{A+U}_B(g ; (B + !_A + U))`.
pub fn trace_set(g: &FinPartialMap, u: &FinSet) -> Result<FinPartialMap> {
    let (dom_len, cod_len) = (g.dom().len(), g.cod().len());
    if dom_len < u.len() || cod_len < u.len() {
        return Err(Error::BlockMismatch(format!(
            "cannot trace out {} elements from a map {} -> {}",
            u.len(),
            dom_len,
            cod_len
        )));
    }
    let a = g.dom().slice(0..dom_len - u.len());
    let b = g.cod().slice(0..cod_len - u.len());
    // B + U -> B + (A + U)
    let widen = FinPartialMap::identity(&b).coproduct(&FinPartialMap::inr(&a, u));
    let step = g.compose(&widen)?;
    let looped = iter_set(&step)?;
    FinPartialMap::inl(&a, u).compose(&looped)
}

/// `Tr^u(f) : a -> b` for `f : a + u -> b + u` in `Poly⋆`.
///
/// Walking `i -> j_1 -> ... -> j_n` (with `j_n` in `b`) composes pulls so
/// that the last hop's pull is evaluated first: a direction `k` of the exit
/// summand reads `pull_1[pull_2[...pull_n[k]]]` of the entry summand. For
/// example, `a_0 -> u_0` pulling `w <- x` followed by `u_0 -> b_0` pulling
/// `r <- w, s <- w` yields `a_0 -> b_0` pulling `r <- x, s <- x`.
pub fn trace_poly(f: &KleisliMap, u: &Poly) -> Result<KleisliMap> {
    let (dom, cod) = (f.dom(), f.cod());
    let n = u.len();
    let blocks_ok = dom.len() >= n
        && cod.len() >= n
        && dom.slice(dom.len() - n..dom.len()).same_shape(u)
        && cod.slice(cod.len() - n..cod.len()).same_shape(u);
    if !blocks_ok {
        return Err(Error::BlockMismatch(format!(
            "map {dom} -> {cod} does not end in the traced block {u}"
        )));
    }
    let a_len = dom.len() - n;
    let b_len = cod.len() - n;
    let mut visited = vec![false; n];
    let routes = (0..a_len)
        .map(|i| {
            visited.iter_mut().for_each(|v| *v = false);
            let Route::To { target, pull } = f.route(i) else { return Route::Bot };
            let (mut target, mut acc) = (*target, pull.clone());
            while target >= b_len {
                let k = target - b_len;
                if std::mem::replace(&mut visited[k], true) {
                    return Route::Bot;
                }
                let Route::To { target: next, pull } = f.route(a_len + k) else {
                    return Route::Bot;
                };
                acc = pull.iter().map(|&d| acc[d]).collect();
                target = *next;
            }
            Route::to(target, acc)
        })
        .collect();
    KleisliMap::new(dom.slice(0..a_len), cod.slice(0..b_len), routes)
}

/// `iter(f) : a -> b` for `f : a -> b + a`, as `Tr^a(∇_a ; f)`.
pub fn iter_poly(f: &KleisliMap) -> Result<KleisliMap> {
    let a = f.dom().clone();
    if f.cod().len() < a.len() {
        return Err(Error::BlockMismatch("codomain smaller than the feedback block".into()));
    }
    trace_poly(&KleisliMap::codiagonal(&a).compose(f)?, &a)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::poly::Summand;

    /// Independent oracle: step until leaving the feedback block or repeating.
    fn walk_oracle(f: &FinPartialMap, a_len: usize, b_len: usize, start: usize) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut x = start;
        loop {
            let j = f.apply(x)?;
            if j < b_len {
                return Some(j);
            }
            x = j - b_len + a_len;
            if !seen.insert(x) {
                return None;
            }
        }
    }

    fn set_map(dom: usize, cod: usize, table: Vec<Option<usize>>) -> FinPartialMap {
        FinPartialMap::new(FinSet::anonymous(dom), FinSet::anonymous(cod), table).unwrap()
    }

    #[test]
    fn iter_two_step_walk() {
        // A = {a0, a1}, B = {c}: a0 -> inr a1, a1 -> inl c.
        let f = set_map(2, 3, vec![Some(2), Some(0)]);
        let it = iter_set(&f).unwrap();
        assert_eq!(it.table(), &[Some(0), Some(0)]);
        for s in 0..2 {
            // the oracle treats the whole of A as feedback: offset 0
            assert_eq!(it.apply(s), walk_oracle(&f, 0, 1, s));
        }
    }

    #[test]
    fn iter_self_loop_diverges() {
        let f = set_map(1, 2, vec![Some(1)]);
        assert_eq!(iter_set(&f).unwrap().table(), &[None]);
        let g = set_map(1, 2, vec![Some(0)]);
        assert_eq!(iter_set(&g).unwrap().table(), &[Some(0)]);
    }

    #[test]
    fn trace_set_with_empty_feedback_is_identity_on_maps() {
        let f = set_map(3, 2, vec![Some(1), None, Some(0)]);
        assert_eq!(trace_set(&f, &FinSet::empty()).unwrap(), f);
    }

    #[test]
    fn trace_set_yanking_singleton() {
        let u = FinSet::anonymous(1);
        let swap = FinPartialMap::permute_blocks(&[u.clone(), u.clone()], &[1, 0]);
        assert_eq!(trace_set(&swap, &u).unwrap(), FinPartialMap::identity(&u));
    }

    #[test]
    fn trace_set_feeds_back_through_u() {
        // A = {a}, U = {u0, u1}, B = {b}: a -> u0, u0 -> u1, u1 -> b.
        let f = set_map(3, 3, vec![Some(1), Some(2), Some(0)]);
        let t = trace_set(&f, &FinSet::anonymous(2)).unwrap();
        assert_eq!(t.table(), &[Some(0)]);
        assert_eq!(t.apply(0), walk_oracle(&f, 1, 1, 0));
    }

    #[test]
    fn trace_poly_composes_pulls_in_walk_order() {
        let a = Poly::new(vec![Summand::named(&["x"]).unwrap()]);
        let u = Poly::new(vec![Summand::named(&["w"]).unwrap()]);
        let b = Poly::new(vec![Summand::named(&["r", "s"]).unwrap()]);
        let f = KleisliMap::new(
            a.sum(&u),
            b.sum(&u),
            vec![Route::to(1, vec![0]), Route::to(0, vec![0, 0])],
        )
        .unwrap();
        let t = trace_poly(&f, &u).unwrap();
        assert_eq!(t, KleisliMap::new(a, b, vec![Route::to(0, vec![0, 0])]).unwrap());
    }

    #[test]
    fn trace_poly_pull_order_is_not_reversed() {
        // a = y^2{x0,x1}, u = y^2, b = y^2. a -> u swaps, u -> b keeps first twice.
        let a = Poly::monomial(2);
        let u = Poly::monomial(2);
        let f = KleisliMap::new(
            a.sum(&u),
            a.sum(&u),
            vec![Route::to(1, vec![1, 0]), Route::to(0, vec![0, 0])],
        )
        .unwrap();
        // b.d0 <- u.d0 <- a.d1 and b.d1 <- u.d0 <- a.d1
        assert_eq!(trace_poly(&f, &u).unwrap().route(0), &Route::to(0, vec![1, 1]));
    }

    #[test]
    fn trace_poly_yanking_and_unit() {
        let y = Poly::monomial(1);
        let s = KleisliMap::sym(&y, &y);
        assert_eq!(trace_poly(&s, &y).unwrap(), KleisliMap::identity(&y));
        let f = KleisliMap::sym(&Poly::monomial(2), &Poly::one());
        assert_eq!(trace_poly(&f, &Poly::zero()).unwrap(), f);
    }

    #[test]
    fn trace_poly_cycle_is_bot() {
        let y = Poly::monomial(1);
        // a -> u, u -> u
        let f = KleisliMap::new(
            y.sum(&y),
            y.sum(&y),
            vec![Route::to(1, vec![0]), Route::to(1, vec![0])],
        )
        .unwrap();
        assert_eq!(trace_poly(&f, &y).unwrap().route(0), &Route::Bot);
    }

    #[test]
    fn trace_poly_rejects_bad_blocks() {
        let f = KleisliMap::identity(&Poly::monomial(1));
        assert!(matches!(trace_poly(&f, &Poly::monomial(2)), Err(Error::BlockMismatch(_))));
    }
}
