//! JSON documents for diagrams, fillers, elements and trajectories.
//!
//! Boxes are keyed by name and occupy slots in name order. A route joins a
//! summand of the outer minus side or of a box's plus side to a summand of
//! the outer plus side or of a box's minus side; for boxes with a bypass the
//! summand index and direction names refer to the scaled side. A summand
//! with no route goes to `⊥`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::para::{scale, ParaMorphism, PolyBox};
use crate::pointwise::{Elem, Value};
use crate::poly::{Direction, KleisliMap, Label, Poly, Route, Summand};
use crate::semantics::{primitive, Filler, Locus, Visit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirDoc {
    pub dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Summands, each a list of directions.
pub type PolyDoc = Vec<Vec<DirDoc>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub minus: PolyDoc,
    pub plus: PolyDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndDoc {
    pub side: Side,
    /// Absent for the outer box.
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    pub summand: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteDoc {
    pub from: EndDoc,
    pub to: EndDoc,
    /// Target direction name to source direction name.
    #[serde(default)]
    pub pull: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub boxes: BTreeMap<String, BoxDoc>,
    pub outer: BoxDoc,
    pub wiring: Vec<RouteDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bypass: Option<BTreeMap<String, PolyDoc>>,
}

/// A parsed diagram: box names in slot order and the program itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub names: Vec<String>,
    pub program: ParaMorphism,
}

impl Diagram {
    pub fn new(names: Vec<String>, program: ParaMorphism) -> Result<Self> {
        if names.len() != program.inner().len() {
            return Err(Error::BoxMismatch(format!("{} names for {} boxes", names.len(), program.inner().len())));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(invalid("boxes", "box names must be distinct"));
        }
        Ok(Diagram { names, program })
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { path: path.into(), message: message.into() }
}

fn parse_error(path: &str, e: serde_json::Error) -> Error {
    Error::Parse { path: format!("{path}:{}:{}", e.line(), e.column()), message: e.to_string() }
}

fn is_unit(p: &Poly) -> bool {
    p.len() == 1 && p.summand(0).is_empty()
}

fn poly_from_doc(path: &str, doc: &PolyDoc) -> Result<Poly> {
    let summands = doc
        .iter()
        .enumerate()
        .map(|(i, dirs)| {
            let dirs = dirs
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let label = match &d.label {
                        None => Label::default(),
                        Some(l) => Label::new(l.clone()).map_err(|_| invalid(format!("{path}[{i}][{j}].label"), "labels must be nonempty"))?,
                    };
                    Ok(Direction::new(d.dir.clone(), label))
                })
                .collect::<Result<Vec<_>>>()?;
            Summand::new(dirs).map_err(|e| match e {
                Error::Validation { message, .. } => invalid(format!("{path}[{i}]"), message),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(summands))
}

fn poly_to_doc(p: &Poly) -> PolyDoc {
    p.summands()
        .iter()
        .map(|s| {
            s.dirs
                .iter()
                .map(|d| DirDoc {
                    dir: d.name.clone(),
                    label: (d.label != Label::default()).then(|| d.label.to_string()),
                })
                .collect()
        })
        .collect()
}

fn box_from_doc(path: &str, doc: &BoxDoc) -> Result<PolyBox> {
    Ok(PolyBox::new(poly_from_doc(&format!("{path}.minus"), &doc.minus)?, poly_from_doc(&format!("{path}.plus"), &doc.plus)?))
}

fn box_to_doc(b: &PolyBox) -> BoxDoc {
    BoxDoc { minus: poly_to_doc(&b.minus), plus: poly_to_doc(&b.plus) }
}

/// The blocks of one side of the body map: the outer box first, then one
/// block per slot.
struct Blocks<'a> {
    outer: &'a Poly,
    boxes: Vec<&'a Poly>,
}

impl Blocks<'_> {
    fn offset(&self, slot: Option<usize>) -> usize {
        match slot {
            None => 0,
            Some(k) => self.outer.len() + self.boxes[..k].iter().map(|p| p.len()).sum::<usize>(),
        }
    }

    fn block(&self, slot: Option<usize>) -> &Poly {
        slot.map_or(self.outer, |k| self.boxes[k])
    }

    /// Slot and local summand of a global index.
    fn locate(&self, mut i: usize) -> (Option<usize>, usize) {
        if i < self.outer.len() {
            return (None, i);
        }
        i -= self.outer.len();
        for (k, p) in self.boxes.iter().enumerate() {
            if i < p.len() {
                return (Some(k), i);
            }
            i -= p.len();
        }
        unreachable!("index within the blocks")
    }
}

struct Resolver<'a> {
    slots: BTreeMap<&'a str, usize>,
}

impl Resolver<'_> {
    /// Global index of a route end; `outer_side` is the side the outer box
    /// must use at this end.
    fn resolve(&self, path: &str, end: &EndDoc, outer_side: Side, blocks: &Blocks) -> Result<usize> {
        let slot = match &end.node {
            None => None,
            Some(name) => Some(
                *self
                    .slots
                    .get(name.as_str())
                    .ok_or_else(|| invalid(format!("{path}.box"), format!("unknown box `{name}`")))?,
            ),
        };
        let want = if slot.is_none() { outer_side } else { flip(outer_side) };
        if end.side != want {
            let whose = if slot.is_none() { "the outer box" } else { "a box" };
            return Err(invalid(format!("{path}.side"), format!("this end of a route must be on the {want:?} side of {whose}").to_lowercase()));
        }
        let block = blocks.block(slot);
        if end.summand >= block.len() {
            return Err(invalid(
                format!("{path}.summand"),
                format!("summand {} out of range, the side has {}", end.summand, block.len()),
            ));
        }
        Ok(blocks.offset(slot) + end.summand)
    }
}

fn flip(s: Side) -> Side {
    match s {
        Side::Minus => Side::Plus,
        Side::Plus => Side::Minus,
    }
}

pub fn parse(doc: &DiagramDoc) -> Result<Diagram> {
    let names: Vec<String> = doc.boxes.keys().cloned().collect();
    let inner = doc
        .boxes
        .iter()
        .map(|(name, b)| box_from_doc(&format!("boxes.{name}"), b))
        .collect::<Result<Vec<_>>>()?;
    let outer = box_from_doc("outer", &doc.outer)?;
    let mut bypass = vec![Poly::one(); names.len()];
    for (name, m) in doc.bypass.iter().flatten() {
        let k = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| invalid(format!("bypass.{name}"), format!("unknown box `{name}`")))?;
        bypass[k] = poly_from_doc(&format!("bypass.{name}"), m)?;
    }
    let scaled: Vec<PolyBox> = inner.iter().zip(&bypass).map(|(p, m)| scale(m, p)).collect();
    let dom = Blocks { outer: &outer.minus, boxes: scaled.iter().map(|b| &b.plus).collect() };
    let cod = Blocks { outer: &outer.plus, boxes: scaled.iter().map(|b| &b.minus).collect() };
    let resolver = Resolver { slots: names.iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect() };

    let dom_all = Poly::sum_all(std::iter::once(dom.outer).chain(dom.boxes.iter().copied()));
    let cod_all = Poly::sum_all(std::iter::once(cod.outer).chain(cod.boxes.iter().copied()));
    let mut routes = vec![Route::Bot; dom_all.len()];
    let mut routed_by: Vec<Option<usize>> = vec![None; dom_all.len()];
    for (r, route) in doc.wiring.iter().enumerate() {
        let path = format!("wiring[{r}]");
        let i = resolver.resolve(&format!("{path}.from"), &route.from, Side::Minus, &dom)?;
        let t = resolver.resolve(&format!("{path}.to"), &route.to, Side::Plus, &cod)?;
        if let Some(prev) = routed_by[i] {
            return Err(invalid(format!("{path}.from"), format!("summand already routed by wiring[{prev}]")));
        }
        routed_by[i] = Some(r);
        let (src, dst) = (dom_all.summand(i), cod_all.summand(t));
        for key in route.pull.keys() {
            if dst.position_of(key).is_none() {
                return Err(invalid(format!("{path}.pull.{key}"), "no such target direction"));
            }
        }
        let pull = dst
            .dirs
            .iter()
            .map(|d| {
                let at = format!("{path}.pull.{}", d.name);
                let from = route.pull.get(&d.name).ok_or_else(|| invalid(&at, "target direction is not pulled"))?;
                let j = src.position_of(from).ok_or_else(|| invalid(&at, format!("no source direction `{from}`")))?;
                if src.dirs[j].label != d.label {
                    return Err(invalid(&at, format!("pulls label `{}` into label `{}`", src.dirs[j].label, d.label)));
                }
                Ok(j)
            })
            .collect::<Result<Vec<_>>>()?;
        routes[i] = Route::to(t, pull);
    }
    let map = KleisliMap::new(dom_all, cod_all, routes).map_err(|e| invalid("wiring", e.to_string()))?;
    let program = ParaMorphism::from_map(inner, bypass, outer, map).map_err(|e| invalid("wiring", e.to_string()))?;
    Diagram::new(names, program)
}

/// The canonical document: boxes by name, routes by source, labels `y`
/// and unit bypasses omitted.
pub fn print(d: &Diagram) -> DiagramDoc {
    let p = &d.program;
    let scaled = p.scaled_inner();
    let outer = p.outer();
    let dom = Blocks { outer: &outer.minus, boxes: scaled.iter().map(|b| &b.plus).collect() };
    let cod = Blocks { outer: &outer.plus, boxes: scaled.iter().map(|b| &b.minus).collect() };
    let map = p.body().map();
    let end = |blocks: &Blocks, i: usize, outer_side: Side| {
        let (slot, summand) = blocks.locate(i);
        EndDoc {
            side: if slot.is_none() { outer_side } else { flip(outer_side) },
            node: slot.map(|k| d.names[k].clone()),
            summand,
        }
    };
    let mut wiring: Vec<RouteDoc> = map
        .routes()
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Route::Bot => None,
            Route::To { target, pull } => {
                let (src, dst) = (map.dom().summand(i), map.cod().summand(*target));
                let pull = dst.dirs.iter().zip(pull).map(|(t, &s)| (t.name.clone(), src.dirs[s].name.clone())).collect();
                Some(RouteDoc { from: end(&dom, i, Side::Minus), to: end(&cod, *target, Side::Plus), pull })
            }
        })
        .collect();
    wiring.sort_by(|a, b| a.from.cmp(&b.from));
    let bypass: BTreeMap<String, PolyDoc> = d
        .names
        .iter()
        .zip(p.bypass())
        .filter(|(_, m)| !is_unit(m))
        .map(|(n, m)| (n.clone(), poly_to_doc(m)))
        .collect();
    DiagramDoc {
        boxes: d.names.iter().zip(p.inner()).map(|(n, b)| (n.clone(), box_to_doc(b))).collect(),
        outer: box_to_doc(outer),
        wiring,
        bypass: (!bypass.is_empty()).then_some(bypass),
    }
}

/// Parse diagram text; `path` names the source in diagnostics.
pub fn parse_str(path: &str, text: &str) -> Result<Diagram> {
    let doc: DiagramDoc = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    parse(&doc)
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitElem {
    pub summand: usize,
    pub values: BTreeMap<String, Value>,
}

/// An element of `p(X)`: either direction values alone, when they pick out a
/// unique summand, or the summand with its values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemDoc {
    Explicit(ExplicitElem),
    Bare(BTreeMap<String, Value>),
}

fn names_of(s: &Summand) -> BTreeSet<&str> {
    s.dirs.iter().map(|d| d.name.as_str()).collect()
}

pub fn elem_from_doc(path: &str, p: &Poly, doc: &ElemDoc) -> Result<Elem> {
    let (summand, values) = match doc {
        ElemDoc::Explicit(e) => {
            if e.summand >= p.len() {
                return Err(invalid(format!("{path}.summand"), format!("summand {} out of range for {p}", e.summand)));
            }
            (e.summand, &e.values)
        }
        ElemDoc::Bare(values) => {
            let keys: BTreeSet<&str> = values.keys().map(String::as_str).collect();
            let fits: Vec<usize> = (0..p.len()).filter(|&i| names_of(p.summand(i)) == keys).collect();
            match fits[..] {
                [i] => (i, values),
                [] => return Err(invalid(path, format!("the keys match no summand of {p}"))),
                _ => return Err(invalid(path, format!("ambiguous between summands {fits:?}; give {{summand, values}}"))),
            }
        }
    };
    let s = p.summand(summand);
    if names_of(s) != values.keys().map(String::as_str).collect() {
        return Err(invalid(path, format!("summand {summand} has directions {:?}", names_of(s))));
    }
    Ok(Elem::new(summand, s.dirs.iter().map(|d| values[&d.name]).collect()))
}

pub fn elem_to_doc(p: &Poly, e: &Elem) -> ElemDoc {
    let s = p.summand(e.position);
    let values: BTreeMap<String, Value> = s.dirs.iter().map(|d| d.name.clone()).zip(e.data.iter().copied()).collect();
    let unique = (0..p.len()).filter(|&i| names_of(p.summand(i)) == names_of(s)).count() == 1;
    if unique {
        ElemDoc::Bare(values)
    } else {
        ElemDoc::Explicit(ExplicitElem { summand: e.position, values })
    }
}

pub fn elem_from_str(path: &str, p: &Poly, text: &str) -> Result<Elem> {
    let doc: ElemDoc = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    elem_from_doc(path, p, &doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    #[serde(rename = "in")]
    pub input: ElemDoc,
    pub out: Option<ElemDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FillerDoc {
    Primitive(PrimitiveDoc),
    Table(TableDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveDoc {
    pub primitive: String,
    /// Primitive label to the box label it is bound to.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bind: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub table: Vec<EntryDoc>,
}

pub type FillersDoc = BTreeMap<String, FillerDoc>;

fn relabel(p: &Poly, bind: &BTreeMap<String, String>) -> Result<Poly> {
    let summands = p
        .summands()
        .iter()
        .map(|s| {
            let dirs = s
                .dirs
                .iter()
                .map(|d| {
                    let label = match bind.get(d.label.as_str()) {
                        Some(l) => Label::new(l.clone())?,
                        None => d.label.clone(),
                    };
                    Ok(Direction::new(d.name.clone(), label))
                })
                .collect::<Result<Vec<_>>>()?;
            Summand::new(dirs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(summands))
}

fn filler_from_doc(path: &str, sig: &PolyBox, doc: &FillerDoc) -> Result<Filler> {
    match doc {
        FillerDoc::Primitive(p) => {
            let prim = primitive(&p.primitive).map_err(|e| invalid(format!("{path}.primitive"), e.to_string()))?;
            let bound = PolyBox::new(relabel(&prim.signature().minus, &p.bind)?, relabel(&prim.signature().plus, &p.bind)?);
            if &bound != sig {
                return Err(invalid(path, format!("primitive `{}` has signature {bound}, the box is {sig}", p.primitive)));
            }
            prim.retyped(sig.clone())
        }
        FillerDoc::Table(t) => {
            let mut seen = BTreeSet::new();
            let entries = t
                .table
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let at = format!("{path}.table[{i}]");
                    let input = elem_from_doc(&format!("{at}.in"), &sig.minus, &e.input)?;
                    if !seen.insert(input.clone()) {
                        return Err(invalid(format!("{at}.in"), "input listed twice"));
                    }
                    let out = e.out.as_ref().map(|o| elem_from_doc(&format!("{at}.out"), &sig.plus, o)).transpose()?;
                    Ok((input, out))
                })
                .collect::<Result<Vec<_>>>()?;
            Filler::table(sig.clone(), entries)
        }
    }
}

/// One filler per box of `d`, in slot order.
pub fn parse_fillers(d: &Diagram, doc: &FillersDoc) -> Result<Vec<Filler>> {
    for name in doc.keys() {
        if d.slot(name).is_none() {
            return Err(invalid(format!("fillers.{name}"), format!("unknown box `{name}`")));
        }
    }
    d.names
        .iter()
        .zip(d.program.inner())
        .map(|(name, sig)| {
            let path = format!("fillers.{name}");
            let f = doc.get(name).ok_or_else(|| invalid(&path, "box has no filler"))?;
            filler_from_doc(&path, sig, f)
        })
        .collect()
}

pub fn fillers_from_str(path: &str, d: &Diagram, text: &str) -> Result<Vec<Filler>> {
    let doc: FillersDoc = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    parse_fillers(d, &doc)
}

pub fn print_fillers(d: &Diagram, fillers: &[Filler]) -> FillersDoc {
    d.names
        .iter()
        .zip(fillers)
        .map(|(name, f)| {
            let doc = match (f.name(), f.entries()) {
                (Some(prim), _) => {
                    let base = primitive(prim).expect("registered primitive");
                    let labels = |b: &PolyBox| {
                        [&b.minus, &b.plus]
                            .into_iter()
                            .flat_map(|p| p.summands().iter().flat_map(|s| s.dirs.iter().map(|d| d.label.clone())))
                            .collect::<Vec<_>>()
                    };
                    let bind = labels(base.signature())
                        .into_iter()
                        .zip(labels(f.signature()))
                        .filter(|(a, b)| a != b)
                        .map(|(a, b)| (a.to_string(), b.to_string()))
                        .collect();
                    FillerDoc::Primitive(PrimitiveDoc { primitive: prim.to_string(), bind })
                }
                (None, Some(entries)) => FillerDoc::Table(TableDoc {
                    table: entries
                        .iter()
                        .map(|(i, o)| EntryDoc {
                            input: elem_to_doc(&f.signature().minus, i),
                            out: o.as_ref().map(|o| elem_to_doc(&f.signature().plus, o)),
                        })
                        .collect(),
                }),
                (None, None) => unreachable!("a filler is a table or a primitive"),
            };
            (name.clone(), doc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitDoc {
    /// `None` for the outer box.
    #[serde(rename = "box")]
    pub node: Option<String>,
    pub side: String,
    pub region: usize,
    pub step: usize,
}

pub fn visit_docs(names: &[String], visits: &[Visit]) -> Vec<VisitDoc> {
    visits
        .iter()
        .enumerate()
        .map(|(step, v)| {
            let (node, side) = match v.locus {
                Locus::OuterIn => (None, "in"),
                Locus::BoxIn(k) => (Some(names[k].clone()), "in"),
                Locus::BoxOut(k) => (Some(names[k].clone()), "out"),
                Locus::OuterOut => (None, "out"),
            };
            VisitDoc { node, side: side.to_string(), region: v.position, step }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::para::factorial_program;
    use crate::semantics::{eval_operational, factorial_fillers, RunOptions};

    const WD_FULL: &str = r#"{
      "boxes": {
        "P1": {"minus": [[{"dir": "u"}, {"dir": "v"}]], "plus": [[{"dir": "a"}], [{"dir": "b"}, {"dir": "c"}, {"dir": "d"}]]},
        "P2": {"minus": [[{"dir": "u"}], [{"dir": "v"}]], "plus": [[{"dir": "a"}], [{"dir": "b"}, {"dir": "c"}]]}
      },
      "outer": {"minus": [[{"dir": "x"}], [{"dir": "x"}]], "plus": [[], [{"dir": "p"}, {"dir": "q"}, {"dir": "r"}]]},
      "wiring": [
        {"from": {"side": "minus", "summand": 0}, "to": {"side": "minus", "box": "P1", "summand": 0}, "pull": {"u": "x", "v": "x"}},
        {"from": {"side": "minus", "summand": 1}, "to": {"side": "minus", "box": "P2", "summand": 0}, "pull": {"u": "x"}},
        {"from": {"side": "plus", "box": "P1", "summand": 0}, "to": {"side": "minus", "box": "P2", "summand": 1}, "pull": {"v": "a"}},
        {"from": {"side": "plus", "box": "P1", "summand": 1}, "to": {"side": "plus", "summand": 1}, "pull": {"p": "b", "q": "c", "r": "d"}},
        {"from": {"side": "plus", "box": "P2", "summand": 0}, "to": {"side": "plus", "summand": 0}}
      ]
    }"#;

    #[test]
    fn full_example_round_trips() {
        let d = parse_str("wd_full", WD_FULL).unwrap();
        assert_eq!(d.names, ["P1", "P2"]);
        assert_eq!(d.program.inner()[0].plus.arities(), [1, 3]);
        assert_eq!(d.program.outer().plus.arities(), [0, 3]);
        // P2's y² exit is unrouted
        assert_eq!(d.program.body().map().route(5), &Route::Bot);
        let doc = print(&d);
        assert_eq!(parse(&doc).unwrap(), d);
        assert_eq!(print(&parse(&doc).unwrap()), doc);
        let text = to_json(&doc);
        assert_eq!(to_json(&print(&parse_str("again", &text).unwrap())), text);
    }

    #[test]
    fn empty_diagram_is_the_unit_identity() {
        let d = parse_str("empty", r#"{"boxes": {}, "outer": {"minus": [], "plus": []}, "wiring": []}"#).unwrap();
        assert!(d.program.inner().is_empty());
        assert_eq!(d.program.body(), &crate::int::IntMorphism::identity(&PolyBox::unit()));
    }

    #[test]
    fn cross_label_pull_is_rejected() {
        let text = r#"{"boxes": {}, "outer": {"minus": [[{"dir": "n", "label": "Nat"}]], "plus": [[{"dir": "b", "label": "Bool"}]]},
            "wiring": [{"from": {"side": "minus", "summand": 0}, "to": {"side": "plus", "summand": 0}, "pull": {"b": "n"}}]}"#;
        let err = parse_str("cross", text).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[0].pull.b"), "{err}");
    }

    #[test]
    fn dangling_references_name_their_path() {
        let bad_summand = WD_FULL.replace(r#""box": "P2", "summand": 1}, "pull": {"v""#, r#""box": "P2", "summand": 7}, "pull": {"v""#);
        let err = parse_str("d", &bad_summand).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[2].to.summand"), "{err}");
        let bad_box = WD_FULL.replace(r#""box": "P2", "summand": 0}, "pull": {"u""#, r#""box": "P9", "summand": 0}, "pull": {"u""#);
        let err = parse_str("d", &bad_box).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[1].to.box"), "{err}");
        let wrong_side = WD_FULL.replacen(r#"{"side": "minus", "summand": 0}"#, r#"{"side": "plus", "summand": 0}"#, 1);
        let err = parse_str("d", &wrong_side).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[0].from.side"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_str("broken.json", "{\n  \"boxes\": {,\n}").unwrap_err();
        assert!(matches!(&err, Error::Parse { path, .. } if path.starts_with("broken.json:2:")), "{err}");
    }

    #[test]
    fn duplicate_routes_and_partial_pulls_are_rejected() {
        let doubled = WD_FULL.replace(
            r#""wiring": ["#,
            r#""wiring": [{"from": {"side": "minus", "summand": 1}, "to": {"side": "plus", "summand": 0}},"#,
        );
        let err = parse_str("d", &doubled).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[2].from"), "{err}");
        let partial = WD_FULL.replace(r#""pull": {"u": "x", "v": "x"}"#, r#""pull": {"u": "x"}"#);
        let err = parse_str("d", &partial).unwrap_err();
        assert!(matches!(&err, Error::Validation { path, .. } if path == "wiring[0].pull.v"), "{err}");
    }

    #[test]
    fn factorial_survives_printing_in_name_order() {
        let names: Vec<String> = crate::para::FACTORIAL_BOXES.iter().map(|s| s.to_string()).collect();
        let d = Diagram::new(names, factorial_program()).unwrap();
        let doc = print(&d);
        let fillers = print_fillers(&d, &factorial_fillers());
        let back = parse(&doc).unwrap();
        assert_eq!(back.names, ["Dec", "If", "Mul", "One"]);
        let back_fillers = parse_fillers(&back, &fillers).unwrap();
        for n in 0..8 {
            let input = Elem::new(0, vec![n]);
            let a = eval_operational(&d.program, &factorial_fillers(), &input, RunOptions::fuel(1000)).unwrap();
            let b = eval_operational(&back.program, &back_fillers, &input, RunOptions::fuel(1000)).unwrap();
            assert_eq!(a.outcome, b.outcome);
            assert_eq!(a.trajectory.len(), b.trajectory.len());
        }
    }

    #[test]
    fn elements_resolve_by_keys_or_explicitly() {
        let p = Poly::new(vec![Summand::named(&["N"]).unwrap(), Summand::arity(0), Summand::arity(0)]);
        let bare: ElemDoc = serde_json::from_str(r#"{"N": 6}"#).unwrap();
        assert_eq!(elem_from_doc("e", &p, &bare).unwrap(), Elem::new(0, vec![6]));
        let empty: ElemDoc = serde_json::from_str("{}").unwrap();
        assert!(elem_from_doc("e", &p, &empty).is_err());
        let e = Elem::new(2, vec![]);
        assert_eq!(elem_from_doc("e", &p, &elem_to_doc(&p, &e)).unwrap(), e);
        assert!(matches!(elem_to_doc(&p, &Elem::new(0, vec![1])), ElemDoc::Bare(_)));
    }

    #[test]
    fn primitive_fillers_bind_labels() {
        let nat = |n: &str| Direction::new(n, Label::new("Nat").unwrap());
        let sig = PolyBox::new(
            Poly::new(vec![Summand::new(vec![nat("x")]).unwrap()]),
            Poly::new(vec![Summand::new(vec![nat("y")]).unwrap()]),
        );
        let unbound: FillerDoc = serde_json::from_str(r#"{"primitive": "dec"}"#).unwrap();
        assert!(filler_from_doc("f", &sig, &unbound).is_err());
        let bound: FillerDoc = serde_json::from_str(r#"{"primitive": "dec", "bind": {"y": "Nat"}}"#).unwrap();
        let f = filler_from_doc("f", &sig, &bound).unwrap();
        assert_eq!(f.apply(&Elem::new(0, vec![4])).unwrap(), Some(Elem::new(0, vec![3])));
    }
}
