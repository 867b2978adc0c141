//! Named finite sets, partial maps (`FinSet⋆`) and total maps between them.

use std::fmt;

use crate::error::{Error, Result};

/// A finite set whose elements are indexed `0..len` and carry display names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FinSet {
    names: Vec<String>,
}

impl FinSet {
    pub fn new(names: Vec<String>) -> Self {
        FinSet { names }
    }

    pub fn from_names(names: &[&str]) -> Self {
        FinSet { names: names.iter().map(|s| s.to_string()).collect() }
    }

    /// `{0, 1, ..., n-1}`.
    pub fn anonymous(n: usize) -> Self {
        FinSet { names: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn empty() -> Self {
        FinSet::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sum(&self, other: &FinSet) -> FinSet {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        FinSet { names }
    }

    pub fn sum_all<'a>(parts: impl IntoIterator<Item = &'a FinSet>) -> FinSet {
        let mut names = Vec::new();
        for p in parts {
            names.extend(p.names.iter().cloned());
        }
        FinSet { names }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> FinSet {
        FinSet { names: self.names[range].to_vec() }
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

/// A partial map; `None` in the table is `⊥`.
#[derive(Debug, Clone)]
pub struct FinPartialMap {
    dom: FinSet,
    cod: FinSet,
    table: Vec<Option<usize>>,
}

impl PartialEq for FinPartialMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.cod.len() == other.cod.len()
    }
}

impl Eq for FinPartialMap {}

impl FinPartialMap {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<Option<usize>>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries for a domain of {}",
                table.len(),
                dom.len()
            )));
        }
        if let Some(bad) = table.iter().flatten().find(|&&t| t >= cod.len()) {
            return Err(Error::IndexOutOfRange { index: *bad, len: cod.len() });
        }
        Ok(FinPartialMap { dom, cod, table })
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.table[x]
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    pub fn identity(a: &FinSet) -> Self {
        FinPartialMap { dom: a.clone(), cod: a.clone(), table: (0..a.len()).map(Some).collect() }
    }

    pub fn bottom(dom: &FinSet, cod: &FinSet) -> Self {
        FinPartialMap { dom: dom.clone(), cod: cod.clone(), table: vec![None; dom.len()] }
    }

    pub fn compose(&self, g: &FinPartialMap) -> Result<FinPartialMap> {
        if self.cod.len() != g.dom.len() {
            return Err(Error::CodMismatch(format!(
                "cod has {} elements, dom has {}",
                self.cod.len(),
                g.dom.len()
            )));
        }
        let table = self.table.iter().map(|t| t.and_then(|j| g.table[j])).collect();
        Ok(FinPartialMap { dom: self.dom.clone(), cod: g.cod.clone(), table })
    }

    pub fn coproduct(&self, g: &FinPartialMap) -> FinPartialMap {
        let shift = self.cod.len();
        let mut table = self.table.clone();
        table.extend(g.table.iter().map(|t| t.map(|j| j + shift)));
        FinPartialMap { dom: self.dom.sum(&g.dom), cod: self.cod.sum(&g.cod), table }
    }

    pub fn copair(&self, g: &FinPartialMap) -> Result<FinPartialMap> {
        if self.cod.len() != g.cod.len() {
            return Err(Error::CodMismatch("copair codomains differ".into()));
        }
        let mut table = self.table.clone();
        table.extend(g.table.iter().cloned());
        Ok(FinPartialMap { dom: self.dom.sum(&g.dom), cod: self.cod.clone(), table })
    }

    pub fn permute_blocks(blocks: &[FinSet], order: &[usize]) -> FinPartialMap {
        assert_eq!(blocks.len(), order.len(), "order must be a permutation of the blocks");
        let mut cod_offset = vec![0; blocks.len()];
        let mut acc = 0;
        for &b in order {
            cod_offset[b] = acc;
            acc += blocks[b].len();
        }
        let mut table = Vec::new();
        for (b, block) in blocks.iter().enumerate() {
            table.extend((0..block.len()).map(|j| Some(cod_offset[b] + j)));
        }
        FinPartialMap {
            dom: FinSet::sum_all(blocks),
            cod: FinSet::sum_all(order.iter().map(|&b| &blocks[b])),
            table,
        }
    }

    pub fn inl(a: &FinSet, b: &FinSet) -> FinPartialMap {
        FinPartialMap { dom: a.clone(), cod: a.sum(b), table: (0..a.len()).map(Some).collect() }
    }

    pub fn inr(a: &FinSet, b: &FinSet) -> FinPartialMap {
        FinPartialMap {
            dom: b.clone(),
            cod: a.sum(b),
            table: (0..b.len()).map(|j| Some(a.len() + j)).collect(),
        }
    }

    pub fn codiagonal(a: &FinSet) -> FinPartialMap {
        let id = FinPartialMap::identity(a);
        id.copair(&id).expect("identical codomains")
    }

    /// Restrict to the sub-block `range` of the domain.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> FinPartialMap {
        FinPartialMap {
            dom: self.dom.slice(range.clone()),
            cod: self.cod.clone(),
            table: self.table[range].to_vec(),
        }
    }
}

impl fmt::Display for FinPartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.table.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match t {
                Some(j) => write!(f, "{} ↦ {}", self.dom.name(i), self.cod.name(*j))?,
                None => write!(f, "{} ↦ ⊥", self.dom.name(i))?,
            }
        }
        f.write_str("}")
    }
}

/// A total function between named finite sets.
#[derive(Debug, Clone)]
pub struct FinMap {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl PartialEq for FinMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.cod.len() == other.cod.len()
    }
}

impl Eq for FinMap {}

impl FinMap {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries for a domain of {}",
                table.len(),
                dom.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&t| t >= cod.len()) {
            return Err(Error::IndexOutOfRange { index: *bad, len: cod.len() });
        }
        Ok(FinMap { dom, cod, table })
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn identity(a: &FinSet) -> Self {
        FinMap { dom: a.clone(), cod: a.clone(), table: (0..a.len()).collect() }
    }

    pub fn from_empty(cod: &FinSet) -> Self {
        FinMap { dom: FinSet::empty(), cod: cod.clone(), table: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.dom.len() == self.cod.len() && self.table.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.table.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn compose(&self, g: &FinMap) -> Result<FinMap> {
        if self.cod.len() != g.dom.len() {
            return Err(Error::CodMismatch(format!(
                "cod has {} elements, dom has {}",
                self.cod.len(),
                g.dom.len()
            )));
        }
        let table = self.table.iter().map(|&j| g.table[j]).collect();
        Ok(FinMap { dom: self.dom.clone(), cod: g.cod.clone(), table })
    }

    pub fn coproduct(&self, g: &FinMap) -> FinMap {
        let shift = self.cod.len();
        let mut table = self.table.clone();
        table.extend(g.table.iter().map(|j| j + shift));
        FinMap { dom: self.dom.sum(&g.dom), cod: self.cod.sum(&g.cod), table }
    }

    pub fn to_partial(&self) -> FinPartialMap {
        FinPartialMap {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            table: self.table.iter().map(|&t| Some(t)).collect(),
        }
    }

    pub fn from_partial(f: &FinPartialMap) -> Option<FinMap> {
        let table = f.table.iter().cloned().collect::<Option<Vec<_>>>()?;
        Some(FinMap { dom: f.dom.clone(), cod: f.cod.clone(), table })
    }
}
