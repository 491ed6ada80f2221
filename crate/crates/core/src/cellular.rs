//! Finite CW complexes as integer chain data, and relative homology with
//! coefficients in a finite abelian group.
//!
//! Every pair `(X, A)` is a pair of subcomplexes of one ambient complex, so
//! chains are always indexed by ambient cells and inclusions act as the
//! identity on coordinates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::abelian::{
    mod_smith, mod_smith_matrix, FiniteAbelianGroup, GroupElement, IntegerMatrix, ModMatrix,
};
use crate::error::{Error, Result};
use crate::groupcat::FORMAT;

/// Cells per dimension and integer boundary matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CwComplex {
    cells: Vec<Vec<String>>,
    /// `boundary[d]` has rows = (d−1)-cells and cols = d-cells; `boundary[0]`
    /// has no rows.
    boundary: Vec<IntegerMatrix>,
    index: Vec<BTreeMap<String, usize>>,
    subcomplexes: BTreeMap<String, Subcomplex>,
}

/// A set of cells per dimension closed under taking boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcomplex {
    cells: Vec<BTreeSet<usize>>,
}

impl Subcomplex {
    pub fn contains(&self, d: usize, i: usize) -> bool {
        self.cells.get(d).is_some_and(|s| s.contains(&i))
    }

    pub fn cells(&self, d: usize) -> Vec<usize> {
        self.cells
            .get(d)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn dims(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_count() == 0
    }

    pub fn is_subset(&self, other: &Subcomplex) -> bool {
        self.cells
            .iter()
            .enumerate()
            .all(|(d, s)| s.iter().all(|&i| other.contains(d, i)))
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        let dims = self.dims().max(other.dims());
        let cells = (0..dims)
            .map(|d| {
                let mut s = self.cells.get(d).cloned().unwrap_or_default();
                s.extend(other.cells.get(d).into_iter().flatten().copied());
                s
            })
            .collect();
        Subcomplex { cells }
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        let cells = (0..self.dims())
            .map(|d| {
                self.cells[d]
                    .iter()
                    .copied()
                    .filter(|&i| other.contains(d, i))
                    .collect()
            })
            .collect();
        Subcomplex { cells }
    }

    /// Cells of `self` not in `other`, in dimension `d`, sorted.
    pub fn difference(&self, other: &Subcomplex, d: usize) -> Vec<usize> {
        self.cells(d)
            .into_iter()
            .filter(|&i| !other.contains(d, i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRepr {
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub cells: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub boundary: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub subcomplexes: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

fn default_format() -> String {
    FORMAT.to_string()
}

impl CwComplex {
    /// Validates shapes, name uniqueness and `∂∂ = 0`. `boundary[k]` is the
    /// matrix of `∂_{k+1}`.
    pub fn new(cells: Vec<Vec<String>>, boundary: Vec<IntegerMatrix>) -> Result<Self> {
        let mut cells = cells;
        if cells.is_empty() {
            cells.push(Vec::new());
        }
        let dim = cells.len() - 1;
        if boundary.len() != dim {
            return Err(Error::InvalidComplex(format!(
                "{} boundary matrices for a complex of dimension {dim}",
                boundary.len()
            )));
        }
        let mut full = vec![IntegerMatrix::zeros(0, cells[0].len())];
        for (k, b) in boundary.into_iter().enumerate() {
            let d = k + 1;
            if b.rows() != cells[d - 1].len() || b.cols() != cells[d].len() {
                return Err(Error::InvalidComplex(format!(
                    "boundary in dimension {d} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    cells[d - 1].len(),
                    cells[d].len()
                )));
            }
            full.push(b);
        }
        let mut index = Vec::new();
        let mut seen = BTreeSet::new();
        for list in &cells {
            let mut map = BTreeMap::new();
            for (i, name) in list.iter().enumerate() {
                if !seen.insert(name.clone()) {
                    return Err(Error::InvalidComplex(format!(
                        "duplicate cell name {name:?}"
                    )));
                }
                map.insert(name.clone(), i);
            }
            index.push(map);
        }
        for d in 2..=dim {
            let dd = full[d - 1].mul(&full[d])?;
            if !dd.is_zero() {
                return Err(Error::InvalidComplex(format!(
                    "boundary of boundary is nonzero in dimension {d}"
                )));
            }
        }
        Ok(CwComplex {
            cells,
            boundary: full,
            index,
            subcomplexes: BTreeMap::new(),
        })
    }

    pub fn empty() -> Self {
        Self::new(vec![vec![]], vec![]).expect("empty complex")
    }

    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self, d: usize) -> &[String] {
        self.cells.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cell_count(&self, d: usize) -> usize {
        self.cells(d).len()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// `∂_d` for `1 ≤ d ≤ dim`.
    pub fn boundary_matrix(&self, d: usize) -> Option<&IntegerMatrix> {
        if d >= 1 {
            self.boundary.get(d)
        } else {
            None
        }
    }

    /// Position and dimension of a named cell.
    pub fn find_cell(&self, name: &str) -> Option<(usize, usize)> {
        self.index
            .iter()
            .enumerate()
            .find_map(|(d, m)| m.get(name).map(|&i| (d, i)))
    }

    pub fn cell_index(&self, d: usize, name: &str) -> Option<usize> {
        self.index.get(d)?.get(name).copied()
    }

    /// Cells in the boundary of `(d, i)` with nonzero coefficient.
    pub fn faces(&self, d: usize, i: usize) -> Vec<(usize, i64)> {
        if d == 0 {
            return Vec::new();
        }
        let b = &self.boundary[d];
        (0..b.rows())
            .filter(|&r| b.get(r, i) != 0).map(|r| (r, b.get(r, i)))
            .collect()
    }

    pub fn empty_sub(&self) -> Subcomplex {
        Subcomplex {
            cells: vec![BTreeSet::new(); self.dim() + 1],
        }
    }

    pub fn full_sub(&self) -> Subcomplex {
        Subcomplex {
            cells: self.cells.iter().map(|l| (0..l.len()).collect()).collect(),
        }
    }

    /// Checks closure under boundaries.
    pub fn subcomplex(&self, cells: Vec<BTreeSet<usize>>) -> Result<Subcomplex> {
        let mut cells = cells;
        if cells.len() > self.dim() + 1 {
            if cells[self.dim() + 1..].iter().any(|s| !s.is_empty()) {
                return Err(Error::InvalidSubcomplex(
                    "cells above the top dimension".into(),
                ));
            }
            cells.truncate(self.dim() + 1);
        }
        cells.resize(self.dim() + 1, BTreeSet::new());
        for (d, s) in cells.iter().enumerate() {
            for &i in s {
                if i >= self.cell_count(d) {
                    return Err(Error::InvalidSubcomplex(format!(
                        "no cell {i} in dimension {d}"
                    )));
                }
                for (f, _) in self.faces(d, i) {
                    if !cells[d - 1].contains(&f) {
                        return Err(Error::InvalidSubcomplex(format!(
                            "{} lies in the subcomplex but its face {} does not",
                            self.cells[d][i],
                            self.cells[d - 1][f]
                        )));
                    }
                }
            }
        }
        Ok(Subcomplex { cells })
    }

    /// Smallest subcomplex containing the given cells.
    pub fn closure(&self, seeds: &[(usize, usize)]) -> Result<Subcomplex> {
        let mut cells = vec![BTreeSet::new(); self.dim() + 1];
        let mut stack: Vec<(usize, usize)> = seeds.to_vec();
        while let Some((d, i)) = stack.pop() {
            if d > self.dim() || i >= self.cell_count(d) {
                return Err(Error::InvalidSubcomplex(format!(
                    "no cell {i} in dimension {d}"
                )));
            }
            if cells[d].insert(i) {
                stack.extend(self.faces(d, i).into_iter().map(|(f, _)| (d - 1, f)));
            }
        }
        Ok(Subcomplex { cells })
    }

    /// Closure of the named cells.
    pub fn closure_of_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Subcomplex> {
        let seeds: Vec<(usize, usize)> = names
            .iter()
            .map(|n| {
                self.find_cell(n.as_ref()).ok_or_else(|| {
                    Error::InvalidSubcomplex(format!("unknown cell {:?}", n.as_ref()))
                })
            })
            .collect::<Result<_>>()?;
        self.closure(&seeds)
    }

    /// A subcomplex given by cell names per dimension; must already be
    /// closed.
    pub fn subcomplex_from_names(
        &self,
        names: &BTreeMap<String, Vec<String>>,
    ) -> Result<Subcomplex> {
        let mut cells = vec![BTreeSet::new(); self.dim() + 1];
        for (dkey, list) in names {
            let d: usize = dkey
                .parse()
                .map_err(|_| Error::InvalidSubcomplex(format!("bad dimension key {dkey:?}")))?;
            for name in list {
                let i = self.cell_index(d, name).ok_or_else(|| {
                    Error::InvalidSubcomplex(format!("no {d}-cell named {name:?}"))
                })?;
                if d >= cells.len() {
                    return Err(Error::InvalidSubcomplex(format!("no {d}-cells")));
                }
                cells[d].insert(i);
            }
        }
        self.subcomplex(cells)
    }

    pub fn subcomplex_names(&self, sub: &Subcomplex) -> BTreeMap<String, Vec<String>> {
        let mut out = BTreeMap::new();
        for d in 0..=self.dim() {
            let names: Vec<String> = sub
                .cells(d)
                .iter()
                .map(|&i| self.cells[d][i].clone())
                .collect();
            if !names.is_empty() {
                out.insert(d.to_string(), names);
            }
        }
        out
    }

    pub fn add_subcomplex(&mut self, name: &str, sub: Subcomplex) -> Result<()> {
        let sub = self.subcomplex(sub.cells)?;
        self.subcomplexes.insert(name.to_string(), sub);
        Ok(())
    }

    pub fn with_subcomplex(mut self, name: &str, sub: Subcomplex) -> Result<Self> {
        self.add_subcomplex(name, sub)?;
        Ok(self)
    }

    /// A named subcomplex; `""`, `"empty"` give the empty one and `"all"`
    /// the whole complex unless those names are taken.
    pub fn named(&self, name: &str) -> Result<Subcomplex> {
        if let Some(s) = self.subcomplexes.get(name) {
            return Ok(s.clone());
        }
        match name {
            "" | "empty" => Ok(self.empty_sub()),
            "all" => Ok(self.full_sub()),
            _ => Err(Error::InvalidSubcomplex(format!(
                "no subcomplex named {name:?}"
            ))),
        }
    }

    pub fn subcomplex_map(&self) -> &BTreeMap<String, Subcomplex> {
        &self.subcomplexes
    }

    pub fn to_repr(&self, name: Option<String>) -> ComplexRepr {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(d, l)| (d.to_string(), l.clone()))
            .collect();
        let boundary = (1..=self.dim())
            .filter(|&d| !self.boundary[d].is_zero())
            .map(|d| (d.to_string(), self.boundary[d].to_rows()))
            .collect();
        let subcomplexes = self
            .subcomplexes
            .iter()
            .map(|(k, s)| (k.clone(), self.subcomplex_names(s)))
            .collect();
        ComplexRepr {
            format: FORMAT.to_string(),
            name,
            cells,
            boundary,
            subcomplexes,
        }
    }

    pub fn from_repr(repr: &ComplexRepr) -> Result<Self> {
        if repr.format != FORMAT {
            return Err(Error::InvalidComplex(format!(
                "unsupported format {:?}",
                repr.format
            )));
        }
        let mut dims: Vec<usize> = Vec::new();
        for k in repr.cells.keys().chain(repr.boundary.keys()) {
            dims.push(
                k.parse()
                    .map_err(|_| Error::InvalidComplex(format!("bad dimension key {k:?}")))?,
            );
        }
        let dim = dims.into_iter().max().unwrap_or(0);
        let cells: Vec<Vec<String>> = (0..=dim)
            .map(|d| repr.cells.get(&d.to_string()).cloned().unwrap_or_default())
            .collect();
        let mut boundary = Vec::new();
        for d in 1..=dim {
            let (r, c) = (cells[d - 1].len(), cells[d].len());
            let m = match repr.boundary.get(&d.to_string()) {
                Some(rows) => IntegerMatrix::from_rows(r, c, rows).map_err(|_| {
                    Error::InvalidComplex(format!(
                        "boundary {d} must be {r}x{c} (rows are {}-cells)",
                        d - 1
                    ))
                })?,
                None => IntegerMatrix::zeros(r, c),
            };
            boundary.push(m);
        }
        let mut cx = CwComplex::new(cells, boundary)?;
        for (name, sub) in &repr.subcomplexes {
            let s = cx.subcomplex_from_names(sub)?;
            cx.subcomplexes.insert(name.clone(), s);
        }
        Ok(cx)
    }

    /// Product cell structure: cells `(a,b)` of dimension `|a|+|b|` with
    /// `∂(a×b) = ∂a×b + (−1)^{|a|} a×∂b`. Cells of each dimension are
    /// ordered by the dimension of the first factor, then lexicographically.
    pub fn product(a: &CwComplex, b: &CwComplex) -> Result<CwComplex> {
        let dim = a.dim() + b.dim();
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); dim + 1];
        let mut pos: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
        for (d, list) in cells.iter_mut().enumerate() {
            for p in 0..=d {
                let q = d - p;
                if p > a.dim() || q > b.dim() {
                    continue;
                }
                for (i, an) in a.cells(p).iter().enumerate() {
                    for (j, bn) in b.cells(q).iter().enumerate() {
                        pos.insert((p, i, q, j), list.len());
                        list.push(format!("{an}*{bn}"));
                    }
                }
            }
        }
        let mut boundary = Vec::new();
        for d in 1..=dim {
            let mut m = IntegerMatrix::zeros(cells[d - 1].len(), cells[d].len());
            for (&(p, i, q, j), &col) in pos.iter().filter(|(k, _)| k.0 + k.2 == d) {
                for (f, c) in a.faces(p, i) {
                    let row = pos[&(p - 1, f, q, j)];
                    m.set(row, col, m.get(row, col) + c);
                }
                let sign = if p % 2 == 0 { 1 } else { -1 };
                for (f, c) in b.faces(q, j) {
                    let row = pos[&(p, i, q - 1, f)];
                    m.set(row, col, m.get(row, col) + sign * c);
                }
            }
            boundary.push(m);
        }
        CwComplex::new(cells, boundary)
    }

    /// The product subcomplex `A × B` inside `product(a, b)`.
    pub fn product_sub(
        prod: &CwComplex,
        a: &CwComplex,
        sa: &Subcomplex,
        b: &CwComplex,
        sb: &Subcomplex,
    ) -> Result<Subcomplex> {
        let mut seeds = Vec::new();
        for p in 0..=a.dim() {
            for &i in &sa.cells(p) {
                for q in 0..=b.dim() {
                    for &j in &sb.cells(q) {
                        let name = format!("{}*{}", a.cells(p)[i], b.cells(q)[j]);
                        let idx = prod.cell_index(p + q, &name).ok_or_else(|| {
                            Error::InvalidSubcomplex(format!("{name} is not a product cell"))
                        })?;
                        seeds.push((p + q, idx));
                    }
                }
            }
        }
        prod.closure(&seeds)
    }

    /// Disjoint union with cell names prefixed; named subcomplexes are
    /// carried over with the same prefixes.
    pub fn disjoint_union(a: &CwComplex, pa: &str, b: &CwComplex, pb: &str) -> Result<CwComplex> {
        let dim = a.dim().max(b.dim());
        let mut cells = Vec::new();
        for d in 0..=dim {
            let mut l: Vec<String> = a.cells(d).iter().map(|n| format!("{pa}{n}")).collect();
            l.extend(b.cells(d).iter().map(|n| format!("{pb}{n}")));
            cells.push(l);
        }
        let mut boundary = Vec::new();
        for d in 1..=dim {
            let (ra, ca) = (a.cell_count(d - 1), a.cell_count(d));
            let (rb, cb) = (b.cell_count(d - 1), b.cell_count(d));
            let mut m = IntegerMatrix::zeros(ra + rb, ca + cb);
            if let Some(ba) = a.boundary_matrix(d) {
                for r in 0..ra {
                    for c in 0..ca {
                        m.set(r, c, ba.get(r, c));
                    }
                }
            }
            if let Some(bb) = b.boundary_matrix(d) {
                for r in 0..rb {
                    for c in 0..cb {
                        m.set(ra + r, ca + c, bb.get(r, c));
                    }
                }
            }
            boundary.push(m);
        }
        let mut out = CwComplex::new(cells, boundary)?;
        for (name, s) in &a.subcomplexes {
            let shifted = Self::shift_sub(s, &vec![0; dim + 1]);
            out.subcomplexes.insert(format!("{pa}{name}"), shifted);
        }
        for (name, s) in &b.subcomplexes {
            let offsets: Vec<usize> = (0..=dim).map(|d| a.cell_count(d)).collect();
            out.subcomplexes
                .insert(format!("{pb}{name}"), Self::shift_sub(s, &offsets));
        }
        Ok(out)
    }

    fn shift_sub(s: &Subcomplex, offsets: &[usize]) -> Subcomplex {
        let cells = offsets
            .iter()
            .enumerate()
            .map(|(d, &o)| s.cells(d).into_iter().map(|i| i + o).collect())
            .collect();
        Subcomplex { cells }
    }

    /// The images of the two summands of a disjoint union built by
    /// [`disjoint_union`](Self::disjoint_union).
    pub fn union_summands(a: &CwComplex, b: &CwComplex) -> (Subcomplex, Subcomplex) {
        let dim = a.dim().max(b.dim());
        let left = (0..=dim).map(|d| (0..a.cell_count(d)).collect()).collect();
        let right = (0..=dim)
            .map(|d| (a.cell_count(d)..a.cell_count(d) + b.cell_count(d)).collect())
            .collect();
        (Subcomplex { cells: left }, Subcomplex { cells: right })
    }
}

impl Serialize for CwComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr(None).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CwComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(d)?;
        CwComplex::from_repr(&repr).map_err(serde::de::Error::custom)
    }
}

/// A cellular chain with coefficients in `G = Π Z/n_f`, indexed by ambient
/// cells: `coeffs[f][i]` is the `Z/n_f` coefficient of cell `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GChain {
    pub dim: usize,
    pub moduli: Vec<u64>,
    pub coeffs: Vec<Vec<u64>>,
}

impl GChain {
    pub fn zero(ambient: &CwComplex, dim: usize, g: &FiniteAbelianGroup) -> Self {
        let n = ambient.cell_count(dim);
        GChain {
            dim,
            moduli: g.orders().to_vec(),
            coeffs: vec![vec![0; n]; g.rank()],
        }
    }

    /// `value · cell`.
    pub fn cell(
        ambient: &CwComplex,
        dim: usize,
        i: usize,
        value: &GroupElement,
        g: &FiniteAbelianGroup,
    ) -> Self {
        let mut c = Self::zero(ambient, dim, g);
        for (f, &e) in value.exps.iter().enumerate() {
            c.coeffs[f][i] = e % c.moduli[f];
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&x| x == 0)
    }

    /// Coefficient of one cell as a group element.
    pub fn coefficient(&self, i: usize) -> GroupElement {
        GroupElement::new(self.coeffs.iter().map(|v| v[i]).collect())
    }

    pub fn add(&self, other: &GChain) -> Result<GChain> {
        if self.dim != other.dim
            || self.moduli != other.moduli
            || self.coeffs.first().map(Vec::len) != other.coeffs.first().map(Vec::len)
        {
            return Err(Error::DimensionMismatch(
                "adding incompatible chains".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(&self.moduli)
            .map(|((a, b), &m)| a.iter().zip(b).map(|(x, y)| (x + y) % m).collect())
            .collect();
        Ok(GChain {
            dim: self.dim,
            moduli: self.moduli.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, k: i64) -> GChain {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&self.moduli)
            .map(|(v, &m)| {
                v.iter()
                    .map(|&x| ((x as i128 * k as i128).rem_euclid(m as i128)) as u64)
                    .collect()
            })
            .collect();
        GChain {
            dim: self.dim,
            moduli: self.moduli.clone(),
            coeffs,
        }
    }

    /// Cellular boundary in the ambient complex.
    pub fn boundary(&self, ambient: &CwComplex) -> Result<GChain> {
        if self.dim == 0 {
            return Err(Error::DimensionMismatch("boundary of a 0-chain".into()));
        }
        let b = ambient
            .boundary_matrix(self.dim)
            .ok_or_else(|| Error::DimensionMismatch(format!("no {}-cells", self.dim)))?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&self.moduli)
            .map(|(v, &m)| {
                (0..b.rows())
                    .map(|r| {
                        let s: i128 = (0..b.cols())
                            .map(|c| b.get(r, c) as i128 * v[c] as i128)
                            .sum();
                        s.rem_euclid(m as i128) as u64
                    })
                    .collect()
            })
            .collect();
        Ok(GChain {
            dim: self.dim - 1,
            moduli: self.moduli.clone(),
            coeffs,
        })
    }

    /// Zeroes every cell outside `sub`.
    pub fn restrict(&self, sub: &Subcomplex) -> GChain {
        let mut out = self.clone();
        for v in out.coeffs.iter_mut() {
            for (i, x) in v.iter_mut().enumerate() {
                if !sub.contains(self.dim, i) {
                    *x = 0;
                }
            }
        }
        out
    }

    /// Whether every nonzero coefficient sits on a cell of `sub`.
    pub fn supported_in(&self, sub: &Subcomplex) -> bool {
        self.coeffs.iter().all(|v| {
            v.iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || sub.contains(self.dim, i))
        })
    }

    /// Nonzero coefficients by cell name.
    pub fn named_coefficients(&self, ambient: &CwComplex) -> BTreeMap<String, Vec<u64>> {
        let n = ambient.cell_count(self.dim);
        (0..n)
            .filter_map(|i| {
                let c = self.coefficient(i);
                (!c.is_identity()).then(|| (ambient.cells(self.dim)[i].clone(), c.exps))
            })
            .collect()
    }
}

/// Homology of one cyclic coefficient factor `Z/m`.
#[derive(Debug, Clone)]
struct FactorHomology {
    modulus: u64,
    cells: Vec<usize>,
    q: ModMatrix,
    q_inv: ModMatrix,
    /// `y_i = s_i t_i` on cycles.
    scales: Vec<u64>,
    /// Components with `e_i > 1`.
    kept: Vec<usize>,
    /// Second-stage row transform on the kept components.
    p2: ModMatrix,
    p2_inv: ModMatrix,
    /// Orders `h_j` of the second stage, one per kept component.
    h: Vec<u64>,
    /// Indices `j` with `h_j > 1`.
    kept2: Vec<usize>,
}

/// `H_n(X, A; G)` with generator lifts and coordinates.
#[derive(Debug, Clone)]
pub struct HomologyPresentation {
    pub n: usize,
    pub coefficients: FiniteAbelianGroup,
    pub x: Subcomplex,
    pub a: Subcomplex,
    /// Isomorphism type; orders of all factors, concatenated per
    /// coefficient factor.
    pub group: FiniteAbelianGroup,
    /// One relative cycle per cyclic generator of `group`.
    pub generators: Vec<GChain>,
    factors: Vec<FactorHomology>,
    total_cells: usize,
}

fn relative_boundary(
    ambient: &CwComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    d: usize,
) -> IntegerMatrix {
    let cols = x.difference(a, d);
    if d == 0 {
        return IntegerMatrix::zeros(0, cols.len());
    }
    let rows = x.difference(a, d - 1);
    match ambient.boundary_matrix(d) {
        Some(b) => b.select(&rows, &cols),
        None => IntegerMatrix::zeros(rows.len(), cols.len()),
    }
}

fn factor_homology(
    ambient: &CwComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    n: usize,
    m: u64,
) -> Result<FactorHomology> {
    let cells = x.difference(a, n);
    let r = cells.len();
    let dn = relative_boundary(ambient, x, a, n);
    let s1 = mod_smith(&dn, m)?;
    let mut scales = Vec::with_capacity(r);
    let mut orders = Vec::with_capacity(r);
    for i in 0..r {
        match s1.diag.get(i) {
            Some(&d) if d != 0 => {
                scales.push(m / d);
                orders.push(d);
            }
            _ => {
                scales.push(1);
                orders.push(m);
            }
        }
    }
    let kept: Vec<usize> = (0..r).filter(|&i| orders[i] > 1).collect();
    let next = x.difference(a, n + 1);
    let dn1 = if next.is_empty() {
        IntegerMatrix::zeros(r, 0)
    } else {
        relative_boundary(ambient, x, a, n + 1)
    };
    let mut columns: Vec<Vec<u64>> = Vec::new();
    for c in 0..dn1.cols() {
        let col: Vec<u64> = dn1
            .column(c)
            .iter()
            .map(|&v| v.rem_euclid(m as i64) as u64)
            .collect();
        let y = s1.q_inv.mul_vec(&col);
        let t: Vec<u64> = kept
            .iter()
            .map(|&i| {
                debug_assert_eq!(y[i] % scales[i], 0, "boundary is not a cycle");
                y[i] / scales[i]
            })
            .collect();
        columns.push(t);
    }
    for (k, &i) in kept.iter().enumerate() {
        let mut col = vec![0u64; kept.len()];
        col[k] = orders[i] % m;
        columns.push(col);
    }
    let mut mm = ModMatrix::from_columns(m, kept.len(), &columns);
    let s2 = mod_smith_matrix(&mut mm)?;
    let h: Vec<u64> = (0..kept.len())
        .map(|j| match s2.diag.get(j) {
            Some(&d) if d != 0 => d,
            _ => m,
        })
        .collect();
    let kept2 = (0..kept.len()).filter(|&j| h[j] > 1).collect();
    Ok(FactorHomology {
        modulus: m,
        cells,
        q: s1.q,
        q_inv: s1.q_inv,
        scales,
        kept,
        p2: s2.p,
        p2_inv: s2.p_inv,
        h,
        kept2,
    })
}

/// `H_n(X, A; G)` for subcomplexes `A ⊆ X` of `ambient`, one cyclic factor
/// of `G` at a time.
pub fn relative_homology(
    ambient: &CwComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    n: usize,
    g: &FiniteAbelianGroup,
) -> Result<HomologyPresentation> {
    let x = ambient.subcomplex(x.cells.clone())?;
    let a = ambient.subcomplex(a.cells.clone())?;
    if !a.is_subset(&x) {
        return Err(Error::InvalidSubcomplex(
            "relative homology needs A inside X".into(),
        ));
    }
    let mut factors = Vec::new();
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    for (f, &m) in g.orders().iter().enumerate() {
        let fh = factor_homology(ambient, &x, &a, n, m)?;
        for &j in &fh.kept2 {
            orders.push(fh.h[j]);
            let col = (0..fh.kept.len())
                .map(|k| fh.p2_inv.get(k, j))
                .collect::<Vec<u64>>();
            let mut y = vec![0u64; fh.cells.len()];
            for (k, &i) in fh.kept.iter().enumerate() {
                y[i] = (col[k] as u128 * fh.scales[i] as u128 % m as u128) as u64;
            }
            let xr = fh.q.mul_vec(&y);
            let mut chain = GChain::zero(ambient, n, g);
            for (pos, &cell) in fh.cells.iter().enumerate() {
                chain.coeffs[f][cell] = xr[pos];
            }
            generators.push(chain);
        }
        factors.push(fh);
    }
    Ok(HomologyPresentation {
        n,
        coefficients: g.clone(),
        x,
        a,
        group: FiniteAbelianGroup::new(orders)?,
        generators,
        factors,
        total_cells: ambient.cell_count(n),
    })
}

/// Absolute homology of a subcomplex.
pub fn homology(
    ambient: &CwComplex,
    x: &Subcomplex,
    n: usize,
    g: &FiniteAbelianGroup,
) -> Result<HomologyPresentation> {
    relative_homology(ambient, x, &ambient.empty_sub(), n, g)
}

impl HomologyPresentation {
    pub fn order(&self) -> u64 {
        self.group.order()
    }

    /// All classes in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.group.enumerate()
    }

    /// The class of a relative cycle. Coefficients on cells of `A` are
    /// ignored; support outside `X` or a non-cycle is an error.
    pub fn classify(&self, chain: &GChain) -> Result<GroupElement> {
        if chain.dim != self.n || chain.moduli != self.coefficients.orders() {
            return Err(Error::DimensionMismatch(format!(
                "a {}-chain cannot be classified in degree {}",
                chain.dim, self.n
            )));
        }
        if chain
            .coeffs
            .first()
            .is_some_and(|v| v.len() != self.total_cells)
        {
            return Err(Error::DimensionMismatch(
                "chain from another complex".into(),
            ));
        }
        if !chain.supported_in(&self.x) {
            return Err(Error::InvalidSubcomplex(
                "chain is not supported in X".into(),
            ));
        }
        let mut exps = Vec::new();
        for (f, fh) in self.factors.iter().enumerate() {
            let m = fh.modulus;
            let xr: Vec<u64> = fh.cells.iter().map(|&c| chain.coeffs[f][c] % m).collect();
            let y = fh.q_inv.mul_vec(&xr);
            let mut t = Vec::with_capacity(fh.kept.len());
            for (i, &yi) in y.iter().enumerate() {
                if yi % fh.scales[i] != 0 {
                    return Err(Error::InvalidSubcomplex(
                        "chain is not a relative cycle".into(),
                    ));
                }
                if fh.kept.contains(&i) {
                    t.push(yi / fh.scales[i]);
                }
            }
            let c = fh.p2.mul_vec(&t);
            for &j in &fh.kept2 {
                exps.push(c[j] % fh.h[j]);
            }
        }
        Ok(GroupElement::new(exps))
    }

    /// A relative cycle in the given class.
    pub fn representative(&self, e: &GroupElement) -> Result<GChain> {
        if !self.group.contains(e) {
            return Err(Error::GroupMismatch(format!(
                "{e} is not a class of {}",
                self.group
            )));
        }
        let mut acc = match self.generators.first() {
            Some(g) => g.scale(0),
            None => {
                return Ok(GChain {
                    dim: self.n,
                    moduli: self.coefficients.orders().to_vec(),
                    coeffs: vec![vec![0; self.total_cells]; self.coefficients.rank()],
                })
            }
        };
        for (gen, &k) in self.generators.iter().zip(&e.exps) {
            acc = acc.add(&gen.scale(k as i64))?;
        }
        Ok(acc)
    }

    /// Serializable description with generator chains by cell name.
    pub fn describe(&self, ambient: &CwComplex) -> HomologySummary {
        HomologySummary {
            dim: self.n,
            coefficients: self.coefficients.orders().to_vec(),
            orders: self.group.orders().to_vec(),
            order: self.order(),
            generators: self
                .generators
                .iter()
                .map(|g| g.named_coefficients(ambient))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub dim: usize,
    pub coefficients: Vec<u64>,
    pub orders: Vec<u64>,
    pub order: u64,
    pub generators: Vec<BTreeMap<String, Vec<u64>>>,
}

/// A homomorphism of finite abelian groups given by generator images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyMap {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub images: Vec<GroupElement>,
}

impl HomologyMap {
    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        if !self.source.contains(e) {
            return Err(Error::GroupMismatch(format!(
                "{e} is not in {}",
                self.source
            )));
        }
        let mut acc = self.target.identity();
        for (img, &k) in self.images.iter().zip(&e.exps) {
            acc = self.target.add(&acc, &self.target.scale(img, k as i64)?)?;
        }
        Ok(acc)
    }

    /// Exponent matrix: column `j` is the image of generator `j`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        (0..self.target.rank())
            .map(|r| self.images.iter().map(|img| img.exps[r]).collect())
            .collect()
    }

    /// Order of the image subgroup.
    pub fn image_order(&self) -> u64 {
        self.target
            .subgroup_generated(&self.images)
            .map(|s| s.len() as u64)
            .unwrap_or(0)
    }

    pub fn image(&self) -> Vec<GroupElement> {
        self.target
            .subgroup_generated(&self.images)
            .unwrap_or_default()
    }

    pub fn surjective(&self) -> bool {
        self.image_order() == self.target.order()
    }

    pub fn kernel_order(&self) -> u64 {
        self.source.order() / self.image_order()
    }

    pub fn injective(&self) -> bool {
        self.kernel_order() == 1
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &HomologyMap) -> Result<HomologyMap> {
        if self.target != other.source {
            return Err(Error::GroupMismatch("maps do not compose".into()));
        }
        let images = self
            .images
            .iter()
            .map(|i| other.apply(i))
            .collect::<Result<_>>()?;
        Ok(HomologyMap {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(GroupElement::is_identity)
    }
}

/// The map on homology induced by a chain-level operation applied to
/// generator representatives.
pub fn map_by_chains(
    source: &HomologyPresentation,
    target: &HomologyPresentation,
    f: impl Fn(&GChain) -> Result<GChain>,
) -> Result<HomologyMap> {
    let images = source
        .generators
        .iter()
        .map(|g| target.classify(&f(g)?))
        .collect::<Result<_>>()?;
    Ok(HomologyMap {
        source: source.group.clone(),
        target: target.group.clone(),
        images,
    })
}

/// `H_n(X1, A1) → H_n(X2, A2)` for `X1 ⊆ X2`, `A1 ⊆ A2`.
pub fn pair_inclusion(
    source: &HomologyPresentation,
    target: &HomologyPresentation,
) -> Result<HomologyMap> {
    if source.n != target.n || !source.x.is_subset(&target.x) || !source.a.is_subset(&target.a) {
        return Err(Error::InvalidSubcomplex("pairs are not nested".into()));
    }
    map_by_chains(source, target, |c| Ok(c.clone()))
}

/// `H_n(A, B) → H_n(X, B)` for `B ⊆ A ⊆ X`.
pub fn inclusion_induced(
    ambient: &CwComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    b: &Subcomplex,
    n: usize,
    g: &FiniteAbelianGroup,
) -> Result<HomologyMap> {
    if !b.is_subset(a) || !a.is_subset(x) {
        return Err(Error::InvalidSubcomplex("inclusion needs B ⊆ A ⊆ X".into()));
    }
    let source = relative_homology(ambient, a, b, n, g)?;
    let target = relative_homology(ambient, x, b, n, g)?;
    pair_inclusion(&source, &target)
}

/// `∂: H_k(X, A) → H_{k−1}(A, B)` for `B ⊆ A ⊆ X`, `k ≥ 1`.
pub fn connecting(
    ambient: &CwComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    b: &Subcomplex,
    k: usize,
    g: &FiniteAbelianGroup,
) -> Result<HomologyMap> {
    if !b.is_subset(a) || !a.is_subset(x) {
        return Err(Error::InvalidSubcomplex(
            "connecting map needs B ⊆ A ⊆ X".into(),
        ));
    }
    if k == 0 {
        return Err(Error::DimensionMismatch(
            "no connecting map out of degree 0".into(),
        ));
    }
    let source = relative_homology(ambient, x, a, k, g)?;
    let target = relative_homology(ambient, a, b, k - 1, g)?;
    map_by_chains(&source, &target, |c| c.boundary(ambient))
}

/// Boundary of a relative class, restricted to the cells of `target.x`
/// and classified there. With `Y0 ∩ Y1 = W` this realizes the components
/// of `H_{k−1}(Y0 ∪ Y1, W) ≅ H_{k−1}(Y0, W) ⊕ H_{k−1}(Y1, W)`.
pub fn restricted_connecting(
    ambient: &CwComplex,
    source: &HomologyPresentation,
    target: &HomologyPresentation,
) -> Result<HomologyMap> {
    let sub = target.x.clone();
    map_by_chains(source, target, |c| Ok(c.boundary(ambient)?.restrict(&sub)))
}

pub fn image_order(f: &HomologyMap) -> u64 {
    f.image_order()
}

pub fn surjective(f: &HomologyMap) -> bool {
    f.surjective()
}

/// A cellular map sending each cell of a domain subcomplex to `±` one cell
/// of the target complex, of the same dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMap {
    domain: Subcomplex,
    images: Vec<BTreeMap<usize, (usize, i64)>>,
    target_cells: Vec<usize>,
}

impl CellMap {
    /// Built from `source name → target name`, where a leading `-` on the
    /// target name reverses orientation. The domain is the set of mapped
    /// cells and must be a subcomplex; the map must commute with `∂`.
    pub fn from_names(
        source: &CwComplex,
        target: &CwComplex,
        names: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut images = vec![BTreeMap::new(); source.dim() + 1];
        let mut dom = vec![BTreeSet::new(); source.dim() + 1];
        for (s, t) in names {
            let (d, i) = source
                .find_cell(s)
                .ok_or_else(|| Error::InvalidGluing(format!("unknown source cell {s:?}")))?;
            let (sign, tname) = match t.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, t.as_str()),
            };
            let j = target.cell_index(d, tname).ok_or_else(|| {
                Error::InvalidGluing(format!("no {d}-cell {tname:?} in the target"))
            })?;
            images[d].insert(i, (j, sign));
            dom[d].insert(i);
        }
        let domain = source
            .subcomplex(dom)
            .map_err(|e| Error::InvalidGluing(format!("mapped cells are not a subcomplex: {e}")))?;
        let map = CellMap {
            domain,
            images,
            target_cells: (0..=target.dim()).map(|d| target.cell_count(d)).collect(),
        };
        map.check_chain_map(source, target)?;
        Ok(map)
    }

    /// A map given directly by indices.
    pub fn from_indices(
        source: &CwComplex,
        target: &CwComplex,
        images: Vec<BTreeMap<usize, (usize, i64)>>,
    ) -> Result<Self> {
        let mut images = images;
        images.resize(source.dim() + 1, BTreeMap::new());
        let dom = images.iter().map(|m| m.keys().copied().collect()).collect();
        let domain = source
            .subcomplex(dom)
            .map_err(|e| Error::InvalidGluing(format!("mapped cells are not a subcomplex: {e}")))?;
        let map = CellMap {
            domain,
            images,
            target_cells: (0..=target.dim()).map(|d| target.cell_count(d)).collect(),
        };
        map.check_chain_map(source, target)?;
        Ok(map)
    }

    fn check_chain_map(&self, source: &CwComplex, target: &CwComplex) -> Result<()> {
        for d in 1..self.images.len() {
            for (&i, &(j, sign)) in &self.images[d] {
                // f(∂σ) versus ∂f(σ)
                let mut lhs: BTreeMap<usize, i64> = BTreeMap::new();
                for (face, c) in source.faces(d, i) {
                    let (tj, ts) = self.images[d - 1][&face];
                    *lhs.entry(tj).or_insert(0) += c * ts;
                }
                let mut rhs: BTreeMap<usize, i64> = BTreeMap::new();
                for (face, c) in target.faces(d, j) {
                    *rhs.entry(face).or_insert(0) += c * sign;
                }
                lhs.retain(|_, v| *v != 0);
                rhs.retain(|_, v| *v != 0);
                if lhs != rhs {
                    return Err(Error::InvalidGluing(format!(
                        "cell map does not commute with the boundary at {}",
                        source.cells(d)[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &Subcomplex {
        &self.domain
    }

    pub fn image_of(&self, d: usize, i: usize) -> Option<(usize, i64)> {
        self.images.get(d)?.get(&i).copied()
    }

    /// Whether distinct cells have distinct images.
    pub fn is_injective(&self) -> bool {
        self.images.iter().all(|m| {
            let targets: BTreeSet<usize> = m.values().map(|&(j, _)| j).collect();
            targets.len() == m.len()
        })
    }

    /// Image cells as a set per dimension.
    pub fn image_cells(&self) -> Vec<BTreeSet<usize>> {
        self.images
            .iter()
            .map(|m| m.values().map(|&(j, _)| j).collect())
            .collect()
    }

    /// Pushes a chain supported in the domain forward; coefficients of
    /// cells with a common image add up.
    pub fn push(&self, chain: &GChain) -> Result<GChain> {
        if !chain.supported_in(&self.domain) {
            return Err(Error::InvalidGluing(
                "chain leaves the domain of the cell map".into(),
            ));
        }
        let n = self.target_cells.get(chain.dim).copied().unwrap_or(0);
        let mut coeffs = vec![vec![0u64; n]; chain.moduli.len()];
        for (f, v) in chain.coeffs.iter().enumerate() {
            let m = chain.moduli[f] as i128;
            for (i, &x) in v.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let (j, s) = self.images[chain.dim][&i];
                let cur = coeffs[f][j] as i128;
                coeffs[f][j] = (cur + s as i128 * x as i128).rem_euclid(m) as u64;
            }
        }
        Ok(GChain {
            dim: chain.dim,
            moduli: chain.moduli.clone(),
            coeffs,
        })
    }
}

/// Map on homology induced by a cell map whose domain contains `source.x`
/// and which sends `source.a` into `target.a`.
pub fn induced_by_cell_map(
    map: &CellMap,
    source: &HomologyPresentation,
    target: &HomologyPresentation,
) -> Result<HomologyMap> {
    if !source.x.is_subset(&map.domain) {
        return Err(Error::InvalidGluing(
            "cell map does not cover the source space".into(),
        ));
    }
    map_by_chains(source, target, |c| map.push(&c.restrict(&source.x)))
}
