//! Finite abelian groups and the integer linear algebra shared by the
//! homology and cohomology engines.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactring::{gcd, lcm};

/// `Π_i Z/n_i`, one cyclic generator per entry of `orders`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

/// Exponent vector `(a_1, …, a_k)` with `0 ≤ a_i < n_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub exps: Vec<u64>,
}

impl GroupElement {
    pub fn new(exps: Vec<u64>) -> Self {
        GroupElement { exps }
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidGroup(format!(
                "cyclic orders must be positive, got {orders:?}"
            )));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { orders: vec![] }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// `lcm` of the cyclic orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &n| lcm(acc, n))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    /// The `i`-th cyclic generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut exps = vec![0; self.rank()];
        exps[i] = 1 % self.orders[i];
        GroupElement::new(exps)
    }

    /// Reduces arbitrary integer exponents into canonical form.
    pub fn element(&self, exps: &[i64]) -> Result<GroupElement> {
        if exps.len() != self.rank() {
            return Err(Error::GroupMismatch(format!(
                "element has {} exponents, group has {} factors",
                exps.len(),
                self.rank()
            )));
        }
        Ok(GroupElement::new(
            exps.iter()
                .zip(&self.orders)
                .map(|(&e, &n)| e.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.exps.len() == self.rank() && a.exps.iter().zip(&self.orders).all(|(e, n)| e < n)
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!(
                "{a} is not an element of Z/{:?}",
                self.orders
            )))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement::new(
            a.exps
                .iter()
                .zip(&b.exps)
                .zip(&self.orders)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement::new(
            a.exps
                .iter()
                .zip(&self.orders)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        ))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.add(a, &self.neg(b)?)
    }

    /// `k·a`.
    pub fn scale(&self, a: &GroupElement, k: i64) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement::new(
            a.exps
                .iter()
                .zip(&self.orders)
                .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        ))
    }

    pub fn element_order(&self, a: &GroupElement) -> Result<u64> {
        self.check(a)?;
        Ok(a.exps
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&x, &n)| lcm(acc, n / gcd(n, x))))
    }

    /// Position of `a` in [`enumerate`](Self::enumerate).
    pub fn index_of(&self, a: &GroupElement) -> Result<usize> {
        self.check(a)?;
        let mut idx = 0usize;
        for (x, n) in a.exps.iter().zip(&self.orders) {
            idx = idx * (*n as usize) + *x as usize;
        }
        Ok(idx)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut exps = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let n = self.orders[i] as usize;
            exps[i] = (index % n) as u64;
            index /= n;
        }
        GroupElement::new(exps)
    }

    /// All elements in lexicographic exponent order, first factor most
    /// significant.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.order() as usize)
            .map(|i| self.element_at(i))
            .collect()
    }

    /// The subgroup generated by `gens`, sorted.
    pub fn subgroup_generated(&self, gens: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let mut seen = BTreeSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g)?;
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Direct product, factors of `self` first.
    pub fn product(&self, other: &FiniteAbelianGroup) -> FiniteAbelianGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FiniteAbelianGroup { orders }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.orders.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[Vec<i64>]) -> Result<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {rows}x{cols} matrix"
            )));
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries: data.iter().flatten().copied().collect(),
        })
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let p = a
                        .checked_mul(other.get(k, c))
                        .and_then(|p| p.checked_add(out.get(r, c)))
                        .ok_or(Error::Overflow("matrix product"))?;
                    out.set(r, c, p);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).try_fold(0i64, |acc, (&a, &b)| {
                    a.checked_mul(b)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow("matrix-vector product"))
                })
            })
            .collect()
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += k·row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for c in 0..self.cols {
            let v = k
                .checked_mul(self.get(src, c))
                .and_then(|p| p.checked_add(self.get(dst, c)))
                .ok_or(Error::Overflow("smith normal form"))?;
            self.set(dst, c, v);
        }
        Ok(())
    }

    /// `col[dst] += k·col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for r in 0..self.rows {
            let v = k
                .checked_mul(self.get(r, src))
                .and_then(|p| p.checked_add(self.get(r, dst)))
                .ok_or(Error::Overflow("smith normal form"))?;
            self.set(r, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = self.get(r, c);
            self.set(r, c, -v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = self.get(r, c);
            self.set(r, c, -v);
        }
    }
}

impl Serialize for IntegerMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `d_1 | d_2 | …` on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub v_inv: IntegerMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1, …, d_min(rows, cols)`, all non-negative.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }
}

/// Smith normal form over the integers. Pivots are chosen as the entry of
/// smallest nonzero absolute value, ties broken row-major, so the output is
/// reproducible. Fails only on `i64` overflow.
pub fn smith_normal_form(a: &IntegerMatrix) -> Result<SmithDecomposition> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut u_inv = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let mut v_inv = IntegerMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        'pivot: loop {
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let x = d.get(r, c);
                    if x != 0 && best.is_none_or(|(br, bc)| x.abs() < d.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else { break 'pivot };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            u_inv.swap_cols(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            v_inv.swap_rows(t, pc);

            let p = d.get(t, t);
            let mut dirty = false;
            for r in t + 1..rows {
                let q = d.get(r, t).div_euclid(p);
                if q != 0 {
                    d.add_row(r, t, -q)?;
                    u.add_row(r, t, -q)?;
                    u_inv.add_col(t, r, q)?;
                }
                dirty |= d.get(r, t) != 0;
            }
            for c in t + 1..cols {
                let q = d.get(t, c).div_euclid(p);
                if q != 0 {
                    d.add_col(c, t, -q)?;
                    v.add_col(c, t, -q)?;
                    v_inv.add_row(t, c, q)?;
                }
                dirty |= d.get(t, c) != 0;
            }
            if dirty {
                continue 'pivot;
            }
            // divisibility: fold an offending row into the pivot row
            for r in t + 1..rows {
                for c in t + 1..cols {
                    if d.get(r, c) % p != 0 {
                        d.add_row(t, r, 1)?;
                        u.add_row(t, r, 1)?;
                        u_inv.add_col(r, t, -1)?;
                        continue 'pivot;
                    }
                }
            }
            if p < 0 {
                d.negate_row(t);
                u.negate_row(t);
                u_inv.negate_col(t);
            }
            break 'pivot;
        }
    }
    Ok(SmithDecomposition {
        u,
        u_inv,
        d,
        v,
        v_inv,
    })
}

/// `coker(A: Z^cols → Z^rows) ≅ Π Z/d_i × Z^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cokernel {
    /// Torsion orders, all `> 1`.
    pub torsion: Vec<u64>,
    pub free_rank: usize,
    /// Generator lifts in `Z^rows`: torsion generators first, then free ones.
    pub generators: Vec<Vec<i64>>,
}

impl Cokernel {
    /// The group when the cokernel is finite.
    pub fn finite_group(&self) -> Option<FiniteAbelianGroup> {
        if self.free_rank == 0 {
            Some(FiniteAbelianGroup {
                orders: self.torsion.clone(),
            })
        } else {
            None
        }
    }
}

pub fn cokernel(a: &IntegerMatrix) -> Result<Cokernel> {
    let snf = smith_normal_form(a)?;
    let diag = snf.diagonal();
    let mut torsion = Vec::new();
    let mut generators = Vec::new();
    let mut free = Vec::new();
    for i in 0..a.rows() {
        let di = diag.get(i).copied().unwrap_or(0);
        if di == 0 {
            free.push(snf.u_inv.column(i));
        } else if di != 1 {
            torsion.push(di as u64);
            generators.push(snf.u_inv.column(i));
        }
    }
    let free_rank = free.len();
    generators.extend(free);
    Ok(Cokernel {
        torsion,
        free_rank,
        generators,
    })
}

/// Extended gcd: `(g, s, t)` with `s·a + t·b = g ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Inverse of `a` modulo `m`, if it is a unit.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(a as i64, m as i64);
    (g == 1).then(|| s.rem_euclid(m as i64) as u64)
}

/// A unit `u` modulo `m` with `u·a ≡ gcd(a, m)`.
fn normalizing_unit(a: u64, m: u64) -> u64 {
    let g = gcd(a, m);
    if g == 0 || m == 1 {
        return 1;
    }
    let mg = m / g;
    let base = if mg == 1 {
        1
    } else {
        mod_inverse((a / g) % mg, mg).expect("coprime after division")
    };
    (0..g)
        .map(|k| base + k * mg)
        .find(|&u| gcd(u, m) == 1)
        .expect("a unit lift always exists")
}

/// Dense matrix over `Z/m`, entries kept in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        ModMatrix {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_integer(a: &IntegerMatrix, modulus: u64) -> Self {
        let mut m = Self::zeros(modulus, a.rows(), a.cols());
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                m.set(r, c, a.get(r, c).rem_euclid(modulus as i64) as u64);
            }
        }
        m
    }

    pub fn from_columns(modulus: u64, rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(modulus, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, &x) in col.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.cols + c] = v % self.modulus;
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{} mod {}/{}",
                self.rows, self.cols, other.rows, other.cols, self.modulus, other.modulus
            )));
        }
        let m = self.modulus as u128;
        let mut out = Self::zeros(self.modulus, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u128;
                for k in 0..self.cols {
                    acc = (acc + self.get(r, k) as u128 * other.get(k, c) as u128) % m;
                }
                out.set(r, c, acc as u64);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u128;
                for (c, &x) in v.iter().enumerate().take(self.cols) {
                    acc = (acc + self.get(r, c) as u128 * x as u128) % m;
                }
                acc as u64
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    /// Rows `(r1, r2)` ← `[[a, b], [c, d]]·(r1, r2)`.
    fn combine_rows(&mut self, r1: usize, r2: usize, k: [[i64; 2]; 2]) {
        for c in 0..self.cols {
            let x = self.get(r1, c) as i128;
            let y = self.get(r2, c) as i128;
            let n1 = self.reduce(k[0][0] as i128 * x + k[0][1] as i128 * y);
            let n2 = self.reduce(k[1][0] as i128 * x + k[1][1] as i128 * y);
            self.set(r1, c, n1);
            self.set(r2, c, n2);
        }
    }

    /// Columns: new `c1 = a·c1 + b·c2`, new `c2 = c·c1 + d·c2`.
    fn combine_cols(&mut self, c1: usize, c2: usize, k: [[i64; 2]; 2]) {
        for r in 0..self.rows {
            let x = self.get(r, c1) as i128;
            let y = self.get(r, c2) as i128;
            let n1 = self.reduce(k[0][0] as i128 * x + k[0][1] as i128 * y);
            let n2 = self.reduce(k[1][0] as i128 * x + k[1][1] as i128 * y);
            self.set(r, c1, n1);
            self.set(r, c2, n2);
        }
    }

    fn scale_row(&mut self, r: usize, u: u64) {
        for c in 0..self.cols {
            let v = (self.get(r, c) as u128 * u as u128 % self.modulus as u128) as u64;
            self.set(r, c, v);
        }
    }

    fn scale_col(&mut self, c: usize, u: u64) {
        for r in 0..self.rows {
            let v = (self.get(r, c) as u128 * u as u128 % self.modulus as u128) as u64;
            self.set(r, c, v);
        }
    }
}

/// `P·A·Q = D` over `Z/m` with `P`, `Q` invertible and every nonzero
/// diagonal entry a divisor of `m`.
#[derive(Debug, Clone)]
pub struct ModSmith {
    pub modulus: u64,
    pub p: ModMatrix,
    pub p_inv: ModMatrix,
    pub q: ModMatrix,
    pub q_inv: ModMatrix,
    /// Diagonal of `D`, length `min(rows, cols)`; `0` for zero entries.
    pub diag: Vec<u64>,
}

impl ModSmith {
    /// `|ker A|` as a subgroup of `(Z/m)^cols`.
    pub fn kernel_order(&self) -> u128 {
        let cols = self.q.rows();
        (0..cols)
            .map(|i| match self.diag.get(i) {
                Some(&d) if d != 0 => d as u128,
                _ => self.modulus as u128,
            })
            .product()
    }

    /// `|im A|` as a subgroup of `(Z/m)^rows`.
    pub fn image_order(&self) -> u128 {
        self.diag
            .iter()
            .filter(|&&d| d != 0)
            .map(|&d| (self.modulus / d) as u128)
            .product()
    }

    /// Whether `A·z = v` has a solution.
    pub fn solvable(&self, v: &[u64]) -> bool {
        let pv = self.p.mul_vec(v);
        pv.iter().enumerate().all(|(i, &x)| match self.diag.get(i) {
            Some(&d) if d != 0 => x % d == 0,
            _ => x == 0,
        })
    }
}

/// Smith normal form over `Z/m`. The pivot is the nonzero entry of the
/// remaining block with the smallest `gcd(v, m)`, ties row-major; each
/// pivot is normalized to `gcd(pivot, m)` by a unit.
pub fn mod_smith(a: &IntegerMatrix, modulus: u64) -> Result<ModSmith> {
    if modulus == 0 {
        return Err(Error::InvalidGroup("modulus must be positive".into()));
    }
    let mut d = ModMatrix::from_integer(a, modulus);
    mod_smith_matrix(&mut d)
}

pub fn mod_smith_matrix(d: &mut ModMatrix) -> Result<ModSmith> {
    let m = d.modulus;
    let (rows, cols) = (d.rows, d.cols);
    let mut p = ModMatrix::identity(m, rows);
    let mut p_inv = ModMatrix::identity(m, rows);
    let mut q = ModMatrix::identity(m, cols);
    let mut q_inv = ModMatrix::identity(m, cols);
    let mut diag = vec![0u64; rows.min(cols)];

    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, u64)> = None;
        for r in t..rows {
            for c in t..cols {
                let x = d.get(r, c);
                if x != 0 {
                    let g = gcd(x, m);
                    if best.is_none_or(|(_, _, bg)| g < bg) {
                        best = Some((r, c, g));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        d.swap_rows(t, pr);
        p.swap_rows(t, pr);
        p_inv.swap_cols(t, pr);
        d.swap_cols(t, pc);
        q.swap_cols(t, pc);
        q_inv.swap_rows(t, pc);

        let u = normalizing_unit(d.get(t, t), m);
        let u_inv = mod_inverse(u, m).expect("normalizing factor is a unit");
        d.scale_row(t, u);
        p.scale_row(t, u);
        p_inv.scale_col(t, u_inv);

        'clear: loop {
            let piv = d.get(t, t) as i64;
            for r in t + 1..rows {
                let b = d.get(r, t) as i64;
                if b == 0 {
                    continue;
                }
                if b % piv == 0 {
                    let k = [[1, 0], [-(b / piv), 1]];
                    d.combine_rows(t, r, k);
                    p.combine_rows(t, r, k);
                    p_inv.combine_cols(t, r, [[1, b / piv], [0, 1]]);
                } else {
                    let (g, s, tt) = ext_gcd(piv, b);
                    let e = [[s, tt], [-(b / g), piv / g]];
                    d.combine_rows(t, r, e);
                    p.combine_rows(t, r, e);
                    p_inv.combine_cols(t, r, [[piv / g, b / g], [-tt, s]]);
                    continue 'clear;
                }
            }
            for c in t + 1..cols {
                let b = d.get(t, c) as i64;
                if b == 0 {
                    continue;
                }
                if b % piv == 0 {
                    d.combine_cols(c, t, [[1, -(b / piv)], [0, 1]]);
                    q.combine_cols(c, t, [[1, -(b / piv)], [0, 1]]);
                    q_inv.combine_rows(t, c, [[1, b / piv], [0, 1]]);
                } else {
                    let (g, s, tt) = ext_gcd(piv, b);
                    let f = [[s, tt], [-(b / g), piv / g]];
                    d.combine_cols(t, c, f);
                    q.combine_cols(t, c, f);
                    q_inv.combine_rows(t, c, [[piv / g, b / g], [-tt, s]]);
                    continue 'clear;
                }
            }
            break;
        }
        diag[t] = d.get(t, t);
    }
    Ok(ModSmith {
        modulus: m,
        p,
        p_inv,
        q,
        q_inv,
        diag,
    })
}
