//! Cochains on the bar constructions `B_G` and `B²_G` in low degrees, and
//! the classification of braided group-categories by the cohomology they
//! carry.
//!
//! Cochains take values in the units of `Z[ζ_N]` and are written
//! multiplicatively. For classification the values are confined to `μ_N`
//! and the complexes become matrices over `Z/N`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::abelian::{mod_smith, FiniteAbelianGroup, GroupElement, IntegerMatrix, ModSmith};
use crate::error::{Error, Result};
use crate::exactring::{CyclotomicRing, RingElement};
use crate::groupcat::{
    enumerate_presentations, is_symmetric, Axiom, AxiomCheck, CategoryPresentation, CoherenceData,
};

/// Default bound on enumeration sizes when `GCTQFT_MAX_ENUM` is unset.
pub const DEFAULT_MAX_ENUM: u128 = 10_000_000;

/// The enumeration cap from `GCTQFT_MAX_ENUM`, or the default.
pub fn max_enum_from_env() -> u128 {
    std::env::var("GCTQFT_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

/// Formal integer combination of bar cells `(g_1, …, g_n)`.
pub type BarChain = BTreeMap<Vec<GroupElement>, i64>;

/// `∂(g_1,…,g_n) = Σ_i (−1)^i ∂_i`, where `∂_0` drops the first entry,
/// `∂_n` drops the last, and the middle faces multiply neighbours.
pub fn bar_boundary(g: &FiniteAbelianGroup, cell: &[GroupElement]) -> Result<BarChain> {
    let n = cell.len();
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "the 0-cell has no boundary".into(),
        ));
    }
    let mut out = BarChain::new();
    for i in 0..=n {
        let face: Vec<GroupElement> = if i == 0 {
            cell[1..].to_vec()
        } else if i == n {
            cell[..n - 1].to_vec()
        } else {
            let mut f = cell[..i - 1].to_vec();
            f.push(g.add(&cell[i - 1], &cell[i])?);
            f.extend_from_slice(&cell[i + 1..]);
            f
        };
        *out.entry(face).or_insert(0) += if i % 2 == 0 { 1 } else { -1 };
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// Linear extension of [`bar_boundary`].
pub fn bar_boundary_chain(g: &FiniteAbelianGroup, chain: &BarChain) -> Result<BarChain> {
    let mut out = BarChain::new();
    for (cell, &c) in chain {
        for (face, k) in bar_boundary(g, cell)? {
            *out.entry(face).or_insert(0) += c * k;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn unit_inverse(u: &RingElement) -> Result<RingElement> {
    u.inverse_root_of_unity()
        .ok_or_else(|| Error::InvalidPresentation(format!("cochain value {u} is not a unit")))
}

/// A function `G² → R`, indexed by enumeration position. Serves both as a
/// 2-cochain on `B_G` and as a 3-cochain `μ` on `B²_G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarCochain2 {
    group: FiniteAbelianGroup,
    ring: Arc<CyclotomicRing>,
    values: Vec<RingElement>,
}

pub type B2Cochain3 = BarCochain2;

impl BarCochain2 {
    pub fn new(
        group: FiniteAbelianGroup,
        ring: Arc<CyclotomicRing>,
        values: Vec<RingElement>,
    ) -> Result<Self> {
        let n = group.order() as usize;
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} pairs",
                values.len(),
                n * n
            )));
        }
        Ok(BarCochain2 {
            group,
            ring,
            values,
        })
    }

    pub fn constant_one(group: FiniteAbelianGroup, ring: Arc<CyclotomicRing>) -> Self {
        let n = group.order() as usize;
        let values = vec![RingElement::one(&ring); n * n];
        BarCochain2 {
            group,
            ring,
            values,
        }
    }

    /// Values `ζ_N^{e}` from exponents in enumeration order.
    pub fn from_exponents(
        group: FiniteAbelianGroup,
        ring: Arc<CyclotomicRing>,
        exps: &[i64],
    ) -> Result<Self> {
        let values = exps
            .iter()
            .map(|&e| RingElement::root_of_unity(&ring, e))
            .collect();
        Self::new(group, ring, values)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn at(&self, a: usize, b: usize) -> &RingElement {
        &self.values[a * self.group.order() as usize + b]
    }

    pub fn values(&self) -> &[RingElement] {
        &self.values
    }

    /// Pointwise product.
    pub fn mul(&self, other: &BarCochain2) -> Result<BarCochain2> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(
                "cochains over different groups".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.checked_mul(b))
            .collect::<Result<_>>()?;
        Ok(BarCochain2 {
            group: self.group.clone(),
            ring: Arc::clone(&self.ring),
            values,
        })
    }
}

/// A 3-cochain `α: G³ → R` on `B_G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarCochain3 {
    group: FiniteAbelianGroup,
    ring: Arc<CyclotomicRing>,
    values: Vec<RingElement>,
}

impl BarCochain3 {
    pub fn new(
        group: FiniteAbelianGroup,
        ring: Arc<CyclotomicRing>,
        values: Vec<RingElement>,
    ) -> Result<Self> {
        let n = group.order() as usize;
        if values.len() != n.pow(3) {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} triples",
                values.len(),
                n.pow(3)
            )));
        }
        Ok(BarCochain3 {
            group,
            ring,
            values,
        })
    }

    /// The associator of a presentation.
    pub fn from_presentation(p: &CategoryPresentation) -> Self {
        let data = CoherenceData::from_presentation(p);
        BarCochain3 {
            group: p.group().clone(),
            ring: Arc::clone(p.ring()),
            values: data.alpha_table().to_vec(),
        }
    }

    pub fn at(&self, a: usize, b: usize, c: usize) -> &RingElement {
        let n = self.group.order() as usize;
        &self.values[(a * n + b) * n + c]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: RingElement) {
        let n = self.group.order() as usize;
        self.values[(a * n + b) * n + c] = v;
    }

    pub fn values(&self) -> &[RingElement] {
        &self.values
    }

    fn as_coherence(&self) -> CoherenceData {
        let n = self.group.order() as usize;
        CoherenceData::from_tables(
            self.group.clone(),
            Arc::clone(&self.ring),
            self.values.clone(),
            vec![RingElement::one(&self.ring); n * n],
        )
        .expect("table sizes agree")
    }
}

/// `α(b,c,d)α(a,bc,d)α(a,b,c) = α(ab,c,d)α(a,b,cd)` on all of `G⁴`.
pub fn is_3cocycle(alpha: &BarCochain3) -> AxiomCheck {
    alpha.as_coherence().check(Axiom::Pentagon)
}

/// `(δμ)(a,b,c) = μ(b,c)μ(ab,c)^{-1}μ(a,bc)μ(a,b)^{-1}`.
pub fn coboundary_of_2cochain(mu: &BarCochain2) -> Result<BarCochain3> {
    let g = &mu.group;
    let n = g.order() as usize;
    let add = addition_table(g);
    let mut values = Vec::with_capacity(n.pow(3));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let num = mu.at(b, c) * mu.at(a, add[b * n + c]);
                let den = mu.at(add[a * n + b], c) * mu.at(a, b);
                values.push(&num * &unit_inverse(&den)?);
            }
        }
    }
    BarCochain3::new(g.clone(), Arc::clone(&mu.ring), values)
}

fn addition_table(g: &FiniteAbelianGroup) -> Vec<usize> {
    let elems = g.enumerate();
    let n = elems.len();
    let mut add = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            add[i * n + j] = g.index_of(&g.add(&elems[i], &elems[j]).unwrap()).unwrap();
        }
    }
    add
}

/// A 4-cochain on `B²_G`: `α` on the `G³` family and `σ` on the `G²`
/// family.
pub type B2Cochain4 = CoherenceData;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct B2CocycleCheck {
    pub holds: bool,
    pub pentagon: AxiomCheck,
    pub hexagon_first: AxiomCheck,
    pub hexagon_second: AxiomCheck,
}

/// Coboundary of the three 5-cell families: the pentagon and both
/// hexagon relations with `σ` in the cochain convention.
pub fn is_b2_4cocycle(c: &B2Cochain4) -> B2CocycleCheck {
    let pentagon = c.check(Axiom::Pentagon);
    let hexagon_first = c.check(Axiom::BarHexagonFirst);
    let hexagon_second = c.check(Axiom::BarHexagonSecond);
    B2CocycleCheck {
        holds: pentagon.holds && hexagon_first.holds && hexagon_second.holds,
        pentagon,
        hexagon_first,
        hexagon_second,
    }
}

/// `δμ = (δα, δσ)` with `δα` as on `B_G` and `δσ(a,b) = μ(a,b)μ(b,a)^{-1}`.
pub fn b2_coboundary(mu: &B2Cochain3) -> Result<B2Cochain4> {
    let alpha = coboundary_of_2cochain(mu)?;
    let n = mu.group.order() as usize;
    let mut sigma = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            sigma.push(mu.at(a, b) * &unit_inverse(mu.at(b, a))?);
        }
    }
    CoherenceData::from_tables(mu.group.clone(), Arc::clone(&mu.ring), alpha.values, sigma)
}

/// Which classification engine ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifyMode {
    /// Exact cohomology of the cochain complex over `Z/N`.
    Full,
    /// Enumeration of numerical presentations.
    Presentation,
    /// `Full` when it fits under the cap, otherwise `Presentation`.
    Auto,
}

impl std::str::FromStr for ClassifyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ClassifyMode::Full),
            "presentation" => Ok(ClassifyMode::Presentation),
            "auto" => Ok(ClassifyMode::Auto),
            other => Err(Error::InvalidPresentation(format!(
                "unknown mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub orders: Vec<u64>,
    pub level: u64,
    pub mode: ClassifyMode,
    pub symmetric_only: bool,
    /// Number of equivalence classes.
    pub class_count: u128,
    /// `|ker δ|` on 4-cochains (full mode only).
    pub cocycles: Option<u128>,
    /// `|im δ|` on 4-cochains (full mode only).
    pub coboundaries: Option<u128>,
    pub presentations_examined: usize,
    /// One presentation per class found, in enumeration order.
    pub representatives: Vec<CategoryPresentation>,
    /// Whether every class has a presentation among the representatives.
    pub complete: bool,
}

/// Row and column indexing for the `B²_G` cochain complex over `Z/N`.
struct B2Complex {
    n: usize,
    add: Vec<usize>,
}

impl B2Complex {
    fn new(g: &FiniteAbelianGroup) -> Self {
        B2Complex {
            n: g.order() as usize,
            add: addition_table(g),
        }
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    fn mu(&self, a: usize, b: usize) -> usize {
        a * self.n + b
    }

    fn alpha(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n + b) * self.n + c
    }

    fn sigma(&self, a: usize, b: usize) -> usize {
        self.n.pow(3) + a * self.n + b
    }

    fn c3(&self) -> usize {
        self.n.pow(2)
    }

    fn c4(&self) -> usize {
        self.n.pow(3) + self.n.pow(2)
    }

    fn c5(&self) -> usize {
        self.n.pow(4) + 2 * self.n.pow(3)
    }

    /// `δ: C³ → C⁴`.
    fn delta3(&self) -> IntegerMatrix {
        let n = self.n;
        let mut d = IntegerMatrix::zeros(self.c4(), self.c3());
        let mut bump = |r: usize, c: usize, k: i64| d.set(r, c, d.get(r, c) + k);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let r = self.alpha(a, b, c);
                    bump(r, self.mu(b, c), 1);
                    bump(r, self.mu(self.m(a, b), c), -1);
                    bump(r, self.mu(a, self.m(b, c)), 1);
                    bump(r, self.mu(a, b), -1);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let r = self.sigma(a, b);
                bump(r, self.mu(a, b), 1);
                bump(r, self.mu(b, a), -1);
            }
        }
        d
    }

    /// `δ: C⁴ → C⁵`: pentagon rows, then both hexagon families.
    fn delta4(&self) -> IntegerMatrix {
        let n = self.n;
        let mut d = IntegerMatrix::zeros(self.c5(), self.c4());
        let mut bump = |r: usize, c: usize, k: i64| d.set(r, c, d.get(r, c) + k);
        let mut row = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        bump(row, self.alpha(b, c, e), 1);
                        bump(row, self.alpha(a, self.m(b, c), e), 1);
                        bump(row, self.alpha(a, b, c), 1);
                        bump(row, self.alpha(self.m(a, b), c, e), -1);
                        bump(row, self.alpha(a, b, self.m(c, e)), -1);
                        row += 1;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    bump(row, self.alpha(a, b, c), 1);
                    bump(row, self.alpha(b, a, c), -1);
                    bump(row, self.alpha(b, c, a), 1);
                    bump(row, self.sigma(a, c), 1);
                    bump(row, self.sigma(a, self.m(b, c)), -1);
                    bump(row, self.sigma(a, b), 1);
                    row += 1;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    bump(row, self.alpha(a, b, c), 1);
                    bump(row, self.alpha(a, c, b), -1);
                    bump(row, self.alpha(c, a, b), 1);
                    bump(row, self.sigma(b, c), -1);
                    bump(row, self.sigma(self.m(a, b), c), 1);
                    bump(row, self.sigma(a, c), -1);
                    row += 1;
                }
            }
        }
        d
    }

    /// Rows `σ(a,b) + σ(b,a)` cutting out symmetric cochains.
    fn symmetry_rows(&self) -> IntegerMatrix {
        let n = self.n;
        let mut d = IntegerMatrix::zeros(n * n, self.c4());
        for a in 0..n {
            for b in 0..n {
                let r = a * n + b;
                d.set(r, self.sigma(a, b), d.get(r, self.sigma(a, b)) + 1);
                d.set(r, self.sigma(b, a), d.get(r, self.sigma(b, a)) + 1);
            }
        }
        d
    }
}

fn stack(top: &IntegerMatrix, bottom: &IntegerMatrix) -> IntegerMatrix {
    let mut out = IntegerMatrix::zeros(top.rows() + bottom.rows(), top.cols());
    for r in 0..top.rows() {
        for c in 0..top.cols() {
            out.set(r, c, top.get(r, c));
        }
    }
    for r in 0..bottom.rows() {
        for c in 0..bottom.cols() {
            out.set(top.rows() + r, c, bottom.get(r, c));
        }
    }
    out
}

/// The `B²_G` cochain differentials `δ³`, `δ⁴` as integer matrices, with
/// columns ordered as μ-cells, then α-cells followed by σ-cells.
pub fn b2_differentials(g: &FiniteAbelianGroup) -> (IntegerMatrix, IntegerMatrix) {
    let cx = B2Complex::new(g);
    (cx.delta3(), cx.delta4())
}

/// Exponent vector in `(Z/N)^{C⁴}` of a presentation's cocycle, or `None`
/// when a value is not a power of `ζ_N`.
fn cocycle_vector(p: &CategoryPresentation, cx: &B2Complex) -> Option<Vec<u64>> {
    let data = CoherenceData::from_presentation(p);
    let mut v = vec![0u64; cx.c4()];
    let n = cx.n;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                v[cx.alpha(a, b, c)] = data.alpha_at(a, b, c).root_exponent()?;
            }
            v[cx.sigma(a, b)] = data.sigma_at(a, b).root_exponent()?;
        }
    }
    Some(v)
}

/// Size bookkeeping used for the feasibility decision.
pub fn full_mode_size(g: &FiniteAbelianGroup) -> u128 {
    let n = g.order() as u128;
    (n.pow(4) + 2 * n.pow(3)) * (n.pow(3) + n.pow(2))
}

pub fn presentation_mode_size(g: &FiniteAbelianGroup, level: u64) -> u128 {
    let k = g.rank() as u32;
    (level as u128).saturating_pow(k + k * k.saturating_sub(1) / 2)
}

pub fn classify_braided(
    g: &FiniteAbelianGroup,
    level: u64,
    mode: ClassifyMode,
    cap: u128,
) -> Result<ClassificationReport> {
    classify(g, level, mode, cap, false)
}

/// Braided classes whose double braiding `σ(a,b)σ(b,a)` is trivial.
pub fn classify_symmetric(
    g: &FiniteAbelianGroup,
    level: u64,
    mode: ClassifyMode,
    cap: u128,
) -> Result<ClassificationReport> {
    classify(g, level, mode, cap, true)
}

fn classify(
    g: &FiniteAbelianGroup,
    level: u64,
    mode: ClassifyMode,
    cap: u128,
    symmetric_only: bool,
) -> Result<ClassificationReport> {
    CyclotomicRing::new(level)?;
    let full = full_mode_size(g);
    let pres = presentation_mode_size(g, level);
    let mode = match mode {
        ClassifyMode::Auto if full <= cap => ClassifyMode::Full,
        ClassifyMode::Auto => ClassifyMode::Presentation,
        m => m,
    };
    match mode {
        ClassifyMode::Full if full > cap => {
            return Err(Error::Infeasible {
                size: full,
                bound: cap,
            })
        }
        ClassifyMode::Presentation if pres > cap => {
            return Err(Error::Infeasible {
                size: pres,
                bound: cap,
            })
        }
        _ => {}
    }
    let mut presentations = enumerate_presentations(g, level)?;
    if symmetric_only {
        presentations.retain(is_symmetric);
    }
    let examined = presentations.len();
    if mode == ClassifyMode::Presentation {
        return Ok(ClassificationReport {
            orders: g.orders().to_vec(),
            level,
            mode,
            symmetric_only,
            class_count: examined as u128,
            cocycles: None,
            coboundaries: None,
            presentations_examined: examined,
            representatives: presentations,
            complete: true,
        });
    }

    let cx = B2Complex::new(g);
    let d3 = cx.delta3();
    let mut d4 = cx.delta4();
    if symmetric_only {
        d4 = stack(&d4, &cx.symmetry_rows());
    }
    let kernel = mod_smith(&d4, level)?.kernel_order();
    let image_snf = mod_smith(&d3, level)?;
    let image = image_snf.image_order();
    let class_count = kernel / image;

    let mut reps: Vec<(CategoryPresentation, Vec<u64>)> = Vec::new();
    for p in presentations {
        let Some(v) = cocycle_vector(&p, &cx) else {
            continue;
        };
        let known = reps
            .iter()
            .any(|(_, r)| same_class(&image_snf, &v, r, level));
        if !known {
            reps.push((p, v));
        }
    }
    let complete = reps.len() as u128 == class_count;
    Ok(ClassificationReport {
        orders: g.orders().to_vec(),
        level,
        mode,
        symmetric_only,
        class_count,
        cocycles: Some(kernel),
        coboundaries: Some(image),
        presentations_examined: examined,
        representatives: reps.into_iter().map(|(p, _)| p).collect(),
        complete,
    })
}

fn same_class(d3: &ModSmith, v: &[u64], w: &[u64], level: u64) -> bool {
    let diff: Vec<u64> = v
        .iter()
        .zip(w)
        .map(|(&x, &y)| (x + level - y) % level)
        .collect();
    d3.solvable(&diff)
}

/// Whether two presentations over the same group and level give
/// cohomologous `B²_G` cocycles. Both must take values in `μ_N`.
pub fn cohomologous(p: &CategoryPresentation, q: &CategoryPresentation) -> Result<bool> {
    if p.group() != q.group() || p.level() != q.level() {
        return Err(Error::GroupMismatch(
            "presentations over different data".into(),
        ));
    }
    let cx = B2Complex::new(p.group());
    let level = p.level();
    let v = cocycle_vector(p, &cx)
        .ok_or_else(|| Error::InvalidPresentation("values outside μ_N".into()))?;
    let w = cocycle_vector(q, &cx)
        .ok_or_else(|| Error::InvalidPresentation("values outside μ_N".into()))?;
    let d3 = mod_smith(&cx.delta3(), level)?;
    Ok(same_class(&d3, &v, &w, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcat::check_order_conditions;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn grp(orders: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(orders.to_vec()).unwrap()
    }

    fn ring(n: u64) -> Arc<CyclotomicRing> {
        CyclotomicRing::new(n).unwrap()
    }

    fn random_mu(g: &FiniteAbelianGroup, level: u64, rng: &mut impl Rng) -> BarCochain2 {
        let n = g.order() as usize;
        let exps: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..level as i64)).collect();
        BarCochain2::from_exponents(g.clone(), ring(level), &exps).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let g = grp(&[3]);
        let a = GroupElement::new(vec![1]);
        let b = GroupElement::new(vec![2]);
        assert!(bar_boundary(&g, std::slice::from_ref(&a)).unwrap().is_empty());
        let d = bar_boundary(&g, &[a.clone(), b.clone()]).unwrap();
        let mut expected = BarChain::new();
        expected.insert(vec![b.clone()], 1);
        expected.insert(vec![g.identity()], -1);
        expected.insert(vec![a.clone()], 1);
        assert_eq!(d, expected);
    }

    #[test]
    fn boundary_squares_to_zero() {
        for orders in [
            vec![2],
            vec![3],
            vec![4],
            vec![5],
            vec![6],
            vec![2, 2],
            vec![2, 3],
        ] {
            let g = grp(&orders);
            let elems = g.enumerate();
            for len in 2..=4usize {
                let total = elems.len().pow(len as u32);
                for idx in 0..total {
                    let mut r = idx;
                    let cell: Vec<GroupElement> = (0..len)
                        .map(|_| {
                            let e = elems[r % elems.len()].clone();
                            r /= elems.len();
                            e
                        })
                        .collect();
                    let d = bar_boundary(&g, &cell).unwrap();
                    assert!(
                        bar_boundary_chain(&g, &d).unwrap().is_empty(),
                        "{orders:?} {cell:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let g = grp(&[2]);
        let one = BarCochain2::constant_one(g.clone(), ring(4));
        let d = coboundary_of_2cochain(&one).unwrap();
        assert!(d.values().iter().all(RingElement::is_one));
        assert!(is_3cocycle(&d).holds);
        let p = CategoryPresentation::from_root_exponents(g.clone(), 4, &[1], &[]).unwrap();
        let mut alpha = BarCochain3::from_presentation(&p);
        assert!(is_3cocycle(&alpha).holds);
        let v = -alpha.at(0, 1, 1).clone();
        alpha.set(0, 1, 1, v);
        assert!(!is_3cocycle(&alpha).holds);
    }

    #[test]
    fn single_value_coboundary() {
        let g = grp(&[2]);
        // μ = ζ on (g,g) only
        let mu = BarCochain2::from_exponents(g, ring(4), &[0, 0, 0, 1]).unwrap();
        let d = coboundary_of_2cochain(&mu).unwrap();
        assert!(is_3cocycle(&d).holds);
        // δμ(g,g,g) = μ(g,g)μ(0,g)^{-1}μ(g,0)μ(g,g)^{-1} = 1
        assert!(d.at(1, 1, 1).is_one());
        // δμ(0,g,g) = μ(g,g)μ(g,g)^{-1}μ(0,0)μ(0,g)^{-1} = 1
        assert!(d.at(0, 1, 1).is_one());
        // δμ(g,g,0) = μ(g,0)μ(0,0)^{-1}μ(g,g)μ(g,g)^{-1} = 1
        assert!(d.at(1, 1, 0).is_one());
        // δμ(g,0,g) = μ(0,g)μ(g,g)^{-1}μ(g,g)μ(g,0)^{-1} = 1
        assert!(d.at(1, 0, 1).is_one());
    }

    #[test]
    fn b2_examples() {
        let g = grp(&[2]);
        let one = BarCochain2::constant_one(g.clone(), ring(4));
        let c = b2_coboundary(&one).unwrap();
        assert!(c
            .alpha_table()
            .iter()
            .chain(c.sigma_table())
            .all(RingElement::is_one));
        assert!(is_b2_4cocycle(&c).holds);
        let sym = BarCochain2::from_exponents(g.clone(), ring(4), &[1, 2, 2, 3]).unwrap();
        let c = b2_coboundary(&sym).unwrap();
        assert!(c.sigma_table().iter().all(RingElement::is_one));
        let p = CategoryPresentation::from_root_exponents(g, 4, &[1], &[]).unwrap();
        let mut data = CoherenceData::from_presentation(&p);
        assert!(is_b2_4cocycle(&data).holds);
        let v = -data.sigma_at(0, 1).clone();
        data.set_sigma(0, 1, v);
        assert!(!is_b2_4cocycle(&data).holds);
    }

    #[test]
    fn coboundary_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = grp(&[2, 2]);
        for _ in 0..20 {
            let m1 = random_mu(&g, 4, &mut rng);
            let m2 = random_mu(&g, 4, &mut rng);
            let lhs = coboundary_of_2cochain(&m1.mul(&m2).unwrap()).unwrap();
            let d1 = coboundary_of_2cochain(&m1).unwrap();
            let d2 = coboundary_of_2cochain(&m2).unwrap();
            let rhs: Vec<RingElement> = d1
                .values()
                .iter()
                .zip(d2.values())
                .map(|(a, b)| a * b)
                .collect();
            assert_eq!(lhs.values(), &rhs[..]);
        }
    }

    #[test]
    fn delta_squared_is_zero() {
        for orders in [
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![2, 2],
            vec![5],
            vec![6],
            vec![2, 3],
        ] {
            let g = grp(&orders);
            let (d3, d4) = b2_differentials(&g);
            assert!(d4.mul(&d3).unwrap().is_zero(), "{orders:?}");
        }
    }

    #[test]
    fn differentials_match_multiplicative_checks() {
        // a presentation's exponent vector lies in ker δ⁴
        let g = grp(&[2, 2]);
        let cx = B2Complex::new(&g);
        let d4 = cx.delta4();
        for p in enumerate_presentations(&g, 4).unwrap() {
            let v: Vec<i64> = cocycle_vector(&p, &cx)
                .unwrap()
                .into_iter()
                .map(|x| x as i64)
                .collect();
            let w = d4.mul_vec(&v).unwrap();
            assert!(w.iter().all(|x| x.rem_euclid(4) == 0));
        }
    }

    #[test]
    fn presentations_are_b2_cocycles() {
        for (orders, level) in [
            (vec![2], 4),
            (vec![3], 6),
            (vec![4], 8),
            (vec![2, 2], 4),
            (vec![2, 3], 12),
            (vec![6], 12),
        ] {
            let g = grp(&orders);
            for p in enumerate_presentations(&g, level).unwrap() {
                assert!(check_order_conditions(&p).valid);
                let r = is_b2_4cocycle(&CoherenceData::from_presentation(&p));
                assert!(r.holds, "{p}");
            }
        }
    }

    #[test]
    fn coboundaries_are_cocycles_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let groups = [
            grp(&[2]),
            grp(&[3]),
            grp(&[4]),
            grp(&[2, 2]),
            grp(&[5]),
            grp(&[6]),
        ];
        for i in 0..120 {
            let g = &groups[i % groups.len()];
            let level = [4u64, 6, 8, 12][i % 4];
            let mu = random_mu(g, level, &mut rng);
            assert!(is_3cocycle(&coboundary_of_2cochain(&mu).unwrap()).holds);
            assert!(is_b2_4cocycle(&b2_coboundary(&mu).unwrap()).holds);
        }
    }

    fn classes(orders: &[u64], level: u64) -> ClassificationReport {
        classify_braided(&grp(orders), level, ClassifyMode::Full, DEFAULT_MAX_ENUM).unwrap()
    }

    #[test]
    fn classification_counts() {
        let r = classes(&[2], 4);
        assert_eq!(r.class_count, 4);
        assert!(r.complete);
        assert_eq!(r.representatives.len(), 4);
        assert_eq!(classes(&[], 4).class_count, 1);
        assert_eq!(classes(&[3], 3).class_count, 3);
        assert_eq!(classes(&[3], 6).class_count, 3);
        let r = classes(&[4], 8);
        assert_eq!(r.class_count, 8);
        assert!(r.complete);
    }

    #[test]
    fn symmetric_counts() {
        let cap = DEFAULT_MAX_ENUM;
        let r = classify_symmetric(&grp(&[2]), 4, ClassifyMode::Full, cap).unwrap();
        assert_eq!(r.class_count, 2);
        assert!(r.complete);
        assert_eq!(
            classify_symmetric(&grp(&[]), 4, ClassifyMode::Full, cap)
                .unwrap()
                .class_count,
            1
        );
        assert_eq!(
            classify_symmetric(&grp(&[3]), 3, ClassifyMode::Full, cap)
                .unwrap()
                .class_count,
            1
        );
        let r = classify_symmetric(&grp(&[2]), 4, ClassifyMode::Presentation, cap).unwrap();
        assert_eq!(r.class_count, 2);
    }

    #[test]
    fn presentation_mode_agrees() {
        for (orders, level) in [(vec![2], 4), (vec![3], 3), (vec![4], 8), (vec![2, 2], 4)] {
            let g = grp(&orders);
            let full = classify_braided(&g, level, ClassifyMode::Full, DEFAULT_MAX_ENUM).unwrap();
            let pres =
                classify_braided(&g, level, ClassifyMode::Presentation, DEFAULT_MAX_ENUM).unwrap();
            assert_eq!(full.class_count, pres.class_count, "{orders:?}");
            assert!(full.complete);
        }
    }

    #[test]
    fn infeasible_is_refused() {
        let g = grp(&[4]);
        let e = classify_braided(&g, 8, ClassifyMode::Full, 100).unwrap_err();
        assert!(matches!(e, Error::Infeasible { .. }));
        let r = classify_braided(&g, 8, ClassifyMode::Auto, 100).unwrap();
        assert_eq!(r.mode, ClassifyMode::Presentation);
        assert!(classify_braided(&g, 8, ClassifyMode::Presentation, 4).is_err());
    }

    // Independent oracle: all 4-cochains over Z/2 at level 2, cocycle test by
    // the multiplicative identities, classes as orbits under coboundaries.
    #[test]
    fn brute_force_z2_level2() {
        let g = grp(&[2]);
        let r = ring(2);
        let val = |bit: u32| RingElement::root_of_unity(&r, bit as i64);
        let mut cocycles = Vec::new();
        for bits in 0u32..(1 << 12) {
            let alpha: Vec<RingElement> = (0..8).map(|i| val((bits >> i) & 1)).collect();
            let sigma: Vec<RingElement> = (8..12).map(|i| val((bits >> i) & 1)).collect();
            let data = CoherenceData::from_tables(g.clone(), Arc::clone(&r), alpha, sigma).unwrap();
            if is_b2_4cocycle(&data).holds {
                cocycles.push(bits);
            }
        }
        let mut boundaries = HashSet::new();
        for mbits in 0u32..16 {
            let exps: Vec<i64> = (0..4).map(|i| ((mbits >> i) & 1) as i64).collect();
            let mu = BarCochain2::from_exponents(g.clone(), Arc::clone(&r), &exps).unwrap();
            let c = b2_coboundary(&mu).unwrap();
            let mut bits = 0u32;
            for (i, v) in c.alpha_table().iter().chain(c.sigma_table()).enumerate() {
                if !v.is_one() {
                    bits |= 1 << i;
                }
            }
            boundaries.insert(bits);
        }
        assert_eq!(cocycles.len() % boundaries.len(), 0);
        let brute = cocycles.len() / boundaries.len();
        assert_eq!(brute, 2);
        assert_eq!(classes(&[2], 2).class_count, brute as u128);
    }

    #[test]
    fn distinct_presentations_are_not_cohomologous() {
        let g = grp(&[2, 2]);
        let all = enumerate_presentations(&g, 4).unwrap();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                assert!(!cohomologous(p, q).unwrap(), "{p} ~ {q}");
            }
            assert!(cohomologous(p, p).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn twisting_by_coboundary_preserves_class(seed in any::<u64>(), pick in 0usize..8) {
            let g = grp(&[4]);
            let all = enumerate_presentations(&g, 8).unwrap();
            let p = &all[pick % all.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mu = random_mu(&g, 8, &mut rng);
            let b = b2_coboundary(&mu).unwrap();
            let c = CoherenceData::from_presentation(p);
            let twisted_alpha: Vec<RingElement> = c.alpha_table().iter().zip(b.alpha_table()).map(|(x, y)| x * y).collect();
            let twisted_sigma: Vec<RingElement> = c.sigma_table().iter().zip(b.sigma_table()).map(|(x, y)| x * y).collect();
            let t = CoherenceData::from_tables(g.clone(), Arc::clone(p.ring()), twisted_alpha, twisted_sigma).unwrap();
            prop_assert!(is_b2_4cocycle(&t).holds);
        }
    }
}
