//! The `H_n` field theory on finite CW complexes: state spaces
//! `R[H_n(Y, W; G)]` and induced maps counting relative `(n+1)`-classes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::barcohomology::max_enum_from_env;
use crate::cellular::{
    connecting, homology, induced_by_cell_map, map_by_chains, pair_inclusion, relative_homology,
    restricted_connecting, CellMap, ComplexRepr, CwComplex, GChain, HomologyPresentation,
    HomologySummary, Subcomplex,
};
use crate::corpus;
use crate::error::{Error, Result};
use crate::exactring::{CyclotomicRing, RingElement};

/// `R[H_n(Y, W; G)]` with the classes as basis, in lexicographic order.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub homology: HomologyPresentation,
    pub basis: Vec<GroupElement>,
    pub ring: Arc<CyclotomicRing>,
}

impl StateSpace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn level(&self) -> u64 {
        self.ring.level()
    }

    pub fn index_of(&self, e: &GroupElement) -> Result<usize> {
        self.homology.group.index_of(e)
    }

    /// Basis index of the class of a relative cycle.
    pub fn index_of_chain(&self, c: &GChain) -> Result<usize> {
        self.index_of(&self.homology.classify(c)?)
    }

    pub fn summary(&self, ambient: &CwComplex) -> StateSpaceSummary {
        StateSpaceSummary {
            level: self.level(),
            rank: self.rank(),
            homology: self.homology.describe(ambient),
            basis: self.basis.iter().map(|e| e.exps.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpaceSummary {
    pub level: u64,
    pub rank: usize,
    pub homology: HomologySummary,
    pub basis: Vec<Vec<u64>>,
}

pub fn state_space(
    ambient: &CwComplex,
    y: &Subcomplex,
    w: &Subcomplex,
    n: usize,
    g: &FiniteAbelianGroup,
    level: u64,
) -> Result<StateSpace> {
    let ring = CyclotomicRing::new(level)?;
    let homology = relative_homology(ambient, y, w, n, g)?;
    let basis = homology.elements();
    Ok(StateSpace {
        homology,
        basis,
        ring,
    })
}

/// A bordism `Y0 → Y1` inside `X`, with corner `W = Y0 ∩ Y1`.
#[derive(Debug, Clone)]
pub struct Bordism {
    pub ambient: CwComplex,
    pub x: Subcomplex,
    pub y0: Subcomplex,
    pub y1: Subcomplex,
    pub w: Subcomplex,
    pub n: usize,
    pub group: FiniteAbelianGroup,
    pub level: u64,
}

impl Bordism {
    pub fn new(
        ambient: &CwComplex,
        x: Subcomplex,
        y0: Subcomplex,
        y1: Subcomplex,
        n: usize,
        group: &FiniteAbelianGroup,
        level: u64,
    ) -> Result<Self> {
        CyclotomicRing::new(level)?;
        for (s, label) in [(&x, "X"), (&y0, "Y0"), (&y1, "Y1")] {
            ambient
                .subcomplex(
                    (0..s.dims())
                        .map(|d| s.cells(d).into_iter().collect())
                        .collect(),
                )
                .map_err(|e| Error::InvalidBordism(format!("{label}: {e}")))?;
        }
        if !y0.is_subset(&x) || !y1.is_subset(&x) {
            return Err(Error::InvalidBordism("both ends must lie in X".into()));
        }
        let w = y0.intersection(&y1);
        Ok(Bordism {
            ambient: ambient.clone(),
            x,
            y0,
            y1,
            w,
            n,
            group: group.clone(),
            level,
        })
    }

    pub fn source(&self) -> Result<StateSpace> {
        state_space(
            &self.ambient,
            &self.y0,
            &self.w,
            self.n,
            &self.group,
            self.level,
        )
    }

    pub fn target(&self) -> Result<StateSpace> {
        state_space(
            &self.ambient,
            &self.y1,
            &self.w,
            self.n,
            &self.group,
            self.level,
        )
    }

    /// The disjoint union of two bordisms, in `a.`/`b.` prefixed cells.
    pub fn disjoint_union(&self, other: &Bordism) -> Result<Bordism> {
        if self.n != other.n || self.group != other.group || self.level != other.level {
            return Err(Error::InvalidBordism(
                "bordisms of different theories".into(),
            ));
        }
        let u = CwComplex::disjoint_union(&self.ambient, "a.", &other.ambient, "b.")?;
        let (la, lb) = CwComplex::union_summands(&self.ambient, &other.ambient);
        let embed = |s: &Subcomplex, side: &Subcomplex, from: &CwComplex| -> Result<Subcomplex> {
            let mut cells = vec![BTreeSet::new(); u.dim() + 1];
            for (d, cd) in cells.iter_mut().enumerate() {
                let slots = side.cells(d);
                for i in s.cells(d) {
                    debug_assert!(i < from.cell_count(d));
                    cd.insert(slots[i]);
                }
            }
            u.subcomplex(cells)
        };
        let x = embed(&self.x, &la, &self.ambient)?.union(&embed(&other.x, &lb, &other.ambient)?);
        let y0 =
            embed(&self.y0, &la, &self.ambient)?.union(&embed(&other.y0, &lb, &other.ambient)?);
        let y1 =
            embed(&self.y1, &la, &self.ambient)?.union(&embed(&other.y1, &lb, &other.ambient)?);
        Bordism::new(&u, x, y0, y1, self.n, &self.group, self.level)
    }
}

/// Matrix of non-negative counts indexed by (target basis, source basis).
#[derive(Debug, Clone)]
pub struct InducedMap {
    pub source: StateSpace,
    pub target: StateSpace,
    pub counts: Vec<Vec<u64>>,
}

impl InducedMap {
    pub fn matrix(&self) -> Vec<Vec<RingElement>> {
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| RingElement::from_int(&self.source.ring, c as i64))
                    .collect()
            })
            .collect()
    }

    pub fn summary(&self, ambient: &CwComplex) -> InducedMapSummary {
        InducedMapSummary {
            source: self.source.summary(ambient),
            target: self.target.summary(ambient),
            counts: self.counts.clone(),
            matrix: self.matrix(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InducedMapSummary {
    pub source: StateSpaceSummary,
    pub target: StateSpaceSummary,
    pub counts: Vec<Vec<u64>>,
    pub matrix: Vec<Vec<RingElement>>,
}

fn check_cap(size: u64) -> Result<()> {
    let bound = max_enum_from_env();
    if size as u128 > bound {
        return Err(Error::Infeasible {
            size: size as u128,
            bound,
        });
    }
    Ok(())
}

/// `Z_X(y) = Σ_{x : ∂0 x = −y} ∂1 x` over `x ∈ H_{n+1}(X, Y0 ∪ Y1)`.
pub fn induced_hom(b: &Bordism) -> Result<InducedMap> {
    let source = b.source()?;
    let target = b.target()?;
    let ends = b.y0.union(&b.y1);
    let hx = relative_homology(&b.ambient, &b.x, &ends, b.n + 1, &b.group)?;
    check_cap(hx.order())?;
    let d0 = restricted_connecting(&b.ambient, &hx, &source.homology)?;
    let d1 = restricted_connecting(&b.ambient, &hx, &target.homology)?;
    let mut counts = vec![vec![0u64; source.rank()]; target.rank()];
    for x in hx.elements() {
        let y = source.homology.group.neg(&d0.apply(&x)?)?;
        let y1 = d1.apply(&x)?;
        counts[target.index_of(&y1)?][source.index_of(&y)?] += 1;
    }
    Ok(InducedMap {
        source,
        target,
        counts,
    })
}

/// `Z_X(y) = k · Σ {y1 : i(y1) = i(y)}` with `i` the maps into
/// `H_n(X, W)` and `k` the order of the image of `H_{n+1}(X, W)` in
/// `H_{n+1}(X, Y0 ∪ Y1)`.
pub fn induced_hom_explicit(b: &Bordism) -> Result<InducedMap> {
    let source = b.source()?;
    let target = b.target()?;
    let k = explicit_multiplicity(b)?;
    let hxw = relative_homology(&b.ambient, &b.x, &b.w, b.n, &b.group)?;
    let i0 = pair_inclusion(&source.homology, &hxw)?;
    let i1 = pair_inclusion(&target.homology, &hxw)?;
    let left: Vec<GroupElement> = source
        .basis
        .iter()
        .map(|y| i0.apply(y))
        .collect::<Result<_>>()?;
    let mut counts = vec![vec![0u64; source.rank()]; target.rank()];
    for (r, y1) in target.basis.iter().enumerate() {
        let img = i1.apply(y1)?;
        for (c, l) in left.iter().enumerate() {
            if *l == img {
                counts[r][c] = k;
            }
        }
    }
    Ok(InducedMap {
        source,
        target,
        counts,
    })
}

/// `|im(H_{n+1}(X, W) → H_{n+1}(X, Y0 ∪ Y1))|`.
pub fn explicit_multiplicity(b: &Bordism) -> Result<u64> {
    let ends = b.y0.union(&b.y1);
    let from = relative_homology(&b.ambient, &b.x, &b.w, b.n + 1, &b.group)?;
    let to = relative_homology(&b.ambient, &b.x, &ends, b.n + 1, &b.group)?;
    Ok(pair_inclusion(&from, &to)?.image_order())
}

/// Result of a surjectivity criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub holds: bool,
    pub image_order: u64,
    pub target_order: u64,
}

/// Whether `∂: H_{n+2}(X, Y1 ∪ Y2) → H_{n+1}(Y1, W)` is onto, with
/// `W = Y1 ∩ Y2`.
pub fn check_composition_criterion(
    ambient: &CwComplex,
    x: &Subcomplex,
    y1: &Subcomplex,
    y2: &Subcomplex,
    n: usize,
    g: &FiniteAbelianGroup,
) -> Result<CriterionReport> {
    let w = y1.intersection(y2);
    let source = relative_homology(ambient, x, &y1.union(y2), n + 2, g)?;
    let target = relative_homology(ambient, y1, &w, n + 1, g)?;
    let f = restricted_connecting(ambient, &source, &target)?;
    Ok(CriterionReport {
        holds: f.surjective(),
        image_order: f.image_order(),
        target_order: target.order(),
    })
}

/// Two bordisms `X1: Y0 → Y1`, `X2: Y1 → Y2` in one ambient complex
/// with `X1 ∩ X2 = Y1`, and their union.
#[derive(Debug, Clone)]
pub struct Composition {
    pub first: Bordism,
    pub second: Bordism,
    pub glued: Bordism,
}

impl Composition {
    pub fn new(first: Bordism, second: Bordism) -> Result<Self> {
        if first.ambient != second.ambient {
            return Err(Error::InvalidBordism(
                "composable bordisms must share an ambient complex".into(),
            ));
        }
        if first.y1 != second.y0 {
            return Err(Error::InvalidBordism(
                "outgoing end of the first is not the incoming end of the second".into(),
            ));
        }
        if first.x.intersection(&second.x) != first.y1 {
            return Err(Error::InvalidBordism(
                "the two pieces must meet exactly in the middle end".into(),
            ));
        }
        if first.n != second.n || first.group != second.group || first.level != second.level {
            return Err(Error::InvalidBordism(
                "bordisms of different theories".into(),
            ));
        }
        let glued = Bordism::new(
            &first.ambient,
            first.x.union(&second.x),
            first.y0.clone(),
            second.y1.clone(),
            first.n,
            &first.group,
            first.level,
        )?;
        if first.w != second.w || glued.w != first.w {
            return Err(Error::InvalidBordism("corners of the pieces differ".into()));
        }
        Ok(Composition {
            first,
            second,
            glued,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    /// Criterion on the first piece, glued along its outgoing end.
    pub first: CriterionReport,
    /// Criterion on the second piece, glued along its incoming end.
    pub second: CriterionReport,
    /// Whether the two boundary images together generate `H_{n+1}(Y1, W)`.
    pub joint_holds: bool,
    pub joint_image_order: u64,
    pub criterion_holds: bool,
    pub composite: Vec<Vec<u64>>,
    pub glued: Vec<Vec<u64>>,
    pub equal: bool,
    pub verdict: String,
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let inner = b.len();
    let cols = b.first().map(Vec::len).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).map(|k| row[k] * b[k][c]).sum())
                .collect()
        })
        .collect()
}

pub fn compose_check(c: &Composition) -> Result<CompositionReport> {
    let (b1, b2) = (&c.first, &c.second);
    let amb = &b1.ambient;
    let first = check_composition_criterion(amb, &b1.x, &b1.y1, &b1.y0, b1.n, &b1.group)?;
    let second = check_composition_criterion(amb, &b2.x, &b2.y0, &b2.y1, b2.n, &b2.group)?;
    let target = relative_homology(amb, &b1.y1, &b1.w, b1.n + 1, &b1.group)?;
    let s1 = relative_homology(amb, &b1.x, &b1.y0.union(&b1.y1), b1.n + 2, &b1.group)?;
    let s2 = relative_homology(amb, &b2.x, &b2.y0.union(&b2.y1), b2.n + 2, &b2.group)?;
    let mut gens = restricted_connecting(amb, &s1, &target)?.images;
    gens.extend(restricted_connecting(amb, &s2, &target)?.images);
    let joint_image_order = target.group.subgroup_generated(&gens)?.len() as u64;
    let joint_holds = joint_image_order == target.order();
    let composite = mat_mul(&induced_hom(b2)?.counts, &induced_hom(b1)?.counts);
    let glued = induced_hom(&c.glued)?.counts;
    let equal = composite == glued;
    let criterion_holds = first.holds || second.holds;
    let verdict = match (criterion_holds, equal) {
        (true, true) => "criterion holds; composite equals glued".to_string(),
        (true, false) => "criterion holds but composite differs from glued".to_string(),
        (false, true) => "criterion fails; composite happens to equal glued".to_string(),
        (false, false) => format!(
            "criterion fails: boundary image of order {joint_image_order} in H_{}(Y1, W) of order {}; composite differs from glued",
            b1.n + 1,
            target.order()
        ),
    };
    Ok(CompositionReport {
        first,
        second,
        joint_holds,
        joint_image_order,
        criterion_holds,
        composite,
        glued,
        equal,
        verdict,
    })
}

/// Whether `Z` of a disjoint union is the Kronecker product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TensorReport {
    pub holds: bool,
    pub left: Vec<Vec<u64>>,
    pub right: Vec<Vec<u64>>,
    pub union_rank: (usize, usize),
}

fn embed_chain(c: &GChain, total: usize, offset: usize) -> GChain {
    let coeffs = c
        .coeffs
        .iter()
        .map(|v| {
            let mut out = vec![0u64; total];
            out[offset..offset + v.len()].copy_from_slice(v);
            out
        })
        .collect();
    GChain {
        dim: c.dim,
        moduli: c.moduli.clone(),
        coeffs,
    }
}

fn pair_indices(
    u: &Bordism,
    a: &Bordism,
    sa: &StateSpace,
    sb: &StateSpace,
    su: &StateSpace,
) -> Result<Vec<usize>> {
    let n = u.n;
    let total = u.ambient.cell_count(n);
    let offset = a.ambient.cell_count(n);
    let mut out = Vec::new();
    for ea in &sa.basis {
        let ca = embed_chain(&sa.homology.representative(ea)?, total, 0);
        for eb in &sb.basis {
            let cb = embed_chain(&sb.homology.representative(eb)?, total, offset);
            out.push(su.index_of_chain(&ca.add(&cb)?)?);
        }
    }
    Ok(out)
}

pub fn tensor_check(a: &Bordism, b: &Bordism) -> Result<TensorReport> {
    let u = a.disjoint_union(b)?;
    let za = induced_hom(a)?;
    let zb = induced_hom(b)?;
    let zu = induced_hom(&u)?;
    let src = pair_indices(&u, a, &za.source, &zb.source, &zu.source)?;
    let tgt = pair_indices(&u, a, &za.target, &zb.target, &zu.target)?;
    let bijective = |v: &[usize], rank: usize| {
        v.len() == rank && v.iter().collect::<BTreeSet<_>>().len() == rank
    };
    let mut holds = bijective(&src, zu.source.rank()) && bijective(&tgt, zu.target.rank());
    if holds {
        let (rb, cb) = (zb.target.rank(), zb.source.rank());
        for (ti, &tu) in tgt.iter().enumerate() {
            for (si, &su) in src.iter().enumerate() {
                let want = za.counts[ti / rb][si / cb] * zb.counts[ti % rb][si % cb];
                holds &= zu.counts[tu][su] == want;
            }
        }
    }
    Ok(TensorReport {
        holds,
        left: za.counts,
        right: zb.counts,
        union_rank: (zu.target.rank(), zu.source.rank()),
    })
}

/// Gluing data in file form: subcomplexes are referred to by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDocument {
    pub format: String,
    pub name: String,
    pub unglued: ComplexRepr,
    pub glued: ComplexRepr,
    pub w1: String,
    pub w2: String,
    pub v: String,
    pub w: String,
    pub v_glued: String,
    /// Unglued cell → glued cell, `-` prefix for reversed orientation.
    pub quotient: BTreeMap<String, String>,
}

/// `Y` with boundary pieces `W1`, `W2`, `V`, and the complex obtained by
/// identifying `W1` with `W2`.
#[derive(Debug, Clone)]
pub struct GluingData {
    pub name: String,
    pub unglued: CwComplex,
    pub w1: Subcomplex,
    pub w2: Subcomplex,
    pub v: Subcomplex,
    pub glued: CwComplex,
    pub w: Subcomplex,
    pub v_glued: Subcomplex,
    pub quotient: CellMap,
}

impl GluingDocument {
    pub fn load(&self) -> Result<GluingData> {
        if self.format != crate::groupcat::FORMAT {
            return Err(Error::InvalidGluing(format!(
                "unsupported format {:?}",
                self.format
            )));
        }
        let unglued = CwComplex::from_repr(&self.unglued)?;
        let glued = CwComplex::from_repr(&self.glued)?;
        let quotient = CellMap::from_names(&unglued, &glued, &self.quotient)?;
        GluingData::new(
            &self.name,
            unglued.clone(),
            unglued.named(&self.w1)?,
            unglued.named(&self.w2)?,
            unglued.named(&self.v)?,
            glued.clone(),
            glued.named(&self.w)?,
            glued.named(&self.v_glued)?,
            quotient,
        )
    }
}

impl GluingData {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        unglued: CwComplex,
        w1: Subcomplex,
        w2: Subcomplex,
        v: Subcomplex,
        glued: CwComplex,
        w: Subcomplex,
        v_glued: Subcomplex,
        quotient: CellMap,
    ) -> Result<Self> {
        let err = |m: &str| Err(Error::InvalidGluing(m.to_string()));
        if *quotient.domain() != unglued.full_sub() {
            return err("the quotient must be defined on every cell");
        }
        if !w1.intersection(&w2).is_empty()
            || !w1.intersection(&v).is_empty()
            || !w2.intersection(&v).is_empty()
        {
            return err("W1, W2 and V must be pairwise disjoint");
        }
        let mut hit = vec![BTreeSet::new(); glued.dim() + 1];
        for d in 0..=unglued.dim() {
            let mut from_w1 = BTreeMap::new();
            let mut from_w2 = BTreeSet::new();
            let mut rest = BTreeSet::new();
            for i in 0..unglued.cell_count(d) {
                let (j, _) = quotient.image_of(d, i).expect("total map");
                if d > glued.dim() {
                    return err("quotient raises dimension");
                }
                hit[d].insert(j);
                if w1.contains(d, i) {
                    if !w.contains(d, j) || from_w1.insert(j, i).is_some() {
                        return err("W1 must map bijectively onto W");
                    }
                } else if w2.contains(d, i) {
                    if !w.contains(d, j) || !from_w2.insert(j) {
                        return err("W2 must map bijectively onto W");
                    }
                } else {
                    if w.contains(d, j) || !rest.insert(j) {
                        return err("cells off W1 ∪ W2 must map injectively off W");
                    }
                    if v.contains(d, i) != v_glued.contains(d, j) {
                        return err("V must map onto the glued V");
                    }
                }
            }
            let wd: BTreeSet<usize> = w.cells(d).into_iter().collect();
            if from_w1.keys().copied().collect::<BTreeSet<_>>() != wd || from_w2 != wd {
                return err("W1 and W2 must each cover W");
            }
        }
        if (0..=glued.dim())
            .any(|d| hit.get(d).map(BTreeSet::len).unwrap_or(0) != glued.cell_count(d))
        {
            return err("every glued cell must be hit");
        }
        Ok(GluingData {
            name: name.to_string(),
            unglued,
            w1,
            w2,
            v,
            glued,
            w,
            v_glued,
            quotient,
        })
    }
}

/// Algebraic versus geometric state space of a gluing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlueReport {
    pub name: String,
    pub n: usize,
    /// Basis elements `y` of `Z(Y, W1 ∪ W2 ∪ V)` with `∂_{W1} y = −∂_{W2} y`.
    pub algebraic_rank: u64,
    /// Rank of `Z(∪_W Y, V)`.
    pub geometric_rank: u64,
    pub excision_iso: bool,
    /// `j: H_n(∪Y, V) → H_n(∪Y, V ∪ W)`.
    pub j_kernel_order: u64,
    pub j_image_order: u64,
    pub image_matches: bool,
    pub iso: bool,
    /// `geometric_rank − algebraic_rank`.
    pub defect: i64,
}

pub fn glue_compare(data: &GluingData, n: usize, g: &FiniteAbelianGroup) -> Result<GlueReport> {
    let all_y = data.unglued.full_sub();
    let all_z = data.glued.full_sub();
    let ends = data.w1.union(&data.w2);
    let hy = relative_homology(&data.unglued, &all_y, &ends.union(&data.v), n, g)?;
    let hzr = relative_homology(&data.glued, &all_z, &data.w.union(&data.v_glued), n, g)?;
    let hz = relative_homology(&data.glued, &all_z, &data.v_glued, n, g)?;
    check_cap(hy.order())?;
    let phi = induced_by_cell_map(&data.quotient, &hy, &hzr)?;
    let excision_iso = phi.injective() && phi.surjective();
    let algebraic: Vec<GroupElement> = if n == 0 {
        hy.elements()
    } else {
        let hw = homology(&data.glued, &data.w, n - 1, g)?;
        let f = map_by_chains(&hy, &hw, |c| {
            data.quotient
                .push(&c.boundary(&data.unglued)?.restrict(&ends))
        })?;
        hy.elements()
            .into_iter()
            .filter(|y| f.apply(y).map(|v| v.is_identity()).unwrap_or(false))
            .collect()
    };
    let pushed: BTreeSet<GroupElement> = algebraic
        .iter()
        .map(|y| phi.apply(y))
        .collect::<Result<_>>()?;
    let j = pair_inclusion(&hz, &hzr)?;
    let image: BTreeSet<GroupElement> = j.image().into_iter().collect();
    let image_matches = pushed == image;
    let iso = excision_iso && image_matches && j.injective();
    Ok(GlueReport {
        name: data.name.clone(),
        n,
        algebraic_rank: algebraic.len() as u64,
        geometric_rank: hz.order(),
        excision_iso,
        j_kernel_order: j.kernel_order(),
        j_image_order: j.image_order(),
        image_matches,
        iso,
        defect: hz.order() as i64 - algebraic.len() as i64,
    })
}

/// Whether `∂: H_{n+1}(∪Y, V ∪ W) → H_n(V ∪ W, V)` is onto.
pub fn check_modularity_criterion(
    data: &GluingData,
    n: usize,
    g: &FiniteAbelianGroup,
) -> Result<CriterionReport> {
    let z = data.glued.full_sub();
    let vw = data.v_glued.union(&data.w);
    let f = connecting(&data.glued, &z, &vw, &data.v_glued, n + 1, g)?;
    Ok(CriterionReport {
        holds: f.surjective(),
        image_order: f.image_order(),
        target_order: f.target.order(),
    })
}

/// `Z(W × I, W × ∂I)` with the product read off the bordism
/// `W × (triangle)` from two edges to the third.
#[derive(Debug, Clone)]
pub struct CornerAlgebra {
    pub base: StateSpace,
    pub base_complex: CwComplex,
    /// `table[i][j]` is the product of basis elements `i`, `j` as counts
    /// over the basis.
    pub table: Vec<Vec<Vec<u64>>>,
}

impl CornerAlgebra {
    /// Whether `v·w = δ_{v,w} v` on the basis.
    pub fn is_pointwise(&self) -> bool {
        let r = self.base.rank();
        (0..r).all(|i| {
            (0..r).all(|j| (0..r).all(|k| self.table[i][j][k] == u64::from(i == j && j == k)))
        })
    }

    pub fn summary(&self) -> CornerAlgebraSummary {
        CornerAlgebraSummary {
            rank: self.base.rank(),
            basis: self.base.basis.iter().map(|e| e.exps.clone()).collect(),
            table: self.table.clone(),
            pointwise: self.is_pointwise(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerAlgebraSummary {
    pub rank: usize,
    pub basis: Vec<Vec<u64>>,
    pub table: Vec<Vec<Vec<u64>>>,
    pub pointwise: bool,
}

fn product_cell_map(
    source: &CwComplex,
    target: &CwComplex,
    factor: &[(&str, &str)],
    domain_filter: impl Fn(&str) -> bool,
) -> Result<CellMap> {
    let mut names = BTreeMap::new();
    for d in 0..=source.dim() {
        for cell in source.cells(d) {
            let (left, right) = cell.rsplit_once('*').expect("product cell");
            if !domain_filter(right) {
                continue;
            }
            let (_, img) = factor
                .iter()
                .find(|(a, _)| *a == right)
                .ok_or_else(|| Error::InvalidComplex(format!("no image for {right}")))?;
            names.insert(cell.clone(), format!("{left}*{img}"));
        }
    }
    CellMap::from_names(source, target, &names)
}

pub fn corner_algebra(
    w: &CwComplex,
    n: usize,
    g: &FiniteAbelianGroup,
    level: u64,
) -> Result<CornerAlgebra> {
    let i = corpus::interval();
    let t = corpus::triangle();
    let wi = CwComplex::product(w, &i)?;
    let wdi = CwComplex::product_sub(&wi, w, &w.full_sub(), &i, &i.named("dI")?)?;
    let base = state_space(&wi, &wi.full_sub(), &wdi, n, g, level)?;
    let x = CwComplex::product(w, &t)?;
    let wf = w.full_sub();
    let y0 = CwComplex::product_sub(&x, w, &wf, &t, &t.named("ab")?)?;
    let y1 = CwComplex::product_sub(&x, w, &wf, &t, &t.named("c")?)?
        .union(&CwComplex::product_sub(&x, w, &wf, &t, &t.named("p1")?)?);
    let bordism = Bordism::new(&x, x.full_sub(), y0, y1, n, g, level)?;
    let z = induced_hom(&bordism)?;
    let into_a = product_cell_map(&wi, &x, &[("v0", "p0"), ("v1", "p1"), ("e", "ea")], |_| {
        true
    })?;
    let into_b = product_cell_map(&wi, &x, &[("v0", "p1"), ("v1", "p2"), ("e", "eb")], |_| {
        true
    })?;
    let back = product_cell_map(&x, &wi, &[("p0", "v0"), ("p2", "v1"), ("ec", "e")], |r| {
        matches!(r, "p0" | "p2" | "ec")
    })?;
    let r = base.rank();
    let reps: Vec<GChain> = base
        .basis
        .iter()
        .map(|e| base.homology.representative(e))
        .collect::<Result<_>>()?;
    let outputs: Vec<usize> = z
        .target
        .basis
        .iter()
        .map(|e| {
            let rep = z.target.homology.representative(e)?;
            base.index_of_chain(&back.push(&rep)?)
        })
        .collect::<Result<_>>()?;
    let mut table = vec![vec![vec![0u64; r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            let chain = into_a.push(&reps[a])?.add(&into_b.push(&reps[b])?)?;
            let col = z.source.index_of_chain(&chain)?;
            for (row, &out) in outputs.iter().enumerate() {
                table[a][b][out] += z.counts[row][col];
            }
        }
    }
    Ok(CornerAlgebra {
        base,
        base_complex: wi,
        table,
    })
}

/// `R[g] ⋄ R[h]` read off the cone on three points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrimoduleEntry {
    pub g: GroupElement,
    pub h: GroupElement,
    /// Basis elements with first two gradings matching `g`, `h`.
    pub survivors: usize,
    pub product: Option<GroupElement>,
    /// `1×1` comparison of `R[g] ⋄ R[h]` with `R[h] ⋄ R[g]`.
    pub commuting: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrimoduleProduct {
    pub orders: Vec<u64>,
    pub entries: Vec<TrimoduleEntry>,
    /// Every product is `R[g + h]` with comparison map `[1]`.
    pub standard: bool,
}

/// The involution of `G` induced on `Z(I, ∂I)` by reversing the interval.
pub fn interval_antiinvolution(g: &FiniteAbelianGroup) -> Result<Vec<GroupElement>> {
    let i = corpus::interval();
    let flip: BTreeMap<String, String> = [("v0", "v1"), ("v1", "v0"), ("e", "-e")]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let f = CellMap::from_names(&i, &i, &flip)?;
    let h = relative_homology(&i, &i.full_sub(), &i.named("dI")?, 1, g)?;
    let m = induced_by_cell_map(&f, &h, &h)?;
    let e = i.cell_index(1, "e").expect("edge");
    g.enumerate()
        .iter()
        .map(|x| {
            let class = h.classify(&GChain::cell(&i, 1, e, x, g))?;
            Ok(h.representative(&m.apply(&class)?)?.coefficient(e))
        })
        .collect()
}

pub fn trimodule_product(g: &FiniteAbelianGroup, level: u64) -> Result<TrimoduleProduct> {
    let c = corpus::cone3();
    let all = c.full_sub();
    let p = c.named("P")?;
    let space = state_space(&c, &all, &p, 1, g, level)?;
    let del = connecting(&c, &all, &p, &c.empty_sub(), 1, g)?;
    let hp = homology(&c, &p, 0, g)?;
    let ends: Vec<usize> = ["p1", "p2", "p3"]
        .iter()
        .map(|n| c.cell_index(0, n).expect("end"))
        .collect();
    let gradings: Vec<[GroupElement; 3]> = space
        .basis
        .iter()
        .map(|y| {
            let rep = hp.representative(&del.apply(y)?)?;
            let gr = |k: usize| g.neg(&rep.coefficient(ends[k]));
            Ok([gr(0)?, gr(1)?, gr(2)?])
        })
        .collect::<Result<_>>()?;
    let iota = interval_antiinvolution(g)?;
    let swap_names: BTreeMap<String, String> = [
        ("p1", "p2"),
        ("p2", "p1"),
        ("p3", "p3"),
        ("o", "o"),
        ("e1", "e2"),
        ("e2", "e1"),
        ("e3", "e3"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    let swap = CellMap::from_names(&c, &c, &swap_names)?;
    let swapped = induced_by_cell_map(&swap, &space.homology, &space.homology)?;
    let elements = g.enumerate();
    let survivors_of = |a: usize, b: usize| -> Vec<usize> {
        (0..space.rank())
            .filter(|&k| gradings[k][0] == iota[a] && gradings[k][1] == iota[b])
            .collect()
    };
    let mut entries = Vec::new();
    let mut standard = true;
    for (a, ga) in elements.iter().enumerate() {
        for (b, gb) in elements.iter().enumerate() {
            let s = survivors_of(a, b);
            let product = (s.len() == 1).then(|| gradings[s[0]][2].clone());
            let back = survivors_of(b, a);
            let commuting = if s.len() == 1 && back.len() == 1 {
                let img = swapped.apply(&space.basis[s[0]])?;
                vec![vec![u64::from(img == space.basis[back[0]])]]
            } else {
                vec![vec![0]]
            };
            let expected = g.add(ga, gb)?;
            standard &= product.as_ref() == Some(&expected) && commuting == vec![vec![1]];
            entries.push(TrimoduleEntry {
                g: ga.clone(),
                h: gb.clone(),
                survivors: s.len(),
                product,
                commuting,
            });
        }
    }
    Ok(TrimoduleProduct {
        orders: g.orders().to_vec(),
        entries,
        standard,
    })
}

/// One bordism of a complex document, by subcomplex names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BordismSpec {
    pub space: String,
    pub incoming: String,
    pub outgoing: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub first: String,
    pub second: String,
}

/// A complex together with named bordisms and compositions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDocument {
    #[serde(flatten)]
    pub complex: ComplexRepr,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bordisms: BTreeMap<String, BordismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub compositions: BTreeMap<String, CompositionSpec>,
}

impl ComplexDocument {
    pub fn load(&self) -> Result<CwComplex> {
        CwComplex::from_repr(&self.complex)
    }

    /// Loads the complex and resolves every bordism and composition.
    pub fn validate(&self) -> Result<()> {
        let cx = self.load()?;
        let g = FiniteAbelianGroup::trivial();
        for name in self.bordisms.keys() {
            self.bordism(&cx, name, 0, &g, 1)?;
        }
        for name in self.compositions.keys() {
            self.composition(&cx, name, 0, &g, 1)?;
        }
        Ok(())
    }

    pub fn bordism(
        &self,
        cx: &CwComplex,
        name: &str,
        n: usize,
        g: &FiniteAbelianGroup,
        level: u64,
    ) -> Result<Bordism> {
        let spec = self
            .bordisms
            .get(name)
            .ok_or_else(|| Error::UnknownEntry(format!("no bordism named {name:?}")))?;
        Bordism::new(
            cx,
            cx.named(&spec.space)?,
            cx.named(&spec.incoming)?,
            cx.named(&spec.outgoing)?,
            n,
            g,
            level,
        )
    }

    pub fn composition(
        &self,
        cx: &CwComplex,
        name: &str,
        n: usize,
        g: &FiniteAbelianGroup,
        level: u64,
    ) -> Result<Composition> {
        let spec = self
            .compositions
            .get(name)
            .ok_or_else(|| Error::UnknownEntry(format!("no composition named {name:?}")))?;
        Composition::new(
            self.bordism(cx, &spec.first, n, g, level)?,
            self.bordism(cx, &spec.second, n, g, level)?,
        )
    }
}
