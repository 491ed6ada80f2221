//! Numerical presentations of braided group-categories.
//!
//! A presentation fixes a finite abelian group `G = Π Z/n_i` together with
//! roots of unity `σ_i` and `σ_{i,j}` (`i > j`). The associator and the
//! braiding on simple objects are then given by closed forms, and all
//! coherence axioms can be checked exhaustively.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::exactring::{gcd, lcm, CyclotomicRing, RingElement};

pub const FORMAT: &str = "gctqft/1";

/// Group, ring level and the invariants `σ_i`, `σ_{i,j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryPresentation {
    group: FiniteAbelianGroup,
    ring: Arc<CyclotomicRing>,
    sigma_diag: Vec<RingElement>,
    /// Keyed by zero-based `(i, j)` with `i > j`; absent pairs are 1.
    sigma_off: BTreeMap<(usize, usize), RingElement>,
}

impl CategoryPresentation {
    pub fn new(
        group: FiniteAbelianGroup,
        level: u64,
        sigma_diag: Vec<RingElement>,
        sigma_off: BTreeMap<(usize, usize), RingElement>,
    ) -> Result<Self> {
        let ring = CyclotomicRing::new(level)?;
        let k = group.rank();
        if sigma_diag.len() != k {
            return Err(Error::InvalidPresentation(format!(
                "{} diagonal invariants for {} cyclic factors",
                sigma_diag.len(),
                k
            )));
        }
        for s in sigma_diag.iter().chain(sigma_off.values()) {
            if s.level() != level {
                return Err(Error::LevelMismatch {
                    left: level,
                    right: s.level(),
                });
            }
        }
        for &(i, j) in sigma_off.keys() {
            if i >= k || j >= i {
                return Err(Error::InvalidPresentation(format!(
                    "off-diagonal invariant ({},{}) needs {} >= i > j >= 1",
                    i + 1,
                    j + 1,
                    k
                )));
            }
        }
        Ok(CategoryPresentation {
            group,
            ring,
            sigma_diag,
            sigma_off,
        })
    }

    /// All invariants given as exponents of `ζ_N`.
    pub fn from_root_exponents(
        group: FiniteAbelianGroup,
        level: u64,
        diag: &[i64],
        off: &[((usize, usize), i64)],
    ) -> Result<Self> {
        let ring = CyclotomicRing::new(level)?;
        let sigma_diag = diag
            .iter()
            .map(|&e| RingElement::root_of_unity(&ring, e))
            .collect();
        let sigma_off = off
            .iter()
            .map(|&(key, e)| (key, RingElement::root_of_unity(&ring, e)))
            .collect();
        Self::new(group, level, sigma_diag, sigma_off)
    }

    /// Every braiding trivial.
    pub fn trivial(group: FiniteAbelianGroup, level: u64) -> Result<Self> {
        let diag = vec![0; group.rank()];
        Self::from_root_exponents(group, level, &diag, &[])
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn level(&self) -> u64 {
        self.ring.level()
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    pub fn sigma_diag(&self) -> &[RingElement] {
        &self.sigma_diag
    }

    pub fn sigma_off(&self) -> &BTreeMap<(usize, usize), RingElement> {
        &self.sigma_off
    }

    /// `σ_{i,j}` for `i > j`, 1 when not given.
    pub fn sigma_off_pair(&self, i: usize, j: usize) -> RingElement {
        self.sigma_off
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| RingElement::one(&self.ring))
    }

    pub fn one(&self) -> RingElement {
        RingElement::one(&self.ring)
    }
}

impl fmt::Display for CategoryPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ level {}: ", self.group, self.level())?;
        for (i, s) in self.sigma_diag.iter().enumerate() {
            write!(f, "s{}={} ", i + 1, s)?;
        }
        for ((i, j), s) in &self.sigma_off {
            write!(f, "s{},{}={} ", i + 1, j + 1, s)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    #[serde(default = "default_format")]
    format: String,
    orders: Vec<u64>,
    level: u64,
    sigma_diag: Vec<RingElement>,
    #[serde(default)]
    sigma_off: BTreeMap<String, RingElement>,
}

fn default_format() -> String {
    FORMAT.to_string()
}

impl Serialize for CategoryPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationRepr {
            format: FORMAT.to_string(),
            orders: self.group.orders().to_vec(),
            level: self.level(),
            sigma_diag: self.sigma_diag.clone(),
            sigma_off: self
                .sigma_off
                .iter()
                .map(|((i, j), v)| (format!("{},{}", i + 1, j + 1), v.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CategoryPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PresentationRepr::deserialize(d)?;
        if repr.format != FORMAT {
            return Err(D::Error::custom(format!(
                "unsupported format {:?}",
                repr.format
            )));
        }
        let group = FiniteAbelianGroup::new(repr.orders).map_err(D::Error::custom)?;
        let mut off = BTreeMap::new();
        for (key, v) in repr.sigma_off {
            let parts: Vec<&str> = key.split(',').map(str::trim).collect();
            let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[i, j]) if i >= 1 && j >= 1 => {
                    off.insert((i - 1, j - 1), v);
                }
                _ => return Err(D::Error::custom(format!("bad sigma_off key {key:?}"))),
            }
        }
        CategoryPresentation::new(group, repr.level, repr.sigma_diag, off).map_err(D::Error::custom)
    }
}

/// Outcome of the order conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

pub fn check_order_conditions(p: &CategoryPresentation) -> OrderReport {
    let orders = p.group.orders();
    let mut violations = Vec::new();
    for (i, s) in p.sigma_diag.iter().enumerate() {
        let n = orders[i];
        if !s.pow(2 * n).is_one() {
            violations.push(format!("s{}^{} = {} != 1", i + 1, 2 * n, s.pow(2 * n)));
        }
        if n % 2 == 1 && !s.pow(n).is_one() {
            violations.push(format!("s{}^{} = {} != 1 (odd order)", i + 1, n, s.pow(n)));
        }
    }
    for (&(i, j), s) in &p.sigma_off {
        for (idx, n) in [(i, orders[i]), (j, orders[j])] {
            if !s.pow(n).is_one() {
                violations.push(format!(
                    "s{},{}^{} = {} != 1 (order of g{})",
                    i + 1,
                    j + 1,
                    n,
                    s.pow(n),
                    idx + 1
                ));
            }
        }
    }
    OrderReport {
        valid: violations.is_empty(),
        violations,
    }
}

fn require_valid(p: &CategoryPresentation) -> Result<()> {
    let r = check_order_conditions(p);
    if r.valid {
        Ok(())
    } else {
        Err(Error::InvalidPresentation(r.violations.join("; ")))
    }
}

fn alpha_unchecked(
    p: &CategoryPresentation,
    a: &GroupElement,
    b: &GroupElement,
    c: &GroupElement,
) -> RingElement {
    let mut acc = p.one();
    for (i, &n) in p.group.orders().iter().enumerate() {
        if b.exps[i] + c.exps[i] >= n && a.exps[i] != 0 {
            acc = &acc * &p.sigma_diag[i].pow(n * a.exps[i]);
        }
    }
    acc
}

fn sigma_unchecked(p: &CategoryPresentation, a: &GroupElement, b: &GroupElement) -> RingElement {
    let k = p.group.rank();
    let mut acc = p.one();
    for i in 0..k {
        for j in i..k {
            let e = a.exps[i] * b.exps[j];
            if e == 0 {
                continue;
            }
            let base = if i == j {
                p.sigma_diag[i].clone()
            } else {
                p.sigma_off_pair(j, i)
            };
            acc = &acc * &base.pow(e);
        }
    }
    acc
}

fn check_elements(p: &CategoryPresentation, elems: &[&GroupElement]) -> Result<()> {
    for e in elems {
        if !p.group.contains(e) {
            return Err(Error::GroupMismatch(format!("{e} is not in {}", p.group)));
        }
    }
    Ok(())
}

/// The associator `(ab)c → a(bc)`:
/// `Π_i [b_i + c_i ≥ n_i ? σ_i^{n_i a_i} : 1]`.
pub fn alpha(
    p: &CategoryPresentation,
    a: &GroupElement,
    b: &GroupElement,
    c: &GroupElement,
) -> Result<RingElement> {
    require_valid(p)?;
    check_elements(p, &[a, b, c])?;
    Ok(alpha_unchecked(p, a, b, c))
}

/// The braiding `ab → ba`: `Π_{i≤j} σ_{i,j}^{a_i b_j}` with `σ_{i,i} = σ_i`.
pub fn sigma_pair(
    p: &CategoryPresentation,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<RingElement> {
    require_valid(p)?;
    check_elements(p, &[a, b])?;
    Ok(sigma_unchecked(p, a, b))
}

/// Identities the coherence checker knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `α(b,c,d)α(a,bc,d)α(a,b,c) = α(ab,c,d)α(a,b,cd)`
    Pentagon,
    /// `α(b,c,a)σ(a,bc)α(a,b,c) = σ(a,c)α(b,a,c)σ(a,b)`
    HexagonFirst,
    /// `σ(ab,c)α(a,c,b) = σ(a,c)σ(b,c)α(c,a,b)α(a,b,c)`
    HexagonSecond,
    /// `σ(ab,ab) = σ(a,a)σ(b,b)σ(a,b)σ(b,a)`
    Balance,
    /// `σ(a,b)σ(b,a) = 1`
    Symmetry,
    /// `α(a,b,c)α(b,c,a)σ(a,c)σ(a,b) = α(b,a,c)σ(a,bc)`
    BarHexagonFirst,
    /// `α(a,b,c)α(c,a,b)σ(ab,c) = α(a,c,b)σ(b,c)σ(a,c)`
    BarHexagonSecond,
}

impl Axiom {
    pub fn arity(self) -> usize {
        match self {
            Axiom::Pentagon => 4,
            Axiom::Balance | Axiom::Symmetry => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Pentagon => "pentagon",
            Axiom::HexagonFirst => "hexagon_first",
            Axiom::HexagonSecond => "hexagon_second",
            Axiom::Balance => "balance",
            Axiom::Symmetry => "symmetry",
            Axiom::BarHexagonFirst => "bar_hexagon_first",
            Axiom::BarHexagonSecond => "bar_hexagon_second",
        }
    }
}

/// Result of an exhaustive check, with the first failing tuple if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub holds: bool,
    pub tuples_checked: usize,
    pub witness: Option<Vec<GroupElement>>,
}

#[derive(Clone, Copy)]
enum Term {
    A(usize, usize, usize),
    S(usize, usize),
}

/// Tabulated `α` on `G³` and `σ` on `G²`, indexed by enumeration position.
/// Values are arbitrary ring elements, so hand-mutated tables are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceData {
    group: FiniteAbelianGroup,
    ring: Arc<CyclotomicRing>,
    alpha: Vec<RingElement>,
    sigma: Vec<RingElement>,
}

impl CoherenceData {
    /// Closed-form tables. The order conditions are not enforced, so
    /// invalid presentations can be fed to the checker.
    pub fn from_presentation(p: &CategoryPresentation) -> Self {
        let elems = p.group.enumerate();
        let mut alpha = Vec::with_capacity(elems.len().pow(3));
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    alpha.push(alpha_unchecked(p, a, b, c));
                }
            }
        }
        let mut sigma = Vec::with_capacity(elems.len().pow(2));
        for a in &elems {
            for b in &elems {
                sigma.push(sigma_unchecked(p, a, b));
            }
        }
        CoherenceData {
            group: p.group.clone(),
            ring: Arc::clone(&p.ring),
            alpha,
            sigma,
        }
    }

    pub fn from_tables(
        group: FiniteAbelianGroup,
        ring: Arc<CyclotomicRing>,
        alpha: Vec<RingElement>,
        sigma: Vec<RingElement>,
    ) -> Result<Self> {
        let n = group.order() as usize;
        if alpha.len() != n.pow(3) || sigma.len() != n.pow(2) {
            return Err(Error::DimensionMismatch(format!(
                "tables of size {}/{} for a group of order {n}",
                alpha.len(),
                sigma.len()
            )));
        }
        for v in alpha.iter().chain(&sigma) {
            if v.level() != ring.level() {
                return Err(Error::LevelMismatch {
                    left: ring.level(),
                    right: v.level(),
                });
            }
        }
        Ok(CoherenceData {
            group,
            ring,
            alpha,
            sigma,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn ring(&self) -> &Arc<CyclotomicRing> {
        &self.ring
    }

    pub fn alpha_table(&self) -> &[RingElement] {
        &self.alpha
    }

    pub fn sigma_table(&self) -> &[RingElement] {
        &self.sigma
    }

    fn n(&self) -> usize {
        self.group.order() as usize
    }

    pub fn alpha_at(&self, a: usize, b: usize, c: usize) -> &RingElement {
        let n = self.n();
        &self.alpha[(a * n + b) * n + c]
    }

    pub fn sigma_at(&self, a: usize, b: usize) -> &RingElement {
        &self.sigma[a * self.n() + b]
    }

    pub fn set_alpha(&mut self, a: usize, b: usize, c: usize, v: RingElement) {
        let n = self.n();
        self.alpha[(a * n + b) * n + c] = v;
    }

    pub fn set_sigma(&mut self, a: usize, b: usize, v: RingElement) {
        let n = self.n();
        self.sigma[a * n + b] = v;
    }

    /// Exhaustive check of one identity over all tuples in enumeration
    /// order; stops at the first failure.
    pub fn check(&self, axiom: Axiom) -> AxiomCheck {
        let n = self.n();
        let elems = self.group.enumerate();
        let mut add = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = self
                    .group
                    .index_of(&self.group.add(&elems[i], &elems[j]).unwrap())
                    .unwrap();
            }
        }
        let m = |i: usize, j: usize| add[i * n + j];
        let eval = Evaluator::new(self);
        let arity = axiom.arity();
        let total = n.pow(arity as u32);
        let mut t = vec![0usize; arity];
        for idx in 0..total {
            let mut r = idx;
            for slot in t.iter_mut().rev() {
                *slot = r % n;
                r /= n;
            }
            let ok = match axiom {
                Axiom::Pentagon => {
                    let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
                    eval.eq(
                        &[Term::A(b, c, d), Term::A(a, m(b, c), d), Term::A(a, b, c)],
                        &[Term::A(m(a, b), c, d), Term::A(a, b, m(c, d))],
                    )
                }
                Axiom::HexagonFirst => {
                    let (a, b, c) = (t[0], t[1], t[2]);
                    eval.eq(
                        &[Term::A(b, c, a), Term::S(a, m(b, c)), Term::A(a, b, c)],
                        &[Term::S(a, c), Term::A(b, a, c), Term::S(a, b)],
                    )
                }
                Axiom::HexagonSecond => {
                    let (a, b, c) = (t[0], t[1], t[2]);
                    eval.eq(
                        &[Term::S(m(a, b), c), Term::A(a, c, b)],
                        &[
                            Term::S(a, c),
                            Term::S(b, c),
                            Term::A(c, a, b),
                            Term::A(a, b, c),
                        ],
                    )
                }
                Axiom::Balance => {
                    let (a, b) = (t[0], t[1]);
                    let ab = m(a, b);
                    eval.eq(
                        &[Term::S(ab, ab)],
                        &[Term::S(a, a), Term::S(b, b), Term::S(a, b), Term::S(b, a)],
                    )
                }
                Axiom::Symmetry => eval.eq(&[Term::S(t[0], t[1]), Term::S(t[1], t[0])], &[]),
                Axiom::BarHexagonFirst => {
                    let (a, b, c) = (t[0], t[1], t[2]);
                    eval.eq(
                        &[
                            Term::A(a, b, c),
                            Term::A(b, c, a),
                            Term::S(a, c),
                            Term::S(a, b),
                        ],
                        &[Term::A(b, a, c), Term::S(a, m(b, c))],
                    )
                }
                Axiom::BarHexagonSecond => {
                    let (a, b, c) = (t[0], t[1], t[2]);
                    eval.eq(
                        &[Term::A(a, b, c), Term::A(c, a, b), Term::S(m(a, b), c)],
                        &[Term::A(a, c, b), Term::S(b, c), Term::S(a, c)],
                    )
                }
            };
            if !ok {
                return AxiomCheck {
                    axiom,
                    holds: false,
                    tuples_checked: idx + 1,
                    witness: Some(t.iter().map(|&i| elems[i].clone()).collect()),
                };
            }
        }
        AxiomCheck {
            axiom,
            holds: true,
            tuples_checked: total,
            witness: None,
        }
    }
}

/// Discrete logarithms in `μ_L ⊂ Z[ζ_N]`, `L = lcm(2, N)`.
pub struct UnitLog {
    ring: Arc<CyclotomicRing>,
    order: u64,
    logs: HashMap<Vec<i64>, u64>,
    powers: Vec<RingElement>,
}

impl UnitLog {
    pub fn new(ring: &Arc<CyclotomicRing>) -> Self {
        let n = ring.level();
        let order = lcm(2, n);
        let zeta = RingElement::root_of_unity(ring, 1);
        let gen = if n.is_multiple_of(2) { zeta } else { -zeta };
        let mut logs = HashMap::new();
        let mut powers = Vec::with_capacity(order as usize);
        let mut acc = RingElement::one(ring);
        for e in 0..order {
            logs.insert(acc.coeffs().to_vec(), e);
            powers.push(acc.clone());
            acc = &acc * &gen;
        }
        UnitLog {
            ring: Arc::clone(ring),
            order,
            logs,
            powers,
        }
    }

    /// Order of the unit group, `lcm(2, N)`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn log(&self, u: &RingElement) -> Option<u64> {
        if u.level() != self.ring.level() {
            return None;
        }
        self.logs.get(u.coeffs()).copied()
    }

    pub fn exp(&self, e: i64) -> RingElement {
        self.powers[e.rem_euclid(self.order as i64) as usize].clone()
    }
}

enum Evaluator<'a> {
    Logs {
        order: u64,
        alpha: Vec<u64>,
        sigma: Vec<u64>,
        n: usize,
    },
    Ring(&'a CoherenceData),
}

impl<'a> Evaluator<'a> {
    fn new(data: &'a CoherenceData) -> Self {
        let units = UnitLog::new(&data.ring);
        let alpha: Option<Vec<u64>> = data.alpha.iter().map(|v| units.log(v)).collect();
        let sigma: Option<Vec<u64>> = data.sigma.iter().map(|v| units.log(v)).collect();
        match (alpha, sigma) {
            (Some(alpha), Some(sigma)) => Evaluator::Logs {
                order: units.order,
                alpha,
                sigma,
                n: data.n(),
            },
            _ => Evaluator::Ring(data),
        }
    }

    fn eq(&self, lhs: &[Term], rhs: &[Term]) -> bool {
        match self {
            Evaluator::Logs {
                order,
                alpha,
                sigma,
                n,
            } => {
                let val = |t: &Term| match *t {
                    Term::A(a, b, c) => alpha[(a * n + b) * n + c],
                    Term::S(a, b) => sigma[a * n + b],
                };
                let l: u64 = lhs.iter().map(val).sum();
                let r: u64 = rhs.iter().map(val).sum();
                l % order == r % order
            }
            Evaluator::Ring(data) => {
                let val = |t: &Term| match *t {
                    Term::A(a, b, c) => data.alpha_at(a, b, c).clone(),
                    Term::S(a, b) => data.sigma_at(a, b).clone(),
                };
                let one = RingElement::one(&data.ring);
                let l = lhs.iter().fold(one.clone(), |acc, t| &acc * &val(t));
                let r = rhs.iter().fold(one, |acc, t| &acc * &val(t));
                l == r
            }
        }
    }
}

pub fn check_pentagon(p: &CategoryPresentation) -> AxiomCheck {
    CoherenceData::from_presentation(p).check(Axiom::Pentagon)
}

/// Both hexagons, first one first.
pub fn check_hexagons(p: &CategoryPresentation) -> [AxiomCheck; 2] {
    let data = CoherenceData::from_presentation(p);
    [
        data.check(Axiom::HexagonFirst),
        data.check(Axiom::HexagonSecond),
    ]
}

pub fn check_balance(p: &CategoryPresentation) -> AxiomCheck {
    CoherenceData::from_presentation(p).check(Axiom::Balance)
}

pub fn is_symmetric(p: &CategoryPresentation) -> bool {
    CoherenceData::from_presentation(p)
        .check(Axiom::Symmetry)
        .holds
}

/// Full coherence verdict for one presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryReport {
    pub order_conditions: OrderReport,
    pub pentagon: AxiomCheck,
    pub hexagon_first: AxiomCheck,
    pub hexagon_second: AxiomCheck,
    pub balance: AxiomCheck,
    pub symmetric: bool,
}

impl CategoryReport {
    pub fn all_hold(&self) -> bool {
        self.order_conditions.valid
            && self.pentagon.holds
            && self.hexagon_first.holds
            && self.hexagon_second.holds
            && self.balance.holds
    }
}

pub fn check_category(p: &CategoryPresentation) -> CategoryReport {
    let data = CoherenceData::from_presentation(p);
    CategoryReport {
        order_conditions: check_order_conditions(p),
        pentagon: data.check(Axiom::Pentagon),
        hexagon_first: data.check(Axiom::HexagonFirst),
        hexagon_second: data.check(Axiom::HexagonSecond),
        balance: data.check(Axiom::Balance),
        symmetric: data.check(Axiom::Symmetry).holds,
    }
}

/// Every presentation over `group` whose invariants are powers of `ζ_N`
/// satisfying the order conditions. Diagonal exponents vary slowest, in
/// lexicographic order, followed by off-diagonal pairs in `(i, j)` order.
pub fn enumerate_presentations(
    group: &FiniteAbelianGroup,
    level: u64,
) -> Result<Vec<CategoryPresentation>> {
    let k = group.rank();
    let orders = group.orders();
    // admissible exponents e with ζ_N^e satisfying each condition
    let diag_choices: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            let n = orders[i];
            let need = if n % 2 == 1 { n } else { 2 * n };
            (0..level as i64)
                .filter(|&e| (e as u64 * need).is_multiple_of(level))
                .collect()
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let off_choices: Vec<Vec<i64>> = pairs
        .iter()
        .map(|&(i, j)| {
            let n = gcd(orders[i], orders[j]);
            (0..level as i64)
                .filter(|&e| (e as u64 * n).is_multiple_of(level))
                .collect()
        })
        .collect();
    let all: Vec<&Vec<i64>> = diag_choices.iter().chain(&off_choices).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; all.len()];
    if all.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let diag: Vec<i64> = (0..k).map(|i| all[i][idx[i]]).collect();
        let off: Vec<((usize, usize), i64)> = pairs
            .iter()
            .enumerate()
            .filter_map(|(t, &key)| {
                let e = all[k + t][idx[k + t]];
                (e != 0).then_some((key, e))
            })
            .collect();
        out.push(CategoryPresentation::from_root_exponents(
            group.clone(),
            level,
            &diag,
            &off,
        )?);
        let mut pos = all.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < all[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// A bracketed word in the generators; leaves hold zero-based generator
/// indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AssociationTree {
    Leaf(usize),
    Node(Box<AssociationTree>, Box<AssociationTree>),
}

impl AssociationTree {
    pub fn leaf(i: usize) -> Self {
        AssociationTree::Leaf(i)
    }

    pub fn node(l: AssociationTree, r: AssociationTree) -> Self {
        AssociationTree::Node(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            AssociationTree::Leaf(i) => vec![*i],
            AssociationTree::Node(l, r) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }

    /// `((x_1 x_2) x_3) …`
    pub fn left_nested(letters: &[usize]) -> Option<Self> {
        let (first, rest) = letters.split_first()?;
        Some(rest.iter().fold(AssociationTree::Leaf(*first), |acc, &x| {
            AssociationTree::node(acc, AssociationTree::Leaf(x))
        }))
    }

    /// Parses words such as `((g1 g2) g1)`; generators are one-based.
    pub fn parse(s: &str) -> Result<Self> {
        let tokens: Vec<String> = s
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(String::from)
            .collect();
        let mut pos = 0;
        let tree = Self::parse_at(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::InvalidPresentation(format!(
                "trailing input in word {s:?}"
            )));
        }
        Ok(tree)
    }

    fn parse_at(tokens: &[String], pos: &mut usize) -> Result<Self> {
        let bad = || Error::InvalidPresentation("malformed word".into());
        let tok = tokens.get(*pos).ok_or_else(bad)?;
        *pos += 1;
        if tok == "(" {
            let l = Self::parse_at(tokens, pos)?;
            let r = Self::parse_at(tokens, pos)?;
            if tokens.get(*pos).map(String::as_str) != Some(")") {
                return Err(bad());
            }
            *pos += 1;
            Ok(Self::node(l, r))
        } else {
            let idx: usize = tok
                .strip_prefix('g')
                .and_then(|d| d.parse().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(bad)?;
            Ok(AssociationTree::Leaf(idx - 1))
        }
    }
}

impl fmt::Display for AssociationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssociationTree::Leaf(i) => write!(f, "g{}", i + 1),
            AssociationTree::Node(l, r) => write!(f, "({l} {r})"),
        }
    }
}

fn inv(u: &RingElement) -> Result<RingElement> {
    u.inverse_root_of_unity()
        .ok_or_else(|| Error::InvalidPresentation(format!("{u} is not a root of unity")))
}

fn word_value(p: &CategoryPresentation, letters: &[usize]) -> Result<GroupElement> {
    let mut acc = p.group.identity();
    for &i in letters {
        if i >= p.group.rank() {
            return Err(Error::InvalidPresentation(format!(
                "generator g{} not in a group with {} generators",
                i + 1,
                p.group.rank()
            )));
        }
        acc = p.group.add(&acc, &p.group.generator(i))?;
    }
    Ok(acc)
}

/// Unit of the reassociation taking `w` to the left-nested bracketing of
/// the same letters.
pub fn left_normalization_unit(
    p: &CategoryPresentation,
    w: &AssociationTree,
) -> Result<RingElement> {
    require_valid(p)?;
    Ok(left_normalize(p, w)?.0)
}

fn left_normalize(
    p: &CategoryPresentation,
    w: &AssociationTree,
) -> Result<(RingElement, Vec<usize>)> {
    match w {
        AssociationTree::Leaf(i) => {
            word_value(p, &[*i])?;
            Ok((p.one(), vec![*i]))
        }
        AssociationTree::Node(l, r) => {
            let (ul, la) = left_normalize(p, l)?;
            let (ur, lb) = left_normalize(p, r)?;
            let a = word_value(p, &la)?;
            // la·(b' g) → (la·b')·g peels one letter at a time
            let mut unit = &ul * &ur;
            for cut in (1..lb.len()).rev() {
                let b = word_value(p, &lb[..cut])?;
                let g = word_value(p, &lb[cut..=cut])?;
                unit = &unit * &inv(&alpha_unchecked(p, &a, &b, &g))?;
            }
            let mut letters = la;
            letters.extend(lb);
            Ok((unit, letters))
        }
    }
}

/// Unit for `((P x) y) → ((P y) x)`: reassociate, apply `σ_{y,x}^{-1}` to
/// the adjacent pair, reassociate back.
pub fn swap_cost(
    p: &CategoryPresentation,
    prefix: &GroupElement,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<RingElement> {
    require_valid(p)?;
    check_elements(p, &[prefix, x, y])?;
    let forward = alpha_unchecked(p, prefix, x, y);
    let back = inv(&alpha_unchecked(p, prefix, y, x))?;
    let braid = inv(&sigma_unchecked(p, y, x))?;
    Ok(&(&forward * &braid) * &back)
}

/// The standard bracketing of a sorted word: each block `g_i^{r_i}`
/// left-nested, blocks left-nested.
pub fn standard_tree(sorted: &[usize]) -> Option<AssociationTree> {
    let mut blocks: Vec<AssociationTree> = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        blocks.push(AssociationTree::left_nested(&sorted[start..end])?);
        start = end;
    }
    let mut it = blocks.into_iter();
    let first = it.next()?;
    Some(it.fold(first, AssociationTree::node))
}

/// Reduces a word to its standard representative: left-normalize, bubble
/// letters into index order with `σ^{-1}` swaps, rebracket into blocks, and
/// cancel full powers `g_i^{n_i}` at unit cost 1. Returns the element and
/// the unit of the morphism from `w` to the standard representative.
pub fn reduce_word(
    p: &CategoryPresentation,
    w: &AssociationTree,
) -> Result<(GroupElement, RingElement)> {
    require_valid(p)?;
    let (mut unit, mut letters) = left_normalize(p, w)?;
    let g = |i: usize| p.group.generator(i);
    loop {
        let Some(k) = (0..letters.len().saturating_sub(1)).find(|&k| letters[k] > letters[k + 1])
        else {
            break;
        };
        let prefix = word_value(p, &letters[..k])?;
        unit = &unit * &swap_cost(p, &prefix, &g(letters[k]), &g(letters[k + 1]))?;
        letters.swap(k, k + 1);
    }
    let standard = standard_tree(&letters).expect("nonempty word");
    let (to_left, _) = left_normalize(p, &standard)?;
    unit = &unit * &inv(&to_left)?;
    Ok((word_value(p, &letters)?, unit))
}

/// `τ = Σ_g σ(g,g)` and `τ̄ = Σ_g σ(g,g)^{-1}`.
pub fn gauss_sums(p: &CategoryPresentation) -> Result<(RingElement, RingElement)> {
    require_valid(p)?;
    let mut tau = RingElement::zero(&p.ring);
    let mut tau_bar = RingElement::zero(&p.ring);
    for g in p.group.enumerate() {
        let s = sigma_unchecked(p, &g, &g);
        tau_bar = &tau_bar + &inv(&s)?;
        tau = &tau + &s;
    }
    Ok((tau, tau_bar))
}

/// `ττ̄` for cyclic `G` of order `n` with `σ` of exact order `ℓ`:
/// `n²/ℓ` for odd `ℓ`, `2n²/ℓ` when `4 | ℓ`, otherwise 0.
pub fn anomaly_product_closed_form(n: u64, l: u64) -> Result<i64> {
    if n == 0 || l == 0 || !(2 * n).is_multiple_of(l) || (n % 2 == 1 && !n.is_multiple_of(l)) {
        return Err(Error::Inadmissible(format!(
            "no invariant of order {l} on a cyclic group of order {n}"
        )));
    }
    let n2 = (n * n) as i64;
    let l = l as i64;
    Ok(if l % 2 == 1 {
        n2 / l
    } else if l % 4 == 0 {
        2 * n2 / l
    } else {
        0
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizabilityReport {
    pub tau: RingElement,
    pub tau_bar: RingElement,
    pub product: RingElement,
    /// `ττ̄` when it is a rational integer.
    pub product_integer: Option<i64>,
    pub normalizable: bool,
    /// Required adjunction, e.g. `R[1/2]` or `R[1/√2]`.
    pub extension: Option<String>,
    /// Whether the normalized theory still depends on the index (`τ ≠ τ̄`).
    pub anomalous: bool,
    pub verdict: String,
}

pub fn normalizability_report(p: &CategoryPresentation) -> Result<NormalizabilityReport> {
    let (tau, tau_bar) = gauss_sums(p)?;
    let product = &tau * &tau_bar;
    let product_integer = product.as_integer();
    let anomalous = tau != tau_bar;
    let extension = if product.is_zero() {
        None
    } else {
        Some(match product_integer {
            Some(m) => {
                let s = integer_sqrt(m);
                if s * s == m {
                    format!("R[1/{s}]")
                } else {
                    format!("R[1/√{m}]")
                }
            }
            None => format!("R[1/√({product})]"),
        })
    };
    let normalizable = extension.is_some();
    let verdict = match &extension {
        None => "NOT normalizable".to_string(),
        Some(ext) => format!(
            "normalizable over {ext}, {}",
            if anomalous {
                "anomalous"
            } else {
                "anomaly-free"
            }
        ),
    };
    Ok(NormalizabilityReport {
        tau,
        tau_bar,
        product,
        product_integer,
        normalizable,
        extension,
        anomalous,
        verdict,
    })
}

fn integer_sqrt(m: i64) -> i64 {
    if m < 0 {
        return -1;
    }
    let mut s = (m as f64).sqrt() as i64;
    while s * s > m {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= m {
        s += 1;
    }
    s
}

/// A twist `θ` on the simple objects, tabulated in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonTwist {
    pub presentation: CategoryPresentation,
    pub theta: Vec<RingElement>,
}

impl RibbonTwist {
    /// `θ(a) = σ(a,a)`.
    pub fn standard(p: &CategoryPresentation) -> Result<Self> {
        require_valid(p)?;
        let theta = p
            .group
            .enumerate()
            .iter()
            .map(|a| sigma_unchecked(p, a, a))
            .collect();
        Ok(RibbonTwist {
            presentation: p.clone(),
            theta,
        })
    }

    /// Multiplies `θ` by the character with `χ(g_i) = ζ_N^{chi[i]}`; each
    /// `chi[i]·n_i` must be a multiple of `N`.
    pub fn scale_by_character(&self, chi: &[i64]) -> Result<Self> {
        let p = &self.presentation;
        let level = p.level() as i64;
        if chi.len() != p.group.rank() {
            return Err(Error::GroupMismatch(
                "character has the wrong length".into(),
            ));
        }
        for (&c, &n) in chi.iter().zip(p.group.orders()) {
            if (c * n as i64).rem_euclid(level) != 0 {
                return Err(Error::InvalidPresentation(format!(
                    "ζ_{level}^{c} is not an {n}-th root of unity"
                )));
            }
        }
        let theta = p
            .group
            .enumerate()
            .iter()
            .zip(&self.theta)
            .map(|(a, t)| {
                let e: i64 = a.exps.iter().zip(chi).map(|(&x, &c)| x as i64 * c).sum();
                t * &RingElement::root_of_unity(p.ring(), e)
            })
            .collect();
        Ok(RibbonTwist {
            presentation: p.clone(),
            theta,
        })
    }

    /// `θ(ab) = θ(a)θ(b)σ(a,b)σ(b,a)` for all pairs.
    pub fn is_balanced(&self) -> bool {
        let p = &self.presentation;
        let g = &p.group;
        let elems = g.enumerate();
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let ab = g.index_of(&g.add(a, b).unwrap()).unwrap();
                let rhs = &(&self.theta[i] * &self.theta[j])
                    * &(&sigma_unchecked(p, a, b) * &sigma_unchecked(p, b, a));
                if self.theta[ab] != rhs {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn cyc(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn pres(
        orders: &[u64],
        level: u64,
        diag: &[i64],
        off: &[((usize, usize), i64)],
    ) -> CategoryPresentation {
        CategoryPresentation::from_root_exponents(
            FiniteAbelianGroup::new(orders.to_vec()).unwrap(),
            level,
            diag,
            off,
        )
        .unwrap()
    }

    fn z2(level_exp: i64) -> CategoryPresentation {
        pres(&[2], 4, &[level_exp], &[])
    }

    fn el(exps: &[u64]) -> GroupElement {
        GroupElement::new(exps.to_vec())
    }

    #[test]
    fn order_condition_examples() {
        assert!(check_order_conditions(&z2(1)).valid);
        let bad = pres(&[3], 6, &[3], &[]);
        let r = check_order_conditions(&bad);
        assert!(!r.valid);
        assert_eq!(r.violations.len(), 1);
        assert!(
            check_order_conditions(
                &CategoryPresentation::trivial(FiniteAbelianGroup::new(vec![2, 3, 4]).unwrap(), 24)
                    .unwrap()
            )
            .valid
        );
    }

    #[test]
    fn alpha_examples() {
        let p = z2(1);
        let g = el(&[1]);
        let minus_one = RingElement::from_int(p.ring(), -1);
        assert_eq!(alpha(&p, &g, &g, &g).unwrap(), minus_one);
        assert!(alpha(&p, &g, &el(&[0]), &g).unwrap().is_one());
        let t =
            CategoryPresentation::trivial(FiniteAbelianGroup::new(vec![2, 2]).unwrap(), 4).unwrap();
        for a in t.group().enumerate() {
            for b in t.group().enumerate() {
                for c in t.group().enumerate() {
                    assert!(alpha(&t, &a, &b, &c).unwrap().is_one());
                }
            }
        }
        assert!(alpha(&pres(&[3], 6, &[3], &[]), &el(&[1]), &el(&[1]), &el(&[2])).is_err());
    }

    #[test]
    fn sigma_examples() {
        let p = pres(&[2, 3], 12, &[3, 4], &[]);
        assert_eq!(
            sigma_pair(&p, &el(&[1, 0]), &el(&[1, 0])).unwrap(),
            p.sigma_diag()[0]
        );
        assert_eq!(
            sigma_pair(&p, &el(&[0, 1]), &el(&[0, 1])).unwrap(),
            p.sigma_diag()[1]
        );
        assert!(sigma_pair(&p, &el(&[0, 0]), &el(&[1, 2])).unwrap().is_one());
        let q = pres(&[4], 8, &[1], &[]);
        assert_eq!(
            sigma_pair(&q, &el(&[2]), &el(&[2])).unwrap(),
            RingElement::from_int(q.ring(), -1)
        );
        // off-diagonal enters only when the lower index sits on the left
        let r = pres(&[2, 2], 4, &[0, 0], &[((1, 0), 2)]);
        let minus = RingElement::from_int(r.ring(), -1);
        assert_eq!(sigma_pair(&r, &el(&[1, 0]), &el(&[0, 1])).unwrap(), minus);
        assert!(sigma_pair(&r, &el(&[0, 1]), &el(&[1, 0])).unwrap().is_one());
    }

    #[test]
    fn coherence_examples() {
        let p = z2(1);
        let r = check_category(&p);
        assert!(r.all_hold());
        let t = CategoryPresentation::trivial(cyc(5), 10).unwrap();
        assert!(check_category(&t).all_hold());
        let mut data = CoherenceData::from_presentation(&p);
        let flipped = -data.alpha_at(0, 1, 1).clone();
        data.set_alpha(0, 1, 1, flipped);
        let c = data.check(Axiom::Pentagon);
        assert!(!c.holds);
        assert_eq!(c.witness.unwrap().len(), 4);
        // non-root braiding value 2
        let two = RingElement::from_int(p.ring(), 2);
        let q = CategoryPresentation::new(cyc(2), 4, vec![two], BTreeMap::new()).unwrap();
        assert!(!check_order_conditions(&q).valid);
        let [h1, h2] = check_hexagons(&q);
        assert!(!(h1.holds && h2.holds));
    }

    #[test]
    fn balance_examples() {
        assert!(check_balance(&z2(1)).holds);
        assert!(check_balance(&pres(&[4], 8, &[1], &[])).holds);
    }

    #[test]
    fn symmetry_examples() {
        assert!(is_symmetric(&z2(2)));
        assert!(!is_symmetric(&z2(1)));
        assert!(is_symmetric(&z2(0)));
    }

    #[test]
    fn known_failures() {
        // Z/3 with σ = -1 breaks the pentagon
        assert!(!check_pentagon(&pres(&[3], 6, &[3], &[])).holds);
        // Z/2 with a primitive 8th root breaks the second hexagon
        let [_, h2] = check_hexagons(&pres(&[2], 8, &[1], &[]));
        assert!(!h2.holds);
        let [_, h2] = check_hexagons(&pres(&[4], 16, &[1], &[]));
        assert!(!h2.holds);
    }

    #[test]
    fn all_small_presentations_are_coherent() {
        let cases: &[(&[u64], u64)] = &[
            (&[2], 4),
            (&[3], 6),
            (&[4], 8),
            (&[2, 2], 4),
            (&[2, 3], 12),
            (&[2, 4], 8),
            (&[3, 3], 6),
        ];
        for &(orders, level) in cases {
            let g = FiniteAbelianGroup::new(orders.to_vec()).unwrap();
            let all = enumerate_presentations(&g, level).unwrap();
            assert!(!all.is_empty());
            for p in all {
                assert!(check_order_conditions(&p).valid);
                let r = check_category(&p);
                assert!(r.all_hold(), "{p}: {r:?}");
            }
        }
    }

    #[test]
    fn presentation_counts() {
        assert_eq!(enumerate_presentations(&cyc(2), 4).unwrap().len(), 4);
        assert_eq!(enumerate_presentations(&cyc(3), 3).unwrap().len(), 3);
        assert_eq!(enumerate_presentations(&cyc(4), 8).unwrap().len(), 8);
        assert_eq!(
            enumerate_presentations(&FiniteAbelianGroup::new(vec![2, 2]).unwrap(), 4)
                .unwrap()
                .len(),
            32
        );
        assert_eq!(
            enumerate_presentations(&FiniteAbelianGroup::trivial(), 1)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn sigma_square_law() {
        for n in 1..=12u64 {
            for k in 0..2 * n as i64 {
                let p = pres(&[n], 2 * n, &[k], &[]);
                if !check_order_conditions(&p).valid {
                    continue;
                }
                let g = el(&[1 % n]);
                let s = sigma_pair(&p, &g, &g).unwrap();
                for r in 0..n {
                    let gr = el(&[r]);
                    assert_eq!(sigma_pair(&p, &gr, &gr).unwrap(), s.pow(r * r));
                }
            }
        }
    }

    #[test]
    fn alpha_squares_to_one() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        for p in enumerate_presentations(&g, 8).unwrap() {
            for a in g.enumerate() {
                for b in g.enumerate() {
                    for c in g.enumerate() {
                        assert!(alpha(&p, &a, &b, &c).unwrap().pow(2).is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn reduce_word_examples() {
        let p = pres(&[2, 2], 4, &[0, 0], &[((1, 0), 2)]);
        let w = AssociationTree::parse("(g2 g1)").unwrap();
        let (e, u) = reduce_word(&p, &w).unwrap();
        assert_eq!(e, el(&[1, 1]));
        assert_eq!(u, inv(&p.sigma_off_pair(1, 0)).unwrap());
        let (e, u) = reduce_word(&p, &AssociationTree::leaf(0)).unwrap();
        assert_eq!(e, el(&[1, 0]));
        assert!(u.is_one());

        let q = z2(1);
        let left = reduce_word(&q, &AssociationTree::parse("((g1 g1) g1)").unwrap()).unwrap();
        let right = reduce_word(&q, &AssociationTree::parse("(g1 (g1 g1))").unwrap()).unwrap();
        assert_eq!(left.0, el(&[1]));
        assert_eq!(right.0, el(&[1]));
        let a = alpha(&q, &el(&[1]), &el(&[1]), &el(&[1])).unwrap();
        assert_eq!(left.1, &right.1 * &a);
        assert!(left.1.is_one());
    }

    #[test]
    fn word_parse_roundtrip() {
        for s in ["g1", "(g1 g2)", "((g2 g1) (g3 g1))"] {
            assert_eq!(AssociationTree::parse(s).unwrap().to_string(), s);
        }
        assert!(AssociationTree::parse("(g1 g2").is_err());
        assert!(AssociationTree::parse("g0").is_err());
    }

    // Every order of adjacent swaps in the left-nested word reaches the
    // sorted word with the same unit.
    fn all_swap_units(p: &CategoryPresentation, letters: Vec<usize>) -> HashSet<RingElement> {
        fn go(
            p: &CategoryPresentation,
            letters: Vec<usize>,
            memo: &mut HashMap<Vec<usize>, HashSet<RingElement>>,
        ) -> HashSet<RingElement> {
            if let Some(r) = memo.get(&letters) {
                return r.clone();
            }
            let mut out = HashSet::new();
            let mut any = false;
            for k in 0..letters.len().saturating_sub(1) {
                if letters[k] > letters[k + 1] {
                    any = true;
                    let prefix = word_value(p, &letters[..k]).unwrap();
                    let c = swap_cost(
                        p,
                        &prefix,
                        &p.group.generator(letters[k]),
                        &p.group.generator(letters[k + 1]),
                    )
                    .unwrap();
                    let mut next = letters.clone();
                    next.swap(k, k + 1);
                    for u in go(p, next, memo) {
                        out.insert(&c * &u);
                    }
                }
            }
            if !any {
                out.insert(p.one());
            }
            memo.insert(letters, out.clone());
            out
        }
        go(p, letters, &mut HashMap::new())
    }

    fn random_tree(letters: &[usize], cuts: &[usize]) -> AssociationTree {
        if letters.len() == 1 {
            return AssociationTree::leaf(letters[0]);
        }
        let c = 1 + cuts[0] % (letters.len() - 1);
        AssociationTree::node(
            random_tree(&letters[..c], &cuts[1..]),
            random_tree(&letters[c..], &cuts[1..]),
        )
    }

    // a(bc) → (ab)c rotations applied anywhere, collecting α^{-1}.
    fn rotation_walk(
        p: &CategoryPresentation,
        t: &AssociationTree,
    ) -> (AssociationTree, RingElement) {
        match t {
            AssociationTree::Leaf(_) => (t.clone(), p.one()),
            AssociationTree::Node(l, r) => {
                if let AssociationTree::Node(b, c) = r.as_ref() {
                    let va = word_value(p, &l.leaves()).unwrap();
                    let vb = word_value(p, &b.leaves()).unwrap();
                    let vc = word_value(p, &c.leaves()).unwrap();
                    let u = inv(&alpha(p, &va, &vb, &vc).unwrap()).unwrap();
                    let rotated = AssociationTree::node(
                        AssociationTree::node((**l).clone(), (**b).clone()),
                        (**c).clone(),
                    );
                    let (t2, u2) = rotation_walk(p, &rotated);
                    (t2, &u * &u2)
                } else {
                    let (l2, u) = rotation_walk(p, l);
                    (AssociationTree::Node(Box::new(l2), r.clone()), u)
                }
            }
        }
    }

    proptest! {
        #[test]
        fn swap_order_independence(word in proptest::collection::vec(0usize..3, 1..=6), pick in 0usize..1000) {
            let g = FiniteAbelianGroup::new(vec![2, 2, 3]).unwrap();
            let all = enumerate_presentations(&g, 12).unwrap();
            let p = &all[pick % all.len()];
            let units = all_swap_units(p, word);
            prop_assert_eq!(units.len(), 1);
        }

        #[test]
        fn swap_order_independence_z4(word in proptest::collection::vec(0usize..2, 1..=6), pick in 0usize..1000) {
            let g = FiniteAbelianGroup::new(vec![4, 2]).unwrap();
            let all = enumerate_presentations(&g, 8).unwrap();
            let p = &all[pick % all.len()];
            prop_assert_eq!(all_swap_units(p, word).len(), 1);
        }

        #[test]
        fn rotations_match_left_normalization(word in proptest::collection::vec(0usize..2, 1..=6), cuts in proptest::collection::vec(0usize..6, 6), pick in 0usize..1000) {
            let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
            let all = enumerate_presentations(&g, 8).unwrap();
            let p = &all[pick % all.len()];
            let t = random_tree(&word, &cuts);
            let (normal, u) = rotation_walk(p, &t);
            prop_assert_eq!(normal, AssociationTree::left_nested(&word).unwrap());
            prop_assert_eq!(u, left_normalization_unit(p, &t).unwrap());
        }

        #[test]
        fn reduction_element_is_product(word in proptest::collection::vec(0usize..2, 1..=6), cuts in proptest::collection::vec(0usize..6, 6)) {
            let p = pres(&[2, 3], 12, &[3, 4], &[]);
            let t = random_tree(&word, &cuts);
            let (e, u) = reduce_word(&p, &t).unwrap();
            prop_assert_eq!(e, word_value(&p, &word).unwrap());
            prop_assert!(u.multiplicative_order().is_some());
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let (t, tb) = gauss_sums(&z2(0)).unwrap();
        assert_eq!(t.as_integer(), Some(2));
        assert_eq!(tb.as_integer(), Some(2));
        let (t, tb) = gauss_sums(&z2(2)).unwrap();
        assert!(t.is_zero() && tb.is_zero());
        let p = z2(1);
        let (t, tb) = gauss_sums(&p).unwrap();
        let one = p.one();
        let i = RingElement::root_of_unity(p.ring(), 1);
        assert_eq!(t, &one + &i);
        assert_eq!(tb, &one - &i);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(anomaly_product_closed_form(2, 1).unwrap(), 4);
        assert_eq!(anomaly_product_closed_form(2, 2).unwrap(), 0);
        assert_eq!(anomaly_product_closed_form(2, 4).unwrap(), 2);
        assert!(anomaly_product_closed_form(3, 2).is_err());
        assert!(anomaly_product_closed_form(2, 8).is_err());
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for n in 1..=12u64 {
            for k in 0..2 * n as i64 {
                let p = pres(&[n], 2 * n, &[k], &[]);
                if !check_order_conditions(&p).valid {
                    continue;
                }
                let (t, tb) = gauss_sums(&p).unwrap();
                let l = p.sigma_diag()[0].multiplicative_order().unwrap();
                let expected = anomaly_product_closed_form(n, l).unwrap();
                assert_eq!((&t * &tb).as_integer(), Some(expected), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn normalizability_examples() {
        let r = normalizability_report(&z2(2)).unwrap();
        assert!(!r.normalizable);
        assert_eq!(r.verdict, "NOT normalizable");
        let r = normalizability_report(&z2(0)).unwrap();
        assert_eq!(r.extension.as_deref(), Some("R[1/2]"));
        assert!(!r.anomalous);
        let r = normalizability_report(&z2(1)).unwrap();
        assert_eq!(r.extension.as_deref(), Some("R[1/√2]"));
        assert!(r.anomalous);
    }

    #[test]
    fn ribbon_twists_stay_balanced() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        for p in enumerate_presentations(&g, 8).unwrap().iter().step_by(7) {
            let t = RibbonTwist::standard(p).unwrap();
            assert!(t.is_balanced());
            let s = t.scale_by_character(&[4, 2]).unwrap();
            assert!(s.is_balanced());
            assert_ne!(s.theta, t.theta);
        }
        let t = RibbonTwist::standard(&z2(1)).unwrap();
        assert!(t.scale_by_character(&[1]).is_err());
    }

    #[test]
    fn unit_logs() {
        for n in [1u64, 3, 4, 5, 12] {
            let ring = CyclotomicRing::new(n).unwrap();
            let u = UnitLog::new(&ring);
            for e in 0..u.order() as i64 {
                assert_eq!(u.log(&u.exp(e)), Some(e as u64));
            }
            assert_eq!(u.log(&RingElement::from_int(&ring, 2)), None);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let p = pres(&[2, 2], 4, &[1, 2], &[((1, 0), 2)]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"2,1\""));
        let back: CategoryPresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
