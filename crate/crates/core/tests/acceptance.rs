//! Acceptance criteria 1 through 9, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use gctqft_core::abelian::{FiniteAbelianGroup, GroupElement};
use gctqft_core::barcohomology::{
    b2_coboundary, b2_differentials, bar_boundary, bar_boundary_chain, classify_braided,
    classify_symmetric, cohomologous, is_b2_4cocycle, BarCochain2, ClassifyMode, DEFAULT_MAX_ENUM,
};
use gctqft_core::corpus;
use gctqft_core::exactring::{CyclotomicRing, RingElement};
use gctqft_core::groupcat::{
    check_order_conditions, enumerate_presentations, gauss_sums, normalizability_report, Axiom,
    CategoryPresentation, CoherenceData,
};
use gctqft_core::tqft::{
    check_modularity_criterion, compose_check, corner_algebra, glue_compare, induced_hom,
    induced_hom_explicit, trimodule_product,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn grp(orders: &[u64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(orders.to_vec()).unwrap()
}

/// Invariant-factor decompositions of every abelian group of order at most
/// `bound`.
fn groups_up_to(bound: u64) -> Vec<FiniteAbelianGroup> {
    fn rec(cur: &mut Vec<u64>, prod: u64, bound: u64, out: &mut Vec<FiniteAbelianGroup>) {
        let step = cur.last().copied().unwrap_or(1);
        let mut next = if cur.is_empty() { 2 } else { step };
        while prod * next <= bound {
            cur.push(next);
            out.push(grp(cur));
            rec(cur, prod * next, bound, out);
            cur.pop();
            next += step;
        }
    }
    let mut out = vec![FiniteAbelianGroup::trivial()];
    rec(&mut Vec::new(), 1, bound, &mut out);
    out.sort_by_key(|g| (g.order(), g.orders().to_vec()));
    out
}

fn lcm_level(g: &FiniteAbelianGroup) -> u64 {
    g.orders().iter().fold(2, |acc, &n| {
        let m = 2 * n;
        let gcd = |mut a: u64, mut b: u64| {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        acc / gcd(acc, m) * m
    })
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Outcome {
    let z2 = grp(&[2]);
    let r4 = CyclotomicRing::new(4).unwrap();
    let el = |c: &[i64]| RingElement::from_coeffs(&r4, c.to_vec());
    let cases = [
        (
            0,
            el(&[2]),
            el(&[2]),
            4,
            "normalizable over R[1/2], anomaly-free",
        ),
        (2, el(&[0]), el(&[0]), 0, "NOT normalizable"),
        (
            1,
            el(&[1, 1]),
            el(&[1, -1]),
            2,
            "normalizable over R[1/√2], anomalous",
        ),
    ];
    for (k, tau, tau_bar, product, verdict) in cases {
        let p = CategoryPresentation::from_root_exponents(z2.clone(), 4, &[k], &[]).unwrap();
        let (t, tb) = gauss_sums(&p).unwrap();
        ensure(
            t == tau && tb == tau_bar,
            format!("σ=ζ4^{k}: got ({t}, {tb})"),
        )?;
        let r = normalizability_report(&p).unwrap();
        ensure(
            r.product_integer == Some(product),
            format!("σ=ζ4^{k}: product {}", r.product),
        )?;
        ensure(
            r.verdict == verdict,
            format!("σ=ζ4^{k}: verdict {:?}", r.verdict),
        )?;
    }
    Ok("(2,2) 4, (0,0) 0, (1+z4,1-z4) 2 with the three verdicts".into())
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for n in 1..=12u64 {
        let level = 2 * n;
        let ring = CyclotomicRing::new(level).unwrap();
        for k in 0..level as i64 {
            let p = CategoryPresentation::from_root_exponents(grp(&[n]), level, &[k], &[]).unwrap();
            if !check_order_conditions(&p).valid {
                continue;
            }
            // direct enumeration of Σ σ^{r²} and Σ σ^{-r²}
            let mut tau = RingElement::zero(&ring);
            let mut tau_bar = RingElement::zero(&ring);
            for r in 0..n as i64 {
                tau = &tau + &RingElement::root_of_unity(&ring, k * r * r);
                tau_bar = &tau_bar + &RingElement::root_of_unity(&ring, -k * r * r);
            }
            let l = (level / gcd(level, k.rem_euclid(level as i64) as u64)) as i64;
            let n2 = (n * n) as i64;
            let expected = if l % 2 == 1 {
                n2 / l
            } else if l % 4 == 0 {
                2 * n2 / l
            } else {
                0
            };
            let product = &tau * &tau_bar;
            ensure(
                product.as_integer() == Some(expected),
                format!("n={n} k={k}: {product} vs {expected}"),
            )?;
            let (t, tb) = gauss_sums(&p).unwrap();
            ensure(
                t == tau && tb == tau_bar,
                format!("n={n} k={k}: library Gauss sums differ"),
            )?;
            ensure(
                gctqft_core::groupcat::anomaly_product_closed_form(n, l as u64).unwrap()
                    == expected,
                format!("n={n} k={k}: closed form"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} admissible cyclic cases"))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn first_failure(data: &CoherenceData) -> Option<(Axiom, Vec<GroupElement>)> {
    for ax in [
        Axiom::Pentagon,
        Axiom::HexagonFirst,
        Axiom::HexagonSecond,
        Axiom::Balance,
    ] {
        let c = data.check(ax);
        if !c.holds {
            return Some((ax, c.witness.unwrap_or_default()));
        }
    }
    None
}

fn criterion_3() -> Outcome {
    let mut total = 0usize;
    let mut groups = 0;
    for g in groups_up_to(16) {
        let level = lcm_level(&g);
        let all = enumerate_presentations(&g, level).unwrap();
        // α depends only on the diagonal invariants
        let mut pentagon: BTreeMap<Vec<i64>, bool> = BTreeMap::new();
        for p in &all {
            ensure(
                check_order_conditions(p).valid,
                format!("{p}: enumerated but invalid"),
            )?;
            let data = CoherenceData::from_presentation(p);
            let key: Vec<i64> = p
                .sigma_diag()
                .iter()
                .map(|s| s.root_exponent().unwrap() as i64)
                .collect();
            let pent = *pentagon
                .entry(key)
                .or_insert_with(|| data.check(Axiom::Pentagon).holds);
            let ok = pent
                && data.check(Axiom::HexagonFirst).holds
                && data.check(Axiom::HexagonSecond).holds
                && data.check(Axiom::Balance).holds;
            ensure(ok, format!("{p} fails coherence"))?;
            total += 1;
        }
        groups += 1;
    }
    let off_diag = enumerate_presentations(&grp(&[2, 2]), 4)
        .unwrap()
        .iter()
        .filter(|p| p.sigma_off().values().any(|v| !v.is_one()))
        .count();
    ensure(
        off_diag > 0,
        "no Z/2 x Z/2 presentation with off-diagonal braiding",
    )?;

    let pres = |o: &[u64], level: u64, d: &[i64], off: &[((usize, usize), i64)]| {
        CategoryPresentation::from_root_exponents(grp(o), level, d, off).unwrap()
    };
    let mut mutants: Vec<(String, CoherenceData)> = Vec::new();
    let mut d = CoherenceData::from_presentation(&pres(&[2], 4, &[1], &[]));
    let v = -d.alpha_at(0, 1, 1).clone();
    d.set_alpha(0, 1, 1, v);
    mutants.push(("Z/2 σ=ζ4 with α(0,g,g) negated".into(), d));
    mutants.push((
        "Z/3 σ=-1".into(),
        CoherenceData::from_presentation(&pres(&[3], 6, &[3], &[])),
    ));
    mutants.push((
        "Z/3 σ=ζ6".into(),
        CoherenceData::from_presentation(&pres(&[3], 6, &[1], &[])),
    ));
    mutants.push((
        "Z/2 σ=ζ8".into(),
        CoherenceData::from_presentation(&pres(&[2], 8, &[1], &[])),
    ));
    mutants.push((
        "Z/4 σ=ζ16".into(),
        CoherenceData::from_presentation(&pres(&[4], 16, &[1], &[])),
    ));
    let mut d = CoherenceData::from_presentation(&pres(&[2, 2], 4, &[1, 0], &[((1, 0), 2)]));
    let v = -d.sigma_at(1, 2).clone();
    d.set_sigma(1, 2, v);
    mutants.push(("Z/2xZ/2 with σ((0,1),(1,0)) negated".into(), d));
    let mut lines = Vec::new();
    for (label, data) in &mutants {
        match first_failure(data) {
            Some((ax, w)) if !w.is_empty() => {
                let w: Vec<String> = w.iter().map(ToString::to_string).collect();
                lines.push(format!("{label}: {} at {}", ax.name(), w.join(" ")));
            }
            Some((ax, _)) => return Err(format!("{label}: {} fails without a witness", ax.name())),
            None => return Err(format!("{label}: passes every axiom")),
        }
    }
    for l in &lines {
        println!("    {l}");
    }
    Ok(format!(
        "{total} presentations over {groups} groups coherent; {} mutants rejected",
        mutants.len()
    ))
}

fn criterion_4() -> Outcome {
    let cap = DEFAULT_MAX_ENUM;
    let z2 = grp(&[2]);
    let z3 = grp(&[3]);
    let b2 = classify_braided(&z2, 4, ClassifyMode::Full, cap).unwrap();
    ensure(
        b2.class_count == 4,
        format!("Z/2 level 4: {} classes", b2.class_count),
    )?;
    let s2 = classify_symmetric(&z2, 4, ClassifyMode::Full, cap).unwrap();
    ensure(
        s2.class_count == 2,
        format!("Z/2 symmetric: {} classes", s2.class_count),
    )?;
    let b3 = classify_braided(&z3, 3, ClassifyMode::Full, cap).unwrap();
    ensure(
        b3.class_count == 3,
        format!("Z/3 level 3: {} classes", b3.class_count),
    )?;
    for (g, level) in [(&z2, 4), (&z3, 3)] {
        let all = enumerate_presentations(g, level).unwrap();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                ensure(
                    !cohomologous(p, q).unwrap(),
                    format!("{p} and {q} share a class"),
                )?;
            }
        }
    }
    Ok("Z/2: 4 braided, 2 symmetric; Z/3: 3 braided; presentations pairwise distinct".into())
}

fn coefficient_groups() -> Vec<FiniteAbelianGroup> {
    vec![grp(&[2]), grp(&[3]), grp(&[4]), grp(&[2, 2])]
}

fn criterion_5() -> Outcome {
    let mut bordisms = 0;
    let mut comparisons = 0;
    for (file, doc) in corpus::documents() {
        let cx = doc.load().unwrap();
        for name in doc.bordisms.keys() {
            bordisms += 1;
            for n in 0..2 {
                for g in coefficient_groups() {
                    let b = doc.bordism(&cx, name, n, &g, 4).unwrap();
                    let a = induced_hom(&b).unwrap();
                    let e = induced_hom_explicit(&b).unwrap();
                    ensure(
                        a.matrix() == e.matrix(),
                        format!("{file}/{name} n={n} G={g}"),
                    )?;
                    comparisons += 1;
                }
            }
        }
    }
    ensure(bordisms >= 20, format!("only {bordisms} bordisms"))?;
    Ok(format!(
        "{bordisms} bordisms, {comparisons} exact matrix comparisons"
    ))
}

fn criterion_6() -> Outcome {
    let groups = groups_up_to(12);
    for g in &groups {
        let level = lcm_level(g);
        let a = corner_algebra(&corpus::point(), 1, g, level).unwrap();
        ensure(
            a.base.rank() as u64 == g.order(),
            format!("{g}: corner rank {}", a.base.rank()),
        )?;
        ensure(
            a.is_pointwise(),
            format!("{g}: corner product not pointwise"),
        )?;
        let t = trimodule_product(g, level).unwrap();
        ensure(
            t.standard,
            format!("{g}: trimodule product is not the group law"),
        )?;
    }
    Ok(format!("{} groups of order at most 12", groups.len()))
}

fn criterion_7() -> Outcome {
    let mut held = 0;
    let mut checked = 0;
    let mut failure_reported = false;
    for (file, doc) in corpus::documents() {
        let cx = doc.load().unwrap();
        for name in doc.compositions.keys() {
            for n in 0..2 {
                for g in coefficient_groups() {
                    let c = doc.composition(&cx, name, n, &g, 4).unwrap();
                    let r = compose_check(&c).unwrap();
                    checked += 1;
                    if r.criterion_holds {
                        held += 1;
                        ensure(
                            r.equal,
                            format!("{file}/{name} n={n} G={g}: criterion holds, matrices differ"),
                        )?;
                    }
                    if name == "circle_in_circle" && n == 0 {
                        ensure(
                            !r.criterion_holds,
                            format!("S¹ in S¹ G={g}: criterion holds"),
                        )?;
                        ensure(
                            r.verdict.starts_with("criterion fails"),
                            format!("S¹ in S¹: verdict {:?}", r.verdict),
                        )?;
                        failure_reported = true;
                    }
                }
            }
        }
    }
    ensure(failure_reported, "S¹ in S¹ case missing")?;
    Ok(format!("{held} of {checked} decompositions satisfy the criterion and compose exactly; S¹ in S¹ reported failing"))
}

fn criterion_8() -> Outcome {
    let mut isos = 0;
    let mut defect = None;
    for (name, doc) in corpus::gluings() {
        let data = doc.load().unwrap();
        for n in 0..3 {
            for g in coefficient_groups() {
                let r = glue_compare(&data, n, &g).unwrap();
                let m = check_modularity_criterion(&data, n, &g).unwrap();
                ensure(
                    r.iso == m.holds,
                    format!("{name} n={n} G={g}: iso {} vs criterion {}", r.iso, m.holds),
                )?;
                if data.glued.dim() <= n {
                    ensure(r.iso, format!("{name} n={n} G={g}: not an isomorphism"))?;
                    isos += 1;
                }
                if name == "interval_to_circle" && n == 0 {
                    ensure(!r.iso, format!("interval to circle G={g}: reported iso"))?;
                    ensure(
                        r.defect == g.order() as i64 - 1,
                        format!("interval to circle G={g}: defect {}", r.defect),
                    )?;
                    if g.order() == 2 {
                        defect = Some(r.defect);
                    }
                }
            }
        }
    }
    let defect = defect.ok_or("interval to circle case missing")?;
    Ok(format!("{isos} gluings of n-dimensional boundaries iso; interval to circle at n=0 not iso, defect {defect} over Z/2"))
}

fn criterion_9() -> Outcome {
    let small = [
        vec![],
        vec![2],
        vec![3],
        vec![4],
        vec![2, 2],
        vec![5],
        vec![6],
    ];
    let mut cells = 0u64;
    for o in &small {
        let g = grp(o);
        let elems = g.enumerate();
        for len in 1..=4usize {
            for idx in 0..elems.len().pow(len as u32) {
                let mut r = idx;
                let cell: Vec<GroupElement> = (0..len)
                    .map(|_| {
                        let e = elems[r % elems.len()].clone();
                        r /= elems.len();
                        e
                    })
                    .collect();
                let d = bar_boundary(&g, &cell).unwrap();
                ensure(
                    bar_boundary_chain(&g, &d).unwrap().is_empty(),
                    format!("∂∂ ≠ 0 on {cell:?}"),
                )?;
                cells += 1;
            }
        }
        let (d3, d4) = b2_differentials(&g);
        ensure(d4.mul(&d3).unwrap().is_zero(), format!("δδ ≠ 0 for {g}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let groups = [
        grp(&[2]),
        grp(&[3]),
        grp(&[4]),
        grp(&[2, 2]),
        grp(&[5]),
        grp(&[6]),
    ];
    for i in 0..1000 {
        let g = &groups[i % groups.len()];
        let level = [4u64, 6, 8, 12, 3, 5][rng.gen_range(0..6)];
        let ring = CyclotomicRing::new(level).unwrap();
        let size = (g.order() * g.order()) as usize;
        let exps: Vec<i64> = (0..size).map(|_| rng.gen_range(0..level as i64)).collect();
        let mu = BarCochain2::from_exponents(g.clone(), ring, &exps).unwrap();
        let c = b2_coboundary(&mu).unwrap();
        ensure(
            is_b2_4cocycle(&c).holds,
            format!("coboundary #{i} over {g} is not a cocycle"),
        )?;
    }
    Ok(format!(
        "∂∂ = 0 on {cells} cells, δδ = 0 for {} groups, 1000 random coboundaries are cocycles",
        small.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (k, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {k}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k}: FAIL ({detail})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
