//! Bundled example complexes, bordisms, gluings and presentations.

use std::collections::BTreeMap;

use crate::abelian::{FiniteAbelianGroup, IntegerMatrix};
use crate::cellular::{CwComplex, Subcomplex};
use crate::error::Result;
use crate::groupcat::{enumerate_presentations, CategoryPresentation};
use crate::tqft::{BordismSpec, ComplexDocument, CompositionSpec, GluingDocument};

fn build(cells: &[&[&str]], boundary: &[&[&[i64]]]) -> CwComplex {
    let cells: Vec<Vec<String>> = cells
        .iter()
        .map(|l| l.iter().map(|s| s.to_string()).collect())
        .collect();
    let mats = boundary
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            let (r, c) = (cells[k].len(), cells[k + 1].len());
            if rows.is_empty() {
                IntegerMatrix::zeros(r, c)
            } else {
                let rows: Vec<Vec<i64>> = rows.iter().map(|x| x.to_vec()).collect();
                IntegerMatrix::from_rows(r, c, &rows).expect("corpus matrix shape")
            }
        })
        .collect();
    CwComplex::new(cells, mats).expect("corpus complex")
}

fn with(mut cx: CwComplex, subs: &[(&str, &[&str])]) -> CwComplex {
    for (name, cells) in subs {
        let s = cx.closure_of_names(cells).expect("corpus subcomplex");
        cx.add_subcomplex(name, s).expect("corpus subcomplex");
    }
    cx
}

fn with_product_subs(
    mut prod: CwComplex,
    a: &CwComplex,
    b: &CwComplex,
    subs: &[(&str, &str, &str)],
) -> CwComplex {
    for (name, sa, sb) in subs {
        let s = CwComplex::product_sub(&prod, a, &a.named(sa).unwrap(), b, &b.named(sb).unwrap())
            .expect("product subcomplex");
        prod.add_subcomplex(name, s).expect("product subcomplex");
    }
    prod
}

pub fn point() -> CwComplex {
    with(build(&[&["p"]], &[]), &[("pt", &["p"])])
}

/// `e` runs from `v0` to `v1`.
pub fn interval() -> CwComplex {
    with(
        build(&[&["v0", "v1"], &["e"]], &[&[&[-1], &[1]]]),
        &[
            ("I", &["e"]),
            ("dI", &["v0", "v1"]),
            ("v0", &["v0"]),
            ("v1", &["v1"]),
        ],
    )
}

/// Two vertices, upper arc `u` from `v0` to `v1`, lower arc `l` back.
pub fn circle() -> CwComplex {
    with(
        build(&[&["v0", "v1"], &["u", "l"]], &[&[&[-1, 1], &[1, -1]]]),
        &[
            ("U", &["u"]),
            ("L", &["l"]),
            ("V", &["v0", "v1"]),
            ("v0", &["v0"]),
            ("v1", &["v1"]),
            ("S", &["u", "l"]),
        ],
    )
}

/// One vertex and one loop.
pub fn loop_circle() -> CwComplex {
    with(build(&[&["v"], &["e"]], &[&[&[0]]]), &[("v", &["v"])])
}

pub fn disk() -> CwComplex {
    with(
        build(
            &[&["v0", "v1"], &["u", "l"], &["D"]],
            &[&[&[-1, 1], &[1, -1]], &[&[1], &[1]]],
        ),
        &[("S", &["u", "l"]), ("v0", &["v0"])],
    )
}

pub fn sphere() -> CwComplex {
    with(build(&[&["v"], &[], &["f"]], &[&[], &[]]), &[("v", &["v"])])
}

/// Two hemispheres `N`, `S` on a common equator.
pub fn sphere_hemispheres() -> CwComplex {
    with(
        build(
            &[&["v0", "v1"], &["u", "l"], &["N", "S"]],
            &[&[&[-1, 1], &[1, -1]], &[&[1, 1], &[1, 1]]],
        ),
        &[
            ("equator", &["u", "l"]),
            ("north", &["N"]),
            ("south", &["S"]),
        ],
    )
}

/// `∂f = a + b − a − b`.
pub fn torus() -> CwComplex {
    with(
        build(&[&["v"], &["a", "b"], &["f"]], &[&[], &[]]),
        &[
            ("wedge", &["a", "b"]),
            ("a", &["a"]),
            ("b", &["b"]),
            ("v", &["v"]),
        ],
    )
}

/// `∂f = 2a`.
pub fn rp2() -> CwComplex {
    with(
        build(&[&["v"], &["a"], &["f"]], &[&[&[0]], &[&[2]]]),
        &[("a", &["a"]), ("v", &["v"])],
    )
}

/// Cone on three points: arms `e_i` from `p_i` to the cone point `o`.
pub fn cone3() -> CwComplex {
    with(
        build(
            &[&["p1", "p2", "p3", "o"], &["e1", "e2", "e3"]],
            &[&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1], &[1, 1, 1]]],
        ),
        &[
            ("P", &["p1", "p2", "p3"]),
            ("p1", &["p1"]),
            ("p3", &["p3"]),
            ("p12", &["p1", "p2"]),
            ("p23", &["p2", "p3"]),
        ],
    )
}

/// Interval subdivided at `v1`.
pub fn path() -> CwComplex {
    with(
        build(
            &[&["v0", "v1", "v2"], &["e1", "e2"]],
            &[&[&[-1, 0], &[1, -1], &[0, 1]]],
        ),
        &[
            ("X1", &["e1"]),
            ("X2", &["e2"]),
            ("v0", &["v0"]),
            ("v1", &["v1"]),
            ("v2", &["v2"]),
        ],
    )
}

/// `I × I`; the first factor is horizontal.
pub fn square() -> CwComplex {
    let i = interval();
    let sq = CwComplex::product(&i, &i).expect("square");
    let sq = with_product_subs(
        sq,
        &i,
        &i,
        &[
            ("bottom", "I", "v0"),
            ("top", "I", "v1"),
            ("left", "v0", "I"),
            ("right", "v1", "I"),
            ("sides", "dI", "I"),
        ],
    );
    let mut sq = sq;
    let b = sq
        .named("bottom")
        .unwrap()
        .union(&sq.named("sides").unwrap());
    let t = sq.named("top").unwrap().union(&sq.named("sides").unwrap());
    let all = sq.named("bottom").unwrap().union(&t);
    sq.add_subcomplex("bottom_sides", b).unwrap();
    sq.add_subcomplex("top_sides", t).unwrap();
    sq.add_subcomplex("boundary", all).unwrap();
    sq
}

/// `S¹ × I`.
pub fn annulus() -> CwComplex {
    let c = circle();
    let i = interval();
    let a = CwComplex::product(&c, &i).expect("annulus");
    let mut a = with_product_subs(a, &c, &i, &[("inner", "all", "v0"), ("outer", "all", "v1")]);
    let both = a.named("inner").unwrap().union(&a.named("outer").unwrap());
    a.add_subcomplex("both", both).unwrap();
    a
}

/// `S¹ × [0,2]` cut at the middle circle.
pub fn cylinder_chain() -> CwComplex {
    let c = circle();
    let p = path();
    let x = CwComplex::product(&c, &p).expect("cylinder");
    with_product_subs(
        x,
        &c,
        &p,
        &[
            ("X1", "all", "X1"),
            ("X2", "all", "X2"),
            ("Y0", "all", "v0"),
            ("Y1", "all", "v1"),
            ("Y2", "all", "v2"),
        ],
    )
}

/// `I × [0,2]` cut at the middle segment.
pub fn strip_chain() -> CwComplex {
    let i = interval();
    let p = path();
    let x = CwComplex::product(&i, &p).expect("strip");
    with_product_subs(
        x,
        &i,
        &p,
        &[
            ("X1", "I", "X1"),
            ("X2", "I", "X2"),
            ("Y0", "I", "v0"),
            ("Y1", "I", "v1"),
            ("Y2", "I", "v2"),
        ],
    )
}

/// Triangle with edges `ea: p0→p1`, `eb: p1→p2`, `ec: p0→p2` and
/// `∂F = ea + eb − ec`.
pub fn triangle() -> CwComplex {
    with(
        build(
            &[&["p0", "p1", "p2"], &["ea", "eb", "ec"], &["F"]],
            &[
                &[&[-1, 0, -1], &[1, -1, 0], &[0, 1, 1]],
                &[&[1], &[1], &[-1]],
            ],
        ),
        &[
            ("ab", &["ea", "eb"]),
            ("c", &["ec"]),
            ("corners", &["p0", "p1", "p2"]),
            ("p1", &["p1"]),
        ],
    )
}

pub fn two_points() -> CwComplex {
    build(&[&["a", "b"]], &[])
}

/// Every bundled complex by file stem.
pub fn complexes() -> Vec<(&'static str, CwComplex)> {
    vec![
        ("point", point()),
        ("interval", interval()),
        ("circle", circle()),
        ("loop", loop_circle()),
        ("disk", disk()),
        ("sphere", sphere()),
        ("sphere_hemispheres", sphere_hemispheres()),
        ("torus", torus()),
        ("rp2", rp2()),
        ("cone3", cone3()),
        ("path", path()),
        ("square", square()),
        ("annulus", annulus()),
        ("cylinder_chain", cylinder_chain()),
        ("strip_chain", strip_chain()),
        ("triangle", triangle()),
    ]
}

fn b(space: &str, incoming: &str, outgoing: &str) -> BordismSpec {
    BordismSpec {
        space: space.into(),
        incoming: incoming.into(),
        outgoing: outgoing.into(),
    }
}

fn c(first: &str, second: &str) -> CompositionSpec {
    CompositionSpec {
        first: first.into(),
        second: second.into(),
    }
}

fn bordisms_for(
    name: &str,
) -> (
    Vec<(&'static str, BordismSpec)>,
    Vec<(&'static str, CompositionSpec)>,
) {
    let closed = ("closed", b("all", "empty", "empty"));
    match name {
        "point" => (vec![closed, ("identity", b("all", "all", "all"))], vec![]),
        "interval" => (
            vec![
                closed,
                ("v0_to_v1", b("all", "v0", "v1")),
                ("ends_to_empty", b("all", "dI", "empty")),
                ("empty_to_ends", b("all", "empty", "dI")),
            ],
            vec![],
        ),
        "circle" => (
            vec![
                closed,
                ("ends_to_empty", b("all", "V", "empty")),
                ("arc", b("U", "v0", "v1")),
                ("circle_in", b("all", "empty", "all")),
                ("circle_out", b("all", "all", "empty")),
            ],
            vec![("circle_in_circle", c("circle_in", "circle_out"))],
        ),
        "loop" => (vec![closed, ("point_to_point", b("all", "v", "v"))], vec![]),
        "disk" => (
            vec![
                closed,
                ("boundary_to_empty", b("all", "S", "empty")),
                ("empty_to_boundary", b("all", "empty", "S")),
            ],
            vec![],
        ),
        "sphere" => (
            vec![closed, ("point_to_empty", b("all", "v", "empty"))],
            vec![],
        ),
        "sphere_hemispheres" => (
            vec![
                closed,
                ("cap", b("north", "empty", "equator")),
                ("cup", b("south", "equator", "empty")),
            ],
            vec![("cap_then_cup", c("cap", "cup"))],
        ),
        "torus" => (
            vec![
                closed,
                ("a_to_b", b("all", "a", "b")),
                ("wedge_to_empty", b("all", "wedge", "empty")),
            ],
            vec![],
        ),
        "rp2" => (vec![closed, ("a_to_empty", b("all", "a", "empty"))], vec![]),
        "cone3" => (
            vec![
                ("ends_to_empty", b("all", "P", "empty")),
                ("two_to_one", b("all", "p12", "p3")),
                ("one_to_two", b("all", "p1", "p23")),
            ],
            vec![],
        ),
        "path" => (
            vec![
                ("first", b("X1", "v0", "v1")),
                ("second", b("X2", "v1", "v2")),
                ("whole", b("all", "v0", "v2")),
            ],
            vec![("halves", c("first", "second"))],
        ),
        "square" => (
            vec![
                closed,
                ("identity_rel_sides", b("all", "bottom_sides", "top_sides")),
                ("bottom_to_top", b("all", "bottom", "top")),
                ("boundary_to_empty", b("all", "boundary", "empty")),
            ],
            vec![],
        ),
        "annulus" => (
            vec![
                closed,
                ("inner_to_outer", b("all", "inner", "outer")),
                ("both_to_empty", b("all", "both", "empty")),
            ],
            vec![],
        ),
        "cylinder_chain" | "strip_chain" => (
            vec![
                ("first", b("X1", "Y0", "Y1")),
                ("second", b("X2", "Y1", "Y2")),
                ("whole", b("all", "Y0", "Y2")),
            ],
            vec![("halves", c("first", "second"))],
        ),
        "triangle" => (vec![("product", b("all", "ab", "c"))], vec![]),
        _ => (vec![], vec![]),
    }
}

/// Complex documents with their bordisms and compositions.
pub fn documents() -> Vec<(&'static str, ComplexDocument)> {
    complexes()
        .into_iter()
        .map(|(name, cx)| {
            let (bs, cs) = bordisms_for(name);
            let doc = ComplexDocument {
                complex: cx.to_repr(Some(name.to_string())),
                bordisms: bs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                compositions: cs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            };
            (name, doc)
        })
        .collect()
}

fn names(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn sub_named(cx: &mut CwComplex, name: &str, cells: &[&str]) {
    let s: Subcomplex = if cells.is_empty() {
        cx.empty_sub()
    } else {
        cx.closure_of_names(cells).unwrap()
    };
    cx.add_subcomplex(name, s).unwrap();
}

fn gluing(
    name: &str,
    mut unglued: CwComplex,
    w1: &[&str],
    w2: &[&str],
    v: &[&str],
    mut glued: CwComplex,
    w: &[&str],
    vg: &[&str],
    quotient: &[(&str, &str)],
) -> (String, GluingDocument) {
    sub_named(&mut unglued, "W1", w1);
    sub_named(&mut unglued, "W2", w2);
    sub_named(&mut unglued, "V", v);
    sub_named(&mut glued, "W", w);
    sub_named(&mut glued, "V", vg);
    let doc = GluingDocument {
        format: crate::groupcat::FORMAT.to_string(),
        name: name.to_string(),
        unglued: unglued.to_repr(None),
        glued: glued.to_repr(None),
        w1: "W1".into(),
        w2: "W2".into(),
        v: "V".into(),
        w: "W".into(),
        v_glued: "V".into(),
        quotient: names(quotient),
    };
    (name.to_string(), doc)
}

fn identity_pairs(cx: &CwComplex, prefix: &str) -> Vec<(String, String)> {
    (0..=cx.dim())
        .flat_map(|d| {
            cx.cells(d)
                .iter()
                .map(|n| (format!("{prefix}{n}"), n.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Gluing data: an unglued complex with two copies `W1`, `W2` of the
/// gluing locus and the rest of its boundary `V`, the glued complex, and
/// the quotient on cells.
pub fn gluings() -> Vec<(String, GluingDocument)> {
    let mut out = Vec::new();
    let i = interval();
    let two = CwComplex::disjoint_union(&i, "a.", &i, "b.").unwrap();
    out.push(gluing(
        "intervals_to_interval",
        two,
        &["a.v1"],
        &["b.v0"],
        &["a.v0", "b.v1"],
        path(),
        &["v1"],
        &["v0", "v2"],
        &[
            ("a.v0", "v0"),
            ("a.v1", "v1"),
            ("b.v0", "v1"),
            ("b.v1", "v2"),
            ("a.e", "e1"),
            ("b.e", "e2"),
        ],
    ));
    out.push(gluing(
        "interval_to_circle",
        i.clone(),
        &["v0"],
        &["v1"],
        &[],
        loop_circle(),
        &["v"],
        &[],
        &[("v0", "v"), ("v1", "v"), ("e", "e")],
    ));
    let c3 = cone3();
    let two_cones = CwComplex::disjoint_union(&c3, "a.", &c3, "b.").unwrap();
    let joined = build(
        &[
            &["a1", "a2", "m", "ao", "b2", "b3", "bo"],
            &["a.e1", "a.e2", "a.e3", "b.e1", "b.e2", "b.e3"],
        ],
        &[&[
            &[-1, 0, 0, 0, 0, 0],
            &[0, -1, 0, 0, 0, 0],
            &[0, 0, -1, -1, 0, 0],
            &[1, 1, 1, 0, 0, 0],
            &[0, 0, 0, 0, -1, 0],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 1, 1, 1],
        ]],
    );
    out.push(gluing(
        "cones_at_a_point",
        two_cones,
        &["a.p3"],
        &["b.p1"],
        &["a.p1", "a.p2", "b.p2", "b.p3"],
        joined,
        &["m"],
        &["a1", "a2", "b2", "b3"],
        &[
            ("a.p1", "a1"),
            ("a.p2", "a2"),
            ("a.p3", "m"),
            ("a.o", "ao"),
            ("b.p1", "m"),
            ("b.p2", "b2"),
            ("b.p3", "b3"),
            ("b.o", "bo"),
            ("a.e1", "a.e1"),
            ("a.e2", "a.e2"),
            ("a.e3", "a.e3"),
            ("b.e1", "b.e1"),
            ("b.e2", "b.e2"),
            ("b.e3", "b.e3"),
        ],
    ));
    let d = disk();
    let two_disks = CwComplex::disjoint_union(&d, "a.", &d, "b.").unwrap();
    out.push(gluing(
        "disks_to_sphere",
        two_disks,
        &["a.u", "a.l"],
        &["b.u", "b.l"],
        &[],
        sphere_hemispheres(),
        &["u", "l"],
        &[],
        &[
            ("a.v0", "v0"),
            ("a.v1", "v1"),
            ("b.v0", "v0"),
            ("b.v1", "v1"),
            ("a.u", "u"),
            ("a.l", "l"),
            ("b.u", "u"),
            ("b.l", "l"),
            ("a.D", "N"),
            ("b.D", "S"),
        ],
    ));
    let sq = square();
    let two_squares = CwComplex::disjoint_union(&sq, "a.", &sq, "b.").unwrap();
    let strip = strip_chain();
    // the left copy occupies [0,1] in the second factor, the right copy [1,2]
    let shift = |pairs: Vec<(String, String)>, map: [(&str, &str); 3]| -> Vec<(String, String)> {
        pairs
            .into_iter()
            .map(|(src, tgt)| {
                let (first, second) = tgt.split_once('*').expect("product cell");
                let second = map
                    .iter()
                    .find(|(a, _)| *a == second)
                    .expect("factor cell")
                    .1;
                (src, format!("{first}*{second}"))
            })
            .collect()
    };
    let mut q = shift(
        identity_pairs(&sq, "a."),
        [("v0", "v0"), ("v1", "v1"), ("e", "e1")],
    );
    q.extend(shift(
        identity_pairs(&sq, "b."),
        [("v0", "v1"), ("v1", "v2"), ("e", "e2")],
    ));
    let qref: Vec<(&str, &str)> = q.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    out.push(gluing(
        "squares_to_strip",
        two_squares,
        &["a.e*v1"],
        &["b.e*v0"],
        &[],
        strip,
        &["e*v1"],
        &[],
        &qref,
    ));
    out.push(gluing(
        "nothing_glued",
        i.clone(),
        &[],
        &[],
        &["v0", "v1"],
        i,
        &[],
        &["v0", "v1"],
        &[("v0", "v0"), ("v1", "v1"), ("e", "e")],
    ));
    out
}

/// Presentations by file stem: the four over `Z/2`, and all valid ones
/// over `Z/3` at level 3 and `Z/4` at level 8.
pub fn presentations() -> Result<Vec<(String, CategoryPresentation)>> {
    let z2 = FiniteAbelianGroup::cyclic(2)?;
    let mut out = vec![
        (
            "z2_sigma_1".to_string(),
            CategoryPresentation::from_root_exponents(z2.clone(), 4, &[0], &[])?,
        ),
        (
            "z2_sigma_minus1".to_string(),
            CategoryPresentation::from_root_exponents(z2.clone(), 4, &[2], &[])?,
        ),
        (
            "z2_sigma_i".to_string(),
            CategoryPresentation::from_root_exponents(z2.clone(), 4, &[1], &[])?,
        ),
        (
            "z2_sigma_minus_i".to_string(),
            CategoryPresentation::from_root_exponents(z2, 4, &[3], &[])?,
        ),
    ];
    for (n, level) in [(3u64, 3u64), (4, 8)] {
        let g = FiniteAbelianGroup::cyclic(n)?;
        for (k, p) in enumerate_presentations(&g, level)?.into_iter().enumerate() {
            out.push((format!("z{n}_family_{k}"), p));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Complex,
    Gluing,
    Category,
}

/// One bundled file: relative path and its JSON text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub kind: CorpusKind,
    pub path: String,
    pub contents: String,
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("corpus serialization");
    s.push('\n');
    s
}

/// Every bundled file.
pub fn corpus() -> Result<Vec<CorpusFile>> {
    let mut files = Vec::new();
    for (name, doc) in documents() {
        files.push(CorpusFile {
            kind: CorpusKind::Complex,
            path: format!("{name}.json"),
            contents: pretty(&doc),
        });
    }
    for (name, doc) in gluings() {
        files.push(CorpusFile {
            kind: CorpusKind::Gluing,
            path: format!("{name}.json"),
            contents: pretty(&doc),
        });
    }
    for (name, p) in presentations()? {
        files.push(CorpusFile {
            kind: CorpusKind::Category,
            path: format!("{name}.json"),
            contents: pretty(&p),
        });
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_round_trip() {
        for f in corpus().unwrap() {
            let again = match f.kind {
                CorpusKind::Complex => {
                    let d: ComplexDocument = serde_json::from_str(&f.contents).unwrap();
                    d.validate().unwrap();
                    pretty(&d)
                }
                CorpusKind::Gluing => {
                    let d: GluingDocument = serde_json::from_str(&f.contents).unwrap();
                    d.load().unwrap();
                    pretty(&d)
                }
                CorpusKind::Category => {
                    let p: CategoryPresentation = serde_json::from_str(&f.contents).unwrap();
                    pretty(&p)
                }
            };
            assert_eq!(again, f.contents, "{}", f.path);
        }
    }

    #[test]
    fn required_entries() {
        let files = corpus().unwrap();
        let has = |p: &str| files.iter().any(|f| f.path == p);
        assert!(has("cone3.json"));
        assert!(has("interval_to_circle.json"));
        for s in ["1", "minus1", "i", "minus_i"] {
            assert!(has(&format!("z2_sigma_{s}.json")));
        }
        let mut paths: Vec<&str> = files.iter().map(|f| f.path.as_str()).collect();
        paths.sort();
        paths.dedup();
        assert_eq!(paths.len(), files.len());
        let c3 = cone3();
        assert_eq!(c3.named("P").unwrap().cells(0), vec![0, 1, 2]);
        let count: usize = documents().iter().map(|(_, d)| d.bordisms.len()).sum();
        assert!(count >= 20);
    }
}
