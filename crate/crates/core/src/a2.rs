//! The two-vertex diagram in closed form: the graded product `•` and the
//! filtered product `★` on `E(A2)`, the induced products on the eight
//! dimensional endomorphism algebra, their coproducts, and a realization of
//! `(E, •)` by 2×2 matrices over the Grassmann numbers `c + dθ`, `θ² = 0`.
//!
//! Tables here are written out by hand and serve as an oracle for the
//! generic machinery in [`crate::endo`].

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::Serialize;
use serde_json::json;

use crate::endo::{EndAlgebra, EndoTensor, GradedEndo, Mono, Product};
use crate::error::Result;
use crate::essential::{EssentialSpace, SpaceOptions};
use crate::graph::{build_ade, AdeFamily};
use crate::path::{ElementaryPath, PathVector};
use crate::report::CheckReport;

/// Basis of `E(A2)`.
pub const A1: usize = 0;
pub const A2: usize = 1;
pub const R: usize = 2;
pub const L: usize = 3;
pub const PATH_NAMES: [&str; 4] = ["a1", "a2", "r", "l"];

const fn grade(x: usize) -> usize {
    if x < 2 {
        0
    } else {
        1
    }
}

/// `x • y` on basis elements; `None` is zero.
pub fn graded_table(x: usize, y: usize) -> Option<usize> {
    match (x, y) {
        (A1, A1) => Some(A1),
        (A2, A2) => Some(A2),
        (A1, R) | (R, A2) => Some(R),
        (A2, L) | (L, A1) => Some(L),
        _ => None,
    }
}

/// `x ★ y`: as `•` except `r ★ l = a1` and `l ★ r = a2`.
pub fn filtered_table(x: usize, y: usize) -> Option<usize> {
    match (x, y) {
        (R, L) => Some(A1),
        (L, R) => Some(A2),
        _ => graded_table(x, y),
    }
}

/// Element of `E(A2)` over `(a1, a2, r, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct A2Element(pub [f64; 4]);

impl A2Element {
    pub fn basis(x: usize) -> Self {
        let mut c = [0.0; 4];
        c[x] = 1.0;
        A2Element(c)
    }
}

fn bilinear4(t: fn(usize, usize) -> Option<usize>, x: &A2Element, y: &A2Element) -> A2Element {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if let Some(k) = t(i, j) {
                out[k] += x.0[i] * y.0[j];
            }
        }
    }
    A2Element(out)
}

pub fn bullet(x: &A2Element, y: &A2Element) -> A2Element {
    bilinear4(graded_table, x, y)
}

pub fn star_product(x: &A2Element, y: &A2Element) -> A2Element {
    bilinear4(filtered_table, x, y)
}

/// Basis of the endomorphism algebra, `ρ_xy = x ⊗ y♯`.
pub const ENDO_PAIRS: [(usize, usize); 8] =
    [(A1, A1), (A1, A2), (A2, A1), (A2, A2), (R, R), (R, L), (L, R), (L, L)];
pub const ENDO_NAMES: [&str; 8] = ["11", "12", "21", "22", "rr", "rl", "lr", "ll"];
pub const RHO_11: usize = 0;
pub const RHO_12: usize = 1;
pub const RHO_21: usize = 2;
pub const RHO_22: usize = 3;
pub const RHO_RR: usize = 4;
pub const RHO_RL: usize = 5;
pub const RHO_LR: usize = 6;
pub const RHO_LL: usize = 7;

fn endo_index(x: usize, y: usize) -> Option<usize> {
    ENDO_PAIRS.iter().position(|&p| p == (x, y))
}

/// Element of the endomorphism algebra over `ENDO_PAIRS`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct A2Endo(pub [f64; 8]);

impl A2Endo {
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 8];
        c[k] = 1.0;
        A2Endo(c)
    }

    pub fn sum(ks: &[usize]) -> Self {
        let mut c = [0.0; 8];
        for &k in ks {
            c[k] += 1.0;
        }
        A2Endo(c)
    }
}

/// Product of basis endomorphisms; `None` is zero.
pub type EndoTable = fn(usize, usize) -> Option<usize>;

/// `ρ_xy ∘ ρ_zw = δ_yz ρ_xw`.
pub fn compose_table(p: usize, q: usize) -> Option<usize> {
    let ((x, y), (z, w)) = (ENDO_PAIRS[p], ENDO_PAIRS[q]);
    (y == z).then(|| endo_index(x, w)).flatten()
}

/// `ρ_xy • ρ_zw = (x • z) ⊗ (y • w)♯`.
pub fn endo_graded_table(p: usize, q: usize) -> Option<usize> {
    let ((x, y), (z, w)) = (ENDO_PAIRS[p], ENDO_PAIRS[q]);
    endo_index(graded_table(x, z)?, graded_table(y, w)?)
}

/// `ρ_xy ★ ρ_zw = (x ★ z) ⊗ (y ★ w)♯`.
pub fn endo_filtered_table(p: usize, q: usize) -> Option<usize> {
    let ((x, y), (z, w)) = (ENDO_PAIRS[p], ENDO_PAIRS[q]);
    endo_index(filtered_table(x, z)?, filtered_table(y, w)?)
}

fn bilinear8(t: EndoTable, x: &A2Endo, y: &A2Endo) -> A2Endo {
    let mut out = [0.0; 8];
    for i in 0..8 {
        for j in 0..8 {
            if let Some(k) = t(i, j) {
                out[k] += x.0[i] * y.0[j];
            }
        }
    }
    A2Endo(out)
}

pub fn compose(x: &A2Endo, y: &A2Endo) -> A2Endo {
    bilinear8(compose_table, x, y)
}

pub fn endo_bullet(x: &A2Endo, y: &A2Endo) -> A2Endo {
    bilinear8(endo_graded_table, x, y)
}

pub fn star_product_endo(x: &A2Endo, y: &A2Endo) -> A2Endo {
    bilinear8(endo_filtered_table, x, y)
}

/// `D x = Σ ±u ⊗ v`: terms `(u, v, coefficient)`.
pub type PathCoproduct = Vec<(usize, usize, f64)>;
/// `Δρ`: terms `(left, right, coefficient)` over `ENDO_PAIRS` indices.
pub type EndoCoproduct = Vec<(usize, usize, f64)>;

/// Dual of the graded product on `E(A2)`, as written out by hand.
pub fn path_coproduct_golden(x: usize) -> PathCoproduct {
    match x {
        A1 => vec![(A1, A1, 1.0)],
        A2 => vec![(A2, A2, 1.0)],
        R => vec![(A1, R, 1.0), (R, A2, 1.0)],
        _ => vec![(A2, L, 1.0), (L, A1, 1.0)],
    }
}

/// Coproduct dual to `•` on the endomorphisms, after projecting away the
/// terms that are not grade preserving on each leg.
pub fn graded_coproduct_golden(k: usize) -> EndoCoproduct {
    match k {
        RHO_RR => vec![(RHO_11, RHO_RR, 1.0), (RHO_RR, RHO_22, 1.0)],
        RHO_LL => vec![(RHO_22, RHO_LL, 1.0), (RHO_LL, RHO_11, 1.0)],
        RHO_RL => vec![(RHO_12, RHO_RL, 1.0), (RHO_RL, RHO_21, 1.0)],
        RHO_LR => vec![(RHO_21, RHO_LR, 1.0), (RHO_LR, RHO_12, 1.0)],
        k => vec![(k, k, 1.0)],
    }
}

/// Coproduct dual to `★`.
pub fn filtered_coproduct_golden(k: usize) -> EndoCoproduct {
    match k {
        RHO_11 => vec![(RHO_11, RHO_11, 1.0), (RHO_RR, RHO_LL, 1.0)],
        RHO_12 => vec![(RHO_12, RHO_12, 1.0), (RHO_RL, RHO_LR, 1.0)],
        RHO_21 => vec![(RHO_21, RHO_21, 1.0), (RHO_LR, RHO_RL, 1.0)],
        RHO_22 => vec![(RHO_22, RHO_22, 1.0), (RHO_LL, RHO_RR, 1.0)],
        k => graded_coproduct_golden(k),
    }
}

/// `Δ1 = (11 + ll) ⊗ (11 + rr) + (rr + 22) ⊗ (ll + 22)` for the filtered
/// coproduct, with `1 = ρ_11 + ρ_22 + ρ_rr + ρ_ll`.
pub fn filtered_unit_coproduct_golden() -> EndoCoproduct {
    let mut out = Vec::new();
    for (ls, rs) in [([RHO_11, RHO_LL], [RHO_11, RHO_RR]), ([RHO_RR, RHO_22], [RHO_LL, RHO_22])] {
        for &x in &ls {
            for &y in &rs {
                out.push((x, y, 1.0));
            }
        }
    }
    out
}

/// Dual of a product table on `E(A2)` (orthonormal basis).
pub fn dual_path_coproduct(t: fn(usize, usize) -> Option<usize>, x: usize) -> PathCoproduct {
    let mut out = Vec::new();
    for u in 0..4 {
        for v in 0..4 {
            if t(u, v) == Some(x) {
                out.push((u, v, 1.0));
            }
        }
    }
    out
}

/// `(P ⊗ P)(1 ⊗ τ ⊗ 1)(D ⊗ D)ρ_xy`, dropping non grade preserving legs.
pub fn dual_endo_coproduct(t: fn(usize, usize) -> Option<usize>, k: usize) -> EndoCoproduct {
    let (x, y) = ENDO_PAIRS[k];
    let mut out = Vec::new();
    for (u, v, c) in dual_path_coproduct(t, x) {
        for (u2, v2, d) in dual_path_coproduct(t, y) {
            if grade(u) == grade(u2) && grade(v) == grade(v2) {
                out.push((endo_index(u, u2).unwrap(), endo_index(v, v2).unwrap(), c * d));
            }
        }
    }
    out
}

fn canonical(terms: impl IntoIterator<Item = (usize, usize, f64)>) -> BTreeMap<(usize, usize), f64> {
    let mut m = BTreeMap::new();
    for (a, b, c) in terms {
        *m.entry((a, b)).or_insert(0.0) += c;
    }
    m.retain(|_, c| *c != 0.0);
    m
}

fn coproduct_diff(a: &[(usize, usize, f64)], b: &[(usize, usize, f64)]) -> f64 {
    let mut m = canonical(a.iter().copied());
    for &(x, y, c) in b {
        *m.entry((x, y)).or_insert(0.0) -= c;
    }
    m.values().fold(0.0, |w, c| w.max(c.abs()))
}

fn coproduct_of(cop: fn(usize) -> EndoCoproduct, x: &A2Endo) -> EndoCoproduct {
    let mut out = Vec::new();
    for k in 0..8 {
        if x.0[k] != 0.0 {
            out.extend(cop(k).into_iter().map(|(a, b, c)| (a, b, c * x.0[k])));
        }
    }
    out
}

// ---------------------------------------------------------------- Grassmann

/// `c + dθ` with `θ² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Grassmann {
    pub c: i64,
    pub d: i64,
}

impl Grassmann {
    pub const ZERO: Grassmann = Grassmann { c: 0, d: 0 };
    pub const ONE: Grassmann = Grassmann { c: 1, d: 0 };
    pub const THETA: Grassmann = Grassmann { c: 0, d: 1 };

    pub fn scale(self, k: i64) -> Grassmann {
        Grassmann { c: self.c * k, d: self.d * k }
    }
}

impl Add for Grassmann {
    type Output = Grassmann;
    fn add(self, o: Grassmann) -> Grassmann {
        Grassmann { c: self.c + o.c, d: self.d + o.d }
    }
}

impl Mul for Grassmann {
    type Output = Grassmann;
    fn mul(self, o: Grassmann) -> Grassmann {
        Grassmann { c: self.c * o.c, d: self.c * o.d + self.d * o.c }
    }
}

/// Pair of 2×2 Grassmann matrices, the two summands of the realization.
pub type GrassmannRep = [[[Grassmann; 2]; 2]; 2];

/// The realization of the eight generators.
pub fn grassmann_rep(k: usize) -> GrassmannRep {
    const O: Grassmann = Grassmann::ZERO;
    const I: Grassmann = Grassmann::ONE;
    const T: Grassmann = Grassmann::THETA;
    const MT: Grassmann = Grassmann { c: 0, d: -1 };
    let z = [[O, O], [O, O]];
    match k {
        RHO_11 => [[[I, O], [O, O]], z],
        RHO_RR => [[[O, T], [O, O]], z],
        RHO_LL => [[[O, O], [T, O]], z],
        RHO_22 => [[[O, O], [O, I]], z],
        RHO_12 => [z, [[O, MT], [T, I]]],
        RHO_RL => [z, [[O, O], [T, O]]],
        RHO_LR => [z, [[O, T], [O, O]]],
        _ => [z, [[I, T], [MT, O]]],
    }
}

fn rep_mul(a: &GrassmannRep, b: &GrassmannRep) -> GrassmannRep {
    let mut out = [[[Grassmann::ZERO; 2]; 2]; 2];
    for s in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[s][i][j] = out[s][i][j] + a[s][i][k] * b[s][k][j];
                }
            }
        }
    }
    out
}

fn rep_of_table_entry(k: Option<usize>) -> GrassmannRep {
    k.map_or([[[Grassmann::ZERO; 2]; 2]; 2], grassmann_rep)
}

/// The realization turns `•` into the matrix product, and each half of the
/// generators closes under `•`. Exact integer arithmetic.
pub fn grassmann_check() -> CheckReport {
    let mut mismatches = Vec::new();
    for p in 0..8 {
        for q in 0..8 {
            let lhs = rep_mul(&grassmann_rep(p), &grassmann_rep(q));
            if lhs != rep_of_table_entry(endo_graded_table(p, q)) {
                mismatches.push(format!("{} • {}", ENDO_NAMES[p], ENDO_NAMES[q]));
            }
        }
    }
    let halves = [[RHO_11, RHO_RR, RHO_LL, RHO_22], [RHO_12, RHO_RL, RHO_LR, RHO_21]];
    let mut open = 0;
    for h in &halves {
        for &p in h {
            for &q in h {
                if endo_graded_table(p, q).is_some_and(|k| !h.contains(&k)) {
                    open += 1;
                }
            }
        }
    }
    let bad = mismatches.len() + open;
    CheckReport::at_most("Grassmann realization reproduces the graded product", bad as f64, 0.0)
        .with_witness(json!({"mismatches": mismatches, "halves_not_closed": open}))
}

/// `E_ij E_kl = δ_jk E_il` for a 2×2 array of basis elements.
pub fn matrix_unit_violations(t: EndoTable, units: [[usize; 2]; 2]) -> usize {
    let mut bad = 0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let want = (j == k).then_some(units[i][l]);
                    if t(units[i][j], units[k][l]) != want {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

pub fn composition_matrix_units() -> [[[usize; 2]; 2]; 2] {
    [[[RHO_11, RHO_12], [RHO_21, RHO_22]], [[RHO_RR, RHO_RL], [RHO_LR, RHO_LL]]]
}

pub fn filtered_matrix_units() -> [[[usize; 2]; 2]; 2] {
    [[[RHO_11, RHO_RR], [RHO_LL, RHO_22]], [[RHO_12, RHO_RL], [RHO_LR, RHO_21]]]
}

// ---------------------------------------------------------------- generic cross-check

/// Position of `E(A2)` basis elements in the generic graded basis.
fn generic_mono(k: usize) -> Mono {
    let (x, y) = ENDO_PAIRS[k];
    // grade 0: a1, a2; grade 1: r = [1,2] (cell 1 -> 2) before l
    let idx = |v: usize| if v < 2 { v } else { v - 2 };
    Mono::new(grade(x), idx(x), idx(y))
}

fn to_generic(alg: &EndAlgebra, x: &A2Endo) -> GradedEndo {
    GradedEndo::from_terms(alg, (0..8).map(|k| (generic_mono(k), x.0[k])))
}

fn tensor_to_generic(cop: &[(usize, usize, f64)]) -> EndoTensor {
    EndoTensor::from_terms(cop.iter().map(|&(a, b, c)| (vec![generic_mono(a), generic_mono(b)], c)))
}

pub fn a2_space() -> Result<EssentialSpace> {
    EssentialSpace::from_graph(build_ade(AdeFamily::A, 2)?, SpaceOptions::default())
}

/// Compares the hand tables with the generic computation on the A2 graph.
pub fn generic_cross_check(alg: &EndAlgebra, tol: f64) -> Vec<CheckReport> {
    let g = alg.space().graph();
    let expected_paths = [vec![0], vec![1], vec![0, 1], vec![1, 0]];
    let mut basis_res = 0.0f64;
    for (x, verts) in expected_paths.iter().enumerate() {
        let p = PathVector::from_path(ElementaryPath::new(g, verts.clone()).expect("A2 edge"));
        let idx = if x < 2 { x } else { x - 2 };
        basis_res = basis_res.max((&alg.space().basis_vector(grade(x), idx) - &p).norm());
    }
    let mut path_prod = 0.0f64;
    for x in 0..4 {
        for y in 0..4 {
            let gx = alg.space().basis_vector(grade(x), if x < 2 { x } else { x - 2 });
            let gy = alg.space().basis_vector(grade(y), if y < 2 { y } else { y - 2 });
            let want = graded_table(x, y).map_or(PathVector::zero(), |k| {
                alg.space().basis_vector(grade(k), if k < 2 { k } else { k - 2 })
            });
            path_prod = path_prod.max((&alg.space().bullet(&gx, &gy) - &want).norm());
        }
    }
    let mut dpath = 0.0f64;
    for x in 0..4 {
        let got: Vec<(usize, usize, f64)> = alg
            .path_coproduct(grade(x), if x < 2 { x } else { x - 2 })
            .into_iter()
            .map(|((p, i), (q, j), c)| (i + 2 * p, j + 2 * q, c))
            .collect();
        dpath = dpath.max(coproduct_diff(&got, &path_coproduct_golden(x)));
    }
    let mut products = 0.0f64;
    for p in 0..8 {
        for q in 0..8 {
            let (ep, eq) = (A2Endo::basis(p), A2Endo::basis(q));
            for (op, table) in [(Product::Bullet, endo_bullet as fn(&A2Endo, &A2Endo) -> A2Endo), (Product::Compose, compose)] {
                let got = alg.product(op, &to_generic(alg, &ep), &to_generic(alg, &eq));
                let want = to_generic(alg, &table(&ep, &eq));
                products = products.max(got.sub(&want).norm());
            }
        }
    }
    let mut cop = 0.0f64;
    for k in 0..8 {
        let got = alg.dual_coproduct(&to_generic(alg, &A2Endo::basis(k)));
        cop = cop.max(got.sub(&tensor_to_generic(&graded_coproduct_golden(k))).norm());
    }
    vec![
        CheckReport::at_most("generic A2 basis is (a1, a2, r, l)", basis_res, tol),
        CheckReport::at_most("generic graded product matches the A2 table", path_prod, tol),
        CheckReport::at_most("generic dual coproduct on paths matches the A2 table", dpath, tol),
        CheckReport::at_most("generic products on endomorphisms match the A2 tables", products, tol),
        CheckReport::at_most("generic dual coproduct on endomorphisms matches the A2 table", cop, tol),
    ]
}

/// All hand-table checks, independent of the generic machinery.
pub fn table_checks() -> Vec<CheckReport> {
    let mut out = vec![grassmann_check()];
    let cu = composition_matrix_units();
    let comp_bad: usize = cu.iter().map(|&u| matrix_unit_violations(compose_table, u)).sum();
    out.push(CheckReport::at_most("composition matrix units", comp_bad as f64, 0.0));
    let fu = filtered_matrix_units();
    let filt_bad: usize = fu.iter().map(|&u| matrix_unit_violations(endo_filtered_table, u)).sum();
    out.push(CheckReport::at_most("filtered product matrix units", filt_bad as f64, 0.0));

    let mut differ = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            if graded_table(x, y) != filtered_table(x, y) {
                differ.push(format!("{}{}", PATH_NAMES[x], PATH_NAMES[y]));
            }
        }
    }
    let expected = vec!["rl".to_string(), "lr".to_string()];
    out.push(
        CheckReport::at_most(
            "filtered and graded products differ exactly on r l and l r",
            if differ == expected { 0.0 } else { 1.0 },
            0.0,
        )
        .with_witness(json!({"differ": differ})),
    );

    let mut assoc = 0.0f64;
    for p in 0..8 {
        for q in 0..8 {
            for r in 0..8 {
                let (a, b, c) = (A2Endo::basis(p), A2Endo::basis(q), A2Endo::basis(r));
                for f in [star_product_endo as fn(&A2Endo, &A2Endo) -> A2Endo, endo_bullet, compose] {
                    let l = f(&f(&a, &b), &c);
                    let rr = f(&a, &f(&b, &c));
                    for k in 0..8 {
                        assoc = assoc.max((l.0[k] - rr.0[k]).abs());
                    }
                }
            }
        }
    }
    out.push(CheckReport::at_most("A2 products are associative", assoc, 0.0));

    let mut graded = 0.0f64;
    let mut filtered = 0.0f64;
    let mut dpath = 0.0f64;
    for k in 0..8 {
        graded = graded.max(coproduct_diff(&dual_endo_coproduct(graded_table, k), &graded_coproduct_golden(k)));
        filtered = filtered.max(coproduct_diff(&dual_endo_coproduct(filtered_table, k), &filtered_coproduct_golden(k)));
    }
    for x in 0..4 {
        dpath = dpath.max(coproduct_diff(&dual_path_coproduct(graded_table, x), &path_coproduct_golden(x)));
    }
    out.push(CheckReport::at_most("dual of the graded product reproduces the path coproduct table", dpath, 0.0));
    out.push(CheckReport::at_most("dual of the graded product reproduces the endomorphism coproduct table", graded, 0.0));
    out.push(CheckReport::at_most("dual of the filtered product reproduces the filtered coproduct table", filtered, 0.0));

    let unit = A2Endo::sum(&[RHO_11, RHO_22, RHO_RR, RHO_LL]);
    let d1 = coproduct_of(filtered_coproduct_golden, &unit);
    out.push(CheckReport::at_most(
        "filtered coproduct of the composition unit",
        coproduct_diff(&d1, &filtered_unit_coproduct_golden()),
        0.0,
    ));

    // the graded coproduct is coassociative and multiplicative for ∘
    let mut hom = 0.0f64;
    let mut coassoc = 0.0f64;
    for p in 0..8 {
        for q in 0..8 {
            let lhs = coproduct_of(graded_coproduct_golden, &compose(&A2Endo::basis(p), &A2Endo::basis(q)));
            let mut rhs = Vec::new();
            for (a, b, c) in graded_coproduct_golden(p) {
                for (a2, b2, d) in graded_coproduct_golden(q) {
                    if let (Some(x), Some(y)) = (compose_table(a, a2), compose_table(b, b2)) {
                        rhs.push((x, y, c * d));
                    }
                }
            }
            hom = hom.max(coproduct_diff(&lhs, &rhs));
        }
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for (a, b, c) in graded_coproduct_golden(p) {
            for (x, y, d) in graded_coproduct_golden(a) {
                *left.entry((x, y, b)).or_insert(0.0) += c * d;
            }
            for (x, y, d) in graded_coproduct_golden(b) {
                *right.entry((a, x, y)).or_insert(0.0) += c * d;
            }
        }
        for (k, v) in &left {
            coassoc = coassoc.max((v - right.get(k).copied().unwrap_or(0.0)).abs());
        }
        for (k, v) in &right {
            coassoc = coassoc.max((v - left.get(k).copied().unwrap_or(0.0)).abs());
        }
    }
    out.push(CheckReport::at_most("graded coproduct is multiplicative for composition", hom, 0.0));
    out.push(CheckReport::at_most("graded coproduct is coassociative", coassoc, 0.0));

    let dunit = coproduct_of(graded_coproduct_golden, &unit);
    let unit_sq: Vec<_> = [RHO_11, RHO_22, RHO_RR, RHO_LL]
        .iter()
        .flat_map(|&a| [RHO_11, RHO_22, RHO_RR, RHO_LL].map(|b| (a, b, 1.0)))
        .collect();
    out.push(CheckReport::above(
        "graded coproduct of the composition unit differs from 1 ⊗ 1",
        coproduct_diff(&dunit, &unit_sq),
        0.5,
    ));
    out
}

/// Multiplication and coproduct tables in printable form.
#[derive(Debug, Clone, Serialize)]
pub struct A2Tables {
    pub paths: Vec<&'static str>,
    pub graded_product: Vec<Vec<String>>,
    pub filtered_product: Vec<Vec<String>>,
    pub endomorphisms: Vec<&'static str>,
    pub composition: Vec<Vec<String>>,
    pub graded_endo_product: Vec<Vec<String>>,
    pub filtered_endo_product: Vec<Vec<String>>,
    pub path_coproduct: Vec<(String, String)>,
    pub graded_coproduct: Vec<(String, String)>,
    pub filtered_coproduct: Vec<(String, String)>,
}

fn show_table(n: usize, names: &[&str], t: impl Fn(usize, usize) -> Option<usize>) -> Vec<Vec<String>> {
    (0..n)
        .map(|i| (0..n).map(|j| t(i, j).map_or("0".to_string(), |k| names[k].to_string())).collect())
        .collect()
}

fn show_coproduct(names: &[&str], terms: &[(usize, usize, f64)], prefix: &str) -> String {
    terms
        .iter()
        .map(|&(a, b, c)| {
            let coeff = if c == 1.0 { String::new() } else { format!("{c} ") };
            format!("{coeff}{prefix}{} ⊗ {prefix}{}", names[a], names[b])
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn tables() -> A2Tables {
    A2Tables {
        paths: PATH_NAMES.to_vec(),
        graded_product: show_table(4, &PATH_NAMES, graded_table),
        filtered_product: show_table(4, &PATH_NAMES, filtered_table),
        endomorphisms: ENDO_NAMES.to_vec(),
        composition: show_table(8, &ENDO_NAMES, compose_table),
        graded_endo_product: show_table(8, &ENDO_NAMES, endo_graded_table),
        filtered_endo_product: show_table(8, &ENDO_NAMES, endo_filtered_table),
        path_coproduct: (0..4)
            .map(|x| (PATH_NAMES[x].to_string(), show_coproduct(&PATH_NAMES, &path_coproduct_golden(x), "")))
            .collect(),
        graded_coproduct: (0..8)
            .map(|k| (ENDO_NAMES[k].to_string(), show_coproduct(&ENDO_NAMES, &graded_coproduct_golden(k), "ρ")))
            .collect(),
        filtered_coproduct: (0..8)
            .map(|k| (ENDO_NAMES[k].to_string(), show_coproduct(&ENDO_NAMES, &filtered_coproduct_golden(k), "ρ")))
            .collect(),
    }
}

/// Hand-table checks followed by the generic cross-check.
pub fn all_checks(tol: f64) -> Result<Vec<CheckReport>> {
    let mut out = table_checks();
    let alg = EndAlgebra::new(a2_space()?);
    out.extend(generic_cross_check(&alg, tol));
    Ok(out)
}
