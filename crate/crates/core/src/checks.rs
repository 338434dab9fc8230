//! Verification suites. Every check returns a [`CheckReport`]; random
//! samples are drawn up front from a seeded generator and then evaluated
//! through [`parallel::map`], so results do not depend on scheduling.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{self, TruncatedPaths};
use crate::endo::{EndAlgebra, GradedEndo, Mono, Product};
use crate::error::{input_err, Error, Result};
use crate::essential::EssentialSpace;
use crate::graph::{fused_matrices, Graph, PerronData};
use crate::linalg::{self, identity_residual};
use crate::parallel::{self, Parallelism};
use crate::path::{
    concat, enumerate_paths, grouplike_coproduct, grouplike_counit, inner, unit, ElementaryPath,
    PathVector, TensorPathVector,
};
use crate::report::CheckReport;

pub const ANTIPODE_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tol: f64,
    /// Tolerance for the Gram condition on structure constants.
    pub gram_tol: f64,
    /// Tolerance for reconstructing an essential path from its decomposition.
    pub reconstruction_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub parallelism: Parallelism,
    pub antipode_floor: f64,
    /// Longest cells covered by the decomposition check; `None` for all.
    pub decomposition_max_length: Option<usize>,
    /// Length cap of the truncated path algebra used for the generic check.
    pub truncated_paths_length: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: 1e-9,
            gram_tol: 1e-8,
            reconstruction_tol: 1e-8,
            samples: 100,
            seed: 0,
            parallelism: Parallelism::default(),
            antipode_floor: ANTIPODE_FLOOR,
            decomposition_max_length: None,
            truncated_paths_length: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Graph,
    Paths,
    Essential,
    Bialgebra,
    Star,
    Antipode,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "graph" => Suite::Graph,
            "paths" => Suite::Paths,
            "essential" => Suite::Essential,
            "bialgebra" => Suite::Bialgebra,
            "star" => Suite::Star,
            "antipode" => Suite::Antipode,
            "all" => Suite::All,
            other => {
                return input_err(format!(
                    "unknown suite '{other}' (graph, paths, essential, bialgebra, star, antipode, all)"
                ))
            }
        })
    }
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

fn rng_for(seed: u64, salt: &str) -> ChaCha8Rng {
    // FNV-1a on the check name keeps streams independent across checks
    let mut h: u64 = 0xcbf29ce484222325;
    for b in salt.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- graph

pub fn check_perron(g: &Graph, perron: &PerronData, tol: f64) -> CheckReport {
    let d = g.distinguished();
    let min = perron.mu.iter().copied().fold(f64::INFINITY, f64::min);
    let positive = perron.mu.iter().all(|&m| m > 0.0);
    let res = perron
        .residual(g)
        .max((perron.mu[d] - 1.0).abs())
        .max(perron.mu[d] - min);
    let mut r = CheckReport::at_most("Perron-Frobenius eigenvector", res, tol);
    r.pass &= positive;
    if let Some(k) = perron.kappa {
        let c = (perron.beta - 2.0 * (std::f64::consts::PI / k as f64).cos()).abs();
        r.residual = r.residual.max(c);
        r.pass &= c <= tol;
    }
    r.with_witness(json!({"beta": perron.beta, "kappa": perron.kappa}))
}

/// Essential dimensions computed with `mu` scaled by 10 match, and so do the
/// projector matrices of every cell.
pub fn check_mu_rescaling(space: &EssentialSpace) -> CheckReport {
    let scaled = EssentialSpace::new(
        space.graph().clone(),
        space.perron().scaled(10.0),
        *space.options(),
    );
    let name = "essential spaces invariant under rescaling mu";
    let Ok(scaled) = scaled else {
        return CheckReport::at_most(name, f64::INFINITY, space.options().tol);
    };
    let mut res = 0.0f64;
    for (c1, c2) in space.cells().zip(scaled.cells()) {
        if c1.dim() != c2.dim() {
            res = f64::INFINITY;
            break;
        }
        if c1.dim() > 0 {
            let p1 = c1.coords.transpose() * &c1.coords;
            let p2 = c2.coords.transpose() * &c2.coords;
            res = res.max((p1 - p2).amax());
        }
    }
    CheckReport::at_most(name, res, space.options().tol)
}

/// `dim E(a -p-> b) = (F_p)_ab` for every cell.
pub fn check_fused_dims(space: &EssentialSpace) -> CheckReport {
    let name = "cell dimensions equal fused matrix entries";
    let fused = match fused_matrices(space.graph(), space.perron()) {
        Ok(f) => f,
        Err(e) => {
            return CheckReport::informational(format!("{name} (skipped)"), 0.0)
                .with_witness(json!({"reason": e.to_string()}))
        }
    };
    let n = space.graph().len();
    let mut mismatches = 0usize;
    let top = space.max_length().max(fused.mats.len().saturating_sub(1));
    for p in 0..=top {
        for a in 0..n {
            for b in 0..n {
                let d = space.cell(a, b, p).map_or(0, |c| c.dim()) as i64;
                let f = fused.mats.get(p).map_or(0, |m| m[(a, b)]);
                if d != f {
                    mismatches += 1;
                }
            }
        }
    }
    CheckReport::at_most(name, mismatches as f64, 0.0)
        .with_witness(json!({"fused_sums": fused.sums(), "dims": space.dims()}))
}

// ---------------------------------------------------------------- paths

fn random_elementary(g: &Graph, len: usize, rng: &mut impl Rng) -> ElementaryPath {
    let mut v = vec![rng.random_range(0..g.len())];
    for _ in 0..len {
        let nb = g.neighbors(*v.last().unwrap());
        v.push(nb[rng.random_range(0..nb.len())]);
    }
    ElementaryPath::new(g, v).expect("walk follows edges")
}

/// Random combination of a few random walks of the given length.
fn random_path_vector(g: &Graph, len: usize, rng: &mut impl Rng) -> PathVector {
    let k = rng.random_range(1..=4);
    PathVector::from_terms(
        (0..k).map(|_| (random_elementary(g, len, rng), rng.random_range(-1.0..1.0))),
    )
}

pub fn check_paths_suite(g: &Graph, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts.seed, "paths");
    let triples: Vec<[PathVector; 3]> = (0..opts.samples)
        .map(|_| {
            let l = [rng.random_range(0..4), rng.random_range(0..4), rng.random_range(0..4)];
            l.map(|x| random_path_vector(g, x, &mut rng))
        })
        .collect();
    let res = parallel::map(opts.parallelism, triples, |[p, q, r]| {
        let assoc = (&concat(&concat(&p, &q), &r) - &concat(&p, &concat(&q, &r))).norm();
        let graded = concat(&p, &q)
            .terms()
            .all(|(x, _)| x.len() == p.terms().next().unwrap().0.len() + q.terms().next().unwrap().0.len());
        let star = (&concat(&p, &q).reverse_star() - &concat(&q.reverse_star(), &p.reverse_star())).norm();
        // group-like structure
        let dp = grouplike_coproduct(&p);
        let hom = grouplike_coproduct(&concat(&p, &q)).sub(&dp.mul(&grouplike_coproduct(&q))).norm();
        let counit = (&dp.contract_right(|_| 1.0) - &p).norm().max((&dp.contract_left(|_| 1.0) - &p).norm());
        let coassoc = {
            let left: Vec<_> = dp.terms().map(|((x, y), c)| ((x.clone(), x.clone(), y.clone()), c)).collect();
            let right: Vec<_> = dp.terms().map(|((x, y), c)| ((x.clone(), y.clone(), y.clone()), c)).collect();
            let mut diff = std::collections::BTreeMap::new();
            for (k, c) in left {
                *diff.entry(k).or_insert(0.0) += c;
            }
            for (k, c) in right {
                *diff.entry(k).or_insert(0.0) -= c;
            }
            diff.values().fold(0.0f64, |m: f64, v: &f64| m.max(v.abs()))
        };
        let eps = (grouplike_counit(&p) - p.terms().map(|(_, c)| c).sum::<f64>()).abs();
        [assoc, if graded { 0.0 } else { 1.0 }, star, hom, counit, coassoc, eps]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    let one = unit(g);
    let d1 = grouplike_coproduct(&one).sub(&TensorPathVector::tensor(&one, &one)).norm();
    let tp = TruncatedPaths::new(g, opts.truncated_paths_length);
    vec![
        CheckReport::at_most("concatenation is associative", col(0), opts.tol),
        CheckReport::at_most("concatenation is graded", col(1), 0.0),
        CheckReport::at_most("reversal is an anti-automorphism of concatenation", col(2), opts.tol),
        CheckReport::at_most("group-like coproduct is multiplicative", col(3), opts.tol),
        CheckReport::at_most("group-like counit", col(4) + col(6), opts.tol),
        CheckReport::at_most("group-like coproduct is coassociative", col(5), opts.tol),
        CheckReport::above("group-like coproduct of the unit differs from 1 ⊗ 1", d1, 0.5),
        {
            let mut r = algebra::check_multiply_back(&tp, 0.0);
            r.name = format!("truncated path algebra (length <= {}): {}", opts.truncated_paths_length, r.name);
            r
        },
        {
            let mut r = algebra::check_gram_condition(&tp, 0.0);
            r.name = format!("truncated path algebra (length <= {}): {}", opts.truncated_paths_length, r.name);
            r
        },
    ]
}

// ---------------------------------------------------------------- essential

/// Random coefficients over every path of a cell.
pub fn random_cell_vector(g: &Graph, a: usize, b: usize, l: usize, rng: &mut impl Rng) -> PathVector {
    PathVector::from_terms(
        enumerate_paths(g, a, b, l)
            .into_iter()
            .map(|p| (p, rng.random_range(-1.0..1.0))),
    )
}

/// Random combination of basis vectors of a random nonempty cell of length
/// `l` starting at `a` (any start when `None`).
pub fn random_essential(space: &EssentialSpace, l: usize, start: Option<usize>, rng: &mut impl Rng) -> PathVector {
    let cells: Vec<_> = space
        .cells()
        .filter(|c| c.l == l && c.dim() > 0 && start.is_none_or(|s| s == c.a))
        .collect();
    if cells.is_empty() {
        return PathVector::zero();
    }
    let c = cells[rng.random_range(0..cells.len())];
    let mut v = PathVector::zero();
    for i in 0..c.dim() {
        v = &v + &c.vector(i).scale(rng.random_range(-1.0..1.0));
    }
    v
}

pub fn check_cells(space: &EssentialSpace) -> CheckReport {
    let tol = space.options().tol;
    let mut gram = 0.0f64;
    let mut constraint = 0.0f64;
    let mut sign = 0usize;
    for c in space.cells() {
        gram = gram.max(c.gram_residual());
        constraint = constraint.max(c.constraint_residual(space.perron()));
        for i in 0..c.dim() {
            if c.coords.row(i).iter().find(|x| x.abs() > tol).is_some_and(|&x| x < 0.0) {
                sign += 1;
            }
        }
    }
    let mut r = CheckReport::at_most(
        "cell bases are orthonormal and annihilated by every C_k",
        gram.max(constraint),
        tol,
    );
    r.pass &= sign == 0;
    r.with_witness(json!({"gram": gram, "constraint": constraint, "sign_violations": sign}))
}

pub fn check_projector_identity(space: &EssentialSpace, opts: &VerifyOptions) -> CheckReport {
    let g = space.graph();
    let n = g.len();
    let top = space.max_length();
    let mut rng = rng_for(opts.seed, "projector identity");
    let samples: Vec<(PathVector, PathVector)> = (0..opts.samples.max(1))
        .map(|_| {
            let l1 = rng.random_range(0..=top);
            let l2 = rng.random_range(0..=top - l1);
            let (a, c) = (rng.random_range(0..n), rng.random_range(0..n));
            let c2 = if rng.random_bool(0.8) { c } else { rng.random_range(0..n) };
            let b = rng.random_range(0..n);
            let p1 = &random_cell_vector(g, a, c, l1, &mut rng) + &random_cell_vector(g, a, c2, l1, &mut rng);
            (p1, random_cell_vector(g, c, b, l2, &mut rng))
        })
        .collect();
    let res = parallel::map(opts.parallelism, samples, |(p1, p2)| {
        let lhs = space.project(&concat(&space.project(&p1), &space.project(&p2)));
        let rhs = space.project(&concat(&p1, &p2));
        (&lhs - &rhs).norm()
    });
    CheckReport::at_most("P(P(p)P(q)) = P(pq)", max_of(res), opts.tol)
        .with_witness(json!({"samples": opts.samples.max(1)}))
}

pub fn check_projector_properties(space: &EssentialSpace, opts: &VerifyOptions) -> Vec<CheckReport> {
    let g = space.graph();
    let n = g.len();
    let mut rng = rng_for(opts.seed, "projector properties");
    let samples: Vec<(PathVector, PathVector)> = (0..opts.samples)
        .map(|_| {
            let l = rng.random_range(0..=space.max_length());
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            let p = &random_cell_vector(g, a, b, l, &mut rng) + &random_path_vector(g, l, &mut rng);
            (p, random_path_vector(g, l, &mut rng))
        })
        .collect();
    let res = parallel::map(opts.parallelism, samples, |(p, q)| {
        let pp = space.project(&p);
        let idem = (&space.project(&pp) - &pp).norm();
        let adj = (inner(&pp, &q) - inner(&p, &space.project(&q))).abs();
        let star = (&space.project(&p.reverse_star()) - &pp.reverse_star()).norm();
        [idem, adj, star]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    vec![
        CheckReport::at_most("P is idempotent", col(0), opts.tol),
        CheckReport::at_most("P is self-adjoint", col(1), opts.tol),
        CheckReport::at_most("P commutes with path reversal", col(2), opts.tol),
    ]
}

pub fn check_bullet_laws(space: &EssentialSpace, opts: &VerifyOptions) -> Vec<CheckReport> {
    let top = space.max_length();
    let n = space.graph().len();
    let mut rng = rng_for(opts.seed, "graded product");
    let samples: Vec<[PathVector; 3]> = (0..opts.samples)
        .map(|_| {
            let l1 = rng.random_range(0..=top);
            let l2 = rng.random_range(0..=top - l1);
            let l3 = rng.random_range(0..=top - l1 - l2);
            let e = random_essential(space, l1, None, &mut rng);
            let mid = e.terms().next().map_or(0, |(p, _)| p.end());
            let s2 = if rng.random_bool(0.8) { mid } else { rng.random_range(0..n) };
            let f = random_essential(space, l2, Some(s2), &mut rng);
            let mid2 = f.terms().next().map_or(0, |(p, _)| p.end());
            let h = random_essential(space, l3, Some(mid2), &mut rng);
            [e, f, h]
        })
        .collect();
    let one = space.unit();
    let res = parallel::map(opts.parallelism, samples, |[e, f, h]| {
        let assoc = (&space.bullet(&space.bullet(&e, &f), &h) - &space.bullet(&e, &space.bullet(&f, &h))).norm();
        let unit = (&space.bullet(&one, &e) - &e).norm().max((&space.bullet(&e, &one) - &e).norm());
        let ef = space.bullet(&e, &f);
        let le = e.terms().next().map_or(0, |(p, _)| p.len());
        let lf = f.terms().next().map_or(0, |(p, _)| p.len());
        let graded = if ef.terms().all(|(p, _)| p.len() == le + lf) { 0.0 } else { 1.0 };
        [assoc, unit, graded]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    vec![
        CheckReport::at_most("graded product is associative", col(0), opts.tol),
        CheckReport::at_most("sum of zero-length paths is a two-sided unit", col(1), opts.tol),
        CheckReport::at_most("graded product adds lengths", col(2), 0.0),
    ]
}

/// Decomposition of every basis vector over every split: reconstruction,
/// norm identity, and orthonormality of the coefficient vectors of a cell.
pub fn check_decomposition(space: &EssentialSpace, opts: &VerifyOptions) -> Vec<CheckReport> {
    let top = opts.decomposition_max_length.map_or(space.max_length(), |m| m.min(space.max_length()));
    let jobs: Vec<(usize, usize, usize, usize)> = space
        .cells()
        .filter(|c| c.l >= 2 && c.l <= top && c.dim() > 0)
        .flat_map(|c| (1..c.l).map(move |s| (c.a, c.b, c.l, s)))
        .collect();
    let count = jobs.len();
    let res = parallel::map(opts.parallelism, jobs, |(a, b, l, split)| {
        let cell = space.cell(a, b, l).unwrap();
        let mut recon = 0.0f64;
        let mut norm = 0.0f64;
        let mut gammas: Vec<DVector<f64>> = Vec::new();
        for k in 0..cell.dim() {
            let e = cell.vector(k);
            match space.decompose(&e, split) {
                Ok(d) => {
                    recon = recon.max((&space.reconstruct(&d) - &e).norm());
                    norm = norm.max((d.norm_squared() - 1.0).abs());
                    gammas.push(DVector::from_iterator(d.entries.len(), d.entries.iter().map(|x| x.gamma)));
                }
                Err(_) => {
                    recon = f64::INFINITY;
                    norm = f64::INFINITY;
                }
            }
        }
        let gram = if gammas.is_empty() {
            0.0
        } else {
            identity_residual(&DMatrix::from_fn(gammas.len(), gammas.len(), |i, j| gammas[i].dot(&gammas[j])))
        };
        [recon, norm, gram]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    let w = json!({"cells_and_splits": count, "max_length": top});
    vec![
        CheckReport::at_most("decomposition reconstructs essential paths", col(0), opts.reconstruction_tol)
            .with_witness(w.clone()),
        CheckReport::at_most("decomposition coefficients have the norm of the path", col(1), opts.tol)
            .with_witness(w.clone()),
        CheckReport::at_most("decomposition coefficient vectors are orthonormal", col(2), opts.tol).with_witness(w),
    ]
}

pub fn check_essential_suite(space: &EssentialSpace, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut out = vec![check_cells(space), check_projector_identity(space, opts)];
    out.extend(check_projector_properties(space, opts));
    out.extend(check_bullet_laws(space, opts));
    out.extend(check_decomposition(space, opts));
    out.push(algebra::check_endpoint_chaining(space));
    out.push(algebra::check_associativity(space, opts.tol));
    out
}

// ---------------------------------------------------------------- bialgebra

fn random_mono_pairs(alg: &EndAlgebra, opts: &VerifyOptions, salt: &str) -> Vec<(Mono, Mono)> {
    let mut rng = rng_for(opts.seed, salt);
    (0..opts.samples)
        .map(|_| (alg.random_mono(&mut rng), alg.random_mono(&mut rng)))
        .collect()
}

/// `Δ(ρ ρ') = Δρ · Δρ'` with the given coproduct and legwise product, on
/// random monomial pairs.
pub fn check_homomorphism(alg: &EndAlgebra, dual: bool, op: Product, opts: &VerifyOptions) -> CheckReport {
    let (cop, prod) = (if dual { "dual coproduct" } else { "composition coproduct" }, match op {
        Product::Compose => "composition",
        Product::Bullet => "convolution",
    });
    let name = format!("{cop} is multiplicative for the {prod} product");
    let pairs = random_mono_pairs(alg, opts, &name);
    let res = parallel::map(opts.parallelism, pairs, |(x, y)| {
        let (rx, ry) = (GradedEndo::monomial(alg, x), GradedEndo::monomial(alg, y));
        let lhs = alg.coproduct_with(dual, &alg.product(op, &rx, &ry));
        let rhs = alg.tensor_product(op, &alg.coproduct_with(dual, &rx), &alg.coproduct_with(dual, &ry));
        lhs.sub(&rhs).norm()
    });
    CheckReport::at_most(name, max_of(res), opts.tol).with_witness(json!({"samples": opts.samples}))
}

pub fn check_coassociativity(alg: &EndAlgebra, dual: bool, opts: &VerifyOptions) -> CheckReport {
    let name = format!("{} is coassociative", if dual { "dual coproduct" } else { "composition coproduct" });
    let mut rng = rng_for(opts.seed, &name);
    let monos: Vec<Mono> = (0..opts.samples).map(|_| alg.random_mono(&mut rng)).collect();
    let cop = |m: Mono| if dual { alg.dual_coproduct_mono(m) } else { alg.coproduct_mono(m) };
    let res = parallel::map(opts.parallelism, monos, |m| {
        let d = alg.coproduct_with(dual, &GradedEndo::monomial(alg, m));
        d.map_leg(0, cop).sub(&d.map_leg(1, cop)).norm()
    });
    CheckReport::at_most(name, max_of(res), opts.tol)
}

pub fn check_counit(alg: &EndAlgebra, opts: &VerifyOptions) -> CheckReport {
    let mut rng = rng_for(opts.seed, "counit");
    let elems: Vec<GradedEndo> = (0..opts.samples).map(|_| alg.random_element(&mut rng)).collect();
    let res = parallel::map(opts.parallelism, elems, |r| {
        let d = alg.coproduct(&r);
        let t = r.to_tensor();
        alg.counit_leg(&d, 1).sub(&t).norm().max(alg.counit_leg(&d, 0).sub(&t).norm())
    });
    CheckReport::at_most("trace is a two-sided counit", max_of(res), opts.tol)
}

pub fn check_products(alg: &EndAlgebra, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts.seed, "products");
    let grades: Vec<usize> = (0..=alg.max_grade()).filter(|&n| alg.dim(n) > 0).collect();
    let triples: Vec<[GradedEndo; 3]> = (0..opts.samples)
        .map(|_| {
            let mut pick = || alg.random_homogeneous(grades[rng.random_range(0..grades.len())], &mut rng);
            [pick(), pick(), pick()]
        })
        .collect();
    let (unit, id) = (alg.unit(), alg.identity());
    let res = parallel::map(opts.parallelism, triples, |[x, y, z]| {
        let b_assoc = alg.bullet(&alg.bullet(&x, &y), &z).sub(&alg.bullet(&x, &alg.bullet(&y, &z))).norm();
        let c_assoc = alg.compose(&alg.compose(&x, &y), &z).sub(&alg.compose(&x, &alg.compose(&y, &z))).norm();
        let units = alg
            .bullet(&unit, &x)
            .sub(&x)
            .norm()
            .max(alg.bullet(&x, &unit).sub(&x).norm())
            .max(alg.compose(&id, &x).sub(&x).norm())
            .max(alg.compose(&x, &id).sub(&x).norm());
        let n = *x.blocks().keys().next().unwrap();
        let m = *y.blocks().keys().next().unwrap();
        let xy = alg.bullet(&x, &y);
        let graded = if xy.blocks().keys().all(|&k| k == n + m) { 0.0 } else { 1.0 };
        [b_assoc, c_assoc, units, graded]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    vec![
        CheckReport::at_most("convolution product is associative", col(0), opts.tol),
        CheckReport::at_most("composition product is associative", col(1), opts.tol),
        CheckReport::at_most("units of both products", col(2), opts.tol),
        CheckReport::at_most("convolution product adds grades", col(3), 0.0),
    ]
}

/// `Δ1 ≠ 1 ⊗ 1`.
pub fn check_unit_not_grouplike(alg: &EndAlgebra) -> CheckReport {
    let u = alg.unit().to_tensor();
    let r = alg.coproduct(&alg.unit()).sub(&u.tensor(&u)).norm();
    CheckReport::above("coproduct of the unit differs from 1 ⊗ 1", r, 0.5)
}

/// `Δ²1 = (Δ1 ⊗ 1)(1 ⊗ Δ1) = (1 ⊗ Δ1)(Δ1 ⊗ 1)` with the convolution
/// product on each leg, plus the counit identities measured only.
pub fn check_comonoidality(alg: &EndAlgebra, opts: &VerifyOptions) -> Vec<CheckReport> {
    let u = alg.unit().to_tensor();
    let d1 = alg.coproduct(&alg.unit());
    let d2 = d1.map_leg(0, |m| alg.coproduct_mono(m));
    let raw_terms = d1.terms().map(|(k, _)| alg.coproduct_mono(k[0]).len()).sum::<usize>();
    let left = alg.tensor_product(Product::Bullet, &d1.tensor(&u), &u.tensor(&d1));
    let right = alg.tensor_product(Product::Bullet, &u.tensor(&d1), &d1.tensor(&u));
    let w = json!({"raw_terms": raw_terms, "terms": d2.num_terms()});
    let mut out = vec![
        CheckReport::at_most("comonoidality: Δ²1 = (Δ1 ⊗ 1)(1 ⊗ Δ1)", d2.sub(&left).norm(), opts.tol)
            .with_witness(w.clone()),
        CheckReport::at_most("comonoidality: Δ²1 = (1 ⊗ Δ1)(Δ1 ⊗ 1)", d2.sub(&right).norm(), opts.tol)
            .with_witness(w),
    ];
    // ε(xyz) = ε(x y_(1)) ε(y_(2) z) and the variant with the legs swapped
    let mut rng = rng_for(opts.seed, "counit multiplicativity");
    let triples: Vec<[Mono; 3]> = (0..opts.samples)
        .map(|_| [alg.random_mono(&mut rng), alg.random_mono(&mut rng), alg.random_mono(&mut rng)])
        .collect();
    let res = parallel::map(opts.parallelism, triples, |[x, y, z]| {
        let (ex, ey, ez) = (GradedEndo::monomial(alg, x), GradedEndo::monomial(alg, y), GradedEndo::monomial(alg, z));
        let lhs = alg.counit(&alg.bullet(&alg.bullet(&ex, &ey), &ez));
        let mut r1 = 0.0;
        let mut r2 = 0.0;
        for (k, c) in alg.coproduct(&ey).terms() {
            let (y1, y2) = (GradedEndo::monomial(alg, k[0]), GradedEndo::monomial(alg, k[1]));
            r1 += c * alg.counit(&alg.bullet(&ex, &y1)) * alg.counit(&alg.bullet(&y2, &ez));
            r2 += c * alg.counit(&alg.bullet(&ex, &y2)) * alg.counit(&alg.bullet(&y1, &ez));
        }
        (lhs - r1).abs().max((lhs - r2).abs())
    });
    out.push(CheckReport::informational("counit weak multiplicativity (measured only)", max_of(res)));
    out
}

/// Least-squares residual of `S(x_(1)) x_(2) = 1_(1) ε(x 1_(2))` for every
/// diagonal monomial `x` of grade `n`, with `S` an arbitrary linear map.
///
/// The left side of grade `h` only involves the grade `h - n` part of the
/// values of `S`, so the system splits by output grade. Off-diagonal
/// monomials have a zero right side and are always satisfiable.
pub fn antipode_infeasibility(alg: &EndAlgebra, n: usize, opts: &VerifyOptions) -> Result<CheckReport> {
    if n == 0 {
        return input_err("the antipode obstruction needs a grade n >= 1");
    }
    if n > alg.max_grade() || alg.dim(n) == 0 {
        return input_err(format!("no essential paths of length {n}"));
    }
    let d = alg.dim(n);
    let unit = alg.unit();
    let d1 = alg.coproduct(&unit);
    let res = parallel::map(opts.parallelism, (0..d).collect::<Vec<_>>(), |i| {
        let x = GradedEndo::monomial(alg, Mono::new(n, i, i));
        // right side
        let mut rhs = GradedEndo::zero();
        for (k, c) in d1.terms() {
            let e = alg.counit(&alg.bullet(&x, &GradedEndo::monomial(alg, k[1])));
            if e != 0.0 {
                rhs = rhs.axpy(c * e, &GradedEndo::monomial(alg, k[0]));
            }
        }
        let mut sq = 0.0;
        for (&h, block) in rhs.blocks() {
            let b = DVector::from_iterator(block.len(), block.transpose().iter().copied());
            if h < n {
                // no unknown reaches this grade
                sq += b.norm_squared();
                continue;
            }
            // unknowns: grade h - n blocks of S(e_i ⊗ e^I) for every I
            let g = h - n;
            let dg = alg.dim(g);
            let mut cols = Vec::new();
            for big_i in 0..d {
                let second = GradedEndo::monomial(alg, Mono::new(n, big_i, i));
                for p in 0..dg {
                    for q in 0..dg {
                        let v = alg.bullet(&GradedEndo::monomial(alg, Mono::new(g, p, q)), &second);
                        let blk = v.block(h).cloned().unwrap_or_else(|| DMatrix::zeros(block.nrows(), block.ncols()));
                        cols.push(DVector::from_iterator(blk.len(), blk.transpose().iter().copied()));
                    }
                }
            }
            let w = DMatrix::from_columns(&cols);
            sq += linalg::lstsq_residual(&w, &b, linalg::DEFAULT_RANK_TOL).powi(2);
        }
        (sq.sqrt(), rhs.block(0).map_or(0.0, |b| b.norm()))
    });
    let min = res.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let joint = res.iter().map(|r| r.0 * r.0).sum::<f64>().sqrt();
    let grade0 = res.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(CheckReport::above(format!("antipode does not exist (grade {n}, least-squares residual)"), min, opts.antipode_floor)
        .with_witness(json!({
            "diagonal_monomials": d,
            "min_grade0_rhs_norm": grade0,
            "joint_residual": joint
        })))
}

pub fn check_bialgebra_suite(alg: &EndAlgebra, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut out = vec![
        algebra::check_gram_condition(alg.space(), opts.gram_tol),
        algebra::check_multiply_back(alg.space(), opts.gram_tol),
        check_homomorphism(alg, false, Product::Bullet, opts),
        check_homomorphism(alg, true, Product::Compose, opts),
        check_coassociativity(alg, false, opts),
        check_coassociativity(alg, true, opts),
        check_counit(alg, opts),
    ];
    out.extend(check_products(alg, opts));
    out.push(check_unit_not_grouplike(alg));
    out.extend(check_comonoidality(alg, opts));
    out
}

// ---------------------------------------------------------------- star

pub fn check_star_suite(alg: &EndAlgebra, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts.seed, "star");
    let pairs: Vec<(GradedEndo, GradedEndo)> = (0..opts.samples)
        .map(|_| (alg.random_element(&mut rng), alg.random_element(&mut rng)))
        .collect();
    let res = parallel::map(opts.parallelism, pairs, |(x, y)| {
        let anti = alg.star(&alg.bullet(&x, &y)).sub(&alg.bullet(&alg.star(&y), &alg.star(&x))).norm();
        let eps = (alg.counit(&alg.star(&x)) - alg.counit(&x)).abs();
        let cop = alg.coproduct(&alg.star(&x)).sub(&alg.star_tensor(&alg.coproduct(&x))).norm();
        let invol = alg.star(&alg.star(&x)).sub(&x).norm();
        [anti, eps, cop, invol]
    });
    let col = |k: usize| max_of(res.iter().map(|r| r[k]));
    let unit = alg.star(&alg.unit()).sub(&alg.unit()).norm();
    let closure = max_of((0..=alg.max_grade()).map(|n| {
        let s = alg.star_matrix(n);
        if s.is_empty() {
            0.0
        } else {
            identity_residual(&(s * s.transpose()))
        }
    }));
    vec![
        CheckReport::at_most("star reverses the convolution product", col(0), opts.tol),
        CheckReport::at_most("star fixes the unit", unit, opts.tol),
        CheckReport::at_most("star preserves the counit", col(1), opts.tol),
        CheckReport::at_most("coproduct commutes with star on both legs", col(2), opts.tol),
        CheckReport::at_most("star is an involution", col(3), opts.tol),
        CheckReport::at_most("Σ_J (e^J)⋆ ⊗ e_J⋆ = Σ_J e^J ⊗ e_J", closure, opts.tol),
    ]
}

/// Runs the selected suites. The endomorphism algebra is only built when a
/// suite needs it.
pub fn run_suite(space: &EssentialSpace, suite: Suite, opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    if suite.includes(Suite::Graph) {
        out.push(check_perron(space.graph(), space.perron(), opts.tol));
        out.push(check_mu_rescaling(space));
        out.push(check_fused_dims(space));
    }
    if suite.includes(Suite::Paths) {
        out.extend(check_paths_suite(space.graph(), opts));
    }
    if suite.includes(Suite::Essential) {
        out.extend(check_essential_suite(space, opts));
    }
    let needs_end = [Suite::Bialgebra, Suite::Star, Suite::Antipode].iter().any(|&s| suite.includes(s));
    if needs_end {
        let alg = EndAlgebra::with_parallelism(space.clone(), opts.parallelism);
        if suite.includes(Suite::Bialgebra) {
            out.extend(check_bialgebra_suite(&alg, opts));
        }
        if suite.includes(Suite::Star) {
            out.extend(check_star_suite(&alg, opts));
        }
        if suite.includes(Suite::Antipode) && alg.max_grade() >= 1 && alg.dim(1) > 0 {
            out.push(antipode_infeasibility(&alg, 1, opts).expect("grade 1 is nonempty"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin;
    use crate::essential::SpaceOptions;

    fn space(name: &str) -> EssentialSpace {
        EssentialSpace::from_graph(builtin(name).unwrap(), SpaceOptions::default()).unwrap()
    }

    fn quick() -> VerifyOptions {
        VerifyOptions { samples: 20, ..VerifyOptions::default() }
    }

    #[test]
    fn all_suites_pass_on_a2_and_a3() {
        for name in ["A2", "A3"] {
            let reports = run_suite(&space(name), Suite::All, &quick());
            for r in &reports {
                assert!(r.pass, "{name}: {r:?}");
            }
            assert!(reports.len() > 30);
        }
    }

    #[test]
    fn antipode_a2_residual() {
        let alg = EndAlgebra::new(space("A2"));
        let r = antipode_infeasibility(&alg, 1, &quick()).unwrap();
        assert!((r.residual - 2f64.sqrt()).abs() < 1e-12, "{r:?}");
        assert!(antipode_infeasibility(&alg, 0, &quick()).is_err());
        assert!(antipode_infeasibility(&alg, 2, &quick()).is_err());
    }

    #[test]
    fn comonoidality_raw_terms_a2() {
        let alg = EndAlgebra::new(space("A2"));
        let r = check_comonoidality(&alg, &quick());
        assert_eq!(r[0].witness.as_ref().unwrap()["raw_terms"], 16);
        assert!(r[0].pass && r[1].pass);
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn sampling_is_independent_of_parallelism() {
        let s = space("D4");
        let seq = VerifyOptions { parallelism: Parallelism::Sequential, ..quick() };
        let par = VerifyOptions { parallelism: Parallelism::Rayon, ..quick() };
        let a = run_suite(&s, Suite::Essential, &seq);
        let b = run_suite(&s, Suite::Essential, &par);
        assert_eq!(a, b);
    }
}
