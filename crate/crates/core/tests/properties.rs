use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use esspath_core::checks::{random_cell_vector, random_essential};
use esspath_core::endo::{EndAlgebra, GradedEndo, Mono, Product};
use esspath_core::graph::{builtin, fused_matrices, parse_graph, perron_frobenius};
use esspath_core::path::{annihilate, inner, PathVector};
use esspath_core::{EssentialSpace, SpaceOptions};

const NAMES: [&str; 5] = ["A3", "A4", "D4", "D5", "E6"];

fn spaces() -> &'static Vec<EssentialSpace> {
    static S: OnceLock<Vec<EssentialSpace>> = OnceLock::new();
    S.get_or_init(|| {
        NAMES
            .iter()
            .map(|n| EssentialSpace::from_graph(builtin(n).unwrap(), SpaceOptions::default()).unwrap())
            .collect()
    })
}

fn algebras() -> &'static Vec<EndAlgebra> {
    static A: OnceLock<Vec<EndAlgebra>> = OnceLock::new();
    A.get_or_init(|| spaces()[..4].iter().cloned().map(EndAlgebra::new).collect())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random vector on a random cell of length `l`, with a matching start if given.
fn cell_vector(s: &EssentialSpace, l: usize, start: Option<usize>, r: &mut ChaCha8Rng) -> PathVector {
    let g = s.graph();
    let a = start.unwrap_or_else(|| r.random_range(0..g.len()));
    let b = r.random_range(0..g.len());
    random_cell_vector(g, a, b, l, r)
}

fn end_vertex(p: &PathVector) -> Option<usize> {
    p.cell().map(|(_, b, _)| b)
}

fn monomial(alg: &EndAlgebra, m: Mono) -> GradedEndo {
    GradedEndo::monomial(alg, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projector_identity(gi in 0..NAMES.len(), l1 in 0usize..5, l2 in 0usize..5, seed in any::<u64>()) {
        let s = &spaces()[gi];
        let mut r = rng(seed);
        let p = cell_vector(s, l1, None, &mut r);
        let q = cell_vector(s, l2, end_vertex(&p), &mut r);
        let lhs = s.project(&(&s.project(&p) * &s.project(&q)));
        let rhs = s.project(&(&p * &q));
        prop_assert!((&lhs - &rhs).norm() <= 1e-9 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn projection_is_orthogonal_onto_kernel(gi in 0..NAMES.len(), l in 0usize..6, seed in any::<u64>()) {
        let s = &spaces()[gi];
        let mut r = rng(seed);
        let p = cell_vector(s, l, None, &mut r);
        let e = s.project(&p);
        // oracle: essential means every backtrack annihilator kills it
        for k in 1..l {
            prop_assert!(annihilate(s.perron(), k, &e).norm() <= 1e-9);
        }
        prop_assert!(inner(&(&p - &e), &e).abs() <= 1e-9);
        prop_assert!((&s.project(&e) - &e).norm() <= 1e-9);
    }

    #[test]
    fn bullet_is_associative_and_graded(gi in 0..NAMES.len(), ls in (0usize..4, 0usize..4, 0usize..4), seed in any::<u64>()) {
        let s = &spaces()[gi];
        let mut r = rng(seed);
        let x = random_essential(s, ls.0, None, &mut r);
        let y = random_essential(s, ls.1, end_vertex(&x), &mut r);
        let z = random_essential(s, ls.2, end_vertex(&y), &mut r);
        let left = s.bullet(&s.bullet(&x, &y), &z);
        let right = s.bullet(&x, &s.bullet(&y, &z));
        prop_assert!((&left - &right).norm() <= 1e-9);
        if let Some((_, _, l)) = left.cell() {
            prop_assert_eq!(l, ls.0 + ls.1 + ls.2);
        }
        let u = s.unit();
        prop_assert!((&s.bullet(&u, &x) - &x).norm() <= 1e-9);
        prop_assert!((&s.bullet(&x, &u) - &x).norm() <= 1e-9);
    }

    #[test]
    fn decomposition_preserves_norm(l in 2usize..7, seed in any::<u64>()) {
        let s = &spaces()[4];
        let mut r = rng(seed);
        let e = random_essential(s, l, None, &mut r);
        prop_assume!(!e.is_zero());
        let split = r.random_range(1..l);
        let d = s.decompose(&e, split).unwrap();
        prop_assert!((&s.reconstruct(&d) - &e).norm() <= 1e-8);
        prop_assert!((d.norm_squared() - e.norm().powi(2)).abs() <= 1e-9);
    }

    #[test]
    fn mu_rescaling_leaves_cells_unchanged(gi in 0..3usize, factor in 1e-3f64..1e3) {
        let g = builtin(NAMES[gi]).unwrap();
        let pf = perron_frobenius(&g, 1e-12).unwrap();
        let a = EssentialSpace::new(g.clone(), pf.clone(), SpaceOptions::default()).unwrap();
        let b = EssentialSpace::new(g, pf.scaled(factor), SpaceOptions::default()).unwrap();
        for (c1, c2) in a.cells().zip(b.cells()) {
            prop_assert_eq!(c1.dim(), c2.dim());
            let p1 = c1.coords.transpose() * &c1.coords;
            let p2 = c2.coords.transpose() * &c2.coords;
            prop_assert!((p1 - p2).amax() <= 1e-9);
        }
    }

    #[test]
    fn relabelled_graph_has_same_dims(gi in 0..NAMES.len(), seed in any::<u64>()) {
        let g = builtin(NAMES[gi]).unwrap();
        let mut file = g.to_file();
        let mut r = rng(seed);
        // shuffle vertex order and edge orientation
        for i in (1..file.vertices.len()).rev() {
            file.vertices.swap(i, r.random_range(0..=i));
        }
        for e in &mut file.edges {
            if r.random_bool(0.5) {
                e.swap(0, 1);
            }
        }
        let h = parse_graph(&serde_json::to_string(&file).unwrap(), false).unwrap();
        let s = EssentialSpace::from_graph(h, SpaceOptions::default()).unwrap();
        prop_assert_eq!(s.dims(), spaces()[gi].dims());
    }

    #[test]
    fn endomorphism_laws(ai in 0..4usize, seed in any::<u64>()) {
        let alg = &algebras()[ai];
        let mut r = rng(seed);
        let (a, b) = (alg.random_mono(&mut r), alg.random_mono(&mut r));
        let (x, y) = (monomial(alg, a), monomial(alg, b));
        let xy = alg.bullet(&x, &y);
        // composition coproduct is a homomorphism for the convolution product
        let lhs = alg.coproduct(&xy);
        let rhs = alg.tensor_product(Product::Bullet, &alg.coproduct(&x), &alg.coproduct(&y));
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-9);
        // dual coproduct is a homomorphism for composition
        let lhs = alg.dual_coproduct(&alg.compose(&x, &y));
        let rhs = alg.tensor_product(Product::Compose, &alg.dual_coproduct(&x), &alg.dual_coproduct(&y));
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-9);
        // star is an anti-automorphism and an involution
        prop_assert!(alg.star(&xy).sub(&alg.bullet(&alg.star(&y), &alg.star(&x))).norm() <= 1e-9);
        prop_assert!(alg.star(&alg.star(&x)).sub(&x).norm() <= 1e-9);
        prop_assert!(alg.star_tensor(&alg.coproduct(&x)).sub(&alg.coproduct(&alg.star(&x))).norm() <= 1e-9);
    }

    #[test]
    fn kernel_dims_match_fused_matrices(family in 0..2usize, rank in 2usize..8) {
        let name = if family == 0 { format!("A{rank}") } else { format!("D{}", rank.max(4)) };
        let g = builtin(&name).unwrap();
        let s = EssentialSpace::from_graph(g, SpaceOptions::default()).unwrap();
        let f = fused_matrices(s.graph(), s.perron()).unwrap();
        let n = s.graph().len();
        for (l, m) in f.mats.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(s.cell(a, b, l).unwrap().dim() as i64, m[(a, b)]);
                }
            }
        }
    }
}
