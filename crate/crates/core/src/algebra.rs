//! Generic checks for a finite graded algebra with an orthonormal homogeneous
//! basis, given through its structure constants.
//!
//! With real scalars and orthonormal bases, the dualisation between the
//! algebra and its dual is the coefficient identity, so the dual coproduct is
//! `D e_K = Σ m_IJ^K e_I ⊗ e_J` and the compatibility of the composition
//! coproduct with the convolution product reduces to
//! `Σ_IJ m_IJ^K m_IJ^L = δ_KL` for every pair of grades.

use std::collections::HashMap;

use crate::essential::{EssentialSpace, StructureConstants};
use crate::graph::Graph;
use crate::linalg::identity_residual;
use crate::path::{enumerate_paths, ElementaryPath};
use crate::report::CheckReport;

pub trait GradedAlgebra {
    fn max_grade(&self) -> usize;
    fn dim(&self, grade: usize) -> usize;
    /// `m[i][j]^k` for `i` of grade `n`, `j` of grade `m`, `k` of grade `n + m`.
    fn structure_constants(&self, n: usize, m: usize) -> StructureConstants;
    /// Start and end vertex of a basis element.
    fn endpoints(&self, grade: usize, i: usize) -> (usize, usize);
}

impl GradedAlgebra for EssentialSpace {
    fn max_grade(&self) -> usize {
        self.max_length()
    }
    fn dim(&self, grade: usize) -> usize {
        self.grade_dim(grade)
    }
    fn structure_constants(&self, n: usize, m: usize) -> StructureConstants {
        EssentialSpace::structure_constants(self, n, m)
    }
    fn endpoints(&self, grade: usize, i: usize) -> (usize, usize) {
        EssentialSpace::endpoints(self, grade, i)
    }
}

/// The concatenation algebra restricted to paths of length at most a cap,
/// with elementary paths as orthonormal basis (global lexicographic order
/// within each grade). Products that exceed the cap are dropped.
#[derive(Debug, Clone)]
pub struct TruncatedPaths {
    bases: Vec<Vec<ElementaryPath>>,
    index: Vec<HashMap<ElementaryPath, usize>>,
}

impl TruncatedPaths {
    pub fn new(g: &Graph, max_length: usize) -> Self {
        let bases: Vec<Vec<ElementaryPath>> = (0..=max_length)
            .map(|l| {
                let mut all: Vec<ElementaryPath> = (0..g.len())
                    .flat_map(|a| (0..g.len()).flat_map(move |b| enumerate_paths(g, a, b, l)))
                    .collect();
                all.sort();
                all
            })
            .collect();
        let index = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect())
            .collect();
        TruncatedPaths { bases, index }
    }

    pub fn basis(&self, grade: usize) -> &[ElementaryPath] {
        &self.bases[grade]
    }
}

impl GradedAlgebra for TruncatedPaths {
    fn max_grade(&self) -> usize {
        self.bases.len() - 1
    }
    fn dim(&self, grade: usize) -> usize {
        self.bases.get(grade).map_or(0, Vec::len)
    }
    fn structure_constants(&self, n: usize, m: usize) -> StructureConstants {
        let mut sc = StructureConstants::zeros(n, m, self.dim(n), self.dim(m), self.dim(n + m));
        if n + m > self.max_grade() {
            return sc;
        }
        for (i, p) in self.bases[n].iter().enumerate() {
            for (j, q) in self.bases[m].iter().enumerate() {
                if let Some(pq) = p.concat(q) {
                    sc.push(i, j, self.index[n + m][&pq], 1.0);
                }
            }
        }
        sc.finish();
        sc
    }
    fn endpoints(&self, grade: usize, i: usize) -> (usize, usize) {
        let p = &self.bases[grade][i];
        (p.start(), p.end())
    }
}

fn grade_pairs<A: GradedAlgebra + ?Sized>(alg: &A) -> Vec<(usize, usize)> {
    let top = alg.max_grade();
    (0..=top)
        .flat_map(|n| (0..=top - n).map(move |k| (n, k)))
        .filter(|&(n, k)| alg.dim(n + k) > 0)
        .collect()
}

/// Worst `|G - I|` over all grade pairs with a nonzero target grade.
pub fn check_gram_condition<A: GradedAlgebra + ?Sized>(alg: &A, tol: f64) -> CheckReport {
    let mut worst = (0.0f64, (0, 0));
    for (n, k) in grade_pairs(alg) {
        let sc = alg.structure_constants(n, k);
        let r = identity_residual(&sc.gram());
        if r > worst.0 {
            worst = (r, (n, k));
        }
    }
    CheckReport::at_most("weak bialgebra condition: Gram matrix of structure constants", worst.0, tol)
        .with_witness(serde_json::json!({"worst_grades": [worst.1 .0, worst.1 .1]}))
}

/// `m(D(e_K)^{(n,k)}) = e_K` for every basis element and every split.
pub fn check_multiply_back<A: GradedAlgebra + ?Sized>(alg: &A, tol: f64) -> CheckReport {
    let mut worst = 0.0f64;
    for (n, k) in grade_pairs(alg) {
        let sc = alg.structure_constants(n, k);
        // transpose: for each K the list of (i, j, m_ij^K)
        let mut co: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); sc.dim_target];
        for i in 0..sc.dim_n {
            for j in 0..sc.dim_m {
                for &(kk, v) in sc.product(i, j) {
                    co[kk].push((i, j, v));
                }
            }
        }
        for (kk, terms) in co.iter().enumerate() {
            let mut back = vec![0.0; sc.dim_target];
            for &(i, j, c) in terms {
                for &(l, v) in sc.product(i, j) {
                    back[l] += c * v;
                }
            }
            back[kk] -= 1.0;
            worst = back.iter().fold(worst, |w, x| w.max(x.abs()));
        }
    }
    CheckReport::at_most("product of the dual coproduct returns the input", worst, tol)
}

/// Structure constants vanish unless endpoints chain.
pub fn check_endpoint_chaining<A: GradedAlgebra + ?Sized>(alg: &A) -> CheckReport {
    let mut worst = 0.0f64;
    for (n, k) in grade_pairs(alg) {
        let sc = alg.structure_constants(n, k);
        for i in 0..sc.dim_n {
            let (a, c) = alg.endpoints(n, i);
            for j in 0..sc.dim_m {
                let (c2, b) = alg.endpoints(k, j);
                for &(kk, v) in sc.product(i, j) {
                    if c != c2 || alg.endpoints(n + k, kk) != (a, b) {
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
    }
    CheckReport::at_most("structure constants respect endpoint chaining", worst, 0.0)
}

/// Associativity from structure constants: `(e_i e_j) e_k = e_i (e_j e_k)`.
pub fn check_associativity<A: GradedAlgebra + ?Sized>(alg: &A, tol: f64) -> CheckReport {
    let top = alg.max_grade();
    let mut worst = 0.0f64;
    for n in 0..=top {
        for m in 0..=top - n {
            for p in 0..=top - n - m {
                if alg.dim(n + m + p) == 0 {
                    continue;
                }
                let nm = alg.structure_constants(n, m);
                let nm_p = alg.structure_constants(n + m, p);
                let mp = alg.structure_constants(m, p);
                let n_mp = alg.structure_constants(n, m + p);
                for i in 0..alg.dim(n) {
                    for j in 0..alg.dim(m) {
                        for k in 0..alg.dim(p) {
                            let mut acc = vec![0.0; alg.dim(n + m + p)];
                            for &(x, u) in nm.product(i, j) {
                                for &(y, v) in nm_p.product(x, k) {
                                    acc[y] += u * v;
                                }
                            }
                            for &(x, u) in mp.product(j, k) {
                                for &(y, v) in n_mp.product(i, x) {
                                    acc[y] -= u * v;
                                }
                            }
                            worst = acc.iter().fold(worst, |w, x| w.max(x.abs()));
                        }
                    }
                }
            }
        }
    }
    CheckReport::at_most("associativity of structure constants", worst, tol)
}
