//! Graded endomorphisms of the essential path space.
//!
//! An element is stored as one square block per length over the canonical
//! basis; entry `[i][j]` is the coefficient of `e_i ⊗ e^j`. Two products are
//! available: composition `∘` (blockwise matrix product) and the convolution
//! `•` induced by the graded product on both tensor legs. Two coproducts are
//! available as well: the composition coproduct `Δ` that expands over an
//! intermediate basis, and `Δ_•`, the dual of the graded product on both legs
//! followed by projection onto grade-preserving tensors.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng;

use crate::essential::{EssentialSpace, StructureConstants};
use crate::parallel::{self, Parallelism};
use crate::path::DROP_TOL;

/// `e_i ⊗ e^j` in grade `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub n: usize,
    pub i: usize,
    pub j: usize,
}

impl Mono {
    pub fn new(n: usize, i: usize, j: usize) -> Self {
        Mono { n, i, j }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradedEndo {
    blocks: BTreeMap<usize, DMatrix<f64>>,
}

impl GradedEndo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_blocks(blocks: impl IntoIterator<Item = (usize, DMatrix<f64>)>) -> Self {
        let mut out = GradedEndo { blocks: blocks.into_iter().collect() };
        out.prune();
        out
    }

    pub fn from_terms(alg: &EndAlgebra, terms: impl IntoIterator<Item = (Mono, f64)>) -> Self {
        let mut out = GradedEndo::zero();
        for (m, c) in terms {
            let d = alg.dim(m.n);
            out.blocks.entry(m.n).or_insert_with(|| DMatrix::zeros(d, d))[(m.i, m.j)] += c;
        }
        out.prune();
        out
    }

    pub fn monomial(alg: &EndAlgebra, m: Mono) -> Self {
        Self::from_terms(alg, [(m, 1.0)])
    }

    fn prune(&mut self) {
        self.blocks.retain(|_, b| b.amax() > DROP_TOL);
    }

    pub fn blocks(&self) -> &BTreeMap<usize, DMatrix<f64>> {
        &self.blocks
    }

    pub fn block(&self, n: usize) -> Option<&DMatrix<f64>> {
        self.blocks.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn terms(&self) -> Vec<(Mono, f64)> {
        let mut out = Vec::new();
        for (&n, b) in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    if b[(i, j)].abs() > DROP_TOL {
                        out.push((Mono::new(n, i, j), b[(i, j)]));
                    }
                }
            }
        }
        out
    }

    pub fn coeff(&self, m: Mono) -> f64 {
        self.blocks.get(&m.n).map_or(0.0, |b| b[(m.i, m.j)])
    }

    pub fn add(&self, other: &GradedEndo) -> GradedEndo {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &GradedEndo) -> GradedEndo {
        self.axpy(-1.0, other)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &GradedEndo) -> GradedEndo {
        let mut out = self.clone();
        for (&n, b) in &other.blocks {
            match out.blocks.get_mut(&n) {
                Some(x) => *x += b * s,
                None => {
                    out.blocks.insert(n, b * s);
                }
            }
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: f64) -> GradedEndo {
        GradedEndo::from_blocks(self.blocks.iter().map(|(&n, b)| (n, b * s)))
    }

    /// Frobenius norm over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.values().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn to_tensor(&self) -> EndoTensor {
        EndoTensor::from_terms(self.terms().into_iter().map(|(m, c)| (vec![m], c)))
    }
}

/// Sparse element of a tensor power of the endomorphism algebra.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EndoTensor {
    terms: BTreeMap<Vec<Mono>, f64>,
}

impl EndoTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<Mono>, f64)>) -> Self {
        let mut out = EndoTensor::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out.prune();
        out
    }

    fn add_term(&mut self, k: Vec<Mono>, c: f64) {
        *self.terms.entry(k).or_insert(0.0) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > DROP_TOL);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Mono>, f64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: &[Mono]) -> f64 {
        self.terms.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `x ⊗ y`, legs of `y` appended.
    pub fn tensor(&self, other: &EndoTensor) -> EndoTensor {
        let mut out = EndoTensor::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                let mut k = a.clone();
                k.extend_from_slice(b);
                out.add_term(k, x * y);
            }
        }
        out.prune();
        out
    }

    pub fn axpy(&self, s: f64, other: &EndoTensor) -> EndoTensor {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k.clone(), s * c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &EndoTensor) -> EndoTensor {
        self.axpy(-1.0, other)
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Replaces leg `leg` of every term by the expansion `f(mono)`.
    pub fn map_leg(&self, leg: usize, f: impl Fn(Mono) -> Vec<(Vec<Mono>, f64)>) -> EndoTensor {
        let mut out = EndoTensor::zero();
        for (k, c) in self.terms() {
            for (rep, x) in f(k[leg]) {
                let mut nk = k[..leg].to_vec();
                nk.extend(rep);
                nk.extend_from_slice(&k[leg + 1..]);
                out.add_term(nk, c * x);
            }
        }
        out.prune();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    Compose,
    Bullet,
}

/// The endomorphism algebra of an essential space, with structure constants
/// and star matrices precomputed for every grade.
#[derive(Debug, Clone)]
pub struct EndAlgebra {
    space: EssentialSpace,
    /// `sc[n][m]` for `n + m <= max_length`
    sc: Vec<Vec<StructureConstants>>,
    /// `co[n][m][k]`: the nonzero `(i, j, m_ij^k)`
    co: Vec<Vec<Vec<Vec<(usize, usize, f64)>>>>,
    /// `dense[n][m]`: rows `i * dim_m + j`, columns `k`
    dense: Vec<Vec<DMatrix<f64>>>,
    star: Vec<DMatrix<f64>>,
    ends: Vec<Vec<(usize, usize)>>,
}

impl EndAlgebra {
    pub fn new(space: EssentialSpace) -> Self {
        Self::with_parallelism(space, Parallelism::default())
    }

    pub fn with_parallelism(space: EssentialSpace, par: Parallelism) -> Self {
        let top = space.max_length();
        let pairs: Vec<(usize, usize)> =
            (0..=top).flat_map(|n| (0..=top - n).map(move |m| (n, m))).collect();
        let computed = parallel::map(par, pairs.clone(), |(n, m)| space.structure_constants(n, m));
        let mut sc: Vec<Vec<StructureConstants>> = (0..=top).map(|_| Vec::new()).collect();
        for ((n, _), s) in pairs.into_iter().zip(computed) {
            sc[n].push(s);
        }
        let co = sc
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        let mut t = vec![Vec::new(); s.dim_target];
                        for i in 0..s.dim_n {
                            for j in 0..s.dim_m {
                                for &(k, v) in s.product(i, j) {
                                    t[k].push((i, j, v));
                                }
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        let dense = sc
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        let mut d = DMatrix::zeros(s.dim_n * s.dim_m, s.dim_target);
                        for i in 0..s.dim_n {
                            for j in 0..s.dim_m {
                                for &(k, v) in s.product(i, j) {
                                    d[(i * s.dim_m + j, k)] = v;
                                }
                            }
                        }
                        d
                    })
                    .collect()
            })
            .collect();
        let star = (0..=top).map(|l| space.star_matrix(l)).collect();
        let ends = (0..=top)
            .map(|l| (0..space.grade_dim(l)).map(|i| space.endpoints(l, i)).collect())
            .collect();
        EndAlgebra { space, sc, co, dense, star, ends }
    }

    pub fn space(&self) -> &EssentialSpace {
        &self.space
    }

    pub fn max_grade(&self) -> usize {
        self.space.max_length()
    }

    pub fn dim(&self, n: usize) -> usize {
        self.space.grade_dim(n)
    }

    /// `Σ_n (dim E_n)²`.
    pub fn total_dim(&self) -> usize {
        (0..=self.max_grade()).map(|n| self.dim(n) * self.dim(n)).sum()
    }

    pub fn structure_constants(&self, n: usize, m: usize) -> Option<&StructureConstants> {
        self.sc.get(n).and_then(|r| r.get(m))
    }

    pub fn star_matrix(&self, n: usize) -> &DMatrix<f64> {
        &self.star[n]
    }

    pub fn endpoints(&self, n: usize, i: usize) -> (usize, usize) {
        self.ends[n][i]
    }

    pub fn monomials(&self) -> Vec<Mono> {
        (0..=self.max_grade())
            .flat_map(|n| {
                let d = self.dim(n);
                (0..d).flat_map(move |i| (0..d).map(move |j| Mono::new(n, i, j)))
            })
            .collect()
    }

    pub fn compose(&self, r: &GradedEndo, s: &GradedEndo) -> GradedEndo {
        GradedEndo::from_blocks(
            r.blocks
                .iter()
                .filter_map(|(n, a)| s.blocks.get(n).map(|b| (*n, a * b))),
        )
    }

    /// `Mᵀ (r_n ⊗ s_m) M` accumulated into grade `n + m`.
    pub fn bullet(&self, r: &GradedEndo, s: &GradedEndo) -> GradedEndo {
        let mut out: BTreeMap<usize, DMatrix<f64>> = BTreeMap::new();
        for (&n, a) in &r.blocks {
            for (&m, b) in &s.blocks {
                if n + m > self.max_grade() || self.dim(n + m) == 0 {
                    continue;
                }
                let d = &self.dense[n][m];
                let block = d.transpose() * a.kronecker(b) * d;
                let t = self.dim(n + m);
                *out.entry(n + m).or_insert_with(|| DMatrix::zeros(t, t)) += block;
            }
        }
        GradedEndo::from_blocks(out)
    }

    pub fn product(&self, op: Product, r: &GradedEndo, s: &GradedEndo) -> GradedEndo {
        match op {
            Product::Compose => self.compose(r, s),
            Product::Bullet => self.bullet(r, s),
        }
    }

    pub fn mono_compose(&self, a: Mono, b: Mono) -> Vec<(Mono, f64)> {
        if a.n == b.n && a.j == b.i {
            vec![(Mono::new(a.n, a.i, b.j), 1.0)]
        } else {
            Vec::new()
        }
    }

    /// `(e_i • e_k) ⊗ (e^j • e^l)` expanded over the target basis.
    pub fn mono_bullet(&self, a: Mono, b: Mono) -> Vec<(Mono, f64)> {
        let Some(sc) = self.structure_constants(a.n, b.n) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for &(k, x) in sc.product(a.i, b.i) {
            for &(l, y) in sc.product(a.j, b.j) {
                out.push((Mono::new(a.n + b.n, k, l), x * y));
            }
        }
        out
    }

    pub fn mono_product(&self, op: Product, a: Mono, b: Mono) -> Vec<(Mono, f64)> {
        match op {
            Product::Compose => self.mono_compose(a, b),
            Product::Bullet => self.mono_bullet(a, b),
        }
    }

    /// Unit of `•`: all-ones block on the zero-length basis.
    pub fn unit(&self) -> GradedEndo {
        let d = self.dim(0);
        GradedEndo::from_blocks([(0, DMatrix::from_element(d, d, 1.0))])
    }

    /// Unit of `∘`: identity blocks.
    pub fn identity(&self) -> GradedEndo {
        GradedEndo::from_blocks(
            (0..=self.max_grade())
                .filter(|&n| self.dim(n) > 0)
                .map(|n| (n, DMatrix::identity(self.dim(n), self.dim(n)))),
        )
    }

    /// Trace over all blocks.
    pub fn counit(&self, r: &GradedEndo) -> f64 {
        r.blocks.values().map(|b| b.trace()).sum()
    }

    pub fn mono_counit(m: Mono) -> f64 {
        if m.i == m.j {
            1.0
        } else {
            0.0
        }
    }

    /// Composition coproduct `Δ(e_i ⊗ e^j) = Σ_I (e_i ⊗ e^I) ⊗ (e_I ⊗ e^j)`.
    pub fn coproduct_mono(&self, m: Mono) -> Vec<(Vec<Mono>, f64)> {
        (0..self.dim(m.n))
            .map(|k| (vec![Mono::new(m.n, m.i, k), Mono::new(m.n, k, m.j)], 1.0))
            .collect()
    }

    pub fn coproduct(&self, r: &GradedEndo) -> EndoTensor {
        r.to_tensor().map_leg(0, |m| self.coproduct_mono(m))
    }

    /// Dual of the graded product on both legs, keeping only terms whose legs
    /// are grade preserving.
    pub fn dual_coproduct_mono(&self, m: Mono) -> Vec<(Vec<Mono>, f64)> {
        let mut out = Vec::new();
        for p in 0..=m.n {
            let q = m.n - p;
            let co = &self.co[p][q];
            for &(i, j, x) in &co[m.i] {
                for &(i2, j2, y) in &co[m.j] {
                    out.push((vec![Mono::new(p, i, i2), Mono::new(q, j, j2)], x * y));
                }
            }
        }
        out
    }

    pub fn dual_coproduct(&self, r: &GradedEndo) -> EndoTensor {
        r.to_tensor().map_leg(0, |m| self.dual_coproduct_mono(m))
    }

    /// Dual of the graded product on a single essential basis vector:
    /// `D e_K = Σ m_IJ^K e_I ⊗ e_J` as `((p, I), (q, J), coefficient)`.
    pub fn path_coproduct(&self, n: usize, k: usize) -> Vec<((usize, usize), (usize, usize), f64)> {
        let mut out = Vec::new();
        for p in 0..=n {
            for &(i, j, x) in &self.co[p][n - p][k] {
                out.push(((p, i), (n - p, j), x));
            }
        }
        out
    }

    pub fn coproduct_with(&self, dual: bool, r: &GradedEndo) -> EndoTensor {
        if dual {
            self.dual_coproduct(r)
        } else {
            self.coproduct(r)
        }
    }

    /// Legwise product of two tensors of the same rank. Pairs of terms that
    /// cannot chain on some leg are skipped before any arithmetic.
    pub fn tensor_product(&self, op: Product, x: &EndoTensor, y: &EndoTensor) -> EndoTensor {
        let left_key = |m: Mono| match op {
            Product::Compose => (m.n, m.j),
            Product::Bullet => (self.ends[m.n][m.i].1, self.ends[m.n][m.j].1),
        };
        let right_key = |m: Mono| match op {
            Product::Compose => (m.n, m.i),
            Product::Bullet => (self.ends[m.n][m.i].0, self.ends[m.n][m.j].0),
        };
        let mut by_key: HashMap<Vec<(usize, usize)>, Vec<(&Vec<Mono>, f64)>> = HashMap::new();
        for (k, c) in y.terms() {
            by_key.entry(k.iter().map(|&m| right_key(m)).collect()).or_default().push((k, c));
        }
        let mut out = EndoTensor::zero();
        for (a, ca) in x.terms() {
            let key: Vec<_> = a.iter().map(|&m| left_key(m)).collect();
            let Some(matches) = by_key.get(&key) else { continue };
            for (b, cb) in matches {
                let mut partial: Vec<(Vec<Mono>, f64)> = vec![(Vec::with_capacity(a.len()), ca * cb)];
                for (&ma, &mb) in a.iter().zip(b.iter()) {
                    let leg = self.mono_product(op, ma, mb);
                    if leg.is_empty() {
                        partial.clear();
                        break;
                    }
                    partial = partial
                        .into_iter()
                        .flat_map(|(k, c)| {
                            leg.iter().map(move |&(m, v)| {
                                let mut k = k.clone();
                                k.push(m);
                                (k, c * v)
                            })
                        })
                        .collect();
                }
                for (k, c) in partial {
                    out.add_term(k, c);
                }
            }
        }
        out.prune();
        out
    }

    /// `(a ⊗ u)⋆ = a⋆ ⊗ u⋆`, i.e. `S ρ Sᵀ` per grade.
    pub fn star(&self, r: &GradedEndo) -> GradedEndo {
        GradedEndo::from_blocks(
            r.blocks
                .iter()
                .map(|(&n, b)| (n, &self.star[n] * b * self.star[n].transpose())),
        )
    }

    pub fn star_mono(&self, m: Mono) -> Vec<(Mono, f64)> {
        let s = &self.star[m.n];
        let mut out = Vec::new();
        for a in 0..s.nrows() {
            let x = s[(a, m.i)];
            if x.abs() <= DROP_TOL {
                continue;
            }
            for b in 0..s.nrows() {
                let y = s[(b, m.j)];
                if y.abs() > DROP_TOL {
                    out.push((Mono::new(m.n, a, b), x * y));
                }
            }
        }
        out
    }

    /// `⋆` applied on every leg.
    pub fn star_tensor(&self, t: &EndoTensor) -> EndoTensor {
        let legs = t.terms().next().map_or(0, |(k, _)| k.len());
        let mut out = t.clone();
        for leg in 0..legs {
            out = out.map_leg(leg, |m| {
                self.star_mono(m).into_iter().map(|(m, c)| (vec![m], c)).collect()
            });
        }
        out
    }

    /// Contracts leg `leg` with the counit.
    pub fn counit_leg(&self, t: &EndoTensor, leg: usize) -> EndoTensor {
        t.map_leg(leg, |m| vec![(Vec::new(), Self::mono_counit(m))])
    }

    /// Monomial drawn with probability proportional to the size of its grade.
    pub fn random_mono(&self, rng: &mut impl Rng) -> Mono {
        let total = self.total_dim();
        let mut x = rng.random_range(0..total);
        for n in 0..=self.max_grade() {
            let d = self.dim(n);
            if x < d * d {
                return Mono::new(n, x / d, x % d);
            }
            x -= d * d;
        }
        unreachable!("index below total dimension")
    }

    /// Dense element of a single grade with entries uniform in `[-1, 1)`.
    pub fn random_homogeneous(&self, n: usize, rng: &mut impl Rng) -> GradedEndo {
        let d = self.dim(n);
        GradedEndo::from_blocks([(n, DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)))])
    }

    /// Random element spread over a few grades.
    pub fn random_element(&self, rng: &mut impl Rng) -> GradedEndo {
        let grades: Vec<usize> = (0..=self.max_grade()).filter(|&n| self.dim(n) > 0).collect();
        let mut out = GradedEndo::zero();
        for _ in 0..2 {
            let n = grades[rng.random_range(0..grades.len())];
            out = out.add(&self.random_homogeneous(n, rng));
        }
        out
    }
}
