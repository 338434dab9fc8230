//! Essential paths: orthonormal cell bases, the projector `P`, the graded
//! product `e • f = P(ef)`, structure constants and the decomposition of an
//! essential path into products of shorter ones.
//!
//! The space is split into cells `E(a -l-> b)` of fixed endpoints and length.
//! Each cell basis is the kernel of the stacked `C_1, ..., C_{l-1}` matrices
//! on `Paths(a -l-> b)`, brought to a canonical form (echelon sweep over the
//! lexicographic path order, Gram–Schmidt, first significant coefficient
//! positive) so that it does not depend on the SVD used to find it.
//!
//! Within a grade `l`, the global basis lists cells in `(a, b)` index order
//! and, inside a cell, vectors in canonical order.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{input_err, Error, Result};
use crate::graph::{Graph, PerronData};
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::parallel::{self, Parallelism};
use crate::path::{annihilate_path, concat, enumerate_paths, ElementaryPath, PathVector, DROP_TOL};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EssentialCellBasis {
    pub a: usize,
    pub b: usize,
    pub l: usize,
    /// `Paths(a -l-> b)` in lexicographic order.
    pub paths: Vec<ElementaryPath>,
    /// One basis vector per row, coordinates over `paths`.
    pub coords: DMatrix<f64>,
    index: HashMap<ElementaryPath, usize>,
}

impl EssentialCellBasis {
    pub(crate) fn from_coords(
        a: usize,
        b: usize,
        l: usize,
        paths: Vec<ElementaryPath>,
        coords: DMatrix<f64>,
    ) -> Self {
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        EssentialCellBasis { a, b, l, paths, coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.nrows()
    }

    pub fn path_index(&self, p: &ElementaryPath) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn vector(&self, i: usize) -> PathVector {
        PathVector::from_terms(
            self.paths
                .iter()
                .enumerate()
                .map(|(t, p)| (p.clone(), self.coords[(i, t)])),
        )
    }

    /// Dense coordinates of `p` over `paths`; terms outside the cell are ignored.
    pub fn dense(&self, p: &PathVector) -> DVector<f64> {
        let mut x = DVector::zeros(self.paths.len());
        for (q, c) in p.terms() {
            if let Some(t) = self.path_index(q) {
                x[t] += c;
            }
        }
        x
    }

    pub fn gram_residual(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        linalg::identity_residual(&(&self.coords * self.coords.transpose()))
    }

    /// Largest `|C_k e_i|` over the basis.
    pub fn constraint_residual(&self, perron: &PerronData) -> f64 {
        let mut res = 0.0f64;
        for i in 0..self.dim() {
            let v = self.vector(i);
            for k in 1..self.l.max(1) {
                res = res.max(crate::path::annihilate(perron, k, &v).max_abs());
            }
        }
        res
    }
}

/// Builds the stacked constraint matrix of a cell and extracts its kernel.
pub fn essential_basis(
    g: &Graph,
    perron: &PerronData,
    a: usize,
    b: usize,
    l: usize,
    rank_tol: f64,
    sign_tol: f64,
) -> EssentialCellBasis {
    let paths = enumerate_paths(g, a, b, l);
    let np = paths.len();
    if np == 0 {
        return EssentialCellBasis::from_coords(a, b, l, paths, DMatrix::zeros(0, 0));
    }
    if l <= 1 {
        return EssentialCellBasis::from_coords(a, b, l, paths, DMatrix::identity(np, np));
    }
    let shorter = enumerate_paths(g, a, b, l - 2);
    let short_index: HashMap<&ElementaryPath, usize> =
        shorter.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let ns = shorter.len();
    let mut c = DMatrix::zeros((l - 1) * ns, np);
    for (t, p) in paths.iter().enumerate() {
        for k in 1..l {
            if let Some((q, w)) = annihilate_path(perron, k, p) {
                c[((k - 1) * ns + short_index[&q], t)] += w;
            }
        }
    }
    let kernel = linalg::kernel_rows(&c, rank_tol);
    let coords = linalg::canonical_basis(&kernel, sign_tol);
    EssentialCellBasis::from_coords(a, b, l, paths, coords)
}

#[derive(Debug, Clone, Copy)]
pub struct SpaceOptions {
    pub tol: f64,
    pub rank_tol: f64,
    /// Required when the graph has no Coxeter number.
    pub max_length: Option<usize>,
    pub parallelism: Parallelism,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            tol: DEFAULT_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            max_length: None,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct GradeLayout {
    /// start offset of cell (a, b), row-major over vertex pairs
    offsets: Vec<usize>,
    dim: usize,
    /// global index -> (a, b, local index)
    members: Vec<(usize, usize, usize)>,
}

/// All essential cells of a graph up to a maximal length, computed once.
#[derive(Debug, Clone)]
pub struct EssentialSpace {
    graph: Graph,
    perron: PerronData,
    opts: SpaceOptions,
    max_length: usize,
    truncated: bool,
    /// `cells[l][a * n + b]`
    cells: Vec<Vec<EssentialCellBasis>>,
    layouts: Vec<GradeLayout>,
}

/// Largest length for which cells are computed: `kappa - 2` for ADE graphs,
/// otherwise the explicit cap. Returns whether the result is a truncation.
pub fn length_bound(perron: &PerronData, cap: Option<usize>) -> Result<(usize, bool)> {
    match (perron.kappa, cap) {
        (Some(k), None) => Ok((k.saturating_sub(2), false)),
        (Some(k), Some(c)) => {
            let natural = k.saturating_sub(2);
            Ok((natural.min(c), c < natural))
        }
        (None, Some(c)) => Ok((c, true)),
        (None, None) => Err(Error::Unsupported(format!(
            "spectral radius {} >= 2: essential paths are unbounded, a maximal length is required",
            perron.beta
        ))),
    }
}

impl EssentialSpace {
    pub fn new(graph: Graph, perron: PerronData, opts: SpaceOptions) -> Result<Self> {
        let (max_length, truncated) = length_bound(&perron, opts.max_length)?;
        let n = graph.len();
        let jobs: Vec<(usize, usize, usize)> = (0..=max_length)
            .flat_map(|l| (0..n).flat_map(move |a| (0..n).map(move |b| (l, a, b))))
            .collect();
        let computed = parallel::map(opts.parallelism, jobs, |(l, a, b)| {
            essential_basis(&graph, &perron, a, b, l, opts.rank_tol, opts.tol)
        });
        Ok(Self::assemble(graph, perron, opts, max_length, truncated, computed))
    }

    pub(crate) fn assemble(
        graph: Graph,
        perron: PerronData,
        opts: SpaceOptions,
        max_length: usize,
        truncated: bool,
        computed: Vec<EssentialCellBasis>,
    ) -> Self {
        let n = graph.len();
        let mut cells: Vec<Vec<EssentialCellBasis>> = Vec::with_capacity(max_length + 1);
        let mut it = computed.into_iter();
        for _ in 0..=max_length {
            cells.push(it.by_ref().take(n * n).collect());
        }
        let layouts = cells
            .iter()
            .map(|row| {
                let mut offsets = Vec::with_capacity(n * n);
                let mut members = Vec::new();
                for cell in row {
                    offsets.push(members.len());
                    members.extend((0..cell.dim()).map(|i| (cell.a, cell.b, i)));
                }
                GradeLayout { offsets, dim: members.len(), members }
            })
            .collect();
        EssentialSpace { graph, perron, opts, max_length, truncated, cells, layouts }
    }

    /// Computes Perron–Frobenius data first.
    pub fn from_graph(graph: Graph, opts: SpaceOptions) -> Result<Self> {
        let perron = crate::graph::perron_frobenius(&graph, opts.tol)?;
        Self::new(graph, perron, opts)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn perron(&self) -> &PerronData {
        &self.perron
    }

    pub fn options(&self) -> &SpaceOptions {
        &self.opts
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// True when lengths beyond `max_length` may carry essential paths that
    /// were not computed.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn cell(&self, a: usize, b: usize, l: usize) -> Option<&EssentialCellBasis> {
        self.cells.get(l).map(|row| &row[a * self.graph.len() + b])
    }

    pub fn cells(&self) -> impl Iterator<Item = &EssentialCellBasis> {
        self.cells.iter().flatten()
    }

    /// `dim E_l` for `l = 0..=max_length`, trailing zeros removed.
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.layouts.iter().map(|g| g.dim).collect();
        while d.len() > 1 && *d.last().unwrap() == 0 {
            d.pop();
        }
        d
    }

    pub fn grade_dim(&self, l: usize) -> usize {
        self.layouts.get(l).map_or(0, |g| g.dim)
    }

    pub fn global_index(&self, a: usize, b: usize, l: usize, i: usize) -> usize {
        self.layouts[l].offsets[a * self.graph.len() + b] + i
    }

    /// `(a, b, local index)` of a global basis vector.
    pub fn locate(&self, l: usize, global: usize) -> (usize, usize, usize) {
        self.layouts[l].members[global]
    }

    pub fn endpoints(&self, l: usize, global: usize) -> (usize, usize) {
        let (a, b, _) = self.locate(l, global);
        (a, b)
    }

    pub fn basis_vector(&self, l: usize, global: usize) -> PathVector {
        let (a, b, i) = self.locate(l, global);
        self.cell(a, b, l).unwrap().vector(i)
    }

    /// `⟨e_I, p⟩` for every basis vector of grade `l`.
    pub fn grade_coords(&self, p: &PathVector, l: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.grade_dim(l));
        if l > self.max_length {
            return out;
        }
        for ((a, b, len), part) in p.by_cell() {
            if len != l {
                continue;
            }
            let cell = self.cell(a, b, l).unwrap();
            if cell.dim() == 0 {
                continue;
            }
            let c = &cell.coords * cell.dense(&part);
            let off = self.global_index(a, b, l, 0);
            out.rows_mut(off, cell.dim()).copy_from(&c);
        }
        out
    }

    pub fn from_grade_coords(&self, l: usize, coords: &DVector<f64>) -> PathVector {
        let mut out = PathVector::zero();
        for (g, &c) in coords.iter().enumerate() {
            if c.abs() > DROP_TOL {
                let (a, b, i) = self.locate(l, g);
                let cell = self.cell(a, b, l).unwrap();
                for (t, p) in cell.paths.iter().enumerate() {
                    out.add_term(p.clone(), c * cell.coords[(i, t)]);
                }
            }
        }
        out.prune();
        out
    }

    /// Orthogonal projection onto the essential subspace. Components longer
    /// than `max_length` are dropped (they vanish identically for ADE graphs).
    pub fn project(&self, p: &PathVector) -> PathVector {
        let mut out = PathVector::zero();
        for ((a, b, l), part) in p.by_cell() {
            let Some(cell) = self.cell(a, b, l) else { continue };
            if cell.dim() == 0 {
                continue;
            }
            let x = cell.dense(&part);
            let y = cell.coords.transpose() * (&cell.coords * x);
            for (t, p) in cell.paths.iter().enumerate() {
                out.add_term(p.clone(), y[t]);
            }
        }
        out.prune();
        out
    }

    pub fn essential_residual(&self, p: &PathVector) -> f64 {
        (p - &self.project(p)).norm()
    }

    pub fn is_essential(&self, p: &PathVector) -> bool {
        self.essential_residual(p) <= self.opts.tol * p.norm().max(1.0)
    }

    /// Graded product `P(ef)`.
    pub fn bullet(&self, e: &PathVector, f: &PathVector) -> PathVector {
        self.project(&concat(e, f))
    }

    /// Graded product plus a note for every input that was not essential and
    /// had to be projected first. The value is the same either way since
    /// `P(P(p)P(q)) = P(pq)`.
    pub fn bullet_with_warnings(&self, e: &PathVector, f: &PathVector) -> (PathVector, Vec<String>) {
        let mut warnings = Vec::new();
        let e2 = if self.is_essential(e) {
            e.clone()
        } else {
            warnings.push("left factor is not essential; projected".to_string());
            self.project(e)
        };
        let f2 = if self.is_essential(f) {
            f.clone()
        } else {
            warnings.push("right factor is not essential; projected".to_string());
            self.project(f)
        };
        let pq = concat(&e2, &f2);
        if pq.terms().any(|(p, _)| p.len() > self.max_length) {
            warnings.push(format!(
                "product has components longer than {}; they were dropped",
                self.max_length
            ));
        }
        (self.project(&pq), warnings)
    }

    /// Sum of the zero-length paths.
    pub fn unit(&self) -> PathVector {
        crate::path::unit(&self.graph)
    }

    /// `m[i][j]^k = ⟨e_k, e_i e_j⟩` for grades `n` and `m`, computed from
    /// concatenation inner products (`P` is self-adjoint and fixes `e_k`).
    pub fn structure_constants(&self, n: usize, m: usize) -> StructureConstants {
        let nv = self.graph.len();
        let (dn, dm) = (self.grade_dim(n), self.grade_dim(m));
        let mut sc = StructureConstants::zeros(n, m, dn, dm, self.grade_dim(n + m));
        if n + m > self.max_length {
            return sc;
        }
        for a in 0..nv {
            for b in 0..nv {
                let target = self.cell(a, b, n + m).unwrap();
                if target.dim() == 0 {
                    continue;
                }
                for c in 0..nv {
                    let left = self.cell(a, c, n).unwrap();
                    let right = self.cell(c, b, m).unwrap();
                    if left.dim() == 0 || right.dim() == 0 {
                        continue;
                    }
                    let blocks = split_coefficients(target, left, right, n);
                    for (k, x) in blocks.iter().enumerate() {
                        let mk = &left.coords * x * right.coords.transpose();
                        let kk = self.global_index(a, b, n + m, k);
                        for i in 0..left.dim() {
                            for j in 0..right.dim() {
                                let v = mk[(i, j)];
                                if v.abs() > DROP_TOL {
                                    sc.push(
                                        self.global_index(a, c, n, i),
                                        self.global_index(c, b, m, j),
                                        kk,
                                        v,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        sc.finish();
        sc
    }

    /// Coefficients `γ_vij = ⟨e'_i(a→v) e''_j(v→b), e⟩` of a homogeneous
    /// essential path over products of shorter basis vectors.
    pub fn decompose(&self, e: &PathVector, split: usize) -> Result<Decomposition> {
        let (a, b, len) = e
            .cell()
            .ok_or_else(|| Error::Input("decomposition needs a nonzero path vector with fixed endpoints and length".into()))?;
        if split == 0 || split >= len {
            return input_err(format!("split {split} must satisfy 0 < split < {len}"));
        }
        if len > self.max_length {
            return input_err(format!("length {len} exceeds the computed range {}", self.max_length));
        }
        if !self.is_essential(e) {
            return input_err(format!(
                "input is not essential (residual {:e})",
                self.essential_residual(e)
            ));
        }
        let target = self.cell(a, b, len).unwrap();
        let x = target.dense(e);
        let mut entries = Vec::new();
        for v in 0..self.graph.len() {
            let left = self.cell(a, v, split).unwrap();
            let right = self.cell(v, b, len - split).unwrap();
            if left.dim() == 0 || right.dim() == 0 {
                continue;
            }
            let mat = split_matrix(target, left, right, split, &x);
            let gamma = &left.coords * mat * right.coords.transpose();
            for i in 0..left.dim() {
                for j in 0..right.dim() {
                    entries.push(DecompositionEntry { v, i, j, gamma: gamma[(i, j)] });
                }
            }
        }
        Ok(Decomposition { a, b, length: len, split, entries })
    }

    /// `Σ γ_vij e'_i • e''_j`.
    pub fn reconstruct(&self, d: &Decomposition) -> PathVector {
        let mut acc = PathVector::zero();
        for en in &d.entries {
            if en.gamma.abs() <= DROP_TOL {
                continue;
            }
            let left = self.cell(d.a, en.v, d.split).unwrap().vector(en.i);
            let right = self.cell(en.v, d.b, d.length - d.split).unwrap().vector(en.j);
            acc = &acc + &self.bullet(&left, &right).scale(en.gamma);
        }
        acc
    }

    /// `S[J][I] = ⟨e_J, e_I⋆⟩` on grade `l`; orthogonal since `⋆` is an
    /// isometry of `E_l`.
    pub fn star_matrix(&self, l: usize) -> DMatrix<f64> {
        let d = self.grade_dim(l);
        let mut s = DMatrix::zeros(d, d);
        if l > self.max_length {
            return s;
        }
        let nv = self.graph.len();
        for a in 0..nv {
            for b in 0..nv {
                let src = self.cell(a, b, l).unwrap();
                let dst = self.cell(b, a, l).unwrap();
                if src.dim() == 0 {
                    continue;
                }
                // reversal as a permutation from src paths to dst paths
                let mut perm = DMatrix::zeros(dst.paths.len(), src.paths.len());
                for (t, p) in src.paths.iter().enumerate() {
                    perm[(dst.path_index(&p.reversed()).unwrap(), t)] = 1.0;
                }
                let block = &dst.coords * perm * src.coords.transpose();
                let (ro, co) = (self.global_index(b, a, l, 0), self.global_index(a, b, l, 0));
                s.view_mut((ro, co), (dst.dim(), src.dim())).copy_from(&block);
            }
        }
        s
    }
}

/// For each basis vector `k` of `target`, its coefficients rearranged as a
/// `left.paths × right.paths` matrix (paths of `target` split after `n` steps).
fn split_coefficients(
    target: &EssentialCellBasis,
    left: &EssentialCellBasis,
    right: &EssentialCellBasis,
    n: usize,
) -> Vec<DMatrix<f64>> {
    (0..target.dim())
        .map(|k| {
            let x = target.coords.row(k).transpose();
            split_matrix(target, left, right, n, &x)
        })
        .collect()
}

fn split_matrix(
    target: &EssentialCellBasis,
    left: &EssentialCellBasis,
    right: &EssentialCellBasis,
    n: usize,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(left.paths.len(), right.paths.len());
    for (t, p) in target.paths.iter().enumerate() {
        if p.vertex(n) != left.b {
            continue;
        }
        let (pre, suf) = p.split_at(n);
        m[(left.path_index(&pre).unwrap(), right.path_index(&suf).unwrap())] = x[t];
    }
    m
}

/// Sparse structure constants of a graded product between grades `n` and `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub n: usize,
    pub m: usize,
    pub dim_n: usize,
    pub dim_m: usize,
    pub dim_target: usize,
    /// `products[i * dim_m + j]` = sorted `(k, m_ij^k)` with nonzero values.
    products: Vec<Vec<(usize, f64)>>,
}

impl StructureConstants {
    pub fn zeros(n: usize, m: usize, dim_n: usize, dim_m: usize, dim_target: usize) -> Self {
        StructureConstants {
            n,
            m,
            dim_n,
            dim_m,
            dim_target,
            products: vec![Vec::new(); dim_n * dim_m],
        }
    }

    pub fn push(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.products[i * self.dim_m + j].push((k, v));
    }

    pub(crate) fn finish(&mut self) {
        for p in &mut self.products {
            p.sort_by_key(|&(k, _)| k);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(p.len());
            for &(k, v) in p.iter() {
                match merged.last_mut() {
                    Some((lk, lv)) if *lk == k => *lv += v,
                    _ => merged.push((k, v)),
                }
            }
            merged.retain(|&(_, v)| v.abs() > DROP_TOL);
            *p = merged;
        }
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, f64)] {
        &self.products[i * self.dim_m + j]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.product(i, j)
            .iter()
            .find(|&&(kk, _)| kk == k)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn is_zero(&self) -> bool {
        self.products.iter().all(|p| p.is_empty())
    }

    /// `G_KL = Σ_IJ m_IJ^K m_IJ^L`.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.dim_target, self.dim_target);
        for p in &self.products {
            for &(k, x) in p {
                for &(l, y) in p {
                    g[(k, l)] += x * y;
                }
            }
        }
        g
    }

    /// Dense `[i][j][k]` tensor.
    pub fn dense(&self) -> Vec<Vec<Vec<f64>>> {
        let mut t = vec![vec![vec![0.0; self.dim_target]; self.dim_m]; self.dim_n];
        for i in 0..self.dim_n {
            for j in 0..self.dim_m {
                for &(k, v) in self.product(i, j) {
                    t[i][j][k] = v;
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionEntry {
    pub v: usize,
    pub i: usize,
    pub j: usize,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub a: usize,
    pub b: usize,
    pub length: usize,
    pub split: usize,
    pub entries: Vec<DecompositionEntry>,
}

impl Decomposition {
    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|e| e.gamma * e.gamma).sum()
    }
}

/// Graded dimensions computed without path coordinates: each cell of length
/// `L` is represented inside the span of `e_i(a -L-1-> v)·[v, b]`, where only
/// the last backtrack constraint remains to be imposed. Returns per-length
/// `n × n` cell dimension matrices up to the first length with no cells
/// (or up to `max_length`).
pub fn recursive_cell_dims(
    g: &Graph,
    perron: &PerronData,
    max_length: usize,
    rank_tol: f64,
    par: Parallelism,
) -> Vec<DMatrix<usize>> {
    struct Cell {
        /// candidates (v, i) with v ~ b
        cands: Vec<(usize, usize)>,
        coeffs: DMatrix<f64>,
    }
    let n = g.len();
    let mut out = Vec::new();
    let mut prev2: Vec<Cell> = Vec::new();
    let mut prev: Vec<Cell> = (0..n * n)
        .map(|ab| {
            let d = usize::from(ab / n == ab % n);
            Cell { cands: Vec::new(), coeffs: DMatrix::zeros(d, 0) }
        })
        .collect();
    out.push(DMatrix::from_fn(n, n, |a, b| prev[a * n + b].coeffs.nrows()));
    for l in 1..=max_length {
        let jobs: Vec<usize> = (0..n * n).collect();
        let cur: Vec<Cell> = parallel::map(par, jobs, |ab| {
            let (a, b) = (ab / n, ab % n);
            let mut cands = Vec::new();
            for &v in g.neighbors(b) {
                for i in 0..prev[a * n + v].coeffs.nrows() {
                    cands.push((v, i));
                }
            }
            if l == 1 || cands.is_empty() {
                let d = cands.len();
                return Cell { cands, coeffs: DMatrix::identity(d, d) };
            }
            let rows = prev2[a * n + b].coeffs.nrows();
            let mut c = DMatrix::zeros(rows, cands.len());
            for (col, &(v, i)) in cands.iter().enumerate() {
                let pc = &prev[a * n + v];
                let w = (perron.mu[v] / perron.mu[b]).sqrt();
                for (pos, &(u, j)) in pc.cands.iter().enumerate() {
                    if u == b {
                        c[(j, col)] += w * pc.coeffs[(i, pos)];
                    }
                }
            }
            let coeffs = linalg::kernel_rows(&c, rank_tol);
            Cell { cands, coeffs }
        });
        let dims = DMatrix::from_fn(n, n, |a, b| cur[a * n + b].coeffs.nrows());
        let empty = dims.iter().all(|&d| d == 0);
        out.push(dims);
        prev2 = std::mem::replace(&mut prev, cur);
        if empty {
            break;
        }
    }
    while out.len() > 1 && out.last().unwrap().iter().all(|&d| d == 0) {
        out.pop();
    }
    out
}

pub fn recursive_dims(
    g: &Graph,
    perron: &PerronData,
    max_length: usize,
    rank_tol: f64,
    par: Parallelism,
) -> Vec<usize> {
    recursive_cell_dims(g, perron, max_length, rank_tol, par)
        .iter()
        .map(|m| m.sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_ade, builtin, fused_matrices, perron_frobenius, AdeFamily};
    use crate::path::inner;

    fn space(name: &str) -> EssentialSpace {
        EssentialSpace::from_graph(builtin(name).unwrap(), SpaceOptions::default()).unwrap()
    }

    fn path(g: &Graph, labels: &[&str]) -> PathVector {
        PathVector::from_path(ElementaryPath::from_labels(g, labels).unwrap())
    }

    #[test]
    fn e6_cell_dimensions() {
        let s = space("E6");
        let g = s.graph();
        let two = g.index_of("2").unwrap();
        assert_eq!(s.cell(two, two, 2).unwrap().dim(), 2);
        assert_eq!(s.cell(two, two, 4).unwrap().dim(), 3);
        assert_eq!(s.dims(), vec![6, 10, 14, 18, 20, 20, 20, 18, 14, 10, 6]);
        assert_eq!(s.dims().iter().sum::<usize>(), 156);
    }

    #[test]
    fn e6_length_two_basis_at_vertex_two() {
        let s = space("E6");
        let g = s.graph();
        let mu = &s.perron().mu;
        let cell = s.cell(2, 2, 2).unwrap();
        // every basis vector satisfies the single C_1 constraint
        for i in 0..cell.dim() {
            let v = cell.vector(i);
            let c: f64 = v.terms().map(|(p, c)| c * mu[p.vertex(1)].sqrt()).sum();
            assert!(c.abs() < 1e-12);
        }
        // the span contains [2,3,2] - sqrt(mu3/mu1) [2,1,2]
        let e1 = &path(g, &["2", "3", "2"]) - &path(g, &["2", "1", "2"]).scale((mu[3] / mu[1]).sqrt());
        assert!(s.essential_residual(&e1) < 1e-12);
        assert!(cell.gram_residual() < 1e-12);
    }

    #[test]
    fn cell_invariants_hold() {
        for name in ["A2", "A4", "D4", "D5", "E6"] {
            let s = space(name);
            for cell in s.cells() {
                assert!(cell.gram_residual() <= 1e-9);
                assert!(cell.constraint_residual(s.perron()) <= 1e-9);
                for i in 0..cell.dim() {
                    let first = cell.coords.row(i).iter().copied().find(|c| c.abs() > 1e-9).unwrap();
                    assert!(first > 0.0);
                }
            }
        }
    }

    #[test]
    fn length_one_cells_are_edges() {
        let s = space("D5");
        let g = s.graph();
        for a in 0..g.len() {
            for b in 0..g.len() {
                let c = s.cell(a, b, 1).unwrap();
                assert_eq!(c.dim(), usize::from(g.adjacent(a, b)));
            }
        }
    }

    #[test]
    fn no_essential_paths_at_kappa_minus_one() {
        for name in ["A2", "A3", "A5", "D4", "D5"] {
            let g = builtin(name).unwrap();
            let pf = perron_frobenius(&g, 1e-9).unwrap();
            let k = pf.kappa.unwrap();
            for a in 0..g.len() {
                for b in 0..g.len() {
                    let c = essential_basis(&g, &pf, a, b, k - 1, DEFAULT_RANK_TOL, DEFAULT_TOL);
                    assert_eq!(c.dim(), 0, "{name}");
                }
            }
        }
    }

    #[test]
    fn projector_examples() {
        let s = space("A2");
        let g = s.graph();
        let r = path(g, &["1", "2"]);
        assert_eq!(s.project(&r), r);
        assert!(s.project(&path(g, &["1", "2", "1"])).is_zero());
        let e6 = space("E6");
        let e = e6.basis_vector(4, 7);
        assert!((&e6.project(&e) - &e).norm() < 1e-12);
    }

    #[test]
    fn bullet_examples() {
        let s = space("A2");
        let g = s.graph();
        let r = path(g, &["1", "2"]);
        let l = path(g, &["2", "1"]);
        assert!(s.bullet(&r, &l).is_zero());
        assert!((&s.bullet(&s.unit(), &r) - &r).norm() < 1e-12);

        let (v, w) = s.bullet_with_warnings(&path(g, &["1", "2", "1"]), &r);
        assert!(v.is_zero());
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn e6_worked_product_norm() {
        // [2,1,0] • [0,1,2] projected on E(2 -4-> 2): its squared norm is the
        // sum of squared overlaps with the cell basis
        let s = space("E6");
        let g = s.graph();
        let x = path(g, &["2", "1", "0"]);
        let y = path(g, &["0", "1", "2"]);
        let prod = s.bullet(&x, &y);
        let cell = s.cell(2, 2, 4).unwrap();
        let cat = concat(&x, &y);
        let sum: f64 = (0..cell.dim()).map(|k| inner(&cell.vector(k), &cat).powi(2)).sum();
        assert!((prod.norm().powi(2) - sum).abs() < 1e-12);
        // known e_2(2 -4-> 2), up to normalisation
        let r3 = 3f64.sqrt();
        let e2 = PathVector::from_terms([
            (ElementaryPath::from_labels(g, &["2", "1", "0", "1", "2"]).unwrap(), (1.0 + r3).sqrt()),
            (ElementaryPath::from_labels(g, &["2", "1", "2", "1", "2"]).unwrap(), -1.0),
            (ElementaryPath::from_labels(g, &["2", "1", "2", "5", "2"]).unwrap(), 1.0),
            (ElementaryPath::from_labels(g, &["2", "3", "2", "1", "2"]).unwrap(), r3 / 2.0 * (r3 - 1.0).sqrt()),
            (ElementaryPath::from_labels(g, &["2", "3", "2", "5", "2"]).unwrap(), -r3 / 2.0 * (r3 - 1.0).sqrt()),
            (ElementaryPath::from_labels(g, &["2", "5", "2", "1", "2"]).unwrap(), (r3 - 1.0) / 2.0),
            (ElementaryPath::from_labels(g, &["2", "5", "2", "5", "2"]).unwrap(), -(r3 - 1.0) / 2.0),
            (ElementaryPath::from_labels(g, &["2", "5", "4", "5", "2"]).unwrap(), (r3 - 1.0).sqrt() / 2f64.sqrt()),
        ]);
        let e2 = e2.scale(1.0 / e2.norm());
        assert!(s.essential_residual(&e2) < 1e-9);
        let coeff = inner(&e2, &prod);
        assert!((coeff - (1.0 - 1.0 / r3).sqrt()).abs() < 1e-9, "{coeff}");
    }

    #[test]
    fn structure_constants_a2() {
        let s = space("A2");
        let m00 = s.structure_constants(0, 0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let expected = if i == j && j == k { 1.0 } else { 0.0 };
                    assert_eq!(m00.get(i, j, k), expected);
                }
            }
        }
        let m01 = s.structure_constants(0, 1);
        // a_1 • r = r, a_2 • r = 0 (r is index 0 of grade 1)
        assert_eq!(m01.get(0, 0, 0), 1.0);
        assert!(m01.product(1, 0).is_empty());
        assert!(s.structure_constants(1, 1).is_zero());
    }

    #[test]
    fn decomposition_examples() {
        let s = space("E6");
        let cell = s.cell(2, 2, 4).unwrap();
        for k in 0..cell.dim() {
            let e = cell.vector(k);
            let d = s.decompose(&e, 2).unwrap();
            assert!((d.norm_squared() - 1.0).abs() < 1e-9);
            assert!((&s.reconstruct(&d) - &e).norm() < 1e-8);
            let vs: std::collections::BTreeSet<_> =
                d.entries.iter().filter(|x| x.gamma.abs() > 1e-12).map(|x| x.v).collect();
            assert!(vs.iter().all(|v| [0, 2, 4].contains(v)));
        }
        let a2 = space("A2");
        let r = path(a2.graph(), &["1", "2"]);
        assert!(a2.decompose(&r, 1).is_err());
        let a3 = space("A3");
        assert!(a3.decompose(&path(a3.graph(), &["1", "2", "1"]), 1).is_err());
    }

    #[test]
    fn recursive_dims_match_kernel_dims() {
        for name in ["A1", "A2", "A3", "A6", "D4", "D5", "E6"] {
            let s = space(name);
            let rec = recursive_dims(
                s.graph(),
                s.perron(),
                s.max_length() + 1,
                DEFAULT_RANK_TOL,
                Parallelism::Sequential,
            );
            assert_eq!(rec, s.dims(), "{name}");
        }
    }

    #[test]
    fn cell_dims_equal_fused_entries() {
        for name in ["A4", "D4", "D6", "E6", "E7", "E8"] {
            let g = builtin(name).unwrap();
            let pf = perron_frobenius(&g, 1e-9).unwrap();
            let f = fused_matrices(&g, &pf).unwrap();
            let rec = recursive_cell_dims(&g, &pf, pf.kappa.unwrap(), DEFAULT_RANK_TOL, Parallelism::default());
            assert_eq!(rec.len(), f.mats.len(), "{name}");
            for (d, fm) in rec.iter().zip(&f.mats) {
                assert_eq!(d.map(|x| x as i64), *fm, "{name}");
            }
        }
    }

    #[test]
    fn a2_graph_round_trip_labels() {
        let g = build_ade(AdeFamily::A, 2).unwrap();
        assert_eq!(path(&g, &["1", "2"]).cell(), Some((0, 1, 1)));
    }
}
