//! Elementary paths, the concatenation algebra on their formal linear
//! combinations, the backtrack-removal operators `C_k`, and the group-like
//! coalgebra structure.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{input_err, Result};
use crate::graph::{Graph, PerronData};

/// Coefficients at or below this magnitude are dropped from canonical forms.
pub const DROP_TOL: f64 = 1e-14;

/// Vertex-index sequence `[a_0, ..., a_L]`. The derived order is the
/// lexicographic one used for every basis in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryPath(Vec<u32>);

impl ElementaryPath {
    /// Checks that consecutive vertices are adjacent.
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return input_err("a path needs at least one vertex");
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= g.len()) {
            return input_err(format!("vertex index {v} out of range"));
        }
        for w in vertices.windows(2) {
            if !g.adjacent(w[0], w[1]) {
                return input_err(format!(
                    "'{}' and '{}' are not neighbors",
                    g.label(w[0]),
                    g.label(w[1])
                ));
            }
        }
        Ok(Self::from_unchecked(vertices))
    }

    pub fn from_labels(g: &Graph, labels: &[&str]) -> Result<Self> {
        let v = labels
            .iter()
            .map(|l| g.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, v)
    }

    pub(crate) fn from_unchecked(vertices: Vec<usize>) -> Self {
        ElementaryPath(vertices.into_iter().map(|v| v as u32).collect())
    }

    pub fn trivial(v: usize) -> Self {
        ElementaryPath(vec![v as u32])
    }

    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 1
    }

    pub fn start(&self) -> usize {
        self.0[0] as usize
    }

    pub fn end(&self) -> usize {
        *self.0.last().unwrap() as usize
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&v| v as usize)
    }

    /// Spliced path when `self` ends where `other` starts.
    pub fn concat(&self, other: &ElementaryPath) -> Option<ElementaryPath> {
        (self.end() == other.start()).then(|| {
            let mut v = Vec::with_capacity(self.0.len() + other.0.len() - 1);
            v.extend_from_slice(&self.0);
            v.extend_from_slice(&other.0[1..]);
            ElementaryPath(v)
        })
    }

    pub fn reversed(&self) -> ElementaryPath {
        ElementaryPath(self.0.iter().rev().copied().collect())
    }

    /// Splits after `l` steps into (prefix, suffix), sharing the middle vertex.
    pub fn split_at(&self, l: usize) -> (ElementaryPath, ElementaryPath) {
        (
            ElementaryPath(self.0[..=l].to_vec()),
            ElementaryPath(self.0[l..].to_vec()),
        )
    }

    pub fn labels<'g>(&self, g: &'g Graph) -> Vec<&'g str> {
        self.vertices().map(|v| g.label(v)).collect()
    }
}

impl fmt::Display for ElementaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// All paths from `a` to `b` of length `l`, in lexicographic order.
pub fn enumerate_paths(g: &Graph, a: usize, b: usize, l: usize) -> Vec<ElementaryPath> {
    let dist = distances_from(g, b);
    let mut out = Vec::new();
    let mut stack = vec![a];
    extend_paths(g, &dist, b, l, &mut stack, &mut out);
    out
}

fn distances_from(g: &Graph, b: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    dist[b] = 0;
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn extend_paths(
    g: &Graph,
    dist: &[usize],
    b: usize,
    remaining: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<ElementaryPath>,
) {
    let v = *stack.last().unwrap();
    if dist[v] > remaining {
        return;
    }
    if remaining == 0 {
        if v == b {
            out.push(ElementaryPath::from_unchecked(stack.clone()));
        }
        return;
    }
    for &w in g.neighbors(v) {
        stack.push(w);
        extend_paths(g, dist, b, remaining - 1, stack, out);
        stack.pop();
    }
}

/// Finite formal linear combination of elementary paths.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathVector {
    terms: BTreeMap<ElementaryPath, f64>,
}

impl PathVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_path(p: ElementaryPath) -> Self {
        Self::from_terms([(p, 1.0)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ElementaryPath, f64)>) -> Self {
        let mut v = PathVector::zero();
        for (p, c) in terms {
            v.add_term(p, c);
        }
        v.prune();
        v
    }

    /// Accumulates without pruning; call [`PathVector::prune`] afterwards.
    pub(crate) fn add_term(&mut self, p: ElementaryPath, c: f64) {
        *self.terms.entry(p).or_insert(0.0) += c;
    }

    pub(crate) fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > DROP_TOL);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ElementaryPath, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn coeff(&self, p: &ElementaryPath) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, s: f64) -> PathVector {
        PathVector::from_terms(self.terms().map(|(p, c)| (p.clone(), c * s)))
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `(start, end, length)` when every term shares them.
    pub fn cell(&self) -> Option<(usize, usize, usize)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let key = (first.start(), first.end(), first.len());
        it.all(|p| (p.start(), p.end(), p.len()) == key).then_some(key)
    }

    /// Splits into components of fixed `(start, end, length)`.
    pub fn by_cell(&self) -> BTreeMap<(usize, usize, usize), PathVector> {
        let mut out: BTreeMap<_, PathVector> = BTreeMap::new();
        for (p, c) in self.terms() {
            out.entry((p.start(), p.end(), p.len()))
                .or_default()
                .terms
                .insert(p.clone(), c);
        }
        out
    }

    pub fn reverse_star(&self) -> PathVector {
        // conjugation is the identity on real coefficients
        PathVector::from_terms(self.terms().map(|(p, c)| (p.reversed(), c)))
    }
}

impl Add for &PathVector {
    type Output = PathVector;
    fn add(self, rhs: &PathVector) -> PathVector {
        let mut out = self.clone();
        for (p, c) in rhs.terms() {
            out.add_term(p.clone(), c);
        }
        out.prune();
        out
    }
}

impl Sub for &PathVector {
    type Output = PathVector;
    fn sub(self, rhs: &PathVector) -> PathVector {
        self + &(-rhs)
    }
}

impl Neg for &PathVector {
    type Output = PathVector;
    fn neg(self) -> PathVector {
        self.scale(-1.0)
    }
}

/// Concatenation product.
impl Mul for &PathVector {
    type Output = PathVector;
    fn mul(self, rhs: &PathVector) -> PathVector {
        concat(self, rhs)
    }
}

pub fn concat(p: &PathVector, q: &PathVector) -> PathVector {
    let mut out = PathVector::zero();
    for (x, c) in p.terms() {
        for (y, d) in q.terms() {
            if let Some(z) = x.concat(y) {
                out.add_term(z, c * d);
            }
        }
    }
    out.prune();
    out
}

/// Scalar product making elementary paths orthonormal.
pub fn inner(p: &PathVector, q: &PathVector) -> f64 {
    let (small, large) = if p.num_terms() <= q.num_terms() { (p, q) } else { (q, p) };
    small.terms().map(|(x, c)| c * large.coeff(x)).sum()
}

/// `C_k` on one elementary path: removes the backtrack at position `k`.
pub fn annihilate_path(
    perron: &PerronData,
    k: usize,
    p: &ElementaryPath,
) -> Option<(ElementaryPath, f64)> {
    if k == 0 || p.len() <= k {
        return None;
    }
    let v = &p.0;
    if v[k - 1] != v[k + 1] {
        return None;
    }
    let weight = (perron.mu[v[k] as usize] / perron.mu[v[k - 1] as usize]).sqrt();
    let mut out = Vec::with_capacity(v.len() - 2);
    out.extend_from_slice(&v[..k]);
    out.extend_from_slice(&v[k + 2..]);
    Some((ElementaryPath(out), weight))
}

pub fn annihilate(perron: &PerronData, k: usize, p: &PathVector) -> PathVector {
    let mut out = PathVector::zero();
    for (x, c) in p.terms() {
        if let Some((y, w)) = annihilate_path(perron, k, x) {
            out.add_term(y, c * w);
        }
    }
    out.prune();
    out
}

/// Sum of all zero-length paths.
pub fn unit(g: &Graph) -> PathVector {
    PathVector::from_terms((0..g.len()).map(|v| (ElementaryPath::trivial(v), 1.0)))
}

pub fn reverse_star(p: &PathVector) -> PathVector {
    p.reverse_star()
}

/// Element of `Paths ⊗ Paths`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorPathVector {
    terms: BTreeMap<(ElementaryPath, ElementaryPath), f64>,
}

impl TensorPathVector {
    pub fn from_terms(
        terms: impl IntoIterator<Item = ((ElementaryPath, ElementaryPath), f64)>,
    ) -> Self {
        let mut t = BTreeMap::new();
        for (k, c) in terms {
            *t.entry(k).or_insert(0.0) += c;
        }
        t.retain(|_, c: &mut f64| c.abs() > DROP_TOL);
        TensorPathVector { terms: t }
    }

    pub fn tensor(p: &PathVector, q: &PathVector) -> Self {
        Self::from_terms(
            p.terms()
                .flat_map(|(x, c)| q.terms().map(move |(y, d)| ((x.clone(), y.clone()), c * d))),
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(ElementaryPath, ElementaryPath), f64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Componentwise concatenation.
    pub fn mul(&self, other: &TensorPathVector) -> TensorPathVector {
        let mut out = Vec::new();
        for ((x1, x2), c) in self.terms() {
            for ((y1, y2), d) in other.terms() {
                if let (Some(z1), Some(z2)) = (x1.concat(y1), x2.concat(y2)) {
                    out.push(((z1, z2), c * d));
                }
            }
        }
        Self::from_terms(out)
    }

    pub fn sub(&self, other: &TensorPathVector) -> TensorPathVector {
        Self::from_terms(
            self.terms()
                .map(|(k, c)| (k.clone(), c))
                .chain(other.terms().map(|(k, c)| (k.clone(), -c))),
        )
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `(id ⊗ φ)` for a linear functional `φ` on elementary paths.
    pub fn contract_right(&self, f: impl Fn(&ElementaryPath) -> f64) -> PathVector {
        PathVector::from_terms(self.terms().map(|((x, y), c)| (x.clone(), c * f(y))))
    }

    pub fn contract_left(&self, f: impl Fn(&ElementaryPath) -> f64) -> PathVector {
        PathVector::from_terms(self.terms().map(|((x, y), c)| (y.clone(), c * f(x))))
    }
}

/// `Δp = p ⊗ p` on elementary paths, extended linearly.
pub fn grouplike_coproduct(p: &PathVector) -> TensorPathVector {
    TensorPathVector::from_terms(p.terms().map(|(x, c)| ((x.clone(), x.clone()), c)))
}

/// `ε(p) = 1` on elementary paths, extended linearly.
pub fn grouplike_counit(p: &PathVector) -> f64 {
    p.terms().map(|(_, c)| c).sum()
}
