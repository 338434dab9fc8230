//! Input graphs, their Perron–Frobenius data and fused matrices.
//!
//! Vertices are addressed by their position in the vertex list; that index
//! order is the one every lexicographic path ordering downstream refers to.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};

/// A finite simple unoriented connected graph with labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    name: String,
    labels: Vec<String>,
    neighbors: Vec<Vec<usize>>,
    distinguished: usize,
}

/// On-disk graph description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinguished: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeFamily {
    A,
    D,
    E,
}

impl fmt::Display for AdeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AdeFamily::A => "A",
            AdeFamily::D => "D",
            AdeFamily::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for AdeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(AdeFamily::A),
            "D" | "d" => Ok(AdeFamily::D),
            "E" | "e" => Ok(AdeFamily::E),
            other => input_err(format!("unsupported diagram family '{other}'")),
        }
    }
}

impl Graph {
    /// Builds and validates a graph. When `distinguished` is `None` the vertex
    /// of minimal Perron–Frobenius component is chosen (ties: lowest index).
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        edges: &[(usize, usize)],
        distinguished: Option<usize>,
        allow_cycles: bool,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return input_err("graph has no vertices");
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if let Some(j) = seen.insert(l.as_str(), i) {
                return input_err(format!(
                    "duplicate vertex label '{l}' (positions {j} and {i})"
                ));
            }
        }
        let mut neighbors = vec![Vec::new(); n];
        let mut edge_set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return input_err(format!("edge ({a}, {b}) references a missing vertex"));
            }
            if a == b {
                return input_err(format!(
                    "self-loop at vertex '{}': adjacency must have zero diagonal",
                    labels[a]
                ));
            }
            if !edge_set.insert((a.min(b), a.max(b))) {
                return input_err(format!(
                    "duplicate edge '{}'-'{}': graph must be simple",
                    labels[a], labels[b]
                ));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let mut g = Graph {
            name: name.into(),
            labels,
            neighbors,
            distinguished: 0,
        };
        if !g.is_connected() {
            return input_err("graph is not connected");
        }
        if !allow_cycles && edge_set.len() + 1 != n {
            return input_err(format!(
                "graph is not a tree: {} edges for {} vertices (use allow-cycles to override)",
                edge_set.len(),
                n
            ));
        }
        match distinguished {
            Some(d) if d >= n => return input_err("distinguished vertex out of range"),
            Some(d) => g.distinguished = d,
            None => {
                let pf = power_iteration(&g, 1e-9)?;
                g.distinguished = argmin_first(&pf.1);
            }
        }
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Input(format!("unknown vertex '{label}' in graph {}", self.name)))
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.neighbors.iter().enumerate() {
            out.extend(nb.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn adjacency(&self) -> DMatrix<i64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| i64::from(self.adjacent(i, j)))
    }

    pub fn adjacency_f64(&self) -> DMatrix<f64> {
        self.adjacency().map(|x| x as f64)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            name: self.name.clone(),
            vertices: self.labels.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
            distinguished: Some(self.labels[self.distinguished].clone()),
        }
    }
}

/// Parses the JSON graph format and validates every graph invariant.
pub fn parse_graph(text: &str, allow_cycles: bool) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed graph JSON: {e}")))?;
    from_file(file, allow_cycles)
}

pub fn from_file(file: GraphFile, allow_cycles: bool) -> Result<Graph> {
    let lookup: HashMap<&str, usize> = file
        .vertices
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let find = |l: &str| {
        lookup
            .get(l)
            .copied()
            .ok_or_else(|| Error::Input(format!("edge references unknown vertex '{l}'")))
    };
    let mut edges = Vec::with_capacity(file.edges.len());
    for [a, b] in &file.edges {
        edges.push((find(a)?, find(b)?));
    }
    let distinguished = match &file.distinguished {
        Some(d) => Some(
            lookup
                .get(d.as_str())
                .copied()
                .ok_or_else(|| Error::Input(format!("distinguished vertex '{d}' is not a vertex")))?,
        ),
        None => None,
    };
    let g = Graph::new(file.name, file.vertices, &edges, distinguished, allow_cycles)?;
    if distinguished.is_some() {
        let (_, mu) = power_iteration(&g, 1e-9)?;
        let d = g.distinguished;
        if mu.iter().any(|&m| m < mu[d] * (1.0 - 1e-9)) {
            return input_err(format!(
                "distinguished vertex '{}' does not carry a minimal Perron-Frobenius component",
                g.label(d)
            ));
        }
    }
    Ok(g)
}

/// ADE Dynkin diagrams.
///
/// `A_n` uses labels `1..=n`; `D_n` and `E_n` use `0..n`. In every case the
/// first label is an end vertex of minimal Perron–Frobenius weight.
/// `E_6` is the chain `0-1-2-5-4` with `3` attached to `2`.
pub fn build_ade(family: AdeFamily, rank: usize) -> Result<Graph> {
    let (labels, edges): (Vec<String>, Vec<(usize, usize)>) = match (family, rank) {
        (AdeFamily::A, n) if n >= 1 => (
            (1..=n).map(|i| i.to_string()).collect(),
            (0..n - 1).map(|i| (i, i + 1)).collect(),
        ),
        (AdeFamily::D, n) if n >= 4 => {
            let mut e: Vec<_> = (0..n - 3).map(|i| (i, i + 1)).collect();
            // fork at n-3
            e.push((n - 3, n - 2));
            e.push((n - 3, n - 1));
            ((0..n).map(|i| i.to_string()).collect(), e)
        }
        (AdeFamily::E, 6) => (
            (0..6).map(|i| i.to_string()).collect(),
            vec![(0, 1), (1, 2), (2, 5), (5, 4), (2, 3)],
        ),
        (AdeFamily::E, 7) => (
            (0..7).map(|i| i.to_string()).collect(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (3, 6)],
        ),
        (AdeFamily::E, 8) => (
            (0..8).map(|i| i.to_string()).collect(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)],
        ),
        (f, r) => return input_err(format!("unsupported diagram {f}{r}")),
    };
    Graph::new(format!("{family}{rank}"), labels, &edges, Some(0), false)
}

/// Resolves a builtin name such as `A2`, `D5` or `E6`.
pub fn builtin(name: &str) -> Result<Graph> {
    let mut chars = name.chars();
    let family: AdeFamily = chars
        .next()
        .ok_or_else(|| Error::Input("empty graph name".into()))?
        .to_string()
        .parse()?;
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| Error::Input(format!("unknown builtin graph '{name}'")))?;
    let supported = match family {
        AdeFamily::A => (1..=12).contains(&rank),
        AdeFamily::D => (4..=8).contains(&rank),
        AdeFamily::E => (6..=8).contains(&rank),
    };
    if !supported {
        return input_err(format!(
            "unknown builtin graph '{name}' (builtins: A1..A12, D4..D8, E6, E7, E8)"
        ));
    }
    build_ade(family, rank)
}

/// Largest adjacency eigenvalue, its positive eigenvector and the Coxeter
/// number when the spectral radius is below 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub beta: f64,
    pub mu: Vec<f64>,
    pub kappa: Option<usize>,
}

impl PerronData {
    /// Same data with `mu` rescaled; downstream constructions only use ratios.
    pub fn scaled(&self, factor: f64) -> PerronData {
        PerronData {
            beta: self.beta,
            mu: self.mu.iter().map(|m| m * factor).collect(),
            kappa: self.kappa,
        }
    }

    pub fn residual(&self, g: &Graph) -> f64 {
        (0..g.len())
            .map(|a| {
                let s: f64 = g.neighbors(a).iter().map(|&b| self.mu[b]).sum();
                (s - self.beta * self.mu[a]).abs()
            })
            .fold(0.0, f64::max)
    }
}

const MAX_POWER_ITERATIONS: usize = 2_000_000;

/// Power iteration on `A + I` from the all-ones vector. The shift is needed
/// because trees are bipartite: `-beta` is also an eigenvalue of `A`.
fn power_iteration(g: &Graph, tol: f64) -> Result<(f64, Vec<f64>)> {
    let n = g.len();
    let stop = tol * 1e-2;
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut converged = n == 1;
    for _ in 0..MAX_POWER_ITERATIONS {
        if converged {
            break;
        }
        for a in 0..n {
            next[a] = x[a] + g.neighbors(a).iter().map(|&b| x[b]).sum::<f64>();
        }
        let norm = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut delta = 0.0f64;
        for a in 0..n {
            next[a] /= norm;
            delta = delta.max((next[a] - x[a]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        converged = delta <= stop;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "power iteration did not converge in {MAX_POWER_ITERATIONS} steps"
        )));
    }
    // Rayleigh quotient on A itself
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..n {
        let ax: f64 = g.neighbors(a).iter().map(|&b| x[b]).sum();
        num += x[a] * ax;
        den += x[a] * x[a];
    }
    Ok((num / den, x))
}

fn argmin_first(v: &[f64]) -> usize {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    // tie tolerance: components equal by symmetry differ only by rounding
    v.iter()
        .position(|&x| x <= min * (1.0 + 1e-9))
        .unwrap_or(0)
}

pub fn perron_frobenius(g: &Graph, tol: f64) -> Result<PerronData> {
    let (beta, x) = power_iteration(g, tol)?;
    let d = g.distinguished();
    let mu: Vec<f64> = x.iter().map(|v| v / x[d]).collect();
    let kappa = coxeter_number(beta, tol);
    let data = PerronData { beta, mu, kappa };
    let res = data.residual(g);
    if res > tol {
        return Err(Error::Numeric(format!(
            "Perron-Frobenius residual {res:e} exceeds tolerance {tol:e}"
        )));
    }
    Ok(data)
}

/// `kappa` with `beta = 2 cos(pi / kappa)`, if one exists within `tol`.
pub fn coxeter_number(beta: f64, tol: f64) -> Option<usize> {
    // within tol of 2 the rounding below is meaningless
    if !(beta < 2.0 - tol) {
        return None;
    }
    let k = (PI / (beta / 2.0).clamp(-1.0, 1.0).acos()).round();
    if !k.is_finite() || k < 2.0 {
        return None;
    }
    let k = k as usize;
    ((beta - 2.0 * (PI / k as f64).cos()).abs() <= tol).then_some(k)
}

/// `F_0 = I`, `F_1 = A`, `F_{p+1} = A F_p - F_{p-1}`, up to the last nonzero one.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedMatrices {
    pub mats: Vec<DMatrix<i64>>,
}

impl FusedMatrices {
    pub fn sums(&self) -> Vec<i64> {
        self.mats.iter().map(|m| m.sum()).collect()
    }
}

pub fn fused_matrices(g: &Graph, perron: &PerronData) -> Result<FusedMatrices> {
    let kappa = perron.kappa.ok_or_else(|| {
        Error::Unsupported(format!(
            "{} has spectral radius {} >= 2; fused matrices need a Coxeter number",
            g.name(),
            perron.beta
        ))
    })?;
    let n = g.len();
    let a = g.adjacency();
    let mut mats = vec![DMatrix::<i64>::identity(n, n)];
    let mut prev = DMatrix::<i64>::zeros(n, n);
    loop {
        let cur = mats.last().unwrap().clone();
        let next = if mats.len() == 1 { a.clone() } else { &a * &cur - &prev };
        if next.iter().all(|&x| x == 0) {
            break;
        }
        if next.iter().any(|&x| x < 0) {
            return Err(Error::Numeric(format!(
                "fused matrix F_{} has a negative entry",
                mats.len()
            )));
        }
        if mats.len() >= kappa {
            return Err(Error::Numeric(format!(
                "fused matrices did not vanish by index {kappa}"
            )));
        }
        prev = cur;
        mats.push(next);
    }
    Ok(FusedMatrices { mats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_is_an_edge() {
        let g = build_ade(AdeFamily::A, 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(g.labels(), &["1", "2"]);
    }

    #[test]
    fn e6_matches_figure() {
        let g = build_ade(AdeFamily::E, 6).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.edges().len(), 5);
        let three = g.index_of("3").unwrap();
        let two = g.index_of("2").unwrap();
        assert_eq!(g.neighbors(three), &[two]);
    }

    #[test]
    fn a3_is_a_path() {
        let g = build_ade(AdeFamily::A, 3).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn unsupported_ranks_fail() {
        assert!(build_ade(AdeFamily::E, 9).is_err());
        assert!(build_ade(AdeFamily::D, 3).is_err());
        assert!(build_ade(AdeFamily::A, 0).is_err());
        assert!(builtin("F4").is_err());
        assert!(builtin("A13").is_err());
    }

    #[test]
    fn builtin_distinguished_is_minimal() {
        for name in ["A1", "A2", "A5", "D4", "D5", "D8", "E6", "E7", "E8"] {
            let g = builtin(name).unwrap();
            let pf = perron_frobenius(&g, 1e-9).unwrap();
            assert_eq!(g.distinguished(), 0, "{name}");
            let min = pf.mu.iter().copied().fold(f64::INFINITY, f64::min);
            assert!((pf.mu[0] - 1.0).abs() < 1e-12);
            assert!(min > 1.0 - 1e-9, "{name}: {:?}", pf.mu);
        }
    }

    #[test]
    fn parse_rejects_bad_inputs() {
        let dup = r#"{"name":"x","vertices":["1","2"],"edges":[["1","2"],["2","1"]]}"#;
        let err = parse_graph(dup, false).unwrap_err().to_string();
        assert!(err.contains("duplicate edge"), "{err}");

        let disc = r#"{"name":"x","vertices":["1","2","3"],"edges":[["1","2"]]}"#;
        assert!(parse_graph(disc, false).unwrap_err().to_string().contains("not connected"));

        let cyc = r#"{"name":"c","vertices":["1","2","3"],"edges":[["1","2"],["2","3"],["3","1"]]}"#;
        assert!(parse_graph(cyc, false).unwrap_err().to_string().contains("not a tree"));
        assert!(parse_graph(cyc, true).is_ok());

        let labels = r#"{"name":"x","vertices":["1","1"],"edges":[["1","1"]]}"#;
        assert!(parse_graph(labels, false).unwrap_err().to_string().contains("duplicate vertex"));

        assert!(parse_graph("{not json", false).is_err());

        let not_min = r#"{"name":"x","vertices":["1","2","3"],"edges":[["1","2"],["2","3"]],"distinguished":"2"}"#;
        assert!(parse_graph(not_min, false).unwrap_err().to_string().contains("minimal"));
    }

    #[test]
    fn parse_picks_minimal_vertex() {
        let text = r#"{"name":"A3","vertices":["m","e","f"],"edges":[["m","e"],["m","f"]]}"#;
        let g = parse_graph(text, false).unwrap();
        assert_eq!(g.label(g.distinguished()), "e");
    }

    #[test]
    fn a2_perron() {
        let g = build_ade(AdeFamily::A, 2).unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        assert!((pf.beta - 1.0).abs() < 1e-12);
        assert!((pf.mu[1] - 1.0).abs() < 1e-12);
        assert_eq!(pf.kappa, Some(3));
    }

    #[test]
    fn e6_perron() {
        let g = build_ade(AdeFamily::E, 6).unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        let ratio = pf.mu[3] / pf.mu[1];
        assert!((ratio - (3f64.sqrt() - 1.0)).abs() < 1e-9);
        assert!((pf.beta * pf.beta - (2.0 + 3f64.sqrt())).abs() < 1e-9);
        assert_eq!(pf.kappa, Some(12));
    }

    #[test]
    fn residual_small_for_all_builtins() {
        for name in ["A1", "A2", "A3", "A6", "A12", "D4", "D6", "D8", "E6", "E7", "E8"] {
            let g = builtin(name).unwrap();
            let pf = perron_frobenius(&g, 1e-9).unwrap();
            assert!(pf.residual(&g) <= 1e-9, "{name}");
            let kappa = pf.kappa.unwrap();
            assert!((pf.beta - 2.0 * (PI / kappa as f64).cos()).abs() <= 1e-9);
        }
    }

    #[test]
    fn affine_graph_has_no_kappa() {
        // affine D4: star with four leaves, beta = 2
        let text = r#"{"name":"D4aff","vertices":["c","1","2","3","4"],"edges":[["c","1"],["c","2"],["c","3"],["c","4"]]}"#;
        let g = parse_graph(text, false).unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        assert!((pf.beta - 2.0).abs() < 1e-9);
        assert_eq!(pf.kappa, None);
        assert!(matches!(fused_matrices(&g, &pf), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fused_small_cases() {
        let a3 = build_ade(AdeFamily::A, 3).unwrap();
        let f = fused_matrices(&a3, &perron_frobenius(&a3, 1e-9).unwrap()).unwrap();
        assert_eq!(f.sums(), vec![3, 4, 3]);
        let a = a3.adjacency();
        let f3 = &a * &a * &a - &a * 2;
        assert!(f3.iter().all(|&x| x == 0));

        let a2 = build_ade(AdeFamily::A, 2).unwrap();
        let f = fused_matrices(&a2, &perron_frobenius(&a2, 1e-9).unwrap()).unwrap();
        assert_eq!(f.sums(), vec![2, 2]);
    }

    #[test]
    fn fused_e6() {
        let g = build_ade(AdeFamily::E, 6).unwrap();
        let f = fused_matrices(&g, &perron_frobenius(&g, 1e-9).unwrap()).unwrap();
        assert_eq!(f.sums(), vec![6, 10, 14, 18, 20, 20, 20, 18, 14, 10, 6]);
        let a = g.adjacency();
        for p in 1..f.mats.len() - 1 {
            assert_eq!(&a * &f.mats[p], &f.mats[p + 1] + &f.mats[p - 1]);
        }
    }
}
