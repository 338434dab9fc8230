//! Optional on-disk persistence of cell bases, as versioned JSON files named
//! by a hash of everything the bases depend on.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::essential::{length_bound, EssentialCellBasis, EssentialSpace, SpaceOptions};
use crate::graph::{Graph, PerronData};
use crate::path::ElementaryPath;

pub const CACHE_ENV: &str = "ESSPATH_CACHE_DIR";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    /// Computed and written.
    Stored,
}

#[derive(Serialize, Deserialize)]
struct CachedCell {
    a: usize,
    b: usize,
    l: usize,
    paths: Vec<Vec<usize>>,
    coords: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    key: String,
    max_length: usize,
    truncated: bool,
    cells: Vec<CachedCell>,
}

/// Hex digest over the graph, its Perron data and the numerical options.
pub fn cache_key(g: &Graph, perron: &PerronData, opts: &SpaceOptions) -> String {
    let mut h = Sha256::new();
    h.update(FORMAT_VERSION.to_le_bytes());
    h.update(g.name().as_bytes());
    for l in g.labels() {
        h.update((l.len() as u64).to_le_bytes());
        h.update(l.as_bytes());
    }
    for (a, b) in g.edges() {
        h.update((a as u64).to_le_bytes());
        h.update((b as u64).to_le_bytes());
    }
    for m in &perron.mu {
        h.update(m.to_bits().to_le_bytes());
    }
    h.update(opts.tol.to_bits().to_le_bytes());
    h.update(opts.rank_tol.to_bits().to_le_bytes());
    h.update(opts.max_length.map_or(u64::MAX, |m| m as u64).to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("cells-v{FORMAT_VERSION}-{key}.json"))
}

/// Cache directory from the environment, if set and nonempty.
pub fn dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn load(g: &Graph, path: &Path, key: &str) -> Option<(usize, bool, Vec<EssentialCellBasis>)> {
    let text = fs::read_to_string(path).ok()?;
    let file: CacheFile = serde_json::from_str(&text).ok()?;
    if file.version != FORMAT_VERSION || file.key != key {
        return None;
    }
    let mut cells = Vec::with_capacity(file.cells.len());
    for c in file.cells {
        let paths = c
            .paths
            .into_iter()
            .map(|p| ElementaryPath::new(g, p).ok())
            .collect::<Option<Vec<_>>>()?;
        if c.coords.iter().any(|r| r.len() != paths.len()) {
            return None;
        }
        let coords = DMatrix::from_fn(c.coords.len(), paths.len(), |i, j| c.coords[i][j]);
        cells.push(EssentialCellBasis::from_coords(c.a, c.b, c.l, paths, coords));
    }
    Some((file.max_length, file.truncated, cells))
}

fn store(space: &EssentialSpace, path: &Path, key: &str) -> Result<()> {
    let cells = space
        .cells()
        .map(|c| CachedCell {
            a: c.a,
            b: c.b,
            l: c.l,
            paths: c.paths.iter().map(|p| p.vertices().collect()).collect(),
            coords: (0..c.dim())
                .map(|i| c.coords.row(i).iter().copied().collect())
                .collect(),
        })
        .collect();
    let file = CacheFile {
        version: FORMAT_VERSION,
        key: key.to_string(),
        max_length: space.max_length(),
        truncated: space.is_truncated(),
        cells,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serde_json::to_vec(&file)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Builds the space, reading and writing `dir` when given. Unreadable or
/// mismatching cache files are ignored and overwritten.
pub fn load_or_build(
    graph: Graph,
    perron: PerronData,
    opts: SpaceOptions,
    dir: Option<&Path>,
) -> Result<(EssentialSpace, CacheStatus)> {
    let Some(dir) = dir else {
        return Ok((EssentialSpace::new(graph, perron, opts)?, CacheStatus::Disabled));
    };
    let (expected_max, _) = length_bound(&perron, opts.max_length)?;
    let key = cache_key(&graph, &perron, &opts);
    let path = cache_path(dir, &key);
    if let Some((max_length, truncated, cells)) = load(&graph, &path, &key) {
        let n = graph.len();
        if max_length == expected_max && cells.len() == (max_length + 1) * n * n {
            let space = EssentialSpace::assemble(graph, perron, opts, max_length, truncated, cells);
            return Ok((space, CacheStatus::Hit));
        }
    }
    let space = EssentialSpace::new(graph, perron, opts)?;
    store(&space, &path, &key)?;
    Ok((space, CacheStatus::Stored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin, perron_frobenius};

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = builtin("D5").unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        let opts = SpaceOptions::default();
        let (s1, st1) = load_or_build(g.clone(), pf.clone(), opts, Some(dir.path())).unwrap();
        assert_eq!(st1, CacheStatus::Stored);
        let (s2, st2) = load_or_build(g, pf, opts, Some(dir.path())).unwrap();
        assert_eq!(st2, CacheStatus::Hit);
        for (c1, c2) in s1.cells().zip(s2.cells()) {
            assert_eq!(c1.paths, c2.paths);
            assert_eq!(c1.coords, c2.coords);
        }
    }

    #[test]
    fn corrupt_file_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let g = builtin("A3").unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        let opts = SpaceOptions::default();
        let key = cache_key(&g, &pf, &opts);
        fs::write(cache_path(dir.path(), &key), "{not json").unwrap();
        let (_, st) = load_or_build(g, pf, opts, Some(dir.path())).unwrap();
        assert_eq!(st, CacheStatus::Stored);
    }

    #[test]
    fn key_depends_on_options() {
        let g = builtin("A3").unwrap();
        let pf = perron_frobenius(&g, 1e-9).unwrap();
        let a = SpaceOptions::default();
        let b = SpaceOptions { rank_tol: 1e-6, ..a };
        assert_ne!(cache_key(&g, &pf, &a), cache_key(&g, &pf, &b));
    }
}
