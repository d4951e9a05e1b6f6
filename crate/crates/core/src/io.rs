//! File formats, dataset loaders, the synthetic block-model generator and
//! the flat `key = value` run configuration.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::LabeledDataset;
use crate::graph::VertexId;
use crate::update::TimingRecord;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Dense-id to original-id mapping produced by [`load_edgelist`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    originals: Vec<String>,
    lookup: HashMap<String, VertexId>,
    numeric: bool,
}

impl IdMap {
    fn canonical(&self, raw: &str) -> String {
        if self.numeric {
            if let Ok(v) = raw.parse::<i64>() {
                return v.to_string();
            }
        }
        raw.to_string()
    }

    pub fn get(&self, raw: &str) -> Option<VertexId> {
        self.lookup.get(&self.canonical(raw)).copied()
    }

    pub fn original(&self, v: VertexId) -> &str {
        &self.originals[v.0]
    }

    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    /// True when all ids were integers and arrival order is numeric order.
    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    /// Identity map over `0..n`.
    pub fn identity(n: usize) -> Self {
        let originals: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let lookup = originals
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), VertexId(i)))
            .collect();
        IdMap {
            originals,
            lookup,
            numeric: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedEdges {
    pub vertex_count: usize,
    /// Unique undirected edges in first-appearance order.
    pub edges: Vec<(VertexId, VertexId)>,
    pub ids: IdMap,
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Reads a whitespace-separated `u v` edge list. `#` starts a comment.
///
/// When every id is an integer, dense ids follow ascending numeric order;
/// otherwise they follow first appearance.
pub fn load_edgelist(path: &Path) -> Result<LoadedEdges> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut raw = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected two vertex ids, found {} fields", tokens.len()),
            });
        }
        raw.push((tokens[0].to_string(), tokens[1].to_string()));
    }
    if raw.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }

    let numeric = raw
        .iter()
        .all(|(a, b)| a.parse::<i64>().is_ok() && b.parse::<i64>().is_ok());
    let originals: Vec<String> = if numeric {
        let mut ids: Vec<i64> = raw
            .iter()
            .flat_map(|(a, b)| [a.parse::<i64>().unwrap(), b.parse::<i64>().unwrap()])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|v| v.to_string()).collect()
    } else {
        log::warn!(
            "{}: non-integer vertex ids; arrival order follows first appearance",
            path.display()
        );
        let mut seen = HashSet::new();
        raw.iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .filter(|s| seen.insert(s.clone()))
            .collect()
    };
    let ids = IdMap {
        lookup: originals
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), VertexId(i)))
            .collect(),
        originals,
        numeric,
    };

    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut duplicates = 0;
    let mut self_loops = 0;
    for (a, b) in &raw {
        let u = ids.get(a).expect("every id was registered");
        let v = ids.get(b).expect("every id was registered");
        if u == v {
            self_loops += 1;
            continue;
        }
        if seen.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        } else {
            duplicates += 1;
        }
    }
    if self_loops > 0 {
        log::warn!("{}: dropped {self_loops} self-loops", path.display());
    }
    Ok(LoadedEdges {
        vertex_count: ids.len(),
        edges,
        ids,
        duplicates,
        self_loops,
    })
}

/// Reads `vertex label` lines. Class ids follow first appearance of each
/// label string; every vertex of `ids` must be labeled.
pub fn load_labels(path: &Path, ids: &IdMap) -> Result<LabeledDataset> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut labels: Vec<Option<usize>> = vec![None; ids.len()];
    let mut classes: HashMap<String, usize> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected `vertex label`, found {} fields", tokens.len()),
            });
        }
        let v = ids
            .get(tokens[0])
            .ok_or_else(|| Error::UnknownVertex(tokens[0].to_string()))?;
        let next = classes.len();
        let class = *classes.entry(tokens[1].to_string()).or_insert(next);
        labels[v.0] = Some(class);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::MissingLabel(ids.original(VertexId(i)).to_string())))
        .collect::<Result<Vec<_>>>()?;
    let class_count = classes.len();
    if class_count < 2 {
        return Err(Error::SingleClass);
    }
    Ok(LabeledDataset {
        labels,
        class_count,
    })
}

/// Planted-partition block model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
    /// Assign blocks to a random permutation of vertex ids, so that arrival
    /// order carries no community information. Otherwise blocks are
    /// contiguous id ranges.
    pub shuffle_ids: bool,
}

impl SbmSpec {
    /// Four equal blocks with expected degree `avg_degree`, a fraction
    /// `intra_share` of it inside the block.
    pub fn with_average_degree(n: usize, avg_degree: f64, intra_share: f64, seed: u64) -> Self {
        let blocks = 4;
        let size = n / blocks;
        let mut block_sizes = vec![size; blocks];
        block_sizes[0] += n - size * blocks;
        let p_in = (avg_degree * intra_share / (size as f64 - 1.0)).min(1.0);
        let p_out = (avg_degree * (1.0 - intra_share) / (n - size) as f64).min(1.0);
        SbmSpec {
            block_sizes,
            p_in,
            p_out,
            seed,
            shuffle_ids: true,
        }
    }
}

/// Indices `< total` selected independently with probability `p`, by
/// geometric skipping.
fn bernoulli_indices(total: u64, p: f64, rng: &mut ChaCha8Rng, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut i: i64 = -1;
    loop {
        let r: f64 = rng.random::<f64>();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        i += skip + 1;
        if i as u64 >= total {
            return;
        }
        emit(i as u64);
    }
}

/// Samples a block-model graph; returns `(u < v)` edges in ascending order
/// and the block label of every vertex.
pub fn generate_sbm(spec: &SbmSpec) -> Result<(Vec<(VertexId, VertexId)>, Vec<usize>)> {
    for p in [spec.p_in, spec.p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let n: usize = spec.block_sizes.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    if spec.shuffle_ids {
        order.shuffle(&mut rng);
    }
    let mut members = Vec::with_capacity(spec.block_sizes.len());
    let mut labels = vec![0; n];
    let mut start = 0;
    for (b, &size) in spec.block_sizes.iter().enumerate() {
        let block: Vec<usize> = order[start..start + size].to_vec();
        for &v in &block {
            labels[v] = b;
        }
        members.push(block);
        start += size;
    }

    let mut edges = Vec::new();
    for a in 0..members.len() {
        let block = &members[a];
        let m = block.len() as u64;
        // pairs i < j within the block, linearized row by row
        bernoulli_indices(m * m.saturating_sub(1) / 2, spec.p_in, &mut rng, |idx| {
            let (i, j) = unrank_pair(idx, m);
            edges.push((block[i as usize], block[j as usize]));
        });
        for other in &members[a + 1..] {
            let w = other.len() as u64;
            bernoulli_indices(m * w, spec.p_out, &mut rng, |idx| {
                edges.push((block[(idx / w) as usize], other[(idx % w) as usize]));
            });
        }
    }
    let mut edges: Vec<(VertexId, VertexId)> = edges
        .into_iter()
        .map(|(u, v)| (VertexId(u.min(v)), VertexId(u.max(v))))
        .collect();
    edges.sort_unstable();
    Ok((edges, labels))
}

/// Maps a linear index over `{(i, j) : i < j < m}` back to the pair.
fn unrank_pair(idx: u64, m: u64) -> (u64, u64) {
    // row i holds m - 1 - i pairs
    let mut i = 0;
    let mut rest = idx;
    let mut row = m - 1;
    // closed-form start, then correct for rounding
    let total = m * (m - 1) / 2;
    let remaining = total - idx;
    let r = ((((8 * remaining) as f64 + 1.0).sqrt() - 1.0) / 2.0).ceil() as u64;
    if r >= 1 && r < m {
        i = m - 1 - r;
        rest = idx - (i * (2 * m - i - 1) / 2);
        row = m - 1 - i;
    }
    while rest >= row {
        rest -= row;
        i += 1;
        row -= 1;
    }
    (i, i + 1 + rest)
}

/// Writes `vertex_id,f_1,...,f_k` rows.
pub fn write_embedding_csv<W: Write>(
    mut out: W,
    f: &EmbeddingMatrix,
    ids: impl Fn(usize) -> String,
) -> Result<()> {
    let mut header = String::from("vertex_id");
    for j in 0..f.dim() {
        write!(header, ",f{j}").expect("writing to a String");
    }
    writeln!(out, "{header}")?;
    for (i, row) in f.iter_rows().enumerate().take(f.rows()) {
        let mut line = ids(i);
        for &x in row {
            line.push(',');
            line.push_str(&format_f64(x));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a file written by [`write_embedding_csv`]; returns ids and matrix.
pub fn read_embedding_csv(path: &Path) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::EmptyFile(path.to_path_buf()))?;
    let k = header.split(',').count() - 1;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let mut fields = line.split(',');
        ids.push(fields.next().unwrap_or_default().to_string());
        let row = fields
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    Ok((ids, EmbeddingMatrix::from_rows(k, &rows)?))
}

pub fn write_timings_csv<W: Write>(mut out: W, timings: &[TimingRecord]) -> Result<()> {
    writeln!(out, "step,vertex,influence_ns,update_ns,influenced_size")?;
    for t in timings {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.step,
            t.vertex.index(),
            t.influence_ns,
            t.update_ns,
            t.influenced_size
        )?;
    }
    Ok(())
}

/// Writes edges as `u<TAB>v` lines and labels as `v<TAB>label` lines.
pub fn write_edgelist<W: Write>(mut out: W, edges: &[(VertexId, VertexId)]) -> Result<()> {
    for (u, v) in edges {
        writeln!(out, "{}\t{}", u.index(), v.index())?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(mut out: W, labels: &[usize]) -> Result<()> {
    for (v, l) in labels.iter().enumerate() {
        writeln!(out, "{v}\t{l}")?;
    }
    Ok(())
}

/// Settings shared by every command. Mirrors the `key = value` config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    pub depth: usize,
    pub p: f64,
    pub seed: u64,
    pub eigen_threshold: usize,
    pub reorth_interval: usize,
    pub l2: f64,
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 90,
            depth: 1,
            p: 0.2,
            seed: 0,
            eigen_threshold: 512,
            reorth_interval: 0,
            l2: 1.0,
            edges: None,
            labels: None,
            out: PathBuf::from("."),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for key `{key}`")))
}

impl RunConfig {
    /// Sets one key; used for both config files and command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('-', "_").as_str() {
            "k" => self.k = parse_value(key, value)?,
            "depth" => self.depth = parse_value(key, value)?,
            "p" => self.p = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "eigen_threshold" => self.eigen_threshold = parse_value(key, value)?,
            "reorth_interval" => self.reorth_interval = parse_value(key, value)?,
            "l2" => self.l2 = parse_value(key, value)?,
            "edges" => self.edges = Some(PathBuf::from(value)),
            "labels" => self.labels = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Config(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if !(self.l2 > 0.0) {
            return Err(Error::Config(format!("l2 must be positive, got {}", self.l2)));
        }
        Ok(())
    }

    /// Serializes to the config-file grammar; `parse` reads it back exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "k = {}", self.k).unwrap();
        writeln!(s, "depth = {}", self.depth).unwrap();
        writeln!(s, "p = {:?}", self.p).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "eigen_threshold = {}", self.eigen_threshold).unwrap();
        writeln!(s, "reorth_interval = {}", self.reorth_interval).unwrap();
        writeln!(s, "l2 = {:?}", self.l2).unwrap();
        if let Some(e) = &self.edges {
            writeln!(s, "edges = {}", e.display()).unwrap();
        }
        if let Some(l) = &self.labels {
            writeln!(s, "labels = {}", l.display()).unwrap();
        }
        writeln!(s, "out = {}", self.out.display()).unwrap();
        s
    }
}
