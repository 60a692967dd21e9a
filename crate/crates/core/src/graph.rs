//! Finite loopless multigraphs, pair orientations, and the weighted
//! (skew-symmetric / bi-) adjacency matrices built from them.
//!
//! Parallel edges between the same vertex pair share one formal variable,
//! and orientations are defined on vertex pairs rather than on individual
//! edges, so oriented 2-cycles cannot arise. Matrix row/column order is an
//! explicit argument everywhere: the matrices are only defined up to a
//! relabeling of the vertex set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::poly::{Polynomial, VarId};

/// Normalizes an unordered vertex pair.
pub fn pair(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    Loop(usize),
    VertexOutOfRange(usize),
    /// An edge-supported pair has no direction in the orientation.
    MissingDirection(usize, usize),
    /// An edge does not cross the given bipartition classes.
    NotBipartite(usize, usize),
    UnbalancedClasses,
    /// A vertex appears in neither (or both) bipartition classes.
    BadBipartition(usize),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Loop(v) => write!(f, "loop at vertex {v} is not allowed"),
            GraphError::VertexOutOfRange(v) => write!(f, "vertex {v} out of range"),
            GraphError::MissingDirection(a, b) => {
                write!(f, "edge pair {{{a},{b}}} has no orientation")
            }
            GraphError::NotBipartite(a, b) => {
                write!(f, "edge {{{a},{b}}} does not cross the bipartition")
            }
            GraphError::UnbalancedClasses => write!(f, "bipartition classes differ in size"),
            GraphError::BadBipartition(v) => {
                write!(f, "vertex {v} is not in exactly one bipartition class")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Finite loopless multigraph with formal edge variables.
///
/// Edges are stored as an explicit list (parallel edges repeat); all
/// parallel edges between a pair share the single variable attached to
/// that pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    vars: BTreeMap<(usize, usize), VarId>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            vars: BTreeMap::new(),
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::Loop(a));
        }
        if a >= self.n || b >= self.n {
            return Err(GraphError::VertexOutOfRange(a.max(b)));
        }
        self.edges.push(pair(a, b));
        Ok(())
    }

    /// Attaches the formal variable for a pair; shared by parallel edges.
    pub fn set_var(&mut self, a: usize, b: usize, v: VarId) {
        self.vars.insert(pair(a, b), v);
    }

    pub fn var(&self, a: usize, b: usize) -> Option<VarId> {
        self.vars.get(&pair(a, b)).copied()
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of parallel edges between `a` and `b`.
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        let p = pair(a, b);
        self.edges.iter().filter(|&&e| e == p).count()
    }

    /// Edge set of the simple support `s(G)`, sorted.
    pub fn simple_pairs(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self.edges.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Neighbors of `v` in the simple support, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: BTreeSet<usize> = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.insert(b);
            } else if b == v {
                out.insert(a);
            }
        }
        out.into_iter().collect()
    }

    /// The polynomial entry `m(a,b) * z_e` for a pair, zero if no edge.
    fn entry(&self, a: usize, b: usize) -> Polynomial {
        let m = self.multiplicity(a, b);
        if m == 0 {
            return Polynomial::zero();
        }
        let var = self
            .var(a, b)
            .expect("every edge-supported pair must carry a variable");
        Polynomial::from_monomial(crate::poly::Monomial::var(var), BigInt::from(m))
    }

    /// Graph with the listed vertices removed (vertices are renumbered by
    /// their rank among the survivors); edge variables follow along.
    pub fn without_vertices(&self, removed: &BTreeSet<usize>) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|v| !removed.contains(v)).collect();
        let rank: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = Graph::new(keep.len());
        for &(a, b) in &self.edges {
            if let (Some(&ra), Some(&rb)) = (rank.get(&a), rank.get(&b)) {
                g.edges.push(pair(ra, rb));
                if let Some(&v) = self.vars.get(&pair(a, b)) {
                    g.vars.insert(pair(ra, rb), v);
                }
            }
        }
        g
    }
}

/// A direction for every edge-supported vertex pair: `(tail, head)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Orientation {
    dir: BTreeMap<(usize, usize), (usize, usize)>,
}

impl Orientation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn orient(&mut self, tail: usize, head: usize) {
        self.dir.insert(pair(tail, head), (tail, head));
    }

    pub fn direction(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        self.dir.get(&pair(a, b)).copied()
    }

    /// `+1` if directed `a -> b`, `-1` if `b -> a`.
    pub fn epsilon(&self, a: usize, b: usize) -> Option<i32> {
        self.direction(a, b)
            .map(|(t, _)| if t == a { 1 } else { -1 })
    }

    pub fn reversed(&self) -> Orientation {
        let dir = self
            .dir
            .iter()
            .map(|(&p, &(t, h))| (p, (h, t)))
            .collect();
        Orientation { dir }
    }

    pub fn directions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dir.values().copied()
    }
}

/// Skew-symmetric matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatrix {
    entries: Vec<Vec<Polynomial>>,
}

impl SkewMatrix {
    /// Wraps entries, checking skew symmetry and a zero diagonal.
    pub fn new(entries: Vec<Vec<Polynomial>>) -> Self {
        let n = entries.len();
        for row in &entries {
            assert_eq!(row.len(), n, "skew matrix must be square");
        }
        for i in 0..n {
            assert!(entries[i][i].is_zero(), "diagonal must vanish");
            for j in (i + 1)..n {
                assert_eq!(
                    entries[i][j],
                    entries[j][i].neg(),
                    "entries must be skew-symmetric"
                );
            }
        }
        Self { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    /// Integer matrix at all variables = 1.
    pub fn eval_ones(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(Polynomial::eval_ones).collect())
            .collect()
    }

    /// Applies the same permutation to rows and columns: entry (i,j) of the
    /// result is entry (perm[i], perm[j]) of the original.
    pub fn permuted(&self, perm: &[usize]) -> SkewMatrix {
        let n = self.size();
        assert_eq!(perm.len(), n);
        let entries = (0..n)
            .map(|i| (0..n).map(|j| self.entries[perm[i]][perm[j]].clone()).collect())
            .collect();
        SkewMatrix { entries }
    }
}

/// The `U x W` block of a bipartite graph's skew adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiadjMatrix {
    rows: Vec<usize>,
    cols: Vec<usize>,
    entries: Vec<Vec<Polynomial>>,
}

impl BiadjMatrix {
    /// Wraps a rectangular block with its row and column vertex labels.
    pub fn new(rows: Vec<usize>, cols: Vec<usize>, entries: Vec<Vec<Polynomial>>) -> Self {
        assert_eq!(entries.len(), rows.len());
        for row in &entries {
            assert_eq!(row.len(), cols.len());
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn into_entries(self) -> Vec<Vec<Polynomial>> {
        self.entries
    }
}

/// Symmetric weighted adjacency matrix: entry (i,j) is `m(i,j) * z_e`.
pub fn weighted_adjacency(g: &Graph) -> Vec<Vec<Polynomial>> {
    let n = g.n_vertices();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Polynomial::zero() } else { g.entry(i, j) }).collect())
        .collect()
}

/// Weighted skew-symmetric adjacency matrix: entry (i,j) is
/// `epsilon(i,j) * m(i,j) * z_e`.
pub fn skew_adjacency(g: &Graph, o: &Orientation) -> Result<SkewMatrix, GraphError> {
    let n = g.n_vertices();
    let mut entries = vec![vec![Polynomial::zero(); n]; n];
    for &(a, b) in g.simple_pairs().iter() {
        let eps = o
            .epsilon(a, b)
            .ok_or(GraphError::MissingDirection(a, b))?;
        let base = g.entry(a, b);
        let signed = if eps >= 0 { base.clone() } else { base.neg() };
        entries[a][b] = signed.clone();
        entries[b][a] = signed.neg();
    }
    Ok(SkewMatrix::new(entries))
}

/// The upper-right block of [`skew_adjacency`] under the vertex order
/// `U` then `W`. Classes must partition the vertices and have equal size.
pub fn biadjacency(
    g: &Graph,
    o: &Orientation,
    u_class: &[usize],
    w_class: &[usize],
) -> Result<BiadjMatrix, GraphError> {
    if u_class.len() != w_class.len() {
        return Err(GraphError::UnbalancedClasses);
    }
    let mut side = vec![0u8; g.n_vertices()];
    for &u in u_class {
        if u >= g.n_vertices() {
            return Err(GraphError::VertexOutOfRange(u));
        }
        side[u] |= 1;
    }
    for &w in w_class {
        if w >= g.n_vertices() {
            return Err(GraphError::VertexOutOfRange(w));
        }
        side[w] |= 2;
    }
    if let Some(v) = side.iter().position(|&s| s != 1 && s != 2) {
        return Err(GraphError::BadBipartition(v));
    }
    for &(a, b) in g.edges() {
        if side[a] == side[b] {
            return Err(GraphError::NotBipartite(a, b));
        }
    }
    let mut entries = vec![vec![Polynomial::zero(); w_class.len()]; u_class.len()];
    for (i, &u) in u_class.iter().enumerate() {
        for (j, &w) in w_class.iter().enumerate() {
            if g.multiplicity(u, w) == 0 {
                continue;
            }
            let eps = o
                .epsilon(u, w)
                .ok_or(GraphError::MissingDirection(u.min(w), u.max(w)))?;
            let base = g.entry(u, w);
            entries[i][j] = if eps >= 0 { base } else { base.neg() };
        }
    }
    Ok(BiadjMatrix {
        rows: u_class.to_vec(),
        cols: w_class.to_vec(),
        entries,
    })
}

/// Assembles the full skew matrix `((0, M), (-M^T, 0))` from a biadjacency
/// block, in the order rows-then-cols.
pub fn assemble_block_skew(m: &[Vec<Polynomial>]) -> SkewMatrix {
    let n = m.len();
    let k = if n == 0 { 0 } else { m[0].len() };
    let size = n + k;
    let mut entries = vec![vec![Polynomial::zero(); size]; size];
    for i in 0..n {
        assert_eq!(m[i].len(), k, "block must be rectangular");
        for j in 0..k {
            entries[i][n + j] = m[i][j].clone();
            entries[n + j][i] = m[i][j].neg();
        }
    }
    SkewMatrix::new(entries)
}
