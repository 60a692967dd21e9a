//! Pfaffians by the partition-sum definition, Cayley's identity, the
//! block-pfaffian sign lemma, and pfaffian-orientation verification.
//!
//! The pfaffian is computed as the literal signed sum over partitions of
//! the index set into pairs, generated smallest-unused-index first. Zero
//! entries prune whole subtrees, so on sparse matrices the sum only visits
//! partitions that correspond to perfect matchings of the support. No
//! division-based elimination: entries are polynomials and the
//! definitional sum is itself the verification target.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::graph::{skew_adjacency, Graph, GraphError, Orientation, SkewMatrix};
use crate::linalg::{self, DetError};
use crate::matching;
use crate::poly::Polynomial;

/// Partition counts grow as (2n-1)!!; 2n = 16 is about 2 million.
pub const PFAFFIAN_SIZE_CAP: usize = 16;
/// Simple-cycle enumeration cap for the nice-cycle check.
pub const NICE_CYCLE_VERTEX_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PfaffianError {
    OddSize(usize),
    SizeCap(usize),
    VertexCap(usize),
    Graph(GraphError),
    Det(DetError),
}

impl fmt::Display for PfaffianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PfaffianError::OddSize(n) => write!(f, "pfaffian needs even size, got {n}"),
            PfaffianError::SizeCap(n) => {
                write!(f, "size {n} exceeds the pfaffian cap of {PFAFFIAN_SIZE_CAP}")
            }
            PfaffianError::VertexCap(n) => write!(
                f,
                "{n} vertices exceed the nice-cycle cap of {NICE_CYCLE_VERTEX_CAP}"
            ),
            PfaffianError::Graph(e) => write!(f, "{e}"),
            PfaffianError::Det(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PfaffianError {}

impl From<GraphError> for PfaffianError {
    fn from(e: GraphError) -> Self {
        PfaffianError::Graph(e)
    }
}

impl From<DetError> for PfaffianError {
    fn from(e: DetError) -> Self {
        PfaffianError::Det(e)
    }
}

/// A partition of `{0, .., 2n-1}` into `n` unordered pairs, kept in the
/// order (and within-pair order) it was written with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Validates disjointness and coverage of `{0, .., 2n-1}`.
    pub fn new(pairs: Vec<(usize, usize)>) -> Option<Self> {
        let n2 = pairs.len() * 2;
        let mut seen = vec![false; n2];
        for &(a, b) in &pairs {
            if a >= n2 || b >= n2 || seen[a] || seen[b] {
                return None;
            }
            seen[a] = true;
            seen[b] = true;
        }
        Some(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Sign of the permutation sending `0, 1, .., 2n-1` to
    /// `i1, j1, .., in, jn`.
    pub fn sign(&self) -> i32 {
        let flat: Vec<usize> = self
            .pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        permutation_sign(&flat)
    }
}

/// Sign of a permutation given as the image sequence, via cycle lengths.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut sign = 1;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All partitions of `{0, .., n-1}` into pairs, smallest unused index
/// first. Intended for oracle duty at small sizes.
pub fn pair_partitions(n: usize) -> Vec<PairPartition> {
    assert!(n % 2 == 0, "pair partitions need an even ground set");
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut current = Vec::new();
    fn rec(
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<PairPartition>,
    ) {
        let Some(i) = used.iter().position(|&u| !u) else {
            out.push(PairPartition {
                pairs: current.clone(),
            });
            return;
        };
        used[i] = true;
        for j in (i + 1)..used.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            current.push((i, j));
            rec(used, current, out);
            current.pop();
            used[j] = false;
        }
        used[i] = false;
    }
    rec(&mut used, &mut current, &mut out);
    out
}

/// The pfaffian of a skew-symmetric polynomial matrix: the signed sum of
/// `c_{i1,j1} ... c_{in,jn}` over all pair partitions.
pub fn pfaffian(m: &SkewMatrix) -> Result<Polynomial, PfaffianError> {
    let n = m.size();
    if n % 2 == 1 {
        return Err(PfaffianError::OddSize(n));
    }
    if n > PFAFFIAN_SIZE_CAP {
        return Err(PfaffianError::SizeCap(n));
    }
    let mut used = vec![false; n];
    let mut acc = Polynomial::zero();
    pff_rec(m, &mut used, 1, &Polynomial::one(), &mut acc);
    Ok(acc)
}

// Pairing the smallest unused index i with an unused j contributes the
// parity of the number of unused indices strictly between them; that is
// exactly sgn(sigma_P) built up incrementally.
fn pff_rec(
    m: &SkewMatrix,
    used: &mut [bool],
    sign: i32,
    prod: &Polynomial,
    acc: &mut Polynomial,
) {
    let Some(i) = used.iter().position(|&u| !u) else {
        *acc = if sign > 0 {
            acc.add(prod)
        } else {
            acc.sub(prod)
        };
        return;
    };
    used[i] = true;
    let mut between = 0u32;
    for j in (i + 1)..used.len() {
        if used[j] {
            continue;
        }
        let entry = m.entry(i, j);
        if !entry.is_zero() {
            let s = if between % 2 == 0 { sign } else { -sign };
            used[j] = true;
            pff_rec(m, used, s, &prod.mul(entry), acc);
            used[j] = false;
        }
        between += 1;
    }
    used[i] = false;
}

/// Integer pfaffian, for matrices already evaluated at all variables = 1.
pub fn pfaffian_int(rows: &[Vec<BigInt>]) -> Result<BigInt, PfaffianError> {
    let n = rows.len();
    if n % 2 == 1 {
        return Err(PfaffianError::OddSize(n));
    }
    if n > PFAFFIAN_SIZE_CAP {
        return Err(PfaffianError::SizeCap(n));
    }
    let mut used = vec![false; n];
    let mut acc = BigInt::zero();
    fn rec(rows: &[Vec<BigInt>], used: &mut [bool], sign: i32, prod: &BigInt, acc: &mut BigInt) {
        let Some(i) = used.iter().position(|&u| !u) else {
            if sign > 0 {
                *acc += prod;
            } else {
                *acc -= prod;
            }
            return;
        };
        used[i] = true;
        let mut between = 0u32;
        for j in (i + 1)..used.len() {
            if used[j] {
                continue;
            }
            let entry = &rows[i][j];
            if !entry.is_zero() {
                let s = if between % 2 == 0 { sign } else { -sign };
                used[j] = true;
                rec(rows, used, s, &(prod * entry), acc);
                used[j] = false;
            }
            between += 1;
        }
        used[i] = false;
    }
    rec(rows, &mut used, 1, &BigInt::one(), &mut acc);
    Ok(acc)
}

/// Cayley's identity: `det B = pff(B)^2` for skew-symmetric `B`.
pub fn check_cayley(m: &SkewMatrix) -> Result<bool, PfaffianError> {
    let pf = pfaffian(m)?;
    let det = linalg::det(m.rows())?;
    Ok(det == pf.mul(&pf))
}

/// Builds `B = ((0, M), (-M^T, 0))` from a square block `M`, returns
/// `pff(B)` and whether `pff(B) = (-1)^{n(n-1)/2} det M`.
pub fn block_pfaffian_sign(
    mat: &[Vec<Polynomial>],
) -> Result<(Polynomial, bool), PfaffianError> {
    let n = mat.len();
    if mat.iter().any(|row| row.len() != n) {
        return Err(PfaffianError::Det(DetError::NotSquare));
    }
    let b = crate::graph::assemble_block_skew(mat);
    let pf = pfaffian(&b)?;
    let det = linalg::det(mat)?;
    let expected = if (n * n.saturating_sub(1) / 2) % 2 == 0 {
        det
    } else {
        det.neg()
    };
    Ok((pf.clone(), pf == expected))
}

/// Whether the orientation is pfaffian: `|pff(B(1))| = Phi(G)`.
///
/// With `check_cycles` set, also enumerates the even nice cycles of the
/// simple support, checks each carries an odd number of agreeing arrows,
/// and insists both characterizations give the same verdict.
pub fn is_pfaffian_orientation(
    g: &Graph,
    o: &Orientation,
    check_cycles: bool,
) -> Result<bool, PfaffianError> {
    let b = skew_adjacency(g, o)?;
    let pf = pfaffian_int(&b.eval_ones())?;
    let phi = matching::matching_count(g);
    let by_pfaffian = pf.abs() == phi;
    if check_cycles {
        if g.n_vertices() > NICE_CYCLE_VERTEX_CAP {
            return Err(PfaffianError::VertexCap(g.n_vertices()));
        }
        let by_cycles = simple_cycles(g).iter().all(|cycle| {
            cycle.len() % 2 != 0 || !is_nice(g, cycle) || oddly_oriented(o, cycle)
        });
        assert_eq!(
            by_pfaffian, by_cycles,
            "pfaffian test and nice-cycle test must agree"
        );
    }
    Ok(by_pfaffian)
}

/// All simple cycles of the simple support, as vertex sequences. Each
/// cycle is produced once: rooted at its smallest vertex, with the second
/// vertex smaller than the last.
pub fn simple_cycles(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on_path = vec![false; n];
    for root in 0..n {
        path.push(root);
        on_path[root] = true;
        extend_cycles(&adj, root, &mut path, &mut on_path, &mut out);
        on_path[root] = false;
        path.pop();
    }
    out
}

fn extend_cycles(
    adj: &[Vec<usize>],
    root: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    for &u in &adj[last] {
        if u == root && path.len() >= 3 {
            if path[1] < path[path.len() - 1] {
                out.push(path.clone());
            }
        } else if u > root && !on_path[u] {
            path.push(u);
            on_path[u] = true;
            extend_cycles(adj, root, path, on_path, out);
            on_path[u] = false;
            path.pop();
        }
    }
}

/// A cycle is nice when the graph minus its vertices still has a perfect
/// matching (the empty graph counts).
pub fn is_nice(g: &Graph, cycle: &[usize]) -> bool {
    let removed: BTreeSet<usize> = cycle.iter().copied().collect();
    let rest = g.without_vertices(&removed);
    !matching::enumerate_matchings(&rest).is_empty()
}

/// Whether an odd number of the cycle's edges agree with the orientation
/// when traversed in the given direction. For even cycles the answer does
/// not depend on the direction.
pub fn oddly_oriented(o: &Orientation, cycle: &[usize]) -> bool {
    let k = cycle.len();
    let agreeing = (0..k)
        .filter(|&i| {
            let a = cycle[i];
            let b = cycle[(i + 1) % k];
            o.direction(a, b) == Some((a, b))
        })
        .count();
    agreeing % 2 == 1
}
