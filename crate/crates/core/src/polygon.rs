//! Type A surface cluster algebra on a convex polygon: triangulations and
//! their signed adjacency matrices, seed mutation, arc crossing sequences,
//! the weighted snake graph of an arc, and the three expansion routes
//! (determinant, perfect matchings, mutation) whose agreement is the
//! central check of this crate.
//!
//! Vertices 0..n-1 sit in convex position counterclockwise. All geometry
//! is exact: the crossing order along an arc is decided with integer
//! arithmetic on a convex embedding (vertex k at (k, k^2)), never floats.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, DetError};
use crate::matching;
use crate::poly::{LaurentExpr, Monomial, PolyError, Polynomial, VarId, VarPool};
use crate::snake::{self, Side, SnakeError, SnakeGraph, Step};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolygonError {
    TooFewVertices(usize),
    InvalidDiagonal(usize, usize),
    DuplicateDiagonal(usize, usize),
    CrossingDiagonals((usize, usize), (usize, usize)),
    WrongDiagonalCount { expected: usize, got: usize },
    /// The arc is a polygon side, not a diagonal.
    BoundaryArc(usize, usize),
    /// The arc is already in the triangulation: nothing to expand.
    ArcInTriangulation(usize, usize),
    MissingVariable(usize, usize),
    IndexOutOfRange(usize),
    /// An exact division failed; would contradict the Laurent phenomenon.
    NotDivisible,
    Snake(SnakeError),
    Det(DetError),
}

impl fmt::Display for PolygonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonError::TooFewVertices(n) => write!(f, "polygon needs >= 4 vertices, got {n}"),
            PolygonError::InvalidDiagonal(a, b) => write!(f, "({a},{b}) is not a diagonal"),
            PolygonError::DuplicateDiagonal(a, b) => write!(f, "diagonal ({a},{b}) repeats"),
            PolygonError::CrossingDiagonals(d1, d2) => {
                write!(f, "diagonals {d1:?} and {d2:?} cross")
            }
            PolygonError::WrongDiagonalCount { expected, got } => {
                write!(f, "triangulation needs {expected} diagonals, got {got}")
            }
            PolygonError::BoundaryArc(a, b) => write!(f, "({a},{b}) is a boundary edge"),
            PolygonError::ArcInTriangulation(a, b) => {
                write!(f, "({a},{b}) is already in the triangulation")
            }
            PolygonError::MissingVariable(a, b) => {
                write!(f, "diagonal ({a},{b}) has no cluster variable assigned")
            }
            PolygonError::IndexOutOfRange(k) => write!(f, "index {k} out of range"),
            PolygonError::NotDivisible => {
                write!(f, "exact division failed during mutation")
            }
            PolygonError::Snake(e) => write!(f, "{e}"),
            PolygonError::Det(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PolygonError {}

impl From<SnakeError> for PolygonError {
    fn from(e: SnakeError) -> Self {
        PolygonError::Snake(e)
    }
}

impl From<DetError> for PolygonError {
    fn from(e: DetError) -> Self {
        PolygonError::Det(e)
    }
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Whether (a,b) is a diagonal of the n-gon: distinct, in range, and not a
/// boundary edge.
pub fn is_diagonal(n: usize, a: usize, b: usize) -> bool {
    let (a, b) = norm(a, b);
    a != b && b < n && b - a >= 2 && !(a == 0 && b == n - 1)
}

fn is_boundary_edge(n: usize, a: usize, b: usize) -> bool {
    let (a, b) = norm(a, b);
    a != b && b < n && (b - a == 1 || (a == 0 && b == n - 1))
}

/// Strict crossing test for chords of a convex polygon: the endpoints of
/// one chord separate the endpoints of the other on the circle. Chords
/// sharing an endpoint do not cross.
pub fn diagonals_cross(d1: (usize, usize), d2: (usize, usize)) -> bool {
    let (a, b) = norm(d1.0, d1.1);
    let (c, d) = norm(d2.0, d2.1);
    if a == c || a == d || b == c || b == d {
        return false;
    }
    let inside = |x: usize| a < x && x < b;
    inside(c) != inside(d)
}

/// A triangulation of the convex n-gon: n-3 pairwise non-crossing
/// diagonals, kept in an explicit order (the order indexes the B-matrix
/// and the cluster), plus the variable attached to each diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonTriangulation {
    n: usize,
    diagonals: Vec<(usize, usize)>,
    var_of: BTreeMap<(usize, usize), VarId>,
}

impl PolygonTriangulation {
    /// Validates and sorts the diagonals into canonical initial order.
    pub fn new(n: usize, diagonals: Vec<(usize, usize)>) -> Result<Self, PolygonError> {
        if n < 4 {
            return Err(PolygonError::TooFewVertices(n));
        }
        let mut diags: Vec<(usize, usize)> = Vec::with_capacity(diagonals.len());
        for (a, b) in diagonals {
            let d = norm(a, b);
            if !is_diagonal(n, d.0, d.1) {
                return Err(PolygonError::InvalidDiagonal(d.0, d.1));
            }
            if diags.contains(&d) {
                return Err(PolygonError::DuplicateDiagonal(d.0, d.1));
            }
            diags.push(d);
        }
        for i in 0..diags.len() {
            for j in (i + 1)..diags.len() {
                if diagonals_cross(diags[i], diags[j]) {
                    return Err(PolygonError::CrossingDiagonals(diags[i], diags[j]));
                }
            }
        }
        if diags.len() != n - 3 {
            return Err(PolygonError::WrongDiagonalCount {
                expected: n - 3,
                got: diags.len(),
            });
        }
        diags.sort_unstable();
        Ok(Self {
            n,
            diagonals: diags,
            var_of: BTreeMap::new(),
        })
    }

    /// The fan triangulation from vertex 0.
    pub fn fan(n: usize) -> Result<Self, PolygonError> {
        Self::new(n, (2..n - 1).map(|k| (0, k)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &[(usize, usize)] {
        &self.diagonals
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.diagonals.contains(&norm(a, b))
    }

    /// Interns `x1 .. x{n-3}` for the diagonals in their current order.
    pub fn assign_vars(&mut self, pool: &mut VarPool) {
        for (k, &d) in self.diagonals.iter().enumerate() {
            let v = pool.intern(&alloc::format!("x{}", k + 1));
            self.var_of.insert(d, v);
        }
    }

    pub fn set_var(&mut self, a: usize, b: usize, v: VarId) {
        self.var_of.insert(norm(a, b), v);
    }

    pub fn var_of(&self, a: usize, b: usize) -> Result<VarId, PolygonError> {
        let d = norm(a, b);
        self.var_of
            .get(&d)
            .copied()
            .ok_or(PolygonError::MissingVariable(d.0, d.1))
    }

    /// Boundary edge or diagonal of this triangulation.
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        is_boundary_edge(self.n, a, b) || self.contains(a, b)
    }

    /// The n-2 triangles, as sorted vertex triples. On convex position
    /// every 3-clique of the triangulation graph bounds a face, so clique
    /// enumeration is exact here.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(self.n - 2);
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if !self.is_edge(a, b) {
                    continue;
                }
                for c in (b + 1)..self.n {
                    if self.is_edge(b, c) && self.is_edge(a, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// Replaces the k-th diagonal by the other diagonal of its
    /// quadrilateral, keeping position k. Returns the new triangulation
    /// and the new diagonal.
    pub fn flip(&self, k: usize) -> Result<(PolygonTriangulation, (usize, usize)), PolygonError> {
        let d = *self
            .diagonals
            .get(k)
            .ok_or(PolygonError::IndexOutOfRange(k))?;
        let mut apexes = self
            .triangles()
            .into_iter()
            .filter(|tri| tri.contains(&d.0) && tri.contains(&d.1))
            .map(|tri| {
                *tri.iter()
                    .find(|v| **v != d.0 && **v != d.1)
                    .expect("triangle has a third vertex")
            });
        let p = apexes.next().expect("diagonal lies in two triangles");
        let q = apexes.next().expect("diagonal lies in two triangles");
        debug_assert!(apexes.next().is_none());
        let new_diag = norm(p, q);
        let mut diagonals = self.diagonals.clone();
        diagonals[k] = new_diag;
        let mut var_of = self.var_of.clone();
        var_of.remove(&d);
        Ok((
            PolygonTriangulation {
                n: self.n,
                diagonals,
                var_of,
            },
            new_diag,
        ))
    }

    /// Canonical key for visited-set bookkeeping: the sorted diagonal set.
    pub fn key(&self) -> Vec<(usize, usize)> {
        let mut k = self.diagonals.clone();
        k.sort_unstable();
        k
    }
}

/// The signed adjacency matrix B(T): the sum over triangles of the +-1
/// clockwise-follow contributions between pairs of diagonals sharing that
/// triangle. Rows and columns are indexed by the triangulation's diagonal
/// order.
pub fn b_matrix(t: &PolygonTriangulation) -> Vec<Vec<i64>> {
    let m = t.diagonals.len();
    let index: BTreeMap<(usize, usize), usize> = t
        .diagonals
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, i))
        .collect();
    let mut b = vec![vec![0i64; m]; m];
    for [a, bb, c] in t.triangles() {
        // Sides in counterclockwise cyclic order around the triangle.
        let sides = [norm(a, bb), norm(bb, c), norm(a, c)];
        for i in 0..3 {
            let Some(&row) = index.get(&sides[i]) else {
                continue;
            };
            // Clockwise-next is two steps ahead counterclockwise.
            if let Some(&col) = index.get(&sides[(i + 2) % 3]) {
                b[row][col] += 1;
            }
            if let Some(&col) = index.get(&sides[(i + 1) % 3]) {
                b[row][col] -= 1;
            }
        }
    }
    b
}

/// Matrix mutation in direction k.
pub fn mutate_b(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let m = b.len();
    let mut out = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

/// A seed: the B-matrix, the cluster of Laurent expressions in the initial
/// variables, and the triangulation, all indexed consistently.
#[derive(Clone, Debug)]
pub struct Seed {
    b: Vec<Vec<i64>>,
    cluster: Vec<LaurentExpr>,
    tri: PolygonTriangulation,
}

impl Seed {
    /// The initial seed of a triangulation with variables assigned: the
    /// cluster is just the diagonal variables.
    pub fn initial(t: &PolygonTriangulation) -> Result<Seed, PolygonError> {
        let cluster = t
            .diagonals
            .iter()
            .map(|&(a, b)| Ok(LaurentExpr::var(t.var_of(a, b)?)))
            .collect::<Result<Vec<_>, PolygonError>>()?;
        Ok(Seed {
            b: b_matrix(t),
            cluster,
            tri: t.clone(),
        })
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn cluster(&self) -> &[LaurentExpr] {
        &self.cluster
    }

    pub fn triangulation(&self) -> &PolygonTriangulation {
        &self.tri
    }

    /// Seed mutation in direction k: the exchange relation on the cluster,
    /// matrix mutation on B, and the diagonal flip on the triangulation.
    pub fn mutate(&self, k: usize) -> Result<Seed, PolygonError> {
        if k >= self.cluster.len() {
            return Err(PolygonError::IndexOutOfRange(k));
        }
        let mut pos = LaurentExpr::one();
        let mut neg = LaurentExpr::one();
        for (j, x) in self.cluster.iter().enumerate() {
            let e = self.b[k][j];
            if e > 0 {
                pos = pos.mul(&x.pow(e as u32));
            } else if e < 0 {
                neg = neg.mul(&x.pow((-e) as u32));
            }
        }
        let new_var = pos.add(&neg).div(&self.cluster[k]).map_err(|e| match e {
            PolyError::NotDivisible => PolygonError::NotDivisible,
            PolyError::Parse(_) => unreachable!("division does not parse"),
        })?;
        let mut cluster = self.cluster.clone();
        cluster[k] = new_var;
        let (tri, _) = self.tri.flip(k)?;
        Ok(Seed {
            b: mutate_b(&self.b, k),
            cluster,
            tri,
        })
    }
}

// Exact convex embedding: vertex k at (k, k^2). Strictly convex, in
// counterclockwise order, and every intersection comparison stays in
// integer arithmetic.
fn embed(v: usize) -> (i128, i128) {
    let x = v as i128;
    (x, x * x)
}

fn cross2(o: (i128, i128), p: (i128, i128), q: (i128, i128)) -> i128 {
    (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
}

// Intersection parameter of diagonal (c,d) along the segment a -> b, as an
// exact fraction with positive denominator.
fn crossing_param(a: usize, b: usize, diag: (usize, usize)) -> (i128, i128) {
    let pa = embed(a);
    let pb = embed(b);
    let pc = embed(diag.0);
    let pd = embed(diag.1);
    let fa = cross2(pc, pd, pa);
    let fb = cross2(pc, pd, pb);
    let num = fa;
    let den = fa - fb;
    debug_assert!(den != 0, "crossing diagonals cannot be parallel to the arc");
    if den < 0 {
        (-num, -den)
    } else {
        (num, den)
    }
}

/// The diagonals of `t` crossed by the arc, in crossing order along the
/// arc oriented from its smaller to its larger endpoint.
pub fn crossing_sequence(
    t: &PolygonTriangulation,
    arc: (usize, usize),
) -> Result<Vec<(usize, usize)>, PolygonError> {
    let (a, b) = norm(arc.0, arc.1);
    if !is_diagonal(t.n(), a, b) {
        return Err(PolygonError::BoundaryArc(a, b));
    }
    if t.contains(a, b) {
        return Err(PolygonError::ArcInTriangulation(a, b));
    }
    let mut crossed: Vec<(usize, usize)> = t
        .diagonals
        .iter()
        .copied()
        .filter(|&d| diagonals_cross((a, b), d))
        .collect();
    crossed.sort_by(|&d1, &d2| {
        let (n1, q1) = crossing_param(a, b, d1);
        let (n2, q2) = crossing_param(a, b, d2);
        (n1 * q2).cmp(&(n2 * q1))
    });
    debug_assert!(!crossed.is_empty(), "a maximal triangulation blocks every arc");
    Ok(crossed)
}

/// The snake graph of an arc together with its crossing monomial.
#[derive(Clone, Debug)]
pub struct WeightedSnake {
    pub snake: SnakeGraph,
    /// cross(arc): the product of the crossed diagonals' variables.
    pub cross_den: Monomial,
    pub crossed: Vec<(usize, usize)>,
}

fn other_endpoint(d: (usize, usize), v: usize) -> usize {
    if d.0 == v {
        d.1
    } else {
        d.0
    }
}

fn common_vertex(d1: (usize, usize), d2: (usize, usize)) -> Option<usize> {
    if d1.0 == d2.0 || d1.0 == d2.1 {
        Some(d1.0)
    } else if d1.1 == d2.0 || d1.1 == d2.1 {
        Some(d1.1)
    } else {
        None
    }
}

// Lateral slots perpendicular to the travel axis: (secondary, primary).
fn lateral_slots(travel: Step) -> (Side, Side) {
    match travel {
        Step::Right => (Side::Bottom, Side::Top),
        Step::Up => (Side::Left, Side::Right),
    }
}

fn entry_slot(dir: Step) -> Side {
    match dir {
        Step::Right => Side::Left,
        Step::Up => Side::Bottom,
    }
}

fn exit_slot(dir: Step) -> Side {
    match dir {
        Step::Right => Side::Right,
        Step::Up => Side::Top,
    }
}

/// Builds the weighted snake graph of an arc.
///
/// Tile j is the quadrilateral around the j-th crossed diagonal; its sides
/// are the other four sides of the two triangles flanking that diagonal,
/// placed so that opposite quadrilateral sides sit on opposite tile sides.
/// Consecutive tiles share the third side of the triangle between their
/// diagonals, and the snake turns exactly where consecutive shared
/// vertices coincide (a fan pattern). Sides that are polygon boundary
/// edges weigh 1; diagonals weigh their cluster variable.
pub fn msw_snake(
    t: &PolygonTriangulation,
    arc: (usize, usize),
    pool: &mut VarPool,
) -> Result<WeightedSnake, PolygonError> {
    let seq = crossing_sequence(t, arc)?;
    let d = seq.len();
    let (ga, gb) = norm(arc.0, arc.1);

    // Shared vertex of consecutive crossed diagonals; they are two sides
    // of the triangle between the crossings, so one always exists.
    let shared: Vec<usize> = (0..d.saturating_sub(1))
        .map(|j| {
            common_vertex(seq[j], seq[j + 1])
                .expect("consecutive crossed diagonals share a triangle vertex")
        })
        .collect();

    // Gluing directions: first one Right; toggle exactly at fan turns.
    let mut glue: Vec<Step> = Vec::with_capacity(d.saturating_sub(1));
    if d >= 2 {
        glue.push(Step::Right);
        for j in 1..d - 1 {
            let prev = glue[j - 1];
            glue.push(if shared[j - 1] == shared[j] {
                prev.toggled()
            } else {
                prev
            });
        }
    }

    // Glue edge between tiles j and j+1: third side of the triangle
    // spanned by the two crossed diagonals.
    let glue_edge: Vec<(usize, usize)> = (0..d.saturating_sub(1))
        .map(|j| {
            let v = shared[j];
            let e = norm(other_endpoint(seq[j], v), other_endpoint(seq[j + 1], v));
            assert!(
                t.is_edge(e.0, e.1),
                "the triangle between crossings must be a face"
            );
            e
        })
        .collect();

    let mut s = SnakeGraph::build(&glue, pool);

    let weight_of = |p: (usize, usize)| -> Result<Polynomial, PolygonError> {
        if t.contains(p.0, p.1) {
            Ok(Polynomial::var(t.var_of(p.0, p.1)?))
        } else if is_boundary_edge(t.n(), p.0, p.1) {
            Ok(Polynomial::one())
        } else {
            unreachable!("tile sides are edges of the triangulation")
        }
    };

    // Per-tile side assignment, with a cross-tile consistency check on
    // glue edges: both flanking tiles must agree on the weight.
    let mut assigned: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut place = |s: &mut SnakeGraph,
                     tile: usize,
                     side: Side,
                     polygon_edge: (usize, usize)|
     -> Result<(), PolygonError> {
        let frame = s.tile_frame(tile);
        let key = frame.side(side);
        if let Some(&prev) = assigned.get(&key) {
            assert_eq!(
                prev, polygon_edge,
                "tiles disagree on a shared glue edge"
            );
            return Ok(());
        }
        assigned.insert(key, polygon_edge);
        s.set_weight(key.0, key.1, weight_of(polygon_edge)?);
        Ok(())
    };

    if d == 1 {
        let (c1, c2) = seq[0];
        place(&mut s, 0, Side::Left, norm(ga, c1))?;
        place(&mut s, 0, Side::Right, norm(gb, c2))?;
        place(&mut s, 0, Side::Bottom, norm(ga, c2))?;
        place(&mut s, 0, Side::Top, norm(gb, c1))?;
    } else {
        for tile in 0..d {
            if tile == 0 {
                // First tile: the exit carries the first glue edge, the
                // side across from it is the first triangle's side at the
                // shared vertex, and the laterals pair the next diagonal
                // with the first triangle's other side.
                assert!(
                    t.is_edge(norm(ga, seq[0].0).0, norm(ga, seq[0].0).1)
                        && t.is_edge(norm(ga, seq[0].1).0, norm(ga, seq[0].1).1),
                    "the arc's start triangle must be a face"
                );
                let travel = glue[0];
                let (secondary, primary) = lateral_slots(travel);
                place(&mut s, 0, exit_slot(travel), glue_edge[0])?;
                place(&mut s, 0, exit_slot(travel).opposite(), norm(ga, shared[0]))?;
                place(&mut s, 0, primary, seq[1])?;
                place(
                    &mut s,
                    0,
                    secondary,
                    norm(ga, other_endpoint(seq[0], shared[0])),
                )?;
            } else if tile == d - 1 {
                let travel = glue[tile - 1];
                let (secondary, primary) = lateral_slots(travel);
                assert!(
                    t.is_edge(norm(gb, seq[d - 1].0).0, norm(gb, seq[d - 1].0).1)
                        && t.is_edge(norm(gb, seq[d - 1].1).0, norm(gb, seq[d - 1].1).1),
                    "the arc's end triangle must be a face"
                );
                place(&mut s, tile, entry_slot(travel), glue_edge[tile - 1])?;
                place(
                    &mut s,
                    tile,
                    entry_slot(travel).opposite(),
                    norm(gb, shared[tile - 1]),
                )?;
                place(&mut s, tile, secondary, seq[d - 2])?;
                place(
                    &mut s,
                    tile,
                    primary,
                    norm(gb, other_endpoint(seq[d - 1], shared[tile - 1])),
                )?;
            } else {
                let in_dir = glue[tile - 1];
                let out_dir = glue[tile];
                place(&mut s, tile, entry_slot(in_dir), glue_edge[tile - 1])?;
                place(&mut s, tile, exit_slot(out_dir), glue_edge[tile])?;
                if in_dir == out_dir {
                    // Straight: earlier diagonal secondary, later primary.
                    let (secondary, primary) = lateral_slots(in_dir);
                    place(&mut s, tile, secondary, seq[tile - 1])?;
                    place(&mut s, tile, primary, seq[tile + 1])?;
                } else {
                    // Turn: both remaining slots are forced by the
                    // opposite-sides rule.
                    place(&mut s, tile, entry_slot(in_dir).opposite(), seq[tile + 1])?;
                    place(&mut s, tile, exit_slot(out_dir).opposite(), seq[tile - 1])?;
                }
            }
        }
    }

    let mut cross_den = Monomial::one();
    for &dk in &seq {
        cross_den = cross_den.mul(&Monomial::var(t.var_of(dk.0, dk.1)?));
    }
    Ok(WeightedSnake {
        snake: s,
        cross_den,
        crossed: seq,
    })
}

/// The determinantal expansion of an arc, with its sign diagnostics.
#[derive(Clone, Debug)]
pub struct DetExpansion {
    pub value: LaurentExpr,
    pub d: usize,
    pub shape: Vec<Step>,
    /// The sign epsilon with det M = epsilon * phi, measured on this shape.
    pub sign_measured: i32,
    /// `(-1)^{(d+1)(d+2)/2}`.
    pub sign_corollary: i32,
}

/// Expands an arc through the determinant of the weighted biadjacency
/// matrix of its snake graph.
///
/// The determinant is normalized by the sign that makes every coefficient
/// positive (positivity of the matching expansion is theorem-backed; the
/// global sign is labeling-sensitive). That sign is checked against the
/// sign measured independently on the formal snake of the same shape.
pub fn expand_det(
    t: &PolygonTriangulation,
    arc: (usize, usize),
    pool: &mut VarPool,
) -> Result<DetExpansion, PolygonError> {
    let ws = msw_snake(t, arc, pool)?;
    let m = snake::weighted_biadjacency(&ws.snake);
    let det = linalg::det(m.entries())?;
    let sign = det
        .uniform_coeff_sign()
        .ok_or(PolygonError::Snake(SnakeError::SignIncoherent))?;
    let num = if sign < 0 { det.neg() } else { det };
    let mut scratch = VarPool::new();
    let formal = SnakeGraph::build(ws.snake.shape(), &mut scratch);
    let report = snake::measure_sign(&formal)?;
    assert_eq!(
        sign, report.epsilon,
        "weighted determinant sign must match the shape's measured sign"
    );
    Ok(DetExpansion {
        value: LaurentExpr::new(num, ws.cross_den.clone()),
        d: ws.snake.d(),
        shape: ws.snake.shape().to_vec(),
        sign_measured: report.epsilon,
        sign_corollary: report.corollary,
    })
}

/// Expands an arc by enumerating the perfect matchings of its snake graph.
pub fn expand_matchings(
    t: &PolygonTriangulation,
    arc: (usize, usize),
    pool: &mut VarPool,
) -> Result<LaurentExpr, PolygonError> {
    let ws = msw_snake(t, arc, pool)?;
    let phi = matching::snake_phi_enumerated(&ws.snake);
    Ok(LaurentExpr::new(phi, ws.cross_den))
}

/// Expands an arc by mutating seeds along a flip path to any triangulation
/// containing it. Arcs already in the triangulation return their own
/// variable.
pub fn expand_mutation_oracle(
    t: &PolygonTriangulation,
    arc: (usize, usize),
) -> Result<LaurentExpr, PolygonError> {
    let (a, b) = norm(arc.0, arc.1);
    if !is_diagonal(t.n(), a, b) {
        return Err(PolygonError::BoundaryArc(a, b));
    }
    if t.contains(a, b) {
        return Ok(LaurentExpr::var(t.var_of(a, b)?));
    }
    let path = flip_path_to_arc(t, (a, b));
    let mut seed = Seed::initial(t)?;
    for k in path {
        seed = seed.mutate(k)?;
    }
    let pos = seed
        .tri
        .diagonals
        .iter()
        .position(|&dd| dd == (a, b))
        .expect("the flip path ends at a triangulation containing the arc");
    Ok(seed.cluster[pos].clone())
}

// Breadth-first search over the flip graph, returning the flip indices
// leading from `t` to the first triangulation (in BFS order) that
// contains the target arc. The flip graph is connected, so this
// terminates.
fn flip_path_to_arc(t: &PolygonTriangulation, target: (usize, usize)) -> Vec<usize> {
    let mut visited: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut queue: VecDeque<(PolygonTriangulation, Vec<usize>)> = VecDeque::new();
    visited.insert(t.key());
    queue.push_back((t.clone(), Vec::new()));
    while let Some((tri, path)) = queue.pop_front() {
        if tri.contains(target.0, target.1) {
            return path;
        }
        for k in 0..tri.diagonals.len() {
            let (next, _) = tri.flip(k).expect("flip of a valid index succeeds");
            if visited.insert(next.key()) {
                let mut next_path = path.clone();
                next_path.push(k);
                queue.push_back((next, next_path));
            }
        }
    }
    unreachable!("the flip graph is connected")
}

/// All triangulations of the n-gon, by flip-graph BFS from the fan, each
/// in canonical (sorted) diagonal order. The count is the Catalan number
/// C(n-2).
pub fn all_triangulations(n: usize) -> Result<Vec<PolygonTriangulation>, PolygonError> {
    let fan = PolygonTriangulation::fan(n)?;
    let mut visited: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut queue: VecDeque<PolygonTriangulation> = VecDeque::new();
    visited.insert(fan.key());
    queue.push_back(fan);
    let mut out = Vec::new();
    while let Some(tri) = queue.pop_front() {
        out.push(PolygonTriangulation::new(n, tri.diagonals.clone())?);
        for k in 0..tri.diagonals.len() {
            let (next, _) = tri.flip(k)?;
            if visited.insert(next.key()) {
                queue.push_back(next);
            }
        }
    }
    out.sort_by(|x, y| x.diagonals.cmp(&y.diagonals));
    Ok(out)
}

/// All arcs of the n-gon: unordered non-adjacent vertex pairs.
pub fn all_arcs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 2)..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

/// One disagreement found by [`verify_three_way`].
#[derive(Clone, Debug)]
pub struct SweepFailure {
    pub diagonals: Vec<(usize, usize)>,
    pub arc: (usize, usize),
    pub det: String,
    pub matchings: String,
    pub mutation: String,
}

/// Result of the exhaustive three-way agreement sweep over one polygon.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub n: usize,
    pub triangulations: usize,
    pub pairs: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn all_agree(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every triangulation of the n-gon and every arc not in it, expands
/// three ways and compares the results exactly.
pub fn verify_three_way(n: usize) -> Result<SweepReport, PolygonError> {
    let mut pool = VarPool::new();
    let arcs = all_arcs(n);
    let tris = all_triangulations(n)?;
    let mut pairs = 0;
    let mut failures = Vec::new();
    for tri in &tris {
        let mut t = tri.clone();
        t.assign_vars(&mut pool);
        for &arc in &arcs {
            if t.contains(arc.0, arc.1) {
                continue;
            }
            pairs += 1;
            let by_det = expand_det(&t, arc, &mut pool)?;
            let by_matchings = expand_matchings(&t, arc, &mut pool)?;
            let by_mutation = expand_mutation_oracle(&t, arc)?;
            if by_det.value != by_matchings || by_matchings != by_mutation {
                failures.push(SweepFailure {
                    diagonals: t.diagonals.clone(),
                    arc,
                    det: by_det.value.to_text(&pool),
                    matchings: by_matchings.to_text(&pool),
                    mutation: by_mutation.to_text(&pool),
                });
            }
        }
    }
    Ok(SweepReport {
        n,
        triangulations: tris.len(),
        pairs,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fan_with_vars(n: usize) -> (PolygonTriangulation, VarPool) {
        let mut pool = VarPool::new();
        let mut t = PolygonTriangulation::fan(n).unwrap();
        t.assign_vars(&mut pool);
        (t, pool)
    }

    fn laurent(text_num: &str, text_den: &str, pool: &mut VarPool) -> LaurentExpr {
        let num = Polynomial::parse(text_num, pool).unwrap();
        let den = Polynomial::parse(text_den, pool).unwrap();
        let (mono, coeff) = den.terms().next().unwrap();
        assert!(coeff == &num_bigint::BigInt::from(1));
        LaurentExpr::new(num, mono.clone())
    }

    #[test]
    fn validation_rejects_bad_triangulations() {
        assert!(matches!(
            PolygonTriangulation::new(5, vec![(0, 2)]),
            Err(PolygonError::WrongDiagonalCount { .. })
        ));
        assert!(matches!(
            PolygonTriangulation::new(5, vec![(0, 2), (1, 3)]),
            Err(PolygonError::CrossingDiagonals(..))
        ));
        assert!(matches!(
            PolygonTriangulation::new(5, vec![(0, 1), (0, 3)]),
            Err(PolygonError::InvalidDiagonal(0, 1))
        ));
        assert!(matches!(
            PolygonTriangulation::new(3, vec![]),
            Err(PolygonError::TooFewVertices(3))
        ));
    }

    #[test]
    fn square_has_zero_b_matrix() {
        let t = PolygonTriangulation::new(4, vec![(0, 2)]).unwrap();
        assert_eq!(b_matrix(&t), vec![vec![0]]);
    }

    #[test]
    fn pentagon_b_matrix_is_the_convention_fixed_form() {
        let (t, _) = fan_with_vars(5);
        // Diagonals sorted: (0,2), (0,3); the shared triangle (0,2,3) puts
        // (0,3) clockwise-after (0,2).
        assert_eq!(b_matrix(&t), vec![vec![0, 1], vec![-1, 0]]);
    }

    #[test]
    fn hexagon_fan_b_matrix_is_tridiagonal() {
        let (t, _) = fan_with_vars(6);
        assert_eq!(
            b_matrix(&t),
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]
        );
    }

    #[test]
    fn square_mutation_gives_two_over_x() {
        let (t, mut pool) = fan_with_vars(4);
        let seed = Seed::initial(&t).unwrap();
        let mutated = seed.mutate(0).unwrap();
        let expect = laurent("2", "x1", &mut pool);
        assert_eq!(mutated.cluster()[0], expect);
    }

    #[test]
    fn pentagon_mutation_matches_exchange_relation() {
        let (t, mut pool) = fan_with_vars(5);
        let seed = Seed::initial(&t).unwrap();
        let mutated = seed.mutate(0).unwrap();
        let expect = laurent("x2 + 1", "x1", &mut pool);
        assert_eq!(mutated.cluster()[0], expect);
        // The flip replaces (0,2) by (1,3).
        assert_eq!(mutated.triangulation().diagonals()[0], (1, 3));
    }

    #[test]
    fn mutation_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 5..=8usize {
            let tris = all_triangulations(n).unwrap();
            for _ in 0..20 {
                let mut pool = VarPool::new();
                let mut t = tris.choose(&mut rng).unwrap().clone();
                t.assign_vars(&mut pool);
                let seed = Seed::initial(&t).unwrap();
                let k = rng.gen_range(0..n - 3);
                let back = seed.mutate(k).unwrap().mutate(k).unwrap();
                assert_eq!(back.b(), seed.b());
                assert_eq!(back.cluster(), seed.cluster());
                assert_eq!(
                    back.triangulation().diagonals(),
                    seed.triangulation().diagonals()
                );
            }
        }
    }

    #[test]
    fn flip_commutes_with_matrix_mutation() {
        for n in 4..=7usize {
            for t in all_triangulations(n).unwrap() {
                let b = b_matrix(&t);
                for k in 0..n - 3 {
                    let (flipped, _) = t.flip(k).unwrap();
                    assert_eq!(b_matrix(&flipped), mutate_b(&b, k), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn crossing_sequences_on_fans() {
        let (t5, _) = fan_with_vars(5);
        assert_eq!(crossing_sequence(&t5, (1, 3)).unwrap(), vec![(0, 2)]);
        let (t6, _) = fan_with_vars(6);
        assert_eq!(
            crossing_sequence(&t6, (1, 4)).unwrap(),
            vec![(0, 2), (0, 3)]
        );
        let (t7, _) = fan_with_vars(7);
        assert_eq!(
            crossing_sequence(&t7, (1, 5)).unwrap(),
            vec![(0, 2), (0, 3), (0, 4)]
        );
    }

    #[test]
    fn crossing_sequence_rejects_boundary_and_existing_arcs() {
        let (t, _) = fan_with_vars(5);
        assert_eq!(
            crossing_sequence(&t, (1, 2)),
            Err(PolygonError::BoundaryArc(1, 2))
        );
        assert_eq!(
            crossing_sequence(&t, (0, 2)),
            Err(PolygonError::ArcInTriangulation(0, 2))
        );
    }

    #[test]
    fn crossing_order_follows_the_arc() {
        // Zigzag triangulation of the hexagon: (1,3), (1,5), (3,5).
        let mut pool = VarPool::new();
        let mut t = PolygonTriangulation::new(6, vec![(1, 3), (1, 5), (3, 5)]).unwrap();
        t.assign_vars(&mut pool);
        assert_eq!(
            crossing_sequence(&t, (2, 5)).unwrap(),
            vec![(1, 3), (1, 5)]
        );
        assert_eq!(
            crossing_sequence(&t, (0, 4)).unwrap(),
            vec![(1, 5), (3, 5)]
        );
        assert_eq!(
            crossing_sequence(&t, (2, 4)).unwrap(),
            vec![(1, 3), (1, 5), (3, 5)]
        );
    }

    #[test]
    fn pentagon_snake_is_one_tile_with_x2_off_the_glue() {
        let (t, mut pool) = fan_with_vars(5);
        let ws = msw_snake(&t, (1, 3), &mut pool).unwrap();
        assert_eq!(ws.snake.d(), 1);
        assert_eq!(ws.crossed, vec![(0, 2)]);
        let frame = ws.snake.tile_frame(0);
        let weight = |p: (usize, usize)| ws.snake.weight(p.0, p.1).clone();
        let x2 = Polynomial::var(pool.intern("x2"));
        // Three unit sides and x2 on the side opposite a unit side.
        assert_eq!(weight(frame.side(Side::Left)), Polynomial::one());
        assert_eq!(weight(frame.side(Side::Right)), Polynomial::one());
        assert_eq!(weight(frame.side(Side::Bottom)), Polynomial::one());
        assert_eq!(weight(frame.side(Side::Top)), x2);
    }

    #[test]
    fn hexagon_fan_snake_matches_the_worked_tiles() {
        let (t, mut pool) = fan_with_vars(6);
        let ws = msw_snake(&t, (1, 4), &mut pool).unwrap();
        assert_eq!(ws.snake.d(), 2);
        assert_eq!(ws.snake.shape(), &[Step::Right]);
        let x = |k: usize, pool: &mut VarPool| {
            Polynomial::var(pool.intern(&alloc::format!("x{k}")))
        };
        let f0 = ws.snake.tile_frame(0);
        let f1 = ws.snake.tile_frame(1);
        let w = |p: (usize, usize)| ws.snake.weight(p.0, p.1).clone();
        // Tile 1: sides (0,1), (1,2), (2,3) weigh 1, diagonal (0,3) weighs
        // x2; the glue edge is (2,3).
        assert_eq!(w(f0.side(Side::Left)), Polynomial::one());
        assert_eq!(w(f0.side(Side::Bottom)), Polynomial::one());
        assert_eq!(w(f0.side(Side::Right)), Polynomial::one());
        assert_eq!(w(f0.side(Side::Top)), x(2, &mut pool));
        // Tile 2: (0,2) weighs x1, (3,4) weighs 1, (0,4) weighs x3.
        assert_eq!(w(f1.side(Side::Left)), Polynomial::one());
        assert_eq!(w(f1.side(Side::Bottom)), x(1, &mut pool));
        assert_eq!(w(f1.side(Side::Top)), Polynomial::one());
        assert_eq!(w(f1.side(Side::Right)), x(3, &mut pool));
        // phi = x1 + x3 + x2*x3.
        let phi = matching::snake_phi_enumerated(&ws.snake);
        let expect = Polynomial::parse("x1 + x3 + x2*x3", &mut pool).unwrap();
        assert_eq!(phi, expect);
    }

    #[test]
    fn heptagon_fan_snake_turns_and_has_four_terms() {
        let (t, mut pool) = fan_with_vars(7);
        let ws = msw_snake(&t, (1, 5), &mut pool).unwrap();
        assert_eq!(ws.snake.d(), 3);
        assert_eq!(ws.snake.shape(), &[Step::Right, Step::Up]);
        let phi = matching::snake_phi_enumerated(&ws.snake);
        let expect =
            Polynomial::parse("x2*x3*x4 + x1*x2 + x1*x4 + x3*x4", &mut pool).unwrap();
        assert_eq!(phi, expect);
    }

    #[test]
    fn pentagon_expansions_agree() {
        let (t, mut pool) = fan_with_vars(5);
        let expect = laurent("x2 + 1", "x1", &mut pool);
        let by_det = expand_det(&t, (1, 3), &mut pool).unwrap();
        assert_eq!(by_det.value, expect);
        assert_eq!(by_det.d, 1);
        assert_eq!(expand_matchings(&t, (1, 3), &mut pool).unwrap(), expect);
        assert_eq!(expand_mutation_oracle(&t, (1, 3)).unwrap(), expect);
    }

    #[test]
    fn hexagon_expansions_agree() {
        let (t, mut pool) = fan_with_vars(6);
        let expect = laurent("x1 + x3 + x2*x3", "x1*x2", &mut pool);
        assert_eq!(expand_det(&t, (1, 4), &mut pool).unwrap().value, expect);
        assert_eq!(expand_matchings(&t, (1, 4), &mut pool).unwrap(), expect);
        assert_eq!(expand_mutation_oracle(&t, (1, 4)).unwrap(), expect);
    }

    #[test]
    fn arc_in_triangulation_returns_its_variable() {
        let (t, pool) = fan_with_vars(6);
        let x = expand_mutation_oracle(&t, (0, 3)).unwrap();
        assert_eq!(x, LaurentExpr::var(pool.lookup("x2").unwrap()));
        let mut pool = pool;
        assert_eq!(
            expand_det(&t, (0, 3), &mut pool).unwrap_err(),
            PolygonError::ArcInTriangulation(0, 3)
        );
    }

    #[test]
    fn flip_graph_counts_are_catalan() {
        // C(n-2) for n = 4, 5, 6, 7.
        for (n, expect) in [(4, 2), (5, 5), (6, 14), (7, 42)] {
            assert_eq!(all_triangulations(n).unwrap().len(), expect, "n={n}");
        }
    }

    #[test]
    fn expansion_is_path_invariant() {
        // Hexagon: reach a triangulation containing (1,4) along two
        // different flip routes and compare the tracked variable.
        let (t, _) = fan_with_vars(6);
        let seed = Seed::initial(&t).unwrap();
        // Route A: flip (0,3) directly; its quadrilateral is (0,2,3,4)...
        let a = seed.mutate(1).unwrap();
        let pos_a = a
            .triangulation()
            .diagonals()
            .iter()
            .position(|&d| d == (2, 4));
        // Route B: flip 0 then 1 then 0.
        let b = seed
            .mutate(0)
            .unwrap()
            .mutate(1)
            .unwrap()
            .mutate(0)
            .unwrap();
        // Wherever (2,4) shows up on both routes, its expansion matches.
        if let Some(i) = pos_a {
            if let Some(j) = b
                .triangulation()
                .diagonals()
                .iter()
                .position(|&d| d == (2, 4))
            {
                assert_eq!(a.cluster()[i], b.cluster()[j]);
            }
        }
        // And the oracle value for (1,4) is independent of the BFS detail.
        let direct = expand_mutation_oracle(&t, (1, 4)).unwrap();
        let longer = {
            let s2 = seed.mutate(2).unwrap().mutate(2).unwrap();
            assert_eq!(s2.cluster(), seed.cluster());
            expand_mutation_oracle(s2.triangulation(), (1, 4)).unwrap()
        };
        assert_eq!(direct, longer);
    }

    #[test]
    fn reflection_negates_b_and_keeps_expansions() {
        // Reflect the hexagon fan through vertex 0: i -> (6 - i) mod 6.
        let mut pool = VarPool::new();
        let mut t = PolygonTriangulation::fan(6).unwrap();
        t.assign_vars(&mut pool);
        let refl = |v: usize| (6 - v) % 6;
        let mut diags: Vec<(usize, usize)> = t
            .diagonals()
            .iter()
            .map(|&(a, b)| norm(refl(a), refl(b)))
            .collect();
        // Keep index alignment: reflected fan diagonals in the order the
        // originals were listed.
        let mut rt = PolygonTriangulation::new(6, diags.clone()).unwrap();
        diags.sort_unstable();
        // Transfer each original diagonal's variable to its mirror image.
        for &(a, b) in t.diagonals() {
            let v = t.var_of(a, b).unwrap();
            let (ra, rb) = norm(refl(a), refl(b));
            rt.set_var(ra, rb, v);
        }
        // B flips sign up to the simultaneous reindexing of diagonals.
        let b = b_matrix(&t);
        let rb = b_matrix(&rt);
        let pos = |d: (usize, usize), tri: &PolygonTriangulation| {
            tri.diagonals().iter().position(|&x| x == d).unwrap()
        };
        for &d1 in t.diagonals() {
            for &d2 in t.diagonals() {
                let m1 = norm(refl(d1.0), refl(d1.1));
                let m2 = norm(refl(d2.0), refl(d2.1));
                assert_eq!(
                    b[pos(d1, &t)][pos(d2, &t)],
                    -rb[pos(m1, &rt)][pos(m2, &rt)]
                );
            }
        }
        // Expansions agree after reflecting the arc.
        let lhs = expand_matchings(&t, (1, 4), &mut pool).unwrap();
        let rhs = expand_matchings(&rt, (refl(1), refl(4)), &mut pool).unwrap();
        assert_eq!(lhs, rhs);
        let lhs_det = expand_det(&t, (1, 4), &mut pool).unwrap().value;
        let rhs_det = expand_det(&rt, (refl(1), refl(4)), &mut pool).unwrap().value;
        assert_eq!(lhs_det, rhs_det);
        let lhs_mut = expand_mutation_oracle(&t, (1, 4)).unwrap();
        let rhs_mut = expand_mutation_oracle(&rt, (refl(1), refl(4))).unwrap();
        assert_eq!(lhs_mut, rhs_mut);
    }

    #[test]
    fn swapping_free_lateral_sides_keeps_phi() {
        // The two non-glue opposite sides of a straight-segment tile can
        // be exchanged without changing the matching polynomial.
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let mut pool = VarPool::new();
        let tris = all_triangulations(7).unwrap();
        let mut checked = 0;
        for _ in 0..40 {
            let mut t = tris.choose(&mut rng).unwrap().clone();
            t.assign_vars(&mut pool);
            let arcs: Vec<(usize, usize)> = all_arcs(7)
                .into_iter()
                .filter(|&(a, b)| !t.contains(a, b))
                .collect();
            let arc = *arcs.choose(&mut rng).unwrap();
            let ws = msw_snake(&t, arc, &mut pool).unwrap();
            let d = ws.snake.d();
            // Pick a tile whose laterals are free: the first tile, the
            // last, or any straight interior tile.
            let free_tile = (0..d).find(|&i| {
                i == 0
                    || i == d - 1
                    || ws.snake.shape()[i - 1] == ws.snake.shape()[i]
            });
            let Some(i) = free_tile else { continue };
            let phi = matching::snake_phi_enumerated(&ws.snake);
            let travel = if i == 0 {
                *ws.snake.shape().first().unwrap_or(&Step::Right)
            } else {
                ws.snake.shape()[i - 1]
            };
            let (lo, hi) = lateral_slots(travel);
            let frame = ws.snake.tile_frame(i);
            let mut swapped = ws.snake.clone();
            let w_lo = swapped.weight(frame.side(lo).0, frame.side(lo).1).clone();
            let w_hi = swapped.weight(frame.side(hi).0, frame.side(hi).1).clone();
            swapped.set_weight(frame.side(lo).0, frame.side(lo).1, w_hi);
            swapped.set_weight(frame.side(hi).0, frame.side(hi).1, w_lo);
            assert_eq!(matching::snake_phi_enumerated(&swapped), phi);
            checked += 1;
        }
        assert!(checked > 10, "the sample should hit free tiles");
    }

    #[test]
    fn small_sweeps_agree() {
        for n in [5, 6] {
            let report = verify_three_way(n).unwrap();
            assert!(report.all_agree(), "failures: {:?}", report.failures);
            assert!(report.pairs > 0);
        }
    }

    #[test]
    fn laurent_positivity_and_denominator() {
        let report_pool = &mut VarPool::new();
        let mut t = PolygonTriangulation::new(7, vec![(1, 3), (1, 4), (1, 5)]).unwrap();
        t.assign_vars(report_pool);
        for arc in all_arcs(7) {
            if t.contains(arc.0, arc.1) {
                continue;
            }
            let ws = msw_snake(&t, arc, report_pool).unwrap();
            let e = expand_det(&t, arc, report_pool).unwrap();
            assert_eq!(e.value.num().uniform_coeff_sign(), Some(1));
            assert_eq!(*e.value.den(), ws.cross_den);
        }
    }
}
