//! Perfect matchings: enumeration (the ground-truth oracle), the matching
//! generating function, and a linear-time recursion for snake graphs.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::graph::{pair, Graph};
use crate::poly::{Monomial, Polynomial};
use crate::snake::{Side, SnakeGraph};

/// An edge set covering every vertex of its host graph exactly once.
/// Edges are normalized pairs, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PerfectMatching {
    edges: Vec<(usize, usize)>,
}

impl PerfectMatching {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// True when the matching covers `0..n` exactly once.
    pub fn covers_exactly(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &(a, b) in &self.edges {
            if a >= n || b >= n || seen[a] || seen[b] {
                return false;
            }
            seen[a] = true;
            seen[b] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// All perfect matchings of the simple support of `g`, in lexicographic
/// order of their sorted edge lists. Graphs with an odd number of vertices
/// have none; the empty graph has exactly the empty matching.
pub fn enumerate_matchings(g: &Graph) -> Vec<PerfectMatching> {
    let pairs: BTreeSet<(usize, usize)> = g.edges().iter().copied().collect();
    enumerate_from_pairs(g.n_vertices(), &pairs)
}

/// Perfect matchings of a snake graph.
pub fn snake_matchings(s: &SnakeGraph) -> Vec<PerfectMatching> {
    let pairs: BTreeSet<(usize, usize)> = s.edge_pairs().collect();
    enumerate_from_pairs(s.n_vertices(), &pairs)
}

fn enumerate_from_pairs(n: usize, pairs: &BTreeSet<(usize, usize)>) -> Vec<PerfectMatching> {
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut covered = vec![false; n];
    let mut current: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    recurse(&adj, &mut covered, &mut current, &mut out);
    out
}

// Branch on the lowest-index uncovered vertex; trying its neighbors in
// ascending order makes the output lexicographic with no post-sort.
fn recurse(
    adj: &[Vec<usize>],
    covered: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<PerfectMatching>,
) {
    let Some(v) = covered.iter().position(|&c| !c) else {
        out.push(PerfectMatching {
            edges: current.clone(),
        });
        return;
    };
    covered[v] = true;
    for &u in &adj[v] {
        if covered[u] {
            continue;
        }
        covered[u] = true;
        current.push(pair(v, u));
        recurse(adj, covered, current, out);
        current.pop();
        covered[u] = false;
    }
    covered[v] = false;
}

/// The matching generating function: the sum over perfect matchings of
/// the product of edge variables, with the parallel-edge multiplicity
/// `m(i,j)` multiplied into the coefficient.
pub fn matching_polynomial(g: &Graph) -> Polynomial {
    let mut phi = Polynomial::zero();
    for m in enumerate_matchings(g) {
        let mut mono = Monomial::one();
        let mut coeff = BigInt::one();
        for &(a, b) in m.edges() {
            let v = g
                .var(a, b)
                .expect("matching polynomial needs a variable on every edge pair");
            mono = mono.mul(&Monomial::var(v));
            coeff *= BigInt::from(g.multiplicity(a, b));
        }
        phi = phi.add(&Polynomial::from_monomial(mono, coeff));
    }
    phi
}

/// The number of perfect matchings of the multigraph (parallel edges
/// counted separately).
pub fn matching_count(g: &Graph) -> BigInt {
    enumerate_matchings(g)
        .iter()
        .map(|m| {
            m.edges()
                .iter()
                .map(|&(a, b)| BigInt::from(g.multiplicity(a, b)))
                .product::<BigInt>()
        })
        .sum()
}

/// Weighted matching polynomial of a snake graph by direct enumeration:
/// the oracle the fast recursion is checked against.
pub fn snake_phi_enumerated(s: &SnakeGraph) -> Polynomial {
    let mut phi = Polynomial::zero();
    for m in snake_matchings(s) {
        let mut term = Polynomial::one();
        for &(a, b) in m.edges() {
            term = term.mul(s.weight(a, b));
        }
        phi = phi.add(&term);
    }
    phi
}

/// Weighted matching polynomial of a snake graph in time linear in the
/// tile count.
///
/// Peeling the last tile, a perfect matching either uses the edge across
/// from the glue edge (the rest restricts to the shorter snake) or the two
/// lateral edges (the shorter snake is left with the glue-edge endpoints
/// exposed). Carrying those two states forward gives the recursion below;
/// `closed` covers every vertex seen so far, `open` leaves the current
/// glue edge's endpoints for later.
pub fn snake_phi(s: &SnakeGraph) -> Polynomial {
    let d = s.d();
    let frame0 = s.tile_frame(0);
    let w = |p: (usize, usize)| s.weight(p.0, p.1);
    if d == 1 {
        // A single tile: the two pairs of opposite sides.
        return w(frame0.left)
            .mul(w(frame0.right))
            .add(&w(frame0.bottom).mul(w(frame0.top)));
    }
    let exit = s.exit_side(0).expect("d >= 2");
    let far = exit.opposite();
    let (s1, s2) = lateral_sides(exit);
    let mut closed = w(frame0.side(far))
        .mul(w(frame0.side(exit)))
        .add(&w(frame0.side(s1)).mul(w(frame0.side(s2))));
    let mut open = w(frame0.side(far)).clone();
    for t in 1..d {
        let frame = s.tile_frame(t);
        let entry = s.entry_side(t).expect("t >= 1");
        let across = entry.opposite();
        let (a, b) = lateral_sides(entry);
        let new_closed = w(frame.side(across)).mul(&closed).add(
            &w(frame.side(a))
                .mul(w(frame.side(b)))
                .mul(&open),
        );
        if let Some(exit) = s.exit_side(t) {
            open = if exit == across {
                // Straight: the next glue edge is the across edge; leaving
                // its endpoints exposed uses no new edge.
                closed.clone()
            } else {
                // Turn: the passed-by corner pair must be matched along the
                // side opposite the next glue edge.
                w(frame.side(exit.opposite())).mul(&open)
            };
        }
        closed = new_closed;
    }
    closed
}

fn lateral_sides(s: Side) -> (Side, Side) {
    match s {
        Side::Left | Side::Right => (Side::Bottom, Side::Top),
        Side::Bottom | Side::Top => (Side::Left, Side::Right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{VarId, VarPool};
    use crate::snake::{parse_shape, Step};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn four_cycle(pool: &mut VarPool) -> Graph {
        // Sides a,b,c,d in cyclic order 0-1-2-3-0.
        let mut g = Graph::new(4);
        for (u, v, name) in [(0, 1, "a"), (1, 2, "b"), (2, 3, "c"), (3, 0, "d")] {
            g.add_edge(u, v).unwrap();
            g.set_var(u, v, pool.intern(name));
        }
        g
    }

    #[test]
    fn single_tile_has_two_matchings() {
        let mut pool = VarPool::new();
        let g = four_cycle(&mut pool);
        let ms = enumerate_matchings(&g);
        assert_eq!(ms.len(), 2);
        for m in &ms {
            assert!(m.covers_exactly(4));
        }
        // Lexicographic order: {01,23} before {03,12}.
        assert_eq!(ms[0].edges(), &[(0, 1), (2, 3)]);
        assert_eq!(ms[1].edges(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn four_cycle_polynomial_pairs_opposite_sides() {
        let mut pool = VarPool::new();
        let g = four_cycle(&mut pool);
        let phi = matching_polynomial(&g);
        let expect = Polynomial::parse("a*c + b*d", &mut pool);
        assert_eq!(phi, expect.unwrap());
    }

    #[test]
    fn odd_graphs_have_no_matchings() {
        let mut pool = VarPool::new();
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.set_var(0, 1, pool.intern("a"));
        g.set_var(1, 2, pool.intern("b"));
        assert!(enumerate_matchings(&g).is_empty());
    }

    #[test]
    fn edgeless_even_graph_has_zero_polynomial() {
        let g = Graph::new(4);
        assert!(matching_polynomial(&g).is_zero());
        assert_eq!(matching_count(&g), BigInt::from(0));
    }

    #[test]
    fn empty_graph_has_the_empty_matching() {
        let g = Graph::new(0);
        let ms = enumerate_matchings(&g);
        assert_eq!(ms.len(), 1);
        assert!(ms[0].edges().is_empty());
    }

    #[test]
    fn parallel_edges_multiply_the_coefficient() {
        let mut pool = VarPool::new();
        let z = pool.intern("z");
        let mut g = Graph::new(2);
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        g.set_var(0, 1, z);
        let phi = matching_polynomial(&g);
        assert_eq!(phi, Polynomial::parse("2*z", &mut pool).unwrap());
        assert_eq!(matching_count(&g), BigInt::from(2));
    }

    #[test]
    fn straight_three_tile_snake_has_five_matchings() {
        let mut pool = VarPool::new();
        let s = SnakeGraph::build(&parse_shape("RR").unwrap(), &mut pool);
        assert_eq!(snake_matchings(&s).len(), 5);
    }

    #[test]
    fn straight_snake_counts_follow_fibonacci() {
        // Counts 2, 3, 5, 8, 13 for d = 1..=5; observed from the
        // enumeration oracle and pinned.
        let mut expect = [2usize, 3, 5, 8, 13].into_iter();
        for d in 1..=5usize {
            let shape = vec![Step::Right; d - 1];
            let mut pool = VarPool::new();
            let mut s = SnakeGraph::build(&shape, &mut pool);
            let count = snake_matchings(&s).len();
            assert_eq!(count, expect.next().unwrap());
            // Unit weights collapse the recursion to the same count.
            for (a, b) in s.edge_pairs().collect::<Vec<_>>() {
                s.set_weight(a, b, Polynomial::one());
            }
            assert_eq!(snake_phi(&s), Polynomial::constant_i64(count as i64));
        }
    }

    #[test]
    fn single_tile_phi_has_two_terms() {
        let mut pool = VarPool::new();
        let s = SnakeGraph::build(&[], &mut pool);
        let phi = snake_phi(&s);
        assert_eq!(phi.num_terms(), 2);
        assert_eq!(phi, snake_phi_enumerated(&s));
    }

    /// The straight 3-tile snake weighted as in the worked example:
    /// determinant and matching polynomial both come to
    /// `x4^2*x6 + x4 + x1*x2*x5 + x1*x3*x4*x6 + x1*x3`.
    pub(crate) fn paper_example_snake(pool: &mut VarPool) -> SnakeGraph {
        let mut s = SnakeGraph::build(&parse_shape("RR").unwrap(), pool);
        let x: Vec<Polynomial> = (1..=6)
            .map(|i| Polynomial::var(pool.intern(&alloc::format!("x{i}"))))
            .collect();
        let one = Polynomial::one();
        let id = |s: &SnakeGraph, c: (i64, i64)| s.vertex_id(c).unwrap();
        let weights: [((i64, i64), (i64, i64), Polynomial); 10] = [
            ((0, 0), (0, 1), one.clone()),        // left of tile 1
            ((0, 0), (1, 0), x[3].clone()),       // bottom of tile 1: x4
            ((0, 1), (1, 1), x[5].clone()),       // top of tile 1: x6
            ((1, 0), (1, 1), one.clone()),        // glue 1|2
            ((1, 0), (2, 0), x[1].clone()),       // bottom of tile 2: x2
            ((1, 1), (2, 1), x[4].clone()),       // top of tile 2: x5
            ((2, 0), (2, 1), x[2].clone()),       // glue 2|3: x3
            ((2, 0), (3, 0), x[3].clone()),       // bottom of tile 3: x4
            ((2, 1), (3, 1), one.clone()),        // top of tile 3
            ((3, 0), (3, 1), x[0].clone()),       // right of tile 3: x1
        ];
        for (p, q, w) in weights {
            let (a, b) = (id(&s, p), id(&s, q));
            s.set_weight(a, b, w);
        }
        s
    }

    #[test]
    fn paper_example_weights_give_the_five_term_polynomial() {
        let mut pool = VarPool::new();
        let s = paper_example_snake(&mut pool);
        let expect = Polynomial::parse(
            "x4^2*x6 + x4 + x1*x2*x5 + x1*x3*x4*x6 + x1*x3",
            &mut pool,
        )
        .unwrap();
        assert_eq!(snake_phi(&s), expect);
        assert_eq!(snake_phi_enumerated(&s), expect);
    }

    fn all_shapes(d: usize) -> Vec<Vec<Step>> {
        (0..(1u32 << (d - 1)))
            .map(|bits| {
                (0..d - 1)
                    .map(|i| if bits >> i & 1 == 0 { Step::Right } else { Step::Up })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn recursion_matches_enumeration_on_formal_weights() {
        for d in 1..=6usize {
            for shape in all_shapes(d) {
                let mut pool = VarPool::new();
                let s = SnakeGraph::build(&shape, &mut pool);
                assert_eq!(
                    snake_phi(&s),
                    snake_phi_enumerated(&s),
                    "shape {:?}",
                    shape
                );
            }
        }
    }

    #[test]
    fn recursion_matches_enumeration_on_random_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(20240611);
        let mut pool = VarPool::new();
        let vars: Vec<VarId> = (1..=4).map(|i| pool.intern(&alloc::format!("y{i}"))).collect();
        for d in 1..=8usize {
            for shape in all_shapes(d) {
                let mut s = SnakeGraph::build(&shape, &mut pool);
                for (a, b) in s.edge_pairs().collect::<Vec<_>>() {
                    let w = if rng.gen_bool(0.3) {
                        Polynomial::one()
                    } else {
                        Polynomial::var(*vars.choose(&mut rng).unwrap())
                    };
                    s.set_weight(a, b, w);
                }
                assert_eq!(snake_phi(&s), snake_phi_enumerated(&s));
            }
        }
    }

    #[test]
    fn removing_a_matched_edge_leaves_a_matchable_graph() {
        let mut pool = VarPool::new();
        for word in ["RU", "RRU", "URUR"] {
            let s = SnakeGraph::build(&parse_shape(word).unwrap(), &mut pool);
            let g = s.to_graph(&mut pool);
            for m in enumerate_matchings(&g) {
                for &(a, b) in m.edges() {
                    let removed: BTreeSet<usize> = [a, b].into_iter().collect();
                    let rest = g.without_vertices(&removed);
                    assert!(
                        !enumerate_matchings(&rest).is_empty(),
                        "rest of {word} after dropping {a}-{b}"
                    );
                }
            }
        }
    }
}
