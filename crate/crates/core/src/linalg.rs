//! Exact determinants of polynomial matrices.
//!
//! Expansion by minors, memoized on the set of unused columns: division
//! free, so entries stay in `Z[x]` throughout. Costs `O(2^n * n)`
//! polynomial operations, which comfortably beats the `n!` of plain
//! cofactor expansion and avoids the exact multivariate division a
//! fraction-free elimination would need on the hot path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::poly::Polynomial;

/// Hard cap on matrix size; `2^n` minor states beyond this stop being fun.
pub const DET_SIZE_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetError {
    NotSquare,
    SizeCap(usize),
}

impl fmt::Display for DetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetError::NotSquare => write!(f, "matrix is not square"),
            DetError::SizeCap(n) => {
                write!(f, "matrix size {n} exceeds the cap of {DET_SIZE_CAP}")
            }
        }
    }
}

impl core::error::Error for DetError {}

/// Exact determinant of a square matrix of polynomials.
pub fn det(mat: &[Vec<Polynomial>]) -> Result<Polynomial, DetError> {
    let n = mat.len();
    if mat.iter().any(|row| row.len() != n) {
        return Err(DetError::NotSquare);
    }
    if n > DET_SIZE_CAP {
        return Err(DetError::SizeCap(n));
    }
    if n == 0 {
        return Ok(Polynomial::one());
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut memo: BTreeMap<u32, Polynomial> = BTreeMap::new();
    Ok(minor(mat, n, full, &mut memo))
}

// Determinant of the submatrix on rows `n - popcount(mask) .. n` and the
// columns set in `mask`. Zero entries are skipped before recursion, so on
// banded matrices only a sliver of the 2^n states materializes.
fn minor(mat: &[Vec<Polynomial>], n: usize, mask: u32, memo: &mut BTreeMap<u32, Polynomial>) -> Polynomial {
    if mask == 0 {
        return Polynomial::one();
    }
    if let Some(hit) = memo.get(&mask) {
        return hit.clone();
    }
    let row = n - mask.count_ones() as usize;
    let mut acc = Polynomial::zero();
    let mut pos = 0u32;
    for j in 0..n {
        let bit = 1u32 << j;
        if mask & bit == 0 {
            continue;
        }
        let entry = &mat[row][j];
        if !entry.is_zero() {
            let sub = minor(mat, n, mask & !bit, memo);
            let term = entry.mul(&sub);
            acc = if pos % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        pos += 1;
    }
    memo.insert(mask, acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, Polynomial, VarId, VarPool};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn parse(text: &str, pool: &mut VarPool) -> Polynomial {
        Polynomial::parse(text, pool).unwrap()
    }

    #[test]
    fn identity_has_unit_determinant() {
        let n = 5;
        let mat: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Polynomial::one() } else { Polynomial::zero() })
                    .collect()
            })
            .collect();
        assert_eq!(det(&mat).unwrap(), Polynomial::one());
    }

    #[test]
    fn two_by_two_symbolic() {
        let mut pool = VarPool::new();
        let names = ["a", "b", "c", "d"];
        let entries: Vec<Polynomial> = names.iter().map(|s| parse(s, &mut pool)).collect();
        let mat = alloc::vec![
            alloc::vec![entries[0].clone(), entries[1].clone()],
            alloc::vec![entries[2].clone(), entries[3].clone()],
        ];
        let expect = parse("a*d - b*c", &mut pool);
        assert_eq!(det(&mat).unwrap(), expect);
    }

    #[test]
    fn paper_example_matrix() {
        let mut pool = VarPool::new();
        for i in 1..=6 {
            pool.intern(&alloc::format!("x{i}"));
        }
        let rows = [
            ["1", "0", "0", "x1"],
            ["-x2", "x4", "1", "0"],
            ["0", "-1", "x6", "0"],
            ["-x3", "0", "-x5", "x4"],
        ];
        let mat: Vec<Vec<Polynomial>> = rows
            .iter()
            .map(|row| row.iter().map(|s| parse(s, &mut pool)).collect())
            .collect();
        let expect = parse("x4^2*x6 + x4 + x1*x2*x5 + x1*x3*x4*x6 + x1*x3", &mut pool);
        assert_eq!(det(&mat).unwrap(), expect);
    }

    #[test]
    fn size_cap_is_enforced() {
        let n = DET_SIZE_CAP + 1;
        let mat = alloc::vec![alloc::vec![Polynomial::zero(); n]; n];
        assert_eq!(det(&mat), Err(DetError::SizeCap(n)));
    }

    #[test]
    fn non_square_is_rejected() {
        let mat = alloc::vec![alloc::vec![Polynomial::one(); 2], alloc::vec![Polynomial::one(); 3]];
        assert_eq!(det(&mat), Err(DetError::NotSquare));
    }

    /// Plain cofactor expansion along the first row, as an independent
    /// reference implementation.
    fn cofactor_det(mat: &[Vec<Polynomial>]) -> Polynomial {
        let n = mat.len();
        if n == 0 {
            return Polynomial::one();
        }
        let mut acc = Polynomial::zero();
        for j in 0..n {
            if mat[0][j].is_zero() {
                continue;
            }
            let sub: Vec<Vec<Polynomial>> = (1..n)
                .map(|i| {
                    (0..n)
                        .filter(|&k| k != j)
                        .map(|k| mat[i][k].clone())
                        .collect()
                })
                .collect();
            let term = mat[0][j].mul(&cofactor_det(&sub));
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Polynomial>>> {
        proptest::collection::vec(
            proptest::collection::vec((-3i64..=3, 0u32..3, 0u32..3), n),
            n,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|(c, e0, e1)| {
                            let m = Monomial::from_exps([(VarId(0), e0), (VarId(1), e1)]);
                            Polynomial::from_monomial(m, BigInt::from(c))
                        })
                        .collect()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn agrees_with_cofactor_expansion(mat in arb_matrix(4)) {
            prop_assert_eq!(det(&mat).unwrap(), cofactor_det(&mat));
        }

        #[test]
        fn row_swap_negates(mat in arb_matrix(4)) {
            let mut swapped = mat.clone();
            swapped.swap(0, 2);
            prop_assert_eq!(det(&swapped).unwrap(), det(&mat).unwrap().neg());
        }

        #[test]
        fn transpose_preserves(mat in arb_matrix(4)) {
            let n = mat.len();
            let t: Vec<Vec<Polynomial>> = (0..n)
                .map(|i| (0..n).map(|j| mat[j][i].clone()).collect())
                .collect();
            prop_assert_eq!(det(&t).unwrap(), det(&mat).unwrap());
        }
    }
}
