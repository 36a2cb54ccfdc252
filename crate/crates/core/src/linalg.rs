//! Fraction-free exact linear algebra over arbitrary-precision integers.
//!
//! Bareiss elimination keeps every intermediate entry an integer (each is a
//! minor of the input, so the divisions are exact), which is what makes the
//! determinant labels and the divisor-class solves exact with no growth
//! surprises.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant by fraction-free elimination with row pivoting.
/// The empty matrix has determinant 1.
pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact by Sylvester's identity
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LinearOutcome {
    Unique(Vec<BigRational>),
    Inconsistent,
    Underdetermined {
        particular: Vec<BigRational>,
        /// Basis of the solution space of `A x = 0`, one vector per free column.
        kernel: Vec<Vec<BigRational>>,
    },
}

/// Solves `A x = b` exactly. Fraction-free forward elimination with row
/// pivoting and column skipping, then rational back-substitution; free
/// columns produce a kernel basis with the particular solution taking the
/// free variables as zero.
pub(crate) fn solve_exact(a: Vec<Vec<BigInt>>, b: Vec<BigInt>) -> LinearOutcome {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    assert_eq!(b.len(), rows);
    // augmented matrix
    let mut m: Vec<Vec<BigInt>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, rhs)| {
            row.push(rhs);
            row
        })
        .collect();

    let mut prev = BigInt::one();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(r) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, r);
        for i in rank + 1..rows {
            for j in col + 1..=cols {
                let num = &m[i][j] * &m[rank][col] - &m[i][col] * &m[rank][j];
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    for row in m.iter().skip(rank) {
        if !row[cols].is_zero() {
            return LinearOutcome::Inconsistent;
        }
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let back_substitute = |rhs_of: &dyn Fn(usize) -> BigRational,
                           free_vals: &dyn Fn(usize) -> BigRational|
     -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); cols];
        for &f in &free_cols {
            x[f] = free_vals(f);
        }
        for (i, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut acc = rhs_of(i);
            for j in pc + 1..cols {
                if !m[i][j].is_zero() {
                    acc -= BigRational::from(m[i][j].clone()) * &x[j];
                }
            }
            x[pc] = acc / BigRational::from(m[i][pc].clone());
        }
        x
    };

    if rank == cols {
        let x = back_substitute(
            &|i| BigRational::from(m[i][cols].clone()),
            &|_| BigRational::zero(),
        );
        return LinearOutcome::Unique(x);
    }

    let particular = back_substitute(
        &|i| BigRational::from(m[i][cols].clone()),
        &|_| BigRational::zero(),
    );
    let kernel = free_cols
        .iter()
        .map(|&f| {
            back_substitute(&|_| BigRational::zero(), &|c| {
                if c == f {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
        })
        .collect();
    LinearOutcome::Underdetermined { particular, kernel }
}

/// Scales a rational vector to a primitive integer vector (for reporting
/// kernel bases in exact form).
pub(crate) fn to_primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let scaled: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for s in &scaled {
        g = num_integer::gcd(g, s.abs());
    }
    if g.is_zero() || g.is_one() {
        scaled
    } else {
        scaled.into_iter().map(|s| s / &g).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(bi(n), bi(d))
    }

    /// Plain cofactor expansion, the slow reference for the fast path.
    fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_agrees_with_cofactors() {
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![],
            vec![vec![5]],
            vec![vec![1, -1], vec![-1, 0]],
            vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]],
            vec![vec![0, 1, 2], vec![1, 0, 3], vec![4, 5, 0]],
            vec![vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![1, 0, 1, 0], vec![3, 1, 4, 1]],
        ];
        for c in cases {
            let m: Vec<Vec<BigInt>> =
                c.iter().map(|r| r.iter().map(|&v| bi(v)).collect()).collect();
            assert_eq!(bareiss_det(m.clone()), cofactor_det(&m), "case {c:?}");
        }
    }

    #[test]
    fn solve_unique() {
        // x + y = 3, x - y = 1 -> (2, 1)
        let a = vec![vec![bi(1), bi(1)], vec![bi(1), bi(-1)]];
        let b = vec![bi(3), bi(1)];
        assert_eq!(
            solve_exact(a, b),
            LinearOutcome::Unique(vec![br(2, 1), br(1, 1)])
        );
    }

    #[test]
    fn solve_rational_result() {
        // 2x = 1
        let outcome = solve_exact(vec![vec![bi(2)]], vec![bi(1)]);
        assert_eq!(outcome, LinearOutcome::Unique(vec![br(1, 2)]));
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![vec![bi(1), bi(1)], vec![bi(2), bi(2)]];
        let b = vec![bi(1), bi(3)];
        assert_eq!(solve_exact(a, b), LinearOutcome::Inconsistent);
    }

    #[test]
    fn solve_underdetermined_kernel() {
        // x + y + z = 6 with two copies of the row
        let a = vec![vec![bi(1), bi(1), bi(1)], vec![bi(1), bi(1), bi(1)]];
        let b = vec![bi(6), bi(6)];
        match solve_exact(a, b) {
            LinearOutcome::Underdetermined { particular, kernel } => {
                assert_eq!(particular, vec![br(6, 1), br(0, 1), br(0, 1)]);
                assert_eq!(kernel.len(), 2);
                for k in &kernel {
                    let s: BigRational = k.iter().cloned().sum();
                    assert!(s.is_zero());
                }
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn primitive_integer_scaling() {
        let v = vec![br(1, 2), br(-3, 4), br(0, 1)];
        assert_eq!(to_primitive_integer(&v), vec![bi(2), bi(-3), bi(0)]);
    }
}
