//! Exact linear algebra over `Q(a)`.

use crate::coeff::{Coeff, Poly};

pub type Matrix = Vec<Vec<Coeff>>;

/// Reduced row echelon form of a matrix, with the pivot columns and any
/// parameter conditions (monic polynomials in `a`) that a pivot needed to be
/// nonzero beyond `a != 0`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub conditions: Vec<Poly>,
}

/// Gauss-Jordan elimination. Constant pivots are preferred; among
/// nonconstant candidates the one of lowest numerator degree wins.
pub fn rref(m: &Matrix, ncols: usize) -> Echelon {
    let mut rows: Matrix = m.iter().filter(|r| r.iter().any(|c| !c.is_zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut conditions: Vec<Poly> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let pick = (r..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| {
                let c = &rows[i][col];
                (
                    !c.is_constant(),
                    !c.nonzero_under_assumption(),
                    c.num().degree().unwrap_or(0) + c.den().degree().unwrap_or(0),
                )
            });
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let piv = rows[r][col].clone();
        if let Some(cond) = piv.extra_condition() {
            if !conditions.contains(&cond) {
                conditions.push(cond);
            }
        }
        let inv = piv.inv();
        for c in rows[r].iter_mut() {
            if !c.is_zero() {
                *c = &*c * &inv;
            }
        }
        let prow = rows[r].clone();
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for (c, pc) in rows[i].iter_mut().zip(&prow) {
                if !pc.is_zero() {
                    *c = &*c - &(&f * pc);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    Echelon {
        rows,
        pivots,
        conditions,
    }
}

/// Basis of `{x : m x = 0}`, itself in reduced echelon form: each vector has
/// a leading 1 in its first nonzero position.
pub fn nullspace(m: &Matrix, ncols: usize) -> (Matrix, Echelon) {
    let ech = rref(m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Coeff::zero(); ncols];
        v[f] = Coeff::one();
        for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
            v[pc] = -&row[f];
        }
        basis.push(v);
    }
    let canon = rref(&basis, ncols).rows;
    (canon, ech)
}

/// One solution of `m x = b`, or `None` when inconsistent.
pub fn solve(m: &Matrix, b: &[Coeff]) -> Option<Vec<Coeff>> {
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let ech = rref(&aug, ncols + 1);
    if ech.pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Coeff::zero(); ncols];
    for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Coeff::one() } else { Coeff::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Coeff::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            s = &s + &(&a[i][l] * &b[l][j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_scale(a: &Matrix, c: &Coeff) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    rref(m, ncols).pivots.len()
}

/// Characteristic polynomial coefficients `c_0..c_n` of `det(l I - A)` by
/// Faddeev-LeVerrier, `c_n = 1`.
pub fn char_poly(a: &Matrix) -> Vec<Coeff> {
    let n = a.len();
    let mut c = vec![Coeff::zero(); n + 1];
    c[n] = Coeff::one();
    let mut mk = identity(n);
    let mut am;
    for k in 1..=n {
        am = mat_mul(a, &mk);
        let tr = (0..n).fold(Coeff::zero(), |s, i| &s + &am[i][i]);
        let ck = -(&tr * &Coeff::from_int(k as i64).inv());
        c[n - k] = ck.clone();
        mk = mat_add(&am, &mat_scale(&identity(n), &ck));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Coeff {
        Coeff::from_int(n)
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = vec![vec![q(1), q(2), q(3)]];
        let (ns, _) = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = (0..3).fold(Coeff::zero(), |s, i| &s + &(&m[0][i] * &v[i]));
            assert!(s.is_zero());
        }
        assert!(ns[0][0].is_one());
    }

    #[test]
    fn zero_matrix_leaves_everything_free() {
        let (ns, ech) = nullspace(&vec![vec![q(0), q(0)]], 2);
        assert_eq!(ns, identity(2));
        assert!(ech.pivots.is_empty());
    }

    #[test]
    fn parameter_pivot_records_condition() {
        let a = Coeff::param();
        let m = vec![vec![&a - &q(1), q(0)]];
        let ech = rref(&m, 2);
        assert_eq!(ech.conditions.len(), 1);
        assert_eq!(ech.conditions[0], (&a - &q(1)).num().clone());
        let m2 = vec![vec![a.clone(), q(0)]];
        assert!(rref(&m2, 2).conditions.is_empty());
    }

    #[test]
    fn solve_and_inconsistency() {
        let a = Coeff::param();
        let m = vec![vec![a.clone(), q(1)], vec![q(0), q(1)]];
        let x = solve(&m, &[q(1), q(2)]).unwrap();
        assert_eq!(x[1], q(2));
        assert_eq!(x[0], &(&q(1) - &q(2)) / &a);
        assert!(solve(&vec![vec![q(0)]], &[q(1)]).is_none());
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = vec![vec![q(2), q(0)], vec![q(0), q(-3)]];
        // (l - 2)(l + 3) = l^2 + l - 6
        assert_eq!(char_poly(&m), vec![q(-6), q(1), q(1)]);
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-2i64..3, 12)) {
            let m: Matrix = entries.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let (ns, ech) = nullspace(&m, 4);
            prop_assert_eq!(ns.len() + ech.pivots.len(), 4);
            for v in &ns {
                for row in &m {
                    let s = (0..4).fold(Coeff::zero(), |s, i| &s + &(&row[i] * &v[i]));
                    prop_assert!(s.is_zero());
                }
            }
        }
    }
}
