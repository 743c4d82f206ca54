//! Dense exact linear algebra over any [`Scalar`](super::Scalar). Matrices are row-major `Vec<Vec<S>>`.

use super::Scalar;

pub type Mat<S> = Vec<Vec<S>>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<S: Scalar>(mut rows: Mat<S>, ncols: usize) -> (Mat<S>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(prow.iter()) {
                if !y.is_zero() {
                    *x -= f.clone() * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<S: Scalar>(rows: &Mat<S>, ncols: usize) -> usize {
    rref(rows.clone(), ncols).1.len()
}

/// Basis of `{x : M x = 0}` for `M` with `ncols` columns.
pub fn nullspace<S: Scalar>(rows: &Mat<S>, ncols: usize) -> Mat<S> {
    let (r, piv) = rref(rows.clone(), ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !piv.contains(c)) {
        let mut v = vec![S::zero(); ncols];
        v[free] = S::one();
        for (row, &p) in r.iter().zip(piv.iter()) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Coefficients `c` with `Σ c_i basis_i = v`, or `None` if `v` is outside the span.
/// `basis` must be linearly independent.
pub fn express_in<S: Scalar>(basis: &Mat<S>, v: &[S]) -> Option<Vec<S>> {
    let n = v.len();
    let k = basis.len();
    // columns = basis vectors, augmented with v
    let rows: Mat<S> = (0..n)
        .map(|i| {
            let mut row: Vec<S> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let (r, piv) = rref(rows, k + 1);
    if piv.contains(&k) {
        return None;
    }
    let mut c = vec![S::zero(); k];
    for (row, &p) in r.iter().zip(piv.iter()) {
        c[p] = row[k].clone();
    }
    Some(c)
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_span<S: Scalar>(rows: &Mat<S>, v: &[S]) -> bool {
    let n = v.len();
    let r0 = rank(rows, n);
    let mut ext = rows.clone();
    ext.push(v.to_vec());
    rank(&ext, n) == r0
}

/// Equality of row spans.
pub fn same_span<S: Scalar>(a: &Mat<S>, b: &Mat<S>, ncols: usize) -> bool {
    let (ra, _) = rref(a.clone(), ncols);
    let (rb, _) = rref(b.clone(), ncols);
    ra == rb
}

pub fn mat_mul<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![S::zero(); m];
            for (k, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(b[k].iter()) {
                    if !y.is_zero() {
                        *o += x.clone() * y;
                    }
                }
            }
            out
        })
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &Mat<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| {
            let mut s = S::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    s += x.clone() * y;
                }
            }
            s
        })
        .collect()
}

pub fn identity<S: Scalar>(n: usize) -> Mat<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect()
}

pub fn transpose<S: Scalar>(a: &Mat<S>, ncols: usize) -> Mat<S> {
    (0..ncols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_inv<S: Scalar>(a: &Mat<S>) -> Option<Mat<S>> {
    let n = a.len();
    let aug: Mat<S> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            row
        })
        .collect();
    let (r, piv) = rref(aug, 2 * n);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, Rational};

    fn m(v: &[&[i64]]) -> Mat<Rational> {
        v.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let k = nullspace(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(|x| x == &int(0)));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[5, 3]]);
        let inv = mat_inv(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(mat_inv(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn expression_in_basis() {
        let b = m(&[&[1, 0, 1], &[0, 1, 1]]);
        let c = express_in(&b, &[int(2), int(3), int(5)]).unwrap();
        assert_eq!(c, vec![int(2), int(3)]);
        assert!(express_in(&b, &[int(1), int(1), int(1)]).is_none());
    }
}
