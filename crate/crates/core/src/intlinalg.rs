//! Exact integer and rational linear algebra: Hermite and Smith normal forms,
//! integer kernels, determinants.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Int = i128;
pub type Rational = Ratio<i128>;
pub type IntMatrix = Vec<Vec<Int>>;

fn sub_row_multiple(rows: &mut [Vec<Int>], target: usize, source: usize, q: Int) {
    if q == 0 {
        return;
    }
    let (t, s) = if target < source {
        let (a, b) = rows.split_at_mut(source);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Row echelon form over the integers using unimodular row operations,
/// pivoting only in the first `pivot_cols` columns. Pivots are positive and
/// the entries above each pivot are reduced into `[0, pivot)`. Returns the rank.
pub fn echelon(rows: &mut [Vec<Int>], pivot_cols: usize) -> usize {
    let nrows = rows.len();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == nrows {
            break;
        }
        loop {
            let best = (r..nrows)
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let pivot = rows[r][col];
            let mut done = true;
            for i in r + 1..nrows {
                let q = Integer::div_floor(&rows[i][col], &pivot);
                sub_row_multiple(rows, i, r, q);
                if rows[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        let pivot = rows[r][col];
        for i in 0..r {
            let q = Integer::div_floor(&rows[i][col], &pivot);
            sub_row_multiple(rows, i, r, q);
        }
        r += 1;
    }
    r
}

/// Canonical Hermite normal form of the row lattice; zero rows dropped.
pub fn hermite_rows(mut rows: IntMatrix) -> IntMatrix {
    let ncols = rows.first().map_or(0, Vec::len);
    let rank = echelon(&mut rows, ncols);
    rows.truncate(rank);
    rows
}

/// Basis (in Hermite normal form) of `{x ∈ Z^ncols : A x = 0}`.
pub fn integer_kernel(a: &[Vec<Int>], ncols: usize) -> IntMatrix {
    let m = a.len();
    let mut rows: IntMatrix = (0..ncols)
        .map(|j| {
            let mut row: Vec<Int> = a.iter().map(|r| r[j]).collect();
            row.extend((0..ncols).map(|k| Int::from(k == j)));
            row
        })
        .collect();
    let rank = echelon(&mut rows, m);
    let kernel: IntMatrix = rows[rank..].iter().map(|r| r[m..].to_vec()).collect();
    if kernel.is_empty() {
        return kernel;
    }
    hermite_rows(kernel)
}

/// True when every row of `inner` lies in the row lattice spanned by `outer`.
pub fn lattice_contains(outer: &[Vec<Int>], inner: &[Vec<Int>]) -> bool {
    let base = hermite_rows(outer.to_vec());
    inner.iter().all(|v| {
        let mut stacked = base.clone();
        stacked.push(v.clone());
        hermite_rows(stacked) == base
    })
}

/// Smith normal form `left * A * right = diag`, with `left`, `right` unimodular.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<Int>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| Int::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn smith_normal_form(a: &[Vec<Int>]) -> Smith {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d: IntMatrix = a.to_vec();
    let mut left = identity(m);
    let mut right = identity(n);

    let swap_cols = |mat: &mut IntMatrix, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    let add_col = |mat: &mut IntMatrix, target: usize, source: usize, q: Int| {
        for row in mat.iter_mut() {
            let s = row[source];
            row[target] -= q * s;
        }
    };

    for t in 0..m.min(n) {
        loop {
            let pos = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| d[i][j] != 0)
                .min_by_key(|&(i, j)| d[i][j].abs());
            let Some((pi, pj)) = pos else { break };
            d.swap(t, pi);
            left.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut right, t, pj);
            let pivot = d[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let q = Integer::div_floor(&d[i][t], &pivot);
                sub_row_multiple(&mut d, i, t, q);
                sub_row_multiple(&mut left, i, t, q);
                clean &= d[i][t] == 0;
            }
            for j in t + 1..n {
                let q = Integer::div_floor(&d[t][j], &pivot);
                add_col(&mut d, j, t, q);
                add_col(&mut right, j, t, q);
                clean &= d[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % pivot != 0));
            match bad {
                Some(i) => {
                    sub_row_multiple(&mut d, t, i, -1);
                    sub_row_multiple(&mut left, t, i, -1);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in left[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diagonal = (0..m.min(n)).map(|i| d[i][i]).collect();
    Smith { diagonal, left, right }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &[Vec<Int>]) -> Int {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.to_vec();
    let mut sign = 1;
    let mut prev: Int = 1;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(a: &[Vec<Rational>]) -> usize {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c] / m[r][c];
                for j in c..cols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Solves the square system `A x = b` over the rationals; `None` when singular.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = Rational::one() / m[c][c];
        for x in m[c].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in c..=n {
                    let v = m[c][j];
                    m[i][j] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

pub fn to_rational(a: &[Vec<Int>]) -> Vec<Vec<Rational>> {
    a.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect()).collect()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: Rational) -> Rational {
    x - x.floor()
}

pub fn is_integral(x: &Rational) -> bool {
    x.is_integer()
}

pub fn abs_int(x: Int) -> Int {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_is_canonical() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let b = vec![vec![-4, 10, 16], vec![2, 4, 4], vec![-6, 6, 12]];
        let ha = hermite_rows(a.clone());
        assert_eq!(ha, hermite_rows(b.into_iter().chain(a).collect()));
        for (i, row) in ha.iter().enumerate() {
            let p = row.iter().position(|&x| x != 0).unwrap();
            assert!(row[p] > 0);
            for prev in &ha[..i] {
                assert!(prev[p] >= 0 && prev[p] < row[p]);
            }
        }
    }

    #[test]
    fn kernel_of_single_constraint() {
        // 2a + b - c = 0 in Z^3 has rank 2
        let k = integer_kernel(&[vec![2, 1, -1]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(2 * v[0] + v[1] - v[2], 0);
        }
        // the lattice is saturated: (0,1,1) and (1,0,2) are in it
        assert!(lattice_contains(&k, &[vec![0, 1, 1], vec![1, 0, 2]]));
    }

    #[test]
    fn smith_of_diagonal_swap() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, vec![1, 6]);
        let d = mat_mul(&mat_mul(&s.left, &a), &s.right);
        assert_eq!(d, vec![vec![1, 0], vec![0, 6]]);
    }

    #[test]
    fn smith_reconstructs_stacked() {
        let a = vec![vec![1, 1], vec![-1, 1], vec![2, 0], vec![0, 2]];
        let s = smith_normal_form(&a);
        let d = mat_mul(&mat_mul(&s.left, &a), &s.right);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, if i == j { s.diagonal[i] } else { 0 });
            }
        }
        assert_eq!(s.diagonal, vec![1, 2]);
        assert_eq!(determinant(&s.left).abs(), 1);
        assert_eq!(determinant(&s.right).abs(), 1);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[vec![-2, 0], vec![0, -2]]), 4);
        assert_eq!(determinant(&[vec![-1, -1], vec![1, -1]]), 2);
        assert_eq!(determinant(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), -1);
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn rational_solve() {
        let a = to_rational(&[vec![2, 0], vec![0, 4]]);
        let x = solve_rational(&a, &[Rational::from_integer(1), Rational::from_integer(2)]).unwrap();
        assert_eq!(x, vec![Rational::new(1, 2), Rational::new(1, 2)]);
        assert!(solve_rational(&to_rational(&[vec![1, 1], vec![1, 1]]), &[Rational::zero(); 2]).is_none());
        assert_eq!(rational_rank(&to_rational(&[vec![1, 1], vec![1, 1]])), 1);
    }
}
