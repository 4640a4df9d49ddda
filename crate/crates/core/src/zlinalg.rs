//! Integer linear algebra: Hermite and Smith normal forms over `i128`.
//!
//! Subgroups of a finite abelian group `Z^k / diag(d)` are handled through
//! their preimage lattices in `Z^k`, which always contain `diag(d) Z^k` and
//! are therefore of full rank.

use crate::arith::modulo;

pub type Mat = Vec<Vec<i128>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn axpy_row(rows: &mut [Vec<i128>], target: usize, source: usize, factor: i128) {
    if factor == 0 {
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
        *x -= factor * y;
    }
}

/// Row-style Hermite normal form. Returns the nonzero rows in echelon order
/// with positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(mut rows: Mat, ncols: usize) -> Mat {
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let mut have_pivot = false;
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].unsigned_abs());
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            have_pivot = true;
            let mut clean = true;
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let q = rows[i][c].div_euclid(rows[r][c]);
                    axpy_row(&mut rows, i, r, q);
                    if rows[i][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !have_pivot {
            continue;
        }
        if rows[r][c] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        let piv = rows[r][c];
        for i in 0..r {
            let q = rows[i][c].div_euclid(piv);
            axpy_row(&mut rows, i, r, q);
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Square HNF of the lattice spanned by `gens` together with `moduli[i] * e_i`.
pub fn lattice_hnf(gens: &[Vec<i128>], moduli: &[i128]) -> Mat {
    let k = moduli.len();
    let mut rows: Mat = gens.iter().map(|g| reduce_row(g, moduli)).collect();
    for (i, &d) in moduli.iter().enumerate() {
        let mut row = vec![0; k];
        row[i] = d;
        rows.push(row);
    }
    let h = hnf(rows, k);
    debug_assert_eq!(h.len(), k);
    h
}

fn reduce_row(row: &[i128], moduli: &[i128]) -> Vec<i128> {
    row.iter()
        .zip(moduli)
        .map(|(&x, &d)| modulo(x, d))
        .collect()
}

/// Lattice of `x ∈ Z^k` with `Σ_i x_i coeffs[j][i] ≡ 0 (mod modulus_j)` for every
/// functional `j`, as a square HNF. The kernel is assumed to have full rank.
pub fn kernel_mod(k: usize, functionals: &[(Vec<i128>, i128)]) -> Mat {
    let m = functionals.len();
    if m == 0 {
        return identity(k);
    }
    let width = m + k;
    let mut rows: Mat = Vec::with_capacity(k + m);
    for i in 0..k {
        let mut row = vec![0; width];
        for (j, (coeffs, modulus)) in functionals.iter().enumerate() {
            row[j] = modulo(coeffs[i], *modulus);
        }
        row[m + i] = 1;
        rows.push(row);
    }
    for (j, (_, modulus)) in functionals.iter().enumerate() {
        let mut row = vec![0; width];
        row[j] = *modulus;
        rows.push(row);
    }
    let h = hnf(rows, width);
    let kernel: Mat = h
        .into_iter()
        .filter(|row| row[..m].iter().all(|&x| x == 0))
        .map(|row| row[m..].to_vec())
        .collect();
    let out = hnf(kernel, k);
    debug_assert_eq!(out.len(), k);
    out
}

/// Solve `y · basis = x` for a square upper-triangular `basis`.
pub fn solve_upper(basis: &Mat, x: &[i128]) -> Option<Vec<i128>> {
    let k = basis.len();
    let mut rest = x.to_vec();
    let mut y = vec![0; k];
    for i in 0..k {
        let piv = basis[i][i];
        if rest[i] % piv != 0 {
            return None;
        }
        y[i] = rest[i] / piv;
        if y[i] != 0 {
            for (r, b) in rest.iter_mut().zip(&basis[i]).skip(i) {
                *r -= y[i] * b;
            }
        }
    }
    rest.iter().all(|&r| r == 0).then_some(y)
}

/// Smith normal form `u · a · v = diag(d)` with `v⁻¹` tracked alongside.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Mat,
    pub v: Mat,
    pub v_inv: Mat,
    pub diag: Vec<i128>,
}

pub fn smith(a: &Mat, ncols: usize) -> Smith {
    let nrows = a.len();
    let mut m = a.clone();
    let mut u = identity(nrows);
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);
    let steps = nrows.min(ncols);
    let mut diag = Vec::with_capacity(steps);

    for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if m[i][j] != 0
                        && best.is_none_or(|(bi, bj)| {
                            m[i][j].unsigned_abs() < m[bi][bj].unsigned_abs()
                        })
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(t, pi);
            u.swap(t, pi);
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
                v_inv.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..nrows {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    axpy_row(&mut m, i, t, q);
                    axpy_row(&mut u, i, t, q);
                    if m[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..ncols {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    for row in m.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    axpy_row(&mut v_inv, t, j, -q);
                    if m[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let piv = m[t][t];
            let offender = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| m[i][j] % piv != 0));
            match offender {
                Some(i) => {
                    axpy_row(&mut m, t, i, -1);
                    axpy_row(&mut u, t, i, -1);
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        diag.push(m[t][t]);
    }
    Smith { u, v, v_inv, diag }
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| row[t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn vec_mat(x: &[i128], m: &Mat) -> Vec<i128> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| x.iter().zip(m).map(|(a, row)| a * row[j]).sum())
        .collect()
}

/// A presentation of `outer / inner` for full-rank lattices `inner ⊆ outer`.
///
/// `gens[i]` are vectors of `outer` whose classes form a basis of the quotient
/// with orders `orders[i] > 1`.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub gens: Mat,
    pub orders: Vec<i128>,
    outer: Mat,
    v: Mat,
    kept: Vec<usize>,
}

impl QuotientPresentation {
    pub fn new(outer: &Mat, inner: &Mat) -> Self {
        let k = outer.len();
        let c: Mat = inner
            .iter()
            .map(|row| solve_upper(outer, row).expect("inner lattice not contained in outer"))
            .collect();
        let s = smith(&c, k);
        let basis = mat_mul(&s.v_inv, outer);
        let kept: Vec<usize> = (0..k).filter(|&i| s.diag[i] > 1).collect();
        QuotientPresentation {
            gens: kept.iter().map(|&i| basis[i].clone()).collect(),
            orders: kept.iter().map(|&i| s.diag[i]).collect(),
            outer: outer.clone(),
            v: s.v,
            kept,
        }
    }

    /// Quotient coordinates of `x ∈ outer`, reduced modulo the orders.
    pub fn project(&self, x: &[i128]) -> Option<Vec<i128>> {
        let y = solve_upper(&self.outer, x)?;
        let z = vec_mat(&y, &self.v);
        Some(
            self.kept
                .iter()
                .zip(&self.orders)
                .map(|(&i, &e)| modulo(z[i], e))
                .collect(),
        )
    }
}
