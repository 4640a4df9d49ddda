//! Discriminant forms of even integral lattices given by a Gram matrix.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fqf::{rational, Element, FiniteQuadraticForm, Rational};
use crate::zlinalg::{self, Mat};

use super::symmetry::DiscAutomorphism;

/// Exact inverse of a nonsingular integer matrix.
pub fn rational_inverse(gram: &[Vec<i64>]) -> Option<Vec<Vec<Rational>>> {
    let n = gram.len();
    let mut m: Vec<Vec<Rational>> = gram
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| rational(i128::from(x), 1)).collect();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for t in 0..2 * n {
                    let v = &f * &m[c][t];
                    m[r][t] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub(crate) fn bilinear(gram: &[Vec<i64>], x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            if g != 0 {
                acc += &x[i] * &y[j] * Rational::from_integer(BigInt::from(g));
            }
        }
    }
    acc
}

/// `L^∨/L` for an even nondegenerate lattice, presented through Smith normal form.
#[derive(Clone, Debug)]
pub struct LatticeDiscriminant {
    pub form: FiniteQuadraticForm,
    /// Dual vectors (lattice coordinates) representing the generators.
    pub generators: Vec<Vec<Rational>>,
    gram: Vec<Vec<i64>>,
    v_inv: Mat,
    diag: Vec<i128>,
    kept: Vec<usize>,
}

impl LatticeDiscriminant {
    pub fn of_gram(gram: &[Vec<i64>]) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidForm("Gram matrix is not square".into()));
        }
        if (0..n).any(|i| gram[i][i] % 2 != 0) {
            return Err(Error::InvalidForm("lattice is not even".into()));
        }
        if (0..n).any(|i| (0..n).any(|j| gram[i][j] != gram[j][i])) {
            return Err(Error::InvalidForm("Gram matrix is not symmetric".into()));
        }
        let wide: Mat = gram
            .iter()
            .map(|row| row.iter().map(|&x| i128::from(x)).collect())
            .collect();
        let s = zlinalg::smith(&wide, n);
        if s.diag.contains(&0) {
            return Err(Error::Degenerate);
        }
        let kept: Vec<usize> = (0..n).filter(|&i| s.diag[i] > 1).collect();
        let generators: Vec<Vec<Rational>> = kept
            .iter()
            .map(|&i| (0..n).map(|r| rational(s.v[r][i], s.diag[i])).collect())
            .collect();
        let k = kept.len();
        let q: Vec<Rational> = generators.iter().map(|g| bilinear(gram, g, g)).collect();
        let b: Vec<Vec<Rational>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| bilinear(gram, &generators[i], &generators[j]))
                    .collect()
            })
            .collect();
        let orders = kept.iter().map(|&i| s.diag[i] as i64).collect();
        let form = FiniteQuadraticForm::new(orders, q, b)?;
        Ok(LatticeDiscriminant {
            form,
            generators,
            gram: gram.to_vec(),
            v_inv: s.v_inv,
            diag: s.diag,
            kept,
        })
    }

    /// Class of a dual vector `x` (lattice coordinates) in `L^∨/L`.
    pub fn class_of(&self, x: &[Rational]) -> Option<Element> {
        let n = self.gram.len();
        let mut coeffs = Vec::with_capacity(self.kept.len());
        for &k in &self.kept {
            let mut y = Rational::zero();
            for t in 0..n {
                if self.v_inv[k][t] != 0 {
                    y += rational(self.v_inv[k][t], 1) * &x[t];
                }
            }
            let scaled = y * rational(self.diag[k], 1);
            if !scaled.is_integer() {
                return None;
            }
            let d = BigInt::from(self.diag[k]);
            let c = ((scaled.to_integer() % &d) + &d) % &d;
            coeffs.push(i64::try_from(c).ok()?);
        }
        for t in 0..n {
            if self.kept.contains(&t) {
                continue;
            }
            let mut y = Rational::zero();
            for s in 0..n {
                if self.v_inv[t][s] != 0 {
                    y += rational(self.v_inv[t][s], 1) * &x[s];
                }
            }
            if !(y * rational(self.diag[t], 1)).is_integer() {
                return None;
            }
        }
        Some(Element(coeffs))
    }

    /// Action on `L^∨/L` of an isometry given with columns = images of basis vectors.
    pub fn induced(&self, isometry: &[Vec<i64>]) -> Result<DiscAutomorphism> {
        let n = self.gram.len();
        let k = self.generators.len();
        let mut matrix = vec![vec![0i64; k]; k];
        for (j, g) in self.generators.iter().enumerate() {
            let image: Vec<Rational> = (0..n)
                .map(|r| {
                    (0..n).fold(Rational::zero(), |acc, c| {
                        acc + rational(i128::from(isometry[r][c]), 1) * &g[c]
                    })
                })
                .collect();
            let class = self
                .class_of(&image)
                .ok_or_else(|| Error::InvalidAutomorphism("image is not a dual vector".into()))?;
            for i in 0..k {
                matrix[i][j] = class.0[i];
            }
        }
        let auto = DiscAutomorphism::new(matrix);
        auto.validate(&self.form)?;
        Ok(auto)
    }
}
