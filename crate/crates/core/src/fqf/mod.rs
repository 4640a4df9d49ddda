//! Nondegenerate finite quadratic forms on finite abelian groups.
//!
//! A form is stored on an explicit list of generators `g_i` of orders `d_i`
//! (the group is `⊕ Z/d_i`), with exact rational values `q(g_i) mod 2` and
//! `b(g_i, g_j) mod 1`. The polarization convention is
//! `q(x + y) = q(x) + q(y) + 2 b(x, y) mod 2`, so `b(x, x) = q(x) mod 1`.
//!
//! Alongside the rationals every form caches a common denominator `D` and
//! integer numerators, which is what the hot loops evaluate.

mod homogeneous;
mod json;
mod subgroup;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, modulo};
use crate::error::{Error, Result};
use crate::zlinalg;

pub(crate) use homogeneous::block_coefficients as homogeneous_block_coefficients;
pub(crate) use homogeneous::scaled_b as homogeneous_scaled_b;
pub use homogeneous::{homogeneous_decomposition, HomogeneousPart};
pub use json::{format_rational, parse_rational};
pub use subgroup::Subgroup;

pub type Rational = BigRational;

pub fn rational(numer: i128, denom: i128) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Representative of `r` modulo `m` in `[0, m)`.
pub fn reduce_mod(r: &Rational, m: i64) -> Rational {
    let m = Rational::from_integer(BigInt::from(m));
    let k = (r / &m).floor();
    r - k * m
}

/// Representative of `r` modulo 2 in `(-1, 1]`, the way forms are usually written.
pub fn signed_mod_two(r: &Rational) -> Rational {
    let c = reduce_mod(r, 2);
    if c > Rational::one() {
        c - Rational::from_integer(BigInt::from(2))
    } else {
        c
    }
}

fn to_i128(r: &BigInt) -> i128 {
    r.to_i128().expect("integer out of i128 range")
}

/// Coefficient vector of a group element with respect to the form's generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<i64>);

impl Element {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn wide(&self) -> Vec<i128> {
        self.0.iter().map(|&c| i128::from(c)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "json::FormJson", into = "json::FormJson")]
pub struct FiniteQuadraticForm {
    orders: Vec<i64>,
    q: Vec<Rational>,
    b: Vec<Vec<Rational>>,
    denom: i128,
    q_num: Vec<i128>,
    b_num: Vec<Vec<i128>>,
}

impl FiniteQuadraticForm {
    /// Builds a form from generator orders, `q(g_i)` and the table `b(g_i, g_j)`.
    /// The diagonal of `b` is ignored; it is determined by `q`.
    pub fn new(orders: Vec<i64>, q: Vec<Rational>, b: Vec<Vec<Rational>>) -> Result<Self> {
        let form = Self::build(orders, q, b)?;
        if !form.is_nondegenerate() {
            return Err(Error::Degenerate);
        }
        Ok(form)
    }

    /// Like [`FiniteQuadraticForm::new`] but tolerates a degenerate pairing.
    pub fn new_possibly_degenerate(
        orders: Vec<i64>,
        q: Vec<Rational>,
        b: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        Self::build(orders, q, b)
    }

    fn build(orders: Vec<i64>, q: Vec<Rational>, b: Vec<Vec<Rational>>) -> Result<Self> {
        let k = orders.len();
        if q.len() != k || b.len() != k || b.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidForm(format!(
                "{} orders but q has {} entries and b has {} rows",
                k,
                q.len(),
                b.len()
            )));
        }
        if let Some(d) = orders.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidForm(format!("generator order {d} < 2")));
        }
        let q: Vec<Rational> = q.iter().map(|x| reduce_mod(x, 2)).collect();
        let mut table = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                table[i][j] = if i == j {
                    reduce_mod(&q[i], 1)
                } else {
                    reduce_mod(&b[i][j], 1)
                };
            }
        }
        for i in 0..k {
            let d = Rational::from_integer(BigInt::from(orders[i]));
            let dq = &d * &q[i];
            if !dq.is_integer() || !(&d * &dq).to_integer().is_even() {
                return Err(Error::InvalidForm(format!(
                    "q(g{i}) = {} is not well defined on Z/{}",
                    q[i], orders[i]
                )));
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                if table[i][j] != table[j][i] {
                    return Err(Error::InvalidForm(format!(
                        "b is not symmetric at ({i}, {j})"
                    )));
                }
                if !(&d * &table[i][j]).is_integer() {
                    return Err(Error::InvalidForm(format!(
                        "b(g{i}, g{j}) = {} is not killed by the order {}",
                        table[i][j], orders[i]
                    )));
                }
            }
        }
        let mut denom = BigInt::one();
        for x in q.iter().chain(table.iter().flatten()) {
            denom = denom.lcm(x.denom());
        }
        let denom_r = Rational::from_integer(denom.clone());
        let q_num = q
            .iter()
            .map(|x| to_i128(&(x * &denom_r).to_integer()))
            .collect();
        let b_num = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| to_i128(&(x * &denom_r).to_integer()))
                    .collect()
            })
            .collect();
        Ok(FiniteQuadraticForm {
            orders,
            q,
            b: table,
            denom: to_i128(&denom),
            q_num,
            b_num,
        })
    }

    /// The form on the trivial group.
    pub fn trivial() -> Self {
        Self::build(vec![], vec![], vec![]).expect("trivial form")
    }

    /// The cyclic form `[m/n]`: one generator of order `n` with `q = m/n`.
    pub fn cyclic(m: i64, n: i64) -> Result<Self> {
        if n < 2 || m.gcd(&n) != 1 || (m * n) % 2 != 0 {
            return Err(Error::InvalidCyclic { m, n });
        }
        let q = rational(i128::from(m), i128::from(n));
        Self::new(vec![n], vec![q], vec![vec![Rational::zero()]])
    }

    /// `U(2^k)`: Gram `(1/2^k) [[0,1],[1,0]]`.
    pub fn u_block(k: u32) -> Result<Self> {
        Self::block(k, 0)
    }

    /// `V(2^k)`: Gram `(1/2^k) [[2,1],[1,2]]`.
    pub fn v_block(k: u32) -> Result<Self> {
        Self::block(k, 2)
    }

    fn block(k: u32, diag: i128) -> Result<Self> {
        if !(1..=40).contains(&k) {
            return Err(Error::InvalidBlock(k));
        }
        let n = 1i128 << k;
        let q = vec![rational(diag, n), rational(diag, n)];
        let off = rational(1, n);
        let b = vec![
            vec![Rational::zero(), off.clone()],
            vec![off, Rational::zero()],
        ];
        Self::new(vec![n as i64; 2], q, b)
    }

    /// Orthogonal direct sum; generators of `self` come first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k1 = self.rank();
        let k = k1 + other.rank();
        let mut orders = self.orders.clone();
        orders.extend(&other.orders);
        let mut q = self.q.clone();
        q.extend(other.q.iter().cloned());
        let mut b = vec![vec![Rational::zero(); k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                b[i][j] = self.b[i][j].clone();
            }
        }
        for i in 0..other.rank() {
            for j in 0..other.rank() {
                b[k1 + i][k1 + j] = other.b[i][j].clone();
            }
        }
        Self::build(orders, q, b).expect("direct sum of valid forms")
    }

    /// Number of generators in the stored presentation.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    /// `|F|`.
    pub fn order(&self) -> u64 {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
            .expect("group order overflows u64")
    }

    pub fn exponent(&self) -> u64 {
        self.orders
            .iter()
            .fold(1i128, |acc, &d| arith::lcm(acc, i128::from(d))) as u64
    }

    pub fn q_value(&self, i: usize) -> &Rational {
        &self.q[i]
    }

    pub fn b_value(&self, i: usize, j: usize) -> &Rational {
        &self.b[i][j]
    }

    /// Gram matrix with `q(g_i)` on the diagonal and `b(g_i, g_j)` off it.
    pub fn gram(&self) -> Vec<Vec<Rational>> {
        let mut g = self.b.clone();
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = self.q[i].clone();
        }
        g
    }

    /// Common denominator `D` of the cached integer representation.
    pub fn denom(&self) -> i128 {
        self.denom
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    // ---- elements -------------------------------------------------------

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut c = vec![0; self.rank()];
        c[i] = 1 % self.orders[i];
        Element(c)
    }

    /// Reduces arbitrary integer coefficients to the canonical element.
    pub fn element(&self, coeffs: &[i64]) -> Result<Element> {
        self.check_len(coeffs.len())?;
        Ok(self.reduce_unchecked(coeffs))
    }

    pub(crate) fn reduce_unchecked(&self, coeffs: &[i64]) -> Element {
        Element(
            coeffs
                .iter()
                .zip(&self.orders)
                .map(|(&c, &d)| c.rem_euclid(d))
                .collect(),
        )
    }

    pub(crate) fn reduce_wide(&self, coeffs: &[i128]) -> Element {
        Element(
            coeffs
                .iter()
                .zip(&self.orders)
                .map(|(&c, &d)| modulo(c, i128::from(d)) as i64)
                .collect(),
        )
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got,
            });
        }
        Ok(())
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &d)| (a + b).rem_euclid(d))
                .collect(),
        )
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &d)| (a - b).rem_euclid(d))
                .collect(),
        )
    }

    pub fn neg(&self, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &d)| (-a).rem_euclid(d))
                .collect(),
        )
    }

    pub fn scale(&self, x: &Element, k: i64) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &d)| ((i128::from(a) * i128::from(k)).rem_euclid(i128::from(d))) as i64)
                .collect(),
        )
    }

    pub fn element_order(&self, x: &Element) -> i64 {
        x.0.iter().zip(&self.orders).fold(1i64, |acc, (&c, &d)| {
            let o = d / c.gcd(&d);
            acc.lcm(&o)
        })
    }

    /// All elements in lexicographic order of their coefficient vectors.
    pub fn elements(&self) -> ElementIter {
        ElementIter {
            orders: self.orders.clone(),
            current: Some(vec![0; self.rank()]),
        }
    }

    // ---- evaluation -----------------------------------------------------

    /// Numerator of `q(x)`, i.e. `q(x) = q_numerator(x) / D` with the result in `[0, 2D)`.
    pub fn q_numerator(&self, x: &Element) -> i128 {
        let k = self.rank();
        let mut acc: i128 = 0;
        for i in 0..k {
            let xi = i128::from(x.0[i]);
            if xi == 0 {
                continue;
            }
            acc += xi * xi * self.q_num[i];
            for j in i + 1..k {
                let xj = i128::from(x.0[j]);
                if xj != 0 {
                    acc += 2 * xi * xj * self.b_num[i][j];
                }
            }
            acc = modulo(acc, 2 * self.denom);
        }
        modulo(acc, 2 * self.denom)
    }

    /// Numerator of `b(x, y)` over `D`, in `[0, D)`.
    pub fn b_numerator(&self, x: &Element, y: &Element) -> i128 {
        let k = self.rank();
        let mut acc: i128 = 0;
        for i in 0..k {
            let xi = i128::from(x.0[i]);
            if xi == 0 {
                continue;
            }
            for j in 0..k {
                let yj = i128::from(y.0[j]);
                if yj != 0 {
                    acc += xi * yj * self.b_num[i][j];
                }
            }
            acc = modulo(acc, self.denom);
        }
        modulo(acc, self.denom)
    }

    pub fn eval_q(&self, x: &Element) -> Result<Rational> {
        self.check_len(x.len())?;
        let x = self.reduce_unchecked(&x.0);
        Ok(rational(self.q_numerator(&x), self.denom))
    }

    pub fn eval_b(&self, x: &Element, y: &Element) -> Result<Rational> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let x = self.reduce_unchecked(&x.0);
        let y = self.reduce_unchecked(&y.0);
        Ok(rational(self.b_numerator(&x, &y), self.denom))
    }

    /// `q(x) ≡ 0 mod 2`.
    pub fn is_q_zero(&self, x: &Element) -> bool {
        self.q_numerator(x) == 0
    }

    // ---- structure ------------------------------------------------------

    fn is_nondegenerate(&self) -> bool {
        let radical = self.radical_lattice();
        radical
            .iter()
            .enumerate()
            .all(|(i, row)| row[i] == i128::from(self.orders[i]))
    }

    fn radical_lattice(&self) -> zlinalg::Mat {
        let k = self.rank();
        let functionals: Vec<(Vec<i128>, i128)> = (0..k)
            .map(|j| ((0..k).map(|i| self.b_num[i][j]).collect(), self.denom))
            .collect();
        zlinalg::kernel_mod(k, &functionals)
    }

    /// Restricts the form to the elements `gens`, declared to have the given
    /// orders and to be independent. Fails if the result is degenerate.
    pub fn restrict(&self, gens: &[Element], orders: &[i64]) -> Result<Self> {
        let (q, b) = self.gram_of(gens);
        Self::new(orders.to_vec(), q, b)
    }

    pub(crate) fn restrict_possibly_degenerate(
        &self,
        gens: &[Element],
        orders: &[i64],
    ) -> Result<Self> {
        let (q, b) = self.gram_of(gens);
        Self::build(orders.to_vec(), q, b)
    }

    fn gram_of(&self, gens: &[Element]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
        let q = gens
            .iter()
            .map(|g| rational(self.q_numerator(g), self.denom))
            .collect();
        let b = gens
            .iter()
            .map(|x| {
                gens.iter()
                    .map(|y| rational(self.b_numerator(x, y), self.denom))
                    .collect()
            })
            .collect();
        (q, b)
    }

    /// The p-primary part, with its generators embedded as elements of `self`.
    pub fn p_part(&self, p: u64) -> (Self, Vec<Element>) {
        let p = p as i64;
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (i, &d) in self.orders.iter().enumerate() {
            let mut pk = 1;
            let mut rest = d;
            while rest % p == 0 {
                rest /= p;
                pk *= p;
            }
            if pk > 1 {
                let mut c = vec![0; self.rank()];
                c[i] = rest % d;
                gens.push(Element(c));
                orders.push(pk);
            }
        }
        let form = self
            .restrict_possibly_degenerate(&gens, &orders)
            .expect("p-part of a valid form");
        (form, gens)
    }

    /// Primes dividing `|F|`.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .orders
            .iter()
            .flat_map(|&d| arith::primes_dividing(d as u64))
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// `ℓ_p`: minimal number of generators of the p-primary part.
    pub fn length_p(&self, p: u64) -> usize {
        self.orders
            .iter()
            .filter(|&&d| (d as u64).is_multiple_of(p))
            .count()
    }

    /// `ℓ`: minimal number of generators of the group.
    pub fn length(&self) -> usize {
        self.primes()
            .into_iter()
            .map(|p| self.length_p(p))
            .max()
            .unwrap_or(0)
    }

    /// True iff no element of order 2 has `q ≡ ±1/2 mod 2`.
    pub fn is_even_2part(&self) -> bool {
        // q mod 1 is additive on the 2-torsion, so the generators decide.
        let half = self.denom / 2;
        self.denom % 2 != 0
            || self
                .orders
                .iter()
                .enumerate()
                .filter(|(_, &d)| d % 2 == 0)
                .all(|(i, &d)| {
                    let mut c = vec![0; self.rank()];
                    c[i] = d / 2;
                    self.q_numerator(&Element(c)) % (2 * half) != half
                })
    }

    /// `{x : b(x, h) ≡ 0 for all h ∈ H}`.
    pub fn orthogonal_complement(&self, h: &Subgroup) -> Subgroup {
        let k = self.rank();
        let functionals: Vec<(Vec<i128>, i128)> = h
            .basis()
            .iter()
            .map(|hv| {
                let coeffs = (0..k)
                    .map(|i| self.b_numerator(&self.generator(i), hv))
                    .collect();
                (coeffs, self.denom)
            })
            .collect();
        Subgroup::from_lattice(
            self.orders.clone(),
            zlinalg::kernel_mod(k, &functionals),
            None,
        )
    }

    /// Exact determinant of the Gram matrix (Gaussian elimination over Q).
    pub fn gram_determinant(&self) -> Rational {
        let mut m = self.gram();
        let n = m.len();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            let piv = m[c][c].clone();
            det *= &piv;
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = &m[r][c] / &piv;
                for t in c..n {
                    let v = &f * &m[c][t];
                    m[r][t] -= v;
                }
            }
        }
        det
    }

    /// True iff every off-diagonal Gram entry vanishes.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rank()).all(|i| (0..self.rank()).all(|j| i == j || self.b[i][j].is_zero()))
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        if self.is_diagonal() {
            let parts: Vec<String> = self
                .q
                .iter()
                .zip(&self.orders)
                .map(|(q, &d)| {
                    let s = signed_mod_two(q);
                    if s.denom() == &BigInt::from(d) {
                        format!("[{}/{}]", s.numer(), s.denom())
                    } else {
                        format!("[{s} on Z/{d}]")
                    }
                })
                .collect();
            return write!(f, "{}", parts.join("⊕"));
        }
        let orders: Vec<String> = self.orders.iter().map(|d| format!("Z/{d}")).collect();
        let rows: Vec<String> = self
            .gram()
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "{} with Gram [{}]", orders.join("×"), rows.join(", "))
    }
}

/// Lexicographic odometer over `⊕ Z/d_i`.
#[derive(Clone, Debug)]
pub struct ElementIter {
    orders: Vec<i64>,
    current: Option<Vec<i64>>,
}

impl Iterator for ElementIter {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.orders[pos] {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(Element(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        rational(n, d)
    }

    #[test]
    fn cyclic_validation() {
        assert!(FiniteQuadraticForm::cyclic(-7, 8).is_ok());
        assert!(FiniteQuadraticForm::cyclic(1, 2).is_ok());
        assert_eq!(
            FiniteQuadraticForm::cyclic(2, 4),
            Err(Error::InvalidCyclic { m: 2, n: 4 })
        );
        assert!(FiniteQuadraticForm::cyclic(1, 3).is_err());
    }

    #[test]
    fn cyclic_values() {
        let f = FiniteQuadraticForm::cyclic(3, 4).unwrap();
        let x = f.element(&[2]).unwrap();
        assert_eq!(f.eval_q(&x).unwrap(), r(1, 1));
        let f = FiniteQuadraticForm::cyclic(-7, 8).unwrap();
        assert_eq!(f.q_value(0), &r(9, 8));
        let x = f.element(&[3]).unwrap();
        // 9 · (-7/8) = -63/8 ≡ 1/8 mod 2.
        assert_eq!(f.eval_q(&x).unwrap(), r(1, 8));
    }

    #[test]
    fn blocks() {
        let u = FiniteQuadraticForm::u_block(1).unwrap();
        assert_eq!(u.q_value(0), &r(0, 1));
        assert_eq!(u.b_value(0, 1), &r(1, 2));
        let uv = u.element(&[1, 1]).unwrap();
        assert_eq!(u.eval_q(&uv).unwrap(), r(1, 1));
        let v = FiniteQuadraticForm::v_block(1).unwrap();
        assert_eq!(v.q_value(0), &r(1, 1));
        assert_eq!(v.q_value(1), &r(1, 1));
        let u4 = FiniteQuadraticForm::u_block(2).unwrap();
        let two_u = u4.element(&[2, 0]).unwrap();
        let vv = u4.generator(1);
        assert_eq!(u4.eval_q(&two_u).unwrap(), r(0, 1));
        assert_eq!(u4.eval_b(&two_u, &vv).unwrap(), r(1, 2));
        assert!(FiniteQuadraticForm::u_block(0).is_err());
    }

    #[test]
    fn direct_sums_and_lengths() {
        let a = FiniteQuadraticForm::cyclic(-7, 8).unwrap();
        let b = FiniteQuadraticForm::cyclic(-2, 3).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s.orders(), &[8, 3]);
        assert_eq!(s.order(), 24);
        assert_eq!(a.direct_sum(&FiniteQuadraticForm::trivial()), a);
        let h = FiniteQuadraticForm::cyclic(1, 2).unwrap();
        assert_eq!(h.direct_sum(&h).length_p(2), 2);
        let f = FiniteQuadraticForm::cyclic(-6, 7).unwrap();
        assert_eq!(f.length_p(2), 0);
        assert_eq!(f.length_p(7), 1);
        assert_eq!(FiniteQuadraticForm::u_block(2).unwrap().length_p(2), 2);
    }

    #[test]
    fn p_parts_of_a5() {
        let f = FiniteQuadraticForm::cyclic(-5, 6).unwrap();
        let (two, gens) = f.p_part(2);
        assert_eq!(two.orders(), &[2]);
        assert_eq!(two.q_value(0), &r(1, 2));
        assert_eq!(gens, vec![Element(vec![3])]);
        let (three, _) = f.p_part(3);
        assert_eq!(three.q_value(0), &r(2, 3));
        let (seven, _) = FiniteQuadraticForm::cyclic(-7, 8).unwrap().p_part(7);
        assert!(seven.is_trivial());
    }

    #[test]
    fn evenness() {
        assert!(FiniteQuadraticForm::u_block(1).unwrap().is_even_2part());
        assert!(!FiniteQuadraticForm::cyclic(1, 2).unwrap().is_even_2part());
        assert!(FiniteQuadraticForm::cyclic(1, 4).unwrap().is_even_2part());
    }

    #[test]
    fn degenerate_rejected() {
        let res = FiniteQuadraticForm::new(vec![2], vec![r(0, 1)], vec![vec![r(0, 1)]]);
        assert_eq!(res, Err(Error::Degenerate));
        let ill = FiniteQuadraticForm::new(vec![4], vec![r(1, 8)], vec![vec![r(0, 1)]]);
        assert!(matches!(ill, Err(Error::InvalidForm(_))));
    }

    #[test]
    fn display_signed() {
        let f = FiniteQuadraticForm::cyclic(-7, 8)
            .unwrap()
            .direct_sum(&FiniteQuadraticForm::cyclic(2, 3).unwrap());
        assert_eq!(f.to_string(), "[-7/8]⊕[2/3]");
    }

    #[test]
    fn element_iteration_is_lexicographic() {
        let f = FiniteQuadraticForm::u_block(1).unwrap();
        let all: Vec<Vec<i64>> = f.elements().map(|e| e.0).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(FiniteQuadraticForm::trivial().elements().count(), 1);
    }

    #[test]
    fn orthogonal_complements() {
        let u = FiniteQuadraticForm::u_block(1).unwrap();
        let h = Subgroup::generated_by(&u, vec![u.generator(0)]);
        let perp = u.orthogonal_complement(&h);
        assert_eq!(perp.order(), 2);
        assert!(perp.contains(&u.generator(0)));
        assert!(!perp.contains(&u.generator(1)));
        let all = u.orthogonal_complement(&Subgroup::trivial(&u));
        assert_eq!(all.order(), 4);
        let q = FiniteQuadraticForm::cyclic(1, 4).unwrap();
        let f = q.direct_sum(&q);
        let h = Subgroup::generated_by(&f, vec![f.element(&[1, 1]).unwrap()]);
        let perp = f.orthogonal_complement(&h);
        assert_eq!(perp.order(), 4);
        assert!(perp.contains(&f.element(&[1, 3]).unwrap()));
    }

    #[test]
    fn dimension_mismatch() {
        let f = FiniteQuadraticForm::cyclic(1, 2).unwrap();
        assert!(matches!(
            f.eval_q(&Element(vec![1, 0])),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        ));
    }
}
