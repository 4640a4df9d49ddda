use crate::arith::{mod_inverse, modulo};
use crate::error::{Error, Result};

use super::{Element, FiniteQuadraticForm};

/// A homogeneous orthogonal summand `M_k` of exponent `2^k`, written as an
/// orthogonal sum of cyclic blocks and two-generator blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousPart {
    pub log2_exponent: u32,
    pub blocks: Vec<Vec<Element>>,
    pub form: FiniteQuadraticForm,
}

impl HomogeneousPart {
    pub fn generators(&self) -> Vec<Element> {
        self.blocks.iter().flatten().cloned().collect()
    }
}

pub(crate) fn log2_order(d: i64) -> Option<u32> {
    (d > 0 && d & (d - 1) == 0).then(|| d.trailing_zeros())
}

/// `2^k · b(x, y)` as an integer modulo `2^k`; requires the result to be integral.
pub(crate) fn scaled_b(form: &FiniteQuadraticForm, x: &Element, y: &Element, k: u32) -> i128 {
    let num = form.b_numerator(x, y) << k;
    debug_assert_eq!(num % form.denom(), 0);
    modulo(num / form.denom(), 1i128 << k)
}

/// Coefficients of the orthogonal projection of `y` onto a nondegenerate block
/// of exponent `2^k`.
pub(crate) fn block_coefficients(
    form: &FiniteQuadraticForm,
    block: &[Element],
    k: u32,
    y: &Element,
) -> Vec<i128> {
    let m = 1i128 << k;
    match block {
        [x] => {
            let u = scaled_b(form, x, x, k);
            let t = scaled_b(form, y, x, k);
            let inv = mod_inverse(u, m).expect("cyclic block has odd diagonal");
            vec![modulo(t * inv, m)]
        }
        [x, z] => {
            let sxx = scaled_b(form, x, x, k);
            let sxz = scaled_b(form, x, z, k);
            let szz = scaled_b(form, z, z, k);
            let tx = scaled_b(form, y, x, k);
            let tz = scaled_b(form, y, z, k);
            let det = modulo(sxx * szz - sxz * sxz, m);
            let inv = mod_inverse(det, m).expect("pair block has odd determinant");
            let c = modulo(inv * (szz * tx - sxz * tz), m);
            let d = modulo(inv * (sxx * tz - sxz * tx), m);
            vec![c, d]
        }
        _ => unreachable!("blocks have one or two generators"),
    }
}

pub(crate) fn subtract_combination(
    form: &FiniteQuadraticForm,
    y: &Element,
    block: &[Element],
    coeffs: &[i128],
) -> Element {
    let mut out = y.clone();
    for (g, &c) in block.iter().zip(coeffs) {
        let c = i64::try_from(c).expect("block coefficient fits in i64");
        out = form.sub(&out, &form.scale(g, c));
    }
    out
}

/// Splits a 2-primary form into homogeneous summands of increasing exponent.
pub fn homogeneous_decomposition(f2: &FiniteQuadraticForm) -> Result<Vec<HomogeneousPart>> {
    let mut work: Vec<(Element, u32)> = Vec::new();
    for (i, &d) in f2.orders().iter().enumerate() {
        let k = log2_order(d).ok_or(Error::NotTwoPrimary)?;
        work.push((f2.generator(i), k));
    }
    let mut blocks: Vec<(u32, Vec<Element>)> = Vec::new();
    while !work.is_empty() {
        let kmax = work.iter().map(|(_, k)| *k).max().unwrap_or(0);
        let top: Vec<usize> = (0..work.len()).filter(|&i| work[i].1 == kmax).collect();
        let odd = |i: usize, j: usize| scaled_b(f2, &work[i].0, &work[j].0, kmax) % 2 == 1;
        let chosen: Vec<usize> = if let Some(&i) = top.iter().find(|&&i| odd(i, i)) {
            vec![i]
        } else {
            let mut pair = None;
            'outer: for (a, &i) in top.iter().enumerate() {
                for &j in &top[a + 1..] {
                    if odd(i, j) {
                        pair = Some(vec![i, j]);
                        break 'outer;
                    }
                }
            }
            pair.ok_or(Error::Degenerate)?
        };
        let block: Vec<Element> = chosen.iter().map(|&i| work[i].0.clone()).collect();
        let mut rest = Vec::new();
        for (i, (g, _)) in work.into_iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let coeffs = block_coefficients(f2, &block, kmax, &g);
            let g2 = subtract_combination(f2, &g, &block, &coeffs);
            let ord = f2.element_order(&g2);
            if ord > 1 {
                rest.push((g2, log2_order(ord).ok_or(Error::NotTwoPrimary)?));
            }
        }
        work = rest;
        blocks.push((kmax, block));
    }
    blocks.sort_by_key(|(k, _)| *k);
    let mut parts: Vec<HomogeneousPart> = Vec::new();
    for (k, block) in blocks {
        match parts.last_mut() {
            Some(part) if part.log2_exponent == k => part.blocks.push(block),
            _ => parts.push(HomogeneousPart {
                log2_exponent: k,
                blocks: vec![block],
                form: FiniteQuadraticForm::trivial(),
            }),
        }
    }
    for part in parts.iter_mut() {
        let gens = part.generators();
        let orders = vec![1i64 << part.log2_exponent; gens.len()];
        part.form = f2.restrict(&gens, &orders)?;
    }
    Ok(parts)
}
