//! Isotropic subgroups, the subquotient `K⊥/K`, and the splitting of a 2-primary
//! form along a cyclic subgroup.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqf::HomogeneousPart;
use crate::fqf::{homogeneous_decomposition, Element, FiniteQuadraticForm, Subgroup};
use crate::zlinalg::QuotientPresentation;

const LEX_MIN_LIMIT: u64 = 4096;

/// True iff `q` vanishes identically on `h`.
pub fn is_isotropic(form: &FiniteQuadraticForm, h: &Subgroup) -> bool {
    let basis = h.basis();
    basis.iter().enumerate().all(|(i, x)| {
        form.is_q_zero(x) && basis[i + 1..].iter().all(|y| form.b_numerator(x, y) == 0)
    })
}

/// An isotropic subgroup together with its ambient form.
#[derive(Clone, Debug)]
pub struct IsotropicKernel {
    ambient: FiniteQuadraticForm,
    subgroup: Subgroup,
}

impl IsotropicKernel {
    pub fn new(ambient: FiniteQuadraticForm, subgroup: Subgroup) -> Result<Self> {
        if !is_isotropic(&ambient, &subgroup) {
            return Err(Error::NotIsotropic);
        }
        Ok(IsotropicKernel { ambient, subgroup })
    }

    pub fn cyclic(ambient: FiniteQuadraticForm, generator: Element) -> Result<Self> {
        let subgroup = Subgroup::generated_by(&ambient, vec![generator]);
        Self::new(ambient, subgroup)
    }

    pub fn ambient(&self) -> &FiniteQuadraticForm {
        &self.ambient
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }
}

/// The form `K⊥/K` together with the projection `K⊥ → K⊥/K`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub form: FiniteQuadraticForm,
    /// Lexicographically minimal ambient representatives of the generators.
    pub representatives: Vec<Element>,
    perp: Subgroup,
    kernel: Subgroup,
    presentation: QuotientPresentation,
}

impl Subquotient {
    pub fn perp(&self) -> &Subgroup {
        &self.perp
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// Coordinates of the class of `x ∈ K⊥`; `None` when `x ∉ K⊥`.
    pub fn project(&self, x: &Element) -> Option<Element> {
        let coords = self.presentation.project(&x.wide())?;
        Some(Element(coords.into_iter().map(|c| c as i64).collect()))
    }

    /// Matrix (columns = images of generators) of the map induced on `K⊥/K` by an
    /// ambient map that preserves `K⊥`.
    pub fn induced_action(&self, map: impl Fn(&Element) -> Element) -> Option<Vec<Vec<i64>>> {
        let k = self.representatives.len();
        let mut mat = vec![vec![0; k]; k];
        for (j, w) in self.representatives.iter().enumerate() {
            let image = self.project(&map(w))?;
            for i in 0..k {
                mat[i][j] = image.0[i];
            }
        }
        Some(mat)
    }
}

/// `K⊥/K` for an isotropic `K`.
pub fn subquotient(kernel: &IsotropicKernel) -> Result<Subquotient> {
    let form = kernel.ambient();
    let k_sub = kernel.subgroup();
    let perp = form.orthogonal_complement(k_sub);
    let presentation = QuotientPresentation::new(perp.lattice(), k_sub.lattice());
    let k_elements = (k_sub.order() <= LEX_MIN_LIMIT).then(|| k_sub.elements());
    let representatives: Vec<Element> = presentation
        .gens
        .iter()
        .map(|g| {
            let x = form.reduce_wide(g);
            match &k_elements {
                Some(ks) => ks.iter().map(|kx| form.add(&x, kx)).min().unwrap_or(x),
                None => x,
            }
        })
        .collect();
    let orders: Vec<i64> = presentation.orders.iter().map(|&e| e as i64).collect();
    let quotient = form.restrict(&representatives, &orders)?;
    Ok(Subquotient {
        form: quotient,
        representatives,
        perp,
        kernel: k_sub.clone(),
        presentation,
    })
}

// ---- splitting along a cyclic subgroup ---------------------------------------

/// One block `N_s` of a splitting: either cyclic `⟨u⟩` with Gram `[μ]/2^{m+r}`,
/// `μ` odd, or `⟨u, v⟩` with Gram `[[μ, 1], [1, ν]]/2^{m+r}`, `μ` even.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitBlock {
    pub m: u32,
    pub r: u32,
    pub u: Element,
    pub v: Option<Element>,
    pub mu: i64,
    pub nu: Option<i64>,
}

impl SplitBlock {
    pub fn is_cyclic(&self) -> bool {
        self.v.is_none()
    }

    pub fn log2_order(&self) -> u32 {
        self.m + self.r
    }
}

/// `F2 ≅ N_0 ⊕ ⊕ N_s` with `κ = Σ 2^{r_s} u_s`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitDecomposition {
    pub base: FiniteQuadraticForm,
    pub base_generators: Vec<Element>,
    pub blocks: Vec<SplitBlock>,
    pub kappa_parts: Vec<Element>,
}

struct Coordinates<'a> {
    parts: &'a [HomogeneousPart],
}

impl Coordinates<'_> {
    /// Integer coordinates of `y` in each homogeneous part (block generators in order).
    fn of(&self, form: &FiniteQuadraticForm, y: &Element) -> Vec<Vec<i64>> {
        self.parts
            .iter()
            .map(|part| {
                part.blocks
                    .iter()
                    .flat_map(|block| {
                        crate::fqf::homogeneous_block_coefficients(
                            form,
                            block,
                            part.log2_exponent,
                            y,
                        )
                    })
                    .map(|c| c as i64)
                    .collect()
            })
            .collect()
    }
}

fn combine(form: &FiniteQuadraticForm, gens: &[Element], coeffs: &[i64]) -> Element {
    gens.iter().zip(coeffs).fold(form.zero(), |acc, (g, &c)| {
        form.add(&acc, &form.scale(g, c))
    })
}

fn v2(c: i64) -> u32 {
    c.trailing_zeros()
}

/// `2^k q(x)` as an integer modulo `2^{k+1}`, if integral.
pub(crate) fn scaled_q(form: &FiniteQuadraticForm, x: &Element, k: u32) -> Option<i64> {
    let num = form.q_numerator(x) << k;
    (num % form.denom() == 0).then(|| (num / form.denom()).rem_euclid(2i128 << k) as i64)
}

/// Splits a nondegenerate 2-primary form along the cyclic subgroup `⟨κ⟩`.
pub fn split_off_cyclic(f2: &FiniteQuadraticForm, kappa: &Element) -> Result<SplitDecomposition> {
    let kappa = f2.element(kappa.coeffs())?;
    if kappa.is_zero() {
        return Err(Error::ZeroKappa);
    }
    let parts = homogeneous_decomposition(f2)?;
    let coords = Coordinates { parts: &parts };
    let part_gens: Vec<Vec<Element>> = parts.iter().map(HomogeneousPart::generators).collect();

    let mut remaining = kappa.clone();
    let mut blocks = Vec::new();
    let mut kappa_parts = Vec::new();
    while !remaining.is_zero() {
        let c = coords.of(f2, &remaining);
        // valuation and order of each homogeneous component
        let comps: Vec<Option<(u32, u32)>> = parts
            .iter()
            .zip(&c)
            .map(|(part, cs)| {
                let e = part.log2_exponent;
                let val = cs.iter().filter(|&&x| x != 0).map(|&x| v2(x)).min()?;
                Some((val, e - val))
            })
            .collect();
        let r = comps
            .iter()
            .flatten()
            .map(|&(val, _)| val)
            .min()
            .expect("nonzero");
        let n_idx = (0..parts.len())
            .filter(|&i| matches!(comps[i], Some((val, _)) if val == r))
            .max()
            .expect("some component attains r");
        let n = parts[n_idx].log2_exponent;
        let m = n - r;
        let mut kappa_s = f2.zero();
        let mut u = f2.zero();
        for (i, comp) in comps.iter().enumerate() {
            if let Some((_, log_ord)) = comp {
                if *log_ord <= m {
                    let part_elem = combine(f2, &part_gens[i], &c[i]);
                    kappa_s = f2.add(&kappa_s, &part_elem);
                    let divided: Vec<i64> = c[i].iter().map(|&x| x >> r).collect();
                    u = f2.add(&u, &combine(f2, &part_gens[i], &divided));
                }
            }
        }
        let lambda = scaled_q(f2, &u, n).expect("2^n q(u) is integral for ord u = 2^n");
        let block = if lambda % 2 == 1 {
            SplitBlock {
                m,
                r,
                u: u.clone(),
                v: None,
                mu: lambda,
                nu: None,
            }
        } else {
            let target = f2.denom() >> n;
            let v = parts[n_idx]
                .form
                .elements()
                .map(|e| combine(f2, &part_gens[n_idx], e.coeffs()))
                .find(|v| f2.b_numerator(&u, v) == target)
                .ok_or(Error::Degenerate)?;
            let nu = scaled_q(f2, &v, n).expect("v has order dividing 2^n");
            SplitBlock {
                m,
                r,
                u: u.clone(),
                v: Some(v),
                mu: lambda,
                nu: Some(nu),
            }
        };
        blocks.push(block);
        kappa_parts.push(kappa_s.clone());
        remaining = f2.sub(&remaining, &kappa_s);
    }

    let mut span = Vec::new();
    for b in &blocks {
        span.push(b.u.clone());
        if let Some(v) = &b.v {
            span.push(v.clone());
        }
    }
    let span = Subgroup::generated_by(f2, span);
    let complement = f2.orthogonal_complement(&span);
    let (base_generators, orders) = complement.presentation();
    let base = f2.restrict(&base_generators, &orders)?;
    Ok(SplitDecomposition {
        base,
        base_generators,
        blocks,
        kappa_parts,
    })
}

/// Shape of the 2-primary splitting along `κ` when `ord κ = 2^m` and
/// `q(κ) = ξ/2^{m-1}` with `ξ` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GluingCase {
    /// `κ = 0`.
    Trivial,
    /// One two-generator block at exponent `2^m`, `κ = u_1`.
    SinglePair,
    /// Cyclic block at `2^{m-1}` and two-generator block at `2^{m+1}`, `κ = u_1 + 2u_2`.
    CyclicBelowPairAbove,
    /// Two-generator block at `2^{m-1}` and cyclic block at `2^{m+1}`, `κ = u_1 + 2u_2`.
    PairBelowCyclicAbove,
    /// Cyclic block at `2^{m-1}` and cyclic block at `2^{m+r_2}`, `r_2 > 1`.
    CyclicBelowDeepCyclic,
    /// Cyclic block at `2^{m-1}` and two-generator block at `2^{m+r_2}`, `r_2 > 1`.
    CyclicBelowDeepPair,
    /// Cyclic block at `2^n`, `n ≤ m-2`, and cyclic block at `2^{m+1}`.
    LowCyclicCyclicAbove,
    /// Two-generator block at `2^n`, `n ≤ m-2`, and cyclic block at `2^{m+1}`.
    LowPairCyclicAbove,
    /// One cyclic block at `2^{m+1}`, `κ = 2u_1`.
    DoubledCyclic,
}

/// Checks `ord κ = 2^m`, `q(κ) = ξ/2^{m-1}` with `ξ` odd.
pub fn check_kappa_square(f2: &FiniteQuadraticForm, kappa: &Element, m: u32) -> Result<()> {
    if m < 1 {
        return Err(Error::BadKappa("m must be positive".into()));
    }
    let ord = f2.element_order(kappa);
    if ord != 1i64 << m {
        return Err(Error::BadKappa(format!("order {ord} is not 2^{m}")));
    }
    match scaled_q(f2, kappa, m - 1) {
        Some(xi) if xi % 2 == 1 => Ok(()),
        _ => Err(Error::BadKappa(format!(
            "2^{} q(kappa) is not an odd integer",
            m - 1
        ))),
    }
}

pub fn classify_gluing_case(
    f2: &FiniteQuadraticForm,
    kappa: &Element,
    m: u32,
) -> Result<(GluingCase, Option<SplitDecomposition>)> {
    let kappa = f2.element(kappa.coeffs())?;
    if kappa.is_zero() {
        return Ok((GluingCase::Trivial, None));
    }
    check_kappa_square(f2, &kappa, m)?;
    let split = split_off_cyclic(f2, &kappa)?;
    let tag = match split.blocks.as_slice() {
        [b] if b.r == 0 && b.m == m && !b.is_cyclic() => GluingCase::SinglePair,
        [b] if b.r == 1 && b.m == m && b.is_cyclic() => GluingCase::DoubledCyclic,
        [b1, b2] if b1.r == 0 && b1.m + 1 == m && b2.m == m => {
            match (b1.is_cyclic(), b2.r, b2.is_cyclic()) {
                (true, 1, false) => GluingCase::CyclicBelowPairAbove,
                (false, 1, true) => GluingCase::PairBelowCyclicAbove,
                (true, r2, true) if r2 > 1 => GluingCase::CyclicBelowDeepCyclic,
                (true, r2, false) if r2 > 1 => GluingCase::CyclicBelowDeepPair,
                _ => return Err(unexpected(&split)),
            }
        }
        [b1, b2] if b1.r == 0 && b1.m + 2 <= m && b2.r == 1 && b2.m == m && b2.is_cyclic() => {
            if b1.is_cyclic() {
                GluingCase::LowCyclicCyclicAbove
            } else {
                GluingCase::LowPairCyclicAbove
            }
        }
        _ => return Err(unexpected(&split)),
    };
    Ok((tag, Some(split)))
}

fn unexpected(split: &SplitDecomposition) -> Error {
    let shape: Vec<String> = split
        .blocks
        .iter()
        .map(|b| {
            format!(
                "(m={}, r={}, {})",
                b.m,
                b.r,
                if b.is_cyclic() { "cyclic" } else { "pair" }
            )
        })
        .collect();
    Error::BadKappa(format!("unexpected splitting shape {}", shape.join(" ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqf::rational;

    fn cyc(m: i64, n: i64) -> FiniteQuadraticForm {
        FiniteQuadraticForm::cyclic(m, n).unwrap()
    }

    #[test]
    fn isotropy_checks() {
        let u = FiniteQuadraticForm::u_block(1).unwrap();
        assert!(is_isotropic(
            &u,
            &Subgroup::generated_by(&u, vec![u.generator(0)])
        ));
        let h = cyc(1, 2);
        assert!(!is_isotropic(&h, &Subgroup::whole(&h)));
    }

    #[test]
    fn subquotient_examples() {
        let u = FiniteQuadraticForm::u_block(1).unwrap();
        let k = IsotropicKernel::cyclic(u.clone(), u.generator(0)).unwrap();
        assert!(subquotient(&k).unwrap().form.is_trivial());

        let u4 = FiniteQuadraticForm::u_block(2).unwrap();
        let k = IsotropicKernel::cyclic(u4.clone(), u4.element(&[2, 0]).unwrap()).unwrap();
        let sq = subquotient(&k).unwrap();
        assert_eq!(sq.form.order(), 4);
        assert!(sq.form.is_even_2part());
        assert_eq!(sq.form.gram_determinant(), rational(-1, 4));
        assert!(sq.project(&u4.generator(0)).is_some());
        assert!(sq.project(&u4.generator(1)).is_none());

        let f = cyc(-7, 8).direct_sum(&cyc(2, 3));
        let k = IsotropicKernel::new(f.clone(), Subgroup::trivial(&f)).unwrap();
        let sq = subquotient(&k).unwrap();
        assert_eq!(sq.form.order(), f.order());
    }

    #[test]
    fn non_isotropic_rejected() {
        let h = cyc(1, 2);
        assert!(matches!(
            IsotropicKernel::cyclic(h.clone(), h.generator(0)),
            Err(Error::NotIsotropic)
        ));
    }

    #[test]
    fn split_u2() {
        let u = FiniteQuadraticForm::u_block(1).unwrap();
        let s = split_off_cyclic(&u, &u.generator(0)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        let b = &s.blocks[0];
        assert_eq!((b.m, b.r, b.mu), (1, 0, 0));
        assert!(!b.is_cyclic());
        assert!(s.base.is_trivial());
    }

    #[test]
    fn split_cyclic_summand() {
        let f = cyc(-7, 8).direct_sum(&cyc(-3, 4));
        let s = split_off_cyclic(&f, &f.generator(0)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert!(s.blocks[0].is_cyclic());
        assert_eq!(s.blocks[0].m, 3);
        assert_eq!(s.base.order(), 4);
        assert_eq!(s.base.q_value(0), &rational(5, 4));
    }

    #[test]
    fn split_two_steps() {
        let f = cyc(1, 2).direct_sum(&FiniteQuadraticForm::u_block(3).unwrap());
        let kappa = f.element(&[1, 2, 0]).unwrap();
        let s = split_off_cyclic(&f, &kappa).unwrap();
        assert_eq!(s.blocks.len(), 2);
        let (b1, b2) = (&s.blocks[0], &s.blocks[1]);
        assert_eq!((b1.m, b1.r, b1.mu), (1, 0, 1));
        assert!(b1.is_cyclic());
        assert_eq!((b2.m, b2.r), (2, 1));
        assert!(!b2.is_cyclic());
        let sum = s.kappa_parts.iter().fold(f.zero(), |acc, x| f.add(&acc, x));
        assert_eq!(sum, kappa);
        assert!(s.base.is_trivial());
        assert!(matches!(
            split_off_cyclic(&f, &f.zero()),
            Err(Error::ZeroKappa)
        ));
    }

    #[test]
    fn gluing_case_tags() {
        // Single two-generator block: κ = u_1 in V(2) has q = 1, order 2.
        let v = FiniteQuadraticForm::v_block(1).unwrap();
        let (tag, _) = classify_gluing_case(&v, &v.generator(0), 1).unwrap();
        assert_eq!(tag, GluingCase::SinglePair);
        // κ = 2u_1 in [1/8]: order 4, q = 4/8 = 1/2.
        let f = cyc(1, 8);
        let (tag, _) = classify_gluing_case(&f, &f.element(&[2]).unwrap(), 2).unwrap();
        assert_eq!(tag, GluingCase::DoubledCyclic);
        // κ = u_1 + 2u_2 with u_1 ∈ [1/2], u_2 ∈ U(8), m = 2: q = 1/2.
        let f = cyc(1, 2).direct_sum(&FiniteQuadraticForm::u_block(3).unwrap());
        let (tag, _) = classify_gluing_case(&f, &f.element(&[1, 2, 0]).unwrap(), 2).unwrap();
        assert_eq!(tag, GluingCase::CyclicBelowPairAbove);
        assert!(classify_gluing_case(&f, &f.element(&[1, 2, 0]).unwrap(), 3).is_err());
    }
}
