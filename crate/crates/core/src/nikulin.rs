//! p-adic determinants of finite quadratic forms and the existence criterion
//! for primitive embeddings into the K3 lattice `2E8 ⊕ 3U`.

use serde::Serialize;

use crate::arith::{legendre, mod_inverse, modulo};
use crate::detector::KernelCandidate;
use crate::error::Result;
use crate::fqf::{homogeneous_decomposition, Element, FiniteQuadraticForm, Subgroup};
use crate::isotropy::{scaled_q, subquotient, IsotropicKernel};
use crate::lattices::PolarizedForm;

/// Rank of the K3 lattice.
pub const K3_RANK: u32 = 22;

/// A p-adic unit modulo squares, together with the p-power it was split from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SquareClass {
    pub prime: u64,
    pub valuation: u32,
    /// Odd p: the Legendre symbol (±1). p = 2: a residue mod 8, or mod 8 up to
    /// `{1, 5}` when `odd_grading` is set (then stored as 1 or 3).
    pub unit: i64,
    pub odd_grading: bool,
}

impl SquareClass {
    fn from_unit(prime: u64, valuation: u32, numer: i128, denom: i128, odd_grading: bool) -> Self {
        let unit = if prime == 2 {
            let u = modulo(numer * denom, 8) as i64;
            if odd_grading {
                coarsen(u)
            } else {
                u
            }
        } else {
            i64::from(legendre(numer * denom, prime as i128))
        };
        SquareClass {
            prime,
            valuation,
            unit,
            odd_grading: prime == 2 && odd_grading,
        }
    }

    /// Product of units; at p = 2 the result is coarse if either factor is.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prime, other.prime);
        let odd = self.odd_grading || other.odd_grading;
        let unit = if self.prime == 2 {
            let u = (self.unit * other.unit).rem_euclid(8);
            if odd {
                coarsen(u)
            } else {
                u
            }
        } else {
            self.unit * other.unit
        };
        SquareClass {
            prime: self.prime,
            valuation: self.valuation + other.valuation,
            unit,
            odd_grading: odd,
        }
    }

    /// Whether the unit class contains the integer `u` (prime to p).
    pub fn contains(&self, u: i64) -> bool {
        let other = SquareClass::from_unit(self.prime, 0, i128::from(u), 1, self.odd_grading);
        other.unit == self.unit
    }
}

fn coarsen(u: i64) -> i64 {
    if u % 4 == 1 {
        1
    } else {
        3
    }
}

/// Units `u_i` of a Jordan splitting of an odd p-primary form into `[u_i / p^k_i]`.
fn odd_jordan_units(form: &FiniteQuadraticForm, p: u64) -> Vec<(u32, i128, i128)> {
    let p = p as i128;
    let mut out = Vec::new();
    let mut current = Subgroup::whole(form);
    while !current.is_trivial() {
        let (gens, orders) = current.presentation();
        let top = *orders.iter().max().expect("nontrivial");
        let k = crate::arith::valuation(i128::from(top), p);
        let scaled = |x: &Element, y: &Element| -> i128 {
            let num = form.b_numerator(x, y) * i128::from(top);
            modulo(num / form.denom(), i128::from(top))
        };
        let tops: Vec<&Element> = gens
            .iter()
            .zip(&orders)
            .filter(|(_, &o)| o == top)
            .map(|(g, _)| g)
            .collect();
        let pivot = tops
            .iter()
            .find(|x| scaled(x, x) % p != 0)
            .map(|x| (*x).clone())
            .or_else(|| {
                tops.iter().enumerate().find_map(|(i, x)| {
                    tops[i + 1..]
                        .iter()
                        .find(|y| scaled(x, y) % p != 0)
                        .map(|y| form.add(x, y))
                })
            })
            .expect("nondegenerate odd form has a unit pivot");
        let unit = scaled(&pivot, &pivot);
        out.push((k, unit, 1));
        let inv = mod_inverse(unit, i128::from(top)).expect("unit pivot");
        let rest: Vec<Element> = gens
            .iter()
            .map(|z| {
                let c = modulo(scaled(z, &pivot) * inv, i128::from(top));
                form.sub(z, &form.scale(&pivot, c as i64))
            })
            .collect();
        current = Subgroup::generated_by(form, rest);
    }
    out
}

/// `det_p F`: the unit `u` with `det Gram(F_[p]) = u / |F_[p]|`, modulo squares.
pub fn det_p(form: &FiniteQuadraticForm, p: u64) -> Result<SquareClass> {
    let (part, _) = form.p_part(p);
    let valuation = part
        .orders()
        .iter()
        .map(|&d| crate::arith::valuation(i128::from(d), p as i128))
        .sum();
    if p != 2 {
        let class = odd_jordan_units(&part, p).into_iter().fold(
            SquareClass::from_unit(p, 0, 1, 1, false),
            |acc, (k, u, d)| acc.mul(&SquareClass::from_unit(p, k, u, d, false)),
        );
        return Ok(SquareClass { valuation, ..class });
    }
    let odd = !part.is_even_2part();
    let mut unit: i128 = 1;
    for piece in homogeneous_decomposition(&part)? {
        let k = piece.log2_exponent;
        for block in &piece.blocks {
            let u = match block.as_slice() {
                [x] => i128::from(scaled_q(&part, x, k).expect("cyclic block")),
                [x, y] => {
                    let qx = i128::from(scaled_q(&part, x, k).expect("block"));
                    let qy = i128::from(scaled_q(&part, y, k).expect("block"));
                    let bxy = crate::fqf::homogeneous_scaled_b(&part, x, y, k);
                    qx * qy - bxy * bxy
                }
                _ => unreachable!("blocks have one or two generators"),
            };
            unit = modulo(unit * u, 8);
        }
    }
    Ok(SquareClass::from_unit(2, valuation, unit, 1, odd))
}

/// `|F| · det_p F` as a p-adic unit class.
pub fn scaled_det_p(form: &FiniteQuadraticForm, p: u64) -> Result<SquareClass> {
    let d = det_p(form, p)?;
    let mut cofactor = i128::from(form.order());
    while cofactor % p as i128 == 0 {
        cofactor /= p as i128;
    }
    let c = SquareClass::from_unit(p, 0, cofactor, 1, d.odd_grading);
    Ok(SquareClass {
        valuation: 0,
        ..d.mul(&c)
    })
}

/// Signature and discriminant of the lattice whose embedding is queried.
#[derive(Clone, Debug)]
pub struct EmbeddingProfile {
    pub sigma_plus: u32,
    pub sigma_minus: u32,
    pub form: FiniteQuadraticForm,
}

impl EmbeddingProfile {
    pub fn new(sigma_plus: u32, sigma_minus: u32, form: FiniteQuadraticForm) -> Self {
        EmbeddingProfile {
            sigma_plus,
            sigma_minus,
            form,
        }
    }

    pub fn rank(&self) -> u32 {
        self.sigma_plus + self.sigma_minus
    }

    fn corank(&self) -> i64 {
        i64::from(K3_RANK) - i64::from(self.rank())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "clause")]
pub enum EmbeddingObstruction {
    Signature,
    Length,
    OddDeterminant { prime: u64 },
    TwoAdicDeterminant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingVerdict {
    pub embeds: bool,
    pub obstruction: Option<EmbeddingObstruction>,
}

impl EmbeddingVerdict {
    fn fails(o: EmbeddingObstruction) -> Self {
        EmbeddingVerdict {
            embeds: false,
            obstruction: Some(o),
        }
    }
}

/// Outcome of the determinant clause at `p`, or `None` when the clause does
/// not apply (`ℓ_p < 22 - rk`, or an odd 2-part).
pub fn determinant_clause(profile: &EmbeddingProfile, p: u64) -> Result<Option<bool>> {
    let form = &profile.form;
    if form.length_p(p) as i64 != profile.corank() {
        return Ok(None);
    }
    let class = scaled_det_p(form, p)?;
    if p == 2 {
        if !form.p_part(2).0.is_even_2part() {
            return Ok(None);
        }
        return Ok(Some(class.contains(1) || class.contains(-1)));
    }
    let target = if profile.sigma_plus % 2 == 1 { 1 } else { -1 };
    Ok(Some(class.contains(target)))
}

/// Existence of a primitive embedding into `2E8 ⊕ 3U` for an even lattice with
/// the given signature and discriminant form.
pub fn embeds_into_big_l(profile: &EmbeddingProfile) -> Result<EmbeddingVerdict> {
    if profile.sigma_plus > 3 || profile.sigma_minus > 19 {
        return Ok(EmbeddingVerdict::fails(EmbeddingObstruction::Signature));
    }
    if profile.form.length() as i64 > profile.corank() {
        return Ok(EmbeddingVerdict::fails(EmbeddingObstruction::Length));
    }
    for p in profile.form.primes().into_iter().filter(|&p| p != 2) {
        if determinant_clause(profile, p)? == Some(false) {
            return Ok(EmbeddingVerdict::fails(
                EmbeddingObstruction::OddDeterminant { prime: p },
            ));
        }
    }
    if determinant_clause(profile, 2)? == Some(false) {
        return Ok(EmbeddingVerdict::fails(
            EmbeddingObstruction::TwoAdicDeterminant,
        ));
    }
    Ok(EmbeddingVerdict {
        embeds: true,
        obstruction: None,
    })
}

/// `disc(M̃_a) = K⊥/K` for the gluing kernel `K = ⟨κ ⊕ nα⟩`, with the embedding
/// profile of `M̃_a` (signature `(2, rank S)`).
#[derive(Clone, Debug)]
pub struct TildeGenus {
    pub quotient: FiniteQuadraticForm,
    pub profile: EmbeddingProfile,
    pub verdict: EmbeddingVerdict,
}

pub fn tilde_genus(pf: &PolarizedForm, cand: &KernelCandidate) -> Result<TildeGenus> {
    let ambient = cand.extended_form(pf)?;
    let kernel = IsotropicKernel::cyclic(ambient, cand.theta.clone())?;
    let sq = subquotient(&kernel)?;
    let profile = EmbeddingProfile::new(2, pf.rank_s(), sq.form.clone());
    let verdict = embeds_into_big_l(&profile)?;
    Ok(TildeGenus {
        quotient: sq.form,
        profile,
        verdict,
    })
}

/// Whether the genus of complements to `M̃_a` in the K3 lattice is nonempty.
pub fn genus_tilde_nonempty(pf: &PolarizedForm, cand: &KernelCandidate) -> Result<bool> {
    Ok(tilde_genus(pf, cand)?.verdict.embeds)
}

/// Parity of the 2-torsion of `κ⊥ ⊂ F`: even iff `q` is integral on it.
pub fn perp_is_even(form: &FiniteQuadraticForm, kappa: &Element) -> bool {
    let half = form.denom() / 2;
    if form.denom() % 2 != 0 {
        return true;
    }
    let halves: Vec<Element> = form
        .orders()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d % 2 == 0)
        .map(|(i, &d)| form.scale(&form.generator(i), d / 2))
        .collect();
    // q mod 1 and 2b(·, κ) are F_2-linear on the 2-torsion; κ⊥ is even iff the
    // first vanishes on the kernel of the second.
    let q_bits: Vec<bool> = halves
        .iter()
        .map(|h| form.q_numerator(h) % form.denom() == half)
        .collect();
    let f_bits: Vec<bool> = halves
        .iter()
        .map(|h| form.b_numerator(h, kappa) == half)
        .collect();
    q_bits.iter().all(|&b| !b) || q_bits == f_bits
}

/// Primes whose determinant clauses hold automatically for `M̃_a`, given that
/// `S_h` itself embeds: odd `p | a²`, and `p = 2` when `n = 1` and `κ⊥` has the
/// parity of `disc S_h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoronNikuShortcut {
    pub automatic_primes: Vec<u64>,
}

pub fn coron_niku_shortcut(pf: &PolarizedForm, cand: &KernelCandidate) -> CoronNikuShortcut {
    let mut automatic_primes: Vec<u64> = crate::arith::primes_dividing(cand.a_square as u64)
        .into_iter()
        .filter(|&p| p != 2)
        .collect();
    if cand.n == 1 && perp_is_even(&pf.form, &cand.kappa) == pf.form.is_even_2part() {
        automatic_primes.insert(0, 2);
    }
    CoronNikuShortcut { automatic_primes }
}
