//! Search for involutive skew-automorphisms acting on the transcendental
//! lattice by a reflection.
//!
//! For rank `S ≤ 18` the search runs over gluing kernels `K = ⟨κ ⊕ nα⟩` inside
//! `disc S_h ⊕ [1/a²]`, involutions `φ` of `disc S_h` induced by diagram
//! symmetries and `±id_h`, and the genus of complements of `M̃_a`. For rank 19
//! it delegates to the reflection test on a caller-supplied `T`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::fqf::{Element, FiniteQuadraticForm};
use crate::isotropy::{subquotient, IsotropicKernel, Subquotient};
use crate::lattices::{
    disc_involutions, polarized_disc, skew_search, BinaryIsometry, BinaryLattice, DiscAutomorphism,
    PolarizedForm, RootSpec,
};
use crate::nikulin::{embeds_into_big_l, EmbeddingProfile};

/// Caveat attached to every report.
pub const SCOPE_NOTE: &str = "A witness shows that S_h extends to some abstract homological type \
with an involutive skew-automorphism; it does not single out a particular homological type. \
Conversely, none_exists rules out every homological type extending S_h.";

/// Number of candidates evaluated speculatively before results are committed.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Quartic,
    Sextic,
    Custom(i64),
}

impl Model {
    pub fn h_square(&self) -> i64 {
        match self {
            Model::Quartic => 4,
            Model::Sextic => 2,
            Model::Custom(h2) => *h2,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Quartic => f.write_str("quartic"),
            Model::Sextic => f.write_str("sextic"),
            Model::Custom(h2) => write!(f, "h2={h2}"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidModel(s.to_string());
        match s.trim() {
            "quartic" => Ok(Model::Quartic),
            "sextic" | "sextic-planar" => Ok(Model::Sextic),
            other => {
                let h2: i64 = other
                    .strip_prefix("h2=")
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if h2 < 2 || h2 % 2 != 0 {
                    return Err(bad());
                }
                Ok(Model::Custom(h2))
            }
        }
    }
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `K = ⟨ϑ⟩` with `ϑ = κ ⊕ nα` in `disc S_h ⊕ [1/a²]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KernelCandidate {
    pub a_square: i64,
    pub n: i64,
    pub kappa: Element,
    pub theta: Element,
}

impl KernelCandidate {
    /// Checks `order(κ) = a²/n` and `q(κ) ≡ -n²/a²`.
    pub fn new(pf: &PolarizedForm, a_square: i64, n: i64, kappa: Element) -> Result<Self> {
        let form = &pf.form;
        let kappa = form.element(kappa.coeffs())?;
        if a_square <= 0 || a_square % 2 != 0 || !(n == 1 || n == 2) || a_square % n != 0 {
            return Err(Error::BadKappa(format!("a² = {a_square}, n = {n}")));
        }
        if form.element_order(&kappa) != a_square / n {
            return Err(Error::BadKappa(format!(
                "order of κ is {}, expected {}",
                form.element_order(&kappa),
                a_square / n
            )));
        }
        let target = crate::fqf::reduce_mod(
            &crate::fqf::rational(-i128::from(n * n), i128::from(a_square)),
            2,
        );
        if form.eval_q(&kappa)? != target {
            return Err(Error::BadKappa("q(κ) ≢ -n²/a²".into()));
        }
        let mut theta = kappa.coeffs().to_vec();
        theta.push(n);
        Ok(KernelCandidate {
            a_square,
            n,
            kappa,
            theta: Element(theta),
        })
    }

    /// `disc S_h ⊕ [1/a²]`.
    pub fn extended_form(&self, pf: &PolarizedForm) -> Result<FiniteQuadraticForm> {
        Ok(pf
            .form
            .direct_sum(&FiniteQuadraticForm::cyclic(1, self.a_square)?))
    }

    pub fn kernel(&self, pf: &PolarizedForm) -> Result<IsotropicKernel> {
        IsotropicKernel::cyclic(self.extended_form(pf)?, self.theta.clone())
    }
}

/// All even divisors of `2·exp(disc S_h)`, ascending.
pub fn enumerate_a_squares(pf: &PolarizedForm) -> Vec<i64> {
    divisors(2 * pf.form.exponent())
        .into_iter()
        .filter(|d| d % 2 == 0)
        .map(|d| d as i64)
        .collect()
}

struct ElementData {
    element: Element,
    order: i64,
    q_num: i128,
}

fn element_data(pf: &PolarizedForm) -> Vec<ElementData> {
    pf.form
        .elements()
        .map(|x| ElementData {
            order: pf.form.element_order(&x),
            q_num: pf.form.q_numerator(&x),
            element: x,
        })
        .collect()
}

fn candidates_from(
    pf: &PolarizedForm,
    data: &[ElementData],
    a_square: i64,
    n: i64,
) -> Vec<KernelCandidate> {
    if a_square % n != 0 {
        return Vec::new();
    }
    let denom = pf.form.denom();
    // -n²/a² as a numerator over the form's denominator, if representable
    let scaled = -i128::from(n * n) * denom;
    if scaled % i128::from(a_square) != 0 {
        return Vec::new();
    }
    let target = (scaled / i128::from(a_square)).rem_euclid(2 * denom);
    data.iter()
        .filter(|d| d.order == a_square / n && d.q_num == target)
        .map(|d| {
            let mut theta = d.element.coeffs().to_vec();
            theta.push(n);
            KernelCandidate {
                a_square,
                n,
                kappa: d.element.clone(),
                theta: Element(theta),
            }
        })
        .collect()
}

/// All `κ` with `order(κ) = a²/n` and `q(κ) ≡ -n²/a²`, for `n = 1, 2`, in
/// lexicographic order.
pub fn kernel_candidates(pf: &PolarizedForm, a_square: i64) -> Vec<KernelCandidate> {
    let data = element_data(pf);
    [1, 2]
        .into_iter()
        .flat_map(|n| candidates_from(pf, &data, a_square, n))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NoKappa,
    NoInvolutionCond2,
    NoInvolutionCond3,
    GenusEmpty,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::NoKappa => "no_kappa",
            FailureReason::NoInvolutionCond2 => "no_involution_cond2",
            FailureReason::NoInvolutionCond3 => "no_involution_cond3",
            FailureReason::GenusEmpty => "genus_empty",
        }
    }
}

/// Outcome of testing one involution against one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvolutionCheck {
    Passes,
    Fails(FailureReason),
}

/// `φ ⊕ (-id)` on `disc S_h ⊕ [1/a²]`.
fn extend_by_minus_one(phi: &DiscAutomorphism) -> DiscAutomorphism {
    let k = phi.dim();
    let mut m: Vec<Vec<i64>> = phi
        .matrix()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(0);
            r
        })
        .collect();
    let mut last = vec![0; k + 1];
    last[k] = -1;
    m.push(last);
    DiscAutomorphism::new(m)
}

fn check_with_subquotient(
    pf: &PolarizedForm,
    cand: &KernelCandidate,
    sq: &Subquotient,
    ambient: &FiniteQuadraticForm,
    phi: &DiscAutomorphism,
) -> InvolutionCheck {
    let form = &pf.form;
    if phi.apply(form, &cand.kappa) != form.neg(&cand.kappa) {
        return InvolutionCheck::Fails(FailureReason::NoInvolutionCond2);
    }
    let big = extend_by_minus_one(phi);
    let identity_on_quotient = sq.perp().basis().iter().all(|w| {
        let diff = ambient.sub(&big.apply(ambient, w), w);
        sq.kernel().contains(&diff)
    });
    if identity_on_quotient {
        InvolutionCheck::Passes
    } else {
        InvolutionCheck::Fails(FailureReason::NoInvolutionCond3)
    }
}

/// Tests one involution: it must negate kappa and act trivially on `K⊥/K`.
pub fn check_candidate(
    pf: &PolarizedForm,
    cand: &KernelCandidate,
    phi: &DiscAutomorphism,
) -> Result<InvolutionCheck> {
    phi.validate(&pf.form)?;
    if !phi.is_involution(&pf.form) {
        return Err(Error::InvalidAutomorphism("not an involution".into()));
    }
    let kernel = cand.kernel(pf)?;
    let sq = subquotient(&kernel)?;
    Ok(check_with_subquotient(pf, cand, &sq, kernel.ambient(), phi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WitnessFound,
    NoneExists,
    Inconclusive,
    NeedsTGram,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::WitnessFound => "witness_found",
            Verdict::NoneExists => "none_exists",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NeedsTGram => "needs_T_gram",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Corlem1,
    Corlem2,
    #[serde(rename = "rankT2")]
    RankT2,
    #[serde(rename = "rankT3")]
    RankT3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Kernel {
        a_square: i64,
        n: i64,
        kappa: Element,
        phi: DiscAutomorphism,
    },
    Reflection {
        matrix: [[i64; 2]; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub a_square: i64,
    pub n: i64,
    pub kappa: Option<Element>,
    pub reason: Option<FailureReason>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionReport {
    pub model: Model,
    pub spec: RootSpec,
    pub h_square: i64,
    pub rank_s: u32,
    pub rank_t: u32,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub conclusiveness_basis: Option<Basis>,
    pub disc: String,
    pub involutions: usize,
    pub trace: Vec<TraceEntry>,
    pub scope_note: &'static str,
}

impl DetectionReport {
    pub fn is_conclusive(&self) -> bool {
        matches!(self.verdict, Verdict::WitnessFound | Verdict::NoneExists)
    }
}

#[derive(Clone, Debug, Default)]
pub struct DetectOptions {
    pub t_gram: Option<BinaryLattice>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

enum Evaluation {
    Failed(FailureReason),
    Witness(DiscAutomorphism),
}

fn involution_outcome(
    pf: &PolarizedForm,
    cand: &KernelCandidate,
    sq: &Subquotient,
    ambient: &FiniteQuadraticForm,
    involutions: &[DiscAutomorphism],
) -> Evaluation {
    let mut reason = FailureReason::NoInvolutionCond2;
    for phi in involutions {
        match check_with_subquotient(pf, cand, sq, ambient, phi) {
            InvolutionCheck::Passes => return Evaluation::Witness(phi.clone()),
            InvolutionCheck::Fails(FailureReason::NoInvolutionCond3) => {
                reason = FailureReason::NoInvolutionCond3
            }
            InvolutionCheck::Fails(_) => {}
        }
    }
    Evaluation::Failed(reason)
}

fn evaluate(
    pf: &PolarizedForm,
    cand: &KernelCandidate,
    involutions: &[DiscAutomorphism],
) -> Result<Evaluation> {
    let kernel = cand.kernel(pf)?;
    let sq = subquotient(&kernel)?;
    let profile = EmbeddingProfile::new(2, pf.rank_s(), sq.form.clone());
    if !embeds_into_big_l(&profile)?.embeds {
        return Ok(Evaluation::Failed(FailureReason::GenusEmpty));
    }
    Ok(involution_outcome(
        pf,
        cand,
        &sq,
        kernel.ambient(),
        involutions,
    ))
}

/// Both tests for one candidate, without short-circuiting on the genus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateDiagnosis {
    pub genus_nonempty: bool,
    /// `None` when some involution satisfies conditions (2) and (3).
    pub involution_failure: Option<FailureReason>,
}

pub fn diagnose(
    pf: &PolarizedForm,
    cand: &KernelCandidate,
    involutions: &[DiscAutomorphism],
) -> Result<CandidateDiagnosis> {
    let kernel = cand.kernel(pf)?;
    let sq = subquotient(&kernel)?;
    let profile = EmbeddingProfile::new(2, pf.rank_s(), sq.form.clone());
    let genus_nonempty = embeds_into_big_l(&profile)?.embeds;
    let involution_failure = match involution_outcome(pf, cand, &sq, kernel.ambient(), involutions)
    {
        Evaluation::Witness(_) => None,
        Evaluation::Failed(reason) => Some(reason),
    };
    Ok(CandidateDiagnosis {
        genus_nonempty,
        involution_failure,
    })
}

/// Rejects `S_h` that admit no primitive embedding into the K3 lattice.
pub fn check_nonspecial(pf: &PolarizedForm) -> Result<()> {
    let profile = EmbeddingProfile::new(1, pf.rank_s(), pf.form.clone());
    let verdict = embeds_into_big_l(&profile)?;
    if verdict.embeds {
        Ok(())
    } else {
        Err(Error::NotNonspecial(format!(
            "{} with h² = {} has no primitive embedding into the K3 lattice ({:?})",
            pf.spec, pf.h_square, verdict.obstruction
        )))
    }
}

/// Runs the full search for one stratum.
pub fn detect(model: Model, spec: &RootSpec, options: &DetectOptions) -> Result<DetectionReport> {
    match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidModel(format!("thread pool: {e}")))?;
            pool.install(|| detect_inner(model, spec, options))
        }
        None => detect_inner(model, spec, options),
    }
}

fn detect_inner(model: Model, spec: &RootSpec, options: &DetectOptions) -> Result<DetectionReport> {
    let rank_s = spec.rank();
    if rank_s > 19 {
        return Err(Error::RankTooLarge(rank_s));
    }
    let pf = polarized_disc(spec, model.h_square())?;
    check_nonspecial(&pf)?;
    let mut report = DetectionReport {
        model,
        spec: spec.clone(),
        h_square: model.h_square(),
        rank_s,
        rank_t: 21 - rank_s,
        verdict: Verdict::Inconclusive,
        witness: None,
        conclusiveness_basis: None,
        disc: pf.form.to_string(),
        involutions: 0,
        trace: Vec::new(),
        scope_note: SCOPE_NOTE,
    };
    if rank_s == 19 {
        let Some(t) = &options.t_gram else {
            report.verdict = Verdict::NeedsTGram;
            return Ok(report);
        };
        let search = skew_search(t, &pf)?;
        report.conclusiveness_basis = Some(Basis::RankT2);
        match search.witness {
            Some(BinaryIsometry { matrix, .. }) => {
                report.verdict = Verdict::WitnessFound;
                report.witness = Some(Witness::Reflection { matrix });
            }
            None => report.verdict = Verdict::NoneExists,
        }
        return Ok(report);
    }
    let involutions = disc_involutions(&pf)?;
    report.involutions = involutions.len();
    let data = element_data(&pf);
    for a_square in enumerate_a_squares(&pf) {
        for n in [1, 2] {
            let cands = candidates_from(&pf, &data, a_square, n);
            if cands.is_empty() {
                report.trace.push(TraceEntry {
                    a_square,
                    n,
                    kappa: None,
                    reason: Some(FailureReason::NoKappa),
                });
                continue;
            }
            for chunk in cands.chunks(CHUNK) {
                let results: Vec<Result<Evaluation>> = chunk
                    .par_iter()
                    .map(|c| evaluate(&pf, c, &involutions))
                    .collect();
                for (cand, result) in chunk.iter().zip(results) {
                    match result? {
                        Evaluation::Failed(reason) => report.trace.push(TraceEntry {
                            a_square,
                            n,
                            kappa: Some(cand.kappa.clone()),
                            reason: Some(reason),
                        }),
                        Evaluation::Witness(phi) => {
                            report.trace.push(TraceEntry {
                                a_square,
                                n,
                                kappa: Some(cand.kappa.clone()),
                                reason: None,
                            });
                            report.verdict = Verdict::WitnessFound;
                            report.conclusiveness_basis = Some(Basis::Corlem1);
                            report.witness = Some(Witness::Kernel {
                                a_square,
                                n,
                                kappa: cand.kappa.clone(),
                                phi,
                            });
                            return Ok(report);
                        }
                    }
                }
            }
        }
    }
    if rank_s == 18 {
        report.verdict = Verdict::NoneExists;
        report.conclusiveness_basis = Some(Basis::Corlem2);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_parsing() {
        assert_eq!("quartic".parse::<Model>().unwrap(), Model::Quartic);
        assert_eq!("sextic".parse::<Model>().unwrap().h_square(), 2);
        assert_eq!("h2=8".parse::<Model>().unwrap(), Model::Custom(8));
        assert!("h2=3".parse::<Model>().is_err());
        assert!("cubic".parse::<Model>().is_err());
        assert_eq!(Model::Custom(6).to_string(), "h2=6");
    }

    #[test]
    fn a_squares_for_a1() {
        let pf = polarized_disc(&"A1".parse().unwrap(), 4).unwrap();
        assert_eq!(enumerate_a_squares(&pf), vec![2, 4, 8]);
    }

    #[test]
    fn trivial_candidate_passes() {
        let pf = polarized_disc(&"A1".parse().unwrap(), 4).unwrap();
        let cand = KernelCandidate::new(&pf, 2, 2, pf.form.zero()).unwrap();
        let id = DiscAutomorphism::identity(pf.form.rank());
        assert_eq!(
            check_candidate(&pf, &cand, &id).unwrap(),
            InvolutionCheck::Passes
        );
    }
}
