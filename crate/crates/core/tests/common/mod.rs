//! Shared generators for the integration and acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use realstrata::arith::mod_inverse;
use realstrata::fqf::rational;
use realstrata::isotropy::{classify_gluing_case, subquotient, GluingCase, IsotropicKernel};
use realstrata::lattices::RootSpec;
use realstrata::{Element, FiniteQuadraticForm, Rational, Subgroup};

pub fn cyc(m: i64, n: i64) -> FiniteQuadraticForm {
    FiniteQuadraticForm::cyclic(m, n).unwrap()
}

/// `(1/2^k) [[mu, 1], [1, nu]]` with `q(u) = mu/2^k`, `q(v) = nu/2^k`.
pub fn pair_block(mu: i64, nu: i64, k: u32) -> FiniteQuadraticForm {
    let n = 1i128 << k;
    let off = rational(1, n);
    FiniteQuadraticForm::new(
        vec![n as i64; 2],
        vec![rational(mu.into(), n), rational(nu.into(), n)],
        vec![
            vec![Rational::from_integer(0.into()), off.clone()],
            vec![off, Rational::from_integer(0.into())],
        ],
    )
    .unwrap()
}

fn random_unit(rng: &mut impl Rng, n: i64) -> i64 {
    loop {
        let u = rng.gen_range(1..n);
        if num_integer::Integer::gcd(&u, &n) == 1 {
            return u;
        }
    }
}

/// One random indecomposable-ish block: `[m/p^k]`, `U(2^k)` or `V(2^k)`.
fn random_block(rng: &mut impl Rng) -> FiniteQuadraticForm {
    match rng.gen_range(0..6) {
        0 => FiniteQuadraticForm::u_block(rng.gen_range(1..=3)).unwrap(),
        1 => FiniteQuadraticForm::v_block(rng.gen_range(1..=3)).unwrap(),
        2 | 3 => {
            let n = 1i64 << rng.gen_range(1..=4);
            let m = 2 * rng.gen_range(0..n) + 1;
            cyc(m % (2 * n), n)
        }
        _ => {
            let p = *[3i64, 5, 7].choose(rng).unwrap();
            let n = if p == 3 && rng.gen_bool(0.3) { 9 } else { p };
            let u = random_unit(rng, n);
            // even numerator of the same class mod n
            let m = if u % 2 == 0 { u } else { u + n };
            cyc(m, n)
        }
    }
}

/// A random form of order at most `max_order`, before any base change.
pub fn random_block_form(rng: &mut impl Rng, max_order: u64) -> FiniteQuadraticForm {
    let mut form = FiniteQuadraticForm::trivial();
    for _ in 0..rng.gen_range(1..=4) {
        let b = random_block(rng);
        if form.order() * b.order() <= max_order {
            form = form.direct_sum(&b);
        }
    }
    form
}

/// Re-presents `form` on a random basis with the same generator orders.
pub fn random_base_change(rng: &mut impl Rng, form: &FiniteQuadraticForm) -> FiniteQuadraticForm {
    let orders = form.orders().to_vec();
    let k = orders.len();
    loop {
        let gens: Vec<Element> = (0..k)
            .map(|i| {
                let mut coeffs = vec![0i64; k];
                for j in 0..k {
                    // c_ij g_j must have order dividing d_i
                    let step = orders[j] / num_integer::Integer::gcd(&orders[i], &orders[j]);
                    coeffs[j] = step * rng.gen_range(0..orders[j] / step);
                }
                coeffs[i] = random_unit(rng, orders[i]);
                form.element(&coeffs).unwrap()
            })
            .collect();
        if Subgroup::generated_by(form, gens.clone()).order() == form.order() {
            return form.restrict(&gens, &orders).unwrap();
        }
    }
}

pub fn random_form(rng: &mut impl Rng, max_order: u64) -> FiniteQuadraticForm {
    let f = random_block_form(rng, max_order);
    random_base_change(rng, &f)
}

/// A random cyclic isotropic subgroup generator (possibly zero).
pub fn random_isotropic(rng: &mut impl Rng, form: &FiniteQuadraticForm) -> Element {
    let iso: Vec<Element> = form
        .elements()
        .filter(|x| {
            let d = form.element_order(x);
            (1..d).all(|k| form.is_q_zero(&form.scale(x, k)))
        })
        .collect();
    iso.choose(rng).unwrap().clone()
}

const LABELS: [&str; 12] = [
    "A1", "A2", "A3", "A4", "A5", "A6", "D4", "D5", "D6", "E6", "E7", "E8",
];

/// A random small root configuration with `|disc S_h|` within `max_order`.
pub fn random_spec(rng: &mut impl Rng, h2: i64, max_order: u64) -> RootSpec {
    loop {
        let count = rng.gen_range(0..=3);
        let text: Vec<&str> = (0..count).map(|_| *LABELS.choose(rng).unwrap()).collect();
        let spec: RootSpec = text.join("+").parse().unwrap();
        let pf = realstrata::lattices::polarized_disc(&spec, h2).unwrap();
        if pf.form.order() <= max_order && spec.rank() <= 18 {
            return spec;
        }
    }
}

// ---- the table of K⊥/K for each gluing shape ---------------------------------

pub const GLUING_CASES: [GluingCase; 8] = [
    GluingCase::SinglePair,
    GluingCase::CyclicBelowPairAbove,
    GluingCase::PairBelowCyclicAbove,
    GluingCase::CyclicBelowDeepCyclic,
    GluingCase::CyclicBelowDeepPair,
    GluingCase::LowCyclicCyclicAbove,
    GluingCase::LowPairCyclicAbove,
    GluingCase::DoubledCyclic,
];

/// `M = M̄ ⊕ N_1 (⊕ N_2)` glued to `[δ/2^{m+1}]`, with the tabulated answer.
#[derive(Clone, Debug)]
pub struct GluingInstance {
    pub case: GluingCase,
    pub m: u32,
    pub two_part: FiniteQuadraticForm,
    pub kappa: Element,
    pub ambient: FiniteQuadraticForm,
    pub kernel: Element,
    pub bar_generators: Vec<Element>,
    pub w: Vec<Element>,
    pub w_orders: Vec<i64>,
    pub ambiguous: bool,
}

fn random_even_bar(rng: &mut impl Rng) -> FiniteQuadraticForm {
    match rng.gen_range(0..7) {
        0 => FiniteQuadraticForm::trivial(),
        1 => FiniteQuadraticForm::u_block(1).unwrap(),
        2 => FiniteQuadraticForm::v_block(1).unwrap(),
        3 => FiniteQuadraticForm::u_block(2).unwrap(),
        4 => cyc(*[1, 3, 5, 7].choose(rng).unwrap(), 4),
        5 => cyc(*[1, 3, 5, 7, 9, 11, 13, 15].choose(rng).unwrap(), 8),
        _ => FiniteQuadraticForm::u_block(1)
            .unwrap()
            .direct_sum(&cyc(3, 4)),
    }
}

fn odd(rng: &mut impl Rng, modulus: i64) -> i64 {
    2 * rng.gen_range(0..modulus / 2) + 1
}

fn even(rng: &mut impl Rng, modulus: i64) -> i64 {
    2 * rng.gen_range(0..modulus / 2)
}

fn pow2(k: u32) -> i64 {
    1i64 << k
}

/// Coefficient vectors over `M̄ ⊕ N_1 ⊕ N_2 ⊕ ⟨α⟩` with named slots.
struct Slots {
    rank: usize,
    u1: usize,
    v1: Option<usize>,
    u2: Option<usize>,
    v2: Option<usize>,
    alpha: usize,
}

impl Slots {
    fn vector(&self, terms: &[(usize, i64)]) -> Vec<i64> {
        let mut v = vec![0; self.rank];
        for &(i, c) in terms {
            v[i] += c;
        }
        v
    }
}

pub fn synthesize(case: GluingCase, rng: &mut impl Rng) -> GluingInstance {
    use GluingCase::*;
    let bar = random_even_bar(rng);
    let m: u32 = match case {
        SinglePair | DoubledCyclic => rng.gen_range(1..=3),
        LowCyclicCyclicAbove | LowPairCyclicAbove => rng.gen_range(3..=4),
        _ => rng.gen_range(2..=3),
    };
    let r2: u32 = rng.gen_range(2..=3);
    let low: u32 = if m >= 3 { rng.gen_range(1..=m - 2) } else { 0 };
    let (n1, n2): (FiniteQuadraticForm, Option<FiniteQuadraticForm>);
    let (mu1, nu1, mu2): (i64, i64, i64);
    let xi: i64;
    match case {
        SinglePair => {
            mu1 = (2 + 4 * rng.gen_range(0..pow2(m))) % pow2(m + 1);
            nu1 = rng.gen_range(0..pow2(m + 1));
            mu2 = 0;
            n1 = pair_block(mu1, nu1, m);
            n2 = None;
            xi = mu1 / 2;
        }
        CyclicBelowPairAbove => {
            mu1 = odd(rng, pow2(m));
            mu2 = even(rng, pow2(m + 2));
            let nu2 = rng.gen_range(0..pow2(m + 2));
            nu1 = 0;
            n1 = cyc(mu1, pow2(m - 1));
            n2 = Some(pair_block(mu2, nu2, m + 1));
            xi = mu1 + mu2;
        }
        PairBelowCyclicAbove => {
            mu1 = even(rng, pow2(m));
            nu1 = rng.gen_range(0..pow2(m));
            mu2 = odd(rng, pow2(m + 2));
            n1 = pair_block(mu1, nu1, m - 1);
            n2 = Some(cyc(mu2, pow2(m + 1)));
            xi = mu1 + mu2;
        }
        CyclicBelowDeepCyclic | CyclicBelowDeepPair => {
            mu1 = odd(rng, pow2(m));
            nu1 = 0;
            n1 = cyc(mu1, pow2(m - 1));
            if case == CyclicBelowDeepCyclic {
                mu2 = odd(rng, pow2(m + r2 + 1));
                n2 = Some(cyc(mu2, pow2(m + r2)));
            } else {
                mu2 = even(rng, pow2(m + r2 + 1));
                let nu2 = rng.gen_range(0..pow2(m + r2 + 1));
                n2 = Some(pair_block(mu2, nu2, m + r2));
            }
            xi = mu1 + pow2(r2 - 1) * mu2;
        }
        LowCyclicCyclicAbove | LowPairCyclicAbove => {
            mu2 = odd(rng, pow2(m + 2));
            if case == LowCyclicCyclicAbove {
                mu1 = odd(rng, pow2(low + 1));
                nu1 = 0;
                n1 = cyc(mu1, pow2(low));
            } else {
                mu1 = even(rng, pow2(low + 1));
                nu1 = rng.gen_range(0..pow2(low + 1));
                n1 = pair_block(mu1, nu1, low);
            }
            n2 = Some(cyc(mu2, pow2(m + 1)));
            xi = mu2 + mu1 * pow2(m - 1 - low);
        }
        DoubledCyclic => {
            mu1 = odd(rng, pow2(m + 2));
            (nu1, mu2) = (0, 0);
            n1 = cyc(mu1, pow2(m + 1));
            n2 = None;
            xi = mu1;
        }
        Trivial => unreachable!("no table entry"),
    }
    // α² = δ/2^{m+1} with ξ + δ ≡ 0 mod 2^m
    let delta = ((-xi).rem_euclid(pow2(m)) + pow2(m) * rng.gen_range(0..4)) % pow2(m + 2);
    let alpha_form = cyc(delta, pow2(m + 1));

    let mut two_part = bar.direct_sum(&n1);
    let r_bar = bar.rank();
    let mut next = r_bar;
    let u1 = next;
    next += 1;
    let v1 = (n1.rank() == 2).then(|| {
        next += 1;
        next - 1
    });
    let (u2, v2) = match &n2 {
        Some(f) => {
            two_part = two_part.direct_sum(f);
            let u2 = next;
            next += 1;
            let v2 = (f.rank() == 2).then(|| {
                next += 1;
                next - 1
            });
            (Some(u2), v2)
        }
        None => (None, None),
    };
    let ambient = two_part.direct_sum(&alpha_form);
    let slots = Slots {
        rank: ambient.rank(),
        u1,
        v1,
        u2,
        v2,
        alpha: next,
    };
    let a = slots.alpha;
    let el = |terms: &[(usize, i64)]| ambient.element(&slots.vector(terms)).unwrap();
    let two_el = |terms: &[(usize, i64)]| {
        let mut v = slots.vector(terms);
        v.pop();
        two_part.element(&v).unwrap()
    };

    let (kappa_terms, w_terms, w_orders, ambiguous): (
        Vec<(usize, i64)>,
        Vec<Vec<(usize, i64)>>,
        Vec<i64>,
        bool,
    ) = match case {
        SinglePair => (
            vec![(u1, 1)],
            vec![vec![(a, 1), (v1.unwrap(), -delta)]],
            vec![pow2(m + 1)],
            m == 1 && nu1 % 2 == 1,
        ),
        CyclicBelowPairAbove => (
            vec![(u1, 1), (u2.unwrap(), 2)],
            vec![
                vec![(v2.unwrap(), delta), (a, -1)],
                vec![(u2.unwrap(), delta), (a, -mu2)],
            ],
            vec![pow2(m + 1); 2],
            m == 2,
        ),
        PairBelowCyclicAbove => {
            let inv = mod_inverse(mu2.into(), pow2(m + 1).into()).unwrap() as i64;
            (
                vec![(u1, 1), (u2.unwrap(), 2)],
                vec![
                    vec![(v1.unwrap(), 1), (u2.unwrap(), -2 * inv)],
                    vec![(v1.unwrap(), mu1 / 2), (u2.unwrap(), 1), (a, 1)],
                ],
                vec![pow2(m); 2],
                // the pair block sits at exponent 2^{m-1}, so the odd case is m = 2
                m == 2 && nu1 % 2 == 1,
            )
        }
        CyclicBelowDeepCyclic => (
            vec![(u1, 1), (u2.unwrap(), pow2(r2))],
            vec![vec![(u2.unwrap(), delta), (a, -mu2)]],
            vec![pow2(m + r2)],
            m == 2,
        ),
        CyclicBelowDeepPair => (
            vec![(u1, 1), (u2.unwrap(), pow2(r2))],
            vec![
                vec![(v2.unwrap(), delta), (a, -1)],
                vec![(u2.unwrap(), delta), (a, -mu2)],
            ],
            vec![pow2(m + r2); 2],
            m == 2,
        ),
        LowCyclicCyclicAbove => (
            vec![(u1, 1), (u2.unwrap(), 2)],
            vec![vec![(u2.unwrap(), -delta), (a, mu2)]],
            vec![pow2(low + 2)],
            m >= 3 && low == 1,
        ),
        LowPairCyclicAbove => (
            vec![(u1, 1), (u2.unwrap(), 2)],
            vec![
                vec![(v1.unwrap(), mu2), (u2.unwrap(), -pow2(m - low))],
                vec![(v1.unwrap(), mu1 / 2), (u2.unwrap(), 1), (a, 1)],
            ],
            vec![pow2(low + 1); 2],
            low == 1 && nu1 % 2 == 1,
        ),
        DoubledCyclic => (
            vec![(u1, 2)],
            vec![vec![(u1, 1), (a, 1)], vec![(u1, pow2(m))]],
            vec![2, 2],
            false,
        ),
        Trivial => unreachable!(),
    };
    let kappa = two_el(&kappa_terms);
    let mut kernel_terms = kappa_terms.clone();
    kernel_terms.push((a, 2));
    GluingInstance {
        case,
        m,
        kappa,
        kernel: el(&kernel_terms),
        bar_generators: (0..r_bar).map(|i| ambient.generator(i)).collect(),
        w: w_terms.iter().map(|t| el(t)).collect(),
        w_orders,
        ambiguous,
        two_part,
        ambient,
    }
}

/// Checks one instance against the table; `Err` describes the first mismatch.
pub fn check_gluing(inst: &GluingInstance) -> Result<(), String> {
    let (tag, _) =
        classify_gluing_case(&inst.two_part, &inst.kappa, inst.m).map_err(|e| e.to_string())?;
    if tag != inst.case {
        return Err(format!("classified as {tag:?}"));
    }
    let kernel = IsotropicKernel::cyclic(inst.ambient.clone(), inst.kernel.clone())
        .map_err(|e| e.to_string())?;
    let sq = subquotient(&kernel).map_err(|e| e.to_string())?;
    let mut images = Vec::new();
    for x in inst.bar_generators.iter().chain(&inst.w) {
        images.push(
            sq.project(x)
                .ok_or_else(|| format!("{x:?} is not in the orthogonal complement"))?,
        );
    }
    let bar_order: u64 = inst
        .bar_generators
        .iter()
        .map(|g| inst.ambient.element_order(g) as u64)
        .product();
    for (img, &expected) in images[inst.bar_generators.len()..]
        .iter()
        .zip(&inst.w_orders)
    {
        let got = sq.form.element_order(img);
        if got != expected {
            return Err(format!(
                "generator {img:?} has order {got}, expected {expected}"
            ));
        }
    }
    let product: u64 = bar_order * inst.w_orders.iter().map(|&d| d as u64).product::<u64>();
    if sq.form.order() != product {
        return Err(format!("|K⊥/K| = {}, expected {product}", sq.form.order()));
    }
    if Subgroup::generated_by(&sq.form, images).order() != sq.form.order() {
        return Err("listed generators do not span K⊥/K".into());
    }
    let ambiguous = !inst.two_part.is_even_2part() && sq.form.is_even_2part();
    if ambiguous != inst.ambiguous {
        return Err(format!(
            "ambiguous = {ambiguous}, table says {}",
            inst.ambiguous
        ));
    }
    Ok(())
}
