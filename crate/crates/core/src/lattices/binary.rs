//! Positive definite even binary lattices and the skew-reflection test for
//! maximizing strata.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqf::{reduce_mod, Element, FiniteQuadraticForm, Rational};

use super::integral::LatticeDiscriminant;
use super::symmetry::{is_diagram_symmetry, DiscAutomorphism};
use super::PolarizedForm;

/// `[[a, b], [b, d]]`, positive definite and even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryLattice {
    a: i64,
    b: i64,
    d: i64,
}

impl BinaryLattice {
    pub fn new(a: i64, b: i64, d: i64) -> Result<Self> {
        if a <= 0 || a * d - b * b <= 0 {
            return Err(Error::InvalidBinary(format!(
                "[[{a},{b}],[{b},{d}]] is not positive definite"
            )));
        }
        if a % 2 != 0 || d % 2 != 0 {
            return Err(Error::InvalidBinary(format!(
                "[[{a},{b}],[{b},{d}]] is not even"
            )));
        }
        Ok(BinaryLattice { a, b, d })
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        vec![vec![self.a, self.b], vec![self.b, self.d]]
    }

    pub fn determinant(&self) -> i64 {
        self.a * self.d - self.b * self.b
    }

    pub fn norm(&self, v: [i64; 2]) -> i64 {
        self.a * v[0] * v[0] + 2 * self.b * v[0] * v[1] + self.d * v[1] * v[1]
    }

    pub fn inner(&self, v: [i64; 2], w: [i64; 2]) -> i64 {
        self.a * v[0] * w[0] + self.b * (v[0] * w[1] + v[1] * w[0]) + self.d * v[1] * w[1]
    }

    /// All vectors of the given norm.
    pub fn vectors_of_norm(&self, norm: i64) -> Vec<[i64; 2]> {
        let det = self.determinant();
        // x² ≤ norm·d/det and y² ≤ norm·a/det
        let bound = |num: i64| -> i64 {
            let mut r = ((num as f64) / (det as f64)).sqrt() as i64 + 1;
            while r * r * det > num && r > 0 {
                r -= 1;
            }
            r + 1
        };
        let bx = bound(norm * self.d);
        let by = bound(norm * self.a);
        let mut out = Vec::new();
        for x in -bx..=bx {
            for y in -by..=by {
                if self.norm([x, y]) == norm {
                    out.push([x, y]);
                }
            }
        }
        out
    }
}

impl std::str::FromStr for BinaryLattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidBinary(format!("expected a,b,d but got {s:?}")))?;
        match parts.as_slice() {
            [a, b, d] => BinaryLattice::new(*a, *b, *d),
            _ => Err(Error::InvalidBinary(format!(
                "expected a,b,d but got {s:?}"
            ))),
        }
    }
}

/// An element of `O(T)`; `matrix` has the images of the basis vectors as columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryIsometry {
    pub matrix: [[i64; 2]; 2],
    pub det: i64,
}

impl BinaryIsometry {
    pub fn is_reflection(&self) -> bool {
        self.det == -1
    }

    pub fn trace(&self) -> i64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn compose(&self, other: &Self) -> Self {
        let (m, n) = (&self.matrix, &other.matrix);
        let mut r = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = m[i][0] * n[0][j] + m[i][1] * n[1][j];
            }
        }
        BinaryIsometry {
            matrix: r,
            det: self.det * other.det,
        }
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.matrix.iter().map(|r| r.to_vec()).collect()
    }
}

/// The full isometry group `O(T)`, sorted.
pub fn binary_autos(t: &BinaryLattice) -> Vec<BinaryIsometry> {
    let firsts = t.vectors_of_norm(t.a);
    let seconds = t.vectors_of_norm(t.d);
    let mut out = Vec::new();
    for &v in &firsts {
        for &w in &seconds {
            if t.inner(v, w) != t.b {
                continue;
            }
            let det = v[0] * w[1] - v[1] * w[0];
            if det.abs() == 1 {
                out.push(BinaryIsometry {
                    matrix: [[v[0], w[0]], [v[1], w[1]]],
                    det,
                });
            }
        }
    }
    out.sort();
    out
}

/// Outcome of the skew-reflection search for a maximizing stratum.
#[derive(Clone, Debug, Serialize)]
pub struct SkewSearch {
    pub found: bool,
    /// Reflection of `T` whose disc action is realized by a diagram symmetry.
    pub witness: Option<BinaryIsometry>,
    pub anti_isometries: usize,
    pub reflections: usize,
}

struct DiscTable {
    elements: Vec<Element>,
    q: Vec<Rational>,
}

fn anti_isometries(
    source: &FiniteQuadraticForm,
    target: &FiniteQuadraticForm,
) -> Vec<Vec<Element>> {
    let table = DiscTable {
        elements: target.elements().collect(),
        q: target
            .elements()
            .map(|y| target.eval_q(&y).expect("element of target"))
            .collect(),
    };
    let k = source.rank();
    let wanted_q: Vec<Rational> = (0..k)
        .map(|i| reduce_mod(&-source.q_value(i).clone(), 2))
        .collect();
    let wanted_b: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| reduce_mod(&-source.b_value(i, j).clone(), 1))
                .collect()
        })
        .collect();
    let candidates: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..table.elements.len())
                .filter(|&e| {
                    let y = &table.elements[e];
                    source.orders()[i] % target.element_order(y) == 0 && table.q[e] == wanted_q[i]
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(k);
    fn rec(
        i: usize,
        current: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        wanted_b: &[Vec<Rational>],
        table: &DiscTable,
        source: &FiniteQuadraticForm,
        target: &FiniteQuadraticForm,
        out: &mut Vec<Vec<Element>>,
    ) {
        if i == candidates.len() {
            let images: Vec<Element> = current.iter().map(|&e| table.elements[e].clone()).collect();
            let image = crate::fqf::Subgroup::generated_by(target, images.clone());
            if image.order() == source.order() {
                out.push(images);
            }
            return;
        }
        for &e in &candidates[i] {
            let y = &table.elements[e];
            let ok = current.iter().enumerate().all(|(j, &f)| {
                target
                    .eval_b(y, &table.elements[f])
                    .expect("elements of target")
                    == wanted_b[i][j]
            });
            if ok {
                current.push(e);
                rec(
                    i + 1,
                    current,
                    candidates,
                    wanted_b,
                    table,
                    source,
                    target,
                    out,
                );
                current.pop();
            }
        }
    }
    rec(
        0,
        &mut current,
        &candidates,
        &wanted_b,
        &table,
        source,
        target,
        &mut out,
    );
    out
}

fn check_compatible(pf: &FiniteQuadraticForm, disc_t: &FiniteQuadraticForm) -> Result<()> {
    if pf.order() != disc_t.order() {
        return Err(Error::DiscMismatch(format!(
            "|disc T| = {} but |disc S_h| = {}",
            disc_t.order(),
            pf.order()
        )));
    }
    for p in pf.primes() {
        if pf.length_p(p) != disc_t.length_p(p) {
            return Err(Error::DiscMismatch(format!(
                "{p}-length of disc T is {} but {} for disc S_h",
                disc_t.length_p(p),
                pf.length_p(p)
            )));
        }
    }
    Ok(())
}

/// Searches for a reflection of `T` whose action on `disc T ≅ -disc S_h` is
/// realized by a diagram symmetry, over every anti-isometric identification.
pub fn skew_search(t: &BinaryLattice, pf: &PolarizedForm) -> Result<SkewSearch> {
    let lattice = LatticeDiscriminant::of_gram(&t.gram())?;
    let disc_t = &lattice.form;
    check_compatible(&pf.form, disc_t)?;
    let psis = anti_isometries(&pf.form, disc_t);
    if psis.is_empty() {
        return Err(Error::DiscMismatch(
            "disc T is not anti-isometric to disc S_h".into(),
        ));
    }
    let reflections: Vec<(BinaryIsometry, DiscAutomorphism)> = binary_autos(t)
        .into_iter()
        .filter(BinaryIsometry::is_reflection)
        .map(|r| {
            let action = lattice.induced(&r.rows())?;
            Ok((r, action))
        })
        .collect::<Result<_>>()?;
    let source_elements: Vec<Element> = pf.form.elements().collect();
    let mut verdicts: HashMap<DiscAutomorphism, bool> = HashMap::new();
    for psi in &psis {
        let apply_psi = |x: &Element| -> Element {
            x.coeffs()
                .iter()
                .zip(psi)
                .fold(disc_t.zero(), |acc, (&c, y)| {
                    disc_t.add(&acc, &disc_t.scale(y, c))
                })
        };
        let inverse: BTreeMap<Element, Element> = source_elements
            .iter()
            .map(|x| (apply_psi(x), x.clone()))
            .collect();
        for (r, action) in &reflections {
            let k = pf.form.rank();
            let mut matrix = vec![vec![0i64; k]; k];
            for (j, y) in psi.iter().enumerate() {
                let back = &inverse[&action.apply(disc_t, y)];
                for i in 0..k {
                    matrix[i][j] = back.0[i];
                }
            }
            let pulled = DiscAutomorphism::new(matrix).reduced(&pf.form);
            let ok = match verdicts.get(&pulled) {
                Some(&v) => v,
                None => {
                    let v = is_diagram_symmetry(pf, &pulled)?;
                    verdicts.insert(pulled, v);
                    v
                }
            };
            if ok {
                return Ok(SkewSearch {
                    found: true,
                    witness: Some(r.clone()),
                    anti_isometries: psis.len(),
                    reflections: reflections.len(),
                });
            }
        }
    }
    Ok(SkewSearch {
        found: false,
        witness: None,
        anti_isometries: psis.len(),
        reflections: reflections.len(),
    })
}

/// Whether a maximizing stratum with transcendental lattice `T` admits an
/// involutive skew-automorphism acting on `T` by a reflection.
pub fn maximizing_has_skew(t: &BinaryLattice, pf: &PolarizedForm) -> Result<bool> {
    Ok(skew_search(t, pf)?.found)
}
