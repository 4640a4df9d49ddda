//! ADE root lattices, polarized lattices `S ⊕ Zh` and their discriminant forms.
//!
//! Root lattices are negative definite: roots have square `-2`.

mod binary;
mod integral;
mod symmetry;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fqf::{Element, FiniteQuadraticForm, Rational};

pub use binary::{
    binary_autos, maximizing_has_skew, skew_search, BinaryIsometry, BinaryLattice, SkewSearch,
};
pub use integral::{rational_inverse, LatticeDiscriminant};
pub use symmetry::{
    component_symmetries, disc_involutions, generated_group, is_diagram_symmetry, DiscAutomorphism,
    INVOLUTION_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdeKind {
    A,
    D,
    E,
}

/// One irreducible root lattice `A_n`, `D_n` or `E_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdeLabel {
    pub kind: AdeKind,
    pub n: u32,
}

impl AdeLabel {
    pub fn new(kind: AdeKind, n: u32) -> Result<Self> {
        let ok = match kind {
            AdeKind::A => n >= 1,
            AdeKind::D => n >= 4,
            AdeKind::E => (6..=8).contains(&n),
        };
        if !ok {
            return Err(Error::Parse {
                token: format!("{kind:?}{n}"),
                reason: "no such root lattice".into(),
            });
        }
        Ok(AdeLabel { kind, n })
    }

    pub fn a(n: u32) -> Self {
        Self::new(AdeKind::A, n).expect("valid A label")
    }

    pub fn d(n: u32) -> Self {
        Self::new(AdeKind::D, n).expect("valid D label")
    }

    pub fn e(n: u32) -> Self {
        Self::new(AdeKind::E, n).expect("valid E label")
    }

    pub fn rank(&self) -> u32 {
        self.n
    }

    /// Edges of the Dynkin diagram (0-indexed nodes; E-type uses Bourbaki numbering).
    pub fn dynkin_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n as usize;
        match self.kind {
            AdeKind::A => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            AdeKind::D => {
                let mut e: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
                e.push((n - 3, n - 1));
                e
            }
            AdeKind::E => [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
                .into_iter()
                .filter(|&(a, b)| a < n && b < n)
                .collect(),
        }
    }

    /// Gram matrix `-Cartan` of the negative definite root lattice.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.n as usize;
        let mut g = vec![vec![0i64; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for (a, b) in self.dynkin_edges() {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        g
    }

    /// Fundamental weights whose classes generate `disc`, in the order used for
    /// the discriminant generators.
    pub fn discriminant_weights(&self) -> Vec<usize> {
        let n = self.n as usize;
        match (self.kind, n) {
            (AdeKind::A, _) => vec![0],
            (AdeKind::D, _) if n % 2 == 1 => vec![n - 1],
            (AdeKind::D, _) => vec![n - 2, n - 1],
            (AdeKind::E, 6) => vec![0],
            (AdeKind::E, 7) => vec![6],
            _ => vec![],
        }
    }

    /// Node permutations generating the diagram automorphism group.
    pub fn diagram_symmetry_generators(&self) -> Vec<Vec<usize>> {
        let n = self.n as usize;
        let swap = |a: usize, b: usize| -> Vec<usize> {
            (0..n)
                .map(|i| {
                    if i == a {
                        b
                    } else if i == b {
                        a
                    } else {
                        i
                    }
                })
                .collect()
        };
        match (self.kind, n) {
            (AdeKind::A, 1) => vec![],
            (AdeKind::A, _) => vec![(0..n).rev().collect()],
            (AdeKind::D, 4) => vec![swap(2, 3), swap(0, 2)],
            (AdeKind::D, _) => vec![swap(n - 2, n - 1)],
            (AdeKind::E, 6) => {
                let mut p = swap(0, 5);
                p.swap(2, 4);
                vec![p]
            }
            _ => vec![],
        }
    }
}

impl fmt::Display for AdeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.kind, self.n)
    }
}

/// The discriminant of one root lattice. Generators are the primary parts of
/// fundamental weight classes, larger primes first.
#[derive(Clone, Debug)]
pub struct RootDiscriminant {
    pub label: AdeLabel,
    pub form: FiniteQuadraticForm,
    weights: Vec<Vec<Rational>>,
    generators: Vec<Vec<Rational>>,
}

impl RootDiscriminant {
    pub fn new(label: &AdeLabel) -> Result<Self> {
        let gram = label.gram();
        let inverse = rational_inverse(&gram).ok_or(Error::Degenerate)?;
        let n = gram.len();
        // Column i of the inverse Gram matrix is the fundamental weight ω_i.
        let weights: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|r| inverse[r][i].clone()).collect())
            .collect();
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        for i in label.discriminant_weights() {
            let d = weight_order(&weights[i]);
            for (p, e) in crate::arith::factorize(d as u64).into_iter().rev() {
                let pk = (p as i64).pow(e);
                let scale = Rational::from_integer((d / pk).into());
                generators.push(weights[i].iter().map(|w| w * &scale).collect::<Vec<_>>());
                orders.push(pk);
            }
        }
        let q = generators
            .iter()
            .map(|g| integral::bilinear(&gram, g, g))
            .collect();
        let b = generators
            .iter()
            .map(|g| {
                generators
                    .iter()
                    .map(|h| integral::bilinear(&gram, g, h))
                    .collect()
            })
            .collect();
        let form = FiniteQuadraticForm::new(orders, q, b)?;
        Ok(RootDiscriminant {
            label: *label,
            form,
            weights,
            generators,
        })
    }

    /// Class of the fundamental weight `ω_i` in terms of the chosen generators.
    pub fn weight_class(&self, i: usize) -> Result<Element> {
        let target = &self.weights[i];
        for x in self.form.elements() {
            let mut diff: Vec<Rational> = target.clone();
            for (g, &c) in self.generators.iter().zip(x.coeffs()) {
                for (d, w) in diff.iter_mut().zip(g) {
                    *d -= w * Rational::from_integer(c.into());
                }
            }
            if diff.iter().all(|d| d.is_integer()) {
                return Ok(x);
            }
        }
        Err(Error::InvalidForm(format!(
            "weight {i} of {} not expressible in the chosen generators",
            self.label
        )))
    }

    /// Action on the discriminant of a diagram automorphism (a node permutation).
    pub fn induced_by_permutation(&self, perm: &[usize]) -> Result<DiscAutomorphism> {
        let k = self.generators.len();
        let n = perm.len();
        let mut matrix = vec![vec![0i64; k]; k];
        for (j, g) in self.generators.iter().enumerate() {
            // g = Σ c_r ω_r, so its image is Σ c_r ω_{perm(r)}
            let coeffs = self.weight_coordinates(g);
            let mut image = self.form.zero();
            for r in 0..n {
                if coeffs[r] != 0 {
                    let w = self.weight_class(perm[r])?;
                    image = self.form.add(&image, &self.form.scale(&w, coeffs[r]));
                }
            }
            for i in 0..k {
                matrix[i][j] = image.0[i];
            }
        }
        let auto = DiscAutomorphism::new(matrix);
        auto.validate(&self.form)?;
        Ok(auto)
    }

    /// Integer coordinates of `v` in the basis of fundamental weights.
    fn weight_coordinates(&self, v: &[Rational]) -> Vec<i64> {
        // ω_i · α_r = δ_ir, so coordinates are the pairings with the simple roots.
        let gram = self.label.gram();
        (0..v.len())
            .map(|r| {
                let mut root = vec![Rational::from_integer(0.into()); v.len()];
                root[r] = Rational::from_integer(1.into());
                let c = integral::bilinear(&gram, v, &root);
                i64::try_from(c.to_integer()).expect("integral weight coordinate")
            })
            .collect()
    }
}

fn weight_order(w: &[Rational]) -> i64 {
    w.iter().fold(1i64, |acc, x| {
        let d = i64::try_from(x.denom()).expect("small denominator");
        num_integer::Integer::lcm(&acc, &d)
    })
}

/// Discriminant form of an ADE root lattice (negative definite convention).
pub fn disc_root(label: &AdeLabel) -> Result<FiniteQuadraticForm> {
    Ok(RootDiscriminant::new(label)?.form)
}

/// A multiset of ADE labels, kept in input order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RootSpec {
    components: Vec<AdeLabel>,
}

impl RootSpec {
    pub fn new(components: Vec<AdeLabel>) -> Self {
        RootSpec { components }
    }

    pub fn components(&self) -> &[AdeLabel] {
        &self.components
    }

    pub fn rank(&self) -> u32 {
        self.components.iter().map(AdeLabel::rank).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Canonical text: consecutive repeats collapse to `k*X`.
    pub fn canonical(&self) -> String {
        let mut terms: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.components.len() {
            let label = self.components[i];
            let mut j = i;
            while j < self.components.len() && self.components[j] == label {
                j += 1;
            }
            let count = j - i;
            terms.push(if count == 1 {
                label.to_string()
            } else {
                format!("{count}*{label}")
            });
            i = j;
        }
        terms.join("+")
    }
}

impl fmt::Display for RootSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for RootSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Ok(RootSpec::default());
        }
        let mut components = Vec::new();
        for term in compact.split('+') {
            let bad = |reason: &str| Error::Parse {
                token: term.to_string(),
                reason: reason.to_string(),
            };
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (count, rest) = match term.find(|c: char| c.is_ascii_alphabetic()) {
                Some(0) => (1u32, term),
                Some(pos) => {
                    let digits = term[..pos].trim_end_matches('*');
                    let count: u32 = digits.parse().map_err(|_| bad("invalid multiplicity"))?;
                    if count == 0 {
                        return Err(bad("multiplicity must be positive"));
                    }
                    (count, &term[pos..])
                }
                None => return Err(bad("missing A, D or E")),
            };
            let kind = match rest.chars().next() {
                Some('A') => AdeKind::A,
                Some('D') => AdeKind::D,
                Some('E') => AdeKind::E,
                _ => return Err(bad("expected A, D or E")),
            };
            let digits = &rest[1..];
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad("expected a rank after the letter"));
            }
            let n: u32 = digits.parse().map_err(|_| bad("rank out of range"))?;
            let label = AdeLabel::new(kind, n).map_err(|_| bad("no such root lattice"))?;
            components.extend(std::iter::repeat_n(label, count as usize));
        }
        Ok(RootSpec { components })
    }
}

impl Serialize for RootSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

/// Provenance of a generator of `disc(S ⊕ Zh)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GeneratorTag {
    Component(usize),
    H,
}

/// `disc(S ⊕ Zh)` with generators tagged by their origin.
#[derive(Clone, Debug)]
pub struct PolarizedForm {
    pub form: FiniteQuadraticForm,
    pub tags: Vec<GeneratorTag>,
    pub h_square: i64,
    pub spec: RootSpec,
    pub component_ranges: Vec<Range<usize>>,
    pub h_index: usize,
}

impl PolarizedForm {
    pub fn rank_s(&self) -> u32 {
        self.spec.rank()
    }

    /// Generators belonging to component `c`.
    pub fn component_generators(&self, c: usize) -> Vec<Element> {
        self.component_ranges[c]
            .clone()
            .map(|i| self.form.generator(i))
            .collect()
    }
}

/// `disc S ⊕ [1/h²]` with components in input order and the `h` generator last.
pub fn polarized_disc(spec: &RootSpec, h2: i64) -> Result<PolarizedForm> {
    if h2 < 2 || h2 % 2 != 0 {
        return Err(Error::InvalidModel(format!(
            "h^2 = {h2} must be even and at least 2"
        )));
    }
    let mut form = FiniteQuadraticForm::trivial();
    let mut tags = Vec::new();
    let mut ranges = Vec::new();
    for (c, label) in spec.components().iter().enumerate() {
        let d = disc_root(label)?;
        let start = form.rank();
        form = form.direct_sum(&d);
        ranges.push(start..form.rank());
        tags.extend(std::iter::repeat_n(GeneratorTag::Component(c), d.rank()));
    }
    let h_index = form.rank();
    form = form.direct_sum(&FiniteQuadraticForm::cyclic(1, h2)?);
    tags.push(GeneratorTag::H);
    Ok(PolarizedForm {
        form,
        tags,
        h_square: h2,
        spec: spec.clone(),
        component_ranges: ranges,
        h_index,
    })
}
