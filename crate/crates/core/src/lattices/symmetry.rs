//! Automorphisms of discriminant forms and the involutions induced by Dynkin
//! diagram symmetries and `h ↦ ±h`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqf::{Element, FiniteQuadraticForm};

use super::{AdeLabel, PolarizedForm};

/// Maximum number of involutions `disc_involutions` will materialize.
pub const INVOLUTION_LIMIT: usize = 200_000;

/// A group endomorphism of `⊕ Z/d_i` given by an integer matrix whose column `j`
/// holds the image of generator `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DiscAutomorphism {
    matrix: Vec<Vec<i64>>,
}

impl DiscAutomorphism {
    pub fn new(matrix: Vec<Vec<i64>>) -> Self {
        DiscAutomorphism { matrix }
    }

    pub fn identity(k: usize) -> Self {
        Self::scalar(k, 1)
    }

    pub fn scalar(k: usize, s: i64) -> Self {
        DiscAutomorphism {
            matrix: (0..k)
                .map(|i| (0..k).map(|j| if i == j { s } else { 0 }).collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Entries reduced modulo the orders of the rows' generators.
    pub fn reduced(&self, form: &FiniteQuadraticForm) -> Self {
        let orders = form.orders();
        DiscAutomorphism {
            matrix: self
                .matrix
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|&x| x.rem_euclid(orders[i])).collect())
                .collect(),
        }
    }

    pub fn image_of_generator(&self, form: &FiniteQuadraticForm, j: usize) -> Element {
        form.reduce_unchecked(&self.matrix.iter().map(|row| row[j]).collect::<Vec<_>>())
    }

    pub fn apply(&self, form: &FiniteQuadraticForm, x: &Element) -> Element {
        let k = self.dim();
        let coeffs: Vec<i64> = (0..k)
            .map(|i| {
                let d = i128::from(form.orders()[i]);
                let s: i128 = (0..k)
                    .map(|j| i128::from(self.matrix[i][j]) * i128::from(x.0[j]))
                    .sum();
                s.rem_euclid(d) as i64
            })
            .collect();
        Element(coeffs)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self, form: &FiniteQuadraticForm) -> Self {
        let k = self.dim();
        let mut matrix = vec![vec![0; k]; k];
        for j in 0..k {
            let image = self.apply(form, &other.image_of_generator(form, j));
            for i in 0..k {
                matrix[i][j] = image.0[i];
            }
        }
        DiscAutomorphism { matrix }
    }

    pub fn is_identity(&self, form: &FiniteQuadraticForm) -> bool {
        self.reduced(form) == Self::identity(self.dim()).reduced(form)
    }

    pub fn is_involution(&self, form: &FiniteQuadraticForm) -> bool {
        self.compose(self, form).is_identity(form)
    }

    /// Checks that the matrix defines a form-preserving automorphism.
    pub fn validate(&self, form: &FiniteQuadraticForm) -> Result<()> {
        let k = form.rank();
        if self.dim() != k || self.matrix.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidAutomorphism(format!("matrix is not {k}×{k}")));
        }
        let images: Vec<Element> = (0..k).map(|j| self.image_of_generator(form, j)).collect();
        for (j, img) in images.iter().enumerate() {
            if form.orders()[j] % form.element_order(img) != 0 {
                return Err(Error::InvalidAutomorphism(format!(
                    "image of generator {j} has the wrong order"
                )));
            }
            if form.q_numerator(img) != form.q_numerator(&form.generator(j)) {
                return Err(Error::InvalidAutomorphism(format!(
                    "q not preserved on generator {j}"
                )));
            }
            for (i, other) in images.iter().enumerate().skip(j + 1) {
                if form.b_numerator(img, other)
                    != form.b_numerator(&form.generator(j), &form.generator(i))
                {
                    return Err(Error::InvalidAutomorphism(format!(
                        "b not preserved on generators {j}, {i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Group generated by a set of automorphisms (closure under composition).
pub fn generated_group(
    form: &FiniteQuadraticForm,
    gens: &[DiscAutomorphism],
) -> Vec<DiscAutomorphism> {
    let id = DiscAutomorphism::identity(form.rank()).reduced(form);
    let mut group: BTreeSet<DiscAutomorphism> = BTreeSet::new();
    group.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for s in gens {
            let h = s.compose(&g, form).reduced(form);
            if group.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    group.into_iter().collect()
}

/// Images of the Dynkin diagram symmetries of one ADE component on its discriminant.
pub fn component_symmetries(label: &AdeLabel) -> Result<Vec<DiscAutomorphism>> {
    let root = super::RootDiscriminant::new(label)?;
    let gens: Vec<DiscAutomorphism> = label
        .diagram_symmetry_generators()
        .iter()
        .map(|perm| root.induced_by_permutation(perm))
        .collect::<Result<_>>()?;
    Ok(generated_group(&root.form, &gens))
}

struct ClassData {
    positions: Vec<usize>,
    group: Vec<DiscAutomorphism>,
    involutive: Vec<usize>,
    inverse: Vec<usize>,
    dim: usize,
}

/// Local block assignment of one isomorphism class: for each position, the
/// target position and the element of `H_X` used.
type ClassChoice = Vec<(usize, usize)>;

fn class_involutions(data: &ClassData, limit: usize) -> Result<Vec<ClassChoice>> {
    let k = data.positions.len();
    let mut out = Vec::new();
    let mut current: Vec<Option<(usize, usize)>> = vec![None; k];
    fn rec(
        data: &ClassData,
        current: &mut Vec<Option<(usize, usize)>>,
        out: &mut Vec<ClassChoice>,
        limit: usize,
    ) -> Result<()> {
        let Some(i) = current.iter().position(Option::is_none) else {
            out.push(current.iter().map(|c| c.expect("assigned")).collect());
            if out.len() > limit {
                return Err(Error::TooManyInvolutions(limit));
            }
            return Ok(());
        };
        for &h in &data.involutive {
            current[i] = Some((i, h));
            rec(data, current, out, limit)?;
        }
        for j in i + 1..current.len() {
            if current[j].is_some() {
                continue;
            }
            for h in 0..data.group.len() {
                current[i] = Some((j, h));
                current[j] = Some((i, data.inverse[h]));
                rec(data, current, out, limit)?;
                current[j] = None;
            }
        }
        current[i] = None;
        Ok(())
    }
    rec(data, &mut current, &mut out, limit)?;
    Ok(out)
}

fn class_data(pf: &PolarizedForm) -> Result<Vec<ClassData>> {
    let mut classes: Vec<(AdeLabel, Vec<usize>)> = Vec::new();
    for (c, label) in pf.spec.components().iter().enumerate() {
        if pf.component_ranges[c].is_empty() {
            continue;
        }
        match classes.iter_mut().find(|(l, _)| l == label) {
            Some((_, positions)) => positions.push(c),
            None => classes.push((*label, vec![c])),
        }
    }
    classes
        .into_iter()
        .map(|(label, positions)| {
            let root = super::RootDiscriminant::new(&label)?;
            let group = component_symmetries(&label)?;
            let id = DiscAutomorphism::identity(root.form.rank()).reduced(&root.form);
            let involutive = (0..group.len())
                .filter(|&h| group[h].compose(&group[h], &root.form).reduced(&root.form) == id)
                .collect();
            let inverse = (0..group.len())
                .map(|h| {
                    (0..group.len())
                        .find(|&g| {
                            group[h].compose(&group[g], &root.form).reduced(&root.form) == id
                        })
                        .expect("finite group element has an inverse")
                })
                .collect();
            Ok(ClassData {
                positions,
                group,
                involutive,
                inverse,
                dim: root.form.rank(),
            })
        })
        .collect()
}

/// All involutions of `disc S_h` induced by Dynkin symmetries and `h ↦ ±h`,
/// deduplicated and sorted by matrix entries.
pub fn disc_involutions(pf: &PolarizedForm) -> Result<Vec<DiscAutomorphism>> {
    let form = &pf.form;
    let k = form.rank();
    let classes = class_data(pf)?;
    let per_class: Vec<Vec<ClassChoice>> = classes
        .iter()
        .map(|c| class_involutions(c, INVOLUTION_LIMIT))
        .collect::<Result<_>>()?;
    let total = per_class
        .iter()
        .try_fold(2usize, |acc, v| acc.checked_mul(v.len()))
        .filter(|&t| t <= INVOLUTION_LIMIT);
    if total.is_none() {
        return Err(Error::TooManyInvolutions(INVOLUTION_LIMIT));
    }
    let mut result: BTreeSet<DiscAutomorphism> = BTreeSet::new();
    let mut idx = vec![0usize; per_class.len()];
    loop {
        for h_sign in [1i64, -1] {
            let mut matrix = vec![vec![0i64; k]; k];
            let hi = pf.h_index;
            matrix[hi][hi] = h_sign.rem_euclid(form.orders()[hi]);
            for (ci, class) in classes.iter().enumerate() {
                let choice = &per_class[ci][idx[ci]];
                for (local, &(target, h)) in choice.iter().enumerate() {
                    let src = pf.component_ranges[class.positions[local]].clone();
                    let dst = pf.component_ranges[class.positions[target]].clone();
                    let block = class.group[h].matrix();
                    for a in 0..class.dim {
                        for b in 0..class.dim {
                            matrix[dst.start + a][src.start + b] = block[a][b];
                        }
                    }
                }
            }
            result.insert(DiscAutomorphism::new(matrix).reduced(form));
        }
        // odometer over class choices
        let mut pos = per_class.len();
        loop {
            if pos == 0 {
                return Ok(result.into_iter().collect());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_class[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Membership in the group generated by Dynkin symmetries and `h ↦ ±h`.
pub fn is_diagram_symmetry(pf: &PolarizedForm, auto: &DiscAutomorphism) -> Result<bool> {
    let form = &pf.form;
    let k = form.rank();
    if auto.dim() != k {
        return Ok(false);
    }
    let m = auto.reduced(form);
    let mat = m.matrix();
    let hi = pf.h_index;
    let d_h = form.orders()[hi];
    for i in 0..k {
        if i != hi && mat[i][hi] != 0 {
            return Ok(false);
        }
    }
    if mat[hi][hi] != 1 % d_h && mat[hi][hi] != (d_h - 1) % d_h {
        return Ok(false);
    }
    let ranges = &pf.component_ranges;
    let mut used = vec![false; ranges.len()];
    for (c, src) in ranges.iter().enumerate() {
        if src.is_empty() {
            continue;
        }
        let support: BTreeSet<usize> = src
            .clone()
            .flat_map(|j| (0..k).filter(move |&i| mat[i][j] != 0))
            .map(|i| {
                if i == hi {
                    usize::MAX
                } else {
                    ranges
                        .iter()
                        .position(|r| r.contains(&i))
                        .expect("generator in a component")
                }
            })
            .collect();
        let target = match support.len() {
            0 => return Ok(false),
            1 => *support.iter().next().expect("one element"),
            _ => return Ok(false),
        };
        if target == usize::MAX || used[target] {
            return Ok(false);
        }
        let label = pf.spec.components()[c];
        if pf.spec.components()[target] != label {
            return Ok(false);
        }
        used[target] = true;
        let dst = ranges[target].clone();
        let block: Vec<Vec<i64>> = dst
            .clone()
            .map(|a| src.clone().map(|b| mat[a][b]).collect())
            .collect();
        let root = super::RootDiscriminant::new(&label)?;
        let candidate = DiscAutomorphism::new(block).reduced(&root.form);
        if !component_symmetries(&label)?.contains(&candidate) {
            return Ok(false);
        }
    }
    Ok(true)
}
