use super::{Element, FiniteQuadraticForm};
use crate::zlinalg::{self, Mat, QuotientPresentation};

/// A subgroup of `⊕ Z/d_i`, stored through its preimage lattice in `Z^k`
/// (which contains `diag(d) Z^k`) in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    orders: Vec<i64>,
    generators: Vec<Element>,
    lattice: Mat,
    basis: Vec<Element>,
    order: u64,
}

impl Subgroup {
    pub fn generated_by(form: &FiniteQuadraticForm, generators: Vec<Element>) -> Self {
        let orders = form.orders().to_vec();
        let moduli: Vec<i128> = orders.iter().map(|&d| i128::from(d)).collect();
        let rows: Vec<Vec<i128>> = generators.iter().map(Element::wide).collect();
        let lattice = zlinalg::lattice_hnf(&rows, &moduli);
        Self::from_lattice(orders, lattice, Some(generators))
    }

    pub fn trivial(form: &FiniteQuadraticForm) -> Self {
        Self::generated_by(form, vec![])
    }

    pub fn whole(form: &FiniteQuadraticForm) -> Self {
        let gens = (0..form.rank()).map(|i| form.generator(i)).collect();
        Self::generated_by(form, gens)
    }

    pub(crate) fn from_lattice(
        orders: Vec<i64>,
        lattice: Mat,
        generators: Option<Vec<Element>>,
    ) -> Self {
        let mut basis = Vec::new();
        let mut order: u64 = 1;
        for (i, row) in lattice.iter().enumerate() {
            let d = i128::from(orders[i]);
            let pivot = row[i];
            if pivot < d {
                basis.push(reduce(row, &orders));
                order *= (d / pivot) as u64;
            }
        }
        let generators = generators.unwrap_or_else(|| basis.clone());
        Subgroup {
            orders,
            generators,
            lattice,
            basis,
            order,
        }
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Canonical basis: the nontrivial rows of the Hermite normal form.
    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub(crate) fn lattice(&self) -> &Mat {
        &self.lattice
    }

    pub fn ambient_orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn contains(&self, x: &Element) -> bool {
        zlinalg::solve_upper(&self.lattice, &x.wide()).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// A presentation `⊕ Z/e_i` with independent generators (Smith normal form).
    pub fn presentation(&self) -> (Vec<Element>, Vec<i64>) {
        let moduli: Vec<i128> = self.orders.iter().map(|&d| i128::from(d)).collect();
        let inner = zlinalg::lattice_hnf(&[], &moduli);
        let pres = QuotientPresentation::new(&self.lattice, &inner);
        let gens = pres
            .gens
            .iter()
            .map(|g| {
                Element(
                    g.iter()
                        .zip(&self.orders)
                        .map(|(&c, &d)| c.rem_euclid(i128::from(d)) as i64)
                        .collect(),
                )
            })
            .collect();
        (gens, pres.orders.iter().map(|&e| e as i64).collect())
    }

    /// All elements, sorted lexicographically.
    pub fn elements(&self) -> Vec<Element> {
        let (gens, orders) = self.presentation();
        let mut out = vec![Element(vec![0; self.orders.len()])];
        for (g, &e) in gens.iter().zip(&orders) {
            let mut next = Vec::with_capacity(out.len() * e as usize);
            for x in &out {
                for t in 0..e {
                    let y =
                        x.0.iter()
                            .zip(&g.0)
                            .zip(&self.orders)
                            .map(|((&a, &b), &d)| (a + t * b).rem_euclid(d))
                            .collect();
                    next.push(Element(y));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// The same subgroup, generated by its canonical basis.
    pub fn smith_canonicalize(&self) -> Subgroup {
        Subgroup {
            generators: self.basis.clone(),
            ..self.clone()
        }
    }

    /// Equality as subgroups, ignoring the stored generators.
    pub fn same_subgroup(&self, other: &Subgroup) -> bool {
        self.orders == other.orders && self.lattice == other.lattice
    }
}

fn reduce(row: &[i128], orders: &[i64]) -> Element {
    Element(
        row.iter()
            .zip(orders)
            .map(|(&c, &d)| c.rem_euclid(i128::from(d)) as i64)
            .collect(),
    )
}
