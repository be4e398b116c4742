//! Semigroup-graded algebras and the free graded module spanned by the
//! coset representatives `Λ` of a [`CosetSystem`].
//!
//! Residue fields are abstract coefficient spaces: a degree-0 part of
//! dimension `f₀` over the base field, and `f` further residue basis vectors
//! per representative. Character actions only tag terms with a phase in
//! `ℚ/ℤ`, standing in for a root of unity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::encoding;
use crate::engine::{frac, CosetSystem};
use crate::error::GradedError;
use crate::ordered::{ElementRepr, OrderedGroupElement};
use crate::semigroup::ValueSemigroup;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedAlgebra {
    semigroup: ValueSemigroup,
    residue_degree: u64,
}

impl GradedAlgebra {
    pub fn new(semigroup: ValueSemigroup, residue_degree: u64) -> Result<Self, GradedError> {
        if residue_degree == 0 {
            return Err(GradedError::ZeroResidueDegree);
        }
        Ok(GradedAlgebra {
            semigroup,
            residue_degree,
        })
    }

    pub fn semigroup(&self) -> &ValueSemigroup {
        &self.semigroup
    }

    pub fn residue_degree(&self) -> u64 {
        self.residue_degree
    }

    /// Tensoring with an unramified residue extension of degree `f` keeps the
    /// grading semigroup and multiplies the residue degree.
    pub fn base_change_unramified(&self, f: u64) -> Result<Self, GradedError> {
        if f == 0 {
            return Err(GradedError::ZeroResidueDegree);
        }
        let residue_degree = self
            .residue_degree
            .checked_mul(f)
            .ok_or_else(|| GradedError::Incompatible("residue degree overflows".into()))?;
        Ok(GradedAlgebra {
            semigroup: self.semigroup.clone(),
            residue_degree,
        })
    }
}

/// `τ_σ y^σ` tensored with the `residue_index`-th residue basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedBasisLabel {
    /// Position of `σ` in `Λ`.
    pub sigma: usize,
    pub residue_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub label: GradedBasisLabel,
    /// Degree of the coefficient in the grading semigroup.
    pub gamma: OrderedGroupElement,
    /// Formal root-of-unity tag in `[0, 1)`.
    pub phase: BigRational,
}

/// Finite sum of homogeneous terms; zero coefficient vectors are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedModuleElement {
    terms: BTreeMap<TermKey, Vec<BigRational>>,
}

impl GradedModuleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, Vec<BigRational>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, key: TermKey, coeff: &[BigRational]) {
        let slot = self
            .terms
            .entry(key.clone())
            .or_insert_with(|| vec![BigRational::zero(); coeff.len()]);
        for (a, b) in slot.iter_mut().zip(coeff) {
            *a += b;
        }
        if slot.iter().all(Zero::is_zero) {
            self.terms.remove(&key);
        }
    }
}

/// One term in the JSON term-list encoding.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRecord {
    #[serde(with = "encoding::int_vec")]
    pub sigma: Vec<BigInt>,
    pub residue_index: usize,
    pub gamma: ElementRepr,
    #[serde(with = "encoding::rational_vec")]
    pub coeff: Vec<BigRational>,
    #[serde(with = "encoding::rational", default = "zero_phase")]
    pub phase: BigRational,
}

fn zero_phase() -> BigRational {
    BigRational::zero()
}

/// The fixed submodule of the character action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantPart {
    pub labels: Vec<GradedBasisLabel>,
    pub rank: u64,
}

/// `gr(S)` as a free module over `gr(R)` on the labels `(σ, i)`, `σ ∈ Λ`, `i < f`.
#[derive(Clone, Debug)]
pub struct GradedModule {
    algebra: GradedAlgebra,
    cosets: CosetSystem,
    f: u64,
}

/// `|Λ|·f`.
pub fn free_rank(cs: &CosetSystem, f: u64) -> u64 {
    cs.len() as u64 * f
}

impl GradedModule {
    /// The grading semigroup must live in the base value group, so that term
    /// values at distinct `σ` fall into distinct cosets.
    pub fn new(algebra: GradedAlgebra, cosets: CosetSystem, f: u64) -> Result<Self, GradedError> {
        if f == 0 {
            return Err(GradedError::ZeroResidueDegree);
        }
        if algebra.semigroup.layout() != cosets.extension().layout() {
            return Err(GradedError::Incompatible("semigroup and value groups have different ambients".into()));
        }
        for g in algebra.semigroup.generators() {
            if !cosets.base_group().contains(g).map_err(crate::error::SemigroupError::from)? {
                return Err(GradedError::Incompatible(format!(
                    "semigroup generator {g} is outside the base value group"
                )));
            }
        }
        Ok(GradedModule { algebra, cosets, f })
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn cosets(&self) -> &CosetSystem {
        &self.cosets
    }

    pub fn residue_degree(&self) -> u64 {
        self.f
    }

    pub fn free_rank(&self) -> u64 {
        free_rank(&self.cosets, self.f)
    }

    pub fn basis_labels(&self) -> Vec<GradedBasisLabel> {
        (0..self.cosets.len())
            .flat_map(|sigma| {
                (0..self.f as usize).map(move |residue_index| GradedBasisLabel { sigma, residue_index })
            })
            .collect()
    }

    /// Value of the basis element `τ_σ y^σ`.
    pub fn label_value(&self, label: GradedBasisLabel) -> &OrderedGroupElement {
        &self.cosets.values()[label.sigma]
    }

    /// Number of basis labels whose value falls in each coset, in `Λ` order.
    pub fn coset_multiplicities(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.cosets.len()];
        for l in self.basis_labels() {
            let i = self.cosets.coset_of(self.label_value(l)).expect("label values lie in the group");
            counts[i] += 1;
        }
        counts
    }

    /// Builds an element from `(label, γ, phase, coefficients)` terms, adding
    /// up repeated keys.
    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (GradedBasisLabel, OrderedGroupElement, BigRational, Vec<BigRational>)>,
    ) -> Result<GradedModuleElement, GradedError> {
        let f0 = self.algebra.residue_degree as usize;
        let mut out = GradedModuleElement::zero();
        for (label, gamma, phase, coeff) in terms {
            if label.sigma >= self.cosets.len() {
                return Err(GradedError::UnknownLabel(label.sigma));
            }
            if label.residue_index >= self.f as usize {
                return Err(GradedError::UnknownLabel(label.residue_index));
            }
            if coeff.len() != f0 {
                return Err(GradedError::CoefficientLength {
                    expected: f0,
                    found: coeff.len(),
                });
            }
            if !self.algebra.semigroup.contains(&gamma)? {
                return Err(GradedError::DegreeNotInSemigroup);
            }
            let key = TermKey {
                label,
                gamma,
                phase: frac(&phase),
            };
            out.insert_add(key, &coeff);
        }
        self.check_grading(&out)?;
        Ok(out)
    }

    fn check_grading(&self, x: &GradedModuleElement) -> Result<(), GradedError> {
        let mut seen: BTreeMap<OrderedGroupElement, usize> = BTreeMap::new();
        for k in x.terms.keys() {
            let v = self.term_value(k);
            if let Some(&s) = seen.get(&v) {
                if s != k.label.sigma {
                    return Err(GradedError::ValueCollision(v.to_string()));
                }
            }
            seen.insert(v, k.label.sigma);
        }
        Ok(())
    }

    /// `γ + ν*(τ_σ y^σ)`.
    pub fn term_value(&self, key: &TermKey) -> OrderedGroupElement {
        key.gamma
            .try_add(self.label_value(key.label))
            .expect("same layout")
    }

    /// Minimum of the term values.
    pub fn element_value(&self, x: &GradedModuleElement) -> Result<OrderedGroupElement, GradedError> {
        x.terms
            .keys()
            .map(|k| self.term_value(k))
            .min()
            .ok_or(GradedError::ZeroElement)
    }

    /// The unique decomposition `x = Σ_σ x_σ` by representative.
    pub fn expand(&self, x: &GradedModuleElement) -> Vec<(usize, GradedModuleElement)> {
        let mut parts: BTreeMap<usize, GradedModuleElement> = BTreeMap::new();
        for (k, c) in &x.terms {
            parts.entry(k.label.sigma).or_default().terms.insert(k.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn assemble(&self, parts: &[(usize, GradedModuleElement)]) -> GradedModuleElement {
        parts
            .iter()
            .fold(GradedModuleElement::zero(), |acc, (_, p)| self.add(&acc, p))
    }

    pub fn add(&self, x: &GradedModuleElement, y: &GradedModuleElement) -> GradedModuleElement {
        let mut out = x.clone();
        for (k, c) in &y.terms {
            out.insert_add(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, x: &GradedModuleElement, k: &BigRational) -> GradedModuleElement {
        if k.is_zero() {
            return GradedModuleElement::zero();
        }
        GradedModuleElement {
            terms: x
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c.iter().map(|a| a * k).collect()))
                .collect(),
        }
    }

    /// Action of `ḡ ∈ ℤⁿ/Aᵗℤⁿ`: the term at `σ` gains the phase `χ(ḡ, σ)`.
    pub fn galois_character_action(
        &self,
        g: &[BigInt],
        x: &GradedModuleElement,
    ) -> Result<GradedModuleElement, GradedError> {
        let n = self.cosets.extension().n();
        if g.len() != n {
            return Err(GradedError::Incompatible(format!(
                "group element has length {}, expected {n}",
                g.len()
            )));
        }
        let mut out = GradedModuleElement::zero();
        for (k, c) in &x.terms {
            let chi = self.cosets.character(g, &self.cosets.lambda()[k.label.sigma]);
            let key = TermKey {
                label: k.label,
                gamma: k.gamma.clone(),
                phase: frac(&(&k.phase + chi)),
            };
            out.insert_add(key, c);
        }
        Ok(out)
    }

    /// Labels over the trivial coset; these span the fixed submodule.
    pub fn invariant_part(&self) -> InvariantPart {
        let z = self.cosets.zero_index();
        let labels: Vec<_> = self.basis_labels().into_iter().filter(|l| l.sigma == z).collect();
        InvariantPart {
            rank: labels.len() as u64,
            labels,
        }
    }

    /// Labels whose basis element is fixed by every element of the group,
    /// found by applying each character action.
    pub fn fixed_labels_brute_force(&self) -> Vec<GradedBasisLabel> {
        let zero = OrderedGroupElement::zero(self.cosets.extension().layout().clone());
        let mut unit = vec![BigRational::zero(); self.algebra.residue_degree as usize];
        unit[0] = BigRational::from_integer(1.into());
        let group = self.cosets.group_elements();
        self.basis_labels()
            .into_iter()
            .filter(|&l| {
                let x = self
                    .element([(l, zero.clone(), BigRational::zero(), unit.clone())])
                    .expect("basis element");
                group
                    .iter()
                    .all(|g| self.galois_character_action(g, &x).expect("length n") == x)
            })
            .collect()
    }

    /// Projection onto the terms over the trivial coset.
    pub fn project_invariant(&self, x: &GradedModuleElement) -> GradedModuleElement {
        let z = self.cosets.zero_index();
        GradedModuleElement {
            terms: x
                .terms
                .iter()
                .filter(|(k, _)| k.label.sigma == z)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn element_from_records(&self, records: &[TermRecord]) -> Result<GradedModuleElement, GradedError> {
        let layout = self.cosets.extension().layout().clone();
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let sigma = self
                .cosets
                .lambda()
                .iter()
                .position(|s| *s == r.sigma)
                .ok_or_else(|| GradedError::Incompatible("sigma is not a coset representative".into()))?;
            let gamma = OrderedGroupElement::from_repr(layout.clone(), &r.gamma)
                .map_err(|e| GradedError::Incompatible(e.to_string()))?;
            terms.push((
                GradedBasisLabel {
                    sigma,
                    residue_index: r.residue_index,
                },
                gamma,
                r.phase.clone(),
                r.coeff.clone(),
            ));
        }
        self.element(terms)
    }

    pub fn element_to_records(&self, x: &GradedModuleElement) -> Vec<TermRecord> {
        x.terms
            .iter()
            .map(|(k, c)| TermRecord {
                sigma: self.cosets.lambda()[k.label.sigma].clone(),
                residue_index: k.label.residue_index,
                gamma: k.gamma.to_repr(),
                coeff: c.clone(),
                phase: k.phase.clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{BlockStructure, MonomialExtension};
    use crate::lattice::ExactMatrix;
    use crate::ordered::{GroupLayout, Weights};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn module(diag: &[i64], f: u64, f0: u64) -> GradedModule {
        let n = diag.len();
        let layout = if n == 1 {
            GroupLayout::rational(1)
        } else {
            GroupLayout::new(vec![Weights::quadratic(2).unwrap()]).unwrap()
        };
        let ys: Vec<_> = (0..n)
            .map(|i| {
                let mut c = vec![q(0, 1); n.max(1)];
                c[i] = q(1, 1);
                OrderedGroupElement::new(layout.clone(), vec![c]).unwrap()
            })
            .collect();
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(if i == j { diag[i] } else { 0 })).collect())
            .collect();
        let me = MonomialExtension::without_units(
            layout.clone(),
            BlockStructure::new(vec![n], vec![n]).unwrap(),
            ExactMatrix::from_rows(rows).unwrap(),
            ys,
        )
        .unwrap();
        let cs = CosetSystem::from_extension(&me, None).unwrap();
        let sg = ValueSemigroup::new(layout, me.induced_x_values().unwrap()).unwrap();
        GradedModule::new(GradedAlgebra::new(sg, f0).unwrap(), cs, f).unwrap()
    }

    fn gamma(m: &GradedModule, k: i64) -> OrderedGroupElement {
        m.algebra().semigroup().generators()[0].scale_int(&k.into())
    }

    #[test]
    fn ranks() {
        assert_eq!(module(&[1], 1, 1).free_rank(), 1);
        assert_eq!(module(&[2, 3], 1, 1).free_rank(), 6);
        assert_eq!(module(&[2], 3, 1).free_rank(), 6);
        assert!(module(&[2, 3], 2, 1).coset_multiplicities().iter().all(|&c| c == 2));
    }

    #[test]
    fn base_change() {
        let m = module(&[2], 1, 1);
        let a = m.algebra();
        assert_eq!(a.base_change_unramified(1).unwrap(), *a);
        let six = a.base_change_unramified(2).unwrap().base_change_unramified(3).unwrap();
        assert_eq!(six, a.base_change_unramified(6).unwrap());
        assert_eq!(six.semigroup(), a.semigroup());
        assert_eq!(a.base_change_unramified(0), Err(GradedError::ZeroResidueDegree));
    }

    #[test]
    fn values_and_expansion() {
        let m = module(&[2], 1, 1);
        let zero = m.cosets().zero_index();
        let other = 1 - zero;
        let l0 = GradedBasisLabel { sigma: zero, residue_index: 0 };
        let l1 = GradedBasisLabel { sigma: other, residue_index: 0 };
        // single term at σ = 0 has value γ
        let x = m.element([(l0, gamma(&m, 1), q(0, 1), vec![q(1, 1)])]).unwrap();
        assert_eq!(m.element_value(&x).unwrap(), gamma(&m, 1));
        // values 1 and 1/2 + 1 = 3/2: the minimum wins
        let y = m
            .element([
                (l0, gamma(&m, 1), q(0, 1), vec![q(1, 1)]),
                (l1, gamma(&m, 1), q(0, 1), vec![q(2, 1)]),
            ])
            .unwrap();
        assert_eq!(m.element_value(&y).unwrap(), gamma(&m, 1));
        let parts = m.expand(&y);
        assert_eq!(parts.len(), 2);
        assert_eq!(m.assemble(&parts), y);
        assert!(m.expand(&GradedModuleElement::zero()).is_empty());
        assert_eq!(m.element_value(&GradedModuleElement::zero()), Err(GradedError::ZeroElement));
        let bad = OrderedGroupElement::from_rationals(m.cosets().extension().layout().clone(), vec![q(1, 2)]).unwrap();
        assert_eq!(
            m.element([(l0, bad, q(0, 1), vec![q(1, 1)])]),
            Err(GradedError::DegreeNotInSemigroup)
        );
    }

    #[test]
    fn order_two_character() {
        let m = module(&[2], 1, 1);
        let zero = m.cosets().zero_index();
        let other = 1 - zero;
        let x = m
            .element([
                (GradedBasisLabel { sigma: zero, residue_index: 0 }, gamma(&m, 0), q(0, 1), vec![q(1, 1)]),
                (GradedBasisLabel { sigma: other, residue_index: 0 }, gamma(&m, 0), q(0, 1), vec![q(1, 1)]),
            ])
            .unwrap();
        let g = m.cosets().lambda()[other].clone();
        let gx = m.galois_character_action(&g, &x).unwrap();
        let phases: Vec<_> = gx.terms().keys().map(|k| (k.label.sigma, k.phase.clone())).collect();
        assert!(phases.contains(&(zero, q(0, 1))));
        assert!(phases.contains(&(other, q(1, 2))));
        let id = m.galois_character_action(&m.cosets().lambda()[zero], &x).unwrap();
        assert_eq!(id, x);
    }

    #[test]
    fn invariants_match_fixed_points() {
        for diag in [&[1][..], &[2], &[2, 3]] {
            let m = module(diag, 1, 1);
            assert_eq!(m.invariant_part().labels, m.fixed_labels_brute_force());
        }
        assert_eq!(module(&[2, 3], 1, 1).invariant_part().rank, 1);
        assert_eq!(module(&[1], 1, 1).invariant_part().rank, 1);
    }

    #[test]
    fn records_round_trip() {
        let m = module(&[2, 3], 2, 2);
        let labels = m.basis_labels();
        let x = m
            .element([
                (labels[0], gamma(&m, 2), q(1, 3), vec![q(1, 1), q(0, 1)]),
                (labels[5], gamma(&m, 0), q(0, 1), vec![q(0, 1), q(-5, 2)]),
            ])
            .unwrap();
        let recs = m.element_to_records(&x);
        let json = serde_json::to_value(&recs).unwrap();
        let back: Vec<TermRecord> = serde_json::from_value(json).unwrap();
        assert_eq!(m.element_from_records(&back).unwrap(), x);
    }
}
