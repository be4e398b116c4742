use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

use crate::encoding;
use crate::error::{EngineError, GroupError};
use crate::extension::{MonomialExtension, SsmForm};
use crate::lattice::{hermite_normal_form, quotient_invariants, smith_normal_form, solve_integer, ExactMatrix};
use crate::monoid::parallelepiped_points;
use crate::ordered::{CosetLabel, Inclusion, OrderedGroupElement, ValueGroup};

/// Representatives `Λ ⊂ ℤⁿ` of the cosets of the base value group inside
/// the extended one, together with the values `Σ σ_j·ν*(y_j)` and their labels.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    extension: MonomialExtension,
    star: ValueGroup,
    base: ValueGroup,
    inclusion: Inclusion,
    e: BigInt,
    invariants: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
    values: Vec<OrderedGroupElement>,
    labels: Vec<CosetLabel>,
    by_residues: BTreeMap<Vec<BigInt>, usize>,
    /// `U` and diagonal of the Smith form of `Aᵗ`; `b ↦ (U·b)_i mod d_i`
    /// identifies `ℤⁿ/Aᵗℤⁿ` with `⊕ ℤ/d_i`.
    pairing_u: ExactMatrix,
    pairing_diag: Vec<BigInt>,
}

#[derive(Serialize)]
struct CosetEntry<'a> {
    #[serde(with = "encoding::int_vec")]
    sigma: &'a [BigInt],
    value: &'a OrderedGroupElement,
    label: &'a CosetLabel,
}

impl CosetSystem {
    /// Builds the system after checking that the value map induces
    /// `ℤⁿ/Aᵗℤⁿ ≅ Φ*/Φ` and that `[Φ* : Φ] = |det A_T|`.
    ///
    /// `declared_star` overrides the group generated by the `y`-values; it
    /// must coincide with that group.
    pub fn build(ssm: &SsmForm, declared_star: Option<&ValueGroup>) -> Result<Self, EngineError> {
        Self::from_extension(ssm.extension(), declared_star)
    }

    /// Like [`Self::build`], but without requiring a certified form first;
    /// a broken hypothesis is then reported by the hypothesis checks themselves.
    pub fn from_extension(
        me: &MonomialExtension,
        declared_star: Option<&ValueGroup>,
    ) -> Result<Self, EngineError> {
        let a = me.exponents();
        let generated = me.star_group();
        let star = match declared_star {
            None => generated,
            Some(g) => {
                if g.layout() != me.layout() {
                    return Err(GroupError::AmbientMismatch.into());
                }
                if let Some(w) = g.generators().iter().find(|w| !matches!(generated.contains(w), Ok(true))) {
                    return Err(EngineError::QuotientHypothesisFailed {
                        reason: "a generator of the declared group is not a combination of the y-values".into(),
                        witness: vec![w.to_string()],
                    });
                }
                if let Some(j) = me.y_values().iter().position(|y| !matches!(g.contains(y), Ok(true))) {
                    return Err(EngineError::QuotientHypothesisFailed {
                        reason: format!("value of y_{j} lies outside the declared group"),
                        witness: vec![me.y_values()[j].to_string()],
                    });
                }
                g.clone()
            }
        };
        let base = me.base_group();

        // The value map must kill exactly the row lattice of A.
        let y_coords: Vec<Vec<BigInt>> = me
            .y_values()
            .iter()
            .map(|y| star.coordinates(y).map(|c| c.expect("y-values generate the group")))
            .collect::<Result<_, _>>()?;
        let ymat = ExactMatrix::from_rows_with_cols(y_coords, star.free_rank())?;
        let at = a.transpose();
        for k in hermite_normal_form(&ymat).left_kernel() {
            if solve_integer(&at, &k)?.is_none() {
                return Err(EngineError::QuotientHypothesisFailed {
                    reason: "the value map has a kernel vector outside the row lattice of A".into(),
                    witness: k.iter().map(|x| x.to_string()).collect(),
                });
            }
        }

        let det = me.t_submatrix().determinant()?.abs();
        let inclusion = match Inclusion::new(&star, &base) {
            Ok(inc) => inc,
            Err(GroupError::InfiniteIndex) => {
                return Err(EngineError::IndexHypothesisFailed {
                    group_index: "infinite".into(),
                    determinant: det.to_string(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let e = inclusion.index();
        if e != det {
            return Err(EngineError::IndexHypothesisFailed {
                group_index: e.to_string(),
                determinant: det.to_string(),
            });
        }
        let invariants = inclusion.invariants();
        let expected = quotient_invariants(&at)?;
        if invariants != expected {
            return Err(EngineError::QuotientHypothesisFailed {
                reason: "invariant factors of the value-group quotient differ from those of the exponent lattice".into(),
                witness: invariants.iter().chain(&expected).map(|x| x.to_string()).collect(),
            });
        }

        let pp = parallelepiped_points(&a.to_rows()).map_err(|_| crate::error::LatticeError::SingularLattice)?;
        let lambda = pp.points;
        let mut values = Vec::with_capacity(lambda.len());
        let mut labels = Vec::with_capacity(lambda.len());
        let mut by_residues = BTreeMap::new();
        for (i, sigma) in lambda.iter().enumerate() {
            let v = me.monomial_value(sigma);
            let lab = inclusion.label(&v)?;
            if let Some(&other) = by_residues.get(&lab.residues) {
                return Err(EngineError::QuotientHypothesisFailed {
                    reason: format!("representatives {other} and {i} have the same coset"),
                    witness: sigma.iter().map(|x| x.to_string()).collect(),
                });
            }
            by_residues.insert(lab.residues.clone(), i);
            values.push(v);
            labels.push(lab);
        }
        if BigInt::from(lambda.len()) != e {
            return Err(EngineError::IndexHypothesisFailed {
                group_index: e.to_string(),
                determinant: lambda.len().to_string(),
            });
        }

        let snf = smith_normal_form(&at);
        Ok(CosetSystem {
            extension: me.clone(),
            star,
            base,
            inclusion,
            e,
            invariants,
            lambda,
            values,
            labels,
            by_residues,
            pairing_diag: snf.diagonal(),
            pairing_u: snf.u,
        })
    }

    pub fn extension(&self) -> &MonomialExtension {
        &self.extension
    }

    pub fn star_group(&self) -> &ValueGroup {
        &self.star
    }

    pub fn base_group(&self) -> &ValueGroup {
        &self.base
    }

    pub fn inclusion(&self) -> &Inclusion {
        &self.inclusion
    }

    /// `e = [Φ* : Φ] = |Λ|`.
    pub fn e(&self) -> &BigInt {
        &self.e
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Invariant factors (> 1) of the quotient.
    pub fn invariants(&self) -> &[BigInt] {
        &self.invariants
    }

    pub fn lambda(&self) -> &[Vec<BigInt>] {
        &self.lambda
    }

    pub fn values(&self) -> &[OrderedGroupElement] {
        &self.values
    }

    pub fn labels(&self) -> &[CosetLabel] {
        &self.labels
    }

    /// Index in `Λ` of the zero representative.
    pub fn zero_index(&self) -> usize {
        self.lambda
            .iter()
            .position(|s| s.iter().all(Zero::is_zero))
            .expect("the origin is always a representative")
    }

    /// Index of the representative whose value lies in the coset of `g`.
    pub fn coset_of(&self, g: &OrderedGroupElement) -> Result<usize, GroupError> {
        let lab = self.inclusion.label(g)?;
        Ok(*self.by_residues.get(&lab.residues).expect("every coset is represented"))
    }

    /// Coordinates of `b + Aᵗℤⁿ` in `⊕ ℤ/d_i` (all diagonal entries, including ones).
    pub fn quotient_coordinates(&self, b: &[BigInt]) -> Vec<BigInt> {
        let u = self.pairing_u.mul_vec(b).expect("length n");
        u.iter()
            .zip(&self.pairing_diag)
            .map(|(x, d)| if d.is_zero() { x.clone() } else { x.mod_floor(d) })
            .collect()
    }

    /// `χ(g, σ) = Σ (Ug)_i (Uσ)_i / d_i mod 1`, in `[0, 1)`.
    pub fn character(&self, g: &[BigInt], sigma: &[BigInt]) -> BigRational {
        let ug = self.quotient_coordinates(g);
        let us = self.quotient_coordinates(sigma);
        let mut acc = BigRational::zero();
        for ((x, y), d) in ug.iter().zip(&us).zip(&self.pairing_diag) {
            if !d.is_one() {
                acc += BigRational::new(x * y, d.clone());
            }
        }
        frac(&acc)
    }

    /// One representative per element of `ℤⁿ/Aᵗℤⁿ`.
    pub fn group_elements(&self) -> Vec<Vec<BigInt>> {
        self.lambda.clone()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let entries: Vec<CosetEntry> = self
            .lambda
            .iter()
            .zip(&self.values)
            .zip(&self.labels)
            .map(|((sigma, value), label)| CosetEntry { sigma, value, label })
            .collect();
        serde_json::json!({
            "e": self.e.to_string(),
            "invariants": self.invariants.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "star_group": self.star,
            "base_group": self.base,
            "lambda": entries,
        })
    }
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::BlockStructure;
    use crate::ordered::GroupLayout;
    use std::collections::BTreeSet;

    fn system(a: &[&[i64]], ys: &[(i64, i64)]) -> Result<CosetSystem, EngineError> {
        let n = a.len();
        let layout = GroupLayout::rational(1);
        let ys = ys
            .iter()
            .map(|&(p, q)| OrderedGroupElement::from_rationals(layout.clone(), vec![BigRational::new(p.into(), q.into())]).unwrap())
            .collect();
        let me = MonomialExtension::without_units(
            layout,
            BlockStructure::new(vec![n], vec![n]).unwrap(),
            ExactMatrix::from_i64(a),
            ys,
        )
        .unwrap();
        CosetSystem::from_extension(&me, None)
    }

    #[test]
    fn trivial_system() {
        let cs = system(&[&[1]], &[(1, 1)]).unwrap();
        assert_eq!(cs.lambda(), &[vec![BigInt::zero()]]);
        assert_eq!(*cs.e(), BigInt::one());
    }

    #[test]
    fn dependent_values_fail() {
        let err = system(&[&[2, 0], &[0, 3]], &[(1, 1), (1, 1)]).unwrap_err();
        assert!(matches!(err, EngineError::QuotientHypothesisFailed { .. }), "{err:?}");
    }

    #[test]
    fn quadratic_pair() {
        // rank one group but two rationally independent values needs a quadratic block
        let layout = GroupLayout::new(vec![crate::ordered::Weights::quadratic(2).unwrap()]).unwrap();
        let q = |p: i64| BigRational::from_integer(p.into());
        let ys = vec![
            OrderedGroupElement::new(layout.clone(), vec![vec![q(1), q(0)]]).unwrap(),
            OrderedGroupElement::new(layout.clone(), vec![vec![q(0), q(1)]]).unwrap(),
        ];
        let me = MonomialExtension::without_units(
            layout,
            BlockStructure::new(vec![2], vec![2]).unwrap(),
            ExactMatrix::from_i64(&[&[2, 0], &[0, 3]]),
            ys,
        )
        .unwrap();
        let cs = CosetSystem::build(&SsmForm::certify(me).unwrap(), None).unwrap();
        assert_eq!(cs.len(), 6);
        let residues: BTreeSet<_> = cs.labels().iter().map(|l| l.residues.clone()).collect();
        assert_eq!(residues.len(), 6);
        // brute force: every value b·y with b in a box hits one of the six cosets
        for b0 in 0..6i64 {
            for b1 in 0..6i64 {
                let v = cs.extension().monomial_value(&[b0.into(), b1.into()]);
                let i = cs.coset_of(&v).unwrap();
                let diff = v.try_sub(&cs.values()[i]).unwrap();
                assert!(cs.base_group().contains(&diff).unwrap());
            }
        }
    }

    #[test]
    fn character_of_order_two() {
        let cs = system(&[&[2]], &[(1, 2)]).unwrap();
        let one = vec![BigInt::one()];
        let zero = vec![BigInt::zero()];
        assert_eq!(cs.character(&one, &one), BigRational::new(1.into(), 2.into()));
        assert_eq!(cs.character(&one, &zero), BigRational::zero());
        assert_eq!(cs.character(&zero, &one), BigRational::zero());
    }
}
