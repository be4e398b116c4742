use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::element::{ElementRepr, GroupLayout, LayoutRepr, OrderedGroupElement};
use crate::error::{GroupError, ParseError};
use crate::lattice::{hermite_normal_form, rational, smith_normal_form, ExactMatrix, HermiteForm};

/// Finitely generated subgroup of a lex-ordered block group.
///
/// Internally the generators are scaled by a common denominator and the
/// resulting integer row lattice is kept in Hermite form, which gives a
/// canonical ℤ-basis.
#[derive(Clone, Debug)]
pub struct ValueGroup {
    layout: Arc<GroupLayout>,
    generators: Vec<OrderedGroupElement>,
    scale: BigInt,
    hermite: HermiteForm,
}

#[derive(Serialize, Deserialize)]
struct ValueGroupRepr {
    #[serde(flatten)]
    layout: LayoutRepr,
    generators: Vec<ElementRepr>,
}

impl ValueGroup {
    pub fn new(
        layout: Arc<GroupLayout>,
        generators: Vec<OrderedGroupElement>,
    ) -> Result<Self, GroupError> {
        if generators.iter().any(|g| *g.layout() != layout) {
            return Err(GroupError::AmbientMismatch);
        }
        let coords: Vec<Vec<BigRational>> = generators.iter().map(|g| g.coords()).collect();
        let scale = rational::common_denominator(coords.iter().flatten());
        let rows = coords
            .iter()
            .map(|c| c.iter().map(|x| (x * &scale).to_integer()).collect())
            .collect();
        let m = ExactMatrix::from_rows_with_cols(rows, layout.dim())
            .expect("coordinate rows share the layout width");
        let hermite = hermite_normal_form(&m);
        Ok(ValueGroup {
            layout,
            generators,
            scale,
            hermite,
        })
    }

    pub fn layout(&self) -> &Arc<GroupLayout> {
        &self.layout
    }

    pub fn generators(&self) -> &[OrderedGroupElement] {
        &self.generators
    }

    /// Rank as a free abelian group.
    pub fn free_rank(&self) -> usize {
        self.hermite.rank()
    }

    /// Canonical ℤ-basis.
    pub fn basis(&self) -> Vec<OrderedGroupElement> {
        self.hermite
            .basis
            .iter()
            .map(|row| {
                let c: Vec<BigRational> = row
                    .iter()
                    .map(|x| BigRational::new(x.clone(), self.scale.clone()))
                    .collect();
                OrderedGroupElement::from_coords(self.layout.clone(), &c).expect("layout width")
            })
            .collect()
    }

    /// Integer coordinates of `g` in [`Self::basis`], if `g` belongs to the group.
    pub fn coordinates(&self, g: &OrderedGroupElement) -> Result<Option<Vec<BigInt>>, GroupError> {
        if *g.layout() != self.layout {
            return Err(GroupError::AmbientMismatch);
        }
        let mut scaled = Vec::with_capacity(self.layout.dim());
        for x in g.coords() {
            let y = x * &self.scale;
            if !y.is_integer() {
                return Ok(None);
            }
            scaled.push(y.to_integer());
        }
        Ok(self.hermite.coordinates(&scaled))
    }

    pub fn element_from_coordinates(&self, c: &[BigInt]) -> OrderedGroupElement {
        let mut acc = OrderedGroupElement::zero(self.layout.clone());
        for (ci, b) in c.iter().zip(self.basis()) {
            acc = acc.try_add(&b.scale_int(ci)).expect("same layout");
        }
        acc
    }

    pub fn contains(&self, g: &OrderedGroupElement) -> Result<bool, GroupError> {
        Ok(self.coordinates(g)?.is_some())
    }

    /// Equality as subgroups (independent of the chosen generators).
    pub fn same_group(&self, other: &ValueGroup) -> bool {
        self.layout == other.layout
            && self.free_rank() == other.free_rank()
            && other
                .generators
                .iter()
                .all(|g| matches!(self.coordinates(g), Ok(Some(_))))
            && self
                .generators
                .iter()
                .all(|g| matches!(other.coordinates(g), Ok(Some(_))))
    }

    /// Rational rank of each quotient `Φ_{i−1}/Φ_i` of the isolated chain.
    pub fn rational_ranks(&self) -> Vec<usize> {
        let coords: Vec<Vec<BigRational>> = self.generators.iter().map(|g| g.coords()).collect();
        let ranges = self.layout.block_ranges();
        // dim(V ∩ Φ_{i}) = dim V − rank(projection of V onto blocks < i)
        let prefix_rank = |end: usize| -> usize {
            if end == 0 {
                return 0;
            }
            let proj: Vec<Vec<BigRational>> = coords.iter().map(|c| c[..end].to_vec()).collect();
            rational::rank(&proj)
        };
        let mut out = Vec::with_capacity(ranges.len());
        let mut prev = 0;
        for r in &ranges {
            let cur = prefix_rank(r.end);
            out.push(cur - prev);
            prev = cur;
        }
        out
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, ParseError> {
        let repr: ValueGroupRepr =
            serde_json::from_value(v.clone()).map_err(|e| ParseError::Shape(e.to_string()))?;
        let layout = GroupLayout::from_repr(&repr.layout)?;
        let gens = repr
            .generators
            .iter()
            .map(|g| OrderedGroupElement::from_repr(layout.clone(), g))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ParseError::Shape(e.to_string()))?;
        ValueGroup::new(layout, gens).map_err(|e| ParseError::Shape(e.to_string()))
    }
}

impl Serialize for ValueGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ValueGroupRepr {
            layout: self.layout.to_repr(),
            generators: self.generators.iter().map(|g| g.to_repr()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        ValueGroup::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// The chain `Φ_0 ⊃ Φ_1 ⊃ … ⊃ Φ_r = 0`, where `Φ_i` is the set of elements
/// whose first `i` blocks vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatedChain {
    rank: usize,
}

impl IsolatedChain {
    /// Chain of a group; every block must carry a nonzero quotient.
    pub fn of(group: &ValueGroup) -> Result<Self, GroupError> {
        let ranks = group.rational_ranks();
        if let Some(i) = ranks.iter().position(|&s| s == 0) {
            return Err(GroupError::Layout(format!(
                "block {i} has rational rank 0, so the chain is not strictly decreasing"
            )));
        }
        Ok(IsolatedChain { rank: ranks.len() })
    }

    /// Chain of the ambient layout, without checking any group.
    pub fn from_layout(layout: &GroupLayout) -> Self {
        IsolatedChain {
            rank: layout.rank(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn contains(&self, level: usize, g: &OrderedGroupElement) -> bool {
        isolated_level(g, self) >= level
    }
}

/// Largest `i` with `γ ∈ Φ_i`.
pub fn isolated_level(g: &OrderedGroupElement, chain: &IsolatedChain) -> usize {
    g.leading_block().min(chain.rank)
}

/// Canonical representative of a coset of `small` in `big`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetLabel {
    /// Coordinates in the basis of `big`, reduced modulo `small` (Hermite reduction).
    #[serde(with = "crate::encoding::int_vec")]
    pub residues: Vec<BigInt>,
    pub representative: OrderedGroupElement,
}

/// A finite-index inclusion `small ⊂ big` with everything needed to
/// compute the index, invariant factors and coset labels.
#[derive(Clone, Debug)]
pub struct Inclusion {
    big: ValueGroup,
    small: ValueGroup,
    /// Rows: coordinates of the generators of `small` in the basis of `big`.
    coords: ExactMatrix,
    small_hermite: HermiteForm,
    /// `U·coords·V = D`; `x ↦ x·V` diagonalizes the quotient.
    snf_v: ExactMatrix,
    snf_diag: Vec<BigInt>,
}

impl Inclusion {
    pub fn new(big: &ValueGroup, small: &ValueGroup) -> Result<Self, GroupError> {
        if big.layout != small.layout {
            return Err(GroupError::AmbientMismatch);
        }
        let mut rows = Vec::with_capacity(small.generators.len());
        for (i, g) in small.generators.iter().enumerate() {
            match big.coordinates(g)? {
                Some(c) => rows.push(c),
                None => return Err(GroupError::NotASubgroup { index: i }),
            }
        }
        let k = big.free_rank();
        let coords = ExactMatrix::from_rows_with_cols(rows, k).expect("coordinate width");
        let small_hermite = hermite_normal_form(&coords);
        if small_hermite.rank() < k {
            return Err(GroupError::InfiniteIndex);
        }
        let snf = smith_normal_form(&coords);
        let snf_diag = snf.diagonal();
        Ok(Inclusion {
            big: big.clone(),
            small: small.clone(),
            coords,
            small_hermite,
            snf_v: snf.v,
            snf_diag,
        })
    }

    pub fn big(&self) -> &ValueGroup {
        &self.big
    }

    pub fn small(&self) -> &ValueGroup {
        &self.small
    }

    /// Coordinates of the generators of `small` in the basis of `big`.
    pub fn coordinate_matrix(&self) -> &ExactMatrix {
        &self.coords
    }

    pub fn index(&self) -> BigInt {
        self.snf_diag.iter().product()
    }

    /// Invariant factors of `big/small` exceeding one.
    pub fn invariants(&self) -> Vec<BigInt> {
        self.snf_diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn label(&self, g: &OrderedGroupElement) -> Result<CosetLabel, GroupError> {
        let c = self.big.coordinates(g)?.ok_or(GroupError::NotInGroup)?;
        let residues = self.small_hermite.reduce(&c);
        let representative = self.big.element_from_coordinates(&residues);
        Ok(CosetLabel {
            residues,
            representative,
        })
    }

    /// Mixed-radix coordinates of the coset in `⊕ ℤ/d_i` (only `d_i > 1`),
    /// each reduced into `[0, d_i)`.
    pub fn mixed_radix(&self, g: &OrderedGroupElement) -> Result<Vec<BigInt>, GroupError> {
        let c = self.big.coordinates(g)?.ok_or(GroupError::NotInGroup)?;
        let y = self.snf_v.vec_mul(&c).expect("coordinate width");
        Ok(y.iter()
            .zip(&self.snf_diag)
            .filter(|(_, d)| !d.is_one())
            .map(|(x, d)| num_integer::Integer::mod_floor(x, d))
            .collect())
    }

    pub fn same_coset(&self, a: &OrderedGroupElement, b: &OrderedGroupElement) -> Result<bool, GroupError> {
        let diff = a.try_sub(b)?;
        self.small.contains(&diff)
    }
}

/// `[big : small]`.
pub fn subgroup_index(big: &ValueGroup, small: &ValueGroup) -> Result<BigInt, GroupError> {
    Ok(Inclusion::new(big, small)?.index())
}

/// Canonical label of `g + small` inside `big`.
pub fn coset_label(
    g: &OrderedGroupElement,
    big: &ValueGroup,
    small: &ValueGroup,
) -> Result<CosetLabel, GroupError> {
    Inclusion::new(big, small)?.label(g)
}
