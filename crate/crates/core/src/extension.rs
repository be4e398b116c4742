//! Monomial extension data. An exponent matrix over a block structure relates
//! the source parameters to the target parameters, whose values are given,
//! up to formal unit markers.
//!
//! Rows of the exponent matrix `A` describe `x_i = (unit)·∏_j y_j^{a_ij}`.
//! Indices are 0-based throughout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::encoding;
use crate::error::{ExtensionError, ParseError};
use crate::lattice::{rational, ExactMatrix};
use crate::ordered::{
    isolated_level, ElementRepr, GroupLayout, IsolatedChain, OrderedGroupElement, ValueGroup,
};

/// Block sizes `t_i` and rational ranks `s_i`; the first `s_i` indices of
/// block `i` form its part of the set `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BlockStructure {
    r: usize,
    t: Vec<usize>,
    s: Vec<usize>,
}

#[derive(Deserialize)]
struct BlockRepr {
    r: usize,
    t: Vec<usize>,
    s: Vec<usize>,
}

impl<'de> Deserialize<'de> for BlockStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let b = BlockRepr::deserialize(d)?;
        if b.r != b.t.len() {
            return Err(serde::de::Error::custom(format!(
                "r = {} but {} block sizes given",
                b.r,
                b.t.len()
            )));
        }
        BlockStructure::new(b.t, b.s).map_err(serde::de::Error::custom)
    }
}

impl BlockStructure {
    pub fn new(t: Vec<usize>, s: Vec<usize>) -> Result<Self, ExtensionError> {
        if t.is_empty() {
            return Err(ExtensionError::Blocks("at least one block is required".into()));
        }
        if t.len() != s.len() {
            return Err(ExtensionError::Blocks(format!(
                "{} block sizes but {} rational ranks",
                t.len(),
                s.len()
            )));
        }
        for (i, (&ti, &si)) in t.iter().zip(&s).enumerate() {
            if si < 1 || si > ti {
                return Err(ExtensionError::Blocks(format!(
                    "block {i}: need 1 ≤ s ≤ t, got s = {si}, t = {ti}"
                )));
            }
        }
        Ok(BlockStructure { r: t.len(), t, s })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.t.iter().sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.t[..block].iter().sum()
    }

    /// `(block, position within block)` of a global index.
    pub fn locate(&self, j: usize) -> (usize, usize) {
        let mut start = 0;
        for (b, &tb) in self.t.iter().enumerate() {
            if j < start + tb {
                return (b, j - start);
            }
            start += tb;
        }
        panic!("index {j} out of range for n = {}", self.n());
    }

    pub fn block_of(&self, j: usize) -> usize {
        self.locate(j).0
    }

    pub fn global(&self, block: usize, pos: usize) -> usize {
        self.offset(block) + pos
    }

    pub fn is_t(&self, j: usize) -> bool {
        let (b, p) = self.locate(j);
        p < self.s[b]
    }

    /// The index set `T`, in increasing order; `|T| = Σ s_i`.
    pub fn t_set(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.is_t(j)).collect()
    }

    pub fn t_indices_of_block(&self, block: usize) -> Vec<usize> {
        let o = self.offset(block);
        (o..o + self.s[block]).collect()
    }
}

/// Formal product of unit symbols. Units have value zero and residue one,
/// so they only matter as bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct UnitMarker(BTreeMap<String, StrInt>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrInt(#[serde(with = "encoding::int")] pub BigInt);

#[derive(Deserialize)]
#[serde(untagged)]
enum UnitRepr {
    Flag(bool),
    Product(BTreeMap<String, StrInt>),
}

impl UnitMarker {
    pub fn trivial() -> Self {
        UnitMarker::default()
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.into(), StrInt(BigInt::one()));
        UnitMarker(m)
    }

    /// The default unit `δ_i` attached to row `i`.
    pub fn delta(row: usize) -> Self {
        Self::symbol(format!("delta_{row}"))
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &UnitMarker) -> UnitMarker {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            let e = out.entry(k.clone()).or_insert(StrInt(BigInt::zero()));
            e.0 += &v.0;
        }
        out.retain(|_, v| !v.0.is_zero());
        UnitMarker(out)
    }

    pub fn pow(&self, k: &BigInt) -> UnitMarker {
        let mut out: BTreeMap<String, StrInt> = self
            .0
            .iter()
            .map(|(s, e)| (s.clone(), StrInt(&e.0 * k)))
            .collect();
        out.retain(|_, v| !v.0.is_zero());
        UnitMarker(out)
    }

    pub fn inverse(&self) -> UnitMarker {
        self.pow(&BigInt::from(-1))
    }
}

impl<'de> Deserialize<'de> for UnitMarker {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match UnitRepr::deserialize(d)? {
            // flags are resolved against the row index by the extension parser
            UnitRepr::Flag(true) => Ok(UnitMarker::symbol("delta")),
            UnitRepr::Flag(false) => Ok(UnitMarker::trivial()),
            UnitRepr::Product(mut m) => {
                m.retain(|_, v| !v.0.is_zero());
                Ok(UnitMarker(m))
            }
        }
    }
}

/// One broken invariant of a monomial extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A column outside `T` may only carry the diagonal entry of its own row.
    NonTColumn { row: usize, col: usize },
    /// The diagonal entry of a column outside `T` must be 1.
    NonTDiagonal { index: usize, value: String },
    /// Rows of block `i` may not involve parameters of earlier blocks.
    EarlierBlockEntry { row: usize, col: usize },
    /// A row outside `T` may not involve other parameters of its own block.
    NonTRowEntry { row: usize, col: usize },
    NegativeExponent { row: usize, col: usize },
    SingularDiagonalBlock { block: usize },
    DependentTValues { rank: usize, expected: usize },
    NonPositiveYValue { index: usize },
    /// The value of `y_j` must lie exactly at its block's level of the isolated chain.
    MisplacedValue { index: usize, expected_level: usize, found_level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialExtension {
    layout: Arc<GroupLayout>,
    blocks: BlockStructure,
    exponents: ExactMatrix,
    units: Vec<UnitMarker>,
    y_values: Vec<OrderedGroupElement>,
}

#[derive(Serialize, Deserialize)]
struct ExtensionRepr {
    group: serde_json::Value,
    blocks: BlockStructure,
    #[serde(rename = "A")]
    exponents: ExactMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit_markers: Option<Vec<UnitMarker>>,
    y_values: Vec<ElementRepr>,
}

/// `f_i = ∏_j x_j^{b_ij} = (unit)·y_i^e` for `i ∈ T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointRelations {
    #[serde(with = "encoding::int")]
    pub e: BigInt,
    /// Indices of `T`; rows and columns of `b` follow this order.
    pub t_indices: Vec<usize>,
    /// `A_T·B = B·A_T = e·I`.
    pub b: ExactMatrix,
    pub unit_factors: Vec<UnitMarker>,
}

impl MonomialExtension {
    pub fn new(
        layout: Arc<GroupLayout>,
        blocks: BlockStructure,
        exponents: ExactMatrix,
        units: Vec<UnitMarker>,
        y_values: Vec<OrderedGroupElement>,
    ) -> Result<Self, ExtensionError> {
        let n = blocks.n();
        if exponents.rows() != n || exponents.cols() != n {
            return Err(ExtensionError::Dimension(format!(
                "exponent matrix is {}x{}, expected {n}x{n}",
                exponents.rows(),
                exponents.cols()
            )));
        }
        if units.len() != n || y_values.len() != n {
            return Err(ExtensionError::Dimension(format!(
                "{} unit markers and {} y-values for n = {n}",
                units.len(),
                y_values.len()
            )));
        }
        if layout.rank() != blocks.r() {
            return Err(ExtensionError::Dimension(format!(
                "group has rank {} but the extension has {} blocks",
                layout.rank(),
                blocks.r()
            )));
        }
        if y_values.iter().any(|y| *y.layout() != layout) {
            return Err(ExtensionError::Dimension("y-value outside the group".into()));
        }
        Ok(MonomialExtension {
            layout,
            blocks,
            exponents,
            units,
            y_values,
        })
    }

    /// Extension with all unit markers trivial.
    pub fn without_units(
        layout: Arc<GroupLayout>,
        blocks: BlockStructure,
        exponents: ExactMatrix,
        y_values: Vec<OrderedGroupElement>,
    ) -> Result<Self, ExtensionError> {
        let n = blocks.n();
        Self::new(layout, blocks, exponents, vec![UnitMarker::trivial(); n], y_values)
    }

    pub fn layout(&self) -> &Arc<GroupLayout> {
        &self.layout
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn exponents(&self) -> &ExactMatrix {
        &self.exponents
    }

    pub fn units(&self) -> &[UnitMarker] {
        &self.units
    }

    pub fn y_values(&self) -> &[OrderedGroupElement] {
        &self.y_values
    }

    pub fn n(&self) -> usize {
        self.blocks.n()
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (&mut ExactMatrix, &mut Vec<UnitMarker>, &mut Vec<OrderedGroupElement>) {
        (&mut self.exponents, &mut self.units, &mut self.y_values)
    }

    /// `A_T`: rows and columns indexed by `T`.
    pub fn t_submatrix(&self) -> ExactMatrix {
        let t = self.blocks.t_set();
        self.exponents.select(&t, &t)
    }

    /// Every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let b = &self.blocks;
        let n = self.n();
        let a = &self.exponents;
        for row in 0..n {
            let row_block = b.block_of(row);
            for col in 0..n {
                let x = a.get(row, col);
                if x.is_zero() {
                    continue;
                }
                if x.is_negative() {
                    out.push(Violation::NegativeExponent { row, col });
                }
                let col_block = b.block_of(col);
                if col_block < row_block {
                    out.push(Violation::EarlierBlockEntry { row, col });
                } else if !b.is_t(col) {
                    if row != col {
                        out.push(Violation::NonTColumn { row, col });
                    }
                } else if col_block == row_block && !b.is_t(row) {
                    out.push(Violation::NonTRowEntry { row, col });
                }
            }
            if !b.is_t(row) && !a.get(row, row).is_one() {
                out.push(Violation::NonTDiagonal {
                    index: row,
                    value: a.get(row, row).to_string(),
                });
            }
        }
        for block in 0..b.r() {
            let idx = b.t_indices_of_block(block);
            let det = a.select(&idx, &idx).determinant().expect("square");
            if det.is_zero() {
                out.push(Violation::SingularDiagonalBlock { block });
            }
        }
        let t = b.t_set();
        let t_coords: Vec<Vec<BigRational>> = t.iter().map(|&j| self.y_values[j].coords()).collect();
        let rank = rational::rank(&t_coords);
        if rank < t.len() {
            out.push(Violation::DependentTValues {
                rank,
                expected: t.len(),
            });
        }
        let chain = IsolatedChain::from_layout(&self.layout);
        for (j, y) in self.y_values.iter().enumerate() {
            if !y.is_positive() {
                out.push(Violation::NonPositiveYValue { index: j });
                continue;
            }
            let found = isolated_level(y, &chain);
            let expected = b.block_of(j);
            if found != expected {
                out.push(Violation::MisplacedValue {
                    index: j,
                    expected_level: expected,
                    found_level: found,
                });
            }
        }
        out
    }

    /// `ν(x_i) = Σ_j a_ij·ν*(y_j)`; units contribute nothing.
    pub fn induced_x_values(&self) -> Result<Vec<OrderedGroupElement>, ExtensionError> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let v = self.monomial_value(self.exponents.row(i));
                if v.is_positive() {
                    Ok(v)
                } else {
                    Err(ExtensionError::NonPositiveValue { index: i })
                }
            })
            .collect()
    }

    /// `ν*(y^b) = Σ_j b_j·ν*(y_j)`.
    pub fn monomial_value(&self, b: &[BigInt]) -> OrderedGroupElement {
        let mut acc = OrderedGroupElement::zero(self.layout.clone());
        for (bj, y) in b.iter().zip(&self.y_values) {
            if !bj.is_zero() {
                acc = acc.try_add(&y.scale_int(bj)).expect("same layout");
            }
        }
        acc
    }

    /// Relations expressing `y_i^e`, `i ∈ T`, as Laurent monomials in the `x_j`, `j ∈ T`.
    pub fn adjoint_relations(&self) -> Result<AdjointRelations, ExtensionError> {
        let t = self.blocks.t_set();
        let a_t = self.t_submatrix();
        let det = a_t.determinant().expect("square");
        if det.is_zero() {
            return Err(ExtensionError::SingularBlock);
        }
        let mut b = a_t.adjugate().expect("square");
        if det.is_negative() {
            for i in 0..b.rows() {
                b.negate_row(i);
            }
        }
        let unit_factors = (0..t.len())
            .map(|i| {
                t.iter()
                    .enumerate()
                    .fold(UnitMarker::trivial(), |acc, (k, &j)| {
                        acc.mul(&self.units[j].pow(b.get(i, k)))
                    })
            })
            .collect();
        Ok(AdjointRelations {
            e: det.abs(),
            t_indices: t,
            b,
            unit_factors,
        })
    }

    /// `Φ_ν*`, generated by the values of the `y_j`.
    pub fn star_group(&self) -> ValueGroup {
        ValueGroup::new(self.layout.clone(), self.y_values.clone()).expect("same layout")
    }

    /// `Φ_ν`, generated by the values of the `x_i`.
    pub fn base_group(&self) -> ValueGroup {
        let xs = (0..self.n())
            .map(|i| self.monomial_value(self.exponents.row(i)))
            .collect();
        ValueGroup::new(self.layout.clone(), xs).expect("same layout")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, ParseError> {
        let repr: ExtensionRepr =
            serde_json::from_value(v.clone()).map_err(|e| ParseError::Shape(e.to_string()))?;
        let layout_repr = serde_json::from_value(repr.group.clone())
            .map_err(|e| ParseError::Shape(format!("group: {e}")))?;
        let layout = GroupLayout::from_repr(&layout_repr)?;
        let n = repr.blocks.n();
        let units = match repr.unit_markers {
            None => vec![UnitMarker::trivial(); n],
            Some(us) => us
                .into_iter()
                .enumerate()
                .map(|(i, u)| {
                    if u == UnitMarker::symbol("delta") {
                        UnitMarker::delta(i)
                    } else {
                        u
                    }
                })
                .collect(),
        };
        let ys = repr
            .y_values
            .iter()
            .map(|y| OrderedGroupElement::from_repr(layout.clone(), y))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ParseError::Shape(format!("y_values: {e}")))?;
        MonomialExtension::new(layout, repr.blocks, repr.exponents, units, ys)
            .map_err(|e| ParseError::Shape(e.to_string()))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let repr = ExtensionRepr {
            group: serde_json::to_value(self.layout.as_ref()).expect("serializable"),
            blocks: self.blocks.clone(),
            exponents: self.exponents.clone(),
            unit_markers: Some(self.units.clone()),
            y_values: self.y_values.iter().map(|y| y.to_repr()).collect(),
        };
        serde_json::to_value(repr).expect("serializable")
    }
}

impl Serialize for MonomialExtension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MonomialExtension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        MonomialExtension::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// A valid extension whose rows outside `T` are exactly `x_m = y_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SsmForm(MonomialExtension);

impl SsmForm {
    pub fn certify(me: MonomialExtension) -> Result<Self, ExtensionError> {
        let violations = me.validate();
        if let Some(v) = violations.first() {
            return Err(ExtensionError::NotSsm(format!(
                "{} violation(s), first: {}",
                violations.len(),
                serde_json::to_string(v).expect("serializable")
            )));
        }
        let n = me.n();
        for m in (0..n).filter(|&m| !me.blocks.is_t(m)) {
            let row_is_unit = (0..n).all(|j| *me.exponents.get(m, j) == BigInt::from((j == m) as u8));
            if !row_is_unit {
                return Err(ExtensionError::NotSsm(format!("row {m} is not x_{m} = y_{m}")));
            }
            if !me.units[m].is_trivial() {
                return Err(ExtensionError::NotSsm(format!("row {m} carries a unit")));
            }
        }
        Ok(SsmForm(me))
    }

    pub fn extension(&self) -> &MonomialExtension {
        &self.0
    }

    pub fn into_inner(self) -> MonomialExtension {
        self.0
    }
}
