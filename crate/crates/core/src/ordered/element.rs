use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::encoding::{self, parse_int};
use crate::error::{GroupError, ParseError};

/// Weight basis of one archimedean block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weights {
    /// `{1}`: the block is a subgroup of ℚ.
    Rational,
    /// `{1, √d}` with `d > 1` not a perfect square.
    Quadratic(BigInt),
}

impl Weights {
    pub fn width(&self) -> usize {
        match self {
            Weights::Rational => 1,
            Weights::Quadratic(_) => 2,
        }
    }

    pub fn quadratic(d: i64) -> Result<Self, GroupError> {
        let d = BigInt::from(d);
        check_non_square(&d)?;
        Ok(Weights::Quadratic(d))
    }

    fn to_strings(&self) -> Vec<String> {
        match self {
            Weights::Rational => vec!["1".into()],
            Weights::Quadratic(d) => vec!["1".into(), format!("sqrt({d})")],
        }
    }

    fn from_strings(ws: &[String]) -> Result<Self, ParseError> {
        let squeeze = |s: &String| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        match ws {
            [one] if squeeze(one) == "1" => Ok(Weights::Rational),
            [one, root] if squeeze(one) == "1" => {
                let r = squeeze(root);
                let inner = r
                    .strip_prefix("sqrt(")
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| ParseError::Weight(root.clone()))?;
                let d = parse_int(inner).map_err(|_| ParseError::Weight(root.clone()))?;
                check_non_square(&d).map_err(|_| ParseError::Weight(root.clone()))?;
                Ok(Weights::Quadratic(d))
            }
            _ => Err(ParseError::Weight(ws.join(","))),
        }
    }

    /// Sign of the real number `p + q·√d` (or of `p` for a rational block).
    pub fn sign(&self, comps: &[BigRational]) -> Ordering {
        match self {
            Weights::Rational => comps[0].cmp(&BigRational::zero()),
            Weights::Quadratic(d) => quadratic_sign(&comps[0], &comps[1], d),
        }
    }
}

fn check_non_square(d: &BigInt) -> Result<(), GroupError> {
    if *d <= BigInt::from(1) {
        return Err(GroupError::Layout(format!("sqrt weight needs d > 1, got {d}")));
    }
    let r = d.sqrt();
    if &r * &r == *d {
        return Err(GroupError::Layout(format!("{d} is a perfect square")));
    }
    Ok(())
}

/// Exact sign of `p + q√d` by case analysis on the signs of `p`, `q` and `p² − d·q²`.
pub fn quadratic_sign(p: &BigRational, q: &BigRational, d: &BigInt) -> Ordering {
    let zero = BigRational::zero();
    let sp = p.cmp(&zero);
    let sq = q.cmp(&zero);
    match (sp, sq) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (a, b) if a == b => a,
        _ => {
            // opposite signs: the term of larger magnitude wins
            let p2 = p * p;
            let dq2 = q * q * BigRational::from_integer(d.clone());
            match p2.cmp(&dq2) {
                Ordering::Greater => sp,
                Ordering::Less => sq,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// Block structure of an ordered group `ℝ^{w_1} ×_lex … ×_lex ℝ^{w_r}`;
/// earlier blocks dominate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupLayout {
    blocks: Vec<Weights>,
}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    weights: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct LayoutRepr {
    rank: usize,
    blocks: Vec<BlockRepr>,
}

impl GroupLayout {
    pub fn new(blocks: Vec<Weights>) -> Result<Arc<Self>, GroupError> {
        if blocks.is_empty() {
            return Err(GroupError::Layout("rank must be at least 1".into()));
        }
        for w in &blocks {
            if let Weights::Quadratic(d) = w {
                check_non_square(d)?;
            }
        }
        Ok(Arc::new(GroupLayout { blocks }))
    }

    /// All blocks rational: the group `ℚ^r` with lex order.
    pub fn rational(rank: usize) -> Arc<Self> {
        GroupLayout::new(vec![Weights::Rational; rank]).expect("rank must be at least 1")
    }

    pub fn rank(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Weights] {
        &self.blocks
    }

    /// Total number of rational coordinates.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Weights::width).sum()
    }

    /// Coordinate range of each block in the flattened vector.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|w| {
                let r = start..start + w.width();
                start = r.end;
                r
            })
            .collect()
    }

    pub(crate) fn to_repr(&self) -> LayoutRepr {
        LayoutRepr {
            rank: self.rank(),
            blocks: self
                .blocks
                .iter()
                .map(|w| BlockRepr {
                    weights: w.to_strings(),
                })
                .collect(),
        }
    }

    pub(crate) fn from_repr(r: &LayoutRepr) -> Result<Arc<Self>, ParseError> {
        if r.rank != r.blocks.len() {
            return Err(ParseError::Shape(format!(
                "rank {} but {} blocks listed",
                r.rank,
                r.blocks.len()
            )));
        }
        let blocks = r
            .blocks
            .iter()
            .map(|b| Weights::from_strings(&b.weights))
            .collect::<Result<Vec<_>, _>>()?;
        GroupLayout::new(blocks).map_err(|e| ParseError::Shape(e.to_string()))
    }
}

impl Serialize for GroupLayout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

/// Element of a lex-ordered block group: per block, the rational coordinates
/// with respect to the block's weight basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedGroupElement {
    layout: Arc<GroupLayout>,
    blocks: Vec<Vec<BigRational>>,
}

/// Serialized element: one list of rational strings per block.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct ElementRepr(pub Vec<RationalList>);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct RationalList(#[serde(with = "encoding::rational_vec")] pub Vec<BigRational>);

impl OrderedGroupElement {
    pub fn new(layout: Arc<GroupLayout>, blocks: Vec<Vec<BigRational>>) -> Result<Self, GroupError> {
        if blocks.len() != layout.rank() {
            return Err(GroupError::AmbientMismatch);
        }
        if blocks.iter().zip(layout.blocks()).any(|(b, w)| b.len() != w.width()) {
            return Err(GroupError::AmbientMismatch);
        }
        Ok(OrderedGroupElement { layout, blocks })
    }

    pub fn zero(layout: Arc<GroupLayout>) -> Self {
        let blocks = layout
            .blocks()
            .iter()
            .map(|w| vec![BigRational::zero(); w.width()])
            .collect();
        OrderedGroupElement { layout, blocks }
    }

    /// Element of a group whose blocks are all rational, one value per block.
    pub fn from_rationals(layout: Arc<GroupLayout>, values: Vec<BigRational>) -> Result<Self, GroupError> {
        Self::new(layout, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn from_coords(layout: Arc<GroupLayout>, coords: &[BigRational]) -> Result<Self, GroupError> {
        if coords.len() != layout.dim() {
            return Err(GroupError::AmbientMismatch);
        }
        let blocks = layout
            .block_ranges()
            .into_iter()
            .map(|r| coords[r].to_vec())
            .collect();
        Ok(OrderedGroupElement { layout, blocks })
    }

    pub fn from_repr(layout: Arc<GroupLayout>, repr: &ElementRepr) -> Result<Self, GroupError> {
        Self::new(layout, repr.0.iter().map(|b| b.0.clone()).collect())
    }

    pub fn to_repr(&self) -> ElementRepr {
        ElementRepr(self.blocks.iter().cloned().map(RationalList).collect())
    }

    pub fn layout(&self) -> &Arc<GroupLayout> {
        &self.layout
    }

    pub fn blocks(&self) -> &[Vec<BigRational>] {
        &self.blocks
    }

    pub fn coords(&self) -> Vec<BigRational> {
        self.blocks.iter().flatten().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(Zero::is_zero)
    }

    /// Index of the first block that does not vanish; `rank` for zero.
    pub fn leading_block(&self) -> usize {
        self.blocks
            .iter()
            .position(|b| b.iter().any(|x| !x.is_zero()))
            .unwrap_or(self.layout.rank())
    }

    /// Sign in the lex order.
    pub fn signum(&self) -> Ordering {
        self.blocks
            .iter()
            .zip(self.layout.blocks())
            .map(|(b, w)| w.sign(b))
            .find(|s| *s != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GroupError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GroupError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.map(|x| x * k)
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    /// Component of block `i` as a real number's sign, used by semigroup search.
    pub fn block_sign(&self, i: usize) -> Ordering {
        self.layout.blocks()[i].sign(&self.blocks[i])
    }

    fn map(&self, f: impl Fn(&BigRational) -> BigRational) -> Self {
        OrderedGroupElement {
            layout: self.layout.clone(),
            blocks: self.blocks.iter().map(|b| b.iter().map(&f).collect()).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Result<Self, GroupError> {
        if self.layout != other.layout {
            return Err(GroupError::AmbientMismatch);
        }
        Ok(OrderedGroupElement {
            layout: self.layout.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        })
    }
}

/// Exact three-way comparison in the lexicographic block order.
pub fn lex_compare(a: &OrderedGroupElement, b: &OrderedGroupElement) -> Result<Ordering, GroupError> {
    Ok(a.try_sub(b)?.signum())
}

/// Total order: lex order within one ambient group, layouts compared structurally otherwise.
impl Ord for OrderedGroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match lex_compare(self, other) {
            Ok(o) => o,
            Err(_) => self.layout.cmp(&other.layout),
        }
    }
}

impl PartialOrd for OrderedGroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrderedGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .zip(self.layout.blocks())
            .map(|(b, w)| match w {
                Weights::Rational => encoding::format_rational(&b[0]),
                Weights::Quadratic(d) => {
                    let p = encoding::format_rational(&b[0]);
                    if b[1].is_zero() {
                        p
                    } else {
                        let sign = if b[1].is_negative() { "-" } else { "+" };
                        let q = encoding::format_rational(&b[1].abs());
                        format!("{p}{sign}{q}√{d}")
                    }
                }
            })
            .collect();
        write!(f, "({})", parts.join("; "))
    }
}

impl fmt::Debug for OrderedGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for OrderedGroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}
