//! Finitely generated pointed submonoids of ℤⁿ and their saturations.
//!
//! For a simplicial monoid the lattice points of the fundamental
//! parallelepiped split the saturation into disjoint translates of the monoid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::encoding;
use crate::error::MonoidError;
use crate::lattice::{rational, smith_normal_form, ExactMatrix};

/// Submonoid of ℤⁿ generated by finitely many vectors, with a linear
/// functional that is strictly positive on every generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MonoidRepr", into = "MonoidRepr")]
pub struct AffineMonoid {
    dim: usize,
    generators: Vec<Vec<BigInt>>,
    functional: Vec<BigRational>,
}

#[derive(Clone, Serialize, Deserialize)]
struct MonoidRepr {
    dim: usize,
    #[serde(with = "encoding::int_rows")]
    generators: Vec<Vec<BigInt>>,
    #[serde(with = "encoding::rational_vec")]
    positivity_functional: Vec<BigRational>,
}

impl TryFrom<MonoidRepr> for AffineMonoid {
    type Error = MonoidError;

    fn try_from(r: MonoidRepr) -> Result<Self, Self::Error> {
        AffineMonoid::new(r.dim, r.generators, r.positivity_functional)
    }
}

impl From<AffineMonoid> for MonoidRepr {
    fn from(m: AffineMonoid) -> Self {
        MonoidRepr {
            dim: m.dim,
            generators: m.generators,
            positivity_functional: m.functional,
        }
    }
}

impl AffineMonoid {
    pub fn new(
        dim: usize,
        generators: Vec<Vec<BigInt>>,
        functional: Vec<BigRational>,
    ) -> Result<Self, MonoidError> {
        check_dim(dim, functional.len())?;
        let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(generators.len());
        for g in generators {
            check_dim(dim, g.len())?;
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        for (i, g) in gens.iter().enumerate() {
            if !pairing(&functional, g).is_positive() {
                return Err(MonoidError::NotPointed { index: i });
            }
        }
        Ok(AffineMonoid {
            dim,
            generators: gens,
            functional,
        })
    }

    /// Monoid on linearly independent generators; the certifying functional
    /// is the sum of the dual basis, which takes the value 1 on each generator.
    pub fn simplicial(vectors: &[Vec<BigInt>]) -> Result<Self, MonoidError> {
        let cone = SimplicialCone::new(vectors)?;
        let n = cone.dim();
        let functional = (0..n)
            .map(|j| {
                let s: BigInt = (0..n).map(|i| cone.adj.get(j, i).clone()).sum();
                BigRational::new(s, cone.det.clone())
            })
            .collect();
        AffineMonoid::new(n, vectors.to_vec(), functional)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn functional(&self) -> &[BigRational] {
        &self.functional
    }

    /// Exact membership in `M` by bounded search: the functional bounds each
    /// coefficient by `φ(v)/φ(g)`.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool, MonoidError> {
        check_dim(self.dim, v.len())?;
        if v.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        if self.generators.is_empty() {
            return Ok(false);
        }
        let gens: Vec<Vec<BigRational>> = self.generators.iter().map(|g| rational::to_rational(g)).collect();
        if rational::rank(&gens) == gens.len() {
            // independent generators: the coordinates are unique
            return Ok(rational::solve_left(&gens, &rational::to_rational(v))
                .is_some_and(|c| c.iter().all(|x| x.is_integer() && !x.is_negative())));
        }
        Ok(self.search(v.to_vec(), 0))
    }

    fn search(&self, rest: Vec<BigInt>, k: usize) -> bool {
        if rest.iter().all(Zero::is_zero) {
            return true;
        }
        if k == self.generators.len() {
            return false;
        }
        let budget = pairing(&self.functional, &rest);
        if budget.is_negative() {
            return false;
        }
        let g = &self.generators[k];
        let max = (budget / pairing(&self.functional, g)).floor().to_integer();
        if k + 1 == self.generators.len() {
            return exact_multiple(&rest, g).is_some_and(|c| c >= BigInt::zero() && c <= max);
        }
        let mut c = BigInt::zero();
        let mut cur = rest;
        while c <= max {
            if self.search(cur.clone(), k + 1) {
                return true;
            }
            for (x, y) in cur.iter_mut().zip(g) {
                *x -= y;
            }
            c += 1;
        }
        false
    }

    /// Whether `v` lies in the real cone `ℝ≥0·M`.
    ///
    /// By Carathéodory it suffices to try cones over linearly independent
    /// subsets of the generators.
    pub fn in_cone(&self, v: &[BigInt]) -> Result<bool, MonoidError> {
        check_dim(self.dim, v.len())?;
        if v.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        let gens: Vec<Vec<BigRational>> = self.generators.iter().map(|g| rational::to_rational(g)).collect();
        let target = rational::to_rational(v);
        let m = gens.len();
        let max_size = self.dim.min(m);
        let mut subset = Vec::new();
        Ok(independent_subsets(&gens, 0, max_size, &mut subset, &mut |s| {
            let basis: Vec<Vec<BigRational>> = s.iter().map(|&i| gens[i].clone()).collect();
            rational::solve_left(&basis, &target)
                .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
        }))
    }
}

/// Depth-first walk over linearly independent subsets; stops when `visit` returns true.
fn independent_subsets(
    gens: &[Vec<BigRational>],
    start: usize,
    max_size: usize,
    subset: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if !subset.is_empty() && visit(subset) {
        return true;
    }
    if subset.len() == max_size {
        return false;
    }
    for i in start..gens.len() {
        subset.push(i);
        let rows: Vec<Vec<BigRational>> = subset.iter().map(|&j| gens[j].clone()).collect();
        if rational::rank(&rows) == subset.len()
            && independent_subsets(gens, i + 1, max_size, subset, visit)
        {
            return true;
        }
        subset.pop();
    }
    false
}

fn check_dim(expected: usize, found: usize) -> Result<(), MonoidError> {
    if expected != found {
        return Err(MonoidError::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn pairing(f: &[BigRational], v: &[BigInt]) -> BigRational {
    f.iter()
        .zip(v)
        .map(|(a, b)| a * BigRational::from_integer(b.clone()))
        .sum()
}

/// `c` with `v = c·g`, if it exists.
fn exact_multiple(v: &[BigInt], g: &[BigInt]) -> Option<BigInt> {
    let (i, gi) = g.iter().enumerate().find(|(_, x)| !x.is_zero())?;
    let (c, r) = v[i].div_rem(gi);
    if !r.is_zero() {
        return None;
    }
    v.iter().zip(g).all(|(a, b)| *a == &c * b).then_some(c)
}

/// `v ∈ M̃`: some `m·v` with `1 ≤ m ≤ box_bound` lies in `M`.
///
/// Returns `BoundTooSmall` rather than `false` when `v` is in the rational
/// cone but no multiplier within the bound was found.
pub fn saturation_membership(v: &[BigInt], m: &AffineMonoid, box_bound: u64) -> Result<bool, MonoidError> {
    Ok(saturation_multiplier(v, m, box_bound)?.is_some())
}

/// The least certifying multiplier, or `None` when `v` is outside the cone.
pub fn saturation_multiplier(
    v: &[BigInt],
    m: &AffineMonoid,
    box_bound: u64,
) -> Result<Option<u64>, MonoidError> {
    check_dim(m.dim, v.len())?;
    if v.iter().all(Zero::is_zero) {
        return Ok(Some(1));
    }
    if !m.in_cone(v)? {
        return Ok(None);
    }
    for k in 1..=box_bound {
        let kv: Vec<BigInt> = v.iter().map(|x| x * BigInt::from(k)).collect();
        if m.contains(&kv)? {
            return Ok(Some(k));
        }
    }
    Err(MonoidError::BoundTooSmall { bound: box_bound })
}

/// Cone over `n` independent integer vectors (the rows of `V`), with exact
/// coordinates `q = w·V⁻¹ = (w·adj V)/det V`.
#[derive(Clone, Debug)]
pub struct SimplicialCone {
    rows: ExactMatrix,
    adj: ExactMatrix,
    det: BigInt,
}

impl SimplicialCone {
    pub fn new(vectors: &[Vec<BigInt>]) -> Result<Self, MonoidError> {
        let n = vectors.len();
        for v in vectors {
            check_dim(n, v.len())?;
        }
        let rows = ExactMatrix::from_rows_with_cols(vectors.to_vec(), n)
            .map_err(|_| MonoidError::DimensionMismatch { expected: n, found: 0 })?;
        let det = rows.determinant().expect("square");
        if det.is_zero() {
            return Err(MonoidError::DependentGenerators);
        }
        let adj = rows.adjugate().expect("square");
        Ok(SimplicialCone { rows, adj, det })
    }

    pub fn dim(&self) -> usize {
        self.rows.rows()
    }

    pub fn index(&self) -> BigInt {
        self.det.abs()
    }

    /// `det·q`, where `q` are the rational coordinates of `w`.
    pub fn scaled_coordinates(&self, w: &[BigInt]) -> Vec<BigInt> {
        self.adj.vec_mul(w).expect("dimension checked by caller")
    }

    pub fn coordinates(&self, w: &[BigInt]) -> Vec<BigRational> {
        self.scaled_coordinates(w)
            .into_iter()
            .map(|x| BigRational::new(x, self.det.clone()))
            .collect()
    }

    pub fn in_cone(&self, w: &[BigInt]) -> bool {
        self.scaled_in_cone(&self.scaled_coordinates(w))
    }

    /// Membership in the monoid: nonnegative integer coordinates.
    pub fn in_monoid(&self, w: &[BigInt]) -> bool {
        self.scaled_in_monoid(&self.scaled_coordinates(w))
    }

    fn scaled_in_cone(&self, s: &[BigInt]) -> bool {
        let neg = self.det.is_negative();
        s.iter().all(|x| x.is_zero() || x.is_negative() == neg)
    }

    fn scaled_in_monoid(&self, s: &[BigInt]) -> bool {
        self.scaled_in_cone(s) && s.iter().all(|x| x.is_multiple_of(&self.det))
    }

    /// Translate `w` by lattice vectors of the cone into the half-open parallelepiped.
    pub fn reduce_into_parallelepiped(&self, w: &[BigInt]) -> Vec<BigInt> {
        let floors: Vec<BigInt> = self
            .coordinates(w)
            .iter()
            .map(|q| q.floor().to_integer())
            .collect();
        let shift = self.rows.vec_mul(&floors).expect("square");
        w.iter().zip(shift).map(|(a, b)| a - b).collect()
    }
}

/// `Λ = ℤⁿ ∩ par(v_1, …, v_n)` in lexicographic order, with `|Λ| = |det|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelepipedBasis {
    #[serde(with = "encoding::int_rows")]
    pub points: Vec<Vec<BigInt>>,
    #[serde(with = "encoding::int")]
    pub index: BigInt,
}

impl ParallelepipedBasis {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Lattice points of the half-open parallelepiped spanned by independent vectors.
///
/// One representative per class of `ℤⁿ` modulo the row lattice is read off the
/// Smith form and then translated into the parallelepiped; the result is
/// sorted, so it does not depend on enumeration order.
pub fn parallelepiped_points(vectors: &[Vec<BigInt>]) -> Result<ParallelepipedBasis, MonoidError> {
    let cone = SimplicialCone::new(vectors)?;
    let n = cone.dim();
    // U·V·W = D, so the row lattice of V is (row lattice of D)·W⁻¹ and the
    // classes are a·W⁻¹ for 0 ≤ a_i < d_i.
    let snf = smith_normal_form(&cone.rows);
    let diag = snf.diagonal();
    let w_inv_scaled = snf.v.adjugate().expect("square");
    let w_det = snf.v.determinant().expect("square");
    let mut points = Vec::new();
    let mut a = vec![BigInt::zero(); n];
    loop {
        let x: Vec<BigInt> = w_inv_scaled
            .vec_mul(&a)
            .expect("square")
            .into_iter()
            .map(|t| t * &w_det) // det W = ±1, so W⁻¹ = det·adj
            .collect();
        points.push(cone.reduce_into_parallelepiped(&x));
        // odometer over ∏ [0, d_i)
        let mut i = 0;
        loop {
            if i == n {
                points.sort();
                return Ok(ParallelepipedBasis {
                    points,
                    index: cone.index(),
                });
            }
            a[i] += 1;
            if a[i] < diag[i] {
                break;
            }
            a[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Half-open integer box `[lo, hi)` in each coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl LatticeBox {
    /// `[0, bound)ⁿ`
    pub fn origin(dim: usize, bound: i64) -> Self {
        LatticeBox {
            lo: vec![0; dim],
            hi: vec![bound; dim],
        }
    }

    /// `[−bound, bound)ⁿ`
    pub fn centered(dim: usize, bound: i64) -> Self {
        LatticeBox {
            lo: vec![-bound; dim],
            hi: vec![bound; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn count(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l).max(0) as u128)
            .product()
    }

    pub fn points(&self) -> BoxPoints<'_> {
        let empty = self.lo.iter().zip(&self.hi).any(|(l, h)| l >= h);
        BoxPoints {
            b: self,
            cur: if empty { None } else { Some(self.lo.clone()) },
        }
    }
}

pub struct BoxPoints<'a> {
    b: &'a LatticeBox,
    cur: Option<Vec<i64>>,
}

impl Iterator for BoxPoints<'_> {
    type Item = Vec<BigInt>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.cur.as_mut()?;
        let out = cur.iter().map(|&x| BigInt::from(x)).collect();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.b.hi[i] {
                break;
            }
            cur[i] = self.b.lo[i];
        }
        Some(out)
    }
}

/// `4·max(|det|, max |coordinate|)`.
pub fn default_box_bound(vectors: &[Vec<BigInt>]) -> Result<u64, MonoidError> {
    let cone = SimplicialCone::new(vectors)?;
    let max_coord = vectors
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigInt::one);
    let m = cone.index().max(max_coord);
    Ok((m * 4u32).to_u64().unwrap_or(u64::MAX))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionViolation {
    #[serde(with = "encoding::int_vec")]
    pub point: Vec<BigInt>,
    /// Indices into Λ of every translate containing the point (empty or several).
    pub covering: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub region: LatticeBox,
    pub points_checked: u64,
    pub saturation_points: u64,
    /// How many saturation points fall in each translate `λ + M`.
    pub per_coset: Vec<u64>,
    pub violations: Vec<DecompositionViolation>,
}

impl DecompositionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every saturation point in the box lies in exactly one
/// translate `λ + M`, `λ ∈ Λ`.
///
/// `monoid` must be simplicial on the vectors that produced `basis`.
pub fn verify_disjoint_decomposition(
    basis: &ParallelepipedBasis,
    monoid: &AffineMonoid,
    region: &LatticeBox,
) -> Result<DecompositionReport, MonoidError> {
    let cone = SimplicialCone::new(monoid.generators())?;
    check_dim(cone.dim(), region.dim())?;
    let mut report = DecompositionReport {
        region: region.clone(),
        points_checked: 0,
        saturation_points: 0,
        per_coset: vec![0; basis.len()],
        violations: Vec::new(),
    };
    // coordinates are linear, so w − λ ∈ M is tested on precomputed images
    let lambda_scaled: Vec<Vec<BigInt>> = basis.points.iter().map(|l| cone.scaled_coordinates(l)).collect();
    let mut diff = vec![BigInt::zero(); cone.dim()];
    for w in region.points() {
        report.points_checked += 1;
        let sw = cone.scaled_coordinates(&w);
        if !cone.scaled_in_cone(&sw) {
            continue;
        }
        report.saturation_points += 1;
        let covering: Vec<usize> = lambda_scaled
            .iter()
            .enumerate()
            .filter(|(_, sl)| {
                for ((d, a), b) in diff.iter_mut().zip(&sw).zip(sl.iter()) {
                    *d = a - b;
                }
                cone.scaled_in_monoid(&diff)
            })
            .map(|(i, _)| i)
            .collect();
        if covering.len() == 1 {
            report.per_coset[covering[0]] += 1;
        } else {
            report.violations.push(DecompositionViolation { point: w, covering });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn vs(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| v(r)).collect()
    }

    #[test]
    fn saturation_examples() {
        let m = AffineMonoid::new(
            2,
            vs(&[&[2, 0], &[0, 2], &[1, 1]]),
            vec![BigRational::one(), BigRational::one()],
        )
        .unwrap();
        assert!(saturation_membership(&v(&[0, 0]), &m, 1).unwrap());
        assert_eq!(saturation_multiplier(&v(&[1, 1]), &m, 4).unwrap(), Some(1));
        let m2 = AffineMonoid::simplicial(&vs(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(saturation_multiplier(&v(&[1, 1]), &m2, 4).unwrap(), Some(2));
        assert!(!saturation_membership(&v(&[-1, 1]), &m2, 4).unwrap());
        assert_eq!(
            saturation_membership(&v(&[1, 1]), &m2, 1),
            Err(MonoidError::BoundTooSmall { bound: 1 })
        );
    }

    #[test]
    fn non_simplicial_cone_test() {
        let m = AffineMonoid::new(
            2,
            vs(&[&[1, 0], &[1, 1], &[1, 2]]),
            vec![BigRational::one(), BigRational::zero()],
        )
        .unwrap();
        assert!(m.in_cone(&v(&[3, 5])).unwrap());
        assert!(!m.in_cone(&v(&[1, 3])).unwrap());
        assert!(m.contains(&v(&[3, 5])).unwrap());
        assert!(!m.contains(&v(&[1, 3])).unwrap());
    }

    #[test]
    fn pointedness_is_required() {
        let err = AffineMonoid::new(1, vs(&[&[1], &[-1]]), vec![BigRational::one()]);
        assert_eq!(err, Err(MonoidError::NotPointed { index: 1 }));
        let dedup = AffineMonoid::new(1, vs(&[&[1], &[1]]), vec![BigRational::one()]).unwrap();
        assert_eq!(dedup.generators().len(), 1);
    }

    #[test]
    fn parallelepiped_examples() {
        let unit = parallelepiped_points(&vs(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(unit.points, vs(&[&[0, 0]]));
        assert_eq!(unit.index, BigInt::one());

        let rect = parallelepiped_points(&vs(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(
            rect.points,
            vs(&[&[0, 0], &[0, 1], &[0, 2], &[1, 0], &[1, 1], &[1, 2]])
        );
        assert_eq!(rect.index, BigInt::from(6));

        let skew = parallelepiped_points(&vs(&[&[1, 1], &[0, 2]])).unwrap();
        assert_eq!(skew.points, vs(&[&[0, 0], &[0, 1]]));
        assert_eq!(skew.index, BigInt::from(2));

        assert_eq!(
            parallelepiped_points(&vs(&[&[1, 2], &[2, 4]])),
            Err(MonoidError::DependentGenerators)
        );
    }

    #[test]
    fn decomposition_examples() {
        let gens = vs(&[&[1, 0], &[0, 1]]);
        let rep = verify_disjoint_decomposition(
            &parallelepiped_points(&gens).unwrap(),
            &AffineMonoid::simplicial(&gens).unwrap(),
            &LatticeBox::origin(2, 5),
        )
        .unwrap();
        assert!(rep.is_clean());
        assert_eq!(rep.per_coset, vec![25]);

        let gens = vs(&[&[2, 0], &[0, 3]]);
        let rep = verify_disjoint_decomposition(
            &parallelepiped_points(&gens).unwrap(),
            &AffineMonoid::simplicial(&gens).unwrap(),
            &LatticeBox::origin(2, 6),
        )
        .unwrap();
        assert!(rep.is_clean());
        assert_eq!(rep.saturation_points, 36);
        assert_eq!(rep.per_coset, vec![6; 6]);

        let gens = vs(&[&[1, 1], &[0, 2]]);
        let rep = verify_disjoint_decomposition(
            &parallelepiped_points(&gens).unwrap(),
            &AffineMonoid::simplicial(&gens).unwrap(),
            &LatticeBox::origin(2, 4),
        )
        .unwrap();
        assert!(rep.is_clean());
        // the cone {y ≥ x ≥ 0} meets [0,4)² in 10 points
        assert_eq!(rep.saturation_points, 10);
        assert_eq!(rep.per_coset.iter().sum::<u64>(), 10);
    }

    #[test]
    fn box_iteration() {
        let b = LatticeBox { lo: vec![-1, 0], hi: vec![1, 2] };
        let pts: Vec<_> = b.points().collect();
        assert_eq!(pts, vs(&[&[-1, 0], &[-1, 1], &[0, 0], &[0, 1]]));
        assert_eq!(b.count(), 4);
        assert_eq!(LatticeBox { lo: vec![0], hi: vec![0] }.points().count(), 0);
        assert_eq!(default_box_bound(&vs(&[&[2, 0], &[0, 3]])).unwrap(), 24);
    }
}
