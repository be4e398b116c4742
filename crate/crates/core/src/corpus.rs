//! Bundled scenarios and seeded random generators.
//!
//! Random extensions are built so that every hypothesis of the coset
//! construction holds: values outside `T` are values of monomials in the
//! `x_w`, `w ∈ T`, after monomialization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::engine::{strong_monomialize, EngineConfig};
use crate::extension::{BlockStructure, MonomialExtension, UnitMarker};
use crate::lattice::ExactMatrix;
use crate::ledger::ExtensionRecord;
use crate::ordered::{GroupLayout, OrderedGroupElement, Weights};
use crate::pipeline::{Expectation, Scenario, SemigroupScenario};
use crate::semigroup::ValueSemigroup;

const BUNDLED: &[(&str, &str)] = &[
    ("identity", include_str!("../scenarios/identity.json")),
    ("diag23", include_str!("../scenarios/diag23.json")),
    ("rank2_monomialization", include_str!("../scenarios/rank2_monomialization.json")),
    ("semigroup_growth", include_str!("../scenarios/semigroup_growth.json")),
];

/// Names of the random generators accepted by [`random_scenario`].
pub const RANDOM_KINDS: &[&str] = &["random-ssm", "random-monomial", "random-semigroup"];

/// `(name, JSON text)` of every bundled scenario.
pub fn bundled() -> &'static [(&'static str, &'static str)] {
    BUNDLED
}

pub fn bundled_scenario(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Knobs for [`random_ssm_extension`].
#[derive(Clone, Debug)]
pub struct ExtensionShape {
    pub max_rank: usize,
    pub max_n: usize,
    pub max_e: u64,
}

impl Default for ExtensionShape {
    fn default() -> Self {
        ExtensionShape {
            max_rank: 3,
            max_n: 6,
            max_e: 24,
        }
    }
}

struct Skeleton {
    layout: Arc<GroupLayout>,
    blocks: BlockStructure,
    a: ExactMatrix,
    t_values: Vec<(usize, OrderedGroupElement)>,
}

fn random_block_sizes(rng: &mut ChaCha8Rng, shape: &ExtensionShape) -> (Vec<usize>, Vec<usize>) {
    loop {
        let r = rng.gen_range(1..=shape.max_rank);
        let s: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=2)).collect();
        let t: Vec<usize> = s.iter().map(|&si| si + rng.gen_range(0..=1)).collect();
        if t.iter().sum::<usize>() <= shape.max_n {
            return (t, s);
        }
    }
}

/// Nonsingular nonnegative square block with `|det| ≤ max_det`.
fn random_diagonal_block(rng: &mut ChaCha8Rng, k: usize, max_det: u64) -> ExactMatrix {
    loop {
        let rows: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let hi = if i == j { 4 } else { 2 };
                        let lo = if i == j { 1 } else { 0 };
                        BigInt::from(rng.gen_range(lo..=hi))
                    })
                    .collect()
            })
            .collect();
        let m = ExactMatrix::from_rows(rows).expect("square");
        let det = m.determinant().expect("square").abs();
        if !det.is_zero() && det <= BigInt::from(max_det) {
            return m;
        }
    }
}

fn skeleton(rng: &mut ChaCha8Rng, shape: &ExtensionShape) -> Skeleton {
    let (t, s) = random_block_sizes(rng, shape);
    let blocks = BlockStructure::new(t, s.clone()).expect("sizes in range");
    let weights: Vec<Weights> = s
        .iter()
        .map(|&si| {
            if si == 2 {
                Weights::quadratic(*[2i64, 3, 5].choose(rng).expect("nonempty")).expect("non-square")
            } else {
                Weights::Rational
            }
        })
        .collect();
    let layout = GroupLayout::new(weights).expect("valid layout");
    let n = blocks.n();
    let mut a = ExactMatrix::zeros(n, n);
    let mut budget = shape.max_e;
    for k in 0..blocks.r() {
        let idx = blocks.t_indices_of_block(k);
        let blocks_left = (blocks.r() - k) as u32;
        // keep room for the remaining blocks: each needs |det| ≥ 1
        let cap = budget.max(1);
        let d = random_diagonal_block(rng, idx.len(), cap.min(if blocks_left > 1 { 6 } else { cap }));
        budget /= d.determinant().expect("square").abs().try_into().unwrap_or(1u64).max(1);
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                a.set(gi, gj, d.get(i, j).clone());
            }
            // later T-columns
            for later in k + 1..blocks.r() {
                for gj in blocks.t_indices_of_block(later) {
                    a.set(gi, gj, BigInt::from(rng.gen_range(0..=2)));
                }
            }
        }
    }
    for m in (0..n).filter(|&m| !blocks.is_t(m)) {
        a.set(m, m, BigInt::one());
    }
    let mut t_values = Vec::new();
    for k in 0..blocks.r() {
        for (p, j) in blocks.t_indices_of_block(k).into_iter().enumerate() {
            let mut comps: Vec<Vec<BigRational>> = layout
                .blocks()
                .iter()
                .map(|w| vec![BigRational::zero(); w.width()])
                .collect();
            // leading block: a positive multiple of a weight basis vector
            comps[k][p] = rat(rng.gen_range(1..=4), rng.gen_range(1..=3));
            for comp in comps.iter_mut().skip(k + 1) {
                for c in comp.iter_mut() {
                    *c = rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
                }
            }
            t_values.push((j, OrderedGroupElement::new(layout.clone(), comps).expect("layout shape")));
        }
    }
    Skeleton {
        layout,
        blocks,
        a,
        t_values,
    }
}

/// Value of `∏_{w∈T} x_w^{c_w}` for a random `c ≥ 0` supported on T-rows of
/// blocks `≥ level`, with some T-row of block `level` used.
fn random_monomial_value(rng: &mut ChaCha8Rng, sk: &Skeleton, ys: &[OrderedGroupElement], level: usize) -> OrderedGroupElement {
    let mut acc = OrderedGroupElement::zero(sk.layout.clone());
    let own = sk.blocks.t_indices_of_block(level);
    let forced = *own.choose(rng).expect("s ≥ 1");
    for k in level..sk.blocks.r() {
        for w in sk.blocks.t_indices_of_block(k) {
            let c = if w == forced { rng.gen_range(1..=2) } else { rng.gen_range(0..=1) };
            if c > 0 {
                let row = sk.a.row(w);
                for (j, aj) in row.iter().enumerate() {
                    if !aj.is_zero() {
                        acc = acc.try_add(&ys[j].scale_int(&(aj * c))).expect("same layout");
                    }
                }
            }
        }
    }
    acc
}

fn assemble(sk: &Skeleton) -> Vec<OrderedGroupElement> {
    let n = sk.blocks.n();
    let mut ys = vec![OrderedGroupElement::zero(sk.layout.clone()); n];
    for (j, v) in &sk.t_values {
        ys[*j] = v.clone();
    }
    ys
}

/// A valid extension in strong monomial form with `|det A_T| ≤ max_e`.
pub fn random_ssm_extension(rng: &mut ChaCha8Rng, shape: &ExtensionShape) -> MonomialExtension {
    let sk = skeleton(rng, shape);
    let mut ys = assemble(&sk);
    for m in (0..sk.blocks.n()).filter(|&m| !sk.blocks.is_t(m)) {
        ys[m] = random_monomial_value(rng, &sk, &ys, sk.blocks.block_of(m));
    }
    MonomialExtension::without_units(sk.layout.clone(), sk.blocks.clone(), sk.a.clone(), ys).expect("consistent shapes")
}

/// An extension whose rows outside `T` read `x_m = δ_m·y_m·∏ y_q^{h_q}`
/// over later T-indices `q`, with `0 ≤ h_q ≤ max_h`.
pub fn random_monomial_input(rng: &mut ChaCha8Rng, shape: &ExtensionShape, max_h: i64) -> MonomialExtension {
    loop {
        let mut sk = skeleton(rng, shape);
        let n = sk.blocks.n();
        let non_t: Vec<usize> = (0..n).filter(|&m| !sk.blocks.is_t(m)).collect();
        for &m in &non_t {
            let bm = sk.blocks.block_of(m);
            for k in bm + 1..sk.blocks.r() {
                for q in sk.blocks.t_indices_of_block(k) {
                    sk.a.set(m, q, BigInt::from(rng.gen_range(0..=max_h)));
                }
            }
        }
        let mut ys = assemble(&sk);
        let targets: Vec<(usize, OrderedGroupElement)> = non_t
            .iter()
            .map(|&m| (m, random_monomial_value(rng, &sk, &ys, sk.blocks.block_of(m))))
            .collect();
        for (m, v) in &targets {
            ys[*m] = v.clone();
        }
        let units: Vec<UnitMarker> = (0..n)
            .map(|i| if rng.gen_bool(0.5) { UnitMarker::delta(i) } else { UnitMarker::trivial() })
            .collect();
        let provisional = MonomialExtension::new(sk.layout.clone(), sk.blocks.clone(), sk.a.clone(), units.clone(), ys.clone())
            .expect("consistent shapes");
        // The S-steps do not depend on the values, so one provisional run
        // tells how far each y_m drops; shift y_m so that it lands on its target.
        let Ok(trace) = strong_monomialize(&provisional, &EngineConfig::default()) else {
            continue;
        };
        let fin = trace.final_form.extension();
        for (m, target) in &targets {
            let drop = target.try_sub(&fin.y_values()[*m]).expect("same layout");
            ys[*m] = target.try_add(&drop).expect("same layout");
        }
        return MonomialExtension::new(sk.layout, sk.blocks, sk.a, units, ys).expect("consistent shapes");
    }
}

fn record_for(e: u64, f: u64) -> ExtensionRecord {
    ExtensionRecord::new(e * f, e, f, 0, None, None, None, None).expect("characteristic zero record")
}

/// Random scenario of the given kind; see [`RANDOM_KINDS`].
pub fn random_scenario(kind: &str, seed: u64) -> Option<Scenario> {
    let mut rng = rng(seed);
    let shape = ExtensionShape::default();
    let f = rng.gen_range(1..=3u64);
    let (me, semigroups) = match kind {
        "random-ssm" => (random_ssm_extension(&mut rng, &shape), None),
        "random-monomial" => (random_monomial_input(&mut rng, &shape, 3), None),
        "random-semigroup" => {
            let (me, sg) = random_semigroup_pair(&mut rng);
            (me, Some(sg))
        }
        _ => return None,
    };
    let e: u64 = me
        .t_submatrix()
        .determinant()
        .expect("square")
        .abs()
        .try_into()
        .expect("small determinant");
    Some(Scenario {
        name: format!("{kind}-{seed}"),
        description: None,
        value_groups: None,
        monomial_extension: me,
        residue_degree: f,
        semigroups,
        extension_records: vec![record_for(e, f)],
        box_bound: None,
    })
}

/// Rank-one semigroups `⟨a_i/q⟩ ⊂ ⟨1/q, a_i/q⟩` with all `a_i ≥ 2`, so `1/q`
/// is always a witness; the generated groups agree iff `gcd(a_i) = 1`.
fn random_semigroup_pair(rng: &mut ChaCha8Rng) -> (MonomialExtension, SemigroupScenario) {
    let layout = GroupLayout::rational(1);
    let q = rng.gen_range(1..=4i64);
    let k = rng.gen_range(1..=3);
    let a: Vec<i64> = (0..k).map(|_| rng.gen_range(2..=9)).collect();
    let g = a.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let el = |p: i64| OrderedGroupElement::from_rationals(layout.clone(), vec![rat(p, q)]).expect("rank one");
    let small = ValueSemigroup::new(layout.clone(), a.iter().map(|&x| el(x)).collect()).expect("positive");
    let mut big_gens: Vec<_> = a.iter().map(|&x| el(x)).collect();
    big_gens.push(el(1));
    let big = ValueSemigroup::new(layout.clone(), big_gens).expect("positive");
    let bound = el(rng.gen_range(2..=12));
    let me = MonomialExtension::without_units(
        layout.clone(),
        BlockStructure::new(vec![1], vec![1]).expect("one block"),
        ExactMatrix::identity(1),
        vec![el(1)],
    )
    .expect("consistent shapes");
    let sg = SemigroupScenario {
        small,
        big,
        bound: bound.to_repr(),
        expect: Expectation::Growth,
        witnesses: vec![el(1).to_repr()],
        non_members: vec![el(1).to_repr()],
        same_group: Some(g == 1),
    };
    (me, sg)
}
