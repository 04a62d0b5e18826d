//! Brute-force reference computations and model zoos shared by the
//! integration tests and the acceptance suite. Nothing here calls the
//! library's search, certificate, or IDT code; the answers are computed
//! straight from truth tables.
#![allow(dead_code)]

use std::collections::BTreeSet;

use monocf::idt::{AuxInfo, Idt};
use monocf::model_core::{DecisionTree, Dictator, Dnf, Majority, ThresholdPlanted, TreeNode};
use monocf::{Instance, Model, Restriction};
use rand::seq::SliceRandom;
use rand::Rng;

pub type BoxedModel = Box<dyn Model + Send + Sync>;

/// Every point of `{0,1}^d`, built bit by bit, coordinate 0 first.
pub fn cube(d: usize) -> Vec<Instance> {
    (0..1usize << d)
        .map(|c| Instance::new((0..d).map(|i| (c >> (d - 1 - i)) & 1 == 1).collect()))
        .collect()
}

pub fn hamming(x: &Instance, y: &Instance) -> usize {
    x.bits().iter().zip(y.bits()).filter(|(a, b)| a != b).count()
}

pub fn diff(x: &Instance, y: &Instance) -> BTreeSet<usize> {
    (0..x.len()).filter(|&i| x.get(i) != y.get(i)).collect()
}

pub fn parse(s: &str) -> Instance {
    s.parse().unwrap()
}

/// All nearest instances with `f(y) != f(x)`, or `None` for constant `f`.
pub fn bf_optimal(f: &dyn Model, x: &Instance) -> Option<(BTreeSet<Instance>, usize)> {
    let fx = f.evaluate(x);
    let flips: Vec<Instance> = cube(f.dimension()).into_iter().filter(|y| f.evaluate(y) != fx).collect();
    let best = flips.iter().map(|y| hamming(x, y)).min()?;
    Some((flips.into_iter().filter(|y| hamming(x, y) == best).collect(), best))
}

/// Minimal counterfactuals for `x` among instances consistent with `rho`
/// within distance `k` of `x` overwritten by `rho`. Minimality compares
/// difference sets from `x`.
pub fn bf_minimal(f: &dyn Model, rho: &Restriction, x: &Instance, k: usize) -> BTreeSet<Instance> {
    let fx = f.evaluate(x);
    let mut anchor = x.clone();
    for i in 0..x.len() {
        if let Some(b) = rho.get(i) {
            anchor.set(i, b);
        }
    }
    let region: Vec<Instance> = cube(f.dimension())
        .into_iter()
        .filter(|y| (0..y.len()).all(|i| rho.get(i).is_none_or(|b| y.get(i) == b)))
        .filter(|y| hamming(&anchor, y) <= k)
        .filter(|y| f.evaluate(y) != fx)
        .collect();
    let sets: Vec<BTreeSet<usize>> = region.iter().map(|y| diff(x, y)).collect();
    region
        .iter()
        .zip(&sets)
        .filter(|(_, s)| !sets.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .map(|(y, _)| y.clone())
        .collect()
}

pub fn bf_sensitivity(f: &dyn Model) -> usize {
    cube(f.dimension())
        .iter()
        .map(|x| {
            let fx = f.evaluate(x);
            (0..x.len()).filter(|&i| f.evaluate(&x.flipped(i)) != fx).count()
        })
        .max()
        .unwrap_or(0)
}

/// Supports of the minimal 1-inputs of a monotone `f`.
pub fn bf_minterms(f: &dyn Model) -> Vec<BTreeSet<usize>> {
    cube(f.dimension())
        .into_iter()
        .filter(|x| f.evaluate(x))
        .filter(|x| (0..x.len()).all(|i| !x.get(i) || !f.evaluate(&x.flipped(i))))
        .map(|x| (0..x.len()).filter(|&i| x.get(i)).collect())
        .collect()
}

/// Zero-sets of the maximal 0-inputs of a monotone `f`.
pub fn bf_maxterms(f: &dyn Model) -> Vec<BTreeSet<usize>> {
    cube(f.dimension())
        .into_iter()
        .filter(|x| !f.evaluate(x))
        .filter(|x| (0..x.len()).all(|i| x.get(i) || f.evaluate(&x.flipped(i))))
        .map(|x| (0..x.len()).filter(|&i| !x.get(i)).collect())
        .collect()
}

/// `(C_0, C_1)` of a monotone `f`: a 1-input's cheapest certificate is its
/// smallest contained minterm, a 0-input's its smallest maxterm among its
/// zeros.
pub fn bf_cert_complexity(f: &dyn Model) -> (usize, usize) {
    let mins = bf_minterms(f);
    let maxs = bf_maxterms(f);
    let (mut c0, mut c1) = (0, 0);
    for x in cube(f.dimension()) {
        let ones: BTreeSet<usize> = (0..x.len()).filter(|&i| x.get(i)).collect();
        if f.evaluate(&x) {
            let c = mins.iter().filter(|m| m.is_subset(&ones)).map(|m| m.len()).min().unwrap_or(0);
            c1 = c1.max(c);
        } else {
            let zeros: BTreeSet<usize> = (0..x.len()).filter(|&i| !x.get(i)).collect();
            let c = maxs.iter().filter(|m| m.is_subset(&zeros)).map(|m| m.len()).min().unwrap_or(0);
            c0 = c0.max(c);
        }
    }
    (c0, c1)
}

pub fn is_constant(f: &dyn Model) -> bool {
    let d = f.dimension();
    f.evaluate(&Instance::zeros(d)) == f.evaluate(&Instance::ones(d))
}

/// A random monotone DNF with 1 to 5 terms of width 1 to 4.
pub fn random_dnf<R: Rng>(rng: &mut R, d: usize) -> Dnf {
    let n_terms = rng.gen_range(1..=5);
    let width = rng.gen_range(1..=4.min(d));
    Dnf::random(rng, d, n_terms, width)
}

/// A random non-constant monotone DNF.
pub fn random_nonconstant_dnf<R: Rng>(rng: &mut R, d: usize) -> Dnf {
    loop {
        let f = random_dnf(rng, d);
        if !is_constant(&f) {
            return f;
        }
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, d: usize) -> Instance {
    Instance::new((0..d).map(|_| rng.gen_bool(0.5)).collect())
}

/// Shannon expansion of `f` along a variable order, pruning constant
/// subtrees. Monotone whenever `f` is.
pub fn shannon_tree(f: &dyn Model, order: &[usize]) -> DecisionTree {
    fn build(f: &dyn Model, order: &[usize], rho: &mut Vec<Option<bool>>) -> TreeNode {
        let d = rho.len();
        let at = |fill: bool| {
            Instance::new((0..d).map(|i| rho[i].unwrap_or(fill)).collect())
        };
        let (lo, hi) = (f.evaluate(&at(false)), f.evaluate(&at(true)));
        if lo == hi {
            return TreeNode::Leaf(lo);
        }
        let (&var, rest) = order.split_first().expect("non-constant with no variables left");
        rho[var] = Some(false);
        let l = build(f, rest, rho);
        rho[var] = Some(true);
        let h = build(f, rest, rho);
        rho[var] = None;
        TreeNode::internal(var, l, h)
    }
    let d = f.dimension();
    let root = build(f, order, &mut vec![None; d]);
    DecisionTree::new(d, root).unwrap()
}

/// `[at least k of n]` as a DNF over all k-subsets.
pub fn threshold_dnf(n: usize, k: usize) -> Dnf {
    use itertools::Itertools;
    Dnf::new(n, (0..n).combinations(k).collect()).unwrap()
}

fn planted(d: usize, s: usize, delta: usize, z: &str) -> ThresholdPlanted {
    ThresholdPlanted::new(d, s, delta, parse(z).bits().to_vec()).unwrap()
}

/// Named non-constant monotone models with `d <= d_max`, fixed plus
/// seeded random ones.
pub fn zoo<R: Rng>(rng: &mut R, d_max: usize) -> Vec<(String, BoxedModel)> {
    let mut out: Vec<(String, BoxedModel)> = Vec::new();
    for d in [1, 3, 7, 12] {
        out.push((format!("and{d}"), Box::new(Dnf::and(d))));
    }
    for d in [2, 8, 12] {
        out.push((format!("or{d}"), Box::new(Dnf::or(d))));
    }
    for d in [3, 5, 7, 9, 11] {
        out.push((format!("maj{d}"), Box::new(Majority::new(d).unwrap())));
    }
    for (d, i) in [(1, 0), (5, 2), (12, 11)] {
        out.push((format!("dictator{d}_{i}"), Box::new(Dictator::new(d, i).unwrap())));
    }
    out.push(("planted6".into(), Box::new(planted(6, 4, 2, "1100"))));
    out.push(("planted8".into(), Box::new(planted(8, 8, 1, "00001000"))));
    out.push(("planted10".into(), Box::new(planted(10, 6, 3, "101010"))));
    out.push(("planted12".into(), Box::new(planted(12, 8, 2, "01000010"))));
    out.push(("thr2of6".into(), Box::new(threshold_dnf(6, 2))));
    out.push(("thr3of7".into(), Box::new(threshold_dnf(7, 3))));
    out.push((
        "tribes9".into(),
        Box::new(Dnf::new(9, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap()),
    ));
    out.push((
        "mixed3".into(),
        Box::new(Dnf::new(3, vec![vec![0], vec![1, 2]]).unwrap()),
    ));
    for k in 0..20 {
        let d = rng.gen_range(4..=12);
        out.push((format!("dnf{k}_d{d}"), Box::new(random_nonconstant_dnf(rng, d))));
    }
    for k in 0..6 {
        let d = rng.gen_range(4..=10);
        let f = random_nonconstant_dnf(rng, d);
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(rng);
        out.push((format!("tree{k}_d{d}"), Box::new(shannon_tree(&f, &order))));
    }
    out.retain(|(_, f)| f.dimension() <= d_max);
    out
}

/// A uniformly random IDT path of random length from the root, with the
/// auxiliary information valid at its end.
pub fn random_path<R: Rng>(idt: &Idt, rng: &mut R, max_steps: usize) -> (Restriction, AuxInfo) {
    let d = idt.oracle().dimension();
    let mut rho = Restriction::empty(d);
    let mut aux = AuxInfo::default();
    let steps = rng.gen_range(0..=max_steps);
    for _ in 0..steps {
        if idt.is_leaf(&rho, &aux) {
            break;
        }
        let (i, next) = idt.query(&rho, &aux).unwrap();
        rho.set(i, rng.gen_bool(0.5));
        aux = next;
    }
    (rho, aux)
}

use monocf::general::{AtLeast, GeneralDnf, GeneralInstance, GeneralModel, GeneralThreshold, OrderedFeatureSpace};

pub type BoxedGeneral = Box<dyn GeneralModel + Send + Sync>;

/// Every point of `space^d`, first coordinate most significant.
pub fn general_cube(space: &[i64], d: usize) -> Vec<GeneralInstance> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                space.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(GeneralInstance::new).collect()
}

/// The optimal difference sets of `x`, or `None` for constant `f`.
pub fn bf_general_diff_sets(f: &dyn GeneralModel, x: &GeneralInstance) -> Option<(BTreeSet<Vec<usize>>, usize)> {
    let fx = f.evaluate(x);
    let sets: Vec<Vec<usize>> = general_cube(f.space().values(), f.dimension())
        .into_iter()
        .filter(|y| f.evaluate(y) != fx)
        .map(|y| (0..y.len()).filter(|&i| y.get(i) != x.get(i)).collect())
        .collect();
    let best = sets.iter().map(Vec::len).min()?;
    Some((sets.into_iter().filter(|s| s.len() == best).collect(), best))
}

pub fn bf_general_sensitivity(f: &dyn GeneralModel) -> usize {
    let space = f.space().values().to_vec();
    general_cube(&space, f.dimension())
        .iter()
        .map(|x| {
            let fx = f.evaluate(x);
            (0..x.len())
                .filter(|&i| {
                    space.iter().any(|&a| {
                        let mut y = x.clone();
                        y.set(i, a);
                        f.evaluate(&y) != fx
                    })
                })
                .count()
        })
        .max()
        .unwrap_or(0)
}

fn random_space<R: Rng>(rng: &mut R) -> OrderedFeatureSpace {
    let n = rng.gen_range(2..=4);
    let mut values = BTreeSet::new();
    while values.len() < n {
        values.insert(rng.gen_range(-5i64..=9));
    }
    OrderedFeatureSpace::new(values.into_iter().collect()).unwrap()
}

/// Seeded non-constant general models with `|X| <= 4`, `d <= 6`.
pub fn general_zoo<R: Rng>(rng: &mut R, count: usize) -> Vec<BoxedGeneral> {
    let mut out: Vec<BoxedGeneral> = Vec::new();
    while out.len() < count {
        let d = rng.gen_range(1..=6);
        let space = random_space(rng);
        let model: BoxedGeneral = if rng.gen_bool(0.4) {
            let lo = space.bottom() * d as i64;
            let hi = space.top() * d as i64;
            let t = rng.gen_range(lo..=hi);
            Box::new(GeneralThreshold::new(d, space, t).unwrap())
        } else {
            let values = space.values().to_vec();
            let terms = (0..rng.gen_range(1..=3))
                .map(|_| {
                    (0..rng.gen_range(1..=3.min(d)))
                        .map(|_| AtLeast {
                            var: rng.gen_range(0..d),
                            min: *values.choose(rng).unwrap(),
                        })
                        .collect()
                })
                .collect();
            Box::new(GeneralDnf::new(d, space, terms).unwrap())
        };
        let d = model.dimension();
        let bottom = GeneralInstance::new(vec![model.space().bottom(); d]);
        let top = GeneralInstance::new(vec![model.space().top(); d]);
        if model.evaluate(&bottom) != model.evaluate(&top) {
            out.push(model);
        }
    }
    out
}
