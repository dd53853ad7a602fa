//! The central oracle: the urn's color sequence and the branching chain's
//! vertex colors (in attachment order) have *identical* finite-horizon laws.
//! Both sides are enumerated exactly over the rationals, so equality is
//! checked atom by atom with no tolerance at all.

use num::rational::BigRational;
use num::{One, Zero};
use proptest::prelude::*;
use std::sync::Arc;

use urnlab_core::exact::parse_ratio;
use urnlab_core::measure::{ColorId, SparseMeasure};
use urnlab_core::rng::replica_stream;
use urnlab_core::{bmc, urn, ExactMeasure, Kernel, UrnState};

fn ratio(s: &str) -> BigRational {
    parse_ratio(s).unwrap()
}

fn assert_same_law(u0: &str, kernel: &Kernel, horizon: usize) {
    let u0 = ExactMeasure::parse(u0).unwrap();
    let urn_law = urn::exact_law(&u0, kernel, horizon).unwrap();
    let bmc_law = bmc::exact_law(&u0, kernel, horizon).unwrap();
    assert!(urn_law.atom_sum().is_one(), "urn law does not sum to 1");
    assert!(bmc_law.atom_sum().is_one(), "bmc law does not sum to 1");
    let tv = urn_law.tv_exact(&bmc_law).unwrap();
    assert!(
        tv.is_zero(),
        "laws differ at horizon {horizon}: exact tv = {tv}"
    );
    // The float-valued distance agrees.
    assert_eq!(urn_law.tv(&bmc_law).unwrap(), 0.0);
}

#[test]
fn flip_kernel_all_horizons() {
    let flip = Kernel::parse("kernel explicit 2\n0 1 1\n1 0 1").unwrap();
    for horizon in 0..=4 {
        assert_same_law("0:1", &flip, horizon);
    }
    // Known atoms at horizon 1: the first draw is forced, the second is a
    // fair split between the old color and the added one.
    let u0 = ExactMeasure::parse("0:1").unwrap();
    let law = bmc::exact_law(&u0, &flip, 1).unwrap();
    let half = ratio("1/2");
    assert_eq!(law.prob(&[ColorId(0), ColorId(0)]), half);
    assert_eq!(law.prob(&[ColorId(0), ColorId(1)]), half);
}

#[test]
fn polya_identity_kernel() {
    // Identity replacement is the classical two-color urn; sequences are
    // exchangeable and the all-zeros atom has the known product form.
    let id = Kernel::identity(2).unwrap();
    assert_same_law("0:1,1:1", &id, 3);
    let u0 = ExactMeasure::parse("0:1,1:1").unwrap();
    let law = urn::exact_law(&u0, &id, 3).unwrap();
    let zeros = vec![ColorId(0); 4];
    // (1/2)(2/3)(3/4)(4/5) = 1/5.
    assert_eq!(law.prob(&zeros), ratio("1/5"));
    // Exchangeability: atoms with the same color counts have equal mass.
    let a = law.prob(&[ColorId(0), ColorId(0), ColorId(1), ColorId(0)]);
    let b = law.prob(&[ColorId(1), ColorId(0), ColorId(0), ColorId(0)]);
    assert_eq!(a, b);
    assert!(!a.is_zero());
}

#[test]
fn three_colors_fractional_mass() {
    let k = Kernel::parse("kernel explicit 3\n0 0 1/3\n0 1 1/3\n0 2 1/3\n1 0 1/2\n1 2 1/2\n2 1 1")
        .unwrap();
    // Total initial mass 1/2, spread over two colors.
    assert_same_law("0:1/4,2:1/4", &k, 3);
    assert_same_law("0:1/4,2:1/4", &k, 2);
}

#[test]
fn four_colors_cyclic() {
    let k = Kernel::parse("kernel explicit 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1/2\n3 3 1/2").unwrap();
    assert_same_law("0:1,3:1", &k, 3);
}

#[test]
fn star_walk_reinforcement_rows() {
    let k = Kernel::parse("kernel generator star-walk p=0.5,0.3,0.2").unwrap();
    assert_same_law("0:1", &k, 3);
    assert_same_law("0:2", &k, 4);
}

#[test]
fn float_built_kernel_still_agrees_exactly() {
    // Rows written as floats are dyadic rationals, so enumeration stays
    // exact and the distance is still identically zero.
    let k = Kernel::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
    assert!(!k.is_rational_input());
    let u0 = ExactMeasure::from_pairs([(0, ratio("1"))]).unwrap();
    let urn_law = urn::exact_law(&u0, &k, 3).unwrap();
    let bmc_law = bmc::exact_law(&u0, &k, 3).unwrap();
    assert!(urn_law.tv_exact(&bmc_law).unwrap().is_zero());
    assert!(urn_law.tv(&bmc_law).unwrap() <= 1e-10);
}

#[test]
fn empirical_urn_marginals_match_the_exact_law() {
    // Sampled per-position color frequencies sit within 3 sigma of the
    // exact marginals (frozen seed, so this is a fixed outcome).
    let k = Kernel::parse("kernel explicit 2\n0 1 1\n1 0 1").unwrap();
    let u0 = ExactMeasure::parse("0:1").unwrap();
    let horizon = 3usize;
    let law = urn::exact_law(&u0, &k, horizon).unwrap();
    let reps = 20_000u64;
    let kernel = Arc::new(k);
    let mut counts = vec![[0u64; 2]; horizon + 1];
    for rep in 0..reps {
        let mut rng = replica_stream(2024, rep);
        let urn = UrnState::init(u0.to_sparse(), kernel.clone()).unwrap();
        let trace = urn.run(horizon as u64 + 1, &mut rng).unwrap();
        for (pos, &z) in trace.draws[..=horizon].iter().enumerate() {
            counts[pos][z.0 as usize] += 1;
        }
    }
    for (pos, row) in counts.iter().enumerate() {
        let marginal = law.marginal(pos).unwrap();
        for color in 0..2u32 {
            let p = marginal.get(ColorId(color));
            let freq = row[color as usize] as f64 / reps as f64;
            let sigma = (p * (1.0 - p) / reps as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * sigma + 1e-12,
                "position {pos} color {color}: freq {freq} vs p {p}"
            );
        }
    }
}

#[test]
fn empirical_bmc_vertex_marginals() {
    // On a fixed chain o -> w0 -> w1 -> w2, sampled vertex colors match the
    // propagated marginals within 3 sigma.
    use urnlab_core::rrt::{RecursiveTree, Vertex};
    let k = Kernel::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
    let u0 = SparseMeasure::parse("0:1").unwrap();
    let mut tree = RecursiveTree::new(1.0).unwrap();
    let w0 = tree.attach(Vertex::Root).unwrap();
    let w1 = tree.attach(w0).unwrap();
    let w2 = tree.attach(w1).unwrap();
    let reps = 20_000u64;
    let mut counts = [[0u64; 2]; 3];
    for rep in 0..reps {
        let mut rng = replica_stream(77, rep);
        let trace = bmc::run(&tree, &k, &u0, &mut rng).unwrap();
        for (i, v) in [w0, w1, w2].into_iter().enumerate() {
            counts[i][trace.color(v).unwrap().0 as usize] += 1;
        }
    }
    for (i, v) in [w0, w1, w2].into_iter().enumerate() {
        let marginal = bmc::vertex_marginal(&tree, &k, &u0, v, 1e-12).unwrap();
        for color in 0..2u32 {
            let p = marginal.get(ColorId(color));
            let freq = counts[i][color as usize] as f64 / reps as f64;
            let sigma = (p * (1.0 - p) / reps as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * sigma + 1e-12,
                "vertex {v} color {color}: freq {freq} vs p {p}"
            );
        }
    }
}

/// Random rows over a small color set with denominators up to 8.
fn arb_kernel(num_colors: u32) -> impl Strategy<Value = Kernel> {
    let row = proptest::collection::vec(0u32..=4, num_colors as usize)
        .prop_filter("row must have positive mass", |w| w.iter().any(|&x| x > 0));
    proptest::collection::vec(row, num_colors as usize).prop_map(move |rows| {
        let mut entries = Vec::new();
        for (u, row) in rows.iter().enumerate() {
            let sum: u32 = row.iter().sum();
            for (v, &w) in row.iter().enumerate() {
                if w > 0 {
                    entries.push((u as u32, v as u32, BigRational::new(w.into(), sum.into())));
                }
            }
        }
        Kernel::from_exact_entries(num_colors, entries, true).unwrap()
    })
}

fn arb_u0(num_colors: u32) -> impl Strategy<Value = ExactMeasure> {
    proptest::collection::vec(0u32..=3, num_colors as usize)
        .prop_filter("initial mass must be positive", |w| {
            w.iter().any(|&x| x > 0)
        })
        .prop_map(|weights| {
            ExactMeasure::from_pairs(
                weights
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| w > 0)
                    .map(|(c, &w)| (c as u32, BigRational::new(w.into(), 2.into()))),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn urn_and_bmc_laws_coincide(
        (kernel, u0, horizon) in (2u32..=3).prop_flat_map(|k| {
            (arb_kernel(k), arb_u0(k), 0usize..=3)
        }),
    ) {
        let urn_law = urn::exact_law(&u0, &kernel, horizon).unwrap();
        let bmc_law = bmc::exact_law(&u0, &kernel, horizon).unwrap();
        prop_assert!(urn_law.atom_sum().is_one());
        prop_assert!(urn_law.tv_exact(&bmc_law).unwrap().is_zero());
    }
}
