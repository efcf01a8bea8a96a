use abcalc_core::abalg::{divide_factored, AbOperator, LinearFactor};
use abcalc_core::abmod::{bernstein_char, saturate, BernsteinPolynomial};
use abcalc_core::fresco::{
    annihilator_of, bernstein_fresco, fresco_to_module, higher_bernstein,
    higher_bernstein_by_class, is_semisimple_fresco, pole_report, principal_jh, FactoredFresco,
};
use abcalc_core::monodromy::{nilpotent_part, semisimple_filtration};
use abcalc_core::series::{int, rat};
use abcalc_core::{Rational, TruncSeries};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const N: usize = 12;
const CLASSES: [(i64, i64); 4] = [(1, 2), (1, 3), (2, 3), (1, 1)];

fn random_fresco(seed: u64, max_rank: usize) -> FactoredFresco {
    let mut rng = StdRng::seed_from_u64(seed);
    let k = rng.gen_range(1..=max_rank);
    let pool: Vec<Rational> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let (p, q) = CLASSES[rng.gen_range(0..CLASSES.len())];
            rat(p, q)
        })
        .collect();
    let factors = (1..=k)
        .map(|j| {
            let alpha = &pool[rng.gen_range(0..pool.len())];
            let lambda = alpha + int((k - j) as i64 + rng.gen_range(0..=1));
            let mut c = vec![int(if rng.gen_bool(0.5) { 1 } else { -1 })];
            c.extend((1..4).map(|_| int(rng.gen_range(-2..=2))));
            LinearFactor::new(lambda, TruncSeries::from_prefix(&c, N))
        })
        .collect();
    FactoredFresco::new(factors, N).unwrap()
}

fn roots(r: &[Rational]) -> BernsteinPolynomial {
    BernsteinPolynomial::from_roots(r.to_vec())
}

#[test]
fn admissibility_is_enforced() {
    assert!(FactoredFresco::from_lambdas(&[rat(3, 2), rat(1, 2)], N).is_ok());
    assert!(FactoredFresco::from_lambdas(&[rat(1, 2), rat(1, 2)], N).is_err());
}

#[test]
fn theme_invariants() {
    let theme = FactoredFresco::from_lambdas(&[rat(3, 2), rat(1, 2)], N).unwrap();
    assert_eq!(bernstein_fresco(&theme), roots(&[rat(-1, 2), rat(-1, 2)]));
    assert!(!is_semisimple_fresco(&theme).unwrap());
    let hs = higher_bernstein(&theme).unwrap();
    assert_eq!(hs, vec![roots(&[rat(-1, 2)]), roots(&[rat(-1, 2)])]);
    let report = pole_report(&theme).unwrap();
    assert_eq!(report.classes.len(), 1);
    assert_eq!(report.classes[0].top_pole, rat(-1, 2));
    let split = FactoredFresco::from_lambdas(&[rat(5, 2), rat(1, 2)], N).unwrap();
    assert!(is_semisimple_fresco(&split).unwrap());
}

/// A rank-3 theme whose double root sits in the second and third layers only.
#[test]
fn double_root_outside_the_first_layer() {
    let unit = |c: i64| TruncSeries::from_ints(&[c, c, 2 * c, c], N);
    let f = FactoredFresco::new(
        vec![
            LinearFactor::new(rat(8, 3), unit(-1)),
            LinearFactor::new(rat(8, 3), unit(1)),
            LinearFactor::new(rat(5, 3), unit(-1)),
        ],
        N,
    )
    .unwrap();
    assert_eq!(
        bernstein_fresco(&f),
        roots(&[rat(-2, 3), rat(-5, 3), rat(-5, 3)])
    );
    let hs = higher_bernstein(&f).unwrap();
    assert_eq!(
        hs,
        vec![
            roots(&[rat(-2, 3)]),
            roots(&[rat(-5, 3)]),
            roots(&[rat(-5, 3)])
        ]
    );
    let (e, _) = fresco_to_module(&f);
    let sharp = saturate(&e).unwrap().module;
    let n = nilpotent_part(&sharp, 6).unwrap();
    assert!(n.matrix().pow(2).rank() > 0);
    assert_eq!(n.matrix().pow(3).rank(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bernstein_of_the_module(seed in any::<u64>()) {
        let f = random_fresco(seed, 4);
        let (e, _) = fresco_to_module(&f);
        prop_assert_eq!(bernstein_char(&e).unwrap(), bernstein_fresco(&f));
    }

    #[test]
    fn exact_sequence_law(seed in any::<u64>(), cut in 0usize..5) {
        let f = random_fresco(seed, 4);
        let r = cut.min(f.rank());
        let (sub, quo) = f.split_at(r).unwrap();
        let shifted = bernstein_fresco(&sub).substitute_shift(&-int(quo.rank() as i64));
        prop_assert_eq!(bernstein_fresco(&f), shifted.mul(&bernstein_fresco(&quo)));
    }

    #[test]
    fn principal_sequence(seed in any::<u64>()) {
        let f = random_fresco(seed, 4);
        let seq = principal_jh(&f);
        let shifted = |v: &[Rational]| {
            let mut w: Vec<Rational> = v.iter().enumerate().map(|(j, x)| x + int(j as i64 + 1)).collect();
            w.sort();
            w
        };
        prop_assert_eq!(shifted(&seq.values), shifted(&f.lambdas()));
        let values: Vec<Rational> = seq.values.iter().enumerate().map(|(j, x)| x + int(j as i64)).collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let principal = FactoredFresco::from_lambdas(&seq.values, N).unwrap();
        prop_assert_eq!(bernstein_fresco(&principal), bernstein_fresco(&f));
    }

    #[test]
    fn division_by_the_defining_operator(seed in any::<u64>()) {
        let f = random_fresco(seed, 3);
        let (q, r) = divide_factored(&f.operator(), f.factors()).unwrap();
        prop_assert_eq!(q, AbOperator::one(N));
        prop_assert!(r.is_zero());
    }

    #[test]
    fn annihilator_of_the_generator(seed in any::<u64>()) {
        let f = random_fresco(seed, 3);
        let (e, g) = fresco_to_module(&f);
        let ann = annihilator_of(&e, &g).unwrap();
        prop_assert_eq!(ann.rank(), f.rank());
        prop_assert_eq!(bernstein_fresco(&ann), bernstein_fresco(&f));
        let expected = f.truncate(ann.b_order()).unwrap();
        let (_, r) = divide_factored(&ann.operator(), expected.factors()).unwrap();
        prop_assert!(r.is_zero());
        let (_, r) = divide_factored(&expected.operator(), ann.factors()).unwrap();
        prop_assert!(r.is_zero());
    }

    #[test]
    fn higher_bernstein_layers(seed in any::<u64>()) {
        let f = random_fresco(seed, 4);
        let hs = higher_bernstein(&f).unwrap();
        let (e, _) = fresco_to_module(&f);
        let filt = semisimple_filtration(&e).unwrap();
        prop_assert_eq!(hs.len(), filt.nilpotent_order);
        let degrees: Vec<usize> = hs.iter().map(BernsteinPolynomial::degree).collect();
        prop_assert_eq!(degrees, filt.quotient_ranks);
        prop_assert_eq!(is_semisimple_fresco(&f).unwrap(), filt.nilpotent_order == 1);
        let product = hs.iter().fold(BernsteinPolynomial::one(), |acc, b| acc.mul(b));
        prop_assert_eq!(product, bernstein_fresco(&f));
    }

    #[test]
    fn root_structure(seed in any::<u64>()) {
        let f = random_fresco(seed, 4);
        let bf = bernstein_fresco(&f);
        prop_assert!(bf.roots().iter().all(|r| *r < int(0)));
        let by_class = higher_bernstein_by_class(&f).unwrap();
        let product = by_class.values().flatten().fold(BernsteinPolynomial::one(), |acc, b| acc.mul(b));
        prop_assert_eq!(&product, &bf);
        let hs = higher_bernstein(&f).unwrap();
        for layer in &hs {
            prop_assert!(layer.has_simple_roots(), "layer {} has a repeated root", layer);
        }
        prop_assert!(hs.windows(2).all(|w| w[0].degree() >= w[1].degree()));
        for (r, p) in bf.multiplicities() {
            let layers = hs.iter().filter(|b| b.multiplicity(&r) == 1).count();
            prop_assert_eq!(layers, p, "root {} of multiplicity {}", r, p);
        }
    }

    #[test]
    fn principal_sequence_is_canonical(seed in any::<u64>()) {
        let f = random_fresco(seed, 4);
        let seq = principal_jh(&f);
        let principal = FactoredFresco::from_lambdas(&seq.values, N).unwrap();
        prop_assert_eq!(principal_jh(&principal).values, seq.values);
    }
}
