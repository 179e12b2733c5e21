//! Cross-module invariants: algebraic identities checked against independent
//! routes, order axioms, and wire-format round trips.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resolvent_core::json::{PolyData, PolyJson};
use resolvent_core::perm::{closure, height_lt, Permutation};
use resolvent_core::poly::{discriminant, resultant, Polynomial};
use resolvent_core::roots::find_roots;
use resolvent_core::scalar::{rat_to_complex, Rat};

fn random_rat_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Polynomial<Rat> {
    let deg = rng.gen_range(1..=max_deg);
    let coeffs: Vec<Rat> = (0..=deg)
        .map(|k| {
            let v = if k == deg {
                rng.gen_range(1..6)
            } else {
                rng.gen_range(-5..6)
            };
            Rat::new(v.into(), (rng.gen_range(1..4) as i64).into())
        })
        .collect();
    Polynomial::new(coeffs)
}

#[test]
fn resultant_equals_root_product_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut done = 0;
    while done < 40 {
        let f = random_rat_poly(&mut rng, 6);
        let g = random_rat_poly(&mut rng, 6);
        let fc = f.to_complex();
        let gc = g.to_complex();
        let froots = match find_roots(&fc, 1e-8 * fc.max_coeff_norm().max(1.0)) {
            Ok(r) => r,
            Err(_) => continue,
        };
        done += 1;
        let exact = resultant(&f, &g).unwrap();
        let lc = rat_to_complex(f.leading().unwrap());
        let mut numeric = lc.powu(g.coeffs().len() as u32 - 1);
        for root in froots.expanded() {
            numeric *= gc.eval(&root);
        }
        let exact_c = rat_to_complex(&exact);
        let scale = exact_c.norm().max(numeric.norm()).max(1.0);
        assert!(
            (exact_c - numeric).norm() < 1e-8 * scale,
            "sylvester {exact_c} vs product {numeric}"
        );
    }
}

#[test]
fn discriminant_zero_iff_multiple_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..30 {
        // planted double root among integers keeps everything exact
        let n = rng.gen_range(3..=6);
        let mut roots: Vec<i64> = Vec::new();
        while roots.len() < n - 1 {
            let r = rng.gen_range(-4..5);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let dup = roots[0];
        roots.push(dup);
        let rs: Vec<Rat> = roots.iter().map(|&r| Rat::from(num_bigint::BigInt::from(r))).collect();
        let f = Polynomial::monic_from_roots(&rs);
        assert!(discriminant(&f).unwrap() == Rat::from(num_bigint::BigInt::from(0)));
        let found = find_roots(&f.to_complex(), 1e-7 * f.to_complex().max_coeff_norm()).unwrap();
        assert!(found.max_multiplicity() >= 2);

        // distinct integer roots: nonzero discriminant, all simple
        let mut simple: Vec<i64> = Vec::new();
        while simple.len() < n {
            let r = rng.gen_range(-6..7);
            if !simple.contains(&r) {
                simple.push(r);
            }
        }
        let rs: Vec<Rat> = simple.iter().map(|&r| Rat::from(num_bigint::BigInt::from(r))).collect();
        let f = Polynomial::monic_from_roots(&rs);
        assert!(discriminant(&f).unwrap() != Rat::from(num_bigint::BigInt::from(0)));
        let found = find_roots(&f.to_complex(), 1e-7 * f.to_complex().max_coeff_norm()).unwrap();
        assert_eq!(found.max_multiplicity(), 1);
    }
}

#[test]
fn exact_path_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let f = random_rat_poly(&mut rng, 5);
        let g = random_rat_poly(&mut rng, 5);
        let r1 = resultant(&f, &g).unwrap();
        let r2 = resultant(&f.clone(), &g.clone()).unwrap();
        assert_eq!(r1, r2);
        if f.degree().unwrap_or(0) >= 2 {
            assert_eq!(discriminant(&f).unwrap(), discriminant(&f).unwrap());
        }
    }
}

#[test]
fn closure_is_closed_under_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 3..=5 {
        let g1 = random_perm(&mut rng, n);
        let g2 = random_perm(&mut rng, n);
        let group = closure(&[g1, g2], 10_000).unwrap();
        for _ in 0..50 {
            let a = group.elements().choose(&mut rng).unwrap();
            let b = group.elements().choose(&mut rng).unwrap();
            assert!(group.contains(&a.then(b)));
            assert!(group.contains(&a.inverse()));
        }
    }
}

#[test]
fn values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Polynomial<Rat>>();
    assert_send_sync::<Polynomial<Complex64>>();
    assert_send_sync::<resolvent_core::roots::RootSet>();
    assert_send_sync::<Permutation>();
    assert_send_sync::<resolvent_core::perm::SetPartition>();
    assert_send_sync::<resolvent_core::perm::PermGroup>();
    assert_send_sync::<resolvent_core::monodromy::ParamFamily>();
    assert_send_sync::<resolvent_core::monodromy::Loop>();
    assert_send_sync::<resolvent_core::forms::FormPhi>();
    assert_send_sync::<resolvent_core::transform::TschirnhausMap<Complex64>>();
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_perm(&mut rng, n)
    })
}

proptest! {
    // strict partial order: irreflexive and transitive
    #[test]
    fn height_order_axioms(
        a in perm_strategy(6),
        b in perm_strategy(6),
        c in perm_strategy(6),
    ) {
        prop_assert!(!height_lt(&a, &a).unwrap());
        if height_lt(&a, &b).unwrap() && height_lt(&b, &c).unwrap() {
            prop_assert!(height_lt(&a, &c).unwrap());
        }
        // antisymmetry of the strict order
        if height_lt(&a, &b).unwrap() {
            prop_assert!(!height_lt(&b, &a).unwrap());
        }
    }

    #[test]
    fn rational_poly_json_round_trip(coeffs in prop::collection::vec((-30i64..30, 1i64..7), 0..8)) {
        let p = Polynomial::new(
            coeffs.iter().map(|&(n, d)| Rat::new(n.into(), d.into())).collect::<Vec<Rat>>(),
        );
        let data = PolyData::Rational(p);
        let json = serde_json::to_string(&data.to_json()).unwrap();
        let parsed: PolyJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(PolyData::from_json(&parsed).unwrap(), data);
    }

    #[test]
    fn complex_poly_json_round_trip(coeffs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 0..8)) {
        let p = Polynomial::new(
            coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect::<Vec<_>>(),
        );
        let data = PolyData::Complex(p);
        let json = serde_json::to_string(&data.to_json()).unwrap();
        let parsed: PolyJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(PolyData::from_json(&parsed).unwrap(), data);
    }
}
