use proptest::prelude::*;
use weierstrass_core::badic::BadicPoint;
use weierstrass_core::embed::{build_family, proof_certificate, random_pair};
use weierstrass_core::funcore::{combine, tent};
use weierstrass_core::levelset::{dimension_fit, BoxCountRecord};
use weierstrass_core::occup::occupation_histogram;
use weierstrass_core::rng::{rng_for, stream};
use weierstrass_core::{PeriodicFunction, Primitive, WeierstrassSpec};

fn base(kind: u8) -> PeriodicFunction {
    match kind % 3 {
        0 => PeriodicFunction::cosine(),
        1 => PeriodicFunction::triangle(),
        _ => PeriodicFunction::tent_shift(0.25, 0.375).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tent_is_bounded_and_periodic(ell in 0.01f64..=0.5, x in -4.0f64..4.0) {
        let v = tent(ell, x);
        prop_assert!((-0.5..=0.5).contains(&v));
        prop_assert!((v - tent(ell, x + 1.0)).abs() <= 1e-12);
    }

    #[test]
    fn combine_is_linear(a in -3.0f64..3.0, c in -3.0f64..3.0, x in 0.0f64..1.0) {
        let cos = PeriodicFunction::cosine();
        let tri = PeriodicFunction::triangle();
        let f = combine(&[(a, &cos), (c, &tri)]).unwrap();
        let expect = a * cos.eval(x) + c * tri.eval(x);
        prop_assert!((f.eval(x) - expect).abs() <= 1e-12);
        prop_assert!(f.lipschitz() <= a.abs() * cos.lipschitz() + c.abs() * tri.lipschitz() + 1e-9);
    }

    #[test]
    fn translate_moves_the_argument(kind in 0u8..3, s in -2.0f64..2.0, x in 0.0f64..1.0) {
        let g = combine(&[(1.0, &base(kind)), (0.5, &PeriodicFunction::single(Primitive::Sine).unwrap())]).unwrap();
        let h = g.translate(s).unwrap();
        prop_assert!((h.eval(x) - g.eval(x - s)).abs() <= 1e-11);
        prop_assert!((h.sup_norm() - g.sup_norm()).abs() <= 1e-9);
    }

    #[test]
    fn weierstrass_sum_is_bounded(kind in 0u8..3, alpha in 0.1f64..0.95, b in 2u32..6, x in 0.0f64..1.0) {
        let spec = WeierstrassSpec::new(base(kind), alpha, b).unwrap();
        let bound = spec.sup_norm() / (1.0 - spec.ratio());
        prop_assert!(spec.eval(x, 1e-10).unwrap().abs() <= bound + 1e-10);
    }

    #[test]
    fn float_and_exact_phases_agree(kind in 0u8..3, alpha in 0.2f64..0.9, n in 0u64..(1 << 30)) {
        let spec = WeierstrassSpec::new(base(kind), alpha, 2).unwrap();
        let ev = spec.evaluator(1e-10).unwrap();
        let x = n as f64 / (1u64 << 30) as f64;
        let exact = ev.eval_badic(n as u128, 30).unwrap();
        prop_assert!((ev.eval(x) - exact).abs() <= 1e-12);
    }

    #[test]
    fn modulus_respects_the_holder_bound(kind in 0u8..3, alpha in 0.1f64..0.95, r in 1e-9f64..1.0) {
        let spec = WeierstrassSpec::new(base(kind), alpha, 2).unwrap();
        let c = spec.holder_constant().unwrap();
        let w = spec.modulus(r);
        prop_assert!(w <= c * r.powf(alpha) * (1.0 + 1e-9));
        prop_assert!(spec.modulus(0.5 * r) <= w);
    }

    #[test]
    fn badic_shift_matches_scale(n in 0u64..(1 << 40), k in 0u32..48) {
        let x = BadicPoint::from_u64(n, 40, 2).unwrap();
        let (_, frac) = x.scale(k);
        prop_assert_eq!(x.shift(k).to_f64(), frac.to_f64());
        let expect = if k >= 40 { 0.0 } else { (n % (1u64 << (40 - k))) as f64 / (1u64 << (40 - k)) as f64 };
        prop_assert_eq!(x.shift(k).to_f64(), expect);
    }

    #[test]
    fn random_certificates_hold(seed in any::<u64>()) {
        let emb = build_family(0.5, 2, None).unwrap();
        let mut rng = rng_for(seed, stream::PAIRS, 0);
        let (x, y) = random_pair(&emb, &mut rng, 12, 3);
        let cert = proof_certificate(&emb, &x, &y).unwrap();
        prop_assert!(cert.verdict);
        prop_assert!(cert.checks.all());
        prop_assert!(cert.sound());
    }
}

#[test]
fn histogram_masses_sum_to_one_and_coarsen() {
    let spec = WeierstrassSpec::new(PeriodicFunction::triangle(), 0.6, 3).unwrap();
    let h = occupation_histogram(&spec, 1 << 12, 64, 5, 1e-10).unwrap();
    assert!((h.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(h.counts.iter().sum::<u64>(), 1 << 12);
    let c = h.coarsen(4).unwrap();
    assert_eq!(c.n_bins(), 16);
    for (k, &v) in c.counts.iter().enumerate() {
        assert_eq!(v, h.counts[4 * k..4 * k + 4].iter().sum::<u64>());
    }
    assert_eq!(h, occupation_histogram(&spec, 1 << 12, 64, 5, 1e-10).unwrap());
}

#[test]
fn exact_power_law_is_recovered() {
    let records: Vec<BoxCountRecord> = (0..12)
        .map(|m| BoxCountRecord { m, box_side: 3f64.powi(-(m as i32)), count: 9u64.pow(m), pruned: 0, certified: true })
        .collect();
    let fit = dimension_fit(&records, 3, 2, 11).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12);
    assert!(fit.stderr < 1e-9);
    assert!(dimension_fit(&records, 3, 5, 6).is_err());
}
