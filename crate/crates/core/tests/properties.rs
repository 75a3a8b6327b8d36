use std::cmp::Ordering;

use lorenz_hole::entropy::{pair_entropy, shift_entropy, KneadingDeterminant};
use lorenz_hole::kneading::{within, Admissibility};
use lorenz_hole::numeric::{MapParams, Side};
use lorenz_hole::oracle::{BoundAutomaton, Extreme};
use lorenz_hole::poly::Dyadic;
use lorenz_hole::survivor::{lower_self_admissible, survivor_shift, upper_self_admissible, weak_admissibilize, FlipKind};
use lorenz_hole::{EpSeq, HoleKneading, KneadingPair};
use proptest::prelude::*;

fn seq(s: &str) -> EpSeq {
    s.parse().unwrap()
}

fn bits(min: usize, max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..2u8, min..=max)
}

fn ep_seq() -> impl Strategy<Value = EpSeq> {
    (bits(0, 5), bits(1, 6)).prop_map(|(pre, per)| EpSeq::new(&pre, &per).unwrap())
}

fn periodic_led_by(lead: u8) -> impl Strategy<Value = EpSeq> {
    bits(0, 7).prop_map(move |mut w| {
        w.insert(0, lead);
        EpSeq::periodic(&w)
    })
}

fn ambient() -> impl Strategy<Value = KneadingPair> {
    prop::sample::select(vec![
        ("1(0)", "0(1)"),
        ("1(0)", "0(10)"),
        ("(100)", "(011)"),
        ("1(0)", "0(110)"),
        ("1(0)", "(0110010)"),
        ("1(0)", "(011001)"),
    ])
    .prop_map(|(p, m)| KneadingPair::new(seq(p), seq(m)).unwrap())
}

/// Realizable periodic hole `(a, b)` around the critical point.
fn hole() -> impl Strategy<Value = (KneadingPair, EpSeq, EpSeq)> {
    (ambient(), periodic_led_by(0), periodic_led_by(1)).prop_filter("realizable bounds", |(p, a, b)| {
        let (k0, k1) = (p.k0(), p.k1());
        within(a, &k0, &k1) && within(b, &k0, &k1) && a <= p.kminus() && b >= p.kplus()
    })
}

fn critical(a: &EpSeq, b: &EpSeq) -> HoleKneading {
    HoleKneading::around_critical(Some(a.clone()), Some(b.clone())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_is_total(x in ep_seq(), y in ep_seq(), z in ep_seq()) {
        prop_assert_eq!(x.cmp(&x), Ordering::Equal);
        prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
        if x <= y && y <= z {
            prop_assert!(x <= z);
        }
        prop_assert_eq!(x == y, x.first_difference(&y).is_none());
    }

    #[test]
    fn canonical_form_is_representation_free(pre in bits(0, 5), per in bits(1, 5), extra in 0usize..3) {
        let x = EpSeq::new(&pre, &per).unwrap();
        let mut unrolled = pre.clone();
        for _ in 0..extra {
            unrolled.extend_from_slice(&per);
        }
        let doubled: Vec<u8> = per.iter().chain(per.iter()).copied().collect();
        prop_assert_eq!(&EpSeq::new(&unrolled, &doubled).unwrap(), &x);
        prop_assert_eq!(&x.to_string().parse::<EpSeq>().unwrap(), &x);
    }

    #[test]
    fn shifts_compose(x in ep_seq(), m in 0usize..9, n in 0usize..9) {
        prop_assert_eq!(x.shift(m + n), x.shift(m).shift(n));
    }

    #[test]
    fn leading_symbol_decides(x in ep_seq(), y in ep_seq()) {
        let (x, y) = (EpSeq::prepend(&[0], &x), EpSeq::prepend(&[1], &y));
        prop_assert!(x < y);
    }

    #[test]
    fn between_is_strict(x in ep_seq(), y in ep_seq()) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        if let Ok(z) = EpSeq::strictly_between(&lo, &hi) {
            prop_assert!(lo < z && z < hi);
        }
    }

    #[test]
    fn complement_reverses_order(x in ep_seq(), y in ep_seq()) {
        prop_assert_eq!(x.cmp(&y), y.complement().cmp(&x.complement()));
    }

    #[test]
    fn truncations_are_self_admissible(l in ep_seq(), u in ep_seq()) {
        let mu = lower_self_admissible(&l);
        prop_assert!(mu.shifts().all(|s| s >= mu));
        let nu = upper_self_admissible(&u);
        prop_assert!(nu.shifts().all(|s| s <= nu));
    }

    #[test]
    fn survivor_pair_is_admissible((p, a, b) in hole()) {
        if let Ok(sh) = weak_admissibilize(&critical(&a, &b), &p) {
            let pair = sh.as_pair().expect("non-degenerate");
            prop_assert_ne!(pair.classify(), Admissibility::NotAdmissible);
        }
    }

    #[test]
    fn extremal_sequences_are_the_survivor_bounds((p, a, b) in hole()) {
        let h = critical(&a, &b);
        if let Ok(sh) = weak_admissibilize(&h, &p) {
            let (l, u) = h.constraint_bounds(&p);
            let aut = BoundAutomaton::build_bounds(&l, &u);
            prop_assert_eq!(aut.extremal(Extreme::Min).unwrap(), sh.s);
            prop_assert_eq!(aut.extremal(Extreme::Max).unwrap(), sh.t);
        }
    }

    #[test]
    fn flips_preserve_language((p, a, b) in hole()) {
        let h = critical(&a, &b);
        let Ok(sh) = weak_admissibilize(&h, &p) else { return Ok(()) };
        let (mut l, mut u) = h.constraint_bounds(&p);
        let mut stages = vec![(l.clone(), u.clone())];
        for f in &sh.flips {
            match f.kind {
                FlipKind::TruncateLower | FlipKind::RaiseLower => l = f.after.clone(),
                FlipKind::TruncateUpper | FlipKind::LowerUpper => u = f.after.clone(),
            }
            stages.push((l.clone(), u.clone()));
        }
        for w in stages.windows(2) {
            let before = BoundAutomaton::build_bounds(&w[0].0, &w[0].1);
            let after = BoundAutomaton::build_bounds(&w[1].0, &w[1].1);
            let depth = (2 * before.state_count()).min(48);
            for n in 1..=depth {
                prop_assert_eq!(before.count_words(n), after.count_words(n), "n={} {:?} -> {:?}", n, w[0], w[1]);
            }
        }
    }

    #[test]
    fn boundary_hole_is_equivalent(p in ambient(), b in periodic_led_by(1)) {
        prop_assume!(within(&b, &p.k0(), &p.k1()) && b >= *p.kplus());
        let h = HoleKneading::around_critical(None, Some(b)).unwrap();
        let moved = h.to_boundary(&p).unwrap();
        let (x, y) = (survivor_shift(&h, &p).unwrap(), survivor_shift(&moved, &p).unwrap());
        prop_assert_eq!(&x.s, &y.s);
        prop_assert_eq!(&x.t, &y.t);
        prop_assert_eq!(shift_entropy(&x), shift_entropy(&y));
    }

    #[test]
    fn entropy_bounds((p, a, b) in hole()) {
        let sh = survivor_shift(&critical(&a, &b), &p).unwrap();
        let h = shift_entropy(&sh).entropy;
        prop_assert!(h >= 0.0 && h <= 2f64.ln() + 1e-12);
        prop_assert!(h <= pair_entropy(&p).entropy + 1e-9);
    }

    #[test]
    fn larger_hole_never_gains_entropy((p, a, b) in hole(), b2 in periodic_led_by(1)) {
        prop_assume!(within(&b2, &p.k0(), &p.k1()));
        let (lo, hi) = if b <= b2 { (b, b2) } else { (b2, b) };
        let h = |x: &EpSeq| shift_entropy(&survivor_shift(&critical(&a, x), &p).unwrap()).entropy;
        prop_assert!(h(&hi) <= h(&lo) + 1e-9);
    }

    #[test]
    fn oracle_entropy_agrees((p, a, b) in hole()) {
        let h = critical(&a, &b);
        let sh = survivor_shift(&h, &p).unwrap();
        let (l, u) = h.constraint_bounds(&p);
        let aut = BoundAutomaton::build_bounds(&l, &u);
        if aut.state_count() <= 64 && !sh.degenerate {
            prop_assert!((shift_entropy(&sh).entropy - aut.entropy_estimate()).abs() <= 1e-3);
        }
    }

    #[test]
    fn series_sign_matches_closed_form(kp in ep_seq(), km in ep_seq(), k in 1u64..16) {
        let (kp, km) = (EpSeq::prepend(&[1], &kp), EpSeq::prepend(&[0], &km));
        let det = KneadingDeterminant::new(&kp, &km);
        let t = Dyadic::new(k, 4);
        let depth = 4 * (kp.pre_len() + kp.per_len() + km.pre_len() + km.per_len());
        let tf = t.to_f64();
        let exact = det.numerator.eval_f64(tf) / det.denominator().eval_f64(tf);
        // The tail of the series is at most t^depth / (1 - t) in absolute value.
        let tail = tf.powi(depth as i32) / (1.0 - tf);
        prop_assume!(exact.abs() > 2.0 * tail + 1e-9);
        let series = KneadingDeterminant::truncated_series(&kp, &km, depth, tf);
        prop_assert_eq!(det.numerator.sign_at(&t), if series > 0.0 { Ordering::Greater } else { Ordering::Less });
    }

    #[test]
    fn counts_are_submultiplicative(l in ep_seq(), u in ep_seq(), m in 1usize..12, n in 1usize..12) {
        let aut = BoundAutomaton::build_bounds(&l, &u);
        prop_assert!(aut.count_words(m + n) <= aut.count_words(m) * aut.count_words(n));
        let c = aut.count_words(m + n);
        if c > 0u32.into() {
            let growth = (c.bits() as f64) * 2f64.ln() / (m + n) as f64;
            // log count(n) / n never drops below the entropy; bits() overestimates by < 1 bit.
            prop_assert!(growth + 1e-9 >= aut.entropy_estimate());
        }
    }

    #[test]
    fn acceptance_matches_inequalities((p, a, b) in hole(), w in ep_seq()) {
        let h = critical(&a, &b);
        let (l, u) = h.constraint_bounds(&p);
        let aut = BoundAutomaton::build_bounds(&l, &u);
        prop_assert_eq!(aut.accepts(&w), within(&w, &l, &u));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn itinerary_shift_compatible(num in 0u64..10_000, bi in 0usize..5, ai in 0usize..5, d in 2usize..40) {
        let beta = 1.5 + 0.1 * bi as f64;
        let alpha = (2.0 - beta) * ai as f64 / 4.0;
        let p = MapParams::new(&format!("{beta:.1}"), &format!("{alpha:.3}"), 50).unwrap();
        let x = p.ratio(num, 9_999);
        let long = p.itinerary(&x, d + 1, Side::None);
        let short = p.itinerary(&p.map_eval(&x), d, Side::None);
        prop_assume!(!long.ambiguous && !short.ambiguous);
        prop_assert_eq!(&long.word.as_slice()[1..], short.word.as_slice());
    }

    #[test]
    fn simulated_survivors_are_oracle_words(ka in 1u64..32, kb in 33u64..64) {
        let p = MapParams::new("2", "0", 50).unwrap();
        let (a, b) = (p.ratio(ka, 64), p.ratio(kb, 64));
        let al = p.complete_itinerary(&a, 64, Side::Minus).unwrap();
        let bu = p.complete_itinerary(&b, 64, Side::Plus).unwrap();
        let h = critical(&al, &bu);
        let (l, u) = h.constraint_bounds(&KneadingPair::full_shift());
        let aut = BoundAutomaton::build_bounds(&l, &u);
        let n = 1000;
        let report = p.escape_survivors(ka as f64 / 64.0, kb as f64 / 64.0, n, 60);
        // The constraint form leaves out the fixed points 0 and 1, which survive every
        // hole around c; on this grid they have no other preimages.
        for x in report.survivors.into_iter().filter(|&x| x != 0.0 && x != 1.0) {
            let i = (x * (n - 1) as f64).round() as u64;
            let word = p.itinerary(&p.ratio(i, (n - 1) as u64), 12, Side::None).word;
            prop_assert!(aut.accepts_word(word.as_slice()), "x={} word={}", x, word);
        }
    }
}
