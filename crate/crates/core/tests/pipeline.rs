//! Drives the full exact pipeline through the public API only — the way
//! a downstream consumer would: parse, enumerate, measure, cross-check.

use wordmeas_core::fringe::{enumerate_fringe, q_m, FringeConfig};
use wordmeas_core::measures::{
    chi_report, length_bounds, n_power, primitivity_rank, surface_test, trace_rational, Bound,
    Chi, Orientation, Pi,
};
use wordmeas_core::sampler::{estimate_trace, exhaustive_trace, GroupSpec, DEFAULT_ORACLE_CAP};
use wordmeas_core::words::Word;
use wordmeas_core::{Int, Modulus, Rational};

#[test]
fn a_word_travels_the_whole_pipeline() {
    let cfg = FringeConfig::default();
    // x y^2 x^-1 y: cyclically reduces to itself, mixes signs, rank 2.
    let w = Word::parse("xyyXy", None).unwrap();

    let fringe = enumerate_fringe(&w, &cfg).unwrap();
    assert!(!fringe.is_empty());
    assert!(fringe.iter().all(|el| el.graph.rank() >= 1));

    // Exponent vector (1 - 1, 2 + 1) = (0, 3): the word lies in K_3(F_2)
    // ambiently, so the full bouquet must survive the m = 3 filter.
    let q3 = q_m(&w, Modulus::Finite(3), &cfg).unwrap();
    assert!(q3.iter().any(|el| el.graph.num_vertices() == 1));

    let t3 = trace_rational(&w, Modulus::Finite(3), &cfg).unwrap();
    let report = chi_report(&w, Modulus::Finite(3), &cfg).unwrap();
    assert_eq!(report.trace, t3);
    let chi = match report.chi {
        Chi::Finite(v) => v,
        Chi::MinusInfinity => panic!("Q_3 is nonempty"),
    };
    assert_eq!(chi, 1 - report.witnesses[0].rank as i64);

    // Exhaustive cross-check at the smallest valid dimensions.
    for n in t3.n_min()..=3 {
        let brute = exhaustive_trace(&w, Modulus::Finite(3), n as u32, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(t3.evaluate_at(n).unwrap(), brute);
    }

    // Monte-Carlo cross-check of the S_N expectation at N = 4.
    let t1 = trace_rational(&w, Modulus::Finite(1), &cfg).unwrap();
    let exact = t1.evaluate_at(4).unwrap();
    let exact_f = exact.numer().to_string().parse::<f64>().unwrap()
        / exact.denom().to_string().parse::<f64>().unwrap();
    let est = estimate_trace(&w, "sym:4".parse::<GroupSpec>().unwrap(), 60_000, 13).unwrap();
    assert!((est.mean.re - exact_f).abs() <= 4.0 * est.stderr_re.max(1e-6));

    // Invariants tie together: pi from the m = 1 trace, bounds from chi.
    let (pi, _) = primitivity_rank(&w, &cfg).unwrap();
    assert!(matches!(pi, Pi::Finite(p) if p >= 1));
    let bounds = length_bounds(&w, &cfg).unwrap();
    assert!(matches!(
        bounds.mixed_lower,
        Bound::AtLeast(_) | Bound::Infinite
    ));
}

#[test]
fn surface_words_pass_their_own_battery_and_nothing_leaks_below_rank() {
    let cfg = FringeConfig::default();
    let commutator = Word::parse("xyXY", None).unwrap();
    let verdict = surface_test(&commutator, 1, Orientation::Orientable, None, &cfg).unwrap();
    assert!(verdict.consistent);

    // The commutator trace is N^{-1} on every phase group at once.
    for m in [Modulus::Finite(2), Modulus::Finite(5), Modulus::Infinity] {
        assert_eq!(trace_rational(&commutator, m, &cfg).unwrap(), n_power(-1));
    }
}

#[test]
fn rationals_survive_a_round_trip_through_display() {
    let cfg = FringeConfig::default();
    let w = Word::parse("xxyyyxxY", None).unwrap();
    let f = trace_rational(&w, Modulus::Finite(2), &cfg).unwrap();
    assert_eq!(f.num().to_string(), "3N - 4");
    assert_eq!(f.den().to_string(), "N^2 - N");
    assert_eq!(
        f.evaluate_at(5).unwrap(),
        Rational::new(Int::from(11), Int::from(20))
    );
}
