use super::*;
use crate::ratpoly::{int, rat};
use proptest::prelude::*;

fn triangle() -> HRep {
    HRep::parse("3 2\n-1 -1 0\n-1 0 -1\n3 1 1\n").unwrap()
}

fn table_poly() -> Polynomial {
    // -5(x1^2-2)^2 - 7(x2^2-2)^2 + 20
    Polynomial::parse("d 2\n-5 4 0\n20 2 0\n-7 0 4\n28 0 2\n-28 0 0\n").unwrap()
}

fn interval() -> HRep {
    HRep::from_box(&[(rat(-1, 4), rat(1, 4))]).unwrap()
}

fn close(d: &Decimal, target: f64, tol: f64) -> bool {
    let v: f64 = d.to_string().parse().unwrap();
    (v - target).abs() <= tol
}

#[test]
fn whole_polynomial_lipschitz() {
    let l = lipschitz(&table_poly(), &int(2), LipschitzMethod::WholePolynomial).unwrap();
    assert_eq!(l.value, int(3584));
}

#[test]
fn per_monomial_lipschitz() {
    let l = lipschitz(&table_poly(), &int(2), LipschitzMethod::PerMonomial).unwrap();
    assert_eq!(l.value, int(160 + 80 + 224 + 112));
    let sq = Polynomial::parse("d 1\n1 2\n").unwrap();
    for method in [LipschitzMethod::WholePolynomial, LipschitzMethod::PerMonomial] {
        assert_eq!(lipschitz(&sq, &int(1), method).unwrap().value, int(2));
        let c = Polynomial::constant(2, int(9));
        assert_eq!(lipschitz(&c, &int(5), method).unwrap().value, int(0));
    }
}

#[test]
fn lower_bound_of_interval_instance() {
    let f = Polynomial::parse("d 1\n-10 2\n2 0\n").unwrap();
    let l = lower_bound(&interval(), &f, 1, 6).unwrap();
    assert_eq!(l.lk_pow_k, rat(43, 24));
    assert_eq!(l.l_k.to_string(), "1.791666");
}

#[test]
fn constant_integrand_is_exact() {
    let c = Polynomial::constant(2, int(5));
    for k in 1..4 {
        let l = lower_bound(&triangle(), &c, k, 12).unwrap();
        assert_eq!(l.lk_pow_k, int(5).pow(k as i32));
        assert_eq!(l.l_k.to_rational(), int(5));
    }
}

#[test]
fn table_lower_and_upper_at_k10() {
    let mean = power_mean(&triangle(), &table_poly(), 10).unwrap();
    let l = lower_from_mean(mean.clone(), 10, 12).unwrap();
    assert!(close(&l.l_k, 17.12, 0.005), "{}", l.l_k);
    let u = upper_from_mean(&mean, 2, 10, &int(536), &int(1), None, 12).unwrap();
    assert!(close(&u.u_k, 47.69, 0.005), "{}", u.u_k);
    assert_eq!(u.gamma, rat(1, 6));
    assert!(rational_pow(&l.l_k.to_rational(), 10) <= l.lk_pow_k);
    assert!(rational_pow(&u.u_k.to_rational(), 12) >= u.uk_pow_dk);
}

#[test]
fn gamma_exponent_identity() {
    let mean = rat(7, 3);
    let u = upper_from_mean(&mean, 2, 2, &int(3), &int(1), None, 8).unwrap();
    assert_eq!(u.gamma, rat(1, 2));
    assert_eq!(u.uk_pow_dk, &mean * int(9) * int(4) * int(4));
}

#[test]
fn upper_bound_rejects_nonpositive_constants() {
    assert!(matches!(
        upper_from_mean(&int(1), 1, 1, &int(0), &int(1), None, 4),
        Err(Error::NonPositive { .. })
    ));
    assert!(matches!(
        upper_from_mean(&int(1), 1, 1, &int(1), &int(-1), None, 4),
        Err(Error::NonPositive { .. })
    ));
}

#[test]
fn k0_flag() {
    let u = upper_from_mean(&int(1), 2, 3, &int(1), &int(1), Some(&int(10)), 4).unwrap();
    assert_eq!(u.k0, Some(int(18)));
    assert!(!u.above_k0());
    let u = upper_from_mean(&int(1), 2, 30, &int(1), &int(1), Some(&int(10)), 4).unwrap();
    assert!(u.above_k0());
}

fn one_decimal(c: &Rational) -> String {
    Decimal::nearest(c, 1).to_string()
}

#[test]
fn k_chooser_components() {
    let params = KChooserParams::new(rat(1, 10), int(27));
    let choice = choose_k(&params, 2, &int(1), &int(536)).unwrap();
    assert_eq!(one_decimal(&choice.components[0]), "-1.9");
    assert_eq!(one_decimal(&choice.components[1]), "62.0");
    assert_eq!(one_decimal(&choice.components[2]), "197.2");
    let c4: f64 = Decimal::nearest(&choice.components[3], 1).to_string().parse().unwrap();
    assert!((c4 - 434.2).abs() < 0.5, "{c4}");
    assert_eq!(choice.k, 435);
}

#[test]
fn k_chooser_log_clamp() {
    let params = KChooserParams::new(int(1), int(536));
    let choice = choose_k(&params, 2, &int(1), &int(536)).unwrap();
    assert_eq!(choice.components[2], int(0));
    assert_eq!(choice.components[0], int(0));
    // 2 / (2^{1/3} - 1) = 7.6946...
    assert_eq!(one_decimal(&choice.components[1]), "7.7");
}

#[test]
fn k_chooser_is_monotone_in_epsilon() {
    let ks: Vec<u64> = [1, 2, 4]
        .iter()
        .map(|&e| {
            choose_k(&KChooserParams::new(int(e), int(536)), 2, &int(1), &int(536))
                .unwrap()
                .k
        })
        .collect();
    assert!(ks.windows(2).all(|w| w[0] >= w[1]), "{ks:?}");
    // the fourth component dominates once the log term vanishes
    let c = choose_k(&KChooserParams::new(int(1), int(536)), 2, &int(1), &int(536)).unwrap();
    assert!(c.components[3] > c.components[1]);
}

#[test]
fn simplex_constants() {
    assert_eq!(shift_quality_constant(2), BigInt::from(12));
    assert_eq!(shift_quality_constant(1), BigInt::from(1));
    assert_eq!(shift_quality_factor(3, 7).unwrap(), rat(3, 4));
}

#[test]
fn simplex_shift_quality_on_unit_triangle() {
    let p = HRep::unit_simplex(2).unwrap();
    let f = Polynomial::parse("d 2\n1 1 1\n-1 1 0\n").unwrap();
    let q = simplex_shift_quality(&p, &f, 2).unwrap();
    assert_eq!(q.t, 3);
    assert_eq!(q.constant, BigInt::from(12));
    assert_eq!(q.factor, rat(1, 2));
    assert_eq!(q.epsilon_prime(&rat(1, 10)), rat(1, 240));
    // f_min = -1 at (1, 0), so s ≥ 1; f_max ≤ 0
    assert!(q.shift >= int(1));
    assert!(&q.shift - int(1) <= q.bound_factor() * int(1));
    assert!(matches!(
        simplex_shift_quality(&HRep::unit_box(2).unwrap(), &f, 2),
        Err(Error::NotSimplex { facets: 4, dim: 2 })
    ));
}

/// `∫_{-1}^{1}` of a univariate polynomial, termwise.
fn interval_oracle(f: &Polynomial) -> Rational {
    f.terms().fold(Rational::zero(), |acc, (m, c)| {
        let e = m.exponents()[0];
        if e % 2 == 1 {
            acc
        } else {
            acc + c * rat(2, e as i64 + 1)
        }
    })
}

#[test]
fn pipeline_handelman_square() {
    let p = HRep::from_box(&[(int(-1), int(1))]).unwrap();
    let f = Polynomial::parse("d 1\n1 2\n-1 1\n").unwrap();
    let options = PipelineOptions {
        backend: BackendKind::Handelman,
        t: Some(2),
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&p, &f, &KSpec::Fixed(2), &options).unwrap();
    assert_eq!(report.shift, int(1));
    let g = f.clone() + Polynomial::constant(1, int(1));
    let expected = interval_oracle(&g.pow(2));
    assert_eq!(expected, rat(22, 5));
    assert_eq!(report.lower.lk_pow_k, expected / int(2));
    let lf = run_pipeline(
        &p,
        &f,
        &KSpec::Fixed(2),
        &PipelineOptions {
            t: Some(2),
            ..PipelineOptions::default()
        },
    )
    .unwrap();
    assert_eq!(lf.lower.lk_pow_k, report.lower.lk_pow_k);
    assert_eq!(
        lf.upper.as_ref().unwrap().uk_pow_dk,
        report.upper.as_ref().unwrap().uk_pow_dk
    );
    assert!(report.to_key_values().contains("backend=handelman\n"));
}

#[test]
fn pipeline_constant_without_shift() {
    let f = Polynomial::constant(2, int(5));
    let options = PipelineOptions {
        shift: ShiftMode::None,
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&triangle(), &f, &KSpec::Fixed(3), &options).unwrap();
    assert_eq!(report.lower.l_k.to_rational(), int(5));
    assert!(report.upper.is_none());
    assert!(report.valid());
    assert!(report.to_table().contains("n/a"));
    let eps = run_pipeline(&triangle(), &f, &KSpec::epsilon(rat(1, 10)), &options).unwrap();
    assert_eq!(eps.k, 1);
}

#[test]
fn pipeline_rejects_handelman_without_shift() {
    let options = PipelineOptions {
        shift: ShiftMode::None,
        backend: BackendKind::Handelman,
        ..PipelineOptions::default()
    };
    assert!(run_pipeline(&triangle(), &table_poly(), &KSpec::Fixed(2), &options).is_err());
}

#[test]
fn pipeline_with_given_lipschitz_reports_table_row() {
    let options = PipelineOptions {
        shift: ShiftMode::None,
        lipschitz: Some(int(536)),
        upper: Some(int(27)),
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&triangle(), &table_poly(), &KSpec::Fixed(10), &options).unwrap();
    assert!(close(&report.lower.l_k, 17.12, 0.005));
    assert!(close(&report.upper.as_ref().unwrap().u_k, 47.69, 0.005));
    assert!(report.valid());
    let kv = report.to_key_values();
    for key in [
        "k=10\n",
        "M=1\n",
        "lipschitz=536\n",
        "gamma_k=1/6\n",
        "s=0\n",
        "t=none\n",
    ] {
        assert!(kv.contains(key), "{key} missing from\n{kv}");
    }
    let table = render_table(&[report]);
    assert!(table.lines().nth(1).unwrap().trim_start().starts_with("10  17.1"));
}

#[test]
fn pipeline_epsilon_mode_records_choice() {
    let f = Polynomial::parse("d 1\n-1 2\n1 0\n").unwrap();
    let p = HRep::from_box(&[(int(-1), int(1))]).unwrap();
    let options = PipelineOptions {
        shift: ShiftMode::None,
        upper: Some(int(1)),
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&p, &f, &KSpec::epsilon(int(1)), &options).unwrap();
    let choice = report.choice.clone().unwrap();
    assert_eq!(u64::from(report.k), choice.k);
    assert!(report.lower.l_k.to_rational() <= int(1));
    assert!(report.upper.unwrap().u_k.to_rational() >= int(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn bounds_bracket_the_maximum(a in -3i64..=3, b in -3i64..=3, k in 1u32..6) {
        // f = 4 - a x - b y + x y on [0,1]^2 is positive; its max sits at a vertex
        let p = HRep::unit_box(2).unwrap();
        let f = Polynomial::from_terms(2, [
            (vec![0, 0], int(4)), (vec![1, 0], int(-a)), (vec![0, 1], int(-b)), (vec![1, 1], int(1)),
        ]).unwrap();
        let f_max = p.vertices().iter().map(|v| f.eval(&v.point).unwrap()).max().unwrap();
        let options = PipelineOptions { shift: ShiftMode::None, ..PipelineOptions::default() };
        let r = run_pipeline(&p, &f, &KSpec::Fixed(k), &options).unwrap();
        prop_assert!(r.lower.l_k.to_rational() <= f_max);
        prop_assert!(rational_pow(&r.lower.l_k.to_rational(), k) <= r.lower.lk_pow_k);
        let u = r.upper.clone().unwrap();
        prop_assert!(rational_pow(&u.u_k.to_rational(), k + 2) >= u.uk_pow_dk);
        if r.valid() {
            prop_assert!(u.u_k.to_rational() >= f_max);
        }
    }
}
