use kbeta::harness::*;
use kbeta::{Error, Execution};

fn first(k: f64, phi: &[f64], a: f64, b: f64, eta: f64, zeta: f64) -> Params {
    Params::first_kind(k, phi.to_vec(), a, b, eta, zeta)
}

fn second(k: f64, phi: &[f64], p: &[f64], q: &[f64], eta: &[f64], zeta: &[f64]) -> Params {
    Params::second_kind(
        k,
        phi.to_vec(),
        p.to_vec(),
        q.to_vec(),
        eta.to_vec(),
        zeta.to_vec(),
    )
}

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn passes(case: &TheoremCase) {
    assert_eq!(case.verdict, Verdict::Pass, "{case:#?}");
    assert!(
        case.links.iter().all(|l| l.verdict == Verdict::Pass),
        "{case:#?}"
    );
}

fn not_failed(case: &TheoremCase) {
    assert_ne!(case.verdict, Verdict::Fail, "{case:#?}");
    assert!(case.diagnostic.is_none(), "{case:#?}");
}

/// Checks `params` as stated and mirrored; the mirror must fail.
fn pass_and_flip(id: TheoremId, params: Params) {
    passes(&check(id, params.clone(), &opts()));
    let flipped = check(id, params, &opts().flipped());
    assert_eq!(flipped.verdict, Verdict::Fail, "{flipped:#?}");
}

#[test]
fn cauchy_schwarz() {
    let same = first(1.3, &[1.2, 0.8], 1.0, 2.0, 0.7, 0.4).with_psi(vec![1.2, 0.8]);
    let case = check_cauchy_schwarz(same, &opts());
    not_failed(&case);
    assert!(case.link("log_convexity").unwrap().margin.abs() < 1e-9);
    let p = first(1.0, &[1.0, 2.0], 1.0, 1.0, 1.0, 0.0).with_psi(vec![2.0, 1.0]);
    pass_and_flip(TheoremId::CauchySchwarz, p);
}

#[test]
fn second_kind_convexity() {
    let p = second(
        1.2,
        &[1.0, 2.5],
        &[0.8, 1.4],
        &[1.9, 2.0],
        &[0.9, 1.3],
        &[0.5, 0.2],
    )
    .with_psi(vec![2.2, 0.6]);
    pass_and_flip(TheoremId::SecondConvex, p);
}

#[test]
fn sandwich() {
    let case = check_sandwich(first(1.0, &[2.0, 2.0], 1.0, 2.0, 1.0, 0.0), &opts());
    not_failed(&case);
    assert!(case.link("convex_lower").unwrap().margin.abs() < 1e-9);
    pass_and_flip(
        TheoremId::Sandwich,
        first(1.0, &[2.0, 2.0], 1.0, 2.0, 1.0, 0.4),
    );
    let wide = check_sandwich(first(1.0, &[2.0, 2.0], 1.0, 2.0, 0.5, 3.0), &opts());
    assert_ne!(wide.link("convex_lower").unwrap().verdict, Verdict::Fail);
    not_failed(&wide);
}

#[test]
fn sandwich_unit_shift_also_holds() {
    let o = CheckOptions {
        shift: Shift::Unit,
        ..opts()
    };
    passes(&check_sandwich(
        first(1.0, &[2.0, 2.0], 1.0, 2.0, 1.0, 0.4),
        &o,
    ));
}

#[test]
fn tangent_lower() {
    let near = check_tangent_lower(first(1.0, &[3.0, 3.0], 1.0, 2.0, 1e-3, 0.0), &opts());
    not_failed(&near);
    assert!(near.margin.abs() < 1e-2);
    pass_and_flip(
        TheoremId::TangentLower,
        first(1.0, &[3.0, 3.0], 1.0, 2.0, 1.0, 1.0),
    );
}

#[test]
fn upper_refinement() {
    not_failed(&check_upper_refinement(
        first(1.0, &[2.0, 2.0], 1.0, 3.0, 1e-3, 0.0),
        &opts(),
    ));
    let full = first(1.0, &[2.0, 2.0], 1.0, 3.0, 1.5, 1.0);
    let case = check_upper_refinement(full.clone(), &opts());
    passes(&case);
    assert!(case.link("am_gm").is_some() && case.link("unit").is_some());
    pass_and_flip(TheoremId::UpperRefinement, full);
    let k2 = check_upper_refinement(first(2.0, &[2.0, 2.0], 1.0, 3.0, 1.5, 1.0), &opts());
    passes(&k2);
    assert_eq!(k2.links.len(), 1);
}

#[test]
fn moment_upper() {
    // the moment exists only for z < a
    let p = first(1.0, &[2.0, 2.0], 1.5, 2.5, 1.0, 0.0).with_z(vec![1.0]);
    pass_and_flip(TheoremId::MomentUpper, p);
    let p = first(1.4, &[1.1, 2.6], 0.9, 2.0, 0.8, 0.0).with_z(vec![0.6]);
    passes(&check_moment_upper(p, &opts()));
}

#[test]
fn lower_exp() {
    let collapse = check_lower_exp(first(1.0, &[2.0, 2.0], 1.5, 1.5, 1.0, 0.0), &opts());
    not_failed(&collapse);
    assert!(collapse.margin.abs() < 1e-9);
    pass_and_flip(
        TheoremId::LowerExp,
        first(1.0, &[2.0, 2.0], 1.0, 2.0, 1.0, 0.5),
    );
    let o = CheckOptions {
        method: MethodChoice::MonteCarlo { samples: 100_000 },
        ..opts()
    };
    not_failed(&check_lower_exp(
        first(1.0, &[2.0, 1.5, 2.5], 1.0, 2.0, 1.0, 0.5),
        &o,
    ));
}

#[test]
fn moment_lower_exp() {
    let p = first(1.0, &[2.0, 2.0], 1.5, 2.5, 1.0, 0.7).with_z(vec![1.0]);
    pass_and_flip(TheoremId::MomentLowerExp, p);
    let collapse = first(1.2, &[1.6, 2.1], 1.3, 1.3, 0.9, 0.6).with_z(vec![0.8]);
    passes(&check_moment_lower_exp(collapse, &opts()));
}

#[test]
fn lower_hyp() {
    let at_zero = check_lower_hyp(first(1.0, &[2.0, 3.0], 1.0, 1.0, 1.0, 0.0), &opts());
    not_failed(&at_zero);
    pass_and_flip(
        TheoremId::LowerHyp,
        first(1.0, &[2.0, 3.0], 1.0, 2.0, 1.0, 1.0),
    );
    let with_moment = first(1.0, &[2.0, 3.0], 1.5, 2.5, 1.0, 1.0).with_z(vec![1.0]);
    let case = check_lower_hyp(with_moment, &opts());
    passes(&case);
    assert!(case.link("moment").is_some());
}

#[test]
fn second_upper() {
    passes(&check_second_upper(
        second(
            1.0,
            &[2.0, 2.0],
            &[1.0, 1.0],
            &[1.0, 1.0],
            &[1.0, 1.0],
            &[0.0, 0.0],
        ),
        &opts(),
    ));
    let p = second(
        1.0,
        &[2.0, 2.0],
        &[1.0, 1.0],
        &[2.0, 2.0],
        &[1.0, 1.0],
        &[0.5, 0.5],
    );
    pass_and_flip(TheoremId::SecondUpper, p);
}

#[test]
fn second_lower() {
    // at ζ = 0 both bounds coincide, so only the order link is an equality
    let at_zero = check_second_lower(
        second(
            1.0,
            &[2.0, 2.0],
            &[1.0, 1.0],
            &[2.0, 2.0],
            &[1.0, 1.0],
            &[0.0, 0.0],
        ),
        &opts(),
    );
    not_failed(&at_zero);
    assert_eq!(at_zero.link("lower").unwrap().verdict, Verdict::Pass);
    assert_eq!(at_zero.link("refinement_order").unwrap().margin, 0.0);
    let refined = second(
        1.0,
        &[2.0, 2.0],
        &[1.0, 1.0],
        &[2.0, 2.0],
        &[2.0, 2.0],
        &[1.0, 1.0],
    );
    let case = check_second_lower(refined.clone(), &opts());
    passes(&case);
    let (plain, refined_rhs) = (case.link("lower").unwrap(), case.link("refined").unwrap());
    assert!(refined_rhs.lhs.value >= plain.lhs.value);
    pass_and_flip(TheoremId::SecondLower, refined);
}

#[test]
fn second_moments() {
    let p = second(
        1.0,
        &[2.0, 2.0],
        &[1.5, 1.5],
        &[2.5, 2.5],
        &[1.0, 1.0],
        &[0.5, 0.5],
    )
    .with_z(vec![1.0, 1.0]);
    pass_and_flip(TheoremId::SecondMoments, p);
    let collapse = second(
        1.0,
        &[2.0, 2.0],
        &[1.5, 1.5],
        &[1.5, 1.5],
        &[1.0, 0.8],
        &[0.5, 0.3],
    )
    .with_z(vec![1.0, 1.0]);
    passes(&check_second_moments(collapse, &opts()));
}

#[test]
fn second_lower_hyp() {
    let at_zero = second(
        1.0,
        &[2.0, 2.0],
        &[1.0, 0.7],
        &[2.0, 1.5],
        &[1.0, 1.2],
        &[0.0, 0.0],
    );
    not_failed(&check_second_lower_hyp(at_zero, &opts()));
    let p = second(
        1.3,
        &[1.4, 2.7],
        &[0.6, 1.9],
        &[1.7, 2.3],
        &[0.8, 1.6],
        &[1.2, 0.4],
    );
    pass_and_flip(TheoremId::SecondLowerHyp, p);
}

#[test]
fn budget_overrun_is_inconclusive() {
    let p = first(1.0, &[2.0, 2.0], 1.5, 2.5, 1.0, 0.0).with_z(vec![1.0]);
    let case = check_moment_upper(
        p,
        &CheckOptions {
            budget: 50,
            ..opts()
        },
    );
    assert_eq!(case.verdict, Verdict::Inconclusive);
    assert!(case.diagnostic.unwrap().contains("budget"));
}

#[test]
fn missing_parameters_are_inconclusive() {
    let p = second(
        1.0,
        &[2.0, 2.0],
        &[1.0, 1.0],
        &[2.0, 2.0],
        &[1.0, 1.0],
        &[0.5, 0.5],
    );
    let case = check_sandwich(p, &opts());
    assert_eq!(case.verdict, Verdict::Inconclusive);
    assert!(case.diagnostic.is_some());
}

#[test]
fn sampling_respects_config() {
    let cfg = SuiteConfig {
        zeta_range: (0.0, 0.0),
        ..SuiteConfig::default()
    };
    for trial in 0..20 {
        let mut rng = trial_rng(1, TheoremId::Sandwich, trial);
        let p = sample_params(TheoremId::Sandwich, &cfg, &mut rng).unwrap();
        assert_eq!(p.first.unwrap().zeta, 0.0);
        let mut rng = trial_rng(1, TheoremId::SecondLower, trial);
        let p = sample_params(TheoremId::SecondLower, &cfg, &mut rng).unwrap();
        assert!(p.second.unwrap().zeta.iter().all(|&z| z == 0.0));
    }
}

#[test]
fn sampling_is_deterministic() {
    let cfg = SuiteConfig::default();
    for id in TheoremId::ALL {
        let a = sample_params(id, &cfg, &mut trial_rng(42, id, 3)).unwrap();
        let b = sample_params(id, &cfg, &mut trial_rng(42, id, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_params(id, &cfg, &mut trial_rng(42, id, 4)).unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn sampled_parameters_satisfy_hypotheses() {
    let cfg = SuiteConfig::default();
    for trial in 0..50 {
        let p = sample_params(
            TheoremId::TangentLower,
            &cfg,
            &mut trial_rng(0, TheoremId::TangentLower, trial),
        )
        .unwrap();
        assert!(p.phi.iter().all(|&f| f > p.k));
        let p = sample_params(
            TheoremId::UpperRefinement,
            &cfg,
            &mut trial_rng(0, TheoremId::UpperRefinement, trial),
        )
        .unwrap();
        let f = p.first.unwrap();
        assert!(f.eta.powf(2.0 * p.k) >= p.k * f.zeta.powf(p.k));
        let p = sample_params(
            TheoremId::SecondMoments,
            &cfg,
            &mut trial_rng(0, TheoremId::SecondMoments, trial),
        )
        .unwrap();
        let s = p.second.unwrap();
        for i in 0..2 {
            assert!(p.z[i] < s.p[i] && 2.0 * p.z[i] < s.p[i] + p.phi[i]);
        }
    }
}

#[test]
fn empty_region_is_a_config_error() {
    let cfg = SuiteConfig {
        k_range: (2.0, 2.0),
        phi_range: (0.2, 1.0),
        ..SuiteConfig::default()
    };
    let r = sample_params(
        TheoremId::TangentLower,
        &cfg,
        &mut trial_rng(0, TheoremId::TangentLower, 0),
    );
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn suite_configuration() {
    let r = run_suite(&SuiteConfig {
        trials: 0,
        ..SuiteConfig::default()
    })
    .unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.cases.is_empty());
    assert!(matches!(
        run_suite(&SuiteConfig {
            slack: -1.0,
            ..SuiteConfig::default()
        }),
        Err(Error::Config(_))
    ));
    assert!(run_suite(&SuiteConfig {
        n_values: vec![],
        ..SuiteConfig::default()
    })
    .is_err());
    assert!(run_suite(&SuiteConfig {
        k_range: (2.0, 1.0),
        ..SuiteConfig::default()
    })
    .is_err());
}

#[test]
fn suite_is_reproducible_and_schedule_independent() {
    let base = SuiteConfig {
        trials: 3,
        seed: 17,
        theorems: vec![
            TheoremId::Sandwich,
            TheoremId::SecondLower,
            TheoremId::MomentLowerExp,
        ],
        ..SuiteConfig::default()
    };
    let seq = run_suite(&SuiteConfig {
        execution: Execution::Sequential,
        ..base.clone()
    })
    .unwrap();
    let par = run_suite(&SuiteConfig {
        execution: Execution::Parallel,
        ..base.clone()
    })
    .unwrap();
    assert_eq!(seq, par);
    assert_eq!(
        serde_json::to_string(&seq).unwrap(),
        serde_json::to_string(&par).unwrap()
    );
    for s in &seq.summaries {
        assert_eq!(s.trials, 3);
        assert_eq!(s.passes + s.fails + s.inconclusives, s.trials);
    }
    assert_eq!(seq.fails(), 0);
}
