use std::sync::Arc;

use copula_dep::evc::{
    builtin_pickands, cap_function, classify_evc, construct_witness_constant, evc_kernel, validate_pickands, EvcBranch,
    PickandsFamily, PickandsInput, PickandsSpec,
};
use copula_dep::{GridConfig, Label, Status, Witness};

const S: f64 = 2.0 / 7.0;
const K: f64 = 0.1 / 0.36;

/// Piecewise Pickands function with `F_A = 0` on `[0, 0.3)`, `F_A = 0.9` on
/// `[0.3, 0.4]` and strictly increasing afterwards.
fn plateau_a(t: f64) -> f64 {
    if t <= 0.3 {
        1.0 - t
    } else if t <= 0.4 {
        0.7 + S * (t - 0.3)
    } else {
        let x = t - 0.4;
        0.7 + S * 0.1 + S * x + K * x * x
    }
}

fn plateau_da(t: f64) -> f64 {
    if t < 0.3 {
        -1.0
    } else if t < 0.4 {
        S
    } else {
        S + 2.0 * K * (t - 0.4)
    }
}

fn plateau_spec() -> PickandsSpec {
    let mut input = PickandsInput::new(Label::new("plateau-fixture"), Arc::new(plateau_a));
    input.d_plus_a = Some(Arc::new(plateau_da));
    input.jumps = Some(vec![0.3]);
    validate_pickands(input).unwrap()
}

fn ratio_of(w: &Witness) -> f64 {
    let Witness::Rect { rect, .. } = w else {
        panic!("expected a rectangle")
    };
    // recompute independently of the stored values
    let s = plateau_spec();
    let k = |u, v| evc_kernel(&s, u, v);
    k(rect.u1, rect.v1) * k(rect.u2, rect.v2) / (k(rect.u1, rect.v2) * k(rect.u2, rect.v1))
}

#[test]
fn plateau_fixture_is_a_valid_pickands_function() {
    let s = plateau_spec();
    assert!((s.t_star() - 0.3).abs() < 1e-6, "t* = {}", s.t_star());
    for t in [0.3, 0.33, 0.37, 0.4] {
        assert!((cap_function(&s, t) - 0.9).abs() < 1e-12, "F_A({t})");
    }
    assert!(cap_function(&s, 0.2).abs() < 1e-12);
    assert!(cap_function(&s, 0.7) > 0.9);
}

#[test]
fn constant_witness_on_plateau() {
    let s = plateau_spec();
    let cw = construct_witness_constant(&s, 0.3, 0.4, 0.9, &GridConfig::default()).unwrap();
    assert_eq!(cw.construction, "constant");
    assert!(cw.ratio < 1.0 - 1e-6);
    assert!(ratio_of(&cw.witness) < 1.0 - 1e-6);
}

#[test]
fn constant_witness_rejects_non_plateau() {
    let s = plateau_spec();
    let g = GridConfig::default();
    assert!(construct_witness_constant(&s, 0.5, 0.6, 0.9, &g).is_err());
    assert!(construct_witness_constant(&s, 0.4, 0.3, 0.9, &g).is_err());
    assert!(construct_witness_constant(&s, 0.3, 0.4, 1.0, &g).is_err());
}

#[test]
fn classify_takes_plateau_branch() {
    let r = classify_evc(&plateau_spec(), &GridConfig::default()).unwrap();
    assert_eq!(r.branch, EvcBranch::Plateau);
    assert_eq!(r.mktp2.status, Status::Fails);
    assert!(ratio_of(r.mktp2.witness.as_ref().unwrap()) < 1.0);
}

#[test]
fn jumps_detected_when_not_declared() {
    for f in [
        PickandsFamily::MarshallOlkin { alpha: 0.5, beta: 0.5 },
        PickandsFamily::MarshallOlkin { alpha: 0.3, beta: 0.8 },
        PickandsFamily::JumpExample,
    ] {
        let declared = builtin_pickands(f).unwrap();
        let d = Arc::new(declared.clone());
        let input = PickandsInput::new(Label::new("undeclared"), Arc::new(move |t| d.a(t)));
        let detected = validate_pickands(input).unwrap();
        assert!(!detected.jumps_declared());
        assert_eq!(detected.jumps().len(), declared.jumps().len(), "{f:?}");
        for (a, b) in detected.jumps().iter().zip(declared.jumps()) {
            assert!((a - b).abs() < 1e-6, "{f:?}: {a} vs {b}");
        }
    }
}

#[test]
fn smooth_families_have_no_jumps() {
    for f in [
        PickandsFamily::Gumbel { alpha: 2.0 },
        PickandsFamily::TawnSymmetric { theta: 0.5 },
    ] {
        let declared = builtin_pickands(f).unwrap();
        let d = Arc::new(declared);
        let detected = validate_pickands(PickandsInput::new(Label::new("x"), Arc::new(move |t| d.a(t)))).unwrap();
        assert!(detected.jumps().is_empty());
    }
}

#[test]
fn invalid_pickands_rejected() {
    let bad: [fn(f64) -> f64; 3] = [
        |_| 1.0 - 1e-3,                                           // A(0) != 1
        |t| 1.0 - 0.9 * t * (1.0 - t) * 4.0,                      // below max(t, 1 - t)
        |t| 1.0 - 0.2 * (std::f64::consts::PI * t).sin().powi(4), // not convex
    ];
    for f in bad {
        assert!(validate_pickands(PickandsInput::new(Label::new("bad"), Arc::new(f))).is_err());
    }
}
