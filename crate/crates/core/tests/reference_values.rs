//! Values checked against independent high-precision evaluations.

use tao_memristor::averaging::{effective_g, fixed_point_condition};
use tao_memristor::bifurcation::{saddle_node_threshold, SaddleNode};
use tao_memristor::curves::{self, Correction, PulseTiming};
use tao_memristor::model::current;
use tao_memristor::simulate::integrate_pulse;
use tao_memristor::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn drive(v_plus: f64, v_minus: f64) -> PulseDrive {
    PulseDrive::default().with_amplitudes(v_plus, v_minus)
}

#[test]
fn constitutive_values() {
    let p = ModelParams::default();
    assert!(rel(memductance(&p, 0.3, 0.54).unwrap(), 0.007659363318797595) < 1e-12);
    assert!(rel(current(&p, 0.3, -0.6).unwrap(), -0.004615259349675378) < 1e-12);
    let f = evolution_rate(&p, 0.3, 0.54).unwrap();
    assert!(rel(f, 3724398096.82) < 1e-9, "{f}");
    let l = log_evolution_rate(&p, 0.3, 0.54).unwrap();
    assert_eq!(l.sign, Sign::Positive);
    assert!((l.log_magnitude - 3724398096.82f64.ln()).abs() < 1e-9);
}

#[test]
fn gamma_value() {
    let p = ModelParams::default();
    let g = curves::gamma(&p, &drive(0.54, -0.6));
    assert!((g - 31.23343554640428).abs() < 1e-10, "{g}");
}

#[test]
fn sign_between_roots_from_dense_linear_scan() {
    let p = ModelParams::default();
    let d = drive(0.54, -0.6);
    // linear-domain scan: g changes sign at ~0.106, ~0.237, ~0.371
    let xs: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
    let signs: Vec<f64> = xs
        .iter()
        .map(|&x| effective_g(&p, &d, x).unwrap().signum())
        .collect();
    let changes: Vec<f64> = signs
        .windows(2)
        .zip(&xs)
        .filter(|(w, _)| w[0] != w[1])
        .map(|(_, &x)| x)
        .collect();
    assert_eq!(changes.len(), 3, "{changes:?}");
    assert!(changes[1] < 0.3 && 0.3 < changes[2]);
    assert_eq!(g_sign(&p, &d, 0.3).unwrap(), Sign::Positive);
    assert!(effective_g(&p, &d, 0.3).unwrap() > 0.0);
}

#[test]
fn fixed_points_and_condition() {
    let p = ModelParams::default();
    let fps = find_fixed_points(&p, &drive(0.54, -0.6), &ScanSpec::default()).unwrap();
    let expect = [
        (0.10621, Stability::Stable),
        (0.23710, Stability::Unstable),
        (0.37050, Stability::Stable),
    ];
    assert_eq!(fps.len(), 3);
    for (fp, (x, s)) in fps.iter().zip(expect) {
        assert!((fp.x - x).abs() < 1e-4, "{} vs {x}", fp.x);
        assert_eq!(fp.stability, s);
        let (lhs, rhs) = fixed_point_condition(&p, &drive(0.54, -0.6), fp.x).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6);
    }
    assert!(
        find_fixed_points(&p, &drive(0.72, -0.6), &ScanSpec::default())
            .unwrap()
            .is_empty()
    );
    let one = find_fixed_points(&p, &drive(0.54, -0.4), &ScanSpec::default()).unwrap();
    assert_eq!(one.len(), 1);
    assert!((one[0].x - 0.559).abs() < 1e-3);
}

#[test]
fn thresholds_near_cusp_coincide() {
    let p = ModelParams::default();
    let t = PulseDrive::default();
    let s = ScanSpec::default();
    // just above the numeric cusp the N_st = 2 window is a few mV wide
    let c = saddle_node_threshold(&p, &t, 0.50, SaddleNode::Creation, (-0.6, -0.512), &s).unwrap();
    let a =
        saddle_node_threshold(&p, &t, 0.50, SaddleNode::Annihilation, (-0.512, -0.45), &s).unwrap();
    assert!((c - a).abs() < 0.02);
    assert!(
        (c + 0.51).abs() < 0.01 && (a + 0.51).abs() < 0.01,
        "{c} {a}"
    );
    let cp = curves::cusp(&p, &PulseTiming::from(&t)).unwrap();
    assert!((cp.v_minus_c - c).abs() < 0.01);
}

#[test]
fn lobe_cell() {
    let p = ModelParams::default();
    assert_eq!(
        count_stable(&p, &drive(0.52, -0.55), &ScanSpec::default()).unwrap(),
        2
    );
    assert_eq!(
        count_stable(&p, &drive(0.50, -0.55), &ScanSpec::default()).unwrap(),
        1
    );
}

/// V− values where N_st changes along a fixed-V+ line, scanned at 1 mV.
fn transitions(p: &ModelParams, v_plus: f64) -> Vec<(f64, usize, usize)> {
    let s = ScanSpec::default();
    let vs: Vec<f64> = (0..1700)
        .map(|k| -1.7 + 0.001 * k as f64)
        .chain([-1e-4])
        .collect();
    let n: Vec<usize> = vs
        .iter()
        .map(|&v| count_stable(p, &drive(v_plus, v), &s).unwrap())
        .collect();
    (1..vs.len())
        .filter(|&k| n[k] != n[k - 1])
        .map(|k| (0.5 * (vs[k] + vs[k - 1]), n[k - 1], n[k]))
        .collect()
}

#[test]
fn curve_a_upper_branch_matches_scan() {
    let p = ModelParams::default();
    let t = PulseTiming::from(&PulseDrive::default());
    let s = curves::curve_a_at(&p, &t, 0.35, Correction::OneStep).unwrap();
    let tr = transitions(&p, s.point.v_plus);
    let gap = tr
        .iter()
        .map(|&(v, _, _)| (v - s.point.v_minus).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(gap < 0.03, "{gap} {:?} {tr:?}", s.point);
}

#[test]
fn curve_b_matches_scan() {
    let p = ModelParams::default();
    let t = PulseTiming::from(&PulseDrive::default());
    // B is where a stable root leaves through x = 1: the 1 → 0 step, or the
    // 2 → 1 step once B has crossed the upper branch of A
    for v_plus in [0.66, 0.7, 0.72, 0.75, 0.78] {
        let b = curves::curve_b(&p, &t, &[v_plus]).unwrap()[0];
        let tr = transitions(&p, v_plus);
        let gap = tr
            .iter()
            .filter(|&&(_, lo, hi)| lo > hi)
            .map(|&(v, _, _)| (v - b.v_minus).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(gap < 0.03, "{v_plus}: {gap} {tr:?} {b:?}");
    }
    // at V+ = 0.6 the curve sits at V− ≈ 0 and the scan finds no 1 → 0 step
    let b = curves::curve_b(&p, &t, &[0.6]).unwrap()[0];
    assert!(b.v_minus > -1e-4);
    assert!(transitions(&p, 0.6)
        .iter()
        .all(|&(_, lo, hi)| lo.min(hi) > 0));
    // (0.72, −0.6) sits on the N_st = 0 side
    let b72 = curves::curve_b(&p, &t, &[0.72]).unwrap()[0];
    assert!(b72.v_minus < -0.6);
}

#[test]
fn x_min_matches_dense_minimisation() {
    let p = ModelParams::default();
    for v_plus in [0.6, 0.7, 0.75] {
        let lhs = |x: f64| {
            v_plus * v_plus * memductance(&p, x, v_plus).unwrap() / p.sigma_p
                + p.x_off * p.x_off / (x * x)
        };
        let (mut best, mut at) = (f64::INFINITY, 0.0);
        for i in 1..=200_000 {
            let x = i as f64 / 200_000.0;
            let y = lhs(x);
            if y < best {
                best = y;
                at = x;
            }
        }
        let xm = curves::x_min(&p, v_plus).unwrap();
        assert!((xm - at).abs() < 2e-5, "{v_plus}: {xm} vs {at}");
    }
    assert!((curves::x_min(&p, 0.7).unwrap() - 0.10198).abs() < 1e-4);
}

#[test]
fn tangency_drives_at_fixed_v_minus() {
    let p = ModelParams::default();
    let t = PulseTiming::from(&PulseDrive::default());
    let c = curves::curve_c(&p, &t, &[0.5714]).unwrap()[0];
    assert!((c.v_minus + 0.69916).abs() < 1e-4, "{}", c.v_minus);
    let d = curves::curve_d(&p, &t, &[0.6197]).unwrap()[0];
    assert!(
        (d.point.v_minus + 0.70002).abs() < 1e-4,
        "{}",
        d.point.v_minus
    );
}

#[test]
fn curves_c_and_d_follow_curve_a() {
    let p = ModelParams::default();
    let t = PulseTiming::from(&PulseDrive::default());
    let c = curves::cusp(&p, &t).unwrap();
    let a = curves::curve_a(
        &p,
        &t,
        &curves::default_curve_a_samples(),
        Correction::OneStep,
    )
    .unwrap();
    let branch = |small_x: bool| -> Vec<(f64, f64)> {
        a.iter()
            .filter(|s| (s.x < c.x_c) == small_x)
            .map(|s| (s.point.v_plus, s.point.v_minus))
            .collect()
    };
    let at = |pts: &[(f64, f64)], vp: f64| {
        pts.windows(2).find_map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            ((x0 - vp) * (x1 - vp) <= 0.0).then(|| y0 + (vp - x0) / (x1 - x0) * (y1 - y0))
        })
    };
    let (small, large) = (branch(true), branch(false));
    let vps: Vec<f64> = (0..=70).map(|k| 0.50 + 0.001 * k as f64).collect();
    let cc = curves::curve_c(&p, &t, &vps).unwrap();
    let dd = curves::curve_d(&p, &t, &vps).unwrap();
    let mut gap_c: f64 = 0.0;
    let mut gap_d: f64 = 0.0;
    for (cp, dp) in cc.iter().zip(&dd) {
        gap_c = gap_c.max((at(&large, cp.v_plus).unwrap() - cp.v_minus).abs());
        gap_d = gap_d.max((at(&small, dp.point.v_plus).unwrap() - dp.point.v_minus).abs());
    }
    assert!(gap_c < 0.032, "{gap_c}");
    assert!(gap_d < 0.017, "{gap_d}");
}

#[test]
fn short_pulse_increment() {
    let p = ModelParams::default();
    let o = integrate_pulse(&p, 0.3, 0.54, 2e-11, &IntegratorSpec::default()).unwrap();
    let dx = o.x - 0.3;
    assert!(dx > 0.02 && dx < 0.2, "{dx}");
}
