use tao_memristor::simulate::{integrate_pulse, BoundaryHit};
use tao_memristor::*;

fn pulses(duty: f64) -> PulseDrive {
    PulseDrive::symmetric(0.54, -0.6, 1e-9, duty)
}

fn roots(d: &PulseDrive) -> Vec<f64> {
    find_fixed_points(&ModelParams::default(), d, &ScanSpec::default())
        .unwrap()
        .iter()
        .map(|f| f.x)
        .collect()
}

#[test]
fn trajectory_layout() {
    let p = ModelParams::default();
    let d = pulses(0.1);
    let t = simulate(&p, &d, 0.2, 50, &IntegratorSpec::default()).unwrap();
    assert_eq!(t.times.len(), 4 * 50 + 1);
    assert_eq!(t.times[0], 0.0);
    assert!(t.times.windows(2).all(|w| w[0] < w[1]));
    assert!(t.states.iter().all(|x| (0.0..=1.0).contains(x)));
    assert_eq!(t.period_end_states().len(), 50);
    let empty = simulate(&p, &d, 0.2, 0, &IntegratorSpec::default()).unwrap();
    assert!(empty.times.is_empty() && empty.states.is_empty());
}

#[test]
fn saturation_is_flagged() {
    let p = ModelParams::default();
    let d = PulseDrive::symmetric(0.9, -0.1, 1e-6, 0.4);
    let t = simulate(&p, &d, 0.9, 20, &IntegratorSpec::default()).unwrap();
    assert_eq!(t.boundary_hit, BoundaryHit::Upper);
    assert!(t.states.contains(&1.0));
}

#[test]
fn basins_split_at_the_unstable_point() {
    let p = ModelParams::default();
    let d = pulses(0.1);
    let r = roots(&d);
    let (low, unstable, high) = (r[0], r[1], r[2]);
    for k in 1..=19 {
        let x0 = 0.05 * k as f64;
        let t = simulate(&p, &d, x0, 20_000, &IntegratorSpec::default()).unwrap();
        let ends = t.period_end_states();
        if x0 < unstable {
            // drifts toward the lower root without leaving its basin
            assert!(t.states.iter().all(|&x| x < unstable), "x0 = {x0}");
            assert!(
                (ends.last().unwrap() - low).abs() < (x0 - low).abs().max(0.005),
                "x0 = {x0}"
            );
        } else {
            // settles into the oscillation around the upper root
            let tail = &t.states[t.states.len() - 400..];
            assert!(tail.iter().all(|&x| x > unstable), "x0 = {x0}");
            let (lo, hi) = tail
                .iter()
                .fold((1f64, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
            assert!(lo < high && high < hi, "x0 = {x0}");
        }
    }
}

#[test]
fn lower_basin_converges() {
    let p = ModelParams::default();
    let d = pulses(0.1);
    let low = roots(&d)[0];
    for x0 in [0.15, 0.2] {
        let t = simulate(&p, &d, x0, 20_000, &IntegratorSpec::default()).unwrap();
        let a = detect_attractor(&t, 0.2).unwrap();
        assert!((a.mean - low).abs() < 0.005, "{x0}: {a:?}");
    }
}

#[test]
fn halving_the_step_barely_moves_the_endpoint() {
    let p = ModelParams::default();
    for (duty, x0) in [(0.1, 0.2), (0.02, 0.3)] {
        let end = |r: f64| {
            let spec = IntegratorSpec {
                max_rel_step: r,
                ..IntegratorSpec::default()
            };
            *simulate(&p, &pulses(duty), x0, 200, &spec)
                .unwrap()
                .states
                .last()
                .unwrap()
        };
        let (a, b) = (end(0.01), end(0.005));
        assert!((a - b).abs() <= 1e-4, "{duty}: {a} {b}");
    }
}

#[test]
fn unstable_point_holds_for_ten_periods() {
    let p = ModelParams::default();
    // narrow pulses keep the intra-period excursion small
    let d = pulses(0.001);
    let u = roots(&d)[1];
    let t = simulate(&p, &d, u, 10, &IntegratorSpec::default()).unwrap();
    let drift = t.states.iter().map(|x| (x - u).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-3, "{drift}");
    // and eventually leaves
    let t = simulate(&p, &d, u + 1e-3, 20_000, &IntegratorSpec::default()).unwrap();
    assert!(t.states.last().unwrap() - u > 0.05);
}

#[test]
fn oscillation_shrinks_with_pulse_width() {
    let p = ModelParams::default();
    let high = roots(&pulses(0.02))[2];
    let mut last = f64::INFINITY;
    for duty in [0.02, 0.01, 0.005] {
        let t = simulate(&p, &pulses(duty), 0.3, 500, &IntegratorSpec::default()).unwrap();
        let a = detect_attractor(&t, 0.2).unwrap();
        assert!((a.mean - high).abs() < 0.02, "{duty}: {a:?}");
        assert!(a.amplitude > 0.0 && a.amplitude < last, "{duty}: {a:?}");
        last = a.amplitude;
    }
}

#[test]
fn repeat_runs_match_bitwise() {
    let p = ModelParams::default();
    let run = || simulate(&p, &pulses(0.02), 0.3, 300, &IntegratorSpec::default()).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.times, b.times);
    assert_eq!(
        a.states.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        b.states.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn step_cap_is_reported() {
    let p = ModelParams::default();
    let spec = IntegratorSpec {
        max_rel_step: 1e-3,
        max_substeps_per_pulse: 10,
    };
    assert!(matches!(
        integrate_pulse(&p, 0.3, 0.54, 1e-9, &spec),
        Err(Error::Integration(_))
    ));
}
