use num_complex::Complex64;
use proptest::prelude::*;
use sectorial_core::flow::{
    compute_c, compute_delta, delta_reading, flow_unperturbed_z, flow_until, integrate_flow, FlowSettings, Termination,
};
use sectorial_core::geometry::{phi_sym_smoothed, SmoothingMode, SteinParams, SymPoint};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn setup() -> (SteinParams, FlowSettings) {
    let p = SteinParams::default();
    (p, FlowSettings::for_params(&p))
}

#[test]
fn unperturbed_closed_form() {
    let t = 2.0 * 2f64.ln();
    assert_eq!(flow_unperturbed_z(c(1.0, 1.0), 0.0, 1.5), c(1.0, 1.0));
    assert!((flow_unperturbed_z(c(1.0, 0.0), t, 1.5) - c(2.0, 0.0)).norm() < 1e-15);
    assert!((flow_unperturbed_z(c(0.0, 4.0), t, 1.5) - c(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn imaginary_pair_splits() {
    let (p, s) = setup();
    let tr = integrate_flow(&SymPoint::new(c(0.0, 1.0), c(0.0, -1.0)).unwrap(), &p, &s).unwrap();
    assert_eq!(tr.termination, Termination::Escaped);
    assert_eq!(tr.escape.unwrap().signs, (-1, 1));
}

#[test]
fn trajectory_samples_are_ordered_and_descending() {
    let (p, s) = setup();
    let tr = integrate_flow(&SymPoint::new(c(0.02, 0.1), c(-0.03, 0.05)).unwrap(), &p, &s).unwrap();
    for pair in tr.samples.windows(2) {
        assert!(pair[1].0 > pair[0].0);
        let (a, b) = (phi_sym_smoothed(&pair[0].1, &p), phi_sym_smoothed(&pair[1].1, &p));
        assert!(b <= a + 1e-8);
    }
}

#[test]
fn far_pair_decouples() {
    let (p, s) = setup();
    let (a, b) = (c(-5.0, 0.0), c(-3.0, 1.0));
    let tr = integrate_flow(&SymPoint::new(a, b).unwrap(), &p, &s).unwrap();
    assert_eq!(tr.escape.unwrap().signs, (-1, -1));
    for (t, q) in &tr.samples {
        let e = SymPoint::new(flow_unperturbed_z(a, *t, 1.5), flow_unperturbed_z(b, *t, 1.5)).unwrap();
        assert!(q.pair_distance(&e) < 1e-6 * e.z1().norm().min(e.z2().norm()));
    }
}

#[test]
fn diagonal_escapes() {
    let (p, s) = setup();
    let eps = p.epsilon();
    for mode in [SmoothingMode::Pure, SmoothingMode::Cutoff] {
        let params = p.with_smoothing(mode);
        let (t, end) = flow_until([0.0; 4], &params, &s, |st| st[2] > 1e3 * eps).unwrap();
        assert!(t.is_finite() && end[3] == 0.0);
    }
    let w0 = c(0.0, 0.02);
    let q = SymPoint::from_zw(c(0.0, 0.0), w0).unwrap();
    let tr = integrate_flow(&q, &p, &FlowSettings { escape_radius: 50.0, ..s }).unwrap();
    let ims: Vec<f64> = tr.samples.iter().map(|(_, q)| q.w().im.abs()).collect();
    assert!(ims.windows(2).all(|w| w[1] <= w[0]));
    assert!(*ims.last().unwrap() < 1e-3 * w0.im);
}

#[test]
fn delta_examples() {
    let (p, s) = setup();
    let eps = p.epsilon();
    let d = compute_delta(c(2.0 * eps, 0.0), &p, &s).unwrap();
    assert!((d - c(2.0 * eps, 0.0)).norm() < 1e-9);
    let v = c(0.5 * eps, eps);
    let (a, b) = (compute_c(v, &p, &s).unwrap(), compute_c(-v, &p, &s).unwrap());
    assert!((a - b).abs() < 1e-8);
    let at_zero = compute_delta(c(0.0, 0.0), &p, &s.with_tolerance(1e-10)).unwrap();
    assert_eq!(at_zero.im, 0.0);
    assert!(at_zero.re > 0.0 && at_zero.re <= eps);
    assert!((compute_c(c(3.0 * eps, 0.0), &p, &s).unwrap() - 3.0 * eps).abs() < 1e-9);
    let half = compute_c(c(0.5 * eps, 0.0), &p, &s).unwrap();
    assert!(half >= 0.5 * eps - 1e-6 && half <= eps);
}

#[test]
fn pure_smoothing_overshoots_the_upper_bound() {
    // the pure profile smooths sqrt(w) over eps^(1/4) rather than eps
    let p = SteinParams::new(1.5, 0.1, SmoothingMode::Pure).unwrap();
    let s = FlowSettings::for_params(&p);
    assert!(compute_c(c(0.0, 0.0), &p, &s).unwrap() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decoupled_flow_matches_closed_form(
        x1 in -5.0..-1.0f64, y1 in -1.0..1.0f64, x2 in 1.0..5.0f64, y2 in -1.0..1.0f64, flip in any::<bool>(),
    ) {
        let (p, s) = setup();
        // same side, or opposite sides, with the real gap above 4 sqrt(eps)
        let (x1, x2) = if flip { (x1, x1 - 1.5) } else { (x1, x2) };
        let (a, b) = (c(x1, y1), c(x2, y2));
        let tr = integrate_flow(&SymPoint::new(a, b).unwrap(), &p, &s).unwrap();
        for (t, q) in &tr.samples {
            let e = SymPoint::new(flow_unperturbed_z(a, *t, 1.5), flow_unperturbed_z(b, *t, 1.5)).unwrap();
            prop_assert!(q.pair_distance(&e) < 1e-6 * e.z1().norm().min(e.z2().norm()));
        }
    }

    #[test]
    fn near_diagonal_escape(r in 0.0..0.5f64, th in 0.0..std::f64::consts::TAU) {
        let (p, s) = setup();
        let eps = p.epsilon();
        let w0 = Complex64::from_polar(r, th);
        let limit = 1e-3 * w0.im.abs().max(eps);
        let res = flow_until([0.0, 0.0, w0.re, w0.im], &p, &s, |st| st[2] > 1e3 * eps && st[3].abs() < limit);
        prop_assert!(res.is_ok());
    }

    #[test]
    fn c_bounds_and_stability(re in -0.3..0.3f64, im in -0.3..0.3f64) {
        let (p, s) = setup();
        let eps = p.epsilon();
        let d = delta_reading(c(re, im), &p, &s).unwrap();
        let cv = d.delta.re;
        prop_assert!(cv >= re.abs() - 1e-6);
        prop_assert!(cv <= re.abs().max(eps) + 1e-6);
        prop_assert!(d.stability < 1e-8);
        if re.abs() > 1.05 * eps {
            prop_assert!((cv - re.abs()).abs() < 1e-6);
        }
    }
}
