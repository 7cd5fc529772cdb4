use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use cmcvol::closedform::{sphere_case_angles, torus_case, torus_round_trip, TorusCase};
use cmcvol::fuchsian::{build_lawson_potential, symmetry_orbit};
use cmcvol::holonomy::{dist_mod_2pi_i, hol_from_invariants, hol_lawson_lev, volume_from_log_hol_cover, VolumeAnchor};
use cmcvol::lawson::{
    central_ansatz, genus_to_s, pipeline_volume, series_invariants, volume_expansion, volume_series, LawsonFamily,
};
use cmcvol::monodromy::monodromy_rep;
use cmcvol::monodromy_solver::{held_out_check, solve, taylor_init, SolverConfig};
use cmcvol::*;

#[test]
fn sphere_volume_is_cap_volume_for_shifted_angles() {
    // only the difference of the Sym angles matters
    for (t1, t2) in [(0.2, 1.2), (-0.7, 0.3), (1.0, 2.0)] {
        let r = sphere_case_angles(t1, t2, 1e-13).unwrap();
        let d = t2 - t1;
        assert!((r.volume - PI * (d - f64::sin(d))).abs() < 1e-9, "{t1} {t2} {}", r.volume);
    }
}

#[test]
fn torus_holonomy_recovered_from_invariants() {
    for r in [0.3f64, 0.5, 0.8, 0.95] {
        let t = TorusCase::new(r, (1.0 - r * r).sqrt()).unwrap();
        let rep = torus_case(t).unwrap();
        let h = hol_from_invariants(rep.willmore, 0.0, t.tau2(), rep.volume);
        assert!(dist_mod_2pi_i(h, rep.log_hol) < 1e-10);
        let rt = torus_round_trip(t).unwrap();
        let d = (rt.volume - t.volume()).rem_euclid(2.0 * PI * PI);
        assert!(d.min(2.0 * PI * PI - d) < 1e-9);
    }
}

#[test]
fn torus_rejects_off_circle_parameters() {
    assert!(TorusCase::new(0.5, 0.5).is_err());
    assert!(TorusCase::new(-0.6, 0.8).is_err());
}

#[test]
fn taylor_data_modulus_defect_is_higher_order() {
    // truncated data give |Hol| != 1, but only beyond second order
    let fam = LawsonFamily::new(PI / 3.0).unwrap();
    let v = |s: f64| {
        let (an, theta) = fam.pinned_taylor(s).unwrap();
        hol_lawson_lev(&an, theta, 1e-13).unwrap().log_hol.re
    };
    let ratio = v(0.02) / v(0.01);
    assert!(ratio > 7.0, "ratio {ratio}");
    assert!(pipeline_volume(&fam, 0.002, 1e-13).is_ok());
}

#[test]
fn solved_invariants_track_the_series() {
    let cfg = SolverConfig { degree: 5, samples: 12, ..Default::default() };
    let phi = 1.0;
    let mut prev: Option<[f64; 3]> = None;
    for g in [50u32, 100] {
        let s = genus_to_s(g);
        let fam = solve(phi, s, &cfg, None).unwrap();
        let inv = fam.invariants(1e-13).unwrap();
        assert!(inv.log_hol.re.abs() < 1e-8);
        let series = series_invariants(phi, s);
        let d = [
            (inv.willmore - series.willmore).abs(),
            (inv.volume - volume_series(phi, s)).abs(),
            (fam.theta - series.theta).abs(),
        ];
        if let Some(p) = prev {
            for k in 0..3 {
                let ratio = p[k] / d[k];
                assert!(ratio > 6.0 && ratio < 10.0, "component {k}: ratio {ratio}");
            }
        }
        prev = Some(d);
    }
}

#[test]
fn solved_quarter_angle_volume_is_pi_squared() {
    let cfg = SolverConfig { degree: 5, samples: 12, ..Default::default() };
    let fam = solve(FRAC_PI_4, genus_to_s(80), &cfg, None).unwrap();
    let inv = fam.invariants(1e-13).unwrap();
    assert!((inv.volume - PI * PI).abs() < 1e-9, "{}", inv.volume);
    assert!(inv.willmore < 8.0 * PI);
}

#[test]
fn series_invariants_at_quarter_angle() {
    let inv = series_invariants(FRAC_PI_4, 0.01);
    assert!((inv.theta - FRAC_PI_2).abs() < 1e-15);
    assert!(inv.willmore < 8.0 * PI);
    for g in [2, 10, 1000] {
        assert!((volume_expansion(FRAC_PI_4, g).unwrap() - PI * PI).abs() < 1e-13);
    }
    assert!(volume_expansion(FRAC_PI_4, 1).is_err());
    assert!(volume_expansion(2.0, 10).is_err());
}

#[test]
fn symmetry_orbit_preserves_traces() {
    let an = central_ansatz(0.9, 0.04);
    let lam = C64::from_polar(1.0, 0.4);
    let base = monodromy_rep(&build_lawson_potential(&an).unwrap(), lam, 1e-12).unwrap();
    let tr: Vec<C64> = base.matrices.iter().map(|m| m.trace()).collect();
    for eta in symmetry_orbit(&an).unwrap() {
        let rep = monodromy_rep(&eta, lam, 1e-12).unwrap();
        for (m, t) in rep.matrices.iter().zip(&tr) {
            assert!((m.trace() - t).norm() < 1e-9);
        }
    }
}

#[test]
fn lev_holonomy_first_order() {
    let phi = 1.1;
    let fam = LawsonFamily::new(phi).unwrap();
    let (an, theta) = fam.pinned_taylor(0.01).unwrap();
    let h = hol_lawson_lev(&an, theta, 1e-12).unwrap().log_hol;
    let expected = c(0.0, 8.0 * phi + 8.0 * PI * fam.shape.mu * 0.01);
    assert!(dist_mod_2pi_i(h, expected) < 1e-3);
}

#[test]
fn solved_family_matches_held_out_monodromy() {
    let cfg = SolverConfig { degree: 5, samples: 12, ..Default::default() };
    let s = genus_to_s(60);
    let fam = solve(1.0, s, &cfg, None).unwrap();
    assert!(fam.residual_norm < 1e-10);
    let rep = held_out_check(&fam, 6, 1e-12).unwrap();
    assert!(rep.worst() < 1e-8, "{rep:?}");
    assert!(rep.product_defect < 1e-8);
    // theta moves off pi/2 by about 2 nu s
    let inv = series_invariants(1.0, s);
    assert!((fam.theta - inv.theta).abs() < 50.0 * s * s * s);
}

#[test]
fn solver_rejects_bad_input() {
    let cfg = SolverConfig::default();
    assert!(solve(FRAC_PI_4, 0.3, &cfg, None).is_err());
    assert!(solve(FRAC_PI_4, -0.1, &cfg, None).is_err());
    let bad = SolverConfig { degree: 12, samples: 4, ..cfg };
    assert!(solve(FRAC_PI_4, 0.01, &bad, None).is_err());
    assert!(taylor_init(0.0, 0.01).is_err());
}

#[test]
fn volume_cover_periods() {
    let lh = c(0.0, 1.234);
    let single = volume_from_log_hol_cover(lh, 1.0, 4.0 * PI, 1, VolumeAnchor::Principal).unwrap();
    let double = volume_from_log_hol_cover(lh, 1.0, 4.0 * PI, 2, VolumeAnchor::Principal).unwrap();
    assert!((single.period - 2.0 * PI * PI).abs() < 1e-15);
    assert!((double.period - PI * PI).abs() < 1e-15);
    assert!(volume_from_log_hol_cover(c(0.3, 1.0), 1.0, 4.0 * PI, 1, VolumeAnchor::Principal).is_err());
}

#[test]
fn conjugated_init_lands_on_conjugated_solution() {
    let cfg = SolverConfig { degree: 5, samples: 12, ..Default::default() };
    let s = genus_to_s(60);
    let base = solve(0.9, s, &cfg, None).unwrap();
    let (an, theta) = taylor_init(0.9, s).unwrap();
    for m in 2..=4 {
        let init = cmcvol::monodromy_solver::SolvedFamily::initial(an.conjugated(m), theta, s);
        let fam = solve(0.9, s, &cfg, Some(&init)).unwrap();
        assert!(fam.residual_norm < 1e-10);
        assert!((fam.theta - base.theta).abs() < 1e-9);
        let expected = base.ansatz.conjugated(m);
        for j in 0..3 {
            assert!((&fam.ansatz.x[j] - &expected.x[j]).max_coeff_magnitude() < 1e-8, "m={m} j={j}");
        }
        let a = held_out_check(&fam, 6, 1e-12).unwrap();
        let b = held_out_check(&base, 6, 1e-12).unwrap();
        assert!((a.im_trace - b.im_trace).abs() < 1e-9 && a.worst() < 1e-8);
    }
}
