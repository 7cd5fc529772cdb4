use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use cmcvol::closedform::{sphere_case_angles, sphere_willmore_residue, torus_case, torus_round_trip, torus_transport_check, TorusCase};
use cmcvol::fuchsian::LawsonAnsatz;
use cmcvol::holonomy::{
    dist_mod_2pi_i, hol_darboux_full, hol_lawson_lev, hol_regularizing, lawson_fake_gauges, lawson_h, lawson_willmore,
    reduce_log, volume_from_log_hol, GaugeChecks, SymData, VolumeAnchor,
};
use cmcvol::lawson::{genus_to_s, series_invariants, shape_constants, volume_expansion, volume_series};
use cmcvol::monodromy_solver::{solve, taylor_distance, taylor_init, SolvedFamily, SolverConfig};
use cmcvol::{c, C64};
use rayon::prelude::*;

use crate::config::{ConfigError, DataSource, ErrorKind, Location, Method, RunConfig};
use crate::record::Record;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    SphereCheck,
    Torus { r: Option<f64>, s: Option<f64> },
    LawsonVolume,
    LawsonHolonomy,
    SolveMonodromy,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SphereCheck => "sphere-check",
            Command::Torus { .. } => "torus",
            Command::LawsonVolume => "lawson-volume",
            Command::LawsonHolonomy => "lawson-holonomy",
            Command::SolveMonodromy => "solve-monodromy",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }

    /// Command named in a config file; the torus takes its parameters from flags.
    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "sphere-check" => Command::SphereCheck,
            "torus" => Command::Torus { r: None, s: None },
            "lawson-volume" => Command::LawsonVolume,
            "lawson-holonomy" => Command::LawsonHolonomy,
            "solve-monodromy" => Command::SolveMonodromy,
            "verify" => Command::Verify,
            "sweep" => Command::Sweep,
            _ => return None,
        })
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn error_record(mut r: Record, err: impl std::fmt::Display, start: Instant) -> Record {
    r.status = "error".into();
    r.detail = err.to_string();
    r.runtime_ms = ms(start);
    r
}

pub fn solver_config(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        degree: cfg.degree,
        samples: cfg.samples,
        tol: cfg.solver_tol,
        max_iter: cfg.max_iter,
        ode_tol: cfg.ode_tol,
        ..Default::default()
    }
}

fn sphere_check(cfg: &RunConfig) -> Vec<Record> {
    let w = sphere_willmore_residue().map(|w| w / 2.0);
    [0.5, 1.0, 2.0]
        .into_iter()
        .map(|gap: f64| {
            let start = Instant::now();
            let mut r = Record::new("sphere-check", "regularizing");
            r.theta = Some(gap / 2.0);
            let rep = match sphere_case_angles(-gap / 2.0, gap / 2.0, cfg.quad_tol) {
                Ok(rep) => rep,
                Err(e) => return error_record(r, e, start),
            };
            let w = match &w {
                Ok(w) => *w,
                Err(e) => return error_record(r, e, start),
            };
            let dv = (rep.volume - PI * (gap - gap.sin())).abs();
            let residual = rep.log_hol.norm().max(dv).max((w - 4.0 * PI).abs());
            r.w = Some(w);
            r.v = Some(rep.volume);
            r.log_hol_re = Some(rep.log_hol.re);
            r.log_hol_im = Some(rep.log_hol.im);
            r.residual = Some(residual);
            r.status = if residual < 1e-9 { "pass" } else { "fail" }.into();
            r.detail = format!("Sym points e^(-+{:.3}i); {}", gap / 2.0, rep.provenance);
            r.runtime_ms = ms(start);
            r
        })
        .collect()
}

fn torus_params(r: Option<f64>, s: Option<f64>) -> Result<TorusCase, ConfigError> {
    let bad = |key: &str, msg: String| ConfigError {
        location: Location::Flag(key.into()),
        key: key.into(),
        kind: ErrorKind::Range,
        message: msg,
    };
    for (k, v) in [("r", r), ("s", s)] {
        if let Some(v) = v {
            if !(v > 0.0 && v < 1.0) {
                return Err(bad(k, format!("{v} not in (0, 1)")));
            }
        }
    }
    let (r, s) = match (r, s) {
        (None, None) => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (Some(r), None) => (r, (1.0 - r * r).sqrt()),
        (None, Some(s)) => ((1.0 - s * s).sqrt(), s),
        (Some(r), Some(s)) => {
            let n = (r * r + s * s).sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(bad("s", format!("r^2 + s^2 = {} must equal 1", n * n)));
            }
            (r / n, s / n)
        }
    };
    TorusCase::new(r, s).or(Ok(TorusCase { r, s }))
}

fn torus(t: TorusCase, cfg: &RunConfig) -> Record {
    let start = Instant::now();
    let mut rec = Record::new("torus", "closed-form");
    rec.s = Some(t.s);
    let rep = match torus_case(t) {
        Ok(rep) => rep,
        Err(e) => return error_record(rec, e, start),
    };
    let rt = match torus_round_trip(t) {
        Ok(rt) => rt,
        Err(e) => return error_record(rec, e, start),
    };
    let tr = match torus_transport_check(t, cfg.quad_tol) {
        Ok(tr) => tr,
        Err(e) => return error_record(rec, e, start),
    };
    rec.theta = Some(t.tau2() / 2.0);
    rec.w = Some(rep.willmore);
    rec.v = Some(rep.volume);
    rec.log_hol_re = Some(rep.log_hol.re);
    rec.log_hol_im = Some(rep.log_hol.im);
    let residual = rt.hol_defect.max(dist_mod_2pi_i(tr.log_hol, rep.log_hol)).max((rt.volume - rep.volume).abs());
    rec.residual = Some(residual);
    rec.detail = format!("r = {}, H = {}", t.r, t.mean_curvature());
    rec.runtime_ms = ms(start);
    rec
}

fn lawson_volume(cfg: &RunConfig) -> Record {
    let start = Instant::now();
    let mut r = Record::new("lawson-volume", "series");
    let (phi, g) = (cfg.phi, cfg.genus);
    let s = genus_to_s(g);
    r.phi = Some(phi);
    r.genus = Some(g);
    r.s = Some(s);
    let v = match volume_expansion(phi, g) {
        Ok(v) => v,
        Err(e) => return error_record(r, e, start),
    };
    let inv = series_invariants(phi, s);
    let sc = shape_constants(phi);
    let log_hol = reduce_log(c(0.0, 8.0 * phi + 8.0 * PI * sc.mu * s + 32.0 * sc.mu * sc.nu * s * s));
    r.theta = Some(inv.theta);
    r.w = Some(inv.willmore);
    r.v = Some(v);
    r.log_hol_re = Some(log_hol.re);
    r.log_hol_im = Some(log_hol.im);
    r.detail = format!("mu = {:?}, nu = {:?}", sc.mu, sc.nu);
    r.runtime_ms = ms(start);
    r
}

/// Unit-normalised `x`, its angle, and the solver residual when solved.
fn lawson_data(cfg: &RunConfig, phi: f64, s: f64) -> Result<(LawsonAnsatz, f64, Option<SolvedFamily>), String> {
    match cfg.data {
        DataSource::Taylor => {
            let (an, theta) = taylor_init(phi, s).map_err(|e| e.to_string())?;
            Ok((SolvedFamily::initial(an, theta, s).unit_ansatz(), theta, None))
        }
        DataSource::Solved => {
            let fam = solve(phi, s, &solver_config(cfg), None).map_err(|e| e.to_string())?;
            let (an, _) = fam.holonomy_ansatz().map_err(|e| e.to_string())?;
            Ok((an, fam.theta, Some(fam)))
        }
    }
}

fn log_hol(method: Method, an: &LawsonAnsatz, theta: f64, data: DataSource, quad_tol: f64) -> Result<C64, String> {
    let e = |e: cmcvol::HolonomyError| e.to_string();
    match method {
        Method::Lev => Ok(hol_lawson_lev(an, theta, quad_tol).map_err(e)?.log_hol),
        Method::Regularizing => {
            // truncated data satisfy the quadric only to third order
            let checks = match data {
                DataSource::Taylor => GaugeChecks { eigenvector_tol: 1e-4, triangular_tol: 1e-8 },
                DataSource::Solved => GaugeChecks { eigenvector_tol: 1e-8, triangular_tol: 1e-8 },
            };
            let sym = SymData::symmetric(theta).map_err(e)?;
            Ok(hol_regularizing(None, &lawson_fake_gauges(an), &lawson_h(), &sym, quad_tol, &checks).map_err(e)?.log_hol)
        }
        // single-cover value; doubled to compare with the other two
        Method::Darboux => Ok(hol_darboux_full(&an.x, theta, quad_tol).map_err(e)? * 2.0),
    }
}

/// Invariants of the Lawson surface at `(phi, genus)` from the configured
/// data and holonomy method. The volume uses the phase of the holonomy; the
/// real part of the log, zero for exact data, is reported alongside.
pub fn lawson_point(command: &str, cfg: &RunConfig, phi: f64, genus: u32) -> Record {
    let start = Instant::now();
    let mut r = Record::new(command, cfg.method.name());
    let s = genus_to_s(genus);
    r.phi = Some(phi);
    r.genus = Some(genus);
    r.s = Some(s);
    let (an, theta, fam) = match lawson_data(cfg, phi, s) {
        Ok(d) => d,
        Err(e) => return error_record(r, e, start),
    };
    r.theta = Some(theta);
    let lh = match log_hol(cfg.method, &an, theta, cfg.data, cfg.quad_tol) {
        Ok(l) => reduce_log(l),
        Err(e) => return error_record(r, e, start),
    };
    let w = match lawson_willmore(&an) {
        Ok(w) => w,
        Err(e) => return error_record(r, e, start),
    };
    let anchor = VolumeAnchor::Near(volume_series(phi, s));
    match volume_from_log_hol(c(0.0, lh.im), theta, w, anchor) {
        Ok(v) => r.v = Some(v.volume),
        Err(e) => return error_record(r, e, start),
    }
    r.w = Some(w);
    r.log_hol_re = Some(lh.re);
    r.log_hol_im = Some(lh.im);
    r.residual = fam.as_ref().map(|f| f.residual_norm);
    r.detail = match &fam {
        Some(f) => format!("solved data, {} iterations, t = {}", f.iterations, f.t()),
        None => "pinned second-order Taylor data".into(),
    };
    r.runtime_ms = ms(start);
    r
}

fn solve_monodromy(cfg: &RunConfig) -> Record {
    let start = Instant::now();
    let mut r = Record::new("solve-monodromy", "lev");
    let s = genus_to_s(cfg.genus);
    r.phi = Some(cfg.phi);
    r.genus = Some(cfg.genus);
    r.s = Some(s);
    let fam = match solve(cfg.phi, s, &solver_config(cfg), None) {
        Ok(f) => f,
        Err(e) => return error_record(r, e, start),
    };
    r.theta = Some(fam.theta);
    r.residual = Some(fam.residual_norm);
    let pin = match fam.invariants(cfg.quad_tol) {
        Ok(inv) => {
            let lh = reduce_log(inv.log_hol);
            r.w = Some(inv.willmore);
            r.v = Some(inv.volume);
            r.log_hol_re = Some(lh.re);
            r.log_hol_im = Some(lh.im);
            inv.pin_shift
        }
        Err(e) => return error_record(r, e, start),
    };
    let dist = taylor_distance(&fam).map(|d| format!("{d:e}")).unwrap_or_else(|e| e.to_string());
    r.detail = format!(
        "iterations = {}, rank = {}, t = {}, distance to Taylor prediction = {}, Sym-point pinning shift = {:e}, D = {}, N_s = {}",
        fam.iterations, fam.rank, fam.t(), dist, pin, cfg.degree, cfg.samples
    );
    r.runtime_ms = ms(start);
    r
}

fn verify() -> Vec<Record> {
    cmcvol::verify::run_all()
        .into_iter()
        .map(|o| {
            let mut r = Record::new("verify", o.name);
            r.status = if o.passed { "pass" } else { "fail" }.into();
            r.detail = format!("criterion {}: {}", o.id, o.detail);
            r.runtime_ms = o.runtime_ms;
            r
        })
        .collect()
}

fn sweep(cfg: &RunConfig) -> Vec<Record> {
    let grid: Vec<(f64, u32)> =
        cfg.sweep_phi.iter().flat_map(|&p| cfg.sweep_genus.iter().map(move |&g| (p, g))).collect();
    let mut records: Vec<Record> = grid.par_iter().map(|&(p, g)| lawson_point("sweep", cfg, p, g)).collect();
    records.sort_by(|a, b| {
        let key = |r: &Record| (r.phi.unwrap_or(f64::NAN), r.genus.unwrap_or(0));
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
    });
    records
}

/// Runs `cmd`. Computation failures come back as records with status
/// `error` or `fail`; only invalid torus parameters are configuration errors.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Vec<Record>, ConfigError> {
    Ok(match cmd {
        Command::SphereCheck => sphere_check(cfg),
        Command::Torus { r, s } => vec![torus(torus_params(*r, *s)?, cfg)],
        Command::LawsonVolume => vec![lawson_volume(cfg)],
        Command::LawsonHolonomy => vec![lawson_point("lawson-holonomy", cfg, cfg.phi, cfg.genus)],
        Command::SolveMonodromy => vec![solve_monodromy(cfg)],
        Command::Verify => verify(),
        Command::Sweep => sweep(cfg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_parameter_completion() {
        let t = torus_params(Some(0.8), None).unwrap();
        assert!((t.s - 0.6).abs() < 1e-15);
        let t = torus_params(None, None).unwrap();
        assert_eq!(t, TorusCase::clifford());
        assert!(torus_params(Some(0.5), Some(0.5)).is_err());
        assert!(torus_params(Some(1.5), None).is_err());
    }

    #[test]
    fn lawson_volume_quarter_angle() {
        let cfg = RunConfig { genus: 100, ..Default::default() };
        let r = lawson_volume(&cfg);
        assert!((r.v.unwrap() - PI * PI).abs() < 1e-10);
        assert_eq!(r.status, "ok");
    }

    #[test]
    fn methods_agree_on_taylor_data() {
        let cfg = RunConfig { phi: PI / 3.0, genus: 49, ..Default::default() };
        let vals: Vec<f64> = [Method::Lev, Method::Regularizing, Method::Darboux]
            .into_iter()
            .map(|m| lawson_point("lawson-holonomy", &RunConfig { method: m, ..cfg.clone() }, cfg.phi, cfg.genus))
            .map(|r| {
                assert_eq!(r.status, "ok", "{}", r.detail);
                r.log_hol_im.unwrap()
            })
            .collect();
        for v in &vals {
            let d = (v - vals[0]).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-6, "{vals:?}");
        }
    }

    #[test]
    fn command_names_round_trip() {
        for name in crate::config::COMMANDS {
            assert_eq!(Command::from_name(name).unwrap().name(), name);
        }
        assert!(Command::from_name("plot").is_none());
    }
}
