use std::fmt::Write;

use log::warn;
use opendeco::single_mode::{
    decoherence_time, density_matrix_element, propagate_moments, qd_degree, relaxation_time,
    stationary_density_matrix_element, thermal_fluctuation_time, uncertainty_det_closed,
    DecoherenceRegime, HIGH_T_MIN_C,
};
use opendeco::two_mode::{det_entanglement_block, COVARIANCE_ENTRY_NAMES};
use opendeco::{
    build_initial_state, gibbs_coefficients, scan_s, simon_s, simon_special, validate_single_mode,
    validate_two_mode, CovarianceMatrix4, Error, OscillatorParams, Separability, ThermalParams,
    Time, TwoModeDynamics, ValidationReport,
};

use crate::config::{pick, RunConfig};
use crate::error::CliError;
use crate::table::{fmt_num, linspace, CsvTable};
use crate::{DecoGridArgs, DensityArgs, Outcome, PropagateArgs, ScanArgs};

/// Agreement required between the general and special-family `S`.
const S_AGREEMENT_TOL: f64 = 1e-10;

fn physical(what: &str, report: &ValidationReport) -> CliError {
    let failed: Vec<_> = report
        .failures()
        .map(|c| format!("{} (slack {:.6e})", c.name, c.slack))
        .collect();
    CliError::Physical(format!("{what} fails {}", failed.join("; ")))
}

/// Gibbs environment for `params` at `thermal`, after checking it.
fn checked_single_mode(params: &OscillatorParams, thermal: &ThermalParams) -> Result<(), CliError> {
    params.validate_single_mode()?;
    let report = validate_single_mode(&gibbs_coefficients(params, thermal)?);
    if !report.all_passed() {
        return Err(physical("single-mode environment", &report));
    }
    Ok(())
}

fn grid(min: f64, max: f64, steps: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if steps == 0 || !min.is_finite() || !max.is_finite() || max < min {
        return Err(CliError::Config(format!(
            "{name} grid needs finite min <= max and steps >= 1, got [{min}, {max}] x {steps}"
        )));
    }
    Ok(linspace(min, max, steps))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.oscillator()?;
    let thermal = cfg.thermal()?;
    let mut text = String::new();
    let mut ok = true;

    if let Err(e) = params.validate_single_mode() {
        let _ = writeln!(text, "FAIL oscillator: {e}");
        ok = false;
    } else {
        let report = validate_single_mode(&gibbs_coefficients(&params, &thermal)?);
        let _ = writeln!(text, "# single-mode environment (C = {})", thermal.c);
        let _ = write!(text, "{report}");
        ok &= report.all_passed();
    }
    if let Some(init) = cfg.initial {
        if let Err(e) = build_initial_state(init.delta, init.r, init.x0, init.p0, &params) {
            let _ = writeln!(text, "FAIL initial state: {e}");
            ok = false;
        }
    }
    if cfg.two_mode_env.is_some() {
        let report = validate_two_mode(&cfg.two_mode_env()?);
        let _ = writeln!(text, "# two-mode environment");
        let _ = write!(text, "{report}");
        ok &= report.all_passed();
    }
    let _ = writeln!(text, "{}", if ok { "valid" } else { "invalid" });
    Ok(Outcome {
        text,
        exit_code: if ok { 0 } else { 2 },
    })
}

pub fn cmd_deco_grid(cfg: &RunConfig, args: &DecoGridArgs) -> Result<CsvTable, CliError> {
    let params = cfg.oscillator()?;
    let init = cfg.initial()?;
    let sec = cfg.deco_grid.unwrap_or_default();
    params.validate_single_mode()?;
    build_initial_state(init.delta, init.r, 0.0, 0.0, &params)?;

    let times: Vec<Time> = if args.asymptotic {
        vec![Time::Infinite]
    } else {
        let t_min = pick(args.t_min, sec.t_min, "--t-min")?;
        let t_max = pick(args.t_max, sec.t_max, "--t-max")?;
        let steps = pick(args.t_steps, sec.t_steps, "--t-steps")?;
        if t_min < 0.0 {
            return Err(CliError::Config(format!(
                "--t-min must be non-negative, got {t_min}"
            )));
        }
        grid(t_min, t_max, steps, "t")?
            .into_iter()
            .map(Time::Finite)
            .collect()
    };
    let cs = grid(
        pick(args.c_min, sec.c_min, "--c-min")?,
        pick(args.c_max, sec.c_max, "--c-max")?,
        pick(args.c_steps, sec.c_steps, "--c-steps")?,
        "C",
    )?;

    // validity depends on C only
    let mut node_ok = Vec::with_capacity(cs.len());
    for &c in &cs {
        let valid = ThermalParams::new(c)
            .map_err(CliError::from)
            .and_then(|th| checked_single_mode(&params, &th));
        match valid {
            Ok(()) => node_ok.push(true),
            Err(e) if args.skip_invalid => {
                warn!("skipping C = {c}: {e}");
                node_ok.push(false);
            }
            Err(CliError::Physical(msg)) => {
                return Err(CliError::Physical(format!("at C = {c}: {msg}")))
            }
            Err(e) => return Err(e),
        }
    }

    let mut header = vec!["t", "C", "sigma_det", "delta_qd"];
    if args.skip_invalid {
        header.push("status");
    }
    let mut table = CsvTable::new(header);
    for &t in &times {
        let t_cell = match t {
            Time::Finite(v) => fmt_num(v),
            Time::Infinite => fmt_num(f64::INFINITY),
        };
        for (&c, &ok) in cs.iter().zip(&node_ok) {
            let mut row = vec![t_cell.clone(), fmt_num(c)];
            if ok {
                let thermal = ThermalParams::new(c)?;
                let sigma = uncertainty_det_closed(init.delta, init.r, &params, &thermal, t)?;
                let qd = qd_degree(init.delta, init.r, &params, &thermal, t)?;
                row.extend([fmt_num(sigma), fmt_num(qd)]);
                if args.skip_invalid {
                    row.push("ok".into());
                }
            } else {
                row.extend([fmt_num(f64::NAN), fmt_num(f64::NAN), "invalid".into()]);
            }
            table.push(row);
        }
    }
    Ok(table)
}

pub fn cmd_density(cfg: &RunConfig, args: &DensityArgs) -> Result<CsvTable, CliError> {
    let params = cfg.oscillator()?;
    let thermal = cfg.thermal()?;
    let sec = cfg.density.unwrap_or_default();
    checked_single_mode(&params, &thermal)?;

    let n = pick(args.n, sec.n, "--n")?;
    if n < 2 {
        return Err(CliError::Config(format!("--n must be at least 2, got {n}")));
    }
    let xs = grid(
        pick(args.x_min, sec.x_min, "--x-min")?,
        pick(args.x_max, sec.x_max, "--x-max")?,
        n,
        "x",
    )?;

    let mut table = CsvTable::new(["x", "xp", "re", "im"]);
    if args.stationary {
        for &x in &xs {
            for &xp in &xs {
                let re = stationary_density_matrix_element(&params, &thermal, x, xp);
                table.push_nums(&[x, xp, re, 0.0]);
            }
        }
        return Ok(table);
    }

    let init = cfg.initial()?;
    let t = pick(args.t, sec.t, "--t")?;
    let state0 = build_initial_state(init.delta, init.r, init.x0, init.p0, &params)?;
    let env = gibbs_coefficients(&params, &thermal)?;
    let state = propagate_moments(&state0, &env, &params, t)?;
    for &x in &xs {
        for &xp in &xs {
            let z = density_matrix_element(&state, x, xp, params.hbar)?;
            table.push_nums(&[x, xp, z.re, z.im]);
        }
    }
    Ok(table)
}

pub fn cmd_timescales(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let params = cfg.oscillator()?;
    let thermal = cfg.thermal()?;
    let init = cfg.initial()?;
    checked_single_mode(&params, &thermal)?;
    let (delta, r) = (init.delta, init.r);

    let mut table = CsvTable::new(["name", "value"]);
    let mut row = |name: &str, v: f64| table.push(vec![name.to_string(), fmt_num(v)]);
    row(
        "t_deco_general",
        decoherence_time(delta, r, &params, &thermal, DecoherenceRegime::General)?,
    );
    if r == 0.0 {
        row(
            "t_deco_r0",
            decoherence_time(delta, r, &params, &thermal, DecoherenceRegime::RZero)?,
        );
    }
    if thermal.c == 1.0 {
        row(
            "t_deco_zero_t",
            decoherence_time(delta, r, &params, &thermal, DecoherenceRegime::ZeroT)?,
        );
    }
    if thermal.c >= HIGH_T_MIN_C {
        row(
            "t_deco_high_t",
            decoherence_time(delta, r, &params, &thermal, DecoherenceRegime::HighT)?,
        );
        row(
            "t_d",
            thermal_fluctuation_time(delta, r, &params, &thermal)?,
        );
    }
    row("t_rel", relaxation_time(&params)?);
    Ok(table)
}

fn dynamics(
    cfg: &RunConfig,
    allow_unphysical: bool,
) -> Result<(OscillatorParams, TwoModeDynamics), CliError> {
    let params = cfg.oscillator()?;
    let env = cfg.two_mode_env()?;
    let report = validate_two_mode(&env);
    let dynamics = if report.all_passed() {
        TwoModeDynamics::new(&env, &params)?
    } else if allow_unphysical {
        warn!("{}", physical("two-mode environment", &report));
        TwoModeDynamics::new_unchecked(&env, &params)?
    } else {
        return Err(physical("two-mode environment", &report));
    };
    Ok((params, dynamics))
}

pub fn cmd_asymptotic(cfg: &RunConfig, allow_unphysical: bool) -> Result<CsvTable, CliError> {
    let (params, dyn_) = dynamics(cfg, allow_unphysical)?;
    let env = cfg.two_mode_env()?;
    let sigma = dyn_.asymptotic;
    let s = simon_s(sigma.matrix())?;
    let det_c = det_entanglement_block(&env, &params)?;

    let mut table = CsvTable::new(["quantity", "value"]);
    for (name, v) in COVARIANCE_ENTRY_NAMES.iter().zip(sigma.entries()) {
        table.push(vec![name.to_string(), fmt_num(v)]);
    }
    table.push(vec!["det_c".into(), fmt_num(det_c)]);
    table.push(vec!["s".into(), fmt_num(s)]);
    if det_c <= 0.0 {
        match simon_special(&env, &params) {
            Ok(special) => {
                if (special - s).abs() > S_AGREEMENT_TOL * s.abs().max(1.0) {
                    return Err(CliError::Physical(format!(
                        "general S = {s} and special-family S = {special} disagree"
                    )));
                }
                table.push(vec!["s_special".into(), fmt_num(special)]);
            }
            Err(Error::Environment(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    table.push(vec!["residual".into(), fmt_num(dyn_.residual())]);
    table.push(vec![
        "verdict".into(),
        Separability::classify(s).as_str().into(),
    ]);
    Ok(table)
}

pub fn cmd_propagate(cfg: &RunConfig, args: &PropagateArgs) -> Result<CsvTable, CliError> {
    let (params, dyn_) = dynamics(cfg, args.allow_unphysical)?;
    let sec = cfg.propagate.unwrap_or_default();
    let t_max = pick(args.t_max, sec.t_max, "--t-max")?;
    let steps = pick(args.steps, sec.steps, "--steps")?;
    if !(t_max >= 0.0) || steps == 0 {
        return Err(CliError::Config(format!(
            "need --t-max >= 0 and --steps >= 1, got {t_max}, {steps}"
        )));
    }
    let sigma0 = if args.from_asymptotic {
        dyn_.asymptotic
    } else {
        let init = cfg.initial()?;
        let one = build_initial_state(init.delta, init.r, init.x0, init.p0, &params)?;
        CovarianceMatrix4::product(&one, &one)
    };

    let mut header = vec!["t"];
    header.extend(COVARIANCE_ENTRY_NAMES);
    header.push("s");
    let mut table = CsvTable::new(header);
    for k in 0..=steps {
        let t = t_max * k as f64 / steps as f64;
        let sigma = dyn_.propagate(&sigma0, t)?;
        let mut row = vec![t];
        row.extend(sigma.entries());
        row.push(simon_s(sigma.matrix())?);
        table.push_nums(&row);
    }
    Ok(table)
}

pub fn cmd_scan(cfg: &RunConfig, args: &ScanArgs) -> Result<CsvTable, CliError> {
    let params = cfg.oscillator()?;
    let sec = cfg.scan.unwrap_or_default();
    let dxy = cfg.two_mode_env.map_or(0.0, |e| e.dxy);
    let dxx = grid(
        pick(args.dxx_min, sec.dxx_min, "--dxx-min")?,
        pick(args.dxx_max, sec.dxx_max, "--dxx-max")?,
        pick(args.dxx_steps, sec.dxx_steps, "--dxx-steps")?,
        "Dxx",
    )?;
    let dxpy = grid(
        pick(args.dxpy_min, sec.dxpy_min, "--dxpy-min")?,
        pick(args.dxpy_max, sec.dxpy_max, "--dxpy-max")?,
        pick(args.dxpy_steps, sec.dxpy_steps, "--dxpy-steps")?,
        "Dxpy",
    )?;

    let mut table = CsvTable::new(["Dxx", "Dxpy", "S", "separable", "in_window", "status"]);
    for rec in scan_s(&params, dxy, &dxx, &dxpy)? {
        table.push(vec![
            fmt_num(rec.dxx),
            fmt_num(rec.dxpy),
            fmt_num(rec.s),
            rec.separability.as_str().into(),
            rec.in_window.map_or("na", |w| w.as_str()).into(),
            rec.status.as_str().into(),
        ]);
    }
    Ok(table)
}
