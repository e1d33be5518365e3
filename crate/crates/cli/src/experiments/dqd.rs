use std::f64::consts::PI;

use rayon::prelude::*;
use resex_core::evolution::{propagate_lab_trajectory, u_two_drive};
use resex_core::metrics::gate_fidelity;
use resex_core::models::{DqdParams, RwaLimits};
use resex_core::noise::mc_infidelity;
use resex_core::operator::pauli_coefficients;
use resex_core::scheduling::{
    schedule_zx_on, tau_iy, Device, GateTarget, ParamKey, PulseSegment, Schedule,
};
use resex_core::{Operator, PauliWord};

use super::{tag, Context};
use crate::config::{EvaluatorChoice, Params};
use crate::svg::LinePlot;
use crate::table::{Cell, Table};
use crate::CliError;

const COEFF_WORDS: [&str; 6] = ["YI", "IY", "XX", "YY", "ZZ", "II"];

fn device(p: &Params) -> DqdParams {
    let (bz_l, bz_r) = (p.num("bzL"), p.num("bzR"));
    DqdParams {
        bz_l,
        bz_r,
        by0_l: p.num("by0L"),
        by0_r: p.num("by0R"),
        by1_l: p.num("by1L"),
        by1_r: p.num("by1R"),
        by2_l: p.num("by2L"),
        by2_r: p.num("by2R"),
        phi1: p.num("phi1"),
        phi2: p.num("phi2"),
        omega1: p.opt_num("omega1").unwrap_or(bz_l),
        omega2: p.opt_num("omega2").unwrap_or(bz_r),
        j: p.num("j"),
    }
}

fn magnitudes(u: &Operator, idx: &[usize]) -> Vec<f64> {
    let c = pauli_coefficients(u);
    idx.iter().map(|i| c[*i].norm()).collect()
}

/// `|c_P(t)|` of the two-drive propagator for the words `YI, IY, XX, YY, ZZ, II`,
/// optionally next to the lab-frame integrator, plus a marker table holding
/// `2 pi / B` and the quarter-turn time `pi / sqrt(B^2 + J^2)`.
pub fn run_dqd_coeffs(ctx: &mut Context) -> Result<(), CliError> {
    let dev = device(&ctx.params());
    // The closed form assumes both drives sit on their qubit's splitting.
    let tol = RwaLimits::default().resonance_rel_tol;
    if !dev.is_resonant(tol) {
        return Err(resex_core::Error::OffResonance(format!(
            "omega1 = {:e} vs bzL = {:e}, omega2 = {:e} vs bzR = {:e}",
            dev.omega1, dev.bz_l, dev.omega2, dev.bz_r
        ))
        .into());
    }
    let times = ctx.sweep();
    let idx: Vec<usize> = COEFF_WORDS
        .iter()
        .map(|w| w.parse::<PauliWord>().map(|w| w.index()))
        .collect::<Result<_, _>>()?;

    let analytic = times
        .par_iter()
        .map(|t| u_two_drive(&dev, *t).map(|u| magnitudes(&u, &idx)))
        .collect::<Result<Vec<_>, _>>()?;
    let oracle = if ctx.evaluator == EvaluatorChoice::Oracle {
        let us = propagate_lab_trajectory(&dev.lab_model()?, &times, &ctx.propagation())?;
        Some(us.iter().map(|u| magnitudes(u, &idx)).collect::<Vec<_>>())
    } else {
        None
    };

    let mut header = vec!["t_s".to_string()];
    header.extend(COEFF_WORDS.iter().map(|w| format!("abs_{w}")));
    if oracle.is_some() {
        header.extend(COEFF_WORDS.iter().map(|w| format!("abs_{w}_oracle")));
    }
    let mut table = Table::new(header);
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![*t];
        row.extend(&analytic[i]);
        if let Some(o) = &oracle {
            row.extend(&o[i]);
        }
        table.push_nums(&row);
    }

    let mut markers = Table::new(["marker", "t_s"]);
    let b = if dev.by2_r != 0.0 { dev.by2_r } else { dev.by1_l };
    if b != 0.0 {
        markers.push(vec!["2pi/B".into(), (2.0 * PI / b.abs()).into()]);
    }
    if dev.omega_single() != 0.0 {
        markers.push(vec!["pi/Omega2".into(), (PI / dev.omega_single()).into()]);
    }

    let csv = ctx.write_csv("", &table)?;
    let marker_csv = ctx.write_csv("_markers", &markers)?;
    if ctx.svg {
        let m = Table::from_csv(&marker_csv).map_err(CliError::Render)?;
        let spec = LinePlot {
            title: "Pauli coefficients of the two-drive propagator".into(),
            x: "t_s".into(),
            ys: table.header[1..].to_vec(),
            markers: m
                .texts("marker")
                .unwrap_or_default()
                .into_iter()
                .zip(m.numbers("t_s").unwrap_or_default())
                .collect(),
            ..LinePlot::default()
        };
        ctx.line_svg("", &csv, &spec)?;
    }
    Ok(())
}

fn single_drive_schedule(base: &DqdParams, b: f64) -> Result<Schedule, resex_core::Error> {
    Schedule::new(
        Device::Dqd(base.clone()),
        vec![PulseSegment::wait(tau_iy(b, base.j, 0)?).with(ParamKey::By2R, b)],
        GateTarget::Pauli { word: "IY".parse()? },
        None,
    )
}

/// Per exchange `J`: the single-drive `IY` gate for every amplitude in
/// `b_list` and the ZX-composed `IY` gate at `B = J`, each as gate time,
/// noiseless infidelity and Monte Carlo infidelity under `sigma_J = sigma_rel J`.
pub fn run_dqd_fidelity_scan(ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.params();
    let bs = p.list("b_list");
    let wait_n = p.num("zx_wait_n") as u32;
    let template = DqdParams {
        by0_l: p.num("by0L"),
        by0_r: p.num("by0R"),
        ..DqdParams::resonant(p.num("bzL"), p.num("bzR"), 0.0)
    };
    let js = ctx.sweep();
    let ev = ctx.evaluator();
    let noise = ctx.noise();

    let rows = js
        .par_iter()
        .map(|&j| -> Result<Vec<f64>, resex_core::Error> {
            let base = DqdParams { j, ..template.clone() };
            let mut schedules = bs
                .iter()
                .map(|b| single_drive_schedule(&base, *b))
                .collect::<Result<Vec<_>, _>>()?;
            schedules.push(schedule_zx_on(&base, j, 0, 0, wait_n)?);
            let (mut times, mut clean, mut noisy) = (Vec::new(), Vec::new(), Vec::new());
            for s in &schedules {
                let target = s.target.operator()?;
                times.push(s.duration());
                clean.push((1.0 - gate_fidelity(&s.unitary(&ev)?, &target)?).max(0.0));
                let mc = mc_infidelity(s, &target, &noise, &ev)?;
                noisy.extend([mc.mean_infidelity, mc.stderr]);
            }
            Ok([vec![j], times, clean, noisy].concat())
        })
        .collect::<Result<Vec<_>, _>>()?;

    let labels: Vec<String> = bs
        .iter()
        .map(|b| format!("iy_B{}", tag(*b)))
        .chain(["zx".to_string()])
        .collect();
    let mut header = vec!["J_rad_per_s".to_string()];
    header.extend(labels.iter().map(|l| format!("t_{l}_s")));
    header.extend(labels.iter().map(|l| format!("infid_{l}")));
    for l in &labels {
        header.extend([format!("mc_{l}"), format!("mc_{l}_stderr")]);
    }
    let mut table = Table::new(header);
    for r in &rows {
        table.push(r.iter().map(|v| Cell::Num(*v)).collect());
    }
    let csv = ctx.write_csv("", &table)?;

    let mut ys: Vec<String> = labels.iter().map(|l| format!("infid_{l}")).collect();
    ys.extend(labels.iter().map(|l| format!("mc_{l}")));
    ctx.line_svg(
        "_infidelity",
        &csv,
        &LinePlot {
            title: "IY gate infidelity against exchange".into(),
            x: "J_rad_per_s".into(),
            ys,
            log_x: true,
            log_y: true,
            ..LinePlot::default()
        },
    )?;
    ctx.line_svg(
        "_times",
        &csv,
        &LinePlot {
            title: "IY gate duration against exchange".into(),
            x: "J_rad_per_s".into(),
            ys: labels.iter().map(|l| format!("t_{l}_s")).collect(),
            log_x: true,
            log_y: true,
            ..LinePlot::default()
        },
    )
}
