use std::f64::consts::PI;

use resex_core::metrics::GateReport;
use resex_core::models::DqdParams;
use resex_core::operator::pauli_coefficients;
use resex_core::scheduling::{
    schedule_idle_by_drive, schedule_iy_half, schedule_three_step_y, schedule_zx, tau_iy,
    yy_exchange_condition, Device, GateTarget, ParamKey, PulseSegment, Schedule,
};
use resex_core::PauliWord;

use super::Context;
use crate::config::Params;
use crate::table::{Cell, Table};
use crate::CliError;

type CoreResult<T> = Result<T, resex_core::Error>;

fn right_drive(j: f64, b: f64, duration: f64, target: GateTarget) -> CoreResult<Schedule> {
    let base = DqdParams::resonant(20e9, 20.2e9, j);
    Schedule::new(
        Device::Dqd(base),
        vec![PulseSegment::wait(duration).with(ParamKey::By2R, b)],
        target,
        None,
    )
}

/// The schedule of a built-in gate label.
pub fn builtin_gate(p: &Params, gate: &str) -> CoreResult<Schedule> {
    let (b, j) = (p.num("b"), p.num("j"));
    let iy: PauliWord = "IY".parse()?;
    match gate {
        "y-half" => right_drive(
            j,
            b,
            PI / b.hypot(j),
            GateTarget::Rotation {
                word: iy,
                angle: PI / 2.0,
            },
        ),
        "iy" => right_drive(j, b, tau_iy(b, j, 0)?, GateTarget::Pauli { word: iy }),
        "zx" => schedule_zx(b, 0, 0),
        "iy-half" => schedule_iy_half(b, 0),
        "idle-drive" => schedule_idle_by_drive(b, j, 1),
        "three-step" => schedule_three_step_y(p.num("j0"), 2, 5, 9),
        "yy" => {
            let c = yy_exchange_condition(2.0 * b, 0.0, 2, 1)?;
            Schedule::new(
                Device::Dqd(DqdParams::resonant(20e9, 20.2e9, c.j)),
                vec![PulseSegment::wait(c.tau)
                    .with(ParamKey::By1L, b)
                    .with(ParamKey::By2R, b)],
                GateTarget::Pauli { word: "YY".parse()? },
                None,
            )
        }
        other => Err(resex_core::Error::UnknownGate(other.to_string())),
    }
}

/// Full quality report of one gate: the configured schedule if there is
/// one, else the built-in `gate`.
///
/// Tables use word order: words are read as base-4 numbers with `I < X < Y < Z`
/// and the leftmost factor (qubit 0) most significant.
pub fn run_report(ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.params();
    let (schedule, name) = match &ctx.cfg.schedule {
        Some(s) => (s.clone(), s.target.to_string()),
        None => {
            let gate = p.text("gate");
            (builtin_gate(&p, &gate)?, gate)
        }
    };
    let actual = schedule.unitary(&ctx.evaluator())?;
    let ideal = schedule.target.operator()?;
    let report = GateReport::new(name, &actual, &ideal)?;
    let n = report.num_qubits();
    let label = |i: usize| -> Cell { PauliWord::from_index(n, i).to_string().into() };

    let mut matrices = Table::new(["matrix", "row", "col", "value"]);
    for (kind, m) in [("ptm", &report.ptm), ("ptm_ideal", &report.ptm_ideal), ("errgen", &report.errgen)] {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                matrices.push(vec![kind.into(), label(r), label(c), m[(r, c)].into()]);
            }
        }
    }

    let e = &actual * &ideal.dagger();
    let mut coeffs = Table::new(["word", "re", "im", "abs"]);
    for (i, c) in pauli_coefficients(&e).iter().enumerate() {
        coeffs.push(vec![label(i), c.re.into(), c.im.into(), c.norm().into()]);
    }

    let mut summary = Table::new(["quantity", "value"]);
    summary.push(vec!["fidelity".into(), report.fidelity.into()]);
    summary.push(vec!["fidelity_bound".into(), report.bound.into()]);
    summary.push(vec!["duration_s".into(), schedule.duration().into()]);
    summary.push(vec![
        "exact_analytic".into(),
        (if schedule.exact { 1.0 } else { 0.0 }).into(),
    ]);
    if let Some(f) = schedule.predicted_fidelity {
        summary.push(vec!["predicted_fidelity".into(), f.into()]);
    }

    ctx.write_csv("_matrices", &matrices)?;
    let coeff_csv = ctx.write_csv("_coeffs", &coeffs)?;
    ctx.write_csv("_summary", &summary)?;
    ctx.bar_svg(
        "_coeffs",
        &coeff_csv,
        "word",
        "abs",
        &format!("Error-matrix coefficients of {}", report.target_name),
    )
}
