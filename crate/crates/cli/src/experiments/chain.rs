use rayon::prelude::*;
use resex_core::metrics::{fidelity_y_chain, gate_fidelity, rescale_fidelity};
use resex_core::models::{chain_rwa_hamiltonian, ChainParams, ResonanceMap, RwaLimits};
use resex_core::operator::{expm_hermitian, pauli_matrix};
use resex_core::scheduling::{driven_y_optimum, mean_time_heuristic, optimal_time, OptimizeOptions};
use resex_core::{Operator, Pauli, PauliWord};

use super::{tag, Context};
use crate::config::Params;
use crate::svg::LinePlot;
use crate::table::Table;
use crate::CliError;

type CoreResult<T> = Result<T, resex_core::Error>;

/// Fidelities of the simultaneous-drive comparison are quoted in this dimension.
pub const REPORT_DIM: f64 = 1024.0;

fn chain(p: &Params, n: usize, j0: f64, b: f64, driven: impl Fn(usize) -> bool) -> CoreResult<ChainParams> {
    let mut c = ChainParams::graded(n, p.num("bz_base"), p.num("bz_step"), j0)?;
    for (i, by) in c.by1.iter_mut().enumerate() {
        if driven(i) {
            *by = b;
        }
    }
    Ok(c)
}

/// Best time and fidelity of the middle-site Y gate on a three-site chain.
fn middle_optimum(c: &ChainParams) -> CoreResult<(f64, f64, f64)> {
    let t_mean = mean_time_heuristic(c.by1[1], c.jlist[0])?;
    let (t, f) = optimal_time(
        |t| fidelity_y_chain(c, 1, t).unwrap_or(f64::NAN),
        (0.5 * t_mean, 1.5 * t_mean),
        &OptimizeOptions::default(),
    )?;
    Ok((t_mean, t, f))
}

/// Y gate on the middle site of a three-site chain with uniform residual
/// exchange `J0`. Writes the infidelity against time for each `J0` in
/// `j0_list` (with the mean-time and optimal-time markers), and the optimal
/// time and infidelity against the swept `J0` for each amplitude in `b_list`.
pub fn run_chain_ygate(ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.params();
    let b = p.num("b");
    let j0s = p.list("j0_list");
    let bs = p.list("b_list");
    let n_t = p.num("t_points") as usize;
    let t_max = p.num("t_max");
    let times: Vec<f64> = (0..n_t).map(|i| t_max * i as f64 / (n_t - 1) as f64).collect();

    let traces = j0s
        .iter()
        .map(|j0| chain(&p, 3, *j0, b, |i| i == 1))
        .collect::<CoreResult<Vec<_>>>()?;
    let mut header = vec!["t_s".to_string()];
    header.extend(j0s.iter().map(|j| format!("infid_J0{}", tag(*j))));
    let mut trace_table = Table::new(header);
    for t in &times {
        let mut row = vec![*t];
        for c in &traces {
            row.push(1.0 - fidelity_y_chain(c, 1, *t)?);
        }
        trace_table.push_nums(&row);
    }
    let mut marker_table = Table::new(["J0_rad_per_s", "t_mean_s", "t_opt_s", "infid_opt"]);
    for (j0, c) in j0s.iter().zip(&traces) {
        let (t_mean, t, f) = middle_optimum(c)?;
        marker_table.push_nums(&[*j0, t_mean, t, 1.0 - f]);
    }

    let j0_sweep = ctx.sweep();
    let rows = j0_sweep
        .par_iter()
        .map(|&j0| -> CoreResult<Vec<f64>> {
            let mut row = vec![j0];
            for b in &bs {
                let (t_mean, t, f) = middle_optimum(&chain(&p, 3, j0, *b, |i| i == 1)?)?;
                row.extend([t_mean, t, 1.0 - f]);
            }
            Ok(row)
        })
        .collect::<CoreResult<Vec<_>>>()?;
    let mut header = vec!["J0_rad_per_s".to_string()];
    for b in &bs {
        let b = tag(*b);
        header.extend([format!("t_mean_B{b}_s"), format!("t_opt_B{b}_s"), format!("infid_opt_B{b}")]);
    }
    let mut opt_table = Table::new(header);
    for r in &rows {
        opt_table.push_nums(r);
    }

    let trace_csv = ctx.write_csv("_time", &trace_table)?;
    let marker_csv = ctx.write_csv("_markers", &marker_table)?;
    let opt_csv = ctx.write_csv("_optimum", &opt_table)?;
    if ctx.svg {
        let m = Table::from_csv(&marker_csv).map_err(CliError::Render)?;
        let js = m.numbers("J0_rad_per_s").unwrap_or_default();
        let mut markers = Vec::new();
        for (col, what) in [("t_mean_s", "mean"), ("t_opt_s", "opt")] {
            for (j, t) in js.iter().zip(m.numbers(col).unwrap_or_default()) {
                markers.push((format!("{what} J0={}", tag(*j)), t));
            }
        }
        ctx.line_svg(
            "_time",
            &trace_csv,
            &LinePlot {
                title: "Middle-site Y gate infidelity against time".into(),
                x: "t_s".into(),
                ys: trace_table.header[1..].to_vec(),
                log_y: true,
                markers,
                ..LinePlot::default()
            },
        )?;
        let cols = |prefix: &str, suffix: &str| -> Vec<String> {
            bs.iter().map(|b| format!("{prefix}{}{suffix}", tag(*b))).collect()
        };
        ctx.line_svg(
            "_optimum_infidelity",
            &opt_csv,
            &LinePlot {
                title: "Optimal middle-site Y gate infidelity".into(),
                x: "J0_rad_per_s".into(),
                ys: cols("infid_opt_B", ""),
                log_x: true,
                log_y: true,
                ..LinePlot::default()
            },
        )?;
        ctx.line_svg(
            "_optimum_time",
            &opt_csv,
            &LinePlot {
                title: "Optimal middle-site Y gate time".into(),
                x: "J0_rad_per_s".into(),
                ys: cols("t_opt_B", "_s"),
                log_x: true,
                log_y: true,
                ..LinePlot::default()
            },
        )?;
    }
    Ok(())
}

/// Optimized fidelities of three ways to apply `Y` on every site of an
/// `n`-site chain, in the chain's own dimension:
///
/// * `IYI`: only the odd inner sites are driven and only they should flip;
/// * `YYY`: every site is driven at once;
/// * `YIY.IYI`: the `IYI` pulse, then a pulse on the remaining inner sites,
///   with the two end sites flipped by ideal `Y` gates.
///
/// Returns `[F_IYI, F_YYY, F_YIYxIYI, t_IYI, t_YYY, t_step2]`.
#[allow(clippy::manual_is_multiple_of)] // MSRV predates is_multiple_of
pub fn simultaneous_y(p: &Params, n: usize, j0: f64) -> CoreResult<[f64; 6]> {
    let b = p.num("b");
    let period = 2.0 * std::f64::consts::PI / b;
    let bracket = (0.5 * period, 1.5 * period);
    let opts = OptimizeOptions::default();
    let inner_odd = |i: usize| i % 2 == 1 && i + 1 < n;
    let inner_even = |i: usize| i % 2 == 0 && i > 0 && i + 1 < n;

    let all = chain(p, n, j0, b, |_| true)?;
    let (t_all, f_all) = driven_y_optimum(&all, bracket, &opts)?;
    let first = chain(p, n, j0, b, inner_odd)?;
    let (t1, f1) = driven_y_optimum(&first, bracket, &opts)?;

    let propagator = |c: &ChainParams, t: f64| -> CoreResult<Operator> {
        let map = ResonanceMap::classify(c, &RwaLimits::default(), false)?;
        expm_hermitian(&chain_rwa_hamiltonian(c, &map)?, t)
    };
    let mut u = propagator(&first, t1)?;
    let mut t2 = 0.0;
    if (0..n).any(inner_even) {
        let second = chain(p, n, j0, b, inner_even)?;
        t2 = driven_y_optimum(&second, bracket, &opts)?.0;
        u = propagator(&second, t2)?.compose(&u)?;
    }
    let ends = pauli_matrix(&PauliWord::with_factors(n, &[(0, Pauli::Y), (n - 1, Pauli::Y)])?)?;
    u = ends.compose(&u)?;
    let every: Vec<(usize, Pauli)> = (0..n).map(|i| (i, Pauli::Y)).collect();
    let target = pauli_matrix(&PauliWord::with_factors(n, &every)?)?;
    let f_seq = gate_fidelity(&u, &target)?;
    Ok([f1, f_all, f_seq, t1, t_all, t2])
}

/// Fidelity against `J0` of the `IYI`, `YYY` and `YIY.IYI` constructions for
/// each chain length in `n_list`, rescaled to dimension 1024.
pub fn run_chain_simul_y(ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.params();
    let ns: Vec<usize> = p.list("n_list").iter().map(|n| *n as usize).collect();
    let j0s = ctx.sweep();
    let jobs: Vec<(usize, f64)> = j0s
        .iter()
        .flat_map(|j| ns.iter().map(move |n| (*n, *j)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|(n, j0)| simultaneous_y(&p, *n, *j0))
        .collect::<CoreResult<Vec<_>>>()?;

    let mut header = vec!["J0_rad_per_s".to_string()];
    for n in &ns {
        header.extend([
            format!("F_IYI_N{n}"),
            format!("F_YYY_N{n}"),
            format!("F_YIYxIYI_N{n}"),
            format!("t_IYI_N{n}_s"),
            format!("t_YYY_N{n}_s"),
            format!("t_step2_N{n}_s"),
        ]);
    }
    let mut table = Table::new(header);
    for (k, j0) in j0s.iter().enumerate() {
        let mut row = vec![*j0];
        for (i, n) in ns.iter().enumerate() {
            let r = results[k * ns.len() + i];
            let d = (1u64 << n) as f64;
            row.extend(r[..3].iter().map(|f| rescale_fidelity(*f, d, REPORT_DIM)));
            row.extend(&r[3..]);
        }
        table.push_nums(&row);
    }
    let csv = ctx.write_csv("", &table)?;
    let ys = ns
        .iter()
        .flat_map(|n| ["IYI", "YYY", "YIYxIYI"].map(|g| format!("F_{g}_N{n}")))
        .collect();
    ctx.line_svg(
        "",
        &csv,
        &LinePlot {
            title: "Y on every site, fidelity at d = 1024".into(),
            x: "J0_rad_per_s".into(),
            ys,
            ..LinePlot::default()
        },
    )
}
