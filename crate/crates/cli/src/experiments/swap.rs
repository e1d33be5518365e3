use std::f64::consts::PI;

use rayon::prelude::*;
use resex_core::metrics::{fidelity_swap_variant, gate_fidelity, SwapVariant};
use resex_core::models::{swap_rwa_hamiltonian, ChainParams};
use resex_core::operator::{pauli_coefficients, swap_gate, HermitianEigen};
use resex_core::PauliWord;

use super::{tag, Context};
use crate::config::Params;
use crate::svg::LinePlot;
use crate::table::Table;
use crate::CliError;

type CoreResult<T> = Result<T, resex_core::Error>;

/// The swapped pair sits on sites 1 and 2; the outer sites are detuned far
/// enough that their residual bonds stay Ising.
fn block(p: &Params, j: f64, j0: f64) -> CoreResult<ChainParams> {
    let base = p.num("bz_base");
    ChainParams::resonant(
        vec![base + 0.4e9, base, base + p.num("dbz"), base + 0.6e9],
        vec![j0, j, j0],
    )
}

struct Swap {
    params: ChainParams,
    eigen: HermitianEigen,
}

impl Swap {
    fn new(p: &Params, j: f64, j0: f64) -> CoreResult<Self> {
        let params = block(p, j, j0)?;
        let eigen = HermitianEigen::new(&swap_rwa_hamiltonian(&params, 1, false)?)?;
        Ok(Self { params, eigen })
    }

    /// Fidelity of the 16 x 16 exponential against the ideal SWAP.
    fn numeric(&self, t: f64) -> CoreResult<f64> {
        gate_fidelity(&self.eigen.propagator(t), &swap_gate(4, 1)?)
    }

    fn closed(&self, t: f64, v: SwapVariant) -> CoreResult<f64> {
        fidelity_swap_variant(&self.params, 1, t, v)
    }

    /// `|c_P|` of the error matrix `U SWAP^dagger` for every word, in word order.
    fn error_magnitudes(&self, t: f64) -> CoreResult<Vec<f64>> {
        let e = &self.eigen.propagator(t) * &swap_gate(4, 1)?.dagger();
        Ok(pauli_coefficients(&e).iter().map(|c| c.norm()).collect())
    }
}

/// SWAP of the middle pair of a four-site block with residual flanking
/// exchange `J0`. Writes the closed-form and numeric fidelities against
/// time for each `J0` in `j0_list`, both against the swept `J0` at the SWAP
/// time `pi / j` (including the alternative closed forms), and the error
/// coefficients at `j` and `2 j`.
pub fn run_swap(ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.params();
    let j = p.num("j");
    let t_swap = PI / j;
    let n_t = p.num("t_points") as usize;
    let t_max = p.num("t_max_rel") * t_swap;
    let times: Vec<f64> = (0..n_t).map(|i| t_max * i as f64 / (n_t - 1) as f64).collect();

    let j0s = p.list("j0_list");
    let traces = j0s
        .iter()
        .map(|j0| Swap::new(&p, j, *j0))
        .collect::<CoreResult<Vec<_>>>()?;
    let mut header = vec!["t_s".to_string()];
    for j0 in &j0s {
        header.extend([format!("F_closed_J0{}", tag(*j0)), format!("F_numeric_J0{}", tag(*j0))]);
    }
    let mut time_table = Table::new(header);
    for t in &times {
        let mut row = vec![*t];
        for s in &traces {
            row.extend([s.closed(*t, SwapVariant::Derived)?, s.numeric(*t)?]);
        }
        time_table.push_nums(&row);
    }

    let sweep = ctx.sweep();
    let rows = sweep
        .par_iter()
        .map(|&j0| -> CoreResult<Vec<f64>> {
            let s = Swap::new(&p, j, j0)?;
            let mut row = vec![j0, s.numeric(t_swap)?];
            for v in SwapVariant::ALL {
                row.push(s.closed(t_swap, v)?);
            }
            Ok(row)
        })
        .collect::<CoreResult<Vec<_>>>()?;
    let mut header = vec!["J0_rad_per_s".to_string(), "F_numeric".to_string()];
    header.extend(SwapVariant::ALL.iter().map(|v| format!("F_{}", v.to_string().replace('-', "_"))));
    let mut j0_table = Table::new(header);
    for r in &rows {
        j0_table.push_nums(r);
    }

    let j0 = p.num("error_j0");
    let at_j = Swap::new(&p, j, j0)?.error_magnitudes(t_swap)?;
    let at_2j = Swap::new(&p, 2.0 * j, j0)?.error_magnitudes(0.5 * t_swap)?;
    let mut err_table = Table::new(["word", "abs_c_J", "abs_c_2J"]);
    for (i, (a, b)) in at_j.iter().zip(&at_2j).enumerate() {
        err_table.push(vec![PauliWord::from_index(4, i).to_string().into(), (*a).into(), (*b).into()]);
    }

    let time_csv = ctx.write_csv("_time", &time_table)?;
    let j0_csv = ctx.write_csv("_j0", &j0_table)?;
    let err_csv = ctx.write_csv("_errors", &err_table)?;
    ctx.line_svg(
        "_time",
        &time_csv,
        &LinePlot {
            title: "SWAP fidelity against time".into(),
            x: "t_s".into(),
            ys: time_table.header[1..].to_vec(),
            markers: vec![("pi/J".into(), t_swap)],
            ..LinePlot::default()
        },
    )?;
    ctx.line_svg(
        "_j0",
        &j0_csv,
        &LinePlot {
            title: "SWAP fidelity against residual exchange".into(),
            x: "J0_rad_per_s".into(),
            ys: vec!["F_numeric".into(), "F_derived".into()],
            ..LinePlot::default()
        },
    )?;
    ctx.bar_svg("_errors", &err_csv, "word", "abs_c_J", "SWAP error-matrix coefficients")
}
