use crate::error::{Error, Result};
use crate::models::{ChainParams, DqdParams, RwaLimits};
use crate::operator::{im, pauli_sum, re, Operator, PauliString, PauliWord, C64};

/// `sin(omega * t / div) / omega`, continuous at `omega = 0`.
pub(crate) fn sin_over(omega: f64, t: f64, div: f64) -> f64 {
    let x = omega * t / div;
    if x.abs() < 1e-6 {
        t / div * (1.0 - x * x / 6.0)
    } else {
        x.sin() / omega
    }
}

fn terms(n: usize, list: &[(&[(usize, char)], C64)]) -> Result<Operator> {
    let strings = list
        .iter()
        .map(|(factors, c)| {
            let fs: Vec<_> = factors
                .iter()
                .map(|(site, ch)| {
                    let p = match ch {
                        'X' => crate::operator::Pauli::X,
                        'Y' => crate::operator::Pauli::Y,
                        _ => crate::operator::Pauli::Z,
                    };
                    (*site, p)
                })
                .collect();
            Ok(PauliString::new(PauliWord::with_factors(n, &fs)?, *c))
        })
        .collect::<Result<Vec<_>>>()?;
    pauli_sum(&strings)
}

/// Undriven evolution in the frame of each qubit's own splitting:
/// `(1 + e^{iJt/2})/2 II + (1 - e^{iJt/2})/2 ZZ`.
pub fn u0_dqd(j: f64, t: f64) -> Operator {
    let e = C64::from_polar(1.0, 0.5 * j * t);
    Operator::from_diagonal(&[re(1.0), e, e, re(1.0)])
}

/// Undriven evolution including the flip-flop terms, in the frame rotating at
/// the mean splitting of both dots, with `omega = sqrt(dbz^2 + J^2)`.
pub fn u0_dqd_full(j: f64, dbz: f64, t: f64) -> Operator {
    let om = dbz.hypot(j);
    let e = C64::from_polar(1.0, 0.5 * j * t);
    let c = (0.5 * om * t).cos();
    // sin(omega t / 2) / omega
    let s = sin_over(om, t, 2.0);
    let zi = e * im(0.5 * dbz * s);
    let ii = (re(1.0) + e * c) * 0.5;
    let zz = (re(1.0) - e * c) * 0.5;
    let flip = e * im(-0.5 * j * s);
    // Diagonal: II + ZZ on parallel spins, II - ZZ +- 2 ZI on antiparallel spins.
    let mut u = Operator::from_diagonal(&[ii + zz, ii - zz + zi * 2.0, ii - zz - zi * 2.0, ii + zz]);
    // XX + YY = 2 (|ud><du| + |du><ud|).
    u.matrix_mut()[(1, 2)] = flip * 2.0;
    u.matrix_mut()[(2, 1)] = flip * 2.0;
    u
}

/// Evolution under two resonant drives with arbitrary phases (left dot by
/// `by1L` at `phi1`, right dot by `by2R` at `phi2`) in the frame of each
/// qubit's own splitting.
pub fn u_two_drive(p: &DqdParams, t: f64) -> Result<Operator> {
    p.validate()?;
    let (ey, dby, j) = (p.ey(), p.delta_by(), p.j);
    let (op, om) = (p.omega_y_plus(), p.omega_y_minus());
    let (fp, fm) = (sin_over(op, t, 4.0), sin_over(om, t, 4.0));
    let (gp, gm) = ((0.25 * op * t).cos(), (0.25 * om * t).cos());
    let (s1, c1) = p.phi1.sin_cos();
    let (s2, c2) = p.phi2.sin_cos();
    let left = ey * fp - dby * fm;
    let right = ey * fp + dby * fm;
    let (dg, df) = (gp - gm, j * (fp - fm));
    let u = terms(
        2,
        &[
            (&[(0, 'X')], im(s1 * left)),
            (&[(1, 'X')], im(s2 * right)),
            (&[(0, 'Y')], im(-c1 * left)),
            (&[(1, 'Y')], im(-c2 * right)),
            (&[(0, 'X'), (1, 'X')], C64::new(s1 * s2 * dg, c1 * c2 * df)),
            (&[(0, 'Y'), (1, 'Y')], C64::new(c1 * c2 * dg, s1 * s2 * df)),
            (&[(0, 'X'), (1, 'Y')], C64::new(-s1 * c2 * dg, c1 * s2 * df)),
            (&[(0, 'Y'), (1, 'X')], C64::new(-c1 * s2 * dg, s1 * c2 * df)),
            (&[(0, 'Z'), (1, 'Z')], im(-j * (fp + fm))),
        ],
    )?;
    let ii = Operator::identity(4).scale(re(gp + gm));
    Ok((&u + &ii).scale(C64::from_polar(0.5, 0.25 * j * t)))
}

/// Evolution with only the right-dot drive active:
/// `e^{iJt/4} (g II - i B f (cos phi2 IY - sin phi2 IX) - i J f ZZ)` with
/// `f = sin(Omega_2 t / 4) / Omega_2`, `g = cos(Omega_2 t / 4)`.
pub fn u_single_drive(p: &DqdParams, t: f64) -> Result<Operator> {
    p.validate()?;
    if p.by1_l != 0.0 || p.by1_r != 0.0 {
        return Err(Error::InvalidParameter(
            "single-drive evolution requires drive 1 off".into(),
        ));
    }
    let (b, j) = (p.by2_r, p.j);
    let om = p.omega_single();
    let f = sin_over(om, t, 4.0);
    let g = (0.25 * om * t).cos();
    let (s, c) = p.phi2.sin_cos();
    let u = terms(
        2,
        &[
            (&[(1, 'X')], im(b * f * s)),
            (&[(1, 'Y')], im(-b * f * c)),
            (&[(0, 'Z'), (1, 'Z')], im(-j * f)),
        ],
    )?;
    let ii = Operator::identity(4).scale(re(g));
    Ok((&u + &ii).scale(C64::from_polar(1.0, 0.25 * j * t)))
}

/// Diagonal phases of a chain of Ising bonds: each antiparallel bond picks up `e^{iJt/2}`.
pub(crate) fn exchange_phases(n: usize, jlist: &[f64], t: f64, skip: impl Fn(usize) -> bool) -> Vec<C64> {
    (0..(1usize << n))
        .map(|s| {
            let angle: f64 = jlist
                .iter()
                .enumerate()
                .filter(|(b, _)| !skip(*b))
                .filter(|(b, _)| ((s >> (n - 1 - b)) ^ (s >> (n - 2 - b))) & 1 == 1)
                .map(|(_, j)| 0.5 * j * t)
                .sum();
            C64::from_polar(1.0, angle)
        })
        .collect()
}

/// Undriven chain evolution, a product of per-bond conditional phases.
pub fn u_chain_exchange(jlist: &[f64], t: f64) -> Result<Operator> {
    let n = jlist.len() + 1;
    if n > crate::operator::MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("{n} qubits exceeds the dense limit")));
    }
    Ok(Operator::from_diagonal(&exchange_phases(n, jlist, t, |_| false)))
}

/// Chain evolution with a single resonant drive on site `k`.
///
/// The block around `k` uses `Omega_+- = sqrt((J_l +- J_r)^2 + B^2)`; bonds not
/// touching `k` contribute diagonal phases. On a boundary site the missing
/// neighbour has zero exchange and the block reduces to the two-qubit
/// single-drive evolution.
pub fn u_chain_driven(p: &ChainParams, k: usize, t: f64) -> Result<Operator> {
    p.validate()?;
    if k >= p.n {
        return Err(Error::InvalidParameter(format!("site {k} outside a {}-site chain", p.n)));
    }
    if let Some(i) = (0..p.n).find(|&i| i != k && p.by1[i] != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "site {i} is driven; only site {k} may be"
        )));
    }
    if !p.all_resonant(RwaLimits::default().resonance_rel_tol) {
        return Err(Error::OffResonance("chain drive frequencies must equal bz".into()));
    }
    let n = p.n;
    let b = p.by1[k];
    let (ej, dj) = (p.e_j(k), p.delta_j(k));
    let (op, om) = (p.omega_plus(k), p.omega_minus(k));
    let (fp, fm) = (sin_over(op, t, 4.0), sin_over(om, t, 4.0));
    let (gp, gm) = ((0.25 * op * t).cos(), (0.25 * om * t).cos());
    let (s, c) = p.phi[k].sin_cos();

    let mut list: Vec<(Vec<(usize, char)>, C64)> = vec![
        (vec![(k, 'X')], im(b * (fp + fm) * s)),
        (vec![(k, 'Y')], im(-b * (fp + fm) * c)),
    ];
    let has_left = k > 0;
    let has_right = k + 1 < n;
    if has_left && has_right {
        let (l, r) = (k - 1, k + 1);
        list.push((vec![(l, 'Z'), (k, 'X'), (r, 'Z')], im(b * (fp - fm) * s)));
        list.push((vec![(l, 'Z'), (k, 'Y'), (r, 'Z')], im(-b * (fp - fm) * c)));
        list.push((vec![(l, 'Z'), (r, 'Z')], re(gp - gm)));
    }
    if has_left {
        list.push((vec![(k - 1, 'Z'), (k, 'Z')], im(-(ej * fp - dj * fm))));
    }
    if has_right {
        list.push((vec![(k, 'Z'), (k + 1, 'Z')], im(-(ej * fp + dj * fm))));
    }
    let borrowed: Vec<(&[(usize, char)], C64)> = list.iter().map(|(f, c)| (f.as_slice(), *c)).collect();
    let block = &terms(n, &borrowed)? + &Operator::identity(p.dim()).scale(re(gp + gm));
    let mut u = block.scale(C64::from_polar(0.5, 0.25 * ej * t));

    // Bonds not touching k commute with the block.
    let touches = |bond: usize| bond + 1 == k || bond == k;
    let phases = exchange_phases(n, &p.jlist, t, touches);
    for (row, ph) in phases.iter().enumerate() {
        for v in u.matrix_mut().row_mut(row).iter_mut() {
            *v *= ph;
        }
    }
    Ok(u)
}
