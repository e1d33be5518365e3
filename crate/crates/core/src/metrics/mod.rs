//! Gate-quality scores and closed-form fidelity expressions.

mod closed_form;
mod report;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{
    pauli_coefficients, pauli_decompose, HermitianEigen, Operator, PauliString, PauliWord, C64,
};

pub use closed_form::{
    fidelity_identity_chain, fidelity_swap, fidelity_swap_variant, fidelity_y_2d, fidelity_y_chain,
    fidelity_y_closed, first_order_noise_fidelity, rescale_fidelity, NoiseGate, SwapVariant,
};
pub use report::GateReport;

/// Real matrix in the normalised Pauli basis, indexed in lexicographic word order.
pub type RealMatrix = DMatrix<f64>;

/// Inputs to the metrics must be unitary to this tolerance.
pub const INPUT_UNITARITY_TOL: f64 = 1e-8;

/// Largest register for which transfer matrices are formed (`4^5` rows).
pub const MAX_PTM_QUBITS: usize = 5;

fn check_pair(actual: &Operator, ideal: &Operator) -> Result<()> {
    if actual.dim() != ideal.dim() {
        return Err(Error::DimensionMismatch {
            left: actual.dim(),
            right: ideal.dim(),
        });
    }
    for u in [actual, ideal] {
        let dev = u.unitarity_error();
        if dev > INPUT_UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
    }
    Ok(())
}

/// `Tr[V^dagger U]` without forming the product.
fn overlap(actual: &Operator, ideal: &Operator) -> C64 {
    ideal
        .matrix()
        .iter()
        .zip(actual.matrix().iter())
        .map(|(v, u)| v.conj() * u)
        .sum()
}

/// Average gate fidelity `(d + |Tr[V^dagger U]|^2) / (d (d + 1))`.
pub fn gate_fidelity(actual: &Operator, ideal: &Operator) -> Result<f64> {
    check_pair(actual, ideal)?;
    let d = actual.dim() as f64;
    Ok((d + overlap(actual, ideal).norm_sqr()) / (d * (d + 1.0)))
}

/// `sum_k |M_kk|`, unchanged by left-multiplication with a diagonal unitary.
pub fn trace_abs(m: &Operator) -> f64 {
    m.diagonal().iter().map(|z| z.norm()).sum()
}

/// `(d + Tr_abs[U V^dagger]^2) / (d (d + 1))`: the best fidelity reachable by
/// appending ideal diagonal (virtual-Z type) corrections.
pub fn fidelity_upper_bound(actual: &Operator, ideal: &Operator) -> Result<f64> {
    check_pair(actual, ideal)?;
    let d = actual.dim() as f64;
    let t = trace_abs(&(actual * &ideal.dagger()));
    Ok((d + t * t) / (d * (d + 1.0)))
}

/// Pauli transfer matrix `R_ji = Tr[P_j U P_i U^dagger] / d`.
pub fn ptm(u: &Operator) -> Result<RealMatrix> {
    let dev = u.unitarity_error();
    if dev > INPUT_UNITARITY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let n = u.num_qubits();
    if n > MAX_PTM_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "transfer matrix of {n} qubits exceeds the {MAX_PTM_QUBITS}-qubit limit"
        )));
    }
    let d = u.dim();
    let dd = d * d;
    let ud = u.dagger();
    let mut out = RealMatrix::zeros(dd, dd);
    for i in 0..dd {
        let word = PauliWord::from_index(n, i);
        let (x, _) = word.masks();
        // U P_i: column c of U P_i is phase(c) * column (c ^ x) of U.
        let p = crate::operator::pauli_matrix(&word)?;
        let mut up = Operator::zeros(d);
        for c in 0..d {
            let ph = p.get(c ^ x, c);
            for r in 0..d {
                up.matrix_mut()[(r, c)] = u.get(r, c ^ x) * ph;
            }
        }
        let a = &up * &ud;
        for (j, c) in pauli_coefficients(&a).iter().enumerate() {
            out[(j, i)] = c.re;
        }
    }
    Ok(out)
}

/// Eigendecomposition `M = Q diag(lambda) Q^dagger` of a real normal matrix.
///
/// The Hermitian and anti-Hermitian parts of a normal matrix commute, so the
/// eigenvectors of a generic real combination of them diagonalise both.
fn normal_eigen(m: &RealMatrix) -> Result<(DMatrix<C64>, Vec<C64>)> {
    let c: DMatrix<C64> = m.map(|x| C64::new(x, 0.0));
    let herm = (&c + c.adjoint()) * C64::new(0.5, 0.0);
    let anti = (&c - c.adjoint()) * C64::new(0.0, -0.5);
    for alpha in [0.577_215_664_9, std::f64::consts::SQRT_2, std::f64::consts::FRAC_1_PI] {
        let mix = Operator::from_matrix(&herm + &anti * C64::new(alpha, 0.0))?;
        let eig = HermitianEigen::new(&mix)?;
        let q = eig.vectors().clone();
        let lambdas: Vec<C64> = (0..q.ncols())
            .map(|k| {
                let v = q.column(k);
                (v.adjoint() * &c * v)[(0, 0)]
            })
            .collect();
        let mut rebuilt = q.clone();
        for (k, lam) in lambdas.iter().enumerate() {
            for v in rebuilt.column_mut(k).iter_mut() {
                *v *= lam;
            }
        }
        let residual = (rebuilt * q.adjoint() - &c).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual < 1e-10 {
            return Ok((q, lambdas));
        }
    }
    Err(Error::NoConvergence)
}

fn orthogonality_error(m: &RealMatrix) -> f64 {
    let p = m.transpose() * m;
    let n = m.nrows();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| (p[(r, c)] - if r == c { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// Principal logarithm `log(R_ideal^-1 R_actual)` of two orthogonal transfer matrices.
///
/// Eigenvalues within 1e-9 of -1 make the branch ambiguous and are rejected.
pub fn error_generator(ptm_ideal: &RealMatrix, ptm_actual: &RealMatrix) -> Result<RealMatrix> {
    if ptm_ideal.shape() != ptm_actual.shape() || !ptm_ideal.is_square() {
        return Err(Error::DimensionMismatch {
            left: ptm_ideal.nrows(),
            right: ptm_actual.nrows(),
        });
    }
    for m in [ptm_ideal, ptm_actual] {
        let dev = orthogonality_error(m);
        if dev > 1e-6 {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
    }
    let rel = ptm_ideal.transpose() * ptm_actual;
    let (q, lambdas) = normal_eigen(&rel)?;
    let mut scaled = q.clone();
    for (k, lam) in lambdas.iter().enumerate() {
        let distance = (lam + 1.0).norm();
        if distance < 1e-9 {
            return Err(Error::LogBranchAmbiguity { distance });
        }
        let l = lam.ln();
        for v in scaled.column_mut(k).iter_mut() {
            *v *= l;
        }
    }
    let g = scaled * q.adjoint();
    let imag = g.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 {
        return Err(Error::ComplexLogarithm { imag });
    }
    Ok(g.map(|z| z.re))
}

/// Pauli coefficients of the error matrix `U_actual U_ideal^dagger` in word
/// order; entries below 1e-12 are dropped.
pub fn error_matrix_coeffs(actual: &Operator, ideal: &Operator) -> Result<Vec<PauliString>> {
    check_pair(actual, ideal)?;
    Ok(pauli_decompose(&(actual * &ideal.dagger()), 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::u_single_drive;
    use crate::models::DqdParams;
    use crate::operator::{expm_hermitian, pauli_matrix, re};

    fn word(s: &str) -> Operator {
        pauli_matrix(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn fidelity_basics() {
        let zz = word("ZZ");
        assert!((gate_fidelity(&zz, &zz).unwrap() - 1.0).abs() < 1e-15);
        assert!((gate_fidelity(&zz, &Operator::identity(4)).unwrap() - 0.2).abs() < 1e-15);
        let phased = zz.scale(C64::from_polar(1.0, 1.234));
        assert_eq!(gate_fidelity(&phased, &zz).unwrap(), gate_fidelity(&zz, &zz).unwrap());
        assert!(matches!(
            gate_fidelity(&zz.scale(re(1.1)), &zz),
            Err(Error::NotUnitary { .. })
        ));
        assert!(gate_fidelity(&zz, &Operator::identity(8)).is_err());
    }

    #[test]
    fn single_drive_fidelity_equals_bound_at_rotation_time() {
        let p = DqdParams::reference_device();
        let om = p.omega_single();
        let ratio = p.by2_r / om;
        let tau = 2.0 * std::f64::consts::PI / om;
        let u = u_single_drive(&p, tau).unwrap();
        let f = gate_fidelity(&u, &word("IY")).unwrap();
        let b = fidelity_upper_bound(&u, &word("IY")).unwrap();
        // |Tr[IY U]| = 4 B / Omega_2.
        assert!((f - (4.0 + 16.0 * ratio * ratio) / 20.0).abs() < 1e-12);
        assert!((b - (1.0 + 4.0 * ratio * ratio) / 5.0).abs() < 1e-12);
        assert!((f - 0.99207921).abs() < 1e-8);
        assert!(f <= b + 1e-12);
        for k in 1..200 {
            let t = tau * k as f64 / 100.0;
            let u = u_single_drive(&p, t).unwrap();
            assert!(gate_fidelity(&u, &word("IY")).unwrap() <= fidelity_upper_bound(&u, &word("IY")).unwrap() + 1e-12);
        }
    }

    #[test]
    fn trace_abs_ignores_diagonal_phases() {
        let d = Operator::from_diagonal(&[0.3, 1.1, -2.0, 0.7].map(|a| C64::from_polar(1.0, a)));
        let m = word("XY").scale(re(0.5));
        let m = &m + &Operator::identity(4);
        assert!((trace_abs(&(&d * &m)) - trace_abs(&m)).abs() < 1e-14);
        assert_eq!(trace_abs(&Operator::identity(4)), 4.0);
    }

    #[test]
    fn ptm_of_identity_and_pauli() {
        let r = ptm(&Operator::identity(4)).unwrap();
        assert!((r.clone() - RealMatrix::identity(16, 16)).amax() < 1e-15);
        // Conjugation by X flips the sign of Y and Z.
        let r = ptm(&word("X")).unwrap();
        assert_eq!(r.diagonal().as_slice(), &[1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn ptm_of_quarter_turn() {
        // exp(-i pi/4 Y) maps X -> -Z... and Z -> X on the second qubit.
        let h = word("IY");
        let u = expm_hermitian(&h, std::f64::consts::FRAC_PI_4).unwrap();
        let r = ptm(&u).unwrap();
        let idx = |s: &str| s.parse::<PauliWord>().unwrap().index();
        assert!((r[(idx("IZ"), idx("IX"))] + 1.0).abs() < 1e-12);
        assert!((r[(idx("IX"), idx("IZ"))] - 1.0).abs() < 1e-12);
        assert!((r[(idx("IY"), idx("IY"))] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_generator_of_identical_channels_is_zero() {
        let u = expm_hermitian(&word("XZ"), 0.3).unwrap();
        let r = ptm(&u).unwrap();
        let g = error_generator(&r, &r).unwrap();
        assert!(g.amax() < 1e-9);
    }

    #[test]
    fn error_generator_roundtrip() {
        let ideal = ptm(&expm_hermitian(&word("IY"), 0.7).unwrap()).unwrap();
        let h = &word("ZX").scale(re(0.05)) + &word("IY").scale(re(0.7));
        let actual = ptm(&expm_hermitian(&h, 1.0).unwrap()).unwrap();
        let g = error_generator(&ideal, &actual).unwrap();
        // G is real antisymmetric, so iG is Hermitian and exp(G) = exp(-i (iG)).
        let ig = Operator::from_matrix(g.map(|x| C64::new(0.0, x))).unwrap();
        let back = expm_hermitian(&ig, 1.0).unwrap().into_matrix().map(|z| z.re);
        let rel = ideal.transpose() * &actual;
        assert!((back - rel).amax() < 1e-8);
    }

    #[test]
    fn error_generator_rejects_minus_one() {
        let ideal = ptm(&Operator::identity(4)).unwrap();
        let actual = ptm(&word("ZZ")).unwrap();
        assert!(matches!(
            error_generator(&ideal, &actual),
            Err(Error::LogBranchAmbiguity { .. })
        ));
    }

    #[test]
    fn error_matrix_of_ideal_gate_is_identity() {
        let u = expm_hermitian(&word("YZ"), 0.9).unwrap();
        let c = error_matrix_coeffs(&u, &u).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].word.is_identity());
        assert!((c[0].coeff - re(1.0)).norm() < 1e-12);
    }
}
