use proptest::prelude::*;

use resex_core::evolution::{u_chain_driven, u_two_drive};
use resex_core::metrics::{fidelity_upper_bound, gate_fidelity, ptm};
use resex_core::models::{ChainParams, DqdParams};
use resex_core::operator::{
    expm_hermitian, pauli_coefficients, pauli_decompose, pauli_matrix, pauli_sum, Operator,
    PauliWord, C64,
};
use resex_core::scheduling::{schedule_zx, ParamKey};

fn operator(n: usize) -> impl Strategy<Value = Operator> {
    let d = 1usize << n;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
        Operator::from_fn(d, |r, c| {
            let (a, b) = v[r * d + c];
            C64::new(a, b)
        })
    })
}

fn unitary(n: usize) -> impl Strategy<Value = Operator> {
    operator(n).prop_map(|h| {
        let herm = (&h + &h.dagger()).scale(C64::new(1.5, 0.0));
        expm_hermitian(&herm, 1.0).unwrap()
    })
}

fn two_drive() -> impl Strategy<Value = DqdParams> {
    (0.0f64..5e6, 0.0f64..5e6, -3.0f64..3.0, -3.0f64..3.0, 0.0f64..2e6).prop_map(
        |(b1, b2, phi1, phi2, j)| DqdParams {
            by1_l: b1,
            by2_r: b2,
            phi1,
            phi2,
            ..DqdParams::resonant(20e9, 20.2e9, j)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_drive_evolution_is_unitary(p in two_drive(), t in 0.0f64..5e-6) {
        prop_assert!(u_two_drive(&p, t).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn two_drive_evolution_composes(p in two_drive(), t1 in 0.0f64..3e-6, t2 in 0.0f64..3e-6) {
        let whole = u_two_drive(&p, t1 + t2).unwrap();
        let parts = u_two_drive(&p, t2).unwrap().compose(&u_two_drive(&p, t1).unwrap()).unwrap();
        prop_assert!(whole.max_abs_diff(&parts).unwrap() < 1e-12);
    }

    #[test]
    fn chain_evolution_is_unitary(b in 1e5f64..1e8, j in 0.0f64..1e7, t in 0.0f64..2e-6) {
        let mut p = ChainParams::graded(4, 20e9, 0.2e9, j).unwrap();
        p.by1[2] = b;
        prop_assert!(u_chain_driven(&p, 2, t).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn decomposition_round_trips(n in 1usize..=4, seed in any::<u64>()) {
        let d = 1usize << n;
        let mut x = seed;
        let op = Operator::from_fn(d, |_, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            C64::new((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5, (x % 1000) as f64 / 1000.0)
        });
        let back = pauli_sum(&pauli_decompose(&op, 0.0)).unwrap();
        prop_assert!(back.max_abs_diff(&op).unwrap() < 1e-12);
    }

    #[test]
    fn bound_dominates_fidelity(u in unitary(2), v in unitary(2)) {
        let f = gate_fidelity(&u, &v).unwrap();
        let b = fidelity_upper_bound(&u, &v).unwrap();
        prop_assert!(b - f >= -1e-12);
    }

    #[test]
    fn bound_ignores_diagonal_corrections(u in unitary(3), v in unitary(3), phases in prop::collection::vec(-3.2f64..3.2, 8)) {
        let diag: Vec<C64> = phases.iter().map(|p| C64::from_polar(1.0, *p)).collect();
        let corrected = Operator::from_diagonal(&diag).compose(&u).unwrap();
        let a = fidelity_upper_bound(&u, &v).unwrap();
        let b = fidelity_upper_bound(&corrected, &v).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn transfer_matrix_is_a_homomorphism(u in unitary(2), v in unitary(2)) {
        let uv = u.compose(&v).unwrap();
        let lhs = ptm(&uv).unwrap();
        let rhs = ptm(&u).unwrap() * ptm(&v).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn zx_schedule_is_exact_for_any_amplitude(b in 1e4f64..1e9, n1 in 0u32..4, n2 in 0u32..4) {
        let s = schedule_zx(b, n1, n2).unwrap();
        prop_assert!(s.exact);
    }

    #[test]
    fn chain_keys_round_trip(i in 0usize..10, kind in 0usize..5) {
        let k = [ParamKey::Bz(i), ParamKey::By1(i), ParamKey::Phi(i), ParamKey::Omega(i), ParamKey::JBond(i)][kind];
        prop_assert_eq!(k.to_string().parse::<ParamKey>().unwrap(), k);
    }
}

#[test]
fn decomposition_round_trips_at_seven_qubits() {
    let d = 128;
    let op = Operator::from_fn(d, |r, c| C64::new(((r * 31 + c * 17) % 13) as f64, ((r ^ c) % 5) as f64));
    let terms = pauli_decompose(&op, 0.0);
    let back = pauli_sum(&terms).unwrap();
    assert!(back.max_abs_diff(&op).unwrap() < 1e-9);
}

#[test]
fn pauli_words_form_an_orthogonal_basis() {
    let n = 2;
    let d = 4.0;
    for a in 0..16 {
        let pa = pauli_matrix(&PauliWord::from_index(n, a)).unwrap();
        let coeffs = pauli_coefficients(&pa);
        for (b, c) in coeffs.iter().enumerate() {
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-15);
            let pb = pauli_matrix(&PauliWord::from_index(n, b)).unwrap();
            let tr = (&pa.dagger() * &pb).trace();
            assert!((tr - C64::new(d * expect, 0.0)).norm() < 1e-12);
        }
    }
}
