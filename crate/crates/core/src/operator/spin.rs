use super::{Operator, C64, MAX_QUBITS};
use crate::error::{Error, Result};

/// Spin-1/2 operators with `S = sigma / 2` and raising/lowering `S+ = |up><down|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinKind {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl SpinKind {
    /// 2x2 matrix in the `(up, down)` basis.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let z = C64::new(0.0, 0.0);
        let h = C64::new(0.5, 0.0);
        let ih = C64::new(0.0, 0.5);
        let one = C64::new(1.0, 0.0);
        match self {
            SpinKind::X => [[z, h], [h, z]],
            SpinKind::Y => [[z, -ih], [ih, z]],
            SpinKind::Z => [[h, z], [z, -h]],
            SpinKind::Plus => [[z, one], [z, z]],
            SpinKind::Minus => [[z, z], [one, z]],
        }
    }
}

/// `S^kind` acting on `site` of an `n`-qubit register.
pub fn spin_operator(n: usize, site: usize, kind: SpinKind) -> Result<Operator> {
    if site >= n {
        return Err(Error::InvalidParameter(format!(
            "site {site} out of range for {n} qubits"
        )));
    }
    let mut op = Operator::zeros(1 << n);
    add_site_term(op.matrix_mut(), n, site, &kind.matrix(), C64::new(1.0, 0.0));
    Ok(op)
}

/// `m += c * A_site` for a single-site 2x2 operator `A`.
pub(crate) fn add_site_term(
    m: &mut nalgebra::DMatrix<C64>,
    n: usize,
    site: usize,
    a: &[[C64; 2]; 2],
    c: C64,
) {
    let bit = 1usize << (n - 1 - site);
    for j in 0..(1usize << n) {
        let b = usize::from(j & bit != 0);
        for (b2, row) in a.iter().enumerate() {
            let v = row[b];
            if v.norm() != 0.0 {
                let j2 = if b2 == 1 { j | bit } else { j & !bit };
                m[(j2, j)] += c * v;
            }
        }
    }
}

/// `m += c * A_{s1} B_{s2}` for single-site operators on two distinct sites.
pub(crate) fn add_two_site_term(
    m: &mut nalgebra::DMatrix<C64>,
    n: usize,
    (s1, a): (usize, &[[C64; 2]; 2]),
    (s2, b): (usize, &[[C64; 2]; 2]),
    c: C64,
) {
    debug_assert_ne!(s1, s2);
    let bit1 = 1usize << (n - 1 - s1);
    let bit2 = 1usize << (n - 1 - s2);
    for j in 0..(1usize << n) {
        let b1 = usize::from(j & bit1 != 0);
        let b2 = usize::from(j & bit2 != 0);
        for (o1, row1) in a.iter().enumerate() {
            let va = row1[b1];
            if va.norm() == 0.0 {
                continue;
            }
            for (o2, row2) in b.iter().enumerate() {
                let vb = row2[b2];
                if vb.norm() == 0.0 {
                    continue;
                }
                let mut j2 = if o1 == 1 { j | bit1 } else { j & !bit1 };
                j2 = if o2 == 1 { j2 | bit2 } else { j2 & !bit2 };
                m[(j2, j)] += c * va * vb;
            }
        }
    }
}

/// Diagonal of `sum_i w_i Sz_i`, the generator of the rotating frame.
pub(crate) fn sz_sum_diagonal(weights: &[f64]) -> Vec<f64> {
    let n = weights.len();
    (0..(1usize << n))
        .map(|j| {
            weights
                .iter()
                .enumerate()
                .map(|(q, w)| if j & (1 << (n - 1 - q)) == 0 { 0.5 * w } else { -0.5 * w })
                .sum()
        })
        .collect()
}

/// SWAP of sites `k` and `k + 1` in an `n`-qubit register.
pub fn swap_gate(n: usize, k: usize) -> Result<Operator> {
    if n > MAX_QUBITS || k + 1 >= n {
        return Err(Error::InvalidParameter(format!(
            "swap of sites ({k}, {}) in a {n}-qubit register",
            k + 1
        )));
    }
    let (a, b) = (n - 1 - k, n - 2 - k);
    let swapped = |s: usize| {
        let (x, y) = ((s >> a) & 1, (s >> b) & 1);
        (s & !((1 << a) | (1 << b))) | (x << b) | (y << a)
    };
    Ok(Operator::from_fn(1 << n, |r, c| {
        if r == swapped(c) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_matrix;

    #[test]
    fn spin_ops_are_half_paulis() {
        for (kind, word) in [(SpinKind::X, "IXI"), (SpinKind::Y, "IYI"), (SpinKind::Z, "IZI")] {
            let s = spin_operator(3, 1, kind).unwrap();
            let p = pauli_matrix(&word.parse().unwrap()).unwrap().scale(C64::new(0.5, 0.0));
            assert!(s.max_abs_diff(&p).unwrap() < 1e-15);
        }
    }

    #[test]
    fn ladder_ops_combine_to_sx() {
        let p = spin_operator(2, 0, SpinKind::Plus).unwrap();
        let m = spin_operator(2, 0, SpinKind::Minus).unwrap();
        let sx = spin_operator(2, 0, SpinKind::X).unwrap();
        let sum = (&p + &m).scale(C64::new(0.5, 0.0));
        assert!(sum.max_abs_diff(&sx).unwrap() < 1e-15);
        // S+ raises: |down> = index 1 goes to |up> = index 0.
        assert_eq!(p.get(0, 2), C64::new(1.0, 0.0));
    }

    #[test]
    fn two_site_term_matches_product() {
        let mut m = nalgebra::DMatrix::zeros(8, 8);
        add_two_site_term(
            &mut m,
            3,
            (0, &SpinKind::Y.matrix()),
            (2, &SpinKind::Plus.matrix()),
            C64::new(2.0, 0.0),
        );
        let a = spin_operator(3, 0, SpinKind::Y).unwrap();
        let b = spin_operator(3, 2, SpinKind::Plus).unwrap();
        let prod = (&a * &b).scale(C64::new(2.0, 0.0));
        assert!((prod.into_matrix() - m).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn swap_gate_exchanges_neighbours() {
        let s = swap_gate(4, 1).unwrap();
        // |0100> -> |0010>
        assert_eq!(s.get(0b0010, 0b0100), C64::new(1.0, 0.0));
        assert_eq!(s.get(0b1001, 0b1001), C64::new(1.0, 0.0));
        assert!(s.compose(&s).unwrap().max_abs_diff(&Operator::identity(16)).unwrap() < 1e-15);
        assert!(swap_gate(3, 2).is_err());
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        assert!(spin_operator(2, 2, SpinKind::Z).is_err());
    }
}
