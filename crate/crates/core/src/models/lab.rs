use super::{ChainParams, DqdParams};
use crate::error::Result;
use crate::operator::{
    add_site_term, add_two_site_term, HermitianEigen, Operator, SpinKind, C64,
};

/// Transverse drive `amplitude * cos(omega t + phi) * Sy` on one site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabDrive {
    pub site: usize,
    pub amplitude: f64,
    pub omega: f64,
    pub phi: f64,
}

impl LabDrive {
    pub fn coefficient(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phi).cos()
    }
}

/// Lab-frame Hamiltonian split into a static part and cosine drives.
#[derive(Clone, Debug)]
pub struct LabModel {
    n: usize,
    h0: Operator,
    drives: Vec<LabDrive>,
    drive_ops: Vec<Operator>,
    zeeman: Vec<f64>,
}

const ONE: C64 = C64::new(1.0, 0.0);

/// `m += j (S_a . S_b - 1/4)`.
pub(crate) fn add_heisenberg(m: &mut nalgebra::DMatrix<C64>, n: usize, a: usize, b: usize, j: f64) {
    let c = C64::new(j, 0.0);
    let (p, mi) = (SpinKind::Plus.matrix(), SpinKind::Minus.matrix());
    add_two_site_term(m, n, (a, &p), (b, &mi), c * 0.5);
    add_two_site_term(m, n, (a, &mi), (b, &p), c * 0.5);
    add_ising(m, n, a, b, j);
}

/// `m += j (Sz_a Sz_b - 1/4)`.
pub(crate) fn add_ising(m: &mut nalgebra::DMatrix<C64>, n: usize, a: usize, b: usize, j: f64) {
    let ba = 1usize << (n - 1 - a);
    let bb = 1usize << (n - 1 - b);
    for s in 0..(1usize << n) {
        if (s & ba == 0) != (s & bb == 0) {
            m[(s, s)] -= C64::new(0.5 * j, 0.0);
        }
    }
}

impl LabModel {
    fn build(n: usize, bonds: &[(usize, usize, f64)], zeeman: &[f64], static_y: &[f64], drives: Vec<LabDrive>) -> Result<Self> {
        let d = 1usize << n;
        let mut h0 = Operator::zeros(d);
        let m = h0.matrix_mut();
        for &(a, b, j) in bonds {
            if j != 0.0 {
                add_heisenberg(m, n, a, b, j);
            }
        }
        for (site, (bz, by)) in zeeman.iter().zip(static_y).enumerate() {
            add_site_term(m, n, site, &SpinKind::Z.matrix(), ONE * *bz);
            if *by != 0.0 {
                add_site_term(m, n, site, &SpinKind::Y.matrix(), ONE * *by);
            }
        }
        let drives: Vec<LabDrive> = drives.into_iter().filter(|d| d.amplitude != 0.0).collect();
        let drive_ops = drives
            .iter()
            .map(|dr| {
                let mut op = Operator::zeros(d);
                add_site_term(op.matrix_mut(), n, dr.site, &SpinKind::Y.matrix(), ONE);
                op
            })
            .collect();
        Ok(Self {
            n,
            h0,
            drives,
            drive_ops,
            zeeman: zeeman.to_vec(),
        })
    }

    pub(crate) fn dqd(p: &DqdParams) -> Result<Self> {
        let drives = vec![
            LabDrive { site: 0, amplitude: p.by1_l, omega: p.omega1, phi: p.phi1 },
            LabDrive { site: 1, amplitude: p.by1_r, omega: p.omega1, phi: p.phi1 },
            LabDrive { site: 0, amplitude: p.by2_l, omega: p.omega2, phi: p.phi2 },
            LabDrive { site: 1, amplitude: p.by2_r, omega: p.omega2, phi: p.phi2 },
        ];
        Self::build(2, &[(0, 1, p.j)], &[p.bz_l, p.bz_r], &[p.by0_l, p.by0_r], drives)
    }

    pub(crate) fn chain(p: &ChainParams) -> Result<Self> {
        let bonds: Vec<_> = p.jlist.iter().enumerate().map(|(i, j)| (i, i + 1, *j)).collect();
        let drives = (0..p.n)
            .map(|i| LabDrive {
                site: i,
                amplitude: p.by1[i],
                omega: p.omega[i],
                phi: p.phi[i],
            })
            .collect();
        Self::build(p.n, &bonds, &p.bz, &vec![0.0; p.n], drives)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn zeeman(&self) -> &[f64] {
        &self.zeeman
    }

    pub fn static_part(&self) -> &Operator {
        &self.h0
    }

    pub fn drives(&self) -> &[LabDrive] {
        &self.drives
    }

    pub fn drive_operators(&self) -> &[Operator] {
        &self.drive_ops
    }

    /// `H(t)`.
    pub fn at(&self, t: f64) -> Operator {
        let mut h = self.h0.clone();
        for (dr, op) in self.drives.iter().zip(&self.drive_ops) {
            let c = dr.coefficient(t);
            *h.matrix_mut() += op.matrix() * C64::new(c, 0.0);
        }
        h
    }

    /// Upper bound on the spectral radius of `H(t)` over all `t`.
    pub fn spectral_bound(&self) -> Result<f64> {
        let static_radius = HermitianEigen::new(&self.h0)?
            .values()
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.abs()));
        // |Sy| has norm 1/2.
        let drive: f64 = self.drives.iter().map(|d| 0.5 * d.amplitude.abs()).sum();
        Ok(static_radius + drive)
    }
}
