use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, companion, unit_lower_inverse};

/// Parameters of the recursive system
///
/// ```text
/// A0 q_t = a_q + A1 q_{t-1} + A2 q_{t-2} + g0 s_t + g1 s_{t-1} + Dw z_t + e_t
/// s_t    = a_s + rho_s s_{t-1} + eta_t
/// z_t    = a_zw + A_zw z_{t-1} + v_t
/// ```
///
/// with `Var(e_t) = diag(sigma)`, `Var(eta_t) = omega_s^2` and
/// `Var(v_t) = omega_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralModel {
    pub variables: Vec<String>,
    pub controls: Vec<String>,
    #[serde(with = "linalg::rows")]
    pub a0: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub a1: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub a2: DMatrix<f64>,
    #[serde(with = "linalg::vector")]
    pub gamma0: DVector<f64>,
    #[serde(with = "linalg::vector")]
    pub gamma1: DVector<f64>,
    #[serde(with = "linalg::rows")]
    pub dw: DMatrix<f64>,
    #[serde(with = "linalg::vector")]
    pub intercept: DVector<f64>,
    pub sigma: Vec<f64>,
    pub s_intercept: f64,
    pub rho_s: f64,
    pub omega_s: f64,
    #[serde(with = "linalg::vector")]
    pub zw_intercept: DVector<f64>,
    #[serde(with = "linalg::rows")]
    pub a_zw: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub omega_w: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedForm {
    #[serde(with = "linalg::rows")]
    pub phi1: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub phi2: DMatrix<f64>,
    /// Companion-matrix eigenvalues, largest modulus first.
    pub eigenvalues: Vec<Eigenvalue>,
    pub max_modulus: f64,
    pub stationary: bool,
}

impl StructuralModel {
    /// A model with `m` variables and `k` controls and every coefficient zero
    /// except the unit diagonal of `A0`.
    pub fn zeros(variables: &[&str], controls: &[&str]) -> Self {
        let m = variables.len();
        let k = controls.len();
        Self {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            controls: controls.iter().map(|s| s.to_string()).collect(),
            a0: DMatrix::identity(m, m),
            a1: DMatrix::zeros(m, m),
            a2: DMatrix::zeros(m, m),
            gamma0: DVector::zeros(m),
            gamma1: DVector::zeros(m),
            dw: DMatrix::zeros(m, k),
            intercept: DVector::zeros(m),
            sigma: vec![1.0; m],
            s_intercept: 0.0,
            rho_s: 0.0,
            omega_s: 0.0,
            zw_intercept: DVector::zeros(k),
            a_zw: DMatrix::zeros(k, k),
            omega_w: DMatrix::zeros(k, k),
        }
    }

    pub fn m(&self) -> usize {
        self.variables.len()
    }

    pub fn k(&self) -> usize {
        self.controls.len()
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn control_index(&self, name: &str) -> Result<usize> {
        self.controls
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Standard deviation of the innovation to control `c`.
    pub fn omega_control(&self, c: usize) -> f64 {
        self.omega_w[(c, c)].max(0.0).sqrt()
    }

    pub fn check(&self) -> Result<()> {
        let m = self.m();
        let k = self.k();
        let square = |a: &DMatrix<f64>, n: usize, what: &str| {
            if a.nrows() != n || a.ncols() != n {
                Err(Error::Spec(format!("{what} is {}x{}, expected {n}x{n}", a.nrows(), a.ncols())))
            } else {
                Ok(())
            }
        };
        square(&self.a0, m, "A0")?;
        square(&self.a1, m, "A1")?;
        square(&self.a2, m, "A2")?;
        square(&self.a_zw, k, "A_zw")?;
        square(&self.omega_w, k, "Omega_w")?;
        if self.dw.nrows() != m || self.dw.ncols() != k {
            return Err(Error::Spec(format!("Dw is {}x{}, expected {m}x{k}", self.dw.nrows(), self.dw.ncols())));
        }
        if self.gamma0.len() != m || self.gamma1.len() != m || self.intercept.len() != m || self.sigma.len() != m {
            return Err(Error::Spec("vector lengths do not match the number of variables".into()));
        }
        if self.zw_intercept.len() != k {
            return Err(Error::Spec("control intercept length does not match the number of controls".into()));
        }
        for i in 0..m {
            if self.a0[(i, i)] != 1.0 || (i + 1..m).any(|j| self.a0[(i, j)] != 0.0) {
                return Err(Error::Spec("A0 must be unit lower-triangular".into()));
            }
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0)) || !(self.omega_s >= 0.0) {
            return Err(Error::Spec("shock variances must be non-negative".into()));
        }
        Ok(())
    }

    pub fn a0_inverse(&self) -> DMatrix<f64> {
        unit_lower_inverse(&self.a0)
    }

    pub fn reduced_form(&self) -> Result<ReducedForm> {
        let inv = self.a0_inverse();
        let phi1 = &inv * &self.a1;
        let phi2 = &inv * &self.a2;
        let c = companion(&[phi1.clone(), phi2.clone()]);
        let mut eigenvalues: Vec<Eigenvalue> = linalg::eigenvalues(&c)
            .ok_or_else(|| Error::Degenerate("companion eigenvalues did not converge".into()))?
            .iter()
            .map(|z| Eigenvalue {
                re: z.re,
                im: z.im,
                modulus: z.norm(),
            })
            .collect();
        eigenvalues.sort_by(|a, b| {
            b.modulus
                .total_cmp(&a.modulus)
                .then(b.re.total_cmp(&a.re))
                .then(b.im.total_cmp(&a.im))
        });
        let max_modulus = eigenvalues.first().map_or(0.0, |e| e.modulus);
        Ok(ReducedForm {
            phi1,
            phi2,
            eigenvalues,
            max_modulus,
            stationary: max_modulus < 1.0,
        })
    }

    /// Dimension of the stacked vector `(q, s, z)`.
    pub fn stacked_dim(&self) -> usize {
        self.m() + 1 + self.k()
    }

    /// `(Psi0, Psi1, Psi2)` and the intercept of the stacked system
    /// `Psi0 z_t = a + Psi1 z_{t-1} + Psi2 z_{t-2} + u_t`.
    pub fn psi(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DVector<f64>) {
        let m = self.m();
        let k = self.k();
        let n = self.stacked_dim();
        let mut p0 = DMatrix::identity(n, n);
        let mut p1 = DMatrix::zeros(n, n);
        let mut p2 = DMatrix::zeros(n, n);
        p0.view_mut((0, 0), (m, m)).copy_from(&self.a0);
        p0.view_mut((0, m), (m, 1)).copy_from(&(-&self.gamma0));
        p0.view_mut((0, m + 1), (m, k)).copy_from(&(-&self.dw));
        p1.view_mut((0, 0), (m, m)).copy_from(&self.a1);
        p1.view_mut((0, m), (m, 1)).copy_from(&self.gamma1);
        p1[(m, m)] = self.rho_s;
        p1.view_mut((m + 1, m + 1), (k, k)).copy_from(&self.a_zw);
        p2.view_mut((0, 0), (m, m)).copy_from(&self.a2);
        let mut a = DVector::zeros(n);
        a.rows_mut(0, m).copy_from(&self.intercept);
        a[m] = self.s_intercept;
        a.rows_mut(m + 1, k).copy_from(&self.zw_intercept);
        (p0, p1, p2, a)
    }

    /// Runs the stacked system forward from two initial rows, one step per
    /// innovation vector `u_t`. Returns the initial rows followed by the
    /// simulated ones.
    pub fn simulate(
        &self,
        initial: [&DVector<f64>; 2],
        innovations: &[DVector<f64>],
    ) -> Result<Vec<DVector<f64>>> {
        let n = self.stacked_dim();
        if initial.iter().any(|z| z.len() != n) || innovations.iter().any(|u| u.len() != n) {
            return Err(Error::Spec(format!("stacked vectors must have length {n}")));
        }
        let (p0, p1, p2, a) = self.psi();
        let inv = p0
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("Psi0 is singular".into()))?;
        let mut z = vec![initial[0].clone(), initial[1].clone()];
        for u in innovations {
            let t = z.len();
            let rhs = &a + &p1 * &z[t - 1] + &p2 * &z[t - 2] + u;
            z.push(&inv * rhs);
        }
        Ok(z)
    }
}
