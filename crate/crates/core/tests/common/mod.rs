//! Simulation oracles shared by the integration suites. Nothing here calls
//! the library's dynamics code: paths are produced by iterating the
//! structural equations directly.
#![allow(dead_code, clippy::needless_range_loop)]

use intensity_svar::svar::StructuralModel;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    Distribution::<f64>::sample(&StandardNormal, rng)
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Innovations for one period: structural errors, intervention and controls.
#[derive(Debug, Clone)]
pub struct Shocks {
    pub e: Vec<f64>,
    pub eta: f64,
    pub v: Vec<f64>,
}

impl Shocks {
    pub fn zero(m: usize, k: usize) -> Self {
        Self {
            e: vec![0.0; m],
            eta: 0.0,
            v: vec![0.0; k],
        }
    }
}

/// Starting values: `q_{-1}, q_{-2}`, `s_{-1}` and `z_{-1}`.
#[derive(Debug, Clone)]
pub struct Start {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub s: f64,
    pub z: Vec<f64>,
}

impl Start {
    pub fn zero(m: usize, k: usize) -> Self {
        Self {
            q1: vec![0.0; m],
            q2: vec![0.0; m],
            s: 0.0,
            z: vec![0.0; k],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Path {
    pub q: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub z: Vec<Vec<f64>>,
}

/// Iterates the structural equations one period per element of `shocks`,
/// solving the unit lower triangular `A0` by forward substitution.
pub fn simulate(model: &StructuralModel, start: &Start, shocks: &[Shocks]) -> Path {
    let m = model.variables.len();
    let k = model.controls.len();
    let mut q1 = start.q1.clone();
    let mut q2 = start.q2.clone();
    let mut s_prev = start.s;
    let mut z_prev = start.z.clone();
    let mut out = Path::default();
    for u in shocks {
        let s = model.s_intercept + model.rho_s * s_prev + u.eta;
        let z: Vec<f64> = (0..k)
            .map(|a| {
                model.zw_intercept[a] + (0..k).map(|b| model.a_zw[(a, b)] * z_prev[b]).sum::<f64>() + u.v[a]
            })
            .collect();
        let mut q = vec![0.0; m];
        for i in 0..m {
            let mut rhs = model.intercept[i] + model.gamma0[i] * s + model.gamma1[i] * s_prev + u.e[i];
            for j in 0..m {
                rhs += model.a1[(i, j)] * q1[j] + model.a2[(i, j)] * q2[j];
            }
            for c in 0..k {
                rhs += model.dw[(i, c)] * z[c];
            }
            for j in 0..i {
                rhs -= model.a0[(i, j)] * q[j];
            }
            q[i] = rhs;
        }
        out.q.push(q.clone());
        out.s.push(s);
        out.z.push(z.clone());
        q2 = std::mem::replace(&mut q1, q);
        s_prev = s;
        z_prev = z;
    }
    out
}

/// Shocked-minus-baseline responses over `h = 0..=horizon` when `impulse`
/// hits at `h = 0` and every later innovation is zero.
pub fn response_by_simulation(model: &StructuralModel, start: &Start, impulse: Shocks, horizon: usize) -> Vec<Vec<f64>> {
    let m = model.variables.len();
    let k = model.controls.len();
    let quiet = vec![Shocks::zero(m, k); horizon + 1];
    let mut shocked = quiet.clone();
    shocked[0] = impulse;
    let base = simulate(model, start, &quiet);
    let hit = simulate(model, start, &shocked);
    hit.q
        .iter()
        .zip(&base.q)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect()
}

/// `||C^512||_F` of the lag-polynomial companion, computed by repeated
/// squaring. Far below one only if every root lies inside the unit circle.
pub fn companion_power_norm(phi1: &DMatrix<f64>, phi2: &DMatrix<f64>) -> f64 {
    let m = phi1.nrows();
    let mut c = DMatrix::zeros(2 * m, 2 * m);
    c.view_mut((0, 0), (m, m)).copy_from(phi1);
    c.view_mut((0, m), (m, m)).copy_from(phi2);
    c.view_mut((m, 0), (m, m)).copy_from(&DMatrix::identity(m, m));
    power_norm(c, 9)
}

pub fn power_norm(mut c: DMatrix<f64>, squarings: usize) -> f64 {
    for _ in 0..squarings {
        let n = c.norm();
        if !n.is_finite() || n > 1e150 {
            return f64::INFINITY;
        }
        c = &c * &c;
    }
    c.norm()
}

/// Inverse of a unit lower triangular matrix by forward substitution.
pub fn unit_lower_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        for i in 0..n {
            let mut v = if i == col { 1.0 } else { 0.0 };
            for j in 0..i {
                v -= a[(i, j)] * inv[(j, col)];
            }
            inv[(i, col)] = v;
        }
    }
    inv
}

/// A random recursive system with intervention and control blocks whose
/// lag polynomial and control process are both stable, as certified by
/// [`companion_power_norm`] and [`power_norm`].
pub fn random_stable_model<R: Rng>(rng: &mut R, m: usize, k: usize) -> StructuralModel {
    let vars: Vec<String> = (0..m).map(|i| format!("q{i}")).collect();
    let ctrls: Vec<String> = (0..k).map(|c| format!("w{c}")).collect();
    let vr: Vec<&str> = vars.iter().map(String::as_str).collect();
    let cr: Vec<&str> = ctrls.iter().map(String::as_str).collect();
    let mut model = StructuralModel::zeros(&vr, &cr);
    for i in 0..m {
        for j in 0..i {
            model.a0[(i, j)] = uniform(rng, -0.8, 0.8);
        }
    }
    let mut a1 = DMatrix::from_fn(m, m, |_, _| 0.4 * normal(rng));
    let mut a2 = DMatrix::from_fn(m, m, |_, _| 0.2 * normal(rng));
    let inv = unit_lower_inverse(&model.a0);
    loop {
        let norm = companion_power_norm(&(&inv * &a1), &(&inv * &a2));
        if norm < 1e-6 {
            break;
        }
        a1 *= 0.85;
        a2 *= 0.85 * 0.85;
    }
    model.a1 = a1;
    model.a2 = a2;
    model.gamma0 = DVector::from_fn(m, |_, _| 0.5 * normal(rng));
    model.gamma1 = DVector::from_fn(m, |_, _| 0.5 * normal(rng));
    model.dw = DMatrix::from_fn(m, k, |_, _| 0.5 * normal(rng));
    model.intercept = DVector::from_fn(m, |_, _| 0.1 * normal(rng));
    model.sigma = (0..m).map(|_| uniform(rng, 0.01, 1.0)).collect();
    model.s_intercept = uniform(rng, 0.0, 0.2);
    model.rho_s = uniform(rng, -0.9, 0.95);
    model.omega_s = uniform(rng, 0.05, 0.5);
    let mut azw = DMatrix::from_fn(k, k, |_, _| 0.4 * normal(rng));
    while power_norm(azw.clone(), 9) > 1e-6 {
        azw *= 0.85;
    }
    model.a_zw = azw;
    model.zw_intercept = DVector::from_fn(k, |_, _| 0.05 * normal(rng));
    let l = DMatrix::from_fn(k, k, |i, j| if j <= i { 0.3 * normal(rng) } else { 0.0 });
    model.omega_w = &l * l.transpose() + DMatrix::identity(k, k) * 0.01;
    model
}

pub fn random_start<R: Rng>(rng: &mut R, m: usize, k: usize) -> Start {
    Start {
        q1: (0..m).map(|_| normal(rng)).collect(),
        q2: (0..m).map(|_| normal(rng)).collect(),
        s: normal(rng),
        z: (0..k).map(|_| normal(rng)).collect(),
    }
}

/// Gaussian innovations with the model's variances (controls drawn with
/// the full covariance `omega_w`).
pub fn draw_shocks<R: Rng>(rng: &mut R, model: &StructuralModel) -> Shocks {
    let m = model.variables.len();
    let k = model.controls.len();
    let chol = model.omega_w.clone().cholesky().map(|c| c.l());
    let raw = DVector::from_fn(k, |_, _| normal(rng));
    let v = match chol {
        Some(l) => (l * raw).iter().copied().collect(),
        None => vec![0.0; k],
    };
    Shocks {
        e: (0..m).map(|i| model.sigma[i].sqrt() * normal(rng)).collect(),
        eta: model.omega_s * normal(rng),
        v,
    }
}

/// Least squares `b` of `y` on the columns of `x` by Gaussian elimination
/// with partial pivoting on the normal equations.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = x[i].iter().zip(&x[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = x[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

/// Prints and returns one acceptance line.
pub fn report(id: usize, title: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id:>2} [{}] {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
