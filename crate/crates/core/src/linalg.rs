//! Small dense-matrix helpers shared by the estimation and dynamics code.

use nalgebra::{Complex, DMatrix, DVector};

/// Serializes a `DMatrix<f64>` as a list of rows.
pub mod rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        (m.ncols(), rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let (ncols, rows): (usize, Vec<Vec<f64>>) = Deserialize::deserialize(d)?;
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Ok(DMatrix::from_row_slice(rows.len(), ncols, &flat))
    }
}

/// Serializes a `DVector<f64>` as a plain list.
pub mod vector {
    use nalgebra::DVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        let v: Vec<f64> = Deserialize::deserialize(d)?;
        Ok(DVector::from_vec(v))
    }
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
pub fn unit_lower_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        for i in (col + 1)..n {
            let mut acc = 0.0;
            for k in col..i {
                acc += a[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = -acc;
        }
    }
    inv
}

/// General inverse via LU; `None` when singular.
pub fn inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().try_inverse()
}

pub fn unit_vector(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// Block-companion matrix of `x_t = sum_j Phi_j x_{t-j}`.
pub fn companion(lags: &[DMatrix<f64>]) -> DMatrix<f64> {
    let m = lags.first().map_or(0, |a| a.nrows());
    let p = lags.len();
    let mut c = DMatrix::zeros(m * p, m * p);
    for (j, a) in lags.iter().enumerate() {
        c.view_mut((0, j * m), (m, m)).copy_from(a);
    }
    for j in 1..p {
        c.view_mut((j * m, (j - 1) * m), (m, m))
            .copy_from(&DMatrix::identity(m, m));
    }
    c
}

/// Eigenvalues of a real square matrix. The Schur iteration can stall on
/// highly structured inputs (e.g. block companions with repeated roots);
/// such inputs are retried after a fixed orthogonal similarity transform.
pub fn eigenvalues(a: &DMatrix<f64>) -> Option<Vec<Complex<f64>>> {
    let n = a.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let max_iter = 200 * n;
    if let Some(s) = a.clone().try_schur(f64::EPSILON, max_iter) {
        return Some(s.complex_eigenvalues().iter().copied().collect());
    }
    for seed in 1..=4usize {
        let r = DMatrix::from_fn(n, n, |i, j| (((i * 7 + j * 13 + seed * 31) as f64) * 0.618).sin());
        let q = r.qr().q();
        let t = q.transpose() * a * &q;
        if let Some(s) = t.try_schur(f64::EPSILON, max_iter) {
            return Some(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    None
}

/// Largest eigenvalue modulus; `None` if the eigenvalues could not be found.
pub fn spectral_radius(a: &DMatrix<f64>) -> Option<f64> {
    eigenvalues(a).map(|e| e.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
