//! Small dense matrix helpers: 4×4 complex products, a cyclic Jacobi
//! eigensolver for real symmetric matrices and a 3×3 linear solve.

use num_complex::Complex64 as C64;

pub type CMat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn identity4() -> CMat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul4(a: &CMat4, b: &CMat4) -> CMat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec4(a: &CMat4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(v).map(|(x, y)| x * y).sum();
    }
    out
}

/// `a^k` by repeated squaring.
pub fn power4(a: &CMat4, mut k: u64) -> CMat4 {
    let mut result = identity4();
    let mut base = *a;
    while k > 0 {
        if k & 1 == 1 {
            result = matmul4(&result, &base);
        }
        k >>= 1;
        if k > 0 {
            base = matmul4(&base, &base);
        }
    }
    result
}

/// `E_k` with `(I + e)^k = I + E_k`, by repeated squaring on the increment.
///
/// Keeping the identity out of the products preserves the low-order bits of
/// a small increment `e`, so long powers of a near-identity one-step map do
/// not accumulate one rounding error of size `ε·|I|` per step.
pub fn power4_increment(e: &CMat4, mut k: u64) -> CMat4 {
    let add = |a: &CMat4, b: &CMat4| -> CMat4 { std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j])) };
    let mut result = [[ZERO; 4]; 4];
    let mut base = *e;
    while k > 0 {
        if k & 1 == 1 {
            result = add(&add(&result, &base), &matmul4(&result, &base));
        }
        k >>= 1;
        if k > 0 {
            base = add(&add(&base, &base), &matmul4(&base, &base));
        }
    }
    result
}

/// Eigenvalues of a real symmetric `n×n` matrix (row-major, consumed) by
/// cyclic Jacobi rotations, returned in ascending order.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..64 {
        let off: f64 = (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q))).map(|(p, q)| a[p * n + q].powi(2)).sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a 4×4 Hermitian matrix, ascending.
///
/// Works on the 8×8 real embedding `[[X, −Y], [Y, X]]` of `X + iY`, whose
/// spectrum is that of the original matrix with every value doubled.
pub fn hermitian_eigenvalues(m: &CMat4) -> [f64; 4] {
    let n = 8;
    let mut a = vec![0.0; n * n];
    for i in 0..4 {
        for j in 0..4 {
            // Symmetrize against roundoff in the Hermitian input.
            let re = 0.5 * (m[i][j].re + m[j][i].re);
            let im = 0.5 * (m[i][j].im - m[j][i].im);
            a[i * n + j] = re;
            a[(i + 4) * n + j + 4] = re;
            a[(i + 4) * n + j] = im;
            a[i * n + j + 4] = -im;
        }
    }
    let ev = symmetric_eigenvalues(a, n);
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (ev[2 * k] + ev[2 * k + 1]);
    }
    out
}

/// Solves `a·x = b` for a 3×3 real system by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot vanishes.
pub fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
