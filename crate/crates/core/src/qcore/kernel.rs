//! Strided application of a small dense matrix to selected positions of a tensor-product
//! register.
//!
//! A register is described by its per-position dimensions; position 0 is the most
//! significant index. The same routine serves gate application on state vectors, both sides
//! of a density matrix (rows are positions `0..N`, columns `N..2N`) and site kernels on
//! multi-copy registers in the exact moment engine.

use crate::{CMatrix, Error, Result, C64};

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        s[p] = s[p + 1] * dims[p + 1];
    }
    s
}

/// `data <- (mat acting on targets) data`, in place. The first target is the most
/// significant index of `mat`.
pub fn apply_on_positions(data: &mut [C64], dims: &[usize], targets: &[usize], mat: &CMatrix) -> Result<()> {
    let total: usize = dims.iter().product();
    if data.len() != total {
        return Err(Error::DimensionMismatch(format!(
            "register of {} entries, dims imply {total}",
            data.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= dims.len() {
            return Err(Error::SiteOutOfRange { site: t, n: dims.len() });
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("repeated target {t}")));
        }
    }
    let m: usize = targets.iter().map(|&t| dims[t]).product();
    if mat.nrows() != m || mat.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on targets spanning dimension {m}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let stride = strides(dims);

    // offset of each local basis index inside the register
    let mut offsets = vec![0usize; m];
    for (j, off) in offsets.iter_mut().enumerate() {
        let mut rest = j;
        for &t in targets.iter().rev() {
            *off += (rest % dims[t]) * stride[t];
            rest /= dims[t];
        }
    }
    let row_major: Vec<C64> = (0..m)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .map(|(r, c)| mat[(r, c)])
        .collect();

    let free: Vec<usize> = (0..dims.len()).filter(|p| !targets.contains(p)).collect();
    let mut counter = vec![0usize; free.len()];
    let mut base = 0usize;
    let mut gathered = vec![C64::new(0.0, 0.0); m];
    loop {
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = data[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &row_major[r * m..(r + 1) * m];
            data[base + off] = row.iter().zip(&gathered).map(|(a, b)| a * b).sum();
        }
        // odometer over the free positions, last one fastest
        let mut k = free.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            let p = free[k];
            counter[k] += 1;
            base += stride[p];
            if counter[k] < dims[p] {
                break;
            }
            base -= counter[k] * stride[p];
            counter[k] = 0;
        }
    }
}

/// Kronecker product of two matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matches_explicit_kronecker_embedding() {
        // 3 qubits, random-ish 2-qubit matrix on positions (2, 0)
        let g = CMatrix::from_fn(4, 4, |r, k| {
            C64::new((r * 4 + k) as f64 * 0.1, (r as f64) - (k as f64) * 0.3)
        });
        let v: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
        let mut got = v.clone();
        apply_on_positions(&mut got, &[2, 2, 2], &[2, 0], &g).unwrap();

        // explicit: permute so targets are (2,0) → build full matrix by index arithmetic
        let mut want = vec![c(0.0); 8];
        for out in 0..8usize {
            let bits = |i: usize| [(i >> 2) & 1, (i >> 1) & 1, i & 1];
            let o = bits(out);
            for inp in 0..8usize {
                let b = bits(inp);
                if o[1] != b[1] {
                    continue;
                }
                let r = o[2] * 2 + o[0];
                let k = b[2] * 2 + b[0];
                want[out] += g[(r, k)] * v[inp];
            }
        }
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut v = vec![c(1.0); 4];
        let g = CMatrix::identity(2, 2);
        assert!(apply_on_positions(&mut v, &[2, 2], &[2], &g).is_err());
        assert!(apply_on_positions(&mut v, &[2, 2], &[0, 1], &g).is_err());
        assert!(apply_on_positions(&mut v, &[2, 2], &[0, 0], &CMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn kron_of_identities() {
        let k = kron(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3));
        assert_eq!(k, CMatrix::identity(6, 6));
    }
}
