//! Hermitian eigensolver.
//!
//! Householder reduction to a real symmetric tridiagonal matrix followed by
//! implicit-shift QL. Real symmetric input takes a pure `f64` path; complex
//! input is reduced with split real/imaginary storage so the rank-2 updates
//! vectorize. Eigenvectors are either accumulated through QL (all of them)
//! or obtained by inverse iteration on the tridiagonal for an index window.

use std::ops::Range;

use num_complex::Complex64;

use super::matrix::{CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and optionally the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

/// All eigenvalues plus eigenvectors for a contiguous range of indices
/// into the sorted spectrum. Column `c` of `vectors` belongs to
/// `values[range.start + c]`.
#[derive(Clone, Debug)]
pub struct WindowedEigen {
    pub values: Vec<f64>,
    pub range: Range<usize>,
    pub vectors: CMatrix,
}

/// Per-eigenvalue iteration cap is `ITERATION_FACTOR * N`.
const ITERATION_FACTOR: usize = 30;

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(m: &HermitianMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Empty("eigh on a 0x0 matrix"));
    }
    let (tri, refl) = reduce(m);
    if !want_vectors {
        let mut d = tri.diag;
        let mut e = tri.off;
        ql_implicit(&mut d, &mut e, None)?;
        d.sort_by(f64::total_cmp);
        return Ok(EigenDecomposition {
            values: d,
            vectors: None,
        });
    }

    let mut d = tri.diag;
    let mut e = tri.off;
    // Row i of `zt` is column i of the tridiagonal eigenvector matrix.
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    ql_implicit(&mut d, &mut e, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();

    let mut vectors = CMatrix::zeros(n, n);
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for (col, &i) in order.iter().enumerate() {
        re.copy_from_slice(&zt[i * n..(i + 1) * n]);
        im.fill(0.0);
        refl.apply(&mut re, &mut im);
        for r in 0..n {
            vectors[(r, col)] = Complex64::new(re[r], im[r]);
        }
    }
    Ok(EigenDecomposition {
        values,
        vectors: Some(vectors),
    })
}

/// Eigenvalues of `m` together with the eigenvectors whose sorted indices
/// fall in `range`.
pub fn eigh_window(m: &HermitianMatrix, range: Range<usize>) -> Result<WindowedEigen> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Empty("eigh on a 0x0 matrix"));
    }
    if range.start > range.end || range.end > n {
        return Err(Error::invalid(format!(
            "eigenvector window {range:?} outside 0..{n}"
        )));
    }
    let (tri, refl) = reduce(m);
    let mut values = tri.diag.clone();
    let mut e = tri.off.clone();
    ql_implicit(&mut values, &mut e, None)?;
    values.sort_by(f64::total_cmp);

    let zs = tridiagonal_vectors(&tri, &values, range.clone());
    let mut vectors = CMatrix::zeros(n, range.len());
    let mut im = vec![0.0; n];
    for (c, mut z) in zs.into_iter().enumerate() {
        im.fill(0.0);
        refl.apply(&mut z, &mut im);
        for r in 0..n {
            vectors[(r, c)] = Complex64::new(z[r], im[r]);
        }
    }
    Ok(WindowedEigen {
        values,
        range,
        vectors,
    })
}

/// Symmetric tridiagonal matrix: `off[k]` couples rows `k` and `k + 1`.
/// `off` has length `n` with a trailing zero.
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Householder reflectors `H_k = I - tau_k v_k v_k^H` acting on indices
/// `k+1..n`, with `v_k[0] = 1` implicit and the tail packed.
enum Reflectors {
    Real {
        n: usize,
        tau: Vec<f64>,
        tail: Vec<f64>,
    },
    Complex {
        n: usize,
        tau: Vec<Complex64>,
        tail_re: Vec<f64>,
        tail_im: Vec<f64>,
    },
}

impl Reflectors {
    /// In place `y <- Q y` with `Q = H_0 H_1 ... H_{n-2}`.
    fn apply(&self, re: &mut [f64], im: &mut [f64]) {
        match self {
            Reflectors::Real { n, tau, tail } => {
                let n = *n;
                let mut offsets = packed_offsets(n);
                for k in (0..n.saturating_sub(1)).rev() {
                    let t = tau[k];
                    let off = offsets.pop().unwrap_or(0);
                    if t == 0.0 {
                        continue;
                    }
                    let v = &tail[off..off + (n - k - 2)];
                    let (yr, yi) = (&mut re[k + 1..], &mut im[k + 1..]);
                    let sr = yr[0] + dot(v, &yr[1..]);
                    let si = yi[0] + dot(v, &yi[1..]);
                    let (sr, si) = (t * sr, t * si);
                    yr[0] -= sr;
                    yi[0] -= si;
                    axpy(-sr, v, &mut yr[1..]);
                    axpy(-si, v, &mut yi[1..]);
                }
            }
            Reflectors::Complex {
                n,
                tau,
                tail_re,
                tail_im,
            } => {
                let n = *n;
                let mut offsets = packed_offsets(n);
                for k in (0..n.saturating_sub(1)).rev() {
                    let t = tau[k];
                    let off = offsets.pop().unwrap_or(0);
                    if t == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let len = n - k - 2;
                    let vr = &tail_re[off..off + len];
                    let vi = &tail_im[off..off + len];
                    let (yr, yi) = (&mut re[k + 1..], &mut im[k + 1..]);
                    // s = v^H y
                    let (mut sr, mut si) = (yr[0], yi[0]);
                    let (a, b) = conj_dot(vr, vi, &yr[1..], &yi[1..]);
                    sr += a;
                    si += b;
                    let s = t * Complex64::new(sr, si);
                    yr[0] -= s.re;
                    yi[0] -= s.im;
                    // y -= s v
                    for (((r, i), &ar), &ai) in yr[1..].iter_mut().zip(yi[1..].iter_mut()).zip(vr).zip(vi) {
                        *r -= s.re * ar - s.im * ai;
                        *i -= s.re * ai + s.im * ar;
                    }
                }
            }
        }
    }
}

/// Start offsets of each reflector tail in packed storage.
fn packed_offsets(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0;
    for k in 0..n.saturating_sub(1) {
        out.push(acc);
        acc += n - k - 2;
    }
    out
}

fn reduce(m: &HermitianMatrix) -> (Tridiagonal, Reflectors) {
    let n = m.dim();
    let src = m.as_matrix();
    if m.is_real() {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                a[i * n + j] = src[(i, j)].re;
            }
        }
        tridiagonalize_real(&mut a, n)
    } else {
        let mut ar = vec![0.0; n * n];
        let mut ai = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                ar[i * n + j] = src[(i, j)].re;
                ai[i * n + j] = src[(i, j)].im;
            }
        }
        tridiagonalize_complex(&mut ar, &mut ai, n)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `sum conj(a) * b` on split storage.
#[inline]
fn conj_dot(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> (f64, f64) {
    let (mut re, mut im) = ([0.0f64; 2], [0.0f64; 2]);
    let n = ar.len().min(br.len());
    let (ar, ai, br, bi) = (&ar[..n], &ai[..n], &br[..n], &bi[..n]);
    let mut j = 0;
    while j + 2 <= n {
        for l in 0..2 {
            re[l] += ar[j + l] * br[j + l] + ai[j + l] * bi[j + l];
            im[l] += ar[j + l] * bi[j + l] - ai[j + l] * br[j + l];
        }
        j += 2;
    }
    let (mut sr, mut si) = (re[0] + re[1], im[0] + im[1]);
    if j < n {
        sr += ar[j] * br[j] + ai[j] * bi[j];
        si += ar[j] * bi[j] - ai[j] * br[j];
    }
    (sr, si)
}

/// Reduces a real symmetric matrix (lower triangle of row-major `a`) to
/// tridiagonal form `T = Q^T A Q`.
fn tridiagonalize_real(a: &mut [f64], n: usize) -> (Tridiagonal, Reflectors) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let steps = n.saturating_sub(1);
    let mut tau = vec![0.0; steps];
    let mut tail = Vec::with_capacity(n * n / 2);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..steps {
        diag[k] = a[k * n + k];
        let m = n - k - 1;
        for i in 0..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        let alpha = v[0];
        let xnorm = dot(&v[1..m], &v[1..m]).sqrt();
        let (beta, t) = if xnorm == 0.0 {
            (alpha, 0.0)
        } else {
            let beta = -alpha.signum() * alpha.hypot(xnorm);
            let scale = 1.0 / (alpha - beta);
            for x in &mut v[1..m] {
                *x *= scale;
            }
            (beta, (beta - alpha) / beta)
        };
        v[0] = 1.0;
        off[k] = beta;
        tau[k] = t;
        tail.extend_from_slice(&v[1..m]);
        if t == 0.0 {
            continue;
        }

        // p = t * A v on the trailing block (lower storage).
        let base = k + 1;
        p[..m].fill(0.0);
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + base + i + 1];
            let vi = v[i];
            let s = dot(&row[..i], &v[..i]);
            axpy(vi, &row[..i], &mut p[..i]);
            p[i] += s + row[i] * vi;
        }
        for x in &mut p[..m] {
            *x *= t;
        }
        let c = 0.5 * t * dot(&v[..m], &p[..m]);
        for i in 0..m {
            p[i] -= c * v[i];
        }
        // A -= v w^T + w v^T
        for i in 0..m {
            let row = &mut a[(base + i) * n + base..(base + i) * n + base + i + 1];
            let (vi, wi) = (v[i], p[i]);
            for ((r, &vj), &wj) in row.iter_mut().zip(&v[..=i]).zip(&p[..=i]) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    if n > 0 {
        diag[n - 1] = a[n * n - 1];
    }
    (
        Tridiagonal { diag, off },
        Reflectors::Real { n, tau, tail },
    )
}

/// Complex Hermitian counterpart of [`tridiagonalize_real`]. The resulting
/// off-diagonal is real because each reflector maps its column onto a real
/// multiple of the first unit vector.
fn tridiagonalize_complex(ar: &mut [f64], ai: &mut [f64], n: usize) -> (Tridiagonal, Reflectors) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let steps = n.saturating_sub(1);
    let mut tau = vec![Complex64::new(0.0, 0.0); steps];
    let mut tail_re = Vec::with_capacity(n * n / 2);
    let mut tail_im = Vec::with_capacity(n * n / 2);
    let (mut vr, mut vi) = (vec![0.0; n], vec![0.0; n]);
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);

    for k in 0..steps {
        diag[k] = ar[k * n + k];
        let m = n - k - 1;
        for i in 0..m {
            vr[i] = ar[(k + 1 + i) * n + k];
            vi[i] = ai[(k + 1 + i) * n + k];
        }
        let alpha = Complex64::new(vr[0], vi[0]);
        let xnorm = (dot(&vr[1..m], &vr[1..m]) + dot(&vi[1..m], &vi[1..m])).sqrt();
        let (beta, t) = if xnorm == 0.0 && alpha.im == 0.0 {
            (alpha.re, Complex64::new(0.0, 0.0))
        } else {
            let beta = -alpha.re.signum() * (alpha.norm_sqr() + xnorm * xnorm).sqrt();
            let t = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
            let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
            for (r, i) in vr[1..m].iter_mut().zip(vi[1..m].iter_mut()) {
                let z = Complex64::new(*r, *i) * scale;
                *r = z.re;
                *i = z.im;
            }
            (beta, t)
        };
        vr[0] = 1.0;
        vi[0] = 0.0;
        off[k] = beta;
        tau[k] = t;
        tail_re.extend_from_slice(&vr[1..m]);
        tail_im.extend_from_slice(&vi[1..m]);
        if t == Complex64::new(0.0, 0.0) {
            continue;
        }

        let base = k + 1;
        pr[..m].fill(0.0);
        pi[..m].fill(0.0);
        for i in 0..m {
            let s = (base + i) * n + base;
            let (rr, ri) = (&ar[s..s + i + 1], &ai[s..s + i + 1]);
            let (vri, vii) = (vr[i], vi[i]);
            // sum_{j<i} a_ij v_j and p_j += conj(a_ij) v_i
            let (mut sr, mut si) = (0.0, 0.0);
            {
                let (pr_h, pi_h) = (&mut pr[..i], &mut pi[..i]);
                let (vr_h, vi_h) = (&vr[..i], &vi[..i]);
                let (rr_h, ri_h) = (&rr[..i], &ri[..i]);
                let mut acc_r = [0.0f64; 2];
                let mut acc_i = [0.0f64; 2];
                let mut j = 0;
                while j + 2 <= i {
                    for l in 0..2 {
                        let (a, b) = (rr_h[j + l], ri_h[j + l]);
                        let (x, y) = (vr_h[j + l], vi_h[j + l]);
                        acc_r[l] += a * x - b * y;
                        acc_i[l] += a * y + b * x;
                        pr_h[j + l] += a * vri + b * vii;
                        pi_h[j + l] += a * vii - b * vri;
                    }
                    j += 2;
                }
                sr += acc_r[0] + acc_r[1];
                si += acc_i[0] + acc_i[1];
                if j < i {
                    let (a, b) = (rr_h[j], ri_h[j]);
                    let (x, y) = (vr_h[j], vi_h[j]);
                    sr += a * x - b * y;
                    si += a * y + b * x;
                    pr_h[j] += a * vri + b * vii;
                    pi_h[j] += a * vii - b * vri;
                }
            }
            let d = rr[i];
            pr[i] += sr + d * vri;
            pi[i] += si + d * vii;
        }
        // p *= t
        for (r, i) in pr[..m].iter_mut().zip(pi[..m].iter_mut()) {
            let z = t * Complex64::new(*r, *i);
            *r = z.re;
            *i = z.im;
        }
        // w = p - (conj(t)/2) (v^H p) v
        let (hr, hi) = conj_dot(&vr[..m], &vi[..m], &pr[..m], &pi[..m]);
        let c = 0.5 * t.conj() * Complex64::new(hr, hi);
        for i in 0..m {
            pr[i] -= c.re * vr[i] - c.im * vi[i];
            pi[i] -= c.re * vi[i] + c.im * vr[i];
        }
        // A -= v w^H + w v^H
        for i in 0..m {
            let s = (base + i) * n + base;
            let (rr, ri) = (&mut ar[s..s + i + 1], &mut ai[s..s + i + 1]);
            let (vri, vii, wri, wii) = (vr[i], vi[i], pr[i], pi[i]);
            let it = rr
                .iter_mut()
                .zip(ri.iter_mut())
                .zip(vr[..=i].iter().zip(&vi[..=i]))
                .zip(pr[..=i].iter().zip(&pi[..=i]));
            for (((a, b), (&vrj, &vij)), (&wrj, &wij)) in it {
                *a -= vri * wrj + vii * wij + wri * vrj + wii * vij;
                *b -= vii * wrj - vri * wij + wii * vrj - wri * vij;
            }
            ri[i] = 0.0;
        }
    }
    if n > 0 {
        diag[n - 1] = ar[n * n - 1];
    }
    (
        Tridiagonal { diag, off },
        Reflectors::Complex {
            n,
            tau,
            tail_re,
            tail_im,
        },
    )
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On return `d` holds
/// the (unsorted) eigenvalues; when `zt` is given its rows are rotated so
/// that row `i` becomes the eigenvector of `d[i]`.
pub(crate) fn ql_implicit(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let cap = ITERATION_FACTOR * n;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > cap {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: cap,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvectors of the tridiagonal for sorted eigenvalue indices in `range`,
/// by inverse iteration with Gram-Schmidt inside clusters of close
/// eigenvalues.
pub(crate) fn tridiagonal_vectors(tri: &Tridiagonal, sorted: &[f64], range: Range<usize>) -> Vec<Vec<f64>> {
    let n = tri.diag.len();
    if range.is_empty() {
        return Vec::new();
    }
    let norm = (0..n)
        .map(|i| {
            let left = if i > 0 { tri.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { tri.off[i].abs() } else { 0.0 };
            tri.diag[i].abs() + left + right
        })
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let ortol = 1e-3 * norm;
    let sep = 10.0 * f64::EPSILON * norm;

    // Widen the range so that no cluster straddles its ends.
    let mut lo = range.start;
    while lo > 0 && sorted[lo] - sorted[lo - 1] < ortol {
        lo -= 1;
    }
    let mut hi = range.end;
    while hi < n && sorted[hi] - sorted[hi - 1] < ortol {
        hi += 1;
    }

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(hi - lo);
    let mut cluster_start = 0;
    let mut shifted_prev = f64::NEG_INFINITY;
    for idx in lo..hi {
        let pos = idx - lo;
        if pos > 0 && sorted[idx] - sorted[idx - 1] >= ortol {
            cluster_start = pos;
        }
        // Separate (numerically) equal eigenvalues.
        let mut shift = sorted[idx];
        if shift - shifted_prev < sep {
            shift = shifted_prev + sep;
        }
        shifted_prev = shift;

        let lu = TridiagLu::factor(tri, shift, sep.max(f64::MIN_POSITIVE));
        let mut x = start_vector(n, idx);
        let mut extra = 0;
        for _ in 0..8 {
            let mut y = x.clone();
            lu.solve(&mut y);
            for prev in &out[cluster_start..pos] {
                let proj = dot(prev, &y);
                axpy(-proj, prev, &mut y);
            }
            let growth = dot(&y, &y).sqrt();
            if !growth.is_finite() || growth == 0.0 {
                x = start_vector(n, idx + 7919);
                continue;
            }
            for v in &mut y {
                *v /= growth;
            }
            x = y;
            // residual of the normalised iterate is about 1 / growth
            if growth * 1e-13 * norm >= 1.0 {
                extra += 1;
                if extra >= 2 {
                    break;
                }
            }
        }
        // final re-orthogonalisation pass
        for prev in &out[cluster_start..pos] {
            let proj = dot(prev, &x);
            axpy(-proj, prev, &mut x);
        }
        let nrm = dot(&x, &x).sqrt();
        for v in &mut x {
            *v /= nrm;
        }
        out.push(x);
    }
    out.drain(range.end - lo..);
    out.drain(..range.start - lo);
    out
}

fn start_vector(n: usize, salt: usize) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (salt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let nrm = dot(&v, &v).sqrt();
    for x in &mut v {
        *x /= nrm;
    }
    v
}

/// LU factorisation with partial pivoting of `T - shift I`.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(tri: &Tridiagonal, shift: f64, tiny: f64) -> Self {
        let n = tri.diag.len();
        let mut u0: Vec<f64> = tri.diag.iter().map(|d| d - shift).collect();
        let mut u1: Vec<f64> = tri.off[..n.saturating_sub(1)].to_vec();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let sub = tri.off[i];
            let next_u1 = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
            if u0[i].abs() >= sub.abs() {
                if u0[i] == 0.0 {
                    u0[i] = tiny;
                }
                let l = sub / u0[i];
                mult[i] = l;
                u0[i + 1] -= l * u1[i];
            } else {
                let (a, b) = (u0[i], u1[i]);
                let l = a / sub;
                mult[i] = l;
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = u0[i + 1];
                u2[i] = next_u1;
                u0[i + 1] = b - l * u1[i];
                if i + 1 < n - 1 {
                    u1[i + 1] = -l * u2[i];
                }
            }
        }
        if let Some(last) = u0.last_mut() {
            if *last == 0.0 {
                *last = tiny;
            }
        }
        TridiagLu {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve(&self, y: &mut [f64]) {
        let n = y.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * y[i + 2];
            }
            y[i] = s / self.u0[i];
        }
    }
}
