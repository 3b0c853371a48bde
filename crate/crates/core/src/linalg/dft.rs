use std::f64::consts::PI;

use num_complex::Complex64;

/// Unitary discrete Fourier transform with 0-based indices:
///
/// `out[p] = N^{-1/2} * sum_j exp(sign * 2 pi i j p / N) * v[j]`.
///
/// 1-based conventions differ from this by a phase on every component and a
/// cyclic relabelling of `p`, neither of which affects `|out[p]|`.
/// Power-of-two lengths use an iterative radix-2 transform; other lengths
/// fall back to the direct O(N^2) sum.
pub fn dft(v: &[Complex64], sign: i32) -> Vec<Complex64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let mut out = if n.is_power_of_two() {
        radix2(v, s)
    } else {
        naive(v, s)
    };
    let norm = 1.0 / (n as f64).sqrt();
    for z in &mut out {
        *z *= norm;
    }
    out
}

fn naive(v: &[Complex64], s: f64) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|p| {
            v.iter()
                .enumerate()
                .map(|(j, &x)| {
                    // reduce j*p mod n first to keep the angle small
                    let jp = ((j as u128 * p as u128) % n as u128) as f64;
                    x * Complex64::from_polar(1.0, s * 2.0 * PI * jp / n as f64)
                })
                .sum()
        })
        .collect()
}

fn radix2(v: &[Complex64], s: f64) -> Vec<Complex64> {
    let n = v.len();
    let bits = n.trailing_zeros();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for (i, &x) in v.iter().enumerate() {
        let r = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        a[r] = x;
    }
    // twiddles for the largest stage; smaller stages stride through them
    let half = n / 2;
    let twiddles: Vec<Complex64> = (0..half)
        .map(|k| Complex64::from_polar(1.0, s * 2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for (k, (x, y)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = twiddles[k * step] * *y;
                *y = *x - t;
                *x += t;
            }
        }
        len <<= 1;
    }
    a
}
