use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use structured_rmt::linalg::{eigh, eigh_window, HermitianMatrix};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for n in [128usize, 256, 512, 1024] {
        for complex in [false, true] {
            let m = HermitianMatrix::from_upper(n, |_, _| {
                let im = if complex { rng.random_range(-0.5..0.5) } else { 0.0 };
                Complex64::new(rng.random_range(-0.5..0.5), im)
            });
            let t = Instant::now();
            let _ = eigh(&m, false).unwrap();
            let values = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let _ = eigh_window(&m, 3 * n / 8..5 * n / 8).unwrap();
            let window = t.elapsed().as_secs_f64();
            println!("n={n} complex={complex} values={values:.4}s window_vectors={window:.4}s");
        }
    }
}
