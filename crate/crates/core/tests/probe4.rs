use hybrid_noma::quadrature::ptilde_quadrature;
use hybrid_noma::SystemConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[test]
fn probe_timing() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FE);
    for i in 0..320u64 {
        let users = [3usize, 4, 5, 6, 7, 8][rng.random_range(0..6)];
        let (m, n) = loop {
            let m = rng.random_range(1..=users);
            let n = rng.random_range(1..=users);
            if m != n {
                break (m, n);
            }
        };
        let beta = rng.random_range(0.02..0.48);
        let r_m = rng.random_range(0.05..2.5);
        let snr_db: f64 = rng.random_range(0.0..50.0);
        let ratio = rng.random_range(0.3..15.0);
        let rho_n = 10f64.powf(snr_db / 10.0);
        let c = SystemConfig::new(users, m, n, beta, rho_n, rho_n / ratio, r_m).unwrap();
        if i < 284 {
            continue;
        }
        let t0 = Instant::now();
        let r = ptilde_quadrature(&c, 1e-9);
        let dt = t0.elapsed().as_millis();
        if dt > 300 || r.is_err() {
            println!("#{i} took {dt} ms, err={:?}: {c:?}", r.as_ref().err());
        }
    }
}
