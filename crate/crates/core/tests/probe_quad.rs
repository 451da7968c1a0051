// temp diagnostic for the remaining P21 nonconvergence
use hybrid_noma::quadrature::{integrate_region, ptilde_quadrature};
use hybrid_noma::{Region, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FE);
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let users = [3usize, 4, 5, 6, 7, 8][rng.random_range(0..6)];
        let (m, n) = loop {
            let m = rng.random_range(1..=users);
            let n = rng.random_range(1..=users);
            if m != n { break (m, n); }
        };
        let beta = rng.random_range(0.02..0.48);
        let r_m = rng.random_range(0.05..2.5);
        let snr_db: f64 = rng.random_range(0.0..50.0);
        let ratio = rng.random_range(0.3..15.0);
        let rho_n = 10f64.powf(snr_db / 10.0);
        let c = SystemConfig::new(users, m, n, beta, rho_n, rho_n / ratio, r_m).unwrap();
        match ptilde_quadrature(&c, 1e-9) {
            Err(e) => {
                println!("#{i} {c:?} -> {e}");
                for r in Region::ALL {
                    match integrate_region(&c, r, 1e-9) {
                        Ok(est) => println!("   {r:?} = {:.6e} +- {:.1e}", est.value, est.stderr),
                        Err(e) => println!("   {r:?} FAILED: {e}"),
                    }
                }
            }
            Ok(q) => {
                if let Ok(cl) = hybrid_noma::closed_form::ptilde_closed(&c) {
                    if q.value > 1e-280 || cl.total > 1e-280 {
                        let rel = (cl.total - q.value).abs() / q.value.max(1e-280);
                        if rel > worst { worst = rel; }
                        if rel > 1e-6 {
                            println!("DISAGREE #{i} rel={rel:.2e} closed={:e} quad={:e} {c:?}", cl.total, q.value);
                        }
                    }
                }
            }
        }
    }
    println!("worst rel = {worst:.3e}");
}
