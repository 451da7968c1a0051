use hybrid_noma::quadrature::integrate_region;
use hybrid_noma::{Region, SystemConfig};

#[test]
fn probe_single() {
    let c = SystemConfig::new(3, 2, 1, 0.12888848632407118, 1.5857659836913636,
        0.25217802462943983, 1.5826380683304584).unwrap();
    for r in Region::ALL {
        match integrate_region(&c, r, 1e-9) {
            Ok(est) => println!("{r:?} = {:.8e} +- {:.2e}", est.value, est.stderr),
            Err(e) => println!("{r:?} FAILED: {e}"),
        }
    }
}
