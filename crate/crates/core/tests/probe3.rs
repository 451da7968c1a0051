use hybrid_noma::quadrature::integrate_region;
use hybrid_noma::{Region, SystemConfig};

#[test]
fn probe_regions() {
    let c = SystemConfig::new(3, 1, 2, 0.024407217127817838, 36319.87697480187,
        115901.21534952427, 1.1383125794537248).unwrap();
    let truth = [
        (Region::P11, 5.121491933648319e-5),
        (Region::P12, 5.286467428662059e-3),
        (Region::P21, 1.348239430918475e-2),
        (Region::P22, 4.104925548074129e-6),
    ];
    for (r, t) in truth {
        let est = integrate_region(&c, r, 1e-9).unwrap();
        println!("{r:?}: rust={:.12e} true={t:.12e} rel={:.2e} (claimed err {:.1e})",
            est.value, (est.value - t).abs() / t, est.stderr);
    }
}
