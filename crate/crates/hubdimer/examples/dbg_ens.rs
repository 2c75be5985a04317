use hubdimer::analytic::f_c_pure_onsite;
use hubdimer::model::{InteractionParams, RealRdm};
use hubdimer::search::{min_ensemble, SearchOptions};

fn main() {
    let w = InteractionParams::on_site(1.0);
    let opts = SearchOptions::default();
    let mut worst = (0.0f64, 0.0, 0.0);
    for i in 0..21 {
        for j in 0..21 {
            let r = RealRdm { g11: i as f64 / 20.0, g12: -0.5 + j as f64 / 20.0 };
            if !r.in_disk() { continue; }
            let (v, _) = min_ensemble(&w, &r.into(), &opts).unwrap();
            let d = (v - f_c_pure_onsite(1.0, &r).unwrap()).abs();
            if d > worst.0 { worst = (d, r.g11, r.g12); }
        }
    }
    println!("worst {:e} at ({}, {})", worst.0, worst.1, worst.2);
    let r = RealRdm { g11: worst.1, g12: worst.2 };
    println!("expected {}", f_c_pure_onsite(1.0, &r).unwrap());
    println!("got      {}", min_ensemble(&w, &r.into(), &opts).unwrap().0);
}
