use num_complex::Complex64;
use starkres::potential::Potential;
use starkres::schrodinger::{self, BoundaryData};
use starkres::spectrum;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

fn main() {
    let p = Potential::square_well(-2.0, 1.0);
    let bs = &spectrum::bound_states(&p).unwrap()[0];
    let kappa = (-bs.lambda0).sqrt();
    let scale = bs.kappa_minus * (-kappa).exp();
    let z = c(bs.lambda0, 0.0);

    let n = bs.phi.len();
    let mid = n / 2;
    let xh = bs.phi[mid + 1].0;

    // single-call propagation of the right seed to +h
    let seed_r = BoundaryData::new(1.0, c(scale, 0.0), c(-kappa * scale, 0.0));
    let single = schrodinger::propagate(&p, z, 0.0, &seed_r, xh).unwrap();
    println!("right single   = {:.17e}", single.psi.re);

    // chained propagation mimicking sample_solution with the same stations
    let stations: Vec<f64> = bs.phi.iter().map(|&(x, _)| x)
        .filter(|&x| x > 0.0 && x < 1.0).rev().collect();
    let chain = schrodinger::sample_solution(&p, z, 0.0, &seed_r, &stations).unwrap();
    println!("right chained  = {:.17e}", chain.last().unwrap().psi.re);
    println!("stored         = {:.17e}", bs.phi[mid + 1].1);
    println!("stations: first = {}, last = {}, count = {}",
        stations[0], stations[stations.len()-1], stations.len());
    // where does the chain diverge from single calls?
    for (i, &x) in stations.iter().enumerate() {
        let direct = schrodinger::propagate(&p, z, 0.0, &seed_r, x).unwrap();
        let diff = (chain[i].psi - direct.psi).norm();
        if diff > 1e-13 {
            println!("first divergence at station {i} x = {x}: {diff:.3e}");
            break;
        }
    }
}
