use chansplit::gf2::{basic_kernel, BitMatrix, GOLAY_DUAL_P};
use chansplit::split::spectral_chain;

fn main() {
    let p: BitMatrix = GOLAY_DUAL_P.parse().unwrap();
    let f = BitMatrix::from_generator(&p);
    let t = std::time::Instant::now();
    let r = spectral_chain(0.1, &f).unwrap();
    println!("golay {:.6} in {:?}", r.normalized, t.elapsed());
    for k in 1..=4 {
        let t = std::time::Instant::now();
        let r = spectral_chain(0.1, &basic_kernel().kron_power(k).unwrap()).unwrap();
        println!("k={k} {:.6} in {:?}", r.normalized, t.elapsed());
    }
}
