//! Fixtures shared by the benchmarks in `benches/`.

use fadingdpc::bounds::PowerConfig;
use fadingdpc::dpc_sim::{self_similar_code, DpcConfig};
use fadingdpc::lattice::Lattice;
use fadingdpc::{FadingSpec, Precoder};

/// Rayleigh `tx x rx` at `ρ = 10` with strong dirt.
pub fn rayleigh_case(tx: usize, rx: usize) -> (PowerConfig, FadingSpec) {
    let power = PowerConfig::new(10.0 * tx as f64, 1e4, 1.0, tx, rx).expect("valid powers");
    (power, FadingSpec::rayleigh(tx, rx).expect("valid antennas"))
}

/// Construction-A lattice `(1/5)·([1 2 3 4] + 5Z⁴)`.
pub fn construction_a_4() -> Lattice {
    Lattice::construction_a(4, 5, vec![vec![1, 2, 3, 4]], 1.0).expect("valid generator")
}

/// Scalar Rayleigh transceiver with a cubic code of `bits` per dimension.
pub fn scalar_transceiver(n_sym: usize, bits: u32) -> DpcConfig {
    let power = PowerConfig::new(100.0, 10.0, 1.0, 1, 1).expect("valid powers");
    let code = self_similar_code(&power, n_sym, bits).expect("code fits");
    let spec = FadingSpec::rayleigh(1, 1).expect("valid antennas");
    DpcConfig::new(power, spec, code, n_sym, 0.1, Precoder::Identity).expect("consistent config")
}
