//! Harmonic sums sum_k (n/2^k)^m exp(-n m/2^k): the direct value oscillates
//! around a constant with period 1 in log2 n.

use radio_election::analytics::special::{asymptote, fourier_amplitude, gamma_abs, harmonic_sum, MellinVariant, CHI};

fn main() {
    println!("|Gamma(4 + i 2pi/ln 2)| = {:.16e}", gamma_abs(4, CHI));
    println!();
    println!("U-form, m = 1, over one period of log2 n:");
    let c = asymptote(MellinVariant::U, 1);
    println!(
        "  constant term {c:.10}, amplitude bound {:.3e}",
        fourier_amplitude(MellinVariant::U, 1, 16) / 2.0
    );
    for i in 0..8 {
        let x = 20.0 + i as f64 / 8.0;
        let s = harmonic_sum(MellinVariant::U, 1, 2f64.powf(x), 64);
        println!("  log2 n = {x:.3}: sum = {s:.10}  residual {:+.3e}", s - c);
    }
    println!();
    println!("amplitudes over m (maxima at m = 11 for U and m = 2 for V):");
    for m in [1, 2, 3, 5, 10, 11, 12, 20, 40] {
        println!(
            "  m = {m:>2}: U {:.7}  V {:.5e}",
            fourier_amplitude(MellinVariant::U, m, 16),
            fourier_amplitude(MellinVariant::V, m, 16)
        );
    }
}
