#![allow(dead_code)]

use clap::Parser;
use irrcorr::cli::{run, Cli};
use irrcorr::{validate_group, DensityMatrix, PauliString, StabilizerGroup};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Ginibre ensemble `G G^dagger / tr`, redrawn until the smallest eigenvalue clears `floor`.
pub fn random_full_rank(rng: &mut impl Rng, n: usize, floor: f64) -> DensityMatrix {
    let dim = 1 << n;
    loop {
        let g = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(normal(rng), normal(rng)));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        let m = m.unscale(tr);
        let m = (&m + m.adjoint()).scale(0.5);
        let rho = DensityMatrix::new(m).expect("Ginibre matrix is a state");
        if rho.min_eigenvalue() > floor {
            return rho;
        }
    }
}

/// `m` random independent commuting signed Pauli strings on `n` qubits.
pub fn random_stabilizer_group(rng: &mut impl Rng, n: usize, m: usize) -> StabilizerGroup {
    let mask = (1u64 << n) - 1;
    'restart: loop {
        let mut gens: Vec<PauliString> = Vec::new();
        let mut attempts = 0;
        while gens.len() < m {
            attempts += 1;
            if attempts > 10_000 {
                continue 'restart;
            }
            let x = rng.gen::<u64>() & mask;
            let z = rng.gen::<u64>() & mask;
            if x == 0 && z == 0 {
                continue;
            }
            let phase = if rng.gen_bool(0.5) { 0 } else { 2 };
            let p = PauliString::from_masks(n, x, z, phase).unwrap();
            if !gens.iter().all(|g| g.commutes_with(&p)) {
                continue;
            }
            let mut candidate = gens.clone();
            candidate.push(p);
            if validate_group(&candidate).is_ok() {
                gens = candidate;
            }
        }
        return validate_group(&gens).unwrap();
    }
}

/// Independent binary entropy in bits, via natural logarithms.
pub fn binary_entropy_oracle(x: f64) -> f64 {
    -(x * x.ln() + (1.0 - x) * (1.0 - x).ln()) / std::f64::consts::LN_2
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("irrcorr").chain(args.iter().copied()))
        .unwrap_or_else(|e| panic!("{args:?}: {e}"));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = a.matrix() - b.matrix();
    let d = (&d + d.adjoint()).scale(0.5);
    nalgebra::SymmetricEigen::new(d).eigenvalues.iter().map(|e| e.abs()).sum::<f64>() / 2.0
}
