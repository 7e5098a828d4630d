use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::CMatrix;

/// Largest qubit count a bitmask string can hold.
pub const MAX_PAULI_QUBITS: usize = 64;

/// Signed `n`-qubit Pauli operator `i^phase * P_1 ⊗ ... ⊗ P_n`.
///
/// Qubit with 1-based label `j` lives at bit `n - j` of both masks, so the
/// mask bits line up with dense basis indices. A qubit carries `X` when only
/// its x bit is set, `Z` when only its z bit is set and `Y` when both are.
/// The phase is relative to this `Y` convention, so `+Y` has phase 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0, phase: 0 }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PAULI_QUBITS {
            return Err(Error::Argument(format!(
                "Pauli strings need 1..={MAX_PAULI_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let mask = full_mask(n_qubits);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Argument(format!("bit masks exceed {n_qubits} qubits")));
        }
        Ok(Self { n_qubits, x, z, phase: phase % 4 })
    }

    /// A single Pauli letter on particle `label` (1-based), identity elsewhere.
    pub fn single(n_qubits: usize, label: usize, letter: char) -> Result<Self> {
        if label == 0 || label > n_qubits {
            return Err(Error::Argument(format!("particle {label} outside 1..={n_qubits}")));
        }
        let bit = 1u64 << (n_qubits - label);
        let (x, z) = letter_bits(letter)
            .ok_or_else(|| Error::Argument(format!("unknown Pauli letter {letter:?}")))?;
        Self::from_masks(n_qubits, if x { bit } else { 0 }, if z { bit } else { 0 }, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Exponent of `i`, modulo 4.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Number of non-identity tensor factors.
    pub fn support(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// `N_I`: number of identity tensor factors.
    pub fn identity_count(&self) -> usize {
        self.n_qubits - self.support()
    }

    /// True when the symplectic part is trivial (any phase).
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn negate(mut self) -> Self {
        self.phase = (self.phase + 2) % 4;
        self
    }

    /// Same operator with the phase dropped to `+1`.
    pub fn unsigned(mut self) -> Self {
        self.phase = 0;
        self
    }

    /// Symplectic vector `x ‖ z` packed into one word.
    pub fn symplectic(&self) -> u128 {
        (self.x as u128) << 64 | self.z as u128
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Letter on 1-based particle `label`.
    pub fn letter(&self, label: usize) -> char {
        let bit = self.n_qubits - label;
        match (self.x >> bit & 1, self.z >> bit & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Operator product `self * other` with phase tracking.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Argument(format!(
                "cannot multiply Pauli strings on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        let mut exponent = self.phase as i32 + other.phase as i32;
        for bit in 0..self.n_qubits {
            let (x1, z1) = ((self.x >> bit & 1) as i32, (self.z >> bit & 1) as i32);
            let (x2, z2) = ((other.x >> bit & 1) as i32, (other.z >> bit & 1) as i32);
            exponent += single_qubit_phase(x1, z1, x2, z2);
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: exponent.rem_euclid(4) as u8,
        })
    }

    /// Matrix entry `P[col ^ x, col]`, the only nonzero in column `col`.
    pub fn column_entry(&self, col: u64) -> Complex64 {
        let exponent = self.phase as u32 + (self.x & self.z).count_ones();
        let value = I_POWERS[(exponent % 4) as usize];
        if (self.z & col).count_ones() % 2 == 1 {
            -value
        } else {
            value
        }
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        self.add_scaled_to(&mut m, Complex64::new(1.0, 0.0));
        m
    }

    /// `m += coeff * P` without materializing `P`.
    pub fn add_scaled_to(&self, m: &mut CMatrix, coeff: Complex64) {
        let x = self.x as usize;
        for col in 0..m.ncols() {
            m[(col ^ x, col)] += coeff * self.column_entry(col as u64);
        }
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn full_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

/// Exponent of `i` picked up by `P(x1,z1) * P(x2,z2)` on a single qubit.
fn single_qubit_phase(x1: i32, z1: i32, x2: i32, z2: i32) -> i32 {
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

fn letter_bits(letter: char) -> Option<(bool, bool)> {
    match letter {
        'I' => Some((false, false)),
        'X' => Some((true, false)),
        'Y' => Some((true, true)),
        'Z' => Some((false, true)),
        _ => None,
    }
}

impl std::ops::Mul for PauliString {
    type Output = PauliString;

    /// Panics on mismatched qubit counts; use [`PauliString::multiply`] otherwise.
    fn mul(self, rhs: PauliString) -> PauliString {
        self.multiply(&rhs).expect("Pauli strings of equal size")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for label in 1..=self.n_qubits {
            write!(f, "{}", self.letter(label))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-]` followed by letters from `{I,X,Y,Z}`; the sign defaults to `+`.
    fn from_str(token: &str) -> Result<Self> {
        let token = token.trim();
        let (phase, body) = match token.as_bytes().first() {
            Some(b'+') => (0, &token[1..]),
            Some(b'-') => (2, &token[1..]),
            _ => (0, token),
        };
        if body.is_empty() {
            return Err(Error::Parse {
                location: format!("token {token:?}"),
                message: "empty Pauli string".into(),
            });
        }
        let n_qubits = body.chars().count();
        let (mut x, mut z) = (0u64, 0u64);
        for (i, letter) in body.chars().enumerate() {
            let (xb, zb) = letter_bits(letter).ok_or_else(|| Error::Parse {
                location: format!("token {token:?}, position {}", i + 1),
                message: format!("unexpected character {letter:?}, expected one of I, X, Y, Z"),
            })?;
            let bit = n_qubits.saturating_sub(i + 1);
            x |= (xb as u64) << bit;
            z |= (zb as u64) << bit;
        }
        Self::from_masks(n_qubits, x, z, phase)
    }
}

/// Checked product of two Pauli strings.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}
