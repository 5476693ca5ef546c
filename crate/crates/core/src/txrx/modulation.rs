use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gray-coded constellations, peak-normalised so the largest point has unit
/// magnitude (a cell can reflect at most everything it receives).
///
/// Bit words are read most-significant bit first. Tables:
///
/// - BPSK: `0 → +1`, `1 → -1`.
/// - QPSK: first bit selects the sign of I, second the sign of Q (`0 → +`),
///   scaled by `1/√2`.
/// - 8PSK: word `w` sits at angle `2π·g⁻¹(w)/8`, `g⁻¹` the inverse Gray code.
/// - 16QAM: bits 0–1 give I, bits 2–3 give Q; each pair picks level
///   `2·g⁻¹(pair) − 3 ∈ {−3, −1, 1, 3}`, scaled by `1/(3√2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationScheme {
    Bpsk,
    Qpsk,
    Psk8,
    Qam16,
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 4] = [Self::Bpsk, Self::Qpsk, Self::Psk8, Self::Qam16];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qpsk => 2,
            Self::Psk8 => 3,
            Self::Qam16 => 4,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Psk8 => "8psk",
            Self::Qam16 => "16qam",
        }
    }

    /// Constellation point for bit word `word` (< order).
    pub fn point<T: Scalar>(self, word: usize) -> Complex<T> {
        debug_assert!(word < self.order());
        match self {
            Self::Bpsk => Complex::new(if word & 1 == 0 { T::one() } else { -T::one() }, T::zero()),
            Self::Qpsk => {
                let s = T::FRAC_1_SQRT_2();
                let i = if word & 0b10 == 0 { s } else { -s };
                let q = if word & 0b01 == 0 { s } else { -s };
                Complex::new(i, q)
            }
            Self::Psk8 => {
                let pos = gray_decode(word);
                Complex::from_polar(
                    T::one(),
                    T::two_pi() * T::from_usize_lossy(pos) / T::lit(8.0),
                )
            }
            Self::Qam16 => {
                let level = |pair: usize| T::from_usize_lossy(2 * gray_decode(pair)) - T::lit(3.0);
                let scale = T::one() / (T::lit(3.0) * T::SQRT_2());
                Complex::new(level(word >> 2) * scale, level(word & 0b11) * scale)
            }
        }
    }

    pub fn constellation<T: Scalar>(self) -> Vec<Complex<T>> {
        (0..self.order()).map(|w| self.point(w)).collect()
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Bpsk),
            "qpsk" => Ok(Self::Qpsk),
            "8psk" | "psk8" => Ok(Self::Psk8),
            "16qam" | "qam16" => Ok(Self::Qam16),
            other => Err(Error::Config(format!("unknown modulation '{other}'"))),
        }
    }
}

pub fn map_bits<T: Scalar>(bits: &[bool], scheme: ModulationScheme) -> Result<Vec<Complex<T>>> {
    let k = scheme.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::Framing(format!(
            "{} bits do not divide into {k}-bit {scheme} symbols",
            bits.len()
        )));
    }
    Ok(bits
        .chunks(k)
        .map(|chunk| {
            let word = chunk.iter().fold(0usize, |w, &b| (w << 1) | b as usize);
            scheme.point(word)
        })
        .collect())
}

/// Bit word of the constellation point nearest to `z` (lowest word on ties).
pub fn demap_symbol<T: Scalar>(z: Complex<T>, scheme: ModulationScheme) -> usize {
    let mut best = 0;
    let mut best_d = T::infinity();
    for w in 0..scheme.order() {
        let d = (z - scheme.point::<T>(w)).norm_sqr();
        if d < best_d {
            best = w;
            best_d = d;
        }
    }
    best
}

pub fn demap_symbols<T: Scalar>(symbols: &[Complex<T>], scheme: ModulationScheme) -> Vec<bool> {
    let k = scheme.bits_per_symbol();
    symbols
        .iter()
        .flat_map(|z| {
            let w = demap_symbol(*z, scheme);
            (0..k).rev().map(move |b| (w >> b) & 1 == 1)
        })
        .collect()
}
