//! Direct-summation reference routes.
//!
//! Nothing here shares code with the fast paths it is compared against: no
//! transforms, no shift tricks, just the defining sums.

use num_complex::Complex64;

use crate::abelian::FiniteAbelianGroup;
use crate::bits::Bitset;
use crate::error::{LabError, Result};
use crate::spectral::{GroupFunction, Spectrum};

/// `(f*g)(x) = (1/|G|) sum_t f(t) g(x - t)`, in `O(|G|^2)`.
pub fn convolve_direct(f: &GroupFunction, g: &GroupFunction) -> Result<GroupFunction> {
    if f.group() != g.group() {
        return Err(LabError::structural("convolution of functions on different groups"));
    }
    let group = f.group();
    let n = group.size();
    let values: Vec<Complex64> = (0..n)
        .map(|x| {
            (0..n)
                .map(|t| f.value(t) * g.value(group.sub_index(x, t)))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    GroupFunction::new(group.clone(), values)
}

/// Fourier coefficients straight from the definition.
pub fn dft_direct(f: &GroupFunction) -> Spectrum {
    let group = f.group();
    let n = group.size();
    let coefficients = (0..n)
        .map(|chi| {
            (0..n)
                .map(|x| f.value(x) * group.char_eval_index(chi, x).conj())
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    Spectrum::new(group.clone(), coefficients).expect("length matches")
}

/// `{a + b}` by the double loop.
pub fn sumset_direct(group: &FiniteAbelianGroup, a: &Bitset, b: &Bitset) -> Bitset {
    let mut out = Bitset::new(group.size());
    for x in a.iter_ones() {
        for y in b.iter_ones() {
            out.insert(group.add_index(x, y));
        }
    }
    out
}

/// Sumset of two finite integer sets given as sorted member lists.
pub fn integer_sumset(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    out.sort_unstable();
    out.dedup();
    out
}
