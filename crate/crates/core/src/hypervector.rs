//! Dense real hypervectors and the binding algebra on them.
//!
//! Binding is circular convolution, `(a * b)[t] = sum_j a[j] b[t - j]`, and
//! unbinding is circular correlation, `(a ⊛ b)[t] = sum_j a[j] b[t + j]`,
//! with all indices taken modulo the dimension. Both have an O(d²) direct
//! evaluation and an O(d log d) spectral one; [`convolve`] and [`correlate`]
//! pick the spectral path whenever the dimension is a power of two.

use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HbfError, Result};
use crate::fft;

/// Dense real vector; every coordinate is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HyperVector {
    data: Vec<f64>,
}

impl HyperVector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(HbfError::invalid("hypervector dimension must be positive"));
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(HbfError::NonFinite { index });
        }
        Ok(Self { data })
    }

    /// Callers guarantee non-empty, finite data.
    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "hypervector dimension must be positive");
        Self {
            data: vec![0.0; dim],
        }
    }

    /// Unit impulse `e0 = [1, 0, ..., 0]`, the identity for convolution.
    pub fn impulse(dim: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[0] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_vec_unchecked(self.data.iter().map(|x| x * c).collect())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &HyperVector, c: f64) -> Result<()> {
        check_dims(self, other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += c * y;
        }
        Ok(())
    }

    /// Coordinate involution `x'[t] = x[-t mod d]`.
    pub fn involution(&self) -> Self {
        let d = self.dim();
        Self::from_vec_unchecked((0..d).map(|t| self.data[(d - t) % d]).collect())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl Index<usize> for HyperVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl TryFrom<Vec<f64>> for HyperVector {
    type Error = HbfError;

    fn try_from(data: Vec<f64>) -> Result<Self> {
        Self::new(data)
    }
}

impl From<HyperVector> for Vec<f64> {
    fn from(v: HyperVector) -> Self {
        v.data
    }
}

/// A hypervector whose coordinates are exactly +1.0 or -1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct SignVector(HyperVector);

impl SignVector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|&x| x != 1.0 && x != -1.0) {
            return Err(HbfError::invalid(format!(
                "coordinate {i} of a sign vector is {}, not ±1",
                data[i]
            )));
        }
        HyperVector::new(data).map(Self)
    }

    /// Builds from booleans, `true` mapping to +1.
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Result<Self> {
        let data: Vec<f64> = bits
            .into_iter()
            .map(|b| if b { 1.0 } else { -1.0 })
            .collect();
        HyperVector::new(data).map(Self)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_vector(&self) -> &HyperVector {
        &self.0
    }

    pub fn into_vector(self) -> HyperVector {
        self.0
    }

    pub fn negate_at(&mut self, i: usize) {
        self.0.data[i] = -self.0.data[i];
    }
}

impl AsRef<HyperVector> for HyperVector {
    fn as_ref(&self) -> &HyperVector {
        self
    }
}

impl AsRef<HyperVector> for SignVector {
    fn as_ref(&self) -> &HyperVector {
        &self.0
    }
}

fn check_dims(a: &HyperVector, b: &HyperVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(HbfError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `⟨a, b⟩ = sum_j a[j] b[j]`.
pub fn inner_product(a: &HyperVector, b: &HyperVector) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot(a.as_slice(), b.as_slice()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine(a: &HyperVector, b: &HyperVector) -> Result<f64> {
    let ip = inner_product(a, b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(HbfError::invalid("cosine of a zero vector is undefined"));
    }
    Ok((ip / (na * nb)).clamp(-1.0, 1.0))
}

/// `out[i] += c * src[i]` over the common length.
fn axpy(out: &mut [f64], c: f64, src: &[f64]) {
    for (o, s) in out.iter_mut().zip(src) {
        *o += c * s;
    }
}

/// Direct evaluation of `(a * b)[t] = sum_j a[j] b[(t - j) mod d]`, one
/// shifted copy of `b` per term so the inner loop is contiguous.
pub fn convolve_naive(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    check_dims(a, b)?;
    let d = a.dim();
    let (x, y) = (a.as_slice(), b.as_slice());
    let mut out = vec![0.0; d];
    for (j, &c) in x.iter().enumerate() {
        let (head, tail) = out.split_at_mut(j);
        axpy(tail, c, &y[..d - j]);
        axpy(head, c, &y[d - j..]);
    }
    Ok(HyperVector::from_vec_unchecked(out))
}

/// Direct evaluation of `(a ⊛ b)[t] = sum_j a[j] b[(t + j) mod d]`.
pub fn correlate_naive(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    check_dims(a, b)?;
    let d = a.dim();
    let (x, y) = (a.as_slice(), b.as_slice());
    let mut out = vec![0.0; d];
    for (j, &c) in x.iter().enumerate() {
        let (head, tail) = out.split_at_mut(d - j);
        axpy(head, c, &y[j..]);
        axpy(tail, c, &y[..j]);
    }
    Ok(HyperVector::from_vec_unchecked(out))
}

/// Spectral convolution, `F(a * b) = F(a) ⊙ F(b)`.
pub fn convolve_fft(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    spectral(a, b, |fa, fb| fa * fb)
}

/// Spectral correlation, `F(a ⊛ b) = conj(F(a)) ⊙ F(b)`.
pub fn correlate_fft(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    spectral(a, b, |fa, fb| fa.conj() * fb)
}

fn spectral(
    a: &HyperVector,
    b: &HyperVector,
    combine: impl Fn(Complex64, Complex64) -> Complex64,
) -> Result<HyperVector> {
    check_dims(a, b)?;
    let fa = fft::forward_real(a.as_slice())?;
    let fb = fft::forward_real(b.as_slice())?;
    let prod = fa.into_iter().zip(fb).map(|(x, y)| combine(x, y)).collect();
    let out = fft::inverse_real(prod)?;
    HyperVector::new(out)
}

/// Circular convolution; spectral for power-of-two dimensions, direct otherwise.
pub fn convolve(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    if fft::is_supported_len(a.dim()) {
        convolve_fft(a, b)
    } else {
        convolve_naive(a, b)
    }
}

/// Circular correlation; spectral for power-of-two dimensions, direct otherwise.
pub fn correlate(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    if fft::is_supported_len(a.dim()) {
        correlate_fft(a, b)
    } else {
        correlate_naive(a, b)
    }
}

/// Elementwise tolerance for comparing the spectral and direct paths.
pub fn fft_tolerance(a: &HyperVector, b: &HyperVector) -> f64 {
    1e-9 * a.dim() as f64 * a.max_abs() * b.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_forms_match_index_definition() {
        let a = HyperVector::new((0..7).map(|i| (i as f64 * 1.3).sin()).collect()).unwrap();
        let b = HyperVector::new((0..7).map(|i| (i as f64 * 0.7).cos() - 0.2).collect()).unwrap();
        let d = 7;
        for t in 0..d {
            let conv: f64 = (0..d).map(|j| a[j] * b[(t + d - j) % d]).sum();
            let corr: f64 = (0..d).map(|j| a[j] * b[(t + j) % d]).sum();
            assert!((convolve_naive(&a, &b).unwrap()[t] - conv).abs() < 1e-12);
            assert!((correlate_naive(&a, &b).unwrap()[t] - corr).abs() < 1e-12);
        }
    }

    fn hv(x: &[f64]) -> HyperVector {
        HyperVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn convolution_hand_example() {
        let a = hv(&[1.0, 1.0, -1.0, 1.0]);
        let b = hv(&[1.0, -1.0, 1.0, 1.0]);
        assert_eq!(convolve_naive(&a, &b).unwrap().as_slice(), &[0.0, 0.0, 0.0, 4.0]);
        let fast = convolve_fft(&a, &b).unwrap();
        for (x, y) in fast.as_slice().iter().zip([0.0, 0.0, 0.0, 4.0]) {
            assert!((x - y).abs() <= fft_tolerance(&a, &b));
        }
    }

    #[test]
    fn impulse_and_zero() {
        let a = hv(&[0.5, -2.0, 3.25, 7.0, 1.0]);
        assert_eq!(convolve_naive(&a, &HyperVector::impulse(5)).unwrap(), a);
        assert!(convolve_naive(&a, &HyperVector::zeros(5)).unwrap().is_zero());
    }

    #[test]
    fn autocorrelation_of_signs() {
        let a = hv(&[1.0, 1.0, -1.0, 1.0]);
        // lag t: sum_j a[j] a[j+t]
        let r = correlate_naive(&a, &a).unwrap();
        assert_eq!(r.as_slice(), &[4.0, 0.0, 0.0, 0.0]);
        let rf = correlate_fft(&a, &a).unwrap();
        for (x, y) in rf.as_slice().iter().zip(r.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_is_convolution_with_involution() {
        let a = hv(&[0.3, -1.0, 2.0, 0.0, 1.5, -0.25]);
        let b = hv(&[1.0, 2.0, -3.0, 0.5, 0.0, 4.0]);
        let lhs = correlate_naive(&a, &b).unwrap();
        let rhs = convolve_naive(&a.involution(), &b).unwrap();
        for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_pair_and_self_product() {
        let u = hv(&[1.0, 1.0, -1.0, -1.0]);
        let v = hv(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!(inner_product(&u, &v).unwrap(), 0.0);
        assert_eq!(inner_product(&u, &u).unwrap(), 4.0);
    }

    #[test]
    fn cosine_extremes() {
        let a = hv(&[1.0, -2.0, 0.5]);
        assert!((cosine(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&a, &a.scaled(-1.0)).unwrap() + 1.0).abs() < 1e-15);
        assert!(cosine(&a, &HyperVector::zeros(3)).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HyperVector::zeros(4);
        let b = HyperVector::zeros(8);
        assert!(matches!(
            convolve_naive(&a, &b),
            Err(HbfError::DimensionMismatch { left: 4, right: 8 })
        ));
        assert!(correlate(&a, &b).is_err());
        assert!(inner_product(&a, &b).is_err());
    }

    #[test]
    fn fft_path_rejects_odd_dims_but_dispatch_falls_back() {
        let a = hv(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            convolve_fft(&a, &a),
            Err(HbfError::UnsupportedDimension(3))
        ));
        assert_eq!(convolve(&a, &a).unwrap(), convolve_naive(&a, &a).unwrap());
    }

    #[test]
    fn rejects_non_finite_and_bad_signs() {
        assert!(matches!(
            HyperVector::new(vec![1.0, f64::NAN]),
            Err(HbfError::NonFinite { index: 1 })
        ));
        assert!(HyperVector::new(vec![]).is_err());
        assert!(SignVector::new(vec![1.0, 0.0]).is_err());
        assert!(SignVector::new(vec![1.0, -1.0]).is_ok());
    }
}
