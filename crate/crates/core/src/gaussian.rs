//! Multimode Gaussian states and affine Gaussian channels.
//!
//! A state on `n` modes is a real mean vector of length `2n` and a real
//! symmetric `2n × 2n` covariance matrix, both in interleaved ordering
//! `(X₁, Y₁, …, Xₙ, Yₙ)`. The vacuum has zero mean and identity covariance.
//!
//! A [`GaussianMap`] acts as `mean → L·mean + d`, `cov → L·cov·Lᵀ + N`.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};

use crate::error::{Error, Result};

/// Tolerance on the smallest eigenvalue of `cov + iΩ`, relative to the
/// largest covariance entry (and absolute below 1).
pub const UNCERTAINTY_TOL: f64 = 1e-9;

/// Tolerance on covariance symmetry, scaled like [`UNCERTAINTY_TOL`].
pub const SYMMETRY_TOL: f64 = 1e-12;

fn scaled(tol: f64, m: &DMatrix<f64>) -> f64 {
    tol * max_abs(m).max(1.0)
}

/// Symplectic form for `n` modes, block diagonal with `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `sym + i·antisym`.
///
/// Uses the real embedding `[[A, -B], [B, A]]`, whose spectrum is that of
/// `A + iB` with every eigenvalue doubled.
fn min_hermitian_eigenvalue(sym: &DMatrix<f64>, antisym: &DMatrix<f64>) -> f64 {
    let n = sym.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(sym);
    big.view_mut((n, n), (n, n)).copy_from(sym);
    big.view_mut((0, n), (n, n)).copy_from(&(-antisym));
    big.view_mut((n, 0), (n, n)).copy_from(antisym);
    // symmetrise against rounding before the eigen solve
    let big = (&big + big.transpose()) * 0.5;
    SymmetricEigen::new(big).eigenvalues.min()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, validating dimensions, symmetry and the uncertainty
    /// relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::invalid(format!("mean length {dim} is not 2n with n >= 1")));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = max_abs(&(&cov - cov.transpose()));
        if asym > scaled(SYMMETRY_TOL, &cov) {
            return Err(Error::invalid(format!("covariance asymmetric by {asym:.3e}")));
        }
        let state = GaussianState { mean, cov };
        let min_eig = state.uncertainty_margin();
        if min_eig < -scaled(UNCERTAINTY_TOL, &state.cov) {
            return Err(Error::invalid(format!(
                "covariance violates the uncertainty relation (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("vacuum state needs at least one mode"));
        }
        Ok(GaussianState {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Coherent state `|α⟩` on a single mode.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        GaussianState {
            mean: DVector::from_vec(vec![2.0 * alpha_re, 2.0 * alpha_im]),
            cov: DMatrix::identity(2, 2),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::invalid(format!(
                "mode {mode} out of range for a {}-mode state",
                self.n_modes()
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue of `cov + iΩ`; non-negative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        min_hermitian_eigenvalue(&self.cov, &symplectic_form(self.n_modes()))
    }

    /// Displaces `mode` by the coherent amplitude `α = alpha_re + i·alpha_im`.
    pub fn displace(&self, mode: usize, alpha_re: f64, alpha_im: f64) -> Result<Self> {
        self.check_mode(mode)?;
        let mut next = self.clone();
        next.mean[2 * mode] += 2.0 * alpha_re;
        next.mean[2 * mode + 1] += 2.0 * alpha_im;
        Ok(next)
    }

    /// Phase-space indices of `modes`, in order.
    fn indices(&self, modes: &[usize]) -> Result<Vec<usize>> {
        for (k, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::invalid(format!("mode {m} listed twice")));
            }
        }
        Ok(modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect())
    }

    /// Applies `map` to the ordered mode list `modes`, leaving the rest
    /// untouched.
    pub fn apply_map(&self, map: &GaussianMap, modes: &[usize]) -> Result<Self> {
        if map.n_in != map.n_out {
            return Err(Error::invalid(format!(
                "map changes mode count ({} -> {}); only square maps act in place",
                map.n_in, map.n_out
            )));
        }
        if modes.len() != map.n_in {
            return Err(Error::invalid(format!(
                "map acts on {} modes but {} were selected",
                map.n_in,
                modes.len()
            )));
        }
        let idx = self.indices(modes)?;
        let dim = self.mean.len();

        // Full-size linear part: identity outside the selected block.
        let mut lin = DMatrix::identity(dim, dim);
        let mut noise = DMatrix::zeros(dim, dim);
        let mut mean = self.mean.clone();
        for (i, &gi) in idx.iter().enumerate() {
            lin[(gi, gi)] = 0.0;
            for (j, &gj) in idx.iter().enumerate() {
                lin[(gi, gj)] = map.linear[(i, j)];
                noise[(gi, gj)] = map.noise[(i, j)];
            }
        }
        let sub: DVector<f64> = DVector::from_iterator(idx.len(), idx.iter().map(|&g| self.mean[g]));
        let sub_out = &map.linear * sub + &map.displacement;
        for (i, &gi) in idx.iter().enumerate() {
            mean[gi] = sub_out[i];
        }
        let cov = &lin * &self.cov * lin.transpose() + noise;
        let cov = (&cov + cov.transpose()) * 0.5;

        let next = GaussianState { mean, cov };
        let margin = next.uncertainty_margin();
        if margin < -scaled(UNCERTAINTY_TOL, &next.cov) {
            return Err(Error::InternalConsistency(format!(
                "state after map violates the uncertainty relation (min eigenvalue {margin:.3e})"
            )));
        }
        Ok(next)
    }

    /// Applies a linear transformation to the mean of `modes` only, leaving
    /// the covariance unchanged. Used for first-order (mean-field)
    /// modulation, where the vacuum contribution is neglected.
    pub fn map_mean(&self, linear: &DMatrix<f64>, modes: &[usize]) -> Result<Self> {
        let idx = self.indices(modes)?;
        if linear.nrows() != idx.len() || linear.ncols() != idx.len() {
            return Err(Error::invalid(format!(
                "mean map is {}x{}, expected {n}x{n}",
                linear.nrows(),
                linear.ncols(),
                n = idx.len()
            )));
        }
        let sub: DVector<f64> = DVector::from_iterator(idx.len(), idx.iter().map(|&g| self.mean[g]));
        let out = linear * sub;
        let mut next = self.clone();
        for (i, &gi) in idx.iter().enumerate() {
            next.mean[gi] = out[i];
        }
        Ok(next)
    }

    /// Mean and variance of `X_θ = a e^{-iθ} + a† e^{iθ}` on `mode`.
    pub fn quadrature_stats(&self, mode: usize, angle: f64) -> Result<(f64, f64)> {
        let (mean, cov) = self.mode_block(mode)?;
        let dir = Vector2::new(angle.cos(), angle.sin());
        Ok((dir.dot(&mean), (dir.transpose() * cov * dir)[(0, 0)]))
    }

    /// Mean and 2×2 covariance block of a single mode.
    pub fn mode_block(&self, mode: usize) -> Result<(Vector2<f64>, Matrix2<f64>)> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        let mean = Vector2::new(self.mean[i], self.mean[i + 1]);
        let cov = Matrix2::new(
            self.cov[(i, i)],
            self.cov[(i, i + 1)],
            self.cov[(i + 1, i)],
            self.cov[(i + 1, i + 1)],
        );
        Ok((mean, cov))
    }

    /// Reduced state of `modes` (partial trace over the rest).
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let idx = self.indices(modes)?;
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&g| self.mean[g]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(GaussianState { mean, cov })
    }

    /// Tensor product `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(a + b);
        mean.rows_mut(0, a).copy_from(&self.mean);
        mean.rows_mut(a, b).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMap {
    n_in: usize,
    n_out: usize,
    linear: DMatrix<f64>,
    noise: DMatrix<f64>,
    displacement: DVector<f64>,
}

impl GaussianMap {
    /// Builds an affine Gaussian channel and checks that it is physical:
    /// `noise + iΩ - i·L·Ω·Lᵀ ⪰ 0`.
    pub fn new(linear: DMatrix<f64>, noise: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self> {
        let (rows, cols) = linear.shape();
        if rows == 0 || cols == 0 || rows % 2 != 0 || cols % 2 != 0 {
            return Err(Error::invalid(format!("linear part {rows}x{cols} is not 2m x 2n")));
        }
        if noise.shape() != (rows, rows) {
            return Err(Error::invalid(format!(
                "noise is {:?}, expected {rows}x{rows}",
                noise.shape()
            )));
        }
        if displacement.len() != rows {
            return Err(Error::invalid(format!(
                "displacement length {} does not match {rows} outputs",
                displacement.len()
            )));
        }
        let asym = max_abs(&(&noise - noise.transpose()));
        if asym > scaled(SYMMETRY_TOL, &noise) {
            return Err(Error::invalid(format!("noise matrix asymmetric by {asym:.3e}")));
        }
        let map = GaussianMap {
            n_in: cols / 2,
            n_out: rows / 2,
            linear,
            noise,
            displacement,
        };
        let margin = map.validity_margin();
        let scale = max_abs(&map.noise).max(max_abs(&map.linear).powi(2));
        if margin < -UNCERTAINTY_TOL * scale.max(1.0) {
            return Err(Error::invalid(format!(
                "map is not a valid Gaussian channel (min eigenvalue {margin:.3e})"
            )));
        }
        Ok(map)
    }

    /// Lossless map from a symplectic matrix.
    pub fn symplectic(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        GaussianMap::new(linear, DMatrix::zeros(n, n), DVector::zeros(n))
    }

    pub fn identity(n_modes: usize) -> Self {
        let d = 2 * n_modes;
        GaussianMap {
            n_in: n_modes,
            n_out: n_modes,
            linear: DMatrix::identity(d, d),
            noise: DMatrix::zeros(d, d),
            displacement: DVector::zeros(d),
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn noise(&self) -> &DMatrix<f64> {
        &self.noise
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn is_lossless(&self) -> bool {
        self.n_in == self.n_out && self.noise.iter().all(|&v| v == 0.0)
    }

    /// `max |S Ω Sᵀ - Ω|` for the linear part.
    pub fn symplectic_deviation(&self) -> f64 {
        let omega_in = symplectic_form(self.n_in);
        let omega_out = symplectic_form(self.n_out);
        max_abs(&(&self.linear * omega_in * self.linear.transpose() - omega_out))
    }

    /// Smallest eigenvalue of `noise + iΩ - i·L·Ω·Lᵀ`.
    pub fn validity_margin(&self) -> f64 {
        let transported = &self.linear * symplectic_form(self.n_in) * self.linear.transpose();
        let antisym = symplectic_form(self.n_out) - transported;
        min_hermitian_eigenvalue(&self.noise, &antisym)
    }

    /// The composite map "first `self`, then `next`".
    pub fn then(&self, next: &GaussianMap) -> Result<GaussianMap> {
        if next.n_in != self.n_out {
            return Err(Error::invalid(format!(
                "cannot compose: {} outputs feed a map with {} inputs",
                self.n_out, next.n_in
            )));
        }
        let linear = &next.linear * &self.linear;
        let noise = &next.linear * &self.noise * next.linear.transpose() + &next.noise;
        let noise = (&noise + noise.transpose()) * 0.5;
        let displacement = &next.linear * &self.displacement + &next.displacement;
        Ok(GaussianMap {
            n_in: self.n_in,
            n_out: next.n_out,
            linear,
            noise,
            displacement,
        })
    }

    /// Reorders inputs and outputs by a mode permutation and embeds the map
    /// into `n_modes` modes, acting as identity elsewhere.
    pub fn embed(&self, modes: &[usize], n_modes: usize) -> Result<GaussianMap> {
        if self.n_in != self.n_out || modes.len() != self.n_in {
            return Err(Error::invalid("embed needs a square map and one index per mode"));
        }
        let probe = GaussianMap::identity(n_modes);
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        if modes.iter().any(|&m| m >= n_modes) {
            return Err(Error::invalid("embed index out of range"));
        }
        let mut out = probe;
        for (i, &gi) in idx.iter().enumerate() {
            out.linear[(gi, gi)] = 0.0;
            out.displacement[gi] = self.displacement[i];
            for (j, &gj) in idx.iter().enumerate() {
                out.linear[(gi, gj)] = self.linear[(i, j)];
                out.noise[(gi, gj)] = self.noise[(i, j)];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_has_identity_covariance() {
        let v = GaussianState::vacuum(3).unwrap();
        assert_eq!(v.mean().len(), 6);
        assert_eq!(v.cov(), &DMatrix::<f64>::identity(6, 6));
        for k in 0..8 {
            let (m, var) = v.quadrature_stats(1, k as f64 * 0.7).unwrap();
            assert_eq!(m, 0.0);
            assert_relative_eq!(var, 1.0, epsilon = 1e-15);
        }
        assert!(v.uncertainty_margin().abs() < 1e-12);
    }

    #[test]
    fn vacuum_rejects_zero_modes() {
        assert!(matches!(GaussianState::vacuum(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn displacement_adds_twice_the_amplitude() {
        let s = GaussianState::vacuum(1).unwrap().displace(0, 3.0, 0.0).unwrap();
        assert_eq!(s.mean().as_slice(), &[6.0, 0.0]);
        assert_eq!(s.cov(), &DMatrix::<f64>::identity(2, 2));

        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.displace(0, 0.0, 0.0).unwrap(), v);

        let s = GaussianState::vacuum(2).unwrap().displace(1, 0.0, 1.0).unwrap();
        assert_eq!(s.mean().as_slice(), &[0.0, 0.0, 0.0, 2.0]);

        assert!(GaussianState::vacuum(2).unwrap().displace(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn coherent_quadrature_stats() {
        let s = GaussianState::coherent(2.0, 0.0);
        let (m, v) = s.quadrature_stats(0, 0.0).unwrap();
        assert_relative_eq!(m, 4.0);
        assert_relative_eq!(v, 1.0);
        assert!(s.quadrature_stats(1, 0.0).is_err());
    }

    #[test]
    fn state_construction_rejects_unphysical_covariance() {
        let mean = DVector::zeros(2);
        let squashed = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        assert!(GaussianState::new(mean.clone(), squashed).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianState::new(mean.clone(), asym).is_err());
        let squeezed = DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 4.0]);
        assert!(GaussianState::new(mean, squeezed).is_ok());
    }

    #[test]
    fn identity_map_is_a_no_op() {
        let s = GaussianState::coherent(1.5, -0.5)
            .tensor(&GaussianState::vacuum(1).unwrap());
        let out = s.apply_map(&GaussianMap::identity(2), &[0, 1]).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn apply_map_checks_dimensions_and_indices() {
        let s = GaussianState::vacuum(2).unwrap();
        let id2 = GaussianMap::identity(2);
        assert!(s.apply_map(&id2, &[0]).is_err());
        assert!(s.apply_map(&id2, &[0, 0]).is_err());
        assert!(s.apply_map(&id2, &[0, 2]).is_err());
    }

    #[test]
    fn channel_validity_rejects_noiseless_attenuation() {
        let half = DMatrix::identity(2, 2) * 0.5;
        assert!(GaussianMap::new(half.clone(), DMatrix::zeros(2, 2), DVector::zeros(2)).is_err());
        let noise = DMatrix::identity(2, 2) * 0.75;
        assert!(GaussianMap::new(half, noise, DVector::zeros(2)).is_ok());
    }

    #[test]
    fn embed_matches_apply_on_selected_modes() {
        let swap = GaussianMap::symplectic(DMatrix::from_row_slice(
            4,
            4,
            &[0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., 0., 0.],
        ))
        .unwrap();
        let s = GaussianState::coherent(1.0, 0.0)
            .tensor(&GaussianState::vacuum(1).unwrap())
            .tensor(&GaussianState::coherent(0.0, 2.0));
        let direct = s.apply_map(&swap, &[2, 0]).unwrap();
        let embedded = s.apply_map(&swap.embed(&[2, 0], 3).unwrap(), &[0, 1, 2]).unwrap();
        assert_eq!(direct, embedded);
        assert_eq!(direct.mean().as_slice(), &[0.0, 4.0, 0.0, 0.0, 2.0, 0.0]);
    }
}
