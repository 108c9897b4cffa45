//! Uniform centered N-dimensional complex grids and spectral helpers.
//!
//! Grids are stored row-major in ascending-coordinate order with
//! `y_j = (j - n/2) h` along every axis.  The Fourier convention throughout
//! is `F(f)(w) = integral f(y) e^{-i w y} dy` with inverse
//! `(2 pi)^{-N} integral e^{i w y} ... dw`, so the centered DFT carries the
//! cell size `h` and the frequencies are `w_k = (k - n/2) 2 pi/(n h)`.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("shape/spacing/origin ranks disagree or are empty")]
    BadShape,
    #[error("axis sizes must be >= 2 and even, got {0}")]
    BadAxisLen(usize),
    #[error("spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("grids are not sampled on the same lattice")]
    Mismatch,
    #[error("requested point lies outside the grid")]
    OutOfRange,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad grid file: {0}")]
    BadFile(String),
}

/// Uniform, centered complex grid.
#[derive(Debug, Clone)]
pub struct CGrid {
    data: Vec<Complex64>,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl CGrid {
    /// Zero-filled centered grid: axis `a` holds `shape[a]` points spaced
    /// `spacing[a]`, starting at `-(n/2) h`.
    pub fn zeros(shape: &[usize], spacing: &[f64]) -> Result<Self, GridError> {
        if shape.is_empty() || shape.len() != spacing.len() {
            return Err(GridError::BadShape);
        }
        for &n in shape {
            if n < 2 || n % 2 != 0 {
                return Err(GridError::BadAxisLen(n));
            }
        }
        for &h in spacing {
            if !(h > 0.0) {
                return Err(GridError::BadSpacing(h));
            }
        }
        let origin: Vec<f64> = shape
            .iter()
            .zip(spacing)
            .map(|(&n, &h)| -((n / 2) as f64) * h)
            .collect();
        let len: usize = shape.iter().product();
        Ok(Self {
            data: vec![Complex64::new(0.0, 0.0); len],
            shape: shape.to_vec(),
            spacing: spacing.to_vec(),
            origin,
        })
    }

    /// Centered grid covering `|y_a| <= extent` with `n` points per axis.
    pub fn centered(shape: &[usize], extent: f64) -> Result<Self, GridError> {
        let spacing: Vec<f64> = shape.iter().map(|&n| 2.0 * extent / n as f64).collect();
        Self::zeros(shape, &spacing)
    }

    /// Fill from a coordinate function.
    pub fn from_fn(
        shape: &[usize],
        spacing: &[f64],
        mut f: impl FnMut(&[f64]) -> Complex64,
    ) -> Result<Self, GridError> {
        let mut g = Self::zeros(shape, spacing)?;
        let mut coords = vec![0.0; shape.len()];
        for idx in 0..g.data.len() {
            g.coords_of(idx, &mut coords);
            g.data[idx] = f(&coords);
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn same_lattice(&self, other: &CGrid) -> bool {
        self.shape == other.shape
            && self
                .spacing
                .iter()
                .zip(&other.spacing)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs())
    }

    /// Coordinates of the flat index (row-major).
    pub fn coords_of(&self, mut idx: usize, out: &mut [f64]) {
        for axis in (0..self.shape.len()).rev() {
            let n = self.shape[axis];
            let j = idx % n;
            idx /= n;
            out[axis] = self.origin[axis] + j as f64 * self.spacing[axis];
        }
    }

    /// Axis coordinate values.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis])
            .map(|j| self.origin[axis] + j as f64 * self.spacing[axis])
            .collect()
    }

    /// Frequencies dual to an axis, in ascending (centered) order.
    pub fn axis_freqs(&self, axis: usize) -> Vec<f64> {
        let n = self.shape[axis];
        let dw = 2.0 * std::f64::consts::PI / (n as f64 * self.spacing[axis]);
        (0..n).map(|k| (k as f64 - (n / 2) as f64) * dw).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Trapezoid quadrature of `f(u, y)`; exact trapezoid on the periodic
    /// cell coincides with the plain sum times the cell volume.
    pub fn integrate(&self, mut f: impl FnMut(Complex64, &[f64]) -> Complex64) -> Complex64 {
        let mut coords = vec![0.0; self.dim()];
        let mut acc = Complex64::new(0.0, 0.0);
        for idx in 0..self.data.len() {
            self.coords_of(idx, &mut coords);
            acc += f(self.data[idx], &coords);
        }
        acc * self.cell_volume()
    }

    /// Discrete L2 norm `sqrt(sum |u|^2 h^N)`.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fraction of the discrete mass carried within `frac` of the boundary
    /// along any axis.
    pub fn boundary_mass_fraction(&self, frac: f64) -> f64 {
        let mut coords = vec![0.0; self.dim()];
        let mut near = 0.0;
        let mut total = 0.0;
        for idx in 0..self.data.len() {
            self.coords_of(idx, &mut coords);
            let m = self.data[idx].norm_sqr();
            total += m;
            let is_near = coords.iter().enumerate().any(|(a, &y)| {
                let half = -self.origin[a];
                y.abs() >= (1.0 - frac) * half
            });
            if is_near {
                near += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            near / total
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CGrid {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = f(*v);
        }
        out
    }

    /// Pointwise combination of two grids on the same lattice.
    pub fn zip_with(
        &self,
        other: &CGrid,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CGrid, GridError> {
        if !self.same_lattice(other) {
            return Err(GridError::Mismatch);
        }
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v = f(*v, *w);
        }
        Ok(out)
    }

    /// Multiply by a smooth radial window that is 1 for `|y_a| <= inner*half`
    /// and decays to 0 at the boundary (per axis).  Used before spectral
    /// differentiation of fields that are not periodic-smooth.
    pub fn windowed(&self, inner: f64) -> CGrid {
        let mut out = self.clone();
        let mut coords = vec![0.0; self.dim()];
        for idx in 0..out.data.len() {
            out.coords_of(idx, &mut coords);
            let mut w = 1.0;
            for (a, &y) in coords.iter().enumerate() {
                let half = -self.origin[a];
                w *= smooth_cutoff(y.abs() / half, inner, 0.98);
            }
            out.data[idx] *= w;
        }
        out
    }

    /// Central sub-grid: keep every `stride`-th point and only indices with
    /// coordinate magnitude within the target extent per axis (`new_n`
    /// points).  The coarse lattice must be a sublattice.
    pub fn central_subgrid(&self, new_shape: &[usize], stride: usize) -> CGrid {
        let mut out = CGrid::zeros(
            new_shape,
            &self
                .spacing
                .iter()
                .map(|h| h * stride as f64)
                .collect::<Vec<_>>(),
        )
        .expect("valid subgrid");
        let offsets: Vec<usize> = self
            .shape
            .iter()
            .zip(new_shape)
            .map(|(&n, &nn)| n / 2 - (nn / 2) * stride)
            .collect();
        let mut idx_nd = vec![0usize; self.dim()];
        for out_idx in 0..out.data.len() {
            let mut rem = out_idx;
            for axis in (0..self.dim()).rev() {
                idx_nd[axis] = rem % new_shape[axis];
                rem /= new_shape[axis];
            }
            let mut src = 0usize;
            for axis in 0..self.dim() {
                src = src * self.shape[axis] + offsets[axis] + idx_nd[axis] * stride;
            }
            out.data[out_idx] = self.data[src];
        }
        out
    }
}

/// C-infinity cutoff in `x = |y|/half`: 1 for `x <= a`, 0 for `x >= b`.
pub fn smooth_cutoff(x: f64, a: f64, b: f64) -> f64 {
    if x <= a {
        1.0
    } else if x >= b {
        0.0
    } else {
        let s = (x - a) / (b - a);
        let f = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
        f(1.0 - s) / (f(1.0 - s) + f(s))
    }
}

// ---------------------------------------------------------------------------
// Centered FFTs
// ---------------------------------------------------------------------------

/// Apply the FFT along one axis of the row-major array in place.
fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for j in 0..n {
                buf[j] = data[base + j * inner];
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for j in 0..n {
                data[base + j * inner] = buf[j];
            }
        }
    }
}

/// Centered forward transform: returns samples of
/// `u_hat(w_k) = h^N sum_j u(y_j) e^{-i w_k . y_j}` on the dual grid in
/// ascending frequency order.  For even axis lengths divisible by 4 this is
/// `h (-1)^k FFT[(-1)^j u_j]` per axis.
pub fn fft_forward(u: &CGrid) -> CGrid {
    let mut out = u.clone();
    alternate_signs(&mut out);
    let mut planner = FftPlanner::new();
    for axis in 0..u.dim() {
        let fft = planner.plan_fft_forward(u.shape[axis]);
        fft_axis(&mut out.data, &u.shape, axis, &fft);
    }
    alternate_signs(&mut out);
    let scale: f64 = u.cell_volume() * centered_phase(&u.shape);
    for v in &mut out.data {
        *v *= scale;
    }
    // relabel to the frequency lattice
    out.spacing = (0..u.dim())
        .map(|a| 2.0 * std::f64::consts::PI / (u.shape[a] as f64 * u.spacing[a]))
        .collect();
    out.origin = out
        .shape
        .iter()
        .zip(&out.spacing)
        .map(|(&n, &dw)| -((n / 2) as f64) * dw)
        .collect();
    out
}

/// Centered inverse transform matching [`fft_forward`].
pub fn fft_inverse(uh: &CGrid) -> CGrid {
    let mut out = uh.clone();
    alternate_signs(&mut out);
    let mut planner = FftPlanner::new();
    for axis in 0..uh.dim() {
        let fft = planner.plan_fft_inverse(uh.shape[axis]);
        fft_axis(&mut out.data, &uh.shape, axis, &fft);
    }
    alternate_signs(&mut out);
    // rustfft's inverse is unnormalized; the quadrature weight dw^N/(2 pi)^N
    // and the centered-lattice phase complete the Riemann sum.
    let dw_prod: f64 = uh.spacing.iter().product();
    let scale = dw_prod / (2.0 * std::f64::consts::PI).powi(uh.dim() as i32)
        * centered_phase(&uh.shape);
    for v in &mut out.data {
        *v *= scale;
    }
    out.spacing = (0..uh.dim())
        .map(|a| 2.0 * std::f64::consts::PI / (uh.shape[a] as f64 * uh.spacing[a]))
        .collect();
    out.origin = out
        .shape
        .iter()
        .zip(&out.spacing)
        .map(|(&n, &h)| -((n / 2) as f64) * h)
        .collect();
    out
}

/// The centered-DFT residual phase `prod_axis e^{-i pi n_a / 2}`; real for
/// axis lengths divisible by 4 and equal to (-1)^(n/2) in general even case.
fn centered_phase(shape: &[usize]) -> f64 {
    let mut s = 1.0;
    for &n in shape {
        if (n / 2) % 2 == 1 {
            s = -s;
        }
    }
    s
}

fn alternate_signs(g: &mut CGrid) {
    let dim = g.dim();
    let shape = g.shape.clone();
    let mut idx_nd = vec![0usize; dim];
    for idx in 0..g.data.len() {
        let mut rem = idx;
        let mut parity = 0usize;
        for axis in (0..dim).rev() {
            idx_nd[axis] = rem % shape[axis];
            rem /= shape[axis];
            parity += idx_nd[axis];
        }
        if parity % 2 == 1 {
            g.data[idx] = -g.data[idx];
        }
    }
}

/// Transform, multiply by `symbol(w)`, transform back.
pub fn apply_symbol(u: &CGrid, symbol: impl Fn(&[f64]) -> Complex64) -> CGrid {
    let mut uh = fft_forward(u);
    let mut coords = vec![0.0; u.dim()];
    for idx in 0..uh.len() {
        uh.coords_of(idx, &mut coords);
        let s = symbol(&coords);
        uh.data[idx] *= s;
    }
    fft_inverse(&uh)
}

/// `|w|^2` for a frequency point.
pub fn omega_norm_sqr(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum()
}

// ---------------------------------------------------------------------------
// Band-limited interpolation
// ---------------------------------------------------------------------------

/// Interpolator backed by an FFT zero-padding upsample (factor `upsample`)
/// followed by 6-point Lagrange interpolation on the fine lattice.
pub struct Interpolator {
    fine: CGrid,
}

impl Interpolator {
    pub fn new(u: &CGrid, upsample: usize) -> Self {
        assert!(upsample.is_power_of_two() && upsample >= 1);
        if upsample == 1 {
            return Self { fine: u.clone() };
        }
        let uh = fft_forward(u);
        // embed the spectrum in a larger zero grid
        let new_shape: Vec<usize> = u.shape.iter().map(|&n| n * upsample).collect();
        let mut big = CGrid::zeros(
            &new_shape,
            &uh.spacing, // same dw; wider band
        )
        .expect("upsample grid");
        let mut idx_nd = vec![0usize; u.dim()];
        for idx in 0..uh.len() {
            let mut rem = idx;
            for axis in (0..u.dim()).rev() {
                idx_nd[axis] = rem % u.shape[axis];
                rem /= u.shape[axis];
            }
            let mut dst = 0usize;
            for axis in 0..u.dim() {
                let off = (new_shape[axis] - u.shape[axis]) / 2;
                dst = dst * new_shape[axis] + idx_nd[axis] + off;
            }
            big.data[dst] = uh.data[idx];
        }
        let fine = fft_inverse(&big);
        Self { fine }
    }

    /// Interpolated value; errors if the point (plus stencil margin) leaves
    /// the grid.
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, GridError> {
        let g = &self.fine;
        let dim = g.dim();
        assert_eq!(point.len(), dim);
        // locate the stencil start per axis
        let mut base = vec![0usize; dim];
        let mut tloc = vec![0.0; dim];
        for a in 0..dim {
            let x = (point[a] - g.origin[a]) / g.spacing[a];
            let j = x.floor() as isize;
            let start = j - 2;
            if start < 0 || (j + 3) as usize >= g.shape[a] {
                return Err(GridError::OutOfRange);
            }
            base[a] = start as usize;
            tloc[a] = x - start as f64;
        }
        // separable 6-point Lagrange weights
        let mut weights = vec![[0.0; 6]; dim];
        for a in 0..dim {
            for k in 0..6 {
                let mut w = 1.0;
                for l in 0..6 {
                    if l != k {
                        w *= (tloc[a] - l as f64) / (k as f64 - l as f64);
                    }
                }
                weights[a][k] = w;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut stencil_idx = vec![0usize; dim];
        let total = 6usize.pow(dim as u32);
        for s in 0..total {
            let mut rem = s;
            let mut w = 1.0;
            for a in 0..dim {
                stencil_idx[a] = rem % 6;
                rem /= 6;
                w *= weights[a][stencil_idx[a]];
            }
            let mut idx = 0usize;
            for a in 0..dim {
                idx = idx * g.shape[a] + base[a] + stencil_idx[a];
            }
            acc += g.data[idx] * w;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Serialization: binary + JSON sidecar, CSV for 1-D slices
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct GridHeader {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    dtype: String,
}

impl CGrid {
    /// Write `<base>.cgrid` (flat little-endian complex128, re then im) and
    /// `<base>.json` (header).
    pub fn write(&self, base: &Path) -> Result<(), GridError> {
        let header = GridHeader {
            shape: self.shape.clone(),
            spacing: self.spacing.clone(),
            origin: self.origin.clone(),
            dtype: "complex128".into(),
        };
        let json = serde_json::to_string_pretty(&header)
            .map_err(|e| GridError::BadFile(e.to_string()))?;
        fs::write(base.with_extension("json"), json)?;
        let mut bytes = Vec::with_capacity(self.data.len() * 16);
        for z in &self.data {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        fs::write(base.with_extension("cgrid"), bytes)?;
        Ok(())
    }

    pub fn read(base: &Path) -> Result<CGrid, GridError> {
        let header: GridHeader = serde_json::from_str(
            &fs::read_to_string(base.with_extension("json"))?,
        )
        .map_err(|e| GridError::BadFile(e.to_string()))?;
        if header.dtype != "complex128" {
            return Err(GridError::BadFile(format!(
                "unsupported dtype {}",
                header.dtype
            )));
        }
        let bytes = fs::read(base.with_extension("cgrid"))?;
        let n: usize = header.shape.iter().product();
        if bytes.len() != 16 * n {
            return Err(GridError::BadFile("payload size mismatch".into()));
        }
        let mut g = CGrid::zeros(&header.shape, &header.spacing)?;
        g.origin = header.origin;
        for (i, chunk) in bytes.chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            g.data[i] = Complex64::new(re, im);
        }
        Ok(g)
    }

    /// CSV export `y, re, im, abs` for 1-D grids.
    pub fn write_csv_1d(&self, path: &Path) -> Result<(), GridError> {
        if self.dim() != 1 {
            return Err(GridError::BadFile("csv export needs a 1-D grid".into()));
        }
        let mut f = fs::File::create(path)?;
        writeln!(f, "y,re,im,abs")?;
        for (y, z) in self.axis_coords(0).iter().zip(&self.data) {
            writeln!(f, "{y:.12e},{:.12e},{:.12e},{:.12e}", z.re, z.im, z.norm())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fft_matches_analytic_gaussian_pair() {
        // F(e^{-y^2/2}) = sqrt(2 pi) e^{-w^2/2}
        let g = CGrid::from_fn(&[512], &[0.1], |y| {
            Complex64::new((-y[0] * y[0] / 2.0).exp(), 0.0)
        })
        .unwrap();
        let gh = fft_forward(&g);
        let ws = gh.axis_coords(0);
        for (k, &w) in ws.iter().enumerate() {
            if w.abs() < 5.0 {
                let want = (2.0 * PI).sqrt() * (-w * w / 2.0).exp();
                assert!(
                    (gh.data()[k] - Complex64::new(want, 0.0)).norm() < 1e-10,
                    "w={w}"
                );
            }
        }
        let back = fft_inverse(&gh);
        for (a, b) in back.data().iter().zip(g.data()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_round_trip_2d() {
        let g = CGrid::from_fn(&[32, 16], &[0.3, 0.25], |y| {
            Complex64::new((-y[0] * y[0] - 2.0 * y[1] * y[1]).exp(), 0.3 * y[0])
        })
        .unwrap();
        let back = fft_inverse(&fft_forward(&g));
        for (a, b) in back.data().iter().zip(g.data()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn interpolation_accuracy() {
        let g = CGrid::from_fn(&[256], &[0.08], |y| {
            Complex64::new((3.0 * y[0]).sin(), (2.0 * y[0]).cos()) * (-y[0] * y[0] / 4.0).exp()
        })
        .unwrap();
        let interp = Interpolator::new(&g, 8);
        for &x in &[0.123f64, -2.517, 4.04567] {
            let want = Complex64::new((3.0 * x).sin(), (2.0 * x).cos())
                * (-x * x / 4.0f64).exp();
            let got = interp.eval(&[x]).unwrap();
            assert!((got - want).norm() < 1e-9, "x={x}: {got} vs {want}");
        }
        assert!(interp.eval(&[10.5]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join("spectral2m_grid_io_test");
        fs::create_dir_all(&dir).unwrap();
        let g = CGrid::from_fn(&[16, 8], &[0.5, 0.25], |y| Complex64::new(y[0], y[1])).unwrap();
        let base = dir.join("g");
        g.write(&base).unwrap();
        let h = CGrid::read(&base).unwrap();
        assert!(g.same_lattice(&h));
        assert_eq!(g.data(), h.data());
    }

    #[test]
    fn subgrid_slicing() {
        let g = CGrid::from_fn(&[64], &[0.25], |y| Complex64::new(y[0], 0.0)).unwrap();
        let s = g.central_subgrid(&[16], 2);
        let coords = s.axis_coords(0);
        assert!((coords[0] + 4.0).abs() < 1e-14);
        for (y, z) in coords.iter().zip(s.data()) {
            assert!((z.re - y).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_mass() {
        let g = CGrid::from_fn(&[128], &[0.1], |y| {
            Complex64::new((-y[0] * y[0]).exp(), 0.0)
        })
        .unwrap();
        assert!(g.boundary_mass_fraction(0.05) < 1e-12);
    }
}
