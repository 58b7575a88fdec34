//! Wigner functions of single-mode states.
//!
//! Normalization: ∬ W(x,p) dx dp = 1 over the (x,p) plane in quadrature
//! units (vacuum variance 1/2 along each axis), so the vacuum peaks at
//! 1/π and W(0,0) = (1/π)·tr(ρ·parity).

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::io::Write;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

/// Rectangular evaluation grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    /// Symmetric square grid over [−half, half]².
    pub fn square(half: f64, n: usize) -> Self {
        Self {
            x_min: -half,
            x_max: half,
            nx: n,
            p_min: -half,
            p_max: half,
            np: n,
        }
    }

    fn axis(min: f64, max: f64, n: usize) -> Array1<f64> {
        let step = (max - min) / (n - 1) as f64;
        Array1::from_iter((0..n).map(|i| min + i as f64 * step))
    }
}

/// Evaluated Wigner function: `values[(ix, ip)]` = W(x_axis[ix], p_axis[ip]).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_axis: Array1<f64>,
    pub p_axis: Array1<f64>,
    pub values: Array2<f64>,
}

impl WignerGrid {
    /// Riemann estimate of ∬ W dx dp over the grid extent.
    pub fn integral(&self) -> f64 {
        let dx = self.x_axis[1] - self.x_axis[0];
        let dp = self.p_axis[1] - self.p_axis[0];
        self.values.sum() * dx * dp
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// CSV rows "x,p,w", x-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,p,w")?;
        for (ix, &x) in self.x_axis.iter().enumerate() {
            for (ip, &p) in self.p_axis.iter().enumerate() {
                writeln!(out, "{},{},{}", x, p, self.values[(ix, ip)])?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Fock-basis Wigner kernel evaluated through the displaced-parity form,
/// with Laguerre recurrences along each diagonal. √(m!/(m+d)!) factors are
/// tabulated by `ratio_table`.
struct WignerEvaluator<'a> {
    rho: &'a DensityMatrix,
    ratio: Vec<Vec<f64>>,
}

impl<'a> WignerEvaluator<'a> {
    fn new(rho: &'a DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut ratio = vec![vec![0.0; dim]; dim];
        for (d, row) in ratio.iter_mut().enumerate() {
            for (m, r) in row.iter_mut().enumerate().take(dim - d) {
                let mut acc = 1.0;
                for k in (m + 1)..=(m + d) {
                    acc /= (k as f64).sqrt();
                }
                *r = acc;
            }
        }
        Self { rho, ratio }
    }

    fn eval(&self, x: f64, p: f64) -> f64 {
        let dim = self.rho.dim();
        let elements = self.rho.elements();
        // β = 2α with α = (x + ip)/√2
        let beta = Complex64::new(x, p) * std::f64::consts::SQRT_2;
        let y = beta.norm_sqr();
        let envelope = (-0.5 * y).exp();

        let mut total = 0.0;
        let mut beta_pow = Complex64::new(1.0, 0.0);
        for d in 0..dim {
            // L_m^{(d)}(y) by recurrence in m
            let mut l_prev = 0.0;
            let mut l_cur = 1.0;
            let mut diag_sum = Complex64::new(0.0, 0.0);
            for m in 0..(dim - d) {
                if m > 0 {
                    let mf = m as f64;
                    let l_next =
                        ((2.0 * mf - 1.0 + d as f64 - y) * l_cur - (mf - 1.0 + d as f64) * l_prev)
                            / mf;
                    l_prev = l_cur;
                    l_cur = l_next;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let kernel = beta_pow * (sign * self.ratio[d][m] * envelope * l_cur);
                diag_sum += elements[(m, m + d)] * kernel;
            }
            total += if d == 0 { diag_sum.re } else { 2.0 * diag_sum.re };
            beta_pow *= beta;
        }
        total / std::f64::consts::PI
    }
}

/// W at a single phase-space point.
pub fn wigner_point(rho: &DensityMatrix, x: f64, p: f64) -> Result<f64> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    Ok(WignerEvaluator::new(rho).eval(x, p))
}

/// W over a grid.
pub fn wigner(rho: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    if rho.modes() != 1 {
        return Err(Error::Domain {
            param: "modes",
            value: rho.modes() as f64,
            bounds: "single-mode state required",
        });
    }
    if spec.nx < 2 || spec.np < 2 {
        return Err(Error::Domain {
            param: "grid points",
            value: spec.nx.min(spec.np) as f64,
            bounds: ">= 2 per axis",
        });
    }
    let x_axis = GridSpec::axis(spec.x_min, spec.x_max, spec.nx);
    let p_axis = GridSpec::axis(spec.p_min, spec.p_max, spec.np);
    let ev = WignerEvaluator::new(rho);
    let mut values = Array2::zeros((spec.nx, spec.np));
    for (ix, &x) in x_axis.iter().enumerate() {
        for (ip, &p) in p_axis.iter().enumerate() {
            values[(ix, ip)] = ev.eval(x, p);
        }
    }
    Ok(WignerGrid {
        x_axis,
        p_axis,
        values,
    })
}
