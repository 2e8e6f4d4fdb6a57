use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

type ClosedFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on `𝕋 = ℝ/2πℤ`: N uniform samples `s_k = 2πk/N`, an
/// optional closed form, and declared symmetry flags.
#[derive(Clone)]
pub struct TorusFunction {
    samples: Vec<f64>,
    closed: Option<ClosedFn>,
    // nonzero modes (k, a_k, b_k) of the trigonometric interpolant, with the
    // k = 0 and Nyquist weights already halved
    modes: Vec<(usize, f64, f64)>,
    pub odd: bool,
    pub pi_periodic: bool,
}

impl fmt::Debug for TorusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusFunction")
            .field("n", &self.samples.len())
            .field("closed", &self.closed.is_some())
            .field("odd", &self.odd)
            .field("pi_periodic", &self.pi_periodic)
            .finish()
    }
}

const FLAG_TOL: f64 = 1e-10;

impl TorusFunction {
    pub fn from_closed<F>(f: F, n: usize, odd: bool, pi_periodic: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_n(n)?;
        let samples = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
        let mut t = Self::build(samples, odd, pi_periodic)?;
        t.closed = Some(Arc::new(f));
        Ok(t)
    }

    pub fn from_samples(samples: Vec<f64>, odd: bool, pi_periodic: bool) -> Result<Self> {
        check_n(samples.len())?;
        Self::build(samples, odd, pi_periodic)
    }

    fn build(samples: Vec<f64>, odd: bool, pi_periodic: bool) -> Result<Self> {
        let n = samples.len();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "torus samples must be finite".into(),
            ));
        }
        let scale = samples.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if odd {
            for k in 0..n {
                let d = samples[k] + samples[(n - k) % n];
                if d.abs() > FLAG_TOL * scale {
                    return Err(Error::InvalidArgument(format!(
                        "declared odd but defect {d:e} at sample {k}"
                    )));
                }
            }
        }
        if pi_periodic {
            for k in 0..n {
                let d = samples[k] - samples[(k + n / 2) % n];
                if d.abs() > FLAG_TOL * scale {
                    return Err(Error::InvalidArgument(format!(
                        "declared π-periodic but defect {d:e} at sample {k}"
                    )));
                }
            }
        }
        let modes = trig_modes(&samples);
        Ok(Self {
            samples,
            closed: None,
            modes,
            odd,
            pi_periodic,
        })
    }

    /// Reads a two-column ASCII table `s ψ(s)` on a uniform grid starting at 0.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut s = Vec::new();
        let mut v = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Format(format!(
                    "line {}: expected two columns",
                    ln + 1
                )));
            }
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: bad number", ln + 1)))
            };
            s.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        let n = s.len();
        check_n(n)?;
        for (k, &sk) in s.iter().enumerate() {
            let expect = 2.0 * PI * k as f64 / n as f64;
            if (sk - expect).abs() > 1e-9 {
                return Err(Error::Format(format!(
                    "row {k}: s = {sk} is not on the uniform grid"
                )));
            }
        }
        Self::from_samples(v, false, false)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    /// Evaluates the closed form if present, else the trigonometric interpolant.
    pub fn eval(&self, s: f64) -> f64 {
        if let Some(f) = &self.closed {
            return f(s);
        }
        self.modes
            .iter()
            .map(|&(k, a, b)| {
                let ks = k as f64 * s;
                a * ks.cos() + b * ks.sin()
            })
            .sum()
    }

    /// `ψ′(s)`: exact for the interpolant, five-point stencil for closed forms.
    pub fn derivative(&self, s: f64) -> f64 {
        if let Some(f) = &self.closed {
            let h = 1e-3;
            return (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h))
                / (12.0 * h);
        }
        self.modes
            .iter()
            .map(|&(k, a, b)| {
                let kf = k as f64;
                kf * (b * (kf * s).cos() - a * (kf * s).sin())
            })
            .sum()
    }

    /// `∫_𝕋 ψ(s) e^{is} ds` by the periodic trapezoid rule (spectral for smooth ψ).
    pub fn first_moment(&self) -> [f64; 2] {
        let n = if self.closed.is_some() {
            self.samples.len().max(4096)
        } else {
            self.samples.len()
        };
        let ds = 2.0 * PI / n as f64;
        let mut c = 0.0;
        let mut s = 0.0;
        for k in 0..n {
            let t = k as f64 * ds;
            let v = if self.closed.is_some() {
                self.eval(t)
            } else {
                self.samples[k]
            };
            c += v * t.cos();
            s += v * t.sin();
        }
        [c * ds, s * ds]
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "torus sample count {n} must be even and >= 64"
        )));
    }
    Ok(())
}

fn trig_modes(samples: &[f64]) -> Vec<(usize, f64, f64)> {
    let n = samples.len();
    let half = n / 2;
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 / n as f64;
    let all: Vec<(usize, f64, f64)> = (0..=half)
        .map(|k| {
            let (a, b) = (scale * buf[k].re, -scale * buf[k].im);
            if k == 0 || k == half {
                (k, 0.5 * a, 0.0)
            } else {
                (k, a, b)
            }
        })
        .collect();
    let top = all
        .iter()
        .fold(0.0f64, |m, &(_, a, b)| m.max(a.abs()).max(b.abs()));
    all.into_iter()
        .filter(|&(_, a, b)| a.abs().max(b.abs()) > 1e-16 * top)
        .collect()
}

impl TorusFunction {
    /// `∫_{θ-π/2}^{θ+π/2} ψ(s) e^{is} ds`, exact for the interpolant.
    pub(crate) fn half_circle_moment(&self, theta: f64) -> [f64; 2] {
        // I(j) = ∫ e^{ijs} ds over the half circle
        let big_i = |j: i64| -> Complex64 {
            if j == 0 {
                Complex64::new(PI, 0.0)
            } else if j % 2 == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let sign = if (j.rem_euclid(4)) == 1 { 1.0 } else { -1.0 };
                Complex64::from_polar(2.0 * sign / j as f64, j as f64 * theta)
            }
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, a, b) in &self.modes {
            let k = k as i64;
            let (p, m) = (big_i(k + 1), big_i(1 - k));
            acc += 0.5 * a * (p + m) + 0.5 * b * (p - m) * Complex64::new(0.0, -1.0);
        }
        [acc.re, acc.im]
    }
}
