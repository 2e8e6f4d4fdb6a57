//! `Δ`, `A` and `I` with every s-integral replaced by the trapezoid sum on the
//! s-grid of the kinetic data.
//!
//! Sums `Σ_{j,k} K[j-k] f_j g_k` are evaluated in the DFT basis of the node
//! index, `2π Σ_n f̃_n g̃_{-n} ω_n` with `ω_n = Δs Σ_l K[l] e^{2πinl/Ns}`.
//! Synthetic trigonometric data has a handful of modes; indicator data uses
//! contiguous node ranges and prefix sums of the kernel instead.

use super::kernel::TestKernel;
use crate::error::{Error, Result};
use crate::kinetic::{KineticData, KineticDensity, KineticField, SGrid};
use crate::quad::adaptive_split;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

const TWO_PI: f64 = 2.0 * PI;

/// Kernel samples on the s-grid and derived tables.
pub(crate) struct KernelSamples {
    pub s: SGrid,
    /// spectra of `φ`, `φ·sin`, `φ′`
    pub w: Vec<Complex64>,
    pub ws: Vec<Complex64>,
    pub wd: Vec<Complex64>,
    /// prefix sums of `φ cos` and `φ sin` over `l ∈ [-Ns, 2Ns]`, offset by `Ns`
    pub qc: Vec<f64>,
    pub qs: Vec<f64>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl KernelSamples {
    pub fn new(phi: &TestKernel, s: SGrid, fft: &Arc<dyn Fft<f64>>) -> Self {
        let ns = s.ns;
        let ds = s.ds();
        let half = ns / 2;
        // exact oddness and π-periodicity of the samples
        let mut k = vec![0.0; ns];
        let mut dk = vec![0.0; ns];
        for l in 0..half {
            if 2 * l > half {
                k[l] = -k[half - l];
                dk[l] = dk[half - l];
            } else {
                k[l] = phi.phi(l as f64 * ds);
                dk[l] = phi.dphi(l as f64 * ds);
            }
        }
        k[0] = 0.0;
        for l in 0..half {
            k[l + half] = k[l];
            dk[l + half] = dk[l];
        }
        let lin: Vec<f64> = (0..ns).map(|l| l as f64 * ds).collect();
        let kc: Vec<f64> = (0..ns).map(|l| k[l] * lin[l].cos()).collect();
        let ksn: Vec<f64> = (0..ns).map(|l| k[l] * lin[l].sin()).collect();
        let spectrum = |v: &[f64]| -> Vec<Complex64> {
            let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.process(&mut buf);
            buf.into_iter().map(|c| c.conj() * ds).collect()
        };
        let prefix = |v: &[f64]| -> Vec<f64> {
            let mut q = vec![0.0; 3 * ns + 1];
            for n in 0..2 * ns {
                q[ns + n + 1] = q[ns + n] + v[n % ns];
            }
            for n in (1..=ns).rev() {
                q[n - 1] = q[n] - v[(n - 1) % ns];
            }
            q
        };
        let nodes: Vec<f64> = (0..ns).map(|j| s.node(j)).collect();
        Self {
            s,
            w: spectrum(&k),
            ws: spectrum(&ksn),
            wd: spectrum(&dk),
            qc: prefix(&kc),
            qs: prefix(&ksn),
            cos: nodes.iter().map(|t| t.cos()).collect(),
            sin: nodes.iter().map(|t| t.sin()).collect(),
        }
    }

    /// Replaces `|n| <= nmax` spectra by the continuum coefficients `∫φ(u)e^{inu}du`.
    fn use_exact_low_modes(&mut self, phi: &TestKernel, nmax: i64) {
        let ns = self.s.ns as i64;
        let breaks = phi.seams_in(0.0, PI, 0.0);
        let q = |f: &dyn Fn(f64) -> f64| adaptive_split(f, 0.0, PI, &breaks, 1e-15, 1e-14);
        for n in -nmax..=nmax {
            let nf = n as f64;
            let idx = n.rem_euclid(ns) as usize;
            // φ odd, φ·sin and φ′ even
            self.w[idx] = Complex64::new(0.0, 2.0 * q(&|t| phi.phi(t) * (nf * t).sin()));
            self.ws[idx] = Complex64::new(2.0 * q(&|t| phi.phi(t) * t.sin() * (nf * t).cos()), 0.0);
            self.wd[idx] = Complex64::new(2.0 * q(&|t| phi.dphi(t) * (nf * t).cos()), 0.0);
        }
    }

    #[inline]
    fn range_sum(q: &[f64], ns: usize, start: usize, len: usize, k: usize) -> f64 {
        let a = start as i64 - k as i64 + ns as i64;
        q[(a + len as i64) as usize] - q[a as usize]
    }
}

/// Fourier coefficients in the node-index basis: `f(s_k) = Σ_n f̃_n e^{2πink/Ns}`.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    ns: usize,
    dense: bool,
    lo: i64,
    c: Vec<Complex64>,
}

impl Spectrum {
    fn dense(samples: &[f64], fft: &Arc<dyn Fft<f64>>) -> Self {
        let ns = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft.process(&mut buf);
        let inv = 1.0 / ns as f64;
        Self { ns, dense: true, lo: 0, c: buf.into_iter().map(|z| z * inv).collect() }
    }

    /// From continuous modes `f(s) = Σ_n f_n e^{ins}`, `n ∈ [lo, lo + len)`.
    fn from_modes(ns: usize, ds: f64, lo: i64, modes: &[Complex64]) -> Self {
        let c = modes
            .iter()
            .enumerate()
            .map(|(i, &m)| m * Complex64::from_polar(1.0, (lo + i as i64) as f64 * 0.5 * ds))
            .collect();
        Self { ns, dense: false, lo, c }
    }

    #[inline]
    fn get(&self, n: i64) -> Complex64 {
        if self.dense {
            self.c[n.rem_euclid(self.ns as i64) as usize]
        } else {
            let i = n - self.lo;
            if i >= 0 && (i as usize) < self.c.len() {
                self.c[i as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }

    fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.c.len() as i64)
    }

    fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        if self.dense || other.dense {
            let c = (0..self.ns as i64).map(|n| a * self.get(n) + b * other.get(n)).collect();
            return Self { ns: self.ns, dense: true, lo: 0, c };
        }
        let (l1, h1) = self.range();
        let (l2, h2) = other.range();
        let (lo, hi) = (l1.min(l2), h1.max(h2));
        let c = (lo..hi).map(|n| a * self.get(n) + b * other.get(n)).collect();
        Self { ns: self.ns, dense: false, lo, c }
    }

    /// Multiplication by `sin s` (`sine = true`) or `cos s`.
    fn mul_trig(&self, ds: f64, sine: bool) -> Self {
        let ph = Complex64::from_polar(1.0, 0.5 * ds);
        let (up, down) = if sine {
            (ph / Complex64::new(0.0, 2.0), -ph.conj() / Complex64::new(0.0, 2.0))
        } else {
            (0.5 * ph, 0.5 * ph.conj())
        };
        // (e^{is} f)~_n = e^{iΔs/2} f̃_{n-1}
        if self.dense {
            let c = (0..self.ns as i64).map(|n| up * self.get(n - 1) + down * self.get(n + 1)).collect();
            return Self { ns: self.ns, dense: true, lo: 0, c };
        }
        let (lo, hi) = self.range();
        let c = (lo - 1..hi + 1).map(|n| up * self.get(n - 1) + down * self.get(n + 1)).collect();
        Self { ns: self.ns, dense: false, lo: lo - 1, c }
    }

    /// `Σ_n f̃_n g̃_{-n} w_n`.
    fn pair(&self, g: &Self, w: Option<&[Complex64]>) -> f64 {
        let ns = self.ns as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        let (lo, hi) = if self.dense { (0, ns) } else { self.range() };
        for n in lo..hi {
            let mut t = self.get(n) * g.get(-n);
            if let Some(w) = w {
                t *= w[n.rem_euclid(ns) as usize];
            }
            acc += t;
        }
        acc.re
    }

    /// `f̃_n · w_{-n}`, the spectrum of `Δs Σ_k W[j-k] f_k`.
    fn convolve(&self, w: &[Complex64]) -> Self {
        let ns = self.ns as i64;
        let c = if self.dense {
            (0..ns).map(|n| self.get(n) * w[(-n).rem_euclid(ns) as usize]).collect()
        } else {
            let (lo, hi) = self.range();
            (lo..hi).map(|n| self.get(n) * w[(-n).rem_euclid(ns) as usize]).collect()
        };
        Self { ns: self.ns, dense: self.dense, lo: self.lo, c }
    }
}

/// Contiguous (cyclic) node range of an arc.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeRange {
    pub start: usize,
    pub len: usize,
}

/// Nodes with `cos(s_k - θ) > 0`.
pub(crate) fn arc_nodes(theta: f64, s: SGrid) -> NodeRange {
    let ds = s.ds();
    let x = (theta - FRAC_PI_2) / ds - 0.5;
    let y = (theta + FRAC_PI_2) / ds - 0.5;
    let p0 = x.floor() as i64 + 1;
    let pe = y.ceil() as i64;
    NodeRange { start: p0.rem_euclid(s.ns as i64) as usize, len: (pe - p0).clamp(0, s.ns as i64) as usize }
}

fn intersect(a: NodeRange, b: NodeRange, ns: usize, out: &mut Vec<(NodeRange, f64)>, sign: f64) {
    let ns = ns as i64;
    let (a0, a1) = (a.start as i64, (a.start + a.len) as i64);
    for shift in [-ns, 0, ns] {
        let lo = a0.max(b.start as i64 + shift);
        let hi = a1.min((b.start + b.len) as i64 + shift);
        if hi > lo {
            out.push((NodeRange { start: lo.rem_euclid(ns) as usize, len: (hi - lo) as usize }, sign));
        }
    }
}

/// Signed ranges of `1_{P1} - 1_{P0}`.
fn range_difference(p0: NodeRange, p1: NodeRange, ns: usize) -> Vec<(NodeRange, f64)> {
    let comp = |p: NodeRange| NodeRange { start: (p.start + p.len) % ns, len: ns - p.len };
    let mut out = Vec::with_capacity(4);
    intersect(p1, comp(p0), ns, &mut out, 1.0);
    intersect(p0, comp(p1), ns, &mut out, -1.0);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnginePath {
    /// Node ranges for indicator data, few modes for trigonometric data.
    Auto,
    /// FFT of every section.
    Dense,
    /// Trigonometric data only: continuum kernel coefficients, so the
    /// s-integrals are exact.
    Exact,
}

#[derive(Debug, Clone)]
enum ChiRep {
    Arc { range: NodeRange },
    Spec { chi: Spectrum, sin_chi: Spectrum },
}

#[derive(Debug, Clone)]
enum JRep {
    Zero,
    /// `J(t) = 2F φ′(t - θ - π/2)`
    Param { f: f64, theta: f64 },
    Samples(Vec<f64>),
    Spec(Spectrum),
}

/// Per-cell data for one grid row.
#[derive(Debug, Clone)]
pub(crate) struct CellRep {
    chi: ChiRep,
    j: JRep,
    /// `Δs Σ_j J(t_j) χ(t_j) sin t_j`
    i3: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellTerms {
    pub delta: f64,
    pub a: [f64; 2],
    pub i: f64,
}

/// Evaluates the s-discrete `Δ(x, τe₁)`, `A^τ(x)` and `I^τ(x)` for shifts that are multiples of `hx`.
pub struct DiscreteEngine<'a> {
    chi: &'a KineticField,
    sigma: Option<&'a KineticDensity>,
    phi: TestKernel,
    ks: KernelSamples,
    fft: Arc<dyn Fft<f64>>,
    path: EnginePath,
}

impl<'a> DiscreteEngine<'a> {
    pub fn new(chi: &'a KineticField, sigma: Option<&'a KineticDensity>, phi: &TestKernel, path: EnginePath) -> Result<Self> {
        if let Some(sg) = sigma {
            if sg.grid() != &chi.grid {
                return Err(Error::InvalidArgument("χ and σ live on different grids".into()));
            }
            if let Some(s) = sg.s_grid() {
                if s != chi.s {
                    return Err(Error::InvalidArgument("χ and σ use different s-grids".into()));
                }
            }
        }
        let sigma = sigma.filter(|s| !s.is_zero());
        let fft = FftPlanner::new().plan_fft_forward(chi.s.ns);
        let mut ks = KernelSamples::new(phi, chi.s, &fft);
        if path == EnginePath::Exact {
            let trig_sigma = matches!(sigma, None | Some(KineticDensity::Trig { .. }));
            if !matches!(chi.data, KineticData::Trig { .. }) || !trig_sigma {
                return Err(Error::InvalidArgument("exact s-integrals need trigonometric χ and σ".into()));
            }
            ks.use_exact_low_modes(phi, 8);
        }
        Ok(Self { chi, sigma, phi: *phi, ks, fft, path })
    }

    pub fn has_sigma(&self) -> bool {
        self.sigma.is_some()
    }

    fn use_arcs(&self) -> bool {
        self.path == EnginePath::Auto && self.chi.is_indicator()
    }

    /// Per-cell representations of row `j` (`None` for masked cells).
    pub(crate) fn row(&self, j: usize) -> Vec<Option<CellRep>> {
        let g = &self.chi.grid;
        (0..g.nx).map(|i| self.cell(g.idx(i, j))).collect()
    }

    fn cell(&self, idx: usize) -> Option<CellRep> {
        if !self.chi.mask.get(idx) {
            return None;
        }
        let s = self.chi.s;
        let (ns, ds) = (s.ns, s.ds());
        let chi = if self.use_arcs() {
            let KineticData::Indicator(m) = &self.chi.data else { unreachable!() };
            ChiRep::Arc { range: arc_nodes(m.theta[idx], s) }
        } else {
            let spec = match &self.chi.data {
                KineticData::Trig { a, b, c } if self.path != EnginePath::Dense => {
                    let m1 = Complex64::new(0.5 * a[idx], -0.5 * b[idx]);
                    Spectrum::from_modes(ns, ds, -1, &[m1.conj(), Complex64::new(c[idx], 0.0), m1])
                }
                _ => {
                    let mut sec = vec![0.0; ns];
                    self.chi.section(idx, &mut sec);
                    Spectrum::dense(&sec, &self.fft)
                }
            };
            let sin_chi = spec.mul_trig(ds, true);
            ChiRep::Spec { chi: spec, sin_chi }
        };
        let j = match self.sigma {
            None => JRep::Zero,
            Some(KineticDensity::Parametric { theta, f }) => {
                let rep = JRep::Param { f: f.values[idx], theta: theta.theta[idx] };
                match chi {
                    ChiRep::Arc { .. } => rep,
                    ChiRep::Spec { .. } => JRep::Spec(Spectrum::dense(&self.j_samples(&rep), &self.fft)),
                }
            }
            Some(sg) => {
                let spec = match sg {
                    KineticDensity::Trig { coeffs, .. } if self.path != EnginePath::Dense => {
                        let c = &coeffs[idx];
                        let m1 = Complex64::new(0.5 * c[1], -0.5 * c[2]);
                        let m2 = Complex64::new(0.5 * c[3], -0.5 * c[4]);
                        Spectrum::from_modes(ns, ds, -2, &[m2.conj(), m1.conj(), Complex64::new(c[0], 0.0), m1, m2])
                    }
                    _ => {
                        let mut sec = vec![0.0; ns];
                        sg.section(idx, &mut sec).expect("sampled");
                        Spectrum::dense(&sec, &self.fft)
                    }
                };
                let jspec = spec.convolve(&self.ks.wd);
                match chi {
                    ChiRep::Arc { .. } => {
                        let dense = if jspec.dense { jspec } else { jspec.combine(&jspec, 1.0, 0.0).densify() };
                        JRep::Samples(dense.samples(&self.fft_inverse()))
                    }
                    ChiRep::Spec { .. } => JRep::Spec(jspec),
                }
            }
        };
        let i3 = match (&chi, &j) {
            (_, JRep::Zero) => 0.0,
            (ChiRep::Spec { sin_chi, .. }, JRep::Spec(js)) => TWO_PI * js.pair(sin_chi, None),
            (ChiRep::Arc { range }, jr) => {
                let mut acc = 0.0;
                for q in 0..range.len {
                    let k = (range.start + q) % ns;
                    acc += self.j_at(jr, k) * self.ks.sin[k];
                }
                acc * ds
            }
            _ => unreachable!("spectral χ always carries a spectral J"),
        };
        Some(CellRep { chi, j, i3 })
    }

    fn fft_inverse(&self) -> Arc<dyn Fft<f64>> {
        FftPlanner::new().plan_fft_inverse(self.chi.s.ns)
    }

    fn j_samples(&self, rep: &JRep) -> Vec<f64> {
        (0..self.chi.s.ns).map(|k| self.j_at(rep, k)).collect()
    }

    #[inline]
    fn j_at(&self, rep: &JRep, k: usize) -> f64 {
        match rep {
            JRep::Zero => 0.0,
            JRep::Param { f, theta } => 2.0 * f * self.phi.dphi(self.chi.s.node(k) - theta - FRAC_PI_2),
            JRep::Samples(v) => v[k],
            JRep::Spec(_) => unreachable!(),
        }
    }

    /// Terms at `x` (cell rep `c0`) and `x + τe₁` (cell rep `c1`).
    pub(crate) fn terms(&self, c0: &CellRep, c1: &CellRep) -> CellTerms {
        match (&c0.chi, &c1.chi) {
            (ChiRep::Arc { range: p0 }, ChiRep::Arc { range: p1 }) => self.arc_terms(c0, c1, *p0, *p1),
            (ChiRep::Spec { chi: f0, sin_chi: s0 }, ChiRep::Spec { chi: f1, .. }) => {
                let ds = self.chi.s.ds();
                let d = f1.combine(f0, 1.0, -1.0);
                let sin_d = d.mul_trig(ds, true);
                let cos_d = d.mul_trig(ds, false);
                let sin_f1 = f1.mul_trig(ds, true);
                let delta = 0.5 * TWO_PI * d.pair(&d, Some(&self.ks.ws));
                let a1 = TWO_PI * sin_f1.pair(&cos_d, Some(&self.ks.w));
                let a2 = TWO_PI * s0.pair(&sin_d, Some(&self.ks.w));
                let i = match (&c0.j, &c1.j) {
                    (JRep::Spec(j0), JRep::Spec(j1)) => {
                        TWO_PI * j0.combine(j1, 1.0, 1.0).pair(&sin_d, None) - (c1.i3 - c0.i3)
                    }
                    _ => 0.0,
                };
                CellTerms { delta, a: [a1, a2], i }
            }
            _ => unreachable!("mixed representations"),
        }
    }

    fn arc_terms(&self, c0: &CellRep, c1: &CellRep, p0: NodeRange, p1: NodeRange) -> CellTerms {
        let ks = &self.ks;
        let ns = self.chi.s.ns;
        let ds = self.chi.s.ds();
        let diff = range_difference(p0, p1, ns);
        let (mut a1, mut a2, mut delta, mut ii) = (0.0, 0.0, 0.0, 0.0);
        let with_j = !matches!(c0.j, JRep::Zero);
        for &(r, sign) in &diff {
            for q in 0..r.len {
                let k = (r.start + q) % ns;
                let (c, s) = (ks.cos[k], ks.sin[k]);
                let c_1 = KernelSamples::range_sum(&ks.qc, ns, p1.start, p1.len, k);
                let s_1 = KernelSamples::range_sum(&ks.qs, ns, p1.start, p1.len, k);
                let c_0 = KernelSamples::range_sum(&ks.qc, ns, p0.start, p0.len, k);
                let s_0 = KernelSamples::range_sum(&ks.qs, ns, p0.start, p0.len, k);
                a1 += sign * c * (s * c_1 + c * s_1);
                a2 += sign * s * (s * c_0 + c * s_0);
                let mut inner = 0.0;
                for &(r2, sign2) in &diff {
                    inner += sign2 * KernelSamples::range_sum(&ks.qs, ns, r2.start, r2.len, k);
                }
                delta += sign * inner;
                if with_j {
                    ii += sign * (self.j_at(&c0.j, k) + self.j_at(&c1.j, k)) * s;
                }
            }
        }
        let ds2 = ds * ds;
        CellTerms { delta: 0.5 * ds2 * delta, a: [ds2 * a1, ds2 * a2], i: ds * ii - (c1.i3 - c0.i3) }
    }
}

impl Spectrum {
    fn densify(&self) -> Self {
        let c = (0..self.ns as i64).map(|n| self.get(n)).collect();
        Self { ns: self.ns, dense: true, lo: 0, c }
    }

    /// Real samples `Σ_n f̃_n e^{2πink/Ns}` (dense spectra only).
    fn samples(&self, inverse: &Arc<dyn Fft<f64>>) -> Vec<f64> {
        let mut buf = self.c.clone();
        inverse.process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_nodes_match_indicator() {
        let s = SGrid::new(256).unwrap();
        for th in [0.0, 0.3, -2.0, 3.1, 5.9, std::f64::consts::FRAC_PI_2 - 4e-8] {
            let r = arc_nodes(th, s);
            for k in 0..256 {
                let inside = (k + 256 - r.start) % 256 < r.len;
                assert_eq!(inside, (s.node(k) - th).cos() > 0.0, "θ={th} k={k}");
            }
        }
    }

    #[test]
    fn range_difference_is_signed_indicator_difference() {
        let ns = 64;
        for (a, la, b, lb) in [(3, 32, 10, 32), (60, 32, 2, 32), (5, 32, 40, 31), (0, 32, 0, 32)] {
            let p0 = NodeRange { start: a, len: la };
            let p1 = NodeRange { start: b, len: lb };
            let mut d = vec![0.0; ns];
            for (r, sg) in range_difference(p0, p1, ns) {
                for q in 0..r.len {
                    d[(r.start + q) % ns] += sg;
                }
            }
            let inr = |p: NodeRange, k: usize| ((k + ns - p.start) % ns < p.len) as i32 as f64;
            for k in 0..ns {
                assert_eq!(d[k], inr(p1, k) - inr(p0, k));
            }
        }
    }
}
