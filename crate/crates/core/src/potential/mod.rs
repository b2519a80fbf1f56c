//! Radial interaction potentials `V(r)`, their Fourier transforms `V̂(p)`
//! and the computable parts of the admissibility conditions.
//!
//! Every potential is `g · V_base(r / a)` with coupling `g ≥ 0` and range
//! `a > 0`. The Fourier convention is
//! `V̂(p) = (2π)^{-3/2} ∫ V(x) e^{-ip·x} dx`, which for radial `V` reduces to
//! the sine transform `√(2/π) p⁻¹ ∫₀^∞ r sin(pr) V(r) dr`.

mod admissibility;
mod table;
mod transform;

use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, OnceLock};

pub use admissibility::{admissibility, AdmissibilityOptions, AdmissibilityReport, Verdict};
pub use table::{parse_table, PotentialTable};

use crate::error::{Error, Result};
use crate::numerics::adaptive_integrate_with;
use crate::numerics::AdaptiveOptions;
use transform::FourierMomentTable;

/// `(2π)^{-3/2}`
pub const INV_TWO_PI_3_2: f64 = 0.063_493_635_934_240_97;
/// `√(2/π)`
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Gaussian,
    Lorentzian,
    Yukawa,
    Tabulated,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Lorentzian => "lorentzian",
            Self::Yukawa => "yukawa",
            Self::Tabulated => "tabulated",
        }
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(Self::Gaussian),
            "lorentzian" | "lorentz" => Ok(Self::Lorentzian),
            "yukawa" => Ok(Self::Yukawa),
            "tabulated" | "table" => Ok(Self::Tabulated),
            other => Err(Error::Invalid(format!("unknown potential kind '{other}'"))),
        }
    }
}

/// A real radial potential. Immutable after construction and cheap to clone.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    kind: PotentialKind,
    coupling: f64,
    range: f64,
    table: Option<Arc<PotentialTable>>,
    moments: Arc<OnceLock<FourierMomentTable>>,
}

impl RadialPotential {
    fn builtin(kind: PotentialKind, coupling: f64) -> Self {
        Self {
            kind,
            coupling,
            range: 1.0,
            table: None,
            moments: Arc::new(OnceLock::new()),
        }
    }

    /// `V(r) = -g (2π)^{-3/2} e^{-r²/2}`.
    pub fn gaussian(coupling: f64) -> Self {
        Self::builtin(PotentialKind::Gaussian, coupling)
    }

    /// `V(r) = -g / (π² (1 + r²)²)`.
    pub fn lorentzian(coupling: f64) -> Self {
        Self::builtin(PotentialKind::Lorentzian, coupling)
    }

    /// `V(r) = -g e^{-r} / (4π r)`.
    pub fn yukawa(coupling: f64) -> Self {
        Self::builtin(PotentialKind::Yukawa, coupling)
    }

    pub fn builtin_kind(kind: PotentialKind, coupling: f64) -> Result<Self> {
        if kind == PotentialKind::Tabulated {
            return Err(Error::Invalid("tabulated potentials need a table".into()));
        }
        Self::builtin(kind, coupling).checked()
    }

    /// Tabulated `V(r)` (the table already includes any overall scale; `g`
    /// multiplies it).
    pub fn tabulated(table: PotentialTable, coupling: f64) -> Result<Self> {
        Self {
            kind: PotentialKind::Tabulated,
            coupling,
            range: 1.0,
            table: Some(Arc::new(table)),
            moments: Arc::new(OnceLock::new()),
        }
        .checked()
    }

    pub fn from_table_file(path: impl AsRef<Path>, coupling: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::tabulated(parse_table(&text)?, coupling)
    }

    /// Rescale lengths: `V(r) → V(r / a)`.
    pub fn with_range(mut self, range: f64) -> Result<Self> {
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::Domain {
                what: "potential range must be positive",
                value: range,
            });
        }
        self.range = range;
        self.moments = Arc::new(OnceLock::new());
        Ok(self)
    }

    /// Same shape with a different coupling.
    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self {
            coupling,
            ..self.clone()
        }
        .checked()
    }

    fn checked(self) -> Result<Self> {
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::Domain {
                what: "coupling must be finite and >= 0",
                value: self.coupling,
            });
        }
        if let Some(t) = &self.table {
            t.check_integrability()?;
        }
        Ok(self)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn table(&self) -> Option<&PotentialTable> {
        self.table.as_deref()
    }

    /// Canonical text used for cache keys.
    pub fn describe(&self) -> String {
        let mut s = format!("{}:g={:e}:a={:e}", self.kind.name(), self.coupling, self.range);
        if let Some(t) = &self.table {
            for (r, v) in t.radii().iter().zip(t.values()) {
                s.push_str(&format!(":{r:e},{v:e}"));
            }
        }
        s
    }

    /// Length over which `V` varies appreciably.
    pub fn length_scale(&self) -> f64 {
        match &self.table {
            Some(t) => t.length_scale(),
            None => self.range,
        }
    }

    /// Radius beyond which `|V(r)|` stays below `eps` times its scale.
    pub fn decay_radius(&self, eps: f64) -> f64 {
        let eps = eps.clamp(1e-300, 0.5);
        let unit = match self.kind {
            PotentialKind::Gaussian => (2.0 * (1.0 / eps).ln()).sqrt(),
            PotentialKind::Yukawa => (1.0 / eps).ln(),
            PotentialKind::Lorentzian => eps.powf(-0.25),
            PotentialKind::Tabulated => return self.table.as_ref().expect("tabulated").decay_radius(eps),
        };
        unit * self.range
    }

    /// `V(r)`. Yukawa returns `-∞` at `r = 0` (for `g > 0`).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain {
                what: "potential radius must be >= 0",
                value: r,
            });
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        let x = r / self.range;
        let base = match self.kind {
            PotentialKind::Gaussian => -INV_TWO_PI_3_2 * (-0.5 * x * x).exp(),
            PotentialKind::Lorentzian => {
                let d = 1.0 + x * x;
                -1.0 / (PI * PI * d * d)
            }
            PotentialKind::Yukawa => {
                if x == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -(-x).exp() / (4.0 * PI * x)
                }
            }
            PotentialKind::Tabulated => self.table.as_ref().expect("tabulated").eval(r),
        };
        self.coupling * base
    }

    /// `r · V(r)`, finite at the origin for the Yukawa shape.
    pub(crate) fn r_times_v(&self, r: f64) -> f64 {
        if self.kind == PotentialKind::Yukawa && self.coupling != 0.0 {
            let x = r / self.range;
            return -self.coupling * self.range * (-x).exp() / (4.0 * PI);
        }
        if r == 0.0 {
            return 0.0;
        }
        r * self.eval_unchecked(r)
    }

    /// `V̂(p)`: closed form for built-in shapes, sine-transform quadrature
    /// for tables.
    pub fn fourier(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::Domain {
                what: "momentum must be >= 0",
                value: p,
            });
        }
        if self.coupling == 0.0 {
            return Ok(0.0);
        }
        if self.kind == PotentialKind::Tabulated {
            return self.fourier_by_quadrature(p);
        }
        Ok(self.fourier_closed(p))
    }

    fn fourier_closed(&self, p: f64) -> f64 {
        let a = self.range;
        let k = a * p;
        let base = match self.kind {
            PotentialKind::Gaussian => -INV_TWO_PI_3_2 * (-0.5 * k * k).exp(),
            PotentialKind::Lorentzian => -INV_TWO_PI_3_2 * (-k).exp(),
            PotentialKind::Yukawa => -INV_TWO_PI_3_2 / (1.0 + k * k),
            PotentialKind::Tabulated => unreachable!("tables have no closed form"),
        };
        self.coupling * a * a * a * base
    }

    /// `V̂(p)` from the radial sine transform of `V`, regardless of kind.
    pub fn fourier_by_quadrature(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::Domain {
                what: "momentum must be >= 0",
                value: p,
            });
        }
        if self.coupling == 0.0 {
            return Ok(0.0);
        }
        if p == 0.0 {
            let opts = AdaptiveOptions::new(1e-15 * self.volume_scale()).with_hints(&[0.0]);
            let m = adaptive_integrate_with(|r| r * self.r_times_v(r), 0.0, f64::INFINITY, &opts)?;
            return Ok(SQRT_2_OVER_PI * m);
        }
        let s = transform::sine_transform(|r| self.r_times_v(r), p, self.length_scale(), self.decay_radius(1e-8))?;
        Ok(SQRT_2_OVER_PI * s / p)
    }

    fn volume_scale(&self) -> f64 {
        let l = self.length_scale();
        (self.coupling * l * l * l).max(1e-300) * self.eval_scale()
    }

    fn eval_scale(&self) -> f64 {
        match &self.table {
            Some(t) => t.value_scale(),
            None => INV_TWO_PI_3_2,
        }
    }

    /// `∫_{|p-q|}^{p+q} s V̂(s) ds`, evaluated without cancellation for the
    /// built-in shapes.
    pub fn fourier_moment(&self, p: f64, q: f64) -> Result<f64> {
        if !(p >= 0.0 && q >= 0.0) {
            return Err(Error::Domain {
                what: "momenta must be >= 0",
                value: p.min(q),
            });
        }
        Ok(self.fourier_moment_unchecked(p, q))
    }

    fn fourier_moment_unchecked(&self, p: f64, q: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        let (lo_m, hi_m) = if p <= q { (p, q) } else { (q, p) };
        if self.kind == PotentialKind::Tabulated {
            let table = self.moments.get_or_init(|| FourierMomentTable::build(self));
            return self.coupling * table.moment(hi_m - lo_m, hi_m + lo_m);
        }
        let a = self.range;
        let (pm, qm) = (a * lo_m, a * hi_m);
        let lo = qm - pm;
        let four_pq = 4.0 * pm * qm;
        let unit = match self.kind {
            PotentialKind::Gaussian => -INV_TWO_PI_3_2 * (-0.5 * lo * lo).exp() * -(-0.5 * four_pq).exp_m1(),
            PotentialKind::Yukawa => -0.5 * INV_TWO_PI_3_2 * (four_pq / (1.0 + lo * lo)).ln_1p(),
            PotentialKind::Lorentzian => {
                let d = 2.0 * pm;
                -INV_TWO_PI_3_2 * (-lo).exp() * ((1.0 + lo) * -(-d).exp_m1() - d * (-d).exp())
            }
            PotentialKind::Tabulated => unreachable!(),
        };
        self.coupling * a * unit
    }

    /// Angular average `∫_{S²} V̂(|p e_z - q ω|) dω(ω)`, symmetric in `(p, q)`.
    pub fn angular_kernel(&self, p: f64, q: f64) -> Result<f64> {
        if !(p >= 0.0 && q >= 0.0) {
            return Err(Error::Domain {
                what: "momenta must be >= 0",
                value: p.min(q),
            });
        }
        Ok(self.angular_kernel_unchecked(p, q))
    }

    pub(crate) fn angular_kernel_unchecked(&self, p: f64, q: f64) -> f64 {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        if lo * hi == 0.0 || lo < 1e-12 * hi.max(1e-300) {
            return 4.0 * PI * self.fourier_limit(hi);
        }
        2.0 * PI / (lo * hi) * self.fourier_moment_unchecked(lo, hi)
    }

    fn fourier_limit(&self, p: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        match self.kind {
            PotentialKind::Tabulated => {
                let table = self.moments.get_or_init(|| FourierMomentTable::build(self));
                self.coupling * table.fourier(p)
            }
            _ => self.fourier_closed(p),
        }
    }

    /// Smallest `p ≥ √μ` (stepping a quarter of the range) with
    /// `|k(p, √μ)| ≤ rel · |k(√μ, √μ)|`, capped at `cap`.
    pub fn kernel_cutoff(&self, mu: f64, rel: f64, cap: f64) -> f64 {
        let kf = mu.sqrt();
        let k0 = self.angular_kernel_unchecked(kf, kf).abs();
        if k0 == 0.0 {
            return cap;
        }
        let step = 0.25 / self.length_scale().max(1e-12);
        let mut p = kf;
        while p < cap {
            p += step;
            if self.angular_kernel_unchecked(p, kf).abs() <= rel * k0 {
                return p.min(cap);
            }
        }
        cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_origin() {
        let v = RadialPotential::gaussian(1.0).eval(0.0).unwrap();
        assert!((v + 0.063494).abs() < 1e-6);
        let v = RadialPotential::lorentzian(1.0).eval(0.0).unwrap();
        assert!((v + 0.101321).abs() < 1e-6);
        assert_eq!(RadialPotential::yukawa(1.0).eval(0.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn zero_coupling_vanishes() {
        for kind in [
            PotentialKind::Gaussian,
            PotentialKind::Lorentzian,
            PotentialKind::Yukawa,
        ] {
            let v = RadialPotential::builtin_kind(kind, 0.0).unwrap();
            for r in [0.0, 0.5, 3.0] {
                assert_eq!(v.eval(r).unwrap(), 0.0);
                assert_eq!(v.fourier(r).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn negative_radius_is_domain_error() {
        assert!(RadialPotential::gaussian(1.0).eval(-1.0).is_err());
        assert!(RadialPotential::gaussian(1.0).fourier(-1.0).is_err());
        assert!(RadialPotential::gaussian(-1.0).with_coupling(-2.0).is_err());
    }

    #[test]
    fn riemann_lebesgue() {
        for kind in [
            PotentialKind::Gaussian,
            PotentialKind::Lorentzian,
            PotentialKind::Yukawa,
        ] {
            let v = RadialPotential::builtin_kind(kind, 1.0).unwrap();
            assert!(v.fourier(1e3).unwrap().abs() < 1e-7, "{kind:?}");
        }
    }

    #[test]
    fn kernel_symmetric_and_limits() {
        let v = RadialPotential::lorentzian(2.0);
        let a = v.angular_kernel(3.0, 4.5).unwrap();
        let b = v.angular_kernel(4.5, 3.0).unwrap();
        assert_eq!(a, b);
        let near0 = v.angular_kernel(1e-9, 2.0).unwrap();
        let lim = 4.0 * PI * v.fourier(2.0).unwrap();
        assert!((near0 - lim).abs() < 1e-8 * lim.abs());
    }

    #[test]
    fn range_scaling() {
        let v = RadialPotential::yukawa(1.0).with_range(2.0).unwrap();
        assert!((v.eval(2.0).unwrap() - RadialPotential::yukawa(1.0).eval(1.0).unwrap()).abs() < 1e-15);
        let direct = v.fourier_by_quadrature(0.7).unwrap();
        let closed = v.fourier(0.7).unwrap();
        assert!((direct - closed).abs() < 1e-9 * closed.abs(), "{direct} {closed}");
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        for kind in [
            PotentialKind::Gaussian,
            PotentialKind::Lorentzian,
            PotentialKind::Yukawa,
        ] {
            let v = RadialPotential::builtin_kind(kind, 1.0).unwrap();
            for p in [0.0, 1e-3, 0.3, 1.0, 4.0, 12.0] {
                let q = v.fourier_by_quadrature(p).unwrap();
                let c = v.fourier(p).unwrap();
                assert!((q - c).abs() < 1e-9 * INV_TWO_PI_3_2, "{kind:?} p={p}: {q} {c}");
            }
        }
    }

    #[test]
    fn tabulated_gaussian_kernel() {
        let radii: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025).collect();
        let values: Vec<f64> = radii.iter().map(|&r| -INV_TWO_PI_3_2 * (-0.5 * r * r).exp()).collect();
        let t = RadialPotential::tabulated(PotentialTable::new(radii, values).unwrap(), 2.0).unwrap();
        let g = RadialPotential::gaussian(2.0);
        for (p, q) in [(1.0, 1.0), (3.0, 4.0), (0.2, 5.0), (10.0, 10.3)] {
            let a = t.angular_kernel(p, q).unwrap();
            let b = g.angular_kernel(p, q).unwrap();
            assert!(
                (a - b).abs() < 1e-7 * g.angular_kernel(0.0, 0.0).unwrap().abs(),
                "({p},{q}): {a} {b}"
            );
        }
    }
}
