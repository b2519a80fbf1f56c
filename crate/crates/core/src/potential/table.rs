use crate::error::{Error, Result};
use crate::numerics::Interpolant1D;

/// Minimum number of rows in a potential table.
pub const MIN_ROWS: usize = 16;

/// Sampled `V(r)` with monotone cubic interpolation inside the table and
/// power laws fitted over the first and last decade outside it.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    interp: Interpolant1D,
    head: PowerLaw,
    tail: PowerLaw,
}

/// `V(r) = v0 (r / r0)^(-exponent)`; `exponent = ∞` means zero beyond `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub r0: f64,
    pub v0: f64,
    pub exponent: f64,
}

impl PowerLaw {
    fn eval(&self, r: f64) -> f64 {
        if self.v0 == 0.0 || self.exponent == f64::INFINITY {
            return 0.0;
        }
        self.v0 * (r / self.r0).powf(-self.exponent)
    }
}

/// Parse `r value` rows; `#` starts a comment.
pub fn parse_table(text: &str) -> Result<PotentialTable> {
    let mut radii = Vec::new();
    let mut values = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let cols: Vec<&str> = content.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected two columns 'r value', found {}", cols.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            let x: f64 = s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse {what} '{s}'"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("{what} is not finite"),
                });
            }
            Ok(x)
        };
        let r = num(cols[0], "radius")?;
        let v = num(cols[1], "value")?;
        if r < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("radius {r} is negative"),
            });
        }
        if let Some(&prev) = radii.last() {
            if r <= prev {
                return Err(Error::Parse {
                    line,
                    message: format!("radii must be strictly increasing ({r} after {prev})"),
                });
            }
        }
        radii.push(r);
        values.push(v);
    }
    if radii.len() < MIN_ROWS {
        return Err(Error::Parse {
            line: last_line,
            message: format!("table has {} rows, at least {MIN_ROWS} required", radii.len()),
        });
    }
    PotentialTable::new(radii, values)
}

impl PotentialTable {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < MIN_ROWS {
            return Err(Error::Invalid(format!(
                "table has {} rows, at least {MIN_ROWS} required",
                radii.len()
            )));
        }
        if radii[0] < 0.0 {
            return Err(Error::Domain {
                what: "table radii must be >= 0",
                value: radii[0],
            });
        }
        let head = fit_head(&radii, &values);
        let tail = fit_tail(&radii, &values);
        let interp = Interpolant1D::new(radii, values)?;
        Ok(Self { interp, head, tail })
    }

    pub fn radii(&self) -> &[f64] {
        self.interp.knots()
    }

    pub fn values(&self) -> &[f64] {
        self.interp.values()
    }

    pub fn head(&self) -> PowerLaw {
        self.head
    }

    pub fn tail(&self) -> PowerLaw {
        self.tail
    }

    pub fn eval(&self, r: f64) -> f64 {
        let radii = self.radii();
        let (first, last) = (radii[0], radii[radii.len() - 1]);
        if r < first {
            if r == 0.0 && self.head.exponent > 0.0 && self.head.v0 != 0.0 {
                return self.head.v0.signum() * f64::INFINITY;
            }
            self.head.eval(r)
        } else if r > last {
            self.tail.eval(r)
        } else {
            self.interp.eval(r)
        }
    }

    /// `‖V‖_{L¹}` and `‖V‖_{L^{3/2}}` are finite iff the head grows slower
    /// than `r^{-2}` and the tail decays faster than `r^{-3}`.
    pub(crate) fn check_integrability(&self) -> Result<()> {
        if self.head.v0 != 0.0 && self.head.exponent >= 2.0 {
            return Err(Error::Rejected(format!(
                "head behaves like r^-{:.3}; V is not in L^3/2 near the origin",
                self.head.exponent
            )));
        }
        if self.tail.v0 != 0.0 && self.tail.exponent <= 3.0 {
            return Err(Error::Rejected(format!(
                "tail behaves like r^-{:.3}; V is not in L^1",
                self.tail.exponent
            )));
        }
        Ok(())
    }

    /// Largest `|V|` among the samples (1 for an all-zero table).
    pub fn value_scale(&self) -> f64 {
        let m = self.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    /// Radius maximising `r³ |V(r)|` over the samples, bounded below by a
    /// few table spacings.
    pub fn length_scale(&self) -> f64 {
        let radii = self.radii();
        let mut best = (0.0, 0.0);
        for (&r, &v) in radii.iter().zip(self.values()) {
            let w = r * r * r * v.abs();
            if w > best.0 {
                best = (w, r);
            }
        }
        let spacing = radii.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let r = if best.0 > 0.0 { best.1 } else { radii[radii.len() - 1] };
        r.max(4.0 * spacing)
    }

    pub fn decay_radius(&self, eps: f64) -> f64 {
        let scale = self.value_scale();
        let radii = self.radii();
        let last = radii[radii.len() - 1];
        let t = self.tail;
        if t.v0 != 0.0 && t.exponent.is_finite() && t.v0.abs() > eps * scale {
            let r = last * (t.v0.abs() / (eps * scale)).powf(1.0 / t.exponent);
            return r.min(1e6 * last);
        }
        let idx = self
            .values()
            .iter()
            .rposition(|v| v.abs() > eps * scale)
            .map_or(radii.len() - 1, |i| (i + 1).min(radii.len() - 1));
        radii[idx].max(radii[1])
    }
}

fn fit_head(radii: &[f64], values: &[f64]) -> PowerLaw {
    let (r0, v0) = (radii[0], values[0]);
    if r0 == 0.0 || v0 == 0.0 {
        return PowerLaw { r0, v0, exponent: 0.0 };
    }
    let j = radii.iter().position(|&r| r >= 10.0 * r0).unwrap_or(radii.len() - 1);
    let (r1, v1) = (radii[j], values[j]);
    let exponent = if v1 != 0.0 && v1.signum() == v0.signum() {
        (-(v1 / v0).ln() / (r1 / r0).ln()).max(0.0)
    } else {
        0.0
    };
    PowerLaw { r0, v0, exponent }
}

fn fit_tail(radii: &[f64], values: &[f64]) -> PowerLaw {
    let n = radii.len() - 1;
    let (r0, v0) = (radii[n], values[n]);
    if v0 == 0.0 {
        return PowerLaw {
            r0,
            v0,
            exponent: f64::INFINITY,
        };
    }
    let j = radii.iter().rposition(|&r| r <= 0.1 * r0).unwrap_or(0);
    let (r1, v1) = (radii[j], values[j]);
    let exponent = if v1 != 0.0 && v1.signum() == v0.signum() && r1 > 0.0 {
        (v1 / v0).ln() / (r0 / r1).ln()
    } else {
        f64::INFINITY
    };
    PowerLaw { r0, v0, exponent }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64, n: usize, rmax: f64) -> String {
        (0..n)
            .map(|i| {
                let r = rmax * i as f64 / (n - 1) as f64;
                format!("{r} {}\n", f(r))
            })
            .collect()
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = format!("# header\n\n{}", rows(|r| -(-r * r).exp(), 20, 8.0));
        let t = parse_table(&text).unwrap();
        assert_eq!(t.radii().len(), 20);
        assert_eq!(t.eval(0.0), -1.0);
    }

    #[test]
    fn errors_name_the_line() {
        let mut text = rows(|r| -(-r).exp(), 20, 8.0);
        text.push_str("9.0 oops\n");
        match parse_table(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 21),
            other => panic!("{other:?}"),
        }
        let text = "0 -1\n0 -1\n";
        match parse_table(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(parse_table(&rows(|_| -1.0, 8, 1.0)), Err(Error::Parse { .. })));
    }

    #[test]
    fn power_law_tail_is_recovered() {
        let radii: Vec<f64> = (0..40).map(|i| 0.5 * 1.2f64.powi(i)).collect();
        let values: Vec<f64> = radii.iter().map(|r| -r.powf(-4.5)).collect();
        let t = PotentialTable::new(radii.clone(), values).unwrap();
        assert!((t.tail().exponent - 4.5).abs() < 1e-12);
        assert!((t.head().exponent - 4.5).abs() < 1e-12);
        let r = 3.0 * radii[39];
        assert!((t.eval(r) + r.powf(-4.5)).abs() < 1e-12 * r.powf(-4.5));
        assert!(t.check_integrability().is_err());
    }
}
