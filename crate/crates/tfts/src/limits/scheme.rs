use crate::error::{domain, invalid, Result};
use crate::specfun::{gamma, lower_gamma_value, upper_gamma_value};
use serde::{Deserialize, Serialize};

/// Coefficients of the moving-average partial sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    /// C_j = j^{α−1} e^{−λj/n}/Γ(α) for j ≥ 1, zero otherwise.
    PowerLaw,
    /// ω_j = Γ(j+α)/(Γ(α) j!) e^{−λj/n} for j ≥ 0.
    Artfima,
}

impl std::str::FromStr for CoeffKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" | "power_law" => Ok(CoeffKind::PowerLaw),
            "artfima" => Ok(CoeffKind::Artfima),
            _ => Err(invalid(format!("unknown coefficient kind '{s}' (power or artfima)"))),
        }
    }
}

/// Relative ℓ² tail left after truncation.
const L2_TAIL: f64 = 1e-16;
/// ξ_m is dropped once its bound falls below this fraction of max |ξ|.
const XI_FLOOR: f64 = 1e-12;

/// Double-double accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn add(self, x: f64) -> Dd {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        let lo = self.lo + err;
        let hi = s + lo;
        Dd { hi, lo: lo - (hi - s) }
    }

    fn sub(self, o: Dd) -> f64 {
        (self.hi - o.hi) + (self.lo - o.lo)
    }
}

/// Coefficients c_0 … c_J at tempering λ/n together with their prefix sums.
#[derive(Debug, Clone)]
pub struct PartialSumScheme {
    pub alpha: f64,
    pub lambda: f64,
    pub n: usize,
    pub kind: CoeffKind,
    coeffs: Vec<f64>,
    prefix: Vec<Dd>,
}

/// ξ_m(t) for m = m_lo, m_lo + 1, ….
#[derive(Debug, Clone, PartialEq)]
pub struct XiTable {
    pub m_lo: i64,
    pub values: Vec<f64>,
}

impl XiTable {
    pub fn m_hi(&self) -> i64 {
        self.m_lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, m: i64) -> f64 {
        if m < self.m_lo || m > self.m_hi() {
            0.0
        } else {
            self.values[(m - self.m_lo) as usize]
        }
    }
}

impl PartialSumScheme {
    pub fn new(alpha: f64, lambda: f64, n: usize, kind: CoeffKind) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("need α > 0 and λ > 0, got α = {alpha}, λ = {lambda}")));
        }
        if n == 0 {
            return Err(domain("the scale n must be at least 1"));
        }
        let l = lambda / n as f64;
        let decay = (-l).exp();
        let g = gamma(alpha);
        let mut coeffs = vec![match kind {
            CoeffKind::PowerLaw => 0.0,
            CoeffKind::Artfima => 1.0,
        }];
        let mut mass = coeffs[0] * coeffs[0];
        let mut prev = coeffs[0];
        for j in 1usize.. {
            let jf = j as f64;
            let c = match kind {
                CoeffKind::PowerLaw => jf.powf(alpha - 1.0) * (-l * jf).exp() / g,
                CoeffKind::Artfima => prev * (jf - 1.0 + alpha) / jf * decay,
            };
            coeffs.push(c);
            mass += c * c;
            prev = c;
            // Successive ratios never exceed max(current ratio, e^{−λ/n}).
            let next = match kind {
                CoeffKind::PowerLaw => ((jf + 1.0) / jf).powf(alpha - 1.0),
                CoeffKind::Artfima => (jf + alpha) / (jf + 1.0),
            };
            let rho = (next * decay).max(decay);
            if rho < 1.0 && c * c * rho * rho / (1.0 - rho * rho) <= L2_TAIL * mass {
                break;
            }
            if c == 0.0 {
                break;
            }
        }
        let mut prefix = Vec::with_capacity(coeffs.len() + 1);
        let mut acc = Dd::default();
        prefix.push(acc);
        for &c in &coeffs {
            acc = acc.add(c);
            prefix.push(acc);
        }
        Ok(PartialSumScheme { alpha, lambda, n, kind, coeffs, prefix })
    }

    pub fn h(&self) -> f64 {
        self.alpha + 0.5
    }

    /// λ/n.
    pub fn tempering(&self) -> f64 {
        self.lambda / self.n as f64
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, j: i64) -> f64 {
        if j < 0 || j as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[j as usize]
        }
    }

    /// Σ_{j=lo}^{hi} c_j.
    fn window(&self, lo: i64, hi: i64) -> f64 {
        let lo = lo.max(0);
        let hi = hi.min(self.truncation() as i64);
        if hi < lo {
            0.0
        } else {
            self.prefix[hi as usize + 1].sub(self.prefix[lo as usize])
        }
    }

    /// n·t split into integer and fractional parts, snapping values within
    /// 1e-9 of an integer.
    fn split(&self, t: f64) -> (i64, f64) {
        let s = self.n as f64 * t;
        let r = s.round();
        if (s - r).abs() <= 1e-9 * s.max(1.0) {
            (r as i64, 0.0)
        } else {
            (s.floor() as i64, s - s.floor())
        }
    }

    /// ξ_m(nt) = Σ_{j=1−m}^{[nt]−m} c_j + (nt − [nt]) c_{[nt]+1−m}.
    pub fn xi_m(&self, t: f64, m: i64) -> f64 {
        let (k, frac) = self.split(t);
        let mut v = self.window(1 - m, k - m);
        if frac > 0.0 {
            v += frac * self.coefficient(k + 1 - m);
        }
        v
    }

    /// Continuum approximation (n/λ)^α [γ(α, (λ/n)([nt]−m)) − γ(α, −(λ/n)m)]/Γ(α) for m < 0.
    pub fn xi_m_gamma(&self, t: f64, m: i64) -> Result<f64> {
        if m >= 0 {
            return Err(domain(format!("the incomplete-gamma form needs m < 0, got {m}")));
        }
        let (k, _) = self.split(t);
        let l = self.tempering();
        let (x1, x2) = (-l * m as f64, l * (k - m) as f64);
        let a = self.alpha;
        let diff = if x1 > a + 1.0 {
            upper_gamma_value(a, x1) - upper_gamma_value(a, x2)
        } else {
            lower_gamma_value(a, x2) - lower_gamma_value(a, x1)
        };
        Ok((1.0 / l).powf(a) * diff / gamma(a))
    }

    /// Upper bound on c_j over all j ≥ j0 ≥ 1.
    fn coeff_sup_from(&self, j0: i64) -> f64 {
        let peak = match self.kind {
            CoeffKind::PowerLaw => ((self.alpha - 1.0) / self.tempering()).max(1.0),
            CoeffKind::Artfima => ((self.alpha - 1.0) / (1.0 - (-self.tempering()).exp())).max(1.0),
        }
        .ceil() as i64
            + 1;
        if j0 >= peak {
            self.coefficient(j0)
        } else {
            f64::INFINITY
        }
    }

    /// All nonnegligible ξ_m(nt): m runs from the point where the tempered
    /// tail bound ([nt]+1)·sup_{j≥|m|} c_j drops below 1e-12·max|ξ| (or the
    /// truncation) up to [nt] + 1.
    pub fn xi_table(&self, t: f64) -> Result<XiTable> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(format!("need t ≥ 0, got {t}")));
        }
        let (k, _) = self.split(t);
        let m_hi = k + 1;
        let mut rev = Vec::new();
        let mut max_abs = 0.0f64;
        let floor = -(self.truncation() as i64);
        let mut m = m_hi;
        while m >= floor {
            let v = self.xi_m(t, m);
            max_abs = max_abs.max(v.abs());
            rev.push(v);
            if m <= 0 && (k + 1) as f64 * self.coeff_sup_from(-m + 1) < XI_FLOOR * max_abs {
                break;
            }
            m -= 1;
        }
        let m_lo = m_hi - rev.len() as i64 + 1;
        rev.reverse();
        Ok(XiTable { m_lo, values: rev })
    }
}

/// Σ_m a_m b_m over the union of two tables, in increasing m.
pub fn xi_dot(a: &XiTable, b: &XiTable) -> f64 {
    let lo = a.m_lo.max(b.m_lo);
    let hi = a.m_hi().min(b.m_hi());
    let mut s = 0.0;
    let mut c = 0.0;
    for m in lo..=hi {
        let y = a.get(m) * b.get(m) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Elementwise a − b on the union of the two index ranges.
pub fn xi_diff(a: &XiTable, b: &XiTable) -> XiTable {
    let lo = a.m_lo.min(b.m_lo);
    let hi = a.m_hi().max(b.m_hi());
    XiTable { m_lo: lo, values: (lo..=hi).map(|m| a.get(m) - b.get(m)).collect() }
}
