use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent used by the anytime schedule `floor(t^e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaExponent {
    /// `β / 2`
    Half,
    /// `β / (β + 2)`
    #[default]
    Ratio,
    /// `β / (β + 1)`
    RatioPlusOne,
}

impl BetaExponent {
    fn value(self, beta: f64) -> f64 {
        match self {
            BetaExponent::Half => beta / 2.0,
            BetaExponent::Ratio => beta / (beta + 2.0),
            BetaExponent::RatioPlusOne => beta / (beta + 1.0),
        }
    }
}

/// Candidate-set size as a function of the round `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSchedule {
    /// `ceil(t^α e^{-t})`, capped at `k_max`.
    Literal { alpha: f64, k_max: usize },
    /// `t^α e^{-t/τ}` rescaled so the peak at `t = ατ` equals `k_max`, then `ceil`.
    ScaledUnimodal { alpha: f64, tau: f64, k_max: usize },
    /// `floor(t^e)` with `e` from [`BetaExponent`], capped at `k_max`.
    AnytimeBeta {
        beta: f64,
        exponent: BetaExponent,
        k_max: usize,
    },
    Fixed { k: usize },
}

impl Default for KSchedule {
    fn default() -> Self {
        KSchedule::ScaledUnimodal {
            alpha: 2.0,
            tau: 50.0,
            k_max: 250,
        }
    }
}

impl KSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::config(format!("k-schedule {self}: {m}")));
        match *self {
            KSchedule::Literal { alpha, k_max } => {
                if !(alpha >= 1.0 && alpha.is_finite()) {
                    return bad("alpha must be >= 1");
                }
                if k_max == 0 {
                    return bad("kmax must be positive");
                }
            }
            KSchedule::ScaledUnimodal { alpha, tau, k_max } => {
                if !(alpha >= 1.0 && alpha.is_finite()) {
                    return bad("alpha must be >= 1");
                }
                if !(tau > 0.0 && tau.is_finite()) {
                    return bad("tau must be positive");
                }
                if k_max == 0 {
                    return bad("kmax must be positive");
                }
            }
            KSchedule::AnytimeBeta { beta, k_max, .. } => {
                if !(beta > 0.0 && beta <= 2.0) {
                    return bad("beta must lie in (0, 2]");
                }
                if k_max == 0 {
                    return bad("kmax must be positive");
                }
            }
            KSchedule::Fixed { k } => {
                if k == 0 {
                    return bad("k must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn k_max(&self) -> usize {
        match *self {
            KSchedule::Literal { k_max, .. }
            | KSchedule::ScaledUnimodal { k_max, .. }
            | KSchedule::AnytimeBeta { k_max, .. } => k_max,
            KSchedule::Fixed { k } => k,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, KSchedule::Fixed { .. })
    }

    /// `k_t` for round `t` (rounds start at 1; `t = 0` is treated as 1).
    pub fn k_at(&self, t: u64) -> usize {
        let t = t.max(1) as f64;
        let cap = |x: f64, k_max: usize| {
            if x.is_nan() || x <= 0.0 {
                0
            } else if x >= k_max as f64 {
                k_max
            } else {
                x as usize
            }
        };
        match *self {
            KSchedule::Literal { alpha, k_max } => cap((alpha * t.ln() - t).exp().ceil(), k_max),
            KSchedule::ScaledUnimodal { alpha, tau, k_max } => {
                let peak = alpha * tau;
                let log_k = alpha * t.ln() - t / tau + (k_max as f64).ln() - alpha * peak.ln() + alpha;
                cap(log_k.exp().ceil(), k_max)
            }
            KSchedule::AnytimeBeta { beta, exponent, k_max } => {
                let x = t.powf(exponent.value(beta));
                // absorb rounding just below an exact integer
                cap((x * (1.0 + 1e-12)).floor(), k_max)
            }
            KSchedule::Fixed { k } => k,
        }
    }
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KSchedule::Literal { alpha, k_max } => write!(f, "exact:alpha={alpha},kmax={k_max}"),
            KSchedule::ScaledUnimodal { alpha, tau, k_max } => {
                write!(f, "scaled:alpha={alpha},tau={tau},kmax={k_max}")
            }
            KSchedule::AnytimeBeta { beta, exponent, k_max } => {
                let e = match exponent {
                    BetaExponent::Half => "half",
                    BetaExponent::Ratio => "ratio",
                    BetaExponent::RatioPlusOne => "ratio1",
                };
                write!(f, "anytime:beta={beta},exponent={e},kmax={k_max}")
            }
            KSchedule::Fixed { k } => write!(f, "fixed:{k}"),
        }
    }
}

/// Parses `fixed:250`, `exact:alpha=2,kmax=500`, `scaled:alpha=2,tau=50,kmax=250`
/// or `anytime:beta=1,exponent=ratio,kmax=500`. Omitted keys take defaults.
impl FromStr for KSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let bad = |m: String| Error::config(format!("k-schedule {s:?}: {m}"));
        let mut alpha = 2.0;
        let mut tau = 50.0;
        let mut beta = 1.0;
        let mut exponent = BetaExponent::default();
        let mut k_max = 250usize;

        if kind.trim() == "fixed" {
            let k = rest.trim().trim_start_matches("k=").parse().map_err(|e| bad(format!("{e}")))?;
            let sched = KSchedule::Fixed { k };
            sched.validate()?;
            return Ok(sched);
        }
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, val) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
            let num = || val.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            match key.trim() {
                "alpha" => alpha = num()?,
                "tau" => tau = num()?,
                "beta" => beta = num()?,
                "kmax" | "k_max" => k_max = val.parse().map_err(|e| bad(format!("{key}: {e}")))?,
                "exponent" => {
                    exponent = match val {
                        "half" => BetaExponent::Half,
                        "ratio" => BetaExponent::Ratio,
                        "ratio1" => BetaExponent::RatioPlusOne,
                        other => return Err(bad(format!("unknown exponent {other:?}"))),
                    }
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let sched = match kind.trim() {
            "exact" => KSchedule::Literal { alpha, k_max },
            "scaled" => KSchedule::ScaledUnimodal { alpha, tau, k_max },
            "anytime" => KSchedule::AnytimeBeta { beta, exponent, k_max },
            other => return Err(bad(format!("unknown schedule {other:?}"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}
