//! Effective bounds: Chebotarev error terms, genus and class-number bounds,
//! Shafarevich ranks, the sizes of the auxiliary sets in the Schmidt
//! construction, defect budgets and the two special-case defect estimates.
//!
//! Every implicit constant is read from [`BoundConfig`] and echoed in each
//! [`BoundReport`]. Logarithms are natural in the number-field case and to
//! base `r` in the function-field case (pass `r` in the parameters).

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{big_omega, gcd, valuation};
use crate::error::{invalid, Error, Result};
use crate::places::{log_plus, Place};
use crate::towers::{grh_real_constant, real_constant, FieldCase, EULER_GAMMA};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConfig {
    #[serde(rename = "A0")]
    pub a0: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A3")]
    pub a3: f64,
    #[serde(rename = "A4")]
    pub a4: f64,
    #[serde(rename = "A5")]
    pub a5: f64,
    #[serde(rename = "A6")]
    pub a6: f64,
    #[serde(rename = "A7")]
    pub a7: f64,
    #[serde(rename = "A8")]
    pub a8: f64,
    #[serde(rename = "A9")]
    pub a9: f64,
    #[serde(rename = "A10")]
    pub a10: f64,
    #[serde(rename = "A11")]
    pub a11: f64,
    /// Base of the `a^Omega(N)` factor; must exceed 1.
    pub a: f64,
    pub c_f: f64,
    pub c_g: f64,
    /// Generic scale for statements of the form `X << Y`.
    pub c: f64,
    #[serde(rename = "A_sc")]
    pub a_sc: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            a0: 1.0,
            a1: 1.0,
            a2: 1.0,
            a3: 1.0,
            a4: 1.0,
            a5: 1.0,
            a6: 1.0,
            a7: 1.0,
            a8: 1.0,
            a9: 1.0,
            a10: 1.0,
            a11: 1.0,
            a: 2.0,
            c_f: 1.0,
            c_g: 1.0,
            c: 1.0,
            a_sc: 1.0,
        }
    }
}

impl BoundConfig {
    pub const KEYS: [&'static str; 17] = [
        "A0", "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "a", "c_f", "c_g", "c", "A_sc",
    ];

    pub fn validate(&self) -> Result<()> {
        for k in Self::KEYS {
            let v = self.get(k).unwrap();
            if !(v > 0.0) || !v.is_finite() {
                return invalid(format!("constant {k} must be positive, got {v}"));
            }
        }
        if !(self.a > 1.0) {
            return invalid(format!("constant a must exceed 1, got {}", self.a));
        }
        Ok(())
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "A0" => &mut self.a0,
            "A1" => &mut self.a1,
            "A2" => &mut self.a2,
            "A3" => &mut self.a3,
            "A4" => &mut self.a4,
            "A5" => &mut self.a5,
            "A6" => &mut self.a6,
            "A7" => &mut self.a7,
            "A8" => &mut self.a8,
            "A9" => &mut self.a9,
            "A10" => &mut self.a10,
            "A11" => &mut self.a11,
            "a" => &mut self.a,
            "c_f" => &mut self.c_f,
            "c_g" => &mut self.c_g,
            "c" => &mut self.c,
            "A_sc" => &mut self.a_sc,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.clone().slot(key).map(|v| *v)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        *self.slot(key).ok_or_else(|| Error::Invalid(format!("unknown constant `{key}`")))? = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, Value>,
    pub value: f64,
    pub formula: String,
    pub config: BoundConfig,
    /// Intermediate quantities and alternative forms.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extras: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(name: &str, p: &Params, value: f64, formula: &str, cfg: &BoundConfig) -> Result<Self> {
        if !value.is_finite() {
            return invalid(format!("{name}: bound is not finite"));
        }
        Ok(BoundReport {
            name: name.into(),
            inputs: p.0.iter().map(|(k, v)| (k.clone(), json!(v))).collect(),
            value,
            formula: formula.into(),
            config: cfg.clone(),
            extras: BTreeMap::new(),
            notes: Vec::new(),
        })
    }

    fn extra(mut self, k: &str, v: f64) -> Self {
        self.extras.insert(k.into(), v);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// `name,value,key=value;...`
    pub fn csv_row(&self) -> String {
        let inputs: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{},{},{}", self.name, self.value, inputs.join(";"))
    }

    pub const CSV_HEADER: &'static str = "name,value,inputs";
}

/// Named numeric parameters of a bound.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(pub BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn with(mut self, k: &str, v: f64) -> Self {
        self.0.insert(k.into(), v);
        self
    }

    pub fn get(&self, k: &str) -> Result<f64> {
        self.0.get(k).copied().ok_or_else(|| Error::Missing(k.into()))
    }

    pub fn get_or(&self, k: &str, default: f64) -> f64 {
        self.0.get(k).copied().unwrap_or(default)
    }

    pub fn opt(&self, k: &str) -> Option<f64> {
        self.0.get(k).copied()
    }

    fn nonnegative(&self) -> Result<()> {
        for (k, v) in &self.0 {
            if !(*v >= 0.0) || !v.is_finite() {
                return invalid(format!("parameter {k} must be a nonnegative number, got {v}"));
            }
        }
        Ok(())
    }

    /// `(log, delta_Q)`: natural log for number fields, `log_r` when `r` is given.
    fn logs(&self) -> Result<(Box<dyn Fn(f64) -> f64>, f64)> {
        match self.opt("r") {
            Some(r) if r >= 2.0 => Ok((Box::new(move |x: f64| x.ln() / r.ln()), 0.0)),
            Some(r) => invalid(format!("r = {r} is not a field size")),
            None => Ok((Box::new(|x: f64| x.ln()), 1.0)),
        }
    }
}

/// `Li(x) = int_2^x dt / log t`.
pub fn li(x: f64) -> f64 {
    fn li0(x: f64) -> f64 {
        let l = x.ln();
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..2000 {
            term *= l / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        EULER_GAMMA + l.ln() + sum
    }
    if x <= 2.0 {
        return 0.0;
    }
    li0(x) - li0(2.0)
}

fn class_ratio(p: &Params) -> Result<(f64, f64)> {
    if let Some(r) = p.opt("ratio") {
        return Ok((p.opt("C").unwrap_or(r), r));
    }
    let c = p.get("C")?;
    let g = p.get("G")?;
    if g <= 0.0 {
        return invalid("|G| must be positive");
    }
    Ok((c, c / g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChebotarevCase {
    Cn,
    CnGrh,
    Cf,
    LeastPrimeGrh,
    LeastPrimeCf,
    LeastPrimeUnconditional,
}

pub fn chebotarev_bound(case: ChebotarevCase, p: &Params, cfg: &BoundConfig) -> Result<BoundReport> {
    use ChebotarevCase::*;
    p.nonnegative()?;
    cfg.validate()?;
    match case {
        Cn => {
            let (c, ratio) = class_ratio(p)?;
            let x = p.get("x")?;
            let n_l = p.get("n_L")?;
            let g_l = p.get("g_L")?;
            let c_hat = p.get_or("C_hat", c);
            if c == 0.0 {
                return BoundReport::new("chebotarev-CN", p, 0.0, "empty class", cfg);
            }
            if !(n_l >= 1.0) || x < 2.0 {
                return invalid("need n_L >= 1 and x >= 2");
            }
            let mut v = cfg.a1 * c_hat * x * (-cfg.a2 * n_l.powf(-0.5) * x.ln().sqrt()).exp();
            let mut exc = 0.0;
            if let Some(rho) = p.opt("rho") {
                exc = ratio * li(x.powf(rho));
                v += exc;
            }
            let threshold = cfg.a0 * n_l * g_l * g_l;
            let mut r = BoundReport::new(
                "chebotarev-CN",
                p,
                v,
                "(|C|/|G|) Li(x^rho) + A1 |C^| x exp(-A2 n_L^(-1/2) log^(1/2) x)",
                cfg,
            )?
            .extra("exceptional_term", exc)
            .extra("log_x_threshold", threshold);
            if x.ln() < threshold {
                r = r.note(format!("log x = {} is below A0 n_L g_L^2 = {threshold}", x.ln()));
            }
            Ok(r)
        }
        CnGrh => {
            let (c, ratio) = class_ratio(p)?;
            let x = p.get("x")?;
            let n_l = p.get("n_L")?;
            let g_l = p.get("g_L")?;
            if x < 2.0 {
                return invalid("need x >= 2");
            }
            let v = if c == 0.0 { 0.0 } else { cfg.a3 * ratio * x.sqrt() * (2.0 * g_l + n_l * x.ln()) };
            BoundReport::new("chebotarev-CN-GRH", p, v, "A3 (|C|/|G|) x^(1/2) (2 g_L + n_L log x)", cfg)
        }
        Cf => {
            let (c, ratio) = class_ratio(p)?;
            let g_l = p.get("g_L")?;
            let g_k = p.get("g_K")?;
            let pi_d = p.get("piD")?;
            let r = p.get("r")?;
            let d = p.get("d")?;
            if d < 1.0 {
                return invalid("d must be at least 1");
            }
            let rd = r.powf(d / 2.0) / d;
            let v = if c == 0.0 {
                0.0
            } else {
                2.0 * g_l * ratio * rd + 2.0 * (2.0 * g_k + 1.0) * c * rd + (1.0 + c / d) * pi_d
            };
            BoundReport::new(
                "chebotarev-CF",
                p,
                v,
                "2 g_L (|C|/|G|) r^(d/2)/d + 2 (2 g_K + 1) |C| r^(d/2)/d + (1 + |C|/d) pi(D)",
                cfg,
            )
        }
        LeastPrimeGrh => {
            let s = p.get("S")?;
            let g_l = p.get("g_L")?;
            if g_l <= 0.0 {
                return Err(Error::Preconditions);
            }
            let v = 2.0 * cfg.a4 * ((1.0 + s).ln() + g_l.ln());
            BoundReport::new("least-prime-GRH", p, v, "log Np <= 2 A4 (log(1 + |S|) + log g_L)", cfg)
        }
        LeastPrimeCf => {
            let s = p.get("S")?;
            let g_l = p.get("g_L")?;
            let n = p.get("n")?;
            let m = p.get_or("m", 1.0);
            let (log, _) = p.logs()?;
            p.get("r")?;
            let inner = cfg.a4 * (log(1.0 + s) + log(n + g_l));
            let v = 2.0 * inner.max(m);
            BoundReport::new("least-prime-CF", p, v, "deg p <= 2 max(A4 (log(1 + |S|) + log([L:K] + g_L)), m)", cfg)
        }
        LeastPrimeUnconditional => {
            let g_l = p.get("g_L")?;
            BoundReport::new("least-prime-unconditional", p, cfg.a5 * g_l, "log Np <= A5 g_L", cfg)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenusCase {
    Lemma,
    LemmaGalois,
    GwExplicit,
    GwNormalized,
    AsFinal,
}

pub fn genus_bound(case: GenusCase, p: &Params, cfg: &BoundConfig) -> Result<BoundReport> {
    use GenusCase::*;
    cfg.validate()?;
    // g*_k may be -1 in the function-field case
    let mut q = p.clone();
    q.0.remove("gstar_k");
    q.nonnegative()?;
    let (log, dq) = p.logs()?;
    match case {
        Lemma | LemmaGalois => {
            let n = p.get("n")?;
            if n < 1.0 {
                return invalid("degree must be at least 1");
            }
            let gs = p.get("gstar_k")?;
            if gs < -1.0 {
                return invalid("g* is at least -1");
            }
            let pi_s = p.get("piS")?;
            let n_k = p.get_or("n_k", 1.0);
            let wild = if case == Lemma {
                dq / 2.0 * n_k * log(n)
            } else {
                let ell = p.get("ell")?;
                let v = valuation(n.round() as u64, ell.round() as u64) as f64;
                dq / 2.0 * n_k * v * log(ell)
            };
            let v = n * (gs + pi_s / 2.0 + wild);
            let (name, formula) = if case == Lemma {
                ("genus-lemma", "[K:k] (g*_k + pi(S)/2 + delta_Q n_k log[K:k] / 2)")
            } else {
                ("genus-lemma-galois", "[K:k] (g*_k + pi(S)/2 + delta_Q n_k v_l([K:k]) log l / 2)")
            };
            BoundReport::new(name, p, v, formula, cfg)
        }
        GwExplicit => {
            let a_t = p.get_or("aT", 1.0);
            let h = p.get("h")?;
            let ell = p.get("ell")?;
            let r1 = p.get_or("r1", 0.0);
            let r2 = p.get_or("r2", 0.0);
            let t = p.get("T")?;
            let i1 = p.get("I1")?;
            let gs = p.get("gstar_k")?;
            let pi_ti = p.get("piTI")?;
            let n_k = p.get_or("n_k", 1.0);
            if h < 1.0 || ell < 2.0 {
                return invalid("need h >= 1 and l >= 2");
            }
            let log_ell_h = h.ln() / ell.ln();
            let v = cfg.c
                * a_t
                * a_t
                * h
                * h
                * ell.powf(r1 + r2 + 1.0 + t + i1)
                * (gs + pi_ti / 2.0 + dq * log(ell) / 2.0 * n_k * (i1 + t + log_ell_h + r1 + r2));
            BoundReport::new(
                "genus-gw-explicit",
                p,
                v,
                "c a_T^2 h^2 l^(r1+r2+1+#T+#I1) (g*_k + pi(T u I1)/2 + delta_Q (log l / 2) n_k (#I1 + #T + log_l h + r1 + r2))",
                cfg,
            )
        }
        GwNormalized => {
            let g = p.get("g_k")?;
            let n_k = p.get_or("n_k", 1.0);
            let ell = p.get("ell")?;
            let t = p.get("T")?;
            let i1 = p.get("I1")?;
            let pi_ti = p.get("piTI")?;
            if n_k < 1.0 {
                return invalid("n_k must be at least 1");
            }
            let df = 1.0 - dq;
            let v = cfg.a7 * g / n_k
                + cfg.a8 * (log(ell) / n_k * (i1 + t + dq * n_k) + log_plus(pi_ti, E) / n_k)
                + df * ell * ell / n_k;
            BoundReport::new(
                "genus-gw-normalized",
                p,
                v,
                "A7 g_k/n_k + A8 (log l/n_k (#I1 + #T + delta_Q n_k) + log+ pi(T u I1)/n_k) + delta_F l^2/n_k",
                cfg,
            )
            .map(|r| r.note("value bounds g_K / n_K"))
        }
        AsFinal => {
            let pch = p.get("p")?;
            let g = p.get("g_k")?;
            let ti = p.get("TI")?;
            p.get("r")?;
            let v = pch * g + (pch - 1.0) * (2.0 * g + ti) * log(3.0 + 6.0 * g + ti);
            BoundReport::new("genus-as-final", p, v, "p g_k + (p - 1)(2 g_k + |T u I|) log_r(3 + 6 g_k + |T u I|)", cfg)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassNumberCase {
    #[serde(rename = "CN")]
    Cn,
    #[serde(rename = "CF")]
    Cf,
}

/// CN: `n_k`, `d` (absolute discriminant). CF: `r`, `g`.
pub fn class_number_bound(case: ClassNumberCase, p: &Params) -> Result<BoundReport> {
    p.nonnegative()?;
    let cfg = BoundConfig::default();
    match case {
        ClassNumberCase::Cn => {
            let n = p.get("n_k")?;
            let d = p.get("d")?;
            if n == 1.0 {
                if d == 1.0 {
                    return BoundReport::new("class-number-CN", p, 1.0, "h_Q = 1", &cfg);
                }
                return invalid("degree-1 number field other than Q");
            }
            if n < 2.0 || d <= 1.0 {
                return invalid("need n_k >= 2 and |d_k| > 1");
            }
            let v = 25.0 * (-0.46 * n).exp() * (E * d.ln() / (4.0 * (n - 1.0))).powf(n - 1.0) * d.sqrt();
            BoundReport::new(
                "class-number-CN",
                p,
                v,
                "25 exp(-0.46 n_k) (e log|d_k| / (4 (n_k - 1)))^(n_k - 1) sqrt|d_k|",
                &cfg,
            )
        }
        ClassNumberCase::Cf => {
            let r = p.get("r")?;
            let g = p.get("g")?;
            let v = (1.0 + r.sqrt()).powf(2.0 * g);
            BoundReport::new("class-number-CF", p, v, "(1 + sqrt r)^(2g)", &cfg)
        }
    }
}

/// `d_l(Cl^T) + r1 + r2 - 1 + #T + delta_l`.
pub fn shafarevich_dim(
    cl_t_dim: u32,
    r1: u32,
    r2: u32,
    card_t: u32,
    delta_ell: bool,
    function_field: bool,
) -> Result<u32> {
    if function_field && card_t == 0 {
        return Err(Error::Preconditions);
    }
    let v = cl_t_dim as i64 + r1 as i64 + r2 as i64 - 1 + card_t as i64 + delta_ell as i64;
    if v < 0 {
        return Err(Error::Preconditions);
    }
    Ok(v as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchmidtCase {
    #[serde(rename = "lemme1")]
    Lemme1,
    #[serde(rename = "lemme2")]
    Lemme2,
    #[serde(rename = "propS")]
    PropS,
    #[serde(rename = "coro-Q")]
    CoroQ,
    #[serde(rename = "S1exp")]
    S1Exp,
    #[serde(rename = "qst")]
    Qst,
}

impl std::str::FromStr for SchmidtCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(json!(s)).map_err(|_| Error::Parse(format!("unknown case `{s}`")))
    }
}

/// Parameter names: `T`, `I`, `P`, `TS` are cardinalities; `piT`, `piI`,
/// `piTS` are the log+ of norm sums; `normT`, `normP` are raw norm sums.
pub fn schmidt_pi_bounds(case: SchmidtCase, p: &Params, cfg: &BoundConfig) -> Result<BoundReport> {
    use SchmidtCase::*;
    p.nonnegative()?;
    cfg.validate()?;
    let (log, dq) = p.logs()?;
    let logp = |x: f64| if x >= 1.0 { log(x) } else { 0.0 };
    let checked_log = |x: f64| if x > 0.0 { Ok(log(x)) } else { Err(Error::Preconditions) };
    match case {
        Lemme1 => {
            let g = p.get("g")?;
            BoundReport::new("lemme1", p, cfg.a9 * g * g, "pi(T0) <= A9 g^2", cfg).map(|r| r.extra("T0_card", cfg.a6 * g))
        }
        Lemme2 => {
            let g = p.get("g")?;
            let r1 = p.get_or("r1", 0.0);
            let r2 = p.get_or("r2", 0.0);
            let pc = p.get("P")?;
            let norm_p = p.get("normP")?;
            let ell = p.get("ell")?;
            let n_k = p.get_or("n_k", 1.0);
            let de = p.get_or("delta_ell", 0.0);
            let dp = p.get_or("delta_P", 0.0);
            let q = (2.0 * (cfg.a6 * g + r1 + r2 + pc - 1.0 + de)).max(0.0);
            let inner = logp(pc) + log(ell) + checked_log(g + dq * n_k * log(ell) + norm_p)? + dp * ell;
            let v = cfg.a10 * q * inner;
            BoundReport::new(
                "lemme2",
                p,
                v,
                "pi(Q) <= A10 |Q| (log+|P| + log l + log(g + delta_Q n_k log l + pi(P)) + delta_P l)",
                cfg,
            )
            .map(|r| r.extra("Q_card", q))
        }
        PropS => {
            let g = p.get("g")?;
            let r1 = p.get_or("r1", 0.0);
            let r2 = p.get_or("r2", 0.0);
            let t = p.get("T")?;
            let norm_t = p.get("normT")?;
            let ell = p.get("ell")?;
            let n_k = p.get_or("n_k", 1.0);
            let h = p.get_or("h", 1.0);
            let de = p.get_or("delta", 0.0);
            let t_prime = t + cfg.a6 * g;
            let pi_t_prime = norm_t + cfg.a9 * g * g;
            let s0 = (2.0 * (h + r1 + r2 + t_prime - 1.0 + de)).max(0.0);
            let pi_s0 = cfg.a10
                * (cfg.a6 * g + r1 + r2 + t_prime - 1.0 + de).max(0.0)
                * (logp(t_prime) + log(ell) + checked_log(g + dq * n_k * log(ell) + pi_t_prime)?);
            let pi_s = cfg.c
                * (pi_s0
                    + s0 * s0 * log(ell)
                    + s0 * ((h + t_prime + r1 + r2 - 1.0) * log(ell) + logp(pi_t_prime + pi_s0) + logp(g)));
            let mut r = BoundReport::new(
                "propS",
                p,
                pi_s,
                "pi(S) <= c (pi(S0) + |S0|^2 log l + |S0| ((h + |T'| + r1 + r2 - 1) log l + pi'(T' u S0) + log+ g))",
                cfg,
            )?
            .extra("T0_card", cfg.a6 * g)
            .extra("piT0", cfg.a9 * g * g)
            .extra("S0_card", s0)
            .extra("piS0", pi_s0)
            .extra("S_card", 2.0 * s0);
            if p.opt("r").is_none() && g == 0.0 {
                // over Q the first display simplifies
                let raw = 2.0 * cfg.a10 * t * (logp(t) + log(ell) + checked_log(log(ell) + norm_t)?);
                r = r.extra("piS0_over_Q", raw).extra("piS0_over_Q_asymptotic", cfg.c * t * (logp(norm_t) + log(ell)));
            }
            Ok(r)
        }
        CoroQ => {
            let t = p.get("T")?;
            let pi_t = p.get("piT")?;
            let ell = p.get("ell")?;
            let v = cfg.a11 * (t * pi_t + t * t * log(ell));
            BoundReport::new("coro-Q", p, v, "pi(S) <= A11 (|T| pi'(T) + |T|^2 log l)", cfg).map(|r| r.extra("S_card", 4.0 * t))
        }
        S1Exp => {
            let ts = p.get("TS")?;
            let pi_ts = p.get("piTS")?;
            let ell = p.get("ell")?;
            let v = cfg.a11 * (ts * pi_ts + ts * ts * log(ell));
            BoundReport::new("S1exp", p, v, "pi(S0) <= A11 (|T u S| pi'(T u S) + |T u S|^2 log l)", cfg)
                .map(|r| r.extra("S0_card", 4.0 * ts))
        }
        Qst => {
            let t = p.get("T")?;
            let pi_t = p.get("piT")?;
            let i = p.get("I")?;
            let pi_i = p.get("piI")?;
            let ell = p.get("ell")?;
            let v = cfg.c * (t * (pi_t + logp(i) + logp(pi_i)) + pi_i + (t * t + i + 1.0) * log(ell));
            BoundReport::new(
                "qst",
                p,
                v,
                "pi(S) <= c (|T| (pi'(T) + log+|I| + log+ pi'(I)) + pi'(I) + (|T|^2 + |I| + 1) log l)",
                cfg,
            )
            .map(|r| r.extra("S_card", 4.0 * (t + 1.0) + 1.0))
        }
    }
}

/// One prescribed place with its list of residue degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrescribedPlace {
    pub place: Place,
    pub degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremABounds {
    pub h: f64,
    pub f: f64,
    pub g: f64,
    pub defect_bound: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub config: BoundConfig,
}

fn lcm_all(xs: impl Iterator<Item = u64>) -> Result<u64> {
    let mut acc = 1u64;
    for x in xs {
        acc = acc.checked_mul(x / gcd(acc, x)).ok_or_else(|| Error::Cap("lcm overflows u64".into()))?;
    }
    Ok(acc)
}

/// `h`, `f`, `g` and `1 - h/(f+g)` for prescribed places `P` with degree
/// lists `{d_ij}` (so `n_i` is the list length) avoiding `I`.
pub fn theorem_a_bounds(plan: &[PrescribedPlace], avoid: &[Place], cfg: &BoundConfig) -> Result<TheoremABounds> {
    cfg.validate()?;
    let places: Vec<&Place> = plan.iter().map(|x| &x.place).collect();
    {
        let mut all: Vec<&Place> = places.iter().copied().chain(avoid.iter()).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        if all.len() != n {
            return invalid("P and I must be disjoint sets of distinct places");
        }
    }
    let bases: Vec<_> = places.iter().copied().chain(avoid.iter()).map(|p| p.base()).collect();
    if bases.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::MixedBases);
    }
    if places.iter().chain(avoid.iter().collect::<Vec<_>>().iter()).any(|p| p.is_infinite()) {
        return invalid("prescribed and avoided places must be finite");
    }
    let cf_r = match bases.first() {
        Some(crate::places::Base::Function(r)) => Some(*r),
        _ => None,
    };
    for x in plan {
        if x.degrees.is_empty() || x.degrees.contains(&0) {
            return invalid("each place needs a nonempty list of positive degrees");
        }
        let mut d = x.degrees.clone();
        d.sort();
        d.dedup();
        if d.len() != x.degrees.len() {
            return invalid("degrees must be distinct for each place");
        }
    }
    let n2 = lcm_all(plan.iter().map(|x| x.degrees.len() as u64))?;
    let n1 = lcm_all(plan.iter().flat_map(|x| x.degrees.iter().map(|&d| d as u64)))?;
    let n = n1.checked_mul(n2).ok_or_else(|| Error::Cap("N overflows u64".into()))?;
    if let Some(r) = cf_r {
        if gcd(n, r as u64) != 1 {
            return invalid(format!("N = {n} is not coprime to r = {r}"));
        }
    }
    let (log, dq): (Box<dyn Fn(f64) -> f64>, f64) = match cf_r {
        Some(r) => (Box::new(move |x: f64| x.ln() / (r as f64).ln()), 0.0),
        None => (Box::new(|x: f64| x.ln()), 1.0),
    };
    let logp = |x: f64| if x >= 1.0 { log(x) } else { 0.0 };
    let mut h = 0.0;
    for x in plan {
        let norm = x.place.norm();
        let inner: f64 = x.degrees.iter().map(|&d| 1.0 / (norm.powf(d as f64 / 2.0) - 1.0)).sum();
        h += x.place.log_norm() / x.degrees.len() as f64 * inner;
    }
    h += dq * ((8.0 * PI).ln() + PI / 4.0 + EULER_GAMMA / 2.0);
    let pi_p: f64 = places.iter().map(|p| p.log_norm()).sum();
    let pi_i: f64 = avoid.iter().map(|p| p.log_norm()).sum();
    let (pp, pip) = (places.len() as f64, logp(pi_p));
    let ic = avoid.len() as f64;
    let pii = logp(pi_i);
    let df = 1.0 - dq;
    let omega = big_omega(n) as f64;
    let f = cfg.c_f * cfg.a.powf(omega) * ((1.0 + pp) * log(n as f64) + pip + df * (n as f64).powi(2));
    let a_p = places.iter().map(|p| p.degree() as u64).fold(0, gcd).max(1);
    let g = cfg.c_g
        * (pp * (pip + logp(ic) + logp(pii)) + pii + (pp * pp + ic + 1.0) * (1.0 + df * log(a_p as f64)));
    let defect_bound = if f + g > 0.0 { 1.0 - h / (f + g) } else { return Err(Error::Preconditions) };
    Ok(TheoremABounds { h, f, g, defect_bound, n, config: cfg.clone() })
}

/// Right side of the budget on `sum_D log Np / (sqrt Np - 1)` (or `Np - 1` in CN).
pub fn prop_b_budget(pi_s: f64, case: FieldCase) -> Result<f64> {
    if !(pi_s >= 0.0) {
        return invalid("pi(S) must be nonnegative");
    }
    Ok(match case {
        FieldCase::Cf => pi_s / 2.0,
        FieldCase::CnGrh => pi_s / 2.0 - grh_real_constant(),
        FieldCase::Cn => pi_s / 2.0 - real_constant(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    /// Bounds on `phi_inf`.
    pub lower: f64,
    pub upper: f64,
    /// Bounds on `g*/n`.
    pub gstar_lower: f64,
    pub gstar_upper: f64,
}

pub fn phi_infty_sandwich(pi_s: f64, case: FieldCase) -> Result<Sandwich> {
    if !(pi_s > 0.0) || !pi_s.is_finite() {
        return invalid("pi(S) must be positive");
    }
    let theta = if case == FieldCase::Cf { 1.0 } else { 0.0 };
    Ok(Sandwich {
        lower: 2.0 / pi_s,
        upper: 4.0 / pi_s,
        gstar_lower: pi_s / 4.0 - theta,
        gstar_upper: pi_s / 2.0 - theta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCheck {
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    #[serde(rename = "Y_bound_ok")]
    pub y_bound_ok: bool,
    /// First `k` with `Y_k` above the bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
}

/// Iterate `X_k = c (A k + k^2 log l + k log X_{k-1})` from `X_0 = 0` and
/// check `X_k / c <= 8 ((A + log c) k + k^2 log l)` for `1 <= k <= m`.
pub fn recurrence_check(a: f64, ell: f64, c: f64, m: usize) -> Result<RecurrenceCheck> {
    if !(a >= 2.0 * 3f64.ln() - 1e-12) {
        return Err(Error::Preconditions);
    }
    if !(ell >= 2.0) || !(c > 0.0) {
        return invalid("need l >= 2 and c > 0");
    }
    let b = a + c.ln();
    let mut xs = Vec::with_capacity(m);
    let mut prev = 0.0f64;
    let mut first_failure = None;
    for k in 1..=m {
        let kf = k as f64;
        let tail = if prev > 0.0 { kf * prev.ln() } else { 0.0 };
        let x = c * (a * kf + kf * kf * ell.ln() + tail);
        if first_failure.is_none() && x / c > 8.0 * (b * kf + kf * kf * ell.ln()) {
            first_failure = Some(k);
        }
        xs.push(x);
        prev = x;
    }
    Ok(RecurrenceCheck { x: xs, y_bound_ok: first_failure.is_none(), first_failure })
}

/// Largest sieve bound accepted by [`prime_analytics`].
pub const SIEVE_CAP: u64 = 100_000_000;

pub fn primes_up_to(x: u64) -> Result<Vec<u64>> {
    if x > SIEVE_CAP {
        return Err(Error::Cap(format!("sieve bound {x} exceeds {SIEVE_CAP}")));
    }
    let n = x as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    Ok(out)
}

pub fn nth_prime(n: u64) -> Result<u64> {
    if n == 0 {
        return invalid("primes are indexed from 1");
    }
    let nf = n as f64;
    let bound = if n < 6 { 13 } else { (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 1 };
    Ok(primes_up_to(bound)?[n as usize - 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeKind {
    Theta,
    NthPrime,
    #[serde(rename = "S_n")]
    SN,
    Omega,
    OmegaLcm,
    VarthetaRatio,
}

impl std::str::FromStr for PrimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(json!(s)).map_err(|_| Error::Parse(format!("unknown kind `{s}`")))
    }
}

/// Chebyshev's `theta(x) = sum_{p <= x} log p`.
pub fn theta(x: u64) -> Result<f64> {
    Ok(primes_up_to(x)?.iter().map(|&p| (p as f64).ln()).sum())
}

/// `S_n = sum_{p <= p_n} log p / (sqrt p - 1)`.
pub fn s_n(n: u64) -> Result<f64> {
    let pn = nth_prime(n)?;
    Ok(primes_up_to(pn)?.iter().map(|&p| (p as f64).ln() / ((p as f64).sqrt() - 1.0)).sum())
}

/// `Omega(lcm(1, ..., n))`.
pub fn omega_lcm(n: u64) -> Result<u64> {
    Ok(primes_up_to(n)?
        .iter()
        .map(|&p| {
            let mut m = 0;
            let mut q = p;
            while q <= n {
                m += 1;
                q = match q.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            m
        })
        .sum())
}

/// Integer-valued kinds come back as exact floats.
pub fn prime_analytics(kind: PrimeKind, arg: u64) -> Result<f64> {
    if arg < 1 {
        return invalid("argument must be at least 1");
    }
    match kind {
        PrimeKind::Theta => theta(arg),
        PrimeKind::NthPrime => nth_prime(arg).map(|p| p as f64),
        PrimeKind::SN => s_n(arg),
        PrimeKind::Omega => Ok(big_omega(arg) as f64),
        PrimeKind::OmegaLcm => omega_lcm(arg).map(|v| v as f64),
        PrimeKind::VarthetaRatio => Ok(theta(arg)? / arg as f64),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialCase {
    NSmallestPrimes,
    OnePrimeNDegrees,
}

/// Both special-case defect estimates; `value` is the exact intermediate
/// bound, `extras.asymptotic` the form with `c` and `A_sc`.
pub fn special_case_defect(case: SpecialCase, p: &Params, cfg: &BoundConfig) -> Result<BoundReport> {
    p.nonnegative()?;
    cfg.validate()?;
    let n = p.get("n")?;
    if n < 2.0 || n.fract() != 0.0 {
        return Err(Error::Preconditions);
    }
    let ni = n as u64;
    match case {
        SpecialCase::NSmallestPrimes => {
            let sn = s_n(ni)?;
            let (pi_s, derived) = match p.opt("piS") {
                Some(v) => (v, false),
                None => {
                    let pi_t = theta(nth_prime(ni)?)?;
                    (cfg.c * (n * log_plus(pi_t, E) + (n * n + 1.0) * 3f64.ln()), true)
                }
            };
            if pi_s <= 0.0 {
                return Err(Error::Preconditions);
            }
            let exact = 1.0 - 2.0 / pi_s * (sn + grh_real_constant());
            let asym = 1.0 - cfg.c * n.powf(-1.5) * n.ln().sqrt();
            let mut r = BoundReport::new(
                "n-smallest-primes",
                p,
                exact,
                "1 - (2/pi(S)) (S_n + log sqrt(8 pi) + pi/4 + gamma/2); asymptotic 1 - c n^(-3/2) sqrt(log n)",
                cfg,
            )?
            .extra("S_n", sn)
            .extra("piS", pi_s)
            .extra("asymptotic", asym);
            if derived {
                r = r.note("pi(S) derived as c (n log+ theta(p_n) + (n^2 + 1) log 3)");
            }
            Ok(r)
        }
        SpecialCase::OnePrimeNDegrees => {
            let pr = p.get("p")?;
            if pr < 3.0 {
                return Err(Error::Preconditions);
            }
            let lnln_p = pr.ln().ln();
            let h = pr.ln() / (n * pr.sqrt()) + (8.0 * PI).ln() + PI / 4.0 + EULER_GAMMA / 2.0;
            // N = n lcm(1..n)
            let omega = big_omega(ni) as u64 + omega_lcm(ni)?;
            let f = cfg.c_f * cfg.a.powf(omega as f64) * (n * n.ln() + lnln_p);
            let g = cfg.c_g * lnln_p;
            let exact = 1.0 - h / (f + g);
            let asym = 1.0 - cfg.c / (cfg.a_sc.powf(n / n.ln()) * (n * n.ln() + lnln_p));
            BoundReport::new(
                "one-prime-n-degrees",
                p,
                exact,
                "1 - h(p,n)/(f(p,n) + g(p)); asymptotic 1 - c / (A^(n/log n) (n log n + log log p))",
                cfg,
            )
            .map(|r| r.extra("h", h).extra("f", f).extra("g", g).extra("asymptotic", asym))
        }
    }
}

/// `h = P(1)` for a curve of genus 1 or 2 over F_r from its point counts
/// `N_1` (and `N_2` for genus 2).
pub fn class_number_from_counts(r: u64, g: u32, n1: u64, n2: Option<u64>) -> Result<i64> {
    let (r, n1) = (r as i64, n1 as i64);
    let a1 = n1 - r - 1;
    match g {
        0 => Ok(1),
        1 => Ok(n1),
        2 => {
            let n2 = n2.ok_or_else(|| Error::Missing("N_2".into()))? as i64;
            let a2 = (n2 - r * r - 1 + a1 * a1) / 2;
            // L(u) = 1 + a1 u + a2 u^2 + r a1 u^3 + r^2 u^4
            Ok(1 + a1 + a2 + r * a1 + r * r)
        }
        _ => invalid("point-count class numbers implemented for genus <= 2"),
    }
}
