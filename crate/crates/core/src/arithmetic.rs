//! Continued-fraction arithmetic for frequencies `ω ∈ (0, 1)`.
//!
//! A [`Frequency`] is defined by its continued-fraction coefficients
//! `ω = [0; a_1, a_2, …]`, stored as a finite prefix plus an optional
//! periodic tail. Convergents `p_n/q_n` are exact big integers; the `f64`
//! value is a derived view.

use std::borrow::Cow;
use std::f64::consts::LN_2;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Stages with `q_n` below this are treated as transient by [`Frequency::beta`].
pub const BETA_STAGE_FLOOR: u64 = 100;
/// Default bit budget for a single Liouville coefficient.
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;
/// Stages used for the β proxy by downstream modules.
pub const BETA_PROXY_STAGES: usize = 30;

/// The `n`-th convergent `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigUint,
    pub q: BigUint,
}

/// An irrational (or, when the expansion is finite, rational) frequency.
#[derive(Clone, Debug)]
pub struct Frequency {
    prefix: Vec<BigUint>,
    repeat: Vec<BigUint>,
    note: String,
    value: f64,
}

impl PartialEq for Frequency {
    fn eq(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.repeat == other.repeat
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0; ")?;
        for (i, a) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if a.bits() > 64 {
                write!(f, "<{} bits>", a.bits())?;
            } else {
                write!(f, "{a}")?;
            }
        }
        if !self.repeat.is_empty() {
            let tail: Vec<String> = self.repeat.iter().map(|a| a.to_string()).collect();
            if !self.prefix.is_empty() {
                write!(f, ", ")?;
            }
            write!(f, "({})…", tail.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Frequency {
    /// Builds `[0; prefix…, (repeat…)…]`. All coefficients must be positive.
    pub fn from_parts(
        prefix: Vec<BigUint>,
        repeat: Vec<BigUint>,
        note: impl Into<String>,
    ) -> Result<Frequency> {
        if prefix.is_empty() && repeat.is_empty() {
            return Err(Error::Precondition(
                "continued fraction needs at least one coefficient".into(),
            ));
        }
        if prefix.iter().chain(repeat.iter()).any(|a| a.is_zero()) {
            return Err(Error::Precondition(
                "continued-fraction coefficients must be positive".into(),
            ));
        }
        let mut freq = Frequency {
            prefix,
            repeat,
            note: note.into(),
            value: 0.0,
        };
        freq.value = freq.compute_value();
        Ok(freq)
    }

    /// Finite expansion `[0; a_1, …, a_n]` (a rational number).
    pub fn from_cf(coeffs: &[u64]) -> Result<Frequency> {
        Frequency::from_parts(
            coeffs.iter().map(|&a| BigUint::from(a)).collect(),
            Vec::new(),
            "",
        )
    }

    /// Eventually periodic expansion `[0; prefix, (repeat)…]`.
    pub fn periodic(prefix: &[u64], repeat: &[u64]) -> Result<Frequency> {
        if repeat.is_empty() {
            return Err(Error::Precondition(
                "periodic tail must be non-empty".into(),
            ));
        }
        Frequency::from_parts(
            prefix.iter().map(|&a| BigUint::from(a)).collect(),
            repeat.iter().map(|&a| BigUint::from(a)).collect(),
            "",
        )
    }

    /// Golden mean `(√5 − 1)/2 = [0; 1, 1, 1, …]`.
    pub fn golden() -> Frequency {
        Frequency::periodic(&[], &[1])
            .expect("valid")
            .with_note("golden mean")
    }

    /// `√2 − 1 = [0; 2, 2, 2, …]`.
    pub fn silver() -> Frequency {
        Frequency::periodic(&[], &[2])
            .expect("valid")
            .with_note("sqrt(2)-1")
    }

    /// Continued fraction of a float, at most `max_terms` coefficients.
    /// Only the first ~40 bits of the expansion are meaningful.
    pub fn from_value(x: f64, max_terms: usize) -> Result<Frequency> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!(
                "frequency value must lie in (0,1), got {x}"
            )));
        }
        let mut coeffs = Vec::new();
        let mut r = x;
        for _ in 0..max_terms.max(1) {
            let inv = 1.0 / r;
            let a = inv.floor();
            if !a.is_finite() || a > 1e15 {
                break;
            }
            coeffs.push(a as u64);
            r = inv - a;
            if r < 1e-12 {
                break;
            }
        }
        Frequency::from_cf(&coeffs)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Frequency {
        self.note = note.into();
        self
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn repeat(&self) -> &[BigUint] {
        &self.repeat
    }

    /// True for a finite expansion.
    pub fn is_rational(&self) -> bool {
        self.repeat.is_empty()
    }

    /// Number of coefficients available (`None` when the tail repeats forever).
    pub fn available_terms(&self) -> Option<usize> {
        if self.repeat.is_empty() {
            Some(self.prefix.len())
        } else {
            None
        }
    }

    /// `a_n`, 1-based.
    pub fn coefficient(&self, n: usize) -> Option<Cow<'_, BigUint>> {
        if n == 0 {
            return None;
        }
        let i = n - 1;
        if i < self.prefix.len() {
            Some(Cow::Borrowed(&self.prefix[i]))
        } else if self.repeat.is_empty() {
            None
        } else {
            let j = (i - self.prefix.len()) % self.repeat.len();
            Some(Cow::Borrowed(&self.repeat[j]))
        }
    }

    /// The first `n` coefficients as a finite frequency `p_n/q_n`.
    pub fn truncated(&self, n: usize) -> Result<Frequency> {
        let coeffs = (1..=n)
            .map(|i| {
                self.coefficient(i).map(|c| c.into_owned()).ok_or_else(|| {
                    Error::InsufficientData(format!("only {} coefficients available", i - 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Frequency::from_parts(coeffs, Vec::new(), format!("convergent {n}"))
    }

    fn convergent_iter(&self) -> ConvergentIter<'_> {
        ConvergentIter {
            freq: self,
            n: 0,
            p_prev: BigUint::one(),
            q_prev: BigUint::zero(),
            p: BigUint::zero(),
            q: BigUint::one(),
        }
    }

    /// `(p_1, q_1), …, (p_{n_max}, q_{n_max})` by the recurrence
    /// `q_{n+1} = a_{n+1} q_n + q_{n-1}`, `q_0 = 1`, `q_{-1} = 0`.
    pub fn convergents(&self, n_max: usize) -> Result<Vec<Convergent>> {
        let out: Vec<Convergent> = self.convergent_iter().take(n_max).collect();
        if out.len() < n_max {
            return Err(Error::InsufficientData(format!(
                "requested {n_max} convergents but the expansion has {} coefficients",
                out.len()
            )));
        }
        Ok(out)
    }

    /// Derived floating-point value.
    pub fn value(&self) -> f64 {
        self.value
    }

    fn compute_value(&self) -> f64 {
        let target_bits = 70;
        let mut last = Convergent {
            p: BigUint::zero(),
            q: BigUint::one(),
        };
        for c in self.convergent_iter() {
            let done = c.q.bits() >= target_bits;
            last = c;
            if done {
                break;
            }
        }
        ratio_to_f64(&last.p, &last.q)
    }

    /// Finite-stage proxy for `β(ω) = limsup (log q_{n+1})/q_n`.
    ///
    /// `value` is the running max of `log(q_{n+1})/q_n` over `1 ≤ n < n_max`,
    /// restricted to stages with `q_n ≥` [`BETA_STAGE_FLOOR`]; `tail` is the
    /// last ratio `log(q_{n_max})/q_{n_max-1}`.
    pub fn beta(&self, n_max: usize) -> Result<BetaEstimate> {
        if n_max < 3 {
            return Err(Error::Precondition(format!(
                "beta needs n_max ≥ 3, got {n_max}"
            )));
        }
        let conv = self.convergents(n_max)?;
        let floor = BigUint::from(BETA_STAGE_FLOOR);
        let mut value: f64 = 0.0;
        let mut stages = 0;
        let ratio = |n: usize| ln_big(&conv[n].q) / big_to_f64(&conv[n - 1].q);
        // conv[i] holds stage i+1
        for n in 1..n_max {
            if conv[n - 1].q >= floor {
                value = value.max(ratio(n));
                stages += 1;
            }
        }
        Ok(BetaEstimate {
            value,
            tail: ratio(n_max - 1),
            stages_counted: stages,
            n_max,
            rational: self.is_rational(),
        })
    }

    /// β proxy with the default stage count, shortened for finite expansions.
    pub fn beta_proxy(&self) -> Result<BetaEstimate> {
        let n = match self.available_terms() {
            Some(len) => len.min(BETA_PROXY_STAGES),
            None => BETA_PROXY_STAGES,
        };
        self.beta(n.max(3))
    }

    /// Distance `‖nω‖` to the nearest integer, computed exactly from a
    /// convergent with `q_N ≥ n·2^70` (or the exact rational).
    pub fn dist_to_int(&self, n: u64) -> f64 {
        DistanceOracle::new(self, n).dist(n)
    }

    /// Convergent denominator closest to `|k|`.
    pub fn nearest_convergent_q(&self, k: i64) -> u64 {
        let target = k.unsigned_abs();
        let mut best = 1u64;
        for c in self.convergent_iter() {
            let q = c.q.to_u64().unwrap_or(u64::MAX);
            if q.abs_diff(target) < best.abs_diff(target) {
                best = q;
            }
            if q > target.saturating_mul(2) {
                break;
            }
        }
        best
    }
}

struct ConvergentIter<'a> {
    freq: &'a Frequency,
    n: usize,
    p_prev: BigUint,
    q_prev: BigUint,
    p: BigUint,
    q: BigUint,
}

impl Iterator for ConvergentIter<'_> {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let a = self.freq.coefficient(self.n + 1)?;
        let p_next = a.as_ref() * &self.p + &self.p_prev;
        let q_next = a.as_ref() * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p_next);
        self.q_prev = std::mem::replace(&mut self.q, q_next);
        self.n += 1;
        Some(Convergent {
            p: self.p.clone(),
            q: self.q.clone(),
        })
    }
}

/// Result of [`Frequency::beta`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaEstimate {
    /// Running max over the counted stages; a lower proxy for the limsup.
    pub value: f64,
    /// `log(q_{n_max})/q_{n_max-1}`.
    pub tail: f64,
    pub stages_counted: usize,
    pub n_max: usize,
    /// Finite expansion: β is undefined for rationals, the numbers are only stage data.
    pub rational: bool,
}

/// `(κ, τ)` of the Diophantine condition `‖nω‖ ≥ κ/|n|^τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineParams {
    kappa: f64,
    tau: f64,
}

impl DiophantineParams {
    pub fn new(kappa: f64, tau: f64) -> Result<DiophantineParams> {
        if !(kappa > 0.0 && kappa <= 0.5) {
            return Err(Error::Domain(format!(
                "kappa must lie in (0, 1/2], got {kappa}"
            )));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        Ok(DiophantineParams { kappa, tau })
    }

    /// `τ = 2`.
    pub fn with_default_tau(kappa: f64) -> Result<DiophantineParams> {
        DiophantineParams::new(kappa, 2.0)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Finite-range Diophantine check. `passed` means "no violation up to
/// `checked_up_to`", never membership.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiophantineVerdict {
    pub passed: bool,
    /// The `n` minimizing `‖nω‖ / modulus(n)`; 0 when nothing was checked.
    pub worst_n: u64,
    /// `‖nω‖ / modulus(n)` at `worst_n`; below 1 means violation.
    pub worst_margin: f64,
    pub checked_up_to: u64,
}

struct DistanceOracle {
    p: BigUint,
    q: BigUint,
}

impl DistanceOracle {
    fn new(freq: &Frequency, n_max: u64) -> DistanceOracle {
        let need = BigUint::from(n_max.max(1)) << 70u32;
        let mut last = Convergent {
            p: BigUint::zero(),
            q: BigUint::one(),
        };
        for c in freq.convergent_iter() {
            let done = c.q >= need;
            last = c;
            if done {
                break;
            }
        }
        DistanceOracle {
            p: last.p,
            q: last.q,
        }
    }

    fn dist(&self, n: u64) -> f64 {
        let r = (BigUint::from(n) * &self.p).mod_floor(&self.q);
        let other = &self.q - &r;
        let d = if r < other { r } else { other };
        ratio_to_f64(&d, &self.q)
    }
}

fn diophantine_scan(
    omega: &Frequency,
    n_range: u64,
    modulus: impl Fn(f64) -> f64,
) -> DiophantineVerdict {
    if n_range == 0 {
        return DiophantineVerdict {
            passed: true,
            worst_n: 0,
            worst_margin: f64::INFINITY,
            checked_up_to: 0,
        };
    }
    let oracle = DistanceOracle::new(omega, n_range);
    let mut worst_n = 0;
    let mut worst = f64::INFINITY;
    for n in 1..=n_range {
        let m = modulus(n as f64);
        let margin = if m == 0.0 {
            f64::INFINITY
        } else {
            oracle.dist(n) / m
        };
        if margin < worst {
            worst = margin;
            worst_n = n;
        }
    }
    if worst_n == 0 {
        worst_n = 1;
    }
    DiophantineVerdict {
        passed: worst >= 1.0,
        worst_n,
        worst_margin: worst,
        checked_up_to: n_range,
    }
}

/// Checks `‖nω‖ ≥ κ/n^τ` for `1 ≤ n ≤ n_range` (negative `n` are symmetric).
pub fn check_dc(omega: &Frequency, params: DiophantineParams, n_range: u64) -> DiophantineVerdict {
    diophantine_scan(omega, n_range, |n| params.kappa / n.powf(params.tau))
}

/// Checks `‖nω‖ ≥ κ/(n (log(n+1))²)` for `1 ≤ n ≤ n_range`. `κ = 0` is vacuous.
pub fn check_sdc(omega: &Frequency, kappa: f64, n_range: u64) -> Result<DiophantineVerdict> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!(
            "kappa must be finite and ≥ 0, got {kappa}"
        )));
    }
    Ok(diophantine_scan(omega, n_range, |n| {
        let l = (n + 1.0).ln();
        kappa / (n * l * l)
    }))
}

/// Construction parameters for Liouville-type frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleSpec {
    pub target_beta: f64,
    /// Coefficients forced at the front of the expansion.
    pub prefix: Vec<BigUint>,
    /// After the prefix, coefficients are 1 until `q_n ≥ start_q`.
    pub start_q: u64,
    /// Largest admissible bit length of one coefficient.
    pub max_bits: u64,
}

impl LiouvilleSpec {
    pub fn new(target_beta: f64) -> LiouvilleSpec {
        LiouvilleSpec {
            target_beta,
            prefix: Vec::new(),
            start_q: BETA_STAGE_FLOOR,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

/// `max(1, round(e^{β q}/q))` as a big integer, within the bit budget.
pub fn liouville_coefficient(target_beta: f64, q: &BigUint, max_bits: u64) -> Result<BigUint> {
    let qf = big_to_f64(q);
    if !qf.is_finite() {
        return Err(Error::Resource(format!(
            "q_n has {} bits; e^(β q_n) is beyond any precision budget",
            q.bits()
        )));
    }
    let x = target_beta * qf - qf.ln();
    let bits = x / LN_2;
    if bits > max_bits as f64 {
        return Err(Error::Resource(format!(
            "Liouville coefficient needs ~{bits:.0} bits (budget {max_bits}) at q_n = {qf:e}"
        )));
    }
    if x < 50.0 {
        let a = x.exp().round().max(1.0);
        return Ok(BigUint::from(a as u64));
    }
    let m = bits.floor();
    let mant = (2f64.powf(bits - m) * (1u64 << 52) as f64).round() as u64;
    Ok(BigUint::from(mant) << (m as u64 - 52))
}

/// Liouville-type frequency with `n_terms` coefficients following
/// `a_{n+1} = max(1, round(e^{β q_n}/q_n))` once `q_n ≥ 100`.
pub fn make_liouville(target_beta: f64, n_terms: usize) -> Result<Frequency> {
    make_liouville_with(&LiouvilleSpec::new(target_beta), n_terms)
}

pub fn make_liouville_with(spec: &LiouvilleSpec, n_terms: usize) -> Result<Frequency> {
    if !(spec.target_beta > 0.0 && spec.target_beta.is_finite()) {
        return Err(Error::Domain(format!(
            "target beta must be positive, got {}",
            spec.target_beta
        )));
    }
    if n_terms < spec.prefix.len() {
        return Err(Error::Precondition(format!(
            "n_terms {n_terms} shorter than the forced prefix ({})",
            spec.prefix.len()
        )));
    }
    let start = BigUint::from(spec.start_q);
    let mut coeffs = spec.prefix.clone();
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for a in &coeffs {
        let next = a * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, next);
    }
    while coeffs.len() < n_terms {
        let a = if q < start {
            BigUint::one()
        } else {
            liouville_coefficient(spec.target_beta, &q, spec.max_bits)?
        };
        let next = &a * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, next);
        coeffs.push(a);
    }
    Frequency::from_parts(
        coeffs,
        Vec::new(),
        format!("liouville beta={}", spec.target_beta),
    )
}

/// Liouville-type frequency inside `B_δ(ω₀)`: copies `ω₀`'s coefficients until
/// the continued-fraction cylinder has diameter `1/(q_m(q_m+q_{m-1})) < δ`,
/// then applies the Liouville rule immediately.
pub fn make_liouville_near(
    omega0: &Frequency,
    delta: f64,
    target_beta: f64,
    n_terms: usize,
) -> Result<Frequency> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let mut prefix = Vec::new();
    let mut q_prev = BigUint::zero();
    for (i, c) in omega0.convergent_iter().enumerate() {
        prefix.push(
            omega0
                .coefficient(i + 1)
                .expect("coefficient exists")
                .into_owned(),
        );
        let diam = 1.0 / (big_to_f64(&c.q) * big_to_f64(&(&c.q + &q_prev)));
        if diam < delta {
            break;
        }
        q_prev = c.q;
    }
    let spec = LiouvilleSpec {
        target_beta,
        prefix,
        start_q: 0,
        max_bits: DEFAULT_MAX_BITS,
    };
    let mut freq = make_liouville_with(&spec, n_terms)?;
    freq.note = format!("liouville beta={target_beta} near {}", omega0.value());
    Ok(freq)
}

/// Natural log of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * LN_2
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `num / den` as `f64`, accurate for very small and very large ratios.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let scaled = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mant = scaled.to_f64().expect("about 64 bits");
    scale_pow2(mant, -shift)
}

fn scale_pow2(x: f64, mut e: i64) -> f64 {
    let mut out = x;
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    out * 2f64.powi(e as i32)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Small(u64),
    Big(String),
}

impl From<&BigUint> for CoeffJson {
    fn from(a: &BigUint) -> Self {
        match a.to_u64() {
            Some(v) => CoeffJson::Small(v),
            None => CoeffJson::Big(a.to_str_radix(10)),
        }
    }
}

impl CoeffJson {
    fn into_big(self) -> std::result::Result<BigUint, String> {
        match self {
            CoeffJson::Small(v) => Ok(BigUint::from(v)),
            CoeffJson::Big(s) => BigUint::parse_bytes(s.as_bytes(), 10)
                .ok_or_else(|| format!("invalid coefficient `{s}`")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FrequencyJson {
    cf: Vec<CoeffJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    repeat: Vec<CoeffJson>,
    #[serde(default)]
    note: String,
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FrequencyJson {
            cf: self.prefix.iter().map(CoeffJson::from).collect(),
            repeat: self.repeat.iter().map(CoeffJson::from).collect(),
            note: self.note.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FrequencyJson::deserialize(deserializer)?;
        let conv = |v: Vec<CoeffJson>| {
            v.into_iter()
                .map(CoeffJson::into_big)
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        let prefix = conv(raw.cf).map_err(D::Error::custom)?;
        let repeat = conv(raw.repeat).map_err(D::Error::custom)?;
        Frequency::from_parts(prefix, repeat, raw.note).map_err(D::Error::custom)
    }
}
