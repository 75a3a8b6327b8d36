//! Integer polynomials and certified isolation of the smallest root in `(0, 1)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Polynomial in `t` with integer coefficients; `coeffs[i]` multiplies `tⁱ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `Σ wᵢ tⁱ` for a binary word.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::new(bits.iter().map(|&b| BigInt::from(b)).collect())
    }

    /// The monomial `tⁿ`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        IntPoly { coeffs: c }
    }

    /// `1 - tᵖ`.
    pub fn one_minus_pow(p: usize) -> Self {
        &Self::from_i64(&[1]) - &Self::monomial(p)
    }

    /// Cyclotomic polynomial `Φ_d`.
    pub fn cyclotomic(d: usize) -> Self {
        let mut p = &Self::monomial(d) - &Self::from_i64(&[1]);
        for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
            p = p.div_exact(&Self::cyclotomic(e)).expect("cyclotomic division is exact");
        }
        p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Exact quotient, or `None` when `d` does not divide `self` over the integers.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(IntPoly::default());
        }
        let n = self.degree()?;
        if n < dd {
            return None;
        }
        let lead = &d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &rem[i + dd];
            if c.is_zero() {
                continue;
            }
            let (quot, r) = c.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &quot * dj;
            }
            q[i] = quot;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPoly::new(q))
    }

    /// Divides out every factor `t` and `t - 1`.
    pub fn strip_zero_and_one(&self) -> IntPoly {
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let mut p = IntPoly::new(self.coeffs[lead..].to_vec());
        let phi1 = IntPoly::from_i64(&[-1, 1]);
        while let Some(q) = p.div_exact(&phi1) {
            if q.is_zero() {
                break;
            }
            p = q;
        }
        p
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `P(num / 2^exp) · 2^{exp·deg}` computed exactly.
    fn eval_scaled(&self, x: &Dyadic) -> BigInt {
        let n = match self.degree() {
            Some(n) => n,
            None => return BigInt::zero(),
        };
        let num = BigInt::from(x.num);
        let mut acc = self.coeffs[n].clone();
        for i in (0..n).rev() {
            acc = acc * &num + (&self.coeffs[i] << (x.exp as usize * (n - i)));
        }
        acc
    }

    /// Exact sign of `P(x)`.
    pub fn sign_at(&self, x: &Dyadic) -> Ordering {
        if let Some(s) = self.sign_at_fast(x) {
            return s;
        }
        self.eval_scaled(x).sign().cmp_zero()
    }

    /// Floating-point Horner evaluation with a running error bound; `None` when
    /// the bound does not certify the sign.
    fn sign_at_fast(&self, x: &Dyadic) -> Option<Ordering> {
        let n = self.coeffs.len();
        if n == 0 || x.num >= 1 << 53 {
            return None;
        }
        let t = x.to_f64();
        let (mut v, mut abs) = (0.0f64, 0.0f64);
        for c in self.coeffs.iter().rev() {
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            v = v * t + cf;
            abs = abs * t + cf.abs();
        }
        let bound = (2 * n + 4) as f64 * f64::EPSILON * abs;
        if !v.is_finite() || !bound.is_finite() {
            return None;
        }
        if v > bound {
            Some(Ordering::Greater)
        } else if v < -bound {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Number of sign variations of `P` on the open interval `(lo, hi)` after the
    /// Möbius map `x ↦ (lo + hi·x)/(1 + x)`; an upper bound on the root count
    /// with the same parity.
    fn descartes(&self, lo: &Dyadic, hi: &Dyadic) -> usize {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return 0,
        };
        let e = lo.exp.max(hi.exp);
        let a = BigInt::from(lo.num) << (e - lo.exp) as usize;
        let b = BigInt::from(hi.num) << (e - hi.exp) as usize;
        let w = &b - &a;
        // P(a/2^e + w/2^e · x) · 2^{e·n}
        let mut acc: Vec<BigInt> = vec![self.coeffs[n].clone()];
        for i in (0..n).rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 1];
            for (j, c) in acc.iter().enumerate() {
                next[j] += c * &a;
                next[j + 1] += c * &w;
            }
            next[0] += &self.coeffs[i] << (e as usize * (n - i));
            acc = next;
        }
        acc.reverse();
        for i in 0..n {
            for j in (i..n).rev() {
                let v = acc[j + 1].clone();
                acc[j] += v;
            }
        }
        sign_variations(&acc)
    }
}

fn sign_variations(c: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for x in c {
        let s = match x.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => continue,
        };
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::default();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("t")?,
                (1, false) => write!(f, "{mag}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{mag}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Dyadic rational `num / 2^exp`, kept in lowest terms by [`Dyadic::new`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub exp: u32,
}

impl Dyadic {
    /// Builds `num / 2^exp` in lowest terms.
    pub fn new(num: u64, exp: u32) -> Self {
        Dyadic { num, exp }.reduced()
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    fn lift(self, exp: u32) -> u64 {
        self.num << (exp - self.exp)
    }

    /// Midpoint, exact.
    pub fn midpoint(self, other: Dyadic) -> Dyadic {
        let e = self.exp.max(other.exp) + 1;
        Dyadic::new((self.lift(e) + other.lift(e)) / 2, e)
    }

    fn reduced(mut self) -> Dyadic {
        while self.exp > 0 && self.num.is_multiple_of(2) {
            self.num /= 2;
            self.exp -= 1;
        }
        self
    }

    /// `other - self` as an `f64`.
    pub fn width_to(self, other: Dyadic) -> f64 {
        let e = self.exp.max(other.exp);
        (other.lift(e) - self.lift(e)) as f64 / (e as f64).exp2()
    }
}

/// Outcome of the smallest-root search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBracket {
    pub lo: Dyadic,
    pub hi: Dyadic,
    /// Set when the root was only found as a persistent cluster (even multiplicity
    /// or nearby roots) rather than through a sign change.
    pub tangential: bool,
}

impl RootBracket {
    pub fn midpoint(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }
}

/// Exponent of the coarse scan grid.
pub const SCAN_BITS: u32 = 16;
/// Bracket width target and subdivision floor, `2⁻⁴⁰ < 1e-12`.
pub const ROOT_BITS: u32 = 40;

/// Smallest root of `p` in the open interval `(0, 1)`.
pub fn smallest_root_in_unit(p: &IntPoly) -> Option<RootBracket> {
    let p = p.strip_zero_and_one();
    if p.degree().unwrap_or(0) == 0 {
        return None;
    }
    let s0 = p.constant_term().sign().cmp_zero();
    let grid = 1u64 << SCAN_BITS;
    let hit = (1..grid).find(|&k| p.sign_at(&Dyadic::new(k, SCAN_BITS)) != s0);
    let hi = hit.map_or(Dyadic::new(1, 0), |k| Dyadic::new(k, SCAN_BITS));
    leftmost_root(&p, Dyadic::new(0, 0), hi, hit.is_some())
}

enum Item {
    Open(Dyadic, Dyadic),
    Point(Dyadic),
}

/// Leftmost root in `(lo, hi)`, plus `hi` itself when `include_hi`.
fn leftmost_root(p: &IntPoly, lo: Dyadic, hi: Dyadic, include_hi: bool) -> Option<RootBracket> {
    let floor = 1.0 / (ROOT_BITS as f64).exp2();
    let mut stack = Vec::new();
    if include_hi {
        stack.push(Item::Point(hi));
    }
    stack.push(Item::Open(lo, hi));
    while let Some(item) = stack.pop() {
        match item {
            Item::Point(x) => {
                if p.sign_at(&x) == Ordering::Equal {
                    return Some(RootBracket { lo: x, hi: x, tangential: false });
                }
            }
            Item::Open(l, r) => match p.descartes(&l, &r) {
                0 => {}
                1 => return Some(bisect(p, l, r)),
                _ if l.width_to(r) <= floor => {
                    return Some(RootBracket { lo: l, hi: r, tangential: true });
                }
                _ => {
                    let m = l.midpoint(r);
                    stack.push(Item::Open(m, r));
                    stack.push(Item::Point(m));
                    stack.push(Item::Open(l, m));
                }
            },
        }
    }
    None
}

/// Bisection on a sign change; `(l, r)` holds exactly one simple root.
fn bisect(p: &IntPoly, mut l: Dyadic, mut r: Dyadic) -> RootBracket {
    let floor = 1.0 / (ROOT_BITS as f64).exp2();
    let sl = p.sign_at(&l);
    while l.width_to(r) > floor {
        let m = l.midpoint(r);
        match p.sign_at(&m) {
            Ordering::Equal => return RootBracket { lo: m, hi: m, tangential: false },
            s if s == sl => l = m,
            _ => r = m,
        }
    }
    RootBracket { lo: l, hi: r, tangential: false }
}
