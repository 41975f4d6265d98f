//! Exact arithmetic in the ground field.
//!
//! Everything downstream works over `Q(q_s)` where `q_s = q^{1/d}`. All
//! exponents live on the integer `q_s`-grid, so a Laurent polynomial is a
//! finite map from integer exponents to arbitrary-precision rationals, and a
//! rational function is a reduced fraction of two of them with a canonical
//! denominator. Canonical forms make equality decidable and hashing stable.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;

/// Laurent polynomial in `q_s` over the rationals.
///
/// Invariant: no zero coefficients are stored; the zero polynomial is the
/// empty map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    pub fn monomial(exp: i64, coeff: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        Self { coeffs }
    }

    /// `q_s^exp`.
    pub fn q_power(exp: i64) -> Self {
        Self::monomial(exp, BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::monomial(0, r)
    }

    /// Balanced q-integer `[n] = (t^n - t^{-n})/(t - t^{-1})` evaluated at
    /// `t = q_s^exp_unit`, as a Laurent polynomial.
    pub fn q_int(n: u64, exp_unit: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for k in 0..n {
            let e = (n as i64 - 1 - 2 * k as i64) * exp_unit;
            *coeffs.entry(e).or_insert_with(BigRational::zero) += BigRational::one();
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { coeffs }
    }

    /// `[n]! = [n][n-1]...[1]` at `t = q_s^exp_unit`.
    pub fn q_factorial(n: u64, exp_unit: i64) -> Self {
        let mut acc = Self::one();
        for k in 1..=n {
            acc = &acc * &Self::q_int(k, exp_unit);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).map_or(false, |c| c.is_one())
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Coefficient of the highest exponent.
    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next_back()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiply by `q_s^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }

    /// Substitute `q_s -> q_s^{-1}`.
    pub fn bar(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// True when all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Dense vector of coefficients after shifting the lowest exponent to 0,
    /// together with that shift. Used by the Euclidean routines.
    fn to_dense(&self) -> (Vec<BigRational>, i64) {
        match self.min_exp() {
            None => (vec![], 0),
            Some(lo) => {
                let hi = self.max_exp().unwrap();
                let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
                for (e, c) in &self.coeffs {
                    v[(e - lo) as usize] = c.clone();
                }
                (v, lo)
            }
        }
    }

    fn from_dense(v: Vec<BigRational>, shift: i64) -> Self {
        let coeffs = v
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64 + shift, c))
            .collect();
        Self { coeffs }
    }

    /// Build from dense coefficients with the given lowest exponent.
    pub fn from_dense_pub(v: Vec<BigRational>, shift: i64) -> Self {
        Self::from_dense(v, shift)
    }

    /// Exact division; `None` if the division leaves a remainder.
    pub fn exact_div(&self, other: &Self) -> Option<Self> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (mut a, sa) = self.to_dense();
        let (b, sb) = other.to_dense();
        if a.len() < b.len() {
            return None;
        }
        let mut q = vec![BigRational::zero(); a.len() - b.len() + 1];
        let lead = b.last().unwrap().clone();
        for k in (0..q.len()).rev() {
            let c = &a[k + b.len() - 1] / &lead;
            if !c.is_zero() {
                for (j, bj) in b.iter().enumerate() {
                    let t = &c * bj;
                    a[k + j] -= t;
                }
            }
            q[k] = c;
        }
        if a.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_dense(q, sa - sb))
    }

    /// Monic gcd (lowest exponent 0) of two Laurent polynomials, computed by
    /// shifting to ordinary polynomials and running the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.normalize_assoc();
        }
        if other.is_zero() {
            return self.normalize_assoc();
        }
        let (mut a, _) = self.to_dense();
        let (mut b, _) = other.to_dense();
        while b.iter().any(|c| !c.is_zero()) {
            let r = poly_rem(&a, &b);
            a = b;
            b = r;
        }
        Self::from_dense(a, 0).normalize_assoc()
    }

    /// Canonical associate: lowest exponent 0 and lowest coefficient 1.
    fn normalize_assoc(&self) -> Self {
        match self.min_exp() {
            None => Self::zero(),
            Some(lo) => {
                let c0 = self.coeff(lo);
                self.shift(-lo).scale(&c0.recip())
            }
        }
    }
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let deg_b = b.iter().rposition(|c| !c.is_zero()).expect("nonzero divisor");
    let mut r: Vec<BigRational> = a.to_vec();
    let lead = b[deg_b].clone();
    while let Some(deg_r) = r.iter().rposition(|c| !c.is_zero()) {
        if deg_r < deg_b {
            break;
        }
        let c = &r[deg_r] / &lead;
        for j in 0..=deg_b {
            let t = &c * &b[j];
            r[deg_r - deg_b + j] -= t;
        }
    }
    while r.last().map_or(false, |c| c.is_zero()) {
        r.pop();
    }
    r
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &rhs.coeffs {
            let entry = coeffs.entry(*e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(e);
            }
        }
        LaurentPoly { coeffs }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                let entry = coeffs.entry(ea + eb).or_insert_with(BigRational::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentPoly { coeffs }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && *e != 0;
            if !unit_coeff {
                write!(f, "{}", mag)?;
            }
            if *e != 0 {
                if !unit_coeff {
                    write!(f, "*")?;
                }
                if *e == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_laurent(s)
    }
}

/// Order of vanishing at `q_s = infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrdAtInfinity {
    Finite(i64),
    Infinite,
}

impl OrdAtInfinity {
    pub fn at_least(self, n: i64) -> bool {
        match self {
            OrdAtInfinity::Finite(k) => k >= n,
            OrdAtInfinity::Infinite => true,
        }
    }
}

impl fmt::Display for OrdAtInfinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdAtInfinity::Finite(k) => write!(f, "{}", k),
            OrdAtInfinity::Infinite => write!(f, "+inf"),
        }
    }
}

/// Reduced rational function in `q_s`.
///
/// Canonical form: the fraction is reduced, and the denominator has lowest
/// exponent 0 with lowest coefficient 1. Equality and hashing go through this
/// form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Self { num, den };
        r.canonicalize();
        r
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        // Shift both to ordinary polynomials, remember the net q-power.
        let shift_n = self.num.min_exp().unwrap();
        let shift_d = self.den.min_exp().unwrap();
        let n = self.num.shift(-shift_n);
        let d = self.den.shift(-shift_d);
        let g = n.gcd(&d);
        let mut n = n.exact_div(&g).expect("gcd divides numerator");
        let mut d = d.exact_div(&g).expect("gcd divides denominator");
        // Denominator monic by lowest exponent.
        let lo = d.min_exp().unwrap();
        let c0 = d.coeff(lo);
        d = d.shift(-lo).scale(&c0.recip());
        n = n.shift(shift_n - shift_d + lo).scale(&c0.recip());
        self.num = n;
        self.den = d;
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_laurent(LaurentPoly::from_int(n))
    }

    pub fn q_power(exp: i64) -> Self {
        Self::from_laurent(LaurentPoly::q_power(exp))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    /// The Laurent polynomial, if the denominator is 1.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Membership in `Z[q_s, q_s^{-1}]`.
    pub fn is_integral_laurent(&self) -> bool {
        self.as_laurent().map_or(false, LaurentPoly::is_integral)
    }

    /// Membership in `q_s^{-1} Z[q_s^{-1}]`.
    pub fn in_qinv_z(&self) -> bool {
        match self.as_laurent() {
            None => false,
            Some(p) => p.is_integral() && p.max_exp().map_or(true, |e| e <= -1),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Substitute `q_s -> q_s^{-1}`.
    pub fn bar(&self) -> Self {
        Self::new(self.num.bar(), self.den.bar())
    }

    /// `ord_infinity(f)`: top degree of denominator minus top degree of
    /// numerator; `Infinite` for f = 0. `f` is regular at `q_s = infinity`
    /// iff the result is >= 0.
    pub fn ord_at_infinity(&self) -> OrdAtInfinity {
        match (self.num.max_exp(), self.den.max_exp()) {
            (None, _) => OrdAtInfinity::Infinite,
            (Some(n), Some(d)) => OrdAtInfinity::Finite(d - n),
            (Some(_), None) => unreachable!("denominator is never zero"),
        }
    }
}

impl Default for RationalFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &RationalFunc {
    type Output = RationalFunc;
    fn add(self, rhs: &RationalFunc) -> RationalFunc {
        RationalFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunc {
    type Output = RationalFunc;
    fn sub(self, rhs: &RationalFunc) -> RationalFunc {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunc {
    type Output = RationalFunc;
    fn neg(self) -> RationalFunc {
        RationalFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunc {
    type Output = RationalFunc;
    fn mul(self, rhs: &RationalFunc) -> RationalFunc {
        RationalFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl std::str::FromStr for RationalFunc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            if let Some(split) = rest.find(")/(") {
                let num = parse_laurent(&rest[..split])?;
                let den_str = &rest[split + 3..];
                let den_str = den_str
                    .strip_suffix(')')
                    .ok_or_else(|| Error::parse("unterminated denominator"))?;
                let den = parse_laurent(den_str)?;
                if den.is_zero() {
                    return Err(Error::parse("zero denominator"));
                }
                return Ok(RationalFunc::new(num, den));
            }
        }
        Ok(RationalFunc::from_laurent(parse_laurent(s)?))
    }
}

/// Parser for the textual rendering `a*q^n + ...` (with `q` standing for
/// `q_s`). Round-trips with `Display` exactly.
fn parse_laurent(s: &str) -> Result<LaurentPoly, Error> {
    let bytes: Vec<char> = s.chars().collect();
    let mut pos = 0usize;
    let mut acc = LaurentPoly::zero();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(Error::parse("empty polynomial"));
    }
    let mut sign = BigRational::one();
    let mut expect_term = true;
    loop {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            if expect_term {
                return Err(Error::parse("dangling sign"));
            }
            break;
        }
        if !expect_term {
            match bytes[pos] {
                '+' => sign = BigRational::one(),
                '-' => sign = -BigRational::one(),
                c => return Err(Error::parse(format!("expected + or -, found '{c}'"))),
            }
            pos += 1;
            expect_term = true;
            continue;
        }
        // Leading sign inside a term (e.g. first term "-q").
        while pos < bytes.len() && (bytes[pos] == '+' || bytes[pos] == '-') {
            if bytes[pos] == '-' {
                sign = -sign;
            }
            pos += 1;
            skip_ws(&mut pos);
        }
        // Coefficient part.
        let mut coeff = BigRational::one();
        let mut saw_coeff = false;
        if pos < bytes.len() && bytes[pos].is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let numer: BigInt = s[start..pos].parse().map_err(|_| Error::parse("bad integer"))?;
            let mut denom = BigInt::one();
            if pos < bytes.len() && bytes[pos] == '/' {
                pos += 1;
                let dstart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if dstart == pos {
                    return Err(Error::parse("missing denominator digits"));
                }
                denom = s[dstart..pos].parse().map_err(|_| Error::parse("bad integer"))?;
                if denom.is_zero() {
                    return Err(Error::parse("zero rational denominator"));
                }
            }
            coeff = BigRational::new(numer, denom);
            saw_coeff = true;
        }
        // Optional '*' then optional q-power.
        skip_ws(&mut pos);
        let mut exp = 0i64;
        let mut saw_q = false;
        if pos < bytes.len() && bytes[pos] == '*' {
            pos += 1;
            skip_ws(&mut pos);
        }
        if pos < bytes.len() && bytes[pos] == 'q' {
            pos += 1;
            saw_q = true;
            exp = 1;
            if pos < bytes.len() && bytes[pos] == '^' {
                pos += 1;
                let mut esign = 1i64;
                if pos < bytes.len() && bytes[pos] == '-' {
                    esign = -1;
                    pos += 1;
                }
                let estart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if estart == pos {
                    return Err(Error::parse("missing exponent digits"));
                }
                exp = esign
                    * s[estart..pos]
                        .parse::<i64>()
                        .map_err(|_| Error::parse("exponent out of range"))?;
            }
        }
        if !saw_coeff && !saw_q {
            return Err(Error::parse("expected term"));
        }
        acc = &acc + &LaurentPoly::monomial(exp, &sign * &coeff);
        sign = BigRational::one();
        expect_term = false;
    }
    Ok(acc)
}

/// Gaussian binomial `[n choose r]` in the variable `q_s^exp_unit`. Always a
/// Laurent polynomial, symmetric under inversion of the variable.
pub fn gauss_binomial(n: u64, r: u64, exp_unit: i64) -> Result<LaurentPoly, Error> {
    if r > n {
        return Err(Error::domain(format!("binomial requires n >= r, got n={n}, r={r}")));
    }
    let mut num = LaurentPoly::one();
    for k in 0..r {
        num = &num * &LaurentPoly::q_int(n - k, exp_unit);
    }
    let den = LaurentPoly::q_factorial(r, exp_unit);
    Ok(num.exact_div(&den).expect("Gaussian binomial is polynomial"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rf(s: &str) -> RationalFunc {
        s.parse().unwrap()
    }

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn ord_at_infinity_examples() {
        // 1/(1-q^-2) = q^2/(q^2-1): degrees equal.
        let f = RationalFunc::new(LaurentPoly::one(), &LaurentPoly::one() - &LaurentPoly::q_power(-2));
        assert_eq!(f.ord_at_infinity(), OrdAtInfinity::Finite(0));
        assert_eq!(RationalFunc::zero().ord_at_infinity(), OrdAtInfinity::Infinite);
        // (q - q^-1)/(q^2 - q^-2) reduces to 1/(q + q^-1).
        let g = RationalFunc::new(lp("q - q^-1"), lp("q^2 - q^-2"));
        assert_eq!(g.ord_at_infinity(), OrdAtInfinity::Finite(1));
    }

    #[test]
    fn q_binomial_examples() {
        assert_eq!(gauss_binomial(2, 1, 1).unwrap(), lp("q + q^-1"));
        assert_eq!(gauss_binomial(7, 0, 1).unwrap(), LaurentPoly::one());
        assert_eq!(gauss_binomial(4, 2, 1).unwrap(), lp("q^4 + q^2 + 2 + q^-2 + q^-4"));
        // On the q_i = q_s^2 grid the exponents dilate.
        assert_eq!(gauss_binomial(2, 1, 2).unwrap(), lp("q^2 + q^-2"));
        assert!(gauss_binomial(1, 2, 1).is_err());
    }

    #[test]
    fn q_binomial_matches_product_formula() {
        // Brute-force: prod (q^{n-k+1}-q^{-(n-k+1)})/(q^k - q^-k) cleared of
        // denominators, as rational functions.
        for n in 0..=6u64 {
            for r in 0..=n {
                let mut prod = RationalFunc::one();
                for k in 1..=r {
                    let num = &LaurentPoly::q_power((n - k + 1) as i64) - &LaurentPoly::q_power(-((n - k + 1) as i64));
                    let den = &LaurentPoly::q_power(k as i64) - &LaurentPoly::q_power(-(k as i64));
                    prod = &prod * &RationalFunc::new(num, den);
                }
                let direct = RationalFunc::from_laurent(gauss_binomial(n, r, 1).unwrap());
                assert_eq!(prod, direct, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn bar_examples() {
        assert_eq!(rf("q^3").bar(), rf("q^-3"));
        let two_q = rf("q + q^-1");
        assert_eq!(two_q.bar(), two_q);
        let f = RationalFunc::new(LaurentPoly::one(), lp("1 - q^-2"));
        let g = RationalFunc::new(LaurentPoly::one(), lp("1 - q^2"));
        assert_eq!(f.bar(), g);
    }

    #[test]
    fn display_parse_round_trip() {
        for s in [
            "q^4 - 2*q^2 + 1",
            "1/2*q - 3 + q^-5",
            "-q + 1",
            "0",
            "7",
            "(q^2)/(q^2 - 1)",
            "(-3/2*q^3 + q)/(q^4 + q^2 + 1)",
        ] {
            let f = rf(s);
            let printed = f.to_string();
            assert_eq!(rf(&printed), f, "round-trip through {printed:?}");
        }
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i64..6, -9i64..9), 0..5).prop_map(|terms| {
            let mut p = LaurentPoly::zero();
            for (e, c) in terms {
                p = &p + &LaurentPoly::monomial(e, BigRational::from_integer(BigInt::from(c)));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn ring_axioms(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn field_axioms_and_bar(a in arb_laurent(), b in arb_laurent()) {
            let fa = RationalFunc::from_laurent(a.clone());
            let fb = RationalFunc::from_laurent(b.clone());
            prop_assert_eq!(fa.bar().bar(), fa.clone());
            if !fb.is_zero() {
                let q = &fa * &fb.recip();
                prop_assert_eq!(&q * &fb, fa.clone());
            }
            if !fa.is_zero() && !fb.is_zero() {
                let prod = &fa * &fb;
                match (fa.ord_at_infinity(), fb.ord_at_infinity(), prod.ord_at_infinity()) {
                    (OrdAtInfinity::Finite(x), OrdAtInfinity::Finite(y), OrdAtInfinity::Finite(z)) => {
                        prop_assert_eq!(x + y, z);
                    }
                    _ => prop_assert!(false, "nonzero inputs must have finite order"),
                }
            }
        }

        #[test]
        fn parse_round_trip(a in arb_laurent()) {
            let printed = a.to_string();
            prop_assert_eq!(printed.parse::<LaurentPoly>().unwrap(), a);
        }
    }
}
